use super::{MultiPoly, PolyError};

/// Fraction-free determinant; every intermediate division is exact.
pub fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(nvars);
    }
    let mut negate = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return MultiPoly::zero(nvars);
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if prev.is_constant() {
                    num.scale(&prev.constant_term().recip())
                } else {
                    num.div_exact(&prev).expect("Bareiss step divides exactly")
                };
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Determinant of the Sylvester matrix of f and g with respect to `var`.
pub fn sylvester_resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::DegenerateInput("resultant of the zero polynomial"));
    }
    let n = f.nvars();
    let fc = f.coeffs_in(var);
    let gc = g.coeffs_in(var);
    let (df, dg) = (fc.len() - 1, gc.len() - 1);
    if df == 0 {
        return Ok(f.pow(dg as u32));
    }
    if dg == 0 {
        return Ok(g.pow(df as u32));
    }
    let size = df + dg;
    let mut m = vec![vec![MultiPoly::zero(n); size]; size];
    for i in 0..dg {
        for (k, c) in fc.iter().rev().enumerate() {
            m[i][i + k] = c.clone();
        }
    }
    for i in 0..df {
        for (k, c) in gc.iter().rev().enumerate() {
            m[dg + i][i + k] = c.clone();
        }
    }
    Ok(bareiss_det(m, n))
}
