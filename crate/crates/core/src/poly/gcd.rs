use super::{Monomial, MultiPoly, PolyError};

fn lead_in(f: &MultiPoly, v: usize) -> MultiPoly {
    let d = f.degree_in(v) as usize;
    f.coeffs_in(v).swap_remove(d)
}

fn content_in(f: &MultiPoly, v: usize) -> MultiPoly {
    let mut c = MultiPoly::zero(f.nvars());
    for k in f.coeffs_in(v) {
        if k.is_zero() {
            continue;
        }
        c = gcd(&c, &k);
        if c.is_constant() {
            break;
        }
    }
    c
}

fn primitive_in(f: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(f, v);
    f.div_exact(&c).expect("content divides").normalized()
}

/// Pseudo-remainder of a by b with respect to v.
fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = b.degree_in(v);
    let lb = lead_in(b, v);
    let mut r = a.clone();
    while !r.is_zero() && r.uses_var(v) && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = lead_in(&r, v);
        let shift = Monomial::unit(v).with_exp(v, (dr - db) as u16);
        let t = (&lr * b).mul_monomial(&shift, &num_traits::One::one());
        r = &(&r * &lb) - &t;
        r = r.normalized();
    }
    r
}

/// Greatest common divisor, normalized to coprime integer coefficients with positive lead.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let n = f.nvars();
    if f.is_zero() {
        return g.normalized();
    }
    if g.is_zero() {
        return f.normalized();
    }
    if f.is_constant() || g.is_constant() {
        return MultiPoly::one(n);
    }
    let v = (0..n).rev().find(|&i| f.uses_var(i) || g.uses_var(i)).unwrap();
    if !f.uses_var(v) {
        return gcd(f, &content_in(g, v));
    }
    if !g.uses_var(v) {
        return gcd(&content_in(f, v), g);
    }
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let c = gcd(&cf, &cg);
    let mut a = f.div_exact(&cf).expect("content divides").normalized();
    let mut b = g.div_exact(&cg).expect("content divides").normalized();
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            break;
        }
        if !r.uses_var(v) {
            return c.normalized();
        }
        a = b;
        b = primitive_in(&r, v);
    }
    (&c * &b).normalized()
}

/// `f / gcd(f, df/dx_1, ..., df/dx_n)`.
pub fn square_free_part(f: &MultiPoly) -> Result<MultiPoly, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut g = f.clone();
    for i in 0..f.nvars() {
        if f.uses_var(i) {
            g = gcd(&g, &f.partial(i));
        }
    }
    Ok(f.div_exact(&g).expect("gcd divides"))
}

/// Whether g divides f exactly.
pub fn divides(g: &MultiPoly, f: &MultiPoly) -> Result<bool, PolyError> {
    if g.is_zero() {
        return Err(PolyError::ZeroDivisor);
    }
    Ok(f.div_exact(g).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn v(i: usize) -> MultiPoly {
        MultiPoly::var(3, i)
    }

    #[test]
    fn gcd_basic() {
        let (x, y, z) = (v(0), v(1), v(2));
        let a = &x + &y;
        let f = &(&a * &a) * &(&z - &MultiPoly::one(3));
        let g = &a * &(&x - &z);
        assert!(gcd(&f, &g).is_scalar_multiple_of(&a));
        assert!(gcd(&x, &y).is_constant());
        let h = &(&x * &y) + &MultiPoly::one(3);
        assert!(gcd(&(&h * &x), &(&h * &z)).is_scalar_multiple_of(&h));
    }

    #[test]
    fn square_free_examples() {
        let (x, y, z) = (v(0), v(1), v(2));
        assert!(square_free_part(&(&x * &x)).unwrap().is_scalar_multiple_of(&x));
        let a = &x + &y;
        let zm1 = &z - &MultiPoly::one(3);
        let f = &a.pow(3) * &zm1;
        assert!(square_free_part(&f).unwrap().is_scalar_multiple_of(&(&a * &zm1)));
        assert_eq!(square_free_part(&MultiPoly::zero(3)), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn divides_examples() {
        let (x, y) = (MultiPoly::var(2, 0), MultiPoly::var(2, 1));
        let one = MultiPoly::one(2);
        let g = &(&(&x * &x) + &(&y * &y)) - &one;
        let f = &g * &(&x.pow(3) - &y);
        assert_eq!(divides(&g, &f), Ok(true));
        assert_eq!(divides(&(&x + &y), &(&(&x * &x) - &(&y * &y))), Ok(true));
        assert_eq!(divides(&x, &(&x + &one)), Ok(false));
        assert_eq!(divides(&MultiPoly::zero(2), &x), Err(PolyError::ZeroDivisor));
        assert_eq!(divides(&x.scale(&q(3)), &(&x * &y)), Ok(true));
    }
}
