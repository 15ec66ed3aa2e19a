//! Polynomial partitioning by iterated simultaneous bisection.
//!
//! Stage `j` lifts every current point class through the monomials of a
//! degree-`d_j` polynomial and searches for a hyperplane in the lifted space
//! that bisects all classes at once. The search is numerical; the returned
//! polynomial always has rational coefficients and its bisection property is
//! checked with exact signs.

use crate::geometry::Point3;
use crate::poly::{MultiPoly, SignEvaluator};
use crate::rational::{q, to_f64, Q};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// deg f <= C_DEG * r^(1/3) for every partition built with the default schedule.
pub const C_DEG: u32 = 9;

const ATTEMPTS: usize = 40;
const RESTARTS: usize = 5;
const ISO_ROUNDS: usize = 20;
const MAX_ITERS: usize = 400;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("degree {degree} lifts to dimension {dim}, fewer than the {sets} sets")]
    BudgetTooSmall { sets: usize, degree: u32, dim: usize },
    #[error("r = {r} must satisfy 2 <= r <= m = {m}")]
    InvalidR { r: usize, m: usize },
    #[error("no verified bisection found for {sets} sets at degree {degree}")]
    SearchExhausted { sets: usize, degree: u32 },
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of nonconstant monomials of degree at most `d` in three variables.
pub fn lift_dimension(d: u32) -> usize {
    binom(d as u64 + 3, 3) as usize - 1
}

/// Smallest degree whose lift can bisect `sets` classes.
pub fn degree_budget(sets: usize) -> u32 {
    let mut d = 1;
    while lift_dimension(d) < sets {
        d += 1;
    }
    d
}

/// `deg <= C_DEG * r^(1/3)`, decided exactly.
pub fn degree_within_bound(deg: u32, r: usize) -> bool {
    (deg as u128).pow(3) <= (C_DEG as u128).pow(3) * r as u128
}

fn monomials(d: u32) -> Vec<[u16; 3]> {
    let mut out = Vec::new();
    for tot in 1..=d as u16 {
        for i in (0..=tot).rev() {
            for j in (0..=tot - i).rev() {
                out.push([i, j, tot - i - j]);
            }
        }
    }
    out
}

/// Exact affine change of coordinates `y = M x + t`.
#[derive(Debug, Clone)]
struct Frame {
    m: [[Q; 3]; 3],
    t: [Q; 3],
}

impl Frame {
    fn apply(&self, x: &Point3) -> [Q; 3] {
        let c = x.coords();
        std::array::from_fn(|i| &self.t[i] + &self.m[i][0] * c[0] + &self.m[i][1] * c[1] + &self.m[i][2] * c[2])
    }

    /// `g(M x + t)` as a polynomial in x.
    fn pullback(&self, g: &MultiPoly) -> MultiPoly {
        let subs: Vec<MultiPoly> = (0..3)
            .map(|i| {
                let mut l = MultiPoly::constant(3, self.t[i].clone());
                for j in 0..3 {
                    l = l + MultiPoly::var(3, j).scale(&self.m[i][j]);
                }
                l
            })
            .collect();
        g.compose(&subs)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn pow2(e: i32) -> Q {
    if e >= 0 {
        Q::from_integer(BigInt::one() << e as usize)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Dyadic center and power-of-two scales from the coordinate medians, then an
/// optional rational rotation `((1-|w|^2) I + 2 w w^T + 2[w]x) / (1+|w|^2)`.
fn make_frame(xs: &[[f64; 3]], rot: Option<[i64; 3]>) -> Frame {
    let mut t: [Q; 3] = Default::default();
    let mut scale: [Q; 3] = Default::default();
    for i in 0..3 {
        let mut col: Vec<f64> = xs.iter().map(|p| p[i]).collect();
        let med = median(&mut col);
        let mut dev: Vec<f64> = col.iter().map(|v| (v - med).abs()).collect();
        let mut mad = median(&mut dev);
        if !(mad > 0.0) || !mad.is_finite() {
            mad = dev.iter().cloned().fold(0.0, f64::max);
        }
        let e = if mad > 0.0 && mad.is_finite() { mad.log2().round().clamp(-900.0, 900.0) as i32 } else { 0 };
        let s = pow2(-e);
        let center = if med.is_finite() { (med * 16.0 / 2f64.powi(e)).round() } else { 0.0 };
        let o = Q::from_float(center).unwrap_or_else(Q::zero) * pow2(e - 4);
        t[i] = -(&o * &s);
        scale[i] = s;
    }
    let mut m: [[Q; 3]; 3] = Default::default();
    for i in 0..3 {
        m[i][i] = scale[i].clone();
    }
    let Some(w) = rot else { return Frame { m, t } };
    let w: [Q; 3] = w.map(q);
    let n2: Q = w.iter().map(|v| v * v).sum();
    let den = Q::one() + &n2;
    let cross = [[q(0), -&w[2], w[1].clone()], [w[2].clone(), q(0), -&w[0]], [-&w[1], w[0].clone(), q(0)]];
    let r: [[Q; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let diag = if i == j { Q::one() - &n2 } else { Q::zero() };
            (diag + q(2) * &w[i] * &w[j] + q(2) * &cross[i][j]) / &den
        })
    });
    let rm: [[Q; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &r[i][k] * &m[k][j]).sum()));
    let rt: [Q; 3] = std::array::from_fn(|i| (0..3).map(|k| &r[i][k] * &t[k]).sum());
    Frame { m: rm, t: rt }
}

/// One lifted bisection problem in a fixed frame.
struct Lifted<'a> {
    mons: Vec<[u16; 3]>,
    ys: Vec<[Q; 3]>,
    yf: Vec<[f64; 3]>,
    sets: &'a [Vec<usize>],
    caps: Vec<usize>,
    /// Rows in the working basis, unit norm.
    b: DMatrix<f64>,
    /// Working coordinates to [monomials..., 1] coordinates.
    back: DMatrix<f64>,
}

fn lift_row(y: &[f64; 3], mons: &[[u16; 3]]) -> Vec<f64> {
    mons.iter().map(|e| y[0].powi(e[0] as i32) * y[1].powi(e[1] as i32) * y[2].powi(e[2] as i32)).collect()
}

fn normalize_rows(b: &mut DMatrix<f64>) {
    for mut row in b.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 && n.is_finite() {
            row /= n;
        }
    }
}

impl<'a> Lifted<'a> {
    fn new(ys: Vec<[Q; 3]>, sets: &'a [Vec<usize>], d: u32, iso: usize) -> Self {
        let mons = monomials(d);
        let yf: Vec<[f64; 3]> = ys.iter().map(|y| [to_f64(&y[0]), to_f64(&y[1]), to_f64(&y[2])]).collect();
        let n = ys.len();
        let dim = mons.len();
        let raw: Vec<Vec<f64>> = yf.iter().map(|y| lift_row(y, &mons)).collect();
        let mut mu = vec![0.0; dim];
        let mut sd = vec![1.0; dim];
        for a in 0..dim {
            let mut col: Vec<f64> = raw.iter().map(|r| r[a]).collect();
            let m = median(&mut col);
            let mut dev: Vec<f64> = col.iter().map(|v| (v - m).abs()).collect();
            let s = median(&mut dev);
            mu[a] = m;
            sd[a] = if s > 1e-12 { s } else { dev.iter().cloned().fold(1e-12, f64::max) };
        }
        let mut b = DMatrix::from_fn(n, dim + 1, |p, a| if a < dim { (raw[p][a] - mu[a]) / sd[a] } else { 1.0 });
        for v in b.iter_mut() {
            if !v.is_finite() {
                *v = 0.0;
            }
        }
        normalize_rows(&mut b);
        // working c maps to scaled coordinates by w
        let mut w = DMatrix::<f64>::identity(dim + 1, dim + 1);
        for _ in 0..iso {
            let cov = b.transpose() * &b / n as f64;
            let eig = cov.symmetric_eigen();
            let mut step = eig.eigenvectors.clone();
            for (j, mut col) in step.column_iter_mut().enumerate() {
                col /= eig.eigenvalues[j].max(1e-14).sqrt();
            }
            b = &b * &step;
            w = &w * &step;
            normalize_rows(&mut b);
        }
        // scaled coordinates to monomial coefficients
        let mut unscale = DMatrix::<f64>::zeros(dim + 1, dim + 1);
        for a in 0..dim {
            unscale[(a, a)] = 1.0 / sd[a];
            unscale[(dim, a)] = -mu[a] / sd[a];
        }
        unscale[(dim, dim)] = 1.0;
        let back = unscale * w;
        let caps = sets.iter().map(|s| s.len().div_ceil(2)).collect();
        Lifted { mons, ys, yf, sets, caps, b, back }
    }

    fn violation(&self, v: &DVector<f64>) -> usize {
        let mut bad = 0;
        for (s, cap) in self.sets.iter().zip(&self.caps) {
            let pos = s.iter().filter(|&&p| v[p] > TOL).count();
            let neg = s.iter().filter(|&&p| v[p] < -TOL).count();
            bad += pos.saturating_sub(*cap) + neg.saturating_sub(*cap);
        }
        bad
    }

    fn sorted_set(&self, s: &[usize], v: &DVector<f64>) -> Vec<usize> {
        let mut o = s.to_vec();
        o.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        o
    }

    /// Removes from c its component along the span of `rows`.
    fn project_out(c: &DVector<f64>, rows: &DMatrix<f64>) -> DVector<f64> {
        let svd = rows.clone().svd(false, true);
        let vt = svd.v_t.expect("requested");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let mut out = c.clone();
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s > 1e-10 * smax {
                let r = vt.row(i).transpose();
                let k = r.dot(&out);
                out -= r * k;
            }
        }
        out
    }

    fn snap(&self, c: &DVector<f64>, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let v = &self.b * c;
        let rows: Vec<usize> = self
            .sets
            .iter()
            .map(|s| {
                let o = self.sorted_set(s, &v);
                let n = o.len();
                if n % 2 == 1 || rng.random_bool(0.5) {
                    o[(n - 1) / 2]
                } else {
                    o[n / 2]
                }
            })
            .collect();
        let a = DMatrix::from_fn(rows.len(), self.b.ncols(), |i, j| self.b[(rows[i], j)]);
        let out = Self::project_out(c, &a);
        let n = out.norm();
        if n > 0.0 {
            out / n
        } else {
            c.clone()
        }
    }

    /// Smoothed sign-balance homotopy; returns a float bisector.
    fn homotopy(&self, rng: &mut ChaCha8Rng) -> Option<DVector<f64>> {
        let k = self.sets.len();
        let n1 = self.b.ncols();
        let sizes: Vec<f64> = self.sets.iter().map(|s| s.len() as f64).collect();
        let max_size = sizes.iter().cloned().fold(1.0, f64::max);
        let mut c = DVector::from_fn(n1, |_, _| rng.sample::<f64, _>(StandardNormal));
        c /= c.norm();
        let mut sigma = 10.0;
        let mut it = 0;
        while sigma > 1e-7 && it < MAX_ITERS {
            it += 1;
            let v = &self.b * &c;
            if self.violation(&v) == 0 {
                return Some(c);
            }
            let cs = self.snap(&c, rng);
            if self.violation(&(&self.b * &cs)) == 0 {
                return Some(cs);
            }
            let mut f = DVector::zeros(k);
            let mut jac = DMatrix::zeros(k, n1);
            for (i, s) in self.sets.iter().enumerate() {
                for &p in s {
                    let th = (v[p] / sigma).tanh();
                    f[i] += th;
                    let w = (1.0 - th * th) / sigma;
                    for a in 0..n1 {
                        jac[(i, a)] += w * self.b[(p, a)];
                    }
                }
                f[i] /= sizes[i];
                for a in 0..n1 {
                    jac[(i, a)] /= sizes[i];
                }
            }
            let jc = &jac * &c;
            jac -= jc * c.transpose();
            let Ok(sol) = jac.svd(true, true).solve(&f, 1e-12) else { break };
            let mut step = -sol;
            let nrm = step.norm();
            if !nrm.is_finite() {
                break;
            }
            if nrm > 0.5 {
                step *= 0.5 / nrm;
            }
            c += step;
            c /= c.norm();
            if f.norm() < 0.5 / max_size.sqrt() || nrm < 1e-8 {
                sigma *= 0.7;
            }
        }
        None
    }

    fn exact_row(&self, p: usize) -> Vec<Q> {
        let y = &self.ys[p];
        let mut row: Vec<Q> = self
            .mons
            .iter()
            .map(|e| {
                let mut t = Q::one();
                for i in 0..3 {
                    for _ in 0..e[i] {
                        t *= &y[i];
                    }
                }
                t
            })
            .collect();
        row.push(Q::one());
        row
    }

    fn poly_from(&self, coeffs: &[Q]) -> MultiPoly {
        let dim = self.mons.len();
        let mut terms: Vec<(Vec<u16>, Q)> =
            self.mons.iter().zip(coeffs).map(|(e, c)| (e.to_vec(), c.clone())).collect();
        terms.push((vec![0, 0, 0], coeffs[dim].clone()));
        MultiPoly::from_terms(3, terms)
    }

    fn verify(&self, g: &MultiPoly) -> bool {
        if g.is_constant() {
            return false;
        }
        let ev = SignEvaluator::new(g);
        self.sets.iter().zip(&self.caps).all(|(s, cap)| {
            let (mut pos, mut neg) = (0, 0);
            for &p in s {
                match ev.sign_with(&self.ys[p], &self.yf[p]) {
                    1 => pos += 1,
                    -1 => neg += 1,
                    _ => {}
                }
                if pos > *cap || neg > *cap {
                    return false;
                }
            }
            true
        })
    }

    /// Centers c on each set's median, rounds, and verifies exactly.
    fn finalize(&self, c: &DVector<f64>) -> Option<MultiPoly> {
        let v = &self.b * c;
        let n1 = self.b.ncols();
        let mut pivots: Vec<(usize, Option<usize>)> = Vec::new();
        let mut rows = DMatrix::zeros(self.sets.len(), n1);
        for (i, s) in self.sets.iter().enumerate() {
            let o = self.sorted_set(s, &v);
            let n = o.len();
            let pair = if n % 2 == 1 { (o[n / 2], None) } else { (o[n / 2 - 1], Some(o[n / 2])) };
            for a in 0..n1 {
                rows[(i, a)] = match pair.1 {
                    None => self.b[(pair.0, a)],
                    Some(b) => 0.5 * (self.b[(pair.0, a)] + self.b[(b, a)]),
                };
            }
            pivots.push(pair);
        }
        let centered = Self::project_out(c, &rows);
        let mut snap_guess = None;
        for t in [1.0, 0.5, 0.25, 0.0] {
            let mut cand = c * (1.0 - t) + &centered * t;
            let nrm = cand.norm();
            if !(nrm > 0.0) {
                continue;
            }
            cand /= nrm;
            if self.violation(&(&self.b * &cand)) > 0 {
                continue;
            }
            let mono = &self.back * &cand;
            let scale = mono.iter().cloned().fold(0.0, |m: f64, x| m.max(x.abs()));
            if !(scale > 0.0) || !scale.is_finite() {
                continue;
            }
            let top = scale.log2().floor() as i32;
            let round = |bits: i32| -> Vec<Q> {
                mono.iter()
                    .map(|x| Q::from_float((x * 2f64.powi(bits - top)).round()).unwrap_or_else(Q::zero) * pow2(top - bits))
                    .collect()
            };
            for bits in [24, 32, 40, 48] {
                let g = self.poly_from(&round(bits));
                if self.verify(&g) {
                    return Some(g);
                }
            }
            if t == 1.0 {
                let vc = &self.b * &cand;
                let near: Vec<usize> = (0..vc.len()).filter(|&p| vc[p].abs() < 1e-8).collect();
                snap_guess = Some((round(40), near));
            }
        }
        let (guess, near) = snap_guess?;
        let mut exact: Vec<Vec<Q>> = pivots
            .iter()
            .map(|&(a, b)| match b {
                None => self.exact_row(a),
                Some(b) => self
                    .exact_row(a)
                    .iter()
                    .zip(self.exact_row(b))
                    .map(|(x, y)| (x + y) / q(2))
                    .collect(),
            })
            .collect();
        let mut seen: Vec<&[Q; 3]> = Vec::new();
        for p in near {
            if !seen.contains(&&self.ys[p]) {
                seen.push(&self.ys[p]);
                exact.push(self.exact_row(p));
            }
        }
        let sol = solve_with_guess(exact, &guess)?;
        let g = self.poly_from(&sol);
        self.verify(&g).then_some(g)
    }
}

/// A vector in the kernel of `rows`, taking free coordinates from `guess`.
fn solve_with_guess(mut rows: Vec<Vec<Q>>, guess: &[Q]) -> Option<Vec<Q>> {
    let n = guess.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut x = guess.to_vec();
    for (i, &pc) in pivots.iter().enumerate() {
        let mut v = Q::zero();
        for j in 0..n {
            if j != pc && !pivots.contains(&j) {
                v -= &rows[i][j] * &x[j];
            }
        }
        x[pc] = v;
    }
    x.iter().any(|v| !v.is_zero()).then_some(x)
}

fn point_f64(p: &Point3) -> [f64; 3] {
    p.to_f64()
}

/// Bisects every class in `sets` (indices into `points`) with one polynomial
/// of degree at most `degree`. Classes of size below 2 are ignored.
fn bisect_classes(
    points: &[Point3],
    sets: &[Vec<usize>],
    degree: u32,
    rng: &mut ChaCha8Rng,
) -> Result<MultiPoly, PartitionError> {
    let live: Vec<&Vec<usize>> = sets.iter().filter(|s| s.len() >= 2).collect();
    if live.len() > lift_dimension(degree) {
        return Err(PartitionError::BudgetTooSmall { sets: live.len(), degree, dim: lift_dimension(degree) });
    }
    if live.is_empty() {
        return Ok(MultiPoly::one(3));
    }
    // rows are the concatenated live classes
    let mut order = Vec::new();
    let mut local = Vec::new();
    for s in &live {
        local.push((order.len()..order.len() + s.len()).collect::<Vec<_>>());
        order.extend(s.iter().copied());
    }
    let xs: Vec<[f64; 3]> = order.iter().map(|&i| point_f64(&points[i])).collect();
    for attempt in 0..ATTEMPTS {
        let rot = (attempt >= 2).then(|| loop {
            let w: [i64; 3] = std::array::from_fn(|_| rng.random_range(-3..=3));
            if w != [0, 0, 0] {
                break w;
            }
        });
        let frame = make_frame(&xs, rot);
        let ys: Vec<[Q; 3]> = order.iter().map(|&i| frame.apply(&points[i])).collect();
        let iso = if attempt % 2 == 0 { ISO_ROUNDS } else { 0 };
        let lifted = Lifted::new(ys, &local, degree, iso);
        for _ in 0..RESTARTS {
            if let Some(c) = lifted.homotopy(rng) {
                if let Some(g) = lifted.finalize(&c) {
                    return Ok(frame.pullback(&g).normalized());
                }
            }
        }
    }
    Err(PartitionError::SearchExhausted { sets: live.len(), degree })
}

/// One polynomial of degree at most `degree` leaving at most ceil(|S|/2)
/// points of each set strictly on either side.
pub fn bisecting_polynomial(point_sets: &[Vec<Point3>], degree: u32, seed: u64) -> Result<MultiPoly, PartitionError> {
    let points: Vec<Point3> = point_sets.iter().flatten().cloned().collect();
    let mut sets = Vec::new();
    let mut at = 0;
    for s in point_sets {
        sets.push((at..at + s.len()).collect::<Vec<_>>());
        at += s.len();
    }
    if point_sets.len() > lift_dimension(degree) {
        return Err(PartitionError::BudgetTooSmall { sets: point_sets.len(), degree, dim: lift_dimension(degree) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bisect_classes(&points, &sets, degree, &mut rng)
}

/// Sign vector over the factor list, printed as a string over {-, 0, +}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn is_zero_free(&self) -> bool {
        self.0.iter().all(|&s| s != 0)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Partition {
    pub factors: Vec<MultiPoly>,
    pub r: usize,
    pub m: usize,
    pub signs: Vec<SignVector>,
    pub cell_index: BTreeMap<SignVector, Vec<usize>>,
}

impl Partition {
    pub fn product(&self) -> MultiPoly {
        self.factors.iter().fold(MultiPoly::one(3), |acc, f| acc * f)
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.degree()).sum()
    }

    pub fn cell_cap(&self) -> usize {
        self.m.div_ceil(self.r)
    }

    /// Indices of points on Z(f).
    pub fn zero_set_points(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| !self.signs[i].is_zero_free()).collect()
    }

    pub fn open_cells(&self) -> impl Iterator<Item = (&SignVector, &Vec<usize>)> {
        self.cell_index.iter().filter(|(s, _)| s.is_zero_free())
    }

    pub fn evaluators(&self) -> Vec<SignEvaluator> {
        self.factors.iter().map(SignEvaluator::new).collect()
    }

    pub fn stats(&self) -> PartitionStats {
        partition_stats(self)
    }

    pub fn report(&self) -> PartitionReport {
        PartitionReport {
            r: self.r,
            m: self.m,
            degree: self.degree(),
            factors: self.factors.iter().map(|f| f.to_canonical()).collect(),
            cells: self
                .cell_index
                .iter()
                .map(|(s, pts)| CellEntry { signs: s.to_string(), size: pts.len(), points: pts.clone() })
                .collect(),
            stats: self.stats(),
        }
    }
}

fn sign_vectors(points: &[Point3], factors: &[MultiPoly]) -> Vec<SignVector> {
    let evs: Vec<SignEvaluator> = factors.iter().map(SignEvaluator::new).collect();
    points
        .par_iter()
        .map(|p| {
            let x = p.to_array();
            let xf = p.to_f64();
            SignVector(evs.iter().map(|e| e.sign_with(&x, &xf)).collect())
        })
        .collect()
}

/// Assembles a partition from given factors, indexing points by sign vector.
pub fn partition_from_factors(points: &[Point3], factors: Vec<MultiPoly>, r: usize) -> Partition {
    let signs = sign_vectors(points, &factors);
    let mut cell_index: BTreeMap<SignVector, Vec<usize>> = BTreeMap::new();
    for (i, s) in signs.iter().enumerate() {
        cell_index.entry(s.clone()).or_default().push(i);
    }
    Partition { factors, r, m: points.len(), signs, cell_index }
}

/// Builds an r-partitioning polynomial by ceil(log2 r) bisection stages.
pub fn build_partition(points: &[Point3], r: usize, seed: u64) -> Result<Partition, PartitionError> {
    let m = points.len();
    if r < 2 || r > m {
        return Err(PartitionError::InvalidR { r, m });
    }
    let stages = usize::BITS - (r - 1).leading_zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<Vec<usize>> = vec![(0..m).collect()];
    let mut factors = Vec::new();
    for _ in 0..stages {
        let live = classes.iter().filter(|c| c.len() >= 2).count();
        let mut d = degree_budget(live.max(1));
        let g = loop {
            match bisect_classes(points, &classes, d, &mut rng) {
                Ok(g) => break g,
                Err(PartitionError::SearchExhausted { .. }) if d < degree_budget(live.max(1)) + 2 => d += 1,
                Err(e) => return Err(e),
            }
        };
        let ev = SignEvaluator::new(&g);
        let mut next = Vec::new();
        for c in &classes {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for &i in c {
                match ev.sign(&points[i].to_array()) {
                    1 => pos.push(i),
                    -1 => neg.push(i),
                    _ => {}
                }
            }
            next.extend([pos, neg].into_iter().filter(|v| !v.is_empty()));
        }
        classes = next;
        factors.push(g);
    }
    Ok(partition_from_factors(points, factors, r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionStats {
    pub m: usize,
    pub r: usize,
    pub degree: u32,
    pub factor_degrees: Vec<u32>,
    pub nonempty_cells: usize,
    pub max_cell: usize,
    pub cell_cap: usize,
    pub zero_set_points: usize,
    pub warren_bound: u64,
    pub degree_bound_ok: bool,
}

impl PartitionStats {
    pub fn guarantee_holds(&self) -> bool {
        self.max_cell <= self.cell_cap && self.nonempty_cells as u64 <= self.warren_bound
    }
}

pub fn partition_stats(part: &Partition) -> PartitionStats {
    let degree = part.degree();
    let open: Vec<usize> = part.open_cells().map(|(_, v)| v.len()).collect();
    let stats = PartitionStats {
        m: part.m,
        r: part.r,
        degree,
        factor_degrees: part.factors.iter().map(|f| f.degree()).collect(),
        nonempty_cells: open.len(),
        max_cell: open.iter().copied().max().unwrap_or(0),
        cell_cap: part.cell_cap(),
        zero_set_points: part.zero_set_points().len(),
        warren_bound: (2 * degree as u64).pow(3),
        degree_bound_ok: degree_within_bound(degree, part.r),
    };
    assert!(stats.nonempty_cells as u64 <= stats.warren_bound, "sign cells exceed (2 deg f)^3");
    stats
}

#[derive(Debug, Clone, Serialize)]
pub struct CellEntry {
    pub signs: String,
    pub size: usize,
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub r: usize,
    pub m: usize,
    pub degree: u32,
    pub factors: Vec<String>,
    pub cells: Vec<CellEntry>,
    pub stats: PartitionStats,
}
