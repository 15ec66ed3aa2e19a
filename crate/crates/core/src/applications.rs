//! Bound evaluators, stage schedules, similar triangles through circles and
//! the unit-circle toolkit.

use crate::engine::KST_CONSTANT;
use crate::geometry::{circle_through_three_points, incidence_test, Circle3, Point3, Sphere, Vec3};
use crate::poly::MultiPoly;
use crate::rational::{q, qf, Q};
use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AppError {
    #[error("outside the formula's domain: {0}")]
    FormulaDomain(String),
    #[error("m = {m}, n = {n} is outside the staging range")]
    OutOfRange { m: u64, n: u64 },
    #[error("p and q coincide")]
    DegeneratePair,
    #[error("triangle is degenerate")]
    DegenerateTriangle,
    #[error("the two counts disagree: {brute} by triples, {circles} by circles")]
    ShapeMismatch { brute: u64, circles: u64 },
    #[error("o and a coincide")]
    CoincidentPoints,
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    #[serde(rename = "thm1.1")]
    Thm11,
    #[serde(rename = "thm1.2")]
    Thm12,
    #[serde(rename = "thm1.3")]
    Thm13,
    #[serde(rename = "unit_no_eps")]
    UnitNoEps,
    #[serde(rename = "kst")]
    Kst,
    #[serde(rename = "milnor_thom")]
    MilnorThom,
    #[serde(rename = "warren")]
    Warren,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] =
        [BoundKind::Thm11, BoundKind::Thm12, BoundKind::Thm13, BoundKind::UnitNoEps, BoundKind::Kst, BoundKind::MilnorThom, BoundKind::Warren];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Thm11 => "thm1.1",
            BoundKind::Thm12 => "thm1.2",
            BoundKind::Thm13 => "thm1.3",
            BoundKind::UnitNoEps => "unit_no_eps",
            BoundKind::Kst => "kst",
            BoundKind::MilnorThom => "milnor_thom",
            BoundKind::Warren => "warren",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub eps: f64,
    /// Base of the staging constant `A_{m,n}`.
    pub a: f64,
    /// Richness threshold, or the polynomial degree for MilnorThom/Warren.
    pub k: u64,
    /// Ambient dimension for MilnorThom/Warren.
    pub d: u32,
    pub constant: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { m: 0, n: 0, q: 1, eps: 0.01, a: 2.0, k: 4, d: 3, constant: 1.0 }
    }
}

/// `k (2k-1)^(d-1)`, exactly.
pub fn milnor_thom(k: u64, d: u32) -> BigInt {
    BigInt::from(k) * BigInt::from(2 * k - 1).pow(d.saturating_sub(1))
}

fn pw(x: u64, e: f64) -> f64 {
    (x as f64).powf(e)
}

pub fn eval_bound(which: BoundKind, p: &BoundParams) -> Result<f64, AppError> {
    if p.q > p.n && p.n > 0 {
        return Err(AppError::FormulaDomain(format!("q = {} exceeds n = {}", p.q, p.n)));
    }
    let (m, n, qq, e) = (p.m, p.n, p.q, p.eps);
    let needs_eps = matches!(which, BoundKind::Thm11 | BoundKind::Thm13);
    if needs_eps && e <= 0.0 {
        return Err(AppError::FormulaDomain("eps must be positive".into()));
    }
    let needs_a = matches!(which, BoundKind::Thm12 | BoundKind::UnitNoEps);
    if needs_a && p.a <= 1.0 {
        return Err(AppError::FormulaDomain("A must exceed 1".into()));
    }
    let linear = (m + n) as f64;
    let v = match which {
        BoundKind::Thm11 => {
            pw(m, 3.0 / 7.0 + e) * pw(n, 6.0 / 7.0)
                + pw(m, 2.0 / 3.0 + e) * pw(n, 0.5) * pw(qq, 1.0 / 6.0)
                + pw(m, 6.0 / 11.0 + e) * pw(n, 15.0 / 22.0) * pw(qq, 3.0 / 22.0)
                + linear
        }
        BoundKind::Thm12 => {
            let st = staging(m, n)?;
            let logm = if m > 1 { (m as f64).ln().powf(2.0 / 11.0) } else { 0.0 };
            p.a.powi(st.a_exponent as i32)
                * (pw(m, 3.0 / 7.0) * pw(n, 6.0 / 7.0)
                    + pw(m, 2.0 / 3.0) * pw(n, 0.5) * pw(qq, 1.0 / 6.0)
                    + pw(m, 6.0 / 11.0) * pw(n, 15.0 / 22.0) * pw(qq, 3.0 / 22.0) * logm
                    + linear)
        }
        BoundKind::Thm13 => pw(m, 5.0 / 11.0 + e) * pw(n, 9.0 / 11.0) + pw(m, 2.0 / 3.0 + e) * pw(n, 0.5) * pw(qq, 1.0 / 6.0) + linear,
        BoundKind::UnitNoEps => {
            let st = unit_staging(m, n)?;
            p.a.powi(st.a_exponent as i32) * (pw(m, 5.0 / 11.0) * pw(n, 9.0 / 11.0) + pw(m, 2.0 / 3.0) * pw(n, 0.5) * pw(qq, 1.0 / 6.0) + linear)
        }
        BoundKind::Kst => pw(n, 2.0 / 3.0) * m as f64 + n as f64,
        BoundKind::MilnorThom => {
            if p.k == 0 {
                return Err(AppError::FormulaDomain("degree must be positive".into()));
            }
            milnor_thom(p.k, p.d).to_string().parse::<f64>().expect("integer")
        }
        BoundKind::Warren => (2.0 * p.k as f64).powi(p.d as i32),
    };
    Ok(p.constant * v)
}

/// The incidence bound with the constant proved for the K_{3,2}-free graph.
pub fn kst_bound(m: u64, n: u64) -> f64 {
    KST_CONSTANT as f64 * (pw(n, 2.0 / 3.0) * m as f64 + n as f64)
}

// ---------------------------------------------------------------------------
// staging

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Staging {
    pub j: u32,
    #[serde(serialize_with = "ser_qs")]
    pub alphas: Vec<Q>,
    pub a_exponent: u32,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::fmt_q))
}

/// `m <= n^(a/b)` exactly, as `m^b <= n^a`.
fn below_power(m: u64, n: u64, alpha: &Q) -> bool {
    let a = alpha.numer().to_u32_digits().1.first().copied().unwrap_or(0);
    let b = alpha.denom().to_u32_digits().1.first().copied().unwrap_or(1);
    debug_assert!(alpha.numer().bits() <= 32 && alpha.denom().bits() <= 32);
    BigInt::from(m).pow(b) <= BigInt::from(n).pow(a)
}

fn run_stages(m: u64, n: u64, alpha0: Q, step: impl Fn(&Q) -> Q) -> Result<Staging, AppError> {
    // m < n^(3/2)
    if n == 0 || BigInt::from(m).pow(2u32) >= BigInt::from(n).pow(3u32) {
        return Err(AppError::OutOfRange { m, n });
    }
    let mut alphas = vec![alpha0];
    while !below_power(m, n, alphas.last().expect("nonempty")) {
        let next = step(alphas.last().expect("nonempty"));
        alphas.push(next);
    }
    let j = alphas.len() as u32 - 1;
    Ok(Staging { j, alphas, a_exponent: j + 1 })
}

/// Smallest j with `m <= n^(alpha_j)` for the general-circle recurrence.
pub fn staging(m: u64, n: u64) -> Result<Staging, AppError> {
    run_stages(m, n, qf(1, 3), |a| (q(9) + a) / (q(13) - q(4) * a))
}

/// The same for unit circles, started from the `m^(5/2)` bootstrap.
pub fn unit_staging(m: u64, n: u64) -> Result<Staging, AppError> {
    run_stages(m, n, qf(2, 5), |a| (q(27) + q(4) * a) / (q(4) * (q(10) - q(3) * a)))
}

pub fn alpha_closed_form(j: u32) -> Q {
    qf(3, 2) - qf(7, 4 * j as i64 + 6)
}

pub fn unit_alpha_closed_form(j: u32) -> Q {
    qf(3, 2) - qf(11, 10 + 6 * j as i64)
}

// ---------------------------------------------------------------------------
// rich points

pub fn rich_point_bound(n: u64, k: u64, q_cap: u64, unit: bool) -> Result<f64, AppError> {
    if k < 2 {
        return Err(AppError::FormulaDomain("k must be at least 2".into()));
    }
    let (n, k, qq) = (n as f64, k as f64, q_cap as f64);
    let n32 = n.powf(1.5);
    Ok(if unit {
        n32 / k.powf(11.0 / 6.0) + n32 * qq.sqrt() / k.powi(3) + n / k
    } else {
        n32 / k.powf(7.0 / 4.0) + n32 * qq.sqrt() / k.powi(3) + n32 * qq.powf(0.3) / k.powf(11.0 / 5.0) + n / k
    })
}

// ---------------------------------------------------------------------------
// similar triangles

/// A triangle shape `uvw` with rational data: `lambda` places the foot of
/// w on uv, `mu` is the squared height over `|uv|^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleShape {
    pub lambda: Q,
    pub mu: Q,
    /// `(|vw|^2, |uw|^2, |uv|^2) / |uv|^2`
    pub sides: [Q; 3],
}

impl TriangleShape {
    pub fn from_points(u: &Point3, v: &Point3, w: &Point3) -> Result<Self, AppError> {
        let uv = v - u;
        let uw = w - u;
        let l2 = uv.norm_sq();
        if l2.is_zero() || uv.cross(&uw).is_zero() {
            return Err(AppError::DegenerateTriangle);
        }
        let lambda = uv.dot(&uw) / &l2;
        let mu = uw.norm_sq() / &l2 - &lambda * &lambda;
        let sides = [(w - v).norm_sq() / &l2, uw.norm_sq() / &l2, Q::one()];
        Ok(TriangleShape { lambda, mu, sides })
    }

    fn sorted_sides(&self) -> [Q; 3] {
        let mut s = self.sides.clone();
        s.sort();
        s
    }

    /// Number of vertex relabelings preserving the side lengths.
    pub fn symmetry(&self) -> u64 {
        let [a, b, c] = &self.sides;
        match (a == b, b == c, a == c) {
            (true, true, _) => 6,
            (false, false, false) => 1,
            _ => 2,
        }
    }
}

/// The circle of points r making `p q r` similar to `u v w` with
/// `p -> u`, `q -> v`.
pub fn cpq_circle(p: &Point3, q_pt: &Point3, shape: &TriangleShape) -> Result<Circle3, AppError> {
    let d = q_pt - p;
    if d.is_zero() {
        return Err(AppError::DegeneratePair);
    }
    let center = p + &d.scale(&shape.lambda);
    let r2 = &shape.mu * d.norm_sq();
    Circle3::from_center(center, d, r2).map_err(|_| AppError::DegenerateTriangle)
}

fn similar_sides(a: &Point3, b: &Point3, c: &Point3, target: &[Q; 3]) -> bool {
    let mut s = [(a - b).norm_sq(), (b - c).norm_sq(), (a - c).norm_sq()];
    s.sort();
    if s[0].is_zero() {
        return false;
    }
    (0..3).all(|i| &s[i] * &target[2] == &target[i] * &s[2])
}

pub fn similar_triangles_bruteforce(points: &[Point3], shape: &TriangleShape) -> u64 {
    let target = shape.sorted_sides();
    let t = points.len();
    (0..t)
        .into_par_iter()
        .map(|i| {
            let mut c = 0u64;
            for j in i + 1..t {
                for k in j + 1..t {
                    if similar_sides(&points[i], &points[j], &points[k], &target) {
                        c += 1;
                    }
                }
            }
            c
        })
        .sum()
}

/// Incidences between the points and the circles `c_pq` over ordered
/// pairs, divided by the shape's symmetry.
pub fn similar_triangles_circles(points: &[Point3], shape: &TriangleShape) -> u64 {
    let t = points.len();
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (0..t).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let incidences: u64 = pairs
        .par_iter()
        .map(|&(i, j)| match cpq_circle(&points[i], &points[j], shape) {
            Ok(c) => points.iter().filter(|r| incidence_test(r, &c)).count() as u64,
            Err(_) => 0,
        })
        .sum();
    incidences / shape.symmetry()
}

pub fn similar_triangles(points: &[Point3], shape: &TriangleShape) -> Result<u64, AppError> {
    let brute = similar_triangles_bruteforce(points, shape);
    let circles = similar_triangles_circles(points, shape);
    if brute != circles {
        return Err(AppError::ShapeMismatch { brute, circles });
    }
    Ok(brute)
}

// ---------------------------------------------------------------------------
// unit circles

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaSurface {
    Empty,
    Sphere(Sphere),
    Quartic(MultiPoly),
}

/// Points w with o, a, w on a common unit circle: the circumradius
/// identity `|u|^2 |v|^2 |v-u|^2 = 4 |u x v|^2` with `u = a-o`, `v = w-o`.
pub fn sigma_surface(o: &Point3, a: &Point3) -> Result<SigmaSurface, AppError> {
    let u = a - o;
    let uu = u.norm_sq();
    if uu.is_zero() {
        return Err(AppError::CoincidentPoints);
    }
    if uu > q(4) {
        return Ok(SigmaSurface::Empty);
    }
    if uu == q(4) {
        let center = (o + a).scale(&qf(1, 2));
        return Ok(SigmaSurface::Sphere(Sphere { center, radius_sq: q(1) }));
    }
    let x = |i: usize| MultiPoly::var(3, i);
    let c = |v: &Q| MultiPoly::constant(3, v.clone());
    let v: Vec<MultiPoly> = (0..3).map(|i| &x(i) - &c(o.get(i))).collect();
    let vu: Vec<MultiPoly> = (0..3).map(|i| &v[i] - &c(u.get(i))).collect();
    let sq = |w: &[MultiPoly]| w.iter().fold(MultiPoly::zero(3), |s, t| &s + &(t * t));
    let cross: Vec<MultiPoly> = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            &v[k].scale(u.get(j)) - &v[j].scale(u.get(k))
        })
        .collect();
    let lhs = (&sq(&v) * &sq(&vu)).scale(&uu);
    let f = &lhs - &sq(&cross).scale(&q(4));
    Ok(SigmaSurface::Quartic(f))
}

/// Squared circumradius by Heron's formula in squared sides.
pub fn circumradius_sq(a: &Point3, b: &Point3, c: &Point3) -> Option<Q> {
    let (x, y, z) = ((b - c).norm_sq(), (a - c).norm_sq(), (a - b).norm_sq());
    // 16 area^2 = 2(xy + yz + zx) - (x^2 + y^2 + z^2)
    let s16 = q(2) * (&x * &y + &y * &z + &z * &x) - (&x * &x + &y * &y + &z * &z);
    if s16.is_zero() {
        return None;
    }
    Some(x * y * z / s16)
}

/// Every unit circle through at least three of the points, once each.
pub fn rich_unit_circles(points: &[Point3]) -> Vec<Circle3> {
    let m = points.len();
    // chords of a unit circle are at most 2 long
    let four = q(4);
    let dist: Vec<Vec<Option<Q>>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| Some((&points[i] - &points[j]).norm_sq()).filter(|d| *d <= four)).collect())
        .collect();
    let found: Vec<Vec<Circle3>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..m {
                let Some(z) = &dist[i][j] else { continue };
                for k in j + 1..m {
                    let (Some(y), Some(x)) = (&dist[i][k], &dist[j][k]) else { continue };
                    // R^2 = xyz / 16 area^2
                    let s16 = q(2) * (x * y + y * z + z * x) - (x * x + y * y + z * z);
                    if s16.is_zero() || x * y * z != s16 {
                        continue;
                    }
                    if let Ok(c) = circle_through_three_points(&points[i], &points[j], &points[k]) {
                        out.push(c);
                    }
                }
            }
            out
        })
        .collect();
    let mut seen = HashSet::new();
    found.into_iter().flatten().filter(|c| seen.insert(c.clone())).collect()
}

/// Rational points of the unit circle through `o` with center `c`, from
/// chords in the direction of in-plane vectors.
pub fn unit_circle_points(c: &Circle3, o: &Point3, count: usize) -> Vec<Point3> {
    let nrm = c.normal();
    let helper = if nrm.x.is_zero() { Vec3::ints(1, 0, 0) } else { Vec3::ints(0, 1, 0) };
    let e1 = nrm.cross(&helper);
    let e2 = nrm.cross(&e1);
    let mut out = Vec::new();
    let mut k = 0i64;
    while out.len() < count && k < 10 * count as i64 + 10 {
        k += 1;
        let u = &e1.scale(&q(k)) + &e2.scale(&q(1 - k % 3));
        let uu = u.norm_sq();
        let t = -q(2) * (o - c.center()).dot(&u) / uu;
        if !t.is_zero() {
            let p = o + &u.scale(&t);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

pub fn count_signs(v: &Q) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_triangle_cloud;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};
    use rand::{Rng, SeedableRng};

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Vec3::ints(x, y, z)
    }

    #[test]
    fn milnor_thom_anchor() {
        assert_eq!(milnor_thom(4, 3), BigInt::from(196));
        let bp = BoundParams { k: 4, d: 3, ..Default::default() };
        assert_eq!(eval_bound(BoundKind::MilnorThom, &bp).unwrap(), 196.0);
        assert_eq!(eval_bound(BoundKind::Warren, &bp).unwrap(), 512.0);
    }

    #[test]
    fn kst_and_domains() {
        let bp = BoundParams { m: 0, n: 50, q: 5, constant: 3.0, ..Default::default() };
        assert_eq!(eval_bound(BoundKind::Kst, &bp).unwrap(), 150.0);
        let big = BoundParams { m: 1000, n: 100, q: 5, ..Default::default() };
        assert!(matches!(eval_bound(BoundKind::Thm12, &big), Err(AppError::FormulaDomain(_)) | Err(AppError::OutOfRange { .. })));
        let bad = BoundParams { m: 10, n: 100, q: 5, eps: 0.0, ..Default::default() };
        assert!(eval_bound(BoundKind::Thm11, &bad).is_err());
        assert_eq!(kst_bound(0, 7), 14.0);
    }

    #[test]
    fn thm11_dominant_term() {
        // m = n = q: exponents 9/7, 4/3 and 15/11 of n; the last dominates
        let n = 1u64 << 40;
        let bp = BoundParams { m: n, n, q: n, eps: 1e-9, ..Default::default() };
        let v = eval_bound(BoundKind::Thm11, &bp).unwrap();
        let nf = n as f64;
        let terms = [nf.powf(9.0 / 7.0), nf.powf(4.0 / 3.0), nf.powf(15.0 / 11.0), 2.0 * nf];
        let third = terms[2];
        assert!(terms.iter().all(|&t| t <= third));
        assert!((v - terms.iter().sum::<f64>()).abs() < 1e-6 * v);
        assert!(15.0 / 11.0 > 4.0 / 3.0 && 4.0 / 3.0 > 9.0 / 7.0);
    }

    #[test]
    fn staging_anchors() {
        let s = staging(1_000_000_000, 1_000_000_000_000).unwrap();
        assert_eq!(&s.alphas[..4.min(s.alphas.len())], &[qf(1, 3), qf(4, 5), q(1), qf(10, 9)][..4.min(s.alphas.len())]);
        let mut a = qf(1, 3);
        let mut seq = vec![a.clone()];
        for _ in 0..3 {
            a = (q(9) + &a) / (q(13) - q(4) * &a);
            seq.push(a.clone());
        }
        assert_eq!(seq, vec![qf(1, 3), qf(4, 5), q(1), qf(10, 9)]);
        // A for m <= n^(1/3), A^2 up to n^(4/5), A^3 up to n
        let n = 1u64 << 30;
        assert_eq!(staging(1 << 10, n).unwrap().a_exponent, 1);
        assert_eq!(staging((1 << 10) + 1, n).unwrap().a_exponent, 2);
        assert_eq!(staging(1 << 24, n).unwrap().a_exponent, 2);
        assert_eq!(staging((1 << 24) + 1, n).unwrap().a_exponent, 3);
        assert_eq!(staging(n, n).unwrap().a_exponent, 3);
        assert_eq!(staging(1 << 45, n), Err(AppError::OutOfRange { m: 1 << 45, n }));
    }

    #[test]
    fn closed_forms_match_recurrences() {
        let mut a = qf(1, 3);
        let mut b = qf(2, 5);
        for j in 0..=100u32 {
            assert_eq!(a, alpha_closed_form(j));
            assert_eq!(b, unit_alpha_closed_form(j));
            a = (q(9) + &a) / (q(13) - q(4) * &a);
            b = (q(27) + q(4) * &b) / (q(4) * (q(10) - q(3) * &b));
        }
    }

    #[test]
    fn unit_staging_formula() {
        // m = n^(2/5)
        assert_eq!(unit_staging(1 << 8, 1 << 20).unwrap().j, 0);
        assert!(unit_staging(1 << 30, 1 << 20).is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 50 {
            let n: u64 = rng.random_range(100..1_000_000);
            let lo = (n as f64).powf(0.4).ceil() as u64;
            let hi = (n as f64).powf(1.5).floor() as u64 - 1;
            let m = rng.random_range(lo..=hi);
            let (mf, nf) = (m as f64, n as f64);
            let x = (mf.powi(5) / nf.powi(2)).ln() / (3.0 * (nf.powf(1.5) / mf).ln());
            if (x - x.round()).abs() < 1e-6 {
                continue;
            }
            let want = x.ceil().max(0.0) as u32;
            let s = unit_staging(m, n).unwrap();
            assert_eq!(s.j, want, "m={m} n={n}");
            assert_eq!(s.a_exponent, want + 1);
            checked += 1;
        }
    }

    #[test]
    fn general_staging_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let mut checked = 0;
        while checked < 50 {
            let n: u64 = rng.random_range(100..1_000_000);
            let hi = (n as f64).powf(1.5).floor() as u64 - 1;
            let m = rng.random_range(1..=hi);
            let (mf, nf) = (m as f64, n as f64);
            let x = 1.5 * (mf / nf.cbrt()).ln() / (nf.powf(1.5) / mf).ln();
            if (x - x.round()).abs() < 1e-6 {
                continue;
            }
            assert_eq!(staging(m, n).unwrap().j, x.ceil().max(0.0) as u32, "m={m} n={n}");
            checked += 1;
        }
    }

    #[test]
    fn rich_point_examples() {
        let a = rich_point_bound(10_000, 16, 1, false).unwrap();
        let n32 = 1e6;
        let want = n32 / 16f64.powf(1.75) + n32 / 4096.0 + n32 / 16f64.powf(2.2) + 10_000.0 / 16.0;
        assert!((a - want).abs() < 1e-9 * want);
        let mut prev = f64::INFINITY;
        for k in 2..200 {
            let v = rich_point_bound(10_000, k, 7, true).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let u = rich_point_bound(10_000, 16, 1, true).unwrap();
        assert!((u - (n32 / 16f64.powf(11.0 / 6.0) + n32 / 4096.0 + 10_000.0 / 16.0)).abs() < 1e-9 * u);
    }

    fn right_isoceles() -> TriangleShape {
        TriangleShape::from_points(&p(0, 0, 0), &p(2, 0, 0), &p(1, 1, 0)).unwrap()
    }

    #[test]
    fn cpq_examples() {
        let s = right_isoceles();
        assert_eq!((s.lambda.clone(), s.mu.clone()), (qf(1, 2), qf(1, 4)));
        let c = cpq_circle(&p(0, 0, 0), &p(2, 0, 0), &s).unwrap();
        assert_eq!(*c.center(), p(1, 0, 0));
        assert_eq!(*c.radius_sq(), q(1));
        assert!(c.normal().is_parallel(&p(1, 0, 0)));
        assert!(incidence_test(&p(1, 0, 1), &c));
        assert!(similar_sides(&p(0, 0, 0), &p(2, 0, 0), &p(1, 0, 1), &s.sorted_sides()));
        assert_eq!(cpq_circle(&p(1, 1, 1), &p(1, 1, 1), &s), Err(AppError::DegeneratePair));
    }

    #[test]
    fn triangle_fixtures() {
        let s = right_isoceles();
        let square = [p(0, 0, 0), p(1, 0, 0), p(1, 1, 0), p(0, 1, 0)];
        assert_eq!(similar_triangles(&square, &s), Ok(4));
        let scalene = [p(0, 0, 0), p(3, 0, 0), p(0, 4, 0)];
        let shape = TriangleShape::from_points(&scalene[0], &scalene[1], &scalene[2]).unwrap();
        assert_eq!(shape.symmetry(), 1);
        assert_eq!(similar_triangles(&scalene, &shape), Ok(1));
        assert_eq!(similar_triangles(&square[..3], &s), Ok(1));
        let eq = TriangleShape::from_points(&p(1, 0, 0), &p(0, 1, 0), &p(0, 0, 1)).unwrap();
        assert_eq!(eq.symmetry(), 6);
        // the 8 tetrahedra corners of a cube give 8 equilateral faces... of two tetrahedra
        let cube: Vec<Point3> = (0..8).map(|i| p(i & 1, (i >> 1) & 1, (i >> 2) & 1)).collect();
        assert_eq!(similar_triangles(&cube, &eq), Ok(8));
    }

    #[test]
    fn triangle_methods_agree_on_clouds() {
        let shapes = [right_isoceles(), TriangleShape::from_points(&p(0, 0, 0), &p(2, 0, 0), &p(0, 1, 0)).unwrap()];
        for seed in 0..10 {
            let pts = gen_triangle_cloud(20, seed);
            for s in &shapes {
                let b = similar_triangles_bruteforce(&pts, s);
                assert_eq!(b, similar_triangles_circles(&pts, s), "seed {seed}");
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let o = p(0, 0, 0);
        match sigma_surface(&o, &p(2, 0, 0)).unwrap() {
            SigmaSurface::Sphere(s) => assert_eq!(s, Sphere { center: p(1, 0, 0), radius_sq: q(1) }),
            other => panic!("{other:?}"),
        }
        assert_eq!(sigma_surface(&o, &p(3, 0, 0)).unwrap(), SigmaSurface::Empty);
        assert_eq!(sigma_surface(&o, &o), Err(AppError::CoincidentPoints));
        let SigmaSurface::Quartic(f) = sigma_surface(&o, &p(1, 0, 0)).unwrap() else { panic!() };
        assert_eq!(f.degree(), 4);
        // sign of sigma against the circumradius oracle
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w = Vec3::new(qf(rng.random_range(-20..20), 7), qf(rng.random_range(-20..20), 7), qf(rng.random_range(-20..20), 7));
            let val = f.eval(&w.to_array()).unwrap();
            match circumradius_sq(&o, &p(1, 0, 0), &w) {
                Some(r2) => assert_eq!(count_signs(&val), count_signs(&(r2 - q(1))) * count_signs(&val).abs()),
                None => assert!(!val.is_negative()),
            }
        }
    }

    #[test]
    fn sigma_vanishes_on_unit_circles() {
        let o = Vec3::new(qf(-3, 5), q(0), q(0));
        let a = Vec3::new(qf(3, 5), q(0), q(0));
        let SigmaSurface::Quartic(f) = sigma_surface(&o, &a).unwrap() else { panic!() };
        let c = Circle3::from_center(Vec3::new(q(0), qf(4, 5), q(0)), Vec3::ints(0, 0, 1), q(1)).unwrap();
        assert!(incidence_test(&o, &c) && incidence_test(&a, &c));
        let pts = unit_circle_points(&c, &o, 10);
        assert_eq!(pts.len(), 10);
        for w in pts {
            assert!(incidence_test(&w, &c));
            assert_eq!(circumradius_sq(&o, &a, &w), Some(q(1)));
            assert!(f.eval(&w.to_array()).unwrap().is_zero());
        }
    }

    #[test]
    fn rich_unit_examples() {
        let c = Circle3::from_center(p(0, 0, 0), p(0, 0, 1), q(1)).unwrap();
        let pts = vec![p(1, 0, 0), p(0, 1, 0), p(-1, 0, 0), Vec3::new(qf(3, 5), qf(4, 5), q(0))];
        let out = rich_unit_circles(&pts);
        assert_eq!(out, vec![c.clone()]);
        assert!(rich_unit_circles(&[p(0, 0, 0), p(3, 0, 0), p(0, 3, 0)]).is_empty());
        let bundle = crate::generators::gen_unit_bundle(12, 8, 8, 1).unwrap();
        for c in rich_unit_circles(&bundle.points) {
            assert!(bundle.points.iter().filter(|p| incidence_test(p, &c)).count() >= 3);
        }
    }

    proptest! {
        #[test]
        fn cpq_points_are_similar(rot in proptest::collection::vec(-4i64..5, 3), base in proptest::collection::vec(-9i64..10, 3), len in 1i64..6, t in -30i64..30) {
            // shape with mu = (2/3)^2, so |r - center| = (2/3)|pq| is rational
            let shape = TriangleShape::from_points(&p(0, 0, 0), &p(3, 0, 0), &p(1, 2, 0)).unwrap();
            prop_assert_eq!(shape.mu.clone(), qf(4, 9));
            let r = crate::generators::rotation(rot[0], rot[1], rot[2], 1);
            let turn = |v: Vec3| crate::generators::apply(&r, &v);
            let pp = p(base[0], base[1], base[2]);
            let d = turn(p(len, 0, 0));
            let qq = &pp + &d;
            let c = cpq_circle(&pp, &qq, &shape).unwrap();
            let den = qf(1, 1) + qf(t * t, 100);
            let dir = Vec3::new(q(0), (q(1) - qf(t * t, 100)) / &den, qf(2 * t, 10) / &den);
            let w = c.center() + &turn(dir).scale(&(qf(2, 3) * q(len)));
            prop_assert!(incidence_test(&w, &c));
            prop_assert!(similar_sides(&pp, &qq, &w, &shape.sorted_sides()));
        }
    }
}
