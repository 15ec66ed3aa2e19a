//! Flecnode polynomials, ruledness verdicts, Plücker coordinates and
//! popular-point censuses.

use crate::engine::{circle_surface_crossings, EngineError};
use crate::geometry::{incidence_test, Circle3, Point3, Vec3};
use crate::poly::univariate::isolate_real_roots;
use crate::poly::{divides, MultiPoly, PolyError, UniPoly};
use crate::rational::Q;
use crate::transforms::Line3;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RulingError {
    #[error("degree {0} is below 3")]
    DegreeTooLow(u32),
    #[error("expected a polynomial in 3 variables, got {0}")]
    NotTrivariate(usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("line lies in the plane at infinity")]
    AtInfinity,
    #[error("coordinates are all zero")]
    ZeroVector,
    #[error("point is not on the Klein quadric")]
    NotOnQuadric,
    #[error("circle {0} is not contained in the surface")]
    NotContained(usize),
    #[error("flecnode elimination failed: {0}")]
    Elimination(&'static str),
}

impl From<PolyError> for RulingError {
    fn from(_: PolyError) -> Self {
        RulingError::Elimination("polynomial arithmetic")
    }
}

impl From<EngineError> for RulingError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::ZeroPolynomial => RulingError::ZeroPolynomial,
            EngineError::NotTrivariate(n) => RulingError::NotTrivariate(n),
        }
    }
}

fn check_surface(f: &MultiPoly) -> Result<u32, RulingError> {
    if f.nvars() != 3 {
        return Err(RulingError::NotTrivariate(f.nvars()));
    }
    if f.is_zero() {
        return Err(RulingError::ZeroPolynomial);
    }
    Ok(f.degree())
}

// ---------------------------------------------------------------------------
// flecnode

/// Integer trivariate polynomial for evaluation at lattice points.
struct IntPoly3 {
    terms: Vec<([usize; 3], BigInt)>,
}

impl IntPoly3 {
    fn new(f: &MultiPoly) -> Self {
        let terms = f
            .terms()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                ([m.exp(0) as usize, m.exp(1) as usize, m.exp(2) as usize], c.to_integer())
            })
            .collect();
        IntPoly3 { terms }
    }

    fn eval(&self, pows: &[Vec<BigInt>; 3]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            acc += c * &pows[0][e[0]] * &pows[1][e[1]] * &pows[2][e[2]];
        }
        acc
    }
}

/// Fraction-free determinant.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut prev = BigInt::one();
    let mut neg = false;
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    neg = !neg;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if neg {
        -d
    } else {
        d
    }
}

/// Partial derivatives of orders 1..3 of an integer surface polynomial.
struct Jets {
    pivot: usize,
    d: usize,
    first: Vec<IntPoly3>,
    second: Vec<Vec<IntPoly3>>,
    third: Vec<Vec<Vec<IntPoly3>>>,
}

impl Jets {
    fn new(g: &MultiPoly, pivot: usize) -> Self {
        let p1: Vec<MultiPoly> = (0..3).map(|i| g.partial(i)).collect();
        let p2: Vec<Vec<MultiPoly>> = p1.iter().map(|h| (0..3).map(|j| h.partial(j)).collect()).collect();
        let third = p2
            .iter()
            .map(|row| row.iter().map(|h| (0..3).map(|k| IntPoly3::new(&h.partial(k))).collect()).collect())
            .collect();
        Jets {
            pivot,
            d: g.degree() as usize,
            first: p1.iter().map(IntPoly3::new).collect(),
            second: p2.iter().map(|row| row.iter().map(IntPoly3::new).collect()).collect(),
            third,
        }
    }

    /// Resultant of the pivoted binary quadric and cubic at an integer
    /// point, together with the pivot partial there.
    fn binary_resultant(&self, x: &[BigInt; 3]) -> (BigInt, BigInt) {
        let pows: [Vec<BigInt>; 3] = std::array::from_fn(|i| {
            let mut v = vec![BigInt::one()];
            for k in 1..=self.d {
                let next = &v[k - 1] * &x[i];
                v.push(next);
            }
            v
        });
        let f1: Vec<BigInt> = self.first.iter().map(|p| p.eval(&pows)).collect();
        let h: Vec<Vec<BigInt>> = self.second.iter().map(|r| r.iter().map(|p| p.eval(&pows)).collect()).collect();
        let t: Vec<Vec<Vec<BigInt>>> = self
            .third
            .iter()
            .map(|r| r.iter().map(|s| s.iter().map(|p| p.eval(&pows)).collect()).collect())
            .collect();
        let i = self.pivot;
        let fp = f1[i].clone();
        // directions left after solving the linear condition for v_i
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        let e: Vec<[BigInt; 3]> = others
            .iter()
            .map(|&j| {
                let mut v: [BigInt; 3] = Default::default();
                v[j] = fp.clone();
                v[i] = -&f1[j];
                v
            })
            .collect();
        let bil = |u: &[BigInt; 3], w: &[BigInt; 3]| -> BigInt {
            let mut s = BigInt::zero();
            for a in 0..3 {
                for b in 0..3 {
                    s += &h[a][b] * &u[a] * &w[b];
                }
            }
            s
        };
        let tri = |u: &[BigInt; 3], v: &[BigInt; 3], w: &[BigInt; 3]| -> BigInt {
            let mut s = BigInt::zero();
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        s += &t[a][b][c] * &u[a] * &v[b] * &w[c];
                    }
                }
            }
            s
        };
        let (p, q) = (&e[0], &e[1]);
        let quad = [bil(p, p), BigInt::from(2) * bil(p, q), bil(q, q)];
        let cubic = [tri(p, p, p), BigInt::from(3) * tri(p, p, q), BigInt::from(3) * tri(p, q, q), tri(q, q, q)];
        let z = BigInt::zero;
        let m = vec![
            vec![quad[0].clone(), quad[1].clone(), quad[2].clone(), z(), z()],
            vec![z(), quad[0].clone(), quad[1].clone(), quad[2].clone(), z()],
            vec![z(), z(), quad[0].clone(), quad[1].clone(), quad[2].clone()],
            vec![cubic[0].clone(), cubic[1].clone(), cubic[2].clone(), cubic[3].clone(), z()],
            vec![z(), cubic[0].clone(), cubic[1].clone(), cubic[2].clone(), cubic[3].clone()],
        ];
        (bareiss(m), fp)
    }
}

fn divided_differences(v: &mut [Q], nodes: &[Q]) {
    for l in 1..v.len() {
        for c in (l..v.len()).rev() {
            v[c] = (&v[c] - &v[c - 1]) / (&nodes[c] - &nodes[c - l]);
        }
    }
}

/// Newton coefficients to monomial coefficients, in place.
fn newton_to_monomial(v: &mut Vec<Q>, nodes: &[Q]) {
    let n = v.len();
    let mut p = vec![v[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![Q::zero(); p.len() + 1];
        for (m, c) in p.iter().enumerate() {
            next[m + 1] += c;
            next[m] -= c * &nodes[i];
        }
        next[0] += &v[i];
        p = next;
    }
    *v = p;
}

/// Interpolates a polynomial of total degree at most `n` from its values
/// on the principal lattice `{(xs[a], ys[b], zs[c]) : a+b+c <= n}`.
///
/// `vals[a][b]` holds the values for `c = 0..=n-a-b`.
fn interpolate_lattice(n: usize, nodes: &[Vec<Q>; 3], mut vals: Vec<Vec<Vec<Q>>>) -> MultiPoly {
    let [xs, ys, zs] = nodes;
    for row in vals.iter_mut() {
        for col in row.iter_mut() {
            divided_differences(col, zs);
        }
    }
    let along_y = |vals: &mut Vec<Vec<Vec<Q>>>, f: &dyn Fn(&mut Vec<Q>)| {
        for a in 0..=n {
            for k in 0..=n - a {
                let mut seq: Vec<Q> = (0..=n - a - k).map(|b| vals[a][b][k].clone()).collect();
                f(&mut seq);
                for (b, v) in seq.into_iter().enumerate() {
                    vals[a][b][k] = v;
                }
            }
        }
    };
    let along_x = |vals: &mut Vec<Vec<Vec<Q>>>, f: &dyn Fn(&mut Vec<Q>)| {
        for j in 0..=n {
            for k in 0..=n - j {
                let mut seq: Vec<Q> = (0..=n - j - k).map(|a| vals[a][j][k].clone()).collect();
                f(&mut seq);
                for (a, v) in seq.into_iter().enumerate() {
                    vals[a][j][k] = v;
                }
            }
        }
    };
    along_y(&mut vals, &|s| divided_differences(s, ys));
    along_x(&mut vals, &|s| divided_differences(s, xs));
    along_x(&mut vals, &|s| newton_to_monomial(s, xs));
    along_y(&mut vals, &|s| newton_to_monomial(s, ys));
    let mut out = MultiPoly::zero(3);
    for (a, row) in vals.iter_mut().enumerate() {
        for (b, col) in row.iter_mut().enumerate() {
            newton_to_monomial(col, zs);
            for (c, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    out.add_term(crate::poly::Monomial::from_slice(&[a as u16, b as u16, c as u16]), v.clone());
                }
            }
        }
    }
    out
}

/// Eliminates the direction from `grad f . v = 0`, `v.H.v = 0` and the
/// cubic form: the resultant of the pivoted binary forms divided by the
/// sixth power of the pivot partial. Degree at most `11d - 18`.
fn elimination_resultant(g: &MultiPoly) -> Result<MultiPoly, RulingError> {
    let d = g.degree() as usize;
    let n = 11 * d - 18;
    let pivot = (0..3).rev().find(|&i| !g.partial(i).is_zero()).ok_or(RulingError::Elimination("constant"))?;
    let jets = Jets::new(g, pivot);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..16 {
        let offsets: [i64; 3] = if attempt == 0 {
            [0, 0, 0]
        } else {
            std::array::from_fn(|_| rng.random_range(-40 * attempt..=40 * attempt))
        };
        let nodes: [Vec<BigInt>; 3] = std::array::from_fn(|i| (0..=n).map(|a| BigInt::from(a as i64 + offsets[i])).collect());
        let cells: Vec<(usize, usize)> = (0..=n).flat_map(|a| (0..=n - a).map(move |b| (a, b))).collect();
        let vals: Option<Vec<Vec<Q>>> = cells
            .par_iter()
            .map(|&(a, b)| {
                (0..=n - a - b)
                    .map(|c| {
                        let x = [nodes[0][a].clone(), nodes[1][b].clone(), nodes[2][c].clone()];
                        let (rb, fp) = jets.binary_resultant(&x);
                        if fp.is_zero() {
                            None
                        } else {
                            Some(Q::new(rb, fp.pow(6)))
                        }
                    })
                    .collect()
            })
            .collect();
        let Some(flat) = vals else { continue };
        let mut it = flat.into_iter();
        let grid: Vec<Vec<Vec<Q>>> = (0..=n).map(|a| (0..=n - a).map(|_| it.next().unwrap()).collect()).collect();
        let qnodes: [Vec<Q>; 3] = std::array::from_fn(|i| nodes[i].iter().map(|v| Q::from_integer(v.clone())).collect());
        let r = interpolate_lattice(n, &qnodes, grid);
        // the identity Rb = fp^6 r off the lattice
        let last = BigInt::from(n as i64);
        for probe in [[3i64, 5, 7], [-11, 2, 13]] {
            let x: [BigInt; 3] = std::array::from_fn(|i| &last + BigInt::from(probe[i] + offsets[i]));
            let (rb, fp) = jets.binary_resultant(&x);
            let xq: Vec<Q> = x.iter().map(|v| Q::from_integer(v.clone())).collect();
            if r.eval(&xq)? * Q::from_integer(fp.pow(6)) != Q::from_integer(rb) {
                return Err(RulingError::Elimination("resultant is not divisible by the pivot power"));
            }
        }
        return Ok(r);
    }
    Err(RulingError::Elimination("no lattice avoids the pivot zero set"))
}

/// Reduces `r` modulo `g` to degree at most `deg r - steps`, peeling the
/// top homogeneous components with the top component of g.
fn reduce_top(r: &MultiPoly, g: &MultiPoly, top: u32, steps: u32) -> Result<MultiPoly, RulingError> {
    let lead = g.homogeneous_component(g.degree());
    let mut h = r.clone();
    for k in 0..steps {
        let Some(deg) = top.checked_sub(k) else { break };
        let comp = h.homogeneous_component(deg);
        if comp.is_zero() {
            continue;
        }
        let c = comp.div_exact(&lead).ok_or(RulingError::Elimination("top component not divisible"))?;
        h = &h - &(&c * g);
    }
    Ok(h)
}

fn integer_primitive(f: &MultiPoly) -> MultiPoly {
    f.scale(&f.content().recip())
}

/// The flecnode polynomial of `f`, of degree at most `11d - 24`,
/// determined modulo `f`.
pub fn flecnode(f: &MultiPoly) -> Result<MultiPoly, RulingError> {
    let d = check_surface(f)?;
    if d < 3 {
        return Err(RulingError::DegreeTooLow(d));
    }
    let g = integer_primitive(f);
    let r = elimination_resultant(&g)?;
    let fl = reduce_top(&r, &g, 11 * d - 18, 6)?;
    debug_assert!(fl.degree() <= 11 * d - 24 || fl.is_zero());
    Ok(fl.normalized())
}

// ---------------------------------------------------------------------------
// lines and Plücker coordinates

fn restrict_to_line(f: &MultiPoly, l: &Line3) -> UniPoly {
    let subs: Vec<MultiPoly> = (0..3)
        .map(|i| {
            MultiPoly::from_terms(1, [(vec![0], l.base.get(i).clone()), (vec![1], l.direction.get(i).clone())])
        })
        .collect();
    f.compose(&subs).to_univariate(0).expect("univariate")
}

pub fn line_in_surface(l: &Line3, f: &MultiPoly) -> bool {
    restrict_to_line(f, l).is_zero()
}

/// Homogeneous coordinates `[x0:..:x5]` on the quadric
/// `x0 x5 + x1 x4 + x2 x3 = 0`.
#[derive(Debug, Clone)]
pub struct PluckerPoint {
    coords: [Q; 6],
}

impl PluckerPoint {
    pub fn new(coords: [Q; 6]) -> Result<Self, RulingError> {
        if coords.iter().all(Zero::is_zero) {
            return Err(RulingError::ZeroVector);
        }
        let [x0, x1, x2, x3, x4, x5] = &coords;
        if !(x0 * x5 + x1 * x4 + x2 * x3).is_zero() {
            return Err(RulingError::NotOnQuadric);
        }
        Ok(PluckerPoint { coords })
    }

    pub fn coords(&self) -> &[Q; 6] {
        &self.coords
    }

    pub fn to_strings(&self) -> [String; 6] {
        self.normalized().map(|c| crate::rational::fmt_q(&c))
    }

    /// Scaled so the first nonzero coordinate is 1.
    pub fn normalized(&self) -> [Q; 6] {
        let lead = self.coords.iter().find(|c| !c.is_zero()).expect("nonzero").recip();
        std::array::from_fn(|i| &self.coords[i] * &lead)
    }

    /// `p_ij` for `i < j` in the order 01, 02, 03, 12, 13, 23.
    fn brackets(&self) -> [[Q; 4]; 4] {
        let [x0, x1, x2, x3, x4, x5] = self.coords.clone();
        let z = Q::zero;
        let mut p: [[Q; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
        for (i, j, v) in [(0, 1, x0), (0, 2, x1), (0, 3, x2), (1, 2, x3), (1, 3, -x4), (2, 3, x5)] {
            p[j][i] = -v.clone();
            p[i][j] = v;
        }
        p
    }

    /// The nonzero columns of the bracket matrix, points of the line in
    /// projective 3-space.
    pub fn canonical_points(&self) -> Vec<[Q; 4]> {
        let p = self.brackets();
        (0..4)
            .map(|j| std::array::from_fn(|i| p[i][j].clone()))
            .filter(|c: &[Q; 4]| c.iter().any(|v| !v.is_zero()))
            .collect()
    }
}

impl PartialEq for PluckerPoint {
    fn eq(&self, o: &Self) -> bool {
        self.normalized() == o.normalized()
    }
}
impl Eq for PluckerPoint {}

pub fn plucker_from_line(l: &Line3) -> PluckerPoint {
    let a = [Q::one(), l.base.x.clone(), l.base.y.clone(), l.base.z.clone()];
    let b = [Q::zero(), l.direction.x.clone(), l.direction.y.clone(), l.direction.z.clone()];
    let p = |i: usize, j: usize| &a[i] * &b[j] - &a[j] * &b[i];
    PluckerPoint::new([p(0, 1), p(0, 2), p(0, 3), p(1, 2), -p(1, 3), p(2, 3)]).expect("brackets of two points satisfy the quadric")
}

pub fn line_from_plucker(p: &PluckerPoint) -> Result<Line3, RulingError> {
    let [x0, x1, x2, x3, x4, x5] = p.coords.clone();
    let dir = Vec3::new(x0, x1, x2);
    if dir.is_zero() {
        return Err(RulingError::AtInfinity);
    }
    let moment = Vec3::new(x5, x4, x3);
    let foot = dir.cross(&moment).scale(&dir.norm_sq().recip());
    Ok(Line3::new(foot, dir).expect("nonzero direction"))
}

/// Whether the line meets the absolute conic; never true for a rational
/// affine line.
pub fn meets_absolute_conic(p: &PluckerPoint) -> Result<bool, RulingError> {
    let [x0, x1, x2, ..] = &p.coords;
    if x0.is_zero() && x1.is_zero() && x2.is_zero() {
        return Err(RulingError::AtInfinity);
    }
    Ok((x0 * x0 + x1 * x1 + x2 * x2).is_zero())
}

// ---------------------------------------------------------------------------
// rational points and the ruledness verdict

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&v| v <= 1_000_000)?;
    Some((1..=n).filter(|q| n % q == 0).map(BigInt::from).collect())
}

/// Rational roots of a nonzero univariate polynomial.
pub fn rational_roots(u: &UniPoly) -> Vec<Q> {
    if u.deg() == 0 {
        return Vec::new();
    }
    let sf = u.square_free_part().primitive();
    let lead = sf.lc().to_integer();
    let dens = small_divisors(&lead);
    let mut out = Vec::new();
    for mut root in isolate_real_roots(&sf) {
        let Some(dens) = &dens else {
            if let crate::poly::AlgebraicReal::Rational(x) = &root {
                out.push(x.clone());
            }
            continue;
        };
        let bound = Q::new(BigInt::one(), BigInt::from(2) * lead.abs());
        while !root.is_rational() && root.width() >= bound {
            root.refine();
        }
        if let crate::poly::AlgebraicReal::Rational(x) = &root {
            out.push(x.clone());
            continue;
        }
        'dens: for q in dens {
            let qq = Q::from_integer(q.clone());
            let lo = (root.lower() * &qq).ceil().to_integer();
            let hi = (root.upper() * &qq).floor().to_integer();
            let mut p = lo;
            while p <= hi {
                let x = Q::new(p.clone(), q.clone());
                if sf.sign_at(&x) == 0 {
                    out.push(x);
                    break 'dens;
                }
                p += 1;
            }
        }
    }
    out
}

/// Rational points of Z(f) on up to `budget` slicing lines: axis-parallel
/// lines through integer points first, by increasing size, then random
/// lines with small integer data.
pub fn surface_points(f: &MultiPoly, budget: usize, seed: u64) -> Vec<Point3> {
    let mut out = Vec::new();
    let mut tried = 0usize;
    let consider = |l: Line3, out: &mut Vec<Point3>| {
        let u = restrict_to_line(f, &l);
        let ts: Vec<Q> = if u.is_zero() { vec![Q::zero(), Q::one()] } else { rational_roots(&u) };
        for t in ts {
            let p = l.point_at(&t);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    };
    let axes = [Vec3::ints(1, 0, 0), Vec3::ints(0, 1, 0), Vec3::ints(0, 0, 1)];
    let mut radius = 0i64;
    'grid: while tried < budget / 2 + 1 {
        for a in -radius..=radius {
            for b in -radius..=radius {
                if a.abs().max(b.abs()) != radius {
                    continue;
                }
                for (k, dir) in axes.iter().enumerate() {
                    if tried >= budget {
                        break 'grid;
                    }
                    let mut coords = [0i64; 3];
                    coords[(k + 1) % 3] = a;
                    coords[(k + 2) % 3] = b;
                    consider(Line3::new(Vec3::ints(coords[0], coords[1], coords[2]), dir.clone()).expect("axis"), &mut out);
                    tried += 1;
                }
            }
        }
        radius += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tried < budget {
        let base = Vec3::ints(rng.random_range(-4..=4), rng.random_range(-4..=4), rng.random_range(-4..=4));
        let dir = Vec3::ints(rng.random_range(-3..=3), rng.random_range(-3..=3), rng.random_range(-3..=3));
        tried += 1;
        if let Ok(l) = Line3::new(base, dir) {
            consider(l, &mut out);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum RuledVerdict {
    RuledCertified,
    NotRuledCertified { witness: [String; 3] },
    Inconclusive { sampled: usize },
}

/// Three-valued ruledness test: certified ruled when f divides its
/// flecnode polynomial, certified not ruled when a rational surface point
/// off the flecnode surface turns up within `line_budget` slices.
pub fn ruled_test(f: &MultiPoly, line_budget: usize, seed: u64) -> Result<RuledVerdict, RulingError> {
    let d = check_surface(f)?;
    if d < 3 {
        return Err(RulingError::DegreeTooLow(d));
    }
    let fl = flecnode(f)?;
    if divides(f, &fl)? {
        return Ok(RuledVerdict::RuledCertified);
    }
    let pts = surface_points(f, line_budget, seed);
    for p in &pts {
        if !fl.eval(&p.to_array())?.is_zero() {
            return Ok(RuledVerdict::NotRuledCertified {
                witness: p.to_array().map(|c| crate::rational::fmt_q(&c)),
            });
        }
    }
    Ok(RuledVerdict::Inconclusive { sampled: pts.len() })
}

// ---------------------------------------------------------------------------
// popular points

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopularPoint {
    pub index: usize,
    pub point: [String; 3],
    pub circles: usize,
}

pub fn popularity_threshold(deg: u32) -> usize {
    44 * (deg as usize).pow(2)
}

/// Points incident to at least `44 deg(g)^2` of the given circles, all of
/// which must lie in Z(g).
pub fn popular_census(g: &MultiPoly, circles: &[Circle3], points: &[Point3]) -> Result<Vec<PopularPoint>, RulingError> {
    check_surface(g)?;
    let bad = circles
        .par_iter()
        .enumerate()
        .map(|(i, c)| circle_surface_crossings(c, g).map(|x| (!x.contained).then_some(i)))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(i) = bad.into_iter().flatten().next() {
        return Err(RulingError::NotContained(i));
    }
    let threshold = popularity_threshold(g.degree());
    if circles.len() < threshold {
        return Ok(Vec::new());
    }
    Ok(points
        .par_iter()
        .enumerate()
        .filter_map(|(index, p)| {
            let k = circles.iter().filter(|c| incidence_test(p, c)).count();
            (k >= threshold).then(|| PopularPoint { index, point: p.to_array().map(|c| crate::rational::fmt_q(&c)), circles: k })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{bareiss_det, parse_canonical};
    use crate::rational::{q, qf};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn poly(s: &str) -> MultiPoly {
        parse_canonical(s, Some(3)).unwrap()
    }

    fn dense(d: u16, cs: &[i64]) -> MultiPoly {
        let mut terms = Vec::new();
        let mut i = 0;
        for a in 0..=d {
            for b in 0..=d - a {
                for c in 0..=d - a - b {
                    terms.push((vec![a, b, c], q(cs[i % cs.len()])));
                    i += 1;
                }
            }
        }
        MultiPoly::from_terms(3, terms)
    }

    /// The same elimination carried out on polynomials.
    fn symbolic_resultant(g: &MultiPoly) -> MultiPoly {
        let f1: Vec<MultiPoly> = (0..3).map(|i| g.partial(i)).collect();
        let h = |a: usize, b: usize| f1[a].partial(b);
        let t = |a: usize, b: usize, c: usize| f1[a].partial(b).partial(c);
        let e = [
            [f1[2].clone(), MultiPoly::zero(3), -&f1[0]],
            [MultiPoly::zero(3), f1[2].clone(), -&f1[1]],
        ];
        let bil = |u: &[MultiPoly; 3], w: &[MultiPoly; 3]| {
            let mut s = MultiPoly::zero(3);
            for a in 0..3 {
                for b in 0..3 {
                    s = s + &(&h(a, b) * &u[a]) * &w[b];
                }
            }
            s
        };
        let tri = |u: &[MultiPoly; 3], v: &[MultiPoly; 3], w: &[MultiPoly; 3]| {
            let mut s = MultiPoly::zero(3);
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        s = s + &(&(&t(a, b, c) * &u[a]) * &v[b]) * &w[c];
                    }
                }
            }
            s
        };
        let (p, r) = (&e[0], &e[1]);
        let two = MultiPoly::constant(3, q(2));
        let three = MultiPoly::constant(3, q(3));
        let qd = [bil(p, p), &two * &bil(p, r), bil(r, r)];
        let cb = [tri(p, p, p), &three * &tri(p, p, r), &three * &tri(p, r, r), tri(r, r, r)];
        let z = || MultiPoly::zero(3);
        let m = vec![
            vec![qd[0].clone(), qd[1].clone(), qd[2].clone(), z(), z()],
            vec![z(), qd[0].clone(), qd[1].clone(), qd[2].clone(), z()],
            vec![z(), z(), qd[0].clone(), qd[1].clone(), qd[2].clone()],
            vec![cb[0].clone(), cb[1].clone(), cb[2].clone(), cb[3].clone(), z()],
            vec![z(), cb[0].clone(), cb[1].clone(), cb[2].clone(), cb[3].clone()],
        ];
        let rb = bareiss_det(m, 3);
        rb.div_exact(&f1[2].pow(6)).expect("pivot power divides")
    }

    #[test]
    fn lattice_interpolation_recovers_polynomial() {
        let f = dense(4, &[3, -1, 4, 1, -5, 9, 2, -6]);
        let nodes: [Vec<Q>; 3] = std::array::from_fn(|i| (0..=4).map(|a| q(a * 2 - 3 + i as i64)).collect());
        let vals = (0..=4usize)
            .map(|a| (0..=4 - a).map(|b| (0..=4 - a - b).map(|c| f.eval(&[nodes[0][a].clone(), nodes[1][b].clone(), nodes[2][c].clone()]).unwrap()).collect()).collect())
            .collect();
        assert_eq!(interpolate_lattice(4, &nodes, vals), f);
    }

    #[test]
    fn elimination_matches_symbolic() {
        let f = poly("1 3 0 0\n1 0 2 1\n2 0 0 3\n-1 1 0 0\n1 0 0 0");
        let g = integer_primitive(&f);
        let r = elimination_resultant(&g).unwrap();
        assert_eq!(r, symbolic_resultant(&g));
        assert!(r.degree() <= 15);
    }

    #[test]
    fn cubic_flecnode_degree() {
        // degree at most 11d - 24, here 9
        let f = poly("1 3 0 0\n2 1 1 1\n-1 0 2 1\n3 0 0 3\n1 1 0 1\n-2 0 1 0\n1 0 0 0");
        let fl = flecnode(&f).unwrap();
        assert!(!fl.is_zero());
        assert!(fl.degree() <= 9, "degree {}", fl.degree());
        assert_eq!(flecnode(&poly("1 2 0 0\n-1 0 0 0")), Err(RulingError::DegreeTooLow(2)));
    }

    #[test]
    fn quartic_and_quintic_degree() {
        for d in [4u16, 5] {
            let f = dense(d, &[2, -3, 1, 5, -1, 4, 7, -2, 3]);
            let fl = flecnode(&f).unwrap();
            assert!(fl.degree() <= 11 * d as u32 - 24, "d={d} degree {}", fl.degree());
        }
    }

    #[test]
    fn fermat_cubic_is_not_ruled() {
        let f = poly("1 3 0 0\n1 0 3 0\n1 0 0 3\n-1 0 0 0");
        let fl = flecnode(&f).unwrap();
        // the real lines x+y=0, z=1 and its images lie on Z(Fl)
        for p in [[1, -1, 1], [0, 0, 1], [1, 0, 0]] {
            assert!(fl.eval(&p.map(q)).unwrap().is_zero());
        }
        // 9^3 + 10^3 = 12^3 + 1
        assert!(f.eval(&[q(9), q(10), q(-12)]).unwrap().is_zero());
        assert!(!fl.eval(&[q(9), q(10), q(-12)]).unwrap().is_zero());
        match ruled_test(&f, 2000, 1).unwrap() {
            RuledVerdict::NotRuledCertified { witness } => {
                let w: Vec<Q> = witness.iter().map(|s| crate::rational::parse_q(s).unwrap()).collect();
                assert!(f.eval(&w).unwrap().is_zero());
                assert!(!fl.eval(&w).unwrap().is_zero());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cones_are_ruled() {
        let f = dense(3, &[1, -2, 0, 3, 1, 0, -1, 2, 5, 1]).homogeneous_component(3);
        assert!(f.is_homogeneous());
        assert_eq!(ruled_test(&f, 50, 0).unwrap(), RuledVerdict::RuledCertified);
        // nodal cubic cone y^2 z = x^3 + x^2 z, parametrized by t
        let nodal = poly("-1 3 0 0\n-1 2 0 1\n1 0 2 1");
        assert_eq!(ruled_test(&nodal, 50, 0).unwrap(), RuledVerdict::RuledCertified);
        let fl = flecnode(&nodal).unwrap();
        let mut found = 0;
        for t in -10i64..10 {
            for s in 1..=10 {
                let t = qf(t, 3);
                let x = &t * &t - q(1);
                let p = [&x * &q(s), &x * &t * q(s), q(s)];
                assert!(nodal.eval(&p).unwrap().is_zero());
                assert!(fl.eval(&p).unwrap().is_zero());
                found += 1;
            }
        }
        assert_eq!(found, 200);
    }

    #[test]
    fn inconclusive_without_points() {
        // x^4 + y^4 + z^4 + 1 has no real points
        let f = poly("1 4 0 0\n1 0 4 0\n1 0 0 4\n1 0 0 0");
        assert_eq!(ruled_test(&f, 30, 0).unwrap(), RuledVerdict::Inconclusive { sampled: 0 });
    }

    #[test]
    fn lines_in_surfaces() {
        let xaxis = Line3::new(Vec3::ints(0, 0, 0), Vec3::ints(1, 0, 0)).unwrap();
        assert!(line_in_surface(&xaxis, &poly("1 0 0 1")));
        assert!(!line_in_surface(&xaxis, &poly("1 0 0 1\n-1 0 0 0")));
        let cone = poly("1 2 0 0\n1 0 2 0\n-1 0 0 2");
        assert!(!line_in_surface(&xaxis, &cone));
        assert!(line_in_surface(&Line3::new(Vec3::ints(0, 0, 0), Vec3::ints(1, 0, 1)).unwrap(), &cone));
    }

    #[test]
    fn plucker_of_x_axis() {
        let xaxis = Line3::new(Vec3::ints(0, 0, 0), Vec3::ints(1, 0, 0)).unwrap();
        let p = plucker_from_line(&xaxis);
        assert_eq!(p.normalized(), [q(1), q(0), q(0), q(0), q(0), q(0)]);
        let pts = p.canonical_points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0], [q(0), q(-1), q(0), q(0)]);
        assert_eq!(pts[1], [q(1), q(0), q(0), q(0)]);
        let back = line_from_plucker(&PluckerPoint::new([q(1), q(0), q(0), q(0), q(0), q(0)]).unwrap()).unwrap();
        assert_eq!(back, xaxis);
        assert_eq!(meets_absolute_conic(&p), Ok(false));
        assert_eq!(PluckerPoint::new([q(1), q(0), q(0), q(0), q(0), q(1)]).unwrap_err(), RulingError::NotOnQuadric);
        let inf = PluckerPoint::new([q(0), q(0), q(0), q(1), q(0), q(0)]).unwrap();
        assert_eq!(line_from_plucker(&inf).unwrap_err(), RulingError::AtInfinity);
        assert_eq!(meets_absolute_conic(&inf), Err(RulingError::AtInfinity));
    }

    #[test]
    fn rational_roots_examples() {
        // (3t - 2)(t^2 - 2)(5t + 7)
        let u = &UniPoly::new(vec![q(-2), q(3)]) * &UniPoly::new(vec![q(-2), q(0), q(1)]);
        let u = &u * &UniPoly::new(vec![q(7), q(5)]);
        let mut r = rational_roots(&u);
        r.sort();
        assert_eq!(r, vec![qf(-7, 5), qf(2, 3)]);
    }

    #[test]
    fn pencil_census_on_sphere() {
        let sphere = poly("1 2 0 0\n1 0 2 0\n1 0 0 2\n-1 0 0 0");
        // great circles through the poles (0,0,1) and (0,0,-1)
        let mut circles = Vec::new();
        let mut a = 1i64;
        while circles.len() < 200 {
            for b in 0..a {
                if num_integer::Integer::gcd(&a, &b) == 1 && circles.len() < 200 {
                    circles.push(Circle3::from_center(Vec3::ints(0, 0, 0), Vec3::ints(a, b, 0), q(1)).unwrap());
                }
            }
            a += 1;
        }
        let points = vec![Vec3::ints(0, 0, 1), Vec3::ints(0, 0, -1), Vec3::ints(1, 0, 0)];
        let pop = popular_census(&sphere, &circles, &points).unwrap();
        assert_eq!(pop.iter().map(|p| (p.index, p.circles)).collect::<Vec<_>>(), vec![(0, 200), (1, 200)]);
        assert!(popular_census(&sphere, &circles[..100], &points).unwrap().is_empty());
        let off = Circle3::from_center(Vec3::ints(0, 0, 0), Vec3::ints(0, 0, 1), q(4)).unwrap();
        let mut bad = circles.clone();
        bad.push(off);
        assert_eq!(popular_census(&sphere, &bad, &points).unwrap_err(), RulingError::NotContained(200));
    }

    fn small_line(v: &[i64]) -> Option<Line3> {
        Line3::new(Vec3::new(qf(v[0], 3), q(v[1]), qf(v[2], 2)), Vec3::ints(v[3], v[4], v[5])).ok()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn flecnode_vanishes_on_contained_lines(a in proptest::collection::vec(-4i64..5, 10), b in proptest::collection::vec(-4i64..5, 10)) {
            // x A + y B contains the z-axis
            let f = &(&MultiPoly::var(3, 0) * &dense(2, &a)) + &(&MultiPoly::var(3, 1) * &dense(2, &b));
            if f.degree() == 3 {
                let fl = flecnode(&f).unwrap();
                prop_assert!(fl.degree() <= 9);
                let zaxis = Line3::new(Vec3::ints(0, 0, 0), Vec3::ints(0, 0, 1)).unwrap();
                prop_assert!(restrict_to_line(&fl, &zaxis).is_zero());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn plucker_round_trip(v in proptest::collection::vec(-9i64..10, 6), s in 1i64..5) {
            if let Some(l) = small_line(&v) {
                let p = plucker_from_line(&l);
                let [x0, x1, x2, x3, x4, x5] = p.coords().clone();
                prop_assert!((x0 * x5 + x1 * x4 + x2 * x3).is_zero());
                prop_assert_eq!(line_from_plucker(&p).unwrap(), l.clone());
                prop_assert_eq!(meets_absolute_conic(&p), Ok(false));
                // another pair of points on the same line
                let other = Line3::new(l.point_at(&q(s)), l.direction.scale(&qf(-2, s))).unwrap();
                prop_assert_eq!(plucker_from_line(&other), p.clone());
                for c in p.canonical_points() {
                    if !c[0].is_zero() {
                        let pt = Vec3::new(&c[1] / &c[0], &c[2] / &c[0], &c[3] / &c[0]);
                        prop_assert!(l.contains(&pt));
                    }
                }
            }
        }
    }
}
