//! Incidence counting: brute force, circle/surface crossings, and the
//! partition-based recursive counter.
//!
//! A circle is parametrized in the chart centered at its center with
//! orthogonal axes, where it reads `A s^2 + C t^2 = rho`. Reducing a
//! restricted polynomial modulo this conic gives `a(s) + b(s) t`, and on the
//! circle `t = +-sqrt(T(s))` with `T = (rho - A s^2) / C`. The norm
//! `N = a^2 - b^2 T` locates every parameter where the surface meets the circle.

use crate::geometry::{
    circle_to_conic, incidence_test, max_coplanar_cospherical, Circle3, IncidenceInstance, PlaneChart, Point3, Vec3,
};
use crate::partition::{build_partition, Partition, SignVector};
use crate::poly::univariate::{isolate_real_roots, isolate_real_roots_within, rational_between, AlgebraicReal, UniPoly};
use crate::poly::{divides, sylvester_resultant, MultiPoly};
use crate::rational::{lcm_denominators, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("surface polynomial is zero")]
    ZeroPolynomial,
    #[error("surface polynomial must have 3 variables, got {0}")]
    NotTrivariate(usize),
}

/// The circle in its own chart with integer data: `A s^2 + C t^2 = rho`.
#[derive(Debug, Clone)]
pub struct CircleFrame {
    pub chart: PlaneChart,
    /// `(const, s, t)` coefficients of `L x`, `L y`, `L z` on the chart.
    forms: [[BigInt; 3]; 3],
    l: BigInt,
    c_coef: BigInt,
    /// `rho - A s^2`, a positive multiple of `T`.
    pub t_sq: UniPoly,
    t_int: Vec<BigInt>,
    /// The circle lies in `|s| < 2^s_exp`.
    s_exp: i64,
}

fn to_ints(v: &[Q]) -> Vec<BigInt> {
    let den = lcm_denominators(v.iter());
    v.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut Vec<BigInt>, p: &[BigInt]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), BigInt::zero());
    }
    for (a, x) in acc.iter_mut().zip(p) {
        *a += x;
    }
}

fn uni(v: &[BigInt]) -> UniPoly {
    UniPoly::new(v.iter().map(|x| Q::from_integer(x.clone())).collect())
}

/// `sum v_i n^i d^(deg - i)` for `deg >= v.len() - 1`.
fn hom_eval(v: &[BigInt], n: &BigInt, d: &BigInt, deg: usize) -> BigInt {
    let mut acc = BigInt::zero();
    let mut dp = BigInt::one();
    for i in (0..=deg).rev() {
        acc *= n;
        if let Some(c) = v.get(i) {
            acc += c * &dp;
        }
        dp *= d;
    }
    acc
}

/// Surface polynomial scaled to integer coefficients, stored densely.
#[derive(Debug, Clone)]
pub struct IntSurface {
    d: usize,
    h: Vec<BigInt>,
}

impl IntSurface {
    pub fn new(f: &MultiPoly) -> Self {
        assert_eq!(f.nvars(), 3);
        let d = f.degree() as usize;
        let den = Q::from_integer(lcm_denominators(f.terms().map(|(_, c)| c)));
        let n = d + 1;
        let mut h = vec![BigInt::zero(); n * n * n];
        for (m, c) in f.terms() {
            let (i, j, k) = (m.exp(0) as usize, m.exp(1) as usize, m.exp(2) as usize);
            h[(i * n + j) * n + k] = (c * &den).to_integer();
        }
        IntSurface { d, h }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// `L^d f` on the chart, dense in (t, s): entry `j * (d+1) + i` is `s^i t^j`.
    fn substitute(&self, fr: &CircleFrame) -> Vec<BigInt> {
        let d = self.d;
        let n = d + 1;
        let mut lp = vec![BigInt::one()];
        for k in 1..=d {
            let next = &lp[k - 1] * &fr.l;
            lp.push(next);
        }
        let zero = || vec![BigInt::zero(); n * n];
        let mul_lin = |p: &mut Vec<BigInt>, f: &[BigInt; 3]| {
            let mut out = vec![BigInt::zero(); n * n];
            for j in 0..n {
                for i in 0..n - j {
                    let x = &p[j * n + i];
                    if x.is_zero() {
                        continue;
                    }
                    out[j * n + i] += &f[0] * x;
                    if i + j + 1 < n {
                        out[j * n + i + 1] += &f[1] * x;
                        out[(j + 1) * n + i] += &f[2] * x;
                    }
                }
            }
            *p = out;
        };
        let mut gx = zero();
        let mut gx_live = false;
        for i in (0..=d).rev() {
            let e = d - i;
            let mut gy = zero();
            let mut gy_live = false;
            for j in (0..=e).rev() {
                let f = e - j;
                let mut hz = zero();
                let mut hz_live = false;
                for k in (0..=f).rev() {
                    if hz_live {
                        mul_lin(&mut hz, &fr.forms[2]);
                    }
                    let c = &self.h[(i * n + j) * n + k];
                    if !c.is_zero() {
                        hz[0] += c * &lp[f - k];
                        hz_live = true;
                    }
                }
                if gy_live {
                    mul_lin(&mut gy, &fr.forms[1]);
                }
                if hz_live {
                    for (a, b) in gy.iter_mut().zip(hz) {
                        *a += b;
                    }
                    gy_live = true;
                }
            }
            if gx_live {
                mul_lin(&mut gx, &fr.forms[0]);
            }
            if gy_live {
                for (a, b) in gx.iter_mut().zip(gy) {
                    *a += b;
                }
                gx_live = true;
            }
        }
        gx
    }
}

impl CircleFrame {
    pub fn new(c: &Circle3) -> Self {
        let n = to_ints(&c.normal().to_array());
        let k = (0..3).min_by_key(|&i| n[i].magnitude().clone()).unwrap();
        let nv = Vec3::from_array([0, 1, 2].map(|i| Q::from_integer(n[i].clone())));
        let mut e = [Q::zero(), Q::zero(), Q::zero()];
        e[k] = Q::one();
        let u = nv.cross(&Vec3::from_array(e));
        let w = nv.cross(&u);
        let chart = PlaneChart::new(c.center().clone(), u.clone(), w.clone()).expect("orthogonal basis");
        let ctr = c.center().to_array();
        let l = lcm_denominators(ctr.iter());
        let lq = Q::from_integer(l.clone());
        let forms = [0, 1, 2].map(|i| {
            [(&ctr[i] * &lq).to_integer(), (u.get(i) * &lq).to_integer(), (w.get(i) * &lq).to_integer()]
        });
        let r2 = c.radius_sq();
        let lr = Q::from_integer(r2.denom().clone());
        let a_coef = (u.norm_sq() * &lr).to_integer();
        let c_coef = (w.norm_sq() * &lr).to_integer();
        let t_int = vec![r2.numer().clone(), BigInt::zero(), -a_coef];
        let e = r2.numer().bits() as i64 - t_int[2].bits() as i64 + 1;
        let s_exp = e.div_euclid(2) + e.rem_euclid(2);
        CircleFrame { chart, forms, l, c_coef, t_sq: uni(&t_int), t_int, s_exp }
    }

    /// `f` restricted to the circle as `a(s) + b(s) t`, up to a positive factor.
    pub fn restrict(&self, f: &MultiPoly) -> Restriction {
        self.restrict_int(&IntSurface::new(f))
    }

    pub fn restrict_int(&self, f: &IntSurface) -> Restriction {
        let d = f.d;
        let n = d + 1;
        let g = f.substitute(self);
        let kk = d / 2;
        let mut cp = vec![BigInt::one()];
        let mut tp = vec![vec![BigInt::one()]];
        for k in 1..=kk {
            let next = &cp[k - 1] * &self.c_coef;
            cp.push(next);
            let next = poly_mul(&tp[k - 1], &self.t_int);
            tp.push(next);
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..n {
            let col = &g[j * n..j * n + n - j];
            if col.iter().all(Zero::is_zero) {
                continue;
            }
            let k = j / 2;
            let scaled: Vec<BigInt> = col.iter().map(|x| x * &cp[kk - k]).collect();
            let term = poly_mul(&scaled, &tp[k]);
            if j % 2 == 0 {
                poly_add_into(&mut a, &term);
            } else {
                poly_add_into(&mut b, &term);
            }
        }
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        while b.last().is_some_and(Zero::is_zero) {
            b.pop();
        }
        let mut norm: Vec<BigInt> = poly_mul(&a, &a).into_iter().map(|x| x * &self.c_coef).collect();
        let bb = poly_mul(&poly_mul(&b, &b), &self.t_int);
        for (i, x) in bb.into_iter().enumerate() {
            if i >= norm.len() {
                norm.push(BigInt::zero());
            }
            norm[i] -= x;
        }
        let norm = uni(&norm).primitive();
        Restriction { a: uni(&a), b: uni(&b), a_int: a, b_int: b, norm }
    }

    /// Sign of `a + eps b sqrt(T)` at a rational `s` with `T(s) > 0`.
    fn branch_sign(&self, r: &Restriction, s: &Q, eps: i8) -> i8 {
        let (p, q) = (s.numer(), s.denom());
        let deg = r.a_int.len().max(r.b_int.len()).max(1) - 1;
        let av = hom_eval(&r.a_int, p, q, deg);
        let bv = hom_eval(&r.b_int, p, q, deg);
        let tq = hom_eval(&self.t_int, p, q, 2);
        let sa = int_sign(&av);
        let sb = int_sign(&bv) * eps;
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let lhs = &av * &av * &self.c_coef * q * q;
        let rhs = &bv * &bv * tq;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }
}

fn int_sign(x: &BigInt) -> i8 {
    match x.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

#[derive(Debug, Clone)]
pub struct Restriction {
    pub a: UniPoly,
    pub b: UniPoly,
    a_int: Vec<BigInt>,
    b_int: Vec<BigInt>,
    pub norm: UniPoly,
}

impl Restriction {
    pub fn contained(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

/// Which of the two points over parameter `s` lie on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Branches {
    upper: bool,
    lower: bool,
}

/// Zeros over a parameter `s0` with `T(s0) >= 0`.
fn branches_at(r: &Restriction, s0: &mut AlgebraicReal, t_sign: i8) -> Branches {
    if s0.sign_of(&r.norm) != 0 {
        return Branches::default();
    }
    if t_sign == 0 {
        return Branches { upper: true, lower: true };
    }
    branch_of_root(r, s0)
}

/// Zeros over a root `s0` of `r.norm` with `T(s0) > 0`.
fn branch_of_root(r: &Restriction, s0: &mut AlgebraicReal) -> Branches {
    let sb = s0.sign_of(&r.b);
    if sb == 0 {
        return Branches { upper: true, lower: true };
    }
    // a + b sqrt(T) = 0 needs sign(a) = -sign(b)
    let sa = s0.sign_of(&r.a);
    if sa == -sb {
        Branches { upper: true, lower: false }
    } else {
        Branches { upper: false, lower: true }
    }
}

fn count_points(branches: Branches, t_sign: i8) -> usize {
    if t_sign == 0 {
        (branches.upper || branches.lower) as usize
    } else {
        branches.upper as usize + branches.lower as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Crossings {
    pub contained: bool,
    pub crossings: usize,
}

/// Whether `c` lies on Z(f), and otherwise how many distinct points they share.
pub fn circle_surface_crossings(c: &Circle3, f: &MultiPoly) -> Result<Crossings, EngineError> {
    if f.is_zero() {
        return Err(EngineError::ZeroPolynomial);
    }
    if f.nvars() != 3 {
        return Err(EngineError::NotTrivariate(f.nvars()));
    }
    let frame = CircleFrame::new(c);
    let conic = circle_to_conic(c, &frame.chart).expect("chart built from the circle");
    let g = f.restrict_to_chart(&frame.chart);
    if divides(&conic, &g).expect("bivariate") {
        return Ok(Crossings { contained: true, crossings: 0 });
    }
    let res = sylvester_resultant(&g, &conic, 1).expect("bivariate");
    let res = res.to_univariate(0).expect("t eliminated");
    let r = frame.restrict(f);
    let mut total = 0;
    for mut s0 in isolate_real_roots(&res) {
        let ts = s0.sign_of(&frame.t_sq);
        if ts < 0 {
            continue;
        }
        total += count_points(branches_at(&r, &mut s0, ts), ts);
    }
    assert!(total <= 2 * f.degree() as usize, "crossings exceed 2 deg f");
    Ok(Crossings { contained: false, crossings: total })
}

/// How a circle meets the zero set of a list of factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcAnalysis {
    pub contained: bool,
    /// Distinct points of the circle on the union of the zero sets.
    pub crossings: usize,
    /// Sign vectors of the open arcs.
    pub cells: BTreeSet<SignVector>,
}

/// Critical parameter with the factors whose norm vanishes there.
struct Critical {
    s: AlgebraicReal,
    on_conic_end: bool,
    factors: Vec<usize>,
}

fn insert_sorted(list: &mut Vec<Critical>, mut x: AlgebraicReal, tag: Option<usize>) {
    let mut lo = 0;
    let mut hi = list.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        match list[mid].s.compare(&mut x) {
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => hi = mid,
            Ordering::Equal => {
                match tag {
                    Some(j) => list[mid].factors.push(j),
                    None => list[mid].on_conic_end = true,
                }
                return;
            }
        }
    }
    let factors = tag.into_iter().collect();
    list.insert(lo, Critical { s: x, on_conic_end: tag.is_none(), factors });
}

pub fn analyze_circle(c: &Circle3, factors: &[MultiPoly]) -> ArcAnalysis {
    let ints: Vec<IntSurface> = factors.iter().map(IntSurface::new).collect();
    analyze_circle_int(c, &ints)
}

pub fn analyze_circle_int(c: &Circle3, factors: &[IntSurface]) -> ArcAnalysis {
    analyze_in_frame(&CircleFrame::new(c), factors)
}

fn analyze_in_frame(frame: &CircleFrame, factors: &[IntSurface]) -> ArcAnalysis {
    let rs: Vec<Restriction> = factors.iter().map(|f| frame.restrict_int(f)).collect();
    if rs.iter().any(Restriction::contained) {
        return ArcAnalysis { contained: true, crossings: 0, cells: BTreeSet::new() };
    }
    let mut crit: Vec<Critical> = Vec::new();
    for x in isolate_real_roots(&frame.t_sq) {
        insert_sorted(&mut crit, x, None);
    }
    for (j, r) in rs.iter().enumerate() {
        if r.norm.deg() == 0 {
            continue;
        }
        for mut x in isolate_real_roots_within(&r.norm, Some(frame.s_exp)) {
            if x.sign_of(&frame.t_sq) >= 0 {
                insert_sorted(&mut crit, x, Some(j));
            }
        }
    }
    let mut crossings = 0;
    for cr in crit.iter_mut() {
        if cr.on_conic_end {
            crossings += !cr.factors.is_empty() as usize;
            continue;
        }
        let mut br = Branches::default();
        for &j in &cr.factors {
            let b = branch_of_root(&rs[j], &mut cr.s);
            br.upper |= b.upper;
            br.lower |= b.lower;
        }
        crossings += count_points(br, 1);
    }
    let mut cells = BTreeSet::new();
    for i in 0..crit.len().saturating_sub(1) {
        let (left, right) = crit.split_at_mut(i + 1);
        let s = rational_between(&mut left[i].s, &mut right[0].s);
        for eps in [1i8, -1] {
            cells.insert(SignVector(rs.iter().map(|r| frame.branch_sign(r, &s, eps)).collect()));
        }
    }
    debug_assert!(cells.iter().all(SignVector::is_zero_free));
    ArcAnalysis { contained: false, crossings, cells }
}

pub fn count_bruteforce(inst: &IncidenceInstance) -> u64 {
    count_pairs(&inst.points, &inst.circles)
}

/// A point over a common positive denominator.
#[derive(Debug, Clone)]
pub struct IntPoint {
    p: [BigInt; 3],
    d: BigInt,
}

impl IntPoint {
    pub fn new(x: &Point3) -> Self {
        let a = x.to_array();
        let d = lcm_denominators(a.iter());
        let dq = Q::from_integer(d.clone());
        IntPoint { p: a.map(|v| (v * &dq).to_integer()), d }
    }
}

fn dot(a: &[BigInt; 3], b: &[BigInt; 3]) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// A circle as an integer plane `n.x = off` and sphere `k|x|^2 + v.x + e = 0`.
#[derive(Debug, Clone)]
pub struct IntCircle {
    n: [BigInt; 3],
    off: BigInt,
    k: BigInt,
    v: [BigInt; 3],
    e: BigInt,
}

impl IntCircle {
    pub fn new(c: &Circle3) -> Self {
        let plane: Vec<Q> = c.normal().to_array().into_iter().chain([c.offset().clone()]).collect();
        let plane = to_ints(&plane);
        let ctr = c.center();
        let two = Q::from_integer(2.into());
        let sph: Vec<Q> = [Q::one()]
            .into_iter()
            .chain(ctr.to_array().map(|x| -(x * &two)))
            .chain([ctr.norm_sq() - c.radius_sq()])
            .collect();
        let sph = to_ints(&sph);
        IntCircle {
            n: [plane[0].clone(), plane[1].clone(), plane[2].clone()],
            off: plane[3].clone(),
            k: sph[0].clone(),
            v: [sph[1].clone(), sph[2].clone(), sph[3].clone()],
            e: sph[4].clone(),
        }
    }

    pub fn contains(&self, x: &IntPoint) -> bool {
        if dot(&self.n, &x.p) != &self.off * &x.d {
            return false;
        }
        let lhs = &self.k * dot(&x.p, &x.p) + &x.d * (dot(&self.v, &x.p) + &self.e * &x.d);
        lhs.is_zero()
    }
}

fn count_pairs(points: &[Point3], circles: &[Circle3]) -> u64 {
    let pts: Vec<IntPoint> = points.iter().map(IntPoint::new).collect();
    circles
        .par_iter()
        .map(|c| {
            let ic = IntCircle::new(c);
            pts.iter().filter(|p| ic.contains(p)).count() as u64
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Breakdown {
    /// I(P0, C0): points on Z(f) against circles contained in Z(f).
    pub p0_c0: u64,
    /// I(P0, C'): points on Z(f) against the remaining circles.
    pub p0_cprime: u64,
    /// I(P', C'): the recursive cell counts.
    pub pprime_cprime: u64,
}

impl Breakdown {
    pub fn sum(&self) -> u64 {
        self.p0_c0 + self.p0_cprime + self.pprime_cprime
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellQ {
    pub depth: usize,
    pub signs: String,
    pub m: usize,
    pub n: usize,
    pub q_declared: usize,
    pub q_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub method: String,
    pub total: u64,
    pub breakdown: Breakdown,
    pub recursion_depth: usize,
    pub cells_visited: usize,
    pub crossing_total: u64,
    pub partition_degree: Option<u32>,
    pub cell_q: Vec<CellQ>,
}

impl CountReport {
    pub fn consistent(&self) -> bool {
        self.total == self.breakdown.sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub r: usize,
    pub seed: u64,
    /// Brute force once a subinstance has at most this many points...
    pub min_points: usize,
    /// ...or at most this many circles.
    pub min_circles: usize,
    pub max_depth: usize,
    pub track_cell_q: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { r: 8, seed: 0, min_points: 64, min_circles: 8, max_depth: 12, track_cell_q: false }
    }
}

pub fn count_partitioned(inst: &IncidenceInstance, r: usize) -> CountReport {
    count_with_config(inst, &EngineConfig { r, ..EngineConfig::default() })
}

pub fn count_with_config(inst: &IncidenceInstance, cfg: &EngineConfig) -> CountReport {
    let ctx = Ctx::new(&inst.points, &inst.circles);
    let pts: Vec<usize> = (0..inst.m()).collect();
    let cs: Vec<usize> = (0..inst.n()).collect();
    let lvl = recurse(&ctx, &pts, &cs, inst.q, cfg, 0, cfg.seed);
    let report = CountReport {
        method: "partition".into(),
        total: lvl.breakdown.sum(),
        breakdown: lvl.breakdown,
        recursion_depth: lvl.depth,
        cells_visited: lvl.cells,
        crossing_total: lvl.crossings,
        partition_degree: lvl.degree,
        cell_q: lvl.cell_q,
    };
    debug_assert!(report.consistent());
    report
}

pub fn bruteforce_report(inst: &IncidenceInstance) -> CountReport {
    let total = count_bruteforce(inst);
    CountReport {
        method: "bruteforce".into(),
        total,
        breakdown: Breakdown { p0_c0: 0, p0_cprime: 0, pprime_cprime: total },
        recursion_depth: 0,
        cells_visited: 0,
        crossing_total: 0,
        partition_degree: None,
        cell_q: Vec::new(),
    }
}

struct Level {
    breakdown: Breakdown,
    depth: usize,
    cells: usize,
    crossings: u64,
    degree: Option<u32>,
    cell_q: Vec<CellQ>,
}

fn sub_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64 + 1)
}

/// Instance data converted once for the whole recursion.
struct Ctx<'a> {
    points: &'a [Point3],
    ipts: Vec<IntPoint>,
    circles: &'a [Circle3],
    icircles: Vec<IntCircle>,
    frames: Vec<CircleFrame>,
}

impl<'a> Ctx<'a> {
    fn new(points: &'a [Point3], circles: &'a [Circle3]) -> Self {
        Ctx {
            points,
            ipts: points.par_iter().map(IntPoint::new).collect(),
            circles,
            icircles: circles.par_iter().map(IntCircle::new).collect(),
            frames: circles.par_iter().map(CircleFrame::new).collect(),
        }
    }

    fn brute(&self, pts: &[usize], cs: &[usize]) -> Level {
        let count = cs
            .par_iter()
            .map(|&c| pts.iter().filter(|&&p| self.icircles[c].contains(&self.ipts[p])).count() as u64)
            .sum();
        Level {
            breakdown: Breakdown { pprime_cprime: count, ..Breakdown::default() },
            depth: 0,
            cells: 0,
            crossings: 0,
            degree: None,
            cell_q: Vec::new(),
        }
    }
}

fn recurse(ctx: &Ctx, pts: &[usize], cs: &[usize], q: usize, cfg: &EngineConfig, depth: usize, seed: u64) -> Level {
    let m = pts.len();
    if m <= cfg.min_points || cs.len() <= cfg.min_circles || depth >= cfg.max_depth || m < 2 {
        return ctx.brute(pts, cs);
    }
    let sub: Vec<Point3> = pts.iter().map(|&i| ctx.points[i].clone()).collect();
    let Ok(part) = build_partition(&sub, cfg.r.clamp(2, m), seed) else {
        return ctx.brute(pts, cs);
    };
    split(ctx, pts, cs, q, cfg, depth, seed, &part)
}

#[allow(clippy::too_many_arguments)]
fn split(
    ctx: &Ctx,
    pts: &[usize],
    cs: &[usize],
    q: usize,
    cfg: &EngineConfig,
    depth: usize,
    seed: u64,
    part: &Partition,
) -> Level {
    let ints: Vec<IntSurface> = part.factors.iter().map(IntSurface::new).collect();
    let arcs: Vec<ArcAnalysis> = cs.par_iter().map(|&c| analyze_in_frame(&ctx.frames[c], &ints)).collect();
    let p0: Vec<usize> = part.zero_set_points().into_iter().map(|i| pts[i]).collect();
    let mut bd = Breakdown::default();
    let mut crossings = 0u64;
    for (&c, a) in cs.iter().zip(&arcs) {
        let on: Vec<&Point3> =
            p0.iter().filter(|&&p| ctx.icircles[c].contains(&ctx.ipts[p])).map(|&p| &ctx.points[p]).collect();
        let hits = on.len();
        if a.contained {
            bd.p0_c0 += hits as u64;
        } else {
            debug_assert!(on.iter().collect::<BTreeSet<_>>().len() <= a.crossings);
            debug_assert!(a.cells.len() <= 1 + a.crossings);
            bd.p0_cprime += hits as u64;
            crossings += a.crossings as u64;
        }
    }
    let cells: Vec<(&SignVector, &Vec<usize>)> = part.open_cells().collect();
    let subs: Vec<(Level, Option<CellQ>)> = cells
        .par_iter()
        .enumerate()
        .map(|(k, (sv, idx))| {
            let sub_pts: Vec<usize> = idx.iter().map(|&i| pts[i]).collect();
            let sub_cs: Vec<usize> = cs
                .iter()
                .zip(&arcs)
                .filter(|(_, a)| !a.contained && a.cells.contains(sv))
                .map(|(&c, _)| c)
                .collect();
            let cq = cfg.track_cell_q.then(|| {
                let circles: Vec<Circle3> = sub_cs.iter().map(|&c| ctx.circles[c].clone()).collect();
                CellQ {
                    depth: depth + 1,
                    signs: sv.to_string(),
                    m: sub_pts.len(),
                    n: sub_cs.len(),
                    q_declared: q,
                    q_effective: max_coplanar_cospherical(&circles).0,
                }
            });
            (recurse(ctx, &sub_pts, &sub_cs, q, cfg, depth + 1, sub_seed(seed, k)), cq)
        })
        .collect();
    let mut lvl =
        Level { breakdown: bd, depth: 1, cells: cells.len(), crossings, degree: Some(part.degree()), cell_q: Vec::new() };
    for (s, cq) in subs {
        lvl.breakdown.pprime_cprime += s.breakdown.sum();
        lvl.depth = lvl.depth.max(1 + s.depth);
        lvl.cells += s.cells;
        lvl.crossings += s.crossings;
        lvl.cell_q.extend(cq);
        lvl.cell_q.extend(s.cell_q);
    }
    lvl
}

/// Points with at least k incident circles, with their multiplicities.
pub fn rich_points(inst: &IncidenceInstance, k: usize) -> Vec<(Point3, usize)> {
    inst.points
        .par_iter()
        .map(|p| (p.clone(), inst.circles.iter().filter(|c| incidence_test(p, c)).count()))
        .filter(|(_, d)| *d >= k && *d > 0)
        .collect()
}

/// Constant of the K_{3,2} ceiling.
///
/// Three distinct points lie on at most one circle, so summing C(d_c, 3)
/// over circles gives at most C(m, 3); Hoelder then yields
/// `I <= n^(2/3) m + 2n` for distinct points and circles.
pub const KST_CONSTANT: u64 = 2;

/// `ceil(KST_CONSTANT * (n^(2/3) m + n))`.
pub fn k32_bound(m: u64, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let n23 = (n as f64).powf(2.0 / 3.0) * (1.0 + 1e-12);
    (KST_CONSTANT as f64 * (n23 * m as f64 + n as f64)).ceil() as u64
}

/// Sorted pairs (point index, circle index) of the incidence graph.
pub fn incidence_pairs(inst: &IncidenceInstance) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = inst
        .points
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| {
            inst.circles.iter().enumerate().filter(move |(_, c)| incidence_test(p, c)).map(move |(j, _)| (i, j))
        })
        .collect();
    out.sort_unstable();
    out
}

/// True when no two distinct circles share three distinct points.
pub fn k32_free(inst: &IncidenceInstance) -> bool {
    let pairs = incidence_pairs(inst);
    let mut by_circle: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    for (p, c) in pairs {
        by_circle[c].push(p);
    }
    for i in 0..inst.n() {
        for j in i + 1..inst.n() {
            if inst.circles[i] == inst.circles[j] {
                continue;
            }
            let common = by_circle[i].iter().filter(|p| by_circle[j].contains(p)).count();
            if common >= 3 {
                return false;
            }
        }
    }
    true
}
