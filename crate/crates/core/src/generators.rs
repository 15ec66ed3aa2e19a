//! Seeded instance generators. Every instance is exact and respects its
//! declared cap.

use crate::geometry::{circle_through_three_points, common_sphere, Circle3, IncidenceInstance, Plane, Point3, Sphere, Vec3};
use crate::rational::{q, qf, Q};
use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("cap q = {q} is infeasible for n = {n}")]
    InfeasibleCap { q: usize, n: usize },
    #[error("could not place {wanted} circles under cap {q}, placed {placed}")]
    CapUnattainable { wanted: usize, placed: usize, q: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Grid,
    CappedSpheres,
    UnitBundle,
    Random,
    TriangleCloud,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub m: usize,
    pub n: usize,
    pub q: usize,
    pub seed: u64,
}

pub fn generate(spec: &GenSpec) -> Result<IncidenceInstance, GenError> {
    match spec.kind {
        GenKind::Grid => Ok(gen_grid(spec.m, spec.n)),
        GenKind::CappedSpheres => gen_capped_spheres(spec.m, spec.n, spec.q, spec.seed),
        GenKind::UnitBundle => gen_unit_bundle(spec.m, spec.n, spec.q, spec.seed),
        GenKind::Random => gen_random(spec.m, spec.n, spec.q, spec.seed),
        GenKind::TriangleCloud => Ok(IncidenceInstance::new(gen_triangle_cloud(spec.m, spec.seed), Vec::new(), 1)),
    }
}

fn check_cap(n: usize, q: usize) -> Result<(), GenError> {
    if q < 1 || (n > 0 && q > n) {
        return Err(GenError::InfeasibleCap { q, n });
    }
    Ok(())
}

/// Incremental version of the coplanar/cospherical census: admits a
/// circle only if no plane or sphere would then hold more than `q`.
struct CapTracker {
    q: usize,
    circles: Vec<Circle3>,
    seen: HashSet<Circle3>,
    planes: HashMap<Plane, usize>,
    spheres: HashMap<Sphere, HashSet<usize>>,
}

impl CapTracker {
    fn new(q: usize) -> Self {
        CapTracker { q, circles: Vec::new(), seen: HashSet::new(), planes: HashMap::new(), spheres: HashMap::new() }
    }

    fn try_add(&mut self, c: Circle3) -> bool {
        if self.seen.contains(&c) {
            return false;
        }
        let plane = c.plane().canonical();
        if self.planes.get(&plane).copied().unwrap_or(0) + 1 > self.q {
            return false;
        }
        let idx = self.circles.len();
        let mut touched: HashMap<Sphere, Vec<usize>> = HashMap::new();
        for (j, o) in self.circles.iter().enumerate() {
            if let Some(s) = common_sphere(&c, o) {
                touched.entry(s).or_default().push(j);
            }
        }
        for (s, js) in &touched {
            let mut set = self.spheres.get(s).cloned().unwrap_or_default();
            set.extend(js.iter().copied());
            set.insert(idx);
            if set.len() > self.q {
                return false;
            }
        }
        for (s, js) in touched {
            let e = self.spheres.entry(s).or_default();
            e.extend(js);
            e.insert(idx);
        }
        *self.planes.entry(plane).or_default() += 1;
        self.seen.insert(c.clone());
        self.circles.push(c);
        true
    }
}

fn dedup_points(pts: Vec<Point3>) -> Vec<Point3> {
    let mut seen = HashSet::new();
    pts.into_iter().filter(|p| seen.insert(p.clone())).collect()
}

/// Second intersection of the circle with the chord from `p` (a point of
/// the circle) in direction `u`, which must lie in the circle's plane.
fn chord_point(c: &Circle3, p: &Point3, u: &Vec3) -> Option<Point3> {
    let uu = u.norm_sq();
    if uu.is_zero() {
        return None;
    }
    let t = -q(2) * (p - c.center()).dot(u) / uu;
    if t.is_zero() {
        return None;
    }
    Some(p + &u.scale(&t))
}

/// A rational point of `c` other than `p`, from a random in-plane chord.
fn random_point_on(c: &Circle3, p: &Point3, rng: &mut ChaCha8Rng) -> Option<Point3> {
    let nrm = c.normal();
    let helper = if nrm.x.is_zero() { Vec3::ints(1, 0, 0) } else { Vec3::ints(0, 1, 0) };
    let a = nrm.cross(&helper);
    let b = nrm.cross(&a);
    let u = &a.scale(&q(rng.random_range(-9..=9))) + &b.scale(&q(rng.random_range(1..=9)));
    chord_point(c, p, &u)
}

// ---------------------------------------------------------------------------
// grid

/// `floor(sqrt(m))^2` grid points in the plane z = 0 and the `n` richest
/// circles centered at grid points with squared radii among the grid
/// distances.
pub fn gen_grid(m: usize, n: usize) -> IncidenceInstance {
    let s = (m as f64).sqrt().floor() as i64;
    let s = (1..=s + 1).rev().find(|k| (k * k) as usize <= m).unwrap_or(0);
    let points: Vec<Point3> = (0..s).flat_map(|i| (0..s).map(move |j| Vec3::ints(i, j, 0))).collect();
    // representations a^2 + b^2 of each squared distance
    let mut reps: HashMap<i64, Vec<(i64, i64)>> = HashMap::new();
    for a in -(s - 1)..s {
        for b in -(s - 1)..s {
            if (a, b) != (0, 0) {
                reps.entry(a * a + b * b).or_default().push((a, b));
            }
        }
    }
    if reps.is_empty() {
        reps.insert(1, Vec::new());
    }
    let in_grid = |x: i64, y: i64| (0..s).contains(&x) && (0..s).contains(&y);
    let centers: Vec<(i64, i64)> = if s == 0 { vec![(0, 0)] } else { (0..s).flat_map(|i| (0..s).map(move |j| (i, j))).collect() };
    let mid = s - 1; // doubled center coordinate
    let mut cands: Vec<(usize, i64, i64, (i64, i64))> = Vec::new();
    for (&r2, rs) in &reps {
        for &(cx, cy) in &centers {
            let hits = rs.iter().filter(|(a, b)| in_grid(cx + a, cy + b)).count();
            let off = (2 * cx - mid).pow(2) + (2 * cy - mid).pow(2);
            cands.push((hits, r2, off, (cx, cy)));
        }
    }
    cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));
    let circles: Vec<Circle3> = cands
        .iter()
        .take(n)
        .map(|&(_, r2, _, (cx, cy))| Circle3::from_center(Vec3::ints(cx, cy, 0), Vec3::ints(0, 0, 1), q(r2)).expect("valid circle"))
        .collect();
    let q = circles.len().max(1);
    IncidenceInstance::new(points, circles, q)
}

// ---------------------------------------------------------------------------
// capped spheres

/// Rational point on the sphere of radius `r` about `c`, by inverse
/// stereographic projection of `(u, v)`.
fn sphere_point(c: &Point3, r: &Q, u: &Q, v: &Q) -> Point3 {
    let s = u * u + v * v;
    let den = (&s + Q::one()).recip();
    let unit = Vec3::new(q(2) * u * &den, q(2) * v * &den, (&s - Q::one()) * &den);
    c + &unit.scale(r)
}

fn random_q(rng: &mut ChaCha8Rng, span: i64, dens: i64) -> Q {
    qf(rng.random_range(-span..=span), rng.random_range(1..=dens))
}

/// Circles spread over `ceil(n/q)` spheres, at most `q` per sphere, with
/// points taken from per-sphere pools of rational sphere points.
pub fn gen_capped_spheres(m: usize, n: usize, q_cap: usize, seed: u64) -> Result<IncidenceInstance, GenError> {
    check_cap(n, q_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n.div_ceil(q_cap).max(1);
    let spheres: Vec<(Point3, Q)> = (0..k)
        .map(|i| (Vec3::ints(7 * i as i64, (i as i64 % 3) - 1, 0), Q::from_integer((2 + i as i64 % 4).into()) + qf(1, 2 + i as i64)))
        .collect();
    let mut pools: Vec<Vec<Point3>> = vec![Vec::new(); k];
    for i in 0..m {
        let s = i % k;
        let (c, r) = &spheres[s];
        loop {
            let p = sphere_point(c, r, &random_q(&mut rng, 12, 5), &random_q(&mut rng, 12, 5));
            if !pools[s].contains(&p) {
                pools[s].push(p);
                break;
            }
        }
    }
    let mut tracker = CapTracker::new(q_cap);
    let mut attempts = 0;
    for i in 0..n {
        let s = i / q_cap;
        let (c, r) = &spheres[s];
        loop {
            attempts += 1;
            if attempts > 200 * n + 100 {
                return Err(GenError::CapUnattainable { wanted: n, placed: tracker.circles.len(), q: q_cap });
            }
            let mut tri: Vec<Point3> = pools[s].choose_multiple(&mut rng, 3).cloned().collect();
            while tri.len() < 3 {
                tri.push(sphere_point(c, r, &random_q(&mut rng, 40, 7), &random_q(&mut rng, 40, 7)));
            }
            if let Ok(circ) = circle_through_three_points(&tri[0], &tri[1], &tri[2]) {
                if tracker.try_add(circ) {
                    break;
                }
            }
        }
    }
    let points = dedup_points(pools.into_iter().flatten().collect());
    Ok(IncidenceInstance::new(points, tracker.circles, q_cap))
}

// ---------------------------------------------------------------------------
// unit circles

/// Rational rotation from an integer quaternion.
pub(crate) fn rotation(w: i64, x: i64, y: i64, z: i64) -> [[Q; 3]; 3] {
    let n = w * w + x * x + y * y + z * z;
    let e = |v: i64| qf(v, n);
    [
        [e(w * w + x * x - y * y - z * z), e(2 * (x * y - w * z)), e(2 * (x * z + w * y))],
        [e(2 * (x * y + w * z)), e(w * w - x * x + y * y - z * z), e(2 * (y * z - w * x))],
        [e(2 * (x * z - w * y)), e(2 * (y * z + w * x)), e(w * w - x * x - y * y + z * z)],
    ]
}

pub(crate) fn apply(r: &[[Q; 3]; 3], v: &Vec3) -> Vec3 {
    let a = v.to_array();
    let row = |i: usize| &(&r[i][0] * &a[0] + &r[i][1] * &a[1]) + &(&r[i][2] * &a[2]);
    Vec3::new(row(0), row(1), row(2))
}

/// Point of the standard unit circle for the parameter t.
fn unit_param(t: &Q) -> Vec3 {
    let den = (t * t + Q::one()).recip();
    Vec3::new((Q::one() - t * t) * &den, q(2) * t * &den, Q::zero())
}

/// Unit circles, a bundle of them through a common pair of points when the
/// cap allows it, the rest rotated and translated at random.
pub fn gen_unit_bundle(m: usize, n: usize, q_cap: usize, seed: u64) -> Result<IncidenceInstance, GenError> {
    check_cap(n, q_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bundle = if q_cap >= 2 { n.min(6.max(n / 2)) } else { 0 };
    let o = Vec3::new(qf(-3, 5), q(0), q(0));
    let a = Vec3::new(qf(3, 5), q(0), q(0));
    let mut tracker = CapTracker::new(q_cap);
    // (circle, a known rational point on it)
    let mut placed: Vec<Point3> = Vec::new();
    let mut k = 0i64;
    while tracker.circles.len() < bundle {
        k += 1;
        if k > 50 * n as i64 + 50 {
            break;
        }
        // centers at distance 4/5 from the midpoint, orthogonal to oa
        let dir = unit_param(&qf(k, 7));
        let center = Vec3::new(q(0), qf(4, 5) * &dir.x, qf(4, 5) * &dir.y);
        let normal = Vec3::new(q(0), -dir.y.clone(), dir.x.clone());
        let c = Circle3::from_center(center, normal, q(1)).expect("unit circle");
        if tracker.try_add(c) {
            placed.push(o.clone());
        }
    }
    let mut attempts = 0;
    while tracker.circles.len() < n {
        attempts += 1;
        if attempts > 200 * n + 100 {
            return Err(GenError::CapUnattainable { wanted: n, placed: tracker.circles.len(), q: q_cap });
        }
        let rot = rotation(rng.random_range(-5..=5), rng.random_range(-5..=5), rng.random_range(-5..=5), rng.random_range(1..=5));
        let shift = Vec3::new(random_q(&mut rng, 8, 3), random_q(&mut rng, 8, 3), random_q(&mut rng, 8, 3));
        let center = shift.clone();
        let normal = apply(&rot, &Vec3::ints(0, 0, 1));
        let c = Circle3::from_center(center, normal, q(1)).expect("unit circle");
        let p = &apply(&rot, &unit_param(&random_q(&mut rng, 6, 4))) + &shift;
        if tracker.try_add(c) {
            placed.push(p);
        }
    }
    let mut points = Vec::new();
    if bundle > 0 && m >= 2 {
        points.push(o.clone());
        points.push(a.clone());
    }
    let circles = tracker.circles;
    let mut guard = 0;
    while points.len() < m && !circles.is_empty() && guard < 100 * m + 100 {
        guard += 1;
        let i = rng.random_range(0..circles.len());
        if let Some(p) = random_point_on(&circles[i], &placed[i], &mut rng) {
            if !points.contains(&p) {
                points.push(p);
            }
        }
    }
    while points.len() < m {
        let p = Vec3::new(random_q(&mut rng, 50, 9), random_q(&mut rng, 50, 9), random_q(&mut rng, 50, 9));
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points.truncate(m);
    Ok(IncidenceInstance::new(points, circles, q_cap))
}

// ---------------------------------------------------------------------------
// random

fn lattice_point(rng: &mut ChaCha8Rng, half: i64) -> Point3 {
    Vec3::ints(rng.random_range(-half..=half), rng.random_range(-half..=half), rng.random_range(-(half / 2).max(1)..=(half / 2).max(1)))
}

/// Random lattice points and circles through triples of them. Under a cap
/// below n, candidates that would break it are replaced by circles through
/// one instance point and two perturbed off-lattice points.
pub fn gen_random(m: usize, n: usize, q_cap: usize, seed: u64) -> Result<IncidenceInstance, GenError> {
    check_cap(n, q_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half = 6i64;
    while ((2 * half + 1).pow(2) * (half + 1)) < 4 * m as i64 {
        half += 2;
    }
    let mut seen = HashSet::new();
    let mut points = Vec::with_capacity(m);
    while points.len() < m {
        let p = lattice_point(&mut rng, half);
        if seen.insert(p.clone()) {
            points.push(p);
        }
    }
    let capped = q_cap < n;
    let mut tracker = CapTracker::new(if capped { q_cap } else { usize::MAX });
    let mut attempts = 0;
    let pick = |rng: &mut ChaCha8Rng, pts: &Vec<Point3>| -> Point3 {
        if pts.is_empty() {
            lattice_point(rng, half)
        } else {
            pts[rng.random_range(0..pts.len())].clone()
        }
    };
    while tracker.circles.len() < n {
        attempts += 1;
        if attempts > 200 * n + 100 {
            return Err(GenError::CapUnattainable { wanted: n, placed: tracker.circles.len(), q: q_cap });
        }
        let perturbed = q_cap == 1 || attempts > 4 * n;
        let tri = if perturbed {
            let off = |rng: &mut ChaCha8Rng| Vec3::new(random_q(rng, 97, 11), random_q(rng, 97, 11), random_q(rng, 97, 11));
            [pick(&mut rng, &points), off(&mut rng), off(&mut rng)]
        } else {
            [pick(&mut rng, &points), pick(&mut rng, &points), pick(&mut rng, &points)]
        };
        let Ok(c) = circle_through_three_points(&tri[0], &tri[1], &tri[2]) else { continue };
        if capped {
            tracker.try_add(c);
        } else if tracker.seen.insert(c.clone()) {
            tracker.circles.push(c);
        }
    }
    Ok(IncidenceInstance::new(points, tracker.circles, q_cap))
}

/// Points for similarity counting: small lattice points with a planted
/// unit square.
pub fn gen_triangle_cloud(t: usize, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point3> = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)].iter().map(|&(x, y, z)| Vec3::ints(x, y, z)).take(t).collect();
    let mut seen: HashSet<Point3> = pts.iter().cloned().collect();
    while pts.len() < t {
        let p = Vec3::ints(rng.random_range(-3..=3), rng.random_range(-3..=3), rng.random_range(-1..=1));
        if seen.insert(p.clone()) {
            pts.push(p);
        }
    }
    pts
}
