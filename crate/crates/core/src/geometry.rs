//! Points, planes, spheres and circles in R^3 with exact rational predicates.

use crate::poly::MultiPoly;
use crate::rational::{q, Q};
use num_traits::{One, Signed, Zero};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("plane normal is zero")]
    ZeroNormal,
    #[error("circle center is not on its supporting plane")]
    CenterOffPlane,
    #[error("radius_sq must be positive")]
    NonPositiveRadius,
    #[error("chart does not parametrize the circle's supporting plane")]
    ChartMismatch,
    #[error("chart basis vectors are linearly dependent")]
    DegenerateChart,
    #[error("points are collinear or coincident")]
    Collinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vec3 {
    pub x: Q,
    pub y: Q,
    pub z: Q,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub fn new(x: Q, y: Q, z: Q) -> Self {
        Vec3 { x, y, z }
    }

    pub fn ints(x: i64, y: i64, z: i64) -> Self {
        Vec3::new(q(x), q(y), q(z))
    }

    pub fn zero() -> Self {
        Vec3::new(Q::zero(), Q::zero(), Q::zero())
    }

    pub fn from_array([x, y, z]: [Q; 3]) -> Self {
        Vec3 { x, y, z }
    }

    pub fn to_array(&self) -> [Q; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn coords(&self) -> [&Q; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn get(&self, i: usize) -> &Q {
        self.coords()[i]
    }

    pub fn dot(&self, o: &Vec3) -> Q {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn norm_sq(&self) -> Q {
        self.dot(self)
    }

    pub fn scale(&self, k: &Q) -> Vec3 {
        Vec3::new(&self.x * k, &self.y * k, &self.z * k)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn is_parallel(&self, o: &Vec3) -> bool {
        self.cross(o).is_zero()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.coords().map(crate::rational::to_f64)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::Rat;
        write!(f, "({}, {}, {})", Rat(&self.x), Rat(&self.y), Rat(&self.z))
    }
}

impl Add for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl Sub for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-&self.x, -&self.y, -&self.z)
    }
}

impl Mul<&Q> for &Vec3 {
    type Output = Vec3;
    fn mul(self, k: &Q) -> Vec3 {
        self.scale(k)
    }
}

/// Plane `normal · x = offset`.
#[derive(Debug, Clone)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: Q,
}

impl Plane {
    pub fn new(normal: Vec3, offset: Q) -> Result<Self, GeometryError> {
        if normal.is_zero() {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Plane { normal, offset })
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.normal.dot(p) == self.offset
    }

    /// Representative with the first nonzero normal entry equal to 1.
    pub fn canonical(&self) -> Plane {
        let lead = self.normal.coords().into_iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(Q::one);
        let inv = lead.recip();
        Plane { normal: self.normal.scale(&inv), offset: &self.offset * &inv }
    }

    fn key(&self) -> (Vec3, Q) {
        let c = self.canonical();
        (c.normal, c.offset)
    }

    /// Coefficients of `a0|x|^2 + a·x + e = 0`, normalized; shared with spheres for tie-breaks.
    pub fn coefficient_vector(&self) -> [Q; 5] {
        let c = self.canonical();
        [Q::zero(), c.normal.x, c.normal.y, c.normal.z, -c.offset]
    }
}

impl PartialEq for Plane {
    fn eq(&self, o: &Plane) -> bool {
        self.key() == o.key()
    }
}
impl Eq for Plane {}
impl Hash for Plane {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.key().hash(h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sphere {
    pub center: Point3,
    pub radius_sq: Q,
}

impl Sphere {
    pub fn contains(&self, p: &Point3) -> bool {
        (p - &self.center).norm_sq() == self.radius_sq
    }

    pub fn contains_circle(&self, c: &Circle3) -> bool {
        let d = &self.center - &c.center;
        d.is_parallel(&c.normal) && d.norm_sq() + &c.radius_sq == self.radius_sq
    }

    pub fn coefficient_vector(&self) -> [Q; 5] {
        let o = &self.center;
        [Q::one(), -q(2) * &o.x, -q(2) * &o.y, -q(2) * &o.z, o.norm_sq() - &self.radius_sq]
    }

    /// |x - center|^2 - radius_sq
    pub fn polynomial(&self) -> MultiPoly {
        let mut f = MultiPoly::constant(3, -self.radius_sq.clone());
        for i in 0..3 {
            let l = MultiPoly::var(3, i) - MultiPoly::constant(3, self.center.get(i).clone());
            f = f + &l * &l;
        }
        f
    }
}

#[derive(Debug, Clone)]
pub struct Circle3 {
    normal: Vec3,
    offset: Q,
    center: Point3,
    radius_sq: Q,
}

impl Circle3 {
    pub fn new(normal: Vec3, offset: Q, center: Point3, radius_sq: Q) -> Result<Self, GeometryError> {
        if normal.is_zero() {
            return Err(GeometryError::ZeroNormal);
        }
        if normal.dot(&center) != offset {
            return Err(GeometryError::CenterOffPlane);
        }
        if !radius_sq.is_positive() {
            return Err(GeometryError::NonPositiveRadius);
        }
        Ok(Circle3 { normal, offset, center, radius_sq })
    }

    pub fn from_center(center: Point3, normal: Vec3, radius_sq: Q) -> Result<Self, GeometryError> {
        let offset = normal.dot(&center);
        Circle3::new(normal, offset, center, radius_sq)
    }

    pub fn normal(&self) -> &Vec3 {
        &self.normal
    }
    pub fn offset(&self) -> &Q {
        &self.offset
    }
    pub fn center(&self) -> &Point3 {
        &self.center
    }
    pub fn radius_sq(&self) -> &Q {
        &self.radius_sq
    }

    pub fn plane(&self) -> Plane {
        Plane { normal: self.normal.clone(), offset: self.offset.clone() }
    }

    /// The sphere centered at the circle's center through the circle.
    pub fn equatorial_sphere(&self) -> Sphere {
        Sphere { center: self.center.clone(), radius_sq: self.radius_sq.clone() }
    }

    fn key(&self) -> (Vec3, Q, &Point3, &Q) {
        let (n, d) = self.plane().key();
        (n, d, &self.center, &self.radius_sq)
    }
}

impl PartialEq for Circle3 {
    fn eq(&self, o: &Circle3) -> bool {
        self.key() == o.key()
    }
}
impl Eq for Circle3 {}
impl Hash for Circle3 {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.key().hash(h)
    }
}

pub fn incidence_test(p: &Point3, c: &Circle3) -> bool {
    c.normal.dot(p) == c.offset && (p - &c.center).norm_sq() == c.radius_sq
}

/// Affine chart `origin + s*u + t*w` of a plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneChart {
    pub origin: Point3,
    pub u: Vec3,
    pub w: Vec3,
}

impl PlaneChart {
    pub fn new(origin: Point3, u: Vec3, w: Vec3) -> Result<Self, GeometryError> {
        if u.cross(&w).is_zero() {
            return Err(GeometryError::DegenerateChart);
        }
        Ok(PlaneChart { origin, u, w })
    }

    /// Orthogonal rational basis `u = n x e_k`, `w = n x u`.
    fn basis(n: &Vec3) -> (Vec3, Vec3) {
        let k = (0..3).min_by_key(|&i| n.get(i).abs()).unwrap();
        let mut e = Vec3::zero();
        match k {
            0 => e.x = Q::one(),
            1 => e.y = Q::one(),
            _ => e.z = Q::one(),
        }
        let u = n.cross(&e);
        let w = n.cross(&u);
        (u, w)
    }

    pub fn for_plane(p: &Plane) -> Self {
        let n = &p.normal;
        let origin = n.scale(&(&p.offset / n.norm_sq()));
        let (u, w) = Self::basis(n);
        PlaneChart { origin, u, w }
    }

    /// Chart centered at the circle's center with orthogonal axes.
    pub fn for_circle(c: &Circle3) -> Self {
        let (u, w) = Self::basis(&c.normal);
        PlaneChart { origin: c.center.clone(), u, w }
    }

    pub fn normal(&self) -> Vec3 {
        self.u.cross(&self.w)
    }

    pub fn point(&self, s: &Q, t: &Q) -> Point3 {
        &(&self.origin + &self.u.scale(s)) + &self.w.scale(t)
    }

    pub fn parametrizes(&self, plane: &Plane) -> bool {
        self.normal().is_parallel(&plane.normal) && plane.contains(&self.origin)
    }

    /// Chart coordinates of a point on the plane.
    pub fn coords_of(&self, p: &Point3) -> Option<(Q, Q)> {
        let d = p - &self.origin;
        let n = self.normal();
        if !d.dot(&n).is_zero() {
            return None;
        }
        // Cramer on the Gram system.
        let (uu, uw, ww) = (self.u.norm_sq(), self.u.dot(&self.w), self.w.norm_sq());
        let (du, dw) = (d.dot(&self.u), d.dot(&self.w));
        let det = &uu * &ww - &uw * &uw;
        let s = (&du * &ww - &dw * &uw) / &det;
        let t = (&dw * &uu - &du * &uw) / &det;
        Some((s, t))
    }
}

/// The conic of `c` in chart coordinates: `|origin + s u + t w - center|^2 - r^2`.
pub fn circle_to_conic(c: &Circle3, chart: &PlaneChart) -> Result<MultiPoly, GeometryError> {
    if !chart.parametrizes(&c.plane()) {
        return Err(GeometryError::ChartMismatch);
    }
    let v0 = &chart.origin - &c.center;
    let terms = vec![
        (vec![0, 0], v0.norm_sq() - &c.radius_sq),
        (vec![1, 0], q(2) * v0.dot(&chart.u)),
        (vec![0, 1], q(2) * v0.dot(&chart.w)),
        (vec![2, 0], chart.u.norm_sq()),
        (vec![1, 1], q(2) * chart.u.dot(&chart.w)),
        (vec![0, 2], chart.w.norm_sq()),
    ];
    Ok(MultiPoly::from_terms(2, terms))
}

pub fn circle_through_three_points(a: &Point3, b: &Point3, c: &Point3) -> Result<Circle3, GeometryError> {
    let u = b - a;
    let v = c - a;
    let w = u.cross(&v);
    if w.is_zero() {
        return Err(GeometryError::Collinear);
    }
    let num = &v.cross(&w).scale(&u.norm_sq()) + &w.cross(&u).scale(&v.norm_sq());
    let center = a + &num.scale(&(q(2) * w.norm_sq()).recip());
    let radius_sq = (a - &center).norm_sq();
    Circle3::from_center(center, w, radius_sq)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Plane(Plane),
    Sphere(Sphere),
}

impl Witness {
    pub fn coefficient_vector(&self) -> [Q; 5] {
        match self {
            Witness::Plane(p) => p.coefficient_vector(),
            Witness::Sphere(s) => s.coefficient_vector(),
        }
    }

    pub fn contains_circle(&self, c: &Circle3) -> bool {
        match self {
            Witness::Plane(p) => *p == c.plane(),
            Witness::Sphere(s) => s.contains_circle(c),
        }
    }
}

/// Unique solution of a small overdetermined linear system, if consistent and full rank.
fn solve_unique(mut rows: Vec<Vec<Q>>, nvars: usize) -> Option<Vec<Q>> {
    let mut r = 0;
    let mut piv = Vec::new();
    for col in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            return None;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=nvars {
                    let t = &rows[r][j] * &f;
                    rows[i][j] -= t;
                }
            }
        }
        piv.push(r);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[nvars].is_zero()) {
        return None;
    }
    Some(piv.iter().map(|&i| rows[i][nvars].clone()).collect())
}

/// A common sphere is centered on both axes, so the axes must meet or
/// coincide. Rejects pairs whose axes are apart by far more than rounding.
fn axes_clearly_apart(a: &Circle3, b: &Circle3) -> bool {
    let (na, nb) = (a.normal.to_f64(), b.normal.to_f64());
    let (ca, cb) = (a.center.to_f64(), b.center.to_f64());
    let d = [cb[0] - ca[0], cb[1] - ca[1], cb[2] - ca[2]];
    let cross = |u: [f64; 3], v: [f64; 3]| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let norm = |u: [f64; 3]| dot(u, u).sqrt();
    let x = cross(na, nb);
    let scale = norm(d) * norm(na) * norm(nb);
    if !scale.is_finite() || scale == 0.0 {
        return false;
    }
    let off = if norm(x) <= 1e-9 * norm(na) * norm(nb) {
        // parallel axes must coincide
        norm(cross(d, na)) * norm(nb)
    } else {
        dot(d, x).abs()
    };
    off > 1e-7 * scale
}

/// The unique sphere containing two circles on distinct planes, if any.
pub fn common_sphere(a: &Circle3, b: &Circle3) -> Option<Sphere> {
    if a.plane() == b.plane() || axes_clearly_apart(a, b) {
        return None;
    }
    // Pencils |x|^2 + (-2c + l n)·x + (|c|^2 - r^2 - l d); match coefficients in (l_a, l_b).
    let mut rows = Vec::with_capacity(4);
    for i in 0..3 {
        rows.push(vec![a.normal.get(i).clone(), -b.normal.get(i).clone(), q(2) * (a.center.get(i) - b.center.get(i))]);
    }
    let ka = a.center.norm_sq() - &a.radius_sq;
    let kb = b.center.norm_sq() - &b.radius_sq;
    rows.push(vec![-a.offset.clone(), b.offset.clone(), kb - &ka]);
    let sol = solve_unique(rows, 2)?;
    let la = &sol[0];
    let center = &a.center - &a.normal.scale(&(la / q(2)));
    let e = a.center.norm_sq() - &a.radius_sq - la * &a.offset;
    let radius_sq = center.norm_sq() - e;
    if !radius_sq.is_positive() {
        return None;
    }
    Some(Sphere { center, radius_sq })
}

/// Largest number of circles on one plane or sphere, with the lexicographically
/// smallest realizing witness.
pub fn max_coplanar_cospherical(circles: &[Circle3]) -> (usize, Option<Witness>) {
    let mut planes: HashMap<Plane, usize> = HashMap::new();
    for c in circles {
        *planes.entry(c.plane().canonical()).or_default() += 1;
    }
    let mut spheres: HashMap<Sphere, HashSet<usize>> = HashMap::new();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            if let Some(s) = common_sphere(&circles[i], &circles[j]) {
                let e = spheres.entry(s).or_default();
                e.insert(i);
                e.insert(j);
            }
        }
    }
    let mut best: Option<(usize, [Q; 5], Witness)> = None;
    let mut consider = |count: usize, w: Witness| {
        let key = w.coefficient_vector();
        let better = match &best {
            None => true,
            Some((bc, bk, _)) => count > *bc || (count == *bc && key < *bk),
        };
        if better {
            best = Some((count, key, w));
        }
    };
    for (p, n) in planes {
        consider(n, Witness::Plane(p));
    }
    for (s, set) in spheres {
        consider(set.len(), Witness::Sphere(s));
    }
    match best {
        Some((n, _, w)) => (n, Some(w)),
        None => (0, None),
    }
}

/// A point-circle incidence problem with its declared cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceInstance {
    pub points: Vec<Point3>,
    pub circles: Vec<Circle3>,
    pub q: usize,
}

impl IncidenceInstance {
    pub fn new(points: Vec<Point3>, circles: Vec<Circle3>, q: usize) -> Self {
        IncidenceInstance { points, circles, q }
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        self.circles.len()
    }

    /// Checks `q <= n` (when n > 0) and that `q` bounds the true cap.
    pub fn validate_cap(&self) -> Result<usize, String> {
        let (actual, _) = max_coplanar_cospherical(&self.circles);
        if !self.circles.is_empty() && self.q > self.circles.len() {
            return Err(format!("q = {} exceeds n = {}", self.q, self.circles.len()));
        }
        if actual > self.q {
            return Err(format!("q = {} but {} circles share a plane or sphere", self.q, actual));
        }
        Ok(actual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Vec3::ints(x, y, z)
    }

    fn unit_circle() -> Circle3 {
        Circle3::from_center(p(0, 0, 0), p(0, 0, 1), q(1)).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let c = unit_circle();
        assert!(incidence_test(&p(1, 0, 0), &c));
        assert!(!incidence_test(&p(0, 0, 1), &c));
        assert!(incidence_test(&Vec3::new(qf(3, 5), qf(4, 5), q(0)), &c));
    }

    #[test]
    fn circle_invariants_enforced() {
        assert_eq!(Circle3::new(p(0, 0, 0), q(0), p(0, 0, 0), q(1)), Err(GeometryError::ZeroNormal));
        assert_eq!(Circle3::new(p(0, 0, 1), q(1), p(0, 0, 0), q(1)), Err(GeometryError::CenterOffPlane));
        assert_eq!(Circle3::new(p(0, 0, 1), q(0), p(0, 0, 0), q(0)), Err(GeometryError::NonPositiveRadius));
    }

    #[test]
    fn conic_examples() {
        let c = unit_circle();
        let std = PlaneChart::new(p(0, 0, 0), p(1, 0, 0), p(0, 1, 0)).unwrap();
        let s = MultiPoly::var(2, 0);
        let t = MultiPoly::var(2, 1);
        let one = MultiPoly::one(2);
        assert_eq!(circle_to_conic(&c, &std).unwrap(), &(&s * &s) + &(&t * &t) - one.clone());
        let scaled = PlaneChart::new(p(0, 0, 0), p(2, 0, 0), p(0, 1, 0)).unwrap();
        let four = MultiPoly::constant(2, q(4));
        assert_eq!(circle_to_conic(&c, &scaled).unwrap(), &(&four * &(&s * &s)) + &(&t * &t) - one.clone());
        let c2 = Circle3::from_center(p(1, 0, 0), p(0, 0, 1), q(2)).unwrap();
        let sm1 = &s - &one;
        let expect = &(&(&sm1 * &sm1) + &(&t * &t)) - &MultiPoly::constant(2, q(2));
        assert_eq!(circle_to_conic(&c2, &std).unwrap(), expect);
        let other = PlaneChart::new(p(0, 0, 1), p(1, 0, 0), p(0, 1, 0)).unwrap();
        assert_eq!(circle_to_conic(&c, &other), Err(GeometryError::ChartMismatch));
    }

    #[test]
    fn chart_for_circle_is_orthogonal() {
        let c = Circle3::from_center(p(1, 2, 3), p(1, -2, 5), qf(7, 3)).unwrap();
        let ch = PlaneChart::for_circle(&c);
        assert!(ch.u.dot(&ch.w).is_zero());
        assert!(ch.parametrizes(&c.plane()));
        let pt = ch.point(&qf(1, 2), &q(-3));
        assert_eq!(ch.coords_of(&pt), Some((qf(1, 2), q(-3))));
    }

    #[test]
    fn three_point_examples() {
        let c = circle_through_three_points(&p(1, 0, 0), &p(0, 1, 0), &p(-1, 0, 0)).unwrap();
        assert_eq!(c.center(), &p(0, 0, 0));
        assert_eq!(c.radius_sq(), &q(1));
        assert_eq!(c.plane(), Plane::new(p(0, 0, 1), q(0)).unwrap());
        let c = circle_through_three_points(&p(0, 0, 0), &p(2, 0, 0), &p(1, 1, 0)).unwrap();
        assert_eq!(c.center(), &p(1, 0, 0));
        assert_eq!(c.radius_sq(), &q(1));
        let pts = [p(0, 0, 0), p(1, 0, 1), p(0, 1, 1)];
        let c = circle_through_three_points(&pts[0], &pts[1], &pts[2]).unwrap();
        assert!(pts.iter().all(|x| incidence_test(x, &c)));
        // independent solve: center (1/3, 1/3, 2/3), r^2 = 2/3
        assert_eq!(c.center(), &Vec3::new(qf(1, 3), qf(1, 3), qf(2, 3)));
        assert_eq!(c.radius_sq(), &qf(2, 3));
        assert_eq!(
            circle_through_three_points(&p(0, 0, 0), &p(1, 1, 1), &p(2, 2, 2)),
            Err(GeometryError::Collinear)
        );
        assert_eq!(
            circle_through_three_points(&p(0, 0, 0), &p(0, 0, 0), &p(2, 2, 2)),
            Err(GeometryError::Collinear)
        );
    }

    #[test]
    fn cap_examples() {
        let z0 = |cx: i64, r: i64| Circle3::from_center(p(cx, 0, 0), p(0, 0, 1), q(r)).unwrap();
        let circles = vec![z0(0, 1), z0(5, 2), z0(-7, 3), Circle3::from_center(p(0, 0, 1), p(0, 0, 1), q(1)).unwrap()];
        let (n, w) = max_coplanar_cospherical(&circles);
        assert_eq!(n, 3);
        assert_eq!(w, Some(Witness::Plane(Plane::new(p(0, 0, 1), q(0)).unwrap())));

        let g1 = unit_circle();
        let g2 = Circle3::from_center(p(0, 0, 0), p(1, 0, 0), q(1)).unwrap();
        let (n, w) = max_coplanar_cospherical(&[g1, g2]);
        assert_eq!(n, 2);
        assert_eq!(w, Some(Witness::Sphere(Sphere { center: p(0, 0, 0), radius_sq: q(1) })));

        let lone = vec![
            Circle3::from_center(p(0, 0, 0), p(0, 0, 1), q(1)).unwrap(),
            Circle3::from_center(p(10, 0, 0), p(1, 0, 0), q(2)).unwrap(),
            Circle3::from_center(p(0, 20, 0), p(0, 1, 1), q(3)).unwrap(),
        ];
        assert_eq!(max_coplanar_cospherical(&lone).0, 1);
        assert_eq!(max_coplanar_cospherical(&[]), (0, None));
    }

    #[test]
    fn parallel_plane_circles_on_sphere() {
        // latitude circles z = 0 and z = 3/5 of the unit sphere
        let a = unit_circle();
        let b = Circle3::from_center(Vec3::new(q(0), q(0), qf(3, 5)), p(0, 0, 2), qf(16, 25)).unwrap();
        let s = common_sphere(&a, &b).unwrap();
        assert_eq!(s, Sphere { center: p(0, 0, 0), radius_sq: q(1) });
        let c = Circle3::from_center(Vec3::new(q(0), q(0), qf(3, 5)), p(0, 0, 1), q(1)).unwrap();
        assert_eq!(common_sphere(&a, &c).map(|s| s.center), Some(Vec3::new(q(0), q(0), qf(3, 10))));
    }
}
