//! Inversion in a sphere and stereographic projection, exact over Q.

use crate::geometry::{incidence_test, Circle3, GeometryError, IncidenceInstance, Plane, Point3, Sphere, Vec3};
use crate::poly::MultiPoly;
use crate::rational::{q, Q};
use num_traits::{One, Signed, Zero};
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("the inversion center has no image")]
    OriginNotInvertible,
    #[error("surface does not pass through the origin")]
    NotThroughOrigin,
    #[error("projection pole lies on an input object")]
    PoleCollision,
    #[error("object is not on the projection sphere")]
    NotOnSphere,
    #[error("inversion power must be positive")]
    NonPositivePower,
    #[error("line direction is zero")]
    ZeroDirection,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone)]
pub struct Line3 {
    pub base: Point3,
    pub direction: Vec3,
}

impl Line3 {
    pub fn new(base: Point3, direction: Vec3) -> Result<Self, TransformError> {
        if direction.is_zero() {
            return Err(TransformError::ZeroDirection);
        }
        Ok(Line3 { base, direction })
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (p - &self.base).is_parallel(&self.direction)
    }

    pub fn point_at(&self, t: &Q) -> Point3 {
        &self.base + &(&self.direction * t)
    }

    /// Direction with first nonzero entry 1, base the foot from the origin.
    fn key(&self) -> (Vec3, Vec3) {
        let d = &self.direction;
        let lead = [&d.x, &d.y, &d.z].into_iter().find(|c| !c.is_zero()).expect("nonzero").clone();
        let dir = d * &lead.recip();
        let t = self.base.dot(&dir) / dir.norm_sq();
        (dir.clone(), &self.base - &(&dir * &t))
    }
}

impl PartialEq for Line3 {
    fn eq(&self, o: &Line3) -> bool {
        self.key() == o.key()
    }
}
impl Eq for Line3 {}
impl Hash for Line3 {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.key().hash(h)
    }
}

/// Image of a circle: a line when the circle meets the inversion center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircleImage {
    Line(Line3),
    Circle(Circle3),
}

impl CircleImage {
    pub fn contains(&self, p: &Point3) -> bool {
        match self {
            CircleImage::Line(l) => l.contains(p),
            CircleImage::Circle(c) => incidence_test(p, c),
        }
    }
}

/// `x -> center + power * (x - center) / |x - center|^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inversion {
    pub center: Point3,
    pub power: Q,
}

/// Sphere or plane in translated coordinates: `a|y|^2 + b.y + c = 0`.
struct Quadric {
    a: Q,
    b: Vec3,
    c: Q,
}

impl Inversion {
    pub fn unit() -> Self {
        Inversion { center: Point3::zero(), power: Q::one() }
    }

    pub fn new(center: Point3, power: Q) -> Result<Self, TransformError> {
        if !power.is_positive() {
            return Err(TransformError::NonPositivePower);
        }
        Ok(Inversion { center, power })
    }

    pub fn point(&self, p: &Point3) -> Result<Point3, TransformError> {
        let y = p - &self.center;
        let n = y.norm_sq();
        if n.is_zero() {
            return Err(TransformError::OriginNotInvertible);
        }
        Ok(&self.center + &(&y * &(&self.power / n)))
    }

    // a|y|^2 + b.y + c = 0 maps to c|z|^2 + k b.z + k^2 a = 0
    fn quadric(&self, f: &Quadric) -> Quadric {
        let k = &self.power;
        Quadric { a: f.c.clone(), b: &f.b * k, c: k * k * &f.a }
    }

    fn sphere_quadric(&self, s: &Sphere) -> Quadric {
        let o = &s.center - &self.center;
        Quadric { a: Q::one(), b: &o * &q(-2), c: o.norm_sq() - &s.radius_sq }
    }

    pub fn circle(&self, c: &Circle3) -> Result<CircleImage, TransformError> {
        let o = c.center() - &self.center;
        let n = c.normal();
        let d = c.offset() - n.dot(&self.center);
        let k = &self.power;
        if incidence_test(&self.center, c) {
            // plane through the center is fixed; sphere |y-o|^2=|o|^2 goes to 2o.z = k
            let dir = n.cross(&o);
            let base = &self.center + &(&o * &(k / (q(2) * o.norm_sq())));
            return Ok(CircleImage::Line(Line3::new(base, dir)?));
        }
        let mut sph = self.sphere_quadric(&c.equatorial_sphere());
        if sph.c.is_zero() {
            // add the plane to move the sphere off the center
            sph.b = &sph.b + n;
            sph.c -= &d;
        }
        let s = self.quadric(&sph);
        let s_center = &s.b * &(q(-1) / (q(2) * &s.a));
        let s_r2 = s_center.norm_sq() - &s.c / &s.a;
        // the plane n.y = d maps to d|z|^2 - k n.z = 0
        let (pn, pd) = if d.is_zero() {
            (n.clone(), Q::zero())
        } else {
            let t = self.quadric(&Quadric { a: Q::zero(), b: n.clone(), c: -d.clone() });
            let t_center = &t.b * &(q(-1) / (q(2) * &t.a));
            let t_r2 = t_center.norm_sq() - &t.c / &t.a;
            // radical plane of the two spheres
            let pn = &(&t_center - &s_center) * &q(2);
            let pd = t_center.norm_sq() - s_center.norm_sq() - t_r2 + &s_r2;
            (pn, pd)
        };
        let dist = pn.dot(&s_center) - &pd;
        let center = &s_center - &(&pn * &(&dist / pn.norm_sq()));
        let r2 = s_r2 - &dist * &dist / pn.norm_sq();
        let center = &center + &self.center;
        Ok(CircleImage::Circle(Circle3::from_center(center, pn, r2)?))
    }

    pub fn line(&self, l: &Line3) -> Result<CircleImage, TransformError> {
        if l.contains(&self.center) {
            return Ok(CircleImage::Line(l.clone()));
        }
        let a = self.point(&l.base)?;
        let b = self.point(&l.point_at(&Q::one()))?;
        Ok(CircleImage::Circle(crate::geometry::circle_through_three_points(&self.center, &a, &b)?))
    }
}

pub fn invert_point(p: &Point3) -> Result<Point3, TransformError> {
    Inversion::unit().point(p)
}

pub fn invert_circle(c: &Circle3) -> CircleImage {
    Inversion::unit().circle(c).expect("unit inversion of a valid circle")
}

/// `sum f_k rho^(E-k)` with `rho = x^2+y^2+z^2`, divided by rho while possible.
pub fn invert_polynomial(f: &MultiPoly) -> MultiPoly {
    let nv = f.nvars();
    let e = f.degree();
    let rho = (0..3).fold(MultiPoly::zero(nv), |acc, i| {
        let v = MultiPoly::var(nv, i);
        acc + &v * &v
    });
    let mut g = MultiPoly::zero(nv);
    for k in 0..=e {
        let fk = f.homogeneous_component(k);
        if !fk.is_zero() {
            g = g + fk * rho.pow(e - k);
        }
    }
    while !g.is_zero() {
        match g.div_exact(&rho) {
            Some(h) => g = h,
            None => break,
        }
    }
    g
}

pub fn invert_surface(f: &MultiPoly) -> Result<MultiPoly, TransformError> {
    if !f.constant_term().is_zero() {
        return Err(TransformError::NotThroughOrigin);
    }
    Ok(invert_polynomial(f))
}

/// Projection from `pole` onto the plane through the sphere center orthogonal
/// to the pole direction; the equator is fixed and the antipode goes to the center.
#[derive(Debug, Clone)]
pub struct Stereographic {
    pub sphere: Sphere,
    pub pole: Point3,
    inv: Inversion,
}

impl Stereographic {
    pub fn new(sphere: Sphere, pole: Point3) -> Result<Self, TransformError> {
        if !sphere.contains(&pole) {
            return Err(TransformError::NotOnSphere);
        }
        let inv = Inversion::new(pole.clone(), q(2) * &sphere.radius_sq)?;
        Ok(Stereographic { sphere, pole, inv })
    }

    pub fn image_plane(&self) -> Plane {
        let n = &self.pole - &self.sphere.center;
        let d = n.dot(&self.sphere.center);
        Plane::new(n, d).expect("pole differs from center")
    }

    pub fn point(&self, p: &Point3) -> Result<Point3, TransformError> {
        if !self.sphere.contains(p) {
            return Err(TransformError::NotOnSphere);
        }
        if *p == self.pole {
            return Err(TransformError::PoleCollision);
        }
        self.inv.point(p)
    }

    pub fn circle(&self, c: &Circle3) -> Result<Circle3, TransformError> {
        if !self.sphere.contains_circle(c) {
            return Err(TransformError::NotOnSphere);
        }
        match self.inv.circle(c)? {
            CircleImage::Circle(img) => Ok(img),
            CircleImage::Line(_) => Err(TransformError::PoleCollision),
        }
    }

    /// Projects a spherical instance to a coplanar one with the same incidences.
    pub fn instance(&self, inst: &IncidenceInstance) -> Result<IncidenceInstance, TransformError> {
        let points = inst.points.iter().map(|p| self.point(p)).collect::<Result<Vec<_>, _>>()?;
        let circles = inst.circles.iter().map(|c| self.circle(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(IncidenceInstance::new(points, circles, inst.q))
    }
}

pub fn stereographic_project(
    inst: &IncidenceInstance,
    sphere: &Sphere,
    pole: &Point3,
) -> Result<IncidenceInstance, TransformError> {
    Stereographic::new(sphere.clone(), pole.clone())?.instance(inst)
}
