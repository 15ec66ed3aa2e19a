//! Exact point-circle incidence toolkit for R^3.

pub mod applications;
pub mod engine;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod ruling;
pub mod transforms;

pub use geometry::{Circle3, IncidenceInstance, Plane, PlaneChart, Point3, Sphere, Vec3};
pub use poly::MultiPoly;
pub use rational::Q;
