//! The boundary `Ω` of the Cayley tree as a cylinder-set algebra.
//!
//! Only finite unions of cylinders are represented; they form an algebra
//! that generates the Borel sets, and every measure on it is an exact
//! rational.

mod cylinder;
mod point;
mod union;

pub(crate) use cylinder::cylinder_measure;
pub use cylinder::Cylinder;
pub use point::BoundaryPoint;
pub use union::CylinderUnion;
