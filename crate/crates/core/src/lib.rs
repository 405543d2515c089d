//! Equilibrium structures of magnetic nanoparticle colloids.
//!
//! Particles carry a unit spin and interact through a generalized dipolar
//! potential plus a soft-sphere repulsion `A / r^alpha`. Two equilibria are
//! treated in detail:
//!
//! * the **spear**, a straight chain with axial spins, reduced to a
//!   minimization over neighbor spacings ([`spear`]);
//! * the **ring**, particles on a circle with tangential spins, whose radius
//!   is explicit ([`ring`]).
//!
//! [`gershgorin`] checks the inverse-decay estimate used for the spear's
//! asymptotics, and [`dynamics`] integrates the full dissipative motion of
//! the particles toward a critical point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
mod fit;
pub mod gershgorin;
pub mod potential;
pub mod ring;
pub mod spear;

pub use error::{Error, Result};
pub use potential::{characteristic_distances, ordering_margins, DistanceSet, LJParams, OrderingMargins};
