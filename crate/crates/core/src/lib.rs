//! Grasp synthesis for rigid objects with articulated grippers.
//!
//! The pipeline optimizes batches of grasp candidates with an annealed
//! Langevin sampler over a differentiable force-closure energy. Closure
//! quality is scored by a box-constrained quadratic program over friction
//! cone edge weights, differentiated implicitly through its KKT system.
//!
//! Modules follow the data flow:
//!
//! * [`geometry`]: meshes, signed distance grids, surface sampling
//! * [`gripper`]: gripper specs, forward kinematics, grasp state
//! * [`wrench`]: friction cones, wrench matrices, closure certificates
//! * [`qp`]: box-constrained QP solver and its implicit gradients
//! * [`energy`]: the grasp energy, its variants, and gradients
//! * [`optimizer`]: annealed Langevin sampling over grasp batches
//! * [`metrics`]: diversity, penetration, and stability reporting
//! * [`pipeline`]: end-to-end runs and file formats behind the CLI

pub mod error;
pub mod geometry;

pub use error::{Error, Result};
