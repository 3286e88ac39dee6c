//! Numerical verification of rigidity identities for initial data sets on
//! product manifolds `[0, ℓ] × T^{n-1}`.

pub mod exprlang;
pub mod mesh;
pub mod geometry;
pub mod symbolic;
pub mod initial_data;
pub mod rigidity;
pub mod killing_dev;
pub mod cli;
