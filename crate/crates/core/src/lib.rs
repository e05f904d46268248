//! Verification and reduction toolkit for minimum-weight triangulation gadgets.

pub mod arith;
pub mod geometry;
pub mod mwt;
pub mod sat;
pub mod skeleton;
pub mod workshop;
pub mod layout;
