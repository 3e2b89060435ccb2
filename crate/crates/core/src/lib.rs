//! Exact topology of toric origami manifolds computed from their templates.

pub mod lattice;
pub mod polytope;
pub mod template;
pub mod invariants;
pub mod cohomology;
pub mod mv;
