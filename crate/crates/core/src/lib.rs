pub mod algebra;
pub mod canonical;
pub mod classify;
pub mod cli;
pub mod domain;
pub mod equivalence;
pub mod geometry;
pub mod holofn;
pub mod ode;
pub mod poly;
pub mod weierstrass;
