//! Exact computations around Néron models of tame norm tori: lattice
//! coinvariants and Smith normal form, component groups and their Galois
//! cohomology, p-adic norm classes, and evaluation maps of norm torsors.

pub mod bridge;
pub mod cli;
pub mod galois;
pub mod lattice;
pub mod padic;
pub mod torsor;
pub mod torus;
