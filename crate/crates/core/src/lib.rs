//! Diamond-product Hamiltonians on finite geometric lattices.

pub mod cli;
pub mod diamond;
pub mod lattice;
pub mod operator;
pub mod product;
pub mod radial;
pub mod spectral;
pub mod verify;
