//! Computations around the degree-4 Prym map of genus-2 curves.

pub mod curves;
pub mod fibers;
pub mod groupalg;
pub mod lattice;
pub mod moduli;
pub mod numerics;
pub mod projective;
pub mod prym;
pub mod report;
pub mod verify;
