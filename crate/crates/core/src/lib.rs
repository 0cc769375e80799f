//! Exact combinatorics and freeness certification for central hyperplane
//! arrangements over the rationals.

pub mod corpus;
pub mod exactla;
pub mod freecert;
pub mod io;
pub mod lattice;
pub mod rootsys;
pub mod saito;
