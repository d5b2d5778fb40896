//! Semi-random planted clique toolkit.
//!
//! Seeded instance generation, biclique refutation certificates, a small ADMM
//! semidefinite solver, moment relaxations of the clique axioms, list decoding
//! by rounding pseudo-distributions, exact low-degree likelihood computations
//! and brute-force oracles for checking all of the above.

pub mod bits;
pub mod certify;
pub mod cli;
pub mod graphs;
pub mod listdecode;
pub mod lowdeg;
pub mod oracle;
pub mod rng;
pub mod sdp;
pub mod sos;
