//! Exact verification that the moment-map image of twisted sections is
//! isotropic in the moduli of Higgs bundles on P^1.
//!
//! Bundles, sections and Higgs fields are described by transition data at
//! finitely many marked points. The Liouville form and the canonical
//! symplectic form are sums of residues, and every identity is checked in
//! exact arithmetic over `Q(i)`.

pub mod cli;
pub mod curve;
pub mod error;
pub mod field;
pub mod hamiltonian;
pub mod lie;
pub mod linalg;
pub mod moduli;
pub mod report;
pub mod residue;
pub mod scenario;
pub mod solver;

pub use error::Error;
