//! Exact laboratory for the duality between the planar Ising model on
//! trivalent graphs and generating series of spin network evaluations.

pub mod bridge;
pub mod criticality;
pub mod error;
pub mod exact;
pub mod graph;
pub mod grassmann;
pub mod ising;
pub mod kasteleyn;
pub mod report;
pub mod spinnet;
pub mod suite;
pub mod wigner;

pub use error::{Error, Result};
