//! Circuit-level simulation of reversible fluxon logic built from discrete
//! long Josephson junctions.

pub mod circuit;
pub mod dynamics;
pub mod edge;
pub mod gates;
pub mod ljj;
pub mod scenario;
pub mod sweep;
pub mod units;

pub use units::UnitSystem;
