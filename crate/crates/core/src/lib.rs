//! Numerical toolkit for magnetic tight-binding models on 2D lattices:
//! Floquet matrices at rational flux, Chambers-type determinant
//! decompositions, band structures and flat bands, Hofstadter butterflies,
//! and semiclassical subprincipal-symbol checks.

pub mod bands;
pub mod butterfly;
pub mod charpoly;
pub mod cli;
pub mod error;
pub mod flux;
pub mod lattice;
pub mod poly;
pub mod report;
pub mod semiclassical;
pub mod verify;

pub use bands::{Band, BandMethod, BandStructure, FlatBandTest};
pub use butterfly::{ButterflyDataset, ButterflyRecord};
pub use charpoly::{ChambersForm, ChambersOptions, TrigPattern};
pub use error::{Error, Result};
pub use flux::{FluxRational, ThetaPoint};
pub use lattice::{LatticeKind, ModelSpec};
pub use report::{IdentityCheck, IdentityReport};
