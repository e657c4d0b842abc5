pub mod acceptance;
pub mod channels;
pub mod charfn;
pub mod contraction;
pub mod correlations;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod nonclassicality;
pub mod optim;
pub mod superposition;

pub use channels::{ChannelSpec, Environment};
pub use charfn::CharFn;
pub use error::{Error, Result};
pub use fock::{DensityOperator, FockVector};
pub use gaussian::GaussianPure;
pub use superposition::{build_omega, OmegaState};
