pub mod coupling;
pub mod domain;
pub mod envelope;
pub mod error;
pub mod generate;
pub mod hamiltonian;
pub mod involution;
pub mod io;
pub mod lp;
pub mod monotonicity;
pub mod transport;
pub mod tensor;

pub use coupling::SigmaCoupling;
pub use domain::{apply_sigma, DiscreteDomain, FieldTuple, IndexCycle, TupleSpace, VectorField};
pub use error::{Error, Result};
pub use involution::NInvolution;
pub use tensor::{GridHamiltonian, HamiltonianFlags};
