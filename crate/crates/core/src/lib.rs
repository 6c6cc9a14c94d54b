pub mod forward;
pub mod fourier;
pub mod harness;
pub mod phase_retrieval;
pub mod specfun;
