//! Pseudo-random matrices built from binary m-sequences, their spectra, and
//! the reference laws and coding-theory identities used to study them.

pub mod bitseq;
pub mod cli;
pub mod codes;
pub mod eigen;
pub mod ensembles;
pub mod error;
pub mod gf2;
pub mod laws;
pub mod sequences;

pub use bitseq::BitSeq;
pub use eigen::{CirculantBackend, Solver, Spectrum};
pub use ensembles::{DenseSym, EnsembleSpec, Matrix, SymCirculant, TriDiag};
pub use error::{Error, Result};
pub use gf2::Gf2Poly;
pub use sequences::MSeq;
