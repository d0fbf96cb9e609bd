//! MU-like basis families and tomographic reconstruction for N-ququart
//! systems.
//!
//! A ququart is a four-level system; N ququarts live in a 4^N-dimensional
//! Hilbert space labelled by elements of the Galois ring GR(4,N). This crate
//! builds, from exact ring arithmetic:
//!
//! - the generalized Pauli monomials Z_γX_δ and their 4^N + 2^N maximal
//!   commuting sets ([`pauli`]),
//! - the informationally complete family of MU-like orthonormal bases that
//!   diagonalize those sets, together with its overlap and redundancy laws
//!   ([`mub`]),
//! - linear-inversion state reconstruction from measured outcome
//!   probabilities, in both projector and monomial form, plus multinomial
//!   sampling of finite-statistics experiments ([`tomo`]),
//! - the block Q/Fisher matrices and the Cramér–Rao floor of the mean
//!   square reconstruction error, with SIC-POVM and N-qubit MUB comparison
//!   bounds ([`bounds`]),
//! - the N-qubit MUB reference scheme, realized as the s = 1 instance of
//!   the same ring construction ([`qubit`]).
//!
//! The ring layer ([`ring`]) supports GF(2^N) and GR(2^s,N) for s ≤ 3 with
//! trace tables, Teichmüller sets, 2-adic digits, Hensel lifting and
//! dual/self-dual bases, which is everything the basis construction needs.

pub mod bounds;
pub mod io;
pub mod mub;
pub mod pauli;
pub mod qubit;
pub mod ring;
pub mod tomo;

pub use bounds::{
    block_layout, cramer_rao, cramer_rao_sweep, fisher_matrix, monte_carlo_table, q_matrix,
    random_mixed, random_pure, sic_bound, BlockMatrix, BoundsError, CrBound, EnsembleKind,
    StateEnsembleSpec, Table3Config, Table3Report,
};
pub use mub::{BasisFamily, OverlapReport, PhaseSolver, SetupLabel};
pub use pauli::{CommutingSet, MonomialLabel, PauliSpace, SetKind};
pub use qubit::QubitMubFamily;
pub use ring::{RingBasis, RingContext, RingElem, RingError, RingSpec};
pub use tomo::{
    born_probabilities, empirical_mse, reconstruct_monomial, reconstruct_projector,
    redundancy_check, sample_counts, CountTable, DensityMatrix, ProbabilityTable, TomoError,
};

/// Dense complex matrix used throughout the operator layer.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex vector (basis columns, state vectors).
pub type CVec = nalgebra::DVector<num_complex::Complex64>;
