//! Mapping of quantum circuits onto modular multi-core quantum architectures.
//!
//! The pipeline slices a circuit into layers of concurrently executable
//! gates, encodes per-layer qubit-to-core assignment plus hop-weighted
//! inter-core state transfers as a QUBO, solves it, and reports a validated
//! placement:
//!
//! ```text
//! Circuit -> SliceSet -> QuboProblem -> SolveResult -> Mapping -> MappingReport
//! ```
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64` for everyday use.

pub mod architecture;
pub mod benchgen;
pub mod circuit;
pub mod error;
pub mod mapper;
pub mod qubo;
pub mod scalar;
pub mod slicer;
pub mod solver;

pub use architecture::{CoreTopology, DistanceMatrix, TopologySpec};
pub use circuit::{Circuit, Gate, InteractionGraph, Laplacian};
pub use error::{Error, Result};
pub use mapper::{MapConfig, Mapping, MappingReport, SolverChoice, TransferEvent};
pub use qubo::{QuboProblem, SolutionVector, Variable, VariableIndex};
pub use scalar::Scalar;
pub use slicer::{Slice, SliceSet, SliceStats};
pub use solver::{AnnealParams, ExactBudget, SolveResult};

/// Double-precision QUBO problem.
pub type Qubo = QuboProblem<f64>;
/// Single-precision QUBO problem.
pub type Qubo32 = QuboProblem<f32>;
/// Double-precision solver output.
pub type Solution = SolveResult<f64>;
/// Single-precision solver output.
pub type Solution32 = SolveResult<f32>;
/// Double-precision annealing parameters.
pub type Anneal = AnnealParams<f64>;
/// Double-precision pipeline configuration.
pub type Config = MapConfig<f64>;
