//! Conditional-independence equilibria of normal-form games: exact invariants of
//! the varieties they live on, explicit polynomial systems, verification and
//! solving, and degrees of the underlying graphical models.

pub mod equations;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod graph;
pub mod invariants;
pub mod linalg;
pub mod model_degree;
pub mod polyring;
pub mod scalar;

pub use equations::{EquationSystem, SigmaSpace, SigmaVar, SparsePoly};
pub use equilibria::{SolveResult, VerificationReport};
pub use error::{Error, Result};
pub use game::{Game, GameFormat, MixedProfile, PayoffTensor, SpohnMatrix};
pub use graph::{ClusterStructure, Graph, ParamMatrix};
pub use invariants::{VarietyReport, VarietyStatus};
pub use model_degree::DecompositionTree;
pub use polyring::RingPoly;
pub use scalar::{Rational, Scalar};
