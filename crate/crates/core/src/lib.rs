//! Labelled sequent calculi, proof search and finite models for the
//! atemporal STIT logics of agency `Ldm_n^m`.

pub mod calculus;
pub mod corpus;
pub mod formula;
pub mod propagation;
pub mod prover;
pub mod semantics;
pub mod sequent;

pub use formula::{parse, AgentCount, Formula};
pub use sequent::{Label, LabelledSequent};
