//! Additive combinatorics over small finite abelian groups, with random
//! Cayley sum graph experiments.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: `Z_{m1} x ... x Z_{mk}`, elements and the dense index encoding.
//! * [`subset`]: bitset subsets, sumsets, representation functions, additive energy.
//! * [`dissociation`]: dissociated sets, spans, additive dimension, low-dimension counts.
//! * [`decomposition`]: structured-subset finder and the iterative energy partition.
//! * [`deviation`]: random `A`, the deviation `sigma_A(X, Y)`, packings and extraction.
//! * [`bounds`]: closed-form tail bounds and the proof-parameter cascade audit.
//! * [`harness`]: seeded Monte Carlo experiments and exhaustive scans.

pub mod bounds;
pub mod decomposition;
pub mod deviation;
pub mod dissociation;
pub mod error;
pub mod group;
pub mod harness;
pub mod rational;
pub mod subset;

pub use error::{Error, Result};
pub use group::{Element, GroupSpec};
pub use rational::Rational;
pub use subset::{Energy, GroupSubset, RepFunction};
