#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod fixtures;
pub mod isometry;
pub mod jumps;
pub mod lemmas;
pub mod norm;
pub mod numeric;
pub mod oracles;
pub mod param;
pub mod report;
pub mod specfile;
pub mod vector;

pub use error::{Error, Result};
pub use jumps::{chord_mate, jumps, ChordMate, JumpData};
pub use norm::{AxiomReport, Membership, Norm2D, NormSpec};
pub use param::{BasedSpace, DerivativePair, NaturalCurve, PolarCurve};
pub use vector::{LinearMap2x2, Vector2};
