//! Exact tools for `t`-intersecting families of `k`-subsets of `[n]` and the
//! number of distinct pairwise intersections they produce.

pub mod constructions;
pub mod count;
pub mod decomposition;
pub mod error;
pub mod harness;
pub mod report;
pub mod sets;
pub mod threshold;
pub mod transversal;

pub use constructions::FamilyKind;
pub use count::ExactNat;
pub use error::{Error, Result};
pub use harness::{AuditRecord, ExtremalReport, ReportOptions};
pub use report::SCHEMA_VERSION;
pub use sets::{Family, Params, Subset};
pub use threshold::{RegimeKind, ThresholdVerdict};
