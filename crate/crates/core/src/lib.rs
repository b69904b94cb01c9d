//! Prime divisors of `x² ± N·y²`: admissible residue classes mod `4N`,
//! representation witnesses, never-square families, and a catalog engine
//! that recomputes each classical claim and reports where the print is wrong.

pub mod arith;
pub mod catalog;
pub mod error;
pub mod forms;
pub mod nonsquare;
pub mod represent;

pub use arith::SymbolValue;
pub use catalog::{
    load_catalog, verify_all, verify_theorem, AllReport, Bounds, ClaimKind, Erratum, Payload,
    Status, TheoremRecord, VerificationReport, VerifyOptions,
};
pub use error::{Error, Result};
pub use forms::{CharacterRow, FormSpec, ResidueClassSet, Sign};
pub use nonsquare::{NonsquareFamily, ScanReport, Variant};
pub use represent::{MultiplierSearch, RepresentationWitness, TwoCoefForm};
