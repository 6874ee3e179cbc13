//! Computing with operations and relations on small finite universes:
//! generalized quasiorders, translation-closed operation sets, and the
//! u-closure of transformation monoids.
//!
//! The building blocks are value tables ([`OpTable`]), canonical tuple sets
//! ([`Relation`]) and transformation monoids ([`Monoid`]). On top of those:
//!
//! - [`preclone`]: argument manipulation, linearized composition,
//!   translations and the star sets `M*`;
//! - [`partial`]: the matrix-diagonal operator, generalized transitive
//!   closure and the generalized quasiorder test;
//! - [`preserve`]: preservation, endomorphism monoids, bounded polymorphism
//!   enumeration;
//! - [`invariants`]: invariant quasiorders, congruences and generalized
//!   quasiorders of a monoid;
//! - [`galois`]: Γ, u-closedness, the u-closure, the translation property Ξ
//!   and bounded completeness checks;
//! - [`census`]: the submonoid census on up to 3 points and the minimal
//!   u-closed classification.
//!
//! All types are immutable values after construction and safe to share
//! across threads; the heavier enumerations parallelize internally and
//! return canonically sorted results, so output never depends on the
//! schedule.

pub mod census;
mod codes;
pub mod error;
pub mod galois;
pub mod invariants;
pub mod monoid;
pub mod op;
pub mod partial;
pub mod preclone;
pub mod preserve;
pub mod relation;
pub mod tensor;
pub mod text;
pub mod universe;

pub use error::{Error, Result};
pub use monoid::Monoid;
pub use op::OpTable;
pub use relation::Relation;
pub use tensor::LineTensor;
pub use universe::Universe;
