//! Exact engine for group-ring traces, kernel projections and central idempotents.

pub mod atiyah;
pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod group_ring;
pub mod idempotents;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod numeric;
pub mod residual;
pub mod scalar;
pub mod virtual_group;

pub use characters::{character_table, CharacterTable};
pub use cyclotomic::{Cyclotomic, FieldSpec};
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupHomomorphism, GroupSpec, HomomorphismCheck};
pub use group_ring::{GroupRingElement, GroupRingMatrix};
pub use linalg::Matrix;
pub use scalar::{DoubleDouble, Field, Rational, Real, StarField};
pub use atiyah::{verify_atiyah_formula, AtiyahContext, AtiyahReport};
pub use idempotents::{center_valued_trace, central_idempotents, CentralIdempotentSet};
pub use kernel::{kernel_projection, KernelProjection};
pub use lattice::{build_lattice, AtiyahLattice, LjReport};
pub use residual::{approximate, ResidualChain, SymbolicMatrix, Verdict};
pub use virtual_group::{VirtualGroup, VirtualGroupSpec};

/// Group-ring elements over `Q`.
pub type RationalElement = GroupRingElement<Rational>;
/// Group-ring elements over cyclotomic fields, the default coefficient type.
pub type CyclotomicElement = GroupRingElement<Cyclotomic>;
pub type RationalMatrix = GroupRingMatrix<Rational>;
pub type CyclotomicMatrix = GroupRingMatrix<Cyclotomic>;
