//! Exact computation of value sets, colengths, and Tjurina and Milnor
//! numbers of reduced plane curve singularities given by branch
//! parametrizations.

pub mod colength;
pub mod curve;
pub mod error;
pub mod linalg;
pub mod macaulay;
pub mod poly;
pub mod scalar;
pub mod semigroup;
pub mod series;
pub mod span;
pub mod tjurina;
pub mod valueset;

pub use colength::{
    colength_from_sets, colength_oracle, colength_pair, colength_truncation, lemma_tec_check,
    truncation_oracle, ColengthForms, IdealPair,
};
pub use curve::{Branch, Curve, KElement, Valuation, ValidationReport};
pub use error::{Error, Result};
pub use macaulay::{local_colength, milnor_oracle, tjurina_oracle, Colength};
pub use poly::BivariatePoly;
pub use scalar::Field;
pub use semigroup::{branch_semigroup, semigroup, SemigroupData};
pub use series::{SeriesOrder, TruncatedSeries};
pub use span::{GeneratingFamily, Generator, RawWindow, Settings, SpanSpace, Window};
pub use tjurina::{
    all_partitions, delorme_check, dimca_check, jacobian, jacobian_conductor_bound, lambda_shift,
    milnor, tjurina_formula, tjurina_partition, Analysis, DimcaVerdict, JacobianIdeal,
    PartitionAnalyses, PartitionReport, TjurinaReport,
};
pub use valueset::{
    value_set, ConductorBound, StructureReport, ThetaMethod, ThetaVector, ValueSetBox,
    ValueSetComputation, ValueVector,
};

/// The exact coefficient field used throughout.
pub type Rational = num_rational::BigRational;
pub type Series = TruncatedSeries<Rational>;
pub type Poly = BivariatePoly<Rational>;
