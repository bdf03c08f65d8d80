//! Exact rational algorithms for graded algebras, L∞ and BV structures,
//! Maurer–Cartan and quantum master equations, and the constructions that
//! relate them.

pub mod algebra;
pub mod bv;
pub mod constructions;
pub mod conv;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod linalg;
pub mod linfty;
pub mod morphism;
pub mod poisson;
pub mod random;
pub mod report;
pub mod ring;
pub mod scalar;
pub mod sym;
pub mod tensor;

pub use algebra::{Ambient, Coalgebra, Elem, GradedAlgebra, Operator, Term};
pub use error::{Error, Result};
pub use graded::{BasisElement, GradedLinearMap, GradedVector, GradedVectorSpace};
pub use report::{Bounds, Certificate, Status, Verdict};
pub use ring::{ArtinRing, DualRing, RingMap};
pub use scalar::Q;
pub use sym::{CoproductKind, SymAlgebra, SymWord, WordOperator};
pub use bv::{BvAlgebra, BvInfty};
pub use linfty::{DgLie, LInfty};
pub use morphism::{BvMorphism, OrderConvention};
pub use tensor::{TensorAlgebra, TensorWord};
