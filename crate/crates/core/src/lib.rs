//! Duflo–Serganova functor computations over finite fields of odd characteristic.

pub mod complexes;
pub mod ds;
pub mod field;
pub mod golden;
pub mod gtilde;
pub mod injectivity;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod sparse;
pub mod supergroups;
pub mod weights;

pub use field::{Fp, Fq, Scalar};
pub use linalg::{GradedLinearMap, Matrix, Parity, SuperDim, SuperVectorSpace};

pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;
pub type F11 = Fp<11>;
pub type F13 = Fp<13>;
pub type F9 = Fq<3, 2>;
pub type F25 = Fq<5, 2>;
pub type F27 = Fq<3, 3>;
