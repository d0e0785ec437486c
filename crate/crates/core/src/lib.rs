//! Finite Blaschke products over the quaternions.
//!
//! Quaternion and quaternionic matrix arithmetic, truncated power series
//! with left and right evaluation, Blaschke factors and products, zero
//! localization and spherical divisors, unitary realizations, synthesis of a
//! product with prescribed zero structure, and the Toeplitz Schur test with
//! degree-n recovery.
//!
//! ```
//! use qblaschke::{BlaschkeProduct, Quaternion, Side};
//!
//! let b = BlaschkeProduct::from_nodes(vec![Quaternion::I * 0.5, Quaternion::J * 0.5]).unwrap();
//! let v = b.eval(Quaternion::I * 0.5, Side::Left).unwrap();
//! assert!(v.norm() < 1e-12);
//! ```

pub mod blaschke;
pub mod error;
pub mod qmat;
pub mod quat;
pub mod realize;
pub mod sample;
pub mod schur;
pub mod series;
pub mod synth;
pub mod tol;
pub mod zeros;

pub use blaschke::BlaschkeProduct;
pub use error::{Error, Result};
pub use qmat::QMatrix;
pub use quat::{ConjugacyClass, Quaternion};
pub use realize::Realization;
pub use series::{Evaluate, Evaluation, Polynomial, QSeries, Side};
pub use synth::{synthesize, SynthResult};
pub use zeros::{locate_in_class, spherical_divisors, ZeroLocation, ZeroReport};
