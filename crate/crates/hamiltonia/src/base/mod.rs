//! Shared substrate: Fourier algebra on the torus, frequency vectors and
//! the exact/float scalar tower.

pub mod exact;
pub mod fourier;
pub mod frequency;
pub mod real;

pub use exact::{ExactComplex, Scalar};
pub use fourier::{CoeffRecord, FourierSeries, HarmonicVector, VectorSeries};
pub use frequency::{golden_frequency, Diophantine, FrequencyVector, GOLDEN};
pub use real::{DoubleDouble, Real};
