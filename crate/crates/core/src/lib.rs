//! Densities of free positive multiplicative Brownian motion `σ_t ⊠ ν` and
//! numerical tests of log-unimodality.

pub mod analytic;
pub mod criteria;
pub mod error;
pub mod measures;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod tolerances;
pub mod unimodality;
pub mod zhong;

pub use error::{Error, Result};
pub use measures::{Atom, AtomicMeasure, Family, GridDensity, LogDensity, MeasureSpec};
pub use scalar::Real;
pub use tolerances::Tolerances;
pub use zhong::{DensityCurve, SupportSet, ZhongContext};

pub type Measure64 = MeasureSpec<f64>;
pub type Measure32 = MeasureSpec<f32>;
pub type Curve64 = DensityCurve<f64>;
pub type Curve32 = DensityCurve<f32>;
pub type Context64 = ZhongContext<f64>;
pub type Context32 = ZhongContext<f32>;
pub type Tolerances64 = Tolerances<f64>;
pub type Tolerances32 = Tolerances<f32>;
