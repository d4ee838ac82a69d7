//! Time–frequency limiting operators `P_F B_S P_F`: Nyström spectra, local
//! sine bases with Gevrey-class bells, tensor-product phase-space
//! partitions and Hermite–Gaussian packings.
//!
//! The domain, kernel, quadrature and operator layers are generic over
//! [`Real`]; the aliases below fix the scalar for the common cases.

pub mod domains;
pub mod error;
pub mod kernels;
pub mod limiting;
pub mod linalg;
pub mod local_sine;
pub mod packings;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Domain64 = domains::Domain<f64>;
pub type Domain32 = domains::Domain<f32>;
pub type Kernel64 = kernels::KernelSpec<f64>;
pub type Kernel32 = kernels::KernelSpec<f32>;
pub type Operator64 = limiting::DiscretizedOperator<f64>;
pub type Operator32 = limiting::DiscretizedOperator<f32>;
pub type Spectrum64 = limiting::SpectrumReport<f64>;
pub type Spectrum32 = limiting::SpectrumReport<f32>;
