//! Correlation kernels built from the Neumann scattering solution and the
//! GP minimizer.

mod correlation;
mod cutoff;
mod factorized;
mod hn;
mod hyperbolic;
mod lattice;
mod spectral;
mod sweep;

pub use correlation::{build_g, CorrelationKernel};
pub use cutoff::{build_gaussian_lowpass, CutoffPair, GaussianLowpass};
pub use factorized::{build_eta_h, build_nu_h, FactorizedKernel, KernelParams, Weight};
pub use hn::{build_hn, HnProfile};
pub use hyperbolic::{
    cross_gradient_hs, cross_gradient_with, hyperbolic, hyperbolic_norms, hyperbolic_with,
    lattice_hyperbolic, CrossGradient, HyperbolicKernels, HyperbolicNorms, LatticeHyperbolic,
};
pub use lattice::{
    eta_power_bound, random_point, sample_pairs, Fft3, LatticeKernel, LatticeSpec,
    PowerBoundReport, MAX_SIDE,
};
pub use spectral::{
    eta_norms, nu_norms, radial_l2_momentum, radial_l2_position, slice_norm, NormReport,
    NuNormReport,
};
pub use sweep::{
    kernel_row, kernel_sweep, n_sweep, KernelRow, KernelSweep, KernelSweepConfig, Stability,
};
