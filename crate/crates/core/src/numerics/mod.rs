//! Quadrature, oscillatory transforms, interpolation and the log-log slope fit.

mod filon;
mod fit;
mod interp;
mod quad;

/// `per_decade` logarithmically spaced points per decade from `lo` to `hi`.
pub fn decade_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

pub use filon::{filon_sine, radial_transform_uniform};
pub use fit::{fit_slope, SlopeFit};
pub use interp::{interp_cubic, locate, uniform_cubic};
pub use quad::{adaptive, gauss_legendre, integrate_panels, simpson, GaussRule};
