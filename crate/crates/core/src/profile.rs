//! Sampled radial functions with tail metadata.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::interp_cubic;

/// Closed forms used for profile tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `coef · r^exponent`
    Power { coef: f64, exponent: f64 },
    /// `1 − a0/r`, the zero-energy scattering tail.
    Coulomb { a0: f64 },
    /// `1 − (1 − a0/r)`, i.e. `a0/r`.
    CoulombComplement { a0: f64 },
    /// Free Neumann solution `s·(u0 cos kΔ + du0 sin(kΔ)/k)/r` with `Δ = r − r0`
    /// on `(r0, limit]`; `1` beyond `limit`. With `complement` set the form
    /// is `1 − f` and vanishes beyond `limit`.
    Neumann {
        r0: f64,
        u0: f64,
        du0: f64,
        k: f64,
        scale: f64,
        limit: f64,
        complement: bool,
    },
}

impl ClosedForm {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ClosedForm::Power { coef, exponent } => {
                if exponent == 0.0 {
                    coef
                } else {
                    coef * r.powf(exponent)
                }
            }
            ClosedForm::Coulomb { a0 } => 1.0 - a0 / r,
            ClosedForm::CoulombComplement { a0 } => a0 / r,
            ClosedForm::Neumann {
                r0,
                u0,
                du0,
                k,
                scale,
                limit,
                complement,
            } => {
                if r > limit {
                    return if complement { 0.0 } else { 1.0 };
                }
                let f = scale * free_solution(u0, du0, k, r - r0) / r;
                if complement {
                    1.0 - f
                } else {
                    f
                }
            }
        }
    }
}

/// `u0 cos(kd) + du0 sin(kd)/k`, continuous at `k = 0`.
pub(crate) fn free_solution(u0: f64, du0: f64, k: f64, d: f64) -> f64 {
    let kd = k * d;
    u0 * kd.cos() + du0 * d * sinc(kd)
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Behavior outside the sampled region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Tail {
    /// Exactly zero for `r > support`.
    Zero { support: f64 },
    /// The closed form holds for `r > r_cut`.
    ClosedForm { r_cut: f64, form: ClosedForm },
}

/// A radial function sampled on strictly increasing nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    samples: Vec<f64>,
    tail: Tail,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, samples: Vec<f64>, tail: Tail) -> Result<Self> {
        if grid.len() != samples.len() {
            return Err(invalid("grid and samples differ in length"));
        }
        if grid.len() < 16 {
            return Err(invalid(format!(
                "a profile needs at least 16 samples, got {}",
                grid.len()
            )));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid must be strictly increasing from r0 >= 0"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("profile samples must be finite"));
        }
        Ok(RadialProfile {
            grid,
            samples,
            tail,
        })
    }

    /// Uniform grid on `[0, r_max]` sampled from `f`.
    pub fn from_fn(n_pts: usize, r_max: f64, tail: Tail, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = r_max / (n_pts.max(2) - 1) as f64;
        let grid: Vec<f64> = (0..n_pts).map(|i| i as f64 * h).collect();
        let samples = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, samples, tail)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.tail, Tail::Zero { .. })
    }

    /// Value at radius `r`, using the tail where it applies.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.tail {
            Tail::Zero { support } => {
                if r > *support {
                    return 0.0;
                }
            }
            Tail::ClosedForm { r_cut, form } => {
                if r > *r_cut || r > *self.grid.last().unwrap() {
                    return form.eval(r);
                }
            }
        }
        interp_cubic(&self.grid, &self.samples, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_profile_vanishes_outside() {
        let p = RadialProfile::from_fn(32, 1.0, Tail::Zero { support: 1.0 }, |_| 3.0).unwrap();
        assert_eq!(p.eval(1.0000001), 0.0);
        assert!((p.eval(0.5) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_short_or_unsorted() {
        assert!(
            RadialProfile::new(vec![0.0; 4], vec![0.0; 4], Tail::Zero { support: 1.0 }).is_err()
        );
        let mut g: Vec<f64> = (0..20).map(|i| i as f64).collect();
        g[5] = 4.0;
        assert!(RadialProfile::new(g, vec![0.0; 20], Tail::Zero { support: 1.0 }).is_err());
    }

    #[test]
    fn neumann_form_is_continuous_at_zero_k() {
        let a = free_solution(1.0, 2.0, 0.0, 3.0);
        let b = free_solution(1.0, 2.0, 1e-9, 3.0);
        assert!((a - 7.0).abs() < 1e-12 && (a - b).abs() < 1e-12);
    }
}
