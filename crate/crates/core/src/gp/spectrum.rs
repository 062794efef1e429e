use std::f64::consts::PI;

use nalgebra as na;
use serde::{Deserialize, Serialize};

use super::GpState;
use crate::error::{failure, invalid, Result};
use crate::potentials::TrapPotential;

/// Lowest s-wave eigenpairs of `h_GP = −Δ + V_ext + 8π a0 φ² − ε_GP`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// `|⟨φ, v_j⟩|` with both vectors normalized.
    pub overlaps: Vec<f64>,
    pub gap: f64,
}

/// Dense symmetric eigensolve of the discretized radial `h_GP`.
pub fn hgp_spectrum(state: &GpState, trap: &TrapPotential, k: usize) -> Result<SpectrumResult> {
    if k < 2 {
        return Err(invalid(format!("need at least 2 eigenvalues, got {k}")));
    }
    if trap.kind != state.trap_kind {
        return Err(invalid("state was computed for a different trap"));
    }
    let d = state.discrete();
    let chi = state.chi();
    let n = chi.len();
    let mut m = na::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let dens = chi[i] * chi[i] / (d.r[i] * d.r[i]);
        m[(i, i)] = d.k.d[i] + d.v[i] + 8.0 * PI * state.a0 * dens - state.eps_gp;
        if i + 1 < n {
            m[(i, i + 1)] = d.k.e[i];
            m[(i + 1, i)] = d.k.e[i];
        }
        if i + 2 < n {
            m[(i, i + 2)] = d.k.f[i];
            m[(i + 2, i)] = d.k.f[i];
        }
    }
    let eig = na::SymmetricEigen::try_new(m, 1e-15, 0)
        .ok_or_else(|| failure("symmetric eigensolver", f64::NAN))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let cn = super::dot(&chi, &chi).sqrt();
    let k = k.min(n);
    let eigenvalues: Vec<f64> = order[..k].iter().map(|&j| eig.eigenvalues[j]).collect();
    let overlaps = order[..k]
        .iter()
        .map(|&j| {
            let v = eig.eigenvectors.column(j);
            (v.iter().zip(&chi).map(|(a, b)| a * b).sum::<f64>() / cn).abs()
        })
        .collect();
    Ok(SpectrumResult {
        gap: eigenvalues[1],
        eigenvalues,
        overlaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{minimize_gp, GpGrid};
    use crate::potentials::{make_trap, TrapKind};

    #[test]
    fn oscillator_levels() {
        let t = make_trap(TrapKind::Harmonic, 128, 10.0).unwrap();
        let s = minimize_gp(&t, 0.0, GpGrid::default(), 1e-9).unwrap();
        let sp = hgp_spectrum(&s, &t, 3).unwrap();
        assert!(sp.eigenvalues[0].abs() < 1e-6);
        assert!((sp.eigenvalues[1] - 4.0).abs() < 1e-4);
        assert!((sp.eigenvalues[2] - 8.0).abs() < 1e-3);
        assert!(sp.overlaps[0] > 1.0 - 1e-10);
    }
}
