//! Periodic coarse lattice for operator powers of `η_H`.
//!
//! On a box of side `2a` with `n³` points, `η(x_i, x_j) = φ_i c(x_i − x_j) φ_j`
//! where `c` is the trigonometric interpolant of `ĝ` on the dual lattice. The
//! operator acts by `(ηf)(x) = Σ_y η(x, y) f(y) h³`, so convolutions are one
//! forward and one inverse FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::factorized::FactorizedKernel;
use crate::error::{invalid, Error, Result};

pub const MAX_SIDE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_side: usize,
    pub half_width: f64,
}

impl LatticeSpec {
    /// Largest box (at most `[−3, 3]³`) whose Nyquist frequency exceeds `Λ`
    /// by a third, so the cutoff shell is represented.
    pub fn for_cutoff(n_side: usize, lam: f64) -> Self {
        let a = (0.75 * n_side as f64 / (4.0 * lam)).min(3.0);
        LatticeSpec {
            n_side,
            half_width: a,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_side as f64
    }

    /// Nyquist frequency `n / (4a)`.
    pub fn nyquist(&self) -> f64 {
        self.n_side as f64 / (4.0 * self.half_width)
    }
}

/// In-place 3D FFT on an `n³` array stored x-fastest.
pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized transform; `inverse` uses `e^{+2πi jm/n}`.
    pub fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = if inverse { &self.inv } else { &self.fwd };
        // x lines are contiguous
        plan.process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for stride in [n, n * n] {
            for base in 0..n * n {
                let start = if stride == n {
                    (base / n) * n * n + base % n
                } else {
                    base
                };
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                plan.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

/// `η_H` on the lattice.
pub struct LatticeKernel {
    pub spec: LatticeSpec,
    /// `φ` at lattice points.
    pub phi: Vec<f64>,
    /// `ĝ` on the dual lattice.
    ghat: Vec<f64>,
    /// `c(x_j)`, the radial factor at lattice separations.
    pub c: Vec<f64>,
    fft: Fft3,
    pub resolved: bool,
}

fn freq(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

impl LatticeKernel {
    pub fn new(kern: &FactorizedKernel, spec: LatticeSpec) -> Result<Self> {
        let n = spec.n_side;
        if n > MAX_SIDE {
            return Err(Error::ResourceLimit(format!(
                "lattice side {n} exceeds {MAX_SIDE}"
            )));
        }
        if n < 4 || !(spec.half_width > 0.0) {
            return Err(invalid(
                "lattice needs n_side ≥ 4 and a positive half width",
            ));
        }
        let h = spec.spacing();
        let box_len = 2.0 * spec.half_width;
        let mut phi = vec![0.0; n * n * n];
        let mut ghat = vec![0.0; n * n * n];
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let idx = ix + n * (iy + n * iz);
                    let x = [ix, iy, iz].map(|i| -spec.half_width + i as f64 * h);
                    phi[idx] = kern
                        .phi
                        .phi_at((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
                    let p = [ix, iy, iz].map(|m| freq(m, n) / box_len);
                    ghat[idx] = kern.hat((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
                }
            }
        }
        let fft = Fft3::new(n);
        let mut buf: Vec<Complex64> = ghat.iter().map(|&g| Complex64::new(g, 0.0)).collect();
        fft.run(&mut buf, true);
        let vol = box_len.powi(3);
        let c = buf.iter().map(|z| z.re / vol).collect();
        Ok(LatticeKernel {
            spec,
            phi,
            ghat,
            c,
            fft,
            resolved: kern.threshold() < spec.nyquist(),
        })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn cell(&self) -> f64 {
        self.spec.spacing().powi(3)
    }

    /// `Σ_j c(x_i − x_j) w_j h³`
    fn convolve(&self, w: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.run(&mut buf, false);
        for (z, g) in buf.iter_mut().zip(&self.ghat) {
            *z *= g;
        }
        self.fft.run(&mut buf, true);
        let n3 = self.len() as f64;
        buf.iter().map(|z| z.re / n3).collect()
    }

    fn convolve_with(&self, kernel: &[f64], w: &[f64]) -> Vec<f64> {
        let mut a: Vec<Complex64> = kernel.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut b: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.run(&mut a, false);
        self.fft.run(&mut b, false);
        for (x, y) in b.iter_mut().zip(&a) {
            *x *= y;
        }
        self.fft.run(&mut b, true);
        let n3 = self.len() as f64;
        b.iter().map(|z| z.re / n3).collect()
    }

    /// `(η f)(x_i)`
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = f.iter().zip(&self.phi).map(|(a, b)| a * b).collect();
        let conv = self.convolve(&w);
        conv.iter().zip(&self.phi).map(|(a, b)| a * b).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.spec.n_side;
        let (xi, yi, zi) = (i % n, (i / n) % n, i / (n * n));
        let (xj, yj, zj) = (j % n, (j / n) % n, j / (n * n));
        let d = |a: usize, b: usize| (a + n - b) % n;
        self.phi[i] * self.c[d(xi, xj) + n * (d(yi, yj) + n * d(zi, zj))] * self.phi[j]
    }

    /// Column `y ↦ η(·, y_j)` as a function.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.entry(i, j)).collect()
    }

    /// Row norms `‖η_{x_i}‖ = (Σ_j η(x_i, x_j)² h³)^{1/2}`.
    pub fn row_norms(&self) -> Vec<f64> {
        let c2: Vec<f64> = self.c.iter().map(|v| v * v).collect();
        let rho: Vec<f64> = self.phi.iter().map(|p| p * p).collect();
        let conv = self.convolve_with(&c2, &rho);
        conv.iter()
            .zip(&self.phi)
            .map(|(v, p)| (p * p * v.max(0.0) * self.cell()).sqrt())
            .collect()
    }

    /// `‖η‖_HS` in the lattice `L²` structure.
    pub fn hs_norm(&self) -> f64 {
        self.row_norms()
            .iter()
            .map(|r| r * r * self.cell())
            .sum::<f64>()
            .sqrt()
    }

    /// Column of `η^{(n)}` at `y_j`: `n − 1` applications to `η(·, y_j)`.
    pub fn power_column(&self, j: usize, n: usize) -> Vec<f64> {
        let mut col = self.column(j);
        for _ in 1..n {
            col = self.apply(&col);
        }
        col
    }

    /// Columns of `p_η = Σ_{k odd ≥ 3} η^{(k)}/k!` and `r_η = Σ_{k even ≥ 2}
    /// η^{(k)}/k!` at `y_j`, summed until the HS tail bound `‖η‖^k/k!` is
    /// below `tol`. Returns the columns and the depth used.
    pub fn hyperbolic_columns(&self, j: usize, hs: f64, tol: f64) -> (Vec<f64>, Vec<f64>, usize) {
        let mut col = self.column(j);
        let mut p = vec![0.0; self.len()];
        let mut r = vec![0.0; self.len()];
        let mut fact = 1.0;
        let mut k = 1;
        loop {
            k += 1;
            col = self.apply(&col);
            fact *= k as f64;
            let target = if k % 2 == 0 { &mut r } else { &mut p };
            for (t, c) in target.iter_mut().zip(&col) {
                *t += c / fact;
            }
            if hs.powi(k as i32 + 1) / (fact * (k + 1) as f64) < tol || k > 60 {
                return (p, r, k);
            }
        }
    }
}

/// Worst ratio `|η^{(n)}(x; y)| / (‖η_x‖ ‖η_y‖ ‖η‖^{n−2})` over sample pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBoundReport {
    pub n: usize,
    pub samples: usize,
    pub max_ratio: f64,
    pub max_lhs: f64,
    pub holds: bool,
    pub resolved: bool,
    pub spec: LatticeSpec,
}

/// Random lattice indices `(i, j)` in the bulk of `φ` (`φ ≥ 10⁻³ sup φ`).
pub fn sample_pairs(lat: &LatticeKernel, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let sup = lat.phi.iter().cloned().fold(0.0, f64::max);
    let bulk: Vec<usize> = (0..lat.len())
        .filter(|&i| lat.phi[i] >= 1e-3 * sup)
        .collect();
    if bulk.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                bulk[rng.gen_range(0..bulk.len())],
                bulk[rng.gen_range(0..bulk.len())],
            )
        })
        .collect()
}

pub fn eta_power_bound(
    kern: &FactorizedKernel,
    n: usize,
    spec: LatticeSpec,
    samples: usize,
    seed: u64,
) -> Result<PowerBoundReport> {
    if n < 2 {
        return Err(invalid("power bound needs n ≥ 2"));
    }
    let lat = LatticeKernel::new(kern, spec)?;
    let rows = lat.row_norms();
    let hs = lat.hs_norm();
    let pairs = sample_pairs(&lat, samples, seed);
    let mut max_ratio: f64 = 0.0;
    let mut max_lhs: f64 = 0.0;
    let mut holds = true;
    let mut cols: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for &(i, j) in &pairs {
        let col = cols.entry(j).or_insert_with(|| lat.power_column(j, n));
        let lhs = col[i].abs();
        let rhs = rows[i] * rows[j] * hs.powi(n as i32 - 2);
        max_lhs = max_lhs.max(lhs);
        if lhs > rhs * (1.0 + 1e-9) + 1e-300 {
            holds = false;
        }
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
    }
    Ok(PowerBoundReport {
        n,
        samples: pairs.len(),
        max_ratio,
        max_lhs,
        holds,
        resolved: lat.resolved,
        spec,
    })
}

/// Angular grid helper shared with tests: a point at radius `r` in a seeded
/// random direction.
pub fn random_point(rng: &mut impl Rng, r: f64) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let t: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [r * s * t.cos(), r * s * t.sin(), r * z]
}
