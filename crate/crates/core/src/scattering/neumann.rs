use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use super::shoot::Shot;
use super::zero::converged_shot;
use crate::error::{failure, invalid, Error, Result};
use crate::numerics::{filon_sine, integrate_panels, simpson, uniform_cubic};
use crate::potentials::InteractionPotential;
use crate::profile::{free_solution, sinc, ClosedForm, RadialProfile, Tail};

/// Ground state of `−Δ + V/2` on the ball of radius `Nℓ` with Neumann
/// boundary condition, normalized so that `f_ℓ(Nℓ) = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct NeumannSolution {
    pub ell: f64,
    pub n_param: f64,
    pub radius: f64,
    pub lambda_ell: f64,
    pub f_ell: RadialProfile,
    pub w_ell: RadialProfile,
    /// Relative change of `λ_ℓ` when the inner step is halved.
    pub richardson_delta: f64,
    #[serde(skip)]
    inner: Inner,
}

#[derive(Debug, Clone, Default)]
struct Inner {
    support: f64,
    h: f64,
    /// normalized `u = r f_ℓ` and `u'` on `[0, R]`
    u: Vec<f64>,
    du: Vec<f64>,
    v: Vec<f64>,
    /// normalized `u(R)`, `u'(R)` and `k = √λ`
    u_r: f64,
    du_r: f64,
    k: f64,
    zero: bool,
    table: OnceLock<Vec<f64>>,
}

const TABLE_PER_UNIT: f64 = 256.0;
const TABLE_SPAN: f64 = 64.0;

/// Neumann mismatch `u'(L) − u(L)/L` from the boundary data of the inner
/// solve, written so that no large terms cancel.
fn mismatch(u_r: f64, du_r: f64, k: f64, support: f64, big_l: f64) -> f64 {
    let d = big_l - support;
    let kd = k * d;
    let one_minus_sinc = if kd.abs() < 1e-3 {
        kd * kd / 6.0 - kd.powi(4) / 120.0
    } else {
        1.0 - kd.sin() / kd
    };
    let s_half = (0.5 * kd).sin();
    let cu = -(k * kd.sin() + kd.cos() / big_l);
    let cd = support / big_l - 2.0 * s_half * s_half + d / big_l * one_minus_sinc;
    u_r * cu + du_r * cd
}

/// Solve the Neumann problem on `[0, N ℓ]` by bisection on `λ`.
pub fn solve_neumann(
    v: &InteractionPotential,
    ell: f64,
    n_param: f64,
    n_pts: usize,
) -> Result<NeumannSolution> {
    if !(ell > 0.0 && ell < 1.0) {
        return Err(invalid(format!("ell must lie in (0,1), got {ell}")));
    }
    if n_pts < 512 {
        return Err(invalid(format!("n_pts must be >= 512, got {n_pts}")));
    }
    let big_l = n_param * ell;
    let support = v.support_radius;
    if !(big_l > support) {
        return Err(Error::InvalidDomain(format!(
            "ball radius N*ell = {big_l} must exceed the support radius {support}"
        )));
    }
    if v.is_zero() {
        return Ok(trivial(v, ell, n_param, n_pts));
    }
    // Inner boundary data barely depend on λ ≪ V; the step is fixed from
    // the λ = 0 refinement and reused inside the bisection.
    let (probe, _) = converged_shot(v, 0.0, n_pts)?;
    let steps = probe.u.len() - 1;
    let solve = |steps: usize| -> Result<f64> {
        let m = |lam: f64| {
            let s = super::shoot::shoot(v, lam, steps);
            let (u, d) = s.end();
            mismatch(u, d, lam.sqrt(), support, big_l)
        };
        let m0 = m(0.0);
        if !(m0 > 0.0) {
            return Err(failure("Neumann bracket at lambda = 0", m0));
        }
        let mut lo = 0.0;
        let mut hi = 1.0 / big_l.powi(3);
        let mut tries = 0;
        while m(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            tries += 1;
            if tries > 400 {
                return Err(failure("Neumann bracket search", m(hi)));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if m(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let lambda = solve(steps)?;
    let lambda_fine = solve(2 * steps)?;
    let richardson_delta = ((lambda_fine - lambda) / lambda).abs();
    let shot = super::shoot::shoot(v, lambda, steps);
    build(v, ell, n_param, lambda, shot, richardson_delta)
}

fn trivial(v: &InteractionPotential, ell: f64, n_param: f64, n_pts: usize) -> NeumannSolution {
    let support = v.support_radius;
    let big_l = n_param * ell;
    let h = support / n_pts as f64;
    let grid: Vec<f64> = (0..=n_pts).map(|i| i as f64 * h).collect();
    let tail = |complement| Tail::ClosedForm {
        r_cut: support,
        form: ClosedForm::Neumann {
            r0: support,
            u0: support,
            du0: 1.0,
            k: 0.0,
            scale: 1.0,
            limit: big_l,
            complement,
        },
    };
    let f_ell = RadialProfile::new(grid.clone(), vec![1.0; grid.len()], tail(false)).unwrap();
    let w_ell = RadialProfile::new(grid.clone(), vec![0.0; grid.len()], tail(true)).unwrap();
    NeumannSolution {
        ell,
        n_param,
        radius: big_l,
        lambda_ell: 0.0,
        f_ell,
        w_ell,
        richardson_delta: 0.0,
        inner: Inner {
            support,
            h,
            u: grid.clone(),
            du: vec![1.0; grid.len()],
            v: vec![0.0; grid.len()],
            u_r: support,
            du_r: 1.0,
            k: 0.0,
            zero: true,
            table: OnceLock::new(),
        },
    }
}

fn build(
    v: &InteractionPotential,
    ell: f64,
    n_param: f64,
    lambda: f64,
    shot: Shot,
    richardson_delta: f64,
) -> Result<NeumannSolution> {
    let support = v.support_radius;
    let big_l = n_param * ell;
    let k = lambda.sqrt();
    let (u_r, du_r) = shot.end();
    // ground state: no interior zero of u
    if shot.u[1..].iter().any(|&x| !(x > 0.0)) {
        return Err(failure("Neumann ground state (inner node)", lambda));
    }
    for j in 1..=64 {
        let r = support + (big_l - support) * j as f64 / 64.0;
        if !(free_solution(u_r, du_r, k, r - support) > 0.0) {
            return Err(failure("Neumann ground state (outer node)", lambda));
        }
    }
    let s = big_l / free_solution(u_r, du_r, k, big_l - support);
    let h = shot.h;
    let u: Vec<f64> = shot.u.iter().map(|x| s * x).collect();
    let du: Vec<f64> = shot.du.iter().map(|x| s * x).collect();
    let vv: Vec<f64> = (0..u.len()).map(|i| v.value(i as f64 * h)).collect();
    let form = |complement| ClosedForm::Neumann {
        r0: support,
        u0: s * u_r,
        du0: s * du_r,
        k,
        scale: 1.0,
        limit: big_l,
        complement,
    };
    let mut grid: Vec<f64> = (0..u.len()).map(|i| i as f64 * h).collect();
    let mut fs: Vec<f64> = grid
        .iter()
        .zip(&u)
        .map(|(&r, &x)| if r == 0.0 { du[0] } else { x / r })
        .collect();
    let n_out = 256;
    let ratio = (big_l / support).powf(1.0 / n_out as f64);
    for j in 1..=n_out {
        let r = if j == n_out {
            big_l
        } else {
            support * ratio.powi(j)
        };
        grid.push(r);
        fs.push(if j == n_out { 1.0 } else { form(false).eval(r) });
    }
    let ws: Vec<f64> = fs.iter().map(|x| 1.0 - x).collect();
    let f_ell = RadialProfile::new(
        grid.clone(),
        fs,
        Tail::ClosedForm {
            r_cut: support,
            form: form(false),
        },
    )?;
    let w_ell = RadialProfile::new(
        grid,
        ws,
        Tail::ClosedForm {
            r_cut: support,
            form: form(true),
        },
    )?;
    Ok(NeumannSolution {
        ell,
        n_param,
        radius: big_l,
        lambda_ell: lambda,
        f_ell,
        w_ell,
        richardson_delta,
        inner: Inner {
            support,
            h,
            u,
            du,
            v: vv,
            u_r: s * u_r,
            du_r: s * du_r,
            k,
            zero: false,
            table: OnceLock::new(),
        },
    })
}

impl NeumannSolution {
    pub fn is_zero(&self) -> bool {
        self.inner.zero
    }

    pub fn support_radius(&self) -> f64 {
        self.inner.support
    }

    /// `u = r f_ℓ` and `u'` at radius `r ≤ Nℓ`.
    fn u_du(&self, r: f64) -> (f64, f64) {
        let inn = &self.inner;
        if r <= inn.support {
            (
                uniform_cubic(&inn.u, inn.h, r),
                uniform_cubic(&inn.du, inn.h, r),
            )
        } else {
            let d = r - inn.support;
            let kd = inn.k * d;
            let u = free_solution(inn.u_r, inn.du_r, inn.k, d);
            let du = -inn.u_r * inn.k * kd.sin() + inn.du_r * kd.cos();
            (u, du)
        }
    }

    /// `f_ℓ(r)`, equal to 1 for `r ≥ Nℓ`.
    pub fn f(&self, r: f64) -> f64 {
        if r >= self.radius || self.inner.zero {
            return 1.0;
        }
        if r == 0.0 {
            return self.inner.du[0];
        }
        self.u_du(r).0 / r
    }

    /// `w_ℓ(r) = 1 − f_ℓ(r)` on the ball, 0 beyond.
    pub fn w(&self, r: f64) -> f64 {
        if r >= self.radius {
            0.0
        } else {
            1.0 - self.f(r)
        }
    }

    /// `w_ℓ'(r)` inside the ball.
    pub fn dw(&self, r: f64) -> f64 {
        if r >= self.radius || r == 0.0 {
            return 0.0;
        }
        let (u, du) = self.u_du(r);
        -(du * r - u) / (r * r)
    }

    /// Nodes `r_i` and values `V(r_i) f_ℓ(r_i) r_i` on the support (uniform).
    pub(crate) fn support_samples(&self) -> (f64, Vec<f64>) {
        let inn = &self.inner;
        (
            inn.h,
            inn.u.iter().zip(&inn.v).map(|(u, v)| u * v).collect(),
        )
    }

    pub(crate) fn inner_values(&self) -> (f64, &[f64], &[f64]) {
        (self.inner.h, &self.inner.u, &self.inner.v)
    }

    /// `∫ V f_ℓ` over ℝ³.
    pub fn integral_vf(&self) -> f64 {
        let (h, vu) = self.support_samples();
        let g: Vec<f64> = vu
            .iter()
            .enumerate()
            .map(|(i, x)| x * i as f64 * h)
            .collect();
        4.0 * PI * simpson(&g, h)
    }

    /// `(V f_ℓ / 2)^(p)` computed directly with Filon's rule.
    fn vf_hat_direct(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.5 * self.integral_vf();
        }
        let (h, vu) = self.support_samples();
        filon_sine(&vu, 0.0, h, 2.0 * PI * p) / p
    }

    /// `(V f_ℓ / 2)^(p)`, tabulated on `[0, 64/R]`.
    pub fn vf_hat(&self, p: f64) -> f64 {
        let p = p.abs();
        let dp = 1.0 / (TABLE_PER_UNIT * self.inner.support);
        let p_tab = TABLE_SPAN / self.inner.support;
        if p >= p_tab - 4.0 * dp {
            return self.vf_hat_direct(p);
        }
        let table = self.inner.table.get_or_init(|| {
            let n = (p_tab / dp).round() as usize;
            (0..=n).map(|i| self.vf_hat_direct(i as f64 * dp)).collect()
        });
        uniform_cubic(table, dp, p)
    }

    /// Radial transform `ŵ_ℓ(p)` in the `e^{−2πipx}` convention.
    ///
    /// Away from `|2πp|² ≈ λ` this uses the exact relation
    /// `(4π²p² − λ) ŵ = (Vf/2)^ − λ χ̂_{Nℓ}` that follows from the Neumann
    /// equation; near it, direct quadrature.
    pub fn w_hat(&self, p: f64) -> f64 {
        if self.inner.zero {
            return 0.0;
        }
        let p = p.abs();
        let q = 2.0 * PI * p;
        let lam = self.lambda_ell;
        if q * q < 4.0 * lam {
            return self.w_hat_direct(p);
        }
        (self.vf_hat(p) - lam * ball_hat(q, self.radius)) / (q * q - lam)
    }

    /// `ŵ_ℓ(p) = 4π ∫ w r² sinc(2πpr) dr` by quadrature.
    pub fn w_hat_direct(&self, p: f64) -> f64 {
        if self.inner.zero {
            return 0.0;
        }
        let q = 2.0 * PI * p;
        let inn = &self.inner;
        let g: Vec<f64> = (0..inn.u.len())
            .map(|i| {
                let r = i as f64 * inn.h;
                (r * r - r * inn.u[i]) * sinc(q * r)
            })
            .collect();
        let inner = simpson(&g, inn.h);
        let mut breaks = vec![inn.support];
        while breaks.last().unwrap() * 2.0 < self.radius {
            let b = breaks.last().unwrap() * 2.0;
            breaks.push(b);
        }
        breaks.push(self.radius);
        let width = if p > 0.0 { 0.25 / p } else { f64::INFINITY };
        let outer = integrate_panels(&breaks, width, |r| self.w(r) * r * r * sinc(q * r));
        4.0 * PI * (inner + outer)
    }

    /// `4π ∫ w_ℓ r² dr`.
    pub fn integral_w(&self) -> f64 {
        self.w_hat(0.0)
    }
}

/// Transform of the indicator of the ball of radius `L` at `q = 2πp`.
pub(crate) fn ball_hat(q: f64, big_l: f64) -> f64 {
    let x = q * big_l;
    let core = if x < 0.05 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    };
    4.0 * PI * big_l.powi(3) * core
}

/// Samples of `ŵ_ℓ` with the fitted `sup_p p²|ŵ_ℓ(p)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSamples {
    pub p: Vec<f64>,
    pub values: Vec<f64>,
    pub sup_p2: f64,
}

/// Sample `ŵ_ℓ` on a positive momentum grid spanning two decades or more.
pub fn fourier_w(sol: &NeumannSolution, p_grid: &[f64]) -> Result<FourierSamples> {
    if p_grid.is_empty() || p_grid.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(invalid("p_grid must be positive and finite"));
    }
    let lo = p_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p_grid.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 100.0 {
        return Err(invalid("p_grid must cover at least two decades"));
    }
    let values: Vec<f64> = p_grid.iter().map(|&p| sol.w_hat(p)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(failure("oscillatory quadrature for w_hat", f64::NAN));
    }
    let sup_p2 = p_grid
        .iter()
        .zip(&values)
        .map(|(p, v)| p * p * v.abs())
        .fold(0.0, f64::max);
    Ok(FourierSamples {
        p: p_grid.to_vec(),
        values,
        sup_p2,
    })
}

/// `f_{N,ℓ}(x) = f_ℓ(Nx)` on the unit-scale ball `|x| ≤ ℓ`.
#[derive(Debug, Clone, Serialize)]
pub struct RescaledScattering {
    pub source: NeumannSolution,
    pub ell: f64,
    pub n_param: f64,
    /// Sampled `f_{N,ℓ}` on `[0, ℓ]`, extended by 1.
    pub f_n_ell: RadialProfile,
    /// max over interior nodes of the (reduced) residual of the rescaled
    /// equation, in units of `N² λ_ℓ`.
    pub residual_rel: f64,
    pub residual_abs: f64,
}

impl RescaledScattering {
    pub fn f(&self, r: f64) -> f64 {
        if r >= self.ell {
            1.0
        } else {
            self.source.f(self.n_param * r)
        }
    }

    pub fn chi_ell(&self, r: f64) -> f64 {
        if r <= self.ell {
            1.0
        } else {
            0.0
        }
    }
}

/// Rescale to `f_{N,ℓ}` and report the residual of its equation.
///
/// The residual is taken in weak form over pairs of cells,
/// `u'(r+h) − u'(r−h) − ∫(V/2 − λ)u`, divided by `2h`, for the reduced
/// function `u = r f`, then scaled by `N²`.
pub fn rescale(sol: &NeumannSolution) -> RescaledScattering {
    let n = sol.n_param;
    let (h, u, v) = sol.inner_values();
    let mut res = 0.0f64;
    if !sol.is_zero() {
        for i in 1..u.len() - 1 {
            // skip the cell pair straddling a discontinuity of V
            if i + 1 == u.len() - 1 && v[i + 1] != v[i] {
                continue;
            }
            let g = |j: usize| (0.5 * v[j] - sol.lambda_ell) * u[j];
            let integral = h / 3.0 * (g(i - 1) + 4.0 * g(i) + g(i + 1));
            let du = sol_du(sol, i + 1) - sol_du(sol, i - 1);
            res = res.max(((du - integral) / (2.0 * h)).abs());
        }
    }
    let residual_abs = n * n * res;
    let residual_rel = if sol.lambda_ell > 0.0 {
        res / sol.lambda_ell
    } else {
        0.0
    };
    let ell = sol.ell;
    let f_n_ell = RadialProfile::from_fn(
        512,
        ell,
        Tail::ClosedForm {
            r_cut: ell,
            form: ClosedForm::Power {
                coef: 1.0,
                exponent: 0.0,
            },
        },
        |r| if r >= ell { 1.0 } else { sol.f(n * r) },
    )
    .expect("uniform grid");
    RescaledScattering {
        source: sol.clone(),
        ell,
        n_param: n,
        f_n_ell,
        residual_rel,
        residual_abs,
    }
}

fn sol_du(sol: &NeumannSolution, i: usize) -> f64 {
    sol.inner.du[i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::make_square_well;

    fn well() -> InteractionPotential {
        make_square_well(2.0, 1.0, 256).unwrap()
    }

    #[test]
    fn lambda_matches_reference_values() {
        // high-precision reference values of λ(Nℓ)³/(3a0) − 1
        let a0 = 1.0 - 1f64.tanh();
        for (big_l, dev) in [(25.0, 0.0174), (100.0, 0.00431), (400.0, 0.00107)] {
            let s = solve_neumann(&well(), 0.5, 2.0 * big_l, 1024).unwrap();
            let got = s.lambda_ell * big_l * big_l * big_l / (3.0 * a0) - 1.0;
            assert!((got - dev).abs() < 0.03 * dev, "L={big_l}: {got}");
        }
    }

    #[test]
    fn normalization_and_neumann_condition() {
        let s = solve_neumann(&well(), 0.5, 200.0, 1024).unwrap();
        assert_eq!(s.f(s.radius), 1.0);
        let r = s.radius * (1.0 - 1e-9);
        assert!(s.dw(r).abs() < 1e-9);
        assert!(s.f_ell.samples().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn identity_transform_matches_quadrature() {
        let s = solve_neumann(&well(), 0.5, 100.0, 1024).unwrap();
        for p in [0.0, 0.013, 0.1, 0.37, 1.3, 4.1] {
            let a = s.w_hat(p);
            let b = s.w_hat_direct(p);
            assert!((a - b).abs() < 1e-7 * (1.0 + b.abs()), "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_potential_is_trivial() {
        let z = make_square_well(0.0, 1.0, 64).unwrap();
        let s = solve_neumann(&z, 0.5, 200.0, 512).unwrap();
        assert_eq!(s.lambda_ell, 0.0);
        assert_eq!(s.f(3.0), 1.0);
        assert_eq!(s.w_hat(0.7), 0.0);
        let r = rescale(&s);
        assert!(r.f_n_ell.samples().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn bad_domains() {
        assert!(matches!(
            solve_neumann(&well(), 0.5, 1.5, 512),
            Err(Error::InvalidDomain(_))
        ));
        assert!(matches!(
            solve_neumann(&well(), 1.5, 100.0, 512),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rescaled_residual_is_small() {
        let s = solve_neumann(&well(), 0.5, 200.0, 1024).unwrap();
        let r = rescale(&s);
        assert_eq!(r.f(0.5), 1.0);
        assert!(r.residual_rel < 1e-6, "residual {}", r.residual_rel);
    }
}
