//! The generators `B` (quadratic) and `A` (cubic), their exponentials,
//! number-growth ratios and the remainder `d_η`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::coeff::CoefficientSet;
use super::ladder::{contract, ladders};
use super::operator::FockOperator;
use super::space::{FockSpace, MAX_DIM};
use crate::error::{failure, invalid, Error, Result};

type Op = FockOperator<Complex64>;
type CMat = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `B = ½ Σ η_ij (b*_i b*_j − b_i b_j)`, built as `(P − P†)/2` so that
/// `B† = −B` holds bit for bit.
pub fn build_b(eta: &DMatrix<f64>, space: &Arc<FockSpace>) -> Result<Op> {
    let m = space.modes;
    if eta.nrows() != m || eta.ncols() != m {
        return Err(invalid("eta must be M×M"));
    }
    if (0..m).any(|i| (0..i).any(|j| eta[(i, j)] != eta[(j, i)])) {
        return Err(Error::InvalidCoefficients("eta must be symmetric".into()));
    }
    let l = ladders::<Complex64>(space);
    let mut p = Op::zero(space);
    for i in 0..m {
        for j in 0..m {
            if eta[(i, j)] != 0.0 {
                p = p.add(&l[i].b_dag.mul(&l[j].b_dag).scale(&c(eta[(i, j)])));
            }
        }
    }
    Ok(p.sub(&p.adjoint()).scale(&c(0.5)))
}

/// `A = N^{−1/2} Σ ν_xy g_xz (b*_x a*_y a_z − h.c.)`.
pub fn build_a(nu: &DMatrix<f64>, g: &DMatrix<f64>, space: &Arc<FockSpace>) -> Result<Op> {
    let m = space.modes;
    if nu.shape() != (m, m) || g.shape() != (m, m) {
        return Err(invalid("nu and g must be M×M"));
    }
    let l = ladders::<Complex64>(space);
    let mut cub = Op::zero(space);
    for x in 0..m {
        for y in 0..m {
            if nu[(x, y)] == 0.0 {
                continue;
            }
            let left = l[x].b_dag.mul(&l[y].a_dag);
            for z in 0..m {
                let w = nu[(x, y)] * g[(x, z)];
                if w != 0.0 {
                    cub = cub.add(&left.mul(&l[z].a).scale(&c(w)));
                }
            }
        }
    }
    let s = c(1.0 / (space.n_cap as f64).sqrt());
    let cub = cub.scale(&s);
    Ok(cub.sub(&cub.adjoint()))
}

/// `e^G` by Padé scaling and squaring. The zero generator gives the identity
/// exactly.
pub fn exp_generator(gen: &Op) -> Result<CMat> {
    let n = gen.dim();
    if n > MAX_DIM {
        return Err(Error::ResourceLimit(format!(
            "dimension {n} exceeds {MAX_DIM}"
        )));
    }
    if gen.nnz() == 0 {
        return Ok(CMat::identity(n, n));
    }
    let e = gen.to_dense().exp();
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(failure("matrix exponential", f64::INFINITY));
    }
    Ok(e)
}

/// `max |E†E − 1|`
pub fn unitarity_defect(e: &CMat) -> f64 {
    let n = e.nrows();
    (e.adjoint() * e - CMat::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `max_k |λ_k(E†HE) − λ_k(H)|` for Hermitian `H`.
pub fn spectrum_shift(e: &CMat, h: &CMat) -> f64 {
    let sorted = |m: CMat| {
        let m = (&m + m.adjoint()) * c(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        ev
    };
    let a = sorted(h.clone());
    let b = sorted(e.adjoint() * h * e);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn number_powers(space: &FockSpace, n: i32) -> Vec<f64> {
    (0..space.dim())
        .map(|i| ((space.total(i) + 1) as f64).powi(n))
        .collect()
}

/// Largest eigenvalue of `(𝒩+1)^{−n/2} e^{−G}(𝒩+1)^n e^G (𝒩+1)^{−n/2}`,
/// computed as `σ_max(Y)²` with `Y = (𝒩+1)^{n/2} e^G (𝒩+1)^{−n/2}`.
pub fn growth_ratio(e: &CMat, space: &FockSpace, n: i32) -> f64 {
    let w = number_powers(space, n);
    let y = CMat::from_fn(e.nrows(), e.ncols(), |r, col| {
        e[(r, col)] * (w[r] / w[col]).sqrt()
    });
    let x = y.adjoint() * y;
    SymmetricEigen::new(x).eigenvalues.max()
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEntry {
    pub n_cap: usize,
    pub power: i32,
    pub t: f64,
    pub ratio: f64,
    pub unitarity_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable {
    pub generator: String,
    pub modes: usize,
    /// Frobenius norm of `η` (for `B`) or of `ν` (for `A`).
    pub generator_norm: f64,
    pub entries: Vec<GrowthEntry>,
    /// Sup of the ratio over `N_cap` and `t`, per power.
    pub sup_by_power: BTreeMap<i32, f64>,
    pub bound: f64,
    pub bounded: bool,
}

fn check_power(p: i32) -> Result<()> {
    if !(-2..=2).contains(&p) {
        return Err(invalid(format!("power {p} outside −2..2")));
    }
    Ok(())
}

fn table(
    generator: &str,
    modes: usize,
    norm: f64,
    entries: Vec<GrowthEntry>,
    bound: f64,
) -> GrowthTable {
    let mut sup = BTreeMap::new();
    for e in &entries {
        let s = sup.entry(e.power).or_insert(0.0f64);
        *s = s.max(e.ratio);
    }
    let bounded = entries
        .iter()
        .all(|e| e.ratio.is_finite() && e.ratio <= bound);
    GrowthTable {
        generator: generator.into(),
        modes,
        generator_norm: norm,
        entries,
        sup_by_power: sup,
        bound,
        bounded,
    }
}

/// Growth ratios of `e^B` for a fixed `η` across the `N_cap` range.
pub fn verify_b_number_growth(
    eta: &DMatrix<f64>,
    n_caps: &[usize],
    powers: &[i32],
    bound: f64,
) -> Result<GrowthTable> {
    powers.iter().try_for_each(|&p| check_power(p))?;
    let modes = eta.nrows();
    let per_cap: Vec<Vec<GrowthEntry>> = n_caps
        .par_iter()
        .map(|&n_cap| {
            let space = Arc::new(FockSpace::new(modes, n_cap)?);
            let e = exp_generator(&build_b(eta, &space)?)?;
            let defect = unitarity_defect(&e);
            Ok(powers
                .iter()
                .map(|&p| GrowthEntry {
                    n_cap,
                    power: p,
                    t: 1.0,
                    ratio: growth_ratio(&e, &space, p),
                    unitarity_defect: defect,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(table(
        "B",
        modes,
        eta.norm(),
        per_cap.into_iter().flatten().collect(),
        bound,
    ))
}

/// Growth ratios of `e^{tA}` over `N_cap` and a `t` grid.
pub fn verify_a_number_growth(
    nu: &DMatrix<f64>,
    g: &DMatrix<f64>,
    n_caps: &[usize],
    powers: &[i32],
    t_grid: &[f64],
    bound: f64,
) -> Result<GrowthTable> {
    powers.iter().try_for_each(|&p| check_power(p))?;
    let modes = nu.nrows();
    let tuples: Vec<(usize, f64)> = n_caps
        .iter()
        .flat_map(|&n| t_grid.iter().map(move |&t| (n, t)))
        .collect();
    let per: Vec<Vec<GrowthEntry>> = tuples
        .par_iter()
        .map(|&(n_cap, t)| {
            let space = Arc::new(FockSpace::new(modes, n_cap)?);
            let a = build_a(nu, g, &space)?.scale(&c(t));
            let e = exp_generator(&a)?;
            let defect = unitarity_defect(&e);
            Ok(powers
                .iter()
                .map(|&p| GrowthEntry {
                    n_cap,
                    power: p,
                    t,
                    ratio: growth_ratio(&e, &space, p),
                    unitarity_defect: defect,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(table(
        "A",
        modes,
        nu.norm(),
        per.into_iter().flatten().collect(),
        bound,
    ))
}

/// `cosh η` and `sinh η` of a real symmetric matrix. `cosh` is formed as
/// `1 + V(cosh Λ − 1)Vᵀ` so that `η = 0` gives exactly `(1, 0)`.
pub fn cosh_sinh(eta: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = eta.nrows();
    let eig = SymmetricEigen::new(eta.clone());
    let v = &eig.eigenvectors;
    let ch = DVector::from_iterator(m, eig.eigenvalues.iter().map(|&l| l.cosh() - 1.0));
    let sh = DVector::from_iterator(m, eig.eigenvalues.iter().map(|&l| l.sinh()));
    let cosh = DMatrix::identity(m, m) + v * DMatrix::from_diagonal(&ch) * v.transpose();
    let sinh = v * DMatrix::from_diagonal(&sh) * v.transpose();
    (cosh, sinh)
}

fn real_times(a: &DMatrix<f64>, f: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| f[j] * a[(i, j)]).sum())
        .collect()
}

/// `d_η(f) = e^{−B} b(f) e^B − b(cosh_η f) − b*(sinh_η f̄)`.
pub fn compute_d_eta(f: &[Complex64], eta: &DMatrix<f64>, space: &Arc<FockSpace>) -> Result<CMat> {
    if f.len() != space.modes {
        return Err(invalid("f must have M entries"));
    }
    let l = ladders::<Complex64>(space);
    let b: Vec<Op> = l.iter().map(|x| x.b.clone()).collect();
    let bd: Vec<Op> = l.iter().map(|x| x.b_dag.clone()).collect();
    let e = exp_generator(&build_b(eta, space)?)?;
    let (cosh, sinh) = cosh_sinh(eta);
    let fbar: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    let conj = e.adjoint() * contract(&b, f, true).to_dense() * &e;
    let lin = contract(&b, &real_times(&cosh, f), true).add(&contract(
        &bd,
        &real_times(&sinh, &fbar),
        false,
    ));
    Ok(conj - lin.to_dense())
}

/// `σ_max((𝒩+1)^{n/2} d (𝒩+1)^{−(n+3)/2}) / ‖f‖`.
pub fn d_eta_ratio(d: &CMat, space: &FockSpace, f: &[Complex64], n: i32) -> f64 {
    let fnorm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let w: Vec<f64> = (0..space.dim())
        .map(|i| (space.total(i) + 1) as f64)
        .collect();
    let y = CMat::from_fn(d.nrows(), d.ncols(), |r, col| {
        d[(r, col)] * (w[r].powf(n as f64 / 2.0) * w[col].powf(-(n as f64 + 3.0) / 2.0))
    });
    if y.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    y.singular_values().max() / fnorm
}

/// Top eigenvector of `η` (in magnitude), as a complex mode vector.
pub fn top_singular_vector(eta: &DMatrix<f64>) -> Vec<Complex64> {
    let eig = SymmetricEigen::new(eta.clone());
    let k = eig.eigenvalues.iamax();
    eig.eigenvectors.column(k).iter().map(|&x| c(x)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DEtaEntry {
    pub n_cap: usize,
    pub ratio: f64,
    pub ratio_times_n: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DEtaTable {
    pub modes: usize,
    pub eta_norm: f64,
    pub power: i32,
    pub entries: Vec<DEtaEntry>,
    pub max_ratio_times_n: f64,
    pub bound: f64,
    pub bounded: bool,
}

/// `d_η` ratio for `f` along the top singular vector of `η`, across `N_cap`.
pub fn d_eta_sweep(
    eta: &DMatrix<f64>,
    n_caps: &[usize],
    power: i32,
    bound: f64,
) -> Result<DEtaTable> {
    check_power(power)?;
    let modes = eta.nrows();
    let f = top_singular_vector(eta);
    let entries: Vec<DEtaEntry> = n_caps
        .par_iter()
        .map(|&n_cap| {
            let space = Arc::new(FockSpace::new(modes, n_cap)?);
            let d = compute_d_eta(&f, eta, &space)?;
            let ratio = d_eta_ratio(&d, &space, &f, power);
            Ok(DEtaEntry {
                n_cap,
                ratio,
                ratio_times_n: ratio * n_cap as f64,
            })
        })
        .collect::<Result<_>>()?;
    let max = entries.iter().map(|e| e.ratio_times_n).fold(0.0, f64::max);
    Ok(DEtaTable {
        modes,
        eta_norm: eta.norm(),
        power,
        bounded: max.is_finite() && max <= bound,
        max_ratio_times_n: max,
        bound,
        entries,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BchCheck {
    pub scales: [f64; 2],
    /// `‖d(tη) − t D₁ − t²/2 D₂‖_max` at both scales.
    pub residuals: [f64; 2],
    /// `log₂` of the residual ratio; 3 for an `O(t³)` remainder.
    pub order: f64,
}

/// Compares `d_{tη}(f)` with its second-order expansion
/// `t([b(f),B] − b*(ηf̄)) + t²/2([[b(f),B],B] − b(η²f))`.
pub fn bch_check(eta: &DMatrix<f64>, space: &Arc<FockSpace>, t: f64) -> Result<BchCheck> {
    let f = top_singular_vector(eta);
    let fbar: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    let l = ladders::<Complex64>(space);
    let b: Vec<Op> = l.iter().map(|x| x.b.clone()).collect();
    let bd: Vec<Op> = l.iter().map(|x| x.b_dag.clone()).collect();
    let big_b = build_b(eta, space)?;
    let bf = contract(&b, &f, true);
    let c1 = bf.commutator(&big_b);
    let d1 = c1
        .sub(&contract(&bd, &real_times(eta, &fbar), false))
        .to_dense();
    let eta2 = eta * eta;
    let d2 = c1
        .commutator(&big_b)
        .sub(&contract(&b, &real_times(&eta2, &f), true))
        .to_dense();
    let mut res = [0.0; 2];
    let scales = [t, t / 2.0];
    for (k, &s) in scales.iter().enumerate() {
        let d = compute_d_eta(&f, &(eta * s), space)?;
        let approx = &d1 * c(s) + &d2 * c(s * s / 2.0);
        res[k] = (d - approx).iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    Ok(BchCheck {
        scales,
        residuals: res,
        order: (res[0] / res[1]).log2(),
    })
}

/// `‖B + B†‖`, `‖e^B†e^B − 1‖` and the spectrum shift of `H_N` under `e^B`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationReport {
    pub antisymmetry_defect: f64,
    pub unitarity_defect: f64,
    pub hermiticity_defect: f64,
    pub spectrum_shift: f64,
}

pub fn conjugation_report(gen: &Op, h: &Op) -> Result<ConjugationReport> {
    let e = exp_generator(gen)?;
    let hd = h.to_dense();
    let conj = e.adjoint() * &hd * &e;
    Ok(ConjugationReport {
        antisymmetry_defect: gen.add(&gen.adjoint()).max_abs(),
        unitarity_defect: unitarity_defect(&e),
        hermiticity_defect: (&conj - conj.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
        spectrum_shift: spectrum_shift(&e, &hd),
    })
}

/// Random coefficients helper for sweeps: `η`, `ν`, `g` at the given norms.
pub fn sweep_coefficients(modes: usize, seed: u64, eta_norm: f64, nu_norm: f64) -> CoefficientSet {
    CoefficientSet::random(modes, seed, eta_norm, nu_norm)
}
