use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Mode-space coefficients of `H_N`, `B` and `A`.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub modes: usize,
    /// Index of the condensate mode.
    pub mode0: usize,
    /// Hermitian one-body matrix.
    pub h: DMatrix<Complex64>,
    /// `v_{ijkl}` at `((i·M + j)·M + k)·M + l`.
    pub v: Vec<Complex64>,
    /// Real symmetric kernel of `B`.
    pub eta: DMatrix<f64>,
    pub nu: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

fn idx(m: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * m + j) * m + k) * m + l
}

/// Orbit of `(i,j,k,l)` under `i↔j`, `k↔l` and `(ij)↔(kl)` with conjugation;
/// entries are `(index, conjugated)`.
fn orbit(m: usize, i: usize, j: usize, k: usize, l: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::with_capacity(8);
    for (a, b) in [(i, j), (j, i)] {
        for (c, d) in [(k, l), (l, k)] {
            out.push((idx(m, a, b, c, d), false));
            out.push((idx(m, c, d, a, b), true));
        }
    }
    out
}

/// Project a tensor onto the bosonic symmetry class, assigning every orbit
/// from one averaged value so the symmetries hold bit for bit.
pub fn symmetrize_v(m: usize, w: &[Complex64]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(f64::NAN, 0.0); w.len()];
    let mut done = vec![false; w.len()];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let base = idx(m, i, j, k, l);
                    if done[base] {
                        continue;
                    }
                    let orb = orbit(m, i, j, k, l);
                    let mut avg = orb
                        .iter()
                        .map(|&(x, c)| if c { w[x].conj() } else { w[x] })
                        .sum::<Complex64>()
                        / 8.0;
                    if orb.iter().any(|&(x, c)| x == base && c) {
                        avg.im = 0.0;
                    }
                    for &(x, c) in &orb {
                        v[x] = if c { avg.conj() } else { avg };
                        done[x] = true;
                    }
                }
            }
        }
    }
    v
}

fn random_symmetric(m: usize, rng: &mut ChaCha8Rng, frob: f64) -> DMatrix<f64> {
    let mut e = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
    e = (&e + e.transpose()) * 0.5;
    let n = e.norm();
    if n > 0.0 {
        e *= frob / n;
    }
    e
}

impl CoefficientSet {
    pub fn v(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.v[idx(self.modes, i, j, k, l)]
    }

    /// Exact symmetry checks; violations give invalid-coefficients.
    pub fn validate(&self) -> Result<()> {
        let m = self.modes;
        if self.h.nrows() != m || self.h.ncols() != m || self.v.len() != m.pow(4) || self.mode0 >= m
        {
            return Err(Error::InvalidCoefficients("shape mismatch".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if self.h[(i, j)] != self.h[(j, i)].conj() {
                    return Err(Error::InvalidCoefficients(format!(
                        "h not Hermitian at ({i},{j})"
                    )));
                }
                if self.eta[(i, j)] != self.eta[(j, i)] {
                    return Err(Error::InvalidCoefficients(format!(
                        "eta not symmetric at ({i},{j})"
                    )));
                }
                for k in 0..m {
                    for l in 0..m {
                        let x = self.v(i, j, k, l);
                        if x != self.v(j, i, k, l)
                            || x != self.v(i, j, l, k)
                            || x != self.v(k, l, i, j).conj()
                        {
                            return Err(Error::InvalidCoefficients(format!(
                                "v symmetry violated at ({i},{j},{k},{l})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Seeded random coefficients: Hermitian `h`, symmetrized complex `v`,
    /// and real `η`, `ν`, `g` with Frobenius norms `eta_norm`, `nu_norm`, 1.
    pub fn random(modes: usize, seed: u64, eta_norm: f64, nu_norm: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = |rng: &mut ChaCha8Rng| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        };
        let a = DMatrix::from_fn(modes, modes, |_, _| c(&mut rng));
        let mut h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        for i in 0..modes {
            h[(i, i)].im = 0.0;
            for j in 0..i {
                h[(j, i)] = h[(i, j)].conj();
            }
        }
        let w: Vec<Complex64> = (0..modes.pow(4)).map(|_| c(&mut rng)).collect();
        let v = symmetrize_v(modes, &w);
        let eta = random_symmetric(modes, &mut rng, eta_norm);
        let mut nu = DMatrix::from_fn(modes, modes, |_, _| rng.gen_range(-1.0..1.0));
        let nn = nu.norm();
        if nn > 0.0 {
            nu *= nu_norm / nn;
        }
        let g = random_symmetric(modes, &mut rng, 1.0);
        CoefficientSet {
            modes,
            mode0: 0,
            h,
            v,
            eta,
            nu,
            g,
        }
    }

    /// Real coefficients in a basis whose first vector solves the discrete
    /// GP equation `h c + g_int Σ_{jkl} v_{ijkl} c_j c_l c_k = ε c`.
    /// Returns the set and the residual of the equation in the new basis.
    pub fn gp_solved(modes: usize, seed: u64, g_int: f64) -> Result<(Self, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(modes, modes, |_, _| rng.gen_range(-0.3..0.3));
        let mut h = (&a + a.transpose()) * 0.5;
        for i in 0..modes {
            h[(i, i)] += i as f64;
        }
        let w: Vec<Complex64> = (0..modes.pow(4))
            .map(|_| Complex64::new(rng.gen_range(0.0..1.0), 0.0))
            .collect();
        let v: Vec<f64> = symmetrize_v(modes, &w).iter().map(|z| z.re).collect();
        let w_of = |c: &[f64]| {
            DMatrix::from_fn(modes, modes, |i, k| {
                let mut s = 0.0;
                for j in 0..modes {
                    for l in 0..modes {
                        s += v[idx(modes, i, j, k, l)] * c[j] * c[l];
                    }
                }
                s
            })
        };
        let mut c = vec![0.0; modes];
        c[0] = 1.0;
        let mut converged = false;
        for _ in 0..500 {
            let eig = SymmetricEigen::new(&h + w_of(&c) * g_int);
            let i0 = eig.eigenvalues.imin();
            let mut new: Vec<f64> = eig.eigenvectors.column(i0).iter().cloned().collect();
            if new.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
                new.iter_mut().for_each(|x| *x = -*x);
            }
            let change = new
                .iter()
                .zip(&c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            c = new.iter().zip(&c).map(|(a, b)| 0.5 * (a + b)).collect();
            let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.iter_mut().for_each(|x| *x /= n);
            if change < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(crate::error::failure("discrete GP iteration", f64::NAN));
        }
        // orthonormal basis with first vector c
        let mut basis = DMatrix::<f64>::identity(modes, modes);
        basis.set_column(0, &nalgebra::DVector::from_vec(c.clone()));
        let q = basis.qr().q();
        let sign = if q[(0, 0)] * c[0] + (1..modes).map(|i| q[(i, 0)] * c[i]).sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        let q = q * sign;
        let h2 = q.transpose() * &h * &q;
        let h2 = (&h2 + h2.transpose()) * 0.5;
        let mut v2 = vec![Complex64::new(0.0, 0.0); modes.pow(4)];
        for i in 0..modes {
            for j in 0..modes {
                for k in 0..modes {
                    for l in 0..modes {
                        let mut s = 0.0;
                        for a in 0..modes {
                            for b in 0..modes {
                                for cc in 0..modes {
                                    for d in 0..modes {
                                        s += q[(a, i)]
                                            * q[(b, j)]
                                            * q[(cc, k)]
                                            * q[(d, l)]
                                            * v[idx(modes, a, b, cc, d)];
                                    }
                                }
                            }
                        }
                        v2[idx(modes, i, j, k, l)] = Complex64::new(s, 0.0);
                    }
                }
            }
        }
        let v2 = symmetrize_v(modes, &v2);
        let hc = h2.map(|x| Complex64::new(x, 0.0));
        let set = CoefficientSet {
            modes,
            mode0: 0,
            h: hc,
            v: v2,
            eta: DMatrix::zeros(modes, modes),
            nu: DMatrix::zeros(modes, modes),
            g: DMatrix::zeros(modes, modes),
        };
        let residual = (1..modes)
            .map(|p| (set.h[(p, 0)] + set.v(p, 0, 0, 0) * g_int).norm())
            .fold(0.0, f64::max);
        Ok((set, residual))
    }
}
