//! `H_N` and the excitation Hamiltonian `L̃_N = L̃⁰ + … + L̃⁴`.
//!
//! Every quartic monomial is normal-ordered into pair products,
//! `a*_i a*_j a_l a_k = a*_i a_k a*_j a_l − δ_{jk} a*_i a_l`, and each pair is
//! replaced by its `U_N` image: `a*_0 a_0 → N − 𝒩`, `a*_p a_0 → √N b*_p`,
//! `a*_0 a_q → √N b_q`, `a*_p a_q → a*_p a_q`. The image of a pair has
//! degree 0, 1 or 2 in excitation fields, and `L̃^{(j)}` collects the terms
//! of total degree `j`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::coeff::CoefficientSet;
use super::ladder::{ladders, number_op, Ladder};
use super::operator::{deviation, FockOperator};
use super::space::FockSpace;
use super::un::{build_un, gamma_q};
use crate::error::Result;

type Op = FockOperator<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn build_hn(coeff: &CoefficientSet, space: &Arc<FockSpace>) -> Result<Op> {
    coeff.validate()?;
    let l = ladders::<Complex64>(space);
    let m = coeff.modes;
    let mut h = Op::zero(space);
    for i in 0..m {
        for j in 0..m {
            if coeff.h[(i, j)].norm() > 0.0 {
                h = h.add(&l[i].a_dag.mul(&l[j].a).scale(&coeff.h[(i, j)]));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let cr = l[i].a_dag.mul(&l[j].a_dag);
            for k in 0..m {
                for ll in 0..m {
                    let v = coeff.v(i, j, k, ll);
                    if v.norm() > 0.0 {
                        let an = l[ll].a.mul(&l[k].a);
                        h = h.add(&cr.mul(&an).scale(&(v * 0.5)));
                    }
                }
            }
        }
    }
    Ok(h)
}

/// `U_N` image of `a*_x a_y` and its degree.
fn pair_image(
    l: &[Ladder<Complex64>],
    n_minus: &Op,
    sqrt_n: f64,
    mode0: usize,
    x: usize,
    y: usize,
) -> (Op, usize) {
    match (x == mode0, y == mode0) {
        (true, true) => (n_minus.clone(), 0),
        (false, true) => (l[x].b_dag.scale(&c(sqrt_n)), 1),
        (true, false) => (l[y].b.scale(&c(sqrt_n)), 1),
        (false, false) => (l[x].a_dag.mul(&l[y].a), 2),
    }
}

/// The five parts `L̃^{(0)}, …, L̃^{(4)}` on `F^{≤N}`.
pub fn build_ln(coeff: &CoefficientSet, space: &Arc<FockSpace>) -> Result<[Op; 5]> {
    coeff.validate()?;
    let l = ladders::<Complex64>(space);
    let m = coeff.modes;
    let n = space.n_cap as f64;
    let n_minus = Op::identity(space).scale(&c(n)).sub(&number_op(space));
    let pairs: Vec<Vec<(Op, usize)>> = (0..m)
        .map(|x| {
            (0..m)
                .map(|y| pair_image(&l, &n_minus, n.sqrt(), coeff.mode0, x, y))
                .collect()
        })
        .collect();
    let mut parts: [Op; 5] = std::array::from_fn(|_| Op::zero(space));
    for i in 0..m {
        for j in 0..m {
            let hij = coeff.h[(i, j)];
            if hij.norm() > 0.0 {
                let (op, d) = &pairs[i][j];
                parts[*d] = parts[*d].add(&op.scale(&hij));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for ll in 0..m {
                    let v = coeff.v(i, j, k, ll) * 0.5;
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let (p1, d1) = &pairs[i][k];
                    let (p2, d2) = &pairs[j][ll];
                    parts[d1 + d2] = parts[d1 + d2].add(&p1.mul(p2).scale(&v));
                    if j == k {
                        let (p3, d3) = &pairs[i][ll];
                        parts[*d3] = parts[*d3].sub(&p3.scale(&v));
                    }
                }
            }
        }
    }
    Ok(parts)
}

pub fn sum_parts(parts: &[Op; 5]) -> Op {
    parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, p| acc.add(p))
}

/// `L̃^{(1)}` in the form that uses the discrete GP equation
/// `h_{p0} = −g v_{p000}`: the one-body contribution `√N h_{p0} b*_p` is
/// replaced by `−√N g v_{p000} b*_p` (and its adjoint).
pub fn gp_form_linear(
    coeff: &CoefficientSet,
    space: &Arc<FockSpace>,
    g_int: f64,
    generic: &Op,
) -> Op {
    let l = ladders::<Complex64>(space);
    let sqrt_n = (space.n_cap as f64).sqrt();
    let mut out = generic.clone();
    for p in (0..coeff.modes).filter(|&p| p != coeff.mode0) {
        let delta =
            coeff.h[(p, coeff.mode0)] + coeff.v(p, coeff.mode0, coeff.mode0, coeff.mode0) * g_int;
        out = out
            .sub(&l[p].b_dag.scale(&(delta * sqrt_n)))
            .sub(&l[p].b.scale(&(delta.conj() * sqrt_n)));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyIdentityReport {
    pub modes: usize,
    pub n_cap: usize,
    pub trials: usize,
    /// `max |⟨ψ,H_Nψ⟩ − ⟨U_Nψ, Γ(q)L̃Γ(q) U_Nψ⟩|`
    pub max_energy_deviation: f64,
    /// `max |U_N H_N U_N* − Γ(q)L̃Γ(q)|` entrywise
    pub operator_deviation: f64,
    /// `|⟨Ω, L̃ Ω⟩ − ⟨φ^{⊗N}, H_N φ^{⊗N}⟩|`
    pub vacuum_deviation: f64,
}

fn expect(op: &Op, psi: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (r, col, v) in op.entries() {
        s += psi[r].conj() * v * psi[col];
    }
    s
}

fn apply(op: &Op, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (r, col, v) in op.entries() {
        out[r] += v * psi[col];
    }
    out
}

/// `⟨ψ, H_N ψ⟩ = ⟨U_N ψ, L̃ U_N ψ⟩` for seeded random `ψ` in the
/// `N_cap`-particle sector.
pub fn verify_energy_identity(
    coeff: &CoefficientSet,
    space: &Arc<FockSpace>,
    trials: usize,
    seed: u64,
) -> Result<EnergyIdentityReport> {
    let h = build_hn(coeff, space)?;
    let parts = build_ln(coeff, space)?;
    let lt = sum_parts(&parts);
    let q = gamma_q::<Complex64>(space, coeff.mode0);
    let lq = q.mul(&lt).mul(&q);
    let u = build_un::<Complex64>(space, coeff.mode0)?;
    let sector = space.sector(space.n_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut psi = vec![Complex64::new(0.0, 0.0); space.dim()];
        for &i in &sector {
            psi[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        let e1 = expect(&h, &psi);
        let upsi = apply(&u, &psi);
        let e2 = expect(&lq, &upsi);
        worst = worst.max((e1 - e2).norm());
    }
    let op_dev = deviation(&u.mul(&h).mul(&u.adjoint()), &lq);
    let mut cond = vec![0u8; space.modes];
    cond[coeff.mode0] = space.n_cap as u8;
    let ci = space.index_of(&cond).unwrap();
    let vac = (lt.get(0, 0) - h.get(ci, ci)).norm();
    Ok(EnergyIdentityReport {
        modes: space.modes,
        n_cap: space.n_cap,
        trials,
        max_energy_deviation: worst,
        operator_deviation: op_dev,
        vacuum_deviation: vac,
    })
}
