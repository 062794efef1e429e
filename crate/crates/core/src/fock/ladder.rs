use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operator::{deviation, FockOperator};
use super::scalar::Scalar;
use super::space::FockSpace;
use crate::error::{invalid, Result};

/// `a_i`, `a*_i`, `b_i = √((N−𝒩)/N) a_i`, `b*_i` on `F^{≤N}`.
#[derive(Debug, Clone)]
pub struct Ladder<S: Scalar> {
    pub a: FockOperator<S>,
    pub a_dag: FockOperator<S>,
    pub b: FockOperator<S>,
    pub b_dag: FockOperator<S>,
}

pub fn build_ladder<S: Scalar>(space: &Arc<FockSpace>, mode: usize) -> Result<Ladder<S>> {
    if mode >= space.modes {
        return Err(invalid(format!(
            "mode {mode} out of range for M = {}",
            space.modes
        )));
    }
    let n_cap = space.n_cap as u64;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for col in 0..space.dim() {
        let occ = space.state(col);
        let ni = occ[mode] as u64;
        if ni == 0 {
            continue;
        }
        let mut lower = occ.to_vec();
        lower[mode] -= 1;
        let row = space
            .index_of(&lower)
            .expect("basis is closed under lowering");
        let t = space.total(col) as u64;
        a.push((row, col, S::sqrt_ratio(ni, 1)));
        // √((N − 𝒩)/N) evaluated after the annihilation, 𝒩 = t − 1
        b.push((row, col, S::sqrt_ratio(ni * (n_cap - t + 1), n_cap)));
    }
    let a = FockOperator::from_entries(space, a);
    let b = FockOperator::from_entries(space, b);
    Ok(Ladder {
        a_dag: a.adjoint(),
        b_dag: b.adjoint(),
        a,
        b,
    })
}

pub fn number_op<S: Scalar>(space: &Arc<FockSpace>) -> FockOperator<S> {
    FockOperator::diagonal(space, |i| S::from_int(space.total(i) as i64))
}

/// All ladders of a space.
pub fn ladders<S: Scalar>(space: &Arc<FockSpace>) -> Vec<Ladder<S>> {
    (0..space.modes)
        .map(|i| build_ladder(space, i).unwrap())
        .collect()
}

/// Projection onto `total ≤ N_cap − 1`.
pub fn below_cap<S: Scalar>(space: &Arc<FockSpace>) -> FockOperator<S> {
    FockOperator::diagonal(space, |i| {
        if space.total(i) < space.n_cap {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// Maximum deviation per identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub deviations: BTreeMap<String, f64>,
}

impl IdentityReport {
    pub fn record(&mut self, name: &str, dev: f64) {
        let e = self.deviations.entry(name.to_string()).or_insert(0.0);
        *e = e.max(dev);
    }

    pub fn max(&self) -> f64 {
        self.deviations.values().cloned().fold(0.0, f64::max)
    }

    pub fn merge(&mut self, o: &IdentityReport) {
        for (k, v) in &o.deviations {
            self.record(k, *v);
        }
    }
}

/// `[a_i, a*_j] = δ_ij` below the cap, `[a_i, a_j] = 0`, and the vacuum
/// value `⟨Ω|a_i a*_i|Ω⟩ = 1`.
pub fn verify_ccr<S: Scalar>(space: &Arc<FockSpace>) -> IdentityReport {
    let l = ladders::<S>(space);
    let p = below_cap::<S>(space);
    let id = FockOperator::identity(space);
    let zero = FockOperator::zero(space);
    let mut rep = IdentityReport::default();
    for i in 0..space.modes {
        for j in 0..space.modes {
            let c = p.mul(&l[i].a.commutator(&l[j].a_dag)).mul(&p);
            let want = if i == j { p.mul(&id) } else { zero.clone() };
            rep.record("ccr [a_i,a*_j]", deviation(&c, &want));
            rep.record("ccr [a_i,a_j]", l[i].a.commutator(&l[j].a).max_abs());
        }
        let vac = l[i].a.mul(&l[i].a_dag).get(0, 0);
        rep.record("vacuum a a*", (vac - S::one()).magnitude());
    }
    rep
}

/// The modified-field identities as matrix equations on `F^{≤N}`.
pub fn verify_b_commutators<S: Scalar>(space: &Arc<FockSpace>) -> IdentityReport {
    let l = ladders::<S>(space);
    let n_op = number_op::<S>(space);
    let n = space.n_cap as u64;
    // 1 − 𝒩/N
    let one_minus = FockOperator::diagonal(space, |i| {
        S::one() - S::from_int(space.total(i) as i64) * S::sqrt_ratio(1, n * n)
    });
    let inv_n = S::sqrt_ratio(1, n * n);
    let mut rep = IdentityReport::default();
    for i in 0..space.modes {
        for j in 0..space.modes {
            let lhs = l[i].b.commutator(&l[j].b_dag);
            let mut rhs = l[j].a_dag.mul(&l[i].a).scale(&-inv_n.clone());
            if i == j {
                rhs = rhs.add(&one_minus);
            }
            rep.record("[b_i,b*_j]", deviation(&lhs, &rhs));
            rep.record("[b_i,b_j]", l[i].b.commutator(&l[j].b).max_abs());
            rep.record("[b*_i,b*_j]", l[i].b_dag.commutator(&l[j].b_dag).max_abs());
            for k in 0..space.modes {
                let pair = l[j].a_dag.mul(&l[k].a);
                let lhs = l[i].b.commutator(&pair);
                let rhs = if i == j {
                    l[k].b.clone()
                } else {
                    FockOperator::zero(space)
                };
                rep.record("[b_i,a*_j a_k]", deviation(&lhs, &rhs));
                let lhs = l[i].b_dag.commutator(&pair);
                let rhs = if i == k {
                    l[j].b_dag.scale(&-S::one())
                } else {
                    FockOperator::zero(space)
                };
                rep.record("[b*_i,a*_j a_k]", deviation(&lhs, &rhs));
            }
        }
        rep.record("[b_i,N]", deviation(&l[i].b.commutator(&n_op), &l[i].b));
        rep.record(
            "[b*_i,N]",
            deviation(&l[i].b_dag.commutator(&n_op), &l[i].b_dag.scale(&-S::one())),
        );
        // b*_i vanishes on the top sector
        let top: f64 = space
            .sector(space.n_cap)
            .iter()
            .flat_map(|&c| (0..space.dim()).map(move |r| (r, c)))
            .map(|(r, c)| l[i].b_dag.get(r, c).magnitude())
            .fold(0.0, f64::max);
        rep.record("b* on total = N", top);
    }
    rep
}

/// `b(f) = Σ f̄_i b_i` etc. for coefficient vectors.
pub fn contract(
    ops: &[FockOperator<Complex64>],
    f: &[Complex64],
    conjugate: bool,
) -> FockOperator<Complex64> {
    let space = ops[0].space.clone();
    ops.iter()
        .zip(f)
        .fold(FockOperator::zero(&space), |acc, (op, c)| {
            let c = if conjugate { c.conj() } else { *c };
            acc.add(&op.scale(&c))
        })
}

/// `[b(f), a*(g) a(h)] = ⟨f, g⟩ b(h)` for seeded random vectors.
pub fn verify_contracted(space: &Arc<FockSpace>, seed: u64, trials: usize) -> IdentityReport {
    let l = ladders::<Complex64>(space);
    let b: Vec<_> = l.iter().map(|x| x.b.clone()).collect();
    let a: Vec<_> = l.iter().map(|x| x.a.clone()).collect();
    let ad: Vec<_> = l.iter().map(|x| x.a_dag.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vec = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..space.modes)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let mut rep = IdentityReport::default();
    for _ in 0..trials {
        let (f, g, h) = (vec(&mut rng), vec(&mut rng), vec(&mut rng));
        let bf = contract(&b, &f, true);
        let pair = contract(&ad, &g, false).mul(&contract(&a, &h, true));
        let fg: Complex64 = f.iter().zip(&g).map(|(x, y)| x.conj() * y).sum();
        let rhs = contract(&b, &h, true).scale(&fg);
        rep.record("[b(f),a*(g)a(h)]", deviation(&bf.commutator(&pair), &rhs));
    }
    rep
}
