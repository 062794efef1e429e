use std::sync::Arc;

use super::ladder::{ladders, number_op, IdentityReport};
use super::operator::{deviation, FockOperator};
use super::scalar::Scalar;
use super::space::FockSpace;
use crate::error::{invalid, Result};

/// `Γ(q)` for `q = 1 − |φ⟩⟨φ|`, `φ = mode0`: the projection onto states
/// with `n_{mode0} = 0`.
pub fn gamma_q<S: Scalar>(space: &Arc<FockSpace>, mode0: usize) -> FockOperator<S> {
    FockOperator::diagonal(space, |i| {
        if space.state(i)[mode0] == 0 {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// `U_N` as a partial isometry on `F^{≤N}`: the state with `N − k` particles
/// in `mode0` and excitations `n_⊥` goes to the excitation vector `n_⊥`.
pub fn build_un<S: Scalar>(space: &Arc<FockSpace>, mode0: usize) -> Result<FockOperator<S>> {
    if mode0 >= space.modes {
        return Err(invalid(format!("mode0 {mode0} out of range")));
    }
    let entries = space.sector(space.n_cap).into_iter().map(|col| {
        let mut occ = space.state(col).to_vec();
        occ[mode0] = 0;
        (space.index_of(&occ).unwrap(), col, S::one())
    });
    Ok(FockOperator::from_entries(space, entries))
}

/// Unitarity of `U_N` and the four conjugation relations for `f, g ⊥ φ`.
pub fn verify_un<S: Scalar>(space: &Arc<FockSpace>, mode0: usize) -> Result<IdentityReport> {
    let u = build_un::<S>(space, mode0)?;
    let ud = u.adjoint();
    let l = ladders::<S>(space);
    let q = gamma_q::<S>(space, mode0);
    let sector = FockOperator::diagonal(space, |i| {
        if space.total(i) == space.n_cap {
            S::one()
        } else {
            S::zero()
        }
    });
    let n = space.n_cap as u64;
    let n_op = number_op::<S>(space);
    let conj = |x: &FockOperator<S>| u.mul(x).mul(&ud);
    let mut rep = IdentityReport::default();
    rep.record("U*U = 1 on sector", deviation(&ud.mul(&u), &sector));
    rep.record("UU* = Γ(q)", deviation(&u.mul(&ud), &q));
    // U a*(φ)a(φ) U* = N − 𝒩
    let n_minus = FockOperator::identity(space)
        .scale(&S::from_int(n as i64))
        .sub(&n_op);
    let lhs = conj(&l[mode0].a_dag.mul(&l[mode0].a));
    rep.record(
        "U a*(φ)a(φ) U* = N − 𝒩",
        deviation(&lhs, &q.mul(&n_minus).mul(&q)),
    );
    let sqrt_n = S::sqrt_ratio(n, 1);
    let sqrt_n_minus = FockOperator::diagonal(space, |i| {
        S::sqrt_ratio((space.n_cap - space.total(i).min(space.n_cap)) as u64, 1)
    });
    for f in (0..space.modes).filter(|&f| f != mode0) {
        let lhs = conj(&l[f].a_dag.mul(&l[mode0].a));
        let rhs = q.mul(&l[f].b_dag.scale(&sqrt_n)).mul(&q);
        rep.record("U a*(f)a(φ) U* = √N b*(f)", deviation(&lhs, &rhs));
        let alt = q.mul(&l[f].a_dag.mul(&sqrt_n_minus)).mul(&q);
        rep.record("√N b*(f) = a*(f)√(N−𝒩)", deviation(&rhs, &alt));
        let lhs = conj(&l[mode0].a_dag.mul(&l[f].a));
        let rhs = q.mul(&l[f].b.scale(&sqrt_n)).mul(&q);
        rep.record("U a*(φ)a(g) U* = √N b(g)", deviation(&lhs, &rhs));
        for g in (0..space.modes).filter(|&g| g != mode0) {
            let pair = l[f].a_dag.mul(&l[g].a);
            rep.record(
                "U a*(f)a(g) U* = a*(f)a(g)",
                deviation(&conj(&pair), &q.mul(&pair).mul(&q)),
            );
        }
    }
    // Γ(q) is a projection commuting with 𝒩
    rep.record("Γ(q)² = Γ(q)", deviation(&q.mul(&q), &q));
    rep.record("[Γ(q),𝒩] = 0", q.commutator(&n_op).max_abs());
    // U_N φ^{⊗N} = Ω
    let mut cond = vec![0u8; space.modes];
    cond[mode0] = space.n_cap as u8;
    let col = space.index_of(&cond).unwrap();
    rep.record("U φ^N = Ω", (u.get(0, col) - S::one()).magnitude());
    Ok(rep)
}
