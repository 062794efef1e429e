//! Zero-energy scattering and the Neumann ball problem.
//!
//! Everything is solved for `u = r·f` on `[0, R]` (the support of `V`) with a
//! fixed-step RK4 integrator. Outside the support the solutions are known in
//! closed form, so the ball radius `Nℓ` can be very large at no cost.

mod lemma;
mod neumann;
mod shoot;
mod zero;

pub use lemma::{verify_lemma_scattering, LemmaReport};
pub use neumann::{
    fourier_w, rescale, solve_neumann, FourierSamples, NeumannSolution, RescaledScattering,
};
pub use zero::{solve_zero_energy, ScatteringSolution};
