use crate::potentials::InteractionPotential;

/// RK4 samples of `u'' = (V/2 − λ)u`, `u(0) = 0`, `u'(0) = 1` on `[0, R]`.
#[derive(Debug, Clone)]
pub(crate) struct Shot {
    pub h: f64,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl Shot {
    pub fn end(&self) -> (f64, f64) {
        (*self.u.last().unwrap(), *self.du.last().unwrap())
    }
}

pub(crate) fn shoot(v: &InteractionPotential, lambda: f64, steps: usize) -> Shot {
    let r_end = v.support_radius;
    let h = r_end / steps as f64;
    let c = |r: f64| 0.5 * v.value(r.min(r_end)) - lambda;
    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    let (mut y, mut z) = (0.0f64, 1.0f64);
    u.push(y);
    du.push(z);
    for i in 0..steps {
        let r = i as f64 * h;
        let (c0, c1, c2) = (c(r), c(r + 0.5 * h), c(r + h));
        let k1y = z;
        let k1z = c0 * y;
        let k2y = z + 0.5 * h * k1z;
        let k2z = c1 * (y + 0.5 * h * k1y);
        let k3y = z + 0.5 * h * k2z;
        let k3z = c1 * (y + 0.5 * h * k2y);
        let k4y = z + h * k3z;
        let k4z = c2 * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        u.push(y);
        du.push(z);
    }
    Shot { h, u, du }
}
