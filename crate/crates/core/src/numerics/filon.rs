/// Filon's rule for `∫_a^{a+2nh} F(x) sin(qx) dx` from samples of `F` on a
/// uniform grid with an even number of intervals.
pub fn filon_sine(values: &[f64], a: f64, h: f64, q: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "filon needs an even interval count");
    let theta = q * h;
    let (al, be, ga) = filon_coefficients(theta);
    let b = a + (n - 1) as f64 * h;
    let mut s_even = 0.0;
    let mut s_odd = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let t = v * (q * (a + i as f64 * h)).sin();
        if i % 2 == 0 {
            s_even += t;
        } else {
            s_odd += t;
        }
    }
    s_even -= 0.5 * (values[0] * (q * a).sin() + values[n - 1] * (q * b).sin());
    h * (al * (values[0] * (q * a).cos() - values[n - 1] * (q * b).cos())
        + be * s_even
        + ga * s_odd)
}

fn filon_coefficients(t: f64) -> (f64, f64, f64) {
    if t.abs() < 0.2 {
        let t2 = t * t;
        let t3 = t2 * t;
        let al = 2.0 * t3 / 45.0 - 2.0 * t3 * t2 / 315.0 + 2.0 * t3 * t2 * t2 / 4725.0;
        let be = 2.0 / 3.0 + 2.0 * t2 / 15.0 - 4.0 * t2 * t2 / 105.0 + 2.0 * t2 * t2 * t2 / 567.0;
        let ga = 4.0 / 3.0 - 2.0 * t2 / 15.0 + t2 * t2 / 210.0 - t2 * t2 * t2 / 11340.0;
        (al, be, ga)
    } else {
        let (s, c) = t.sin_cos();
        let t2 = t * t;
        let t3 = t2 * t;
        let al = 1.0 / t + s * c / t2 - 2.0 * s * s / t3;
        let be = 2.0 * ((1.0 + c * c) / t2 - 2.0 * s * c / t3);
        let ga = 4.0 * (s / t3 - c / t2);
        (al, be, ga)
    }
}

/// Radial Fourier transform `(2/p) ∫ f(r) r sin(2πpr) dr` of samples on a
/// uniform grid starting at `r0`; `p = 0` gives `4π ∫ f r² dr`.
pub fn radial_transform_uniform(f: &[f64], r0: f64, h: f64, p: f64) -> f64 {
    let g: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(i, v)| v * (r0 + i as f64 * h))
        .collect();
    if p == 0.0 {
        let g2: Vec<f64> = g
            .iter()
            .enumerate()
            .map(|(i, v)| v * (r0 + i as f64 * h))
            .collect();
        return 4.0 * std::f64::consts::PI * super::simpson(&g2, h);
    }
    2.0 / p * filon_sine(&g, r0, h, 2.0 * std::f64::consts::PI * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_transform() {
        // e^{-π r²} is its own transform
        let h = 0.005;
        let f: Vec<f64> = (0..=2000)
            .map(|i| (-PI * (i as f64 * h).powi(2)).exp())
            .collect();
        for p in [0.0, 0.3, 1.0, 2.0, 3.0] {
            let v = radial_transform_uniform(&f, 0.0, h, p);
            assert!((v - (-PI * p * p).exp()).abs() < 1e-9, "p={p} v={v}");
        }
    }

    #[test]
    fn large_theta_is_accurate() {
        // ∫_0^1 x sin(qx) dx at q h ≫ 1, exact for linear F
        let q: f64 = 400.0;
        let h = 0.05;
        let v: Vec<f64> = (0..=20).map(|i| i as f64 * h).collect();
        let exact = (q.sin() - q * q.cos()) / (q * q);
        assert!((filon_sine(&v, 0.0, h, q) - exact).abs() < 1e-12);
    }
}
