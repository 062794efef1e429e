use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    /// Integral of `f` over `[a, b]`.
    #[inline]
    pub fn apply<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 16-point rule.
pub fn gauss_legendre() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(16))
}

/// Composite Simpson on a uniform grid with an even number of intervals.
/// An odd interval count gets a 3/8 rule on the last three intervals.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (y[0] + y[1]);
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals.is_multiple_of(2) {
        (n - 1, 0.0)
    } else if intervals >= 3 {
        let k = n - 4;
        (
            k,
            3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]),
        )
    } else {
        return 0.5 * h * (y[0] + 2.0 * y[1] + y[2]);
    };
    let mut s = y[0] + y[even_end];
    for i in 1..even_end {
        s += if i % 2 == 1 { 4.0 * y[i] } else { 2.0 * y[i] };
    }
    s * h / 3.0 + tail
}

/// Gauss-Legendre over consecutive breakpoints, splitting each piece into
/// panels no wider than `max_width`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(breaks: &[f64], max_width: f64, mut f: F) -> f64 {
    let rule = gauss_legendre();
    let mut s = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / m as f64;
        for j in 0..m {
            let lo = a + j as f64 * h;
            s += rule.apply(lo, lo + h, &mut f);
        }
    }
    s
}

/// Adaptive bisection with the 16-point rule; `tol` is absolute.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: &mut F) -> f64 {
    let rule = gauss_legendre();
    let whole = rule.apply(a, b, &mut *f);
    adaptive_rec(a, b, whole, tol, 40, f, rule)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    f: &mut F,
    rule: &GaussRule,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.apply(a, m, &mut *f);
    let right = rule.apply(m, b, &mut *f);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive_rec(a, m, left, 0.5 * tol, depth - 1, f, rule)
        + adaptive_rec(m, b, right, 0.5 * tol, depth - 1, f, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_polynomials() {
        let r = GaussRule::new(8);
        let v = r.apply(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_odd_and_even() {
        for n in [9usize, 10, 11, 64] {
            let h = 1.0 / (n - 1) as f64;
            let y: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson(&y, h) - 0.25).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_kink() {
        let v = adaptive(-1.0, 2.0, 1e-12, &mut |x: f64| x.abs());
        assert!((v - 2.5).abs() < 1e-10);
    }
}
