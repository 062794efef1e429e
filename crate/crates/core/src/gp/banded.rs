/// Symmetric pentadiagonal matrix: diagonal `d`, first and second
/// off-diagonals `e`, `f`.
#[derive(Debug, Clone)]
pub(crate) struct Penta {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
}

impl Penta {
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.d[i] * x[i];
            if i >= 1 {
                s += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.e[i] * x[i + 1];
            }
            if i >= 2 {
                s += self.f[i - 2] * x[i - 2];
            }
            if i + 2 < n {
                s += self.f[i] * x[i + 2];
            }
            y[i] = s;
        }
        y
    }

    /// Solve `A x = b` by LDLᵀ; `None` if a pivot is not positive.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = b.len();
        // L has unit diagonal with sub-diagonals l1, l2.
        let mut dd = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            let mut di = self.d[i];
            if i >= 2 {
                l2[i] = self.f[i - 2] / dd[i - 2];
            }
            if i >= 1 {
                let mut a = self.e[i - 1];
                if i >= 2 {
                    a -= l2[i] * dd[i - 2] * l1[i - 1];
                }
                l1[i] = a / dd[i - 1];
                di -= l1[i] * l1[i] * dd[i - 1];
            }
            if i >= 2 {
                di -= l2[i] * l2[i] * dd[i - 2];
            }
            if !(di > 0.0) {
                return None;
            }
            dd[i] = di;
        }
        let mut y = b.to_vec();
        for i in 0..n {
            if i >= 1 {
                y[i] -= l1[i] * y[i - 1];
            }
            if i >= 2 {
                y[i] -= l2[i] * y[i - 2];
            }
        }
        for i in 0..n {
            y[i] /= dd[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                y[i] -= l1[i + 1] * y[i + 1];
            }
            if i + 2 < n {
                y[i] -= l2[i + 2] * y[i + 2];
            }
        }
        Some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_round_trip() {
        let n = 40;
        let a = Penta {
            d: (0..n).map(|i| 6.0 + (i % 3) as f64).collect(),
            e: vec![-1.5; n - 1],
            f: vec![0.4; n - 2],
        };
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul(&x);
        let y = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
