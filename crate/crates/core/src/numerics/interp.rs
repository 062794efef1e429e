/// Index `i` with `grid[i] <= x < grid[i+1]`, clamped to the interior.
pub fn locate(grid: &[f64], x: f64) -> usize {
    let n = grid.len();
    if x <= grid[0] {
        return 0;
    }
    if x >= grid[n - 1] {
        return n - 2;
    }
    match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

/// Four-point Lagrange interpolation; exact for cubics, fourth order on
/// smooth data.
pub fn interp_cubic(grid: &[f64], y: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if n < 4 {
        let i = locate(grid, x);
        let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
        return y[i] * (1.0 - t) + y[i + 1] * t;
    }
    let i = locate(grid, x);
    let s = i.saturating_sub(1).min(n - 4);
    let xs = &grid[s..s + 4];
    let ys = &y[s..s + 4];
    let mut v = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != j {
                l *= (x - xs[k]) / (xs[j] - xs[k]);
            }
        }
        v += l * ys[j];
    }
    v
}

/// Four-point Lagrange interpolation on the uniform grid `i h`.
pub fn uniform_cubic(y: &[f64], h: f64, r: f64) -> f64 {
    let x = r / h;
    let n = y.len();
    let i = (x.floor() as usize).max(1).min(n - 3);
    let t = x - i as f64;
    if t == 0.0 {
        return y[i];
    }
    let (y0, y1, y2, y3) = (y[i - 1], y[i], y[i + 1], y[i + 2]);
    -t * (t - 1.0) * (t - 2.0) / 6.0 * y0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * y1
        - (t + 1.0) * t * (t - 2.0) / 2.0 * y2
        + (t + 1.0) * t * (t - 1.0) / 6.0 * y3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact() {
        let g: Vec<f64> = (0..10).map(|i| (i as f64).powf(1.3)).collect();
        let y: Vec<f64> = g.iter().map(|x| x * x * x - 2.0 * x).collect();
        for x in [0.0, 0.7, 3.3, 15.0, 19.0] {
            assert!((interp_cubic(&g, &y, x) - (x * x * x - 2.0 * x)).abs() < 1e-9);
        }
    }
}
