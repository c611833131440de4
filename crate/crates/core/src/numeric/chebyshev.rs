//! Barycentric interpolation at Chebyshev points of the second kind.

/// Interpolant of a smooth function on [lo, hi].
#[derive(Debug, Clone)]
pub struct Chebyshev {
    pub lo: f64,
    pub hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

fn nodes_and_weights(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let x = (std::f64::consts::PI * j as f64 / n as f64).cos();
        nodes.push(0.5 * (hi + lo) + 0.5 * (hi - lo) * x);
        let w = if j % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(if j == 0 || j == n { 0.5 * w } else { w });
    }
    (nodes, weights)
}

impl Chebyshev {
    /// Interpolates `f` at n + 1 points.
    pub fn new<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize) -> Self {
        let (nodes, weights) = nodes_and_weights(lo, hi, n.max(1));
        let values = nodes.iter().map(|&x| f(x)).collect();
        Chebyshev { lo, hi, nodes, values, weights }
    }

    /// Interpolant from values already computed at `Chebyshev::points`.
    pub fn from_values(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        let (nodes, weights) = nodes_and_weights(lo, hi, values.len() - 1);
        Chebyshev { lo, hi, nodes, values, weights }
    }

    pub fn points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        nodes_and_weights(lo, hi, n).0
    }

    /// Doubles the degree from `n0` until the interpolant reproduces `f` at
    /// the new points to `tol` relative to its maximum, or `n_max` is hit.
    pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n0: usize, n_max: usize, tol: f64) -> Self {
        let mut n = n0.max(2);
        let mut cur = Chebyshev::new(&mut f, lo, hi, n);
        while n < n_max {
            // degree 2n reuses every node of degree n
            let mut values = vec![0.0; 2 * n + 1];
            let mut err: f64 = 0.0;
            let mut peak: f64 = 0.0;
            for j in 0..=2 * n {
                if j % 2 == 0 {
                    values[j] = cur.values[j / 2];
                } else {
                    let x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * (std::f64::consts::PI * j as f64 / (2 * n) as f64).cos();
                    values[j] = f(x);
                    err = err.max((values[j] - cur.eval(x)).abs());
                }
                peak = peak.max(values[j].abs());
            }
            let done = err <= tol * peak;
            cur = Chebyshev::from_values(lo, hi, values);
            n *= 2;
            if done {
                break;
            }
        }
        cur
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.nodes.len() {
            let dx = x - self.nodes[j];
            if dx == 0.0 {
                return self.values[j];
            }
            let w = self.weights[j] / dx;
            num += w * self.values[j];
            den += w;
        }
        num / den
    }
}

/// Chebyshev pieces on a partition of [lo, hi], each accurate relative to
/// the local size of the function.
#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev {
    pub lo: f64,
    pub hi: f64,
    pieces: Vec<Chebyshev>,
}

impl PiecewiseChebyshev {
    /// Bisects [lo, hi] until a degree-`degree` interpolant on each piece
    /// matches `f` at the interleaved points to `tol` relative to the piece
    /// maximum, or the piece is shorter than (hi − lo)·2^{−max_depth}.
    pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, degree: usize, tol: f64, max_depth: u32) -> Self {
        let mut pieces = Vec::new();
        let mut stack = vec![(lo, hi, 0u32)];
        while let Some((a, b, depth)) = stack.pop() {
            let piece = Chebyshev::new(&mut f, a, b, degree);
            let mut err: f64 = 0.0;
            let mut peak = piece.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for j in 0..degree {
                let x = 0.5 * (b + a) + 0.5 * (b - a) * (std::f64::consts::PI * (j as f64 + 0.5) / degree as f64).cos();
                let v = f(x);
                peak = peak.max(v.abs());
                err = err.max((v - piece.eval(x)).abs());
            }
            if err <= tol * peak || depth >= max_depth {
                pieces.push(piece);
            } else {
                let m = 0.5 * (a + b);
                // push right first so pieces come out left to right
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        PiecewiseChebyshev { lo, hi, pieces }
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.pieces.partition_point(|p| p.hi < x).min(self.pieces.len() - 1);
        self.pieces[k].eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let c = Chebyshev::new(|x: f64| (3.0 * x).sin() * x.exp(), -1.0, 2.0, 40);
        for k in 0..50 {
            let x = -1.0 + 3.0 * k as f64 / 49.0 + 1e-3;
            let x = x.min(2.0);
            assert!((c.eval(x) - (3.0 * x).sin() * x.exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn piecewise_tracks_wide_dynamic_range() {
        let f = |x: f64| (-x * x).exp() * (5.0 * x).cos();
        let p = PiecewiseChebyshev::adaptive(f, 0.0, 8.0, 24, 1e-13, 12);
        // accuracy is relative to the largest value on the piece, and no piece
        // here is longer than 1
        let widest = (0..p.pieces()).map(|k| p.pieces[k].hi - p.pieces[k].lo).fold(0.0, f64::max);
        assert!(widest <= 1.0);
        for k in 0..200 {
            let x = 8.0 * k as f64 / 199.0;
            let near = (x - widest).max(0.0);
            let scale = (-near * near).exp();
            assert!((p.eval(x) - f(x)).abs() <= 1e-11 * scale, "x = {x}");
        }
        assert!(p.pieces() > 4);
    }

    #[test]
    fn adaptive_stops_when_resolved() {
        let c = Chebyshev::adaptive(|x: f64| (20.0 * x).cos(), 0.0, 1.0, 8, 1024, 1e-13);
        assert!(c.degree() <= 128);
        assert!((c.eval(0.37) - (7.4f64).cos()).abs() < 1e-12);
    }
}
