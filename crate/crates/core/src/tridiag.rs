//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! Sturm-sequence bisection pins the eigenvalue to rounding, then inverse
//! iteration with a partially pivoted tridiagonal solve recovers the
//! vector. Both steps are O(m) per iteration.

/// Symmetric tridiagonal matrix: `diag[k]` and `off[k]` couples `k, k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length mismatch");
        SymTridiagonal { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for k in 0..self.dim() {
            let e2 = if k == 0 { 0.0 } else { self.off[k - 1] * self.off[k - 1] };
            d = self.diag[k] - x - if k == 0 { 0.0 } else { e2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.scale() + x.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn scale(&self) -> f64 {
        self.diag.iter().chain(self.off.iter()).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)
    }

    fn gershgorin(&self) -> (f64, f64) {
        let m = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..m {
            let r = if k > 0 { self.off[k - 1].abs() } else { 0.0 } + if k + 1 < m { self.off[k].abs() } else { 0.0 };
            lo = lo.min(self.diag[k] - r);
            hi = hi.max(self.diag[k] + r);
        }
        (lo, hi)
    }

    /// Lowest eigenvalue by bisection.
    pub fn lowest_eigenvalue(&self) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (self.scale() + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut y = self.diag[k] * x[k];
                if k > 0 {
                    y += self.off[k - 1] * x[k - 1];
                }
                if k + 1 < m {
                    y += self.off[k] * x[k + 1];
                }
                y
            })
            .collect()
    }

    /// Solves `(T - σ) x = rhs` by Gaussian elimination with partial
    /// pivoting; exact zero pivots are nudged so that inverse iteration
    /// at an exact eigenvalue still produces a direction.
    fn shifted_solve(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let tiny = f64::EPSILON * (self.scale() + sigma.abs());
        // Upper factor rows hold (u0, u1, u2) for columns (k, k+1, k+2).
        let mut u0 = vec![0.0; m];
        let mut u1 = vec![0.0; m];
        let mut u2 = vec![0.0; m];
        let mut b = rhs.to_vec();
        let mut cur = (self.diag[0] - sigma, if m > 1 { self.off[0] } else { 0.0 }, 0.0);
        for k in 0..m {
            if k + 1 < m {
                let below = (self.off[k], self.diag[k + 1] - sigma, if k + 2 < m { self.off[k + 1] } else { 0.0 });
                if below.0.abs() > cur.0.abs() {
                    // Swap rows k and k+1.
                    let pivot_row = below;
                    let other = cur;
                    let f = other.0 / pivot_row.0;
                    u0[k] = pivot_row.0;
                    u1[k] = pivot_row.1;
                    u2[k] = pivot_row.2;
                    b.swap(k, k + 1);
                    let bk = b[k];
                    cur = (other.1 - f * pivot_row.1, other.2 - f * pivot_row.2, 0.0);
                    b[k + 1] -= f * bk;
                } else {
                    let piv = if cur.0 == 0.0 { tiny } else { cur.0 };
                    let f = below.0 / piv;
                    u0[k] = piv;
                    u1[k] = cur.1;
                    u2[k] = cur.2;
                    let bk = b[k];
                    cur = (below.1 - f * cur.1, below.2 - f * cur.2, 0.0);
                    b[k + 1] -= f * bk;
                }
            } else {
                u0[k] = if cur.0 == 0.0 { tiny } else { cur.0 };
                u1[k] = 0.0;
                u2[k] = 0.0;
            }
        }
        let mut x = vec![0.0; m];
        for k in (0..m).rev() {
            let mut s = b[k];
            if k + 1 < m {
                s -= u1[k] * x[k + 1];
            }
            if k + 2 < m {
                s -= u2[k] * x[k + 2];
            }
            x[k] = s / u0[k];
        }
        x
    }

    /// Lowest eigenpair `(λ, v)` with `‖v‖ = 1` and the first non-negligible
    /// component positive. `λ` is the Rayleigh quotient of `v`.
    pub fn lowest_eigenpair(&self) -> (f64, Vec<f64>) {
        let m = self.dim();
        if m == 1 {
            return (self.diag[0], vec![1.0]);
        }
        let lambda = self.lowest_eigenvalue();
        let mut v: Vec<f64> = (0..m).map(|k| 1.0 + 0.01 * ((k * 7919) % 13) as f64).collect();
        normalize(&mut v);
        for _ in 0..4 {
            let mut w = self.shifted_solve(lambda, &v);
            if w.iter().any(|x| !x.is_finite()) {
                break;
            }
            normalize(&mut w);
            v = w;
        }
        let pivot = v.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * pivot) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let tv = self.matvec(&v);
        let rq = v.iter().zip(&tv).map(|(a, b)| a * b).sum();
        (rq, v)
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}
