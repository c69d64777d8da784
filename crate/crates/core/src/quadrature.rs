//! Gauss–Jacobi quadrature via the Golub–Welsch eigenvalue method.
//!
//! A rule with `q` nodes integrates `(1-x)^a (1+x)^b p(x)` exactly on `[-1, 1]`
//! for every polynomial `p` of degree `< 2q`. Gauss–Legendre is the case
//! `a = b = 0`.

use crate::error::{Error, Result};
use crate::kernel::gamma_fn;

/// Nodes and weights of a Gaussian rule, sorted by increasing node.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gauss–Legendre rule with `q` nodes on `[-1, 1]`.
    pub fn legendre(q: usize) -> Result<Self> {
        Self::jacobi(q, 0.0, 0.0)
    }

    /// Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
    pub fn jacobi(q: usize, a: f64, b: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("quadrature needs at least one node".into()));
        }
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1, got a = {a}, b = {b}"
            )));
        }
        let ab = a + b;
        let mut diag = vec![0.0; q];
        let mut off = vec![0.0; q];
        diag[0] = (b - a) / (ab + 2.0);
        for k in 1..q {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            diag[k] = if s.abs() < f64::EPSILON || (b * b - a * a) == 0.0 {
                0.0
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            let beta = 4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0));
            off[k] = beta.sqrt();
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma_fn(a + 1.0)? * gamma_fn(b + 1.0)? / gamma_fn(ab + 2.0)?;

        let first = symmetric_tridiagonal_eigen(&mut diag, &mut off)?;
        let mut pairs: Vec<(f64, f64)> = diag
            .iter()
            .zip(&first)
            .map(|(&x, &v)| (x, mu0 * v * v))
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights })
    }

    /// Maps the rule onto `[lo, hi]`; meaningful for the Legendre weight only.
    pub fn on_interval(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        (
            self.nodes.iter().map(|x| mid + half * x).collect(),
            self.weights.iter().map(|w| half * w).collect(),
        )
    }

    /// Rule for `∫_0^1 (1-u)^a u^b f(u) du`, given the rule built by `jacobi(q, a, b)`.
    pub fn on_unit_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let scale = 2f64.powf(-(a + b + 1.0));
        (
            self.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
            self.weights.iter().map(|w| w * scale).collect(),
        )
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// On return `diag` holds the eigenvalues; the returned vector holds the first
/// component of each normalized eigenvector. `off[k]` couples rows `k-1` and `k`;
/// `off[0]` is ignored.
fn symmetric_tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    if n == 1 {
        return Ok(first);
    }
    // shift so that e[i] couples i and i+1
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[1..n]);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Quadrature {
                    change: e[l].abs(),
                    tol: f64::EPSILON,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_rules() {
        let r = GaussRule::legendre(1).unwrap();
        assert!((r.nodes[0]).abs() < 1e-14);
        assert!((r.weights[0] - 2.0).abs() < 1e-14);

        let r = GaussRule::legendre(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-14 && (r.nodes[1] - x).abs() < 1e-14);
        assert!((r.weights[0] - 1.0).abs() < 1e-14);

        let r = GaussRule::legendre(3).unwrap();
        let x = (0.6f64).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-14);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_exact_on_monomials() {
        for q in [4, 9, 24, 64] {
            let r = GaussRule::legendre(q).unwrap();
            for p in 0..(2 * q) {
                let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "q = {q}, p = {p}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_unit_interval_moments() {
        // ∫_0^1 (1-u)^a u^b u^p du = B(a+1, b+p+1)
        for (a, b) in [(0.5, 0.0), (0.0, 1.5), (0.25, 1.25), (0.75, 0.0)] {
            let q = 12;
            let rule = GaussRule::jacobi(q, a, b).unwrap();
            let (u, w) = rule.on_unit_interval(a, b);
            for p in 0..(2 * q) {
                let got: f64 = u.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let bp = b + p as f64;
                let exact = gamma_fn(a + 1.0).unwrap() * gamma_fn(bp + 1.0).unwrap()
                    / gamma_fn(a + bp + 2.0).unwrap();
                assert!(((got - exact) / exact).abs() < 1e-12, "a={a} b={b} p={p}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GaussRule::legendre(0).is_err());
        assert!(GaussRule::jacobi(3, -1.0, 0.0).is_err());
    }

    #[test]
    fn mapped_interval_integrates_cubic() {
        let r = GaussRule::legendre(2).unwrap();
        let (x, w) = r.on_interval(1.0, 3.0);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x * x).sum();
        assert!((got - 20.0).abs() < 1e-13);
    }
}
