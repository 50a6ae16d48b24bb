//! Gauss–Legendre and Gauss–Laguerre rules, nodes found by Newton iteration
//! on the three-term recurrences.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const MAX_NEWTON: usize = 100;

/// Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..MAX_NEWTON {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Laguerre rule for `∫₀^∞ e^{-x} f(x) dx`.
pub fn gauss_laguerre(n: usize) -> Rule {
    assert!(n > 0, "rule needs at least one node");
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n {
        // initial guesses from the asymptotic node spacing
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut pprev = 0.0;
        for _ in 0..MAX_NEWTON {
            let (p, pm1) = laguerre_pair(n, z);
            let dp = nf * (p - pm1) / z;
            let dz = p / dp;
            z -= dz;
            pprev = pm1;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                pprev = laguerre_pair(n, z).1;
                break;
            }
        }
        nodes[i] = z;
        // w = x / ((n+1)² L_{n+1}(x)²) = x / (n² L_{n-1}(x)²)
        weights[i] = z / (nf * nf * pprev * pprev);
    }
    Rule { nodes, weights }
}

/// `(Lₙ(x), Lₙ₋₁(x))`.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (0.0, 1.0);
    for k in 1..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0 - x) * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}
