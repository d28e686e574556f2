//! Gauss-Legendre rules and composite integration on panels.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with one application of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule: `panels` equal panels on each interval between
    /// consecutive `breaks`.
    pub fn composite<F: FnMut(f64) -> f64>(&self, breaks: &[f64], panels: usize, mut f: F) -> f64 {
        let mut total = 0.0;
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b <= a {
                continue;
            }
            let width = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + width * k as f64;
                total += self.integrate(lo, lo + width, &mut f);
            }
        }
        total
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Result of [`integrate_refined`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    /// Panels per segment at acceptance.
    pub panels: usize,
    pub converged: bool,
}

/// Composite 10-point Gauss-Legendre with panel doubling until two successive
/// estimates agree to `rel_tol` (relative, with an absolute floor `abs_tol`).
pub fn integrate_refined<F: Fn(f64) -> f64>(
    breaks: &[f64],
    start_panels: usize,
    max_panels: usize,
    rel_tol: f64,
    abs_tol: f64,
    f: F,
) -> Refined {
    let rule = GaussLegendre::new(10);
    let mut panels = start_panels.max(1);
    let mut prev = rule.composite(breaks, panels, &f);
    loop {
        let next_panels = panels * 2;
        let next = rule.composite(breaks, next_panels, &f);
        let diff = (next - prev).abs();
        if diff <= rel_tol * next.abs() || diff <= abs_tol {
            return Refined { value: next, panels: next_panels, converged: true };
        }
        if next_panels >= max_panels {
            return Refined { value: next, panels: next_panels, converged: false };
        }
        prev = next;
        panels = next_panels;
    }
}

/// Evaluates a fixed composite rule at a known panel count (used when
/// re-checking a stored result at its recorded resolution).
pub fn integrate_fixed<F: Fn(f64) -> f64>(breaks: &[f64], panels: usize, f: F) -> f64 {
    GaussLegendre::new(10).composite(breaks, panels, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(5);
        // degree 9 is the maximum exact degree for 5 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn refined_integral_of_gaussian() {
        let r = integrate_refined(&[-8.0, 8.0], 4, 1 << 12, 1e-14, 0.0, |x| (-x * x).exp());
        assert!(r.converged);
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
    }
}
