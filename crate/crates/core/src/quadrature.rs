//! Gauss–Legendre quadrature: single rules on [-1, 1] and composite
//! integration over panels.
//!
//! Nodes and weights are computed by Newton iteration on the Legendre
//! polynomial recurrence (relative accuracy ~1e-15 for the orders used
//! here); rules are cached per order.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// A Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    /// Build the n-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be >= 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            // Tricomi-style initial guess for the k-th positive root.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
                dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    // one more polish iteration, then stop
                    let mut q0 = 1.0;
                    let mut q1 = x;
                    for j in 2..=n {
                        let jf = j as f64;
                        let q2 = ((2.0 * jf - 1.0) * x * q1 - (jf - 1.0) * q0) / jf;
                        q0 = q1;
                        q1 = q2;
                    }
                    dp = (n as f64) * (x * q1 - q0) / (x * x - 1.0);
                    x -= q1 / dp;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GlRule { nodes, weights }
    }

    /// Cached rule of order n (rules are immutable once built).
    pub fn cached(n: usize) -> &'static GlRule {
        static CACHE: OnceLock<Mutex<HashMap<usize, &'static GlRule>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("GL rule cache poisoned");
        if let Some(r) = map.get(&n) {
            return r;
        }
        let rule: &'static GlRule = Box::leak(Box::new(GlRule::new(n)));
        map.insert(n, rule);
        rule
    }

    /// Integrate f over [a, b] with this single rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let hw = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        let mut comp = 0.0; // Kahan compensation
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let term = w * f(mid + hw * x);
            let t = acc + (term + comp);
            comp = (term + comp) - (t - acc);
            acc = t;
        }
        acc * hw
    }
}

/// Composite Gauss–Legendre grid on `[a, b]`: 16-point panels, at least
/// `min_points` nodes in total.  Returns `(nodes, weights)` with weights
/// scaled to the panel widths, so `Σ w_i f(y_i)` approximates the
/// integral directly.  Useful when several integrands share one grid
/// (restriction masses, Mellin samples) or when values arrive from a
/// batched evaluator.
pub fn gl_grid(a: f64, b: f64, min_points: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GlRule::cached(16);
    let panels = min_points.div_ceil(16).max(1);
    let width = (b - a) / panels as f64;
    let mut ys = Vec::with_capacity(panels * 16);
    let mut ws = Vec::with_capacity(panels * 16);
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let mid = lo + 0.5 * width;
        let hw = 0.5 * width;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            ys.push(mid + hw * x);
            ws.push(w * hw);
        }
    }
    (ys, ws)
}

/// Composite Gauss–Legendre integration of f over [a, b] using `panels`
/// equal panels of a `points_per_panel`-point rule.
pub fn integrate_composite<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    panels: usize,
    points_per_panel: usize,
    mut f: F,
) -> f64 {
    let rule = GlRule::cached(points_per_panel);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let term = rule.integrate(lo, lo + h, &mut f);
        let t = acc + (term + comp);
        comp = (term + comp) - (t - acc);
        acc = t;
    }
    acc
}

/// Composite integration with a total node budget of ~`total_points`,
/// split into 32-point panels (the panel count is rounded up so at least
/// one panel is used).
pub fn integrate_budget<F: FnMut(f64) -> f64>(a: f64, b: f64, total_points: usize, f: F) -> f64 {
    let ppp = 32.min(total_points.max(4));
    let panels = total_points.div_ceil(ppp).max(1);
    integrate_composite(a, b, panels, ppp, f)
}
