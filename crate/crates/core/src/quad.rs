//! Gauss–Legendre panel quadrature.

use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Cached rule; rules are immutable once built.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static CACHE: OnceLock<Mutex<Vec<(usize, &'static GaussLegendre)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        if let Some((_, rule)) = guard.iter().find(|(m, _)| *m == n) {
            return rule;
        }
        let rule: &'static GaussLegendre = Box::leak(Box::new(GaussLegendre::new(n)));
        guard.push((n, rule));
        rule
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite rule: `[a, b]` split into equal panels, each with an
/// `order`-point Gauss–Legendre rule.
#[derive(Debug, Clone, Copy)]
pub struct Panels {
    pub a: f64,
    pub b: f64,
    pub panels: usize,
    pub order: usize,
}

impl Panels {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        Self { a, b, panels: panels.max(1), order }
    }

    /// Panels no wider than `width`.
    pub fn with_width(a: f64, b: f64, width: f64, order: usize) -> Self {
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        Self::new(a, b, panels, order)
    }

    pub fn refined(&self) -> Self {
        Self { panels: self.panels * 2, ..*self }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let rule = GaussLegendre::cached(self.order);
        let h = (self.b - self.a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.panels * self.order);
        for i in 0..self.panels {
            let lo = self.a + h * i as f64;
            out.extend(rule.mapped(lo, lo + h));
        }
        out
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let rule = GaussLegendre::cached(self.order);
        let h = (self.b - self.a) / self.panels as f64;
        let mut total = 0.0;
        for i in 0..self.panels {
            let lo = self.a + h * i as f64;
            let mut panel = 0.0;
            for (x, w) in rule.mapped(lo, lo + h) {
                panel += w * f(x);
            }
            total += panel;
        }
        total
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        let rule = GaussLegendre::cached(self.order);
        let h = (self.b - self.a) / self.panels as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.panels {
            let lo = self.a + h * i as f64;
            let mut panel = Complex64::new(0.0, 0.0);
            for (x, w) in rule.mapped(lo, lo + h) {
                panel += f(x) * w;
            }
            total += panel;
        }
        total
    }
}
