use num_complex::Complex64;

use crate::quad::GaussLegendre;
use crate::{Error, Result};

const ORDER: usize = 16;

/// Quadrature nodes for `(1 / 2 pi i) int_{(A)} F(y) x^{-y} dy` when
/// `F(conj y) = conj F(y)`, so that only `Im y >= 0` is stored and the
/// value for real `x > 0` is `(1/pi) Re sum w_j F(y_j) x^{-y_j}`.
#[derive(Debug, Clone)]
pub struct ContourKernel {
    pub abscissa: f64,
    pub panel_width: f64,
    pub t_max: f64,
    nodes: Vec<(Complex64, Complex64)>,
}

impl ContourKernel {
    /// Panels are added until the integrand has stayed below `rel_tol`
    /// times its running peak for a stretch of 5 units of `Im y`.
    pub fn build(
        abscissa: f64,
        panel_width: f64,
        rel_tol: f64,
        mut f: impl FnMut(Complex64) -> Result<Complex64>,
    ) -> Result<Self> {
        let gl = GaussLegendre::cached(ORDER);
        let mut nodes = Vec::new();
        let mut peak = 0.0f64;
        let mut quiet = 0.0;
        let mut a = 0.0;
        while quiet < 5.0 {
            let mut local = 0.0f64;
            for (t, w) in gl.mapped(a, a + panel_width) {
                let y = Complex64::new(abscissa, t);
                let v = f(y)?;
                local = local.max(v.norm());
                nodes.push((y, v * w));
            }
            peak = peak.max(local);
            quiet = if local <= rel_tol * peak { quiet + panel_width } else { 0.0 };
            a += panel_width;
            if a > 2000.0 {
                return Err(Error::NonConvergence { what: "contour truncation", change: local / peak });
            }
        }
        Ok(ContourKernel { abscissa, panel_width, t_max: a, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let lx = x.ln();
        let mut acc = 0.0;
        for &(y, wf) in &self.nodes {
            acc += (wf * (-y * lx).exp()).re;
        }
        acc / std::f64::consts::PI
    }

    /// `int |F(A + it)| dt / (2 pi)` over the whole line, an upper bound for
    /// `|value| * x^A`.
    pub fn envelope(&self) -> f64 {
        self.nodes.iter().map(|(_, wf)| wf.norm()).sum::<f64>() / std::f64::consts::PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mellin_of_gamma() {
        // (1/2 pi i) int Gamma(y) x^{-y} dy = e^{-x}
        let k = ContourKernel::build(1.0, 0.25, 1e-17, |y| crate::specfun::ln_gamma(y).map(|l| l.exp())).unwrap();
        for x in [0.1, 1.0, 3.0, 10.0] {
            assert!((k.eval(x) - (-x as f64).exp()).abs() < 1e-12, "x = {x}");
        }
    }
}
