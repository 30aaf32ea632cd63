//! Composite Gauss–Legendre rules.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// A fixed-degree Gauss–Legendre rule applied on equal panels.
pub struct Composite {
    rule: GaussLegendre,
    panels: usize,
}

impl Composite {
    pub fn new(degree: usize, panels: usize) -> Self {
        let degree = NonZeroUsize::new(degree.max(1)).expect("degree ≥ 1");
        Self { rule: GaussLegendre::new(degree), panels: panels.max(1) }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let width = (b - a) / self.panels as f64;
        (0..self.panels)
            .map(|k| {
                let lo = a + k as f64 * width;
                let hi = if k + 1 == self.panels { b } else { lo + width };
                self.rule.integrate(lo, hi, &mut f)
            })
            .sum()
    }

    /// Nodes and weights of the composite rule on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let width = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.panels * self.rule.degree());
        for k in 0..self.panels {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == self.panels { b } else { lo + width };
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for &(x, w) in self.rule.as_node_weight_pairs() {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }
}
