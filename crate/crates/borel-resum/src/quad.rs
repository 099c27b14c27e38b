//! Quadrature rules for the moment integrals `I_m = ∫_0^∞ e^{-z} w(λz)^m dz`.
//!
//! Two independent routes: a fixed Gauss-Laguerre rule (weight e^{-z}
//! handled exactly) and a globally adaptive Gauss-Kronrod scheme on a
//! truncated interval with exponential tail cut. The Laguerre rule is the
//! fast default; the adaptive rule is the cross-check and the fallback
//! when the Laguerre error estimate exceeds the requested tolerance.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussLaguerre,
    AdaptiveExpTail,
}

/// Rule selection and tolerances for the moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub node_count: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: QuadRule::GaussLaguerre,
            node_count: 200,
            rel_tol: 1e-7,
            abs_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(Error::InvalidConfig(format!(
                "node_count must be >= 16, got {}",
                self.node_count
            )));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "quadrature tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Stable identifier entering the moment-cache key.
    pub fn fingerprint(&self) -> u64 {
        let rule = match self.rule {
            QuadRule::GaussLaguerre => 1u64,
            QuadRule::AdaptiveExpTail => 2u64,
        };
        // FNV-1a over the defining fields
        let mut h = 0xcbf29ce484222325u64;
        for word in [
            rule,
            self.node_count as u64,
            self.rel_tol.to_bits(),
            self.abs_tol.to_bits(),
        ] {
            for byte in word.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

/// Nodes and weights of an n-point Gauss-Laguerre rule (weight e^{-z}).
#[derive(Debug)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LaguerreRule {
    fn compute(n: usize) -> LaguerreRule {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n {
            // Stroud-Secrest style initial guesses, then Newton
            if i == 0 {
                z = 3.0 / (1.0 + 2.4 * nf);
            } else if i == 1 {
                z += 15.0 / (1.0 + 2.5 * nf);
            } else {
                let ai = i as f64 - 1.0;
                z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
            }
            let mut p2s = 0.0;
            let mut pps = 0.0;
            for _ in 0..100 {
                // recurrence on the scaled functions L_j(z) e^{-z/2};
                // the scaling cancels in the Newton ratio and keeps the
                // weight computation inside f64 range for large n
                let mut p1s = (-0.5 * z).exp();
                p2s = 0.0;
                for j in 1..=n {
                    let p3s = p2s;
                    p2s = p1s;
                    p1s = (((2 * j - 1) as f64 - z) * p2s - (j - 1) as f64 * p3s) / j as f64;
                }
                pps = nf * (p1s - p2s) / z;
                let z1 = z;
                z = z1 - p1s / pps;
                if (z - z1).abs() <= 1e-15 * z.abs() {
                    break;
                }
            }
            nodes[i] = z;
            weights[i] = -(-z).exp() / (pps * nf * p2s);
        }
        LaguerreRule { nodes, weights }
    }

    /// ∫_0^∞ e^{-z} f(z) dz by the fixed rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Shared rule instances, keyed by node count.
pub fn laguerre_rule(n: usize) -> Arc<LaguerreRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LaguerreRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("laguerre rule cache poisoned");
    map.entry(n)
        .or_insert_with(|| Arc::new(LaguerreRule::compute(n)))
        .clone()
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let fsum = f(c - x) + f(c + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= h;
    gauss *= h;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss-Kronrod integration of `f` on `[a, b]`.
///
/// Returns the value and an error estimate; errs if the tolerance cannot
/// be met within the panel budget.
pub fn adaptive_integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    const MAX_PANELS: usize = 2000;
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v,
        error: e,
    }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let tol = rel_tol * total.abs() + abs_tol;
        if err <= tol {
            return Ok((total, err));
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                residual: err,
                tolerance: tol,
            });
        }
        // split the worst panel
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (v, e) = gk15(&f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
    }
}

/// Tail cut for the adaptive route on the moment integrals: beyond
/// z = 50 + 10m the integrand is below e^{-50} of its scale.
pub fn moment_tail_cut(m: usize) -> f64 {
    50.0 + 10.0 * m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1; moments of e^{-z} are k!
        let rule = laguerre_rule(20);
        let mut fact = 1.0;
        for k in 1..=10u32 {
            fact *= k as f64;
            let val = rule.integrate(|z| z.powi(k as i32));
            assert_relative_eq!(val, fact, max_relative = 1e-12);
        }
    }

    #[test]
    fn laguerre_weights_sum_to_one() {
        for &n in &[16, 100, 200] {
            let rule = laguerre_rule(n);
            let sum: f64 = rule.weights.iter().sum();
            assert_relative_eq!(sum, 1.0, max_relative = 1e-11);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn laguerre_200_against_adaptive() {
        // smooth non-polynomial integrand: ∫ e^{-z} / (1 + z) dz = e E_1(1)
        let rule = laguerre_rule(200);
        let gl = rule.integrate(|z| 1.0 / (1.0 + z));
        let (ada, _) = adaptive_integrate(
            |z| (-z).exp() / (1.0 + z),
            0.0,
            60.0,
            1e-13,
            1e-15,
        )
        .unwrap();
        assert_relative_eq!(gl, ada, max_relative = 1e-10);
    }

    #[test]
    fn adaptive_known_integral() {
        let (v, e) = adaptive_integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 1e-14)
            .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        assert!(e < 1e-10);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        // a tolerance below the roundoff floor is unreachable; the error
        // must carry the residual estimate instead of looping forever
        let r = adaptive_integrate(|x: f64| 1.0 / x, 1e-308, 1.0, 1e-300, 1e-300);
        match r {
            Err(Error::QuadratureNonConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = QuadratureSpec::default();
        assert!(spec.validate().is_ok());
        spec.node_count = 8;
        assert!(spec.validate().is_err());
        let a = QuadratureSpec::default().fingerprint();
        let mut other = QuadratureSpec::default();
        other.rel_tol = 1e-9;
        assert_ne!(a, other.fingerprint());
    }
}
