//! Extremum scan over the map parameter p: locate and classify the
//! solutions of ∂S_N/∂p = 0 for each order, assemble the principal,
//! bar-branch, and auxiliary sequences, and detect fixed-point branches.

use serde::{Deserialize, Serialize};

use crate::engine::{DerivVar, Resummator};
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::quad::QuadratureSpec;
use crate::series::CoefficientSeries;

/// Scan window and refinement controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Reference coupling at which the extremum condition is solved.
    pub lambda0: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub grid_per_decade: usize,
    /// Relative bracket width for bisection refinement.
    pub refine_tol: f64,
    pub quad: QuadratureSpec,
}

impl ScanConfig {
    pub fn new(lambda0: f64) -> Self {
        ScanConfig {
            lambda0,
            p_min: 1e-2,
            p_max: 1e3,
            grid_per_decade: 60,
            refine_tol: 1e-10,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_min > 0.0 && self.p_min < self.p_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < p_min < p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.grid_per_decade < 20 {
            return Err(Error::InvalidConfig(format!(
                "grid_per_decade must be >= 20, got {}",
                self.grid_per_decade
            )));
        }
        if !(self.lambda0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda0 must be positive, got {}",
                self.lambda0
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidConfig("refine_tol must be positive".into()));
        }
        self.quad.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    GlobalMin,
    LocalMin,
    LocalMax,
    GlobalMax,
    Inflexion,
}

impl ExtremumKind {
    pub fn is_min(self) -> bool {
        matches!(self, ExtremumKind::GlobalMin | ExtremumKind::LocalMin)
    }

    pub fn is_max(self) -> bool {
        matches!(self, ExtremumKind::GlobalMax | ExtremumKind::LocalMax)
    }

    pub fn is_global(self) -> bool {
        matches!(self, ExtremumKind::GlobalMin | ExtremumKind::GlobalMax)
    }
}

/// One classified solution of the extremum condition at order `n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExtremumRecord {
    pub n: usize,
    pub p_star: f64,
    pub s_value: f64,
    pub kind: ExtremumKind,
    /// Sign of the second derivative at the root; 0 for inflexions.
    pub curvature_sign: i8,
    pub touches_p_min: bool,
    pub touches_p_max: bool,
}

impl ExtremumRecord {
    pub fn touches_boundary(&self) -> bool {
        self.touches_p_min || self.touches_p_max
    }
}

// relative S-flatness and log-p proximity below which an adjacent
// min/max pair is reported as a single degenerate (inflexion) root
const INFLEXION_FLATNESS: f64 = 1e-4;
const INFLEXION_MAX_LOG_GAP: f64 = 0.2;

struct GridPoint {
    p: f64,
    s: f64,
    d: f64,
}

/// Solve ∂S_N/∂p = 0 on a log-uniform grid and classify every root.
pub fn scan_extrema(
    series: &CoefficientSeries,
    n: usize,
    config: &ScanConfig,
) -> Result<Vec<ExtremumRecord>> {
    config.validate()?;
    if n < 1 {
        return Err(Error::Domain(
            "scan requires N >= 1 (N = 0 has no usable p-dependence)".into(),
        ));
    }
    if n > series.order() {
        return Err(Error::OrderOutOfRange {
            requested: n,
            order: series.order(),
        });
    }
    let engine = Resummator::new(series, config.quad)?;
    let lam = config.lambda0;

    let decades = (config.p_max / config.p_min).log10();
    let steps = (decades * config.grid_per_decade as f64).ceil() as usize;
    let ln_min = config.p_min.ln();
    let ln_step = (config.p_max.ln() - ln_min) / steps as f64;
    let ps: Vec<f64> = (0..=steps).map(|i| (ln_min + i as f64 * ln_step).exp()).collect();

    let evals: Vec<Result<(f64, f64)>> = par_map(&ps, |&p| {
        let s = engine.value(n, lam, p)?;
        let d = engine.derivative(n, lam, p, DerivVar::P)?.value;
        Ok((s, d))
    });
    let mut grid = Vec::with_capacity(ps.len());
    for (p, ev) in ps.iter().zip(evals) {
        let (s, d) = ev?;
        grid.push(GridPoint { p: *p, s, d });
    }

    let s_min_grid = grid.iter().map(|g| g.s).fold(f64::INFINITY, f64::min);
    let s_max_grid = grid.iter().map(|g| g.s).fold(f64::NEG_INFINITY, f64::max);
    let s_range = (s_max_grid - s_min_grid).max(1e-12 * s_max_grid.abs().max(1.0));
    let f0_asymptote = series.prefactor() * series.coefficient(0);

    // refine every sign change of the derivative
    let deriv = |p: f64| -> Result<f64> { Ok(engine.derivative(n, lam, p, DerivVar::P)?.value) };
    let mut roots: Vec<(f64, i8)> = Vec::new(); // (p_star, sign of d on the left)
    for w in grid.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.d == 0.0 {
            continue;
        }
        if a.d * b.d < 0.0 {
            let p_star = bisect(&deriv, a.p, b.p, a.d, config.refine_tol)?;
            roots.push((p_star, a.d.signum() as i8));
        }
    }

    // curvature in log p at each root (second difference of S)
    let curvature = |p: f64| -> Result<f64> {
        let h: f64 = 1e-3;
        let sp = engine.value(n, lam, p * h.exp())?;
        let s0 = engine.value(n, lam, p)?;
        let sm = engine.value(n, lam, p * (-h).exp())?;
        Ok((sp - 2.0 * s0 + sm) / (h * h))
    };

    let mut records: Vec<ExtremumRecord> = Vec::new();
    for &(p_star, left_sign) in &roots {
        let s_value = engine.value(n, lam, p_star)?;
        let curv = curvature(p_star)?;
        let kind = if left_sign < 0 {
            // descending into the root: minimum
            if s_value <= s_min_grid + 1e-9 * s_range && s_value <= f0_asymptote + 1e-9 * s_range {
                ExtremumKind::GlobalMin
            } else {
                ExtremumKind::LocalMin
            }
        } else if s_value >= s_max_grid - 1e-9 * s_range
            && s_value >= f0_asymptote - 1e-9 * s_range
        {
            ExtremumKind::GlobalMax
        } else {
            ExtremumKind::LocalMax
        };
        records.push(ExtremumRecord {
            n,
            p_star,
            s_value,
            kind,
            curvature_sign: if curv == 0.0 { 0 } else { curv.signum() as i8 },
            touches_p_min: false,
            touches_p_max: false,
        });
    }

    // merge nearly degenerate adjacent min/max pairs into one inflexion
    // record (a genuinely flat spot shows up as a double root)
    let mut merged: Vec<ExtremumRecord> = Vec::new();
    let mut i = 0;
    while i < records.len() {
        if i + 1 < records.len() {
            let (a, b) = (records[i], records[i + 1]);
            let opposite = (a.kind.is_min() && b.kind.is_max())
                || (a.kind.is_max() && b.kind.is_min());
            let flat = (a.s_value - b.s_value).abs() < INFLEXION_FLATNESS * s_range;
            let close = (b.p_star / a.p_star).ln().abs() < INFLEXION_MAX_LOG_GAP;
            if opposite && flat && close {
                // keep the flatter member as the representative
                let ca = curvature(a.p_star)?.abs();
                let cb = curvature(b.p_star)?.abs();
                let rep = if cb <= ca { b } else { a };
                merged.push(ExtremumRecord {
                    kind: ExtremumKind::Inflexion,
                    curvature_sign: 0,
                    ..rep
                });
                i += 2;
                continue;
            }
        }
        merged.push(records[i]);
        i += 1;
    }
    let mut records = merged;

    // a window edge that undercuts the analytic asymptote on its side
    // with an outward-pointing slope proves an extremum beyond the window
    let first = grid.first().expect("non-empty grid");
    let last = grid.last().expect("non-empty grid");
    let shat = series.partial_sum(n, lam)?; // p -> 0+ limit
    if first.d > 0.0 && first.s < shat {
        records.insert(
            0,
            ExtremumRecord {
                n,
                p_star: first.p,
                s_value: first.s,
                kind: ExtremumKind::LocalMin,
                curvature_sign: 0,
                touches_p_min: true,
                touches_p_max: false,
            },
        );
    } else if first.d < 0.0 && first.s > shat {
        records.insert(
            0,
            ExtremumRecord {
                n,
                p_star: first.p,
                s_value: first.s,
                kind: ExtremumKind::LocalMax,
                curvature_sign: 0,
                touches_p_min: true,
                touches_p_max: false,
            },
        );
    }
    if last.d < 0.0 && last.s < f0_asymptote {
        records.push(ExtremumRecord {
            n,
            p_star: last.p,
            s_value: last.s,
            kind: ExtremumKind::LocalMin,
            curvature_sign: 0,
            touches_p_min: false,
            touches_p_max: true,
        });
    } else if last.d > 0.0 && last.s > f0_asymptote {
        records.push(ExtremumRecord {
            n,
            p_star: last.p,
            s_value: last.s,
            kind: ExtremumKind::LocalMax,
            curvature_sign: 0,
            touches_p_min: false,
            touches_p_max: true,
        });
    }

    Ok(records)
}

fn bisect(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    f_a_sign: f64,
    rel_tol: f64,
) -> Result<f64> {
    let neg_left = f_a_sign < 0.0;
    for _ in 0..200 {
        if b / a - 1.0 < rel_tol {
            break;
        }
        let mid = (a * b).sqrt();
        let fm = f(mid)?;
        if (fm < 0.0) == neg_left {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a * b).sqrt())
}

/// Scans for a range of orders, one entry per N.
pub type ScanSet = Vec<(usize, Vec<ExtremumRecord>)>;

/// Run [`scan_extrema`] for every order in `2..=n_max` plus N = 1 (which
/// normally has no solutions). Orders are processed independently.
pub fn scan_orders(
    series: &CoefficientSeries,
    n_lo: usize,
    n_hi: usize,
    config: &ScanConfig,
) -> Result<ScanSet> {
    let orders: Vec<usize> = (n_lo.max(1)..=n_hi.min(series.order())).collect();
    let results = par_map(&orders, |&n| scan_extrema(series, n, config));
    let mut out = Vec::with_capacity(orders.len());
    for (n, r) in orders.into_iter().zip(results) {
        out.push((n, r?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Global minimum when present, else the local minimum nearest the
    /// previous order's position.
    PrincipalMin,
    /// Mirror rule for series whose first nontrivial coefficient is
    /// positive (maxima solutions).
    PrincipalMax,
    /// The local maximum accompanying each order's principal minimum.
    BarBranch,
}

/// Per-order principal selection; `record` is None when the order has no
/// admissible solution (e.g. N = 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub n: usize,
    pub record: Option<ExtremumRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremumSequence {
    pub rule: SelectionRule,
    pub entries: Vec<SequenceEntry>,
}

impl ExtremumSequence {
    /// The orders that actually have a record, in ascending order.
    pub fn solved(&self) -> Vec<&ExtremumRecord> {
        self.entries.iter().filter_map(|e| e.record.as_ref()).collect()
    }
}

fn log_dist(a: f64, b: f64) -> f64 {
    (a / b).ln().abs()
}

/// Assemble a sequence across orders under the given selection rule.
pub fn select_principal(scans: &ScanSet, rule: SelectionRule) -> Result<ExtremumSequence> {
    match rule {
        SelectionRule::PrincipalMin | SelectionRule::PrincipalMax => {
            principal(scans, rule == SelectionRule::PrincipalMax)
        }
        SelectionRule::BarBranch => bar_branch(scans),
    }
}

fn principal(scans: &ScanSet, maxima: bool) -> Result<ExtremumSequence> {
    let mut entries = Vec::with_capacity(scans.len());
    let mut prev_p: Option<f64> = None;
    for (n, records) in scans {
        let interior: Vec<&ExtremumRecord> =
            records.iter().filter(|r| !r.touches_boundary()).collect();
        let globals: Vec<&ExtremumRecord> = interior
            .iter()
            .copied()
            .filter(|r| {
                if maxima {
                    r.kind == ExtremumKind::GlobalMax
                } else {
                    r.kind == ExtremumKind::GlobalMin
                }
            })
            .collect();
        let chosen: Option<ExtremumRecord> = if !globals.is_empty() {
            if globals.len() > 1 {
                // two equally deep global extrema is an ambiguity the
                // caller must resolve, never a silent choice
                let scale = globals[0].s_value.abs().max(1.0);
                let best = globals
                    .iter()
                    .map(|r| r.s_value)
                    .fold(if maxima { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| {
                        if maxima {
                            a.max(b)
                        } else {
                            a.min(b)
                        }
                    });
                let tied: Vec<&&ExtremumRecord> = globals
                    .iter()
                    .filter(|r| (r.s_value - best).abs() <= 1e-12 * scale)
                    .collect();
                if tied.len() > 1 {
                    return Err(Error::AmbiguousTie(tied[0].p_star, tied[1].p_star));
                }
                Some(**tied[0])
            } else {
                Some(*globals[0])
            }
        } else {
            let locals: Vec<&ExtremumRecord> = interior
                .iter()
                .copied()
                .filter(|r| {
                    if maxima {
                        r.kind == ExtremumKind::LocalMax || r.kind == ExtremumKind::Inflexion
                    } else {
                        r.kind == ExtremumKind::LocalMin || r.kind == ExtremumKind::Inflexion
                    }
                })
                .collect();
            match (&prev_p, locals.len()) {
                (_, 0) => None,
                (Some(p0), _) => locals
                    .iter()
                    .min_by(|a, b| log_dist(a.p_star, *p0).total_cmp(&log_dist(b.p_star, *p0)))
                    .map(|r| **r),
                (None, _) => {
                    // no anchor yet: take the most extreme value
                    locals
                        .iter()
                        .min_by(|a, b| {
                            if maxima {
                                b.s_value.total_cmp(&a.s_value)
                            } else {
                                a.s_value.total_cmp(&b.s_value)
                            }
                        })
                        .map(|r| **r)
                }
            }
        };
        if let Some(r) = &chosen {
            prev_p = Some(r.p_star);
        }
        entries.push(SequenceEntry {
            n: *n,
            record: chosen,
        });
    }
    Ok(ExtremumSequence {
        rule: if maxima {
            SelectionRule::PrincipalMax
        } else {
            SelectionRule::PrincipalMin
        },
        entries,
    })
}

fn bar_branch(scans: &ScanSet) -> Result<ExtremumSequence> {
    let principal_seq = principal(scans, false)?;
    let mut entries = Vec::with_capacity(scans.len());
    for ((n, records), pentry) in scans.iter().zip(&principal_seq.entries) {
        let chosen = pentry.record.as_ref().and_then(|pmin| {
            records
                .iter()
                .filter(|r| {
                    !r.touches_boundary() && r.kind.is_max() && r.p_star < pmin.p_star
                })
                .max_by(|a, b| a.p_star.total_cmp(&b.p_star))
                .copied()
        });
        entries.push(SequenceEntry {
            n: *n,
            record: chosen,
        });
    }
    Ok(ExtremumSequence {
        rule: SelectionRule::BarBranch,
        entries,
    })
}

/// A branch of extremum positions converging to a constant, heuristically
/// signalling a Borel-plane singularity at z = -1/p0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointCandidate {
    /// (order, p0(N), kind) along the selected branch.
    pub branch: Vec<(usize, f64, ExtremumKind)>,
    pub limit_estimate: f64,
    /// Maxima and minima alternate along the branch.
    pub alternation: bool,
    /// The branch choice is a formalized inspection rule, not a theorem.
    pub heuristic: bool,
}

// chain acceptance thresholds: log-gaps must not grow, and the final
// log-gap must be small enough to call the sequence Cauchy-like
const FP_GAP_GROWTH: f64 = 1.001;
const FP_FINAL_GAP: f64 = 0.15;

/// Search the non-principal records for a converging alternating branch
/// inside `window`.
pub fn detect_fixed_point(
    scans: &ScanSet,
    window: (f64, f64),
) -> Result<FixedPointCandidate> {
    if scans.len() < 3 {
        return Err(Error::InsufficientOrders {
            needed: 3,
            got: scans.len(),
        });
    }
    // exclude the growing principal chain of the series' own extremum
    // type; the opposite-type principal would eat fixed-point members
    let has_global_min = scans
        .iter()
        .flat_map(|(_, r)| r)
        .any(|r| r.kind == ExtremumKind::GlobalMin);
    let has_global_max = scans
        .iter()
        .flat_map(|(_, r)| r)
        .any(|r| r.kind == ExtremumKind::GlobalMax);
    let mut excluded: Vec<(usize, f64)> = Vec::new();
    if has_global_min || !has_global_max {
        for e in &principal(scans, false)?.entries {
            if let Some(r) = &e.record {
                excluded.push((e.n, r.p_star));
            }
        }
    }
    if has_global_max {
        for e in &principal(scans, true)?.entries {
            if let Some(r) = &e.record {
                excluded.push((e.n, r.p_star));
            }
        }
    }
    let candidates: Vec<(usize, Vec<&ExtremumRecord>)> = scans
        .iter()
        .map(|(n, records)| {
            let c = records
                .iter()
                .filter(|r| {
                    !r.touches_boundary()
                        && r.p_star >= window.0
                        && r.p_star <= window.1
                        && !excluded
                            .iter()
                            .any(|&(en, ep)| en == *n && ep == r.p_star)
                })
                .collect();
            (*n, c)
        })
        .collect();

    let mut best: Option<Vec<(usize, f64, ExtremumKind)>> = None;
    for start in 0..candidates.len() {
        for seed in &candidates[start].1 {
            let mut chain = vec![(candidates[start].0, seed.p_star, seed.kind)];
            for (n, cands) in candidates.iter().skip(start + 1) {
                let last_p = chain.last().unwrap().1;
                match cands
                    .iter()
                    .min_by(|a, b| log_dist(a.p_star, last_p).total_cmp(&log_dist(b.p_star, last_p)))
                {
                    Some(r) => chain.push((*n, r.p_star, r.kind)),
                    None => break,
                }
            }
            if chain.len() < 3 {
                continue;
            }
            // trim to the longest prefix with non-increasing log-gaps
            let mut gaps: Vec<f64> = chain
                .windows(2)
                .map(|w| (w[1].1 / w[0].1).ln())
                .collect();
            let mut len = chain.len();
            for i in 1..gaps.len() {
                if gaps[i].abs() > gaps[i - 1].abs() * FP_GAP_GROWTH {
                    len = i + 1;
                    break;
                }
            }
            chain.truncate(len);
            gaps.truncate(len.saturating_sub(1));
            if chain.len() < 3 || gaps.last().map(|g| g.abs()).unwrap_or(1.0) > FP_FINAL_GAP {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => {
                    chain.len() > b.len()
                        || (chain.len() == b.len()
                            && gaps.last().unwrap().abs()
                                < (b[b.len() - 1].1 / b[b.len() - 2].1).ln().abs())
                }
            };
            if better {
                best = Some(chain);
            }
        }
    }
    let branch = best.ok_or(Error::NoFixedPoint)?;
    let gaps: Vec<f64> = branch.windows(2).map(|w| (w[1].1 / w[0].1).ln()).collect();
    let g_last = gaps[gaps.len() - 1];
    let g_prev = gaps[gaps.len() - 2];
    let ratio = g_last / g_prev;
    // geometric last-gap extrapolation of the remaining drift
    let ln_limit = if ratio.abs() < 0.95 && ratio.is_finite() {
        branch.last().unwrap().1.ln() + g_last * ratio / (1.0 - ratio)
    } else {
        branch.last().unwrap().1.ln()
    };
    let alternation = branch.windows(2).all(|w| {
        let (a, b) = (w[0].2, w[1].2);
        (a.is_min() && b.is_max()) || (a.is_max() && b.is_min())
    });
    Ok(FixedPointCandidate {
        branch,
        limit_estimate: ln_limit.exp(),
        alternation,
        heuristic: true,
    })
}
