//! Command-line front end: evaluations, scans, sequences, diagnostics,
//! the full reproduction suite, and figure-data export.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 out-of-tolerance comparison in reproduce mode.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use borel_resum::bounds::{
    appendix_diagnostics, bound_verdict, sample_sequence_curves, BoundDirection, BoundVerdict,
    ChainBasis,
};
use borel_resum::engine::Resummator;
use borel_resum::quad::{QuadRule, QuadratureSpec};
use borel_resum::report::{provenance, run_section, CurveSet, Section, SectionBundle};
use borel_resum::scan::{
    detect_fixed_point, scan_extrema, scan_orders, select_principal, ScanConfig, SelectionRule,
};
use borel_resum::series::{builtin_series, load_series, BuiltinModel, CoefficientSeries,
    SeriesFormat};
use borel_resum::Error as LibError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_TOLERANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "borel-resum", version, about = "Variational conformal-Borel resummation of divergent series")]
struct Cli {
    /// Output directory for JSON summaries and CSV curve data
    /// (falls back to $BOREL_RESUM_OUT, then ./borel-resum-out)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Builtin model id: prototype, geometric, pv_model,
    /// euler_heisenberg, beta_polymer
    #[arg(long, conflicts_with = "file")]
    builtin: Option<String>,

    /// Coefficient file (.json or .csv)
    #[arg(long)]
    file: Option<PathBuf>,

    /// Input format override: json or csv (default: file extension)
    #[arg(long)]
    format: Option<String>,

    /// Highest order to generate for a builtin series
    #[arg(long, default_value_t = 7)]
    max_order: usize,
}

#[derive(Args)]
struct QuadArgs {
    /// Quadrature rule: gauss-laguerre or adaptive
    #[arg(long)]
    quad_rule: Option<String>,

    /// Gauss-Laguerre node count
    #[arg(long)]
    nodes: Option<usize>,

    #[arg(long)]
    rel_tol: Option<f64>,

    #[arg(long)]
    abs_tol: Option<f64>,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadratureSpec, String> {
        let mut q = QuadratureSpec::default();
        if let Some(rule) = &self.quad_rule {
            q.rule = match rule.as_str() {
                "gauss-laguerre" | "gauss_laguerre" => QuadRule::GaussLaguerre,
                "adaptive" | "adaptive_exp_tail" => QuadRule::AdaptiveExpTail,
                other => return Err(format!("unknown quadrature rule `{other}`")),
            };
        }
        if let Some(n) = self.nodes {
            q.node_count = n;
        }
        if let Some(t) = self.rel_tol {
            q.rel_tol = t;
        }
        if let Some(t) = self.abs_tol {
            q.abs_tol = t;
        }
        q.validate().map_err(|e| e.to_string())?;
        Ok(q)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate S_N(lambda, p) for one point
    Eval {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Locate and classify the extrema of S_N in p for one order
    Scan {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda0: Option<f64>,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long)]
        grid_per_decade: Option<usize>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Assemble p(N)/S_N chains over an order range with a bound verdict
    Sequence {
        #[command(flatten)]
        source: SourceArgs,
        /// Order range, e.g. 2..4 (inclusive)
        #[arg(long, value_parser = parse_range)]
        n_range: Option<(usize, usize)>,
        #[arg(long)]
        lambda0: Option<f64>,
        /// Selection rule: principal-min, principal-max, bar-branch
        #[arg(long, default_value = "principal-min")]
        rule: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Sequence plus convergence diagnostics and fixed-point search
    Diagnose {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_parser = parse_range)]
        n_range: Option<(usize, usize)>,
        #[arg(long)]
        lambda0: Option<f64>,
        #[arg(long, default_value = "principal-min")]
        rule: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Reproduce the worked examples against the tolerance manifest
    Reproduce {
        /// sec31, sec32, sec33, sec34, sec35, or all
        #[arg(long, default_value = "all")]
        example: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Emit the figure datasets as CSV without the pass/fail gate
    Export {
        #[arg(long, default_value = "all")]
        example: String,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let s = s.replace("..=", "..");
    let parts: Vec<&str> = s.split("..").collect();
    if parts.len() != 2 {
        return Err("expected a range like 2..4".into());
    }
    let lo: usize = parts[0].trim().parse().map_err(|_| "bad range start")?;
    let hi: usize = parts[1].trim().parse().map_err(|_| "bad range end")?;
    if lo > hi {
        return Err("range start exceeds end".into());
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &anyhow::Error) -> u8 {
    if let Some(lib) = e.downcast_ref::<LibError>() {
        match lib {
            LibError::QuadratureNonConvergence { .. }
            | LibError::AmbiguousTie(_, _)
            | LibError::NoZeroInBracket(_, _)
            | LibError::NoFixedPoint
            | LibError::InsufficientOrders { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    } else if e.downcast_ref::<std::io::Error>().is_some() {
        EXIT_CONFIG
    } else {
        EXIT_CONFIG
    }
}

fn out_dir(cli_dir: &Option<PathBuf>) -> PathBuf {
    cli_dir
        .clone()
        .or_else(|| std::env::var_os("BOREL_RESUM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("borel-resum-out"))
}

/// Write-temp-then-rename so concurrent readers never see partial files.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_summary(dir: &Path, summary: &serde_json::Value) -> anyhow::Result<PathBuf> {
    let path = dir.join("summary.json");
    write_atomic(&path, &serde_json::to_string_pretty(summary)?)?;
    Ok(path)
}

fn write_curves(dir: &Path, curves: &[CurveSet]) -> anyhow::Result<()> {
    for c in curves {
        write_atomic(&dir.join(format!("{}.csv", c.name)), &c.to_csv())?;
    }
    Ok(())
}

fn load_source(args: &SourceArgs) -> anyhow::Result<CoefficientSeries> {
    match (&args.builtin, &args.file) {
        (Some(id), None) => {
            let model: BuiltinModel = id.parse()?;
            let order = if model == BuiltinModel::BetaPolymer {
                args.max_order.min(7)
            } else {
                args.max_order
            };
            Ok(builtin_series(model, order)?)
        }
        (None, Some(path)) => {
            let bytes = fs::read(path)?;
            let format = match args.format.as_deref() {
                Some("json") => SeriesFormat::Json,
                Some("csv") => SeriesFormat::Csv,
                Some(other) => anyhow::bail!("unknown format `{other}`"),
                None => match path.extension().and_then(|e| e.to_str()) {
                    Some("json") => SeriesFormat::Json,
                    Some("csv") => SeriesFormat::Csv,
                    _ => anyhow::bail!("cannot infer format of {}", path.display()),
                },
            };
            Ok(load_series(&bytes, format)?)
        }
        _ => anyhow::bail!("exactly one of --builtin or --file is required"),
    }
}

fn default_lambda0(series: &CoefficientSeries, flag: Option<f64>) -> f64 {
    flag.unwrap_or_else(|| match series.origin() {
        borel_resum::series::SeriesOrigin::Builtin(m) => m.default_lambda0(),
        _ => 1.0,
    })
}

fn scan_config(
    series: &CoefficientSeries,
    lambda0: Option<f64>,
    p_min: Option<f64>,
    p_max: Option<f64>,
    grid: Option<usize>,
    quad: QuadratureSpec,
) -> ScanConfig {
    let mut cfg = ScanConfig::new(default_lambda0(series, lambda0));
    if let Some(v) = p_min {
        cfg.p_min = v;
    }
    if let Some(v) = p_max {
        cfg.p_max = v;
    }
    if let Some(v) = grid {
        cfg.grid_per_decade = v;
    }
    cfg.quad = quad;
    cfg
}

fn parse_rule(s: &str) -> anyhow::Result<SelectionRule> {
    Ok(match s {
        "principal-min" | "principal_min" => SelectionRule::PrincipalMin,
        "principal-max" | "principal_max" => SelectionRule::PrincipalMax,
        "bar-branch" | "bar_branch" => SelectionRule::BarBranch,
        other => anyhow::bail!("unknown selection rule `{other}`"),
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let dir = out_dir(&cli.out_dir);
    match cli.command {
        Command::Eval {
            source,
            n,
            lambda,
            p,
            quad,
        } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let series = load_source(&source)?;
            let engine = Resummator::new(&series, quad)?;
            let eval = engine.eval(n, lambda, p)?;
            println!("S_{n}({lambda}, {p}) = {:.10}", eval.value);
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "eval",
                    "series": series.name(),
                    "n": n, "lambda": lambda, "p": p, "quad": quad,
                })),
                "value": eval.value,
                "terms": eval.terms,
                "quadrature_error_estimate": eval.quadrature_error_estimate,
            });
            let path = write_summary(&dir, &summary)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            source,
            n,
            lambda0,
            p_min,
            p_max,
            grid_per_decade,
            quad,
        } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let series = load_source(&source)?;
            let cfg = scan_config(&series, lambda0, p_min, p_max, grid_per_decade, quad);
            let records = scan_extrema(&series, n, &cfg)?;
            if records.is_empty() {
                println!("N={n}: no solutions of the extremum condition in the window");
            }
            for r in &records {
                let flags = match (r.touches_p_min, r.touches_p_max) {
                    (true, _) => " [touches p_min]",
                    (_, true) => " [touches p_max]",
                    _ => "",
                };
                println!(
                    "N={} p={:.6} S={:.8} {:?}{}",
                    r.n, r.p_star, r.s_value, r.kind, flags
                );
            }
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "scan", "series": series.name(), "n": n, "config": cfg,
                })),
                "records": records,
            });
            let path = write_summary(&dir, &summary)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sequence {
            source,
            n_range,
            lambda0,
            rule,
            quad,
        } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let series = load_source(&source)?;
            let rule = parse_rule(&rule)?;
            let cfg = scan_config(&series, lambda0, None, None, None, quad);
            let (lo, hi) = n_range.unwrap_or((2, series.order()));
            let scans = scan_orders(&series, lo.max(1), hi, &cfg)?;
            let seq = select_principal(&scans, rule)?;
            let verdict = if seq.solved().is_empty() {
                BoundVerdict {
                    direction: BoundDirection::Inconclusive,
                    monotone: false,
                    basis: ChainBasis::LocalChain,
                    caveats: vec!["no extrema located in the scan window".into()],
                }
            } else {
                let curves = sample_sequence_curves(&series, &seq, cfg.lambda0, 20, quad)?;
                bound_verdict(&curves)
            };
            for e in &seq.entries {
                match &e.record {
                    Some(r) => println!(
                        "N={} p={:.6} S(lambda0)={:.8} {:?}",
                        e.n, r.p_star, r.s_value, r.kind
                    ),
                    None => println!("N={} no solution", e.n),
                }
            }
            println!(
                "verdict: {:?} (monotone = {}, basis = {:?})",
                verdict.direction, verdict.monotone, verdict.basis
            );
            for c in &verdict.caveats {
                println!("caveat: {c}");
            }
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "sequence", "series": series.name(),
                    "n_range": [lo, hi], "rule": rule, "config": cfg,
                })),
                "sequence": seq,
                "verdict": verdict,
            });
            let path = write_summary(&dir, &summary)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Diagnose {
            source,
            n_range,
            lambda0,
            rule,
            quad,
        } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let series = load_source(&source)?;
            let rule = parse_rule(&rule)?;
            let cfg = scan_config(&series, lambda0, None, None, None, quad);
            let (lo, hi) = n_range.unwrap_or((2, series.order()));
            let scans = scan_orders(&series, lo.max(1), hi, &cfg)?;
            let seq = select_principal(&scans, rule)?;
            let diag = appendix_diagnostics(&series, &seq, cfg.lambda0, quad)?;
            let slopes = borel_resum::bounds::slope_checks(&series, &seq, cfg.lambda0, quad)?;
            let fixed_point = detect_fixed_point(&scans, (cfg.p_min, cfg.p_max)).ok();
            println!("c(N): {:?}", diag.cn.values);
            println!("strictly decreasing: {}", diag.cn.strictly_decreasing);
            if let Some(k) = diag.cn.k_fit {
                println!("K fit: {k:.4}");
            }
            println!("alpha = {:.6} +/- {:.2e}", diag.alpha, diag.alpha_error);
            for row in &diag.delta_s {
                println!(
                    "dS at N={}: measured {:.6}, leading-order {:.6}, signs agree: {}",
                    row.n, row.measured, row.magic, row.sign_consistent
                );
            }
            for chk in &diag.identity_checks {
                println!(
                    "{}: residual {:.3e} (tol {:.0e}) {}",
                    chk.label,
                    chk.residual,
                    chk.tolerance,
                    if chk.pass { "ok" } else { "FAIL" }
                );
            }
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "diagnose", "series": series.name(),
                    "n_range": [lo, hi], "rule": rule, "config": cfg,
                })),
                "sequence": seq,
                "diagnostics": diag,
                "slope_checks": slopes,
                "fixed_point": fixed_point,
            });
            let path = write_summary(&dir, &summary)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce { example, quad } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let bundles = run_examples(&example, quad)?;
            let mut failing: Vec<String> = Vec::new();
            for b in &bundles {
                for row in &b.report.rows {
                    let status = if row.pass { "PASS" } else { "FAIL" };
                    println!(
                        "{status}  {}/{}: computed {:.6} vs expected {:.6} ({:?} tol {})",
                        b.report.section, row.label, row.computed, row.expected, row.kind, row.tol
                    );
                    if !row.pass {
                        failing.push(format!("{}/{}", b.report.section, row.label));
                    }
                }
            }
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "reproduce", "example": example, "quad": quad,
                })),
                "sections": bundles.iter().map(|b| &b.report).collect::<Vec<_>>(),
            });
            let path = write_summary(&dir, &summary)?;
            for b in &bundles {
                write_curves(&dir, &b.curves)?;
            }
            eprintln!("wrote {}", path.display());
            if failing.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("out-of-tolerance rows:");
                for f in &failing {
                    eprintln!("  {f}");
                }
                Ok(ExitCode::from(EXIT_TOLERANCE))
            }
        }
        Command::Export { example, quad } => {
            let quad = quad.spec().map_err(|e| anyhow::anyhow!(e))?;
            let bundles = run_examples(&example, quad)?;
            let mut names = Vec::new();
            for b in &bundles {
                write_curves(&dir, &b.curves)?;
                for c in &b.curves {
                    names.push(format!("{}.csv", c.name));
                }
            }
            let summary = json!({
                "provenance": provenance(json!({
                    "command": "export", "example": example, "quad": quad,
                })),
                "files": names,
            });
            let path = write_summary(&dir, &summary)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_examples(example: &str, quad: QuadratureSpec) -> anyhow::Result<Vec<SectionBundle>> {
    if example == "all" {
        Ok(borel_resum::report::run_all(quad)?)
    } else {
        let section: Section = example.parse()?;
        Ok(vec![run_section(section, quad)?])
    }
}
