use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use somorse::flow::{gradient_flow, FlowBatch, FlowConfig, FlowRecord};
use somorse::verify::run_all;
use somorse::{enumerate_critical_points, is_perfect, run_flow_batch, Record, Rotation};

use crate::args::{FlowArgs, Format, RunConfig};
use crate::error::{exit, CliError};

/// Rendered output and the exit code it should produce.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn signs(eps: &[i8]) -> String {
    eps.iter().map(i8::to_string).collect::<Vec<_>>().join(";")
}

pub fn critical_points(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut records: Vec<Record> = enumerate_critical_points(cfg.n, &cfg.c)?;
    records.sort_by(|a, b| a.index.cmp(&b.index).then(a.value.total_cmp(&b.value)));
    let text = match cfg.format {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut s = String::from("eps,index,value,hessian_diagonal\n");
            for r in &records {
                let h: Vec<String> = r
                    .hessian_diagonal
                    .as_slice()
                    .iter()
                    .map(f64::to_string)
                    .collect();
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    signs(r.pattern.as_slice()),
                    r.index,
                    r.value,
                    h.join(";")
                );
            }
            s
        }
        Format::Table => {
            let width = (2 * cfg.n + 1).max(7);
            let mut s = format!(
                "{:<width$}  {:>5}  {:>12}  hessian diagonal\n",
                "pattern", "index", "value"
            );
            for r in &records {
                let h: Vec<String> = r
                    .hessian_diagonal
                    .iter()
                    .map(|(p, v)| format!("{p}:{v}"))
                    .collect();
                let _ = writeln!(
                    s,
                    "{:<width$}  {:>5}  {:>12}  {}",
                    r.pattern.to_string(),
                    r.index,
                    r.value,
                    h.join(" ")
                );
            }
            let _ = writeln!(s, "{} critical points", records.len());
            s
        }
    };
    Ok(Outcome {
        text,
        code: exit::OK,
    })
}

#[derive(Serialize)]
struct PolynomialOutput<'a> {
    #[serde(flatten)]
    report: &'a somorse::PerfectnessReport,
    betti_numbers_z2: &'a [u64],
    count_at_one: u64,
    verdict: &'static str,
}

pub fn polynomials(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = is_perfect(cfg.n, &cfg.c)?;
    let verdict = if report.perfect {
        "PERFECT"
    } else {
        "NOT PERFECT"
    };
    let code = if report.perfect {
        exit::OK
    } else {
        exit::NOT_PERFECT
    };
    let count_at_one = report.morse.eval_at_one()?;
    let text = match cfg.format {
        Format::Json => json(&PolynomialOutput {
            report: &report,
            betti_numbers_z2: report.poincare_basis.coeffs(),
            count_at_one,
            verdict,
        })?,
        Format::Csv => {
            let mut s = String::from("degree,morse,poincare_basis,poincare_product\n");
            let top = [
                &report.morse,
                &report.poincare_basis,
                &report.poincare_product,
            ]
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0);
            for k in 0..=top {
                let _ = writeln!(
                    s,
                    "{k},{},{},{}",
                    report.morse.coeff(k),
                    report.poincare_basis.coeff(k),
                    report.poincare_product.coeff(k)
                );
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "n = {}", cfg.n);
            let _ = writeln!(s, "Morse polynomial:               {}", report.morse);
            let _ = writeln!(
                s,
                "Poincare polynomial (Z2 basis): {}",
                report.poincare_basis
            );
            let _ = writeln!(
                s,
                "Poincare polynomial (product):  {}",
                report.poincare_product
            );
            let _ = writeln!(s, "Remainder R(t):                 {}", report.remainder);
            let betti: Vec<String> = report
                .poincare_basis
                .coeffs()
                .iter()
                .map(u64::to_string)
                .collect();
            let _ = writeln!(s, "Z2 Betti numbers:               ({})", betti.join(", "));
            let _ = writeln!(s, "P(1) = {count_at_one}");
            let _ = writeln!(s, "{verdict}");
            s
        }
    };
    Ok(Outcome { text, code })
}

fn flow_config(cfg: &RunConfig, trajectory: bool) -> FlowConfig<f64> {
    FlowConfig {
        gradient_tol: cfg.tol,
        record_trajectory: trajectory,
        ..FlowConfig::default()
    }
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = run_all(
        cfg.n,
        &cfg.c,
        cfg.samples,
        cfg.seed,
        &flow_config(cfg, false),
    )?;
    let code = if report.passed {
        exit::OK
    } else {
        exit::SUITE_FAILED
    };
    let text = match cfg.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("suite,passed,checked,max_residual,threshold\n");
            for r in &report.suites {
                let _ = writeln!(
                    s,
                    "{},{},{},{:e},{:e}",
                    r.name, r.passed, r.checked, r.max_residual, r.threshold
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "n = {}, samples = {}, seed = {}\n",
                report.n, report.samples, report.seed
            );
            for r in &report.suites {
                let _ = writeln!(
                    s,
                    "{} {:<20} max residual {:.3e} (threshold {:.1e}) [{}]",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.max_residual,
                    r.threshold,
                    r.detail
                );
            }
            let _ = writeln!(
                s,
                "{}",
                if report.passed {
                    "all suites passed"
                } else {
                    "verification FAILED"
                }
            );
            s
        }
    };
    Ok(Outcome { text, code })
}

fn read_start(path: &Path, n: usize) -> Result<Rotation, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let start: Rotation = serde_json::from_str(&raw)
        .map_err(|e| CliError::Usage(format!("{}: invalid start matrix: {e}", path.display())))?;
    if start.dim() != n {
        return Err(CliError::usage(format!(
            "start matrix is {0}x{0} but --n is {n}",
            start.dim()
        )));
    }
    Ok(start)
}

pub fn flow(args: &FlowArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let config = flow_config(cfg, args.trajectory);
    let batch: FlowBatch<f64> = match &args.start {
        Some(path) => {
            let start = read_start(path, cfg.n)?;
            let result = gradient_flow(&start, &cfg.c, &config)?;
            let records = vec![FlowRecord { sample: 0, result }];
            let summary = somorse::flow::summarize(cfg.n, &records)?;
            FlowBatch { records, summary }
        }
        None => run_flow_batch(cfg.n, &cfg.c, cfg.samples, cfg.seed, &config)?,
    };
    let text = match cfg.format {
        Format::Json => json(&batch)?,
        Format::Csv => {
            let mut s = String::from(
                "sample,converged,iterations,final_gradient_norm,final_value,classified\n",
            );
            for r in &batch.records {
                let res = &r.result;
                let _ = writeln!(
                    s,
                    "{},{},{},{:e},{},{}",
                    r.sample,
                    res.converged,
                    res.iterations,
                    res.final_gradient_norm,
                    res.final_value,
                    res.classified_pattern
                        .as_ref()
                        .map(|p| signs(p.as_slice()))
                        .unwrap_or_default()
                );
            }
            s
        }
        Format::Table => {
            let sm = &batch.summary;
            let mut s = format!(
                "{} samples: {} converged, {} classified, {} unclassified\n",
                sm.samples, sm.converged, sm.classified, sm.unclassified
            );
            let _ = writeln!(s, "{:<12}  {:>5}  {:>7}", "limit", "index", "count");
            for l in &sm.limits {
                let _ = writeln!(
                    s,
                    "{:<12}  {:>5}  {:>7}",
                    l.eps.to_string(),
                    l.index,
                    l.count
                );
            }
            let _ = writeln!(
                s,
                "max gradient norm {:.3e}; iterations min {} / mean {:.1} / max {}",
                sm.max_gradient_norm, sm.min_iterations, sm.mean_iterations, sm.max_iterations
            );
            s
        }
    };
    Ok(Outcome {
        text,
        code: exit::OK,
    })
}
