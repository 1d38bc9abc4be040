//! Oracle suites that cross-check the analytic and numeric layers.
//!
//! Each suite returns a [`SuiteReport`] with the worst residual it saw and
//! the threshold it was held to.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::flow::{run_flow_batch, FlowConfig};
use crate::lie::{haar_sample, sample_rng, CostVector, RotationMatrix};
use crate::morse::{index_by_formula, index_by_hessian, SignPattern};
use crate::numeric::{
    fd_gradient, fd_hessian, numeric_index, riemannian_gradient, tangent_hessian,
};
use crate::numeric::{FD_STEP_FIRST, FD_STEP_SECOND};

pub const GRADIENT_FD_TOL: f64 = 1e-7;
pub const HESSIAN_FD_TOL: f64 = 1e-4;
/// Fraction of flow limits required at the index-0 point.
pub const MIN_FRACTION_AT_MINIMUM: f64 = 0.99;

// Streams above this offset are reserved for the per-suite draws so that
// they never collide with the flow batch streams.
const GRADIENT_STREAM: u64 = 1 << 40;
const HESSIAN_STREAM: u64 = 2 << 40;
const INDEX_STREAM: u64 = 3 << 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

fn random_point(
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(RotationMatrix<f64>, CostVector<f64>)> {
    let mut rng = sample_rng(seed, stream);
    let a = haar_sample(n, &mut rng)?;
    let c = CostVector::random(n, &mut rng);
    Ok((a, c))
}

/// Closed-form gradient against central differences at random points.
pub fn gradient_suite(n: usize, samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for k in 0..samples {
        let (a, c) = random_point(n, seed, GRADIENT_STREAM + k as u64)?;
        let exact = riemannian_gradient(&a, &c)?;
        let fd = fd_gradient(&a, &c, FD_STEP_FIRST)?;
        for (x, y) in exact.as_slice().iter().zip(fd.as_slice()) {
            worst = worst.max((x - y).abs());
            checked += 1;
        }
    }
    Ok(SuiteReport {
        name: "gradient-fd",
        passed: worst <= GRADIENT_FD_TOL,
        checked,
        max_residual: worst,
        threshold: GRADIENT_FD_TOL,
        detail: format!("{samples} random points, h = {FD_STEP_FIRST:e}"),
    })
}

/// Tangent Hessian against central mixed second differences.
pub fn hessian_suite(n: usize, samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for k in 0..samples {
        let (a, c) = random_point(n, seed, HESSIAN_STREAM + k as u64)?;
        let exact = tangent_hessian(&a, &c)?;
        let fd = fd_hessian(&a, &c, FD_STEP_SECOND)?;
        worst = worst.max(exact.matrix().sub(fd.matrix()).max_abs());
        checked += exact.matrix().as_slice().len();
    }
    Ok(SuiteReport {
        name: "hessian-fd",
        passed: worst <= HESSIAN_FD_TOL,
        checked,
        max_residual: worst,
        threshold: HESSIAN_FD_TOL,
        detail: format!("{samples} random points, h = {FD_STEP_SECOND:e}"),
    })
}

/// Formula index, Hessian-diagonal sign count and eigenvalue count agree on
/// every pattern for `c` and `random_costs` further random cost vectors.
pub fn index_suite(
    n: usize,
    c: &CostVector<f64>,
    random_costs: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut cost_vectors = vec![c.clone()];
    for k in 0..random_costs {
        let mut rng = sample_rng(seed, INDEX_STREAM + k as u64);
        cost_vectors.push(CostVector::random(n, &mut rng));
    }
    let mut mismatches = 0usize;
    let mut checked = 0;
    for costs in &cost_vectors {
        for p in SignPattern::all(n) {
            let by_formula = index_by_formula(&p);
            let by_hessian = index_by_hessian(&p, costs)?;
            let by_eigen = numeric_index(&tangent_hessian(&p.embed(), costs)?)?;
            if by_formula != by_hessian || by_formula != by_eigen {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    Ok(SuiteReport {
        name: "index-equivalence",
        passed: mismatches == 0,
        checked,
        max_residual: mismatches as f64,
        threshold: 0.0,
        detail: format!("{} cost vectors, all sign patterns", cost_vectors.len()),
    })
}

/// Gradient flow from Haar starts: every run converges, every limit is an
/// enumerated critical point, and almost all reach the index-0 point.
pub fn flow_suite(
    n: usize,
    c: &CostVector<f64>,
    samples: usize,
    seed: u64,
    config: &FlowConfig<f64>,
) -> Result<SuiteReport> {
    let batch = run_flow_batch(n, c, samples, seed, config)?;
    let s = &batch.summary;
    let critical: BTreeSet<SignPattern> = SignPattern::all(n).collect();
    let all_known = batch.records.iter().all(|r| {
        r.result
            .classified_pattern
            .as_ref()
            .is_some_and(|p| critical.contains(p))
    });
    let fraction = if samples == 0 {
        1.0
    } else {
        s.at_minimum as f64 / samples as f64
    };
    let passed = s.converged == samples && all_known && fraction >= MIN_FRACTION_AT_MINIMUM;
    Ok(SuiteReport {
        name: "flow-classification",
        passed,
        checked: samples,
        max_residual: s.max_gradient_norm,
        threshold: config.gradient_tol,
        detail: format!(
            "converged {}/{samples}, classified {}, at index-0 point {} ({:.1}%), iterations max {}",
            s.converged,
            s.classified,
            s.at_minimum,
            100.0 * fraction,
            s.max_iterations
        ),
    })
}

/// All four suites at one configuration.
pub fn run_all(
    n: usize,
    c: &CostVector<f64>,
    samples: usize,
    seed: u64,
    config: &FlowConfig<f64>,
) -> Result<VerifyReport> {
    let suites = vec![
        gradient_suite(n, samples, seed)?,
        hessian_suite(n, samples, seed)?,
        index_suite(n, c, samples.min(50), seed)?,
        flow_suite(n, c, samples, seed, config)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        n,
        seed,
        samples,
        suites,
        passed,
    })
}
