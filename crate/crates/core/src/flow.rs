//! Riemannian steepest descent for `f_C` with an Armijo backtracking line
//! search on the exponential retraction.

use std::collections::BTreeMap;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{haar_sample, retract, sample_rng, CostVector, RotationMatrix, MEMBERSHIP_TOL};
use crate::morse::{index_by_formula, SignPattern};
use crate::numeric::{objective, riemannian_gradient};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig<T> {
    pub max_iterations: usize,
    /// Stop once the Euclidean norm of the pair-basis gradient is at most this.
    pub gradient_tol: T,
    pub armijo: T,
    pub shrink: T,
    /// First trial step of every line search; `None` means `1 / (2 c_n)`.
    pub initial_step: Option<T>,
    pub max_backtracks: usize,
    /// Cap on `step * |K|_F` so the exponential stays in its accurate range.
    pub max_step_norm: T,
    /// Allowed increase of `f_C` per accepted step, absorbing rounding in
    /// the objective once the decrease drops below machine precision.
    pub monotone_slack: T,
    pub classification_tol: T,
    pub membership_tol: T,
    pub record_trajectory: bool,
}

impl<T: Real> Default for FlowConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gradient_tol: T::lit(1e-8),
            armijo: T::lit(1e-4),
            shrink: T::lit(0.5),
            initial_step: None,
            max_backtracks: 60,
            max_step_norm: T::lit(2.0),
            monotone_slack: T::lit(1e-12),
            classification_tol: T::lit(1e-6),
            membership_tol: T::lit(MEMBERSHIP_TOL),
            record_trajectory: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationCap,
    /// No trial step satisfied the sufficient-decrease test.
    LineSearchFailed,
    /// An accepted step left the point unchanged in floating point.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Clone + Serialize"))]
pub struct FlowResult<T> {
    pub final_point: RotationMatrix<T>,
    pub final_value: T,
    pub iterations: usize,
    pub final_gradient_norm: T,
    pub converged: bool,
    pub termination: Termination,
    pub classified_pattern: Option<SignPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_values: Option<Vec<T>>,
}

/// Rounds `A` to a sign pattern when every diagonal entry is within `tol`
/// of `+-1` and every off-diagonal entry within `tol` of `0`.
pub fn classify<T: Real>(a: &RotationMatrix<T>, tol: T) -> Option<SignPattern> {
    let n = a.dim();
    let m = a.matrix();
    let mut eps = Vec::with_capacity(n);
    for r in 0..n {
        for c in 0..n {
            let x = m[(r, c)];
            if r == c {
                if (x - T::one()).abs() <= tol {
                    eps.push(1);
                } else if (x + T::one()).abs() <= tol {
                    eps.push(-1);
                } else {
                    return None;
                }
            } else if x.abs() > tol {
                return None;
            }
        }
    }
    SignPattern::new(eps).ok()
}

/// Descends from `start` until the gradient norm reaches the tolerance or
/// the iteration cap. Failing to converge is reported in the result, not as
/// an error.
pub fn gradient_flow<T: Real>(
    start: &RotationMatrix<T>,
    c: &CostVector<T>,
    config: &FlowConfig<T>,
) -> Result<FlowResult<T>> {
    c.check_dim(start.dim())?;
    let (orth, det) = start.residuals();
    if !(orth <= config.membership_tol && det <= config.membership_tol) {
        return Err(Error::OffManifold {
            orthogonality: orth.to_f64_lossy(),
            determinant: det.to_f64_lossy(),
        });
    }

    let two = T::one() + T::one();
    let first_step = config.initial_step.unwrap_or_else(|| {
        let top = *c.largest();
        if top > T::zero() {
            T::one() / (two * top)
        } else {
            T::one()
        }
    });

    let mut a = start.clone();
    let mut f = objective(&a, c)?;
    let mut trajectory = config.record_trajectory.then(|| vec![f]);
    let mut iterations = 0;
    let mut termination = Termination::IterationCap;
    let mut grad = riemannian_gradient(&a, c)?;
    let mut grad_norm = grad.norm();

    loop {
        if grad_norm <= config.gradient_tol {
            termination = Termination::Converged;
            break;
        }
        if iterations >= config.max_iterations {
            break;
        }
        let direction = grad.map(|&g| -g);
        let decrease_rate = grad_norm * grad_norm;
        let k_norm = two.sqrt() * grad_norm;
        let mut step = first_step.min(config.max_step_norm / k_norm);

        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let candidate = retract(&a, &direction, step)?;
            let fc = objective(&candidate, c)?;
            if fc <= f - config.armijo * step * decrease_rate + config.monotone_slack {
                accepted = Some((candidate, fc));
                break;
            }
            step = step * config.shrink;
        }
        let Some((candidate, fc)) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        if candidate == a {
            termination = Termination::Stalled;
            break;
        }
        a = candidate;
        f = fc;
        iterations += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(f);
        }
        grad = riemannian_gradient(&a, c)?;
        grad_norm = grad.norm();
    }

    let classified_pattern = classify(&a, config.classification_tol);
    Ok(FlowResult {
        final_point: a,
        final_value: f,
        iterations,
        final_gradient_norm: grad_norm,
        converged: termination == Termination::Converged,
        termination,
        classified_pattern,
        trajectory_values: trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Clone + Serialize"))]
pub struct FlowRecord<T> {
    pub sample: usize,
    #[serde(flatten)]
    pub result: FlowResult<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCount {
    pub eps: SignPattern,
    pub index: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSummary {
    pub samples: usize,
    pub converged: usize,
    pub classified: usize,
    pub unclassified: usize,
    /// Classified limits per pattern, ordered by pattern.
    pub limits: Vec<PatternCount>,
    /// Limits at the index-0 point.
    pub at_minimum: usize,
    pub max_gradient_norm: f64,
    pub min_iterations: usize,
    pub max_iterations: usize,
    pub mean_iterations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Clone + Serialize"))]
pub struct FlowBatch<T> {
    pub records: Vec<FlowRecord<T>>,
    pub summary: FlowSummary,
}

/// Runs the flow from `samples` Haar-random starts. Sample `k` draws from
/// stream `k` of `seed`, so the output does not depend on scheduling.
pub fn run_flow_batch<T>(
    n: usize,
    c: &CostVector<T>,
    samples: usize,
    seed: u64,
    config: &FlowConfig<T>,
) -> Result<FlowBatch<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    c.check_dim(n)?;
    let records = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k as u64);
            let start = haar_sample::<T, _>(n, &mut rng)?;
            Ok(FlowRecord {
                sample: k,
                result: gradient_flow(&start, c, config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(n, &records)?;
    Ok(FlowBatch { records, summary })
}

pub fn summarize<T: Real>(n: usize, records: &[FlowRecord<T>]) -> Result<FlowSummary> {
    let bottom = SignPattern::bottom(n)?;
    let mut limits: BTreeMap<SignPattern, usize> = BTreeMap::new();
    for r in records {
        if let Some(p) = &r.result.classified_pattern {
            *limits.entry(p.clone()).or_default() += 1;
        }
    }
    let classified: usize = limits.values().sum();
    let iters = records.iter().map(|r| r.result.iterations);
    let total_iters: usize = iters.clone().sum();
    Ok(FlowSummary {
        samples: records.len(),
        converged: records.iter().filter(|r| r.result.converged).count(),
        classified,
        unclassified: records.len() - classified,
        at_minimum: limits.get(&bottom).copied().unwrap_or(0),
        limits: limits
            .into_iter()
            .map(|(eps, count)| PatternCount {
                index: index_by_formula(&eps),
                eps,
                count,
            })
            .collect(),
        max_gradient_norm: records
            .iter()
            .map(|r| r.result.final_gradient_norm.to_f64_lossy())
            .fold(0.0, f64::max),
        min_iterations: iters.clone().min().unwrap_or(0),
        max_iterations: iters.max().unwrap_or(0),
        mean_iterations: if records.is_empty() {
            0.0
        } else {
            total_iters as f64 / records.len() as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn starts_at_minimum_take_no_steps() {
        for n in 1..=5 {
            let c = CostVector::<f64>::default_for(n).unwrap();
            let bottom = SignPattern::bottom(n).unwrap();
            let r = gradient_flow(&bottom.embed(), &c, &FlowConfig::default()).unwrap();
            assert_eq!(r.iterations, 0);
            assert!(r.converged);
            assert_eq!(r.classified_pattern, Some(bottom));
        }
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let c = CostVector::<f64>::default_for(4).unwrap();
        let r = gradient_flow(&RotationMatrix::identity(4), &c, &FlowConfig::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.classified_pattern, Some(SignPattern::top(4).unwrap()));
    }

    #[test]
    fn descends_monotonically_to_a_critical_point() {
        let c = CostVector::<f64>::default_for(3).unwrap();
        let config = FlowConfig {
            record_trajectory: true,
            ..FlowConfig::default()
        };
        let mut rng = sample_rng(17, 0);
        let start = haar_sample(3, &mut rng).unwrap();
        let r = gradient_flow(&start, &c, &config).unwrap();
        assert!(r.converged, "{r:?}");
        let t = r.trajectory_values.unwrap();
        assert_eq!(t.len(), r.iterations + 1);
        assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(r.classified_pattern.is_some());
    }

    #[test]
    fn off_manifold_start_is_rejected() {
        let c = CostVector::<f64>::default_for(2).unwrap();
        let bad = RotationMatrix::new_unchecked(Matrix::from_diagonal(&[1.0, -1.0]));
        assert!(matches!(
            gradient_flow(&bad, &c, &FlowConfig::default()),
            Err(Error::OffManifold { .. })
        ));
    }

    #[test]
    fn iteration_cap_is_a_result() {
        let c = CostVector::<f64>::default_for(3).unwrap();
        let config = FlowConfig {
            max_iterations: 2,
            ..FlowConfig::default()
        };
        let mut rng = sample_rng(4, 0);
        let r = gradient_flow(&haar_sample(3, &mut rng).unwrap(), &c, &config).unwrap();
        assert!(!r.converged);
        assert_eq!(r.termination, Termination::IterationCap);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn classification_rounding() {
        let near = RotationMatrix::new_unchecked(
            Matrix::from_rows(vec![vec![-1.0 + 1e-8, 1e-7], vec![-1e-7, -1.0]]).unwrap(),
        );
        assert_eq!(
            classify(&near, 1e-6),
            Some(SignPattern::new(vec![-1, -1]).unwrap())
        );
        assert_eq!(classify(&near, 1e-9), None);
    }

    #[test]
    fn batch_is_reproducible() {
        let c = CostVector::<f64>::default_for(3).unwrap();
        let a = run_flow_batch(3, &c, 8, 99, &FlowConfig::default()).unwrap();
        let b = run_flow_batch(3, &c, 8, 99, &FlowConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.records.iter().map(|r| r.sample).collect::<Vec<_>>(),
            (0..8).collect::<Vec<_>>()
        );
    }
}
