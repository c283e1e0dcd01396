//! Search over `(w_proton, w_electron, r0)` for the lowest ground-state
//! energy. Every evaluation reuses the configured seed, so differences
//! between parameter points are not swamped by independent sampling noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble_and_solve, RunConfig};
use crate::basis::BasisParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub w_proton: f64,
    pub w_electron: f64,
    pub r0: f64,
}

impl ParamPoint {
    pub fn of(p: &BasisParams) -> Self {
        Self { w_proton: p.w_proton, w_electron: p.w_electron, r0: p.r0 }
    }

    fn to_array(self) -> [f64; 3] {
        [self.w_proton, self.w_electron, self.r0]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self { w_proton: a[0], w_electron: a[1], r0: a[2] }
    }

    fn apply(self, base: &BasisParams) -> BasisParams {
        BasisParams { w_proton: self.w_proton, w_electron: self.w_electron, r0: self.r0, ..*base }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchStrategy {
    /// Cartesian product, `w_proton` varying slowest.
    Grid { w_proton: Vec<f64>, w_electron: Vec<f64>, r0: Vec<f64> },
    /// Nelder-Mead from the configured parameters, with initial edge
    /// lengths `step` (same order as [`ParamPoint`]).
    Simplex { step: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: ParamPoint,
    /// `None` when the pipeline failed at this point.
    pub energy: Option<f64>,
    pub stderr: Option<f64>,
    /// Lowest energy seen up to and including this evaluation.
    pub best_so_far: Option<f64>,
}

impl Evaluation {
    fn score(&self) -> f64 {
        self.energy.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: ParamPoint,
    pub best_energy: f64,
    pub best_stderr: f64,
    pub converged: bool,
    pub trace: Vec<Evaluation>,
}

fn evaluate(config: &RunConfig, point: ParamPoint) -> Evaluation {
    let run = RunConfig { basis: point.apply(&config.basis), output: None, ..config.clone() };
    match assemble_and_solve(&run).ok().and_then(|r| r.ground_energy()) {
        Some(e) => Evaluation { params: point, energy: Some(e.value), stderr: Some(e.stderr), best_so_far: None },
        None => Evaluation { params: point, energy: None, stderr: None, best_so_far: None },
    }
}

/// Runs at most `budget` pipeline evaluations.
pub fn optimize_parameters(config: &RunConfig, search: &SearchStrategy, budget: usize) -> Result<OptimizationResult> {
    config.validate()?;
    if budget == 0 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    let (mut trace, converged) = match search {
        SearchStrategy::Grid { w_proton, w_electron, r0 } => {
            let points: Vec<ParamPoint> = w_proton
                .iter()
                .flat_map(|&a| w_electron.iter().flat_map(move |&b| r0.iter().map(move |&c| [a, b, c])))
                .map(ParamPoint::from_array)
                .take(budget)
                .collect();
            if points.is_empty() {
                return Err(Error::invalid("grid has no points"));
            }
            let trace: Vec<Evaluation> = points.par_iter().map(|&p| evaluate(config, p)).collect();
            (trace, true)
        }
        SearchStrategy::Simplex { step } => nelder_mead(config, *step, budget),
    };

    let mut best: Option<usize> = None;
    for k in 0..trace.len() {
        if trace[k].energy.is_some() && best.is_none_or(|b| trace[k].score() < trace[b].score()) {
            best = Some(k);
        }
        trace[k].best_so_far = best.and_then(|b| trace[b].energy);
    }
    let best = best.ok_or_else(|| Error::invalid("every evaluation failed"))?;
    Ok(OptimizationResult {
        best: trace[best].params,
        best_energy: trace[best].score(),
        best_stderr: trace[best].stderr.unwrap_or(f64::NAN),
        converged,
        trace,
    })
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn nelder_mead(config: &RunConfig, step: [f64; 3], budget: usize) -> (Vec<Evaluation>, bool) {
    let mut trace = Vec::new();
    let eval = |x: [f64; 3], trace: &mut Vec<Evaluation>| -> Option<Evaluation> {
        if trace.len() >= budget {
            return None;
        }
        let e = evaluate(config, ParamPoint::from_array(x));
        trace.push(e);
        Some(e)
    };

    let x0 = ParamPoint::of(&config.basis).to_array();
    let mut simplex: Vec<([f64; 3], Evaluation)> = Vec::with_capacity(4);
    for k in 0..4 {
        let mut x = x0;
        if k > 0 {
            x[k - 1] += step[k - 1];
        }
        match eval(x, &mut trace) {
            Some(e) => simplex.push((x, e)),
            None => return (trace, false),
        }
    }

    loop {
        simplex.sort_by(|a, b| a.1.score().total_cmp(&b.1.score()));
        let (f_best, f_worst) = (simplex[0].1.score(), simplex[3].1.score());
        if let Some(se) = simplex[0].1.stderr {
            if f_worst.is_finite() && f_worst - f_best < 2.0 * se {
                return (trace, true);
            }
        }
        let mut c = [0.0; 3];
        for (x, _) in &simplex[..3] {
            for d in 0..3 {
                c[d] += x[d] / 3.0;
            }
        }
        let toward = |t: f64, x: [f64; 3]| -> [f64; 3] { std::array::from_fn(|d| c[d] + t * (x[d] - c[d])) };
        let worst = simplex[3].0;
        let xr = toward(-REFLECT, worst);
        let Some(er) = eval(xr, &mut trace) else { return (trace, false) };
        let f_second = simplex[2].1.score();

        if er.score() < f_best {
            let xe = toward(-REFLECT * EXPAND, worst);
            let Some(ee) = eval(xe, &mut trace) else { return (trace, false) };
            simplex[3] = if ee.score() < er.score() { (xe, ee) } else { (xr, er) };
            continue;
        }
        if er.score() < f_second {
            simplex[3] = (xr, er);
            continue;
        }
        let outside = er.score() < f_worst;
        let xc = if outside { toward(-REFLECT * CONTRACT, worst) } else { toward(CONTRACT, worst) };
        let Some(ec) = eval(xc, &mut trace) else { return (trace, false) };
        let accept = if outside { ec.score() <= er.score() } else { ec.score() < f_worst };
        if accept {
            simplex[3] = (xc, ec);
            continue;
        }
        let xb = simplex[0].0;
        for k in 1..4 {
            let x: [f64; 3] = std::array::from_fn(|d| xb[d] + SHRINK * (simplex[k].0[d] - xb[d]));
            let Some(e) = eval(x, &mut trace) else { return (trace, false) };
            simplex[k] = (x, e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        RunConfig { n_samples: 20_000, n_blocks: 10, seed: 3, ..RunConfig::default() }
    }

    #[test]
    fn grid_includes_default_point() {
        let cfg = quick();
        let search = SearchStrategy::Grid {
            w_proton: vec![12.0, 18.0, 24.0],
            w_electron: vec![0.35, 0.45, 0.55],
            r0: vec![0.9, 1.0, 1.1],
        };
        let res = optimize_parameters(&cfg, &search, 100).unwrap();
        assert_eq!(res.trace.len(), 27);
        let default = res.trace.iter().find(|e| e.params == ParamPoint::of(&cfg.basis)).unwrap();
        assert!(res.best_energy <= default.energy.unwrap());
        let single = assemble_and_solve(&cfg).unwrap().ground_energy().unwrap().value;
        assert_eq!(default.energy.unwrap(), single);
    }

    #[test]
    fn trace_is_monotone_and_budget_respected() {
        let res = optimize_parameters(&quick(), &SearchStrategy::Simplex { step: [3.0, 0.05, 0.1] }, 12).unwrap();
        assert!(res.trace.len() <= 12);
        let best: Vec<f64> = res.trace.iter().filter_map(|e| e.best_so_far).collect();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*best.last().unwrap(), res.best_energy);
    }

    #[test]
    fn failed_points_are_recorded() {
        let search = SearchStrategy::Grid { w_proton: vec![-1.0, 18.0], w_electron: vec![0.45], r0: vec![1.0] };
        let res = optimize_parameters(&quick(), &search, 10).unwrap();
        assert_eq!(res.trace[0].energy, None);
        assert_eq!(res.trace[0].best_so_far, None);
        assert!(res.trace[1].energy.is_some());
        assert_eq!(res.best.w_proton, 18.0);
    }

    #[test]
    fn zero_budget_rejected() {
        assert!(optimize_parameters(&quick(), &SearchStrategy::Simplex { step: [1.0; 3] }, 0).is_err());
    }
}
