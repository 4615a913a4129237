//! Walk experiments: probability traces, eta and layer scans, peak filtering,
//! initial-coin optimization, and the classical random-walk baseline.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::channel::PhaseDampingChannel;
use crate::coin::CoinOperator;
use crate::error::{Error, Result};
use crate::graph::{build_glued_trees, GluedTreesSpec};
use crate::state::{InitialCondition, WalkState};
use crate::walk::{shift_operator, step_density, step_pure, ShiftOperator};

/// Decoherence grid used throughout the figures: eta = 1.0 down to 0.8.
pub const DEFAULT_ETA_GRID: [f64; 5] = [1.0, 0.95, 0.9, 0.85, 0.8];

/// Probability below which a vertex counts as not yet reached.
pub const DEFAULT_REACHED_THRESHOLD: f64 = 0.05;

/// Peak filter keeps vertices with P > fraction * P_target.
pub const DEFAULT_PEAK_FRACTION: f64 = 0.25;

/// Step budget that safely covers the target-probability peak for depth n.
pub fn peak_search_steps(depth: usize) -> usize {
    3 * depth + 10
}

/// Largest density matrix the walk runner will allocate (6 GiB).
pub const DENSITY_MEMORY_LIMIT_BYTES: u64 = 6 << 30;

/// Full description of a decoherent-walk experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GluedTreesSpec,
    /// Number of walk steps T; probabilities are recorded at t = 0..=T.
    pub steps: usize,
    /// Dephasing strengths to run, each in [0, 1].
    pub etas: Vec<f64>,
    pub initial: InitialCondition,
    /// Threshold for "the walker has reached a vertex".
    pub reached_threshold: f64,
    /// Fraction of the target probability used by the peak filter.
    pub peak_fraction: f64,
}

impl ExperimentConfig {
    /// Config with the default initial coin, reached threshold, and filter.
    pub fn new(graph: GluedTreesSpec, steps: usize, etas: Vec<f64>) -> Result<Self> {
        let config = Self {
            graph,
            steps,
            etas,
            initial: InitialCondition::default_glued_trees(),
            reached_threshold: DEFAULT_REACHED_THRESHOLD,
            peak_fraction: DEFAULT_PEAK_FRACTION,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph.depth < 1 {
            return Err(Error::InvalidDepth(self.graph.depth));
        }
        if self.steps < 1 {
            return Err(Error::InvalidConfig("steps must be >= 1".into()));
        }
        if self.etas.is_empty() {
            return Err(Error::InvalidConfig("eta list must not be empty".into()));
        }
        for &eta in &self.etas {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::EtaOutOfRange(eta));
            }
        }
        if !(0.0..1.0).contains(&self.reached_threshold) || self.reached_threshold == 0.0 {
            return Err(Error::InvalidConfig(
                "reached threshold must lie in (0, 1)".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.peak_fraction) || self.peak_fraction == 0.0 {
            return Err(Error::InvalidConfig(
                "peak fraction must lie in (0, 1)".into(),
            ));
        }
        if self.initial.coin_dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                actual: self.initial.coin_dim(),
            });
        }
        Ok(())
    }
}

/// One eta's worth of recorded distributions; `probs[t][v]` for t = 0..=T.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRun {
    /// Dephasing strength; `None` marks the classical baseline.
    pub eta: Option<f64>,
    probs: Vec<Vec<f64>>,
}

impl TraceRun {
    pub fn probabilities(&self, step: usize) -> &[f64] {
        &self.probs[step]
    }

    /// Recorded step count T (distributions exist for 0..=T).
    pub fn steps(&self) -> usize {
        self.probs.len() - 1
    }
}

/// Vertex probabilities per (eta, step), the experiment output.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrace {
    graph: GluedTreesSpec,
    steps: usize,
    runs: Vec<TraceRun>,
}

impl ProbabilityTrace {
    pub fn graph(&self) -> &GluedTreesSpec {
        &self.graph
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn target(&self) -> usize {
        self.graph.target_vertex()
    }

    pub fn runs(&self) -> &[TraceRun] {
        &self.runs
    }

    pub fn run_for_eta(&self, eta: f64) -> Option<&TraceRun> {
        self.runs
            .iter()
            .find(|run| run.eta.is_some_and(|e| (e - eta).abs() <= 1e-12))
    }

    /// Distribution at (eta, step); errors if the cell is absent.
    pub fn probabilities(&self, eta: f64, step: usize) -> Result<&[f64]> {
        let run = self
            .run_for_eta(eta)
            .ok_or(Error::NotInTrace { eta, step })?;
        if step > run.steps() {
            return Err(Error::NotInTrace { eta, step });
        }
        Ok(run.probabilities(step))
    }

    /// First step at which the target probability reaches `threshold`.
    pub fn first_reached(&self, eta: f64, threshold: f64) -> Result<Option<usize>> {
        let run = self
            .run_for_eta(eta)
            .ok_or(Error::NotInTrace { eta, step: 0 })?;
        let target = self.target();
        Ok((0..=run.steps()).find(|&t| run.probabilities(t)[target] >= threshold))
    }
}

fn density_bytes(spec: &GluedTreesSpec) -> u64 {
    let n = (spec.num_vertices() * 3) as u64;
    n * n * std::mem::size_of::<num_complex::Complex64>() as u64
}

fn check_density_feasible(spec: &GluedTreesSpec) -> Result<()> {
    let needed = density_bytes(spec);
    if needed > DENSITY_MEMORY_LIMIT_BYTES {
        return Err(Error::MemoryInfeasible {
            layers: spec.depth,
            needed_bytes: needed,
            limit_bytes: DENSITY_MEMORY_LIMIT_BYTES,
        });
    }
    Ok(())
}

fn record(state: &WalkState) -> Vec<f64> {
    state.measure_positions()
}

fn run_single_eta(
    graph_vertices: usize,
    shift: &ShiftOperator,
    coin: &CoinOperator,
    initial: &InitialCondition,
    steps: usize,
    eta: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut probs = Vec::with_capacity(steps + 1);
    if eta == 1.0 {
        // Ideal walk: the dephasing map is the identity, so the pure-state
        // path is exact and O(N) per step instead of O(N^2).
        let mut state = WalkState::pure(graph_vertices, initial)?;
        probs.push(record(&state));
        for _ in 0..steps {
            step_pure(&mut state, coin, shift)?;
            probs.push(record(&state));
        }
    } else {
        let channel = PhaseDampingChannel::new(eta, coin.dim())?;
        let mut state = WalkState::density(graph_vertices, initial)?;
        probs.push(record(&state));
        for _ in 0..steps {
            step_density(&mut state, coin, shift)?;
            channel.apply_closed_form(&mut state)?;
            probs.push(record(&state));
        }
    }
    Ok(probs)
}

/// Runs the decoherent walk for every eta in the config.
///
/// Each step applies the unitary U = S (1 (x) C) and then the dephasing
/// channel; no channel is applied before the first step. Distributions are
/// recorded at t = 0 and after every step. Runs for different eta values are
/// independent and execute in parallel.
pub fn run_walk(config: &ExperimentConfig) -> Result<ProbabilityTrace> {
    config.validate()?;
    if config.etas.iter().any(|&eta| eta < 1.0) {
        check_density_feasible(&config.graph)?;
    }
    let graph = build_glued_trees(&config.graph)?;
    let shift = shift_operator(&graph);
    let coin = CoinOperator::grover(3)?;
    let runs: Result<Vec<TraceRun>> = config
        .etas
        .par_iter()
        .map(|&eta| {
            run_single_eta(
                graph.num_vertices(),
                &shift,
                &coin,
                &config.initial,
                config.steps,
                eta,
            )
            .map(|probs| TraceRun {
                eta: Some(eta),
                probs,
            })
        })
        .collect();
    Ok(ProbabilityTrace {
        graph: config.graph,
        steps: config.steps,
        runs: runs?,
    })
}

/// Projects the trace onto the target vertex: one probability row per run.
pub fn target_curve(trace: &ProbabilityTrace) -> Vec<(Option<f64>, Vec<f64>)> {
    let target = trace.target();
    trace
        .runs()
        .iter()
        .map(|run| {
            let curve = (0..=run.steps())
                .map(|t| run.probabilities(t)[target])
                .collect();
            (run.eta, curve)
        })
        .collect()
}

/// One point of an eta scan: P(target, step) at the given dephasing strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaScanPoint {
    pub step: usize,
    pub eta: f64,
    pub probability: f64,
}

/// Target probability as a function of eta, for each step of interest.
///
/// Points are ordered by the requested steps, then by the eta grid order.
pub fn eta_scan(
    graph: GluedTreesSpec,
    steps_of_interest: &[usize],
    eta_grid: &[f64],
    initial: &InitialCondition,
) -> Result<Vec<EtaScanPoint>> {
    if steps_of_interest.is_empty() {
        return Err(Error::InvalidConfig("no steps of interest".into()));
    }
    let max_step = *steps_of_interest.iter().max().unwrap();
    let config = ExperimentConfig::new(graph, max_step, eta_grid.to_vec())?
        .with_initial(initial.clone());
    let trace = run_walk(&config)?;
    let target = trace.target();
    let mut points = Vec::with_capacity(steps_of_interest.len() * eta_grid.len());
    for &step in steps_of_interest {
        for run in trace.runs() {
            points.push(EtaScanPoint {
                step,
                eta: run.eta.expect("quantum runs carry eta"),
                probability: run.probabilities(step)[target],
            });
        }
    }
    Ok(points)
}

/// Vertices whose probability exceeds `fraction * P_target` at (eta, step),
/// sorted by descending probability (ties by vertex index).
pub fn peak_filter(
    trace: &ProbabilityTrace,
    eta: f64,
    step: usize,
    fraction: f64,
) -> Result<Vec<(usize, f64)>> {
    let probs = trace.probabilities(eta, step)?;
    let threshold = fraction * probs[trace.target()];
    let mut peaks: Vec<(usize, f64)> = probs
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| p > threshold)
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(peaks)
}

/// Peak target probability for one (layers, eta) cell of a layer scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerPeak {
    pub layers: usize,
    pub eta: f64,
    pub peak_step: usize,
    pub peak_probability: f64,
}

/// Scans graph sizes: for each depth n in `layers` and each eta, runs
/// 3n + 10 steps and reports the maximum-over-time target probability.
///
/// Cells are ordered by depth, then by the eta grid order. Depths whose
/// density matrix would exceed the memory budget are rejected.
pub fn layer_scan(
    layers: RangeInclusive<usize>,
    eta_grid: &[f64],
    initial: &InitialCondition,
) -> Result<Vec<LayerPeak>> {
    if eta_grid.is_empty() {
        return Err(Error::InvalidConfig("eta grid must not be empty".into()));
    }
    let mut rows = Vec::new();
    for depth in layers {
        let spec = GluedTreesSpec::new(depth);
        let steps = peak_search_steps(depth);
        let config =
            ExperimentConfig::new(spec, steps, eta_grid.to_vec())?.with_initial(initial.clone());
        let trace = run_walk(&config)?;
        let target = trace.target();
        for run in trace.runs() {
            let mut peak_step = 0usize;
            let mut peak = f64::MIN;
            for t in 0..=run.steps() {
                let p = run.probabilities(t)[target];
                if p > peak {
                    peak = p;
                    peak_step = t;
                }
            }
            rows.push(LayerPeak {
                layers: depth,
                eta: run.eta.expect("quantum runs carry eta"),
                peak_step,
                peak_probability: peak,
            });
        }
    }
    Ok(rows)
}

/// Result of the initial-coin grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOptimum {
    pub alpha: f64,
    pub beta: f64,
    pub peak_probability: f64,
    pub peak_step: usize,
}

/// Grid step of the coin optimizer.
pub const COIN_GRID_STEP: f64 = 1e-3;

/// Searches real symmetric coin states (alpha, beta, beta) for the beta that
/// maximizes the ideal walk's peak target probability.
///
/// The grid covers beta in [0, 1/sqrt(2)] in steps of 1e-3; ties break toward
/// smaller beta.
pub fn optimize_initial_coin(graph: GluedTreesSpec, steps: usize) -> Result<CoinOptimum> {
    let limit = std::f64::consts::FRAC_1_SQRT_2;
    let count = (limit / COIN_GRID_STEP).floor() as usize;
    let betas: Vec<f64> = (0..=count).map(|i| i as f64 * COIN_GRID_STEP).collect();
    optimize_initial_coin_over(graph, steps, &betas)
}

/// Coin grid search over an explicit list of beta values.
pub fn optimize_initial_coin_over(
    graph: GluedTreesSpec,
    steps: usize,
    betas: &[f64],
) -> Result<CoinOptimum> {
    if betas.is_empty() {
        return Err(Error::InvalidConfig("beta grid must not be empty".into()));
    }
    let built = build_glued_trees(&graph)?;
    let shift = shift_operator(&built);
    let coin = CoinOperator::grover(3)?;
    let target = graph.target_vertex();
    let evaluated: Result<Vec<(f64, usize)>> = betas
        .par_iter()
        .map(|&beta| {
            let initial = InitialCondition::symmetric_triple(0, beta)?;
            let mut state = WalkState::pure(built.num_vertices(), &initial)?;
            let mut peak = state.measure_positions()[target];
            let mut peak_step = 0usize;
            for t in 1..=steps {
                step_pure(&mut state, &coin, &shift)?;
                let p = state.measure_positions()[target];
                if p > peak {
                    peak = p;
                    peak_step = t;
                }
            }
            Ok((peak, peak_step))
        })
        .collect();
    let evaluated = evaluated?;
    let mut best = 0usize;
    for (i, &(peak, _)) in evaluated.iter().enumerate() {
        if peak > evaluated[best].0 {
            best = i;
        }
    }
    let beta = betas[best];
    Ok(CoinOptimum {
        alpha: (1.0 - 2.0 * beta * beta).sqrt(),
        beta,
        peak_probability: evaluated[best].0,
        peak_step: evaluated[best].1,
    })
}

/// Exact classical random walk: from each vertex, each of the three ports is
/// taken with probability 1/3 (self loops stay put). Distribution iteration,
/// not sampling.
pub fn classical_baseline(graph: GluedTreesSpec, steps: usize) -> Result<ProbabilityTrace> {
    let built = build_glued_trees(&graph)?;
    let v = built.num_vertices();
    let mut current = vec![0.0f64; v];
    current[0] = 1.0;
    let mut probs = Vec::with_capacity(steps + 1);
    probs.push(current.clone());
    for _ in 0..steps {
        let mut next = vec![0.0f64; v];
        for (vertex, &p) in current.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let share = p / 3.0;
            for c in 0..3 {
                let (w, _) = built.port(vertex, c);
                next[w] += share;
            }
        }
        probs.push(next.clone());
        current = next;
    }
    Ok(ProbabilityTrace {
        graph,
        steps,
        runs: vec![TraceRun { eta: None, probs }],
    })
}
