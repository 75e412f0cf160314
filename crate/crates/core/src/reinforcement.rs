//! Fitness reinforcement on regenerated Bianconi-Barabási networks.
//!
//! Each period a fresh network is grown from the agents' current fitness.
//! `shocks` edges are then drawn uniformly (with replacement) and both
//! endpoints of each are credited with one reward draw. The accumulated
//! experience is added to fitness at the end of the period and the result is
//! floored at zero.

use std::ops::{Deref, DerefMut};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{generate_bb, BBParams};

/// One real value per agent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FitnessVector(pub Vec<f64>);

impl FitnessVector {
    pub fn constant(n: usize, value: f64) -> Self {
        FitnessVector(vec![value; n])
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `max - min`, zero for an empty vector.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .0
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if self.0.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

impl Deref for FitnessVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for FitnessVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for FitnessVector {
    fn from(v: Vec<f64>) -> Self {
        FitnessVector(v)
    }
}

/// Rewards are `+reward` with probability `p` and `-reward` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardScheme {
    pub p: f64,
    pub reward: f64,
}

impl Default for RewardScheme {
    fn default() -> Self {
        RewardScheme { p: 1.0, reward: 0.05 }
    }
}

impl RewardScheme {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::validation("p", "p ∈ [0,1]"));
        }
        if !(self.reward > 0.0 && self.reward.is_finite()) {
            return Err(Error::validation("reward", "reward > 0"));
        }
        Ok(())
    }
}

pub fn draw_reward<R: Rng + ?Sized>(scheme: &RewardScheme, rng: &mut R) -> f64 {
    if rng.random::<f64>() < scheme.p {
        scheme.reward
    } else {
        -scheme.reward
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model1Config {
    pub n: usize,
    pub shocks: usize,
    pub periods: usize,
    pub scheme: RewardScheme,
    pub initial_fitness: f64,
    pub bb: BBParams,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for Model1Config {
    fn default() -> Self {
        Model1Config {
            n: 100,
            shocks: 46,
            periods: 20,
            scheme: RewardScheme::default(),
            initial_fitness: 1.0,
            bb: BBParams::default(),
            replications: 1,
            master_seed: 0,
        }
    }
}

impl Model1Config {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::validation("n", "n >= 2"));
        }
        self.bb.validate()?;
        if self.n < self.bb.m0 {
            return Err(Error::validation("n", "n >= m0"));
        }
        self.scheme.validate()?;
        if !(self.initial_fitness > 0.0 && self.initial_fitness.is_finite()) {
            return Err(Error::validation("initial_fitness", "initial_fitness > 0"));
        }
        if self.replications == 0 {
            return Err(Error::validation("replications", "replications >= 1"));
        }
        Ok(())
    }
}

/// Result of one period.
#[derive(Clone, Debug)]
pub struct PeriodOutcome {
    pub fitness: FitnessVector,
    /// Number of shocks each agent took part in.
    pub hits: Vec<u32>,
    /// Degrees in this period's network.
    pub degrees: Vec<usize>,
    /// Every fitness was zero, so the network was grown with uniform attachment.
    pub degenerate: bool,
}

pub fn run_period<R: Rng + ?Sized>(
    fitness: &FitnessVector,
    config: &Model1Config,
    rng: &mut R,
) -> Result<PeriodOutcome> {
    let n = fitness.len();
    let degenerate = fitness.iter().all(|&f| f == 0.0);
    let graph = generate_bb(n, &config.bb, fitness, rng)?;

    let mut experience = vec![0.0; n];
    let mut hits = vec![0u32; n];
    for _ in 0..config.shocks {
        let (a, b) = graph.random_edge(rng)?;
        let reward = draw_reward(&config.scheme, rng);
        experience[a.index()] += reward;
        experience[b.index()] += reward;
        hits[a.index()] += 1;
        hits[b.index()] += 1;
    }

    let next = fitness
        .iter()
        .zip(&experience)
        .map(|(f, e)| (f + e).max(0.0))
        .collect();
    Ok(PeriodOutcome {
        fitness: FitnessVector(next),
        hits,
        degrees: graph.degrees(),
        degenerate,
    })
}

#[derive(Clone, Debug)]
pub struct Model1Run {
    /// Fitness at every period boundary; entry 0 is the initial vector.
    pub trajectory: Vec<FitnessVector>,
    /// Shocks received per agent over the whole run.
    pub total_hits: Vec<u64>,
    /// Sum over periods of each agent's degree.
    pub degree_sums: Vec<u64>,
    /// Periods that fell back to uniform attachment.
    pub degenerate_periods: usize,
}

impl Model1Run {
    pub fn final_fitness(&self) -> &FitnessVector {
        self.trajectory.last().expect("trajectory holds the initial vector")
    }
}

pub fn simulate_model1<R: Rng + ?Sized>(config: &Model1Config, rng: &mut R) -> Result<Model1Run> {
    config.validate()?;
    let n = config.n;
    let mut run = Model1Run {
        trajectory: Vec::with_capacity(config.periods + 1),
        total_hits: vec![0; n],
        degree_sums: vec![0; n],
        degenerate_periods: 0,
    };
    run.trajectory.push(FitnessVector::constant(n, config.initial_fitness));
    for _ in 0..config.periods {
        let outcome = run_period(run.final_fitness(), config, rng)?;
        for i in 0..n {
            run.total_hits[i] += u64::from(outcome.hits[i]);
            run.degree_sums[i] += outcome.degrees[i] as u64;
        }
        run.degenerate_periods += usize::from(outcome.degenerate);
        run.trajectory.push(outcome.fitness);
    }
    Ok(run)
}

/// Per-run statistics. Ratios are `None` when their denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mean: f64,
    pub max_to_median: Option<f64>,
    pub max_to_min: Option<f64>,
}

/// Median with the even-length convention of averaging the two middle values.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    if len % 2 == 1 {
        sorted[len / 2]
    } else {
        (sorted[len / 2 - 1] + sorted[len / 2]) / 2.0
    }
}

pub fn summarize(fitness: &[f64]) -> RunSummary {
    assert!(!fitness.is_empty(), "cannot summarize an empty fitness vector");
    let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
    let max = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let med = median(fitness);
    let ratio = |den: f64| if den == 0.0 { None } else { Some(max / den) };
    RunSummary {
        mean,
        max_to_median: ratio(med),
        max_to_min: ratio(min),
    }
}
