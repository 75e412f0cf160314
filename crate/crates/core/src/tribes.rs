//! Tribe formation: bounded-confidence exchange on a network whose ties decay
//! unless used and are rewired towards similar, well-connected agents.
//!
//! One period consists of, in order:
//!
//! 1. `shocks` uniform edge draws; the endpoints average their fitness if
//!    they are within `epsilon` of each other, which counts as a success on
//!    that edge;
//! 2. every edge's survival weight is updated, `q ← min(1, α^(1-n) q)`;
//! 3. every edge dies with probability `1 - q`;
//! 4. each dead edge is rewired by one of its endpoints (by default the one
//!    with fewer ties, see [`RewireEndpoint`]) to a partner drawn with
//!    probability proportional to `similarity × degree`; the new tie starts
//!    at `q = 1`;
//! 5. success counters are reset.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{generate_bb, select_by_kernel, BBParams};
use crate::graph::{AgentId, SocialGraph};
use crate::reinforcement::FitnessVector;

/// Similarity kernel used when choosing a new partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `1 / (1 + |f_i - f_j|)`
    Reciprocal,
    /// `1` inside the confidence threshold, `out_weight` outside.
    Ingroup,
}

impl std::str::FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reciprocal" => Ok(Kernel::Reciprocal),
            "ingroup" => Ok(Kernel::Ingroup),
            other => Err(Error::validation(
                "kernel",
                format!("expected `reciprocal` or `ingroup`, got `{other}`"),
            )),
        }
    }
}

/// Which endpoint of a dead tie keeps its stub and draws the new partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewireEndpoint {
    /// Fair coin between the two endpoints.
    Random,
    /// The endpoint with fewer ties, coin on equal degree. An agent never
    /// loses its last tie unless its partner is also down to one.
    LowerDegree,
}

impl std::str::FromStr for RewireEndpoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(RewireEndpoint::Random),
            "lower-degree" => Ok(RewireEndpoint::LowerDegree),
            other => Err(Error::validation(
                "rewire_endpoint",
                format!("expected `random` or `lower-degree`, got `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model2Config {
    pub n: usize,
    pub shocks: usize,
    pub periods: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub kernel: Kernel,
    pub out_weight: f64,
    pub bb: BBParams,
    /// Largest gap between consecutive sorted fitness values inside one group.
    pub group_gap: f64,
    /// Use the sum form `|f_a + f_b| <= ε` as the exchange condition.
    pub strict_eq4: bool,
    pub rewire_endpoint: RewireEndpoint,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for Model2Config {
    fn default() -> Self {
        Model2Config {
            n: 80,
            shocks: 10,
            periods: 200,
            alpha: 0.9,
            epsilon: 0.5,
            kernel: Kernel::Reciprocal,
            out_weight: 0.01,
            bb: BBParams::default(),
            group_gap: 1e-3,
            strict_eq4: false,
            rewire_endpoint: RewireEndpoint::LowerDegree,
            replications: 1,
            master_seed: 0,
        }
    }
}

impl Model2Config {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::validation("n", "n >= 2"));
        }
        self.bb.validate()?;
        if self.n < self.bb.m0 {
            return Err(Error::validation("n", "n >= m0"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::validation("alpha", "alpha ∈ (0,1)"));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::validation("epsilon", "epsilon >= 0"));
        }
        if !(self.out_weight > 0.0 && self.out_weight <= 1.0) {
            return Err(Error::validation("out_weight", "out_weight ∈ (0,1]"));
        }
        if !(self.group_gap > 0.0 && self.group_gap.is_finite()) {
            return Err(Error::validation("group_gap", "group_gap > 0"));
        }
        if self.replications == 0 {
            return Err(Error::validation("replications", "replications >= 1"));
        }
        Ok(())
    }
}

/// Average `fa` and `fb` when `|fa - fb| <= epsilon`.
pub fn bounded_confidence_update(fa: f64, fb: f64, epsilon: f64) -> (f64, f64, bool) {
    exchange(fa, fb, epsilon, false)
}

fn exchange(fa: f64, fb: f64, epsilon: f64, strict_sum: bool) -> (f64, f64, bool) {
    let distance = if strict_sum { (fa + fb).abs() } else { (fa - fb).abs() };
    if distance <= epsilon {
        let mid = (fa + fb) / 2.0;
        (mid, mid, true)
    } else {
        (fa, fb, false)
    }
}

/// `min(1, α^(1-n) q)`: unused ties shrink by `α`, one success keeps `q`,
/// more successes strengthen it up to 1.
pub fn decay_q(q: f64, n: u32, alpha: f64) -> f64 {
    let exponent = 1 - i64::from(n);
    let factor = alpha.powi(exponent.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
    (factor * q).min(1.0)
}

pub fn similarity_weight(fi: f64, fj: f64, kernel: Kernel, epsilon: f64, out_weight: f64) -> f64 {
    let d = (fi - fj).abs();
    match kernel {
        Kernel::Reciprocal => 1.0 / (1.0 + d),
        Kernel::Ingroup => {
            if d < epsilon {
                1.0
            } else {
                out_weight
            }
        }
    }
}

/// Draw a new partner for `agent` among all other agents, with probability
/// proportional to `similarity × degree`. Current neighbours are not excluded.
pub fn rewire_target<R: Rng + ?Sized>(
    agent: AgentId,
    graph: &SocialGraph,
    fitness: &[f64],
    config: &Model2Config,
    rng: &mut R,
) -> Result<AgentId> {
    let n = graph.node_count();
    let fi = fitness[agent.index()];
    let mut candidates = Vec::with_capacity(n - 1);
    let mut weights = Vec::with_capacity(n - 1);
    let mut degrees = Vec::with_capacity(n - 1);
    for j in (0..n).map(AgentId).filter(|&j| j != agent) {
        candidates.push(j);
        weights.push(similarity_weight(fi, fitness[j.index()], config.kernel, config.epsilon, config.out_weight));
        degrees.push(graph.degree(j));
    }
    select_by_kernel(&candidates, &weights, &degrees, rng)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeriodMetrics {
    pub successes: usize,
    pub deaths: usize,
    /// Rewirings that kept hitting existing neighbours and refreshed a tie instead.
    pub collisions: usize,
    pub group_count: usize,
    pub component_count: usize,
}

pub fn step_period<R: Rng + ?Sized>(
    graph: &mut SocialGraph,
    fitness: &mut FitnessVector,
    config: &Model2Config,
    rng: &mut R,
) -> Result<PeriodMetrics> {
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut metrics = PeriodMetrics::default();

    for _ in 0..config.shocks {
        let slot = graph.random_edge_slot(rng)?;
        let edge = graph.edge_at_mut(slot);
        let (a, b) = edge.endpoints();
        let (fa, fb, ok) = exchange(fitness[a.index()], fitness[b.index()], config.epsilon, config.strict_eq4);
        if ok {
            edge.n += 1;
            metrics.successes += 1;
            fitness[a.index()] = fa;
            fitness[b.index()] = fb;
        }
    }

    for edge in graph.edges_mut() {
        edge.q = decay_q(edge.q, edge.n, config.alpha);
    }

    let mut dead = Vec::new();
    for edge in graph.edges() {
        let u: f64 = rng.random();
        if edge.q < u {
            dead.push(edge.endpoints());
        }
    }
    metrics.deaths = dead.len();

    let attempts = graph.node_count();
    for (a, b) in dead {
        let keeper = match config.rewire_endpoint {
            RewireEndpoint::LowerDegree if graph.degree(a) != graph.degree(b) => {
                if graph.degree(a) < graph.degree(b) {
                    a
                } else {
                    b
                }
            }
            _ => {
                if rng.random::<bool>() {
                    a
                } else {
                    b
                }
            }
        };
        graph.remove_edge(a, b)?;
        let mut target = rewire_target(keeper, graph, fitness, config, rng)?;
        let mut placed = false;
        for attempt in 0..attempts {
            if !graph.has_edge(keeper, target) {
                graph.add_edge(keeper, target, 1.0)?;
                placed = true;
                break;
            }
            if attempt + 1 < attempts {
                target = rewire_target(keeper, graph, fitness, config, rng)?;
            }
        }
        if !placed {
            metrics.collisions += 1;
            if let Some(edge) = graph.edge_mut(keeper, target) {
                edge.q = 1.0;
            }
        }
    }

    for edge in graph.edges_mut() {
        edge.n = 0;
    }

    metrics.group_count = count_groups(fitness, config.group_gap);
    metrics.component_count = graph.component_count();
    Ok(metrics)
}

#[derive(Clone, Debug)]
pub struct TribeMetrics {
    pub periods: Vec<PeriodMetrics>,
    pub initial_fitness: FitnessVector,
    pub final_fitness: FitnessVector,
    pub final_graph: SocialGraph,
}

impl TribeMetrics {
    pub fn mean_deaths_per_period(&self) -> Option<f64> {
        if self.periods.is_empty() {
            return None;
        }
        Some(self.periods.iter().map(|p| p.deaths as f64).sum::<f64>() / self.periods.len() as f64)
    }

    pub fn final_group_count(&self, group_gap: f64) -> usize {
        count_groups(&self.final_fitness, group_gap)
    }

    pub fn final_component_count(&self) -> usize {
        self.final_graph.component_count()
    }
}

pub fn simulate_model2<R: Rng + ?Sized>(config: &Model2Config, rng: &mut R) -> Result<TribeMetrics> {
    simulate_model2_observed(config, rng, |_, _, _, _| {})
}

/// Like [`simulate_model2`], calling `observe(period, graph, fitness, metrics)`
/// after every period.
pub fn simulate_model2_observed<R, F>(config: &Model2Config, rng: &mut R, mut observe: F) -> Result<TribeMetrics>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &SocialGraph, &FitnessVector, &PeriodMetrics),
{
    config.validate()?;
    let initial: FitnessVector = (0..config.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect::<Vec<_>>().into();
    // the network is grown with uniform fitness; the normal draws only drive the dynamics
    let mut graph = generate_bb(config.n, &config.bb, &vec![1.0; config.n], rng)?;
    let mut fitness = initial.clone();
    let mut periods = Vec::with_capacity(config.periods);
    for t in 0..config.periods {
        let m = step_period(&mut graph, &mut fitness, config, rng)?;
        observe(t, &graph, &fitness, &m);
        periods.push(m);
    }
    Ok(TribeMetrics {
        periods,
        initial_fitness: initial,
        final_fitness: fitness,
        final_graph: graph,
    })
}

/// Number of clusters in sorted fitness, splitting wherever consecutive
/// values differ by more than `group_gap`.
pub fn count_groups(fitness: &[f64], group_gap: f64) -> usize {
    if fitness.is_empty() {
        return 0;
    }
    let mut sorted = fitness.to_vec();
    sorted.sort_by(f64::total_cmp);
    1 + sorted.windows(2).filter(|w| w[1] - w[0] > group_gap).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::replication_rng;

    #[test]
    fn exchange_examples() {
        let (a, b, ok) = bounded_confidence_update(0.2, 0.4, 0.5);
        assert!(ok);
        assert!((a - 0.3).abs() < 1e-15 && a == b);
        assert_eq!(bounded_confidence_update(0.0, 2.0, 0.5), (0.0, 2.0, false));
        for eps in [0.0, 0.5, 1e3] {
            assert_eq!(bounded_confidence_update(1.7, 1.7, eps), (1.7, 1.7, true));
        }
        // boundary is inclusive
        assert!(bounded_confidence_update(0.0, 0.5, 0.5).2);
    }

    #[test]
    fn strict_sum_form() {
        // far apart but summing to zero: the literal sum condition accepts
        assert_eq!(exchange(-1.0, 1.0, 0.1, true), (0.0, 0.0, true));
        assert!(!exchange(1.0, 1.05, 0.1, true).2);
    }

    #[test]
    fn decay_examples() {
        assert!((decay_q(1.0, 0, 0.9) - 0.9).abs() < 1e-15);
        for (q, alpha) in [(0.3, 0.9), (1.0, 0.5), (0.77, 0.99)] {
            assert_eq!(decay_q(q, 1, alpha), q);
        }
        assert!((decay_q(0.5, 3, 0.9) - 0.617_283_950_617_284).abs() < 1e-12);
        assert_eq!(decay_q(0.9, 2, 0.5), 1.0);
        assert_eq!(decay_q(0.5, u32::MAX, 0.9), 1.0);
    }

    #[test]
    fn similarity_examples() {
        for k in [Kernel::Reciprocal, Kernel::Ingroup] {
            assert_eq!(similarity_weight(0.4, 0.4, k, 0.5, 0.01), 1.0);
        }
        assert_eq!(similarity_weight(0.0, 1.0, Kernel::Reciprocal, 0.5, 0.01), 0.5);
        assert_eq!(similarity_weight(0.0, 2.0, Kernel::Ingroup, 0.5, 0.01), 0.01);
        assert_eq!(similarity_weight(0.0, 0.4, Kernel::Ingroup, 0.5, 0.01), 1.0);
    }

    #[test]
    fn count_groups_examples() {
        assert_eq!(count_groups(&[2.0; 7], 1e-3), 1);
        assert_eq!(count_groups(&[0.0, 0.001, 5.0, 5.002], 0.01), 2);
        assert_eq!(count_groups(&[3.0, 0.0, 1.0, 2.0], 0.5), 4);
        assert_eq!(count_groups(&[], 0.5), 0);
    }

    #[test]
    fn rewire_with_two_agents() {
        let mut g = SocialGraph::new(2).unwrap();
        g.add_edge(AgentId(0), AgentId(1), 1.0).unwrap();
        let cfg = Model2Config { n: 2, ..Model2Config::default() };
        let mut rng = replication_rng(1, 0, 0);
        for _ in 0..20 {
            assert_eq!(rewire_target(AgentId(0), &g, &[0.0, 5.0], &cfg, &mut rng).unwrap(), AgentId(1));
        }
    }

    #[test]
    fn rewire_frequencies_follow_similarity_times_degree() {
        // Agent 0 isolated; candidates 1, 2, 3 with equal fitness (w = 1) and
        // degrees 1, 1, 2 give scores (1, 1, 2).
        let mut g = SocialGraph::new(5).unwrap();
        g.add_edge(AgentId(1), AgentId(3), 1.0).unwrap();
        g.add_edge(AgentId(2), AgentId(3), 1.0).unwrap();
        assert_eq!(g.degrees(), vec![0, 1, 1, 2, 0]);
        let cfg = Model2Config { n: 5, ..Model2Config::default() };
        let fitness = [0.3; 5];
        let mut rng = replication_rng(2, 0, 0);
        let draws = 100_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            counts[rewire_target(AgentId(0), &g, &fitness, &cfg, &mut rng).unwrap().index()] += 1;
        }
        assert_eq!(counts[0] + counts[4], 0);
        for (i, p) in [(1, 0.25), (2, 0.25), (3, 0.5)] {
            assert!((counts[i] as f64 / draws as f64 - p).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn similar_hub_dominates_by_hand_computed_scores() {
        // agent 0 (f=0) chooses among 1 (f=0, deg 3), 2 (f=1, deg 1), 3 (f=3, deg 1), 4 (f=0.5, deg 1)
        // reciprocal scores: 3, 0.5, 0.25, 2/3 → total 53/12
        let mut g = SocialGraph::new(5).unwrap();
        for j in 2..5 {
            g.add_edge(AgentId(1), AgentId(j), 1.0).unwrap();
        }
        let fitness = [0.0, 0.0, 1.0, 3.0, 0.5];
        let cfg = Model2Config { n: 5, ..Model2Config::default() };
        let mut rng = replication_rng(3, 0, 0);
        let draws = 200_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            counts[rewire_target(AgentId(0), &g, &fitness, &cfg, &mut rng).unwrap().index()] += 1;
        }
        let total = 53.0 / 12.0;
        for (i, score) in [(1, 3.0), (2, 0.5), (3, 0.25), (4, 2.0 / 3.0)] {
            assert!((counts[i] as f64 / draws as f64 - score / total).abs() < 0.01);
        }
    }

    fn cfg(n: usize, epsilon: f64, alpha: f64) -> Model2Config {
        Model2Config { n, epsilon, alpha, shocks: 10, periods: 50, ..Model2Config::default() }
    }

    #[test]
    fn step_requires_edges() {
        let mut g = SocialGraph::new(3).unwrap();
        let mut f = FitnessVector::constant(3, 0.0);
        let c = cfg(3, 0.5, 0.9);
        assert!(matches!(step_period(&mut g, &mut f, &c, &mut replication_rng(0, 0, 0)), Err(Error::EmptyGraph)));
    }

    #[test]
    fn wide_confidence_and_slow_decay_barely_kill_edges() {
        let c = Model2Config { shocks: 200, ..cfg(20, 1e3, 0.9999) };
        let mut rng = replication_rng(4, 0, 0);
        let mut g = generate_bb(20, &c.bb, &[1.0; 20], &mut rng).unwrap();
        let mut f: FitnessVector = (0..20).map(|i| i as f64 / 7.0).collect::<Vec<_>>().into();
        let mut deaths = 0;
        for _ in 0..100 {
            let m = step_period(&mut g, &mut f, &c, &mut rng).unwrap();
            assert_eq!(m.successes, 200);
            deaths += m.deaths;
        }
        // expected deaths per unshocked edge-period are at most 1e-4
        assert!(deaths <= 3, "deaths {deaths}");
    }

    #[test]
    fn zero_confidence_means_pure_decay() {
        let c = Model2Config { periods: 1, ..cfg(30, 0.0, 0.9) };
        let mut rng = replication_rng(5, 0, 0);
        let mut g = generate_bb(30, &c.bb, &[1.0; 30], &mut rng).unwrap();
        let mut f: FitnessVector = (0..30).map(|i| i as f64).collect::<Vec<_>>().into();
        let before = f.clone();
        let m = step_period(&mut g, &mut f, &c, &mut rng).unwrap();
        assert_eq!(m.successes, 0);
        assert_eq!(f, before);
        // survivors decayed to α, rewired edges restart at 1
        assert_eq!(g.edges().iter().filter(|e| e.q == 0.9).count() + m.deaths - m.collisions, g.edge_count());
    }

    #[test]
    fn zero_periods_keep_initial_draw() {
        let c = Model2Config { periods: 0, ..cfg(15, 0.5, 0.9) };
        let t = simulate_model2(&c, &mut replication_rng(6, 0, 0)).unwrap();
        assert!(t.periods.is_empty());
        assert_eq!(t.initial_fitness, t.final_fitness);
        assert_eq!(t.mean_deaths_per_period(), None);
    }

    #[test]
    fn simulation_is_deterministic() {
        let c = cfg(30, 0.4, 0.9);
        let a = simulate_model2(&c, &mut replication_rng(7, 0, 0)).unwrap();
        let b = simulate_model2(&c, &mut replication_rng(7, 0, 0)).unwrap();
        assert_eq!(a.periods, b.periods);
        assert_eq!(a.final_fitness, b.final_fitness);
        assert_eq!(a.final_graph.sorted_edge_list(), b.final_graph.sorted_edge_list());
    }

    #[test]
    fn consensus_at_infinite_confidence() {
        let c = Model2Config { periods: 500, ..cfg(20, 1e3, 0.9) };
        let t = simulate_model2(&c, &mut replication_rng(8, 0, 0)).unwrap();
        assert_eq!(t.final_group_count(c.group_gap), 1);
    }

    fn leaf_after_one_death(endpoint: RewireEndpoint, seed: u64) -> usize {
        // star around 0; only the 0-1 tie is (almost surely) dead
        let c = Model2Config { n: 6, shocks: 0, alpha: 0.999_999, rewire_endpoint: endpoint, ..Model2Config::default() };
        let mut g = SocialGraph::new(6).unwrap();
        g.add_edge(AgentId(0), AgentId(1), 1e-300).unwrap();
        for j in 2..6 {
            g.add_edge(AgentId(0), AgentId(j), 1.0).unwrap();
        }
        let mut f = FitnessVector::constant(6, 0.0);
        let m = step_period(&mut g, &mut f, &c, &mut replication_rng(seed, 0, 0)).unwrap();
        assert_eq!(m.deaths, 1);
        g.degree(AgentId(1))
    }

    #[test]
    fn lower_degree_endpoint_keeps_the_leaf_attached() {
        for seed in 0..200 {
            assert_eq!(leaf_after_one_death(RewireEndpoint::LowerDegree, seed), 1);
        }
    }

    #[test]
    fn random_endpoint_isolates_the_leaf_half_the_time() {
        let isolated = (0..400).filter(|&s| leaf_after_one_death(RewireEndpoint::Random, s) == 0).count();
        assert!((150..250).contains(&isolated), "{isolated}");
        assert_eq!("lower-degree".parse::<RewireEndpoint>().unwrap(), RewireEndpoint::LowerDegree);
        assert!("hub".parse::<RewireEndpoint>().is_err());
    }

    #[test]
    fn validation_messages_name_the_field() {
        let err = Model2Config { alpha: 1.5, ..Model2Config::default() }.validate().unwrap_err();
        assert!(matches!(&err, Error::Validation { field, message } if field == "alpha" && message == "alpha ∈ (0,1)"));
        assert!(Model2Config { epsilon: -1.0, ..Model2Config::default() }.validate().is_err());
        assert!(Model2Config { out_weight: 0.0, ..Model2Config::default() }.validate().is_err());
        assert!(Model2Config { group_gap: 0.0, ..Model2Config::default() }.validate().is_err());
        assert!("tribal".parse::<Kernel>().is_err());
    }
}
