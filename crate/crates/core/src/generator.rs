//! Bianconi-Barabási growth and kernel-weighted partner selection.
//!
//! A new node attaches to an existing node `j` with probability proportional
//! to `score(w_j, k_j)`, where `w_j` is a per-node weight (the fitness during
//! generation, a similarity weight during rewiring) and `k_j` its degree.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, SocialGraph};
use crate::sampling::{sample_linear, SumTree};

/// Growth parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBParams {
    /// Size of the complete seed graph.
    pub m0: usize,
    /// Edges added by each arriving node.
    pub m: usize,
    /// Draw a fresh random arrival order for every generated network.
    /// When false, agents arrive in index order and `0..m0` form the seed.
    pub shuffle_arrival: bool,
}

impl Default for BBParams {
    fn default() -> Self {
        BBParams {
            m0: 3,
            m: 2,
            shuffle_arrival: true,
        }
    }
}

impl BBParams {
    pub fn validate(&self) -> Result<()> {
        if self.m0 < 2 {
            return Err(Error::validation("m0", "seed clique needs m0 >= 2"));
        }
        if self.m < 1 || self.m > self.m0 {
            return Err(Error::validation("m", "need 1 <= m <= m0"));
        }
        Ok(())
    }

    /// Edge count of any network grown on `n` nodes.
    pub fn edge_count(&self, n: usize) -> usize {
        self.m0 * (self.m0 - 1) / 2 + self.m * n.saturating_sub(self.m0)
    }
}

/// Maps a candidate's weight and degree to a nonnegative attachment score.
pub trait AttachmentKernel {
    fn score(&self, weight: f64, degree: usize) -> f64;
}

/// `weight × degree`: Bianconi-Barabási attachment.
#[derive(Clone, Copy, Debug, Default)]
pub struct FitnessDegree;

impl AttachmentKernel for FitnessDegree {
    #[inline]
    fn score(&self, weight: f64, degree: usize) -> f64 {
        weight * degree as f64
    }
}

/// `degree`: plain preferential attachment, ignoring weights.
#[derive(Clone, Copy, Debug, Default)]
pub struct DegreeOnly;

impl AttachmentKernel for DegreeOnly {
    #[inline]
    fn score(&self, _weight: f64, degree: usize) -> f64 {
        degree as f64
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "attachment weight of agent {i} is {w}; weights must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Grow a Bianconi-Barabási network on `n` agents, agent `i` having fitness
/// `fitness[i]`. Every edge starts with `q = 1`, `n = 0`.
///
/// `n == m0` is accepted and yields the bare seed clique.
pub fn generate_bb<R: Rng + ?Sized>(
    n: usize,
    params: &BBParams,
    fitness: &[f64],
    rng: &mut R,
) -> Result<SocialGraph> {
    if fitness.len() != n {
        return Err(Error::InvalidArgument(format!(
            "fitness has {} entries for {n} agents",
            fitness.len()
        )));
    }
    generate_with_kernel(fitness, params, &FitnessDegree, rng)
}

/// Growth with an arbitrary attachment kernel; the node count is `weights.len()`.
///
/// Targets of one arriving node are drawn without replacement, renormalising
/// after each pick. If every remaining candidate scores zero the pick is
/// uniform over the remaining existing nodes.
pub fn generate_with_kernel<K, R>(
    weights: &[f64],
    params: &BBParams,
    kernel: &K,
    rng: &mut R,
) -> Result<SocialGraph>
where
    K: AttachmentKernel + ?Sized,
    R: Rng + ?Sized,
{
    params.validate()?;
    let n = weights.len();
    if n < params.m0 {
        return Err(Error::InvalidArgument(format!(
            "network of {n} agents cannot hold a seed clique of {}",
            params.m0
        )));
    }
    check_weights(weights)?;

    let mut order: Vec<usize> = (0..n).collect();
    if params.shuffle_arrival {
        order.shuffle(rng);
    }

    let mut graph = SocialGraph::new(n)?;
    for (x, &a) in order[..params.m0].iter().enumerate() {
        for &b in &order[x + 1..params.m0] {
            graph.add_edge(AgentId(a), AgentId(b), 1.0)?;
        }
    }

    let mut tree = SumTree::new(n);
    for &a in &order[..params.m0] {
        tree.set(a, kernel.score(weights[a], graph.degree(AgentId(a))));
    }

    let mut picks = Vec::with_capacity(params.m);
    for pos in params.m0..n {
        let newcomer = order[pos];
        picks.clear();
        for _ in 0..params.m {
            let target = match tree.sample(rng) {
                Some(t) => t,
                None => {
                    let pool: Vec<usize> = order[..pos].iter().copied().filter(|t| !picks.contains(t)).collect();
                    pool[rng.random_range(0..pool.len())]
                }
            };
            tree.set(target, 0.0);
            picks.push(target);
        }
        for &t in &picks {
            graph.add_edge(AgentId(newcomer), AgentId(t), 1.0)?;
            tree.set(t, kernel.score(weights[t], graph.degree(AgentId(t))));
        }
        tree.set(newcomer, kernel.score(weights[newcomer], params.m));
    }
    Ok(graph)
}

/// Pick one candidate with probability `w_j · k_j / Σ w · k`, uniform if every
/// score is zero.
pub fn select_by_kernel<R: Rng + ?Sized>(
    candidates: &[AgentId],
    weights: &[f64],
    degrees: &[usize],
    rng: &mut R,
) -> Result<AgentId> {
    select_with_kernel(candidates, weights, degrees, &FitnessDegree, rng)
}

pub fn select_with_kernel<K, R>(
    candidates: &[AgentId],
    weights: &[f64],
    degrees: &[usize],
    kernel: &K,
    rng: &mut R,
) -> Result<AgentId>
where
    K: AttachmentKernel + ?Sized,
    R: Rng + ?Sized,
{
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidates to select from".into()));
    }
    if weights.len() != candidates.len() || degrees.len() != candidates.len() {
        return Err(Error::InvalidArgument(
            "candidates, weights and degrees must have equal length".into(),
        ));
    }
    check_weights(weights)?;
    let scores: Vec<f64> = weights
        .iter()
        .zip(degrees)
        .map(|(&w, &k)| kernel.score(w, k))
        .collect();
    Ok(candidates[sample_linear(&scores, rng)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::replication_rng;
    use rand::Rng;
    use proptest::prelude::*;

    #[test]
    fn tiny_network_has_forced_edge_count() {
        let mut rng = replication_rng(1, 0, 0);
        let params = BBParams { m0: 2, m: 1, shuffle_arrival: true };
        for _ in 0..50 {
            let g = generate_bb(3, &params, &[1.0; 3], &mut rng).unwrap();
            assert_eq!(g.edge_count(), 2);
            assert_eq!(g.component_count(), 1);
        }
    }

    #[test]
    fn fifty_nodes_have_97_edges() {
        let mut rng = replication_rng(2, 0, 0);
        let g = generate_bb(50, &BBParams::default(), &[1.0; 50], &mut rng).unwrap();
        assert_eq!(g.edge_count(), 97);
        assert_eq!(g.component_count(), 1);
        assert!(g.edges().iter().all(|e| e.q == 1.0 && e.n == 0));
    }

    #[test]
    fn seed_clique_only() {
        let mut rng = replication_rng(3, 0, 0);
        let params = BBParams { m0: 2, m: 1, shuffle_arrival: false };
        let g = generate_bb(2, &params, &[1.0, 1.0], &mut rng).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn generation_rejects_bad_input() {
        let mut rng = replication_rng(4, 0, 0);
        let p = BBParams::default();
        assert!(generate_bb(2, &p, &[1.0; 2], &mut rng).is_err());
        assert!(generate_bb(5, &p, &[1.0, 1.0, -0.1, 1.0, 1.0], &mut rng).is_err());
        assert!(generate_bb(5, &p, &[1.0; 4], &mut rng).is_err());
        assert!(generate_bb(5, &BBParams { m0: 2, m: 3, shuffle_arrival: true }, &[1.0; 5], &mut rng).is_err());
        assert!(generate_bb(5, &BBParams { m0: 1, m: 1, shuffle_arrival: true }, &[1.0; 5], &mut rng).is_err());
    }

    #[test]
    fn zero_fitness_falls_back_to_uniform() {
        let mut rng = replication_rng(5, 0, 0);
        let g = generate_bb(30, &BBParams::default(), &[0.0; 30], &mut rng).unwrap();
        assert_eq!(g.edge_count(), BBParams::default().edge_count(30));
        assert!(g.is_consistent());
    }

    #[test]
    fn zero_fitness_nodes_only_get_mandatory_edges() {
        // fixed order: agents 0..3 seed the network, later zero-fitness agents never attract
        let mut rng = replication_rng(6, 0, 0);
        let params = BBParams { m0: 3, m: 2, shuffle_arrival: false };
        let mut fitness = vec![1.0; 20];
        for f in fitness.iter_mut().skip(3) {
            *f = 0.0;
        }
        let g = generate_bb(20, &params, &fitness, &mut rng).unwrap();
        for i in 3..20 {
            assert_eq!(g.degree(AgentId(i)), 2);
        }
    }

    #[test]
    fn select_single_candidate() {
        let mut rng = replication_rng(7, 0, 0);
        for _ in 0..20 {
            assert_eq!(select_by_kernel(&[AgentId(9)], &[0.3], &[2], &mut rng).unwrap(), AgentId(9));
        }
        assert!(select_by_kernel(&[], &[], &[], &mut rng).is_err());
    }

    #[test]
    fn select_two_candidates_ratio() {
        let mut rng = replication_rng(8, 0, 0);
        let cands = [AgentId(0), AgentId(1)];
        let draws = 100_000;
        let second = (0..draws)
            .filter(|_| select_by_kernel(&cands, &[1.0, 1.0], &[1, 3], &mut rng).unwrap() == AgentId(1))
            .count();
        assert!((second as f64 / draws as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn select_all_zero_is_uniform() {
        let mut rng = replication_rng(9, 0, 0);
        let cands: Vec<AgentId> = (0..4).map(AgentId).collect();
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[select_by_kernel(&cands, &[0.0; 4], &[3, 1, 2, 5], &mut rng).unwrap().0] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn constant_fitness_matches_pure_preferential_attachment() {
        for seed in 0..20 {
            let params = BBParams::default();
            let bb = generate_bb(60, &params, &[1.0; 60], &mut replication_rng(seed, 0, 0)).unwrap();
            let pa = generate_with_kernel(&[1.0; 60], &params, &DegreeOnly, &mut replication_rng(seed, 0, 0)).unwrap();
            assert_eq!(bb.sorted_edge_list(), pa.sorted_edge_list());
            // scaling every fitness by a power of two leaves scores exactly proportional
            let scaled = generate_bb(60, &params, &[4.0; 60], &mut replication_rng(seed, 0, 0)).unwrap();
            assert_eq!(bb.sorted_edge_list(), scaled.sorted_edge_list());
        }
    }

    proptest! {
        #[test]
        fn generated_graphs_are_connected_with_exact_edge_count(
            n in 4usize..80,
            m0 in 2usize..5,
            m_raw in 1usize..5,
            fitness_seed in any::<u64>(),
            shuffle in any::<bool>(),
        ) {
            prop_assume!(n >= m0);
            let m = m_raw.min(m0);
            let params = BBParams { m0, m, shuffle_arrival: shuffle };
            let mut rng = replication_rng(fitness_seed, 1, 0);
            let fitness: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
            let g = generate_bb(n, &params, &fitness, &mut rng).unwrap();
            prop_assert_eq!(g.edge_count(), params.edge_count(n));
            prop_assert_eq!(g.component_count(), 1);
            prop_assert!(g.is_consistent());
        }

        #[test]
        fn selection_is_scale_invariant(
            seed in any::<u64>(),
            weights in prop::collection::vec(0.0f64..5.0, 1..10),
            exp in -6i32..6,
        ) {
            let c = 2f64.powi(exp);
            let cands: Vec<AgentId> = (0..weights.len()).map(AgentId).collect();
            let degrees: Vec<usize> = (0..weights.len()).map(|i| 1 + i % 3).collect();
            let scaled: Vec<f64> = weights.iter().map(|w| w * c).collect();
            let mut r1 = replication_rng(seed, 0, 0);
            let mut r2 = replication_rng(seed, 0, 0);
            for _ in 0..50 {
                prop_assert_eq!(
                    select_by_kernel(&cands, &weights, &degrees, &mut r1).unwrap(),
                    select_by_kernel(&cands, &scaled, &degrees, &mut r2).unwrap()
                );
            }
        }
    }
}
