//! Trustingness / trustworthiness propagation.
//!
//! Every node carries two scores. Trustingness measures how readily a node
//! trusts the nodes it follows; trustworthiness measures how much the
//! network trusts the node. One iteration recomputes both from the previous
//! iteration only (Jacobi schedule):
//!
//! ```text
//! ti'(v) = Σ_{v→x} w(v,x) / (1 + tw(x)^s)
//! tw'(u) = Σ_{x→u} w(x,u) / (1 + ti(x)^s)
//! ```
//!
//! and then rescales each vector to sum to one. The damping term makes a
//! vote from an indiscriminate truster worth less than one from a selective
//! node. `s` is the involvement exponent.
//!
//! Iteration stops once the largest componentwise change of the normalized
//! vectors drops below `delta`, or after `max_iters` iterations.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{NodeIdx, TrustGraph};

/// Below this many nodes an iteration runs on the calling thread.
const PARALLEL_MIN_NODES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TsmError {
    #[error("graph has no edges; trust scores are undefined")]
    DegenerateGraph,
    #[error("news organization {0} has no positive follower count")]
    MissingFollowerCount(String),
    #[error("score vectors do not cover the same node set")]
    ScoreShapeMismatch,
    #[error("invalid TSM configuration: {0}")]
    InvalidConfig(String),
    #[error("initial score for node {0} is negative or not finite")]
    BadInitialScore(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TsmConfig {
    /// Involvement exponent `s`.
    pub involvement: f64,
    pub max_iters: usize,
    /// Convergence threshold on the max absolute score change.
    pub delta: f64,
}

impl Default for TsmConfig {
    fn default() -> Self {
        Self {
            involvement: 1.0,
            max_iters: 100,
            delta: 1e-6,
        }
    }
}

impl TsmConfig {
    pub fn new(involvement: f64, max_iters: usize, delta: f64) -> Result<Self, TsmError> {
        let cfg = Self {
            involvement,
            max_iters,
            delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TsmError> {
        if !(self.involvement.is_finite() && self.involvement > 0.0) {
            return Err(TsmError::InvalidConfig(format!(
                "involvement must be > 0, got {}",
                self.involvement
            )));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(TsmError::InvalidConfig(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if self.max_iters == 0 {
            return Err(TsmError::InvalidConfig("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-node score pair plus iteration metadata.
///
/// Vectors are indexed by [`NodeIdx`] of the graph that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustScores {
    node_ids: Arc<[String]>,
    pub trustingness: Vec<f64>,
    pub trustworthiness: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Max absolute change of the last iteration (infinite before any).
    pub final_delta: f64,
}

impl TrustScores {
    /// Starting state with explicit per-node values, validated against `g`.
    pub fn initial(
        g: &TrustGraph,
        trustingness: Vec<f64>,
        trustworthiness: Vec<f64>,
    ) -> Result<Self, TsmError> {
        let n = g.node_count();
        if trustingness.len() != n || trustworthiness.len() != n {
            return Err(TsmError::ScoreShapeMismatch);
        }
        for v in g.nodes() {
            let (a, b) = (trustingness[v.0], trustworthiness[v.0]);
            if !(a.is_finite() && a >= 0.0 && b.is_finite() && b >= 0.0) {
                return Err(TsmError::BadInitialScore(g.id(v).to_owned()));
            }
        }
        Ok(Self {
            node_ids: g.ids().clone(),
            trustingness,
            trustworthiness,
            iterations_run: 0,
            converged: false,
            final_delta: f64::INFINITY,
        })
    }

    /// Every node starts at (1, 1).
    pub fn uniform(g: &TrustGraph) -> Self {
        let n = g.node_count();
        Self {
            node_ids: g.ids().clone(),
            trustingness: vec![1.0; n],
            trustworthiness: vec![1.0; n],
            iterations_run: 0,
            converged: false,
            final_delta: f64::INFINITY,
        }
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    fn position(&self, id: &str) -> Option<usize> {
        self.node_ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn trustingness_of(&self, id: &str) -> Option<f64> {
        self.position(id).map(|i| self.trustingness[i])
    }

    pub fn trustworthiness_of(&self, id: &str) -> Option<f64> {
        self.position(id).map(|i| self.trustworthiness[i])
    }

    /// `(node_id, trustingness, trustworthiness)` in id order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, f64, f64)> {
        self.node_ids
            .iter()
            .zip(self.trustingness.iter().zip(&self.trustworthiness))
            .map(|(id, (&ti, &tw))| (id.as_str(), ti, tw))
    }

    fn same_shape(&self, other: &TrustScores) -> bool {
        Arc::ptr_eq(&self.node_ids, &other.node_ids) || self.node_ids == other.node_ids
    }
}

/// Contribution of one edge of weight `w` when the counterparty holds score `t`.
///
/// `0^s` is taken as 0, so a zero-score counterparty yields the full weight.
#[inline]
pub fn damped_contribution(w: f64, t: f64, s: f64) -> f64 {
    let p = if t == 0.0 { 0.0 } else { t.powf(s) };
    w / (1.0 + p)
}

/// Initial scores for the aggregated-follower network: news organizations
/// start with trustingness `1 / follower_count`, every other node with 1.
/// Trustworthiness starts at 1 everywhere.
pub fn aggregated_initialization(g: &TrustGraph) -> Result<TrustScores, TsmError> {
    let mut init = TrustScores::uniform(g);
    for v in g.nodes() {
        if g.is_news_org(v) {
            match g.follower_count(v) {
                Some(f) if f >= 1 => init.trustingness[v.0] = 1.0 / f as f64,
                _ => return Err(TsmError::MissingFollowerCount(g.id(v).to_owned())),
            }
        }
    }
    Ok(init)
}

/// One Jacobi update followed by normalization.
///
/// The returned scores carry `iterations_run = prev.iterations_run + 1` and
/// `final_delta` set to the change against `prev`; `converged` is left false.
pub fn tsm_iteration(
    g: &TrustGraph,
    prev: &TrustScores,
    cfg: &TsmConfig,
) -> Result<TrustScores, TsmError> {
    if prev.len() != g.node_count() || prev.node_ids[..] != g.ids()[..] {
        return Err(TsmError::ScoreShapeMismatch);
    }
    let s = cfg.involvement;
    let n = g.node_count();
    let mut ti = vec![0.0; n];
    let mut tw = vec![0.0; n];

    // fold from +0.0: `Sum` for f64 starts at -0.0, which sinks would inherit
    let raw_ti = |v: usize| -> f64 {
        g.out_edges(NodeIdx(v))
            .iter()
            .map(|e| damped_contribution(e.weight, prev.trustworthiness[e.dst.0], s))
            .fold(0.0, |acc, x| acc + x)
    };
    let raw_tw = |u: usize| -> f64 {
        g.in_edges(NodeIdx(u))
            .iter()
            .map(|e| damped_contribution(e.weight, prev.trustingness[e.src.0], s))
            .fold(0.0, |acc, x| acc + x)
    };

    if n >= PARALLEL_MIN_NODES {
        ti.par_iter_mut()
            .enumerate()
            .for_each(|(v, x)| *x = raw_ti(v));
        tw.par_iter_mut()
            .enumerate()
            .for_each(|(u, x)| *x = raw_tw(u));
    } else {
        ti.iter_mut().enumerate().for_each(|(v, x)| *x = raw_ti(v));
        tw.iter_mut().enumerate().for_each(|(u, x)| *x = raw_tw(u));
    }

    normalize(&mut ti)?;
    normalize(&mut tw)?;

    let mut next = TrustScores {
        node_ids: prev.node_ids.clone(),
        trustingness: ti,
        trustworthiness: tw,
        iterations_run: prev.iterations_run + 1,
        converged: false,
        final_delta: 0.0,
    };
    next.final_delta = max_abs_change(prev, &next)?;
    Ok(next)
}

// Sequential sum in index order so the result does not depend on threading.
fn normalize(v: &mut [f64]) -> Result<(), TsmError> {
    let total = v.iter().fold(0.0, |acc, x| acc + x);
    if !(total > 0.0 && total.is_finite()) {
        return Err(TsmError::DegenerateGraph);
    }
    v.iter_mut().for_each(|x| *x /= total);
    Ok(())
}

/// Largest absolute change across both score vectors.
pub fn max_abs_change(prev: &TrustScores, curr: &TrustScores) -> Result<f64, TsmError> {
    if !prev.same_shape(curr) {
        return Err(TsmError::ScoreShapeMismatch);
    }
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    Ok(diff(&prev.trustingness, &curr.trustingness)
        .max(diff(&prev.trustworthiness, &curr.trustworthiness)))
}

/// True iff the largest componentwise change is strictly below `delta`.
pub fn convergence_check(
    prev: &TrustScores,
    curr: &TrustScores,
    delta: f64,
) -> Result<bool, TsmError> {
    Ok(max_abs_change(prev, curr)? < delta)
}

/// Runs the iteration to convergence or `max_iters`, starting from `init`
/// (uniform `(1, 1)` when `None`).
pub fn run_tsm(
    g: &TrustGraph,
    cfg: &TsmConfig,
    init: Option<&TrustScores>,
) -> Result<TrustScores, TsmError> {
    run_tsm_observed(g, cfg, init, |_| {})
}

/// Like [`run_tsm`], calling `observe` with the scores after every iteration.
pub fn run_tsm_observed(
    g: &TrustGraph,
    cfg: &TsmConfig,
    init: Option<&TrustScores>,
    mut observe: impl FnMut(&TrustScores),
) -> Result<TrustScores, TsmError> {
    cfg.validate()?;
    if g.edge_count() == 0 {
        return Err(TsmError::DegenerateGraph);
    }
    let mut curr = match init {
        Some(s) => TrustScores::initial(g, s.trustingness.clone(), s.trustworthiness.clone())?,
        None => TrustScores::uniform(g),
    };
    for _ in 0..cfg.max_iters {
        let next = tsm_iteration(g, &curr, cfg)?;
        observe(&next);
        curr = next;
        if curr.final_delta < cfg.delta {
            curr.converged = true;
            break;
        }
    }
    Ok(curr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, NodeAttrs};
    use proptest::prelude::*;

    fn graph(edges: &[(&str, &str)]) -> TrustGraph {
        let specs: Vec<_> = edges.iter().map(|(a, b)| EdgeSpec::new(*a, *b)).collect();
        TrustGraph::build(&specs, &[]).unwrap()
    }

    fn four_node() -> TrustGraph {
        graph(&[
            ("B", "A"),
            ("C", "A"),
            ("D", "A"),
            ("E", "B"),
            ("E", "C"),
            ("E", "D"),
        ])
    }

    #[test]
    fn config_validation() {
        assert!(TsmConfig::new(0.0, 10, 1e-6).is_err());
        assert!(TsmConfig::new(1.0, 0, 1e-6).is_err());
        assert!(TsmConfig::new(1.0, 10, 0.0).is_err());
        assert!(TsmConfig::new(2.0, 10, 1e-3).is_ok());
    }

    #[test]
    fn single_edge_iteration() {
        let g = graph(&[("u", "v")]);
        let next = tsm_iteration(&g, &TrustScores::uniform(&g), &TsmConfig::default()).unwrap();
        assert_eq!(next.trustingness_of("u"), Some(1.0));
        assert_eq!(next.trustworthiness_of("v"), Some(1.0));
        assert_eq!(next.trustingness_of("v"), Some(0.0));
        assert_eq!(next.trustworthiness_of("u"), Some(0.0));
        assert_eq!(next.iterations_run, 1);
    }

    #[test]
    fn two_cycle_is_symmetric() {
        let g = graph(&[("u", "v"), ("v", "u")]);
        for s in [0.5, 1.0, 3.0] {
            let cfg = TsmConfig::new(s, 10, 1e-6).unwrap();
            let next = tsm_iteration(&g, &TrustScores::uniform(&g), &cfg).unwrap();
            assert_eq!(next.trustingness, vec![0.5, 0.5]);
            assert_eq!(next.trustworthiness, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn four_node_one_iteration_ranks_a_first() {
        let g = four_node();
        let next = tsm_iteration(&g, &TrustScores::uniform(&g), &TsmConfig::default()).unwrap();
        let a = g.index_of("A").unwrap().0;
        let best = (0..g.node_count())
            .max_by(|&i, &j| next.trustworthiness[i].total_cmp(&next.trustworthiness[j]))
            .unwrap();
        assert_eq!(best, a);
        // Hand evaluation: raw tw(A) = 3 * 1/2, tw(B..D) = 1/2 each -> A = 1.5/3.
        assert!((next.trustworthiness[a] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_edge_converges_at_second_iteration() {
        let g = graph(&[("u", "v")]);
        let out = run_tsm(&g, &TsmConfig::default(), None).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations_run, 2);
        assert!(out.final_delta < 1e-6);
        assert_eq!(out.trustingness_of("u"), Some(1.0));
        assert_eq!(out.trustworthiness_of("v"), Some(1.0));
    }

    #[test]
    fn four_cycle_is_uniform() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        let out = run_tsm(&g, &TsmConfig::default(), None).unwrap();
        assert!(out.converged);
        for i in 0..4 {
            assert!((out.trustingness[i] - 0.25).abs() < 1e-15);
            assert!((out.trustworthiness[i] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn no_edges_is_degenerate() {
        let g = TrustGraph::build(&[], &[NodeAttrs::news_org("a", 1)]).unwrap();
        assert_eq!(
            run_tsm(&g, &TsmConfig::default(), None).unwrap_err(),
            TsmError::DegenerateGraph
        );
        assert_eq!(
            tsm_iteration(&g, &TrustScores::uniform(&g), &TsmConfig::default()).unwrap_err(),
            TsmError::DegenerateGraph
        );
    }

    #[test]
    fn aggregated_init_values() {
        let g = TrustGraph::build(
            &[EdgeSpec::new("org", "u"), EdgeSpec::new("u", "org")],
            &[NodeAttrs::news_org("org", 4)],
        )
        .unwrap();
        let init = aggregated_initialization(&g).unwrap();
        assert_eq!(init.trustingness_of("org"), Some(0.25));
        assert_eq!(init.trustingness_of("u"), Some(1.0));
        assert_eq!(init.trustworthiness, vec![1.0, 1.0]);

        let g0 = TrustGraph::build(
            &[EdgeSpec::new("org", "u")],
            &[NodeAttrs::news_org("org", 0)],
        )
        .unwrap();
        assert_eq!(
            aggregated_initialization(&g0).unwrap_err(),
            TsmError::MissingFollowerCount("org".into())
        );
        let missing = NodeAttrs {
            id: "org".into(),
            follower_count: None,
            is_news_org: true,
        };
        let g1 = TrustGraph::build(&[EdgeSpec::new("org", "u")], &[missing]).unwrap();
        assert!(matches!(
            aggregated_initialization(&g1),
            Err(TsmError::MissingFollowerCount(_))
        ));
    }

    #[test]
    fn convergence_check_thresholds() {
        let g = graph(&[("a", "b"), ("b", "c")]);
        let a = TrustScores::uniform(&g);
        assert!(convergence_check(&a, &a, 1e-12).unwrap());

        let mut b = a.clone();
        b.trustingness[1] += 1e-3;
        assert!(!convergence_check(&a, &b, 1e-6).unwrap());

        let mut c = a.clone();
        c.trustingness[0] += 2e-7;
        c.trustworthiness[2] -= 9e-7;
        assert!(convergence_check(&a, &c, 1e-6).unwrap());

        let other = TrustScores::uniform(&graph(&[("x", "y")]));
        assert_eq!(
            convergence_check(&a, &other, 1e-6).unwrap_err(),
            TsmError::ScoreShapeMismatch
        );
    }

    #[test]
    fn bad_initial_scores_rejected() {
        let g = graph(&[("a", "b")]);
        assert!(matches!(
            TrustScores::initial(&g, vec![1.0, -1.0], vec![1.0, 1.0]),
            Err(TsmError::BadInitialScore(id)) if id == "b"
        ));
        assert_eq!(
            TrustScores::initial(&g, vec![1.0], vec![1.0, 1.0]).unwrap_err(),
            TsmError::ScoreShapeMismatch
        );
    }

    #[test]
    fn zero_power_is_zero() {
        assert_eq!(damped_contribution(2.5, 0.0, 0.3), 2.5);
        assert_eq!(damped_contribution(1.0, 1.0, 7.0), 0.5);
    }

    fn random_edges() -> impl Strategy<Value = Vec<(u8, u8)>> {
        prop::collection::btree_set((0u8..25, 0u8..25), 1..120)
            .prop_map(|s| s.into_iter().filter(|(a, b)| a != b).collect::<Vec<_>>())
    }

    proptest! {
        #[test]
        fn negative_feedback(w in 1e-3f64..1e3, s in 1e-2f64..8.0, t1 in 0.0f64..5.0, gap in 1e-3f64..5.0) {
            let t2 = t1 + gap;
            prop_assert!(damped_contribution(w, t1, s) > damped_contribution(w, t2, s));
        }

        #[test]
        fn normalized_nonnegative_and_sinks(edges in random_edges(), s in 0.1f64..4.0) {
            prop_assume!(!edges.is_empty());
            let specs: Vec<_> = edges.iter().map(|(a, b)| EdgeSpec::new(format!("{a:02}"), format!("{b:02}"))).collect();
            let g = TrustGraph::build(&specs, &[]).unwrap();
            let cfg = TsmConfig::new(s, 15, 1e-9).unwrap();
            run_tsm_observed(&g, &cfg, None, |sc| {
                let sti: f64 = sc.trustingness.iter().sum();
                let stw: f64 = sc.trustworthiness.iter().sum();
                assert!((sti - 1.0).abs() < 1e-9 && (stw - 1.0).abs() < 1e-9);
                for v in g.nodes() {
                    assert!(sc.trustingness[v.0] >= 0.0 && sc.trustworthiness[v.0] >= 0.0);
                    if g.in_edges(v).is_empty() {
                        assert_eq!(sc.trustworthiness[v.0].to_bits(), 0);
                    }
                    if g.out_edges(v).is_empty() {
                        assert_eq!(sc.trustingness[v.0].to_bits(), 0);
                    }
                }
            }).unwrap();
        }

        #[test]
        fn permutation_equivariance(edges in random_edges(), shift in 1u8..24) {
            prop_assume!(!edges.is_empty());
            let name = |x: u8| format!("{x:02}");
            let perm = |x: u8| format!("{:02}", (x + shift) % 25);
            let a: Vec<_> = edges.iter().map(|(s, d)| EdgeSpec::new(name(*s), name(*d))).collect();
            let b: Vec<_> = edges.iter().map(|(s, d)| EdgeSpec::new(perm(*s), perm(*d))).collect();
            let ga = TrustGraph::build(&a, &[]).unwrap();
            let gb = TrustGraph::build(&b, &[]).unwrap();
            let cfg = TsmConfig::default();
            let ra = run_tsm(&ga, &cfg, None).unwrap();
            let rb = run_tsm(&gb, &cfg, None).unwrap();
            prop_assert_eq!(ra.iterations_run, rb.iterations_run);
            for (id, ti, tw) in ra.rows() {
                let mapped = perm(id.parse().unwrap());
                prop_assert!((rb.trustingness_of(&mapped).unwrap() - ti).abs() < 1e-12);
                prop_assert!((rb.trustworthiness_of(&mapped).unwrap() - tw).abs() < 1e-12);
            }
        }

        #[test]
        fn deterministic(edges in random_edges()) {
            prop_assume!(!edges.is_empty());
            let specs: Vec<_> = edges.iter().map(|(a, b)| EdgeSpec::new(format!("{a}"), format!("{b}"))).collect();
            let g = TrustGraph::build(&specs, &[]).unwrap();
            let x = run_tsm(&g, &TsmConfig::default(), None).unwrap();
            let y = run_tsm(&g, &TsmConfig::default(), None).unwrap();
            prop_assert_eq!(x, y);
        }
    }
}
