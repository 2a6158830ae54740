//! Independent ground truth for finished runs: exhaustive and
//! branch-and-bound optima, edge-packing feasibility, the approximation
//! certificate, counted raise/stuck/iteration bounds, and a full replay of
//! the trace that re-derives every decision of every iteration from scratch.
//!
//! The LP optimum itself is never computed: the certificate chain
//! `dual_sum <= fractional opt <= integral opt` (weak duality) makes the
//! integral oracle sufficient for every check here.

use crate::engine::RunResult;
use crate::hypergraph::Hypergraph;
use crate::params::{AlphaAssignment, Params};
use crate::rat::{self, Rat};
use serde::{Deserialize, Serialize};

/// Hard size guard for the exhaustive oracle.
pub const ORACLE_VERTEX_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {n} vertices; the exhaustive oracle is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("instance fails validation")]
    Invalid,
    #[error("instance has an uncoverable (empty) edge")]
    Uncoverable,
}

/// Final dual solution plus the bound it certifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub cover: Vec<u32>,
    pub cover_weight: u64,
    pub dual: Vec<Rat>,
    pub dual_sum: Rat,
    /// `(rank + epsilon) * dual_sum`; a correct run keeps `cover_weight`
    /// at or below this.
    pub ratio_bound: Rat,
}

/// Builds the certificate carried by a finished run.
pub fn certificate(params: &Params, result: &RunResult) -> Certificate {
    let dual_sum = result.dual_sum();
    let ratio_bound = params.ratio_factor() * &dual_sum;
    Certificate {
        cover: result.cover.clone(),
        cover_weight: result.cover_weight,
        dual: result.dual.clone(),
        dual_sum,
        ratio_bound,
    }
}

/// True iff every edge has a member in `cover` (vacuously true without
/// edges). `cover` must be sorted.
pub fn check_cover(h: &Hypergraph, cover: &[u32]) -> bool {
    h.edges()
        .iter()
        .all(|e| e.iter().any(|v| cover.binary_search(v).is_ok()))
}

fn edge_masks(h: &Hypergraph) -> Vec<u32> {
    h.edges()
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect()
}

fn guard(h: &Hypergraph) -> Result<(), OracleError> {
    if h.vertex_count() > ORACLE_VERTEX_LIMIT {
        return Err(OracleError::TooLarge { n: h.vertex_count(), limit: ORACLE_VERTEX_LIMIT });
    }
    if !h.validate().is_ok() {
        return Err(OracleError::Invalid);
    }
    Ok(())
}

/// Exact minimum-weight cover by subset enumeration with weight pruning.
/// The witness is the lexicographically smallest id sequence among the
/// minimum-weight covers.
pub fn brute_force_opt(h: &Hypergraph) -> Result<(u64, Vec<u32>), OracleError> {
    guard(h)?;
    let n = h.vertex_count();
    let masks = edge_masks(h);
    let mut best_weight = u64::MAX;
    let mut best: Option<Vec<u32>> = None;
    for mask in 0u32..(1u32 << n) {
        let mut weight = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros();
            weight += h.weight(v);
            bits &= bits - 1;
            if weight > best_weight {
                break;
            }
        }
        if weight > best_weight || masks.iter().any(|&em| em & mask == 0) {
            continue;
        }
        let witness: Vec<u32> = (0..n as u32).filter(|&v| mask >> v & 1 == 1).collect();
        let improves = weight < best_weight
            || best.as_ref().map_or(true, |b| witness < *b);
        if improves {
            best_weight = weight;
            best = Some(witness);
        }
    }
    best.map(|w| (best_weight, w)).ok_or(OracleError::Uncoverable)
}

/// Second independent optimum: branch on the members of the first uncovered
/// edge, pruning by weight. Returns the optimal weight only.
pub fn branch_bound_opt(h: &Hypergraph) -> Result<u64, OracleError> {
    guard(h)?;
    let masks = edge_masks(h);
    let mut best = u64::MAX;
    fn recurse(h: &Hypergraph, masks: &[u32], cover: u32, weight: u64, best: &mut u64) {
        if weight >= *best {
            return;
        }
        match masks.iter().find(|&&em| em & cover == 0) {
            None => *best = weight,
            Some(&em) => {
                let mut bits = em;
                while bits != 0 {
                    let v = bits.trailing_zeros();
                    bits &= bits - 1;
                    recurse(h, masks, cover | 1 << v, weight + h.weight(v), best);
                }
            }
        }
    }
    recurse(h, &masks, 0, 0, &mut best);
    if best == u64::MAX {
        return Err(OracleError::Uncoverable);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualViolation {
    #[error("dual value of edge {edge} is negative")]
    Negative { edge: u32 },
    #[error("packing constraint violated at vertex {vertex}: {sum} > weight {weight}")]
    Packing { vertex: u32, sum: String, weight: u64 },
}

/// Exact check of both edge-packing constraints: per-vertex sums at most the
/// weight, and nonnegativity.
pub fn check_dual_feasible(h: &Hypergraph, dual: &[Rat]) -> Result<(), DualViolation> {
    for (e, d) in dual.iter().enumerate() {
        if *d < rat::zero() {
            return Err(DualViolation::Negative { edge: e as u32 });
        }
    }
    let mut sums = vec![rat::zero(); h.vertex_count()];
    for (e, members) in h.edges().iter().enumerate() {
        for &v in members {
            sums[v as usize] += &dual[e];
        }
    }
    for (v, sum) in sums.iter().enumerate() {
        if *sum > rat::int(h.weight(v as u32) as i64) {
            return Err(DualViolation::Packing {
                vertex: v as u32,
                sum: rat::fmt_frac(sum),
                weight: h.weight(v as u32),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CounterViolation {
    #[error("edge {edge}: {count} raises exceed the bound {bound}")]
    RaiseBound { edge: u32, count: u32, bound: u32 },
    #[error("vertex {vertex}: {count} stuck iterations reach alpha/beta = {bound}")]
    StuckBound { vertex: u32, count: u32, bound: String },
    #[error("edge {edge} covered at iteration {covered_at}, above 1 + raises + member stuck = {bound}")]
    EdgeIterations { edge: u32, covered_at: u32, bound: u64 },
    #[error("run took {iterations} iterations, above the analytic bound {bound}")]
    TotalIterations { iterations: u32, bound: u64 },
}

/// The most conservative multiplier a vertex ever compares against: the
/// maximum over all its incident edges (equals the uniform value outside
/// local mode).
fn vertex_alpha(params: &Params, incidence: &[Vec<u32>], v: usize) -> Rat {
    match &params.alpha {
        AlphaAssignment::Uniform(a) => a.clone(),
        AlphaAssignment::PerEdge(t) => incidence[v]
            .iter()
            .map(|&e| t[e as usize].clone())
            .max()
            .unwrap_or_else(|| rat::int(2)),
    }
}

/// Checks the counted bounds of the analysis on a finished run:
/// per-edge raises at most `ceil(log_alpha(e) |E(v_e)|)`, per-vertex stuck
/// iterations strictly below `alpha/beta`, per-edge coverage iteration at
/// most `1 + raises + sum of member stuck counts`, and the total iteration
/// count at most the analytic bound.
pub fn check_counters(
    h: &Hypergraph,
    params: &Params,
    result: &RunResult,
) -> Result<(), CounterViolation> {
    let stats = h.degree_stats();
    let incidence = h.incidence();
    for (e, &count) in result.raise_counts.iter().enumerate() {
        let v_e = result.argmin_vertex[e] as usize;
        let bound = rat::ceil_log(
            params.alpha.for_edge(e),
            stats.vertex_degree[v_e] as u128,
        );
        if count > bound {
            return Err(CounterViolation::RaiseBound { edge: e as u32, count, bound });
        }
    }
    for (v, &count) in result.stuck_counts.iter().enumerate() {
        let bound = vertex_alpha(params, &incidence, v) / &params.beta;
        if rat::int(count as i64) >= bound {
            return Err(CounterViolation::StuckBound {
                vertex: v as u32,
                count,
                bound: rat::fmt_frac(&bound),
            });
        }
    }
    for (e, members) in h.edges().iter().enumerate() {
        let stuck_sum: u64 = members
            .iter()
            .map(|&v| result.stuck_counts[v as usize] as u64)
            .sum();
        let bound = 1 + result.raise_counts[e] as u64 + stuck_sum;
        if result.covered_at[e] as u64 > bound {
            return Err(CounterViolation::EdgeIterations {
                edge: e as u32,
                covered_at: result.covered_at[e],
                bound,
            });
        }
    }
    let bound = crate::engine::analytic_iteration_bound(h, params);
    if result.iterations as u64 > bound {
        return Err(CounterViolation::TotalIterations { iterations: result.iterations, bound });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("iteration {iteration}: trace joins {actual:?} differ from re-derived {expected:?}")]
    Joins { iteration: u32, expected: Vec<u32>, actual: Vec<u32> },
    #[error("iteration {iteration}: trace covered edges {actual:?} differ from re-derived {expected:?}")]
    CoveredEdges { iteration: u32, expected: Vec<u32>, actual: Vec<u32> },
    #[error("iteration {iteration}: trace stuck vertices {actual:?} differ from re-derived {expected:?}")]
    StuckVertices { iteration: u32, expected: Vec<u32>, actual: Vec<u32> },
    #[error("iteration {iteration}: trace raises {actual:?} differ from re-derived {expected:?}")]
    Raises { iteration: u32, expected: Vec<u32>, actual: Vec<u32> },
    #[error("iteration {iteration}: dual feasibility violated at vertex {vertex} ({sum} > {weight})")]
    DualFeasibility { iteration: u32, vertex: u32, sum: String, weight: u64 },
    #[error("iteration {iteration}: deal vault violated at vertex {vertex} ({sum} > {bound})")]
    Vault { iteration: u32, vertex: u32, sum: String, bound: String },
    #[error("final state mismatch: {0}")]
    FinalState(String),
}

/// Re-executes the whole run from the hypergraph, the parameters, and the
/// event trace alone, re-deriving every join/cover/vote/raise decision with
/// fresh (non-incremental) rational sums, and re-checking dual feasibility
/// and the deal vault after every iteration. Any divergence from the
/// recorded trace or final state is an error.
pub fn replay_check(h: &Hypergraph, params: &Params, result: &RunResult) -> Result<(), ReplayError> {
    let n = h.vertex_count();
    let m = h.edge_count();
    let incidence = h.incidence();
    let beta = &params.beta;
    let one_minus_beta = rat::int(1) - beta;

    // Iteration 0, re-derived.
    let mut deal: Vec<Rat> = Vec::with_capacity(m);
    for (e, members) in h.edges().iter().enumerate() {
        let v_e = members
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let lhs = h.weight(a) as u128 * incidence[b as usize].len() as u128;
                let rhs = h.weight(b) as u128 * incidence[a as usize].len() as u128;
                lhs.cmp(&rhs).then(a.cmp(&b))
            })
            .expect("nonempty edge");
        if v_e != result.argmin_vertex[e] {
            return Err(ReplayError::FinalState(format!(
                "edge {e}: argmin member {} recorded, {} re-derived",
                result.argmin_vertex[e], v_e
            )));
        }
        let d0 = beta * rat::frac(h.weight(v_e) as i64, incidence[v_e as usize].len() as i64);
        if d0 != result.initial_deal[e] {
            return Err(ReplayError::FinalState(format!("edge {e}: initial deal mismatch")));
        }
        deal.push(d0);
    }
    let mut dual = deal.clone();
    let mut covered = vec![false; m];
    let mut in_cover = vec![false; n];
    let mut terminated: Vec<bool> = incidence.iter().map(|inc| inc.is_empty()).collect();
    let mut raise_recount = vec![0u32; m];
    let mut stuck_recount = vec![0u32; n];

    let dual_sum = |incidence: &Vec<Vec<u32>>, dual: &Vec<Rat>, v: usize| -> Rat {
        incidence[v].iter().fold(rat::zero(), |acc, &e| acc + &dual[e as usize])
    };
    let live_sum = |incidence: &Vec<Vec<u32>>, covered: &Vec<bool>, deal: &Vec<Rat>, v: usize| -> Rat {
        incidence[v]
            .iter()
            .filter(|&&e| !covered[e as usize])
            .fold(rat::zero(), |acc, &e| acc + &deal[e as usize])
    };

    for (idx, ev) in result.trace.iter().enumerate() {
        let i = idx as u32 + 1;
        if ev.iteration != i {
            return Err(ReplayError::FinalState(format!(
                "trace entry {idx} labeled iteration {}",
                ev.iteration
            )));
        }

        // (a) joins are exactly the tight live vertices.
        let expected_joins: Vec<u32> = (0..n as u32)
            .filter(|&v| {
                !in_cover[v as usize]
                    && !terminated[v as usize]
                    && dual_sum(&incidence, &dual, v as usize)
                        >= &one_minus_beta * rat::int(h.weight(v) as i64)
            })
            .collect();
        if expected_joins != ev.joins {
            return Err(ReplayError::Joins { iteration: i, expected: expected_joins, actual: ev.joins.clone() });
        }
        for &v in &expected_joins {
            in_cover[v as usize] = true;
            terminated[v as usize] = true;
        }

        // (b) covered edges are exactly those with a cover member.
        let expected_covered: Vec<u32> = (0..m as u32)
            .filter(|&e| !covered[e as usize] && h.edge(e).iter().any(|&v| in_cover[v as usize]))
            .collect();
        if expected_covered != ev.covered_edges {
            return Err(ReplayError::CoveredEdges {
                iteration: i,
                expected: expected_covered,
                actual: ev.covered_edges.clone(),
            });
        }
        for &e in &expected_covered {
            covered[e as usize] = true;
            if result.covered_at[e as usize] != i {
                return Err(ReplayError::FinalState(format!(
                    "edge {e} covered at iteration {i}, recorded {}",
                    result.covered_at[e as usize]
                )));
            }
        }

        // (c) vertices with no live edge left terminate outside the cover.
        for v in 0..n {
            if !in_cover[v] && !terminated[v] && incidence[v].iter().all(|&e| covered[e as usize]) {
                terminated[v] = true;
            }
        }

        // (d) votes from fresh live-deal sums.
        let mut raise_flag = vec![false; n];
        let mut expected_stuck = Vec::new();
        for v in 0..n as u32 {
            if in_cover[v as usize] || terminated[v as usize] {
                continue;
            }
            let alpha_v = match &params.alpha {
                AlphaAssignment::Uniform(a) => a.clone(),
                AlphaAssignment::PerEdge(t) => incidence[v as usize]
                    .iter()
                    .filter(|&&e| !covered[e as usize])
                    .map(|&e| t[e as usize].clone())
                    .max()
                    .expect("live vertex has a live edge"),
            };
            let threshold = beta / alpha_v * rat::int(h.weight(v) as i64);
            if live_sum(&incidence, &covered, &deal, v as usize) <= threshold {
                raise_flag[v as usize] = true;
            } else {
                expected_stuck.push(v);
                stuck_recount[v as usize] += 1;
            }
        }
        if expected_stuck != ev.stuck_vertices {
            return Err(ReplayError::StuckVertices {
                iteration: i,
                expected: expected_stuck,
                actual: ev.stuck_vertices.clone(),
            });
        }

        // (e) raises are exactly the uncovered edges with unanimous raise
        // votes; every uncovered edge then banks its deal into the dual.
        let mut expected_raises = Vec::new();
        for e in 0..m as u32 {
            if covered[e as usize] {
                continue;
            }
            if h.edge(e).iter().all(|&v| raise_flag[v as usize]) {
                expected_raises.push(e);
                raise_recount[e as usize] += 1;
                let grown = &deal[e as usize] * params.alpha.for_edge(e as usize);
                deal[e as usize] = grown;
            }
            let d = deal[e as usize].clone();
            dual[e as usize] += d;
        }
        if expected_raises != ev.raises {
            return Err(ReplayError::Raises { iteration: i, expected: expected_raises, actual: ev.raises.clone() });
        }

        // Claims, re-checked with fresh sums.
        for v in 0..n as u32 {
            let sum = dual_sum(&incidence, &dual, v as usize);
            if sum > rat::int(h.weight(v) as i64) {
                return Err(ReplayError::DualFeasibility {
                    iteration: i,
                    vertex: v,
                    sum: rat::fmt_frac(&sum),
                    weight: h.weight(v),
                });
            }
        }
        for v in 0..n as u32 {
            if in_cover[v as usize] || terminated[v as usize] {
                continue;
            }
            let sum = live_sum(&incidence, &covered, &deal, v as usize);
            let bound = beta * rat::int(h.weight(v) as i64);
            if sum > bound {
                return Err(ReplayError::Vault {
                    iteration: i,
                    vertex: v,
                    sum: rat::fmt_frac(&sum),
                    bound: rat::fmt_frac(&bound),
                });
            }
        }
    }

    // Final state must line up with the recorded result.
    if covered.iter().any(|c| !c) {
        return Err(ReplayError::FinalState("trace ends with uncovered edges".into()));
    }
    let cover: Vec<u32> = (0..n as u32).filter(|&v| in_cover[v as usize]).collect();
    if cover != result.cover {
        return Err(ReplayError::FinalState("cover set mismatch".into()));
    }
    if h.weight_of(&cover) != result.cover_weight {
        return Err(ReplayError::FinalState("cover weight mismatch".into()));
    }
    if dual != result.dual {
        return Err(ReplayError::FinalState("dual table mismatch".into()));
    }
    if result.trace.len() as u32 != result.iterations {
        return Err(ReplayError::FinalState("iteration count mismatch".into()));
    }
    if raise_recount != result.raise_counts || stuck_recount != result.stuck_counts {
        return Err(ReplayError::FinalState("raise/stuck counter mismatch".into()));
    }
    Ok(())
}

/// One named pass/fail entry of a verification report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn of<E: std::fmt::Display>(name: &str, res: Result<(), E>) -> CheckOutcome {
        match res {
            Ok(()) => CheckOutcome { name: name.into(), pass: true, detail: None },
            Err(e) => CheckOutcome { name: name.into(), pass: false, detail: Some(e.to_string()) },
        }
    }

    fn flag(name: &str, pass: bool, detail_on_fail: String) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            pass,
            detail: if pass { None } else { Some(detail_on_fail) },
        }
    }
}

/// Aggregated verification of a finished run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub all_ok: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every applicable check. When `optimum` is supplied (from one of the
/// oracles), the end-to-end ratio and weak-duality checks are included.
pub fn verify_run(
    h: &Hypergraph,
    params: &Params,
    result: &RunResult,
    optimum: Option<u64>,
) -> VerifyReport {
    let cert = certificate(params, result);
    let mut checks = vec![
        CheckOutcome::flag(
            "cover_valid",
            check_cover(h, &result.cover),
            "an edge has no member in the cover".into(),
        ),
        CheckOutcome::of("dual_feasible", check_dual_feasible(h, &result.dual)),
        CheckOutcome::of("iteration_replay", replay_check(h, params, result)),
        CheckOutcome::flag(
            "ratio_certificate",
            rat::int(cert.cover_weight as i64) <= cert.ratio_bound,
            format!(
                "cover weight {} exceeds (rank+eps)*dual_sum = {}",
                cert.cover_weight,
                rat::fmt_frac(&cert.ratio_bound)
            ),
        ),
        CheckOutcome::of("counted_bounds", check_counters(h, params, result)),
    ];
    if let Some(opt) = optimum {
        let factor = params.ratio_factor();
        checks.push(CheckOutcome::flag(
            "optimum_ratio",
            rat::int(cert.cover_weight as i64) <= &factor * rat::int(opt as i64),
            format!("cover weight {} exceeds (rank+eps)*opt with opt = {opt}", cert.cover_weight),
        ));
        checks.push(CheckOutcome::flag(
            "weak_duality",
            cert.dual_sum <= rat::int(opt as i64),
            format!("dual sum {} exceeds opt = {opt}", rat::fmt_frac(&cert.dual_sum)),
        ));
    }
    let all_ok = checks.iter().all(|c| c.pass);
    VerifyReport { checks, all_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Fault, RunOptions};
    use crate::gen;
    use crate::params::AlphaMode;

    fn triangle() -> Hypergraph {
        Hypergraph::new(vec![1, 1, 1], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
    }

    fn params_for(h: &Hypergraph, epsilon: Rat) -> Params {
        let stats = h.degree_stats();
        Params::new(epsilon, AlphaMode::Global, stats.rank, &stats).unwrap()
    }

    #[test]
    fn cover_checks() {
        let h = triangle();
        assert!(check_cover(&h, &[0, 1]));
        assert!(!check_cover(&h, &[0]));
        assert!(check_cover(&Hypergraph::new(vec![1], vec![]), &[]));
    }

    #[test]
    fn brute_force_reference_points() {
        assert_eq!(brute_force_opt(&triangle()).unwrap().0, 2);
        let h = Hypergraph::new(vec![1, 2], vec![vec![0, 1]]);
        assert_eq!(brute_force_opt(&h).unwrap(), (1, vec![0]));
        let h = Hypergraph::new(vec![7], vec![vec![0]]);
        assert_eq!(brute_force_opt(&h).unwrap(), (7, vec![0]));
        let h = Hypergraph::new(vec![1; 30], vec![vec![0, 1]]);
        assert!(matches!(brute_force_opt(&h), Err(OracleError::TooLarge { .. })));
        assert_eq!(brute_force_opt(&Hypergraph::new(vec![3], vec![])).unwrap(), (0, vec![]));
    }

    #[test]
    fn brute_force_witness_is_lexicographically_smallest() {
        // Covers of weight 2: {0,1}, {0,2}, {1,2} and more; {0,1} wins.
        let (w, witness) = brute_force_opt(&triangle()).unwrap();
        assert_eq!((w, witness), (2, vec![0, 1]));
    }

    #[test]
    fn cycle_five_optimum() {
        let h = gen::gen_cycle(5).unwrap();
        assert_eq!(brute_force_opt(&h).unwrap().0, 3);
        assert_eq!(branch_bound_opt(&h).unwrap(), 3);
    }

    #[test]
    fn oracle_agreement_on_random_instances() {
        let mut rng = gen::SplitMix64::new(0xA11CE);
        for trial in 0..200 {
            let n = 2 + (rng.next_below(7) as usize); // 2..=8
            let m = 1 + (rng.next_below(2 * n as u64) as usize);
            let rank = 1 + (rng.next_below(3.min(n as u64)) as usize);
            let h = gen::gen_random_uniform(n, m, rank, 6, rng.next_u64()).unwrap();
            let bf = brute_force_opt(&h).unwrap().0;
            let bb = branch_bound_opt(&h).unwrap();
            assert_eq!(bf, bb, "trial {trial}: oracles disagree on {h:?}");
        }
    }

    #[test]
    fn dual_feasibility_examples() {
        let h = Hypergraph::new(vec![1, 2], vec![vec![0, 1]]);
        assert!(check_dual_feasible(&h, &[rat::zero()]).is_ok());
        assert!(check_dual_feasible(&h, &[rat::int(1)]).is_ok());
        assert!(matches!(
            check_dual_feasible(&h, &[rat::frac(3, 2)]),
            Err(DualViolation::Packing { vertex: 0, .. })
        ));
        assert!(matches!(
            check_dual_feasible(&h, &[rat::frac(-1, 2)]),
            Err(DualViolation::Negative { edge: 0 })
        ));
    }

    #[test]
    fn verified_run_passes_everything() {
        let h = triangle();
        let p = params_for(&h, rat::int(1));
        let r = run(&h, &p, &RunOptions::default()).unwrap();
        let (opt, _) = brute_force_opt(&h).unwrap();
        assert_eq!(opt, 2);
        let report = verify_run(&h, &p, &r, Some(opt));
        assert!(report.all_ok, "{report:?}");
        assert_eq!(report.checks.len(), 7);
    }

    #[test]
    fn hand_example_counters() {
        let h = Hypergraph::new(vec![1, 1], vec![vec![0, 1]]);
        let p = params_for(&h, rat::int(1));
        let r = run(&h, &p, &RunOptions::default()).unwrap();
        assert_eq!(r.stuck_counts, vec![1, 1]);
        assert_eq!(r.raise_counts, vec![0]);
        assert!(check_counters(&h, &p, &r).is_ok());
        // The certificate sits exactly at the boundary: weight 2 = 3 * 2/3.
        let cert = certificate(&p, &r);
        assert_eq!(cert.ratio_bound, rat::int(2));
        assert_eq!(cert.cover_weight, 2);
    }

    #[test]
    fn zero_iteration_run_vacuous() {
        let h = Hypergraph::new(vec![1, 1], vec![]);
        let p = params_for(&h, rat::int(1));
        let r = run(&h, &p, &RunOptions::default()).unwrap();
        let report = verify_run(&h, &p, &r, Some(0));
        assert!(report.all_ok, "{report:?}");
    }

    #[test]
    fn replay_rejects_tampered_trace() {
        let h = triangle();
        let p = params_for(&h, rat::int(1));
        let good = run(&h, &p, &RunOptions::default()).unwrap();
        assert!(replay_check(&h, &p, &good).is_ok());

        // Drop a stuck vertex from the record.
        let mut tampered = good.clone();
        tampered.trace[0].stuck_vertices.pop();
        assert!(matches!(
            replay_check(&h, &p, &tampered),
            Err(ReplayError::StuckVertices { iteration: 1, .. })
        ));

        // Inflate the final dual table.
        let mut tampered = good.clone();
        tampered.dual[0] += rat::frac(1, 100);
        assert!(matches!(
            replay_check(&h, &p, &tampered),
            Err(ReplayError::FinalState(_))
        ));

        // Claim fewer iterations than the trace shows.
        let mut tampered = good;
        tampered.iterations = 1;
        assert!(replay_check(&h, &p, &tampered).is_err());
    }

    #[test]
    fn replay_rejects_fault_injected_runs() {
        // A run that skips the vote step's honesty: every vertex always
        // raises. Runtime checks are off so the engine completes or blows
        // the cap; either way verification must fail.
        let h = triangle();
        let p = params_for(&h, rat::int(1));
        let opts = RunOptions { fault: Fault::AlwaysRaise, runtime_checks: false, cap: None };
        match run(&h, &p, &opts) {
            Ok(r) => {
                let report = verify_run(&h, &p, &r, None);
                assert!(!report.all_ok, "verifier accepted a faulty run");
            }
            Err(_) => {} // cap explosion is also a detection
        }

        // Skipping the covered broadcast stalls the run at the cap.
        let opts = RunOptions { fault: Fault::SkipCoveredBroadcast, runtime_checks: false, cap: None };
        assert!(run(&h, &p, &opts).is_err());
    }
}
