//! Round-synchronous execution of the primal-dual cover algorithm.
//!
//! A run proceeds in iterations. Iteration 0 initializes every edge's deal
//! from the smallest normalized weight (`w(v)/|E(v)|`) among its members.
//! Each later iteration executes five sub-steps, with all nodes acting
//! simultaneously within a sub-step and each sub-step reading the state left
//! by the previous one:
//!
//!   (a) every vertex whose dual sum reached `(1-beta)*w(v)` joins the cover,
//!   (b) edges with a cover member become covered and notify their members,
//!   (c) members drop covered edges from their live sets; a vertex with no
//!       live edges left terminates outside the cover,
//!   (d) every live vertex votes `raise` if its live-deal sum is at most
//!       `(beta/alpha)*w(v)`, else `stuck`,
//!   (e) every uncovered edge multiplies its deal by `alpha` if all members
//!       voted raise (otherwise keeps it), and the deal is added to the
//!       edge's dual variable.
//!
//! All comparisons are exact rational comparisons. After every iteration the
//! engine re-checks the two running invariants of the analysis: dual
//! feasibility (`sum of duals at v <= w(v)`) and the deal vault
//! (`sum of live deals at v <= beta*w(v)`).

use crate::hypergraph::{Hypergraph, ValidationReport};
use crate::params::{AlphaAssignment, Params};
use crate::rat::{self, Rat};
use serde::{Deserialize, Serialize};

/// A vertex's vote in sub-step (d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vote {
    Raise,
    Stuck,
}

/// Tightness test of sub-step (a): `dual_sum >= (1 - beta) * w(v)`.
pub fn is_tight(dual_sum: &Rat, weight: u64, beta: &Rat) -> bool {
    *dual_sum >= (rat::int(1) - beta) * rat::int(weight as i64)
}

/// Vote rule of sub-step (d): raise iff `live_deal_sum <= (beta/alpha) * w(v)`.
pub fn classify(live_deal_sum: &Rat, weight: u64, beta: &Rat, alpha: &Rat) -> Vote {
    if *live_deal_sum <= beta / alpha * rat::int(weight as i64) {
        Vote::Raise
    } else {
        Vote::Stuck
    }
}

/// Deal update of sub-step (e).
pub fn next_deal(deal: &Rat, alpha: &Rat, all_raise: bool) -> Rat {
    if all_raise {
        deal * alpha
    } else {
        deal.clone()
    }
}

/// What happened in one iteration, in sub-step order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationEvents {
    pub iteration: u32,
    /// Vertices that joined the cover in sub-step (a).
    pub joins: Vec<u32>,
    /// Edges covered in sub-step (b).
    pub covered_edges: Vec<u32>,
    /// Edges whose deal was multiplied in sub-step (e).
    pub raises: Vec<u32>,
    /// Vertices that voted stuck in sub-step (d).
    pub stuck_vertices: Vec<u32>,
}

/// Completed run: cover, dual certificate, and full event trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub cover: Vec<u32>,
    pub cover_weight: u64,
    /// Final dual value per edge (frozen at the iteration before coverage).
    pub dual: Vec<Rat>,
    pub iterations: u32,
    pub trace: Vec<IterationEvents>,
    /// Per edge: the member with the smallest normalized weight (lowest id
    /// on ties) whose weight/degree pair seeded the initial deal.
    pub argmin_vertex: Vec<u32>,
    pub initial_deal: Vec<Rat>,
    /// Iteration at which each edge became covered (>= 1).
    pub covered_at: Vec<u32>,
    pub raise_counts: Vec<u32>,
    pub stuck_counts: Vec<u32>,
}

impl RunResult {
    /// Sum of all final dual values.
    pub fn dual_sum(&self) -> Rat {
        self.dual.iter().fold(rat::zero(), |acc, d| acc + d)
    }
}

/// Deliberate protocol mutations, used to check that the verifier actually
/// rejects broken executions. Never enabled by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Sub-step (b) never marks edges covered.
    SkipCoveredBroadcast,
    /// Sub-step (d) votes raise unconditionally.
    AlwaysRaise,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Iteration cap; `None` derives the default from the analytic bound.
    pub cap: Option<u64>,
    /// Re-check the running invariants after every iteration.
    pub runtime_checks: bool,
    pub fault: Fault,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { cap: None, runtime_checks: true, fault: Fault::None }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EngineError {
    #[error("instance failed validation: {0}")]
    InvalidInstance(ValidationReport),
    #[error("iteration cap {cap} exceeded after {iterations} iterations; {uncovered} edges uncovered")]
    CapExceeded {
        cap: u64,
        iterations: u32,
        uncovered: usize,
        trace: Vec<IterationEvents>,
    },
    #[error("{claim} violated at vertex {vertex} in iteration {iteration}: {detail}")]
    InvariantViolation {
        claim: &'static str,
        vertex: u32,
        iteration: u32,
        detail: String,
        trace: Vec<IterationEvents>,
    },
    #[error("edge {edge} missing a vote from member {vertex} in iteration {iteration}")]
    ProtocolViolation { edge: u32, vertex: u32, iteration: u32 },
}

/// Full engine state for one run. Owned by the run; not shared.
pub struct EngineState<'a> {
    h: &'a Hypergraph,
    params: &'a Params,
    // Static tables.
    tight_threshold: Vec<Rat>,
    uniform_raise_threshold: Option<Vec<Rat>>,
    vault_threshold: Vec<Rat>,
    // Vertex state.
    dual_sum: Vec<Rat>,
    live_deal_sum: Vec<Rat>,
    live_degree: Vec<usize>,
    in_cover: Vec<bool>,
    terminated: Vec<bool>,
    raise_flag: Vec<bool>,
    vertex_live: Vec<Vec<u32>>,
    stuck_counts: Vec<u32>,
    // Edge state.
    deal: Vec<Rat>,
    dual: Vec<Rat>,
    covered: Vec<bool>,
    covered_at: Vec<u32>,
    raise_counts: Vec<u32>,
    argmin_vertex: Vec<u32>,
    initial_deal: Vec<Rat>,
    member_slot: Vec<Vec<u32>>,
    // Scheduling.
    live_vertex_ids: Vec<u32>,
    live_edge_ids: Vec<u32>,
    uncovered: usize,
    iteration: u32,
    trace: Vec<IterationEvents>,
    fault: Fault,
}

impl<'a> EngineState<'a> {
    /// Iteration 0: pick each edge's minimum-normalized-weight member and
    /// seed deals and duals.
    pub fn new(h: &'a Hypergraph, params: &'a Params) -> EngineState<'a> {
        let n = h.vertex_count();
        let m = h.edge_count();
        let one_minus_beta = rat::int(1) - &params.beta;
        let tight_threshold: Vec<Rat> = h
            .weights()
            .iter()
            .map(|&w| &one_minus_beta * rat::int(w as i64))
            .collect();
        let vault_threshold: Vec<Rat> = h
            .weights()
            .iter()
            .map(|&w| &params.beta * rat::int(w as i64))
            .collect();
        let uniform_raise_threshold = match &params.alpha {
            AlphaAssignment::Uniform(alpha) => {
                let factor = &params.beta / alpha;
                Some(h.weights().iter().map(|&w| &factor * rat::int(w as i64)).collect())
            }
            AlphaAssignment::PerEdge(_) => None,
        };

        let mut degree = vec![0usize; n];
        for e in h.edges() {
            for &v in e {
                degree[v as usize] += 1;
            }
        }

        let mut vertex_live: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut member_slot: Vec<Vec<u32>> = Vec::with_capacity(m);
        let mut argmin_vertex = Vec::with_capacity(m);
        let mut deal = Vec::with_capacity(m);
        let mut dual_sum = vec![rat::zero(); n];
        for (i, members) in h.edges().iter().enumerate() {
            let mut slots = Vec::with_capacity(members.len());
            for &v in members {
                vertex_live[v as usize].push(i as u32);
                slots.push(vertex_live[v as usize].len() as u32 - 1);
            }
            member_slot.push(slots);
            // argmin of w(v)/|E(v)|, lowest id on ties: compare by
            // cross-multiplication, strict improvement only.
            let v_e = members
                .iter()
                .copied()
                .reduce(|best, v| {
                    let lhs = h.weight(v) as u128 * degree[best as usize] as u128;
                    let rhs = h.weight(best) as u128 * degree[v as usize] as u128;
                    if lhs < rhs {
                        v
                    } else {
                        best
                    }
                })
                .expect("validated edges are nonempty");
            argmin_vertex.push(v_e);
            let d0 = &params.beta
                * rat::frac(h.weight(v_e) as i64, degree[v_e as usize] as i64);
            for &v in members {
                dual_sum[v as usize] += &d0;
            }
            deal.push(d0);
        }

        let terminated: Vec<bool> = degree.iter().map(|&d| d == 0).collect();
        let live_vertex_ids = (0..n as u32).filter(|&v| !terminated[v as usize]).collect();

        EngineState {
            h,
            params,
            tight_threshold,
            uniform_raise_threshold,
            vault_threshold,
            live_deal_sum: dual_sum.clone(),
            dual_sum,
            live_degree: degree,
            in_cover: vec![false; n],
            terminated,
            raise_flag: vec![false; n],
            vertex_live,
            stuck_counts: vec![0; n],
            dual: deal.clone(),
            initial_deal: deal.clone(),
            deal,
            covered: vec![false; m],
            covered_at: vec![0; m],
            raise_counts: vec![0; m],
            argmin_vertex,
            member_slot,
            live_vertex_ids,
            live_edge_ids: (0..m as u32).collect(),
            uncovered: m,
            iteration: 0,
            trace: Vec::new(),
            fault: Fault::None,
        }
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn uncovered_edges(&self) -> usize {
        self.uncovered
    }

    fn member_index(&self, e: u32, v: u32) -> usize {
        self.h.edge(e).binary_search(&v).expect("member of its own edge")
    }

    /// Drop edge `e` from `v`'s live list in O(1), fixing up the slot of the
    /// edge that swaps into its place.
    fn remove_live(&mut self, e: u32, v: u32) {
        let j = self.member_index(e, v);
        let slot = self.member_slot[e as usize][j] as usize;
        let moved = {
            let list = &mut self.vertex_live[v as usize];
            list.swap_remove(slot);
            list.get(slot).copied()
        };
        if let Some(moved) = moved {
            let jm = self.member_index(moved, v);
            self.member_slot[moved as usize][jm] = slot as u32;
        }
    }

    /// The vote threshold `(beta/alpha_v) * w(v)`; in local mode `alpha_v`
    /// is the most conservative (largest) multiplier among `v`'s live edges.
    fn raise_threshold(&self, v: u32) -> Rat {
        match &self.uniform_raise_threshold {
            Some(t) => t[v as usize].clone(),
            None => {
                let alpha_v = self.vertex_live[v as usize]
                    .iter()
                    .map(|&e| self.params.alpha.for_edge(e as usize))
                    .max()
                    .expect("live vertex has live edges");
                &self.params.beta / alpha_v * rat::int(self.h.weight(v) as i64)
            }
        }
    }

    /// Executes one full iteration (sub-steps a-e) and appends its events to
    /// the trace.
    pub fn step(&mut self) -> Result<(), EngineError> {
        debug_assert!(self.uncovered > 0);
        let i = self.iteration + 1;
        let mut events = IterationEvents {
            iteration: i,
            joins: Vec::new(),
            covered_edges: Vec::new(),
            raises: Vec::new(),
            stuck_vertices: Vec::new(),
        };

        // (a) tight vertices join the cover.
        for idx in 0..self.live_vertex_ids.len() {
            let v = self.live_vertex_ids[idx];
            if self.dual_sum[v as usize] >= self.tight_threshold[v as usize] {
                self.in_cover[v as usize] = true;
                self.terminated[v as usize] = true;
                events.joins.push(v);
            }
        }

        // (b) edges with a cover member become covered.
        if self.fault != Fault::SkipCoveredBroadcast {
            for idx in 0..self.live_edge_ids.len() {
                let e = self.live_edge_ids[idx];
                if self.h.edge(e).iter().any(|&v| self.in_cover[v as usize]) {
                    self.covered[e as usize] = true;
                    self.covered_at[e as usize] = i;
                    self.uncovered -= 1;
                    events.covered_edges.push(e);
                }
            }
        }

        // (c) members drop covered edges; vertices without live edges stop.
        for idx in 0..events.covered_edges.len() {
            let e = events.covered_edges[idx];
            for j in 0..self.h.edge(e).len() {
                let v = self.h.edge(e)[j];
                if self.in_cover[v as usize] {
                    continue;
                }
                self.remove_live(e, v);
                self.live_degree[v as usize] -= 1;
                let d = self.deal[e as usize].clone();
                self.live_deal_sum[v as usize] -= d;
                if self.live_degree[v as usize] == 0 {
                    self.terminated[v as usize] = true;
                }
            }
        }

        let (in_cover, terminated) = (&self.in_cover, &self.terminated);
        self.live_vertex_ids
            .retain(|&v| !in_cover[v as usize] && !terminated[v as usize]);
        let covered = &self.covered;
        self.live_edge_ids.retain(|&e| !covered[e as usize]);

        // (d) live vertices vote raise or stuck.
        for idx in 0..self.live_vertex_ids.len() {
            let v = self.live_vertex_ids[idx];
            let vote = if self.fault == Fault::AlwaysRaise {
                Vote::Raise
            } else if self.live_deal_sum[v as usize] <= self.raise_threshold(v) {
                Vote::Raise
            } else {
                Vote::Stuck
            };
            self.raise_flag[v as usize] = vote == Vote::Raise;
            if vote == Vote::Stuck {
                self.stuck_counts[v as usize] += 1;
                events.stuck_vertices.push(v);
            }
        }

        // (e) uncovered edges update deals and push them into the duals.
        for idx in 0..self.live_edge_ids.len() {
            let e = self.live_edge_ids[idx];
            let mut all_raise = true;
            for &v in self.h.edge(e) {
                if self.in_cover[v as usize] || self.terminated[v as usize] {
                    return Err(EngineError::ProtocolViolation { edge: e, vertex: v, iteration: i });
                }
                all_raise &= self.raise_flag[v as usize];
            }
            if all_raise {
                let grown = &self.deal[e as usize] * self.params.alpha.for_edge(e as usize);
                let delta = &grown - &self.deal[e as usize];
                for &v in self.h.edge(e) {
                    self.live_deal_sum[v as usize] += &delta;
                }
                self.deal[e as usize] = grown;
                self.raise_counts[e as usize] += 1;
                events.raises.push(e);
            }
            let d = self.deal[e as usize].clone();
            self.dual[e as usize] += &d;
            for &v in self.h.edge(e) {
                self.dual_sum[v as usize] += &d;
            }
        }

        self.iteration = i;
        self.trace.push(events);
        Ok(())
    }

    /// Exact re-check of the two running claims; called after every
    /// iteration when runtime checks are enabled.
    pub fn check_invariants(&self) -> Result<(), EngineError> {
        for v in 0..self.h.vertex_count() as u32 {
            let w = rat::int(self.h.weight(v) as i64);
            if self.dual_sum[v as usize] > w {
                return Err(self.violation("dual feasibility", v));
            }
        }
        for &v in &self.live_vertex_ids {
            if self.live_deal_sum[v as usize] > self.vault_threshold[v as usize] {
                return Err(self.violation("deal vault", v));
            }
        }
        Ok(())
    }

    fn violation(&self, claim: &'static str, v: u32) -> EngineError {
        EngineError::InvariantViolation {
            claim,
            vertex: v,
            iteration: self.iteration,
            detail: format!(
                "dual_sum={} live_deal_sum={} weight={}",
                rat::fmt_frac(&self.dual_sum[v as usize]),
                rat::fmt_frac(&self.live_deal_sum[v as usize]),
                self.h.weight(v)
            ),
            trace: self.trace.clone(),
        }
    }

    fn into_result(self) -> RunResult {
        let cover: Vec<u32> = (0..self.h.vertex_count() as u32)
            .filter(|&v| self.in_cover[v as usize])
            .collect();
        let cover_weight = self.h.weight_of(&cover);
        RunResult {
            cover,
            cover_weight,
            dual: self.dual,
            iterations: self.iteration,
            trace: self.trace,
            argmin_vertex: self.argmin_vertex,
            initial_deal: self.initial_deal,
            covered_at: self.covered_at,
            raise_counts: self.raise_counts,
            stuck_counts: self.stuck_counts,
        }
    }
}

/// Default iteration cap: four times the analytic bound, plus slack. Hitting
/// it means a bug, never silent truncation.
pub fn default_cap(h: &Hypergraph, params: &Params) -> u64 {
    4 * (analytic_iteration_bound(h, params) + 2)
}

/// The counted iteration bound `1 + ceil(log_alpha D) + rank * ceil(alpha/beta)`,
/// instantiated per edge in local mode (smallest multiplier for the raise
/// term, largest for the stuck term).
pub fn analytic_iteration_bound(h: &Hypergraph, params: &Params) -> u64 {
    let max_degree = h.degree_stats().max_degree.max(1) as u128;
    let raise_term = rat::ceil_log(&params.alpha.min(), max_degree) as u64;
    let stuck_per_vertex = rat::ceil_int(&(params.alpha.max() / &params.beta));
    let stuck_term = params.rank as u64
        * u64::try_from(stuck_per_vertex).expect("stuck bound fits u64");
    1 + raise_term + stuck_term
}

/// Runs the algorithm to completion.
pub fn run(h: &Hypergraph, params: &Params, options: &RunOptions) -> Result<RunResult, EngineError> {
    let report = h.validate();
    if !report.is_ok() {
        return Err(EngineError::InvalidInstance(report));
    }
    let mut state = EngineState::new(h, params);
    state.fault = options.fault;
    if options.runtime_checks {
        state.check_invariants()?;
    }
    let cap = options.cap.unwrap_or_else(|| default_cap(h, params));
    while state.uncovered > 0 {
        if state.iteration as u64 >= cap {
            return Err(EngineError::CapExceeded {
                cap,
                iterations: state.iteration,
                uncovered: state.uncovered,
                trace: state.trace,
            });
        }
        state.step()?;
        if options.runtime_checks {
            state.check_invariants()?;
        }
    }
    Ok(state.into_result())
}
