//! Communication-round layout and per-message bit accounting for the
//! bipartite server/client network (vertices are servers, hyperedges are
//! clients, one link per incidence).
//!
//! Iteration 0 occupies rounds 0-1: every vertex uploads its weight and
//! degree, every edge answers with the weight/degree pair of its minimum
//! normalized-weight member, and the initial deal is computed locally from
//! that pair. Every later iteration occupies exactly 4 rounds: covered
//! notifications up, covered broadcast down, raise/stuck votes up, and the
//! one-bit deal decision down. The module replays a finished trace into the
//! exact message stream and checks every message against the bit budget.

use crate::engine::RunResult;
use crate::hypergraph::Hypergraph;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Message vocabulary. Weight/degree payloads are modeled as fixed-width
/// fields sized for the instance; control messages are 1-2 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    /// Vertex uploads `(w(v), |E(v)|)` to an incident edge.
    WeightDegree,
    /// Edge sends the `(weight, degree)` pair of its argmin member down.
    MinPair,
    /// A joining vertex tells a live incident edge it is covered.
    CoveredUp,
    /// A covered edge notifies all its members.
    CoveredDown,
    /// One-bit raise/stuck vote.
    RaiseStuck,
    /// One-bit deal decision (kept vs multiplied).
    DealBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Vertex(u32),
    Edge(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub src: Endpoint,
    pub dst: Endpoint,
    pub round: u64,
    pub bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CongestError {
    #[error("{kind:?} message needs {bits} bits, exceeding the {budget}-bit budget")]
    BudgetExceeded { kind: MessageKind, bits: u64, budget: u64 },
}

/// `ceil(log2(k))` for `k >= 1`.
fn ceil_log2(k: &BigUint) -> u64 {
    use num_traits::One;
    if k <= &BigUint::one() {
        0
    } else {
        (k - 1u32).bits()
    }
}

/// Bits of one message of `kind` on an instance with `n` vertices, maximum
/// weight `w_max`, and rank `rank`. Weight fields hold values up to `w_max`;
/// degree fields are sized for degrees up to `n^rank`.
pub fn message_bits(kind: MessageKind, n: usize, w_max: u64, rank: usize) -> u64 {
    match kind {
        MessageKind::WeightDegree | MessageKind::MinPair => {
            let weight_field = ceil_log2(&(BigUint::from(w_max) + 1u32));
            let degree_field = ceil_log2(&(BigUint::from(n).pow(rank as u32) + 1u32));
            weight_field + degree_field
        }
        MessageKind::CoveredUp | MessageKind::CoveredDown => 2,
        MessageKind::RaiseStuck | MessageKind::DealBit => 1,
    }
}

/// The per-message bit budget: `ceil(log2(W+1)) + rank*ceil(log2(n+1)) + 8`.
pub fn budget_bits(n: usize, w_max: u64, rank: usize) -> u64 {
    ceil_log2(&(BigUint::from(w_max) + 1u32))
        + rank as u64 * ceil_log2(&(BigUint::from(n) + 1u32))
        + 8
}

/// Bit cost of a message, checked against the budget.
pub fn account(kind: MessageKind, n: usize, w_max: u64, rank: usize) -> Result<u64, CongestError> {
    let bits = message_bits(kind, n, w_max, rank);
    let budget = budget_bits(n, w_max, rank);
    if bits > budget {
        return Err(CongestError::BudgetExceeded { kind, bits, budget });
    }
    Ok(bits)
}

/// Round phases of one iteration.
pub fn schedule_iteration(iteration: u32) -> (u64, &'static [MessageKind]) {
    if iteration == 0 {
        (0, &[MessageKind::WeightDegree, MessageKind::MinPair])
    } else {
        (
            2 + 4 * (iteration as u64 - 1),
            &[
                MessageKind::CoveredUp,
                MessageKind::CoveredDown,
                MessageKind::RaiseStuck,
                MessageKind::DealBit,
            ],
        )
    }
}

/// Total rounds of a run: `2 + 4 * iterations`, or 0 when there are no edges
/// (an edge-free network exchanges nothing).
pub fn total_rounds(iterations: u32, edge_count: usize) -> u64 {
    if edge_count == 0 {
        0
    } else {
        2 + 4 * iterations as u64
    }
}

/// Replays the trace into the exact message stream, in round order.
///
/// The live-set evolution is recomputed here from the events alone, so the
/// counts double as an independent recount of the engine's bookkeeping.
pub fn walk_messages<F: FnMut(Message)>(h: &Hypergraph, result: &RunResult, mut sink: F) {
    let m = h.edge_count();
    if m == 0 {
        return;
    }
    let n = h.vertex_count();
    let w_max = h.max_weight();
    let rank = h.degree_stats().rank;
    let bits = |kind: MessageKind| message_bits(kind, n, w_max, rank);

    for (e, members) in h.edges().iter().enumerate() {
        for &v in members {
            sink(Message {
                kind: MessageKind::WeightDegree,
                src: Endpoint::Vertex(v),
                dst: Endpoint::Edge(e as u32),
                round: 0,
                bits: bits(MessageKind::WeightDegree),
            });
        }
    }
    for (e, members) in h.edges().iter().enumerate() {
        for &v in members {
            sink(Message {
                kind: MessageKind::MinPair,
                src: Endpoint::Edge(e as u32),
                dst: Endpoint::Vertex(v),
                round: 1,
                bits: bits(MessageKind::MinPair),
            });
        }
    }

    let mut live: Vec<Vec<u32>> = h.incidence();
    let mut covered = vec![false; m];
    let mut in_cover = vec![false; n];
    for ev in &result.trace {
        let (base, _) = schedule_iteration(ev.iteration);
        // Round base: joiners notify their live edges (as of the end of the
        // previous iteration; duplicates toward edges covered this same
        // iteration are allowed and idempotent).
        for &v in &ev.joins {
            for &e in &live[v as usize] {
                sink(Message {
                    kind: MessageKind::CoveredUp,
                    src: Endpoint::Vertex(v),
                    dst: Endpoint::Edge(e),
                    round: base,
                    bits: bits(MessageKind::CoveredUp),
                });
            }
            in_cover[v as usize] = true;
        }
        // Round base+1: covered edges broadcast to all members.
        for &e in &ev.covered_edges {
            covered[e as usize] = true;
            for &v in h.edge(e) {
                sink(Message {
                    kind: MessageKind::CoveredDown,
                    src: Endpoint::Edge(e),
                    dst: Endpoint::Vertex(v),
                    round: base + 1,
                    bits: bits(MessageKind::CoveredDown),
                });
            }
        }
        // Live-set shrink (sub-step c), batched per affected vertex.
        let mut affected: Vec<u32> = ev
            .covered_edges
            .iter()
            .flat_map(|&e| h.edge(e).iter().copied())
            .filter(|&v| !in_cover[v as usize])
            .collect();
        affected.sort_unstable();
        affected.dedup();
        for v in affected {
            live[v as usize].retain(|&e| !covered[e as usize]);
        }
        // Round base+2: every member of an uncovered edge votes.
        for (e, members) in h.edges().iter().enumerate() {
            if covered[e] {
                continue;
            }
            for &v in members {
                sink(Message {
                    kind: MessageKind::RaiseStuck,
                    src: Endpoint::Vertex(v),
                    dst: Endpoint::Edge(e as u32),
                    round: base + 2,
                    bits: bits(MessageKind::RaiseStuck),
                });
            }
        }
        // Round base+3: uncovered edges answer with the deal bit.
        for (e, members) in h.edges().iter().enumerate() {
            if covered[e] {
                continue;
            }
            for &v in members {
                sink(Message {
                    kind: MessageKind::DealBit,
                    src: Endpoint::Edge(e as u32),
                    dst: Endpoint::Vertex(v),
                    round: base + 3,
                    bits: bits(MessageKind::DealBit),
                });
            }
        }
    }
}

/// Aggregated message accounting for a finished run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageStats {
    pub rounds: u64,
    pub total_messages: u64,
    pub total_bits: u64,
    pub max_message_bits: u64,
    pub budget_bits: u64,
    pub per_round_messages: Vec<u64>,
    pub per_round_bits: Vec<u64>,
}

/// Replays the run and aggregates; errors if any message exceeds the budget.
pub fn ledger_summary(h: &Hypergraph, result: &RunResult) -> Result<MessageStats, CongestError> {
    let rounds = total_rounds(result.iterations, h.edge_count());
    let budget = budget_bits(h.vertex_count(), h.max_weight(), h.degree_stats().rank);
    let mut stats = MessageStats {
        rounds,
        total_messages: 0,
        total_bits: 0,
        max_message_bits: 0,
        budget_bits: budget,
        per_round_messages: vec![0; rounds as usize],
        per_round_bits: vec![0; rounds as usize],
    };
    let mut violation = None;
    walk_messages(h, result, |msg| {
        stats.total_messages += 1;
        stats.total_bits += msg.bits;
        stats.max_message_bits = stats.max_message_bits.max(msg.bits);
        stats.per_round_messages[msg.round as usize] += 1;
        stats.per_round_bits[msg.round as usize] += msg.bits;
        if msg.bits > budget && violation.is_none() {
            violation = Some(CongestError::BudgetExceeded { kind: msg.kind, bits: msg.bits, budget });
        }
    });
    match violation {
        Some(err) => Err(err),
        None => Ok(stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunOptions};
    use crate::params::{AlphaMode, Params};
    use crate::rat;

    fn solve(h: &Hypergraph) -> RunResult {
        let stats = h.degree_stats();
        let p = Params::new(rat::int(1), AlphaMode::Global, stats.rank, &stats).unwrap();
        run(h, &p, &RunOptions::default()).unwrap()
    }

    #[test]
    fn round_layout_arithmetic() {
        assert_eq!(schedule_iteration(0), (0, &[MessageKind::WeightDegree, MessageKind::MinPair][..]));
        let (base, phases) = schedule_iteration(1);
        assert_eq!(base, 2);
        assert_eq!(phases.len(), 4);
        assert_eq!(schedule_iteration(3).0, 10);
        assert_eq!(total_rounds(2, 1), 10);
        assert_eq!(total_rounds(0, 0), 0);
        for k in 0..20 {
            assert_eq!(total_rounds(k, 5), 2 + 4 * k as u64);
        }
    }

    #[test]
    fn bit_formulas() {
        // n=4, W=3, rank=2: weight field ceil(log2 4) = 2, degree field
        // ceil(log2 17) = 5; budget 2 + 2*3 + 8 = 16.
        assert_eq!(message_bits(MessageKind::WeightDegree, 4, 3, 2), 7);
        assert_eq!(message_bits(MessageKind::MinPair, 4, 3, 2), 7);
        assert_eq!(budget_bits(4, 3, 2), 16);
        assert_eq!(account(MessageKind::WeightDegree, 4, 3, 2).unwrap(), 7);
        assert_eq!(message_bits(MessageKind::RaiseStuck, 4, 3, 2), 1);
        assert_eq!(message_bits(MessageKind::DealBit, 4, 3, 2), 1);
        assert_eq!(message_bits(MessageKind::CoveredUp, 4, 3, 2), 2);
        assert_eq!(message_bits(MessageKind::CoveredDown, 4, 3, 2), 2);
    }

    #[test]
    fn payload_fields_always_fit_budget() {
        for n in [1usize, 2, 10, 1000, 100_000] {
            for w in [1u64, 3, 1 << 20, u32::MAX as u64] {
                for rank in [1usize, 2, 3, 7] {
                    assert!(account(MessageKind::WeightDegree, n, w, rank).is_ok());
                }
            }
        }
    }

    #[test]
    fn single_edge_run_exact_recount() {
        // Two iterations: init 4 messages, iteration 1 votes+deal bits (4),
        // iteration 2 covered traffic (4), empty trailing vote rounds.
        let h = Hypergraph::new(vec![1, 1], vec![vec![0, 1]]);
        let r = solve(&h);
        assert_eq!(r.iterations, 2);
        let stats = ledger_summary(&h, &r).unwrap();
        assert_eq!(stats.rounds, 10);
        assert_eq!(stats.total_messages, 12);
        assert_eq!(stats.per_round_messages, vec![2, 2, 0, 0, 2, 2, 2, 2, 0, 0]);
        assert!(stats.max_message_bits <= stats.budget_bits);
        let mut collected = Vec::new();
        walk_messages(&h, &r, |m| collected.push(m));
        assert_eq!(collected.len(), 12);
        // Round order is nondecreasing in the stream.
        assert!(collected.windows(2).all(|w| w[0].round <= w[1].round));
    }

    #[test]
    fn no_edges_no_messages() {
        let h = Hypergraph::new(vec![1, 1], vec![]);
        let r = solve(&h);
        let stats = ledger_summary(&h, &r).unwrap();
        assert_eq!(stats.rounds, 0);
        assert_eq!(stats.total_messages, 0);
    }

    #[test]
    fn star_partition_identity() {
        let h = Hypergraph::new(vec![1; 4], vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        let r = solve(&h);
        let stats = ledger_summary(&h, &r).unwrap();
        assert_eq!(stats.per_round_messages.iter().sum::<u64>(), stats.total_messages);
        assert_eq!(stats.per_round_bits.iter().sum::<u64>(), stats.total_bits);
        assert_eq!(stats.rounds, 2 + 4 * r.iterations as u64);
    }
}
