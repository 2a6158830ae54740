//! Stable JSON output schema for solved runs.
//!
//! All exact values are serialized as `"p/q"` strings so fixtures are
//! bit-exact; scalar values also carry a decimal twin for humans. Field
//! order is fixed by the struct layout and everything is deterministic, so
//! repeated runs of the same fixture serialize to identical bytes.

use crate::congest::MessageStats;
use crate::engine::{IterationEvents, RunResult};
use crate::hypergraph::Hypergraph;
use crate::params::{AlphaAssignment, AlphaModeTag, Params};
use crate::rat::{self, Rat};
use crate::verify::VerifyReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub max_degree: usize,
    pub max_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEcho {
    pub kind: String,
    pub value: Option<String>,
    pub value_decimal: Option<f64>,
    pub per_edge: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub epsilon: String,
    pub epsilon_decimal: f64,
    pub gamma: Option<String>,
    pub alpha_mode: AlphaModeTag,
    pub beta: String,
    pub beta_decimal: f64,
    pub alpha: AlphaEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRecord {
    pub iterations: u32,
    pub rounds: u64,
    pub cover: Vec<u32>,
    pub cover_weight: u64,
    pub dual: Vec<String>,
    pub dual_sum: String,
    pub dual_sum_decimal: f64,
    pub ratio_certificate: String,
    pub ratio_certificate_decimal: f64,
    pub optimum: Option<u64>,
    pub optimum_witness: Option<Vec<u32>>,
    pub messages: MessageStats,
    pub raise_counts: Vec<u32>,
    pub stuck_counts: Vec<u32>,
    pub trace: Option<Vec<IterationEvents>>,
}

/// The full solve record: instance, parameters, results, verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: InstanceInfo,
    pub params: ParamsEcho,
    pub results: ResultsRecord,
    pub verification: VerifyReport,
}

fn rat_pair(r: &Rat) -> (String, f64) {
    (rat::fmt_frac(r), rat::to_f64(r))
}

fn alpha_echo(alpha: &AlphaAssignment) -> AlphaEcho {
    match alpha {
        AlphaAssignment::Uniform(a) => AlphaEcho {
            kind: "uniform".into(),
            value: Some(rat::fmt_frac(a)),
            value_decimal: Some(rat::to_f64(a)),
            per_edge: None,
        },
        AlphaAssignment::PerEdge(t) => AlphaEcho {
            kind: "per_edge".into(),
            value: None,
            value_decimal: None,
            per_edge: Some(t.iter().map(rat::fmt_frac).collect()),
        },
    }
}

/// Assembles the record for a finished, verified run.
#[allow(clippy::too_many_arguments)]
pub fn build_run_record(
    h: &Hypergraph,
    params: &Params,
    result: &RunResult,
    messages: MessageStats,
    verification: VerifyReport,
    optimum: Option<(u64, Vec<u32>)>,
    include_trace: bool,
) -> RunRecord {
    let stats = h.degree_stats();
    let dual_sum = result.dual_sum();
    let ratio_certificate = params.ratio_factor() * &dual_sum;
    let (dual_sum_str, dual_sum_dec) = rat_pair(&dual_sum);
    let (cert_str, cert_dec) = rat_pair(&ratio_certificate);
    let (eps_str, eps_dec) = rat_pair(&params.epsilon);
    let (beta_str, beta_dec) = rat_pair(&params.beta);
    let (optimum_value, optimum_witness) = match optimum {
        Some((w, witness)) => (Some(w), Some(witness)),
        None => (None, None),
    };
    RunRecord {
        instance: InstanceInfo {
            n: h.vertex_count(),
            m: h.edge_count(),
            rank: stats.rank,
            max_degree: stats.max_degree,
            max_weight: h.max_weight(),
        },
        params: ParamsEcho {
            epsilon: eps_str,
            epsilon_decimal: eps_dec,
            gamma: params.gamma.as_ref().map(|g| rat::fmt_frac(g)),
            alpha_mode: params.mode_tag(),
            beta: beta_str,
            beta_decimal: beta_dec,
            alpha: alpha_echo(&params.alpha),
        },
        results: ResultsRecord {
            iterations: result.iterations,
            rounds: messages.rounds,
            cover: result.cover.clone(),
            cover_weight: result.cover_weight,
            dual: result.dual.iter().map(rat::fmt_frac).collect(),
            dual_sum: dual_sum_str,
            dual_sum_decimal: dual_sum_dec,
            ratio_certificate: cert_str,
            ratio_certificate_decimal: cert_dec,
            optimum: optimum_value,
            optimum_witness,
            messages,
            raise_counts: result.raise_counts.clone(),
            stuck_counts: result.stuck_counts.clone(),
            trace: include_trace.then(|| result.trace.clone()),
        },
        verification,
    }
}
