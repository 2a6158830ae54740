//! Run parameters: the tightness margin `beta` and the deal multiplier
//! `alpha` (global, refined, per-edge local, or pinned).
//!
//! `beta = epsilon / (rank + epsilon)` is exact. `alpha` comes from the
//! fixed-point log machinery in [`crate::fixpoint`] and is then frozen as an
//! exact rational used in all deal arithmetic. Every mode clamps `alpha` to
//! at least 2: the iteration bounds only need `alpha > 1`, and for moderate
//! degrees the log ratio can dip below 2 (degree 8 gives about 1.89), which
//! would slow geometric deal growth for no benefit.

use crate::fixpoint::{self, FixpointError};
use crate::hypergraph::DegreeStats;
use crate::rat::{self, Rat};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("epsilon must satisfy 0 < epsilon <= 1, got {0}")]
    EpsilonOutOfRange(String),
    #[error("gamma must satisfy 0 < gamma < 1, got {0}")]
    GammaOutOfRange(String),
    #[error("refined alpha mode requires gamma")]
    MissingGamma,
    #[error("fixed alpha must be positive, got {0}")]
    FixedAlphaNotPositive(String),
    #[error("fixed-point evaluation failed: {0}")]
    Fixpoint(#[from] FixpointError),
}

/// How the deal multiplier is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaMode {
    /// One multiplier from the global maximum degree.
    Global,
    /// The reduced-dependency assignment: branches on whether
    /// `rank/beta` is below `(log D / log log D)^gamma`.
    Refined { gamma: Rat },
    /// Per-edge multiplier from the local maximum degree of each edge.
    Local { base: LocalBase },
    /// A caller-pinned value (clamped to >= 2).
    Fixed(Rat),
}

/// Formula used per edge in local mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalBase {
    Global,
    Refined { gamma: Rat },
}

/// The multiplier assignment produced for a concrete instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaAssignment {
    Uniform(Rat),
    PerEdge(Vec<Rat>),
}

impl AlphaAssignment {
    pub fn for_edge(&self, edge: usize) -> &Rat {
        match self {
            AlphaAssignment::Uniform(a) => a,
            AlphaAssignment::PerEdge(t) => &t[edge],
        }
    }

    /// Largest multiplier in the assignment (the clamp floor 2 for an
    /// edge-free local table).
    pub fn max(&self) -> Rat {
        match self {
            AlphaAssignment::Uniform(a) => a.clone(),
            AlphaAssignment::PerEdge(t) => t.iter().max().cloned().unwrap_or_else(|| rat::int(2)),
        }
    }

    /// Smallest multiplier in the assignment (the clamp floor 2 for an
    /// edge-free local table).
    pub fn min(&self) -> Rat {
        match self {
            AlphaAssignment::Uniform(a) => a.clone(),
            AlphaAssignment::PerEdge(t) => t.iter().min().cloned().unwrap_or_else(|| rat::int(2)),
        }
    }
}

/// Validated parameter set for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub epsilon: Rat,
    pub gamma: Option<Rat>,
    pub mode: AlphaMode,
    pub rank: usize,
    pub beta: Rat,
    pub alpha: AlphaAssignment,
}

/// Mode tag used in serialized records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModeTag {
    Global,
    Refined,
    Local,
    LocalRefined,
    Fixed,
}

impl Params {
    /// Computes `beta` and the multiplier assignment for a hypergraph with
    /// the given degree statistics.
    pub fn new(
        epsilon: Rat,
        mode: AlphaMode,
        rank: usize,
        stats: &DegreeStats,
    ) -> Result<Params, ParamError> {
        let beta = beta(&epsilon, rank)?;
        let gamma = match &mode {
            AlphaMode::Refined { gamma } | AlphaMode::Local { base: LocalBase::Refined { gamma } } => {
                Some(validate_gamma(gamma)?)
            }
            _ => None,
        };
        let alpha = match &mode {
            AlphaMode::Global => AlphaAssignment::Uniform(alpha_global(stats.max_degree as u128)?),
            AlphaMode::Refined { gamma } => AlphaAssignment::Uniform(alpha_refined(
                stats.max_degree as u128,
                rank,
                &beta,
                gamma,
            )?),
            AlphaMode::Local { base } => AlphaAssignment::PerEdge(alpha_local(stats, rank, &beta, base)?),
            AlphaMode::Fixed(v) => {
                if !v.is_positive() {
                    return Err(ParamError::FixedAlphaNotPositive(rat::fmt_frac(v)));
                }
                AlphaAssignment::Uniform(clamp_to_two(v.clone()))
            }
        };
        Ok(Params { epsilon, gamma, mode, rank, beta, alpha })
    }

    pub fn mode_tag(&self) -> AlphaModeTag {
        match &self.mode {
            AlphaMode::Global => AlphaModeTag::Global,
            AlphaMode::Refined { .. } => AlphaModeTag::Refined,
            AlphaMode::Local { base: LocalBase::Global } => AlphaModeTag::Local,
            AlphaMode::Local { base: LocalBase::Refined { .. } } => AlphaModeTag::LocalRefined,
            AlphaMode::Fixed(_) => AlphaModeTag::Fixed,
        }
    }

    /// `rank + epsilon`, the certified approximation factor.
    pub fn ratio_factor(&self) -> Rat {
        rat::int(self.rank as i64) + &self.epsilon
    }
}

fn validate_gamma(gamma: &Rat) -> Result<Rat, ParamError> {
    if !gamma.is_positive() || *gamma >= rat::int(1) {
        return Err(ParamError::GammaOutOfRange(rat::fmt_frac(gamma)));
    }
    Ok(gamma.clone())
}

fn clamp_to_two(a: Rat) -> Rat {
    let two = rat::int(2);
    if a < two {
        two
    } else {
        a
    }
}

/// `epsilon / (rank + epsilon)`, exact. Requires `0 < epsilon <= 1`.
pub fn beta(epsilon: &Rat, rank: usize) -> Result<Rat, ParamError> {
    if !epsilon.is_positive() || *epsilon > rat::int(1) {
        return Err(ParamError::EpsilonOutOfRange(rat::fmt_frac(epsilon)));
    }
    Ok(epsilon / (rat::int(rank as i64) + epsilon))
}

/// Degrees below 3 are lifted to 3 before taking logs, so the inner
/// logarithm stays positive.
fn lift_degree(max_degree: u128) -> u128 {
    max_degree.max(3)
}

/// Global multiplier: `max(2, log D / log ceil(log D))` where `D` is the
/// lifted maximum degree and both logs are fixed-point base-2 values.
pub fn alpha_global(max_degree: u128) -> Result<Rat, ParamError> {
    let d = lift_degree(max_degree);
    let log = fixpoint::fixlog2(d)?.to_rational();
    let ceil_log = rat::ceil_int(&log).to_u128().expect("small ceil");
    let log_log = fixpoint::fixlog2(ceil_log.max(2))?.to_rational();
    Ok(clamp_to_two(log / log_log))
}

/// Refined multiplier. With `x = log D / log log D` (fixed-point, rational
/// inner log): returns `max(2, x^(1-gamma))` when `rank/beta < x^gamma`,
/// otherwise exactly 2.
pub fn alpha_refined(
    max_degree: u128,
    rank: usize,
    beta: &Rat,
    gamma: &Rat,
) -> Result<Rat, ParamError> {
    let gamma = validate_gamma(gamma)?;
    let d = lift_degree(max_degree);
    let log = fixpoint::fixlog2(d)?.to_rational();
    let log_log = fixpoint::fixlog2_rat(&log)?.to_rational();
    let x = log / log_log;
    let threshold = fixpoint::pow_fixed(&x, &gamma)?;
    let rank_over_beta = rat::int(rank as i64) / beta;
    if rank_over_beta < threshold {
        let exponent = rat::int(1) - &gamma;
        Ok(clamp_to_two(fixpoint::pow_fixed(&x, &exponent)?))
    } else {
        Ok(rat::int(2))
    }
}

/// Per-edge multipliers from each edge's local maximum degree.
pub fn alpha_local(
    stats: &DegreeStats,
    rank: usize,
    beta: &Rat,
    base: &LocalBase,
) -> Result<Vec<Rat>, ParamError> {
    stats
        .local_max_degree
        .iter()
        .map(|&d| match base {
            LocalBase::Global => alpha_global(d as u128),
            LocalBase::Refined { gamma } => alpha_refined(d as u128, rank, beta, gamma),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use proptest::prelude::*;

    #[test]
    fn beta_direct_cases() {
        assert_eq!(beta(&rat::int(1), 2).unwrap(), rat::frac(1, 3));
        assert_eq!(beta(&rat::int(1), 1).unwrap(), rat::frac(1, 2));
        assert_eq!(beta(&rat::frac(1, 2), 3).unwrap(), rat::frac(1, 7));
    }

    #[test]
    fn beta_rejects_out_of_range() {
        assert!(beta(&rat::zero(), 2).is_err());
        assert!(beta(&rat::int(2), 2).is_err());
        assert!(beta(&rat::frac(-1, 2), 2).is_err());
    }

    #[test]
    fn beta_identity() {
        // beta * (rank + epsilon) = epsilon, exactly.
        for (e, f) in [(rat::frac(1, 10), 3usize), (rat::frac(2, 3), 5), (rat::int(1), 1)] {
            let b = beta(&e, f).unwrap();
            assert_eq!(b * (rat::int(f as i64) + &e), e);
        }
    }

    #[test]
    fn alpha_global_reference_points() {
        // D = 16: log = 4, log log = 2, ratio 2 (clamp inactive).
        assert_eq!(alpha_global(16).unwrap(), rat::int(2));
        // D = 2^16: 16 / 4.
        assert_eq!(alpha_global(1 << 16).unwrap(), rat::int(4));
        // D = 256: 8 / 3 exactly (both logs land on integers).
        assert_eq!(alpha_global(256).unwrap(), rat::frac(8, 3));
        // D = 8: ratio ~1.89 clamps to 2.
        assert_eq!(alpha_global(8).unwrap(), rat::int(2));
        // Degrees below 3 lift to 3: log2(3)/log2(2) < 2 clamps to 2.
        assert_eq!(alpha_global(1).unwrap(), rat::int(2));
        assert_eq!(alpha_global(2).unwrap(), alpha_global(3).unwrap());
    }

    #[test]
    fn alpha_refined_branches() {
        // D = 2^16, rank 2, eps 1: x = 4, x^(1/2) = 2, 6 >= 2 -> 2.
        let b = beta(&rat::int(1), 2).unwrap();
        assert_eq!(
            alpha_refined(1 << 16, 2, &b, &rat::frac(1, 2)).unwrap(),
            rat::int(2)
        );

        // D = 2^64, rank 1, eps 1: x = 64/6, sqrt(x) = 3.266 > 2 -> ~3.266.
        let b = beta(&rat::int(1), 1).unwrap();
        let a = alpha_refined(1u128 << 64, 1, &b, &rat::frac(1, 2)).unwrap();
        let f = rat::to_f64(&a);
        assert!((f - (64f64 / 6.0).sqrt()).abs() < 1e-4, "got {f}");

        // D = 3, rank 2, eps 1: x ~ 2.386, x^(1/2) ~ 1.545 <= 6 -> 2.
        let b = beta(&rat::int(1), 2).unwrap();
        assert_eq!(alpha_refined(3, 2, &b, &rat::frac(1, 2)).unwrap(), rat::int(2));
    }

    #[test]
    fn alpha_refined_otherwise_branch_is_exactly_two() {
        let b = beta(&rat::frac(1, 10), 4).unwrap();
        for d in [3u128, 100, 1 << 20, 1 << 40] {
            let a = alpha_refined(d, 4, &b, &rat::frac(1, 3)).unwrap();
            let x_gamma_small = rat::int(4) / &b; // rank/beta = 164
            // With rank/beta this large the branch condition fails for all
            // tested degrees, so the result must be the literal 2.
            assert!(x_gamma_small > rat::int(100));
            assert_eq!(a, rat::int(2));
        }
    }

    #[test]
    fn alpha_local_tables() {
        // Star with max degree 3: every edge sees the center, so every edge
        // gets alpha_global(3).
        let h = Hypergraph::new(vec![1; 4], vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        let stats = h.degree_stats();
        let t = alpha_local(&stats, 2, &beta(&rat::int(1), 2).unwrap(), &LocalBase::Global).unwrap();
        assert_eq!(t, vec![alpha_global(3).unwrap(); 3]);

        // An edge touching only degree-1 vertices lifts to 3.
        let h = Hypergraph::new(vec![1; 2], vec![vec![0, 1]]);
        let t = alpha_local(
            &h.degree_stats(),
            2,
            &beta(&rat::int(1), 2).unwrap(),
            &LocalBase::Global,
        )
        .unwrap();
        assert_eq!(t, vec![alpha_global(3).unwrap()]);

        // Uniform degrees: local table constant and equal to the global value.
        let h = Hypergraph::new(vec![1; 3], vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        let stats = h.degree_stats();
        let t = alpha_local(&stats, 2, &beta(&rat::int(1), 2).unwrap(), &LocalBase::Global).unwrap();
        let global = alpha_global(stats.max_degree as u128).unwrap();
        assert!(t.iter().all(|a| *a == global));
    }

    #[test]
    fn params_validation() {
        let h = Hypergraph::new(vec![1, 1], vec![vec![0, 1]]);
        let stats = h.degree_stats();
        assert!(Params::new(rat::int(2), AlphaMode::Global, 2, &stats).is_err());
        assert!(Params::new(
            rat::int(1),
            AlphaMode::Refined { gamma: rat::int(1) },
            2,
            &stats
        )
        .is_err());
        let p = Params::new(rat::int(1), AlphaMode::Fixed(rat::frac(3, 2)), 2, &stats).unwrap();
        assert_eq!(p.alpha, AlphaAssignment::Uniform(rat::int(2)));
        let p = Params::new(rat::int(1), AlphaMode::Fixed(rat::int(5)), 2, &stats).unwrap();
        assert_eq!(p.alpha, AlphaAssignment::Uniform(rat::int(5)));
    }

    proptest! {
        // alpha_global stays >= 2 and within 2^-17 of the real-valued ratio
        // it discretizes (f64 oracle, same ceil'd inner log).
        #[test]
        fn alpha_global_accuracy(d in 3u128..=(1 << 30)) {
            let a = alpha_global(d).unwrap();
            prop_assert!(a >= rat::int(2));
            let log = (d as f64).log2();
            let inner = crate::fixpoint::fixlog2(d).unwrap().value as f64
                / crate::fixpoint::SCALE as f64;
            let ceil_log = inner.ceil().max(2.0);
            let reference = (log / ceil_log.log2()).max(2.0);
            prop_assert!((rat::to_f64(&a) - reference).abs() < 2f64.powi(-17),
                "d={d} alpha={} reference={reference}", rat::to_f64(&a));
        }
    }
}
