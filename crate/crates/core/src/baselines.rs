//! Benchmark protocols: a-priori (diagonal) subcarrier pairing with
//! opportunistic relaying, and direct-only transmission.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::formulas::{direct_metric, rate, relay_metric};
use crate::solver::{
    finish_evaluation, minimize_power, pair_decision, zero_allocation, DualEvaluation,
    MODE_TIE_EPS,
};
use crate::types::{Allocation, ChannelInstance, Mode, PairDecision, PairGainTable};

/// Lagrangian minimizer at price `mu` under the diagonal-pairing constraint:
/// pair `(k, k)` picks whichever mode has the smaller metric, no assignment
/// step needed.
fn diagonal_relaxation(
    mu: f64,
    inst: &ChannelInstance,
    table: &PairGainTable,
) -> DualEvaluation {
    let decisions = (0..inst.k)
        .map(|i| {
            let a = relay_metric(mu, table.get(i, i));
            let b = direct_metric(mu, inst.gamma_sd[i], inst.gamma_sd[i]);
            pair_decision(mu, inst, table, i, i, b - a > MODE_TIE_EPS)
        })
        .collect();
    finish_evaluation(mu, inst, decisions)
}

/// Minimum-power allocation under a-priori subcarrier pairing: subcarrier
/// `k` may only relay through subcarrier `k` of the second slot. Same price
/// search as [`crate::solver::solve`], restricted to the diagonal.
pub fn solve_fixed_pairing(inst: &ChannelInstance) -> Result<Allocation> {
    inst.validate()?;
    let table = PairGainTable::from_instance(inst);
    if inst.r_req > 0.0
        && !(0..inst.k).any(|i| table.get(i, i) > 0.0)
        && !inst.gamma_sd.iter().any(|g| *g > 0.0)
    {
        return Err(Error::Infeasible(
            "every diagonal-pair and direct gain is zero".into(),
        ));
    }
    minimize_power(inst, &table, |mu| diagonal_relaxation(mu, inst, &table))
}

const LAMBDA_MAX_DOUBLINGS: u32 = 64;
const LAMBDA_MAX_BISECT_ITERS: usize = 500;

/// Minimum-power allocation when every subcarrier transmits directly in
/// both slots.
///
/// Water-fills the source→destination channels: per-slot powers are
/// `[lambda - 1/gain]+` with the level `lambda` bisected until the per-slot
/// rate hits `r_req / 2` within `1e-9 * (1 + r_req)`. Both slots see the
/// same gains, so each subcarrier splits its power equally between slots.
pub fn solve_direct_only(inst: &ChannelInstance) -> Result<Allocation> {
    inst.validate()?;
    if inst.r_req == 0.0 {
        return Ok(zero_allocation(inst.k));
    }
    if !inst.gamma_sd.iter().any(|g| *g > 0.0) {
        return Err(Error::Infeasible(
            "every direct gain is zero; direct-only transmission cannot carry rate".into(),
        ));
    }

    let target = inst.r_req / 2.0;
    let tol = 1e-9 * (1.0 + inst.r_req);
    let slot_rate = |level: f64| -> f64 {
        inst.gamma_sd
            .iter()
            .map(|&g| {
                if g > 0.0 {
                    rate(g * (level - g.recip()).max(0.0))
                } else {
                    0.0
                }
            })
            .sum()
    };

    // Bracket the level, then bisect onto [target, target + tol]; the slot
    // rate is continuous and nondecreasing in the level, so the bisection
    // always lands.
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while slot_rate(hi) < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > LAMBDA_MAX_DOUBLINGS {
            return Err(Error::Infeasible(format!(
                "direct-only rate target {} not reachable",
                inst.r_req
            )));
        }
    }
    let mut lambda = hi;
    if slot_rate(hi) > target + tol {
        let mut lo = 0.0f64;
        for _ in 0..LAMBDA_MAX_BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            let r = slot_rate(mid);
            if r >= target && r <= target + tol {
                lambda = mid;
                break;
            }
            if r > target {
                hi = mid;
                lambda = hi;
            } else {
                lo = mid;
            }
        }
    }

    let decisions: Vec<PairDecision> = inst
        .gamma_sd
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let p = if g > 0.0 {
                (lambda - g.recip()).max(0.0)
            } else {
                0.0
            };
            PairDecision {
                k: i,
                l: i,
                mode: Mode::Direct,
                total_power: 2.0 * p,
                slot1_power: p,
                slot2_source_power: p,
                slot2_relay_power: 0.0,
                rate: 2.0 * rate(g * p),
            }
        })
        .collect();

    // Price equivalent of the water level, for reporting.
    let mu = 2.0 * lambda * LN_2;
    Ok(finish_evaluation(mu, inst, decisions).allocation)
}

/// Number of pairs an allocation assigns to the relay-aided mode.
pub fn relay_pair_count(alloc: &Allocation) -> usize {
    alloc
        .decisions
        .iter()
        .filter(|d| d.mode == Mode::RelayAided)
        .count()
}
