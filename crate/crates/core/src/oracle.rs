//! Brute-force reference solver for tiny instances.
//!
//! Enumerates every pairing permutation and per-pair mode vector; for each
//! configuration the residual problem is single-constraint water-filling
//! over the configuration's channel list, solved by bisection on the water
//! level. Exists to anchor the correctness of the dual-decomposition solver
//! and is deliberately independent of its assignment/bisection machinery.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::formulas::{power_split, rate};
use crate::solver::finish_evaluation;
use crate::types::{Allocation, ChannelInstance, Mode, PairDecision, PairGainTable};

/// Enumeration cost is `K! * 2^K` water-filling solves; keep K small.
const MAX_ORACLE_K: usize = 4;

/// Which configurations the enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Restriction {
    /// All permutations, all mode vectors.
    Full,
    /// Identity pairing only, all mode vectors.
    DiagonalPairing,
    /// Identity pairing, every pair direct.
    DirectOnly,
}

/// Globally minimum power allocation meeting the rate target exactly
/// (no epsilon slack), found by exhaustive enumeration. `K <= 4` only.
pub fn oracle_solve(inst: &ChannelInstance) -> Result<Allocation> {
    enumerate_best(inst, Restriction::Full)
}

/// Exhaustive reference restricted to diagonal pairing.
pub fn oracle_solve_fixed_pairing(inst: &ChannelInstance) -> Result<Allocation> {
    enumerate_best(inst, Restriction::DiagonalPairing)
}

/// Exhaustive reference restricted to direct-only transmission.
pub fn oracle_solve_direct_only(inst: &ChannelInstance) -> Result<Allocation> {
    enumerate_best(inst, Restriction::DirectOnly)
}

/// Equalized minimum power of every feasible configuration, in enumeration
/// order. Support surface for weak-duality and minimality checks in tests.
pub fn config_powers(inst: &ChannelInstance) -> Result<Vec<f64>> {
    check_input(inst)?;
    let table = PairGainTable::from_instance(inst);
    let mut powers = Vec::new();
    visit_configs(inst.k, Restriction::Full, |perm, modes| {
        let gains = config_gains(inst, &table, perm, modes);
        if let Some((_, total)) = equalize(&gains, inst.r_req) {
            powers.push(total);
        }
    });
    Ok(powers)
}

fn check_input(inst: &ChannelInstance) -> Result<()> {
    inst.validate()?;
    if inst.k > MAX_ORACLE_K {
        return Err(Error::InvalidInput(format!(
            "oracle only enumerates K <= {MAX_ORACLE_K}, got K = {}",
            inst.k
        )));
    }
    Ok(())
}

fn enumerate_best(inst: &ChannelInstance, restriction: Restriction) -> Result<Allocation> {
    check_input(inst)?;
    if inst.r_req == 0.0 {
        return Ok(crate::solver::zero_allocation(inst.k));
    }
    let table = PairGainTable::from_instance(inst);

    let mut best: Option<(f64, f64, Vec<usize>, u32)> = None; // (power, level, perm, modes)
    visit_configs(inst.k, restriction, |perm, modes| {
        let gains = config_gains(inst, &table, perm, modes);
        if let Some((level, total)) = equalize(&gains, inst.r_req) {
            if best.as_ref().is_none_or(|(p, ..)| total < *p) {
                best = Some((total, level, perm.to_vec(), modes));
            }
        }
    });

    let Some((_, level, perm, modes)) = best else {
        return Err(Error::Infeasible(
            "no configuration can carry a positive rate".into(),
        ));
    };

    let decisions: Vec<PairDecision> = perm
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            if modes & (1 << k) != 0 {
                let pair_gain = table.get(k, l);
                let total = water_power(level, pair_gain);
                let (slot1, slot2_relay) = power_split(
                    total,
                    inst.gamma_sr[k],
                    inst.gamma_sd[k],
                    inst.gamma_rd[l],
                );
                PairDecision {
                    k,
                    l,
                    mode: Mode::RelayAided,
                    total_power: total,
                    slot1_power: slot1,
                    slot2_source_power: 0.0,
                    slot2_relay_power: slot2_relay,
                    rate: rate(pair_gain * total),
                }
            } else {
                let p = water_power(level, inst.gamma_sd[k]);
                let q = water_power(level, inst.gamma_sd[l]);
                PairDecision {
                    k,
                    l,
                    mode: Mode::Direct,
                    total_power: p + q,
                    slot1_power: p,
                    slot2_source_power: q,
                    slot2_relay_power: 0.0,
                    rate: rate(inst.gamma_sd[k] * p) + rate(inst.gamma_sd[l] * q),
                }
            }
        })
        .collect();

    let mu = 2.0 * level * LN_2;
    Ok(finish_evaluation(mu, inst, decisions).allocation)
}

/// Calls `f(perm, modes)` for every admissible configuration; `modes` bit
/// `k` set means pair `k` relays.
fn visit_configs(k: usize, restriction: Restriction, mut f: impl FnMut(&[usize], u32)) {
    let identity: Vec<usize> = (0..k).collect();
    let perms = match restriction {
        Restriction::Full => permutations(k),
        _ => vec![identity],
    };
    let mode_limit = match restriction {
        Restriction::DirectOnly => 1u32, // only the all-direct vector
        _ => 1u32 << k,
    };
    for perm in &perms {
        for modes in 0..mode_limit {
            f(perm, modes);
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn recurse(n: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                recurse(n, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    recurse(n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// A configuration's parallel channels: one of gain `table[k][l]` per relay
/// pair, two of gains `gamma_sd[k]`, `gamma_sd[l]` per direct pair.
fn config_gains(
    inst: &ChannelInstance,
    table: &PairGainTable,
    perm: &[usize],
    modes: u32,
) -> Vec<f64> {
    let mut gains = Vec::with_capacity(2 * inst.k);
    for (k, &l) in perm.iter().enumerate() {
        if modes & (1 << k) != 0 {
            gains.push(table.get(k, l));
        } else {
            gains.push(inst.gamma_sd[k]);
            gains.push(inst.gamma_sd[l]);
        }
    }
    gains
}

fn water_power(level: f64, gain: f64) -> f64 {
    if gain > 0.0 {
        (level - gain.recip()).max(0.0)
    } else {
        0.0
    }
}

/// Minimum total power driving the channel list to `target` rate: common
/// water level bisected onto `[target, target + 1e-10 * (1 + target)]`.
/// Returns `(level, total_power)`, or `None` when the list cannot carry any
/// rate.
fn equalize(gains: &[f64], target: f64) -> Option<(f64, f64)> {
    if target == 0.0 {
        return Some((0.0, 0.0));
    }
    if !gains.iter().any(|g| *g > 0.0) {
        return None;
    }
    let tol = 1e-10 * (1.0 + target);
    let total_rate =
        |level: f64| -> f64 { gains.iter().map(|&g| rate(g * water_power(level, g))).sum() };

    let mut hi = 1.0f64;
    for _ in 0..200 {
        if total_rate(hi) >= target {
            break;
        }
        hi *= 2.0;
    }
    let mut level = hi;
    if total_rate(hi) > target + tol {
        let mut lo = 0.0f64;
        for _ in 0..500 {
            let mid = 0.5 * (lo + hi);
            let r = total_rate(mid);
            if r >= target && r <= target + tol {
                level = mid;
                break;
            }
            if r > target {
                hi = mid;
                level = hi;
            } else {
                lo = mid;
            }
        }
    }
    let total = gains.iter().map(|&g| water_power(level, g)).sum();
    Some((level, total))
}
