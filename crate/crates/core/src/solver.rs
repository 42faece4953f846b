//! Minimum-power solver for the opportunistic relaying protocol with
//! optimized subcarrier pairing.
//!
//! The search runs on the dual of the relaxed allocation problem. For a
//! fixed price `mu` the relaxation decomposes per pair: each pair carries a
//! relay-mode metric and a direct-mode metric, the elementwise minimum forms
//! an assignment cost matrix, and a Hungarian pass picks the pairing. The
//! price itself is found by bisection, valid because the achieved sum rate
//! is nondecreasing in `mu`. Since the assignment step returns integral
//! decisions, every allocation produced here is feasible for the original
//! mixed-integer problem.

use crate::assignment::{hungarian, CostMatrix};
use crate::error::{Error, Result};
use crate::formulas::{channel_power, direct_metric, power_split, rate, relay_metric};
use crate::types::{Allocation, ChannelInstance, Mode, PairDecision, PairGainTable};

/// Metric ties within this absolute gap resolve to the direct mode.
pub(crate) const MODE_TIE_EPS: f64 = 1e-12;
/// Doubling the upper price beyond this means the target rate is unreachable.
const MU_DOUBLING_CAP: f64 = (1u64 << 60) as f64;
/// Hard cap on bisection steps; the width test below fires long before it.
const MAX_BISECT_ITERS: usize = 200;
/// The bracket has collapsed once its width drops below this fraction of the
/// upper price; a rate discontinuity then straddles the acceptance band.
const COLLAPSE_WIDTH_REL: f64 = 1e-13;

/// Outcome of minimizing the Lagrangian at a fixed price `mu`.
#[derive(Debug, Clone)]
pub struct DualEvaluation {
    pub mu: f64,
    /// The minimizing allocation (integral by construction).
    pub allocation: Allocation,
    /// Sum rate achieved by `allocation`, in bpos.
    pub g: f64,
    /// Lagrangian value `sum_power + mu * (r_req - g)`.
    pub lagrangian: f64,
}

/// Builds the resolved decision for pair `(k, l)` at price `mu`.
pub(crate) fn pair_decision(
    mu: f64,
    inst: &ChannelInstance,
    table: &PairGainTable,
    k: usize,
    l: usize,
    relay: bool,
) -> PairDecision {
    if relay {
        let pair_gain = table.get(k, l);
        let total = channel_power(mu, pair_gain);
        let (slot1, slot2_relay) =
            power_split(total, inst.gamma_sr[k], inst.gamma_sd[k], inst.gamma_rd[l]);
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
        let p = channel_power(mu, inst.gamma_sd[k]);
        let q = channel_power(mu, inst.gamma_sd[l]);
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
}

/// Sums decisions into a [`DualEvaluation`]; the allocation's `exact` flag
/// records whether its rate already sits in the acceptance band.
pub(crate) fn finish_evaluation(
    mu: f64,
    inst: &ChannelInstance,
    decisions: Vec<PairDecision>,
) -> DualEvaluation {
    let sum_power: f64 = decisions.iter().map(|d| d.total_power).sum();
    let sum_rate: f64 = decisions.iter().map(|d| d.rate).sum();
    let exact = sum_rate >= inst.r_req && sum_rate <= inst.r_req + inst.epsilon;
    DualEvaluation {
        mu,
        g: sum_rate,
        lagrangian: sum_power + mu * (inst.r_req - sum_rate),
        allocation: Allocation {
            decisions,
            sum_power,
            sum_rate,
            mu,
            exact,
        },
    }
}

/// Globally minimizes the Lagrangian at price `mu > 0` over pairings, modes
/// and powers.
///
/// Closed-form powers reduce the problem to an assignment over the
/// elementwise minimum of the relay and direct metrics; the entry with the
/// smaller metric fixes the winning mode (ties go to direct).
pub fn solve_relaxation(
    mu: f64,
    inst: &ChannelInstance,
    table: &PairGainTable,
) -> DualEvaluation {
    debug_assert!(mu > 0.0 && mu.is_finite());
    let k = inst.k;

    let mut relay_m = vec![0.0f64; k * k];
    let mut direct_m = vec![0.0f64; k * k];
    let mut cost = vec![0.0f64; k * k];
    for row in 0..k {
        for col in 0..k {
            let idx = row * k + col;
            let a = relay_metric(mu, table.get(row, col));
            let b = direct_metric(mu, inst.gamma_sd[row], inst.gamma_sd[col]);
            relay_m[idx] = a;
            direct_m[idx] = b;
            cost[idx] = a.min(b);
        }
    }

    let matrix = CostMatrix::new(k, cost).expect("metrics are finite");
    let (perm, _) = hungarian(&matrix);

    let decisions = (0..k)
        .map(|row| {
            let col = perm[row];
            let idx = row * k + col;
            let relay = direct_m[idx] - relay_m[idx] > MODE_TIE_EPS;
            pair_decision(mu, inst, table, row, col, relay)
        })
        .collect();
    finish_evaluation(mu, inst, decisions)
}

/// The all-zero-power allocation with the identity pairing.
pub(crate) fn zero_allocation(k: usize) -> Allocation {
    let decisions = (0..k)
        .map(|i| PairDecision {
            k: i,
            l: i,
            mode: Mode::Direct,
            total_power: 0.0,
            slot1_power: 0.0,
            slot2_source_power: 0.0,
            slot2_relay_power: 0.0,
            rate: 0.0,
        })
        .collect();
    Allocation {
        decisions,
        sum_power: 0.0,
        sum_rate: 0.0,
        mu: 0.0,
        exact: true,
    }
}

/// Iteration cap for the per-configuration rate equalization.
const EQUALIZE_MAX_ITERS: usize = 500;

/// Pairing and modes of an allocation, stripped of powers.
fn configuration(alloc: &Allocation) -> Vec<(usize, usize, bool)> {
    alloc
        .decisions
        .iter()
        .map(|d| (d.k, d.l, d.mode == Mode::RelayAided))
        .collect()
}

/// Solves the one-dimensional restricted problem: with pairing and modes
/// fixed, find the price whose water-filling powers meet the rate target
/// within `1e-10 * (1 + r_req)`.
///
/// The restricted rate is continuous and nondecreasing in the price, so the
/// window landing is guaranteed whenever the configuration has a live
/// channel; a dead configuration returns `None`.
fn solve_restricted(
    inst: &ChannelInstance,
    table: &PairGainTable,
    config: &[(usize, usize, bool)],
    mu_hint: f64,
) -> Option<Allocation> {
    let target = inst.r_req;
    let tol = 1e-10 * (1.0 + target);
    let eval_config = |mu: f64| -> DualEvaluation {
        let decisions = config
            .iter()
            .map(|&(k, l, relay)| pair_decision(mu, inst, table, k, l, relay))
            .collect();
        finish_evaluation(mu, inst, decisions)
    };

    let mut hi = if mu_hint > 0.0 { mu_hint } else { 1.0 };
    let mut best = eval_config(hi);
    while best.g < target {
        hi *= 2.0;
        if hi > MU_DOUBLING_CAP {
            return None;
        }
        best = eval_config(hi);
    }
    if best.g <= target + tol {
        return Some(best.allocation);
    }

    let mut lo = 0.0f64;
    for _ in 0..EQUALIZE_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let e = eval_config(mid);
        if e.g >= target {
            hi = mid;
            let done = e.g <= target + tol;
            best = e;
            if done {
                break;
            }
        } else {
            lo = mid;
        }
    }
    Some(best.allocation)
}

/// Price search shared by the optimized-pairing and fixed-pairing solvers:
/// double the upper price until its rate clears the target, bisect the
/// bracket down onto the critical price, then re-solve the bracket-side
/// configurations at the exact target rate and keep the cheaper one.
///
/// Driving the bracket to collapse (rather than exiting at the first rate
/// inside `[r_req, r_req + epsilon]`) plus the restricted re-solve pins the
/// achieved rate to the target, which keeps the returned powers comparable
/// across protocols and closes the overshoot a rate-curve jump would
/// otherwise cause; the band acts as the acceptance check behind the
/// `exact` flag. Should both repairs fail (never observed outside dead
/// configurations), the raw upper-side evaluation still flows out:
/// feasible, with the overshoot reported via `exact = false`.
pub(crate) fn minimize_power(
    inst: &ChannelInstance,
    table: &PairGainTable,
    eval: impl Fn(f64) -> DualEvaluation,
) -> Result<Allocation> {
    let target = inst.r_req;
    if target == 0.0 {
        return Ok(zero_allocation(inst.k));
    }

    let mut mu_min = 0.0f64;
    let mut mu_max = 1.0f64;
    let mut upper = eval(mu_max);
    while upper.g <= target {
        mu_max *= 2.0;
        if mu_max > MU_DOUBLING_CAP {
            return Err(Error::Infeasible(format!(
                "rate target {target} not reachable at any finite price"
            )));
        }
        upper = eval(mu_max);
    }

    // Invariant: g(mu_min) < target <= g(mu_max) = upper.g.
    let mut below: Option<DualEvaluation> = None;
    for _ in 0..MAX_BISECT_ITERS {
        if mu_max - mu_min < COLLAPSE_WIDTH_REL * mu_max {
            break;
        }
        let mu = 0.5 * (mu_min + mu_max);
        let e = eval(mu);
        if e.g >= target {
            mu_max = mu;
            upper = e;
        } else {
            mu_min = mu;
            below = Some(e);
        }
    }

    // At a rate discontinuity the two bracket sides hold different
    // configurations tied in Lagrangian value; either may be cheaper once
    // pinned to the target rate.
    let up_config = configuration(&upper.allocation);
    let mut best = solve_restricted(inst, table, &up_config, upper.mu);
    if let Some(low) = below {
        let low_config = configuration(&low.allocation);
        if low_config != up_config {
            if let Some(candidate) = solve_restricted(inst, table, &low_config, low.mu) {
                if best
                    .as_ref()
                    .is_none_or(|b| candidate.sum_power < b.sum_power)
                {
                    best = Some(candidate);
                }
            }
        }
    }
    Ok(best.unwrap_or(upper.allocation))
}

/// Minimum-power allocation meeting the instance's rate target under
/// optimized subcarrier pairing with opportunistic relaying.
pub fn solve(inst: &ChannelInstance) -> Result<Allocation> {
    inst.validate()?;
    let table = PairGainTable::from_instance(inst);
    if inst.r_req > 0.0
        && !table.any_positive()
        && !inst.gamma_sd.iter().any(|g| *g > 0.0)
    {
        return Err(Error::Infeasible(
            "every channel gain is zero; no positive rate is achievable".into(),
        ));
    }
    minimize_power(inst, &table, |mu| solve_relaxation(mu, inst, &table))
}

/// Recomputes an allocation's sum rate from its powers and the channel
/// gains; an independent check of the `sum_rate` field.
pub fn evaluate_sum_rate(
    alloc: &Allocation,
    inst: &ChannelInstance,
    table: &PairGainTable,
) -> f64 {
    alloc
        .decisions
        .iter()
        .map(|d| match d.mode {
            Mode::RelayAided => rate(table.get(d.k, d.l) * d.total_power),
            Mode::Direct => {
                rate(inst.gamma_sd[d.k] * d.slot1_power)
                    + rate(inst.gamma_sd[d.l] * d.slot2_source_power)
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k1_instance(r_req: f64) -> ChannelInstance {
        ChannelInstance::new(vec![4.0], vec![1.0], vec![2.0], r_req, 1e-4).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, k: usize, r_req: f64) -> ChannelInstance {
        let gen = |rng: &mut ChaCha8Rng| {
            (0..k)
                .map(|_| 10f64.powf(rng.gen_range(-2.0..2.0)))
                .collect::<Vec<f64>>()
        };
        ChannelInstance::new(
            gen(rng),
            gen(rng),
            gen(rng),
            r_req,
            1e-4 * r_req.max(1.0),
        )
        .unwrap()
    }

    #[test]
    fn vanishing_price_gives_zero_powers() {
        let inst = k1_instance(0.839036);
        let table = PairGainTable::from_instance(&inst);
        let e = solve_relaxation(1e-12, &inst, &table);
        assert_eq!(e.allocation.sum_power, 0.0);
        assert_eq!(e.g, 0.0);
        assert!((e.lagrangian - 1e-12 * inst.r_req).abs() < 1e-25);
    }

    #[test]
    fn relaxation_k1_hand_example() {
        let inst = k1_instance(0.839036);
        let table = PairGainTable::from_instance(&inst);
        let e = solve_relaxation(2.7725887, &inst, &table);
        let d = &e.allocation.decisions[0];
        assert_eq!(d.mode, Mode::RelayAided);
        assert!((d.total_power - 1.375).abs() < 1e-6);
        assert!((e.g - 0.839036).abs() < 1e-5);
        // slot split: 1.375 * 2/5 source, rest relay
        assert!((d.slot1_power - 0.55).abs() < 1e-6);
        assert!((d.slot2_relay_power - 0.825).abs() < 1e-6);
        assert_eq!(d.slot2_source_power, 0.0);
    }

    #[test]
    fn relaxation_beats_every_enumerated_configuration() {
        // K = 2: compare against all 2! pairings x 2^2 mode vectors, each
        // with its own closed-form powers.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..100 {
            let inst = random_instance(&mut rng, 2, 4.0);
            let table = PairGainTable::from_instance(&inst);
            let mu: f64 = 10f64.powf(rng.gen_range(-1.0..1.5));
            let e = solve_relaxation(mu, &inst, &table);

            for perm in [[0usize, 1], [1, 0]] {
                for modes in 0..4u32 {
                    let mut decisions = Vec::new();
                    for (row, &col) in perm.iter().enumerate() {
                        let relay = modes & (1 << row) != 0;
                        decisions.push(pair_decision(mu, &inst, &table, row, col, relay));
                    }
                    let alt = finish_evaluation(mu, &inst, decisions);
                    assert!(
                        e.lagrangian <= alt.lagrangian + 1e-9 * (1.0 + alt.lagrangian.abs()),
                        "trial {trial}: relaxation {} beaten by {:?}/{modes:02b} = {}",
                        e.lagrangian,
                        perm,
                        alt.lagrangian
                    );
                }
            }
        }
    }

    #[test]
    fn solve_k1_relay_wins() {
        let inst = k1_instance(0.839036);
        let alloc = solve(&inst).unwrap();
        assert!(alloc.exact);
        assert_eq!(alloc.decisions[0].mode, Mode::RelayAided);
        assert!((alloc.sum_power - 1.375).abs() < 0.01, "{}", alloc.sum_power);
    }

    #[test]
    fn solve_zero_target_is_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut inst = random_instance(&mut rng, 3, 1.0);
        inst.r_req = 0.0;
        let alloc = solve(&inst).unwrap();
        assert_eq!(alloc.sum_power, 0.0);
        assert_eq!(alloc.sum_rate, 0.0);
        assert!(alloc.exact);
        assert!(alloc.is_permutation());
    }

    #[test]
    fn rate_jump_resolves_to_cheaper_configuration() {
        // At gains (4, 1, 2) the relay/direct switch near mu = 3.494 jumps
        // the rate from ~1.00592 to ~1.33377. A target inside the jump is
        // met by re-solving both tied configurations at the exact rate:
        // direct costs 2 * (2^1.17 - 1) ~ 2.5002, relay (2^2.34 - 1)/1.6
        // ~ 2.5395, so direct wins.
        let inst =
            ChannelInstance::new(vec![4.0], vec![1.0], vec![2.0], 1.17, 1e-6).unwrap();
        let alloc = solve(&inst).unwrap();
        assert!(alloc.exact);
        assert!((alloc.sum_rate - 1.17).abs() < 1e-9);
        assert_eq!(alloc.decisions[0].mode, Mode::Direct);
        let expect = 2.0 * (2f64.powf(1.17) - 1.0);
        assert!(
            (alloc.sum_power - expect).abs() < 1e-7,
            "{} vs {expect}",
            alloc.sum_power
        );
        // and that is the true optimum
        let reference = crate::oracle::oracle_solve(&inst).unwrap();
        assert!((alloc.sum_power - reference.sum_power).abs() < 1e-7 * reference.sum_power);
    }

    #[test]
    fn solve_rejects_dead_instance() {
        let inst = ChannelInstance::new(vec![0.0], vec![0.0], vec![0.0], 1.0, 1e-4).unwrap();
        match solve(&inst) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn relay_only_path_carries_the_target() {
        // Direct links are dead; the pair gain 4*2/(4+2) = 4/3 is the sole
        // route, so rate 1 needs (2^2 - 1) / (4/3) = 2.25 W.
        let inst = ChannelInstance::new(vec![4.0], vec![0.0], vec![2.0], 1.0, 1e-4).unwrap();
        let alloc = solve(&inst).unwrap();
        assert!(alloc.exact);
        assert_eq!(alloc.decisions[0].mode, Mode::RelayAided);
        assert!((alloc.sum_power - 2.25).abs() < 1e-6, "{}", alloc.sum_power);
    }

    #[test]
    fn high_rate_target_survives_deep_doubling() {
        let inst = ChannelInstance::new(vec![0.0], vec![1.0], vec![0.0], 50.0, 1e-3).unwrap();
        let alloc = solve(&inst).unwrap();
        assert!(alloc.exact);
        assert!((alloc.sum_rate - 50.0).abs() < 1e-6);
        // p = q with rate(p) = 25 per slot: 2 * (2^50 - 1)
        let expect = 2.0 * (2f64.powi(50) - 1.0);
        assert!(
            (alloc.sum_power - expect).abs() < 1e-3 * expect,
            "{} vs {expect}",
            alloc.sum_power
        );
    }

    #[test]
    fn solve_results_are_feasible_and_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let k = rng.gen_range(1..6);
            let r_req = rng.gen_range(1.0..10.0);
            let inst = random_instance(&mut rng, k, r_req);
            let table = PairGainTable::from_instance(&inst);
            let alloc = solve(&inst).unwrap();

            assert!(alloc.is_permutation());
            if alloc.exact {
                assert!(alloc.sum_rate >= inst.r_req);
                assert!(alloc.sum_rate <= inst.r_req + inst.epsilon);
                // near-complementary slackness, literally from the stop rule
                assert!(alloc.mu * (alloc.sum_rate - inst.r_req) <= alloc.mu * inst.epsilon);
            } else {
                assert!(alloc.sum_rate > inst.r_req + inst.epsilon);
            }

            // structural per-pair invariants
            for d in &alloc.decisions {
                match d.mode {
                    Mode::RelayAided => {
                        assert_eq!(d.slot2_source_power, 0.0);
                        assert_eq!(d.slot1_power + d.slot2_relay_power, d.total_power);
                    }
                    Mode::Direct => {
                        assert_eq!(d.slot2_relay_power, 0.0);
                        assert_eq!(d.slot1_power + d.slot2_source_power, d.total_power);
                    }
                }
            }

            // aggregates match their parts and the recomputed rate
            let p: f64 = alloc.decisions.iter().map(|d| d.total_power).sum();
            let r: f64 = alloc.decisions.iter().map(|d| d.rate).sum();
            assert!((alloc.sum_power - p).abs() <= 1e-9 * (1.0 + p));
            assert!((alloc.sum_rate - r).abs() <= 1e-9 * (1.0 + r));
            let recomputed = evaluate_sum_rate(&alloc, &inst, &table);
            assert!((recomputed - alloc.sum_rate).abs() <= 1e-9 * (1.0 + recomputed));
        }
    }

    #[test]
    fn rate_curve_nondecreasing_in_price() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 4, 5.0);
            let table = PairGainTable::from_instance(&inst);
            let mu_star = solve(&inst).unwrap().mu;
            let mut prev = -1.0f64;
            for i in 0..20 {
                let t = i as f64 / 19.0;
                let mu = mu_star * 1e-6 * (1e7f64).powf(t); // log-spaced over [1e-6, 10] x mu*
                let e = solve_relaxation(mu, &inst, &table);
                assert!(
                    e.g >= prev - 1e-12,
                    "g dropped from {prev} to {} at mu = {mu}",
                    e.g
                );
                prev = e.g;
            }
        }
    }

    #[test]
    fn evaluate_sum_rate_cases() {
        let inst = k1_instance(0.839036);
        let table = PairGainTable::from_instance(&inst);

        let zero = zero_allocation(1);
        assert_eq!(evaluate_sum_rate(&zero, &inst, &table), 0.0);

        let alloc = solve(&inst).unwrap();
        let recomputed = evaluate_sum_rate(&alloc, &inst, &table);
        assert!((recomputed - 0.839036).abs() < 1e-4);

        // symmetric direct pair: exactly twice the single-slot rate
        let inst2 =
            ChannelInstance::new(vec![0.1, 0.1], vec![2.0, 2.0], vec![0.1, 0.1], 1.0, 1e-4)
                .unwrap();
        let table2 = PairGainTable::from_instance(&inst2);
        let d = pair_decision(1.0, &inst2, &table2, 0, 1, false);
        assert_eq!(d.slot1_power, d.slot2_source_power);
        let alloc2 = Allocation {
            sum_power: d.total_power,
            sum_rate: d.rate,
            decisions: vec![d.clone()],
            mu: 1.0,
            exact: false,
        };
        assert_eq!(
            evaluate_sum_rate(&alloc2, &inst2, &table2),
            2.0 * rate(2.0 * d.slot1_power)
        );
    }
}
