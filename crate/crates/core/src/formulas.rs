//! Closed-form per-pair quantities of the two-slot relay link model.
//!
//! Everything here is a pure function of scalar channel gains and the dual
//! price `mu`. Gains are normalized by the receiver noise variance at
//! construction time, so all formulas are unit-free; powers are in watts and
//! rates in bits per OFDM symbol (bpos).

use std::f64::consts::LOG2_E;

/// Water level per unit of dual price: `0.5 * log2(e)`.
pub(crate) const HALF_LOG2_E: f64 = 0.5 * LOG2_E;

/// Rate of a single channel at SNR `x`: `0.5 * log2(1 + x)` bpos.
///
/// The 1/2 accounts for the two-slot structure of a transmission session.
pub fn rate(x: f64) -> f64 {
    debug_assert!(x >= 0.0 && x.is_finite());
    HALF_LOG2_E * x.ln_1p()
}

/// Effective gain of a relay-aided pair: the scalar `g` such that the pair
/// achieves `rate(g * p)` when driven with total power `p` optimally split
/// between source and relay.
///
/// Piecewise: when both the source→relay and relay→destination links beat
/// the direct link (`min(gsr, grd) > gsd`, strictly), decode-and-forward
/// combining gives `gsr * grd / (gsr - gsd + grd)`; otherwise the relay
/// cannot help and the pair is capped at `min(gsr, gsd)`.
pub fn effective_gain(gsr: f64, gsd: f64, grd: f64) -> f64 {
    if gsr.min(grd) > gsd {
        // grd > gsd here, so the denominator is strictly positive.
        gsr * grd / (gsr - gsd + grd)
    } else {
        gsr.min(gsd)
    }
}

/// Split of a relay-aided pair's total power into (slot-1 source power,
/// slot-2 relay power) achieving the effective-gain rate.
///
/// The relay share is formed by subtraction, so the two parts always sum to
/// `total` exactly.
pub fn power_split(total: f64, gsr: f64, gsd: f64, grd: f64) -> (f64, f64) {
    if gsr.min(grd) > gsd {
        let slot1 = total * grd / (gsr - gsd + grd);
        let relay = total - slot1;
        // Re-deriving slot1 from the rounded relay share makes the pair sum
        // back to `total` bit-exactly.
        (total - relay, relay)
    } else {
        (total, 0.0)
    }
}

/// Optimal power for a single channel of gain `gain` at dual price `mu`:
/// `[0.5 * log2(e) * mu - 1/gain]+`.
///
/// This is the minimizer of `x - mu * rate(gain * x)` over `x >= 0`. A dead
/// channel (`gain = 0`) gets zero power.
pub fn channel_power(mu: f64, gain: f64) -> f64 {
    if gain <= 0.0 {
        return 0.0;
    }
    (HALF_LOG2_E * mu - gain.recip()).max(0.0)
}

/// Lagrangian contribution of one channel at price `mu`: the minimum of
/// `x - mu * rate(gain * x)` over `x >= 0`. Always `<= 0` since `x = 0` is
/// feasible.
fn channel_metric(mu: f64, gain: f64) -> f64 {
    let p = channel_power(mu, gain);
    p - mu * rate(gain * p)
}

/// Per-pair metric for the relay-aided mode.
pub fn relay_metric(mu: f64, pair_gain: f64) -> f64 {
    channel_metric(mu, pair_gain)
}

/// Per-pair metric for the direct mode: one term per slot, each a single
/// source→destination channel.
pub fn direct_metric(mu: f64, gain_slot1: f64, gain_slot2: f64) -> f64 {
    channel_metric(mu, gain_slot1) + channel_metric(mu, gain_slot2)
}
