//! Domain types: channel instances, pair gain tables and allocations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::effective_gain;

/// One solver input: per-subcarrier normalized channel gains plus the rate
/// target and the rate-slack tolerance of the dual search.
///
/// Gains are `|h|^2 / sigma^2`, i.e. already divided by the per-subcarrier
/// noise variance. `gamma_sd` serves both slots: index `k` in slot 1 and
/// index `l` in slot 2.
///
/// Serializes to the instance JSON document
/// `{"K":…, "gamma_sr":[…], "gamma_sd":[…], "gamma_rd":[…], "r_req":…, "epsilon":…}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInstance {
    /// Number of subcarriers per slot.
    #[serde(rename = "K")]
    pub k: usize,
    /// Normalized source→relay gains, length `k`.
    pub gamma_sr: Vec<f64>,
    /// Normalized source→destination gains, length `k`.
    pub gamma_sd: Vec<f64>,
    /// Normalized relay→destination gains, length `k`.
    pub gamma_rd: Vec<f64>,
    /// Sum-rate target in bits per OFDM symbol.
    pub r_req: f64,
    /// Acceptance band on the achieved rate: `[r_req, r_req + epsilon]`.
    pub epsilon: f64,
}

impl ChannelInstance {
    /// Builds an instance from the three gain vectors; `k` is taken from
    /// their common length.
    pub fn new(
        gamma_sr: Vec<f64>,
        gamma_sd: Vec<f64>,
        gamma_rd: Vec<f64>,
        r_req: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let inst = Self {
            k: gamma_sr.len(),
            gamma_sr,
            gamma_sd,
            gamma_rd,
            r_req,
            epsilon,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks the structural invariants; call after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("K must be positive".into()));
        }
        for (name, arr) in [
            ("gamma_sr", &self.gamma_sr),
            ("gamma_sd", &self.gamma_sd),
            ("gamma_rd", &self.gamma_rd),
        ] {
            if arr.len() != self.k {
                return Err(Error::InvalidInput(format!(
                    "{name} has length {}, expected K = {}",
                    arr.len(),
                    self.k
                )));
            }
            if let Some(bad) = arr.iter().find(|g| !g.is_finite() || **g < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} contains a non-finite or negative gain: {bad}"
                )));
            }
        }
        if !self.r_req.is_finite() || self.r_req < 0.0 {
            return Err(Error::InvalidInput(format!(
                "r_req must be finite and >= 0, got {}",
                self.r_req
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "epsilon must be finite and > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// The `K x K` matrix of effective relay gains, one per (slot-1 k, slot-2 l)
/// subcarrier pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGainTable {
    k: usize,
    gains: Vec<f64>, // row-major
}

impl PairGainTable {
    /// Computes every pair gain from the instance's link gains.
    pub fn from_instance(inst: &ChannelInstance) -> Self {
        let k = inst.k;
        let mut gains = Vec::with_capacity(k * k);
        for row in 0..k {
            for col in 0..k {
                gains.push(effective_gain(
                    inst.gamma_sr[row],
                    inst.gamma_sd[row],
                    inst.gamma_rd[col],
                ));
            }
        }
        Self { k, gains }
    }

    /// Number of subcarriers per slot (the table is `dim x dim`).
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Effective gain of the pair (slot-1 `k`, slot-2 `l`).
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.gains[k * self.k + l]
    }

    /// True if any pair has a strictly positive effective gain.
    pub fn any_positive(&self) -> bool {
        self.gains.iter().any(|g| *g > 0.0)
    }
}

/// Transmission mode of one subcarrier pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Slot-1 subcarrier `k` is decoded by the relay and forwarded on
    /// slot-2 subcarrier `l`; the source is silent in slot 2.
    RelayAided,
    /// Both slots carry independent source→destination transmissions; the
    /// relay is silent.
    Direct,
}

/// Resolved decision for one subcarrier pair: indices, mode, powers and the
/// pair's rate contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDecision {
    /// Slot-1 subcarrier index (0-based).
    pub k: usize,
    /// Slot-2 subcarrier index (0-based).
    pub l: usize,
    pub mode: Mode,
    /// Total transmit power of the pair in watts.
    pub total_power: f64,
    /// Source power in slot 1.
    pub slot1_power: f64,
    /// Source power in slot 2 (zero when relay-aided).
    pub slot2_source_power: f64,
    /// Relay power in slot 2 (zero when direct).
    pub slot2_relay_power: f64,
    /// Rate contribution in bpos.
    pub rate: f64,
}

/// A complete resource-allocation decision: a pairing permutation with one
/// `PairDecision` per slot-1 subcarrier, plus the aggregates and the dual
/// price it was produced at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub decisions: Vec<PairDecision>,
    /// Total transmit power in watts.
    pub sum_power: f64,
    /// Achieved sum rate in bpos.
    pub sum_rate: f64,
    /// Dual price the allocation was produced at.
    pub mu: f64,
    /// True when `sum_rate` lies in the acceptance band
    /// `[r_req, r_req + epsilon]`; false for fallback results whose rate
    /// overshoots the band.
    pub exact: bool,
}

impl Allocation {
    /// True if the slot-2 indices of the decisions form a permutation of
    /// `0..k`.
    pub fn is_permutation(&self) -> bool {
        let k = self.decisions.len();
        let mut seen = vec![false; k];
        for d in &self.decisions {
            if d.l >= k || seen[d.l] {
                return false;
            }
            seen[d.l] = true;
        }
        true
    }
}
