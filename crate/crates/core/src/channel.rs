//! Seeded generation of frequency-selective fading instances for the
//! relay-on-a-line scenario.
//!
//! The relay sits on the straight line between source and destination; the
//! source→destination distance is fixed at 1 km and the source→relay
//! distance is `d` km. Each link draws a Rayleigh impulse response with a
//! uniform power-delay profile (unit aggregate power), takes the K-point DFT
//! and applies distance path loss and noise normalization:
//! `gamma = |H_k|^2 * dist^-alpha / sigma^2`.
//!
//! Sub-seeding is stateless: the ChaCha key is the (master seed, realization
//! index, link id) triple, so any realization can be generated independently
//! and in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::types::ChannelInstance;

/// Scenario parameters for one Monte Carlo grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Subcarriers per slot.
    pub k: usize,
    /// Source→relay distance in km; relay→destination is `1 - d`.
    pub d: f64,
    /// Per-subcarrier noise power in dBm.
    pub sigma2_dbm: f64,
    pub pathloss_exponent: f64,
    /// Impulse-response length; must not exceed `k`.
    pub num_taps: usize,
    /// Rate target in bpos.
    pub r_req: f64,
    /// Rate acceptance slack for the dual search.
    pub epsilon: f64,
    /// Master seed; realizations derive their own streams from it.
    pub seed: u64,
}

impl ScenarioConfig {
    /// Config with the experiment defaults: sigma^2 = -50 dBm, path-loss
    /// exponent 3, 8 taps, target 100 bpos, epsilon 1.
    pub fn new(k: usize, d: f64, seed: u64) -> Self {
        Self {
            k,
            d,
            sigma2_dbm: -50.0,
            pathloss_exponent: 3.0,
            num_taps: 8,
            r_req: 100.0,
            epsilon: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("K must be positive".into()));
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(Error::InvalidInput(format!(
                "relay position d must lie strictly inside (0, 1), got {}",
                self.d
            )));
        }
        if self.num_taps == 0 || self.num_taps > self.k {
            return Err(Error::InvalidInput(format!(
                "num_taps must be in 1..=K, got {} for K = {}",
                self.num_taps, self.k
            )));
        }
        if !self.sigma2_dbm.is_finite() {
            return Err(Error::InvalidInput("sigma2_dbm must be finite".into()));
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent > 0.0) {
            return Err(Error::InvalidInput(
                "pathloss_exponent must be positive".into(),
            ));
        }
        if !(self.r_req.is_finite() && self.r_req >= 0.0) {
            return Err(Error::InvalidInput("r_req must be >= 0".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput("epsilon must be > 0".into()));
        }
        Ok(())
    }

    /// Noise power in watts: `10^((dBm - 30) / 10)`.
    pub fn sigma2_watts(&self) -> f64 {
        10f64.powf((self.sigma2_dbm - 30.0) / 10.0)
    }
}

/// Link ids for sub-seeding.
const LINK_SOURCE_RELAY: u64 = 0;
const LINK_SOURCE_DEST: u64 = 1;
const LINK_RELAY_DEST: u64 = 2;

fn link_rng(master_seed: u64, realization: u64, link: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&realization.to_le_bytes());
    key[16..24].copy_from_slice(&link.to_le_bytes());
    key[24..32].copy_from_slice(b"fs-fade\0");
    ChaCha8Rng::from_seed(key)
}

/// Per-subcarrier normalized gains of one link: Rayleigh taps of variance
/// `1/num_taps` each, K-point DFT, then `dist^-alpha / sigma^2`.
fn link_gains(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng, distance_km: f64) -> Vec<f64> {
    let taps = cfg.num_taps;
    let tap_std = (0.5 / taps as f64).sqrt(); // circular: each component N(0, 1/(2T))
    let mut tap_re = Vec::with_capacity(taps);
    let mut tap_im = Vec::with_capacity(taps);
    for _ in 0..taps {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        tap_re.push(re * tap_std);
        tap_im.push(im * tap_std);
    }

    let scale = distance_km.powf(-cfg.pathloss_exponent) / cfg.sigma2_watts();
    let k = cfg.k;
    (0..k)
        .map(|sub| {
            let mut h_re = 0.0f64;
            let mut h_im = 0.0f64;
            for t in 0..taps {
                let angle =
                    -2.0 * std::f64::consts::PI * ((sub * t) % k) as f64 / k as f64;
                let (sin, cos) = angle.sin_cos();
                h_re += tap_re[t] * cos - tap_im[t] * sin;
                h_im += tap_re[t] * sin + tap_im[t] * cos;
            }
            (h_re * h_re + h_im * h_im) * scale
        })
        .collect()
}

/// Instance for realization index `realization` of the scenario. Pure in
/// `(cfg, realization)`: the same pair always yields the same instance
/// bit for bit.
pub fn generate_realization(cfg: &ScenarioConfig, realization: u64) -> Result<ChannelInstance> {
    cfg.validate()?;
    let gamma_sr = link_gains(
        cfg,
        &mut link_rng(cfg.seed, realization, LINK_SOURCE_RELAY),
        cfg.d,
    );
    let gamma_sd = link_gains(
        cfg,
        &mut link_rng(cfg.seed, realization, LINK_SOURCE_DEST),
        1.0,
    );
    let gamma_rd = link_gains(
        cfg,
        &mut link_rng(cfg.seed, realization, LINK_RELAY_DEST),
        1.0 - cfg.d,
    );
    ChannelInstance::new(gamma_sr, gamma_sd, gamma_rd, cfg.r_req, cfg.epsilon)
}

/// Single-instance convenience: realization 0 of the scenario.
pub fn generate_instance(cfg: &ScenarioConfig) -> Result<ChannelInstance> {
    generate_realization(cfg, 0)
}
