//! Photon-counting emulation: Poisson coincidence counts per measurement
//! setting, correlator and CHSH estimates with first-order error bars, and
//! the blocked-path estimate of the mixing probability.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::MixedStrategy;
use crate::error::{Error, Result};
use crate::qmat::{kron, sigma3, ComplexMat};
use crate::states::{prepare, StateSpec, TwoQubitState};
use crate::strategies::{build_operators, effect, luders_relay};

/// Below this many expected counts per setting, Gaussian propagation of
/// Poisson errors is not trustworthy.
pub const MIN_MEAN_COUNTS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    /// Expected coincidences per measurement setting of a deterministic
    /// strategy run with probability one.
    pub mean_counts_per_setting: f64,
    pub seed: u64,
    pub n_repeats: usize,
}

impl ShotConfig {
    pub fn new(mean_counts_per_setting: f64, seed: u64, n_repeats: usize) -> Result<Self> {
        let cfg = Self { mean_counts_per_setting, seed, n_repeats };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_counts_per_setting >= MIN_MEAN_COUNTS && self.mean_counts_per_setting.is_finite()) {
            return Err(Error::invalid(format!(
                "mean counts per setting must be a finite value >= {MIN_MEAN_COUNTS}, got {}",
                self.mean_counts_per_setting
            )));
        }
        Ok(())
    }
}

/// Coincidence counts for the four joint outcomes of one setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountRecord {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
}

impl CountRecord {
    pub fn new(pp: u64, pm: u64, mp: u64, mm: u64) -> Self {
        Self { pp, pm, mp, mm }
    }

    pub fn total(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn add(&self, other: &CountRecord) -> CountRecord {
        CountRecord {
            pp: self.pp + other.pp,
            pm: self.pm + other.pm,
            mp: self.mp + other.mp,
            mm: self.mm + other.mm,
        }
    }
}

/// A value with one standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    pub fn contains(&self, truth: f64, n_sigma: f64) -> bool {
        (self.value - truth).abs() <= n_sigma * self.sigma
    }
}

/// Probabilities of `(++, +−, −+, −−)` for measuring `a ⊗ b` on the state.
pub fn outcome_probabilities(state: &TwoQubitState, a: &ComplexMat, b: &ComplexMat) -> Result<[f64; 4]> {
    let mut q = [0.0; 4];
    let mut k = 0;
    for i in [1i8, -1] {
        for j in [1i8, -1] {
            let proj = kron(&effect(a, i), &effect(b, j))?;
            let v = proj.matmul(state.rho()).trace().re;
            if v < -1e-9 {
                return Err(Error::numerical(format!("negative outcome probability {v:e}")));
            }
            q[k] = v.max(0.0);
            k += 1;
        }
    }
    Ok(q)
}

fn poisson_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::numerical(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Independent Poisson counts with means `mean · q_ij`.
pub fn sample_counts_with_mean<R: Rng + ?Sized>(
    state: &TwoQubitState,
    a: &ComplexMat,
    b: &ComplexMat,
    mean: f64,
    rng: &mut R,
) -> Result<CountRecord> {
    let q = outcome_probabilities(state, a, b)?;
    Ok(CountRecord {
        pp: poisson_draw(mean * q[0], rng)?,
        pm: poisson_draw(mean * q[1], rng)?,
        mp: poisson_draw(mean * q[2], rng)?,
        mm: poisson_draw(mean * q[3], rng)?,
    })
}

pub fn sample_counts<R: Rng + ?Sized>(
    state: &TwoQubitState,
    a: &ComplexMat,
    b: &ComplexMat,
    cfg: &ShotConfig,
    rng: &mut R,
) -> Result<CountRecord> {
    cfg.validate()?;
    sample_counts_with_mean(state, a, b, cfg.mean_counts_per_setting, rng)
}

/// `(N₊₊ − N₊₋ − N₋₊ + N₋₋)/N` with `σ² = Σ (∂E/∂N_ij)²·N_ij`.
pub fn estimate_correlator(c: &CountRecord) -> Result<Estimate> {
    let total = c.total();
    if total == 0 {
        return Err(Error::invalid("cannot estimate a correlator from zero counts"));
    }
    let n = total as f64;
    let signed = [(c.pp, 1.0), (c.pm, -1.0), (c.mp, -1.0), (c.mm, 1.0)];
    let value = signed.iter().map(|&(k, s)| s * k as f64).sum::<f64>() / n;
    // ∂E/∂N_ij = (s_ij − E)/N
    let var = signed
        .iter()
        .map(|&(k, s)| (s - value).powi(2) * k as f64)
        .sum::<f64>()
        / (n * n);
    Ok(Estimate { value, sigma: var.max(0.0).sqrt() })
}

/// Mixing probability of the first path from blocked-path totals,
/// `P₁/(P₁ + P₂)`, with `σ² = P₁P₂/(P₁ + P₂)³`.
pub fn estimate_p(path1: &CountRecord, path2: &CountRecord) -> Result<Estimate> {
    let p1 = path1.total() as f64;
    let p2 = path2.total() as f64;
    let total = p1 + p2;
    if total == 0.0 {
        return Err(Error::invalid("cannot estimate a probability from zero counts"));
    }
    Ok(Estimate { value: p1 / total, sigma: (p1 * p2 / total.powi(3)).sqrt() })
}

/// Estimates of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub s_ab: Estimate,
    pub s_ac: Estimate,
    /// Probability of the first component.
    pub p_hat: Estimate,
}

// Stream layout: 8 bits setting, 8 bits component, the rest the repeat.
const AB_SETTINGS: u64 = 0;
const AC_SETTINGS: u64 = 4;
const BLOCKED_PATH: u64 = 8;

fn stream_rng(seed: u64, repeat: u64, component: u64, setting: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((repeat << 16) | (component << 8) | setting);
    rng
}

#[derive(Clone, Copy)]
struct StreamKey {
    seed: u64,
    repeat: u64,
    component: u64,
}

impl StreamKey {
    fn rng(&self, setting: u64) -> ChaCha8Rng {
        stream_rng(self.seed, self.repeat, self.component, setting)
    }
}

fn chsh_from_counts(
    state: &TwoQubitState,
    first: &[ComplexMat; 2],
    second: &[ComplexMat; 2],
    mean: f64,
    key: StreamKey,
    setting_base: u64,
) -> Result<Estimate> {
    let mut value = 0.0;
    let mut var = 0.0;
    for (x, a) in first.iter().enumerate() {
        for (y, b) in second.iter().enumerate() {
            let idx = setting_base + (2 * x + y) as u64;
            let mut rng = key.rng(idx);
            let counts = sample_counts_with_mean(state, a, b, mean, &mut rng)?;
            let e = estimate_correlator(&counts)?;
            value += if x == 1 && y == 1 { -e.value } else { e.value };
            var += e.sigma * e.sigma;
        }
    }
    Ok(Estimate { value, sigma: var.sqrt() })
}

/// One simulated experiment.
///
/// Each component runs on its own path with coincidence means scaled by its
/// probability. Its CHSH estimates combine the four correlators with
/// `σ_S = √Σσ_E²`, and components are mixed with their configured
/// probabilities. The first component's probability is re-estimated from
/// `σ₃ ⊗ σ₃` totals with the other paths blocked.
pub fn run_experiment(spec: &StateSpec, mixed: &MixedStrategy, cfg: &ShotConfig) -> Result<ExperimentRecord> {
    run_repeat(spec, mixed, cfg, 0)
}

/// Run number `repeat` of a seeded series; draws depend only on
/// `(seed, repeat, component, setting)`.
pub fn run_repeat(spec: &StateSpec, mixed: &MixedStrategy, cfg: &ShotConfig, repeat: u64) -> Result<ExperimentRecord> {
    cfg.validate()?;
    if repeat >= 1 << 48 {
        return Err(Error::invalid("repeat index too large"));
    }
    let state = prepare(spec)?;
    let z = sigma3();

    let mut s_ab = (0.0, 0.0);
    let mut s_ac = (0.0, 0.0);
    let mut paths = Vec::with_capacity(mixed.components().len());
    for (c, (case, p)) in mixed.components().iter().enumerate() {
        let key = StreamKey { seed: cfg.seed, repeat, component: c as u64 };
        let mean = cfg.mean_counts_per_setting * p;
        let mut blocked = key.rng(BLOCKED_PATH);
        paths.push(sample_counts_with_mean(&state, &z, &z, mean, &mut blocked)?);
        if *p == 0.0 {
            continue;
        }
        let ops = build_operators(case)?;
        let ab = chsh_from_counts(&state, &ops.alice, &ops.bob, mean, key, AB_SETTINGS)?;
        let relayed = luders_relay(&state, &ops)?;
        let ac = chsh_from_counts(&relayed, &ops.alice, &ops.charlie, mean, key, AC_SETTINGS)?;
        s_ab.0 += p * ab.value;
        s_ab.1 += p * p * ab.sigma * ab.sigma;
        s_ac.0 += p * ac.value;
        s_ac.1 += p * p * ac.sigma * ac.sigma;
    }
    let rest = paths[1..].iter().fold(CountRecord::default(), |acc, r| acc.add(r));
    let p_hat = estimate_p(&paths[0], &rest)?;
    Ok(ExperimentRecord {
        s_ab: Estimate { value: s_ab.0, sigma: s_ab.1.sqrt() },
        s_ac: Estimate { value: s_ac.0, sigma: s_ac.1.sqrt() },
        p_hat,
    })
}

/// `cfg.n_repeats` independent runs, in repeat order.
pub fn run_repeated(spec: &StateSpec, mixed: &MixedStrategy, cfg: &ShotConfig) -> Result<Vec<ExperimentRecord>> {
    (0..cfg.n_repeats as u64)
        .into_par_iter()
        .map(|r| run_repeat(spec, mixed, cfg, r))
        .collect()
}
