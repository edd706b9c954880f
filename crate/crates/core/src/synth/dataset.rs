//! Seeded, parallel dataset generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{SeriesSet, TimeSeries};
use crate::synth::gp::sample_gp;
use crate::synth::kernel::{sample_composite, CompositeKernel, KernelFamily, KernelRanges};

/// Resamples of the composite after a failed factorization.
pub const MAX_RETRIES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_series: usize,
    pub length: usize,
    pub seed: u64,
    pub jitter: f64,
    pub max_leaves: usize,
    /// Keep Matern in the bank. When false it is dropped from the families.
    pub matern_mix: bool,
    /// Restrict the bank. `None` means every family.
    pub families: Option<Vec<KernelFamily>>,
    pub ranges: KernelRanges,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_series: 200,
            length: 1024,
            seed: 0,
            jitter: 1e-6,
            max_leaves: 3,
            matern_mix: true,
            families: None,
            ranges: KernelRanges::default(),
        }
    }
}

impl SynthConfig {
    pub fn new(n_series: usize, length: usize, seed: u64) -> Self {
        Self {
            n_series,
            length,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 16 {
            return Err(Error::param("length", "must be at least 16"));
        }
        if self.n_series < 1 {
            return Err(Error::param("n_series", "must be at least 1"));
        }
        if self.max_leaves < 1 {
            return Err(Error::param("max_leaves", "must be at least 1"));
        }
        if !(self.jitter > 0.0) || self.jitter > crate::synth::gp::MAX_JITTER {
            return Err(Error::param("jitter", "must be in (0, 1e-2]"));
        }
        if self.bank().is_empty() {
            return Err(Error::param("families", "kernel bank is empty"));
        }
        Ok(())
    }

    /// Families the composites draw from.
    pub fn bank(&self) -> Vec<KernelFamily> {
        let base: Vec<KernelFamily> = match &self.families {
            Some(f) => f.clone(),
            None => KernelFamily::ALL.to_vec(),
        };
        base.into_iter()
            .filter(|f| self.matern_mix || *f != KernelFamily::Matern)
            .collect()
    }
}

/// Per-series provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub id: String,
    pub kernel_expr: String,
    pub seed: u64,
    pub jitter: f64,
    pub attempts: usize,
    pub kernel: CompositeKernel,
}

/// splitmix64 finaliser over (master, index).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates series `index` of the dataset from its own RNG stream.
pub fn generate_one<T: Scalar>(
    cfg: &SynthConfig,
    bank: &[KernelFamily],
    index: usize,
) -> Result<(TimeSeries<T>, Provenance)> {
    let seed = derive_seed(cfg.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = format!("synth-{index}");
    for attempt in 1..=MAX_RETRIES + 1 {
        let kernel = sample_composite(&mut rng, bank, cfg.max_leaves, cfg.length, &cfg.ranges);
        match sample_gp::<T, _>(&kernel, cfg.length, cfg.jitter, &mut rng) {
            Ok(s) => {
                let prov = Provenance {
                    id: id.clone(),
                    kernel_expr: kernel.to_string(),
                    seed,
                    jitter: s.jitter,
                    attempts: attempt,
                    kernel,
                };
                return Ok((TimeSeries::new(id, s.values)?, prov));
            }
            Err(Error::NotPositiveDefinite { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed {
        index,
        attempts: MAX_RETRIES + 1,
    })
}

pub fn generate_dataset_as<T: Scalar>(
    cfg: &SynthConfig,
) -> Result<(SeriesSet<T>, Vec<Provenance>)> {
    cfg.validate()?;
    let bank = cfg.bank();
    let out: Vec<(TimeSeries<T>, Provenance)> = (0..cfg.n_series)
        .into_par_iter()
        .map(|i| generate_one(cfg, &bank, i))
        .collect::<Result<_>>()?;
    let (series, prov): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok((SeriesSet::from_series(series)?, prov))
}

pub fn generate_dataset(cfg: &SynthConfig) -> Result<(SeriesSet, Vec<Provenance>)> {
    generate_dataset_as::<f64>(cfg)
}
