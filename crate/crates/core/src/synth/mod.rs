//! Synthetic series from Gaussian-process priors over random kernel composites.

pub mod dataset;
pub mod gp;
pub mod kernel;

pub use dataset::{
    derive_seed, generate_dataset, generate_dataset_as, generate_one, Provenance, SynthConfig,
    MAX_RETRIES,
};
pub use gp::{build_covariance, factor_with_jitter, sample_gp, GpSample, MAX_JITTER};
pub use kernel::{
    kernel_eval, sample_composite, sample_leaf, CompositeKernel, KernelFamily, KernelOp,
    KernelRanges, KernelSpec, ParamRange,
};
