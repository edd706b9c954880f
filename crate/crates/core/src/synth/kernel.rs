//! Covariance kernel bank and random composites.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelFamily {
    Rbf,
    Matern,
    RationalQuadratic,
    ExpSineSquared,
    DotProduct,
    WhiteNoise,
    Constant,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 7] = [
        KernelFamily::Rbf,
        KernelFamily::Matern,
        KernelFamily::RationalQuadratic,
        KernelFamily::ExpSineSquared,
        KernelFamily::DotProduct,
        KernelFamily::WhiteNoise,
        KernelFamily::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Rbf => "RBF",
            KernelFamily::Matern => "Matern",
            KernelFamily::RationalQuadratic => "RationalQuadratic",
            KernelFamily::ExpSineSquared => "ExpSineSquared",
            KernelFamily::DotProduct => "DotProduct",
            KernelFamily::WhiteNoise => "WhiteNoise",
            KernelFamily::Constant => "Constant",
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        KernelFamily::ALL
            .into_iter()
            .find(|f| f.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::param("kernel family", format!("unknown family '{s}'")))
    }
}

/// One leaf kernel. Distances are measured in the units of the inputs;
/// the generator uses the unit interval, so periods are `steps / length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum KernelSpec {
    Rbf { length_scale: f64 },
    Matern { length_scale: f64, nu: f64 },
    RationalQuadratic { length_scale: f64, alpha: f64 },
    ExpSineSquared { length_scale: f64, periodicity: f64 },
    DotProduct { sigma0: f64 },
    WhiteNoise { noise_level: f64 },
    Constant { value: f64 },
}

impl KernelSpec {
    pub fn family(&self) -> KernelFamily {
        match self {
            KernelSpec::Rbf { .. } => KernelFamily::Rbf,
            KernelSpec::Matern { .. } => KernelFamily::Matern,
            KernelSpec::RationalQuadratic { .. } => KernelFamily::RationalQuadratic,
            KernelSpec::ExpSineSquared { .. } => KernelFamily::ExpSineSquared,
            KernelSpec::DotProduct { .. } => KernelFamily::DotProduct,
            KernelSpec::WhiteNoise { .. } => KernelFamily::WhiteNoise,
            KernelSpec::Constant { .. } => KernelFamily::Constant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be positive")))
            }
        };
        match *self {
            KernelSpec::Rbf { length_scale } => positive("length_scale", length_scale),
            KernelSpec::Matern { length_scale, nu } => {
                positive("length_scale", length_scale)?;
                if [0.5, 1.5, 2.5].contains(&nu) {
                    Ok(())
                } else {
                    Err(Error::param("nu", format!("{nu} not in {{0.5, 1.5, 2.5}}")))
                }
            }
            KernelSpec::RationalQuadratic {
                length_scale,
                alpha,
            } => {
                positive("length_scale", length_scale)?;
                positive("alpha", alpha)
            }
            KernelSpec::ExpSineSquared {
                length_scale,
                periodicity,
            } => {
                positive("length_scale", length_scale)?;
                positive("periodicity", periodicity)
            }
            KernelSpec::DotProduct { sigma0 } => {
                if sigma0 >= 0.0 && sigma0.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param(
                        "sigma0",
                        format!("{sigma0} must be non-negative"),
                    ))
                }
            }
            KernelSpec::WhiteNoise { noise_level } => positive("noise_level", noise_level),
            KernelSpec::Constant { value } => positive("constant_value", value),
        }
    }

    pub fn eval(&self, t: f64, u: f64) -> f64 {
        let d = (t - u).abs();
        match *self {
            KernelSpec::Rbf { length_scale: l } => (-0.5 * (d / l).powi(2)).exp(),
            KernelSpec::Matern {
                length_scale: l,
                nu,
            } => {
                let r = d / l;
                if nu == 0.5 {
                    (-r).exp()
                } else if nu == 1.5 {
                    let a = 3f64.sqrt() * r;
                    (1.0 + a) * (-a).exp()
                } else {
                    let a = 5f64.sqrt() * r;
                    (1.0 + a + a * a / 3.0) * (-a).exp()
                }
            }
            KernelSpec::RationalQuadratic {
                length_scale: l,
                alpha,
            } => (1.0 + d * d / (2.0 * alpha * l * l)).powf(-alpha),
            KernelSpec::ExpSineSquared {
                length_scale: l,
                periodicity: p,
            } => {
                let s = (std::f64::consts::PI * d / p).sin();
                (-2.0 * s * s / (l * l)).exp()
            }
            KernelSpec::DotProduct { sigma0 } => sigma0 * sigma0 + t * u,
            KernelSpec::WhiteNoise { noise_level } => {
                if t == u {
                    noise_level
                } else {
                    0.0
                }
            }
            KernelSpec::Constant { value } => value,
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KernelSpec::Rbf { length_scale } => write!(f, "RBF(length_scale={length_scale:.4})"),
            KernelSpec::Matern { length_scale, nu } => {
                write!(f, "Matern(length_scale={length_scale:.4}, nu={nu})")
            }
            KernelSpec::RationalQuadratic {
                length_scale,
                alpha,
            } => {
                write!(
                    f,
                    "RationalQuadratic(length_scale={length_scale:.4}, alpha={alpha:.4})"
                )
            }
            KernelSpec::ExpSineSquared {
                length_scale,
                periodicity,
            } => {
                write!(
                    f,
                    "ExpSineSquared(length_scale={length_scale:.4}, periodicity={periodicity:.6})"
                )
            }
            KernelSpec::DotProduct { sigma0 } => write!(f, "DotProduct(sigma_0={sigma0:.4})"),
            KernelSpec::WhiteNoise { noise_level } => {
                write!(f, "WhiteNoise(noise_level={noise_level:.4})")
            }
            KernelSpec::Constant { value } => write!(f, "Constant({value:.4})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "*")]
    Mul,
}

/// Leaves combined by a left fold of binary operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeKernel {
    pub leaves: Vec<KernelSpec>,
    pub ops: Vec<KernelOp>,
}

impl CompositeKernel {
    pub fn single(leaf: KernelSpec) -> Self {
        Self {
            leaves: vec![leaf],
            ops: Vec::new(),
        }
    }

    pub fn new(leaves: Vec<KernelSpec>, ops: Vec<KernelOp>) -> Result<Self> {
        if leaves.is_empty() || ops.len() + 1 != leaves.len() {
            return Err(Error::param("kernel", "need n leaves and n - 1 operators"));
        }
        for l in &leaves {
            l.validate()?;
        }
        Ok(Self { leaves, ops })
    }

    pub fn eval(&self, t: f64, u: f64) -> f64 {
        let mut acc = self.leaves[0].eval(t, u);
        for (op, leaf) in self.ops.iter().zip(&self.leaves[1..]) {
            let v = leaf.eval(t, u);
            acc = match op {
                KernelOp::Add => acc + v,
                KernelOp::Mul => acc * v,
            };
        }
        acc
    }
}

impl fmt::Display for CompositeKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.leaves[0])?;
        for (op, leaf) in self.ops.iter().zip(&self.leaves[1..]) {
            let sym = match op {
                KernelOp::Add => "+",
                KernelOp::Mul => "*",
            };
            write!(f, " {sym} {leaf}")?;
        }
        Ok(())
    }
}

/// Evaluates a composite kernel. Alias of [`CompositeKernel::eval`].
pub fn kernel_eval(k: &CompositeKernel, t: f64, u: f64) -> f64 {
    k.eval(t, u)
}

/// Sampling distribution of one scalar parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "kebab-case")]
pub enum ParamRange {
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
}

impl ParamRange {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ParamRange::Uniform { low, high } => rng.random_range(low..high),
            ParamRange::LogUniform { low, high } => rng.random_range(low.ln()..high.ln()).exp(),
        }
    }
}

/// Versioned parameter ranges of the kernel bank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelRanges {
    pub version: u32,
    pub length_scale: ParamRange,
    pub matern_nu: Vec<f64>,
    pub alpha: ParamRange,
    pub period_steps: Vec<usize>,
    pub sigma0: ParamRange,
    pub noise_level: ParamRange,
    pub constant_value: ParamRange,
}

const RANGES_JSON: &str = include_str!("../../data/kernel_ranges.json");

impl Default for KernelRanges {
    fn default() -> Self {
        serde_json::from_str(RANGES_JSON).expect("bundled kernel ranges parse")
    }
}

/// Draws one leaf of `family`. Periods are drawn in grid steps and mapped
/// onto the unit interval.
pub fn sample_leaf<R: Rng + ?Sized>(
    rng: &mut R,
    family: KernelFamily,
    length: usize,
    ranges: &KernelRanges,
) -> KernelSpec {
    match family {
        KernelFamily::Rbf => KernelSpec::Rbf {
            length_scale: ranges.length_scale.sample(rng),
        },
        KernelFamily::Matern => KernelSpec::Matern {
            length_scale: ranges.length_scale.sample(rng),
            nu: ranges.matern_nu[rng.random_range(0..ranges.matern_nu.len())],
        },
        KernelFamily::RationalQuadratic => KernelSpec::RationalQuadratic {
            length_scale: ranges.length_scale.sample(rng),
            alpha: ranges.alpha.sample(rng),
        },
        KernelFamily::ExpSineSquared => KernelSpec::ExpSineSquared {
            length_scale: ranges.length_scale.sample(rng),
            periodicity: ranges.period_steps[rng.random_range(0..ranges.period_steps.len())] as f64
                / length as f64,
        },
        KernelFamily::DotProduct => KernelSpec::DotProduct {
            sigma0: ranges.sigma0.sample(rng),
        },
        KernelFamily::WhiteNoise => KernelSpec::WhiteNoise {
            noise_level: ranges.noise_level.sample(rng),
        },
        KernelFamily::Constant => KernelSpec::Constant {
            value: ranges.constant_value.sample(rng),
        },
    }
}

/// `j ~ U{1..=max_leaves}` leaves drawn uniformly from `families`, joined
/// by operators drawn uniformly from `{+, *}`.
pub fn sample_composite<R: Rng + ?Sized>(
    rng: &mut R,
    families: &[KernelFamily],
    max_leaves: usize,
    length: usize,
    ranges: &KernelRanges,
) -> CompositeKernel {
    let j = rng.random_range(1..=max_leaves.max(1));
    let leaves: Vec<KernelSpec> = (0..j)
        .map(|_| {
            let fam = families[rng.random_range(0..families.len())];
            sample_leaf(rng, fam, length, ranges)
        })
        .collect();
    let ops = (1..j)
        .map(|_| {
            if rng.random_bool(0.5) {
                KernelOp::Add
            } else {
                KernelOp::Mul
            }
        })
        .collect();
    CompositeKernel { leaves, ops }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_forms() {
        let rbf = CompositeKernel::single(KernelSpec::Rbf { length_scale: 1.0 });
        assert_eq!(kernel_eval(&rbf, 0.3, 0.3), 1.0);
        let per = CompositeKernel::single(KernelSpec::ExpSineSquared {
            length_scale: 1.0,
            periodicity: 24.0,
        });
        assert!((kernel_eval(&per, 0.0, 24.0) - 1.0).abs() < 1e-12);
        let sum = CompositeKernel::new(
            vec![
                KernelSpec::Constant { value: 2.0 },
                KernelSpec::WhiteNoise { noise_level: 1.0 },
            ],
            vec![KernelOp::Add],
        )
        .unwrap();
        assert_eq!(kernel_eval(&sum, 0.0, 1.0), 2.0);
        assert_eq!(kernel_eval(&sum, 1.0, 1.0), 3.0);
    }

    #[test]
    fn matern_limits() {
        for nu in [0.5, 1.5, 2.5] {
            let k = KernelSpec::Matern {
                length_scale: 0.5,
                nu,
            };
            assert_eq!(k.eval(0.2, 0.2), 1.0);
            assert!(k.eval(0.0, 0.3) < 1.0 && k.eval(0.0, 0.3) > 0.0);
        }
        // smoother kernels decay more slowly near zero
        let d = 0.05;
        let v: Vec<f64> = [0.5, 1.5, 2.5]
            .iter()
            .map(|&nu| {
                KernelSpec::Matern {
                    length_scale: 0.5,
                    nu,
                }
                .eval(0.0, d)
            })
            .collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
    }

    #[test]
    fn left_fold_order() {
        // (2 * 3) + 1 = 7, not 2 * (3 + 1) = 8
        let k = CompositeKernel::new(
            vec![
                KernelSpec::Constant { value: 2.0 },
                KernelSpec::Constant { value: 3.0 },
                KernelSpec::Constant { value: 1.0 },
            ],
            vec![KernelOp::Mul, KernelOp::Add],
        )
        .unwrap();
        assert_eq!(k.eval(0.0, 0.5), 7.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_composite(
            &mut ChaCha8Rng::seed_from_u64(5),
            &KernelFamily::ALL,
            3,
            256,
            &KernelRanges::default(),
        );
        let b = sample_composite(
            &mut ChaCha8Rng::seed_from_u64(5),
            &KernelFamily::ALL,
            3,
            256,
            &KernelRanges::default(),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ranges = KernelRanges::default();
        let mut counts = [0usize; 3];
        let mut fam = std::collections::BTreeMap::new();
        let mut leaves = 0usize;
        for _ in 0..10_000 {
            let k = sample_composite(&mut rng, &KernelFamily::ALL, 3, 1024, &ranges);
            counts[k.leaves.len() - 1] += 1;
            for l in &k.leaves {
                *fam.entry(l.family()).or_insert(0usize) += 1;
                leaves += 1;
                l.validate().unwrap();
            }
        }
        for c in counts {
            assert!((c as f64 / 10_000.0 - 1.0 / 3.0).abs() < 0.02);
        }
        assert_eq!(fam.len(), 7);
        for (_, c) in fam {
            assert!((c as f64 / leaves as f64 - 1.0 / 7.0).abs() < 0.02);
        }
    }

    #[test]
    fn bundled_ranges() {
        let r = KernelRanges::default();
        assert_eq!(r.version, 1);
        assert_eq!(r.period_steps, vec![12, 24, 48, 96, 168]);
        assert_eq!(
            r.length_scale,
            ParamRange::LogUniform {
                low: 0.02,
                high: 1.0
            }
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let v = r.noise_level.sample(&mut rng);
            assert!((1e-3..0.5).contains(&v));
        }
    }

    #[test]
    fn family_names_parse() {
        assert_eq!(
            "dot_product".parse::<KernelFamily>().unwrap(),
            KernelFamily::DotProduct
        );
        assert_eq!("RBF".parse::<KernelFamily>().unwrap(), KernelFamily::Rbf);
        assert!("linear".parse::<KernelFamily>().is_err());
    }
}
