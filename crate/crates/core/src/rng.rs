//! Counter-based random angles.
//!
//! Every angle is a pure function of `(master_seed, sample_index, slot)`:
//!
//! ```text
//! counter = sample_index · 2^20 + slot
//! bits    = splitmix64_finalize(master_seed + counter · 0x9E3779B97F4A7C15)
//! u       = (bits >> 11) · 2^-53          ∈ [0, 1)
//! angle   = u · 2π/d                      ∈ [0, 2π/d)
//! ```
//!
//! which is output number `counter` of a SplitMix64 stream seeded with
//! `master_seed`. For shared-rotation words `slot` is the 1-based level
//! index; for per-node words it is the breadth-first node slot of
//! [`crate::fractal::per_node_slot`], so the level index sits above the
//! node index inside the same 20-bit field. Sample order and worker
//! partitioning therefore never affect the drawn angles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::{FractalSpec, RotationMode, RotationWord};

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Bits reserved for the level (or node slot) below the sample index.
pub const SLOT_BITS: u32 = 20;
pub const MAX_SLOT: u64 = 1 << SLOT_BITS;
pub const MAX_SAMPLE: u64 = 1 << (64 - SLOT_BITS);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }
}

/// The SplitMix64 output function.
#[inline]
pub fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output number `counter` (1-based) of the SplitMix64 stream for `seed`.
#[inline]
pub fn splitmix64_at(seed: u64, counter: u64) -> u64 {
    splitmix64_finalize(seed.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn counter(sample_index: u64, slot: u64) -> Result<u64> {
    if slot >= MAX_SLOT {
        return Err(Error::LayoutOverflow(format!(
            "level/node slot {slot} needs more than {SLOT_BITS} bits"
        )));
    }
    if sample_index >= MAX_SAMPLE {
        return Err(Error::LayoutOverflow(format!(
            "sample index {sample_index} needs more than {} bits",
            64 - SLOT_BITS
        )));
    }
    Ok((sample_index << SLOT_BITS) | slot)
}

/// Uniform double in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform angle in `[0, 2π/d)` for one `(sample, level)` pair.
pub fn uniform_angle(
    seed: SeedSpec,
    sample_index: u64,
    level_index: u64,
    degree: u32,
) -> Result<f64> {
    let c = counter(sample_index, level_index)?;
    Ok(scale_to_range(
        unit_f64(splitmix64_at(seed.master_seed, c)),
        degree,
    ))
}

fn scale_to_range(u: f64, degree: u32) -> f64 {
    let range = std::f64::consts::TAU / degree as f64;
    let a = u * range;
    // u < 1 but the product can round up to the bound
    if a < range {
        a
    } else {
        range.next_down()
    }
}

/// Rotation word of sample `sample_index`.
///
/// Shared-rotation level `k` (1-based) uses slot `k`; per-node slot `s`
/// uses slot `s + 1`; deterministic words are all zero.
pub fn sample_word(
    spec: &FractalSpec,
    seed: SeedSpec,
    sample_index: u64,
) -> Result<RotationWord<f64>> {
    let d = spec.degree();
    let angles = match spec.mode() {
        RotationMode::Deterministic => return RotationWord::zeros(spec),
        RotationMode::SharedRotation => (1..=spec.generations() as u64)
            .map(|level| uniform_angle(seed, sample_index, level, d))
            .collect::<Result<Vec<_>>>()?,
        RotationMode::PerNode => {
            let len = spec.word_len().unwrap_or(usize::MAX) as u64;
            (0..len)
                .map(|slot| uniform_angle(seed, sample_index, slot + 1, d))
                .collect::<Result<Vec<_>>>()?
        }
    };
    RotationWord::new(spec, angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix64_reference_outputs() {
        // first outputs of SplitMix64 seeded with 1234567
        let expected = [
            6457827717110365317u64,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(splitmix64_at(1234567, i as u64 + 1), *e);
        }
        assert_eq!(splitmix64_at(0, 1), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn deterministic_and_in_range() {
        let seed = SeedSpec::new(42);
        for s in 0..200 {
            for level in 1..12 {
                let a = uniform_angle(seed, s, level, 4).unwrap();
                assert_eq!(a, uniform_angle(seed, s, level, 4).unwrap());
                assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&a));
            }
        }
    }

    #[test]
    fn layout_overflow() {
        assert!(matches!(
            uniform_angle(SeedSpec::new(1), 0, 1 << 20, 4),
            Err(Error::LayoutOverflow(_))
        ));
        assert!(uniform_angle(SeedSpec::new(1), 0, (1 << 20) - 1, 4).is_ok());
        assert!(uniform_angle(SeedSpec::new(1), MAX_SAMPLE, 1, 4).is_err());
    }

    #[test]
    fn counters_are_injective() {
        assert_ne!(counter(1, 0).unwrap(), counter(0, MAX_SLOT - 1).unwrap());
        assert_eq!(counter(3, 5).unwrap(), 3 * (1 << 20) + 5);
    }

    #[test]
    fn upper_bound_is_excluded() {
        assert!(scale_to_range(1.0 - f64::EPSILON / 2.0, 3) < std::f64::consts::TAU / 3.0);
    }

    #[test]
    fn kolmogorov_smirnov_uniformity() {
        let n = 1_000_000usize;
        let d = 4;
        let range = std::f64::consts::FRAC_PI_2;
        let seed = SeedSpec::new(20_241_018);
        let mut u: Vec<f64> = (0..n as u64)
            .map(|i| uniform_angle(seed, i / 16, i % 16 + 1, d).unwrap() / range)
            .collect();
        u.sort_unstable_by(f64::total_cmp);
        let nf = n as f64;
        let ks = u
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / nf - x).max(x - i as f64 / nf))
            .fold(0.0, f64::max);
        // asymptotic 1% critical value 1.628/√n
        assert!(ks < 1.628 / nf.sqrt(), "KS statistic {ks}");
    }

    #[test]
    fn per_node_words_have_one_angle_per_node() {
        let spec = FractalSpec::new(3, 3, RotationMode::PerNode).unwrap();
        let w = sample_word(&spec, SeedSpec::new(9), 4).unwrap();
        assert_eq!(w.len(), 13);
        let shared = FractalSpec::new(3, 3, RotationMode::SharedRotation).unwrap();
        let ws = sample_word(&shared, SeedSpec::new(9), 4).unwrap();
        assert_eq!(&w.angles()[..1], &ws.angles()[..1]);
    }
}
