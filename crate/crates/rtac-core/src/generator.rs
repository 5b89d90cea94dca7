//! Random binary-CSP generator.
//!
//! The draw protocol is normative so that any implementation reproduces the
//! same instance from the same seed:
//!
//! 1. Seed a [`SplitMix64`] stream with the config seed.
//! 2. Visit unordered variable pairs in ascending `(x, y)` order; one unit
//!    draw per pair decides (`draw < density`) whether the pair gets a
//!    constraint.
//! 3. For each constrained pair, visit value cells `(a, b)` in row-major
//!    order; one unit draw per cell decides (`draw < tightness`) whether the
//!    pair is forbidden. Everything not forbidden is allowed.
//!
//! Constraints whose allowed set comes out empty are kept; they encode hard
//! conflicts. The PRNG identity is part of the instance file contract and is
//! recorded in the `gen` metadata.

use crate::error::{Error, Result};
use crate::model::{BinaryConstraint, CspInstance, GenMeta};

/// PRNG identifier recorded in generated instance metadata.
pub const PRNG_ID: &str = "splitmix64";

/// SplitMix64: 64-bit state, one additive constant, two xor-shift mixes.
/// Output k is mix(seed + k * 0x9E3779B97F4A7C15).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Generation parameters. `density` is the probability that an unordered
/// variable pair carries a constraint; `tightness` is the probability that an
/// individual value pair inside a constraint is forbidden.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub d: usize,
    pub density: f64,
    pub tightness: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidConfig("vars must be at least 1".into()));
        }
        if self.d < 1 {
            return Err(Error::InvalidConfig("dom must be at least 1".into()));
        }
        for (name, p) in [("density", self.density), ("tightness", self.tightness)] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Generates an instance under the documented draw protocol. Deterministic
/// for a fixed config.
pub fn generate(cfg: &GenConfig) -> Result<CspInstance> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut constraints = Vec::new();
    for x in 0..cfg.n {
        for y in x + 1..cfg.n {
            if rng.next_unit() < cfg.density {
                let mut allowed = Vec::new();
                for a in 0..cfg.d {
                    for b in 0..cfg.d {
                        // One draw per cell, forbidden iff draw < tightness.
                        if rng.next_unit() >= cfg.tightness {
                            allowed.push((a, b));
                        }
                    }
                }
                constraints.push(BinaryConstraint { x, y, allowed });
            }
        }
    }
    Ok(
        CspInstance::new(cfg.n, cfg.d, constraints)?.with_gen_meta(GenMeta {
            n: cfg.n,
            d: cfg.d,
            density: cfg.density,
            tightness: cfg.tightness,
            seed: cfg.seed,
            prng: PRNG_ID.to_string(),
        }),
    )
}
