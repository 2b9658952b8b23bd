//! Shared samplers for the integration tests.
#![allow(dead_code)]

use nongauss_core::fock::{FockArray, FockConfig};
use nongauss_core::monotone::sample;
use nongauss_core::C64;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;

/// Seed-pinned proptest configuration with `cases` cases.
pub fn pinned(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn cfg() -> FockConfig {
    FockConfig::default()
}

/// Random normalized ket supported on occupations `< levels` of every mode.
pub fn random_ket(rng: &mut impl Rng, dims: &[usize], levels: usize) -> Vec<C64> {
    let dim: usize = dims.iter().product();
    let mut v = vec![C64::new(0.0, 0.0); dim];
    let mut idx = vec![0usize; dims.len()];
    loop {
        let at = idx.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i);
        v[at] = C64::new(sample::uniform(rng, -1.0, 1.0), sample::uniform(rng, -1.0, 1.0));
        let mut k = dims.len();
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < levels.min(dims[k]) {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                return v.into_iter().map(|z| z / n).collect();
            }
        }
    }
}

/// Random low-energy non-Gaussian state: a ket, or a two-member mixture.
pub fn random_state(rng: &mut impl Rng, dims: &[usize], levels: usize, mixed: bool) -> FockArray {
    if !mixed {
        return FockArray::from_ket(dims, random_ket(rng, dims, levels)).unwrap();
    }
    let p = sample::uniform(rng, 0.2, 0.8);
    let a: Vec<C64> = random_ket(rng, dims, levels).into_iter().map(|z| z * p.sqrt()).collect();
    let b: Vec<C64> = random_ket(rng, dims, levels).into_iter().map(|z| z * (1.0 - p).sqrt()).collect();
    FockArray::from_mixture(dims, vec![a, b]).unwrap()
}
