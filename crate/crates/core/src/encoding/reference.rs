//! Deterministic LLM-free token encoder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Weight of the position mixing term added to every token vector.
pub const POSITION_WEIGHT: f64 = 0.1;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Unit-norm Gaussian direction keyed by the token text and the seed.
pub fn token_base_vector(seed: u64, dim: usize, token: &str) -> Vec<f64> {
    let key = fnv1a(token.as_bytes()) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Unit-norm sinusoidal encoding of a position.
pub fn position_vector(dim: usize, pos: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim)
        .map(|i| {
            let freq = 10000f64.powf(-((i / 2 * 2) as f64) / dim as f64);
            let a = pos as f64 * freq;
            if i % 2 == 0 {
                a.sin()
            } else {
                a.cos()
            }
        })
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// `base + w * unit(base ⊙ position)`. The mixing term depends on both the
/// token and its position; a purely additive position term would cancel out
/// of the mean and leave the pooled vector order-blind.
fn mix_into(base: &[f64], position: &[f64], out: &mut [f64]) {
    let norm = base
        .iter()
        .zip(position)
        .map(|(b, p)| (b * p) * (b * p))
        .sum::<f64>()
        .sqrt();
    let scale = if norm > 0.0 {
        POSITION_WEIGHT / norm
    } else {
        0.0
    };
    for ((o, b), p) in out.iter_mut().zip(base).zip(position) {
        *o += b + scale * b * p;
    }
}

/// Token vectors for one segment; positions are offsets within the segment.
pub fn reference_token_vectors(seed: u64, dim: usize, tokens: &[&str]) -> Vec<Vec<f64>> {
    tokens
        .iter()
        .enumerate()
        .map(|(pos, t)| {
            let base = token_base_vector(seed, dim, t);
            let mut v = vec![0.0; dim];
            mix_into(&base, &position_vector(dim, pos), &mut v);
            v
        })
        .collect()
}

/// Sum of the token vectors of one segment, accumulated into `acc`.
/// `positions` caches the positional table across calls.
pub(crate) fn accumulate_segment(
    seed: u64,
    dim: usize,
    tokens: &[&str],
    positions: &mut Vec<Vec<f64>>,
    acc: &mut [f64],
) {
    while positions.len() < tokens.len() {
        positions.push(position_vector(dim, positions.len()));
    }
    for (pos, t) in tokens.iter().enumerate() {
        let base = token_base_vector(seed, dim, t);
        mix_into(&base, &positions[pos], acc);
    }
}
