//! Reproducible random streams keyed by `(seed, substream)`.
//!
//! Backed by ChaCha8, which is counter-based: the stream id selects an
//! independent keystream and the 64-bit block counter cannot wrap below 2^64
//! blocks. Work is assigned to substreams by batch index, never by thread, so
//! results do not depend on the degree of parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Substream domains keep the quantum, classical and detection runs apart
/// under one seed.
pub(crate) const DOMAIN_QUANTUM: u64 = 0;
pub(crate) const DOMAIN_CLASSICAL: u64 = 1;
pub(crate) const DOMAIN_DETECTION: u64 = 2;

pub fn stream(seed: u64, substream_id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(substream_id);
    rng
}

/// `domain` in the top byte, `index` below.
pub(crate) fn substream(domain: u64, index: u64) -> u64 {
    (domain << 56) | (index & ((1 << 56) - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_draws() {
        let a: Vec<u64> = stream(7, 3).random_iter().take(16).collect();
        let b: Vec<u64> = stream(7, 3).random_iter().take(16).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = stream(7, 4).random_iter().take(16).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn substreams_uncorrelated() {
        let n = 1_000_000;
        let mut x = stream(42, 0);
        let mut y = stream(42, 1);
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let a: f64 = x.random();
            let b: f64 = y.random();
            sx += a;
            sy += b;
            sxy += a * b;
            sxx += a * a;
            syy += b * b;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx / nf * sy / nf;
        let rho = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(rho.abs() < 0.01, "rho = {rho}");
    }

    #[test]
    fn lag_one_autocorrelation_small() {
        let mut x = stream(1, 9);
        let v: Vec<f64> = (0..1_000_000).map(|_| x.random()).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>();
        let lag = v.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>();
        assert!((lag / var).abs() < 0.01);
    }
}
