//! Band-limited Gaussian noise.

use super::seeded_rng;
use crate::dsp::band_filter;
use crate::error::{Error, Result};
use rand_distr::{Distribution, StandardNormal};

/// White Gaussian noise of RMS `rms`, ideally filtered to `band`
/// (Hz, inclusive edges) by FFT masking over the whole array.
///
/// `rms` is the RMS of the white input, so the output RMS shrinks by
/// the square root of the kept bandwidth fraction: a `(0, b)` low-pass
/// keeps `b / (rate / 2)` of the power. The generator is ChaCha12
/// keyed by `seed` (stream 0) feeding a ziggurat normal sampler, so
/// equal seeds give bit-identical output.
pub fn make_bandlimited_noise(
    len: usize,
    sample_rate: f64,
    rms: f64,
    band: (f64, f64),
    seed: u64,
) -> Result<Vec<f64>> {
    bandlimited_noise_stream(len, sample_rate, rms, band, seed, 0)
}

/// Like [`make_bandlimited_noise`] with an explicit ChaCha12 stream
/// index, so several independent noise kinds can share one seed.
pub fn bandlimited_noise_stream(
    len: usize,
    sample_rate: f64,
    rms: f64,
    band: (f64, f64),
    seed: u64,
    stream: u64,
) -> Result<Vec<f64>> {
    if len < 16 {
        return Err(Error::Config(format!("noise length {len} is too short")));
    }
    if !(rms >= 0.0) {
        return Err(Error::Config(format!("noise RMS must be non-negative, got {rms}")));
    }
    let mut rng = seeded_rng(seed, stream);
    let white: Vec<f64> = (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * rms
        })
        .collect();
    band_filter(&white, sample_rate, band)
}
