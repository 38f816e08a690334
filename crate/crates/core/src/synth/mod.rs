//! Test-signal synthesis: the staged playback waveform, band-limited
//! Gaussian noise, dummy recorded waveforms with known injected noise,
//! and a playback-through-recorder simulation.

mod dummy;
mod noise;
mod playback;
mod recording;

pub use dummy::{make_dummy_traces, synthesize_dummy, white_noise, DummyOutput, DummySpec};
pub use noise::{bandlimited_noise_stream, make_bandlimited_noise};
pub use playback::{generate_playback_waveform, PlaybackSpec};
pub use recording::{detect_playback_structure, simulate_recording, PlaybackStructure, RecorderSpec};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic generator for one noise stream. The ChaCha12 stream
/// cipher keyed by `seed` provides portable output; `stream` selects
/// statistically independent substreams of the same seed, one per
/// noise kind.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
