//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha20 generator keyed by a
//! 64-bit master seed and addressed by a 64-bit stream id (ChaCha's native
//! stream selector). Streams are independent of each other and of call order,
//! so codebooks, noise and datasets are reproducible without shared state.
//!
//! Structured ids such as "filler (i, j)" are folded into one `u64` with
//! [`mix_stream`]: starting from a fixed constant, each part is xor-ed in and
//! passed through the splitmix64 finalizer. The chain is order sensitive, so
//! `(1, i)` and `(2, i, j)` never alias in practice.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const MIX_INIT: u64 = 0x243F_6A88_85A3_08D3;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a structured stream address into a single stream id.
pub fn mix_stream(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(MIX_INIT, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Generator for stream `stream_id` under `master_seed`.
pub fn stream_rng(master_seed: u64, stream_id: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    let mut state = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream_id);
    rng
}
