//! Stable hashing helpers shared by the cache, the scenario generator,
//! and the freeze machinery.

use sha2::{Digest, Sha256};

/// SHA-256 of `bytes` as lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Derive a 32-byte RNG seed from an integer seed plus a stream label,
/// so parallel generators get independent deterministic streams.
pub fn derive_rng_seed(seed: u64, stream: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(b"/");
    h.update(stream.as_bytes());
    let digest = h.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    out
}
