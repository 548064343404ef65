//! Seeded random instance generator.
//!
//! `s1` draws each symbol independently and uniformly from the alphabet;
//! `s2` is a uniformly random permutation of `s1` (Fisher-Yates shuffle), so
//! the pair is related by construction. The generator is ChaCha8 seeded with
//! `seed` through `SeedableRng::seed_from_u64`; `s1` is drawn first, then the
//! shuffle consumes the same stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;

pub const DNA: [char; 4] = ['A', 'C', 'G', 'T'];

pub fn generate_instance(n: usize, alphabet: &[char], seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1: Vec<char> = (0..n)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect();
    let mut s2 = s1.clone();
    s2.shuffle(&mut rng);
    Instance::new(
        s1.into_iter().collect::<String>(),
        s2.into_iter().collect::<String>(),
    )
}

/// File name used for generated instances.
pub fn instance_file_name(n: usize, seed: u64) -> String {
    format!("rand_{n}_{seed}.txt")
}
