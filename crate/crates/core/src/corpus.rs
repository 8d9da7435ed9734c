//! Seeded random subgroups for bulk checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusConfig {
    pub count: usize,
    pub rank_min: usize,
    pub rank_max: usize,
    pub gens_min: usize,
    pub gens_max: usize,
    /// Generators are reduced words of length `1..=len_max`.
    pub len_max: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            count: 100,
            rank_min: 2,
            rank_max: 4,
            gens_min: 1,
            gens_max: 3,
            len_max: 6,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub rank: usize,
    pub generators: Vec<Word>,
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word<R: Rng>(rng: &mut R, alphabet: Alphabet, len: usize) -> Word {
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = letters[rng.gen_range(0..letters.len())];
        if out.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        out.push(l);
    }
    Word::reduced(out)
}

pub fn random_corpus(config: &CorpusConfig) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.count)
        .map(|_| {
            let rank = rng.gen_range(config.rank_min..=config.rank_max);
            let alphabet = Alphabet::new(rank).expect("corpus ranks are positive");
            let gens = rng.gen_range(config.gens_min..=config.gens_max);
            let generators = (0..gens)
                .map(|_| {
                    let len = rng.gen_range(1..=config.len_max.max(1));
                    random_word(&mut rng, alphabet, len)
                })
                .collect();
            CorpusEntry { rank, generators }
        })
        .collect()
}
