//! Deterministic input builders shared by the benchmark targets.

use runmatch_core::codec::rle_encode;
use runmatch_core::process::{generate_bernoulli, generate_markov, sample_rle_prefix};
use runmatch_core::{BernoulliSpec, MarkovSpec, RunSequence, Source, SymbolSequence};

/// Symmetric binary text of `n` symbols.
pub fn binary_text(n: usize, seed: u64) -> SymbolSequence {
    generate_bernoulli(&BernoulliSpec::binary(0.5).unwrap(), n, seed)
}

/// Two-state Markov text with persistent runs (self-loops 0.8 and 0.6).
pub fn sticky_markov_text(n: usize, seed: u64) -> SymbolSequence {
    generate_markov(&MarkovSpec::two_state(0.8, 0.6).unwrap(), n, seed)
}

/// Encoding of symmetric binary text, roughly `n / 2` runs.
pub fn binary_runs(n: usize, seed: u64) -> RunSequence {
    rle_encode(&binary_text(n, seed))
}

/// Exactly `n_runs` settled runs of the symmetric binary source.
pub fn binary_run_prefix(n_runs: usize, seed: u64, stream: u64) -> RunSequence {
    let source = Source::Bernoulli(BernoulliSpec::binary(0.5).unwrap());
    sample_rle_prefix(&source, n_runs, seed, stream, n_runs * 1000).unwrap()
}

/// Strictly positive 5-state transition matrix with uneven rows.
pub fn dense_five_state() -> MarkovSpec {
    let n = 5usize;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let weights: Vec<f64> = (0..n).map(|j| 1.0 + ((i + j) % n) as f64).collect();
            let total: f64 = weights.iter().sum();
            weights.into_iter().map(|w| w / total).collect()
        })
        .collect();
    MarkovSpec::new(vec!['a', 'b', 'c', 'd', 'e'], rows).unwrap()
}
