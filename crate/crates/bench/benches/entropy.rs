use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use runmatch_bench::dense_five_state;
use runmatch_core::entropy::{
    h2_rle_markov_n, h2_rle_truncated, renyi_plugin_estimate, sample_rle_prefixes,
};
use runmatch_core::{BernoulliSpec, MarkovSpec, Source};

fn bench_entropy(c: &mut Criterion) {
    let two_state = MarkovSpec::two_state(0.3, 0.6).unwrap();
    let five_state = dense_five_state();
    let source = Source::Bernoulli(BernoulliSpec::binary(0.5).unwrap());
    let prefixes = sample_rle_prefixes(&source, 4, 2000, 8).unwrap();

    c.bench_function("eigen/two-state", |b| {
        b.iter(|| h2_rle_markov_n(black_box(&two_state)).unwrap())
    });
    c.bench_function("eigen/five-state", |b| {
        b.iter(|| h2_rle_markov_n(black_box(&five_state)).unwrap())
    });
    c.bench_function("truncated/two-state-cap-60", |b| {
        b.iter(|| h2_rle_truncated(black_box(&two_state), black_box(60)).unwrap())
    });
    c.bench_function("plugin/binary-2k-samples", |b| {
        b.iter(|| renyi_plugin_estimate(black_box(&prefixes), black_box(4), black_box(2)).unwrap())
    });
}

criterion_group!(benches, bench_entropy);
criterion_main!(benches);
