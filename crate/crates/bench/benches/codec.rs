use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use runmatch_bench::{binary_text, sticky_markov_text};
use runmatch_core::codec::{encode_prefix_runs, rle_decode, rle_encode};

fn bench_codec(c: &mut Criterion) {
    let short = binary_text(10_000, 1);
    let long = sticky_markov_text(100_000, 2);
    let long_encoded = rle_encode(&long);

    c.bench_function("encode/binary-10k", |b| {
        b.iter(|| rle_encode(black_box(&short)))
    });
    c.bench_function("encode/markov-100k", |b| {
        b.iter(|| rle_encode(black_box(&long)))
    });
    c.bench_function("decode/markov-100k", |b| {
        b.iter(|| rle_decode(black_box(&long_encoded)).unwrap())
    });
    c.bench_function("encode-prefix/markov-100k-first-1k-runs", |b| {
        b.iter(|| encode_prefix_runs(black_box(&long), black_box(1000)).unwrap())
    });
}

criterion_group!(benches, bench_codec);
criterion_main!(benches);
