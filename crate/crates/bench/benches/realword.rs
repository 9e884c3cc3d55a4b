use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realword_core::britton::{britton_reduce, bs12, bs12_words};
use realword_core::examples::{circle, torus};
use realword_core::machine::run;
use realword_core::path::enumerate_paths;
use realword_core::reduction::check_reduction;
use realword_core::selftest::program;
use realword_core::words::{free_reduce, Word};
use realword_core::{Rat, RatVec};

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let text: Vec<String> = (0..len)
        .map(|_| {
            let i = rng.gen_range(0..4);
            let e = if rng.gen_bool(0.5) { "" } else { "^-1" };
            format!("x({i}){e}")
        })
        .collect();
    text.join(" . ").parse().unwrap()
}

fn words(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let long = random_word(&mut rng, 2000);
    c.bench_function("free_reduce/2000", |b| {
        b.iter(|| free_reduce(black_box(&long)))
    });

    let h = bs12();
    let pool: Vec<Word> = bs12_words(6).into_iter().skip(1000).take(200).collect();
    c.bench_function("britton_reduce/bs12 x200", |b| {
        b.iter(|| {
            pool.iter()
                .filter(|w| britton_reduce(&h, w).is_ok())
                .count()
        })
    });
}

fn word_problem(c: &mut Criterion) {
    let t = torus();
    let w: Word = "x(1/3) . x(1/4) . x(5/12)".parse().unwrap();
    c.bench_function("wp/torus 3 letters", |b| {
        b.iter(|| realword_core::wp::wp_semidecide(&t, black_box(&w), 100_000))
    });
    let ci = circle();
    let w: Word = "x(3,4) . x(6,8)^-1".parse().unwrap();
    c.bench_function("wp/circle 2 letters", |b| {
        b.iter(|| realword_core::wp::wp_semidecide(&ci, black_box(&w), 100_000))
    });
}

fn machines(c: &mut Criterion) {
    let count = program("count").unwrap();
    let input = RatVec::new(vec![Rat::int(200)]);
    c.bench_function("run/count 200", |b| {
        b.iter(|| run(&count, black_box(&input), 1_000_000))
    });

    let sign = program("sign").unwrap();
    c.bench_function("enumerate_paths/sign 0..200", |b| {
        b.iter(|| {
            (0u32..200)
                .filter_map(|n| enumerate_paths(&sign, &BigUint::from(n)))
                .count()
        })
    });

    let recip = program("recip").unwrap();
    let inputs: Vec<RatVec> = (1..=8)
        .map(|q| RatVec::new(vec![Rat::frac(1, q)]))
        .collect();
    c.bench_function("check_reduction/recip x8", |b| {
        b.iter(|| check_reduction(&recip, black_box(&inputs), 10_000))
    });
}

criterion_group!(benches, words, word_problem, machines);
criterion_main!(benches);
