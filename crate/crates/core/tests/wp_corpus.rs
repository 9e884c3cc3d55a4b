use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realword_core::examples::{qgroup_normalize, Example};
use realword_core::words::Word;
use realword_core::wp::{verify_certificate, wp_semidecide, WpOutcome};
use realword_core::Rat;

#[test]
fn relator_products_are_proved() {
    for ex in Example::ALL {
        let p = ex.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..60 {
            let w = ex.relator_product(&mut rng, 1 + i % 3);
            match wp_semidecide(&p, &w, 100_000) {
                WpOutcome::Proved(c) => {
                    assert!(verify_certificate(&p, &w, &c), "{}: {w}", ex.name())
                }
                WpOutcome::Unknown => panic!("{}: not proved {w}", ex.name()),
            }
            assert_eq!(ex.oracle(&w), Ok(true));
        }
    }
}

#[test]
fn refuted_words_stay_unknown() {
    for ex in Example::ALL {
        let p = ex.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut n = 0;
        while n < 30 {
            let w = ex.random_word(&mut rng, 1 + n % 6);
            if ex.oracle(&w) != Ok(false) {
                continue;
            }
            n += 1;
            assert_eq!(wp_semidecide(&p, &w, 5_000), WpOutcome::Unknown, "{w}");
        }
    }
}

#[test]
fn qgroup_chains_replay() {
    let p = Example::QGroup.presentation();
    for (num, den) in [(5, 3), (0, 1), (-7, 2), (9, 4)] {
        let r = Rat::frac(num, den);
        let (_, cert) = qgroup_normalize(&r);
        let word: Word = format!("x({r}) . x(0)^-1").parse().unwrap();
        assert!(verify_certificate(&p, &word, &cert), "{r}");
    }
}
