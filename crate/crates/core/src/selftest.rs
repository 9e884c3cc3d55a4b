//! Seeded property suites over every module, shared by the acceptance tests
//! and `realword selftest`. Reports depend only on the seed and the scale.

use std::collections::HashSet;
use std::fmt;
use std::thread;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{Rat, RatVec};
use crate::britton::{
    bs12, bs12_affine_identity, bs12_rewrite_identities, bs12_words, centralizing_extension,
    hnn_is_identity, HnnStructure, WordOracle,
};
use crate::examples::{sl2_eval, sl2_weil, small_rat, Example, Mat2};
use crate::machine::BssProgram;
use crate::path::PathOp;
use crate::presentation::check_relator;
use crate::reduction::{
    build_w, check_reduction, derived_rationals, emitted_rationals, extension_c,
    l_reachability_check, stable_conjugate, w_membership, Reach, Row,
};
use crate::words::{
    encode_w, free_reduce, multiply_generators, nielsen_decompose, span_decide, Family, GenSym,
    Letter, Sign, Word, SPAN_CAP,
};
use crate::wp::{verify_certificate, wp_semidecide, WpOutcome};
use std::sync::Arc;

pub const SUITES: [&str; 10] = [
    "free-reduction-confluence",
    "nielsen-freeness",
    "britton-oracle",
    "centralizer-membership",
    "certificate-round-trip",
    "operation-table",
    "stable-action-laws",
    "halting-reduction",
    "sl2-relations",
    "constant-hygiene",
];

/// Fuel for words built from relators.
pub const PROVED_FUEL: u64 = 100_000;
/// Fuel for words the oracle refutes.
pub const REFUTED_FUEL: u64 = 5_000;
/// Fuel for both sides of the halting reduction.
pub const REDUCTION_FUEL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Full,
    /// A tenth of the cases.
    Quick,
}

impl Scale {
    fn n(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => full.div_ceil(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub id: usize,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
    /// First failing case, if any.
    pub witness: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:>2} {:<26} {}",
            self.id, self.name, self.detail
        )?;
        if let Some(w) = &self.witness {
            write!(f, " (first failure: {w})")?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    failures: usize,
    witness: Option<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            cases: 0,
            failures: 0,
            witness: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(what());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    fn report(self, id: usize, detail: String) -> SuiteReport {
        SuiteReport {
            id,
            name: SUITES[id - 1],
            cases: self.cases,
            failures: self.failures,
            detail,
            witness: self.witness,
        }
    }
}

fn rng_for(seed: u64, id: usize, part: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((id as u64) << 32) ^ ((part as u64) << 48))
}

pub fn run_all(seed: u64, scale: Scale) -> Vec<SuiteReport> {
    (1..=SUITES.len())
        .map(|id| run_suite(id, seed, scale))
        .collect()
}

/// Runs suite `id` (1-based). Panics on an unknown id.
pub fn run_suite(id: usize, seed: u64, scale: Scale) -> SuiteReport {
    match id {
        1 => confluence(seed, scale),
        2 => nielsen(seed, scale),
        3 => britton_oracle(),
        4 => centralizer(seed, scale),
        5 => certificates(seed, scale),
        6 => operation_table(seed, scale),
        7 => action_laws(seed, scale),
        8 => halting(seed, scale),
        9 => sl2(seed, scale),
        10 => hygiene(seed, scale),
        _ => panic!("no suite {id}"),
    }
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let q = small_rat(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

fn random_vec<R: Rng>(rng: &mut R, dim: usize) -> RatVec {
    RatVec::new((0..dim).map(|_| small_rat(rng)).collect())
}

fn random_vec_upto<R: Rng>(rng: &mut R, max: usize) -> RatVec {
    let dim = rng.gen_range(1..=max);
    random_vec(rng, dim)
}

/// Deletes a randomly chosen cancelling pair until none is left.
fn cancel_randomly<R: Rng>(w: &Word, rng: &mut R) -> Word {
    let mut v = w.0.clone();
    loop {
        let sites: Vec<usize> = (0..v.len().saturating_sub(1))
            .filter(|&k| v[k].cancels(&v[k + 1]))
            .collect();
        match sites.choose(rng) {
            Some(&k) => {
                v.drain(k..k + 2);
            }
            None => return Word(v),
        }
    }
}

fn confluence(seed: u64, scale: Scale) -> SuiteReport {
    let mut rng = rng_for(seed, 1, 0);
    let alphabet: Vec<GenSym> = (0..20)
        .map(|i| GenSym::x(i % 5, Rat::int(i as i64 / 5)))
        .collect();
    let mut t = Tally::new();
    let n = scale.n(10_000);
    for _ in 0..n {
        let len = rng.gen_range(0..=50);
        let w = Word(
            (0..len)
                .map(|_| Letter {
                    gen: alphabet.choose(&mut rng).unwrap().clone(),
                    sign: random_sign(&mut rng),
                })
                .collect(),
        );
        let a = free_reduce(&w);
        let b = cancel_randomly(&w, &mut rng);
        t.check(a == b && a.is_reduced(), || w.to_string());
    }
    t.report(
        1,
        format!("{n} words, stack reduction vs random cancellation order"),
    )
}

/// Two vectors whose patterns never cancel against each other.
fn seam_free_pair<R: Rng>(rng: &mut R) -> (RatVec, RatVec) {
    loop {
        let r = random_vec_upto(rng, 4);
        let s = random_vec_upto(rng, 4);
        if r.dim() != s.dim() || r.entries().last() != s.entries().last() {
            return (r, s);
        }
    }
}

/// Cancels adjacent inverse factors.
fn reduce_factors(fs: &[(Sign, RatVec)]) -> Vec<(Sign, RatVec)> {
    let mut out: Vec<(Sign, RatVec)> = Vec::new();
    for (s, v) in fs {
        if out
            .last()
            .is_some_and(|(ls, lv)| lv == v && *ls == s.flip())
        {
            out.pop();
        } else {
            out.push((*s, v.clone()));
        }
    }
    out
}

fn is_single_pattern(b: &Word) -> bool {
    matches!(nielsen_decompose(b).as_deref(), Some([(Sign::Pos, _)]))
}

fn nielsen(seed: u64, scale: Scale) -> SuiteReport {
    let mut rng = rng_for(seed, 2, 0);
    let mut t = Tally::new();
    let mut spans = 0;
    let n = scale.n(1000);
    for _ in 0..n {
        let (r, s) = seam_free_pair(&mut rng);
        let sep = free_reduce(&encode_w(&r).juxtapose(&encode_w(&s).inverse()));
        t.check(!sep.is_empty(), || format!("{r} vs {s}"));

        let k = rng.gen_range(1..=6);
        let fs: Vec<(Sign, RatVec)> = (0..k)
            .map(|_| {
                (
                    random_sign(&mut rng),
                    if rng.gen_bool(0.5) {
                        r.clone()
                    } else {
                        s.clone()
                    },
                )
            })
            .collect();
        let w = multiply_generators(&fs);
        let expect = reduce_factors(&fs);
        let got = nielsen_decompose(&w);
        t.check(got.as_ref() == Some(&expect), || format!("decompose {w}"));

        let blocks: Vec<Word> = expect
            .iter()
            .map(|(s, v)| {
                if *s == Sign::Pos {
                    encode_w(v)
                } else {
                    encode_w(v).inverse()
                }
            })
            .collect();
        let concat = Word(blocks.iter().flat_map(|b| b.0.iter().cloned()).collect());
        if concat == w && w.len() <= SPAN_CAP {
            spans += 1;
            t.check(span_decide(&w, &is_single_pattern) == Ok(true), || {
                format!("span {w}")
            });
        }

        // a word with one coordinate moved leaves the span
        let xs: Vec<usize> = (0..w.len())
            .filter(|&i| w.0[i].gen.family == Family::X)
            .collect();
        if let Some(&i) = xs.choose(&mut rng) {
            let mut bad = w.clone();
            let (lvl, v) = bad.0[i]
                .gen
                .level_value()
                .map(|(l, v)| (l, v.clone()))
                .unwrap();
            bad.0[i].gen = GenSym::x(lvl, v + Rat::frac(1, 7));
            let bad = free_reduce(&bad);
            let dec = nielsen_decompose(&bad);
            t.check(
                dec.as_ref().is_none_or(|d| multiply_generators(d) == bad),
                || format!("corrupt {bad}"),
            );
            if bad.len() <= SPAN_CAP {
                spans += 1;
                let sd = span_decide(&bad, &is_single_pattern);
                t.check(sd == Ok(dec.is_some()), || format!("span of corrupt {bad}"));
            }
        }
    }
    t.report(2, format!("{n} pairs, {spans} span comparisons"))
}

/// Length bound for the rewriting closure.
pub const REWRITE_BOUND: usize = 10;

fn britton_oracle() -> SuiteReport {
    let h = bs12();
    let ids: HashSet<Word> = bs12_rewrite_identities(8, REWRITE_BOUND)
        .into_iter()
        .collect();
    let mut t = Tally::new();
    let words = bs12_words(8);
    let mut trivial = 0;
    for w in &words {
        let b = hnn_is_identity(&h, w).unwrap_or(!ids.contains(w));
        let affine = bs12_affine_identity(w);
        trivial += usize::from(b);
        t.check(b == ids.contains(w) && b == affine, || w.to_string());
    }
    t.report(
        3,
        format!("{} words of length <= 8, {trivial} trivial", words.len()),
    )
}

/// Membership in `<encode_w(r) : r_1 >= 0>`.
pub fn in_nonneg_span(w: &Word) -> bool {
    nielsen_decompose(w).is_some_and(|fs| {
        fs.iter()
            .all(|(_, r)| r.dim() >= 1 && !r.entries()[0].is_negative())
    })
}

/// `<G; t | t a = a t for a in <encode_w(r) : r_1 >= 0>>` over the free
/// group `G`.
pub fn nonneg_span_centralizer() -> HnnStructure {
    let free: WordOracle = Arc::new(|w| Some(free_reduce(w).is_empty()));
    let member: WordOracle = Arc::new(|w| Some(in_nonneg_span(w)));
    centralizing_extension(free, member, Family::T)
}

fn centralizer(seed: u64, scale: Scale) -> SuiteReport {
    let mut rng = rng_for(seed, 4, 0);
    let h = nonneg_span_centralizer();
    let tw = Word::letter(GenSym::bare(Family::T).pos());
    let mut t = Tally::new();
    let mut members = 0;
    let n = scale.n(200);
    for _ in 0..n {
        let w = match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(0..=4);
                let fs: Vec<(Sign, RatVec)> = (0..k)
                    .map(|_| {
                        let mut v = random_vec_upto(&mut rng, 3);
                        v.0[0] = v.0[0].abs();
                        (random_sign(&mut rng), v)
                    })
                    .collect();
                multiply_generators(&fs)
            }
            1 => {
                let k = rng.gen_range(1..=4);
                let fs: Vec<(Sign, RatVec)> = (0..k)
                    .map(|_| (random_sign(&mut rng), random_vec_upto(&mut rng, 3)))
                    .collect();
                multiply_generators(&fs)
            }
            _ => {
                let len = rng.gen_range(1..=6);
                Word(
                    (0..len)
                        .map(|_| {
                            let g = if rng.gen_bool(0.3) {
                                GenSym::y()
                            } else {
                                GenSym::x(rng.gen_range(1..=2), Rat::int(rng.gen_range(-1..=1)))
                            };
                            Letter {
                                gen: g,
                                sign: random_sign(&mut rng),
                            }
                        })
                        .collect(),
                )
            }
        };
        let comm = tw
            .juxtapose(&w)
            .juxtapose(&tw.inverse())
            .juxtapose(&w.inverse());
        let expected = in_nonneg_span(&w);
        members += usize::from(expected);
        let got = hnn_is_identity(&h, &comm);
        t.check(got == Ok(expected), || w.to_string());
    }
    t.report(4, format!("{n} base words, {members} in the subgroup"))
}

const CORPUS: [Example; 5] = [
    Example::Circle,
    Example::Torus,
    Example::Sl2,
    Example::RationalsA,
    Example::RationalsB,
];

/// Words built from relators must be proved, with a valid certificate.
fn corpus_proved(ex: Example, seed: u64, n: usize) -> Tally {
    let p = ex.presentation();
    let mut rng = rng_for(seed, 5, 2 * ex as usize);
    let mut t = Tally::new();
    for i in 0..n {
        let w = ex.relator_product(&mut rng, 1 + i % 3);
        let ok = match wp_semidecide(&p, &w, PROVED_FUEL) {
            WpOutcome::Proved(c) => verify_certificate(&p, &w, &c) && ex.oracle(&w) == Ok(true),
            WpOutcome::Unknown => false,
        };
        t.check(ok, || format!("{}: {w}", ex.name()));
    }
    t
}

/// Words the oracle refutes must never be proved.
fn corpus_refuted(ex: Example, seed: u64, chunk: usize, n: usize) -> Tally {
    let p = ex.presentation();
    let mut rng = rng_for(seed, 5, 2 * ex as usize + 1 + 64 * chunk);
    let mut t = Tally::new();
    let mut refuted = 0;
    while refuted < n {
        let w = ex.random_word(&mut rng, 1 + refuted % 6);
        if ex.oracle(&w) != Ok(false) {
            continue;
        }
        refuted += 1;
        let out = wp_semidecide(&p, &w, REFUTED_FUEL);
        t.check(out == WpOutcome::Unknown, || {
            format!("{}: proved refuted {w}", ex.name())
        });
    }
    t
}

const REFUTED_CHUNKS: usize = 4;

fn certificates(seed: u64, scale: Scale) -> SuiteReport {
    let n = scale.n(500);
    let tallies: Vec<Tally> = thread::scope(|s| {
        let mut hs = Vec::new();
        for &ex in &CORPUS {
            hs.push(s.spawn(move || corpus_proved(ex, seed, n)));
            for c in 0..REFUTED_CHUNKS {
                let m = n / REFUTED_CHUNKS + usize::from(c < n % REFUTED_CHUNKS);
                hs.push(s.spawn(move || corpus_refuted(ex, seed, c, m)));
            }
        }
        hs.into_iter()
            .map(|h| h.join().expect("corpus thread"))
            .collect()
    });
    let mut t = Tally::new();
    for x in tallies {
        t.merge(x);
    }
    let names: Vec<&str> = CORPUS.iter().map(|e| e.name()).collect();
    t.report(
        5,
        format!("{n} proved at fuel {PROVED_FUEL} and {n} refuted at fuel {REFUTED_FUEL} per example ({})", names.join(", ")),
    )
}

/// Direct arithmetic check of an operation's condition.
fn holds(op: &PathOp, s: &[Rat]) -> bool {
    let r = |i: usize| &s[i - 1];
    match op {
        PathOp::Copy(i, j) => r(*i) == r(*j),
        PathOp::Assign(i, a) => r(*i) == a,
        PathOp::Add(i, j, k) => *r(*i) == r(*j) + r(*k),
        PathOp::Neg(i, j) => *r(*i) == -r(*j),
        PathOp::Mul(i, j, k) => !r(*j).is_zero() && !r(*k).is_zero() && *r(*i) == r(*j) * r(*k),
        PathOp::Inv(i, j) => !r(*j).is_zero() && r(*i) * r(*j) == Rat::one(),
        PathOp::GuardGeq(j) => !r(*j).is_negative(),
        PathOp::GuardLt(j) => r(*j).is_negative(),
    }
}

/// A random operation of `row` with `d = 1`, its `D`, and a point
/// satisfying it.
fn table_instance<R: Rng>(row: Row, rng: &mut R) -> (PathOp, usize, Vec<Rat>) {
    let big_d = rng.gen_range(3..=6);
    let i = rng.gen_range(2..=big_d);
    let other = |rng: &mut R| loop {
        let j = rng.gen_range(1..=big_d);
        if j != i {
            return j;
        }
    };
    let (j, k) = (other(rng), other(rng));
    let mut s: Vec<Rat> = (0..big_d).map(|_| small_rat(rng)).collect();
    let op = match row {
        Row::Copy => {
            s[i - 1] = s[j - 1].clone();
            PathOp::Copy(i, j)
        }
        Row::Const => {
            let a = small_rat(rng);
            s[i - 1] = a.clone();
            PathOp::Assign(i, a)
        }
        Row::Add => {
            s[i - 1] = &s[j - 1] + &s[k - 1];
            PathOp::Add(i, j, k)
        }
        Row::Neg => {
            s[i - 1] = -&s[j - 1];
            PathOp::Neg(i, j)
        }
        Row::Mul => {
            s[j - 1] = nonzero_rat(rng);
            s[k - 1] = nonzero_rat(rng);
            s[i - 1] = &s[j - 1] * &s[k - 1];
            PathOp::Mul(i, j, k)
        }
        Row::Inv => {
            s[j - 1] = nonzero_rat(rng);
            s[i - 1] = s[j - 1].recip().expect("nonzero");
            PathOp::Inv(i, j)
        }
        Row::GuardGeq => {
            s[j - 1] = if rng.gen_bool(0.2) {
                Rat::zero()
            } else {
                s[j - 1].abs()
            };
            PathOp::GuardGeq(j)
        }
        Row::GuardLt => {
            s[j - 1] = -nonzero_rat(rng).abs();
            PathOp::GuardLt(j)
        }
    };
    (op, big_d, s)
}

/// Breaks the condition of `op` at `s`.
fn violate<R: Rng>(op: &PathOp, s: &mut [Rat], rng: &mut R) {
    let bump = Rat::frac(rng.gen_range(1..=5), rng.gen_range(1..=3));
    match op {
        PathOp::GuardGeq(j) => s[j - 1] = -(s[j - 1].abs() + bump),
        PathOp::GuardLt(j) => s[j - 1] = s[j - 1].abs(),
        PathOp::Mul(i, j, _) if rng.gen_bool(0.3) => {
            s[j - 1] = Rat::zero();
            s[i - 1] = Rat::zero();
        }
        PathOp::Inv(i, j) if rng.gen_bool(0.3) => {
            s[j - 1] = Rat::zero();
            s[i - 1] = Rat::zero();
        }
        _ => {
            let i = op.target().expect("non-guard");
            s[i - 1] = &s[i - 1] + &bump;
        }
    }
}

/// Outcome of the coherence check for one row of the operation table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub row: Row,
    pub positive: usize,
    pub violating: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

/// Checks `positive` random instances of `row` that satisfy its condition
/// and `violating` ones that break it: membership in `W_o`, reachability in
/// `L_o` and the condition itself must all agree.
pub fn figure1_row(row: Row, positive: usize, violating: usize, seed: u64) -> RowReport {
    let ri = Row::ALL.iter().position(|r| *r == row).expect("listed row");
    let mut rng = rng_for(seed, 6, ri);
    let mut t = Tally::new();
    for c in 0..positive + violating {
        let (op, big_d, mut s) = table_instance(row, &mut rng);
        let expect = c < positive;
        if !expect {
            violate(&op, &mut s, &mut rng);
        }
        let spec = build_w(&op, 1, big_d).expect("indices fit");
        let w = encode_w(&RatVec::new(s.clone()));
        let reached = matches!(l_reachability_check(&spec, &w, 64), Reach::Reached(_));
        let member = w_membership(&spec, &w);
        let truth = holds(&op, &s);
        t.check(
            truth == expect && member == expect && reached == expect,
            || format!("{op} at {}", RatVec::new(s.clone())),
        );
    }
    RowReport {
        row,
        positive,
        violating,
        failures: t.failures,
        witness: t.witness,
    }
}

fn operation_table(seed: u64, scale: Scale) -> SuiteReport {
    let mut t = Tally::new();
    let (pos, neg) = (scale.n(100), scale.n(20));
    for row in Row::ALL {
        let r = figure1_row(row, pos, neg, seed);
        t.merge(Tally {
            cases: r.positive + r.violating,
            failures: r.failures,
            witness: r.witness.map(|w| format!("{row}: {w}")),
        });
    }
    t.report(
        6,
        format!(
            "{} rows, {pos} positive and {neg} violating instances each",
            Row::ALL.len()
        ),
    )
}

fn random_g_word<R: Rng>(rng: &mut R) -> Word {
    let len = rng.gen_range(0..=10);
    Word(
        (0..len)
            .map(|_| {
                let g = if rng.gen_bool(0.2) {
                    GenSym::y()
                } else {
                    GenSym::x(rng.gen_range(1..=3), small_rat(rng))
                };
                Letter {
                    gen: g,
                    sign: random_sign(rng),
                }
            })
            .collect(),
    )
}

fn action_laws(seed: u64, scale: Scale) -> SuiteReport {
    let mut rng = rng_for(seed, 7, 0);
    let c = extension_c();
    let mut t = Tally::new();
    let n = scale.n(1000);
    let act = |g: &GenSym, w: &Word| stable_conjugate(g, w).expect("nonzero scale");
    for _ in 0..n {
        let w = random_g_word(&mut rng);
        let i = rng.gen_range(1..=3);
        let j = 1 + (i + rng.gen_range(0..2)) % 3;
        let (a, b) = (small_rat(&mut rng), small_rat(&mut rng));
        let (p, q) = (nonzero_rat(&mut rng), nonzero_rat(&mut rng));
        let ctx = || format!("i={i} j={j} a={a} b={b} p={p} q={q} w={w}");

        let lhs = act(&GenSym::a(i, b.clone()), &act(&GenSym::a(i, a.clone()), &w));
        t.check(lhs == act(&GenSym::a(i, &a + &b), &w), ctx);
        let lhs = act(&GenSym::m(i, q.clone()), &act(&GenSym::m(i, p.clone()), &w));
        t.check(lhs == act(&GenSym::m(i, &p * &q), &w), ctx);
        t.check(
            act(&GenSym::a(i, -&a), &act(&GenSym::a(i, a.clone()), &w)) == free_reduce(&w),
            ctx,
        );
        let ab = act(&GenSym::a(j, b.clone()), &act(&GenSym::a(i, a.clone()), &w));
        t.check(
            ab == act(&GenSym::a(i, a.clone()), &act(&GenSym::a(j, b.clone()), &w)),
            ctx,
        );
        let am = act(&GenSym::m(j, q.clone()), &act(&GenSym::a(i, a.clone()), &w));
        t.check(
            am == act(&GenSym::a(i, a.clone()), &act(&GenSym::m(j, q.clone()), &w)),
            ctx,
        );

        let r = random_vec(&mut rng, 3);
        let mut shifted = r.clone();
        shifted.0[i - 1] = &shifted.0[i - 1] + &a;
        t.check(
            act(&GenSym::a(i, a.clone()), &encode_w(&r)) == encode_w(&shifted),
            ctx,
        );

        // the action is the one imposed by the relators of C
        let s = small_rat(&mut rng);
        let rel = |g: GenSym, img: Rat| {
            let x = Word::letter(GenSym::x(i, img).pos());
            let t = Word::letter(g.pos());
            x.juxtapose(&t)
                .juxtapose(&Word::letter(GenSym::x(i, s.clone()).neg()))
                .juxtapose(&t.inverse())
        };
        let img = act(
            &GenSym::a(i, a.clone()),
            &Word::letter(GenSym::x(i, s.clone()).pos()),
        );
        let img_v = img.0[0].gen.index.entries()[1].clone();
        t.check(
            check_relator(&c, &rel(GenSym::a(i, a.clone()), img_v)) == Ok(true),
            ctx,
        );
        let img = act(
            &GenSym::m(i, p.clone()),
            &Word::letter(GenSym::x(i, s.clone()).pos()),
        );
        let img_v = img.0[0].gen.index.entries()[1].clone();
        t.check(
            check_relator(&c, &rel(GenSym::m(i, p.clone()), img_v)) == Ok(true),
            ctx,
        );
    }
    t.report(7, format!("{n} cases, 8 laws each"))
}

/// Halts iff `r1 >= 1`.
pub const SIGN: &str = crate::machine::SIGN_ASM;

/// Three-way sign test of `r1^2 - r1 - 2`: halts iff it is nonzero.
pub const POLY3: &str = "\
1: mul r2 r1 r1
2: sub r2 r2 r1
3: set r3 2
4: sub r0 r2 r3
5: brgeq 8
6: set r0 0
7: brgeq 14
8: sub r0 r3 r2
9: brgeq 12
10: set r0 0
11: brgeq 14
12: set r0 0
13: brgeq 13
14: halt
";

/// Halts iff `0 < r1 <= 1/2`.
pub const RECIP: &str = "\
1: set r2 1
2: div r3 r2 r1
3: set r4 -2
4: add r0 r3 r4
5: brgeq 8
6: set r0 0
7: brgeq 7
8: halt
";

/// Counts `r1` down by one; halts iff `r1` is a natural number.
pub const COUNT: &str = "\
1: set r2 -1
2: add r1 r1 r2
3: add r0 r1 r3
4: brgeq 2
5: set r4 1
6: add r0 r1 r4
7: brgeq 10
8: set r0 0
9: brgeq 9
10: sub r0 r3 r0
11: brgeq 14
12: set r0 0
13: brgeq 9
14: halt
";

/// Halts iff `r1 >= r2`. Uses no constants.
pub const GE: &str = "\
1: sub r0 r1 r2
2: brgeq 5
3: sub r0 r1 r1
4: brgeq 4
5: halt
";

/// Halts iff `r1 r2 >= r3`. Uses no constants.
pub const MULGE: &str = "\
1: mul r4 r1 r2
2: sub r0 r4 r3
3: brgeq 6
4: sub r0 r1 r1
5: brgeq 5
6: halt
";

/// Halts iff `r2 != 0` and `r1 / r2 >= r2`. Uses no constants.
pub const DIVGE: &str = "\
1: div r3 r1 r2
2: sub r0 r3 r2
3: brgeq 6
4: sub r0 r1 r1
5: brgeq 5
6: halt
";

/// `(name, input dimension, assembly)` of the reference programs.
pub const PROGRAMS: [(&str, usize, &str); 7] = [
    ("sign", 1, SIGN),
    ("poly3", 1, POLY3),
    ("recip", 1, RECIP),
    ("count", 1, COUNT),
    ("ge", 2, GE),
    ("mulge", 3, MULGE),
    ("divge", 2, DIVGE),
];

pub fn program(name: &str) -> Option<BssProgram> {
    PROGRAMS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| BssProgram::parse(p.2).expect("reference program parses"))
}

fn random_input<R: Rng>(rng: &mut R, dim: usize) -> RatVec {
    RatVec::new(
        (0..dim)
            .map(|_| match rng.gen_range(0..5) {
                0 => Rat::int(rng.gen_range(-3..=40)),
                1 => Rat::zero(),
                2 => Rat::frac(1, rng.gen_range(1..=8)),
                _ => small_rat(rng),
            })
            .collect(),
    )
}

fn halting(seed: u64, scale: Scale) -> SuiteReport {
    let n = scale.n(200);
    let tallies: Vec<(Tally, usize)> = thread::scope(|s| {
        let hs: Vec<_> = PROGRAMS
            .iter()
            .enumerate()
            .map(|(pi, &(name, dim, asm))| {
                s.spawn(move || {
                    let prog = BssProgram::parse(asm).expect("reference program parses");
                    let mut rng = rng_for(seed, 8, pi);
                    let inputs: Vec<RatVec> = (0..n).map(|_| random_input(&mut rng, dim)).collect();
                    let rep = check_reduction(&prog, &inputs, REDUCTION_FUEL);
                    let mut t = Tally::new();
                    let mut halted = 0;
                    for r in &rep.records {
                        halted += usize::from(r.simulated == crate::reduction::Simulated::Halt);
                        t.check(r.agree, || format!("{name} on {}", r.input));
                    }
                    (t, halted)
                })
            })
            .collect();
        hs.into_iter()
            .map(|h| h.join().expect("reduction thread"))
            .collect()
    });
    let mut t = Tally::new();
    let (mut halted, mut total) = (0, 0);
    for (x, h) in tallies {
        total += x.cases;
        t.merge(x);
        halted += h;
    }
    t.check(halted > 0 && halted < total, || {
        format!("{halted} of {total} inputs halt")
    });
    t.report(
        8,
        format!(
            "{} programs x {n} inputs at fuel {REDUCTION_FUEL}, {halted} halting",
            PROGRAMS.len()
        ),
    )
}

/// `S(a) = V U(1/a) V U(a) V U(1/a)` by direct matrix products.
fn s_matrix(a: &Rat) -> Mat2 {
    let ia = a.recip().expect("nonzero");
    let v = Mat2::v();
    v.mul(&Mat2::u(&ia))
        .mul(&v)
        .mul(&Mat2::u(a))
        .mul(&v)
        .mul(&Mat2::u(&ia))
}

fn sl2(seed: u64, scale: Scale) -> SuiteReport {
    let mut rng = rng_for(seed, 9, 0);
    let p = sl2_weil();
    let mut t = Tally::new();
    let n = scale.n(100);
    let mut words = 0;
    for _ in 0..n {
        let (a, b) = (nonzero_rat(&mut rng), nonzero_rat(&mut rng));
        let c = small_rat(&mut rng);
        let params: [Vec<Rat>; 4] = [
            vec![a.clone(), c.clone()],
            vec![a.clone(), b.clone()],
            vec![],
            vec![a.clone(), c.clone()],
        ];
        for (schema, ps) in p.relators.iter().zip(params) {
            let w = schema
                .instance(&ps)
                .expect("parameters satisfy the constraint");
            let m = sl2_eval(&w).expect("well formed");
            t.check(m == Mat2::identity() && m.det() == Rat::one(), || {
                format!("{} {w}", schema.name)
            });
        }
        // the same laws on matrices built directly
        let s = |x: &Rat| s_matrix(x);
        t.check(Mat2::u(&a).mul(&Mat2::u(&c)) == Mat2::u(&(&a + &c)), || {
            format!("U({a})U({c})")
        });
        t.check(s(&a).mul(&s(&b)) == s(&(&a * &b)), || {
            format!("S({a})S({b})")
        });
        let lhs = s(&a)
            .mul(&Mat2::u(&c))
            .mul(&s(&a.recip().expect("nonzero")));
        t.check(lhs == Mat2::u(&(&c * &a * a.clone())), || {
            format!("S({a})U({c})S(1/{a})")
        });
        let v2 = Mat2::v().mul(&Mat2::v());
        t.check(v2 == s(&-Rat::one()), || "V^2".into());

        let len = rng.gen_range(0..=12);
        let w = Example::Sl2.random_word(&mut rng, len);
        words += 1;
        t.check(sl2_eval(&w).map(|m| m.det()) == Ok(Rat::one()), || {
            format!("det {w}")
        });
    }
    t.report(
        9,
        format!("{n} parameter draws over 4 relation families, {words} random words"),
    )
}

fn hygiene(seed: u64, scale: Scale) -> SuiteReport {
    let mut t = Tally::new();
    let n = scale.n(200);
    let mut scanned = 0;
    for (pi, &(name, dim, asm)) in PROGRAMS.iter().enumerate() {
        let prog = BssProgram::parse(asm).expect("reference program parses");
        if prog.constants().iter().any(|c| !c.is_zero()) {
            continue;
        }
        let mut rng = rng_for(seed, 10, pi);
        for _ in 0..n {
            let r = random_input(&mut rng, dim);
            let emitted = emitted_rationals(&prog, &r, REDUCTION_FUEL);
            let allowed = derived_rationals(&prog, &r, REDUCTION_FUEL);
            scanned += emitted.len();
            let stray: Vec<String> = emitted
                .difference(&allowed)
                .map(|q| q.to_string())
                .collect();
            t.check(stray.is_empty(), || {
                format!("{name} on {r}: {}", stray.join(", "))
            });
        }
    }
    // the scan does see constants when a program has them
    let poly = BssProgram::parse(POLY3).expect("reference program parses");
    let r = RatVec::new(vec![Rat::frac(7, 3)]);
    t.check(
        emitted_rationals(&poly, &r, REDUCTION_FUEL).contains(&Rat::int(2)),
        || "poly3 constant missed".into(),
    );
    t.report(
        10,
        format!("constant-free programs x {n} inputs, {scanned} rationals scanned"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run_quiet, RunOutcome};

    fn halts(name: &str, input: &[Rat]) -> bool {
        matches!(
            run_quiet(
                &program(name).unwrap(),
                &RatVec::new(input.to_vec()),
                10_000
            ),
            RunOutcome::Halted { .. }
        )
    }

    #[test]
    fn reference_programs_behave() {
        let i = |n: i64| Rat::int(n);
        assert!(halts("poly3", &[i(0)]) && halts("poly3", &[i(3)]));
        assert!(!halts("poly3", &[i(2)]) && !halts("poly3", &[i(-1)]));
        assert!(
            halts("recip", &[Rat::frac(1, 2)])
                && !halts("recip", &[i(1)])
                && !halts("recip", &[i(0)])
        );
        assert!(halts("count", &[i(0)]) && halts("count", &[i(7)]));
        assert!(!halts("count", &[Rat::frac(7, 2)]) && !halts("count", &[i(-3)]));
        assert!(halts("ge", &[i(2), i(2)]) && !halts("ge", &[i(1), i(2)]));
        assert!(halts("mulge", &[i(2), i(3), i(6)]) && !halts("mulge", &[i(2), i(3), i(7)]));
        assert!(
            halts("divge", &[i(8), i(2)])
                && !halts("divge", &[i(1), i(0)])
                && !halts("divge", &[i(1), i(2)])
        );
    }

    #[test]
    fn quick_suites_pass_and_repeat() {
        for id in [1, 2, 4, 6, 7, 9, 10] {
            let a = run_suite(id, 3, Scale::Quick);
            assert!(a.passed(), "{a}");
            assert_eq!(a, run_suite(id, 3, Scale::Quick));
        }
    }

    #[test]
    fn bumped_coordinate_breaks_each_row() {
        let mut rng = rng_for(0, 0, 0);
        for row in Row::ALL {
            for _ in 0..20 {
                let (op, _, mut s) = table_instance(row, &mut rng);
                assert!(holds(&op, &s));
                violate(&op, &mut s, &mut rng);
                assert!(!holds(&op, &s), "{op}");
            }
        }
    }
}
