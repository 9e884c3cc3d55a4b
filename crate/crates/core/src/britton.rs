//! HNN extensions decided by pinch elimination, and a sufficient test for
//! non-triviality in amalgamated free products.
//!
//! Orientation: a stable letter `t` acts by `t^-1 g t = phi(g)` for
//! `g` in `A`, so `B = phi(A)`. A pinch is `t^-1 g t` with `g` in `A`, or
//! `t g t^-1` with `g` in `B`; the first is replaced by `phi(g)`, the second
//! by `phi^-1(g)`. Extensions written as `t v t^-1 = phi'(v)` fit with
//! `A = phi'(V)` and `phi = phi'^-1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::Rat;
use crate::words::{free_reduce, product, Family, GenSym, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnnError {
    #[error("oracle undefined on {0}")]
    OracleUndefined(String),
}

pub type WordOracle = Arc<dyn Fn(&Word) -> Option<bool> + Send + Sync>;
pub type StableOracle = Arc<dyn Fn(&GenSym, &Word) -> Option<bool> + Send + Sync>;
pub type StableMap = Arc<dyn Fn(&GenSym, &Word) -> Option<Word> + Send + Sync>;

/// Every letter of `family` is a stable letter; the callbacks receive the
/// stable letter and a base word.
#[derive(Clone)]
pub struct StableFamily {
    pub family: Family,
    pub member_a: StableOracle,
    pub member_b: StableOracle,
    pub phi: StableMap,
    pub phi_inv: StableMap,
}

#[derive(Clone)]
pub struct HnnStructure {
    pub base_identity: WordOracle,
    pub families: Vec<StableFamily>,
}

impl fmt::Debug for HnnStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fams: Vec<&str> = self.families.iter().map(|s| s.family.name()).collect();
        write!(f, "HnnStructure {{ stable: {fams:?} }}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinchKind {
    NegPosWithA,
    PosNegWithB,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinchSite {
    pub start: usize,
    pub end: usize,
    pub kind: PinchKind,
    pub stable: GenSym,
}

impl HnnStructure {
    fn family(&self, g: &GenSym) -> Option<&StableFamily> {
        self.families.iter().find(|s| s.family == g.family)
    }

    pub fn is_stable(&self, g: &GenSym) -> bool {
        self.family(g).is_some()
    }

    pub fn stable_count(&self, w: &Word) -> usize {
        w.letters()
            .iter()
            .filter(|l| self.is_stable(&l.gen))
            .count()
    }
}

fn undefined(w: &Word) -> HnnError {
    HnnError::OracleUndefined(w.to_string())
}

pub fn find_pinch(h: &HnnStructure, w: &Word) -> Result<Option<PinchSite>, HnnError> {
    let stable: Vec<usize> = (0..w.len())
        .filter(|&i| h.is_stable(&w.letters()[i].gen))
        .collect();
    for pair in stable.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let (l, r) = (&w.letters()[i], &w.letters()[j]);
        if l.gen != r.gen || l.sign == r.sign {
            continue;
        }
        let fam = h.family(&l.gen).expect("stable");
        let g = w.slice(i + 1, j);
        let (kind, member) = match l.sign {
            Sign::Neg => (PinchKind::NegPosWithA, (fam.member_a)(&l.gen, &g)),
            Sign::Pos => (PinchKind::PosNegWithB, (fam.member_b)(&l.gen, &g)),
        };
        match member {
            None => return Err(undefined(&g)),
            Some(true) => {
                return Ok(Some(PinchSite {
                    start: i,
                    end: j + 1,
                    kind,
                    stable: l.gen.clone(),
                }))
            }
            Some(false) => {}
        }
    }
    Ok(None)
}

/// Pinch elimination to a pinch-free word, with the number of steps.
pub fn britton_reduce_counted(h: &HnnStructure, w: &Word) -> Result<(Word, usize), HnnError> {
    let mut w = free_reduce(w);
    let mut steps = 0;
    while let Some(site) = find_pinch(h, &w)? {
        let fam = h.family(&site.stable).expect("stable");
        let g = w.slice(site.start + 1, site.end - 1);
        let image = match site.kind {
            PinchKind::NegPosWithA => (fam.phi)(&site.stable, &g),
            PinchKind::PosNegWithB => (fam.phi_inv)(&site.stable, &g),
        }
        .ok_or_else(|| undefined(&g))?;
        w = product([&w.slice(0, site.start), &image, &w.slice(site.end, w.len())]);
        steps += 1;
    }
    Ok((w, steps))
}

pub fn britton_reduce(h: &HnnStructure, w: &Word) -> Result<Word, HnnError> {
    britton_reduce_counted(h, w).map(|(w, _)| w)
}

pub fn hnn_is_identity(h: &HnnStructure, w: &Word) -> Result<bool, HnnError> {
    let r = britton_reduce(h, w)?;
    if h.stable_count(&r) > 0 {
        return Ok(false);
    }
    (h.base_identity)(&r).ok_or_else(|| undefined(&r))
}

/// The extension `<G; t | t g = g t for g in A>` with `A` given by
/// `member`.
pub fn centralizing_extension(
    base_identity: WordOracle,
    member: WordOracle,
    stable: Family,
) -> HnnStructure {
    let m = member.clone();
    let member_t: StableOracle = Arc::new(move |_, g| m(g));
    let id: StableMap = Arc::new(|_, g| Some(g.clone()));
    HnnStructure {
        base_identity,
        families: vec![StableFamily {
            family: stable,
            member_a: member_t.clone(),
            member_b: member_t,
            phi: id.clone(),
            phi_inv: id,
        }],
    }
}

fn a_power(w: &Word) -> Option<i64> {
    w.letters()
        .iter()
        .all(|l| l.gen == GenSym::bare(Family::A))
        .then(|| w.exponent_sum(Family::A))
}

fn a_word(k: i64) -> Word {
    Word::letter(GenSym::bare(Family::A).pos()).power(k)
}

/// `<a; t | t a t^-1 = a^2>` over base `<a>`: `A = <a^2>`, `B = <a>`,
/// `phi(a^2k) = a^k`.
pub fn bs12() -> HnnStructure {
    HnnStructure {
        base_identity: Arc::new(|w| a_power(w).map(|k| k == 0)),
        families: vec![StableFamily {
            family: Family::T,
            member_a: Arc::new(|_, g| a_power(g).map(|k| k % 2 == 0)),
            member_b: Arc::new(|_, g| a_power(g).map(|_| true)),
            phi: Arc::new(|_, g| a_power(g).filter(|k| k % 2 == 0).map(|k| a_word(k / 2))),
            phi_inv: Arc::new(|_, g| a_power(g).map(|k| a_word(2 * k))),
        }],
    }
}

/// Identity test in the affine representation `a: x -> x + 1`,
/// `t: x -> 2x`, which is faithful for the group of [`bs12`].
pub fn bs12_affine_identity(w: &Word) -> bool {
    // x -> scale * x + shift
    let (mut scale, mut shift) = (Rat::one(), Rat::zero());
    for l in w.letters() {
        let (s, b) = match (l.gen.family, l.sign) {
            (Family::A, Sign::Pos) => (Rat::one(), Rat::one()),
            (Family::A, Sign::Neg) => (Rat::one(), -Rat::one()),
            (Family::T, Sign::Pos) => (Rat::int(2), Rat::zero()),
            (Family::T, Sign::Neg) => (Rat::frac(1, 2), Rat::zero()),
            _ => panic!("letter {l} outside <a, t>"),
        };
        shift = &scale * &b + shift;
        scale = &scale * &s;
    }
    scale == Rat::one() && shift.is_zero()
}

const BS_LETTERS: [(Family, Sign); 4] = [
    (Family::A, Sign::Pos),
    (Family::A, Sign::Neg),
    (Family::T, Sign::Pos),
    (Family::T, Sign::Neg),
];

fn bs_inv(c: u8) -> u8 {
    c ^ 1
}

fn bs_reduce(v: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(v.len());
    for &c in v {
        if out.last() == Some(&bs_inv(c)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

fn bs_decode(v: &[u8]) -> Word {
    Word(
        v.iter()
            .map(|&c| {
                let (f, s) = BS_LETTERS[c as usize];
                Letter {
                    gen: GenSym::bare(f),
                    sign: s,
                }
            })
            .collect(),
    )
}

/// Every freely reduced word over `a^±1, t^±1` of length at most `n`.
pub fn bs12_words(n: usize) -> Vec<Word> {
    bs_codes(n).iter().map(|v| bs_decode(v)).collect()
}

fn bs_codes(n: usize) -> Vec<Vec<u8>> {
    let mut all = vec![vec![]];
    let mut layer: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &layer {
            for c in 0u8..4 {
                if v.last() != Some(&bs_inv(c)) {
                    let mut u = v.clone();
                    u.push(c);
                    next.push(u);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

/// Trivial words of length at most `n` found by closing all freely reduced
/// words of length at most `bound` under single relator moves (replacing a
/// prefix of a cyclic rotation of `(t a t^-1 a^-2)^±1` by the inverse of the
/// rest). Sound; complete for `n` once `bound` admits the needed detours.
pub fn bs12_rewrite_identities(n: usize, bound: usize) -> Vec<Word> {
    let rel: [u8; 5] = [2, 0, 3, 1, 1];
    let inv: Vec<u8> = rel.iter().rev().map(|&c| bs_inv(c)).collect();
    let mut rots: Vec<Vec<u8>> = Vec::new();
    for r in [rel.to_vec(), inv] {
        for k in 0..r.len() {
            let mut v = r[k..].to_vec();
            v.extend_from_slice(&r[..k]);
            rots.push(v);
        }
    }
    let words = bs_codes(bound);
    let index: HashMap<Vec<u8>, u32> = words
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i as u32))
        .collect();
    let mut parent: Vec<u32> = (0..words.len() as u32).collect();
    for (i, u) in words.iter().enumerate() {
        for j in 0..u.len() {
            for r in &rots {
                let m = r.iter().zip(&u[j..]).take_while(|(a, b)| a == b).count();
                for q in 1..=m {
                    let mut v = u[..j].to_vec();
                    v.extend(r[q..].iter().rev().map(|&c| bs_inv(c)));
                    v.extend_from_slice(&u[j + q..]);
                    let v = bs_reduce(&v);
                    if let Some(&k) = index.get(&v) {
                        let (a, b) = (find(&mut parent, i as u32), find(&mut parent, k));
                        if a != b {
                            parent[a.max(b) as usize] = a.min(b);
                        }
                    }
                }
            }
        }
    }
    let root = find(&mut parent, 0);
    words
        .iter()
        .enumerate()
        .filter(|(i, v)| v.len() <= n && find(&mut parent, *i as u32) == root)
        .map(|(_, v)| bs_decode(v))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Oracles for the two factors of an amalgam, indexed by [`Side`].
#[derive(Clone)]
pub struct AmalgamOracles {
    pub identity: [WordOracle; 2],
    /// Membership in the amalgamated subgroup (`A` on the left, `B` on the
    /// right).
    pub in_subgroup: [WordOracle; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmalgamVerdict {
    Certified,
    Inconclusive,
}

fn side_ix(s: Side) -> usize {
    match s {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Certifies `c_1 ... c_n != 1` when the sequence has normal-form shape.
pub fn amalgam_nontrivial(seq: &[(Side, Word)], o: &AmalgamOracles) -> AmalgamVerdict {
    use AmalgamVerdict::*;
    if seq.is_empty() || seq.windows(2).any(|p| p[0].0 == p[1].0) {
        return Inconclusive;
    }
    if let [(side, c)] = seq {
        return match (o.identity[side_ix(*side)])(c) {
            Some(false) => Certified,
            _ => Inconclusive,
        };
    }
    let outside = seq
        .iter()
        .all(|(s, c)| (o.in_subgroup[side_ix(*s)])(c) == Some(false));
    if outside {
        Certified
    } else {
        Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn pinch_sites() {
        let h = bs12();
        let site = find_pinch(&h, &w("t . a . t^-1")).unwrap().unwrap();
        assert_eq!(
            (site.start, site.end, site.kind),
            (0, 3, PinchKind::PosNegWithB)
        );
        assert_eq!(find_pinch(&h, &w("a . a")).unwrap(), None);
        assert_eq!(find_pinch(&h, &w("t . a . t")).unwrap(), None);
        assert_eq!(find_pinch(&h, &w("t^-1 . a . t")).unwrap(), None);
        let site = find_pinch(&h, &w("t^-1 . a . a . t")).unwrap().unwrap();
        assert_eq!(site.kind, PinchKind::NegPosWithA);
    }

    #[test]
    fn reductions() {
        let h = bs12();
        assert_eq!(
            britton_reduce(&h, &w("t . a . t^-1 . a^-1 . a^-1")).unwrap(),
            Word::empty()
        );
        assert_eq!(britton_reduce(&h, &w("a . a^-1 . a")).unwrap(), w("a"));
        assert_eq!(
            britton_reduce(&h, &w("t . a . a . t^-1")).unwrap(),
            w("a . a . a . a")
        );
        assert!(hnn_is_identity(&h, &Word::empty()).unwrap());
        assert!(!hnn_is_identity(&h, &w("t . a . t^-1 . a^-1")).unwrap());
    }

    #[test]
    fn affine_representation_respects_relation() {
        assert!(bs12_affine_identity(&w("t . a . t^-1 . a^-1 . a^-1")));
        assert!(!bs12_affine_identity(&w("t . a . t^-1 . a^-1")));
        assert!(bs12_affine_identity(&Word::empty()));
    }

    #[test]
    fn britton_matches_affine_and_rewriting_on_short_words() {
        let h = bs12();
        let words = bs12_words(6);
        let found: std::collections::HashSet<Word> =
            bs12_rewrite_identities(6, 9).into_iter().collect();
        for x in &words {
            let (r, steps) = britton_reduce_counted(&h, x).unwrap();
            assert!(2 * steps <= h.stable_count(x));
            assert_eq!(find_pinch(&h, &r).unwrap(), None);
            let b = hnn_is_identity(&h, x).unwrap();
            assert_eq!(b, bs12_affine_identity(x), "{x}");
            assert_eq!(b, found.contains(x), "{x}");
        }
    }

    #[test]
    fn undefined_oracles_propagate() {
        let h = bs12();
        assert!(matches!(
            find_pinch(&h, &w("t . y . t^-1")),
            Err(HnnError::OracleUndefined(_))
        ));
        assert!(hnn_is_identity(&h, &w("y")).is_err());
    }

    #[test]
    fn commutators_in_centralizing_extension() {
        let base: WordOracle = Arc::new(|w| Some(free_reduce(w).is_empty()));
        let even: WordOracle = Arc::new(|w| Some(w.exponent_sum(Family::X) % 2 == 0));
        let h = centralizing_extension(base, even, Family::T);
        let comm = |g: &str| {
            let g = w(g);
            product([&w("t"), &g, &w("t^-1"), &g.inverse()])
        };
        assert!(hnn_is_identity(&h, &comm("x(1) . x(2)")).unwrap());
        assert!(!hnn_is_identity(&h, &comm("x(1) . x(2) . x(1)")).unwrap());
        assert!(!hnn_is_identity(&h, &w("x(1)")).unwrap());
    }

    fn trefoil() -> AmalgamOracles {
        // <x> *_{x^2 = y^3} <y>
        let ex = |f: Family| move |w: &Word| w.exponent_sum(f);
        let (xs, ys) = (ex(Family::X), ex(Family::Y));
        AmalgamOracles {
            identity: [
                Arc::new(move |w| Some(xs(w) == 0)),
                Arc::new(move |w| Some(ys(w) == 0)),
            ],
            in_subgroup: [
                Arc::new(move |w| Some(xs(w) % 2 == 0)),
                Arc::new(move |w| Some(ys(w) % 3 == 0)),
            ],
        }
    }

    #[test]
    fn normal_form_certificates() {
        let o = trefoil();
        let x = |k| Word::letter(GenSym::bare(Family::X).pos()).power(k);
        let y = |k| Word::letter(GenSym::y().pos()).power(k);
        use AmalgamVerdict::*;
        assert_eq!(amalgam_nontrivial(&[(Side::Left, x(1))], &o), Certified);
        assert_eq!(amalgam_nontrivial(&[(Side::Left, x(0))], &o), Inconclusive);
        assert_eq!(
            amalgam_nontrivial(&[(Side::Left, x(1)), (Side::Right, y(1))], &o),
            Certified
        );
        assert_eq!(
            amalgam_nontrivial(&[(Side::Left, x(1)), (Side::Left, x(1))], &o),
            Inconclusive
        );
        assert_eq!(
            amalgam_nontrivial(&[(Side::Left, x(2)), (Side::Right, y(1))], &o),
            Inconclusive
        );
        assert_eq!(amalgam_nontrivial(&[], &o), Inconclusive);
    }
}
