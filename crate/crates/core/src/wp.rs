//! Semi-decision of the word problem by searching for a product of
//! conjugated relators that freely reduces to the given word.
//!
//! The search rewrites a residual word `u`, starting from `w`. A move
//! overlays a cyclic rotation of some relator instance `R^±1` on a segment
//! of `u` and replaces the segment by the inverse of the rest of the
//! rotation; each move contributes one conjugate `c R^±1 c^-1` to the
//! certificate, and the search succeeds when the residual becomes empty.
//! Every hit is replayed through [`verify_certificate`] before it is
//! reported.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_rationals, Rat, RatVec};
use crate::predicate::Expr;
use crate::presentation::{bind_prefix, check_word, solve_affine, LetterTemplate, Presentation};
use crate::words::{free_reduce, product, GenSym, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertEntry {
    pub conjugator: Word,
    pub relator: Word,
    pub schema: usize,
    pub params: RatVec,
    /// The factor is `c R^-1 c^-1` rather than `c R c^-1`.
    #[serde(default)]
    pub inverse: bool,
}

impl CertEntry {
    pub fn factor(&self) -> Word {
        let r = if self.inverse {
            self.relator.inverse()
        } else {
            self.relator.clone()
        };
        self.conjugator
            .juxtapose(&r)
            .juxtapose(&self.conjugator.inverse())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Certificate {
    pub entries: Vec<CertEntry>,
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn product(&self) -> Word {
        let factors: Vec<Word> = self.entries.iter().map(CertEntry::factor).collect();
        product(&factors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WpOutcome {
    Proved(Certificate),
    Unknown,
}

impl WpOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, WpOutcome::Proved(_))
    }
}

pub fn verify_certificate(p: &Presentation, w: &Word, c: &Certificate) -> bool {
    for e in &c.entries {
        let Some(schema) = p.relators.get(e.schema) else {
            return false;
        };
        if e.params.dim() != schema.arity || !schema.constraint.eval(e.params.entries()) {
            return false;
        }
        if schema.instantiate(e.params.entries()).as_ref() != Some(&e.relator) {
            return false;
        }
        if !matches!(check_word(p, &e.relator), Ok(true))
            || !matches!(check_word(p, &e.conjugator), Ok(true))
        {
            return false;
        }
    }
    c.product() == free_reduce(w)
}

/// Candidate budget of each search stage; stage boundaries do not depend on
/// the caller's fuel, so a larger fuel replays the same search further.
const STAGE_BUDGET: [u64; 4] = [4_000, 16_000, 64_000, 256_000];

struct Stage {
    /// Free parameters may be filled from word letters and the pool.
    pool: bool,
    /// Most pool combinations tried per match.
    combos: usize,
    /// Rotations may be inserted without overlapping the residual.
    insert: bool,
    /// Insertions may be wrapped in a one-letter conjugator.
    wrap: bool,
}

const STAGES: [Stage; 4] = [
    Stage {
        pool: false,
        combos: 0,
        insert: false,
        wrap: false,
    },
    Stage {
        pool: true,
        combos: 16,
        insert: false,
        wrap: false,
    },
    Stage {
        pool: true,
        combos: 256,
        insert: true,
        wrap: false,
    },
    Stage {
        pool: true,
        combos: 256,
        insert: true,
        wrap: true,
    },
];

struct Node {
    residual: Word,
    depth: usize,
    parent: Option<usize>,
    entry: Option<CertEntry>,
}

struct Search<'a> {
    p: &'a Presentation,
    stage: &'a Stage,
    pool: Vec<Rat>,
    gens: Vec<GenSym>,
    wrappers: Vec<Letter>,
    rotations: Vec<(usize, Sign, usize, Vec<LetterTemplate>)>,
    nodes: Vec<Node>,
    heap: BinaryHeap<Reverse<(usize, usize)>>,
    seen: HashSet<Word>,
    spent: u64,
    budget: u64,
}

enum Halt {
    Found(usize),
    Budget,
}

pub fn wp_semidecide(p: &Presentation, w: &Word, fuel: u64) -> WpOutcome {
    let start = free_reduce(w);
    if start.is_empty() {
        return WpOutcome::Proved(Certificate::default());
    }
    if p.relators.is_empty() || !matches!(check_word(p, &start), Ok(true)) {
        return WpOutcome::Unknown;
    }
    let mut left = fuel;
    for (si, stage) in STAGES.iter().enumerate() {
        let budget = STAGE_BUDGET[si].min(left);
        let mut s = Search::new(p, stage, &start, budget, si);
        let halt = s.run();
        left -= s.spent;
        if let Some(Halt::Found(goal)) = halt {
            let cert = s.certificate(goal);
            if verify_certificate(p, w, &cert) {
                return WpOutcome::Proved(cert);
            }
        }
        if left == 0 {
            break;
        }
    }
    WpOutcome::Unknown
}

impl<'a> Search<'a> {
    fn new(
        p: &'a Presentation,
        stage: &'a Stage,
        start: &Word,
        budget: u64,
        level: usize,
    ) -> Search<'a> {
        let mut pool: BTreeSet<Rat> = start.rationals().cloned().collect();
        pool.extend([Rat::zero(), Rat::one(), -Rat::one()]);
        for r in &p.relators {
            let mut cs = Vec::new();
            r.constraint.constants(&mut cs);
            for l in &r.template {
                for e in &l.index {
                    e.constants(&mut cs);
                }
            }
            pool.extend(cs);
        }
        if level >= 2 {
            pool.extend((0..16).map(enumerate_rationals));
        }
        let mut wrappers: Vec<Letter> = Vec::new();
        for l in start.letters() {
            for c in [l.clone(), l.inverse()] {
                if !wrappers.contains(&c) {
                    wrappers.push(c);
                }
            }
        }
        let mut gens: Vec<GenSym> = Vec::new();
        for l in start.letters() {
            if !gens.contains(&l.gen) {
                gens.push(l.gen.clone());
            }
        }
        let mut rotations = Vec::new();
        for (si, r) in p.relators.iter().enumerate() {
            for sign in [Sign::Pos, Sign::Neg] {
                let t = r.oriented(sign);
                for k in 0..t.len() {
                    let mut rt: Vec<LetterTemplate> = t[k..].to_vec();
                    rt.extend_from_slice(&t[..k]);
                    rotations.push((si, sign, k, rt));
                }
            }
        }
        let mut s = Search {
            p,
            stage,
            pool: pool.into_iter().collect(),
            gens,
            wrappers,
            rotations,
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            seen: HashSet::new(),
            spent: 0,
            budget,
        };
        s.seen.insert(start.clone());
        s.nodes.push(Node {
            residual: start.clone(),
            depth: 0,
            parent: None,
            entry: None,
        });
        s.heap.push(Reverse((start.len(), 0)));
        s
    }

    fn run(&mut self) -> Option<Halt> {
        while let Some(Reverse((_, id))) = self.heap.pop() {
            if let Err(h) = self.expand(id) {
                return Some(h);
            }
        }
        None
    }

    fn certificate(&self, goal: usize) -> Certificate {
        let mut entries = Vec::new();
        let mut at = Some(goal);
        while let Some(i) = at {
            if let Some(e) = &self.nodes[i].entry {
                entries.push(e.clone());
            }
            at = self.nodes[i].parent;
        }
        entries.reverse();
        Certificate { entries }
    }

    fn expand(&mut self, id: usize) -> Result<(), Halt> {
        let u = self.nodes[id].residual.clone();
        let n = u.len();
        let rotations = std::mem::take(&mut self.rotations);
        let mut out = Ok(());
        'scan: for j in 0..=n {
            for (si, sign, k, rt) in &rotations {
                out = self.try_rotation(id, &u, j, *si, *sign, *k, rt);
                if out.is_err() {
                    break 'scan;
                }
            }
        }
        self.rotations = rotations;
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn try_rotation(
        &mut self,
        id: usize,
        u: &Word,
        j: usize,
        si: usize,
        sign: Sign,
        k: usize,
        rt: &[LetterTemplate],
    ) -> Result<(), Halt> {
        let schema = &self.p.relators[si];
        let rest = &u.letters()[j..];
        let (mut bound, m) = bind_prefix(rt, rest, schema.arity);
        if m == 0 && !self.stage.insert {
            return Ok(());
        }
        solve_affine(rt, rest, m, &mut bound);
        let free: Vec<usize> = (0..schema.arity).filter(|i| bound[*i].is_none()).collect();
        if !free.is_empty() && !self.stage.pool {
            return Ok(());
        }
        for params in self.candidates(rt, &bound, &free) {
            self.spend()?;
            self.apply_move(id, u, j, si, sign, k, params)?;
        }
        Ok(())
    }

    /// Completions of `bound`: first by copying the index of a word letter
    /// into a template letter whose index is made of free parameters, then
    /// from the pool.
    fn candidates(
        &self,
        rt: &[LetterTemplate],
        bound: &[Option<Rat>],
        free: &[usize],
    ) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        if free.is_empty() {
            out.push(bound.iter().map(|b| b.clone().expect("bound")).collect());
            return out;
        }
        for lt in rt {
            let vars: Option<Vec<usize>> = lt.index.iter().map(Expr::as_var).collect();
            let Some(vars) = vars else { continue };
            if !vars.iter().any(|v| free.contains(v)) {
                continue;
            }
            for g in &self.gens {
                if g.family != lt.family || g.index.dim() != vars.len() {
                    continue;
                }
                let mut b = bound.to_vec();
                let fits = vars
                    .iter()
                    .zip(g.index.entries())
                    .all(|(&v, q)| match &b[v] {
                        Some(x) => x == q,
                        None => {
                            b[v] = Some(q.clone());
                            true
                        }
                    });
                if fits && b.iter().all(Option::is_some) {
                    let c: Vec<Rat> = b.into_iter().map(|x| x.expect("bound")).collect();
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        let combos = self
            .pool
            .len()
            .checked_pow(free.len() as u32)
            .unwrap_or(usize::MAX)
            .min(self.stage.combos);
        for c in 0..combos {
            let mut rem = c;
            let params: Vec<Rat> = bound
                .iter()
                .map(|b| match b {
                    Some(v) => v.clone(),
                    None => {
                        let q = self.pool[rem % self.pool.len()].clone();
                        rem /= self.pool.len();
                        q
                    }
                })
                .collect();
            out.push(params);
        }
        out
    }

    fn spend(&mut self) -> Result<(), Halt> {
        if self.spent >= self.budget {
            return Err(Halt::Budget);
        }
        self.spent += 1;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_move(
        &mut self,
        id: usize,
        u: &Word,
        j: usize,
        si: usize,
        sign: Sign,
        k: usize,
        params: Vec<Rat>,
    ) -> Result<(), Halt> {
        let schema = &self.p.relators[si];
        let Some(relator) = schema.instance(&params) else {
            return Ok(());
        };
        let oriented = if sign == Sign::Pos {
            relator.clone()
        } else {
            relator.inverse()
        };
        let head = oriented.slice(0, k);
        let rotated = oriented.rotate(k);
        let rest = &u.letters()[j..];
        let m = rotated
            .letters()
            .iter()
            .zip(rest)
            .take_while(|(a, b)| a == b)
            .count();
        if m == 0 && !self.stage.insert {
            return Ok(());
        }
        let prefix = u.slice(0, j);
        let suffix = u.slice(j + m, u.len());
        let tail_inv = rotated.slice(m, rotated.len()).inverse();
        let entry = |conj: Word| CertEntry {
            conjugator: conj,
            relator: relator.clone(),
            schema: si,
            params: RatVec::new(params.clone()),
            inverse: sign == Sign::Neg,
        };
        let depth = self.nodes[id].depth + 1;
        let next = product([&prefix, &tail_inv, &suffix]);
        let conj = product([&prefix, &head.inverse()]);
        let penalty = if m == 0 { 2 } else { 0 };
        self.push(id, next, depth, penalty, entry(conj))?;
        if m == 0 && self.stage.wrap {
            for g in self.wrappers.clone() {
                let g = Word::letter(g);
                let next = product([&prefix, &g, &tail_inv, &g.inverse(), &suffix]);
                let conj = product([&prefix, &g, &head.inverse()]);
                self.push(id, next, depth, 4, entry(conj))?;
            }
        }
        Ok(())
    }

    fn push(
        &mut self,
        parent: usize,
        residual: Word,
        depth: usize,
        penalty: usize,
        entry: CertEntry,
    ) -> Result<(), Halt> {
        if self.seen.contains(&residual) {
            return Ok(());
        }
        self.seen.insert(residual.clone());
        let done = residual.is_empty();
        let key = residual.len() + depth + penalty;
        let nid = self.nodes.len();
        self.nodes.push(Node {
            residual,
            depth,
            parent: Some(parent),
            entry: Some(entry),
        });
        if done {
            return Err(Halt::Found(nid));
        }
        self.heap.push(Reverse((key, nid)));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::{var, SetPredicate};
    use crate::presentation::{GeneratorClass, RelatorSchema};
    use crate::words::Family;

    fn torus() -> Presentation {
        let x = |e| vec![e];
        Presentation::new(
            "torus",
            1,
            vec![GeneratorClass::new(Family::X, 1, SetPredicate::True)],
            vec![
                RelatorSchema::new(
                    "period",
                    1,
                    vec![
                        LetterTemplate::pos(Family::X, x(var(0))),
                        LetterTemplate::neg(Family::X, x(var(0) + crate::predicate::cst(1i64))),
                    ],
                    SetPredicate::True,
                ),
                RelatorSchema::new(
                    "sum",
                    2,
                    vec![
                        LetterTemplate::pos(Family::X, x(var(0))),
                        LetterTemplate::pos(Family::X, x(var(1))),
                        LetterTemplate::neg(Family::X, x(var(0) + var(1))),
                    ],
                    SetPredicate::True,
                ),
            ],
        )
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn entry(
        conj: &str,
        p: &Presentation,
        schema: usize,
        params: &[Rat],
        inverse: bool,
    ) -> CertEntry {
        CertEntry {
            conjugator: w(conj),
            relator: p.relators[schema].instantiate(params).unwrap(),
            schema,
            params: RatVec::new(params.to_vec()),
            inverse,
        }
    }

    #[test]
    fn relator_itself_needs_one_factor() {
        let p = torus();
        let word = w("x(1/3) . x(2/3) . x(1)^-1");
        let WpOutcome::Proved(c) = wp_semidecide(&p, &word, 10_000) else {
            panic!("not proved")
        };
        assert_eq!(c.len(), 1);
        assert!(c.entries[0].conjugator.is_empty());
        assert!(verify_certificate(&p, &word, &c));
    }

    #[test]
    fn two_factor_certificate() {
        let p = torus();
        let third = Rat::frac(1, 3);
        let two_thirds = Rat::frac(2, 3);
        let word = w("x(1/3) . x(2/3) . x(0)^-1");
        let hand = Certificate {
            entries: vec![
                entry("1", &p, 1, &[third.clone(), two_thirds.clone()], false),
                entry("1", &p, 0, &[Rat::zero()], true),
            ],
        };
        assert!(verify_certificate(&p, &word, &hand));
        let WpOutcome::Proved(c) = wp_semidecide(&p, &word, 10_000) else {
            panic!("not proved")
        };
        assert!(verify_certificate(&p, &word, &c));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn corrupted_certificates_fail() {
        let p = torus();
        let word = w("x(1/3) . x(2/3) . x(1)^-1");
        let WpOutcome::Proved(c) = wp_semidecide(&p, &word, 10_000) else {
            panic!("not proved")
        };
        let mut bad = c.clone();
        bad.entries[0].params.0[0] = Rat::frac(1, 4);
        assert!(!verify_certificate(&p, &word, &bad));
        let mut bad = c.clone();
        bad.entries[0].schema = 0;
        assert!(!verify_certificate(&p, &word, &bad));
        let mut bad = c;
        bad.entries[0].inverse = true;
        assert!(!verify_certificate(&p, &word, &bad));
        assert!(verify_certificate(
            &p,
            &Word::empty(),
            &Certificate::default()
        ));
        assert!(!verify_certificate(&p, &word, &Certificate::default()));
    }

    #[test]
    fn free_groups_give_unknown() {
        let p = Presentation::free("free", Family::X, 1);
        for fuel in [0, 10, 100_000] {
            assert_eq!(
                wp_semidecide(&p, &w("x(1) . x(2)^-1"), fuel),
                WpOutcome::Unknown
            );
        }
    }

    #[test]
    fn conjugated_products_are_found() {
        let p = torus();
        let r1 = p.relators[1]
            .instantiate(&[Rat::frac(1, 2), Rat::frac(3, 5)])
            .unwrap();
        let r2 = p.relators[0].instantiate(&[Rat::int(-2)]).unwrap();
        let c1 = w("x(7) . x(1/9)^-1");
        let c2 = w("x(5)");
        let word = product([&c1, &r1, &c1.inverse(), &c2, &r2.inverse(), &c2.inverse()]);
        let WpOutcome::Proved(c) = wp_semidecide(&p, &word, 50_000) else {
            panic!("not proved")
        };
        assert!(verify_certificate(&p, &word, &c));
    }

    #[test]
    fn more_fuel_keeps_the_certificate() {
        let p = torus();
        let word = w("x(1/3) . x(2/3) . x(0)^-1");
        let a = wp_semidecide(&p, &word, 3_000);
        let b = wp_semidecide(&p, &word, 300_000);
        assert!(a.is_proved());
        assert_eq!(a, b);
    }

    #[test]
    fn certificate_json_roundtrip() {
        let p = torus();
        let word = w("x(1/3) . x(2/3) . x(0)^-1");
        let WpOutcome::Proved(c) = wp_semidecide(&p, &word, 10_000) else {
            panic!()
        };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), c);
    }
}
