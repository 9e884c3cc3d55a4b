//! Reduction of the halting problem of a machine to a word problem.
//!
//! Every operation on a computation path induces a subgroup `W_o` of the
//! free group `G = <x(i,s), y>`, spanned by the patterns `encode_w(r)` whose
//! coordinates satisfy the operation; `W_o` is cut out of `G` by a subgroup
//! `L_o` of the extension `C`, whose stable letters `a(i,t)` and `m(i,t)`
//! shift resp. scale the `i`-th coordinate of a pattern. Intersecting over a
//! path and projecting to the input coordinates gives `U_path`, and a
//! commutator with a stable letter centralizing `U` is trivial exactly when
//! the machine halts on the encoded input.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Rat, RatVec};
use crate::britton::{centralizing_extension, hnn_is_identity, HnnStructure, WordOracle};
use crate::machine::{mult_guard_transform, run_quiet, BssProgram, RunOutcome};
use crate::path::{enumerate_paths, locate_path, Path, PathOp};
use crate::predicate::{and, cst, eq, ge, is_natural, lt, ne, var, Expr, SetPredicate};
use crate::presentation::{
    hnn_extend, GeneratorClass, LetterCase, LetterMap, LetterTemplate, Presentation, StableLetters,
    WordFamily,
};
use crate::words::{
    encode_w, free_reduce, nielsen_decompose, product, Family, GenSym, Letter, Sign, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("operation {op} does not fit d={d}, D={big_d}")]
    IndexError { op: String, d: usize, big_d: usize },
    #[error("scaling letter {0} has factor zero")]
    ZeroScale(String),
    #[error("{0} is not a stable letter of C")]
    NotStable(String),
}

/// The rows of the operation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Row {
    Copy,
    Const,
    Add,
    Neg,
    Mul,
    Inv,
    GuardGeq,
    GuardLt,
}

impl Row {
    pub const ALL: [Row; 8] = [
        Row::Copy,
        Row::Const,
        Row::Add,
        Row::Neg,
        Row::Mul,
        Row::Inv,
        Row::GuardGeq,
        Row::GuardLt,
    ];

    pub fn of(op: &PathOp) -> Row {
        match op {
            PathOp::Copy(..) => Row::Copy,
            PathOp::Assign(..) => Row::Const,
            PathOp::Add(..) => Row::Add,
            PathOp::Neg(..) => Row::Neg,
            PathOp::Mul(..) => Row::Mul,
            PathOp::Inv(..) => Row::Inv,
            PathOp::GuardGeq(_) => Row::GuardGeq,
            PathOp::GuardLt(_) => Row::GuardLt,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Row::Copy => "copy",
            Row::Const => "const",
            Row::Add => "add",
            Row::Neg => "neg",
            Row::Mul => "mul",
            Row::Inv => "inv",
            Row::GuardGeq => "guard-geq",
            Row::GuardLt => "guard-lt",
        }
    }
}

impl FromStr for Row {
    type Err = String;

    fn from_str(s: &str) -> Result<Row, String> {
        Row::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown row {s:?}"))
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a stable letter's parameter depends on the move parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    S,
    Neg,
    Double,
    Square,
    Recip,
}

impl Param {
    fn at(self, s: &Rat) -> Option<Rat> {
        match self {
            Param::S => Some(s.clone()),
            Param::Neg => Some(-s),
            Param::Double => Some(s + s),
            Param::Square => Some(s * s),
            Param::Recip => s.recip().ok(),
        }
    }

    /// `s` from the parameter value, when `self` is invertible.
    fn solve(self, v: &Rat) -> Option<Rat> {
        match self {
            Param::S => Some(v.clone()),
            Param::Neg => Some(-v),
            Param::Recip => v.recip().ok(),
            Param::Double => v.checked_div(&Rat::int(2)).ok(),
            Param::Square => None,
        }
    }
}

/// Allowed values of a move parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Any,
    Nonzero,
    Positive,
}

impl Domain {
    fn admits(self, s: &Rat) -> bool {
        match self {
            Domain::Any => true,
            Domain::Nonzero => !s.is_zero(),
            Domain::Positive => s.is_positive(),
        }
    }
}

/// One generator family of `L_o`: the product of stable letters
/// `family(reg, param(s))` for every `s` in `domain`. The first letter's
/// register is the pivot, from which `s` is solved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub family: Family,
    pub domain: Domain,
    pub letters: Vec<(usize, Param)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpSubgroupSpec {
    pub op: PathOp,
    pub d: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
    /// Condition on `(r_1, ..., r_D)`, variable `i - 1` standing for `r_i`.
    pub w_pred: SetPredicate,
    /// The pattern `L_o` starts from.
    pub base: RatVec,
    /// Registers shifted freely by `a(l, s)`.
    pub free: Vec<usize>,
    pub moves: Vec<Move>,
}

fn r(i: usize) -> Expr {
    var(i - 1)
}

fn additive(domain: Domain, letters: Vec<(usize, Param)>) -> Move {
    Move {
        family: Family::A,
        domain,
        letters,
    }
}

fn scaling(domain: Domain, letters: Vec<(usize, Param)>) -> Move {
    Move {
        family: Family::M,
        domain,
        letters,
    }
}

pub fn build_w(op: &PathOp, d: usize, big_d: usize) -> Result<OpSubgroupSpec, ReductionError> {
    let mut regs = op.operands();
    regs.extend(op.target());
    if regs.iter().any(|&i| i == 0 || i > big_d) || op.target().is_some_and(|t| t <= d) {
        return Err(ReductionError::IndexError {
            op: op.to_string(),
            d,
            big_d,
        });
    }
    let mut base = vec![Rat::zero(); big_d];
    let unit = |base: &mut Vec<Rat>, is: &[usize]| {
        for &i in is {
            base[i - 1] = Rat::one();
        }
    };
    let (w_pred, moves) = match op {
        PathOp::Copy(i, j) => (
            eq(r(*i), r(*j)),
            vec![additive(Domain::Any, vec![(*j, Param::S), (*i, Param::S)])],
        ),
        PathOp::Assign(i, a) => {
            base[i - 1] = a.clone();
            (eq(r(*i), cst(a.clone())), vec![])
        }
        PathOp::Add(i, j, k) if j == k => (
            eq(r(*i), r(*j) + r(*k)),
            vec![additive(
                Domain::Any,
                vec![(*j, Param::S), (*i, Param::Double)],
            )],
        ),
        PathOp::Add(i, j, k) => (
            eq(r(*i), r(*j) + r(*k)),
            vec![
                additive(Domain::Any, vec![(*j, Param::S), (*i, Param::S)]),
                additive(Domain::Any, vec![(*k, Param::S), (*i, Param::S)]),
            ],
        ),
        PathOp::Neg(i, j) => (
            eq(r(*i), -r(*j)),
            vec![additive(
                Domain::Any,
                vec![(*j, Param::Neg), (*i, Param::S)],
            )],
        ),
        PathOp::Mul(i, j, k) => {
            unit(&mut base, &[*i, *j, *k]);
            let pred = and(vec![
                eq(r(*i), r(*j) * r(*k)),
                ne(r(*j), cst(0i64)),
                ne(r(*k), cst(0i64)),
            ]);
            let moves = if j == k {
                vec![scaling(
                    Domain::Nonzero,
                    vec![(*j, Param::S), (*i, Param::Square)],
                )]
            } else {
                vec![
                    scaling(Domain::Nonzero, vec![(*j, Param::S), (*i, Param::S)]),
                    scaling(Domain::Nonzero, vec![(*k, Param::S), (*i, Param::S)]),
                ]
            };
            (pred, moves)
        }
        PathOp::Inv(i, j) => {
            unit(&mut base, &[*i, *j]);
            (
                and(vec![eq(r(*i) * r(*j), cst(1i64)), ne(r(*j), cst(0i64))]),
                vec![scaling(
                    Domain::Nonzero,
                    vec![(*j, Param::Recip), (*i, Param::S)],
                )],
            )
        }
        PathOp::GuardGeq(j) => (
            ge(r(*j), cst(0i64)),
            vec![additive(Domain::Positive, vec![(*j, Param::S)])],
        ),
        PathOp::GuardLt(j) => {
            base[j - 1] = -Rat::one();
            (
                lt(r(*j), cst(0i64)),
                vec![scaling(Domain::Positive, vec![(*j, Param::S)])],
            )
        }
    };
    let free = (1..=big_d).filter(|l| !regs.contains(l)).collect();
    Ok(OpSubgroupSpec {
        op: op.clone(),
        d,
        big_d,
        w_pred,
        base: RatVec::new(base),
        free,
        moves,
    })
}

/// Image of `w` under the action of a stable letter `a(i,t)` or `m(i,t)`.
pub fn stable_conjugate(letter: &GenSym, w: &Word) -> Result<Word, ReductionError> {
    let (i, t) = stable_parts(letter)?;
    if letter.family == Family::M && t.is_zero() {
        return Err(ReductionError::ZeroScale(letter.to_string()));
    }
    let map = |l: &Letter| -> Letter {
        match l.gen.level_value() {
            Some((j, s)) if l.gen.family == Family::X && j == i => {
                let v = if letter.family == Family::A {
                    s + &t
                } else {
                    s * &t
                };
                Letter {
                    gen: GenSym::x(j, v),
                    sign: l.sign,
                }
            }
            _ => l.clone(),
        }
    };
    Ok(free_reduce(&Word(w.letters().iter().map(map).collect())))
}

fn stable_parts(g: &GenSym) -> Result<(usize, Rat), ReductionError> {
    let ok = matches!(g.family, Family::A | Family::M) && g.index.dim() == 2;
    let i = g.index.entries().first().and_then(Rat::to_usize);
    match (ok, i) {
        (true, Some(i)) => Ok((i, g.index.entries()[1].clone())),
        _ => Err(ReductionError::NotStable(g.to_string())),
    }
}

/// Factors of `w` as patterns of dimension `dim`; `None` otherwise.
fn patterns(w: &Word, dim: usize) -> Option<Vec<(Sign, RatVec)>> {
    let fs = nielsen_decompose(w)?;
    fs.iter().all(|(_, v)| v.dim() == dim).then_some(fs)
}

fn pred_at(p: &SetPredicate, v: &RatVec) -> bool {
    p.eval(v.entries())
}

pub fn w_membership(spec: &OpSubgroupSpec, w: &Word) -> bool {
    match patterns(w, spec.big_d) {
        Some(fs) => fs.iter().all(|(_, v)| pred_at(&spec.w_pred, v)),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach {
    /// Conjugating the base pattern by these stable letters, last letter
    /// outermost, gives the target.
    Reached(Vec<GenSym>),
    NotReached,
}

/// Solves for stable letters of `L_o` carrying the base pattern to `w`,
/// using at most `budget` letters. Only positive powers of the generator
/// families are used.
pub fn l_reachability_check(spec: &OpSubgroupSpec, w: &Word, budget: usize) -> Reach {
    let Some(fs) = patterns(w, spec.big_d) else {
        return Reach::NotReached;
    };
    let [(Sign::Pos, target)] = fs.as_slice() else {
        return Reach::NotReached;
    };
    let Some(letters) = solve_moves(spec, target) else {
        return Reach::NotReached;
    };
    if letters.len() > budget {
        return Reach::NotReached;
    }
    let mut cur = encode_w(&spec.base);
    for g in &letters {
        match stable_conjugate(g, &cur) {
            Ok(next) => cur = next,
            Err(_) => return Reach::NotReached,
        }
    }
    if cur == free_reduce(w) {
        Reach::Reached(letters)
    } else {
        Reach::NotReached
    }
}

fn solve_moves(spec: &OpSubgroupSpec, target: &RatVec) -> Option<Vec<GenSym>> {
    let t = target.entries();
    let mut cur: Vec<Rat> = spec.base.entries().to_vec();
    let mut out = Vec::new();
    for &l in &spec.free {
        let delta = &t[l - 1] - &cur[l - 1];
        if !delta.is_zero() {
            out.push(GenSym::a(l, delta.clone()));
            cur[l - 1] = t[l - 1].clone();
        }
    }
    for mv in &spec.moves {
        let (pivot, param) = mv.letters[0];
        let p = pivot - 1;
        let needed = match mv.family {
            Family::A => &t[p] - &cur[p],
            _ => t[p].checked_div(&cur[p]).ok()?,
        };
        let neutral = if mv.family == Family::A {
            Rat::zero()
        } else {
            Rat::one()
        };
        if needed == neutral {
            continue;
        }
        let s = param.solve(&needed)?;
        if !mv.domain.admits(&s) {
            return None;
        }
        for &(reg, param) in &mv.letters {
            let v = param.at(&s)?;
            cur[reg - 1] = match mv.family {
                Family::A => &cur[reg - 1] + &v,
                _ => &cur[reg - 1] * &v,
            };
            out.push(GenSym::new(mv.family, RatVec::new(vec![Rat::from(reg), v])));
        }
    }
    (cur.as_slice() == t).then_some(out)
}

/// Conjunction of the operation conditions of `path` at `s`.
pub fn v_membership(path: &Path, s: &RatVec) -> bool {
    if s.dim() != path.big_d {
        return false;
    }
    path.ops
        .iter()
        .all(|op| match build_w(op, path.d, path.big_d) {
            Ok(spec) => pred_at(&spec.w_pred, s),
            Err(_) => false,
        })
}

/// Whether `w` lies in `U_path`: every pattern factor extends along the
/// path.
pub fn u_membership(path: &Path, w: &Word) -> bool {
    match patterns(w, path.d) {
        Some(fs) => fs
            .iter()
            .all(|(_, v)| path.extend(v).is_some_and(|s| v_membership(path, &s))),
        None => false,
    }
}

/// Free group `G` on `x(i,s)`, `i` natural, and `y`.
pub fn group_g() -> Presentation {
    Presentation::new(
        "G",
        2,
        vec![
            GeneratorClass::new(Family::X, 2, is_natural(var(0))),
            GeneratorClass::new(Family::Y, 0, SetPredicate::True),
        ],
        vec![],
    )
}

/// Generators of `H_{<=d}`.
pub fn in_h_le(d: usize, g: &GenSym) -> bool {
    g == &GenSym::y() || (g.family == Family::X && g.level_value().is_some_and(|(i, _)| i <= d))
}

/// Generators of `H_{>d}`.
pub fn in_h_gt(d: usize, g: &GenSym) -> bool {
    g.family == Family::X && g.level_value().is_some_and(|(i, _)| i > d)
}

fn action(shift: bool) -> LetterMap {
    let s = if shift {
        var(3) + var(1)
    } else {
        var(3) * var(1)
    };
    LetterMap::new(
        2,
        vec![LetterCase {
            family: Family::X,
            arity: 2,
            pred: eq(var(2), var(0)),
            image: vec![LetterTemplate::pos(Family::X, vec![var(2), s])],
        }],
        true,
    )
}

/// The extension `C` of `G` by `a(i,t)` and `m(i,t)`, `t != 0`, acting by
/// `a x(i,s) a^-1 = x(i,s+t)` and `m x(i,s) m^-1 = x(i,st)`.
pub fn extension_c() -> Presentation {
    let assoc = vec![
        WordFamily::new(
            4,
            vec![LetterTemplate::pos(Family::X, vec![var(2), var(3)])],
            is_natural(var(2)),
        ),
        WordFamily::new(
            2,
            vec![LetterTemplate::pos(Family::Y, vec![])],
            SetPredicate::True,
        ),
    ];
    let a = StableLetters {
        family: Family::A,
        arity: 2,
        pred: is_natural(var(0)),
        assoc: assoc.clone(),
        iso: action(true),
    };
    let m = StableLetters {
        family: Family::M,
        arity: 2,
        pred: and(vec![is_natural(var(0)), ne(var(1), cst(0i64))]),
        assoc,
        iso: action(false),
    };
    let mut c = hnn_extend(&group_g(), &[a, m]);
    c.label = "C".into();
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UMembership {
    /// Each factor with the index of an accepting path containing it.
    Member(Vec<(RatVec, BigUint)>),
    NotFoundWithinFuel,
}

impl UMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, UMembership::Member(_))
    }
}

/// Membership in `U`, the subgroup spanned by the patterns of accepted
/// inputs, for one program. Paths are taken from the guarded form of the
/// program, on which every product has nonzero factors.
#[derive(Debug, Clone)]
pub struct UHandle {
    pub program: BssProgram,
}

pub fn assemble_u(program: &BssProgram) -> UHandle {
    UHandle {
        program: mult_guard_transform(program),
    }
}

impl UHandle {
    pub fn pattern(&self, n: u64, r: &RatVec) -> Word {
        crate::words::encode_w_tagged(n, r)
    }

    pub fn path(&self, n: &BigUint) -> Option<Path> {
        enumerate_paths(&self.program, n)
    }

    /// The path of an input halting within `fuel` steps, if it accepts.
    /// The path is rebuilt from its index and checked against the input.
    pub fn accepting_path(&self, r: &RatVec, fuel: u64) -> Option<(BigUint, Path)> {
        let n = locate_path(&self.program, r, fuel)?;
        let path = self.path(&n)?;
        let s = path.extend(r)?;
        if !v_membership(&path, &s) {
            return None;
        }
        Some((n, path))
    }

    pub fn membership(&self, w: &Word, fuel: u64) -> UMembership {
        let Some(fs) = nielsen_decompose(w) else {
            return UMembership::NotFoundWithinFuel;
        };
        let mut witness = Vec::new();
        for (_, r) in fs {
            match self.accepting_path(&r, fuel) {
                Some((n, path)) if u_membership(&path, &encode_w(&r)) => witness.push((r, n)),
                _ => return UMembership::NotFoundWithinFuel,
            }
        }
        UMembership::Member(witness)
    }

    /// `<F; t | t u = u t for u in U>` over the free group `F`, with
    /// membership in `U` decided at `fuel`.
    pub fn benign_extension(&self, fuel: u64) -> HnnStructure {
        let me = self.clone();
        let free: WordOracle = Arc::new(|w| Some(free_reduce(w).is_empty()));
        let member: WordOracle = Arc::new(move |w| Some(me.membership(w, fuel).is_member()));
        centralizing_extension(free, member, Family::T)
    }
}

/// The query `encode_w(r)` and the commutator `t q t^-1 q^-1`.
pub fn reduce_halting(r: &RatVec) -> (Word, Word) {
    let q = encode_w(r);
    let t = Word::letter(GenSym::bare(Family::T).pos());
    let comm = t
        .juxtapose(&q)
        .juxtapose(&t.inverse())
        .juxtapose(&q.inverse());
    (q, comm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Simulated {
    Halt,
    DivergeWithinFuel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSide {
    Member,
    NotWithinFuel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRecord {
    pub input: RatVec,
    pub simulated: Simulated,
    pub group: GroupSide,
    /// Some side answered and both sides agree.
    pub conclusive: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionReport {
    pub records: Vec<ReductionRecord>,
}

impl ReductionReport {
    pub fn disagreements(&self) -> usize {
        self.records.iter().filter(|r| !r.agree).count()
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements() == 0
    }
}

pub fn check_reduction(program: &BssProgram, inputs: &[RatVec], fuel: u64) -> ReductionReport {
    check_reduction_with(program, inputs, fuel, false)
}

/// [`check_reduction`], optionally flipping the group side of the first
/// input to exercise the disagreement path.
pub fn check_reduction_with(
    program: &BssProgram,
    inputs: &[RatVec],
    fuel: u64,
    fault: bool,
) -> ReductionReport {
    let h = assemble_u(program).benign_extension(fuel);
    let mut records = Vec::new();
    for (idx, r) in inputs.iter().enumerate() {
        let simulated = match run_quiet(program, r, fuel) {
            RunOutcome::Halted { .. } => Simulated::Halt,
            _ => Simulated::DivergeWithinFuel,
        };
        let (_, comm) = reduce_halting(r);
        let mut trivial = hnn_is_identity(&h, &comm).unwrap_or(false);
        if fault && idx == 0 {
            trivial = !trivial;
        }
        let group = if trivial {
            GroupSide::Member
        } else {
            GroupSide::NotWithinFuel
        };
        let agree = (simulated == Simulated::Halt) == (group == GroupSide::Member);
        records.push(ReductionRecord {
            input: r.clone(),
            simulated,
            group,
            conclusive: simulated == Simulated::Halt || group == GroupSide::Member,
            agree,
        });
    }
    ReductionReport { records }
}

/// Every rational in the artifacts emitted for input `r`: the query and
/// commutator words, the path constants and operation conditions, and the
/// stable letters certifying each operation.
pub fn emitted_rationals(program: &BssProgram, r: &RatVec, fuel: u64) -> BTreeSet<Rat> {
    let mut out: BTreeSet<Rat> = BTreeSet::new();
    let (q, comm) = reduce_halting(r);
    out.extend(word_values(&q));
    out.extend(word_values(&comm));
    if let Some((_, path)) = assemble_u(program).accepting_path(r, fuel) {
        out.extend(path.constants());
        let s = path.extend(r).expect("accepting");
        for op in &path.ops {
            let spec = build_w(op, path.d, path.big_d).expect("well formed");
            let mut cs = Vec::new();
            spec.w_pred.constants(&mut cs);
            out.extend(cs);
            out.extend(spec.base.entries().iter().cloned());
            if let Reach::Reached(letters) = l_reachability_check(&spec, &encode_w(&s), usize::MAX)
            {
                out.extend(letters.iter().map(|g| g.index.entries()[1].clone()));
            }
        }
    }
    out
}

/// Value coordinates of the letters of `w`, leaving out level indices.
fn word_values(w: &Word) -> Vec<Rat> {
    w.letters()
        .iter()
        .filter_map(|l| l.gen.level_value().map(|(_, s)| s.clone()))
        .collect()
}

/// Rationals the reduction may emit for input `r` without introducing new
/// constants: the values along the path, their negatives, `0` and `±1`.
pub fn derived_rationals(program: &BssProgram, r: &RatVec, fuel: u64) -> BTreeSet<Rat> {
    let mut out: BTreeSet<Rat> = [Rat::zero(), Rat::one(), -Rat::one()].into_iter().collect();
    let values = match assemble_u(program).accepting_path(r, fuel) {
        Some((_, path)) => path.extend(r).expect("accepting"),
        None => r.clone(),
    };
    for v in values.entries() {
        out.insert(v.clone());
        out.insert(-v);
    }
    out.extend(r.entries().iter().cloned());
    out
}

/// A product of pattern words, for tests and suites.
pub fn pattern_product(factors: &[(Sign, RatVec)]) -> Word {
    let ws: Vec<Word> = factors
        .iter()
        .map(|(s, v)| {
            if *s == Sign::Pos {
                encode_w(v)
            } else {
                encode_w(v).inverse()
            }
        })
        .collect();
    product(&ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::sign_program;
    use crate::presentation::check_relator;

    fn v(xs: &[i64]) -> RatVec {
        RatVec::from_ints(xs)
    }

    fn sign_path() -> Path {
        Path {
            d: 1,
            big_d: 3,
            ops: vec![
                PathOp::Assign(2, Rat::int(-1)),
                PathOp::Add(3, 1, 2),
                PathOp::GuardGeq(3),
            ],
        }
    }

    #[test]
    fn table_predicates() {
        let add = build_w(&PathOp::Add(3, 1, 2), 1, 3).unwrap();
        assert!(pred_at(&add.w_pred, &v(&[2, -1, 1])));
        let inv = build_w(&PathOp::Inv(2, 1), 1, 2).unwrap();
        assert!(!pred_at(&inv.w_pred, &v(&[0, 5])));
        let geq = build_w(&PathOp::GuardGeq(1), 1, 1).unwrap();
        assert!(pred_at(&geq.w_pred, &v(&[0])));
        assert!(build_w(&PathOp::Add(3, 1, 4), 1, 3).is_err());
        assert!(build_w(&PathOp::Copy(1, 1), 1, 3).is_err());
    }

    #[test]
    fn stable_actions() {
        let w = encode_w(&v(&[1, 3]));
        assert_eq!(
            stable_conjugate(&GenSym::a(2, Rat::int(5)), &w).unwrap(),
            encode_w(&v(&[1, 8]))
        );
        assert_eq!(stable_conjugate(&GenSym::m(1, Rat::one()), &w).unwrap(), w);
        assert_eq!(stable_conjugate(&GenSym::a(7, Rat::int(5)), &w).unwrap(), w);
        assert!(matches!(
            stable_conjugate(&GenSym::m(1, Rat::zero()), &w),
            Err(ReductionError::ZeroScale(_))
        ));
    }

    #[test]
    fn memberships() {
        let add = build_w(&PathOp::Add(3, 1, 2), 1, 3).unwrap();
        assert!(w_membership(&add, &encode_w(&v(&[2, -1, 1]))));
        let two = pattern_product(&[(Sign::Pos, v(&[2, -1, 1])), (Sign::Neg, v(&[0, 4, 4]))]);
        assert!(w_membership(&add, &two));
        assert!(!w_membership(
            &add,
            &Word::letter(GenSym::x(1, Rat::one()).pos())
        ));
        assert!(matches!(
            l_reachability_check(&add, &encode_w(&v(&[2, -1, 1])), 100),
            Reach::Reached(_)
        ));
        assert_eq!(
            l_reachability_check(&add, &encode_w(&v(&[2, -1, 2])), 100),
            Reach::NotReached
        );
        let konst = build_w(&PathOp::Assign(2, Rat::one()), 1, 3).unwrap();
        assert_eq!(
            l_reachability_check(&konst, &encode_w(&v(&[0, 2, 0])), 100),
            Reach::NotReached
        );
        assert_eq!(
            l_reachability_check(&konst, &encode_w(&v(&[0, 1, 0])), 100),
            Reach::Reached(vec![])
        );
    }

    #[test]
    fn path_subgroups() {
        let p = sign_path();
        assert!(v_membership(&p, &v(&[2, -1, 1])));
        assert!(!v_membership(&p, &v(&[2, -1, 0])));
        let empty = Path {
            d: 2,
            big_d: 2,
            ops: vec![],
        };
        assert!(v_membership(&empty, &v(&[5, 7])));
        assert!(u_membership(&p, &encode_w(&v(&[2]))));
        assert!(!u_membership(&p, &encode_w(&v(&[0]))));
        assert!(u_membership(&p, &Word::empty()));
    }

    #[test]
    fn u_handle() {
        let u = assemble_u(&sign_program());
        assert!(u.membership(&encode_w(&v(&[2])), 1000).is_member());
        assert_eq!(
            u.membership(&encode_w(&v(&[0])), 1000),
            UMembership::NotFoundWithinFuel
        );
        assert!(u.membership(&Word::empty(), 1000).is_member());
    }

    #[test]
    fn reduction_shapes() {
        let (q, c) = reduce_halting(&v(&[2]));
        assert_eq!(q.len(), 3);
        assert_eq!(c.len(), 8);
        let (q, _) = reduce_halting(&RatVec::empty());
        assert_eq!(q, Word::letter(GenSym::y().pos()));
    }

    #[test]
    fn sign_reduction_report() {
        let inputs: Vec<RatVec> = [
            Rat::zero(),
            Rat::frac(1, 2),
            Rat::one(),
            Rat::int(2),
            Rat::int(100),
        ]
        .map(|q| RatVec::new(vec![q]))
        .into();
        let rep = check_reduction(&sign_program(), &inputs, 10_000);
        assert!(rep.all_agree());
        let halting: Vec<bool> = rep
            .records
            .iter()
            .map(|r| r.simulated == Simulated::Halt)
            .collect();
        assert_eq!(halting, [false, false, true, true, true]);
        let zero = check_reduction(&sign_program(), &inputs, 0);
        assert!(zero.records.iter().all(|r| !r.conclusive && r.agree));
        assert_eq!(
            check_reduction_with(&sign_program(), &inputs, 10_000, true).disagreements(),
            1
        );
    }

    #[test]
    fn extension_c_relators() {
        let c = extension_c();
        let rel = |s: &str| check_relator(&c, &s.parse().unwrap()).unwrap();
        assert!(rel("x(2,7) . a(2,5) . x(2,2)^-1 . a(2,5)^-1"));
        assert!(rel("x(3,2) . a(2,5) . x(3,2)^-1 . a(2,5)^-1"));
        assert!(rel("y . a(2,5) . y^-1 . a(2,5)^-1"));
        assert!(rel("x(2,6) . m(2,3) . x(2,2)^-1 . m(2,3)^-1"));
        assert!(!rel("x(2,0) . m(2,0) . x(2,2)^-1 . m(2,0)^-1"));
        assert!(!rel("x(2,8) . a(2,5) . x(2,2)^-1 . a(2,5)^-1"));
    }
}
