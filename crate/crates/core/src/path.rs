//! Straight-line paths through a BSS program.
//!
//! A path fixes every branch outcome, so it is a single-assignment program
//! over indices `1..=D` with guards: indices `1..=d` hold the input, each
//! later index is written exactly once. The same builder serves concrete
//! traces ([`extract_path`]) and forced symbolic execution
//! ([`enumerate_paths`]).
//!
//! Path index `n` encodes `(d, bits, f)` as `pair(pair(d, k), f)` where `k`
//! is the shortlex rank of the branch bitstring and `f` the exact number of
//! steps to reach `halt`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{pair_big, unpair_big, Rat, RatOp, RatVec};
use crate::machine::{
    branch_outcomes, step_consistent, BssProgram, Configuration, InstrKind, Instruction, Reg, Trace,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathOp {
    Assign(usize, Rat),
    Copy(usize, usize),
    Add(usize, usize, usize),
    Neg(usize, usize),
    Mul(usize, usize, usize),
    Inv(usize, usize),
    GuardGeq(usize),
    GuardLt(usize),
}

impl PathOp {
    /// Index written by the op, `None` for guards.
    pub fn target(&self) -> Option<usize> {
        match self {
            PathOp::Assign(i, _)
            | PathOp::Copy(i, _)
            | PathOp::Add(i, _, _)
            | PathOp::Neg(i, _)
            | PathOp::Mul(i, _, _)
            | PathOp::Inv(i, _) => Some(*i),
            PathOp::GuardGeq(_) | PathOp::GuardLt(_) => None,
        }
    }

    pub fn operands(&self) -> Vec<usize> {
        match self {
            PathOp::Assign(..) => vec![],
            PathOp::Copy(_, j) | PathOp::Neg(_, j) | PathOp::Inv(_, j) => vec![*j],
            PathOp::Add(_, j, k) | PathOp::Mul(_, j, k) => vec![*j, *k],
            PathOp::GuardGeq(j) | PathOp::GuardLt(j) => vec![*j],
        }
    }

    pub fn is_guard(&self) -> bool {
        self.target().is_none()
    }
}

impl fmt::Display for PathOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathOp::Assign(i, a) => write!(f, "r{i} <- {a}"),
            PathOp::Copy(i, j) => write!(f, "r{i} <- r{j}"),
            PathOp::Add(i, j, k) => write!(f, "r{i} <- r{j} + r{k}"),
            PathOp::Neg(i, j) => write!(f, "r{i} <- -r{j}"),
            PathOp::Mul(i, j, k) => write!(f, "r{i} <- r{j} * r{k}"),
            PathOp::Inv(i, j) => write!(f, "r{i} <- 1/r{j}"),
            PathOp::GuardGeq(j) => write!(f, "r{j} >= 0"),
            PathOp::GuardLt(j) => write!(f, "r{j} < 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub d: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub ops: Vec<PathOp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

impl Path {
    /// Guard outcomes in order (`true` for `>=`).
    pub fn guard_string(&self) -> Vec<bool> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                PathOp::GuardGeq(_) => Some(true),
                PathOp::GuardLt(_) => Some(false),
                _ => None,
            })
            .collect()
    }

    /// Single assignment, operands defined earlier, `D` consistent.
    pub fn is_well_formed(&self) -> bool {
        let mut next = self.d + 1;
        for op in &self.ops {
            if op.operands().iter().any(|&j| j == 0 || j >= next) {
                return false;
            }
            if let Some(t) = op.target() {
                if t != next {
                    return false;
                }
                next += 1;
            }
        }
        next == self.big_d + 1
    }

    /// The values `r1..=rD` when every guard holds on `input`.
    pub fn extend(&self, input: &RatVec) -> Option<RatVec> {
        if input.dim() != self.d {
            return None;
        }
        let mut r: Vec<Rat> = Vec::with_capacity(self.big_d + 1);
        r.push(Rat::zero());
        r.extend(input.entries().iter().cloned());
        for op in &self.ops {
            let v = match op {
                PathOp::Assign(_, a) => a.clone(),
                PathOp::Copy(_, j) => r[*j].clone(),
                PathOp::Add(_, j, k) => &r[*j] + &r[*k],
                PathOp::Neg(_, j) => -&r[*j],
                PathOp::Mul(_, j, k) => &r[*j] * &r[*k],
                PathOp::Inv(_, j) => r[*j].recip().ok()?,
                PathOp::GuardGeq(j) => {
                    if r[*j].is_negative() {
                        return None;
                    }
                    continue;
                }
                PathOp::GuardLt(j) => {
                    if !r[*j].is_negative() {
                        return None;
                    }
                    continue;
                }
            };
            r.push(v);
        }
        r.remove(0);
        Some(RatVec::new(r))
    }

    /// Whether `input` lies in the path's input set.
    pub fn contains(&self, input: &RatVec) -> bool {
        self.extend(input).is_some()
    }

    /// Every rational appearing as a constant in the path.
    pub fn constants(&self) -> Vec<Rat> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                PathOp::Assign(_, a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} D={} [", self.d, self.big_d)?;
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{op}")?;
        }
        write!(f, "]")
    }
}

pub fn path_membership(path: &Path, input: &RatVec) -> bool {
    path.contains(input)
}

pub fn path_extend(path: &Path, input: &RatVec) -> Option<RatVec> {
    path.extend(input)
}

/// Register-to-index bookkeeping shared by trace extraction and forced
/// execution.
struct PathBuilder {
    d: usize,
    next: usize,
    map: HashMap<Reg, usize>,
    ops: Vec<PathOp>,
}

impl PathBuilder {
    fn new(d: usize) -> PathBuilder {
        PathBuilder {
            d,
            next: d + 1,
            map: (1..=d).map(|r| (r, r)).collect(),
            ops: Vec::new(),
        }
    }

    fn fresh(&mut self) -> usize {
        let i = self.next;
        self.next += 1;
        i
    }

    fn read(&mut self, reg: Reg) -> usize {
        if let Some(&i) = self.map.get(&reg) {
            return i;
        }
        let i = self.fresh();
        self.ops.push(PathOp::Assign(i, Rat::zero()));
        self.map.insert(reg, i);
        i
    }

    fn emit(&mut self, reg: Reg, make: impl FnOnce(usize) -> PathOp) {
        let i = self.fresh();
        self.ops.push(make(i));
        self.map.insert(reg, i);
    }

    /// Records one executed instruction. `copy_regs` are the copy-register
    /// values before the step; `branch` the outcome for branches.
    fn apply(&mut self, ins: &Instruction, copy_regs: (usize, usize), branch: Option<bool>) {
        match &ins.kind {
            InstrKind::Assign { target, value } => {
                let v = value.clone();
                self.emit(*target, |i| PathOp::Assign(i, v));
            }
            InstrKind::Compute { target, op, a, b } => {
                let ia = self.read(*a);
                let ib = self.read(*b);
                match op {
                    RatOp::Add => self.emit(*target, |i| PathOp::Add(i, ia, ib)),
                    RatOp::Mul => self.emit(*target, |i| PathOp::Mul(i, ia, ib)),
                    RatOp::Sub => {
                        let n = self.fresh();
                        self.ops.push(PathOp::Neg(n, ib));
                        self.emit(*target, |i| PathOp::Add(i, ia, n));
                    }
                    RatOp::Div => {
                        let n = self.fresh();
                        self.ops.push(PathOp::Inv(n, ib));
                        self.emit(*target, |i| PathOp::Mul(i, ia, n));
                    }
                }
            }
            InstrKind::Copy => {
                let (ci, cj) = copy_regs;
                let src = self.read(cj);
                self.emit(ci, |i| PathOp::Copy(i, src));
            }
            InstrKind::Branch { .. } => {
                let r0 = self.read(0);
                self.ops.push(if branch.unwrap_or(true) {
                    PathOp::GuardGeq(r0)
                } else {
                    PathOp::GuardLt(r0)
                });
            }
            InstrKind::Halt => {}
        }
    }

    fn finish(self) -> Path {
        Path {
            d: self.d,
            big_d: self.next - 1,
            ops: self.ops,
        }
    }

    fn finish_with_registers(self) -> (Path, BTreeMap<Reg, usize>) {
        let regs = self.map.iter().map(|(r, i)| (*r, *i)).collect();
        (self.finish(), regs)
    }
}

/// Turns a halting trace on a `d`-dimensional input into its path.
pub fn extract_path(trace: &Trace, d: usize) -> Result<Path, PathError> {
    extract_path_registers(trace, d).map(|(p, _)| p)
}

/// [`extract_path`] together with the index holding each register's final
/// value.
pub fn extract_path_registers(
    trace: &Trace,
    d: usize,
) -> Result<(Path, BTreeMap<Reg, usize>), PathError> {
    let bad = |m: String| PathError::MalformedTrace(m);
    let first = trace.steps.first().map_or(&trace.last, |s| &s.config);
    if (first.n, first.i, first.j) != (1, 1, 1) {
        return Err(bad("does not start in the initial configuration".into()));
    }
    let input = RatVec::new((1..=d).map(|r| first.get(r)).collect());
    if first != &Configuration::initial(&input) {
        return Err(bad(format!(
            "initial registers are not a {d}-dimensional input"
        )));
    }
    let mut b = PathBuilder::new(d);
    for (k, st) in trace.steps.iter().enumerate() {
        let next = trace.steps.get(k + 1).map_or(&trace.last, |s| &s.config);
        if matches!(st.instruction.kind, InstrKind::Halt) || !step_consistent(st, next) {
            return Err(bad(format!("step {k} is inconsistent")));
        }
        b.apply(&st.instruction, (st.config.i, st.config.j), st.branch);
    }
    Ok(b.finish_with_registers())
}

/// Replays `program` with branch outcomes forced to `bits`. Succeeds only if
/// `halt` is reached after exactly `steps` steps with every bit consumed.
pub fn forced_path(program: &BssProgram, d: usize, bits: &[bool], steps: u64) -> Option<Path> {
    let mut b = PathBuilder::new(d);
    let (mut n, mut i, mut j) = (1usize, 1usize, 1usize);
    let mut used = 0usize;
    let mut taken = 0u64;
    let halt = program.halt_label();
    while n != halt {
        if taken == steps {
            return None;
        }
        let ins = program.instruction(n)?;
        let mut outcome = None;
        let mut next = n + 1;
        if let InstrKind::Branch { to } = ins.kind {
            let bit = *bits.get(used)?;
            used += 1;
            outcome = Some(bit);
            if bit {
                next = to;
            }
        }
        b.apply(ins, (i, j), outcome);
        i = ins.ctl.i.apply(i);
        j = ins.ctl.j.apply(j);
        n = next;
        taken += 1;
    }
    (taken == steps && used == bits.len()).then(|| b.finish())
}

/// Shortlex rank of a bitstring: the bits of `k + 1` below its leading 1.
pub fn bits_rank(bits: &[bool]) -> BigUint {
    let mut k = BigUint::one();
    for &bit in bits {
        k <<= 1;
        if bit {
            k += 1u32;
        }
    }
    k - 1u32
}

pub fn bits_unrank(k: &BigUint) -> Vec<bool> {
    let m = k + 1u32;
    let len = m.bits() - 1;
    (0..len).rev().map(|p| m.bit(p)).collect()
}

pub fn path_index(d: usize, bits: &[bool], steps: u64) -> BigUint {
    pair_big(
        &pair_big(&BigUint::from(d), &bits_rank(bits)),
        &BigUint::from(steps),
    )
}

/// Inverse of [`path_index`]; `None` when `d` or `f` does not fit a machine
/// word.
pub fn decode_path_index(n: &BigUint) -> Option<(usize, Vec<bool>, u64)> {
    let (dk, f) = unpair_big(n);
    let (d, k) = unpair_big(&dk);
    Some((d.to_usize()?, bits_unrank(&k), f.to_u64()?))
}

/// The `n`-th candidate path; `None` when the candidate is inconsistent.
pub fn enumerate_paths(program: &BssProgram, n: &BigUint) -> Option<Path> {
    let (d, bits, f) = decode_path_index(n)?;
    forced_path(program, d, &bits, f)
}

/// `(d, D)` of the `n`-th candidate.
pub fn path_dims(program: &BssProgram, n: &BigUint) -> Option<(usize, usize)> {
    enumerate_paths(program, n).map(|p| (p.d, p.big_d))
}

/// The path index of the branch class containing `input`, found by following
/// the path tree where the guards evaluated at `input` lead, for at most
/// `fuel` steps.
pub fn locate_path(program: &BssProgram, input: &RatVec, fuel: u64) -> Option<BigUint> {
    let (bits, steps) = branch_outcomes(program, input, fuel)?;
    Some(path_index(input.dim(), &bits, steps))
}

/// Iterates `enumerate_paths` over `0..limit`, skipping inconsistent
/// candidates.
pub fn paths_below(program: &BssProgram, limit: u64) -> impl Iterator<Item = (u64, Path)> + '_ {
    (0..limit).filter_map(move |n| enumerate_paths(program, &BigUint::from(n)).map(|p| (n, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run, sign_program, RunOutcome};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trace_of(p: &BssProgram, input: &RatVec) -> Trace {
        match run(p, input, 10_000) {
            RunOutcome::Halted { trace, .. } => trace,
            o => panic!("{o:?}"),
        }
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

    fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
        Rat::frac(rng.gen_range(-20..=20), rng.gen_range(1..=6))
    }

    #[test]
    fn sign_trace_extracts_to_reference_path() {
        let p = sign_program();
        let t = trace_of(&p, &RatVec::from_ints(&[2]));
        let path = extract_path(&t, 1).unwrap();
        assert_eq!(path, sign_path());
        assert!(path.is_well_formed());
    }

    #[test]
    fn immediate_halt_gives_empty_path() {
        let p = BssProgram::parse("1: halt").unwrap();
        let t = trace_of(&p, &RatVec::from_ints(&[4, 5]));
        let path = extract_path(&t, 2).unwrap();
        assert!(path.ops.is_empty());
        assert_eq!(path.big_d, 2);
        assert!(path.contains(&RatVec::from_ints(&[-1, 9])));
        assert_eq!(
            path.extend(&RatVec::from_ints(&[4, 5])),
            Some(RatVec::from_ints(&[4, 5]))
        );
    }

    #[test]
    fn tampered_traces_are_rejected() {
        let p = sign_program();
        let mut t = trace_of(&p, &RatVec::from_ints(&[2]));
        t.steps[1].config.set(1, Rat::int(3));
        assert!(matches!(
            extract_path(&t, 1),
            Err(PathError::MalformedTrace(_))
        ));
        let mut t = trace_of(&p, &RatVec::from_ints(&[2]));
        t.steps[2].branch = Some(false);
        assert!(extract_path(&t, 1).is_err());
        let t = trace_of(&p, &RatVec::from_ints(&[2]));
        assert!(extract_path(&t, 0).is_err());
    }

    #[test]
    fn sign_path_membership() {
        let path = sign_path();
        assert!(path_membership(&path, &RatVec::from_ints(&[2])));
        assert!(!path_membership(&path, &RatVec::from_ints(&[0])));
        assert_eq!(
            path_extend(&path, &RatVec::from_ints(&[2])),
            Some(RatVec::from_ints(&[2, -1, 1]))
        );
    }

    #[test]
    fn replay_reproduces_register_values() {
        let p = crate::machine::mult_guard_transform(
            &BssProgram::parse(
                "1: mul r3 r1 r1\n2: sub r0 r3 r2\n3: brgeq 5\n4: div r4 r1 r3\n5: halt",
            )
            .unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut by_class: HashMap<Vec<bool>, (Path, usize)> = HashMap::new();
        for _ in 0..200 {
            let input = RatVec::new(vec![random_rat(&mut rng), random_rat(&mut rng)]);
            let RunOutcome::Halted { output, trace, .. } = run(&p, &input, 10_000) else {
                continue;
            };
            let (path, regs) = extract_path_registers(&trace, 2).unwrap();
            assert!(path.is_well_formed());
            let vals = path.extend(&input).expect("path soundness");
            for (r, i) in &regs {
                assert_eq!(
                    output.entries().get(*r).cloned().unwrap_or_default(),
                    vals.entries()[i - 1]
                );
            }
            let e = by_class
                .entry(trace.branch_bits())
                .or_insert((path.clone(), 0));
            assert_eq!(e.0, path, "same class, same path");
            e.1 += 1;
        }
        assert!(by_class.values().any(|(_, n)| *n >= 50));
    }

    #[test]
    fn extend_none_iff_not_member() {
        let p = sign_program();
        let path = sign_path();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = RatVec::new(vec![random_rat(&mut rng)]);
            assert_eq!(path.extend(&x).is_none(), !path.contains(&x));
            assert_eq!(path.contains(&x), run(&p, &x, 100).halted());
        }
    }

    #[test]
    fn bit_ranks_are_shortlex() {
        let order: Vec<Vec<bool>> = (0..7u32).map(|k| bits_unrank(&BigUint::from(k))).collect();
        assert_eq!(
            order,
            vec![
                vec![],
                vec![false],
                vec![true],
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true]
            ]
        );
        for k in 0..500u32 {
            assert_eq!(bits_rank(&bits_unrank(&BigUint::from(k))), BigUint::from(k));
        }
    }

    #[test]
    fn sign_accepting_path_appears_early() {
        let p = sign_program();
        let hits: Vec<(u64, Path)> = paths_below(&p, 101).collect();
        let accepting: Vec<_> = hits
            .iter()
            .filter(|(_, path)| path.d == 1 && path.guard_string() == [true])
            .collect();
        assert_eq!(accepting.len(), 1);
        let (n, path) = accepting[0];
        // golden: pair(pair(1, rank("1") = 2), 3 steps) = pair(8, 3)
        assert_eq!(*n, 69);
        assert_eq!(path, &sign_path());
        assert_eq!(path_index(1, &[true], 3), BigUint::from(69u32));
        assert_eq!(
            locate_path(&p, &RatVec::from_ints(&[7]), 100),
            Some(BigUint::from(69u32))
        );
    }

    #[test]
    fn enumerated_paths_are_distinct_and_well_formed() {
        let p = crate::machine::mult_guard_transform(
            &BssProgram::parse("1: mul r0 r1 r2\n2: brgeq 4\n3: set r3 1\n4: halt").unwrap(),
        );
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for (n, path) in paths_below(&p, 200_000) {
            assert!(path.is_well_formed(), "n = {n}");
            assert!(
                seen.insert((path.d, path.guard_string())),
                "duplicate at n = {n}"
            );
            count += 1;
        }
        assert!(count > 0);
        let p = sign_program();
        let mut seen = std::collections::HashSet::new();
        for (_, path) in paths_below(&p, 5000) {
            assert!(seen.insert((path.d, path.guard_string())));
        }
    }

    #[test]
    fn halting_inputs_lie_in_their_enumerated_path() {
        let p = sign_program();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = RatVec::new(vec![random_rat(&mut rng)]);
            if let Some(n) = locate_path(&p, &x, 100) {
                let path = enumerate_paths(&p, &n).unwrap();
                assert!(path.contains(&x));
            } else {
                assert!(x.entries()[0] < Rat::one());
            }
        }
    }
}
