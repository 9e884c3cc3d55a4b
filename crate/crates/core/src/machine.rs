//! BSS machines over exact rationals.
//!
//! A program is a list of instructions labelled `1..=N`; instruction `N` is
//! `halt`. Inputs occupy registers `r1..=rd`, every other register reads 0,
//! and branches test register `r0`.
//!
//! Assembly, one instruction per line (`#` starts a comment):
//!
//! ```text
//! 1: set r2 -1
//! 2: add r0 r1 r2
//! 3: brgeq 6
//! 4: set r0 0
//! 5: brgeq 5
//! 6: halt
//! ```
//!
//! `set`, the arithmetic instructions and `copy` may carry trailing
//! copy-register controls `i++`, `i=0`, `j++`, `j=0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{rat_op, Rat, RatOp, RatVec};

pub type Reg = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("division by zero at label {label}")]
    DivisionByZero { label: usize },
    #[error("label {0} is outside the program")]
    BadLabel(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum RegCtl {
    #[default]
    Keep,
    Inc,
    Reset,
}

impl RegCtl {
    pub fn apply(self, v: usize) -> usize {
        match self {
            RegCtl::Keep => v,
            RegCtl::Inc => v + 1,
            RegCtl::Reset => 0,
        }
    }
}

/// How the copy registers `i` and `j` evolve after an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CopyCtl {
    pub i: RegCtl,
    pub j: RegCtl,
}

impl CopyCtl {
    pub fn is_keep(&self) -> bool {
        self.i == RegCtl::Keep && self.j == RegCtl::Keep
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstrKind {
    Compute {
        target: Reg,
        op: RatOp,
        a: Reg,
        b: Reg,
    },
    Assign {
        target: Reg,
        value: Rat,
    },
    Branch {
        to: usize,
    },
    Copy,
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub label: usize,
    pub kind: InstrKind,
    #[serde(default)]
    pub ctl: CopyCtl,
}

impl Instruction {
    pub fn new(label: usize, kind: InstrKind) -> Instruction {
        Instruction {
            label,
            kind,
            ctl: CopyCtl::default(),
        }
    }

    pub fn with_ctl(mut self, ctl: CopyCtl) -> Instruction {
        self.ctl = ctl;
        self
    }

    /// Registers named statically by the instruction.
    pub fn registers(&self) -> Vec<Reg> {
        match &self.kind {
            InstrKind::Compute { target, a, b, .. } => vec![*target, *a, *b],
            InstrKind::Assign { target, .. } => vec![*target],
            InstrKind::Branch { .. } => vec![0],
            InstrKind::Copy | InstrKind::Halt => vec![],
        }
    }
}

fn op_name(op: RatOp) -> &'static str {
    match op {
        RatOp::Add => "add",
        RatOp::Sub => "sub",
        RatOp::Mul => "mul",
        RatOp::Div => "div",
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        match &self.kind {
            InstrKind::Compute { target, op, a, b } => {
                write!(f, "{} r{target} r{a} r{b}", op_name(*op))?
            }
            InstrKind::Assign { target, value } => write!(f, "set r{target} {value}")?,
            InstrKind::Branch { to } => write!(f, "brgeq {to}")?,
            InstrKind::Copy => write!(f, "copy")?,
            InstrKind::Halt => write!(f, "halt")?,
        }
        match self.ctl.i {
            RegCtl::Keep => {}
            RegCtl::Inc => write!(f, " i++")?,
            RegCtl::Reset => write!(f, " i=0")?,
        }
        match self.ctl.j {
            RegCtl::Keep => {}
            RegCtl::Inc => write!(f, " j++")?,
            RegCtl::Reset => write!(f, " j=0")?,
        }
        Ok(())
    }
}

/// A validated program. The assembly text is the machine's code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Instruction>", into = "Vec<Instruction>")]
pub struct BssProgram {
    instructions: Vec<Instruction>,
}

impl TryFrom<Vec<Instruction>> for BssProgram {
    type Error = MachineError;
    fn try_from(v: Vec<Instruction>) -> Result<BssProgram, MachineError> {
        BssProgram::new(v)
    }
}

impl From<BssProgram> for Vec<Instruction> {
    fn from(p: BssProgram) -> Vec<Instruction> {
        p.instructions
    }
}

impl BssProgram {
    pub fn new(instructions: Vec<Instruction>) -> Result<BssProgram, MachineError> {
        let n = instructions.len();
        if n == 0 {
            return Err(MachineError::Invalid("empty program".into()));
        }
        for (pos, ins) in instructions.iter().enumerate() {
            if ins.label != pos + 1 {
                return Err(MachineError::Invalid(format!(
                    "label {} at position {}, expected {}",
                    ins.label,
                    pos + 1,
                    pos + 1
                )));
            }
            match &ins.kind {
                InstrKind::Branch { to } if *to == 0 || *to > n => {
                    return Err(MachineError::Invalid(format!(
                        "branch at {} targets missing label {to}",
                        ins.label
                    )));
                }
                InstrKind::Halt if pos + 1 != n => {
                    return Err(MachineError::Invalid(format!(
                        "halt at {} is not the last instruction",
                        ins.label
                    )));
                }
                InstrKind::Branch { .. } | InstrKind::Halt if !ins.ctl.is_keep() => {
                    return Err(MachineError::Invalid(format!(
                        "copy-register control on {} is only allowed on set/arithmetic/copy",
                        ins.label
                    )));
                }
                _ => {}
            }
        }
        if !matches!(instructions[n - 1].kind, InstrKind::Halt) {
            return Err(MachineError::Invalid(
                "last instruction must be halt".into(),
            ));
        }
        Ok(BssProgram { instructions })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Label of the halt instruction, `N`.
    pub fn halt_label(&self) -> usize {
        self.instructions.len()
    }

    pub fn instruction(&self, label: usize) -> Option<&Instruction> {
        label.checked_sub(1).and_then(|p| self.instructions.get(p))
    }

    pub fn constants(&self) -> BTreeSet<Rat> {
        self.instructions
            .iter()
            .filter_map(|i| match &i.kind {
                InstrKind::Assign { value, .. } => Some(value.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn max_register(&self) -> Reg {
        self.instructions
            .iter()
            .flat_map(Instruction::registers)
            .max()
            .unwrap_or(0)
    }

    pub fn has_copy(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i.kind, InstrKind::Copy))
    }

    pub fn to_assembly(&self) -> String {
        let mut s = String::new();
        for ins in &self.instructions {
            s.push_str(&ins.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<BssProgram, MachineError> {
        let mut out = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            out.push(parse_line(line).map_err(|msg| MachineError::Parse {
                line: lineno + 1,
                msg,
            })?);
        }
        BssProgram::new(out)
    }
}

impl FromStr for BssProgram {
    type Err = MachineError;
    fn from_str(s: &str) -> Result<BssProgram, MachineError> {
        BssProgram::parse(s)
    }
}

impl fmt::Display for BssProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_assembly())
    }
}

fn parse_reg(tok: &str) -> Result<Reg, String> {
    tok.strip_prefix('r')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("expected register, found {tok:?}"))
}

fn parse_line(line: &str) -> Result<Instruction, String> {
    let (label, rest) = line.split_once(':').ok_or("missing label")?;
    let label: usize = label
        .trim()
        .parse()
        .map_err(|_| format!("bad label {label:?}"))?;
    let mut toks: Vec<&str> = rest.split_whitespace().collect();
    let mut ctl = CopyCtl::default();
    while let Some(last) = toks.last() {
        match *last {
            "i++" => ctl.i = RegCtl::Inc,
            "i=0" => ctl.i = RegCtl::Reset,
            "j++" => ctl.j = RegCtl::Inc,
            "j=0" => ctl.j = RegCtl::Reset,
            _ => break,
        }
        toks.pop();
    }
    let (&mnemonic, args) = toks.split_first().ok_or("missing mnemonic")?;
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!(
                "{mnemonic} takes {n} operands, found {}",
                args.len()
            ))
        }
    };
    let kind = match mnemonic {
        "set" => {
            want(2)?;
            let value = args[1].parse().map_err(|e| format!("{e}"))?;
            InstrKind::Assign {
                target: parse_reg(args[0])?,
                value,
            }
        }
        "add" | "sub" | "mul" | "div" => {
            want(3)?;
            let op = match mnemonic {
                "add" => RatOp::Add,
                "sub" => RatOp::Sub,
                "mul" => RatOp::Mul,
                _ => RatOp::Div,
            };
            InstrKind::Compute {
                target: parse_reg(args[0])?,
                op,
                a: parse_reg(args[1])?,
                b: parse_reg(args[2])?,
            }
        }
        "brgeq" => {
            want(1)?;
            InstrKind::Branch {
                to: args[0]
                    .parse()
                    .map_err(|_| format!("bad target {:?}", args[0]))?,
            }
        }
        "copy" => {
            want(0)?;
            InstrKind::Copy
        }
        "halt" => {
            want(0)?;
            InstrKind::Halt
        }
        other => return Err(format!("unknown instruction {other:?}")),
    };
    Ok(Instruction { label, kind, ctl })
}

// ---------------------------------------------------------------------------
// Execution

/// `(n, i, j, registers)`. Zero registers are never stored, so equality is
/// structural.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    regs: BTreeMap<Reg, Rat>,
}

impl Configuration {
    pub fn initial(input: &RatVec) -> Configuration {
        let mut c = Configuration {
            n: 1,
            i: 1,
            j: 1,
            regs: BTreeMap::new(),
        };
        for (k, x) in input.entries().iter().enumerate() {
            c.set(k + 1, x.clone());
        }
        c
    }

    pub fn get(&self, r: Reg) -> Rat {
        self.regs.get(&r).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: Reg, v: Rat) {
        if v.is_zero() {
            self.regs.remove(&r);
        } else {
            self.regs.insert(r, v);
        }
    }

    pub fn nonzero_registers(&self) -> impl Iterator<Item = (Reg, &Rat)> {
        self.regs.iter().map(|(r, v)| (*r, v))
    }

    /// `r0..=rmax`, where `rmax` is the larger of `min_len - 1` and the
    /// highest nonzero register.
    pub fn dense(&self, min_len: usize) -> RatVec {
        let len = self
            .regs
            .keys()
            .next_back()
            .map_or(0, |m| m + 1)
            .max(min_len);
        RatVec::new((0..len).map(|r| self.get(r)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(Configuration),
    Halted,
}

/// Executes one instruction, returning the successor and the branch outcome.
fn exec(
    ins: &Instruction,
    config: &Configuration,
) -> Result<(Configuration, Option<bool>), MachineError> {
    let mut next = config.clone();
    next.n = config.n + 1;
    let mut taken = None;
    match &ins.kind {
        InstrKind::Compute { target, op, a, b } => {
            let v = rat_op(*op, &config.get(*a), &config.get(*b))
                .map_err(|_| MachineError::DivisionByZero { label: ins.label })?;
            next.set(*target, v);
        }
        InstrKind::Assign { target, value } => next.set(*target, value.clone()),
        InstrKind::Copy => next.set(config.i, config.get(config.j)),
        InstrKind::Branch { to } => {
            let t = !config.get(0).is_negative();
            if t {
                next.n = *to;
            }
            taken = Some(t);
        }
        InstrKind::Halt => unreachable!("halt is not executed"),
    }
    next.i = ins.ctl.i.apply(config.i);
    next.j = ins.ctl.j.apply(config.j);
    Ok((next, taken))
}

pub fn step(program: &BssProgram, config: &Configuration) -> Result<Step, MachineError> {
    if config.n == program.halt_label() {
        return Ok(Step::Halted);
    }
    let ins = program
        .instruction(config.n)
        .ok_or(MachineError::BadLabel(config.n))?;
    exec(ins, config).map(|(c, _)| Step::Next(c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub config: Configuration,
    pub instruction: Instruction,
    pub branch: Option<bool>,
}

/// Every executed step plus the configuration the run ended in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub last: Configuration,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Branch outcomes in execution order.
    pub fn branch_bits(&self) -> Vec<bool> {
        self.steps.iter().filter_map(|s| s.branch).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted {
        output: RatVec,
        steps: u64,
        trace: Trace,
    },
    OutOfFuel,
    /// A zero divisor; the machine is treated as diverging on this input.
    DivisionByZero {
        label: usize,
        steps: u64,
    },
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }

    pub fn output(&self) -> Option<&RatVec> {
        match self {
            RunOutcome::Halted { output, .. } => Some(output),
            _ => None,
        }
    }
}

fn drive(
    program: &BssProgram,
    input: &RatVec,
    fuel: u64,
    mut record: Option<&mut Vec<TraceStep>>,
) -> Result<(Configuration, u64), RunOutcome> {
    let mut config = Configuration::initial(input);
    let mut steps = 0u64;
    let halt = program.halt_label();
    while config.n != halt {
        if steps == fuel {
            return Err(RunOutcome::OutOfFuel);
        }
        let ins = &program.instructions[config.n - 1];
        let (next, taken) = match exec(ins, &config) {
            Ok(r) => r,
            Err(_) => {
                return Err(RunOutcome::DivisionByZero {
                    label: ins.label,
                    steps,
                })
            }
        };
        if let Some(rec) = record.as_deref_mut() {
            rec.push(TraceStep {
                config,
                instruction: ins.clone(),
                branch: taken,
            });
        }
        config = next;
        steps += 1;
    }
    Ok((config, steps))
}

/// Runs from `(1, 1, 1, input)` for at most `fuel` steps, recording a trace.
pub fn run(program: &BssProgram, input: &RatVec, fuel: u64) -> RunOutcome {
    let mut rec = Vec::new();
    match drive(program, input, fuel, Some(&mut rec)) {
        Ok((last, steps)) => RunOutcome::Halted {
            output: last.dense(input.dim() + 1),
            steps,
            trace: Trace { steps: rec, last },
        },
        Err(o) => o,
    }
}

/// Like [`run`] but without a trace; the returned trace is empty.
pub fn run_quiet(program: &BssProgram, input: &RatVec, fuel: u64) -> RunOutcome {
    match drive(program, input, fuel, None) {
        Ok((last, steps)) => RunOutcome::Halted {
            output: last.dense(input.dim() + 1),
            steps,
            trace: Trace {
                steps: Vec::new(),
                last,
            },
        },
        Err(o) => o,
    }
}

/// Branch outcomes and step count of a run that halts within `fuel`.
pub fn branch_outcomes(
    program: &BssProgram,
    input: &RatVec,
    fuel: u64,
) -> Option<(Vec<bool>, u64)> {
    let mut config = Configuration::initial(input);
    let mut bits = Vec::new();
    let mut steps = 0u64;
    while config.n != program.halt_label() {
        if steps == fuel {
            return None;
        }
        let (next, taken) = exec(&program.instructions[config.n - 1], &config).ok()?;
        bits.extend(taken);
        config = next;
        steps += 1;
    }
    Some((bits, steps))
}

/// Checks that `next` follows from `step.config` by executing
/// `step.instruction`.
pub(crate) fn step_consistent(program_step: &TraceStep, next: &Configuration) -> bool {
    if program_step.instruction.label != program_step.config.n {
        return false;
    }
    match exec(&program_step.instruction, &program_step.config) {
        Ok((c, taken)) => &c == next && taken == program_step.branch,
        Err(_) => false,
    }
}

// ---------------------------------------------------------------------------
// Guard transformation

/// Rewrites every `mul` and `div` so that it only ever runs on nonzero
/// operands. A zero factor assigns 0 directly, a zero divisor loops forever
/// and a zero dividend assigns 0.
///
/// Two scratch registers above the program's highest register are used: `s`
/// saves `r0` across the tests and `z` is never written, so it reads 0. The
/// first `max + 1` registers of every output agree with the original.
pub fn mult_guard_transform(program: &BssProgram) -> BssProgram {
    let needs = program.instructions.iter().any(|i| {
        matches!(
            i.kind,
            InstrKind::Compute {
                op: RatOp::Mul | RatOp::Div,
                ..
            }
        )
    });
    if !needs {
        return program.clone();
    }
    let s = program.max_register() + 1;
    let z = s + 1;

    let blocks: Vec<Vec<Proto>> = program
        .instructions
        .iter()
        .map(|ins| expand(ins, s, z))
        .collect();
    let mut start = Vec::with_capacity(blocks.len());
    let mut next = 1;
    for b in &blocks {
        start.push(next);
        next += b.len();
    }
    let mut out = Vec::with_capacity(next - 1);
    for (bi, block) in blocks.into_iter().enumerate() {
        let base = start[bi];
        for (off, p) in block.into_iter().enumerate() {
            let kind = match p.kind {
                ProtoKind::Plain(k) => k,
                ProtoKind::Local(o) => InstrKind::Branch { to: base + o },
                ProtoKind::Global(l) => InstrKind::Branch { to: start[l - 1] },
            };
            out.push(Instruction {
                label: base + off,
                kind,
                ctl: p.ctl,
            });
        }
    }
    BssProgram::new(out).expect("transformation preserves well-formedness")
}

enum ProtoKind {
    Plain(InstrKind),
    Local(usize),
    Global(usize),
}

struct Proto {
    kind: ProtoKind,
    ctl: CopyCtl,
}

fn plain(kind: InstrKind) -> Proto {
    Proto {
        kind: ProtoKind::Plain(kind),
        ctl: CopyCtl::default(),
    }
}

fn local(to: usize) -> Proto {
    Proto {
        kind: ProtoKind::Local(to),
        ctl: CopyCtl::default(),
    }
}

fn add(target: Reg, a: Reg, b: Reg) -> Proto {
    plain(InstrKind::Compute {
        target,
        op: RatOp::Add,
        a,
        b,
    })
}

fn set_zero(target: Reg) -> Proto {
    plain(InstrKind::Assign {
        target,
        value: Rat::zero(),
    })
}

/// Six instructions starting at `at`; jumps to `on_zero` when `x` is zero and
/// falls through to `at + 6` otherwise. Clobbers `r0`.
fn zero_test(out: &mut Vec<Proto>, x: Reg, z: Reg, on_zero: usize) {
    let at = out.len();
    out.push(add(0, x, z));
    out.push(local(at + 4));
    out.push(set_zero(0));
    out.push(local(at + 6));
    out.push(plain(InstrKind::Compute {
        target: 0,
        op: RatOp::Sub,
        a: z,
        b: 0,
    }));
    out.push(local(on_zero));
}

fn expand(ins: &Instruction, s: Reg, z: Reg) -> Vec<Proto> {
    let (target, op, a, b) = match &ins.kind {
        InstrKind::Compute {
            target,
            op: op @ (RatOp::Mul | RatOp::Div),
            a,
            b,
        } => (*target, *op, *a, *b),
        InstrKind::Branch { to } => {
            return vec![Proto {
                kind: ProtoKind::Global(*to),
                ctl: ins.ctl,
            }];
        }
        k => {
            return vec![Proto {
                kind: ProtoKind::Plain(k.clone()),
                ctl: ins.ctl,
            }]
        }
    };
    // r0 is clobbered by the tests, so operands naming r0 read the saved copy
    let src = |r: Reg| if r == 0 { s } else { r };
    let mut out = Vec::new();
    out.push(add(s, 0, z));
    match op {
        RatOp::Mul => {
            // 0 save, 1..=6 test a, 7..=12 test b, 13 restore, 14 op, 15 resave,
            // 16-17 jump, 18..=20 zero case, 21 restore
            zero_test(&mut out, src(a), z, 18);
            zero_test(&mut out, src(b), z, 18);
            out.push(add(0, s, z));
            out.push(Proto {
                kind: ProtoKind::Plain(ins.kind.clone()),
                ctl: ins.ctl,
            });
            out.push(add(s, 0, z));
            out.push(set_zero(0));
            out.push(local(21));
            out.push(add(0, s, z));
            out.push(Proto {
                kind: ProtoKind::Plain(InstrKind::Assign {
                    target,
                    value: Rat::zero(),
                }),
                ctl: ins.ctl,
            });
            out.push(add(s, 0, z));
            out.push(add(0, s, z));
        }
        _ => {
            // 0 save, 1..=6 test divisor, 7..=12 test dividend, 13 restore,
            // 14 op, 15 resave, 16-17 jump, 18..=22 zero dividend,
            // 23-24 divergence loop, 25 restore
            zero_test(&mut out, src(b), z, 23);
            zero_test(&mut out, src(a), z, 18);
            out.push(add(0, s, z));
            out.push(Proto {
                kind: ProtoKind::Plain(ins.kind.clone()),
                ctl: ins.ctl,
            });
            out.push(add(s, 0, z));
            out.push(set_zero(0));
            out.push(local(25));
            out.push(add(0, s, z));
            out.push(Proto {
                kind: ProtoKind::Plain(InstrKind::Assign {
                    target,
                    value: Rat::zero(),
                }),
                ctl: ins.ctl,
            });
            out.push(add(s, 0, z));
            out.push(set_zero(0));
            out.push(local(25));
            out.push(set_zero(0));
            out.push(local(24));
            out.push(add(0, s, z));
        }
    }
    out
}

/// The reference program: halts iff `r1 >= 1`.
pub const SIGN_ASM: &str = "\
1: set r2 -1
2: add r0 r1 r2
3: brgeq 6
4: set r0 0
5: brgeq 5
6: halt
";

pub fn sign_program() -> BssProgram {
    BssProgram::parse(SIGN_ASM).expect("reference program parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> RatVec {
        RatVec::from_ints(xs)
    }

    #[test]
    fn assembly_roundtrip() {
        let p = sign_program();
        assert_eq!(p.instructions().len(), 6);
        assert_eq!(BssProgram::parse(&p.to_assembly()).unwrap(), p);
        let with_ctl = BssProgram::parse("1: copy i++ j=0\n2: halt").unwrap();
        assert_eq!(
            with_ctl.instructions()[0].ctl,
            CopyCtl {
                i: RegCtl::Inc,
                j: RegCtl::Reset
            }
        );
        assert_eq!(with_ctl.to_assembly(), "1: copy i++ j=0\n2: halt\n");
    }

    #[test]
    fn rejects_malformed_programs() {
        assert!(BssProgram::parse("").is_err());
        assert!(BssProgram::parse("1: brgeq 3\n2: halt").is_err());
        assert!(BssProgram::parse("2: halt").is_err());
        assert!(BssProgram::parse("1: halt\n2: halt").is_err());
        assert!(BssProgram::parse("1: set r0 1").is_err());
        assert!(BssProgram::parse("1: frob r1\n2: halt").is_err());
        assert!(BssProgram::parse("1: brgeq 2 i++\n2: halt").is_err());
        let err = BssProgram::parse("# c\n1: add r0 r1\n2: halt").unwrap_err();
        assert!(matches!(err, MachineError::Parse { line: 2, .. }));
    }

    #[test]
    fn sign_halts_on_two() {
        let p = sign_program();
        match run(&p, &v(&[2]), 4) {
            RunOutcome::Halted {
                output,
                steps,
                trace,
            } => {
                assert_eq!(steps, 3);
                assert_eq!(output, v(&[1, 2, -1]));
                assert_eq!(trace.branch_bits(), vec![true]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(run(&p, &v(&[2]), 2), RunOutcome::OutOfFuel);
    }

    #[test]
    fn sign_diverges_on_zero() {
        let p = sign_program();
        for fuel in [0, 1, 5, 100, 10_000] {
            assert_eq!(run_quiet(&p, &v(&[0]), fuel), RunOutcome::OutOfFuel);
        }
    }

    #[test]
    fn step_semantics() {
        let p = BssProgram::parse("1: brgeq 3\n2: div r1 r1 r2\n3: halt").unwrap();
        let c = Configuration::initial(&v(&[]));
        match step(&p, &c).unwrap() {
            Step::Next(n) => assert_eq!(n.n, 3),
            Step::Halted => panic!(),
        }
        let mut c2 = c.clone();
        c2.n = 2;
        assert_eq!(
            step(&p, &c2),
            Err(MachineError::DivisionByZero { label: 2 })
        );
        c2.n = 3;
        assert_eq!(step(&p, &c2), Ok(Step::Halted));
        assert!(matches!(
            run(
                &BssProgram::parse("1: set r0 -1\n2: brgeq 1\n3: div r1 r1 r2\n4: halt").unwrap(),
                &v(&[]),
                10
            ),
            RunOutcome::DivisionByZero { label: 3, steps: 2 }
        ));
    }

    #[test]
    fn copy_moves_through_copy_registers() {
        // i = j = 1 initially; j++ then copy writes r1 <- r2
        let p = BssProgram::parse("1: set r5 0 j++\n2: copy i++\n3: copy\n4: halt").unwrap();
        let out = run(&p, &v(&[7, 9]), 10);
        let c = match out {
            RunOutcome::Halted { trace, .. } => trace.last,
            o => panic!("{o:?}"),
        };
        assert_eq!(c.get(1), Rat::int(9));
        assert_eq!(c.get(2), Rat::int(9));
        assert_eq!((c.i, c.j), (2, 2));
    }

    #[test]
    fn fuel_zero_never_halts_a_nontrivial_program() {
        assert_eq!(run(&sign_program(), &v(&[5]), 0), RunOutcome::OutOfFuel);
        let trivial = BssProgram::parse("1: halt").unwrap();
        assert!(run(&trivial, &v(&[5]), 0).halted());
    }

    #[test]
    fn transform_leaves_linear_programs_alone() {
        let p = sign_program();
        assert_eq!(mult_guard_transform(&p), p);
    }

    #[test]
    fn transform_handles_r0_operands() {
        let p = BssProgram::parse("1: mul r0 r0 r1\n2: div r2 r1 r0\n3: halt").unwrap();
        let t = mult_guard_transform(&p);
        for (a, b) in [(0, 0), (3, 0), (0, 3), (2, 5), (-2, 3)] {
            let input = v(&[a, b]);
            // r0 starts at 0 so the division always sees a zero divisor
            assert!(matches!(
                run_quiet(&p, &input, 100),
                RunOutcome::DivisionByZero { .. }
            ));
            assert_eq!(run_quiet(&t, &input, 1000), RunOutcome::OutOfFuel);
        }
        let q = BssProgram::parse("1: add r0 r1 r2\n2: mul r0 r0 r1\n3: div r3 r0 r2\n4: halt")
            .unwrap();
        let tq = mult_guard_transform(&q);
        for (a, b) in [(1, 2), (-3, 5), (0, 4), (2, -2), (7, 1)] {
            let input = v(&[a, b]);
            let o = run_quiet(&q, &input, 100);
            let n = run_quiet(&tq, &input, 1000);
            let keep = q.max_register() + 1;
            let prefix = |r: &RatVec| {
                RatVec::new(
                    (0..keep)
                        .map(|i| r.entries().get(i).cloned().unwrap_or_default())
                        .collect(),
                )
            };
            assert_eq!(
                o.output().map(prefix),
                n.output().map(prefix),
                "input {input}"
            );
        }
    }
}
