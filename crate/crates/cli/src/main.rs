//! `realword`: batch front end for the simulator, the word-problem tools and
//! the halting reduction.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use realword_core::britton::{britton_reduce_counted, bs12, hnn_is_identity, HnnStructure};
use realword_core::examples::{small_rat, Example};
use realword_core::machine::{run, BssProgram, RunOutcome};
use realword_core::path::enumerate_paths;
use realword_core::presentation::Presentation;
use realword_core::reduction::{check_reduction_with, reduce_halting, Row};
use realword_core::selftest::{self, figure1_row, nonneg_span_centralizer, Scale, PROGRAMS};
use realword_core::words::Word;
use realword_core::wp::{verify_certificate, wp_semidecide, Certificate, WpOutcome};
use realword_core::RatVec;

#[derive(Parser)]
#[command(
    name = "realword",
    version,
    about = "Word problems over the reals, machines and the halting reduction"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON record per line.
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on one input.
    Run {
        /// Assembly file or built-in program name.
        program: String,
        /// Comma-separated rationals, e.g. `2,1/3`.
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[arg(long, default_value_t = 1000)]
        fuel: u64,
        /// Print every configuration.
        #[arg(long)]
        trace: bool,
    },
    /// List the first computation paths of a machine.
    Paths {
        program: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Largest path index examined.
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
    /// Search for a certificate that a word is trivial.
    Wp {
        /// Presentation JSON file or built-in example name.
        presentation: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        /// Write the certificate here instead of printing it.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Check a certificate against a word.
    Verify {
        presentation: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Britton-reduce a word in a built-in HNN extension.
    HnnReduce {
        #[arg(long, value_enum, default_value_t = Structure::Bs12)]
        structure: Structure,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Build the word-problem instance for inputs and compare it with simulation.
    Reduce {
        program: String,
        /// An input vector; repeat for several.
        #[arg(long, allow_hyphen_values = true)]
        input: Vec<String>,
        /// Additional random inputs drawn from `--seed`.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Coherence check of the operation table.
    Figure1 {
        /// A row name, or `all`.
        #[arg(long, default_value = "all")]
        row: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        violating: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide a word with an example's exact oracle.
    Examples {
        #[arg(value_enum)]
        example: ExampleName,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Run every acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A tenth of the cases.
        #[arg(long)]
        quick: bool,
        /// Run only this suite (1-10).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10))]
        suite: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    /// `<a, t | t a t^-1 = a^2>`.
    Bs12,
    /// `t` commuting with `<encode_w(r) : r_1 >= 0>` over the free group.
    Centralizer,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Circle,
    Torus,
    Sl2,
    RationalsA,
    RationalsB,
    Qgroup,
}

impl ExampleName {
    fn example(self) -> Example {
        match self {
            ExampleName::Circle => Example::Circle,
            ExampleName::Torus => Example::Torus,
            ExampleName::Sl2 => Example::Sl2,
            ExampleName::RationalsA => Example::RationalsA,
            ExampleName::RationalsB => Example::RationalsB,
            ExampleName::Qgroup => Example::QGroup,
        }
    }
}

enum Fail {
    Usage(String),
    /// A disagreement or failed check; the report is already printed.
    Check,
}

type Outcome = Result<(), Fail>;

fn usage(flag: &str, e: impl std::fmt::Display) -> Fail {
    Fail::Usage(format!("{flag}: {e}"))
}

struct Out {
    format: Format,
}

impl Out {
    /// Prints `text` or the record, depending on the format.
    fn emit(&self, text: impl std::fmt::Display, record: impl Serialize) {
        let mut stdout = io::stdout().lock();
        let res = match self.format {
            Format::Text => writeln!(stdout, "{text}"),
            Format::Jsonl => writeln!(
                stdout,
                "{}",
                serde_json::to_string(&record).expect("serializable record")
            ),
        };
        if res.is_err() {
            // the reader went away
            std::process::exit(0);
        }
    }
}

fn load_program(arg: &str) -> Result<BssProgram, Fail> {
    if let Some(p) = selftest::program(arg) {
        return Ok(p);
    }
    let text = fs::read_to_string(arg).map_err(|e| usage("<program>", format!("{arg}: {e}")))?;
    BssProgram::parse(&text).map_err(|e| usage("<program>", format!("{arg}: {e}")))
}

fn load_presentation(arg: &str) -> Result<Presentation, Fail> {
    if let Ok(ex) = arg.parse::<Example>() {
        return Ok(ex.presentation());
    }
    let text =
        fs::read_to_string(arg).map_err(|e| usage("<presentation>", format!("{arg}: {e}")))?;
    Presentation::from_json(&text).map_err(|e| usage("<presentation>", format!("{arg}: {e}")))
}

fn parse_word(s: &str) -> Result<Word, Fail> {
    s.parse().map_err(|e| usage("--word", e))
}

fn parse_input(s: &str) -> Result<RatVec, Fail> {
    RatVec::parse_list(s).map_err(|e| usage("--input", format!("{s:?}: {e}")))
}

fn cmd_run(out: &Out, program: &str, input: &str, fuel: u64, trace: bool) -> Outcome {
    let prog = load_program(program)?;
    let r = parse_input(input)?;
    match run(&prog, &r, fuel) {
        RunOutcome::Halted {
            output,
            steps,
            trace: t,
        } => {
            if trace {
                for s in &t.steps {
                    out.emit(format!("{:>6} {}", s.config.n, s.instruction), s);
                }
            }
            out.emit(
                format!("HALTED after {steps} steps: {output}"),
                json!({"outcome": "halted", "steps": steps, "output": output}),
            );
        }
        RunOutcome::OutOfFuel => out.emit(
            format!("OUT OF FUEL after {fuel} steps"),
            json!({"outcome": "out-of-fuel", "fuel": fuel}),
        ),
        RunOutcome::DivisionByZero { label, steps } => out.emit(
            format!("DIVISION BY ZERO at label {label} after {steps} steps"),
            json!({"outcome": "division-by-zero", "label": label, "steps": steps}),
        ),
    }
    Ok(())
}

fn cmd_paths(out: &Out, program: &str, count: usize, limit: u64) -> Outcome {
    let prog = load_program(program)?;
    let mut shown = 0;
    for n in 0..limit {
        if shown == count {
            break;
        }
        let Some(path) = enumerate_paths(&prog, &BigUint::from(n)) else {
            continue;
        };
        shown += 1;
        let ops: Vec<String> = path.ops.iter().map(ToString::to_string).collect();
        out.emit(
            format!("{n}: d={} D={} [{}]", path.d, path.big_d, ops.join("; ")),
            json!({"index": n, "path": path}),
        );
    }
    Ok(())
}

fn cmd_wp(
    out: &Out,
    presentation: &str,
    word: &str,
    fuel: u64,
    cert_path: Option<PathBuf>,
) -> Outcome {
    let p = load_presentation(presentation)?;
    let w = parse_word(word)?;
    match wp_semidecide(&p, &w, fuel) {
        WpOutcome::Proved(c) => {
            let text = serde_json::to_string_pretty(&c).expect("serializable certificate");
            match cert_path {
                Some(path) => {
                    fs::write(&path, text)
                        .map_err(|e| usage("--certificate", format!("{}: {e}", path.display())))?;
                    out.emit(
                        format!(
                            "PROVED with {} factors, certificate written to {}",
                            c.len(),
                            path.display()
                        ),
                        json!({"outcome": "proved", "factors": c.len(), "certificate": path}),
                    );
                }
                None => out.emit(
                    format!("PROVED with {} factors\n{text}", c.len()),
                    json!({"outcome": "proved", "factors": c.len(), "certificate": c}),
                ),
            }
        }
        WpOutcome::Unknown => out.emit(
            format!("UNKNOWN within fuel {fuel}"),
            json!({"outcome": "unknown", "fuel": fuel}),
        ),
    }
    Ok(())
}

fn cmd_verify(out: &Out, presentation: &str, word: &str, cert_path: &PathBuf) -> Outcome {
    let p = load_presentation(presentation)?;
    let w = parse_word(word)?;
    let text = fs::read_to_string(cert_path)
        .map_err(|e| usage("--certificate", format!("{}: {e}", cert_path.display())))?;
    let c: Certificate = serde_json::from_str(&text).map_err(|e| usage("--certificate", e))?;
    let ok = verify_certificate(&p, &w, &c);
    out.emit(if ok { "VALID" } else { "INVALID" }, json!({"valid": ok}));
    if ok {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn cmd_hnn(out: &Out, structure: Structure, word: &str) -> Outcome {
    let w = parse_word(word)?;
    let h: HnnStructure = match structure {
        Structure::Bs12 => bs12(),
        Structure::Centralizer => nonneg_span_centralizer(),
    };
    let (reduced, pinches) = britton_reduce_counted(&h, &w).map_err(|e| usage("--word", e))?;
    let trivial = hnn_is_identity(&h, &w).map_err(|e| usage("--word", e))?;
    out.emit(
        format!(
            "{}\npinches: {pinches}\nidentity: {trivial}",
            if reduced.is_empty() {
                "1".into()
            } else {
                reduced.to_string()
            }
        ),
        json!({"reduced": reduced.to_string(), "pinches": pinches, "identity": trivial}),
    );
    Ok(())
}

fn random_input(rng: &mut ChaCha8Rng, dim: usize) -> RatVec {
    RatVec::new(
        (0..dim)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    realword_core::Rat::int(rng.gen_range(0..=20))
                } else {
                    small_rat(rng)
                }
            })
            .collect(),
    )
}

fn cmd_reduce(
    out: &Out,
    program: &str,
    inputs: &[String],
    samples: usize,
    common: &Common,
    fault: bool,
) -> Outcome {
    let prog = load_program(program)?;
    let mut rs: Vec<RatVec> = inputs
        .iter()
        .map(|s| parse_input(s))
        .collect::<Result<_, _>>()?;
    if samples > 0 {
        let dim = match rs.first() {
            Some(r) => r.dim(),
            None => PROGRAMS.iter().find(|p| p.0 == program).map_or(1, |p| p.1),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        rs.extend((0..samples).map(|_| random_input(&mut rng, dim)));
    }
    if rs.is_empty() {
        return Err(usage("--input", "give at least one input or --samples"));
    }
    let report = check_reduction_with(&prog, &rs, common.fuel, fault);
    for rec in &report.records {
        let (q, comm) = reduce_halting(&rec.input);
        let verdict = if rec.agree { "agree" } else { "DISAGREE" };
        out.emit(
            format!(
                "input {}: simulation {:?}, group {:?}, {verdict}\n  query: {q}\n  commutator: {comm}",
                rec.input, rec.simulated, rec.group
            ),
            json!({"record": rec, "query": q.to_string(), "commutator": comm.to_string()}),
        );
    }
    let bad = report.disagreements();
    out.emit(
        format!("{} inputs, {bad} disagreements", report.records.len()),
        json!({"inputs": report.records.len(), "disagreements": bad}),
    );
    if bad == 0 {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn cmd_figure1(out: &Out, row: &str, samples: usize, violating: usize, seed: u64) -> Outcome {
    let rows: Vec<Row> = if row == "all" {
        Row::ALL.to_vec()
    } else {
        vec![row.parse().map_err(|e| usage("--row", e))?]
    };
    let mut failed = false;
    for r in rows {
        let rep = figure1_row(r, samples, violating, seed);
        failed |= rep.failures > 0;
        let verdict = if rep.failures == 0 { "PASS" } else { "FAIL" };
        let mut text = format!(
            "{verdict} {:<10} {} positive, {} violating, {} failures",
            r.name(),
            rep.positive,
            rep.violating,
            rep.failures
        );
        if let Some(w) = &rep.witness {
            text.push_str(&format!(" (first failure: {w})"));
        }
        out.emit(text, &rep);
    }
    if failed {
        Err(Fail::Check)
    } else {
        Ok(())
    }
}

fn cmd_examples(out: &Out, name: ExampleName, word: &str) -> Outcome {
    let w = parse_word(word)?;
    let ex = name.example();
    let v = ex.oracle(&w).map_err(|e| usage("--word", e))?;
    out.emit(
        v,
        json!({"example": ex.name(), "word": w.to_string(), "identity": v}),
    );
    Ok(())
}

fn cmd_selftest(out: &Out, seed: u64, quick: bool, suite: Option<u64>) -> Outcome {
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let ids: Vec<usize> = match suite {
        Some(s) => vec![s as usize],
        None => (1..=selftest::SUITES.len()).collect(),
    };
    let mut failed = 0;
    for id in &ids {
        let rep = selftest::run_suite(*id, seed, scale);
        failed += usize::from(!rep.passed());
        out.emit(&rep, &rep);
    }
    out.emit(
        format!("{} suites, {failed} failed", ids.len()),
        json!({"suites": ids.len(), "failed": failed}),
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { format: cli.format };
    let result = match cli.command {
        Command::Run {
            program,
            input,
            fuel,
            trace,
        } => cmd_run(&out, &program, &input, fuel, trace),
        Command::Paths {
            program,
            count,
            limit,
        } => cmd_paths(&out, &program, count, limit),
        Command::Wp {
            presentation,
            word,
            fuel,
            certificate,
        } => cmd_wp(&out, &presentation, &word, fuel, certificate),
        Command::Verify {
            presentation,
            word,
            certificate,
        } => cmd_verify(&out, &presentation, &word, &certificate),
        Command::HnnReduce { structure, word } => cmd_hnn(&out, structure, &word),
        Command::Reduce {
            program,
            input,
            samples,
            common,
            inject_fault,
        } => cmd_reduce(&out, &program, &input, samples, &common, inject_fault),
        Command::Figure1 {
            row,
            samples,
            violating,
            seed,
        } => cmd_figure1(&out, &row, samples, violating, seed),
        Command::Examples { example, word } => cmd_examples(&out, example, &word),
        Command::Selftest { seed, quick, suite } => cmd_selftest(&out, seed, quick, suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Check) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
