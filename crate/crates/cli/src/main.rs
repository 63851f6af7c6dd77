//! `zzvine` — maintain zigzag persistence barcodes under local filtration
//! edits from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 failing operation, 4 oracle
//! mismatch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zzvine_core::cellmodel::ZigzagFiltration;
use zzvine_core::gen::{FiltrationGen, OpGen, OpKind};
use zzvine_core::io;
use zzvine_core::oracle::ud_barcode_oracle;
use zzvine_core::reps::{f_barcode, u_barcode};
use zzvine_core::updates::{apply_op, Bundle, UpdateOp, VineRecord};
use zzvine_core::updown::convert;

const EXIT_INPUT: u8 = 2;
const EXIT_OP: u8 = 3;
const EXIT_ORACLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "zzvine",
    about = "Zigzag persistence barcodes under local filtration edits",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a filtration into its up-down listing (.zzud).
    Convert(ConvertArgs),
    /// Compute the barcode of a filtration (.zzb).
    Barcode(BarcodeArgs),
    /// Apply an op script, writing the final barcode and a vine log.
    Apply(ApplyArgs),
    /// Check all maintained invariants, optionally after a script.
    Validate(ValidateArgs),
    /// Compare the maintained barcode against the from-scratch oracle.
    CompareOracle(CompareOracleArgs),
    /// Time random ops per kind across doubling sizes; CSV to stdout.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ConvertArgs {
    /// Input filtration (.zzf).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BarcodeArgs {
    /// Input filtration (.zzf).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append the creator/destroyer arrows and pair kind to each bar.
    #[arg(long)]
    pairs: bool,
}

#[derive(Args)]
struct ApplyArgs {
    /// Input filtration (.zzf).
    #[arg(long = "in")]
    input: PathBuf,
    /// Op script to apply (.zzops).
    #[arg(long)]
    ops: PathBuf,
    /// Barcode output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Vine log output path (.zzvine); not written when omitted.
    #[arg(long)]
    vine: Option<PathBuf>,
    /// Append pair details to the barcode output.
    #[arg(long)]
    pairs: bool,
    /// Re-check every invariant after each op.
    #[arg(long)]
    validate_each: bool,
    /// Compare against the from-scratch oracle after each op.
    #[arg(long)]
    oracle: bool,
    /// Skip oracle comparisons once the filtration outgrows this size.
    #[arg(long, default_value_t = 48)]
    max_m: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Input filtration (.zzf).
    #[arg(long = "in")]
    input: PathBuf,
    /// Optional op script; every step is validated.
    #[arg(long)]
    ops: Option<PathBuf>,
}

#[derive(Args)]
struct CompareOracleArgs {
    /// Input filtration (.zzf).
    #[arg(long = "in")]
    input: PathBuf,
    /// Optional op script applied (with maintenance) before comparing.
    #[arg(long)]
    ops: Option<PathBuf>,
    /// Refuse filtrations larger than this (the oracle is deliberately
    /// slow).
    #[arg(long, default_value_t = 48)]
    max_m: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// RNG seed; printed to stderr for replay.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated filtration sizes; empty for a header-only report.
    #[arg(long, default_value = "16,32,64,128")]
    sizes: String,
    /// Measurements per op kind and size.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Message plus the process exit code it should produce.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, msg: msg.into() }
    }

    fn op(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_OP, msg: msg.into() }
    }

    fn oracle(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_ORACLE, msg: msg.into() }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("zzvine: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Convert(a) => cmd_convert(a),
        Cmd::Barcode(a) => cmd_barcode(a),
        Cmd::Apply(a) => cmd_apply(a),
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::CompareOracle(a) => cmd_compare_oracle(a),
        Cmd::Bench(a) => cmd_bench(a),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))
}

fn load_filtration(path: &Path) -> Result<ZigzagFiltration, Failure> {
    io::parse_filtration(&read_file(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_ops(path: &Path) -> Result<Vec<UpdateOp>, Failure> {
    io::parse_ops(&read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_bundle(f: ZigzagFiltration) -> Result<Bundle, Failure> {
    Bundle::new(f).map_err(|e| Failure::input(e.to_string()))
}

/// Applies a script one op at a time so per-step validation and oracle
/// checks can interleave; failures carry the op index.
fn run_script(
    bundle: &mut Bundle,
    ops: &[UpdateOp],
    validate_each: bool,
    oracle_cap: Option<usize>,
) -> Result<Vec<VineRecord>, Failure> {
    let mut records = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let rec = apply_op(bundle, op).map_err(|e| Failure::op(e.at_op(i).to_string()))?;
        if validate_each {
            bundle.validate().map_err(|e| Failure::op(e.at_op(i).to_string()))?;
        }
        if let Some(cap) = oracle_cap {
            if bundle.state.m() <= cap {
                compare_with_oracle(bundle).map_err(|f| Failure {
                    code: f.code,
                    msg: format!("after op {i}: {}", f.msg),
                })?;
            } else {
                eprintln!(
                    "zzvine: skipping oracle after op {i} (m = {} exceeds --max-m {cap})",
                    bundle.state.m()
                );
            }
        }
        records.push(rec);
    }
    Ok(records)
}

fn compare_with_oracle(bundle: &Bundle) -> Result<(), Failure> {
    let want =
        ud_barcode_oracle(&bundle.state).map_err(|e| Failure::op(format!("oracle failed: {e}")))?;
    let got = u_barcode(&bundle.state, &bundle.pairs);
    if got == want {
        return Ok(());
    }
    let mut msg = String::from("maintained barcode disagrees with the oracle\n");
    for (bar, count) in &want {
        if got.get(bar) != Some(count) {
            let _ = writeln!(msg, "  oracle has {bar:?} x{count}");
        }
    }
    for (bar, count) in &got {
        if want.get(bar) != Some(count) {
            let _ = writeln!(msg, "  maintained has {bar:?} x{count}");
        }
    }
    Err(Failure::oracle(msg.trim_end().to_string()))
}

fn barcode_text(bundle: &Bundle, with_pairs: bool) -> Result<String, Failure> {
    if with_pairs {
        io::write_barcode_with_pairs(&bundle.state, &bundle.pairs)
            .map_err(|e| Failure::op(e.to_string()))
    } else {
        let bars =
            f_barcode(&bundle.state, &bundle.pairs).map_err(|e| Failure::op(e.to_string()))?;
        Ok(io::write_barcode(&bars))
    }
}

fn cmd_convert(a: ConvertArgs) -> Result<(), Failure> {
    let f = load_filtration(&a.input)?;
    let st = convert(&f).map_err(|e| Failure::input(e.to_string()))?;
    emit(a.out.as_deref(), &io::write_updown(&st))
}

fn cmd_barcode(a: BarcodeArgs) -> Result<(), Failure> {
    let bundle = build_bundle(load_filtration(&a.input)?)?;
    emit(a.out.as_deref(), &barcode_text(&bundle, a.pairs)?)
}

fn cmd_apply(a: ApplyArgs) -> Result<(), Failure> {
    let mut bundle = build_bundle(load_filtration(&a.input)?)?;
    let ops = load_ops(&a.ops)?;
    let oracle_cap = a.oracle.then_some(a.max_m);
    let records = run_script(&mut bundle, &ops, a.validate_each, oracle_cap)?;
    if let Some(vine) = &a.vine {
        emit(Some(vine), &io::write_vine_log(&records))?;
    }
    emit(a.out.as_deref(), &barcode_text(&bundle, a.pairs)?)
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Failure> {
    let mut bundle = build_bundle(load_filtration(&a.input)?)?;
    bundle.validate().map_err(|e| Failure::input(e.to_string()))?;
    let steps = match &a.ops {
        Some(path) => {
            let ops = load_ops(path)?;
            run_script(&mut bundle, &ops, true, None)?.len()
        }
        None => 0,
    };
    println!("ok: m={} pairs={} steps={steps}", bundle.state.m(), bundle.pairs.len());
    Ok(())
}

fn cmd_compare_oracle(a: CompareOracleArgs) -> Result<(), Failure> {
    let f = load_filtration(&a.input)?;
    let mut bundle = build_bundle(f)?;
    if let Some(path) = &a.ops {
        let ops = load_ops(path)?;
        run_script(&mut bundle, &ops, false, None)?;
    }
    if bundle.state.m() > a.max_m {
        return Err(Failure::input(format!(
            "filtration has m = {}, above --max-m {} (the oracle is cubic-ish; raise the cap \
             deliberately)",
            bundle.state.m(),
            a.max_m
        )));
    }
    compare_with_oracle(&bundle)?;
    println!("match: {} bars", bundle.pairs.len());
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let sizes = a
        .sizes
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>().map_err(|_| Failure::input(format!("size `{t}` is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    eprintln!("zzvine: bench seed {}", a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    let mut csv = String::from("m,op-kind,time-ns,chain-adds\n");
    for &m in &sizes {
        let gen = FiltrationGen::with_len(m);
        let bundle = build_bundle(gen.sample(&mut rng))
            .map_err(|f| Failure::input(format!("generated instance rejected: {}", f.msg)))?;
        let ops = OpGen::new(gen.vertices, gen.max_dim, 2 * m + 2);
        for kind in OpKind::ALL {
            for _ in 0..a.reps {
                let Some(op) = ops.sample_kind(&bundle.filtration, kind, &mut rng) else {
                    continue;
                };
                let mut work = bundle.clone();
                let adds_before = work.chain_adds;
                let start = Instant::now();
                apply_op(&mut work, &op)
                    .map_err(|e| Failure::op(format!("bench op {op} failed: {e}")))?;
                let elapsed = start.elapsed().as_nanos();
                let _ = writeln!(
                    csv,
                    "{m},{},{elapsed},{}",
                    kind.name(),
                    work.chain_adds - adds_before
                );
            }
        }
    }
    emit(a.out.as_deref(), &csv)
}
