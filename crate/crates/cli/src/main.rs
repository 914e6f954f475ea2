use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gdc::artifact::{
    bytes_to_symbols, design_to_json, format_symbol_stream, parse_symbol_stream, symbol_bytes,
    symbols_to_bytes, CodeArtifactFile, CodewordFile,
};
use gdc::codegen::{
    structural_check_at, verify_distance_matrix, verify_gdc_matrix, CoverCheck, DistanceCheck,
    GdcCheck, RowUnionCheck,
};
use gdc::design::{gdc_bound, lrc_bound, validate_params};
use gdc::simulator::Scenario;
use gdc::{
    CodeDesign, DistanceMethod, FieldElement, FieldSpec, GdcCode, SynthesisConfig, VerifyLevel,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gdc", version, about = "Group decodable erasure codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Params {
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    beta: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the distance bounds for a parameter set
    Bound(Params),
    /// Print the incidence matrix and supports
    Design(Params),
    /// Build, verify and write a code artifact
    Gen {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        retries: u32,
        /// Override the field degree m (the default is the smallest m with 2^m > C(n-1, k-1))
        #[arg(long)]
        field_degree: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check an artifact
    Verify {
        artifact: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Full)]
        level: Level,
    },
    /// Compute the minimum distance of an artifact's code
    Distance {
        artifact: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::RankSubsets)]
        method: Method,
    },
    /// Encode k hex symbols (or raw bytes) into a codeword
    Encode {
        artifact: PathBuf,
        /// Input file; standard input when absent
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Treat the input as raw bytes, striped k symbols at a time
        #[arg(long)]
        raw: bool,
    },
    /// Fill erased (null) symbols of a codeword
    Repair {
        artifact: PathBuf,
        codeword: PathBuf,
    },
    /// Recover the message from a partial codeword
    Decode {
        artifact: PathBuf,
        codeword: PathBuf,
        /// Input is a striped raw-byte file written by `encode --raw`
        #[arg(long)]
        raw: bool,
        /// Where to write raw bytes
        #[arg(short, long, requires = "raw")]
        output: Option<PathBuf>,
    },
    /// Replay the erasure patterns of a scenario file
    Simulate { scenario: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Structural,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Method {
    RankSubsets,
    EnumerateCodewords,
}

/// Failures that mean "the object did not pass a check" rather than
/// "the request was malformed".
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<gdc::Error>() {
        Some(
            gdc::Error::VerificationFailed(_)
            | gdc::Error::StructurallyInfeasible { .. }
            | gdc::Error::RetriesExhausted { .. }
            | gdc::Error::RankDeficient { .. }
            | gdc::Error::InsufficientSymbols { .. }
            | gdc::Error::Singular,
        ) => 1,
        _ => 2,
    }
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses and fully verifies an artifact.
fn load_code(path: &Path) -> Result<GdcCode> {
    let file = CodeArtifactFile::parse(&read_text(path)?)?;
    Ok(file.load()?)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Bound(p) => {
            let dp = validate_params(p.alpha, p.beta, p.k, p.t)?;
            print_json(&json!({
                "gdc": gdc_bound(p.alpha, p.beta, p.k, p.t)?,
                "lrc": lrc_bound(dp.n, dp.k, dp.alpha, dp.beta - dp.alpha + 1)?,
                "singleton": dp.singleton(),
            }))
        }
        Command::Design(p) => {
            let d = CodeDesign::build(p.alpha, p.beta, p.k, p.t)?;
            print!("{}", design_to_json(&d));
            Ok(())
        }
        Command::Gen {
            params: p,
            seed,
            retries,
            field_degree,
            output,
        } => {
            let design = CodeDesign::build(p.alpha, p.beta, p.k, p.t)?;
            let field = match field_degree {
                Some(m) => FieldSpec::canonical(m)?,
                None => FieldSpec::for_params(design.n(), design.k())?,
            };
            let cfg = SynthesisConfig {
                seed,
                retry_budget: retries,
                verify_level: VerifyLevel::Full,
            };
            let code = GdcCode::build_with_field(design, field, &cfg)?;
            let text = CodeArtifactFile::from_code(&code, seed).to_json();
            match output {
                Some(path) => {
                    fs::write(&path, &text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    print_json(&json!({
                        "artifact": path.display().to_string(),
                        "n": code.n(),
                        "k": code.k(),
                        "d": code.distance(),
                        "field": code.field(),
                    }))
                }
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Verify { artifact, level } => verify(&artifact, level),
        Command::Distance { artifact, method } => {
            let code = load_code(&artifact)?;
            let method = match method {
                Method::RankSubsets => DistanceMethod::RankSubsets,
                Method::EnumerateCodewords => DistanceMethod::EnumerateCodewords,
            };
            let d = code.min_distance(method)?;
            print_json(&json!({ "method": method, "d": d, "claimed_d": code.distance() }))
        }
        Command::Encode {
            artifact,
            input,
            raw,
        } => {
            let code = load_code(&artifact)?;
            let mut bytes = Vec::new();
            match &input {
                Some(p) => {
                    bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?
                }
                None => {
                    io::stdin().read_to_end(&mut bytes)?;
                }
            }
            if raw {
                encode_raw(&code, &bytes)
            } else {
                let text = String::from_utf8(bytes).context("hex input is not UTF-8")?;
                let x = parse_symbol_stream(code.field(), &text)?;
                let cw = code.encode(&x)?;
                let syms: Vec<_> = cw.symbols().iter().map(|&s| Some(s)).collect();
                print!(
                    "{}",
                    CodewordFile::from_symbols(code.field(), code.design().beta(), &syms).to_json()
                );
                Ok(())
            }
        }
        Command::Repair { artifact, codeword } => {
            let code = load_code(&artifact)?;
            let have = gdc::artifact::parse_codeword(&read_text(&codeword)?, &code)?;
            let full = code.fill_erasures(&have)?;
            let syms: Vec<_> = full.into_iter().map(Some).collect();
            print!(
                "{}",
                CodewordFile::from_symbols(code.field(), code.design().beta(), &syms).to_json()
            );
            Ok(())
        }
        Command::Decode {
            artifact,
            codeword,
            raw,
            output,
        } => {
            let code = load_code(&artifact)?;
            let text = read_text(&codeword)?;
            if raw {
                return decode_raw(&code, &text, output.as_deref());
            }
            let have = gdc::artifact::parse_codeword(&text, &code)?;
            let x = code.decode_global(&have)?;
            print_json(&json!({ "message": format_symbol_stream(code.field(), &x) }))
        }
        Command::Simulate { scenario } => {
            let sc = Scenario::parse(&read_text(&scenario)?)?;
            let base = scenario.parent().unwrap_or(Path::new("."));
            let code = load_code(&base.join(&sc.code))?;
            let stats = sc.run(&code)?;
            print_json(&serde_json::to_value(stats)?)
        }
    }
}

fn fail(witness: serde_json::Value, message: String) -> Result<()> {
    print_json(&witness)?;
    bail!(CheckFailed(message))
}

/// Structural: support containment and both covering conditions at the
/// claimed distance. Full adds the bucket-rank and distance verifiers.
fn verify(path: &Path, level: Level) -> Result<()> {
    let file = CodeArtifactFile::parse(&read_text(path)?)?;
    let design = file.design.to_design()?;
    let g = file.generator()?;
    let (n, k, d) = (design.n(), design.k(), file.claimed_d);
    if d == 0 || d + k > n + 1 {
        return fail(
            json!({"status": "fail", "check": "claimed_d", "claimed_d": d}),
            format!("claimed distance {d} is outside 1..={}", n + 1 - k),
        );
    }
    if let Some((i, j)) = gdc::codegen::support_violation(&g, design.indicator()) {
        return fail(
            json!({"status": "fail", "check": "support", "row": i + 1, "col": j + 1}),
            format!("G[{}][{}] is nonzero outside the support", i + 1, j + 1),
        );
    }
    let delta = n + 1 - k - d;
    let (c2, c3) = structural_check_at(&design, delta)?;
    if let CoverCheck::Violated { ell, columns } = c2 {
        let cols: Vec<usize> = columns.iter().map(|c| c + 1).collect();
        return fail(
            json!({"status": "fail", "check": "condition2", "ell": ell, "columns": cols}),
            format!("columns {cols:?} cover fewer than {ell} rows, so d < {d}"),
        );
    }
    if let Some(RowUnionCheck::Violated { rows }) = c3 {
        let rows: Vec<usize> = rows.iter().map(|r| r + 1).collect();
        return fail(
            json!({"status": "fail", "check": "condition3", "rows": rows}),
            format!("rows {rows:?} have too small a union, so d < {d}"),
        );
    }
    if matches!(level, Level::Full) {
        match verify_gdc_matrix(&g, &design)? {
            GdcCheck::Pass => {}
            GdcCheck::SupportViolation { row, col } => {
                return fail(
                    json!({"status": "fail", "check": "support", "row": row + 1, "col": col + 1}),
                    format!("G[{}][{}] is nonzero outside the support", row + 1, col + 1),
                );
            }
            GdcCheck::BucketRankDeficient { bucket, columns } => {
                let cols: Vec<usize> = columns.iter().map(|c| c + 1).collect();
                return fail(
                    json!({"status": "fail", "check": "bucket_rank", "bucket": bucket + 1, "columns": cols}),
                    format!("bucket {} columns {cols:?} are not full rank", bucket + 1),
                );
            }
        }
        match verify_distance_matrix(&g, d)? {
            DistanceCheck::Confirmed => {}
            DistanceCheck::BelowClaim { columns } => {
                let cols: Vec<usize> = columns.iter().map(|c| c + 1).collect();
                return fail(
                    json!({"status": "fail", "check": "distance", "rank_deficient_columns": cols}),
                    format!("columns {cols:?} have rank below k, so d < {d}"),
                );
            }
            DistanceCheck::AboveClaim => {
                return fail(
                    json!({"status": "fail", "check": "distance", "reason": "above claim"}),
                    format!("distance exceeds the claimed {d}"),
                );
            }
        }
    }
    let level = match level {
        Level::Structural => "structural",
        Level::Full => "full",
    };
    print_json(&json!({"status": "pass", "level": level, "claimed_d": d}))
}

fn encode_raw(code: &GdcCode, bytes: &[u8]) -> Result<()> {
    let f = code.field();
    let width = symbol_bytes(f)?;
    let stripe_bytes = code.k() * width;
    let mut padded = bytes.to_vec();
    let rem = padded.len() % stripe_bytes;
    if rem != 0 || padded.is_empty() {
        padded.resize(padded.len() + stripe_bytes - rem, 0);
    }
    let symbols = bytes_to_symbols(f, &padded)?;
    let stripes = symbols
        .chunks(code.k())
        .map(|x| {
            let cw = code.encode(x)?;
            let syms: Vec<_> = cw.symbols().iter().map(|&s| Some(s)).collect();
            Ok(serde_json::to_value(CodewordFile::from_symbols(
                f,
                code.design().beta(),
                &syms,
            ))?)
        })
        .collect::<Result<Vec<_>>>()?;
    print_json(&json!({ "len": bytes.len(), "stripes": stripes }))
}

fn decode_raw(code: &GdcCode, text: &str, output: Option<&Path>) -> Result<()> {
    #[derive(serde::Deserialize)]
    struct Striped {
        len: usize,
        stripes: Vec<CodewordFile>,
    }
    let s: Striped = serde_json::from_str(text).context("parsing striped codeword file")?;
    let mut symbols: Vec<FieldElement> = Vec::new();
    for (i, stripe) in s.stripes.iter().enumerate() {
        let have = stripe.to_map(code)?;
        symbols.extend(
            code.decode_global(&have)
                .with_context(|| format!("stripe {}", i + 1))?,
        );
    }
    let mut bytes = symbols_to_bytes(code.field(), &symbols)?;
    if s.len > bytes.len() {
        bail!("length {} exceeds the {} decoded bytes", s.len, bytes.len());
    }
    bytes.truncate(s.len);
    match output {
        Some(p) => fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(&bytes)?,
    }
    Ok(())
}
