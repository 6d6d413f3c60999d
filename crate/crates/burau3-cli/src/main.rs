//! Command-line driver: counterexample search, chain verification, word
//! reduction, membership certification, and the seeded self-test.
//!
//! Reports go to standard output (or `--output`); progress and errors go to
//! standard error. Exit codes: 0 success, 1 verification or input-parse
//! failure, 2 configuration error, 3 search completed without finding a
//! chain.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use burau3::burau::{check_gamma, phi, rho, BurauMatrix, PhiImage, RatFrac};
use burau3::chains::{
    is_biminimal, max_reductive_factor, search, verify_word_as_chain, Chain, SearchConfig,
    SearchOutcome,
};
use burau3::laurent::RatPoly;
use burau3::quaternionic::{eval_word, reduce_to_word, GenWord, QElement};
use burau3::selftest;

#[derive(Parser)]
#[command(name = "burau3", version, about = "Exact computations in the Burau image of B3")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Search for nontrivial biminimal chains up to a denominator bound.
    Search {
        /// Largest numerator and denominator magnitude to enumerate.
        #[arg(long, value_name = "M")]
        max: i64,
        /// Worker threads; omit for the canonical sequential mode.
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
        /// Write the surviving search tree to this file.
        #[arg(long, value_name = "FILE")]
        emit_tree: Option<PathBuf>,
    },
    /// Verify words as chains and certify counterexample status.
    Verify {
        /// File with one generator word per line.
        #[arg(long, value_name = "FILE", conflicts_with = "word")]
        chain: Option<PathBuf>,
        /// A single generator word, e.g. "g[-1] g[2]^-1".
        #[arg(long, value_name = "WORD")]
        word: Option<String>,
    },
    /// Reduce a group element, given by its first row, to a generator word.
    Reduce {
        /// Upper-left entry as a Laurent polynomial in t.
        #[arg(long, value_name = "POLY")]
        g1: String,
        /// Upper-right entry as a Laurent polynomial in t.
        #[arg(long, value_name = "POLY")]
        g2: String,
    },
    /// Certify membership of a 3x3 Laurent matrix and compute its images.
    CertifyBurau {
        /// Nine entries, rows separated by ';', entries by ','.
        #[arg(long, value_name = "MATRIX", conflicts_with = "braid")]
        entries: Option<String>,
        /// Braid generator word instead of a matrix: letters 1, -1, 2, -2.
        #[arg(long, value_name = "WORD")]
        braid: Option<String>,
    },
    /// Run the seeded invariant suites of every module.
    Selftest {
        /// Seed for the sample generators.
        #[arg(long, default_value_t = 179)]
        seed: u64,
        /// Smaller sample counts for interactive runs.
        #[arg(long)]
        quick: bool,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Search { max, parallel, emit_tree } => {
            cmd_search(cli, *max, *parallel, emit_tree.as_deref())
        }
        Command::Verify { chain, word } => cmd_verify(cli, chain.as_deref(), word.as_deref()),
        Command::Reduce { g1, g2 } => cmd_reduce(cli, g1, g2),
        Command::CertifyBurau { entries, braid } => {
            cmd_certify(cli, entries.as_deref(), braid.as_deref())
        }
        Command::Selftest { seed, quick } => cmd_selftest(cli, *seed, *quick),
    }
}

fn emit(cli: &Cli, report: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => std::fs::write(path, report)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{report}");
            Ok(())
        }
    }
}

fn json_report(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

// ---------------------------------------------------------------------------
// search

fn cmd_search(
    cli: &Cli,
    max: i64,
    parallel: Option<usize>,
    emit_tree: Option<&Path>,
) -> Result<u8, Failure> {
    if max < 1 {
        return Err(Failure::config(format!("--max must be at least 1, got {max}")));
    }
    let config = SearchConfig {
        parallel,
        keep_tree: emit_tree.is_some(),
        progress: true,
    };
    let outcome = search(max, &config);
    if let (Some(path), Some(tree)) = (emit_tree, &outcome.tree) {
        std::fs::write(path, tree.dump())
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = match cli.format {
        Format::Json => json_report(&search_json(max, &outcome)),
        Format::Text => search_text(max, &outcome),
    };
    emit(cli, &report)?;
    Ok(if outcome.found.is_empty() { 3 } else { 0 })
}

fn chain_json(chain: &Chain) -> Value {
    let cert = is_biminimal(chain);
    let mrf = max_reductive_factor(chain).ok();
    json!({
        "word": chain.word().to_string(),
        "length": chain.len(),
        "k": chain.k().to_string(),
        "l": chain.l().to_string(),
        "rf_list": chain.rf_list().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "mrf": mrf.as_ref().map(|m| m.mrf.to_string()),
        "rd": chain.element().rd(),
        "det": chain.element().det().to_string(),
        "biminimal": cert.biminimal,
        "trivial": cert.trivial,
        "integral": cert.integrality.member,
        "m12_nonzero": cert.integrality.m12_nonzero,
        "witnesses_nonsurjectivity": cert.witnesses_nonsurjectivity,
    })
}

fn search_json(max: i64, outcome: &SearchOutcome) -> Value {
    json!({
        "schema": 1,
        "command": "search",
        "max": max,
        "found": outcome.found.iter().map(|f| chain_json(&f.chain)).collect::<Vec<_>>(),
        "orbit_count": outcome.orbit_count,
        "stats": {
            "root_quadruples": outcome.stats.root_quadruples,
            "pairs_inserted": outcome.stats.pairs_inserted,
            "pairs_surviving": outcome.stats.pairs_surviving,
            "nodes_inserted": outcome.stats.nodes_inserted,
            "nodes_deleted": outcome.stats.nodes_deleted,
            "closed_leaves": outcome.stats.closed_leaves,
            "raw_candidates": outcome.stats.raw_candidates,
            "verified_biminimal": outcome.stats.verified_biminimal,
        },
        "elapsed_ms": outcome.elapsed.as_millis() as u64,
    })
}

fn search_text(max: i64, outcome: &SearchOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "search up to denominator {max}: {} chain(s) in {} orbit(s), {:.3} s",
        outcome.found.len(),
        outcome.orbit_count,
        outcome.elapsed.as_secs_f64()
    );
    for (i, f) in outcome.found.iter().enumerate() {
        let _ = writeln!(
            out,
            "[{}] length {} rd {} mrf {} (k, l) = ({}, {})",
            i + 1,
            f.chain.len(),
            f.rd,
            f.mrf,
            f.chain.k(),
            f.chain.l()
        );
        let _ = writeln!(out, "{}", f.chain.word());
    }
    let s = &outcome.stats;
    let _ = writeln!(
        out,
        "stats: quadruples {} inserted {} surviving {} nodes {} deleted {} closed {} candidates {}",
        s.root_quadruples,
        s.pairs_inserted,
        s.pairs_surviving,
        s.nodes_inserted,
        s.nodes_deleted,
        s.closed_leaves,
        s.raw_candidates
    );
    out.trim_end().to_string()
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(
    cli: &Cli,
    chain_file: Option<&Path>,
    word: Option<&str>,
) -> Result<u8, Failure> {
    let sources: Vec<String> = match (chain_file, word) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
        (None, Some(w)) => vec![w.to_string()],
        _ => return Err(Failure::config("pass exactly one of --chain or --word")),
    };
    if sources.is_empty() {
        return Err(Failure::config("no words to verify"));
    }

    let mut results = Vec::new();
    let mut first_error: Option<String> = None;
    for source in &sources {
        match verify_one(source) {
            Ok(chain) => results.push((source.clone(), Ok(chain))),
            Err(msg) => {
                if first_error.is_none() {
                    first_error = Some(msg.clone());
                }
                results.push((source.clone(), Err(msg)));
            }
        }
    }

    let report = match cli.format {
        Format::Json => {
            let items: Vec<Value> = results
                .iter()
                .map(|(source, res)| match res {
                    Ok(chain) => json!({
                        "input": source,
                        "verified": true,
                        "certificate": chain_json(chain),
                    }),
                    Err(msg) => json!({
                        "input": source,
                        "verified": false,
                        "error": msg,
                    }),
                })
                .collect();
            json_report(&json!({
                "schema": 1,
                "command": "verify",
                "results": items,
            }))
        }
        Format::Text => {
            let mut out = String::new();
            for (source, res) in &results {
                match res {
                    Ok(chain) => {
                        let cert = is_biminimal(chain);
                        let mrf = max_reductive_factor(chain)
                            .map(|m| m.mrf.to_string())
                            .unwrap_or_else(|_| "-".to_string());
                        let verdict = if cert.witnesses_nonsurjectivity {
                            "counterexample chain"
                        } else if cert.biminimal && cert.trivial {
                            "trivial biminimal chain, not a counterexample"
                        } else if cert.biminimal {
                            "biminimal chain"
                        } else {
                            "valid chain, not biminimal"
                        };
                        let _ = writeln!(out, "word: {}", chain.word());
                        let _ = writeln!(
                            out,
                            "(k, l) = ({}, {})  rd {}  mrf {}  integral {}  m12 nonzero {}",
                            chain.k(),
                            chain.l(),
                            chain.element().rd(),
                            mrf,
                            cert.integrality.member,
                            cert.integrality.m12_nonzero
                        );
                        let _ = writeln!(out, "verdict: {verdict}");
                    }
                    Err(msg) => {
                        let _ = writeln!(out, "word: {source}");
                        let _ = writeln!(out, "rejected: {msg}");
                    }
                }
            }
            out.trim_end().to_string()
        }
    };
    emit(cli, &report)?;
    match first_error {
        None => Ok(0),
        Some(msg) => {
            eprintln!("verification failed: {msg}");
            Ok(1)
        }
    }
}

fn verify_one(source: &str) -> Result<Chain, String> {
    let word: GenWord = source.parse().map_err(|e| format!("parse: {e}"))?;
    verify_word_as_chain(&word).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// reduce

fn cmd_reduce(cli: &Cli, g1: &str, g2: &str) -> Result<u8, Failure> {
    let p1: RatPoly = g1
        .parse()
        .map_err(|e| Failure::input(format!("cannot parse --g1: {e}")))?;
    let p2: RatPoly = g2
        .parse()
        .map_err(|e| Failure::input(format!("cannot parse --g2: {e}")))?;
    let element = QElement::from_rat_pair(&p1, &p2)
        .map_err(|e| Failure::input(format!("not a group element: {e}")))?;
    let word = reduce_to_word(&element)
        .map_err(|e| Failure::input(format!("reduction failed: {e}")))?;
    let round_trip = eval_word(&word) == element;
    let report = match cli.format {
        Format::Json => json_report(&json!({
            "schema": 1,
            "command": "reduce",
            "word": word.to_string(),
            "length": word.len(),
            "round_trip": round_trip,
        })),
        Format::Text => word.to_string(),
    };
    emit(cli, &report)?;
    if round_trip {
        Ok(0)
    } else {
        eprintln!("round trip failed for the reduced word");
        Ok(1)
    }
}

// ---------------------------------------------------------------------------
// certify-burau

fn parse_matrix(entries: &str) -> Result<BurauMatrix, String> {
    let rows: Vec<&str> = entries.split(';').map(str::trim).collect();
    if rows.len() != 3 {
        return Err(format!("expected 3 rows separated by ';', got {}", rows.len()));
    }
    let mut parsed: Vec<Vec<burau3::IntPoly>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').map(str::trim).collect();
        if cells.len() != 3 {
            return Err(format!("row {} has {} entries, expected 3", i + 1, cells.len()));
        }
        let mut out_row = Vec::new();
        for (j, cell) in cells.iter().enumerate() {
            let p: burau3::IntPoly = cell
                .parse()
                .map_err(|e| format!("entry ({}, {}): {e}", i + 1, j + 1))?;
            out_row.push(p);
        }
        parsed.push(out_row);
    }
    let mut it = parsed.into_iter();
    let mut row = || {
        let r: Vec<burau3::IntPoly> = it.next().unwrap();
        let mut cells = r.into_iter();
        [cells.next().unwrap(), cells.next().unwrap(), cells.next().unwrap()]
    };
    Ok(BurauMatrix::new([row(), row(), row()]))
}

fn parse_braid(word: &str) -> Result<BurauMatrix, String> {
    let letters: Vec<i32> = word
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i32>().map_err(|e| format!("letter {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    BurauMatrix::from_word(&letters).map_err(|e| e.to_string())
}

fn frac_json(f: &RatFrac) -> Value {
    json!({ "num": f.num().to_string(), "den": f.den().to_string() })
}

fn phi_json(p: &PhiImage) -> Value {
    let integral = p.integral_pair();
    json!({
        "g11": frac_json(&p.g11),
        "g12": frac_json(&p.g12),
        "det_exponent": p.det_exponent,
        "integral": integral.is_some(),
        "integral_pair": integral.map(|(a, b)| json!([a.to_string(), b.to_string()])),
    })
}

fn cmd_certify(
    cli: &Cli,
    entries: Option<&str>,
    braid: Option<&str>,
) -> Result<u8, Failure> {
    let matrix = match (entries, braid) {
        (Some(e), None) => parse_matrix(e).map_err(Failure::input)?,
        (None, Some(w)) => parse_braid(w).map_err(Failure::input)?,
        _ => return Err(Failure::config("pass exactly one of --entries or --braid")),
    };
    let gamma = check_gamma(&matrix);
    let rep = &gamma.base;
    let image = if rep.member { phi(&matrix).ok() } else { None };
    let shadow = rho(&matrix);

    let report = match cli.format {
        Format::Json => json_report(&json!({
            "schema": 1,
            "command": "certify-burau",
            "member": rep.member,
            "conditions": {
                "row_sum": rep.row_sum,
                "fixed_row_vector": rep.v_fixed,
                "unitary": rep.unitary,
                "det_form": rep.det_form,
            },
            "det_exponent": rep.det_exponent,
            "permutation_consistent": gamma.consistent,
            "phi": image.as_ref().map(phi_json),
            "rho": shadow
                .iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "member: {}", rep.member);
            if !rep.member {
                let mut failed = Vec::new();
                if !rep.row_sum {
                    failed.push("row-sum");
                }
                if !rep.v_fixed {
                    failed.push("fixed-row-vector");
                }
                if !rep.unitary {
                    failed.push("unitarity");
                }
                if !rep.det_form {
                    failed.push("determinant-form");
                }
                let _ = writeln!(out, "failed conditions: {}", failed.join(", "));
            }
            if let Some(k) = rep.det_exponent {
                let _ = writeln!(out, "det = (-t)^{k}");
            }
            if let Some(p) = &image {
                let _ = writeln!(out, "phi: g11 = {}, g12 = {}", p.g11, p.g12);
                let _ = writeln!(out, "phi integral: {}", p.integral_pair().is_some());
            }
            let _ = writeln!(
                out,
                "rho: [[{}, {}], [{}, {}]]",
                shadow[0][0], shadow[0][1], shadow[1][0], shadow[1][1]
            );
            out.trim_end().to_string()
        }
    };
    emit(cli, &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// selftest

fn cmd_selftest(cli: &Cli, seed: u64, quick: bool) -> Result<u8, Failure> {
    let profile = if quick { "quick" } else { "full" };
    eprintln!("self-test seed {seed} profile {profile}");
    let outcomes = selftest::run_all(seed, quick);
    let all_passed = outcomes.iter().all(|o| o.passed());

    let report = match cli.format {
        Format::Json => json_report(&json!({
            "schema": 1,
            "command": "selftest",
            "seed": seed,
            "profile": profile,
            "passed": all_passed,
            "suites": outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.name,
                        "cases": o.cases,
                        "failures": o.failure_count,
                        "details": o.failures,
                    })
                })
                .collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "self-test seed {seed} profile {profile}");
            for o in &outcomes {
                let status = if o.passed() { "pass" } else { "FAIL" };
                let _ = writeln!(out, "{}: {} cases, {status}", o.name, o.cases);
                for detail in &o.failures {
                    let _ = writeln!(out, "  {detail}");
                }
            }
            let _ = writeln!(
                out,
                "{}",
                if all_passed { "all suites passed" } else { "some suites failed" }
            );
            out.trim_end().to_string()
        }
    };
    emit(cli, &report)?;
    if all_passed {
        Ok(0)
    } else {
        let failed: Vec<&str> =
            outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
        eprintln!("failed suites: {}", failed.join(", "));
        Ok(1)
    }
}
