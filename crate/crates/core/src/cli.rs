//! Command-line front end.
//!
//! Every command prints one JSON document on success. Exit codes: 0 when
//! the command completed, 2 for invalid input, 3 when a resource cap was
//! exceeded. On failure nothing is written to standard output.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::coding::{
    compile_codings, decide_nn, higher_power_shift, lift_subgroup_instance, rewrite_instance,
    CodingDomain,
};
use crate::error::{Error, Result};
use crate::freegroup::Word;
use crate::io::{parse_word_list, read_json, CodingFile, CosetsFile, FormulaFile, InstanceFile};
use crate::ksat::{decide_ksat_free, dp_to_3sat_z, dp_to_3sat_z_with_exponent, membership_gadget, sat_to_dp};
use crate::ksat::{truncation_sat_check, TruncationResult};
use crate::membership::build_stallings;
use crate::oracle::{ball_colorings_exist, validate_witness, BallColoring, BallQuery, OracleAnswer, Rules};
use crate::recurrence::{
    balloon_to_configuration, core_to_configuration, decide_rdp_free, decide_rdp_general, decide_rdp_z,
};
use crate::tileset::{completeness_core, decide_dp_z_windowed, decide_sdp_z_windowed, Letter, NNInstance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "domino", version, about = "Domino problems on free groups")]
struct Cli {
    /// Resource cap overrides, e.g. `window=14,alphabet=128`.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Problem {
    /// Is there any configuration?
    Dp,
    /// Is there one with the seed at the identity?
    Sdp,
    /// Is there one using the seed infinitely often?
    Rdp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance file (or several).
    Decide {
        #[arg(value_enum)]
        problem: Problem,
        #[arg(long, required = true)]
        instance: Vec<String>,
        /// Seed letter; overrides the `seed` field of the file.
        #[arg(long)]
        seed: Option<String>,
        /// Worker threads when several instances are given.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also emit the witness restricted to the ball of this radius.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// k-SAT over subgroups.
    Sat {
        #[command(subcommand)]
        command: SatCommand,
    },
    /// Compilers from domino instances.
    Dp {
        #[command(subcommand)]
        command: DpCommand,
    },
    /// Compilers between presentations.
    Compile {
        #[command(subcommand)]
        command: CompileCommand,
    },
    /// Subgroup membership.
    Member {
        #[arg(long)]
        rank: usize,
        /// Subgroup generators separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        subgroup: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Brute-force cross-checks.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
enum SatCommand {
    /// Decide a formula file.
    Decide {
        #[arg(long)]
        formula: String,
        /// Also solve the translates over subgroup elements up to this length.
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Emit the membership gadget for `word`.
    Gadget {
        #[arg(long)]
        rank: usize,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        subgroup: String,
    },
    /// Compile a formula file to an instance file.
    #[command(name = "compile-to-dp")]
    CompileToDp {
        #[arg(long)]
        formula: String,
    },
}

#[derive(Debug, Subcommand)]
enum DpCommand {
    /// Compile a rank-1 instance to 3-SAT over a subgroup of the integers.
    #[command(name = "compile-to-3sat")]
    CompileTo3Sat {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        exponent: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Hull,
    Ball,
}

#[derive(Debug, Subcommand)]
enum CompileCommand {
    /// Pattern codings to a nearest-neighbour instance.
    #[command(name = "coding2nn")]
    Coding2Nn {
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value_t = DomainArg::Hull)]
        domain: DomainArg,
        /// Ball radius; defaults to the coding radius.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Higher power shift onto a finite-index subgroup.
    Hps {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        cosets: String,
    },
    /// Lift an instance on a subgroup to the whole group.
    Lift {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        rank: usize,
        /// Images of the subgroup basis separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        embedding: String,
    },
    /// Rewrite codings into another free basis.
    Regen {
        #[arg(long)]
        instance: String,
        /// The old generators spelled over the new ones, separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        translation: String,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Search for a valid colouring of a ball.
    Ball {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        seed: Option<String>,
        /// `letter:n`, at least `n` occurrences of `letter`.
        #[arg(long)]
        count: Option<String>,
    },
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            let _ = writeln!(stdout, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_cap() {
                EXIT_CAP
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<Value> {
    let caps = match &cli.caps {
        Some(spec) => Caps::default().parse_overrides(spec)?,
        None => Caps::default(),
    };
    match &cli.command {
        Command::Decide {
            problem,
            instance,
            seed,
            jobs,
            radius,
        } => {
            let work = |path: &String| decide_file(*problem, path, seed.as_deref(), *radius, &caps);
            let results: Vec<Result<Verdict>> = if *jobs > 1 && instance.len() > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(*jobs)
                    .build()
                    .map_err(|e| Error::invalid("--jobs", e.to_string()))?;
                pool.install(|| instance.par_iter().map(work).collect())
            } else {
                instance.iter().map(work).collect()
            };
            let verdicts = results.into_iter().collect::<Result<Vec<_>>>()?;
            let mut values: Vec<Value> = verdicts.iter().map(to_value).collect();
            Ok(if values.len() == 1 {
                values.pop().unwrap()
            } else {
                Value::Array(values)
            })
        }
        Command::Sat { command } => sat_command(command, &caps),
        Command::Dp {
            command: DpCommand::CompileTo3Sat { instance, exponent },
        } => {
            let (inst, _) = read_json::<InstanceFile>(instance)?.to_instance()?;
            let r = match exponent {
                Some(m) => dp_to_3sat_z_with_exponent(&inst, *m, &caps)?,
                None => dp_to_3sat_z(&inst, &caps)?,
            };
            Ok(to_value(&FormulaFile::from_formula(&r.formula, &r.subgroup)))
        }
        Command::Compile { command } => compile_command(command, &caps),
        Command::Member { rank, subgroup, word } => {
            let gens = parse_word_list(*rank, subgroup)?;
            let u = Word::parse(*rank, word)?;
            let aut = build_stallings(*rank, &gens)?;
            Ok(json!({
                "member": aut.member(&u)?,
                "states": aut.states(),
                "subgroup_rank": aut.subgroup_rank(),
                "finite_index": aut.is_finite_index(),
            }))
        }
        Command::Oracle {
            command:
                OracleCommand::Ball {
                    instance,
                    radius,
                    seed,
                    count,
                },
        } => oracle_command(instance, *radius, seed.as_deref(), count.as_deref(), &caps),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

#[derive(Debug, Serialize)]
struct Verdict {
    instance: String,
    problem: Problem,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
    answer: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball: Option<BallWitness>,
    stats: BTreeMap<&'static str, u64>,
}

/// A witness restricted to a ball, checked against every rule.
#[derive(Debug, Serialize)]
struct BallWitness {
    radius: usize,
    cells: Vec<(String, String)>,
}

fn ball_witness(inst: &NNInstance, col: &BallColoring) -> Result<BallWitness> {
    if let Err(v) = validate_witness(col, Rules::Nearest(inst)) {
        return Err(Error::invalid("witness", format!("internal witness check failed: {v}")));
    }
    Ok(BallWitness {
        radius: col.radius(),
        cells: col
            .cells()
            .iter()
            .map(|(w, &a)| (w.to_string(), inst.letter_name(a).to_string()))
            .collect(),
    })
}

fn periodic_ball(radius: usize, letter_at: impl Fn(i64) -> Letter) -> BallColoring {
    let r = radius as i64;
    let cells = (-r..=r).map(|i| (Word::t_power(i), letter_at(i))).collect();
    BallColoring::new(1, radius, cells)
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Witness {
    /// The completeness core.
    Core { letters: Vec<String> },
    /// A periodic pattern on `scale·ℤ`, repeated on every coset.
    Period { scale: u64, letters: Vec<String> },
    /// A closed walk `base -steps[0]-> letters[1] ...`.
    Balloon {
        base: String,
        letters: Vec<String>,
        steps: Vec<String>,
    },
    /// A cycle in the tileset graph on the integers.
    Cycle { letters: Vec<String> },
}

fn names(inst: &NNInstance, letters: impl IntoIterator<Item = Letter>) -> Vec<String> {
    letters.into_iter().map(|a| inst.letter_name(a).to_string()).collect()
}

fn decide_file(
    problem: Problem,
    path: &str,
    seed: Option<&str>,
    radius: Option<usize>,
    caps: &Caps,
) -> Result<Verdict> {
    let (inst, file_seed) = read_json::<InstanceFile>(path)?.to_instance()?;
    inst.check_caps(caps)?;
    let seed = match seed {
        Some(name) => Some(inst.letter(name)?),
        None => file_seed,
    };
    let seed = match problem {
        Problem::Dp => None,
        _ => Some(seed.ok_or_else(|| Error::invalid("seed", "this problem needs a seed letter"))?),
    };
    let mut stats = BTreeMap::new();
    stats.insert("letters", inst.letter_count() as u64);
    stats.insert("generators", inst.generators().len() as u64);
    stats.insert("forbidden", inst.forbidden().len() as u64);
    let standard = inst.is_standard();
    let mut ball: Option<BallColoring> = None;
    let (answer, witness) = match (problem, inst.rank(), standard) {
        (Problem::Dp | Problem::Sdp, 1, _) => {
            let v = decide_dp_z_windowed(&inst, caps)?;
            stats.insert("scale", v.scale);
            stats.insert("window", v.window as u64);
            stats.insert("blocks", v.blocks as u64);
            stats.insert("surviving_blocks", v.surviving_blocks as u64);
            let answer = match seed {
                Some(a0) => decide_sdp_z_windowed(&inst, a0, caps)?,
                None => v.nonempty,
            };
            let witness = if problem == Problem::Dp {
                v.period.as_ref().map(|p| Witness::Period {
                    scale: v.scale,
                    letters: names(&inst, p.iter().copied()),
                })
            } else {
                None
            };
            if let (Some(r), Some(_), Problem::Dp) = (radius, &v.period, problem) {
                ball = Some(periodic_ball(r, |i| v.letter_at(i).unwrap()));
            }
            (answer, witness)
        }
        (Problem::Dp | Problem::Sdp, _, true) => {
            let core = completeness_core(&inst)?;
            stats.insert("core", core.len() as u64);
            stats.insert("rounds", core.rounds() as u64);
            let answer = match seed {
                Some(a0) => core.contains(a0),
                None => !core.is_empty(),
            };
            let witness = answer.then(|| Witness::Core {
                letters: names(&inst, core.letters()),
            });
            if let (Some(r), true) = (radius, answer) {
                let centre = seed.unwrap_or(core.letters()[0]);
                ball = Some(core_to_configuration(&inst, &core, centre, r, caps)?);
            }
            (answer, witness)
        }
        (Problem::Dp | Problem::Sdp, _, false) => (decide_nn(&inst, seed, caps)?, None),
        (Problem::Rdp, 1, true) => {
            let cycle = decide_rdp_z(&inst, seed.unwrap())?;
            let witness = cycle.as_ref().map(|c| Witness::Cycle {
                letters: names(&inst, c.iter().copied()),
            });
            if let (Some(r), Some(c)) = (radius, &cycle) {
                ball = Some(periodic_ball(r, |i| c[i.rem_euclid(c.len() as i64) as usize]));
            }
            (cycle.is_some(), witness)
        }
        (Problem::Rdp, _, true) => {
            let v = decide_rdp_free(&inst, seed.unwrap())?;
            stats.insert("core", v.core.len() as u64);
            let witness = v.balloon.as_ref().map(|b| Witness::Balloon {
                base: inst.letter_name(b.base()).to_string(),
                letters: names(&inst, b.letters().iter().copied()),
                steps: b.steps().iter().map(|g| g.name(inst.rank())).collect(),
            });
            if let (Some(r), Some(b)) = (radius, &v.balloon) {
                ball = Some(balloon_to_configuration(&inst, b, &v.core, r, caps)?);
            }
            (v.recurrent, witness)
        }
        (Problem::Rdp, _, false) => (decide_rdp_general(&inst, seed.unwrap(), caps)?, None),
    };
    Ok(Verdict {
        instance: path.to_string(),
        problem,
        seed: seed.map(|a| inst.letter_name(a).to_string()),
        answer,
        witness,
        ball: ball.map(|b| ball_witness(&inst, &b)).transpose()?,
        stats,
    })
}

fn sat_command(command: &SatCommand, caps: &Caps) -> Result<Value> {
    match command {
        SatCommand::Decide { formula, truncation } => {
            let (f, h) = read_json::<FormulaFile>(formula)?.to_formula()?;
            let v = decide_ksat_free(&f, &h, caps)?;
            let mut out = json!({
                "problem": "sat",
                "answer": v.satisfiable,
                "stats": {
                    "letters": v.letters,
                    "generators": v.generators,
                    "clauses": f.clauses().len(),
                },
            });
            if let Some(r) = truncation {
                let t = match truncation_sat_check(&f, &h, *r, caps)? {
                    TruncationResult::Satisfiable(_) => "sat",
                    TruncationResult::Unsatisfiable => "unsat",
                    TruncationResult::Unknown => "unknown",
                };
                out["truncation"] = json!({ "radius": r, "result": t });
            }
            Ok(out)
        }
        SatCommand::Gadget { rank, word, subgroup } => {
            let u = Word::parse(*rank, word)?;
            let f = membership_gadget(*rank, &u)?;
            let h = parse_word_list(*rank, subgroup)?;
            Ok(to_value(&FormulaFile::from_formula(&f, &h)))
        }
        SatCommand::CompileToDp { formula } => {
            let (f, h) = read_json::<FormulaFile>(formula)?.to_formula()?;
            let c = sat_to_dp(&f, &h, caps)?;
            Ok(to_value(&InstanceFile::from_instance(&c.instance)))
        }
    }
}

fn compile_command(command: &CompileCommand, caps: &Caps) -> Result<Value> {
    match command {
        CompileCommand::Coding2Nn {
            instance,
            domain,
            radius,
        } => {
            let (codings, seed) = read_json::<CodingFile>(instance)?.to_instance()?;
            let domain = match domain {
                DomainArg::Hull => CodingDomain::SuffixHull,
                DomainArg::Ball => CodingDomain::Ball(radius.unwrap_or_else(|| codings.radius())),
            };
            let compiled = compile_codings(&codings, domain, caps)?;
            let mut file = InstanceFile::from_instance(&compiled.instance);
            if let Some(a0) = seed {
                file.seed_set = Some(names(&compiled.instance, compiled.seed_set(a0)));
            }
            Ok(to_value(&file))
        }
        CompileCommand::Hps { instance, cosets } => {
            let (inst, seed) = read_json::<InstanceFile>(instance)?.to_instance()?;
            let cosets = read_json::<CosetsFile>(cosets)?.to_cosets(inst.rank())?;
            let hps = higher_power_shift(&inst, &cosets, caps)?;
            let mut file = InstanceFile::from_instance(&hps.instance);
            if let Some(a0) = seed {
                file.seed_set = Some(names(&hps.instance, hps.seed_set(a0)));
            }
            Ok(to_value(&file))
        }
        CompileCommand::Lift {
            instance,
            rank,
            embedding,
        } => {
            let (inst, seed) = read_json::<InstanceFile>(instance)?.to_instance()?;
            let images = parse_word_list(*rank, embedding)?;
            let lifted = lift_subgroup_instance(&inst, *rank, &images)?;
            let mut file = InstanceFile::from_instance(&lifted);
            file.seed = seed.map(|a| inst.letter_name(a).to_string());
            Ok(to_value(&file))
        }
        CompileCommand::Regen { instance, translation } => {
            let (codings, seed) = read_json::<CodingFile>(instance)?.to_instance()?;
            let images = parse_word_list(codings.rank(), translation)?;
            let rewritten = rewrite_instance(&codings, &images)?;
            let mut file = CodingFile::from_instance(&rewritten);
            file.seed = seed.map(|a| codings.alphabet()[a].clone());
            Ok(to_value(&file))
        }
    }
}

fn oracle_command(path: &str, radius: usize, seed: Option<&str>, count: Option<&str>, caps: &Caps) -> Result<Value> {
    let raw: Value = read_json(path)?;
    let is_coding = raw.get("codings").is_some();
    let parse = |e: serde_json::Error| Error::invalid("file", format!("`{path}`: {e}"));
    let (nn, codings, alphabet) = if is_coding {
        let (c, _) = serde_json::from_value::<CodingFile>(raw).map_err(parse)?.to_instance()?;
        let alphabet = c.alphabet().to_vec();
        (None, Some(c), alphabet)
    } else {
        let (i, _) = serde_json::from_value::<InstanceFile>(raw).map_err(parse)?.to_instance()?;
        let alphabet = i.alphabet().to_vec();
        (Some(i), None, alphabet)
    };
    let letter = |name: &str, field: &str| {
        alphabet
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::invalid(field, format!("unknown letter `{name}`")))
    };
    let seed = seed.map(|s| letter(s, "--seed")).transpose()?;
    let min_count = match count {
        Some(spec) => {
            let (name, n) = spec
                .rsplit_once(':')
                .ok_or_else(|| Error::invalid("--count", "expected letter:n"))?;
            let n: usize = n
                .parse()
                .map_err(|_| Error::invalid("--count", format!("`{n}` is not a count")))?;
            Some((letter(name, "--count")?, n))
        }
        None => None,
    };
    let rules = match (&nn, &codings) {
        (Some(i), _) => Rules::Nearest(i),
        (_, Some(c)) => Rules::Codings(c),
        _ => unreachable!(),
    };
    let query = BallQuery {
        radius,
        seed,
        min_count,
    };
    let answer = ball_colorings_exist(rules, query, caps)?;
    Ok(match answer {
        OracleAnswer::Exists(col) => json!({
            "answer": "exists",
            "radius": radius,
            "cells": col
                .cells()
                .iter()
                .map(|(w, a)| json!([w.to_string(), alphabet[*a]]))
                .collect::<Vec<_>>(),
        }),
        OracleAnswer::Absent => json!({ "answer": "absent", "radius": radius }),
        OracleAnswer::Unknown => json!({ "answer": "unknown", "radius": radius }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("domino").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn member_command() {
        let (code, out, _) = run_args(&["member", "--rank", "2", "--subgroup", "a a;b", "--word", "a b a-"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["member"], false);
        let (code, out, _) = run_args(&["member", "--rank", "2", "--subgroup", "a a;b", "--word", "a a b a- a-"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"member\": true"));
    }

    #[test]
    fn bad_arguments_exit_2() {
        let (code, out, _) = run_args(&["member", "--rank", "2", "--subgroup", "z", "--word", "a"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(out.is_empty());
        let (code, _, _) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_INVALID);
        let (code, _, _) = run_args(&["decide", "dp", "--instance", "/nonexistent.json"]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn caps_exit_3() {
        let (code, _, err) = run_args(&["--caps", "ball=3", "sat", "gadget", "--rank", "2", "--word", "a"]);
        assert_eq!(code, EXIT_OK, "{err}");
        let (code, _, _) = run_args(&["--caps", "bogus=1", "member", "--rank", "1", "--subgroup", "t", "--word", "t"]);
        assert_eq!(code, EXIT_INVALID);
    }
}
