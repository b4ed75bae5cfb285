//! The `teamltl` command line. [`run`] writes a one-line verdict whose first
//! token is `HOLDS`, `FAILS`, `SAT`, `UNSAT`, `UNSUPPORTED` or `ERROR`, and
//! returns the exit code: 0 holds or satisfiable, 1 fails or unsatisfiable,
//! 2 usage or input error, 3 unsupported fragment or open problem, 4 budget
//! exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::classical::tsat;
use crate::error::Error;
use crate::formula::{parse_formula, Formula};
use crate::generate::random_qbf;
use crate::hyper::{check_hyper_with, forall_hyper_to_ltl, ltl_to_forall_hyper, parse_hyper, HyperSentence};
use crate::modelcheck::{
    parse_kripke, serialize_kripke, tmc_async, tmc_sync_splitfree_capped, tmc_sync_splitfree_onthefly,
    traces_team_finite, Kripke, DEFAULT_MAX_WORLDS,
};
use crate::reductions::{
    parse_qbf, reduce_pldep_val_to_tmc, reduce_plneg_sat_to_tmc, reduce_qbf_async_dep, reduce_qbf_sync,
    QbfInstance,
};
use crate::teamcheck::{check_async_general, check_sync_with, Budget, GenAtomRegistry, SyncStrategy};
use crate::traces::{parse_team, serialize_team, Team};
use crate::Semantics;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "teamltl", version, about = "Team semantics LTL: path checking, model checking, satisfiability, reductions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check finite teams from files against a formula.
    CheckPath(CheckPathArgs),
    /// Check the team of all traces of a Kripke structure.
    CheckModel(CheckModelArgs),
    /// Team satisfiability; prints a witness team on success.
    Sat(SatArgs),
    /// Write a reduction instance (team or structure plus formula) to a directory.
    Reduce(ReduceArgs),
    /// HyperLTL checking and translations.
    #[command(subcommand)]
    Hyper(HyperCommand),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SemanticsArg {
    Sync,
    Async,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Sync => Semantics::Sync,
            SemanticsArg::Async => Semantics::Async,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Cap on the lcm of loop lengths.
    #[arg(long)]
    max_lcm: Option<u64>,
    /// Largest team whose covers are enumerated.
    #[arg(long)]
    max_team: Option<usize>,
    /// Cap on the number of asynchronous shift vectors.
    #[arg(long)]
    max_grid: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(x) = self.max_lcm {
            b.max_lcm = x;
        }
        if let Some(x) = self.max_team {
            b.max_team = x;
        }
        if let Some(x) = self.max_grid {
            b.max_grid = x;
        }
        b
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AsyncEngine {
    /// Trace-by-trace classical checking; pure LTL only.
    Flat,
    /// Shift-vector enumeration.
    General,
}

#[derive(Args, Debug)]
struct CheckPathArgs {
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    /// Formula file, or the formula itself.
    #[arg(long)]
    formula: String,
    /// Team files; several are checked independently.
    #[arg(long, required = true, num_args = 1..)]
    team: Vec<PathBuf>,
    /// Defaults to `flat` for pure LTL and `general` otherwise.
    #[arg(long, value_enum)]
    async_engine: Option<AsyncEngine>,
    /// Worker threads across team files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModelEngine {
    /// Classical checking on the materialised subset trace (sync) or the structure (async).
    Materialized,
    /// Product of subset successors with the automaton of the negation; sync, `~`-free.
    Onthefly,
    /// Enumerate the traces, when there are finitely many, and path check the team.
    Explicit,
}

#[derive(Args, Debug)]
struct CheckModelArgs {
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    kripke: PathBuf,
    #[arg(long, value_enum, default_value = "materialized")]
    engine: ModelEngine,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct SatArgs {
    #[arg(long, value_enum)]
    semantics: SemanticsArg,
    #[arg(long)]
    formula: String,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ReductionKind {
    /// QBF to synchronous team path checking.
    QbfSync,
    /// QBF to asynchronous team path checking with dependence atoms.
    QbfAsyncDep,
    /// Propositional team logic with `~`: satisfiability to model checking.
    PlsatMc,
    /// Propositional dependence logic: validity to model checking.
    PlvalMcDep,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(value_enum)]
    kind: ReductionKind,
    /// QBF file for the QBF reductions, formula file or text for the others.
    #[arg(long, required_unless_present = "random")]
    input: Option<String>,
    /// Generate a random QBF instance `N,M` (variables, clauses) instead of reading one.
    #[arg(long, value_parser = parse_pair, conflicts_with = "input")]
    random: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Existing directory that receives the output files.
    #[arg(long)]
    out: PathBuf,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected N,M")?;
    let n = a.trim().parse().map_err(|_| "N is not a number")?;
    let m = b.trim().parse().map_err(|_| "M is not a number")?;
    if n == 0 || 3 * m < n {
        return Err("need N >= 1 and 3M >= N so that every variable occurs".into());
    }
    Ok((n, m))
}

#[derive(Subcommand, Debug)]
enum HyperCommand {
    /// Evaluate a sentence on a finite team.
    Check {
        /// Sentence file, or the sentence itself.
        #[arg(long)]
        sentence: String,
        #[arg(long)]
        team: PathBuf,
        #[arg(long, default_value_t = crate::hyper::DEFAULT_MAX_QUANTIFIERS)]
        max_quantifiers: usize,
        #[arg(long, default_value_t = crate::traces::DEFAULT_MAX_LCM)]
        max_lcm: u64,
    },
    /// Translate a pure LTL formula into a single-universal sentence.
    ToHyper {
        #[arg(long)]
        formula: String,
    },
    /// Translate a single-universal sentence into team LTL.
    FromHyper {
        #[arg(long)]
        sentence: String,
    },
}

/// Failure of a command, already classified by exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedFragment(_) | Error::UnsupportedOpenProblem(_) | Error::NotForallFragment => {
                EXIT_UNSUPPORTED
            }
            Error::BoundExceeded { .. } | Error::VectorSpaceExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

impl Failure {
    fn line(&self) -> String {
        let tag = if self.code == EXIT_UNSUPPORTED { "UNSUPPORTED" } else { "ERROR" };
        format!("{tag} {}", self.message)
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_HOLDS;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(out, "ERROR usage: {first}");
            return EXIT_INPUT;
        }
    };
    let result = match cli.cmd {
        Command::CheckPath(a) => check_path(a, out),
        Command::CheckModel(a) => check_model(a, out),
        Command::Sat(a) => sat(a, out),
        Command::Reduce(a) => reduce(a, out),
        Command::Hyper(h) => hyper(h, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(out, "{}", f.line());
            f.code
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

/// The contents of `arg` when it names an existing file, else `arg` itself.
fn file_or_inline(arg: &str) -> Result<String, Failure> {
    let p = Path::new(arg);
    if p.is_file() {
        read_file(p)
    } else {
        Ok(arg.to_string())
    }
}

fn load_formula(arg: &str) -> Result<Formula, Failure> {
    Ok(parse_formula(file_or_inline(arg)?.trim())?)
}

fn load_sentence(arg: &str) -> Result<HyperSentence, Failure> {
    Ok(parse_hyper(file_or_inline(arg)?.trim())?)
}

fn load_team(path: &Path) -> Result<Team, Failure> {
    Ok(parse_team(&read_file(path)?)?)
}

fn load_kripke(path: &Path) -> Result<Kripke, Failure> {
    Ok(parse_kripke(&read_file(path)?)?)
}

fn verdict(holds: bool) -> (&'static str, i32) {
    if holds {
        ("HOLDS", EXIT_HOLDS)
    } else {
        ("FAILS", EXIT_FAILS)
    }
}

fn path_check(team: &Team, f: &Formula, a: &CheckPathArgs) -> Result<bool, Failure> {
    let reg = GenAtomRegistry::new();
    let budget = a.budget.budget();
    let holds = match (a.semantics, a.async_engine) {
        (SemanticsArg::Sync, _) => check_sync_with(team, f, &reg, &budget, SyncStrategy::Auto)?,
        (SemanticsArg::Async, Some(AsyncEngine::General)) => check_async_general(team, f, &reg, &budget)?,
        (SemanticsArg::Async, engine) => {
            if f.is_pure_ltl() {
                flat(team, f)?
            } else if engine.is_some() {
                return Err(Error::unsupported("the flat engine handles pure LTL only").into());
            } else {
                check_async_general(team, f, &reg, &budget)?
            }
        }
    };
    Ok(holds)
}

fn flat(team: &Team, f: &Formula) -> Result<bool, Failure> {
    for t in team.traces() {
        if !crate::classical::check_trace(t, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_path(a: CheckPathArgs, out: &mut dyn Write) -> Outcome {
    let f = load_formula(&a.formula)?;
    if a.team.len() == 1 {
        let team = load_team(&a.team[0])?;
        let (word, code) = verdict(path_check(&team, &f, &a)?);
        let _ = writeln!(out, "{word}");
        return Ok(code);
    }
    // Several files: one line per file, and the largest exit code overall.
    let jobs = a.jobs.max(1);
    let results: Vec<Result<bool, Failure>> = std::thread::scope(|s| {
        let chunk = a.team.len().div_ceil(jobs);
        let handles: Vec<_> = a
            .team
            .chunks(chunk)
            .map(|paths| {
                let (f, a) = (&f, &a);
                s.spawn(move || {
                    paths
                        .iter()
                        .map(|p| load_team(p).and_then(|t| path_check(&t, f, a)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut worst = EXIT_HOLDS;
    for (path, r) in a.team.iter().zip(results) {
        let (line, code) = match r {
            Ok(h) => {
                let (w, c) = verdict(h);
                (w.to_string(), c)
            }
            Err(e) => (e.line(), e.code),
        };
        let _ = writeln!(out, "{line} {}", path.display());
        worst = worst.max(code);
    }
    Ok(worst)
}

fn check_model(a: CheckModelArgs, out: &mut dyn Write) -> Outcome {
    let f = load_formula(&a.formula)?;
    let k = load_kripke(&a.kripke)?;
    k.validate()?;
    let holds = match (a.semantics, a.engine) {
        (SemanticsArg::Sync, ModelEngine::Materialized) => tmc_sync_splitfree_capped(&k, &f, DEFAULT_MAX_WORLDS)?,
        (SemanticsArg::Sync, ModelEngine::Onthefly) => tmc_sync_splitfree_onthefly(&k, &f)?,
        (SemanticsArg::Async, ModelEngine::Materialized) => tmc_async(&k, &f)?,
        (SemanticsArg::Async, ModelEngine::Onthefly) => {
            return Err(Error::unsupported("the on-the-fly engine is for synchronous semantics").into())
        }
        (sem, ModelEngine::Explicit) => {
            let team = traces_team_finite(&k).ok_or_else(|| {
                Failure::from(Error::unsupported("the structure has infinitely many traces"))
            })?;
            let reg = GenAtomRegistry::new();
            let budget = a.budget.budget();
            match sem {
                SemanticsArg::Sync => check_sync_with(&team, &f, &reg, &budget, SyncStrategy::Auto)?,
                SemanticsArg::Async => check_async_general(&team, &f, &reg, &budget)?,
            }
        }
    };
    let (word, code) = verdict(holds);
    let _ = writeln!(out, "{word}");
    Ok(code)
}

fn sat(a: SatArgs, out: &mut dyn Write) -> Outcome {
    let f = load_formula(&a.formula)?;
    match tsat(&f, a.semantics.into(), &GenAtomRegistry::new())? {
        Some(w) => {
            let _ = writeln!(out, "SAT");
            let _ = write!(out, "{}", serialize_team(&Team::new([w])));
            Ok(EXIT_HOLDS)
        }
        None => {
            let _ = writeln!(out, "UNSAT");
            Ok(EXIT_FAILS)
        }
    }
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Failure> {
    let p = dir.join(name);
    std::fs::write(&p, text).map_err(|e| input_error(format!("cannot write {}: {e}", p.display())))?;
    Ok(p)
}

fn reduce(a: ReduceArgs, out: &mut dyn Write) -> Outcome {
    if !a.out.is_dir() {
        return Err(input_error(format!("output directory {} does not exist", a.out.display())));
    }
    let qbf = |a: &ReduceArgs| -> Result<QbfInstance, Failure> {
        match (a.random, &a.input) {
            (Some((n, m)), _) => Ok(random_qbf(&mut StdRng::seed_from_u64(a.seed), n, m)),
            (None, Some(path)) => Ok(parse_qbf(&read_file(Path::new(path))?)?),
            (None, None) => Err(input_error("no input given".into())),
        }
    };
    let pl = |a: &ReduceArgs| -> Result<Formula, Failure> {
        match &a.input {
            Some(arg) if a.random.is_none() => load_formula(arg),
            _ => Err(input_error("propositional reductions need --input".into())),
        }
    };
    let written = match a.kind {
        ReductionKind::QbfSync | ReductionKind::QbfAsyncDep => {
            let q = qbf(&a)?;
            let (team, f) = match a.kind {
                ReductionKind::QbfSync => reduce_qbf_sync(&q),
                _ => reduce_qbf_async_dep(&q),
            };
            let mut files = Vec::new();
            if a.random.is_some() {
                files.push(write_out(&a.out, "instance.qbf", &q.to_string())?);
            }
            files.push(write_out(&a.out, "team.txt", &serialize_team(&team))?);
            files.push(write_out(&a.out, "formula.txt", &format!("{f}\n"))?);
            files
        }
        ReductionKind::PlsatMc | ReductionKind::PlvalMcDep => {
            let phi = pl(&a)?;
            let (k, f) = match a.kind {
                ReductionKind::PlsatMc => reduce_plneg_sat_to_tmc(&phi)?,
                _ => reduce_pldep_val_to_tmc(&phi)?,
            };
            vec![
                write_out(&a.out, "kripke.txt", &serialize_kripke(&k))?,
                write_out(&a.out, "formula.txt", &format!("{f}\n"))?,
            ]
        }
    };
    for p in written {
        let _ = writeln!(out, "{}", p.display());
    }
    Ok(EXIT_HOLDS)
}

fn hyper(h: HyperCommand, out: &mut dyn Write) -> Outcome {
    match h {
        HyperCommand::Check {
            sentence,
            team,
            max_quantifiers,
            max_lcm,
        } => {
            let s = load_sentence(&sentence)?;
            let t = load_team(&team)?;
            let (word, code) = verdict(check_hyper_with(&t, &s, max_quantifiers, max_lcm)?);
            let _ = writeln!(out, "{word}");
            Ok(code)
        }
        HyperCommand::ToHyper { formula } => {
            let s = ltl_to_forall_hyper(&load_formula(&formula)?)?;
            let _ = writeln!(out, "{s}");
            Ok(EXIT_HOLDS)
        }
        HyperCommand::FromHyper { sentence } => {
            let f = forall_hyper_to_ltl(&load_sentence(&sentence)?)?;
            let _ = writeln!(out, "{f}");
            Ok(EXIT_HOLDS)
        }
    }
}
