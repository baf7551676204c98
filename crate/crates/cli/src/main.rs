//! `permpat`: pattern matching, decompositions and grids over permutation text formats.
//!
//! Exit codes: 0 found or success, 1 not found or verification false, 2 error.

mod input;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use permpat::oracle::{brute_force_grid_points, brute_force_match, exact_width, BRUTE_FORCE_GRID_CAP};
use permpat::{
    build_decomposition, build_decomposition_budget, canonical_grid, find_grid, find_pattern, first_violation,
    match_auto, parse_permutation, poly_space_match, random_permutation, random_separable, t_monotone_match,
    greedy_monotone_partition, verify_embedding, verify_grid, verify_grid_points, verify_wide,
    width_of_decomposition, BudgetOutcome, DecompositionResult, Embedding, Error, MergeSequence,
    MonotonePartition, Permutation, PointSet,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "permpat", version, about = "Permutation pattern matching toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a pattern occurs in a text permutation.
    Match(MatchArgs),
    /// Build a bounded-width merge sequence, or find a grid.
    Decompose(DecomposeArgs),
    /// Generate a permutation.
    Gen(GenArgs),
    /// Check that a merge sequence is d-wide.
    Verify(VerifyArgs),
    /// Exact width of a small permutation.
    Width(WidthArgs),
    /// Find an r × r grid in a point set.
    Grid(GridArgs),
    /// Time algorithms on generated inputs and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Auto,
    Bruteforce,
    Fpt,
    Monotone,
    Polyspace,
}

#[derive(Args)]
struct MatchArgs {
    /// Pattern: inline one-line notation, a file, or `-` for stdin.
    #[arg(short, long, required_unless_present = "corpus", conflicts_with = "corpus")]
    pattern: Option<String>,
    /// Text permutation: inline, a file, or `-`.
    #[arg(short, long, required_unless_present = "corpus", conflicts_with = "corpus")]
    text: Option<String>,
    #[arg(short, long, value_enum, default_value_t = Algorithm::Auto)]
    algorithm: Algorithm,
    /// Precomputed merge sequence of the text (fpt only).
    #[arg(long)]
    decomposition: Option<String>,
    /// Monotone partition of the text (monotone only); greedy when absent.
    #[arg(long)]
    partition: Option<String>,
    /// Print the embedding after FOUND.
    #[arg(long)]
    witness: bool,
    /// Batch file of "pattern | text" lines; prints "<line> FOUND|NOT FOUND" per instance.
    #[arg(long)]
    corpus: Option<String>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("bound").required(true).args(["r", "budget"])))]
struct DecomposeArgs {
    /// Text permutation: inline, a file, or `-`.
    #[arg(short, long)]
    text: String,
    /// Grid size; the width budget is 4 f(r).
    #[arg(long)]
    r: Option<usize>,
    /// Explicit width budget d; prints the dense cells when the builder stalls.
    #[arg(long)]
    budget: Option<usize>,
    /// Re-check the result before printing.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["grid", "random", "separable"])))]
struct GenArgs {
    /// Canonical grid with r columns and s rows.
    #[arg(long, num_args = 2, value_names = ["R", "S"])]
    grid: Option<Vec<usize>>,
    /// Uniformly random permutation of length N.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    /// Random separable permutation of length N.
    #[arg(long, value_name = "N")]
    separable: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Text permutation: inline, a file, or `-`.
    #[arg(short, long)]
    text: String,
    /// Merge sequence: a file or `-`.
    #[arg(long)]
    seq: String,
    #[arg(long)]
    d: usize,
}

#[derive(Args)]
struct WidthArgs {
    /// Text permutation: inline, a file, or `-`.
    #[arg(short, long)]
    text: String,
}

#[derive(Args)]
struct GridArgs {
    /// Point set file ("p q" then "x y" lines) or `-`.
    #[arg(long)]
    points: String,
    #[arg(long)]
    r: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchInput {
    Random,
    Separable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchAlgorithm {
    /// The decomposition builder for r = 2.
    Decompose,
    /// `match` with the auto backend.
    Auto,
    /// `match` with the polynomial-space backend.
    Polyspace,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1000, 10000, 100000])]
    sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [BenchAlgorithm::Decompose, BenchAlgorithm::Auto])]
    algorithms: Vec<BenchAlgorithm>,
    #[arg(long, value_enum, default_value_t = BenchInput::Separable)]
    input: BenchInput,
    /// Pattern for the matching algorithms.
    #[arg(long, default_value = "1 3 2")]
    pattern: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per row; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

/// Result of a subcommand: success, or a negative answer with exit code 1.
enum Outcome {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Match(a) => cmd_match(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Width(a) => cmd_width(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn permutation_arg(arg: &str, what: &str) -> Result<Permutation> {
    parse_permutation(&input::resolve(arg)?).with_context(|| format!("parsing {what}"))
}

struct Backend {
    algorithm: Algorithm,
    decomposition: Option<MergeSequence>,
    partition: Option<MonotonePartition>,
}

impl Backend {
    fn from_args(a: &MatchArgs) -> Result<Self> {
        if a.decomposition.is_some() && a.algorithm != Algorithm::Fpt {
            bail!("--decomposition needs --algorithm fpt");
        }
        if a.partition.is_some() && a.algorithm != Algorithm::Monotone {
            bail!("--partition needs --algorithm monotone");
        }
        let decomposition = match &a.decomposition {
            Some(f) => Some(MergeSequence::parse(&input::read_file(f)?).context("parsing decomposition")?),
            None => None,
        };
        let partition = match &a.partition {
            Some(f) => Some(MonotonePartition::parse(&input::read_file(f)?).context("parsing partition")?),
            None => None,
        };
        Ok(Backend { algorithm: a.algorithm, decomposition, partition })
    }

    fn run(&self, sigma: &Permutation, pi: &Permutation) -> Result<Option<Embedding>> {
        let found = match self.algorithm {
            Algorithm::Auto => match_auto(sigma, pi)?,
            Algorithm::Bruteforce => brute_force_match(sigma, pi),
            // Without a supplied sequence the builder provides one, as in auto.
            Algorithm::Fpt => match &self.decomposition {
                Some(seq) => find_pattern(sigma, pi, seq)?,
                None => match_auto(sigma, pi)?,
            },
            Algorithm::Monotone => match &self.partition {
                Some(part) => t_monotone_match(sigma, pi, part)?,
                None => t_monotone_match(sigma, pi, &greedy_monotone_partition(pi))?,
            },
            Algorithm::Polyspace => poly_space_match(sigma, pi)?,
        };
        if let Some(phi) = &found {
            if !verify_embedding(sigma, pi, phi)? {
                bail!("backend returned an embedding that does not verify");
            }
        }
        Ok(found)
    }
}

fn report(found: bool) -> &'static str {
    if found {
        "FOUND"
    } else {
        "NOT FOUND"
    }
}

fn cmd_match(a: MatchArgs) -> Result<Outcome> {
    let backend = Backend::from_args(&a)?;
    if let Some(corpus) = &a.corpus {
        return match_corpus(&backend, corpus);
    }
    let (Some(p), Some(t)) = (&a.pattern, &a.text) else {
        bail!("--pattern and --text are required");
    };
    let sigma = permutation_arg(p, "pattern")?;
    let pi = permutation_arg(t, "text")?;
    let found = backend.run(&sigma, &pi)?;
    println!("{}", report(found.is_some()));
    match found {
        Some(phi) => {
            if a.witness {
                print!("{phi}");
            }
            Ok(Outcome::Yes)
        }
        None => Ok(Outcome::No),
    }
}

fn match_corpus(backend: &Backend, corpus: &str) -> Result<Outcome> {
    let lines = input::parse_corpus(&input::read_file(corpus)?)?;
    let answers: Vec<Result<bool>> = lines
        .par_iter()
        .map(|c| {
            let sigma = parse_permutation(&c.pattern).context("parsing pattern")?;
            let pi = parse_permutation(&c.text).context("parsing text")?;
            Ok(backend.run(&sigma, &pi)?.is_some())
        })
        .collect();
    let mut failed = false;
    for (c, answer) in lines.iter().zip(answers) {
        match answer {
            Ok(found) => println!("{} {}", c.line, report(found)),
            Err(e) => {
                eprintln!("error: corpus line {}: {e:#}", c.line);
                failed = true;
            }
        }
    }
    if failed {
        bail!("some corpus instances failed");
    }
    Ok(Outcome::Yes)
}

fn cmd_decompose(a: DecomposeArgs) -> Result<Outcome> {
    let pi = permutation_arg(&a.text, "text")?;
    if let Some(d) = a.budget {
        return match build_decomposition_budget(&pi, d)? {
            BudgetOutcome::Sequence(seq) => print_sequence(&pi, &seq, d, a.verify),
            BudgetOutcome::Dense(cells) => {
                eprintln!("builder stalled: {} dense cells", cells.cells.len());
                println!("CELLS");
                print!("{}", cells.cells);
                Ok(Outcome::Yes)
            }
        };
    }
    let r = a.r.context("--r or --budget is required")?;
    match build_decomposition(&pi, r)? {
        DecompositionResult::Sequence { seq, width_bound } => print_sequence(&pi, &seq, width_bound, a.verify),
        DecompositionResult::Grid(w) => {
            if a.verify && !verify_grid(&pi, &w, r)? {
                bail!("grid witness does not verify");
            }
            println!("GRID");
            print!("{w}");
            Ok(Outcome::Yes)
        }
    }
}

fn print_sequence(pi: &Permutation, seq: &MergeSequence, d: usize, verify: bool) -> Result<Outcome> {
    if verify {
        seq.validate(pi.len())?;
        if !verify_wide(pi, seq, d)? {
            bail!("merge sequence is not {d}-wide");
        }
    }
    let w = width_of_decomposition(pi, seq)?;
    print!("{seq}");
    println!("# width {w} budget {d}");
    Ok(Outcome::Yes)
}

fn cmd_gen(a: GenArgs) -> Result<Outcome> {
    let pi = match (a.grid, a.random, a.separable) {
        (Some(rs), _, _) => canonical_grid(rs[0], rs[1])?,
        (_, Some(n), _) if n > 0 => random_permutation(n, a.seed),
        (_, _, Some(n)) if n > 0 => random_separable(n, a.seed),
        _ => bail!("length must be positive"),
    };
    println!("{pi}");
    Ok(Outcome::Yes)
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome> {
    let pi = permutation_arg(&a.text, "text")?;
    let seq = MergeSequence::parse(&input::resolve(&a.seq)?).context("parsing merge sequence")?;
    seq.validate(pi.len())?;
    match first_violation(&pi, &seq, a.d)? {
        None => {
            println!("OK");
            Ok(Outcome::Yes)
        }
        Some((step, views)) => {
            println!("FAIL step {step} views {views}");
            Ok(Outcome::No)
        }
    }
}

fn cmd_width(a: WidthArgs) -> Result<Outcome> {
    let pi = permutation_arg(&a.text, "text")?;
    println!("{}", exact_width(&pi)?);
    Ok(Outcome::Yes)
}

fn cmd_grid(a: GridArgs) -> Result<Outcome> {
    let m = PointSet::parse(&input::read_file(&a.points)?).context("parsing point set")?;
    let witness = match find_grid(&m, a.r) {
        Ok(w) => Some(w),
        // Below the density bound only an exhaustive search can decide.
        Err(Error::Density { .. }) if m.len() <= BRUTE_FORCE_GRID_CAP => {
            eprintln!("below the density bound; searching exhaustively");
            brute_force_grid_points(m.points(), a.r)?
        }
        Err(e @ Error::Density { .. }) => {
            return Err(e).context(format!(
                "undecided: exhaustive search is capped at {BRUTE_FORCE_GRID_CAP} points"
            ))
        }
        Err(e) => return Err(e.into()),
    };
    match witness {
        Some(w) => {
            if !verify_grid_points(m.points(), &w, a.r)? {
                bail!("grid witness does not verify");
            }
            print!("{w}");
            Ok(Outcome::Yes)
        }
        None => {
            println!("NOT FOUND");
            Ok(Outcome::No)
        }
    }
}

fn cmd_bench(a: BenchArgs) -> Result<Outcome> {
    let sigma = parse_permutation(&a.pattern).context("parsing pattern")?;
    if a.repeats == 0 {
        bail!("--repeats must be positive");
    }
    println!("n,algorithm,millis");
    for &n in &a.sizes {
        if n == 0 {
            bail!("sizes must be positive");
        }
        let pi = match a.input {
            BenchInput::Random => random_permutation(n, a.seed),
            BenchInput::Separable => random_separable(n, a.seed),
        };
        for &alg in &a.algorithms {
            let mut best = f64::INFINITY;
            for _ in 0..a.repeats {
                let start = Instant::now();
                run_bench(alg, &sigma, &pi)?;
                best = best.min(start.elapsed().as_secs_f64() * 1e3);
            }
            let name = alg.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            println!("{n},{name},{best:.3}");
        }
    }
    Ok(Outcome::Yes)
}

fn run_bench(alg: BenchAlgorithm, sigma: &Permutation, pi: &Permutation) -> Result<()> {
    match alg {
        BenchAlgorithm::Decompose => {
            build_decomposition(pi, 2)?;
        }
        BenchAlgorithm::Auto => {
            match_auto(sigma, pi)?;
        }
        BenchAlgorithm::Polyspace => {
            poly_space_match(sigma, pi)?;
        }
    }
    Ok(())
}
