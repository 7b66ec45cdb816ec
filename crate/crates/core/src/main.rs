use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use esets::cayley::ComponentId;
use esets::certificate::{format_fraction, PackingCertificate};
use esets::constructions::{
    nonuniform_extension, puncture_attempt, table_row, uniform_from_exact, xprime_components_with,
    xprime_perfect_code_with, Pairing,
};
use esets::johnson::{self, CondensedCycle, Cop, ExactSubgraph};
use esets::search::{find_eset, max_packing, SearchOptions};
use esets::tree::{DiameterThreeTree, Numbering};
use esets::verify::Verifier;
use esets::{Error, Subset};

#[derive(Parser)]
#[command(name = "esets", version, about = "E-sets and 1-sphere packings of diameter-3 transposition-tree Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the diameter-3 tree X³(r,t) as JSON.
    BuildTree(TreeArgs),
    /// Build a packing certificate.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a certificate; exits 1 when it is not a valid packing.
    Verify(VerifyArgs),
    /// Exhaustive and branch-and-bound searches.
    #[command(subcommand)]
    Search(Search),
    /// Johnson graph structures.
    #[command(subcommand)]
    Johnson(JohnsonCmd),
    /// Table III rows for r = 2..=r_max.
    Tables {
        r_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Shift,
    Mirror,
}

#[derive(Args)]
struct TreeArgs {
    /// Hub degrees as `r,t`.
    #[arg(long, value_parser = parse_tree_shape)]
    tree: (usize, usize),
    #[arg(long, default_value = "original")]
    numbering: Numbering,
}

impl TreeArgs {
    fn build(&self) -> esets::Result<DiameterThreeTree> {
        DiameterThreeTree::build(self.tree.0, self.tree.1, self.numbering)
    }
}

#[derive(Args)]
struct OutArg {
    /// Write the certificate here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Wall-clock budget such as `60s` or `5m`.
    #[arg(long, value_parser = humantime::parse_duration)]
    budget: Option<Duration>,
    /// Node budget for the search.
    #[arg(long)]
    nodes: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Construct {
    /// Perfect code of the subgraph X′(r,r).
    Xprime {
        r: usize,
        #[arg(long, default_value = "renumbered")]
        numbering: Numbering,
        /// Defaults to shift for renumbered trees and mirror for original ones.
        #[arg(long, value_enum)]
        pairing: Option<PairingArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Uniform packing from an exact subgraph of the component graph.
    Uniform {
        #[command(flatten)]
        tree: TreeArgs,
        /// Exact subgraph as JSON.
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Nonuniform extension of the X′(r,r) code to X³(r,r).
    Nonuniform {
        r: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Best-effort packing of X³(r,t) for r > t.
    Puncture {
        r: usize,
        t: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,
    /// Expected hub degrees `r,t`; a mismatch is an error.
    #[arg(long, value_parser = parse_tree_shape)]
    tree: Option<(usize, usize)>,
    /// Measure inside these components only, e.g. `12,14,23,34`.
    #[arg(long, value_delimiter = ',')]
    subgraph: Option<Vec<Subset>>,
}

#[derive(Subcommand)]
enum Search {
    /// Decide whether X³(r,t) has an E-set.
    Eset {
        #[command(flatten)]
        tree: TreeArgs,
        /// Search every cover, not only those centered at the identity.
        #[arg(long)]
        no_symmetry: bool,
        /// Accept degree 7.
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Largest 1-sphere packing by branch and bound.
    Maxpack {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum JohnsonCmd {
    /// Windows of a condensed cycle, e.g. `12345 3`.
    ExpandCc {
        cycle: String,
        r: usize,
        /// Ground set size; defaults to the largest element.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Subsets of a cyclic ordered partition, e.g. `1213 7`.
    ExpandCop { cop: String, n: usize },
    /// Exact cycle alternating two COP families.
    Alternate { first: String, second: String, n: usize },
    /// Exhaustive search for an exact 2-factor of Γʳₙ.
    #[command(name = "exact-2factor")]
    Exact2factor { n: usize, r: usize },
    /// Check a nest given as JSON; exits 1 when it is not one.
    ValidateNest { file: PathBuf },
}

fn parse_tree_shape(s: &str) -> Result<(usize, usize), String> {
    let (r, t) = s.split_once(',').ok_or_else(|| format!("expected r,t, got {s:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad r in {s:?}"))?;
    let t = t.trim().parse().map_err(|_| format!("bad t in {s:?}"))?;
    Ok((r, t))
}

enum Failure {
    /// Ran fine but the object checked is invalid.
    Rejected,
    Error(Error),
    File(PathBuf, Error),
}

fn in_file<T>(path: &Path, result: esets::Result<T>) -> Result<T, Failure> {
    result.map_err(|e| Failure::File(path.to_path_buf(), e))
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<(), Failure>;

fn color(code: &str, text: &str) -> String {
    if std::env::var_os("NO_COLOR").is_some() || !std::io::stderr().is_terminal() {
        text.to_string()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

fn note(text: &str) {
    eprintln!("{text}");
}

fn print_json<T: Serialize>(value: &T) -> esets::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_certificate(cert: &PackingCertificate, out: &OutArg) -> esets::Result<()> {
    match &out.output {
        Some(path) => cert.save(path),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", cert.to_json())?;
            Ok(())
        }
    }
}

fn search_options(budget: &BudgetArgs, allow_large: bool) -> SearchOptions {
    SearchOptions {
        threads: budget.threads.max(1),
        time_budget: budget.budget,
        node_budget: budget.nodes,
        allow_large,
        ..Default::default()
    }
}

fn load_structure(path: &Path) -> esets::Result<ExactSubgraph> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn verdict(valid: bool) -> String {
    if valid {
        color("32", "valid")
    } else {
        color("31", "INVALID")
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::BuildTree(args) => {
            let tree = args.build()?;
            #[derive(Serialize)]
            struct TreeView {
                n: usize,
                r: usize,
                t: usize,
                numbering: Numbering,
                epsilon: String,
                left_hub: usize,
                right_hub: usize,
                edges: Vec<String>,
            }
            print_json(&TreeView {
                n: tree.n(),
                r: tree.r(),
                t: tree.t(),
                numbering: tree.numbering(),
                epsilon: tree.epsilon().to_string(),
                left_hub: tree.left_hub(),
                right_hub: tree.right_hub(),
                edges: tree.tree().edges().iter().map(ToString::to_string).collect(),
            })?;
        }
        Command::Construct(c) => construct(c)?,
        Command::Verify(args) => return verify(args),
        Command::Search(s) => search(s)?,
        Command::Johnson(j) => return johnson_cmd(j),
        Command::Tables { r_max, format } => {
            let rows = (2..=r_max).map(table_row).collect::<esets::Result<Vec<_>>>()?;
            match format {
                Format::Json => print_json(&rows)?,
                Format::Tsv => {
                    let mut out = std::io::stdout().lock();
                    writeln!(out, "r\tT\tsigma\tS\tsigma_prime\talpha").map_err(Error::from)?;
                    for row in rows {
                        writeln!(out, "{row}").map_err(Error::from)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn construct(c: Construct) -> Outcome {
    match c {
        Construct::Xprime {
            r,
            numbering,
            pairing,
            out,
        } => {
            let pairing = match pairing {
                Some(PairingArg::Shift) => Pairing::Shift,
                Some(PairingArg::Mirror) => Pairing::Mirror,
                None => Pairing::for_numbering(numbering),
            };
            let cert = xprime_perfect_code_with(r, numbering, pairing)?;
            let comps: Vec<String> = xprime_components_with(r, pairing).iter().map(ToString::to_string).collect();
            note(&format!("{} centers; X′ components {}", cert.centers.len(), comps.join(",")));
            Ok(emit_certificate(&cert, &out)?)
        }
        Construct::Uniform { tree, structure, out } => {
            let tree = tree.build()?;
            let structure = in_file(&structure, load_structure(&structure))?;
            let built = uniform_from_exact(&tree, &structure)?;
            note(&format!(
                "{} centers, alpha {}, uniform {}",
                built.certificate.centers.len(),
                format_fraction(&built.report.alpha),
                built.uniformity.uniform
            ));
            Ok(emit_certificate(&built.certificate, &out)?)
        }
        Construct::Nonuniform { r, budget, out } => {
            let built = nonuniform_extension(r, &search_options(&budget, false))?;
            for stage in &built.stages {
                note(&format!("stage: {} centers cover {}", stage.centers, stage.covered));
            }
            note(&format!(
                "alpha {}, target covered {} {}",
                format_fraction(&built.report.alpha),
                built.target_covered,
                if built.reached_target { "reached" } else { "missed" }
            ));
            Ok(emit_certificate(&built.certificate, &out)?)
        }
        Construct::Puncture { r, t, budget, out } => {
            let built = puncture_attempt(r, t, &search_options(&budget, false))?;
            note(&format!(
                "alpha {}; window ({}, {}]{}",
                format_fraction(&built.report.alpha),
                format_fraction(&built.window_low),
                format_fraction(&built.window_high),
                if built.window_empty { " is empty" } else { "" }
            ));
            Ok(emit_certificate(&built.certificate, &out)?)
        }
    }
}

fn verify(args: VerifyArgs) -> Outcome {
    let cert = in_file(&args.certificate, PackingCertificate::load(&args.certificate))?;
    if let Some((r, t)) = args.tree {
        if (r, t) != (cert.r, cert.t) {
            return Err(Error::DegreeMismatch(r + t, cert.n).into());
        }
    }
    let tree = cert.tree()?;
    let verifier = Verifier::new(&tree)?;
    let report = match &args.subgraph {
        Some(comps) => {
            let comps: Vec<ComponentId> = comps.iter().copied().map(ComponentId).collect();
            verifier.verify_on_subgraph(&cert, &comps)?
        }
        None => verifier.verify_packing(&cert)?,
    };
    let uniformity = verifier.uniformity_check(&cert)?;
    #[derive(Serialize)]
    struct Full<'a> {
        #[serde(flatten)]
        report: &'a esets::verify::VerificationReport,
        uniform: bool,
    }
    print_json(&Full {
        report: &report,
        uniform: uniformity.uniform,
    })?;
    note(&format!(
        "{}: covered {}/{}, alpha {}",
        verdict(report.valid),
        report.covered_count,
        report.universe,
        format_fraction(&report.alpha)
    ));
    if report.valid {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn search(s: Search) -> esets::Result<()> {
    let outcome = match s {
        Search::Eset {
            tree,
            no_symmetry,
            allow_large,
            budget,
        } => {
            let opts = SearchOptions {
                symmetry: !no_symmetry,
                ..search_options(&budget, allow_large)
            };
            find_eset(&tree.build()?, &opts)?
        }
        Search::Maxpack {
            tree,
            allow_large,
            budget,
        } => max_packing(&tree.build()?, &search_options(&budget, allow_large))?,
    };
    print_json(&outcome)
}

fn johnson_cmd(j: JohnsonCmd) -> Outcome {
    match j {
        JohnsonCmd::ExpandCc { cycle, r, n } => {
            let cc: CondensedCycle = cycle.parse()?;
            let n = n.unwrap_or_else(|| cc.elements.iter().copied().max().unwrap_or(0));
            let sub = johnson::expand_cc(&cc, r, n)?;
            note(&format!("{sub}; exact {}", johnson::is_exact(&sub)));
            print_json(&sub)?;
        }
        JohnsonCmd::ExpandCop { cop, n } => {
            let cop: Cop = cop.parse()?;
            print_json(&johnson::expand_cop(&cop, n)?)?;
        }
        JohnsonCmd::Alternate { first, second, n } => {
            let found = johnson::alternate_cops(&first.parse()?, &second.parse()?, n)?;
            match &found {
                Some(sub) => note(&format!("{sub}")),
                None => note("no exact alternation"),
            }
            print_json(&found)?;
        }
        JohnsonCmd::Exact2factor { n, r } => {
            let out = johnson::search_exact_2factor(n, r)?;
            match out.factor.as_ref().and_then(|f| f.cycles()) {
                Some(cycles) => {
                    let lens: Vec<String> = cycles.iter().map(|c| c.len().to_string()).collect();
                    note(&format!("exact 2-factor with cycle lengths {}", lens.join(",")));
                }
                None => note(&format!("no exact 2-factor ({} nodes, exhaustive)", out.nodes)),
            }
            print_json(&out)?;
        }
        JohnsonCmd::ValidateNest { file } => {
            let sub = in_file(&file, load_structure(&file))?;
            let report = johnson::validate_nest(&sub)?;
            print_json(&report)?;
            note(&verdict(report.valid));
            if !report.valid {
                return Err(Failure::Rejected);
            }
        }
    }
    Ok(())
}

fn broken_pipe(e: &Error) -> bool {
    match e {
        Error::Io(io) => io.kind() == std::io::ErrorKind::BrokenPipe,
        Error::Json(j) => j.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe),
        _ => false,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Error(e)) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("{}: {e}", color("31", "error"));
            ExitCode::from(2)
        }
        Err(Failure::File(path, e)) => {
            eprintln!("{}: {}: {e}", color("31", "error"), path.display());
            ExitCode::from(2)
        }
    }
}
