use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nvaw_core::format::{emit, Workbench};
use nvaw_core::registry;
use nvaw_core::report::{CheckConfig, CheckReport};
use nvaw_core::suite::{self, Output, Suite, SuiteError, SuiteOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "nvaw", version, about = "Exact checks and constructions for nonlocal vertex algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Comparison window for x exponents, as `lo..hi`.
    #[arg(long, default_value = "-8..8", allow_hyphen_values = true, value_parser = parse_window)]
    window: (i32, i32),
    /// Largest k tried for weak associativity and commutation.
    #[arg(long, default_value_t = 10)]
    kmax: u32,
    /// Also write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite on a file or a registry name.
    Check {
        input: String,
        #[arg(long)]
        suite: String,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        smap: Option<String>,
        /// Algebra to check when the input declares several (default: the last).
        #[arg(long)]
        algebra: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Build U ⊗_R V and write it as a workbench file.
    Product {
        u: String,
        v: String,
        #[arg(long)]
        twist: String,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build the smash product of an action and a coaction.
    Smash {
        action: String,
        coaction: String,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Recover a twisting operator from K and embeddings of U and V.
    ExtractTwist {
        k: String,
        #[arg(long = "u")]
        umap: String,
        #[arg(long = "v")]
        vmap: String,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for S(x) from the skew-symmetry relation.
    ExtractSmap {
        k: String,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// List the registry.
    List,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once("..").ok_or("expected `lo..hi`")?;
    let lo: i32 = a.trim().parse().map_err(|_| format!("bad lower bound `{a}`"))?;
    let hi: i32 = b.trim().parse().map_err(|_| format!("bad upper bound `{b}`"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

impl Common {
    fn cfg(&self) -> CheckConfig {
        CheckConfig::new(self.window.0, self.window.1, self.kmax)
    }
}

enum Failure {
    Usage(String),
    Verdict(String),
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Usage(s) => Failure::Usage(s),
            SuiteError::Failed(s) => Failure::Verdict(s),
        }
    }
}

fn io(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn json_reports(reports: &[CheckReport]) -> serde_json::Value {
    let rows: Vec<_> = reports
        .iter()
        .flat_map(|r| {
            r.results.iter().map(move |i| {
                json!({
                    "suite": r.suite,
                    "identity": i.identity,
                    "verdict": i.verdict,
                    "witnesses": i.witnesses,
                    "window": r.window,
                })
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Prints the reports and returns whether all passed.
fn emit_reports(reports: &[CheckReport], common: &Common) -> Result<bool, Failure> {
    for r in reports {
        print!("{}", r.render_text());
    }
    if let Some(p) = &common.json {
        let text = serde_json::to_string_pretty(&json_reports(reports)).expect("reports serialize");
        std::fs::write(p, text + "\n").map_err(|e| io(p, e))?;
    }
    Ok(reports.iter().all(CheckReport::passed))
}

fn write_output(out: &Output, path: Option<&Path>) -> Result<(), Failure> {
    let text = emit(&out.file);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Check { input, suite: s, twist, smap, algebra, common } => {
            let suite: Suite = s.parse()?;
            let wb = suite::resolve_input(&input)?;
            let opts = SuiteOptions { algebra, twist, smap };
            let reports = suite::run_suite(&wb, suite, &opts, &common.cfg())?;
            emit_reports(&reports, &common)
        }
        Command::Product { u, v, twist, output, common } => {
            let (wu, wv) = (suite::resolve_input(&u)?, suite::resolve_input(&v)?);
            let (a, b) = (suite::primary(&wu, None)?, suite::primary(&wv, None)?);
            let r = find_pair_twist(&[&wu, &wv], &twist, a, b)?;
            let out = suite::run_product(a, b, &r, &common.cfg())?;
            let ok = emit_reports(&out.reports, &common)?;
            write_output(&out, Some(&output))?;
            Ok(ok)
        }
        Command::Smash { action, coaction, output, common } => {
            let (wa, wc) = (suite::resolve_input(&action)?, suite::resolve_input(&coaction)?);
            let m = wa.actions.first().ok_or_else(|| Failure::Usage(format!("{action}: no `action` block")))?;
            let c = wc.coactions.first().ok_or_else(|| Failure::Usage(format!("{coaction}: no `coaction` block")))?;
            let out = suite::run_smash(m, c, &common.cfg())?;
            let ok = emit_reports(&out.reports, &common)?;
            write_output(&out, Some(&output))?;
            Ok(ok)
        }
        Command::ExtractTwist { k, umap, vmap, algebra, output, common } => {
            let wb = suite::resolve_input(&k)?;
            let a = suite::primary(&wb, algebra.as_deref())?;
            let out = suite::run_extract_twist(&wb, a, &umap, &vmap, &common.cfg())?;
            let ok = emit_reports(&out.reports, &common)?;
            write_output(&out, output.as_deref())?;
            Ok(ok)
        }
        Command::ExtractSmap { k, algebra, output, common } => {
            let wb = suite::resolve_input(&k)?;
            let a = suite::primary(&wb, algebra.as_deref())?;
            let out = suite::run_extract_smap(a, &common.cfg())?;
            let ok = emit_reports(&out.reports, &common)?;
            write_output(&out, output.as_deref())?;
            Ok(ok)
        }
        Command::List => {
            for (title, rows) in [("algebras", registry::ALGEBRAS), ("twists", registry::TWISTS), ("S-maps", registry::SMAPS), ("smash data", registry::SMASH)] {
                println!("{title}:");
                for (name, desc) in rows {
                    println!("  {name:<12} {desc}");
                }
            }
            Ok(true)
        }
    }
}

fn find_pair_twist(files: &[&Workbench], name: &str, u: &nvaw_core::nva::Nva, v: &nvaw_core::nva::Nva) -> Result<nvaw_core::twist::TwistOp, Failure> {
    files
        .iter()
        .find_map(|wb| wb.twist(name).cloned())
        .or_else(|| registry::twist(name, u, v))
        .ok_or_else(|| Failure::Usage(format!("unknown twist `{name}`")))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verdict(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
