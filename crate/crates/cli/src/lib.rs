//! Command-line front end: certificates, searches, hierarchy tables and
//! DIMACS export.
//!
//! Exit status is 0 exactly when the command found no violations and every
//! mandatory check finished within budget; 1 otherwise; 2 on bad input.

pub mod certificate;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use regressive::coloring::{build_ladder, ConstructionParams};
use regressive::hierarchy::{
    ack_eval, compare, f_eval, isqrt_half, EvalBudget, EvalResult, Hierarchy, HierarchyIndex, Verdict,
    DEFAULT_MAX_STEPS,
};
use regressive::search::{export_cnf, DEFAULT_NODE_LIMIT};
use serde::Serialize;
use thiserror::Error;

pub use certificate::{cmd_certify, cmd_nu, cmd_reduction, Certificate};

/// Overrides the default thread count for searches.
pub const THREADS_ENV: &str = "REGRESSIVE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "regressive", version, about = "Certificates and searches for regressive pair colorings")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Write output to this file; a directory gets a file named after the
    /// command and its parameters.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Search threads (0 uses every core).
    #[arg(long, env = THREADS_ENV, default_value_t = 0, global = true)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the construction on [4k², f_k(4k²)) (or a prefix).
    Certify {
        #[arg(long)]
        k: u32,
        /// Verify only [4k², cap], for k whose interval is out of reach.
        #[arg(long)]
        cap: Option<u64>,
        /// Step budget for hierarchy evaluation.
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        budget: u64,
    },
    /// Compute ν(k) by sweeping N up to a cap.
    Nu {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 12)]
        n_cap: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
    },
    /// Export the avoidance CNF for colorings of {1..N} in DIMACS form.
    Cnf {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Evaluate f_i(n) and A_i(n) under a step budget.
    Hierarchy {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        n: BigUint,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        budget: u64,
        /// Decide f_i(n) >= T with early exit instead of evaluating fully.
        #[arg(long)]
        threshold: Option<BigUint>,
    },
    /// List the rungs of the level-i ladder over 4k² up to a cap.
    Ladder {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        cap: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        budget: u64,
    },
    /// Check the red/blue triple lemmas on the construction's coloring.
    Reduction {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        budget: u64,
        /// Cap on blue set sizes searched.
        #[arg(long)]
        max_set: Option<usize>,
    },
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    /// File name used when `--out` is a directory.
    pub file_name: String,
    /// True when the command's exit status is 0.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    pub i: u32,
    pub n: String,
    pub budget: u64,
    pub isqrt_half: String,
    pub f: EvalReport,
    pub ackermann: EvalReport,
    pub threshold: Option<ThresholdReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub exact: bool,
    /// The value, or a lower bound when not exact.
    pub value: String,
    pub steps_used: u64,
}

impl From<EvalResult> for EvalReport {
    fn from(r: EvalResult) -> Self {
        EvalReport { exact: r.is_exact(), value: r.value.to_string(), steps_used: r.steps_used }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub threshold: String,
    pub verdict: Verdict,
    pub steps_used: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    pub k: u32,
    pub i: u32,
    pub cap: u64,
    pub complete: bool,
    pub rungs: Vec<u64>,
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Invalid(e.to_string())
}

/// `f_i(n)`, `A_i(n)` and optionally `f_i(n) >= T`. Only the `f_i` part is
/// mandatory: the threshold verdict when one is given, the exact value
/// otherwise.
pub fn cmd_hierarchy(
    i: u32,
    n: &BigUint,
    budget: u64,
    threshold: Option<&BigUint>,
) -> Result<HierarchyReport, CliError> {
    let idx = HierarchyIndex::new(i).map_err(invalid)?;
    let b = EvalBudget::new(budget).map_err(invalid)?;
    let threshold = threshold.map(|t| {
        let c = compare(Hierarchy::SqrtIterated, idx, 1, n, Some(t), b);
        ThresholdReport { threshold: t.to_string(), verdict: c.verdict, steps_used: c.steps_used }
    });
    Ok(HierarchyReport {
        i,
        n: n.to_string(),
        budget,
        isqrt_half: isqrt_half(n).to_string(),
        f: f_eval(idx, n, b).into(),
        ackermann: ack_eval(idx, n, b).into(),
        threshold,
    })
}

impl HierarchyReport {
    pub fn ok(&self) -> bool {
        match &self.threshold {
            Some(t) => t.verdict != Verdict::Unknown,
            None => self.f.exact,
        }
    }

    fn table_rows(&self) -> Vec<(String, String)> {
        let show = |r: &EvalReport| {
            let rel = if r.exact { "=" } else { ">=" };
            format!("{rel} {} ({} steps)", r.value, r.steps_used)
        };
        let mut rows = vec![
            ("isqrt_half(n)".to_string(), self.isqrt_half.clone()),
            (format!("f_{}({})", self.i, self.n), show(&self.f)),
            (format!("A_{}({})", self.i, self.n), show(&self.ackermann)),
        ];
        if let Some(t) = &self.threshold {
            let v = match t.verdict {
                Verdict::Yes => "yes",
                Verdict::No => "no",
                Verdict::Unknown => "unknown (budget exhausted)",
            };
            rows.push((
                format!("f_{}({}) >= {}", self.i, self.n, t.threshold),
                format!("{v} ({} steps)", t.steps_used),
            ));
        }
        rows.push(("budget".into(), self.budget.to_string()));
        rows
    }
}

pub fn cmd_ladder(k: u32, i: u32, cap: u64, budget: u64) -> Result<LadderReport, CliError> {
    let params = ConstructionParams::new(k).map_err(invalid)?;
    let idx = HierarchyIndex::new(i).map_err(invalid)?;
    let b = EvalBudget::new(budget).map_err(invalid)?;
    let l = build_ladder(idx, params, cap, b).map_err(invalid)?;
    Ok(LadderReport { k, i, cap, complete: l.complete, rungs: l.rungs })
}

/// Two aligned columns.
pub fn render_table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn machine<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn render_certificate(cert: &Certificate, format: Format) -> Output {
    let (text, ext) = match format {
        Format::Table => (render_table(&cert.table_rows()), "txt"),
        Format::Machine => (cert.to_machine(), "json"),
    };
    Output { text, file_name: format!("{}.{ext}", cert.stem()), ok: cert.status.ok() }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Table => "txt",
        Format::Machine => "json",
    }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let threads = cli.threads;
    Ok(match &cli.command {
        Command::Certify { k, cap, budget } => {
            render_certificate(&cmd_certify(*k, *cap, *budget, threads)?, cli.format)
        }
        Command::Nu { k, n_cap, node_limit } => {
            render_certificate(&cmd_nu(*k, *n_cap, *node_limit, threads)?, cli.format)
        }
        Command::Reduction { k, budget, max_set } => {
            render_certificate(&cmd_reduction(*k, *budget, *max_set)?, cli.format)
        }
        Command::Cnf { n, k } => Output {
            text: export_cnf(*n, *k).map_err(invalid)?.to_dimacs(),
            file_name: format!("cnf_n{n}_k{k}.cnf"),
            ok: true,
        },
        Command::Hierarchy { i, n, budget, threshold } => {
            let r = cmd_hierarchy(*i, n, *budget, threshold.as_ref())?;
            let text = match cli.format {
                Format::Table => render_table(&r.table_rows()),
                Format::Machine => machine(&r),
            };
            let file_name = format!("hierarchy_i{i}_n{n}.{}", ext(cli.format));
            Output { text, file_name, ok: r.ok() }
        }
        Command::Ladder { k, i, cap, budget } => {
            let r = cmd_ladder(*k, *i, *cap, *budget)?;
            let text = match cli.format {
                Format::Table => {
                    let rungs: Vec<String> = r.rungs.iter().map(u64::to_string).collect();
                    let mut t = rungs.join(" ");
                    t.push('\n');
                    if !r.complete {
                        t.push_str("(incomplete: budget exhausted)\n");
                    }
                    t
                }
                Format::Machine => machine(&r),
            };
            Output { text, file_name: format!("ladder_k{k}_i{i}_cap{cap}.{}", ext(cli.format)), ok: r.complete }
        }
    })
}

/// Where `--out` sends the output: the path itself, or a named file inside
/// it when it is an existing directory.
pub fn resolve_out(out: &Path, file_name: &str) -> PathBuf {
    if out.is_dir() {
        out.join(file_name)
    } else {
        out.to_path_buf()
    }
}

/// Writes the output and returns the process exit code.
pub fn emit(cli: &Cli, output: &Output) -> Result<i32, CliError> {
    match &cli.out {
        Some(out) => {
            let path = resolve_out(out, &output.file_name);
            std::fs::write(&path, &output.text).map_err(|source| CliError::Io { path, source })?;
        }
        None => print!("{}", output.text),
    }
    Ok(if output.ok { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("regressive").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn ladder_example() {
        let out = run(&parse(&["ladder", "--k", "3", "--i", "2", "--cap", "45"])).unwrap();
        assert_eq!(out.text, "36 39 42 45\n");
        assert!(out.ok);
    }

    #[test]
    fn hierarchy_example() {
        let r = cmd_hierarchy(3, &BigUint::from(36u32), DEFAULT_MAX_STEPS, None).unwrap();
        assert_eq!(r.f.value, "45");
        assert!(r.f.exact && r.ok());
        let t = cmd_hierarchy(7, &BigUint::from(16u32), DEFAULT_MAX_STEPS, Some(&BigUint::from(4096u32))).unwrap();
        assert_eq!(t.threshold.unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn hierarchy_budget_is_not_ok() {
        let r = cmd_hierarchy(5, &BigUint::from(100u32), 10, None).unwrap();
        assert!(!r.f.exact);
        assert!(!r.ok());
    }

    #[test]
    fn table_alignment() {
        let t = render_table(&[("a".into(), "1".into()), ("long key".into(), "2".into())]);
        assert_eq!(t, "a         1\nlong key  2\n");
    }

    #[test]
    fn flags_parse() {
        let cli =
            parse(&["--format", "machine", "nu", "--k", "3", "--n-cap", "5", "--node-limit", "99", "--threads", "2"]);
        assert_eq!(cli.format, Format::Machine);
        assert_eq!(cli.threads, 2);
        assert!(matches!(cli.command, Command::Nu { k: 3, n_cap: 5, node_limit: 99 }));
        assert!(Cli::try_parse_from(["regressive", "certify"]).is_err());
    }

    #[test]
    fn out_directory_gets_named_file() {
        let dir = std::env::temp_dir();
        assert_eq!(resolve_out(&dir, "nu_k3.json"), dir.join("nu_k3.json"));
        let file = dir.join("definitely-not-a-dir.json");
        assert_eq!(resolve_out(&file, "nu_k3.json"), file);
    }
}
