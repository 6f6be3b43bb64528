use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use brocard::conditions::{bound_check_report, factor_structure, verify_factorial};
use brocard::epsilon_lab::{self, Finding, DEFAULT_NINE_RUN_CAP};
use brocard::factorial_engine::{factorial_exact, PrimePool, DEFAULT_EXACT_CEILING, DEFAULT_POOL_SIZE};
use brocard::poly_system::solve_window;
use brocard::report::{PriorReport, ReportLine, ReportWriter};
use brocard::search_engine::{self, load_checkpoint, SearchConfig, DEFAULT_CHECKPOINT_INTERVAL};
use brocard::{BitBudget, Error, Integer};
use clap::{Parser, Subcommand};

const EXIT_USAGE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_CHECKPOINT: u8 = 3;

/// Search and verification tools for n! + 1 = m^2.
#[derive(Debug, Parser)]
#[command(name = "brocard", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan n = 2..=max-n with the quadratic-residue filter.
    Search {
        #[arg(long)]
        max_n: u64,
        /// Number of filter primes.
        #[arg(long, default_value_t = DEFAULT_POOL_SIZE)]
        primes: usize,
        /// Checkpoint file, written every --checkpoint-interval values of n
        /// and at the end of the run.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from --checkpoint.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// JSON-lines report; standard output when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Stop after this n (defaults to --max-n); the pool is still built for --max-n.
        #[arg(long)]
        stop_at: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT_INTERVAL)]
        checkpoint_interval: u64,
        /// Survivors above this n are reported unresolved.
        #[arg(long, default_value_t = DEFAULT_EXACT_CEILING)]
        exact_ceiling: u64,
    },
    /// Evaluate every solution criterion for one n.
    Verify {
        n: u64,
        /// Also print the (2a)(2^(e-1) b) split of n! for a solution.
        #[arg(long)]
        factor_structure: bool,
    },
    /// Decimal expansion of the fractional part of sqrt(n!).
    Epsilon {
        n: u64,
        #[arg(long, default_value_t = 20)]
        digits: u32,
        /// Count the leading 9s with adaptive precision.
        #[arg(long)]
        nine_run: bool,
        #[arg(long, default_value_t = DEFAULT_NINE_RUN_CAP)]
        cap: u32,
    },
    /// Worked-example table with computed values and flagged misprints.
    Table {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 11)]
        to: u64,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Integer solutions of the two-polynomial system in a y-window.
    Polysys {
        #[arg(long, allow_negative_numbers = true)]
        ymin: Integer,
        #[arg(long, allow_negative_numbers = true)]
        ymax: Integer,
        /// Keep only points whose x is a factorial.
        #[arg(long)]
        factorials: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // clap's first paragraph, folded onto one line
            let rendered = e.render().to_string();
            let reason: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            eprintln!("{}", reason.join(" "));
            eprintln!("usage: brocard <search|verify|epsilon|table|polysys> [options]; see brocard --help");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Checkpoint(_) => EXIT_CHECKPOINT,
                _ => EXIT_INTERNAL,
            })
        }
    }
}

fn io_err(what: &str) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: PathBuf::from(what),
        source,
    }
}

fn dispatch(command: Command) -> brocard::Result<()> {
    match command {
        Command::Search {
            max_n,
            primes,
            checkpoint,
            resume,
            threads,
            report,
            stop_at,
            checkpoint_interval,
            exact_ceiling,
        } => {
            let config = SearchConfig {
                max_n,
                pool_size: primes,
                stop_at,
                checkpoint_path: checkpoint,
                resume,
                checkpoint_interval,
                exact_verify_ceiling: exact_ceiling,
                worker_count: threads,
            };
            search(&config, report)
        }
        Command::Verify { n, factor_structure } => verify(n, factor_structure),
        Command::Epsilon {
            n,
            digits,
            nine_run,
            cap,
        } => epsilon(n, digits, nine_run.then_some(cap)),
        Command::Table { from, to, digits } => table(from, to, digits),
        Command::Polysys {
            ymin,
            ymax,
            factorials,
        } => {
            let mut out = io::stdout().lock();
            for p in solve_window(&ymin, &ymax, factorials)? {
                writeln!(out, "x={} y={}", p.x, p.y).map_err(io_err("stdout"))?;
            }
            Ok(())
        }
    }
}

fn search(config: &SearchConfig, report: Option<PathBuf>) -> brocard::Result<()> {
    let prior = match (&config.checkpoint_path, &report) {
        (Some(ckpt), Some(path)) if config.resume => {
            // Reject a foreign checkpoint before the report is touched.
            let pool = PrimePool::build(config.max_n, config.pool_size)?;
            let at = load_checkpoint(ckpt, &pool)?.n();
            let prior = PriorReport::load(path, at)?;
            prior.rewrite(path)?;
            Some(prior)
        }
        _ => None,
    };

    let sink: Box<dyn Write> = match &report {
        Some(path) => {
            let file = if config.resume {
                OpenOptions::new().create(true).append(true).open(path)
            } else {
                File::create(path)
            };
            Box::new(io::BufWriter::new(file.map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?))
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut writer = ReportWriter::new(sink);
    let report_name = report
        .as_ref()
        .map_or_else(|| "stdout".to_string(), |p| p.display().to_string());

    let summary = search_engine::run(config, |event| {
        writer
            .write_line(&ReportLine::from_event(event))
            .map_err(io_err(&report_name))
    })?;
    let summary = match prior.and_then(|p| p.summary) {
        Some(earlier) => earlier.merge(summary),
        None => summary,
    };
    writer
        .write_line(&ReportLine::summary(&summary))
        .map_err(io_err(&report_name))?;

    let sols: Vec<String> = summary
        .solutions
        .iter()
        .map(|(n, m)| format!("(m={m}, n={n})"))
        .collect();
    eprintln!(
        "scanned n = {}..={} ({} values): solutions [{}], {} survivors, {} unresolved, {:.2?}",
        summary.from_n,
        summary.to_n,
        summary.scanned(),
        sols.join(", "),
        summary.survivors_exact_checked,
        summary.unresolved.len(),
        summary.wall_time
    );
    Ok(())
}

fn verify(n: u64, with_structure: bool) -> brocard::Result<()> {
    let factorial = factorial_exact(n)?;
    let r = verify_factorial(n, &factorial);
    let bound = bound_check_report(&r, &factorial);
    let mut out = io::stdout().lock();
    let mut lines = vec![
        format!("n={n}"),
        format!("k={}", r.k),
        format!("m_candidate={}", r.m_candidate),
        format!("k_even={}", r.k_even),
        format!("product={}", r.product()),
        format!("product_matches={}", r.product_matches),
        format!("defect={}", r.defect),
        format!("bound={bound}"),
        format!("is_solution={}", r.is_solution),
    ];
    if let Some(m) = &r.m {
        lines.push(format!("m={m}"));
    }
    if with_structure {
        match factor_structure(n) {
            Ok(s) => lines.extend([
                format!("a={}", s.a),
                format!("b={}", s.b),
                format!("e={}", s.e),
                format!("half_even={}", s.half_even),
                format!("half_pow={}", s.half_pow),
            ]),
            Err(Error::NotASolution(_)) => lines.push("factor_structure=none".into()),
            Err(e) => return Err(e),
        }
    }
    for line in lines {
        writeln!(out, "{line}").map_err(io_err("stdout"))?;
    }
    Ok(())
}

fn epsilon(n: u64, digits: u32, nine_run_cap: Option<u32>) -> brocard::Result<()> {
    let budget = BitBudget::from_env()?;
    let mut out = io::stdout().lock();
    let eps = epsilon_lab::epsilon_digits(n, digits, budget)?;
    writeln!(out, "n={n}\nepsilon={eps}").map_err(io_err("stdout"))?;
    match epsilon_lab::k_ratio_digits(n, digits, budget) {
        Ok(ratio) => writeln!(out, "ratio={ratio}"),
        Err(Error::Domain(_)) => writeln!(out, "ratio=undefined"),
        Err(e) => return Err(e),
    }
    .map_err(io_err("stdout"))?;
    if let Some(cap) = nine_run_cap {
        let p = epsilon_lab::nine_run(n, cap, budget)?;
        let run = match p.nine_run {
            None => "none".to_string(),
            Some(r) if p.nine_run_is_lower_bound => format!(">={r}"),
            Some(r) => r.to_string(),
        };
        let steps: Vec<String> = p.precision_steps.iter().map(u32::to_string).collect();
        writeln!(out, "nine_run={run}\nprecision_steps={}", steps.join(",")).map_err(io_err("stdout"))?;
    }
    Ok(())
}

fn table(from: u64, to: u64, digits: u32) -> brocard::Result<()> {
    if from > to {
        return Err(Error::Domain(format!("empty table range {from}..={to}")));
    }
    let rows = epsilon_lab::reproduce_table(from, to, digits, BitBudget::from_env()?)?;
    let mut out = io::stdout().lock();
    let mut w = |s: String| writeln!(out, "{s}").map_err(io_err("stdout"));
    w("n\tn!\tk\tk_even\tk(k+2)\tbound\tdefect\tsolution\tepsilon\tratio\tpublished_epsilon\tpublished_ratio".into())?;
    for r in &rows {
        let ratio = r.ratio.as_ref().map_or("-".to_string(), ToString::to_string);
        let (pe, pr) = r.published.map_or(("-", "-"), |p| (p.epsilon, p.ratio));
        w(format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.n, r.factorial, r.k, r.k_even, r.product, r.bound, r.defect, r.is_solution, r.epsilon, ratio, pe, pr
        ))?;
    }
    for r in &rows {
        for f in &r.findings {
            match f {
                Finding::KMisprint {
                    column,
                    published,
                    computed,
                } => w(format!(
                    "MISPRINT n={} {column}: published k={published}, computed k={computed}",
                    r.n
                ))?,
                Finding::DigitMismatch {
                    column,
                    published,
                    computed,
                } => w(format!(
                    "MISMATCH n={} {column}: published {published}, computed {computed}",
                    r.n
                ))?,
            }
        }
    }
    Ok(())
}
