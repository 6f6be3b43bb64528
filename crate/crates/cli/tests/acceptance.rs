//! Acceptance gates. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any failed. Run with `cargo test -p brocard-cli --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use brocard::conditions::{bound_check_report, verify_factorial, BoundCheck};
use brocard::epsilon_lab::{self, DEFAULT_NINE_RUN_CAP, PUBLISHED_ROWS};
use brocard::factorial_engine::{FactorialState, PrimePool};
use brocard::poly_system::{solve_window, LatticePoint};
use brocard::qr_filter::passes;
use brocard::{BitBudget, Integer, ScaledDecimal};

const KNOWN: [(u64, u64); 3] = [(4, 5), (5, 11), (7, 71)];

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn budget() -> BitBudget {
    BitBudget::DEFAULT
}

fn brocard(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_brocard"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    ensure!(
        out.status.success(),
        "brocard {} exited with {:?}: {}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stderr).trim()
    );
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

/// Solutions, unresolved count and summary counters of a JSON-lines report.
/// Each solution is re-checked as m^2 = n! + 1 with rug's own factorial.
struct ParsedReport {
    solutions: Vec<(u64, u64)>,
    unresolved: u64,
    scanned: u64,
}

fn parse_report(text: &str) -> Result<ParsedReport, String> {
    let mut solutions = Vec::new();
    let mut summary = None;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| format!("{line:?}: {e}"))?;
        ensure!(summary.is_none(), "line after the summary: {line}");
        match v["kind"].as_str() {
            Some("solution") => {
                let n = v["n"].as_u64().ok_or("solution without n")?;
                let m: Integer = v["m"].to_string().parse().map_err(|_| "bad m")?;
                let fact = Integer::from(Integer::factorial(n as u32));
                ensure!(Integer::from(m.square_ref()) == fact + 1u32, "m^2 != n!+1 for n = {n}");
                solutions.push((n, m.to_u64().ok_or("m too large")?));
            }
            Some("summary") => summary = Some(v),
            Some(_) => {}
            None => return Err(format!("line without kind: {line}")),
        }
    }
    let summary = summary.ok_or("no summary line")?;
    let counter = |k: &str| summary["counters"][k].as_u64().ok_or(format!("summary lacks {k}"));
    ensure!(
        counter("solutions")? == solutions.len() as u64,
        "summary solution count disagrees"
    );
    Ok(ParsedReport {
        solutions,
        unresolved: counter("unresolved")?,
        scanned: counter("scanned")?,
    })
}

fn c1_known_solutions() -> Outcome {
    let report = parse_report(&brocard(&["search", "--max-n", "100"])?)?;
    ensure!(report.solutions == KNOWN, "solutions {:?}", report.solutions);
    ensure!(report.scanned == 99, "scanned {}", report.scanned);
    Ok(format!("(m, n) = {:?}", report.solutions.iter().map(|&(n, m)| (m, n)).collect::<Vec<_>>()))
}

fn c2_desk_scan() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("scan.jsonl");
    let path_s = path.to_str().unwrap();
    brocard(&["search", "--max-n", "1000000", "--primes", "48", "--threads", "1", "--report", path_s])?;
    let report = parse_report(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)?;
    let ns: Vec<u64> = report.solutions.iter().map(|&(n, _)| n).collect();
    ensure!(ns == [4, 5, 7], "solutions at {ns:?}");
    ensure!(report.unresolved == 0, "{} unresolved", report.unresolved);
    ensure!(report.scanned == 999_999, "scanned {}", report.scanned);
    Ok(format!("n in {ns:?}, 0 unresolved"))
}

fn c3_theorem_suite() -> Outcome {
    let mut fact = Integer::from(1);
    let mut equality_at = Vec::new();
    for n in 1..=2000u64 {
        fact *= n;
        let r = verify_factorial(n, &fact);
        let two_k = Integer::from(&r.k * 2u32);
        let k_sq = Integer::from(r.k.square_ref());
        let product = r.product();
        let known = KNOWN.iter().any(|&(s, _)| s == n);
        // (a) 0 <= n! - k^2 <= 2k
        ensure!(r.defect >= 0 && r.defect <= two_k, "defect out of range at n = {n}");
        ensure!(Integer::from(&fact - &k_sq) == r.defect, "defect arithmetic at n = {n}");
        // (b) defect = 2k exactly at the solutions
        ensure!((r.defect == two_k) == known, "defect = 2k disagrees at n = {n}");
        ensure!(r.is_solution == known, "is_solution disagrees at n = {n}");
        // (c) n! <= k(k+2), strict off the solutions
        ensure!(fact <= product, "n! > k(k+2) at n = {n}");
        ensure!((fact == product) == known, "equality disagrees at n = {n}");
        let expected = if known { BoundCheck::Equality } else { BoundCheck::Strict };
        ensure!(bound_check_report(&r, &fact) == expected, "bound check at n = {n}");
        // (d) k^2 - 1 < n!
        ensure!(k_sq - 1u32 < fact, "k^2 - 1 >= n! at n = {n}");
        if fact == product {
            equality_at.push(n);
        }
    }
    Ok(format!("n = 1..=2000, equality only at {equality_at:?}"))
}

fn c4_table() -> Outcome {
    let rows = epsilon_lab::reproduce_table(1, 11, 12, budget()).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for published in PUBLISHED_ROWS.iter().filter(|r| (2..=11).contains(&r.n)) {
        let row = rows.iter().find(|r| r.n == published.n).ok_or("missing row")?;
        let printed: ScaledDecimal = published.epsilon.parse().map_err(|_| "bad published epsilon")?;
        let computed = row.epsilon.truncate_to(printed.frac_digits());
        let ulps = computed.ulp_distance(&printed).ok_or("incomparable")?;
        ensure!(ulps <= 1, "n = {}: {} vs published {}", published.n, computed, printed);
        compared += 1;
    }
    let table = brocard(&["table", "--from", "1", "--to", "11", "--digits", "10"])?;
    let misprints: Vec<&str> = table.lines().filter(|l| l.starts_with("MISPRINT")).collect();
    ensure!(misprints.len() == 2, "misprint lines {misprints:?}");
    ensure!(
        misprints[0].contains("n=8") && misprints[0].contains("published k=26") && misprints[0].contains("computed k=200"),
        "n = 8 misprint not flagged: {misprints:?}"
    );
    ensure!(
        misprints[1].contains("n=11") && misprints[1].contains("published k=6371") && misprints[1].contains("computed k=6317"),
        "n = 11 misprint not flagged: {misprints:?}"
    );
    ensure!(!table.contains("MISMATCH"), "digit mismatches reported");
    Ok(format!("{compared} epsilon prefixes within 1 ulp; k misprints flagged at n = 8, 11"))
}

fn c5_monotone() -> Outcome {
    let ok = epsilon_lab::check_f_monotone(1, 10_000, 12, budget()).map_err(|e| e.to_string())?;
    ensure!(ok, "f is not strictly increasing below 1 on [1, 10^4]");
    Ok("f(k) < f(k+1) < 1 for k in [1, 10^4)".into())
}

fn c6_polynomial_system() -> Outcome {
    let mut brute = Vec::new();
    for y in -200i64..=200 {
        for x in -50_000i64..=50_000 {
            let f = y.pow(4) + 4 * y.pow(3) + 2 * x * y * y + 4 * y * y + 4 * x * y - 3 * x * x;
            let g = y.pow(3) + 3 * y * y + 2 * y - x * y - x;
            if f == 0 && g == 0 {
                brute.push(LatticePoint::new(x, y));
            }
        }
    }
    let solved = solve_window(&Integer::from(-200), &Integer::from(200), false).map_err(|e| e.to_string())?;
    let brute: BTreeSet<_> = brute.into_iter().collect();
    let solved: BTreeSet<_> = solved.into_iter().collect();
    ensure!(brute == solved, "brute force {} points, window solver {}", brute.len(), solved.len());

    let facts = solve_window(&Integer::from(0), &Integer::from(10_000), true).map_err(|e| e.to_string())?;
    let expected = vec![
        LatticePoint::new(24, 4),
        LatticePoint::new(120, 10),
        LatticePoint::new(5040, 70),
    ];
    ensure!(facts == expected, "factorial points {facts:?}");
    Ok(format!("{} points in the brute-force box; factorial points (24,4), (120,10), (5040,70)", brute.len()))
}

fn c7_filter_soundness() -> Outcome {
    let pool = PrimePool::build(2000, 48).map_err(|e| e.to_string())?;
    let mut state = FactorialState::start(&pool, false);
    let mut fact = Integer::from(1);
    let mut rejected = 0;
    for n in 1..=2000u64 {
        state.advance(&pool).map_err(|e| e.to_string())?;
        fact *= n;
        let succ = Integer::from(&fact + 1u32);
        let outcome = passes(&state, &pool);
        if succ.is_perfect_square() {
            ensure!(outcome.passed, "solution n = {n} rejected by {:?}", outcome.rejecting_prime);
            for &p in pool.primes() {
                let symbol = succ.legendre(&Integer::from(p));
                ensure!(symbol >= 0, "symbol -1 at n = {n}, p = {p}");
            }
        } else if !outcome.passed {
            rejected += 1;
        }
    }
    Ok(format!("no solution rejected; {rejected} of 2000 non-solutions rejected"))
}

fn strip_wall_time(report: &str) -> String {
    let key = "\"wall_time_ms\":";
    match report.find(key) {
        Some(at) => {
            let rest = &report[at + key.len()..];
            let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
            format!("{}{}", &report[..at + key.len()], &rest[digits..])
        }
        None => report.to_string(),
    }
}

fn c8_resume() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (single, split, ckpt) = (p("single.jsonl"), p("split.jsonl"), p("scan.ckpt"));
    let max = "100000";
    brocard(&["search", "--max-n", max, "--report", &single])?;
    brocard(&[
        "search", "--max-n", max, "--stop-at", "37000", "--threads", "3",
        "--checkpoint", &ckpt, "--checkpoint-interval", "10000", "--report", &split,
    ])?;
    brocard(&[
        "search", "--max-n", max, "--threads", "2", "--checkpoint", &ckpt,
        "--checkpoint-interval", "10000", "--resume", "--report", &split,
    ])?;
    let read = |path: &str| std::fs::read_to_string(Path::new(path)).map_err(|e| e.to_string());
    let (a, b) = (read(&single)?, read(&split)?);
    ensure!(
        strip_wall_time(&a) == strip_wall_time(&b),
        "reports differ:\n{a}\n---\n{b}"
    );
    Ok(format!("{} report lines identical after resume at n = 37000", a.lines().count()))
}

fn c9_nine_run() -> Outcome {
    const PUBLISHED_CLAIM: u32 = 228_287;
    let n = 100_000;
    let first = epsilon_lab::nine_run(n, DEFAULT_NINE_RUN_CAP, budget()).map_err(|e| e.to_string())?;
    let second = epsilon_lab::nine_run(n, DEFAULT_NINE_RUN_CAP, budget()).map_err(|e| e.to_string())?;
    ensure!(first == second, "nine_run is not reproducible");
    let run = first.nine_run.ok_or("epsilon is zero")?;
    let int_digits = Integer::from(Integer::factorial(n as u32)).sqrt().to_string().len();
    let verdict = if run == PUBLISHED_CLAIM && !first.nine_run_is_lower_bound {
        "confirms".to_string()
    } else {
        format!("refutes the published {PUBLISHED_CLAIM}")
    };
    let first_digits: String = first.epsilon.fraction_digits().chars().take(12).collect();
    Ok(format!(
        "leading nines of e(10^5) = {run}{} (e = 0.{first_digits}..., steps {:?}); {verdict}; sqrt(10^5!) has {int_digits} integer digits",
        if first.nine_run_is_lower_bound { " (lower bound)" } else { "" },
        first.precision_steps
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "known solutions up to 100", limit: Duration::from_secs(1), check: c1_known_solutions },
        Criterion { id: 2, name: "scan to 10^6 with 48 primes, 1 thread", limit: Duration::from_secs(60), check: c2_desk_scan },
        Criterion { id: 3, name: "theorem suite n <= 2000", limit: Duration::from_secs(30), check: c3_theorem_suite },
        Criterion { id: 4, name: "worked-example table", limit: Duration::from_secs(5), check: c4_table },
        Criterion { id: 5, name: "f monotone on [1, 10^4]", limit: Duration::from_secs(30), check: c5_monotone },
        Criterion { id: 6, name: "polynomial system completeness", limit: Duration::from_secs(60), check: c6_polynomial_system },
        Criterion { id: 7, name: "filter soundness n <= 2000", limit: Duration::from_secs(30), check: c7_filter_soundness },
        Criterion { id: 8, name: "checkpoint resume at 10^5", limit: Duration::from_secs(30), check: c8_resume },
        Criterion { id: 9, name: "nine-run of e(10^5)", limit: Duration::from_secs(600), check: c9_nine_run },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.limit => Err(format!("over the {:?} limit; {detail}", c.limit)),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS C{} {} [{:.2?}]: {detail}", c.id, c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL C{} {} [{:.2?}]: {why}", c.id, c.name, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
