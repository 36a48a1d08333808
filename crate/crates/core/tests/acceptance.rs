//! Acceptance criteria, one line per criterion.
//!
//! Runs without the test harness so the lines are always printed.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gcx::models::LogModelParams;
use gcx::verify::{self, CheckConfig, CheckReport, Region};

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(samples: usize) -> CheckConfig {
    CheckConfig { seed: 42, samples, ..CheckConfig::default() }
}

fn reports_pass(reports: &[CheckReport]) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    let detail = reports
        .iter()
        .map(|r| format!("{} {:.3e}", r.check, r.max_residual))
        .collect::<Vec<_>>()
        .join(", ");
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .flat_map(|r| r.notes.iter().map(move |n| format!("{}: {n}", r.check)))
        .collect();
    if failing.is_empty() {
        Outcome { pass, detail }
    } else {
        Outcome { pass, detail: format!("{detail} [{}]", failing.join("; ")) }
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> gcx::Result<Vec<CheckReport>>) -> Outcome {
    let start = Instant::now();
    let out = match f() {
        Ok(r) => reports_pass(&r),
        Err(e) => Outcome { pass: false, detail: format!("aborted: {e}") },
    };
    let elapsed = start.elapsed();
    Outcome {
        pass: out.pass && elapsed < limit,
        detail: format!("{} in {:.2}s (limit {:.0}s)", out.detail, elapsed.as_secs_f64(), limit.as_secs_f64()),
    }
}

fn untimed(f: impl FnOnce() -> gcx::Result<Vec<CheckReport>>) -> Outcome {
    match f() {
        Ok(r) => reports_pass(&r),
        Err(e) => Outcome { pass: false, detail: format!("aborted: {e}") },
    }
}

fn c1() -> Outcome {
    let out = timed(Duration::from_secs(1), || Ok(vec![verify::check_clifford(&config(10_000), 1e-12)?]));
    let sig = verify::gram_signature(4);
    Outcome { pass: out.pass && sig == (4, 4), detail: format!("{}, signature {sig:?}", out.detail) }
}

fn c2() -> Outcome {
    untimed(|| Ok(vec![verify::check_annihilators(&config(1000), 1e-12, 1e-10)?]))
}

fn c3() -> Outcome {
    untimed(|| Ok(vec![verify::check_local_model(&config(1000), 1e-10)?]))
}

fn c4() -> Outcome {
    timed(Duration::from_secs(5), || Ok(vec![verify::check_symplectomorphism(&config(1000), 1e-10)?]))
}

fn c5() -> Outcome {
    untimed(|| Ok(vec![verify::check_h_properties(&config(500), 1e-8)?]))
}

fn c6() -> Outcome {
    let cfg = config(1000);
    untimed(|| {
        [Region::Polar, Region::Bump, Region::Outer, Region::Cplane]
            .into_iter()
            .map(|r| verify::check_integrability(&cfg, r, 1e-8))
            .collect()
    })
}

fn c7() -> Outcome {
    let cfg = config(1000);
    untimed(|| {
        [(1, 0), (2, 1), (3, 2), (5, 2)]
            .into_iter()
            .map(|(m, k)| verify::check_quotient(&cfg, LogModelParams::new(m, k)?, 1e-12, 1e-10))
            .collect()
    })
}

fn c8() -> Outcome {
    untimed(|| Ok(vec![verify::check_locus(&config(100), 1e-9)?]))
}

fn c9() -> Outcome {
    untimed(|| Ok(vec![verify::check_bfield(&config(200), 1e-8)?]))
}

fn run_cli(jobs: &str, out: &PathBuf) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_gcx"))
        .args(["check", "all", "--seed", "42", "--jobs", jobs, "--output"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    status.status.code().ok_or_else(|| "killed by signal".to_string())
}

fn c10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("gcx-acceptance-{}", std::process::id()));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return Outcome { pass: false, detail: e.to_string() };
    }
    let (a, b) = (dir.join("jobs1.json"), dir.join("jobs8.json"));
    let result = (|| {
        let ca = run_cli("1", &a)?;
        let cb = run_cli("8", &b)?;
        let ba = std::fs::read(&a).map_err(|e| e.to_string())?;
        let bb = std::fs::read(&b).map_err(|e| e.to_string())?;
        Ok::<_, String>((ca, cb, ba, bb))
    })();
    let _ = std::fs::remove_dir_all(&dir);
    match result {
        Ok((ca, cb, ba, bb)) => Outcome {
            pass: ca == 0 && cb == 0 && ba == bb && !ba.is_empty(),
            detail: format!("exit codes {ca}/{cb}, {} bytes, identical: {}", ba.len(), ba == bb),
        },
        Err(e) => Outcome { pass: false, detail: e },
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("clifford relation and pairing signature", c1),
        ("annihilators and normal-form round trip", c2),
        ("local model", c3),
        ("gluing symplectomorphism", c4),
        ("H properties and slice integral", c5),
        ("integrability of the glued structure", c6),
        ("log-transform quotients", c7),
        ("type-change locus", c8),
        ("B-field action on the bracket", c9),
        ("deterministic reports across job counts", c10),
    ];
    let mut failed = Vec::new();
    for (i, (label, f)) in criteria.iter().enumerate() {
        let out = f();
        println!("criterion {:>2} {} {label}: {}", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
