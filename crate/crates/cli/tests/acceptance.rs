//! Acceptance suite: one line per criterion.
//!
//! Runs `qrad verify all --json` once, groups its checks by criterion and
//! adds the process-level requirements (exit code, total runtime). Criteria
//! in `KNOWN_RED` fail for reasons recorded in the project notes; they are
//! still reported as FAIL, but do not fail the test target. Any other
//! failure does.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use serde_json::Value;

const KNOWN_RED: &[u8] = &[9, 11];
const VERIFY_ALL_BUDGET_S: f64 = 300.0;

const TITLES: [&str; 11] = [
    "mirror quadrature vs closed form, Ttau in {0, 0.1, 1}, 1%, < 30 s",
    "mirror thermal exponent 2.00 +- 0.01, E_T/E_vac vs (4pi^2/3)(Ttau)^2 within 1%",
    "cavity Mathieu growth rate vs RWA within 5%, unitarity 1e-8, < 10 s",
    "thermal factorization exact to 1e-12 (formula and Fock oracle)",
    "1 cm cube at 290 K: thermal factor in [1e2, 1e3], pinned",
    "sum of Delta N = 0 to 1e-14 for random Hermitian U",
    "Fock oracle quadratic coefficient within 0.5%, entropy drift 1e-10",
    "small-R oracle within 1%, thermal ratio identity within 1e-6",
    "FRW sudden limit within 2% at tau_r nu_in <= 0.05, adiabatic < 1e-6",
    "integral of Delta T00 on 64^3 vs omega_1 Delta N_1 within 1e-4",
    "zeta(2), zeta(4) within 1e-10; `qrad verify all` exits 0 in < 5 min",
];

fn main() -> ExitCode {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qrad"))
        .args(["verify", "all", "--json"])
        .output()
        .expect("spawn qrad");
    let elapsed = start.elapsed().as_secs_f64();
    let code = out.status.code();
    let checks: Vec<Value> = match serde_json::from_slice(&out.stdout) {
        Ok(Value::Array(v)) => v,
        _ => {
            println!("FAIL  verify all produced no report (exit {code:?})");
            println!("{}", String::from_utf8_lossy(&out.stderr));
            return ExitCode::FAILURE;
        }
    };

    let mut by_criterion: BTreeMap<u8, Vec<&Value>> = BTreeMap::new();
    for c in &checks {
        by_criterion
            .entry(c["criterion"].as_u64().unwrap_or(0) as u8)
            .or_default()
            .push(c);
    }

    println!();
    let mut failed = Vec::new();
    for n in 1..=11u8 {
        let group = by_criterion.get(&n).map(Vec::as_slice).unwrap_or(&[]);
        let mut notes: Vec<String> = group
            .iter()
            .filter(|c| c["passed"] != true)
            .map(|c| {
                let err = c["error"].as_str().map(|e| format!(" ({e})")).unwrap_or_default();
                format!("{}: measured {}{err}", c["name"].as_str().unwrap_or("?"), c["measured"])
            })
            .collect();
        if group.is_empty() {
            notes.push("no checks reported".into());
        }
        if n == 11 {
            if code != Some(0) {
                notes.push(format!("verify all exit code {code:?}"));
            }
            if elapsed >= VERIFY_ALL_BUDGET_S {
                notes.push(format!("verify all took {elapsed:.1} s"));
            }
        }
        let ok = notes.is_empty();
        println!(
            "{} {n:>2}  {}",
            if ok { "PASS" } else { "FAIL" },
            TITLES[n as usize - 1]
        );
        for note in &notes {
            println!("          {note}");
        }
        if !ok {
            failed.push(n);
        }
    }
    println!("verify all: {} checks in {elapsed:.1} s, exit {code:?}", checks.len());

    let unexpected: Vec<u8> = failed.iter().copied().filter(|n| !KNOWN_RED.contains(n)).collect();
    let recovered: Vec<u8> = KNOWN_RED.iter().copied().filter(|n| !failed.contains(n)).collect();
    if !recovered.is_empty() {
        println!("criteria {recovered:?} are listed as known red but passed");
    }
    if unexpected.is_empty() {
        if !failed.is_empty() {
            println!("{} criteria failed, all known red: {failed:?}", failed.len());
        }
        println!();
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        println!();
        ExitCode::FAILURE
    }
}
