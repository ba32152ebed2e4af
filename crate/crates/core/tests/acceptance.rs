//! One PASS/FAIL line per acceptance criterion. All comparisons are exact (tolerance 0).

use std::process::ExitCode;
use std::time::Instant;

use heckelab::report::Report;
use heckelab::rootdata::GroupTag;
use heckelab::suites;
use heckelab::transfer::IsoBudget;
use heckelab::Result;

const SL2: GroupTag = GroupTag::SL2;
const GL2: GroupTag = GroupTag::GL(2);
const GL3: GroupTag = GroupTag::GL(3);
const SP4: GroupTag = GroupTag::Sp4;

fn collect(parts: impl IntoIterator<Item = Result<Report>>) -> Result<Report> {
    let mut report = Report::default();
    for part in parts {
        report.extend(part?);
    }
    Ok(report)
}

fn volume_law() -> Result<Report> {
    let mut parts = Vec::new();
    for tag in [SL2, GL2, GL3, SP4] {
        for q in [2, 3] {
            for m in [1, 2] {
                parts.push(suites::volume_law(tag, q, m, 4));
            }
        }
    }
    collect(parts)
}

fn presentation() -> Result<Report> {
    collect(
        [(SL2, 2, 1), (SL2, 3, 1), (GL2, 2, 1), (GL2, 3, 1), (SL2, 2, 2), (SL2, 3, 2)]
            .map(|(tag, q, m)| suites::presentation(tag, q, m)),
    )
}

fn dual_engine() -> Result<Report> {
    collect([2, 3].map(|q| suites::dual_engine(SL2, q, 1, 2, 0)))
}

fn representatives() -> Result<Report> {
    collect([(GL3, 2), (GL3, 3), (SP4, 2), (SP4, 3)].map(|(tag, q)| suites::representatives(tag, q)))
}

fn length_adjoint() -> Result<Report> {
    collect([SL2, GL2, SP4].map(|tag| suites::length_adjoint(tag, 4)))
}

fn zeta_and_kazhdan() -> Result<Report> {
    let full = IsoBudget { max_len: 2, per_cell: 0, pairs: 400, gamma_len: 3 };
    let sampled = |per_cell| IsoBudget { per_cell, ..full.clone() };
    let mut parts = Vec::new();
    for (tag, q, m, budget) in [
        (SL2, 2, 1, full.clone()),
        (SL2, 3, 1, full.clone()),
        (GL2, 2, 1, full.clone()),
        (GL2, 3, 1, full.clone()),
        (SL2, 2, 2, full.clone()),
        (SL2, 3, 2, sampled(30)),
        (GL2, 2, 2, sampled(30)),
        (GL2, 3, 2, sampled(20)),
    ] {
        parts.push(suites::zeta_iso(tag, q, m, &budget));
        parts.push(suites::kazhdan(tag, q, m));
    }
    collect(parts)
}

fn whittaker() -> Result<Report> {
    let mut parts = Vec::new();
    for tag in [SL2, GL2] {
        for q in [2, 3] {
            for conductor in [0, 1] {
                parts.push(suites::whittaker(tag, q, 1, conductor, 2));
            }
        }
    }
    collect(parts)
}

fn moy_prasad() -> Result<Report> {
    collect([suites::moy_prasad(SL2, 2, 5), suites::moy_prasad(SP4, 2, 5), suites::depth_table()])
}

fn orbit_stabilizer() -> Result<Report> {
    suites::orbit_stabilizer(SL2, 2, 1, 3)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Report>); 9] = [
        ("volume-law", volume_law),
        ("presentation-soundness", presentation),
        ("dual-engine-agreement", dual_engine),
        ("representative-well-definedness", representatives),
        ("length-adjoint-equivalence", length_adjoint),
        ("zeta-isomorphism", zeta_and_kazhdan),
        ("whittaker-equivariance", whittaker),
        ("moy-prasad", moy_prasad),
        ("orbit-stabilizer", orbit_stabilizer),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let line = match run() {
            Ok(report) => {
                let total = report.checks.len();
                let bad = report.mismatches();
                let status = if bad.is_empty() && total > 0 { "PASS" } else { "FAIL" };
                if status == "FAIL" {
                    failures += 1;
                }
                let first = bad.first().map(|c| format!("; first mismatch [{}] {}", c.family, c.instance)).unwrap_or_default();
                format!(
                    "{status} {name}: {}/{total} exact checks (tolerance 0), {:.1}s{first}",
                    total - bad.len(),
                    start.elapsed().as_secs_f64()
                )
            }
            Err(e) => {
                failures += 1;
                format!("FAIL {name}: error {e}")
            }
        };
        println!("{line}");
    }
    if failures == 0 {
        println!("acceptance: 9/9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 9 criteria fail");
        ExitCode::FAILURE
    }
}
