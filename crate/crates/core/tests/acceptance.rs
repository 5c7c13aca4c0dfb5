//! End-to-end acceptance criteria. Runs without the libtest harness so the
//! PASS/FAIL line for each criterion is always printed; exits 1 on any failure.

use std::path::PathBuf;

use subdiffusion::exec::Execution;
use subdiffusion::harness::{
    run_experiment, run_oracle_check, selftest, ExperimentConfig, ExperimentReport,
};
use subdiffusion::solver::SchemeKind;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.json"));
    ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn sweep(name: &str) -> ExperimentReport {
    run_experiment(&config(name), Execution::default()).unwrap()
}

/// `(N, rate)` for every row that has a rate.
fn rates(report: &ExperimentReport, s: SchemeKind) -> Vec<(usize, f64)> {
    let t = report
        .table(s)
        .unwrap_or_else(|| panic!("{s} missing from {}", report.name));
    t.rows
        .iter()
        .filter_map(|r| r.rate.map(|x| (r.n, x)))
        .collect()
}

fn errors(report: &ExperimentReport, s: SchemeKind) -> Vec<f64> {
    report.table(s).unwrap().errors()
}

fn rate_at(report: &ExperimentReport, s: SchemeKind, n: usize) -> f64 {
    rates(report, s)
        .into_iter()
        .find(|r| r.0 == n)
        .map(|r| r.1)
        .unwrap_or(f64::NAN)
}

fn fmt_rates(r: &[(usize, f64)]) -> String {
    r.iter()
        .map(|(n, x)| format!("{n}:{x:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn all(parts: Vec<(bool, String)>) -> Self {
        Outcome {
            passed: parts.iter().all(|p| p.0),
            detail: parts
                .into_iter()
                .map(|p| p.1)
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

/// Rates at `N ≥ n_min` inside `[lo, hi]`.
fn band(
    report: &ExperimentReport,
    s: SchemeKind,
    n_min: usize,
    lo: f64,
    hi: f64,
) -> (bool, String) {
    let r: Vec<_> = rates(report, s)
        .into_iter()
        .filter(|x| x.0 >= n_min)
        .collect();
    let ok = !r.is_empty() && r.iter().all(|x| x.1 >= lo && x.1 <= hi);
    (
        ok,
        format!("{s} [{lo}, {hi}] N>={n_min}: {}", fmt_rates(&r)),
    )
}

fn near(
    report: &ExperimentReport,
    s: SchemeKind,
    targets: &[(usize, f64)],
    tol: f64,
) -> (bool, String) {
    let got: Vec<_> = targets
        .iter()
        .map(|&(n, _)| (n, rate_at(report, s, n)))
        .collect();
    let ok = targets
        .iter()
        .zip(&got)
        .all(|(t, g)| (g.1 - t.1).abs() <= tol);
    let want = targets
        .iter()
        .map(|(n, x)| format!("{n}:{x}"))
        .collect::<Vec<_>>()
        .join(" ");
    (
        ok,
        format!("{s} within {tol} of {want}: {}", fmt_rates(&got)),
    )
}

fn criterion_1(t1: &ExperimentReport) -> Outcome {
    Outcome::all(vec![
        band(t1, SchemeKind::Bdf2, 200, 0.98, 1.08),
        band(t1, SchemeKind::Id1Bdf2, 0, 1.98, 2.02),
        band(t1, SchemeKind::Id2Bdf2, 0, 1.98, 2.03),
    ])
}

fn criterion_2(t1: &ExperimentReport) -> Outcome {
    let corr = errors(t1, SchemeKind::CorrBdf2);
    let corr_rates = rates(t1, SchemeKind::CorrBdf2);
    let all_nan = corr.iter().all(|e| e.is_nan()) && corr_rates.iter().all(|r| r.1.is_nan());
    Outcome::all(vec![
        (all_nan, format!("Corr-BDF2 all NaN: {all_nan}")),
        band(t1, SchemeKind::Id1Bdf2, 400, 1.15, 1.25),
        band(t1, SchemeKind::Id2Bdf2, 0, 1.99, 2.05),
    ])
}

fn criterion_3(t2: &ExperimentReport) -> Outcome {
    Outcome::all(vec![
        near(
            t2,
            SchemeKind::Id1Bdf2,
            &[(400, 1.0856), (800, 1.0956)],
            0.05,
        ),
        near(
            t2,
            SchemeKind::Id2Bdf2,
            &[(400, 2.0030), (800, 2.0013)],
            0.02,
        ),
    ])
}

fn criterion_4(a: &ExperimentReport, b: &ExperimentReport) -> Outcome {
    let r = rates(a, SchemeKind::Id1Bdf2);
    let decreasing = r.windows(2).all(|w| w[1].1 < w[0].1) && r.iter().all(|x| x.1 > 2.0);
    Outcome::all(vec![
        (
            decreasing,
            format!("alpha=0.3 mu=-0.2 decreasing toward 2: {}", fmt_rates(&r)),
        ),
        near(
            a,
            SchemeKind::Id1Bdf2,
            &[(400, 2.1167), (800, 2.0603)],
            0.06,
        ),
        near(
            b,
            SchemeKind::Id1Bdf2,
            &[(400, 1.9671), (800, 1.9805)],
            0.05,
        ),
    ])
}

fn criterion_5(t4: &ExperimentReport) -> Outcome {
    let id3: Vec<_> = rates(t4, SchemeKind::Id3Bdf2)
        .into_iter()
        .filter(|x| x.0 >= 200)
        .collect();
    let id3_ok = id3.iter().all(|x| x.1 >= 2.0 && (x.1 - 2.0).abs() <= 0.3);
    Outcome::all(vec![
        band(t4, SchemeKind::Id2Bdf2, 400, 1.17, 1.19),
        (
            id3_ok,
            format!(
                "ID3-BDF2 >= 2.0 and within 0.3 of 2 at N>=200: {}",
                fmt_rates(&id3)
            ),
        ),
    ])
}

/// Reference error cells `||u^N - u^{2N}||` for `N = 50..800`.
const REFERENCE_CELLS: &[(&str, SchemeKind, [f64; 5])] = &[
    (
        "table1_mu0.8",
        SchemeKind::Bdf2,
        [2.4743e-03, 1.1981e-03, 5.8732e-04, 2.9005e-04, 1.4390e-04],
    ),
    (
        "table1_mu0.8",
        SchemeKind::CorrBdf2,
        [9.4381e-05, 3.6107e-05, 1.3189e-05, 4.6888e-06, 1.6386e-06],
    ),
    (
        "table1_mu0.8",
        SchemeKind::Id1Bdf2,
        [1.6660e-04, 4.1216e-05, 1.0249e-05, 2.5553e-06, 6.3792e-07],
    ),
    (
        "table1_mu0.8",
        SchemeKind::Id2Bdf2,
        [3.2389e-04, 7.9995e-05, 1.9879e-05, 4.9539e-06, 1.2374e-06],
    ),
    (
        "table1_mu-0.8",
        SchemeKind::Bdf2,
        [1.5948e-01, 1.3256e-01, 1.1109e-01, 9.3707e-02, 7.9450e-02],
    ),
    (
        "table1_mu-0.8",
        SchemeKind::Id1Bdf2,
        [6.7744e-03, 3.0380e-03, 1.3367e-03, 5.8281e-04, 2.5299e-04],
    ),
    (
        "table1_mu-0.8",
        SchemeKind::Id2Bdf2,
        [2.1611e-03, 5.2769e-04, 1.3018e-04, 3.2292e-05, 8.0280e-06],
    ),
    (
        "table2_alpha0.3_mu0.5",
        SchemeKind::Id1Bdf2,
        [1.5025e-03, 3.9778e-04, 1.0433e-04, 2.7198e-05, 7.0660e-06],
    ),
    (
        "table2_alpha0.3_mu-0.9",
        SchemeKind::Id1Bdf2,
        [4.9903e-03, 2.7664e-03, 1.4020e-03, 6.8259e-04, 3.2574e-04],
    ),
    (
        "table2_alpha0.7_mu0.5",
        SchemeKind::Id1Bdf2,
        [6.8462e-04, 1.8033e-04, 4.6484e-05, 1.1840e-05, 2.9948e-06],
    ),
    (
        "table2_alpha0.7_mu-0.9",
        SchemeKind::Id1Bdf2,
        [2.0722e-02, 1.0219e-02, 4.8849e-03, 2.3017e-03, 1.0770e-03],
    ),
    (
        "table2_alpha0.3_mu0.5",
        SchemeKind::Id2Bdf2,
        [3.1810e-03, 8.4340e-04, 2.2164e-04, 5.7938e-05, 1.5180e-05],
    ),
    (
        "table2_alpha0.3_mu-0.9",
        SchemeKind::Id2Bdf2,
        [4.6179e-03, 1.1806e-03, 3.0298e-04, 7.7857e-05, 2.0182e-05],
    ),
    (
        "table2_alpha0.7_mu0.5",
        SchemeKind::Id2Bdf2,
        [1.9266e-03, 5.0536e-04, 1.3015e-04, 3.3167e-05, 8.4027e-06],
    ),
    (
        "table2_alpha0.7_mu-0.9",
        SchemeKind::Id2Bdf2,
        [7.2846e-03, 1.8010e-03, 4.4808e-04, 1.1179e-04, 2.7922e-05],
    ),
    (
        "table3_alpha0.3_mu-0.2",
        SchemeKind::Id1Bdf2,
        [6.4420e-05, 1.2431e-05, 2.6710e-06, 6.1586e-07, 1.4766e-07],
    ),
    (
        "table3_alpha0.3_mu-0.8",
        SchemeKind::Id1Bdf2,
        [1.6132e-03, 4.2435e-04, 1.0992e-04, 2.8213e-05, 7.2033e-06],
    ),
    (
        "table3_alpha0.7_mu-0.2",
        SchemeKind::Id1Bdf2,
        [2.8145e-04, 6.7873e-05, 1.6649e-05, 4.1218e-06, 1.0253e-06],
    ),
    (
        "table3_alpha0.7_mu-0.8",
        SchemeKind::Id1Bdf2,
        [6.3566e-04, 1.7068e-04, 4.4407e-05, 1.1358e-05, 2.8782e-06],
    ),
    (
        "table4_mu-1.8",
        SchemeKind::Id2Bdf2,
        [1.7275e-02, 8.1527e-03, 3.6909e-03, 1.6393e-03, 7.2110e-04],
    ),
    (
        "table4_mu-1.8",
        SchemeKind::Id3Bdf2,
        [7.7995e-03, 1.8929e-03, 4.6855e-04, 9.5882e-05, 2.2325e-05],
    ),
];

fn criterion_6(reports: &[ExperimentReport]) -> Outcome {
    let mut worst: f64 = 1.0;
    let mut worst_at = String::new();
    for (name, s, cells) in REFERENCE_CELLS {
        let report = reports.iter().find(|r| r.name == *name).unwrap();
        for (got, want) in errors(report, *s).iter().zip(cells) {
            let ratio = (got / want).max(want / got);
            if !(ratio <= worst) {
                worst = ratio;
                worst_at = format!("{name} {s} {got:.4e} vs {want:.4e}");
            }
        }
    }
    Outcome {
        passed: worst <= 2.0,
        detail: format!(
            "{} cells, worst ratio {worst:.4} ({worst_at})",
            REFERENCE_CELLS.len() * 5
        ),
    }
}

fn criterion_7() -> Outcome {
    let report = run_oracle_check(&config("oracle_mu-0.5"), Execution::default()).unwrap();
    let id1: Vec<_> = rates(&report, SchemeKind::Id1Bdf2);
    // errors fit 0.079 τ^{1.5} - 0.21 τ² to 0.3%; the opposite-sign τ² term
    // holds the coarse rates below 1.5, so the band applies to the finest three
    let id1_tail: Vec<_> = id1.iter().copied().filter(|x| x.0 >= 400).collect();
    let id1_ok = id1_tail.iter().all(|x| (1.4..=1.6).contains(&x.1));
    Outcome::all(vec![
        band(&report, SchemeKind::Id2Bdf2, 0, 1.9, 2.1),
        (
            id1_ok,
            format!("ID1-BDF2 [1.4, 1.6] N>=400 (all: {})", fmt_rates(&id1)),
        ),
    ])
}

fn criterion_8() -> Outcome {
    let mut parts: Vec<(bool, String)> = selftest()
        .into_iter()
        .map(|c| (c.passed, format!("{} {}", c.name, c.detail)))
        .collect();
    let cfg = config("table1_mu-0.8");
    let a = run_experiment(&cfg, Execution::Sequential)
        .unwrap()
        .to_csv();
    let b = run_experiment(&cfg, Execution::default()).unwrap().to_csv();
    parts.push((
        a == b,
        format!("full table CSV identical across executions: {}", a == b),
    ));
    Outcome::all(parts)
}

fn main() {
    let names = [
        "table1_mu0.8",
        "table1_mu-0.8",
        "table2_alpha0.3_mu0.5",
        "table2_alpha0.3_mu-0.9",
        "table2_alpha0.7_mu0.5",
        "table2_alpha0.7_mu-0.9",
        "table3_alpha0.3_mu-0.2",
        "table3_alpha0.3_mu-0.8",
        "table3_alpha0.7_mu-0.2",
        "table3_alpha0.7_mu-0.8",
        "table4_mu-1.8",
    ];
    let reports: Vec<ExperimentReport> = names.iter().map(|n| sweep(n)).collect();
    let get = |n: &str| reports.iter().find(|r| r.name == n).unwrap();

    let outcomes = [
        ("1 product source, mu=0.8", criterion_1(get("table1_mu0.8"))),
        (
            "2 product source, mu=-0.8",
            criterion_2(get("table1_mu-0.8")),
        ),
        (
            "3 profile with beta=1.9, alpha=0.7, mu=-0.9",
            criterion_3(get("table2_alpha0.7_mu-0.9")),
        ),
        (
            "4 convolution source",
            criterion_4(get("table3_alpha0.3_mu-0.2"), get("table3_alpha0.7_mu-0.8")),
        ),
        (
            "5 hypersingular source, mu=-1.8",
            criterion_5(get("table4_mu-1.8")),
        ),
        ("6 error magnitudes", criterion_6(&reports)),
        ("7 oracle direct errors", criterion_7()),
        ("8 property suites", criterion_8()),
    ];
    let mut failed = Vec::new();
    for (name, o) in &outcomes {
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
