//! Acceptance criteria 1-8. Each test prints one PASS/FAIL line with the
//! measured values, then asserts.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcorr_core::bounds::{
    chain_monogamy_bound, chain_polygamy_bound, prior_monogamy_bound, prior_polygamy_bound, thm1_lower_bound,
    thm4_upper_bound, ChainParams, MonogamyParams, PolygamyParams, PriorBound,
};
use qcorr_core::harness::{figure_csv, verify, FigureJob, Suite};
use qcorr_core::measures::{
    concurrence_pure, concurrence_wootters, crenoa, negativity_pure, Bipartition, RoofConfig,
};
use qcorr_core::states::{generalized_schmidt_state, reduce_pair_pure, w_class_state, SchmidtParams};

const SEED: u64 = 20240611;

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id} {status} {name} ({:.2}s): {detail}", elapsed.as_secs_f64());
}

fn example1_state() -> qcorr_core::states::PureState {
    let s = 6f64.sqrt() / 6.0;
    generalized_schmidt_state(&SchmidtParams::new([0.5, s, s, 0.5, s], 0.0).unwrap()).unwrap()
}

/// Parses the figure CSV into (admissible, gap) pairs.
fn figure_gaps(csv: &str) -> Vec<(bool, Option<f64>)> {
    csv.lines()
        .skip(2)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[6] == "true", cols[5].parse().ok())
        })
        .collect()
}

#[test]
fn criterion_1_example1_measures() {
    let start = Instant::now();
    let psi = example1_state();
    let c_abc = concurrence_pure(&psi, &Bipartition::new(vec![0])).unwrap();
    let c_ab = concurrence_wootters(&reduce_pair_pure(&psi, 1).unwrap()).unwrap();
    let c_ac = concurrence_wootters(&reduce_pair_pure(&psi, 2).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let ok = (c_abc - 21f64.sqrt() / 6.0).abs() <= 1e-10
        && (c_ab - 6f64.sqrt() / 6.0).abs() <= 1e-10
        && (c_ac - 0.5).abs() <= 1e-10
        && elapsed < Duration::from_secs(1);
    report(
        1,
        "example-1 measures",
        ok,
        elapsed,
        format!("C_A|BC={c_abc} C_AB={c_ab} C_AC={c_ac} (targets sqrt21/6, sqrt6/6, 1/2 at 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_example1_bound_ordering() {
    let start = Instant::now();
    let c_abc = 21f64.sqrt() / 6.0;
    let (qab, qac) = (6f64.sqrt() / 6.0, 0.5);
    let t = 6f64.sqrt() / 2.0;
    let p = MonogamyParams {
        alpha: 1.0,
        gamma: 2.0,
        t,
        q: 5.0 / 3.0,
    };
    let z2 = thm1_lower_bound(qab, qac, &p).unwrap();
    let z1 = prior_monogamy_bound(PriorBound::Ref29 { a: t }, qab, qac, 1.0, 2.0).unwrap();
    let csv = figure_csv(&FigureJob { id: 3, resolution: 101 }, &RoofConfig::with_seed(SEED)).unwrap();
    let gaps = figure_gaps(&csv);
    let min_gap = gaps.iter().filter_map(|g| g.1).fold(f64::INFINITY, f64::min);
    let all_admissible = gaps.iter().all(|g| g.0);
    let elapsed = start.elapsed();

    let z2_ok = (z2 - 0.646258).abs() <= 1e-6;
    let z1_ok = (z1 - 0.644716).abs() <= 1e-6;
    let order_ok = z2 > z1 && z2 <= c_abc && z1 <= c_abc;
    let grid_ok = all_admissible && gaps.len() == 101 * 101 && min_gap >= -1e-12;
    let ok = z2_ok && z1_ok && order_ok && grid_ok && elapsed < Duration::from_secs(10);
    report(
        2,
        "example-1 bound ordering",
        ok,
        elapsed,
        format!(
            "thm1={z2} (target 0.646258+-1e-6: {}) ref29={z1} (target 0.644716+-1e-6: {}) \
             ordering {} fig3 min gap={min_gap} over {} points ({})",
            if z2_ok { "ok" } else { "off" },
            if z1_ok { "ok" } else { "off" },
            if order_ok { "ok" } else { "broken" },
            gaps.len(),
            if grid_ok { "ok" } else { "broken" },
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_example2_screnoa() {
    let start = Instant::now();
    let psi = w_class_state(0.5, 0.5, 0.5f64.sqrt()).unwrap();
    let whole = negativity_pure(&psi, &Bipartition::new(vec![0])).unwrap().powi(2);
    let cfg = RoofConfig {
        restarts: 32,
        ..RoofConfig::with_seed(SEED)
    };
    let ab = crenoa(&reduce_pair_pure(&psi, 1).unwrap(), &cfg).unwrap();
    let ac = crenoa(&reduce_pair_pure(&psi, 2).unwrap(), &cfg).unwrap();
    let (n_ab, n_ac) = (ab.value.powi(2), ac.value.powi(2));
    let elapsed = start.elapsed();
    let ok = (whole - 0.75).abs() <= 1e-12
        && (n_ab - 0.25).abs() <= 2e-3
        && (n_ac - 0.5).abs() <= 2e-3
        && elapsed < Duration::from_secs(30);
    report(
        3,
        "example-2 SCRENoA",
        ok,
        elapsed,
        format!(
            "N_a A|BC={whole} N_a AB={n_ab} N_a AC={n_ac} ({} restarts, converged {}/{})",
            ab.restarts_used, ab.converged, ac.converged
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_example2_bound_ordering() {
    let start = Instant::now();
    let t = 2f64.powf(0.6);
    let p = PolygamyParams {
        beta: 1.0,
        delta: 0.8,
        t,
        q: 1.0 + 2f64.powf(-0.8),
    };
    let w2 = thm4_upper_bound(0.25, 0.5, &p).unwrap();
    let w1 = prior_polygamy_bound(PriorBound::Ref29 { a: t }, 0.25, 0.5, 1.0, 0.8).unwrap();
    let csv = figure_csv(&FigureJob { id: 6, resolution: 101 }, &RoofConfig::with_seed(SEED)).unwrap();
    let gaps = figure_gaps(&csv);
    let admissible: Vec<f64> = gaps.iter().filter(|g| g.0).filter_map(|g| g.1).collect();
    let min_gap = admissible.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = (w2 - 0.8813).abs() <= 1e-3
        && (w1 - 0.8825).abs() <= 1e-3
        && w2 < w1
        && 0.75 <= w2
        && !admissible.is_empty()
        && min_gap >= -1e-12;
    report(
        4,
        "example-2 bound ordering",
        ok,
        elapsed,
        format!(
            "W2={w2} W1={w1} lhs=0.75 fig6 min(W1-W2)={min_gap} over {} admissible of {} points",
            admissible.len(),
            gaps.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_lemma_fuzz() {
    let start = Instant::now();
    let r = verify(Suite::Lemma1, 100_000, SEED, &RoofConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let ok = r.passed() && elapsed < Duration::from_secs(5);
    report(
        5,
        "lemma fuzz",
        ok,
        elapsed,
        format!(
            "{} tuples checked, {} violations at slack -1e-12, worst slack {}",
            r.checked, r.violation_count, r.worst_slack
        ),
    );
    if let Some(v) = r.violations.first() {
        println!("  first violation: {v}");
    }
    assert!(ok);
}

#[test]
fn criterion_6_soundness_audit() {
    let start = Instant::now();
    let r = verify(Suite::Monogamy, 500, SEED, &RoofConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let ckw = r.violations_by_check.get("ckw").copied().unwrap_or(0);
    let thm1 = r.violations_by_check.get("thm1").copied().unwrap_or(0);
    let ok = r.passed() && elapsed < Duration::from_secs(60);
    report(
        6,
        "soundness audit",
        ok,
        elapsed,
        format!(
            "500 Haar states, {} inequality checks, {} violations (CKW {ckw}, thm1 {thm1}), worst slack {}",
            r.checked, r.violation_count, r.worst_slack
        ),
    );
    if let Some(v) = r.violations.first() {
        let mut v = v.clone();
        v["state"] = serde_json::Value::String("<omitted>".into());
        println!("  first violation: {v}");
    }
    assert!(ok);
}

#[test]
fn criterion_7_roof_oracle() {
    let start = Instant::now();
    let r = verify(Suite::RoofOracle, 50, SEED, &RoofConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let ok = r.passed() && r.checked == 50 && elapsed < Duration::from_secs(120);
    report(
        7,
        "roof oracle",
        ok,
        elapsed,
        format!("50 rank-2 states, {} outside 1e-3 of Wootters", r.violation_count),
    );
    assert!(ok);
}

#[test]
fn criterion_8_special_case_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_special: f64 = 0.0;
    let mut worst_chain: f64 = 0.0;
    for _ in 0..1000 {
        let qac: f64 = rng.random_range(0.05..1.0);
        let qab: f64 = qac * rng.random_range(0.0..1.0);

        let gamma = rng.random_range(2.0..20.0);
        let alpha = rng.random_range(0.0..=gamma);
        let x = (qac / qab).powf(gamma);
        let t = rng.random_range(1.0..=x.min(20.0));
        let p = MonogamyParams {
            alpha,
            gamma,
            t,
            q: 1.0 + 1.0 / t,
        };
        let thm = thm1_lower_bound(qab, qac, &p).unwrap();
        let prior = prior_monogamy_bound(PriorBound::Ref29 { a: t }, qab, qac, alpha, gamma).unwrap();
        worst_special = worst_special.max((thm - prior).abs());
        let q = rng.random_range((1.0 + 1.0 / x)..=(1.0 + 1.0 / t));
        let p = MonogamyParams { q, ..p };
        let chain = chain_monogamy_bound(&[qab, qac], &[qac], &ChainParams::uniform(1, t, q), alpha, gamma).unwrap();
        worst_chain = worst_chain.max((chain - thm1_lower_bound(qab, qac, &p).unwrap()).abs());

        let delta = rng.random_range(0.5..=1.0);
        let beta = rng.random_range(delta..=3.0);
        let x = (qac / qab).powf(delta);
        let t = rng.random_range(1.0..=x.min(20.0));
        let p = PolygamyParams {
            beta,
            delta,
            t,
            q: 1.0 + 1.0 / t,
        };
        let thm = thm4_upper_bound(qab, qac, &p).unwrap();
        let prior = prior_polygamy_bound(PriorBound::Ref29 { a: t }, qab, qac, beta, delta).unwrap();
        worst_special = worst_special.max((thm - prior).abs());
        let q = rng.random_range((1.0 + 1.0 / x)..=(1.0 + 1.0 / t));
        let p = PolygamyParams { q, ..p };
        let chain = chain_polygamy_bound(&[qab, qac], &[qac], &ChainParams::uniform(1, t, q), beta, delta).unwrap();
        worst_chain = worst_chain.max((chain - thm4_upper_bound(qab, qac, &p).unwrap()).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst_special <= 1e-13 && worst_chain <= 1e-14;
    report(
        8,
        "special-case identities",
        ok,
        elapsed,
        format!("max |thm - ref29| at q=1+1/t: {worst_special:e}; max |chain(N=3) - single step|: {worst_chain:e}"),
    );
    assert!(ok);
}
