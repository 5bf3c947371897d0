use proptest::prelude::*;

use qcorr_core::bounds::{
    chain_monogamy_bound, chain_polygamy_bound, lemma1_check, prior_monogamy_bound, prior_polygamy_bound,
    q_lower_edge, thm1_lower_bound, thm4_upper_bound, ChainParams, Lemma1Branch, MonogamyParams, PolygamyParams,
    PriorBound,
};
use qcorr_core::linalg::{partial_trace, principal_sqrt_psd, DensityMatrix};
use qcorr_core::measures::{concurrence_pure, negativity_pure, Bipartition};
use qcorr_core::states::{haar_random_pure, to_density};

/// Pair values with Q_AC ≥ Q_AB, t inside the dominance range and q at a
/// fraction `s` of the way from the data lower edge to 1 + 1/t.
fn admissible(qac: f64, ratio: f64, base: f64, tf: f64, s: f64) -> (f64, f64, f64, f64) {
    let qab = qac * ratio;
    let x = (qac / qab).powf(base);
    let t = 1.0 + tf * (x.min(30.0) - 1.0);
    let lo = q_lower_edge(qab, qac, base);
    let hi = 1.0 + 1.0 / t;
    (qab, qac, t, lo + s * (hi - lo))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn lemma_holds_at_the_top_of_the_window(t in 1.0f64..50.0, dx in 0.0f64..50.0, m in 0.0f64..=1.0, n in 1.0f64..10.0) {
        let x = t + dx;
        let q = 1.0 + 1.0 / t;
        prop_assert!(lemma1_check(x, t, q, m, Lemma1Branch::M).unwrap());
        // the n branch grows like x^n, so compare with a relative slack
        let f = |y: f64| (1.0 + y).powf(n) - q.powf(n - 1.0) * y.powf(n);
        prop_assert!(f(x) <= f(t) + 1e-12 * f(t).abs().max(1.0));
    }

    #[test]
    fn thm1_is_at_least_ref29(qac in 0.05f64..1.0, ratio in 0.01f64..1.0, gamma in 2.0f64..20.0,
                              af in 0.0f64..=1.0, tf in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let (qab, qac, t, q) = admissible(qac, ratio, gamma, tf, s);
        let alpha = af * gamma;
        let thm = thm1_lower_bound(qab, qac, &MonogamyParams { alpha, gamma, t, q }).unwrap();
        let prior = prior_monogamy_bound(PriorBound::Ref29 { a: t }, qab, qac, alpha, gamma).unwrap();
        prop_assert!(thm >= prior - 1e-12, "thm1 {thm} < ref29 {prior}");
        let top = thm1_lower_bound(qab, qac, &MonogamyParams { alpha, gamma, t, q: 1.0 + 1.0 / t }).unwrap();
        prop_assert!((top - prior).abs() <= 1e-12);
    }

    #[test]
    fn thm4_is_at_most_ref29(qac in 0.05f64..1.0, ratio in 0.01f64..1.0, delta in 0.05f64..=1.0,
                             bf in 1.0f64..4.0, tf in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let (qab, qac, t, q) = admissible(qac, ratio, delta, tf, s);
        let beta = bf * delta;
        let thm = thm4_upper_bound(qab, qac, &PolygamyParams { beta, delta, t, q }).unwrap();
        let prior = prior_polygamy_bound(PriorBound::Ref29 { a: t }, qab, qac, beta, delta).unwrap();
        prop_assert!(thm <= prior + 1e-12 * prior.max(1.0), "thm4 {thm} > ref29 {prior}");
    }

    #[test]
    fn q_monotonicity(qac in 0.05f64..1.0, ratio in 0.01f64..1.0, gamma in 2.0f64..20.0, af in 0.0f64..=1.0,
                      delta in 0.05f64..=1.0, bf in 1.0f64..4.0, tf in 0.0f64..=1.0, s1 in 0.0f64..=1.0, s2 in 0.0f64..=1.0) {
        let (lo_s, hi_s) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        // monogamy: non-increasing in q
        let (qab, qac_m, t, q1) = admissible(qac, ratio, gamma, tf, lo_s);
        let (_, _, _, q2) = admissible(qac, ratio, gamma, tf, hi_s);
        let p = MonogamyParams { alpha: af * gamma, gamma, t, q: q1 };
        let v1 = thm1_lower_bound(qab, qac_m, &p).unwrap();
        let v2 = thm1_lower_bound(qab, qac_m, &MonogamyParams { q: q2, ..p }).unwrap();
        prop_assert!(v2 <= v1 + 1e-12);
        // polygamy: non-decreasing in q
        let (qab, qac_p, t, q1) = admissible(qac, ratio, delta, tf, lo_s);
        let (_, _, _, q2) = admissible(qac, ratio, delta, tf, hi_s);
        let p = PolygamyParams { beta: bf * delta, delta, t, q: q1 };
        let w1 = thm4_upper_bound(qab, qac_p, &p).unwrap();
        let w2 = thm4_upper_bound(qab, qac_p, &PolygamyParams { q: q2, ..p }).unwrap();
        prop_assert!(w2 >= w1 - 1e-12 * w1.max(1.0));
    }

    #[test]
    fn three_party_chain_equals_single_step(qac in 0.05f64..1.0, ratio in 0.01f64..1.0, gamma in 2.0f64..20.0,
                                            af in 0.0f64..=1.0, tf in 0.0f64..=1.0, s in 0.0f64..=1.0) {
        let (qab, qac, t, q) = admissible(qac, ratio, gamma, tf, s);
        let alpha = af * gamma;
        let chain = chain_monogamy_bound(&[qab, qac], &[qac], &ChainParams::uniform(1, t, q), alpha, gamma).unwrap();
        let single = thm1_lower_bound(qab, qac, &MonogamyParams { alpha, gamma, t, q }).unwrap();
        prop_assert!((chain - single).abs() <= 1e-14);
        let delta = gamma / 20.0;
        let (qab, qac, t, q) = admissible(qac, ratio, delta, tf, s);
        let beta = delta * (1.0 + 2.0 * af);
        let chain = chain_polygamy_bound(&[qab, qac], &[qac], &ChainParams::uniform(1, t, q), beta, delta).unwrap();
        let single = thm4_upper_bound(qab, qac, &PolygamyParams { beta, delta, t, q }).unwrap();
        prop_assert!((chain - single).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_traces_commute(seed in any::<u64>()) {
        let rho = to_density(&haar_random_pure(4, seed).unwrap());
        let direct = partial_trace(&rho, &[0, 3]).unwrap();
        let staged = partial_trace(&partial_trace(&rho, &[0, 1, 3]).unwrap(), &[0, 2]).unwrap();
        let other = partial_trace(&partial_trace(&rho, &[0, 2, 3]).unwrap(), &[0, 2]).unwrap();
        prop_assert!(direct.matrix().max_abs_diff(staged.matrix()) < 1e-12);
        prop_assert!(direct.matrix().max_abs_diff(other.matrix()) < 1e-12);
    }

    #[test]
    fn principal_sqrt_squares_back(seed in any::<u64>()) {
        let psi = haar_random_pure(4, seed).unwrap();
        let rho: DensityMatrix = partial_trace(&to_density(&psi), &[0, 1]).unwrap();
        let s = principal_sqrt_psd(&rho).unwrap();
        let back = s.matmul(&s).unwrap();
        prop_assert!(back.max_abs_diff(rho.matrix()) < 1e-10);
        prop_assert!(s.is_hermitian(1e-10));
    }

    #[test]
    fn pure_measures_are_split_symmetric(seed in any::<u64>()) {
        // A|BC and BC|A describe the same cut
        let psi = haar_random_pure(3, seed).unwrap();
        let a = Bipartition::new(vec![0]);
        let bc = Bipartition::new(vec![1, 2]);
        prop_assert!((concurrence_pure(&psi, &a).unwrap() - concurrence_pure(&psi, &bc).unwrap()).abs() < 1e-10);
        prop_assert!((negativity_pure(&psi, &a).unwrap() - negativity_pure(&psi, &bc).unwrap()).abs() < 1e-10);
    }
}
