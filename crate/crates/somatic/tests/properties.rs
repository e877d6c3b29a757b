//! Property tests for the invariants the library is built around:
//! metric behaviour of EPA distances, normalization and limit behaviour of
//! the somatic transform, agreement of the closed-form posteriors with
//! quadrature, conformity-chain monotonicity and the lexicon round-trip.

use proptest::prelude::*;
use somatic::dict_io::{load_lexicon, save_lexicon};
use somatic::epa::{distance, emotion_deflection, nearest_label, EpaVector, Lexicon, LexiconEntry, Metric};
use somatic::experiments::{run_dissonance, DissonanceConfig};
use somatic::sequential::{
    bayes_obs_update, conformity_chain, CollapseStrategy, ConformityConfig, LABEL_WRONG,
    OBS_PEER_OPPOSITE,
};
use somatic::transform::{
    posterior_x, posterior_y, CategoricalBelief, GaussianBelief, SomaticPotential,
};

fn epa_component() -> impl Strategy<Value = f64> {
    -4.3..=4.3f64
}

fn epa_vector() -> impl Strategy<Value = EpaVector> {
    (epa_component(), epa_component(), epa_component())
        .prop_map(|(e, p, a)| EpaVector::new(e, p, a).unwrap())
}

/// 2..=5 labels with normalized probabilities and an anchor each.
fn labelled_prior() -> impl Strategy<Value = (Vec<String>, Vec<f64>, Vec<f64>)> {
    (2usize..=5)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.01..=1.0f64, n),
                prop::collection::vec(-4.3..=4.3f64, n),
            )
        })
        .prop_map(|(raw, anchors)| {
            let total: f64 = raw.iter().sum();
            let labels = (0..raw.len()).map(|i| format!("label{i}")).collect();
            (labels, raw.into_iter().map(|w| w / total).collect(), anchors)
        })
}

/// Trapezoidal integral of `f` over `[lo, hi]` with `n` panels.
fn trapz(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n).map(|i| f(lo + h * i as f64)).sum();
    (0.5 * (f(lo) + f(hi)) + inner) * h
}

/// Quadrature version of the denotative posterior: per-label integration of
/// prior density times the raw coupling kernel, then normalization.
fn quadrature_posterior_x(
    probs: &[f64],
    anchors: &[f64],
    mu_y: f64,
    sigma_y: f64,
    gamma: f64,
) -> Vec<f64> {
    let s = sigma_y.max(gamma);
    let lo = anchors.iter().copied().fold(mu_y, f64::min) - 10.0 * s;
    let hi = anchors.iter().copied().fold(mu_y, f64::max) + 10.0 * s;
    let s_prod = sigma_y * gamma / (sigma_y * sigma_y + gamma * gamma).sqrt();
    let n = (((hi - lo) / (s_prod / 25.0)).ceil() as usize).clamp(2_000, 400_000);
    let masses: Vec<f64> = probs
        .iter()
        .zip(anchors)
        .map(|(&p, &m)| {
            p * trapz(
                |y| {
                    let d = (y - mu_y) / sigma_y;
                    let k = (y - m) / gamma;
                    (-0.5 * d * d).exp() * (-0.5 * k * k).exp()
                },
                lo,
                hi,
                n,
            )
        })
        .collect();
    let total: f64 = masses.iter().sum();
    masses.into_iter().map(|m| m / total).collect()
}

proptest! {
    #[test]
    fn euclidean_distance_satisfies_triangle_inequality(
        a in epa_vector(), b in epa_vector(), c in epa_vector()
    ) {
        let ab = distance(&a, &b, Metric::Euclidean);
        let bc = distance(&b, &c, Metric::Euclidean);
        let ac = distance(&a, &c, Metric::Euclidean);
        prop_assert!(ac <= ab + bc + 1e-12);
        // symmetry and squared relation
        prop_assert!((ab - distance(&b, &a, Metric::Euclidean)).abs() < 1e-15);
        let sq = distance(&a, &b, Metric::SquaredEuclidean);
        prop_assert!((sq - ab * ab).abs() <= 1e-12 * sq.max(1.0));
    }

    #[test]
    fn nearest_label_ranking_is_metric_invariant(
        means in prop::collection::vec((epa_component(), epa_component(), epa_component()), 1..12),
        query in epa_vector(),
    ) {
        let entries: Vec<LexiconEntry> = means
            .iter()
            .enumerate()
            .map(|(i, &(e, p, a))| {
                LexiconEntry::new(format!("w{i:02}"), EpaVector::new(e, p, a).unwrap(), [0.0; 3])
                    .unwrap()
            })
            .collect();
        let lex = Lexicon::from_entries(entries).unwrap();
        let k = lex.len();
        let by_sq = nearest_label(&lex, &query, k, Metric::SquaredEuclidean).unwrap();
        let by_eu = nearest_label(&lex, &query, k, Metric::Euclidean).unwrap();
        let order_sq: Vec<&str> = by_sq.iter().map(|(l, _)| l.as_str()).collect();
        let order_eu: Vec<&str> = by_eu.iter().map(|(l, _)| l.as_str()).collect();
        prop_assert_eq!(order_sq, order_eu);
    }

    #[test]
    fn deflection_recovers_the_difference(
        f in epa_vector(), t in epa_vector()
    ) {
        let d = emotion_deflection(&f, &t);
        prop_assert_eq!(d.e, f.e() - t.e());
        prop_assert_eq!(d.p, f.p() - t.p());
        prop_assert_eq!(d.a, f.a() - t.a());
    }

    #[test]
    fn posteriors_always_normalize(
        (labels, probs, anchors) in labelled_prior(),
        mu_y in -4.3..=4.3f64,
        sigma_y in 0.1..=5.0f64,
        gamma in 0.05..=5.0f64,
    ) {
        let prior_x = CategoricalBelief::new(labels.iter().cloned().zip(probs.iter().copied())).unwrap();
        let prior_y = GaussianBelief::new(mu_y, sigma_y).unwrap();
        let pot = SomaticPotential::new(labels.iter().cloned().zip(anchors.iter().copied()), gamma).unwrap();
        // constructors re-validate the invariants: probabilities in [0,1]
        // summing to 1, positive component sds
        let post_x = posterior_x(&prior_x, &prior_y, &pot).unwrap();
        let post_y = posterior_y(&prior_x, &prior_y, &pot).unwrap();
        prop_assert_eq!(post_x.len(), labels.len());
        prop_assert_eq!(post_y.len(), labels.len());
        let wsum: f64 = post_y.components().iter().map(|c| c.weight).sum();
        prop_assert!((wsum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_gamma_decouples_the_beliefs(
        (labels, probs, anchors) in labelled_prior(),
        mu_y in -4.3..=4.3f64,
        sigma_y in 0.1..=5.0f64,
    ) {
        let prior_x = CategoricalBelief::new(labels.iter().cloned().zip(probs.iter().copied())).unwrap();
        let prior_y = GaussianBelief::new(mu_y, sigma_y).unwrap();
        let pot = SomaticPotential::new(labels.iter().cloned().zip(anchors.iter().copied()), 1e6).unwrap();
        let post_x = posterior_x(&prior_x, &prior_y, &pot).unwrap();
        for (label, p) in prior_x.iter() {
            prop_assert!((post_x.prob(label).unwrap() - p).abs() < 1e-6);
        }
        let post_y = posterior_y(&prior_x, &prior_y, &pot).unwrap();
        for c in post_y.components() {
            prop_assert!((c.mean - mu_y).abs() < 1e-6);
        }
    }

    #[test]
    fn small_gamma_anchors_the_components(
        (labels, probs, anchors) in labelled_prior(),
        mu_y in -4.3..=4.3f64,
        sigma_y in 0.1..=5.0f64,
    ) {
        let prior_x = CategoricalBelief::new(labels.iter().cloned().zip(probs.iter().copied())).unwrap();
        let prior_y = GaussianBelief::new(mu_y, sigma_y).unwrap();
        let pot = SomaticPotential::new(labels.iter().cloned().zip(anchors.iter().copied()), 1e-4).unwrap();
        let post_y = posterior_y(&prior_x, &prior_y, &pot).unwrap();
        for (c, anchor) in post_y.components().iter().zip(&anchors) {
            prop_assert!((c.mean - anchor).abs() < 1e-3);
        }
    }

    #[test]
    fn rising_prior_mean_favours_the_higher_anchor(
        p in 0.05..=0.95f64,
        sigma_y in 0.1..=5.0f64,
        gamma in 0.05..=5.0f64,
        lo_anchor in -4.3..=4.0f64,
        gap in 0.3..=2.0f64,
        mu_lo in -4.0..=3.0f64,
        dmu in 0.1..=1.0f64,
    ) {
        let hi_anchor = (lo_anchor + gap).min(4.3);
        prop_assume!(hi_anchor > lo_anchor + 0.05);
        let prior_x = CategoricalBelief::new([("low", p), ("high", 1.0 - p)]).unwrap();
        let pot = SomaticPotential::new([("low", lo_anchor), ("high", hi_anchor)], gamma).unwrap();
        let at = |mu: f64| {
            let prior_y = GaussianBelief::new(mu, sigma_y).unwrap();
            posterior_x(&prior_x, &prior_y, &pot).unwrap().prob("high").unwrap()
        };
        let (before, after) = (at(mu_lo), at(mu_lo + dmu));
        prop_assert!(after >= before);
        // strictly increasing wherever the doubles can still resolve it;
        // tiny sigma/gamma saturate the posterior at exactly 0 or 1
        if (1e-12..=1.0 - 1e-12).contains(&before) {
            prop_assert!(after > before, "{after} !> {before}");
        }
    }

    #[test]
    fn two_point_entropy_is_concave_and_peaks_at_half(p in 0.0..=1.0f64) {
        let b = CategoricalBelief::new([("a", p), ("b", 1.0 - p)]).unwrap();
        let half = CategoricalBelief::new([("a", 0.5), ("b", 0.5)]).unwrap();
        prop_assert!(b.entropy() <= half.entropy() + 1e-15);
        if p == 0.0 || p == 1.0 {
            prop_assert_eq!(b.entropy(), 0.0);
        } else {
            prop_assert!(b.entropy() > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_posteriors_match_quadrature(
        (labels, probs, anchors) in labelled_prior(),
        mu_y in -4.3..=4.3f64,
        sigma_y in 0.1..=5.0f64,
        gamma in 0.05..=5.0f64,
    ) {
        let prior_x = CategoricalBelief::new(labels.iter().cloned().zip(probs.iter().copied())).unwrap();
        let prior_y = GaussianBelief::new(mu_y, sigma_y).unwrap();
        let pot = SomaticPotential::new(labels.iter().cloned().zip(anchors.iter().copied()), gamma).unwrap();
        let post_x = posterior_x(&prior_x, &prior_y, &pot).unwrap();
        let oracle = quadrature_posterior_x(&probs, &anchors, mu_y, sigma_y, gamma);
        for ((_, got), want) in post_x.iter().zip(&oracle) {
            prop_assert!((got - want).abs() < 1e-6, "closed form {got} vs quadrature {want}");
        }
    }

    #[test]
    fn conformity_is_monotone_and_bracketed_for_small_gaps(
        gap in 0.05..=0.52f64,
        exact in any::<bool>(),
    ) {
        let collapse = if exact { CollapseStrategy::exact() } else { CollapseStrategy::MomentMatch };
        let config = ConformityConfig { anchor_gap: gap, collapse, ..ConformityConfig::default() };
        let states = conformity_chain(&config, 10).unwrap();
        let p: Vec<f64> = states
            .iter()
            .map(|s| s.belief_x().prob(LABEL_WRONG).unwrap())
            .collect();
        for w in p.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "P(wrong) decreased: {:?}", p);
        }

        // pure-Bayes trajectory brackets the coupled one from above, exactly
        // so over the reported five-step horizon; later steps may overshoot
        // by the connotative echo, measured below 2e-4 across this gap range
        let mut bayes = config.initial_state().unwrap().belief_x().clone();
        let model = config.observation_model().unwrap();
        for (t, &coupled) in p.iter().enumerate().skip(1) {
            bayes = bayes_obs_update(&bayes, &model, OBS_PEER_OPPOSITE).unwrap();
            let upper = bayes.prob(LABEL_WRONG).unwrap();
            prop_assert!(coupled >= config.prior_wrong - 1e-12);
            if t <= 5 {
                prop_assert!(coupled <= upper + 1e-9, "step {t}: {coupled} > {upper}");
            } else {
                prop_assert!(coupled <= upper + 5e-4, "step {t}: {coupled} > {upper} + 5e-4");
            }
        }
    }

    #[test]
    fn decoupled_conformity_commutes_with_plain_bayes(
        prior_wrong in 0.01..=0.5f64,
        like in 0.55..=0.95f64,
        steps in 1usize..=6,
    ) {
        let config = ConformityConfig {
            prior_wrong,
            peer_opposite_given_wrong: like,
            gamma: 1e6,
            ..ConformityConfig::default()
        };
        let states = conformity_chain(&config, steps).unwrap();
        let mut bayes = config.initial_state().unwrap().belief_x().clone();
        let model = config.observation_model().unwrap();
        for _ in 0..steps {
            bayes = bayes_obs_update(&bayes, &model, OBS_PEER_OPPOSITE).unwrap();
        }
        let got = states[steps].belief_x().prob(LABEL_WRONG).unwrap();
        prop_assert!((got - bayes.prob(LABEL_WRONG).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn one_step_marginal_is_collapse_independent(
        gap in 0.05..=3.5f64,
        mu_y in -2.0..=4.0f64,
        sigma_y in 0.2..=3.0f64,
        gamma in 0.05..=2.0f64,
        prior_wrong in 0.01..=0.99f64,
    ) {
        let base = ConformityConfig {
            anchor_gap: gap,
            mu_y,
            sigma_y,
            gamma,
            prior_wrong,
            ..ConformityConfig::default()
        };
        let exact = conformity_chain(
            &ConformityConfig { collapse: CollapseStrategy::exact(), ..base },
            1,
        )
        .unwrap();
        let moment = conformity_chain(
            &ConformityConfig { collapse: CollapseStrategy::MomentMatch, ..base },
            1,
        )
        .unwrap();
        prop_assert_eq!(exact[1].belief_x(), moment[1].belief_x());
    }

    #[test]
    fn dissonance_reflection_symmetry(
        prior_bad in 0.05..=0.95f64,
        mu_y in -3.0..=3.0f64,
        anchor_good in -2.0..=4.0f64,
        gap in 0.2..=3.0f64,
        sigma_y in 0.2..=3.0f64,
    ) {
        let anchor_bad = anchor_good - gap;
        let base = DissonanceConfig {
            sigma_y_values: vec![sigma_y],
            mu_y,
            prior_bad,
            anchor_good,
            anchor_bad,
            ..DissonanceConfig::default()
        };
        // reflect the connotative axis about zero and swap the label roles
        // (each label takes the other's mirrored anchor, the prior
        // complements): posterior_bad must complement as well
        let mirrored = DissonanceConfig {
            sigma_y_values: vec![sigma_y],
            mu_y: -mu_y,
            prior_bad: 1.0 - prior_bad,
            anchor_good: -anchor_bad,
            anchor_bad: -anchor_good,
            ..base.clone()
        };
        let p = run_dissonance(&base).unwrap()[0].output("posterior_bad").unwrap();
        let q = run_dissonance(&mirrored).unwrap()[0].output("posterior_bad").unwrap();
        prop_assert!((q - (1.0 - p)).abs() < 1e-9, "p={p} mirrored={q}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lexicon_save_load_is_identity(
        rows in prop::collection::btree_map(
            "[a-zA-Z][a-zA-Z0-9 ,\"_-]{0,14}",
            ((-4.3..=4.3f64, -4.3..=4.3f64, -4.3..=4.3f64), (0.0..=5.0f64, 0.0..=5.0f64, 0.0..=5.0f64)),
            0..20,
        )
    ) {
        let entries = rows.into_iter().map(|(label, ((e, p, a), (se, sp, sa)))| {
            LexiconEntry::new(label, EpaVector::new(e, p, a).unwrap(), [se, sp, sa]).unwrap()
        });
        let lex = Lexicon::from_entries(entries).unwrap();
        let mut buf = Vec::new();
        save_lexicon(&lex, &mut buf).unwrap();
        let (reloaded, report) = load_lexicon(buf.as_slice()).unwrap();
        prop_assert!(report.rejects.is_empty(), "rejects: {:?}", report.rejects);
        prop_assert_eq!(report.accepted, lex.len());
        prop_assert_eq!(reloaded, lex);
    }
}
