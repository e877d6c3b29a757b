//! Iterated denotative observation updates with connotative feed-forward.
//!
//! Each step multiplies the categorical belief by an observation likelihood,
//! then couples the result against the current mixture belief over `y`
//! through the somatic transform. The posterior over `y` becomes the next
//! prior, so repeated contradicting observations slowly drag the connotative
//! system along with the denotative one, the mechanism behind the
//! conformity simulation.

use crate::error::{Error, Result};
use crate::transform::{
    joint_posterior, CategoricalBelief, GaussianBelief, GaussianMixture, MixtureComponent,
    SomaticPotential,
};
use std::collections::BTreeMap;

/// Conditional observation likelihoods `P(obs | label)`.
///
/// The table may be partial: a missing (obs, label) pair reads as
/// probability zero. Every label must support at least one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationModel {
    likelihood: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ObservationModel {
    pub fn new(
        entries: impl IntoIterator<Item = (impl Into<String>, impl Into<String>, f64)>,
    ) -> Result<Self> {
        let mut likelihood: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        let mut label_support: BTreeMap<String, bool> = BTreeMap::new();
        for (obs, label, p) in entries {
            let (obs, label) = (obs.into(), label.into());
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability { label, value: p });
            }
            *label_support.entry(label.clone()).or_insert(false) |= p > 0.0;
            likelihood.entry(obs).or_default().insert(label, p);
        }
        for (label, supported) in label_support {
            if !supported {
                return Err(Error::UnreachableLabel(label));
            }
        }
        Ok(Self { likelihood })
    }

    pub fn knows(&self, obs: &str) -> bool {
        self.likelihood.contains_key(obs)
    }

    /// `P(obs | label)`; zero when the pair is absent.
    pub fn prob(&self, obs: &str, label: &str) -> f64 {
        self.likelihood.get(obs).and_then(|m| m.get(label)).copied().unwrap_or(0.0)
    }
}

/// One Bayes step on the categorical belief: `P'(x) ∝ P(x) P(obs|x)`.
pub fn bayes_obs_update(
    b: &CategoricalBelief,
    m: &ObservationModel,
    obs: &str,
) -> Result<CategoricalBelief> {
    if !m.knows(obs) {
        return Err(Error::UnknownObservation(obs.to_owned()));
    }
    let unnorm: Vec<f64> = b.iter().map(|(label, p)| p * m.prob(obs, label)).collect();
    let total: f64 = unnorm.iter().sum();
    if total <= 0.0 {
        return Err(Error::ImpossibleObservation);
    }
    CategoricalBelief::new(b.labels().map(str::to_owned).zip(unnorm.into_iter().map(|u| u / total)))
}

/// How to keep the connotative mixture tractable across steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollapseStrategy {
    /// Keep the full mixture, dropping components below `prune_epsilon` and
    /// the lightest components beyond `max_components`.
    Exact { prune_epsilon: f64, max_components: usize },
    /// Collapse to a single Gaussian preserving mean and variance.
    MomentMatch,
}

impl CollapseStrategy {
    /// Exact propagation with the standard pruning thresholds.
    pub fn exact() -> Self {
        Self::Exact { prune_epsilon: 1e-8, max_components: 64 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact { .. } => "exact",
            Self::MomentMatch => "moment",
        }
    }
}

impl Default for CollapseStrategy {
    fn default() -> Self {
        Self::exact()
    }
}

fn collapse_mixture(m: GaussianMixture, strategy: CollapseStrategy) -> Result<GaussianMixture> {
    match strategy {
        CollapseStrategy::MomentMatch => Ok(GaussianMixture::single(m.moment_match())),
        CollapseStrategy::Exact { prune_epsilon, max_components } => {
            let mut kept: Vec<MixtureComponent> =
                m.components().iter().copied().filter(|c| c.weight >= prune_epsilon).collect();
            if kept.is_empty() {
                // every weight under epsilon: keep the heaviest component
                let heaviest = m
                    .components()
                    .iter()
                    .copied()
                    .max_by(|a, b| a.weight.total_cmp(&b.weight))
                    .expect("mixture is non-empty");
                kept.push(heaviest);
            }
            if kept.len() > max_components {
                let mut order: Vec<usize> = (0..kept.len()).collect();
                order.sort_by(|&i, &j| kept[j].weight.total_cmp(&kept[i].weight).then(i.cmp(&j)));
                order.truncate(max_components);
                order.sort_unstable();
                kept = order.into_iter().map(|i| kept[i]).collect();
            }
            let total: f64 = kept.iter().map(|c| c.weight).sum();
            for c in &mut kept {
                c.weight /= total;
            }
            GaussianMixture::new(kept)
        }
    }
}

/// Joint belief carried across sequential updates.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceState {
    belief_x: CategoricalBelief,
    belief_y: GaussianMixture,
    step: u64,
}

impl InferenceState {
    pub fn new(belief_x: CategoricalBelief, prior_y: GaussianBelief) -> Self {
        Self { belief_x, belief_y: GaussianMixture::single(prior_y), step: 0 }
    }

    pub fn belief_x(&self) -> &CategoricalBelief {
        &self.belief_x
    }

    pub fn belief_y(&self) -> &GaussianMixture {
        &self.belief_y
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One conformity iteration: observation update on `x`, then the somatic
/// coupling against the current mixture over `y`, then mixture collapse.
pub fn conformity_step(
    s: &InferenceState,
    pot: &SomaticPotential,
    m: &ObservationModel,
    obs: &str,
    collapse: CollapseStrategy,
) -> Result<InferenceState> {
    let after_obs = bayes_obs_update(&s.belief_x, m, obs)?;
    let (belief_x, mixture) = joint_posterior(&after_obs, &s.belief_y, pot)?;
    let belief_y = collapse_mixture(mixture, collapse)?;
    Ok(InferenceState { belief_x, belief_y, step: s.step + 1 })
}

/// Denotative posterior marginalized over discrete connotative-dispersion
/// "types": `sum_j w_j * posterior_x(sigma_y = s_j)[target]`.
pub fn sigma_mixture_posterior(
    types: &[(f64, f64)],
    prior_x: &CategoricalBelief,
    mu_y: f64,
    pot: &SomaticPotential,
    target_label: &str,
) -> Result<f64> {
    let total: f64 = types.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadTypeWeights(total));
    }
    if prior_x.prob(target_label).is_none() {
        return Err(Error::UnknownLabel(target_label.to_owned()));
    }
    let mut acc = 0.0;
    for &(weight, sigma_y) in types {
        let prior_y = GaussianBelief::new(mu_y, sigma_y)?;
        let post = crate::transform::posterior_x(prior_x, &prior_y, pot)?;
        acc += weight * post.prob(target_label).expect("label order is preserved");
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Conformity configuration and anchor calibration
// ---------------------------------------------------------------------------

pub const LABEL_RIGHT: &str = "right";
pub const LABEL_WRONG: &str = "wrong";
/// Observation symbol: a peer picked the answer opposite to the selected one.
pub const OBS_PEER_OPPOSITE: &str = "peer_opposite";

/// Reported reference values of the conformity simulation:
/// P(wrong) after five and after ten peer observations.
pub const CONFORMITY_TARGETS: (f64, f64) = (0.67, 0.995);

/// Calibrated half-gap between the symmetric answer anchors
/// (`right = +gap`, `wrong = -gap`). See [`calibrate_conformity`].
pub const CONFORMITY_ANCHOR_GAP: f64 = 0.51;

/// Calibrated collapse strategy: the single-Gaussian (moment-matched)
/// propagation tracks the reference trajectory slightly better than exact
/// mixture propagation at the same gap.
pub const CONFORMITY_COLLAPSE: CollapseStrategy = CollapseStrategy::MomentMatch;

/// Parameters of the Asch-style conformity chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformityConfig {
    /// Initial P(selected answer is wrong).
    pub prior_wrong: f64,
    /// Connotative prior mean over the goodness of the selected answer.
    pub mu_y: f64,
    /// Connotative prior standard deviation.
    pub sigma_y: f64,
    /// Coupling temperature.
    pub gamma: f64,
    /// Anchors sit at `+gap` (right) and `-gap` (wrong).
    pub anchor_gap: f64,
    /// P(peer picks the opposite answer | selected answer is wrong).
    pub peer_opposite_given_wrong: f64,
    pub collapse: CollapseStrategy,
}

impl Default for ConformityConfig {
    fn default() -> Self {
        Self {
            prior_wrong: 0.1,
            mu_y: 2.0,
            sigma_y: 1.3,
            gamma: 0.3,
            anchor_gap: CONFORMITY_ANCHOR_GAP,
            peer_opposite_given_wrong: 0.85,
            collapse: CONFORMITY_COLLAPSE,
        }
    }
}

impl ConformityConfig {
    pub fn potential(&self) -> Result<SomaticPotential> {
        SomaticPotential::new(
            [(LABEL_RIGHT, self.anchor_gap), (LABEL_WRONG, -self.anchor_gap)],
            self.gamma,
        )
    }

    pub fn observation_model(&self) -> Result<ObservationModel> {
        ObservationModel::new([
            (OBS_PEER_OPPOSITE, LABEL_WRONG, self.peer_opposite_given_wrong),
            (OBS_PEER_OPPOSITE, LABEL_RIGHT, 1.0 - self.peer_opposite_given_wrong),
        ])
    }

    pub fn initial_state(&self) -> Result<InferenceState> {
        let belief_x = CategoricalBelief::new([
            (LABEL_RIGHT, 1.0 - self.prior_wrong),
            (LABEL_WRONG, self.prior_wrong),
        ])?;
        let prior_y = GaussianBelief::new(self.mu_y, self.sigma_y)?;
        Ok(InferenceState::new(belief_x, prior_y))
    }
}

/// Runs `steps` conformity iterations and returns all states, the initial
/// one first.
pub fn conformity_chain(config: &ConformityConfig, steps: usize) -> Result<Vec<InferenceState>> {
    let pot = config.potential()?;
    let model = config.observation_model()?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(config.initial_state()?);
    for _ in 0..steps {
        let next = conformity_step(
            states.last().expect("non-empty"),
            &pot,
            &model,
            OBS_PEER_OPPOSITE,
            config.collapse,
        )?;
        states.push(next);
    }
    Ok(states)
}

/// One evaluated calibration candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationCandidate {
    pub anchor_gap: f64,
    pub collapse: CollapseStrategy,
    pub step5: f64,
    pub step10: f64,
    /// Squared error against [`CONFORMITY_TARGETS`].
    pub sse: f64,
}

/// Full calibration search outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub candidates: Vec<CalibrationCandidate>,
    pub selected: usize,
}

impl CalibrationReport {
    pub fn best(&self) -> &CalibrationCandidate {
        &self.candidates[self.selected]
    }
}

fn evaluate_gap(gap: f64, collapse: CollapseStrategy) -> Result<CalibrationCandidate> {
    let config = ConformityConfig { anchor_gap: gap, collapse, ..ConformityConfig::default() };
    let states = conformity_chain(&config, 10)?;
    let p = |i: usize| states[i].belief_x().prob(LABEL_WRONG).expect("label exists");
    let (t5, t10) = CONFORMITY_TARGETS;
    let (step5, step10) = (p(5), p(10));
    let sse = (step5 - t5).powi(2) + (step10 - t10).powi(2);
    Ok(CalibrationCandidate { anchor_gap: gap, collapse, step5, step10, sse })
}

/// Grid search for the symmetric anchor gap reproducing the conformity
/// reference values: a coarse pass over gaps 0.50..=3.50 in steps of 0.05
/// for both collapse strategies, then a 0.005-step refinement around the
/// coarse optimum (the trajectory flips from conformity to connotative
/// lock-in within one coarse step, so the coarse grid alone cannot land
/// inside the reported tolerance). Deterministic; the selected candidate is
/// frozen as [`CONFORMITY_ANCHOR_GAP`] / [`CONFORMITY_COLLAPSE`].
pub fn calibrate_conformity() -> Result<CalibrationReport> {
    let strategies = [CollapseStrategy::exact(), CollapseStrategy::MomentMatch];
    let mut candidates = Vec::new();
    // gaps tracked in integer thousandths so the grid is exact
    let coarse: Vec<i64> = (0..=60).map(|i| 500 + 50 * i).collect();
    for &milli in &coarse {
        for &s in &strategies {
            candidates.push(evaluate_gap(milli as f64 / 1000.0, s)?);
        }
    }
    let best_coarse = candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.sse.total_cmp(&b.sse))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let center = (candidates[best_coarse].anchor_gap * 1000.0).round() as i64;
    for j in -9..=9i64 {
        let milli = center + 5 * j;
        if !(500..=3500).contains(&milli) || milli % 50 == 0 {
            continue; // outside the family or already evaluated
        }
        for &s in &strategies {
            candidates.push(evaluate_gap(milli as f64 / 1000.0, s)?);
        }
    }
    let selected = candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.sse.total_cmp(&b.sse))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    Ok(CalibrationReport { candidates, selected })
}
