//! Deterministic experiment runners emitting tabular records.
//!
//! Each runner reproduces one published simulation at its reference
//! parameters: three marginal sweeps of the somatic transform (connotative
//! prior mean, temperature, denotative prior), the dissonance
//! re-interpretation curves, the Asch-style conformity chain, and the
//! fairness-rating reconstruction. Defaults are the reference values, so a
//! runner called with a default config regenerates the corresponding figure
//! data verbatim.

use crate::error::{Error, Result};
use crate::sequential::{conformity_chain, sigma_mixture_posterior, ConformityConfig, LABEL_WRONG};
use crate::transform::{
    density_grid, entropy_of, posterior_x, posterior_y, CategoricalBelief, GaussianBelief,
    GaussianMixture, SomaticPotential,
};
use std::fmt;

/// A parameter binding value: experiments bind reals, counters and the odd
/// symbolic setting (collapse strategy, sweep tags).
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // f64 Display is shortest round-trip, locale-independent
            Value::Real(x) => write!(f, "{x}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => write!(f, "{s}"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

/// One experiment row: parameter bindings, finite outputs and an optional
/// connotative density grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    experiment: String,
    params: Vec<(String, Value)>,
    outputs: Vec<(String, f64)>,
    grid: Option<Vec<(f64, f64)>>,
}

impl ExperimentRecord {
    pub fn new(
        experiment: impl Into<String>,
        params: Vec<(String, Value)>,
        outputs: Vec<(String, f64)>,
        grid: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        for (name, value) in &outputs {
            if !value.is_finite() {
                return Err(Error::NonFiniteOutput { name: name.clone(), value: *value });
            }
        }
        Ok(Self { experiment: experiment.into(), params, outputs, grid })
    }

    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn params(&self) -> &[(String, Value)] {
        &self.params
    }

    pub fn outputs(&self) -> &[(String, f64)] {
        &self.outputs
    }

    pub fn grid(&self) -> Option<&[(f64, f64)]> {
        self.grid.as_deref()
    }

    pub fn param(&self, name: &str) -> Option<&Value> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn output(&self, name: &str) -> Option<f64> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Default emission window for figure grids.
pub const GRID_Y_MIN: f64 = -5.0;
pub const GRID_Y_MAX: f64 = 6.0;
pub const GRID_POINTS: usize = 1101;

/// Density grid over the standard emission window, widened when a component
/// would leave visible tail mass outside it so the emitted grid always
/// carries the whole distribution.
pub fn emission_grid(m: &GaussianMixture) -> Result<Vec<(f64, f64)>> {
    let mut lo = GRID_Y_MIN;
    let mut hi = GRID_Y_MAX;
    for c in m.components() {
        lo = lo.min(c.mean - 8.0 * c.sd);
        hi = hi.max(c.mean + 8.0 * c.sd);
    }
    density_grid(m, lo, hi, GRID_POINTS)
}

// ---------------------------------------------------------------------------
// Marginal sweeps over the nurse/doctor scenario
// ---------------------------------------------------------------------------

pub const LABEL_NURSE: &str = "nurse";
pub const LABEL_DOCTOR: &str = "doctor";
/// Survey potency ratings anchoring the two identities.
pub const ANCHOR_NURSE_P: f64 = 1.9;
pub const ANCHOR_DOCTOR_P: f64 = 2.95;

/// Sweep of the connotative prior mean across the two identity anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct UySweepConfig {
    pub mu_y_values: Vec<f64>,
    pub prior_nurse: f64,
    pub sigma_y: f64,
    pub gamma: f64,
    pub anchor_nurse: f64,
    pub anchor_doctor: f64,
}

impl Default for UySweepConfig {
    fn default() -> Self {
        Self {
            // integer sweep of the reference figure plus the point where the
            // connotative prior matches the denotative expectation
            mu_y_values: vec![-1.0, 0.0, 1.0, 2.0, 2.2, 3.0, 4.0, 5.0],
            prior_nurse: 0.7,
            sigma_y: 2.0,
            gamma: 0.3,
            anchor_nurse: ANCHOR_NURSE_P,
            anchor_doctor: ANCHOR_DOCTOR_P,
        }
    }
}

fn nurse_doctor_potential(anchor_nurse: f64, anchor_doctor: f64, gamma: f64) -> Result<SomaticPotential> {
    SomaticPotential::new([(LABEL_NURSE, anchor_nurse), (LABEL_DOCTOR, anchor_doctor)], gamma)
}

pub fn run_uy_sweep(config: &UySweepConfig) -> Result<Vec<ExperimentRecord>> {
    let prior_x =
        CategoricalBelief::binary(LABEL_NURSE, config.prior_nurse, LABEL_DOCTOR)?;
    let pot = nurse_doctor_potential(config.anchor_nurse, config.anchor_doctor, config.gamma)?;
    let expected_prior_y_mean = config.prior_nurse * config.anchor_nurse
        + (1.0 - config.prior_nurse) * config.anchor_doctor;
    config
        .mu_y_values
        .iter()
        .map(|&mu_y| {
            let prior_y = GaussianBelief::new(mu_y, config.sigma_y)?;
            let post_x = posterior_x(&prior_x, &prior_y, &pot)?;
            let post_y = posterior_y(&prior_x, &prior_y, &pot)?;
            ExperimentRecord::new(
                "uy",
                vec![
                    ("mu_y".into(), mu_y.into()),
                    ("p".into(), config.prior_nurse.into()),
                    ("sigma_y".into(), config.sigma_y.into()),
                    ("gamma".into(), config.gamma.into()),
                    ("m_nurse".into(), config.anchor_nurse.into()),
                    ("m_doctor".into(), config.anchor_doctor.into()),
                ],
                vec![
                    ("posterior_nurse".into(), post_x.prob(LABEL_NURSE).unwrap()),
                    ("entropy_posterior_x".into(), post_x.entropy()),
                    ("expected_prior_y_mean".into(), expected_prior_y_mean),
                ],
                Some(emission_grid(&post_y)?),
            )
        })
        .collect()
}

/// Sweep of the coupling temperature at a fixed connotative prior.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSweepConfig {
    pub gamma_values: Vec<f64>,
    pub mu_y: f64,
    pub prior_nurse: f64,
    pub sigma_y: f64,
    pub anchor_nurse: f64,
    pub anchor_doctor: f64,
}

impl Default for GammaSweepConfig {
    fn default() -> Self {
        Self {
            gamma_values: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
            mu_y: 3.0,
            prior_nurse: 0.7,
            sigma_y: 2.0,
            anchor_nurse: ANCHOR_NURSE_P,
            anchor_doctor: ANCHOR_DOCTOR_P,
        }
    }
}

pub fn run_gamma_sweep(config: &GammaSweepConfig) -> Result<Vec<ExperimentRecord>> {
    let prior_x = CategoricalBelief::binary(LABEL_NURSE, config.prior_nurse, LABEL_DOCTOR)?;
    let prior_y = GaussianBelief::new(config.mu_y, config.sigma_y)?;
    config
        .gamma_values
        .iter()
        .map(|&gamma| {
            let pot = nurse_doctor_potential(config.anchor_nurse, config.anchor_doctor, gamma)?;
            let post_x = posterior_x(&prior_x, &prior_y, &pot)?;
            let post_y = posterior_y(&prior_x, &prior_y, &pot)?;
            ExperimentRecord::new(
                "gamma",
                vec![
                    ("gamma".into(), gamma.into()),
                    ("mu_y".into(), config.mu_y.into()),
                    ("p".into(), config.prior_nurse.into()),
                    ("sigma_y".into(), config.sigma_y.into()),
                    ("m_nurse".into(), config.anchor_nurse.into()),
                    ("m_doctor".into(), config.anchor_doctor.into()),
                ],
                vec![
                    ("posterior_nurse".into(), post_x.prob(LABEL_NURSE).unwrap()),
                    ("entropy_posterior_x".into(), post_x.entropy()),
                ],
                Some(emission_grid(&post_y)?),
            )
        })
        .collect()
}

/// Sweep of the denotative prior showing the validity trade-off.
#[derive(Debug, Clone, PartialEq)]
pub struct PxSweepConfig {
    pub prior_nurse_values: Vec<f64>,
    pub mu_y: f64,
    pub sigma_y: f64,
    pub gamma: f64,
    pub anchor_nurse: f64,
    pub anchor_doctor: f64,
}

impl Default for PxSweepConfig {
    fn default() -> Self {
        Self {
            prior_nurse_values: vec![0.1, 0.5, 0.9],
            mu_y: 3.0,
            sigma_y: 3.5,
            gamma: 0.2,
            anchor_nurse: ANCHOR_NURSE_P,
            anchor_doctor: ANCHOR_DOCTOR_P,
        }
    }
}

pub fn run_px_sweep(config: &PxSweepConfig) -> Result<Vec<ExperimentRecord>> {
    let prior_y = GaussianBelief::new(config.mu_y, config.sigma_y)?;
    let pot = nurse_doctor_potential(config.anchor_nurse, config.anchor_doctor, config.gamma)?;
    config
        .prior_nurse_values
        .iter()
        .map(|&p| {
            let prior_x = CategoricalBelief::binary(LABEL_NURSE, p, LABEL_DOCTOR)?;
            let post_x = posterior_x(&prior_x, &prior_y, &pot)?;
            let post_y = posterior_y(&prior_x, &prior_y, &pot)?;
            ExperimentRecord::new(
                "px",
                vec![
                    ("p".into(), p.into()),
                    ("mu_y".into(), config.mu_y.into()),
                    ("sigma_y".into(), config.sigma_y.into()),
                    ("gamma".into(), config.gamma.into()),
                    ("m_nurse".into(), config.anchor_nurse.into()),
                    ("m_doctor".into(), config.anchor_doctor.into()),
                ],
                vec![
                    ("prior_nurse".into(), p),
                    ("posterior_nurse".into(), post_x.prob(LABEL_NURSE).unwrap()),
                    ("entropy_prior_x".into(), prior_x.entropy()),
                    ("entropy_posterior_x".into(), post_x.entropy()),
                ],
                Some(emission_grid(&post_y)?),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dissonance
// ---------------------------------------------------------------------------

pub const LABEL_GOOD: &str = "good";
pub const LABEL_BAD: &str = "bad";
/// Survey evaluation ratings of the two product identities standing in for
/// the desirable/undesirable item anchors.
pub const ANCHOR_GOOD_E: f64 = 1.32;
pub const ANCHOR_BAD_E: f64 = -0.67;

/// Dissonance re-interpretation over a set of connotative dispersions.
#[derive(Debug, Clone, PartialEq)]
pub struct DissonanceConfig {
    /// Dispersion "types"; the final record integrates them out uniformly.
    pub sigma_y_values: Vec<f64>,
    pub mu_y: f64,
    pub gamma: f64,
    pub prior_bad: f64,
    pub anchor_good: f64,
    pub anchor_bad: f64,
}

impl Default for DissonanceConfig {
    fn default() -> Self {
        Self {
            sigma_y_values: vec![1.23, 2.0, 0.5],
            mu_y: 2.0,
            gamma: 0.3,
            prior_bad: 0.8,
            anchor_good: ANCHOR_GOOD_E,
            anchor_bad: ANCHOR_BAD_E,
        }
    }
}

pub fn run_dissonance(config: &DissonanceConfig) -> Result<Vec<ExperimentRecord>> {
    let prior_x = CategoricalBelief::binary(LABEL_GOOD, 1.0 - config.prior_bad, LABEL_BAD)?;
    let pot = SomaticPotential::new(
        [(LABEL_GOOD, config.anchor_good), (LABEL_BAD, config.anchor_bad)],
        config.gamma,
    )?;
    let shared_params = |sigma: Value| -> Vec<(String, Value)> {
        vec![
            ("sigma_y".into(), sigma),
            ("mu_y".into(), config.mu_y.into()),
            ("gamma".into(), config.gamma.into()),
            ("prior_bad".into(), config.prior_bad.into()),
            ("m_good".into(), config.anchor_good.into()),
            ("m_bad".into(), config.anchor_bad.into()),
        ]
    };
    let mut records = Vec::with_capacity(config.sigma_y_values.len() + 1);
    for &sigma_y in &config.sigma_y_values {
        let prior_y = GaussianBelief::new(config.mu_y, sigma_y)?;
        let post_x = posterior_x(&prior_x, &prior_y, &pot)?;
        let post_y = posterior_y(&prior_x, &prior_y, &pot)?;
        records.push(ExperimentRecord::new(
            "dissonance",
            shared_params(sigma_y.into()),
            vec![
                ("posterior_bad".into(), post_x.prob(LABEL_BAD).unwrap()),
                ("entropy_posterior_x".into(), post_x.entropy()),
            ],
            Some(emission_grid(&post_y)?),
        )?);
    }
    // integrate the dispersion types out with uniform weights
    let n = config.sigma_y_values.len() as f64;
    let types: Vec<(f64, f64)> = config.sigma_y_values.iter().map(|&s| (1.0 / n, s)).collect();
    let mixed_bad = sigma_mixture_posterior(&types, &prior_x, config.mu_y, &pot, LABEL_BAD)?;
    records.push(ExperimentRecord::new(
        "dissonance",
        shared_params(Value::Text("mixture".into())),
        vec![
            ("posterior_bad".into(), mixed_bad),
            ("entropy_posterior_x".into(), entropy_of([mixed_bad, 1.0 - mixed_bad])),
        ],
        None,
    )?);
    Ok(records)
}

// ---------------------------------------------------------------------------
// Conformity
// ---------------------------------------------------------------------------

/// One record per evaluated calibration candidate; `selected` flags the
/// frozen optimum.
pub fn calibration_records(
    report: &crate::sequential::CalibrationReport,
) -> Result<Vec<ExperimentRecord>> {
    report
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            ExperimentRecord::new(
                "conformity_calibration",
                vec![
                    ("anchor_gap".into(), c.anchor_gap.into()),
                    ("collapse".into(), c.collapse.name().into()),
                ],
                vec![
                    ("step5".into(), c.step5),
                    ("step10".into(), c.step10),
                    ("sse".into(), c.sse),
                    ("selected".into(), if i == report.selected { 1.0 } else { 0.0 }),
                ],
                None,
            )
        })
        .collect()
}

pub fn run_conformity(steps: usize, config: &ConformityConfig) -> Result<Vec<ExperimentRecord>> {
    let states = conformity_chain(config, steps)?;
    states
        .iter()
        .map(|state| {
            ExperimentRecord::new(
                "conformity",
                vec![
                    ("step".into(), Value::Int(state.step() as i64)),
                    ("mu_y".into(), config.mu_y.into()),
                    ("sigma_y".into(), config.sigma_y.into()),
                    ("gamma".into(), config.gamma.into()),
                    ("anchor_gap".into(), config.anchor_gap.into()),
                    ("obs_likelihood".into(), config.peer_opposite_given_wrong.into()),
                    ("prior_wrong".into(), config.prior_wrong.into()),
                    ("collapse".into(), config.collapse.name().into()),
                ],
                vec![
                    ("posterior_wrong".into(), state.belief_x().prob(LABEL_WRONG).unwrap()),
                    ("entropy_posterior_x".into(), state.belief_x().entropy()),
                ],
                Some(emission_grid(state.belief_y())?),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fairness
// ---------------------------------------------------------------------------

/// Evaluation ratings of the two reference sadness emotions; ratings are
/// distances from their mean E value, rescaled.
pub const SAD_E: f64 = -1.88;
pub const DISAPPOINTED_E: f64 = -1.71;

/// Characteristic-emotion E values of the four experimental conditions.
pub const VOICE_SALIENT_E: f64 = 2.31;
pub const VOICE_NON_SALIENT_E: f64 = 1.94;
pub const NO_VOICE_SALIENT_E: f64 = -0.84;
pub const NO_VOICE_NON_SALIENT_E: f64 = 1.5;

/// Maps an emotion's E value to a 1-7 style sadness rating: linear in the
/// distance from the mean E of the reference sadness emotions, with zero
/// distance mapping to 4.0 and the full scale width (8.6) spanning 6 rating
/// points.
pub fn sadness_rating(emotion_e: f64) -> Result<f64> {
    if !emotion_e.is_finite() || emotion_e.abs() > 4.3 {
        return Err(Error::EmotionOutOfRange(emotion_e));
    }
    let m = (SAD_E + DISAPPOINTED_E) / 2.0;
    Ok(1.0 + 6.0 * (4.3 - (emotion_e - m).abs()) / 8.6)
}

pub fn run_fairness() -> Result<Vec<ExperimentRecord>> {
    let conditions = [
        ("voice", "salient", VOICE_SALIENT_E),
        ("no_voice", "salient", NO_VOICE_SALIENT_E),
        ("voice", "non_salient", VOICE_NON_SALIENT_E),
        ("no_voice", "non_salient", NO_VOICE_NON_SALIENT_E),
    ];
    conditions
        .iter()
        .map(|&(condition, salience, emotion_e)| {
            ExperimentRecord::new(
                "fairness",
                vec![
                    ("condition".into(), condition.into()),
                    ("salience".into(), salience.into()),
                    ("emotion_e".into(), emotion_e.into()),
                ],
                vec![("sadness_rating".into(), sadness_rating(emotion_e)?)],
                None,
            )
        })
        .collect()
}
