//! The somatic transform: Boltzmann-form coupling between a categorical
//! denotative belief and a Gaussian connotative belief, with closed-form
//! posteriors in both directions.
//!
//! The coupling potential between label `x` and connotative value `y` is a
//! Gaussian kernel centered on the label's anchor `M(x)` with standard
//! deviation `gamma` (the temperature). Multiplying factored priors
//! `P(x) P(y)` by the kernel and marginalizing gives
//!
//! * a reweighted categorical posterior over labels, and
//! * a Gaussian-mixture posterior over the connotative dimension, one
//!   component per label, shrunk toward the label anchors.
//!
//! Small `gamma` binds labels tightly to their anchors; large `gamma`
//! decouples the two beliefs entirely. All computation runs in log space so
//! strongly contradicted labels (masses down at 1e-300) stay representable.
//!
//! Connotative beliefs here are one-dimensional; apply the transform per EPA
//! dimension for multi-dimensional use.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::math::{normal_ln_pdf, normalize_log_weights};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Discrete belief over denotative labels. Probabilities sum to 1 within
/// 1e-9 and labels are unique; item order is preserved and meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalBelief {
    items: Vec<(String, f64)>,
}

impl CategoricalBelief {
    pub fn new(items: impl IntoIterator<Item = (impl Into<String>, f64)>) -> Result<Self> {
        let items: Vec<(String, f64)> = items.into_iter().map(|(l, p)| (l.into(), p)).collect();
        if items.is_empty() {
            return Err(Error::EmptyBelief);
        }
        let mut sum = 0.0;
        for (label, p) in &items {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                return Err(Error::InvalidProbability { label: label.clone(), value: *p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum, tolerance: WEIGHT_SUM_TOLERANCE });
        }
        for (i, (label, _)) in items.iter().enumerate() {
            if items[..i].iter().any(|(other, _)| other == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { items })
    }

    /// Two-point belief `[label_a: p, label_b: 1-p]`.
    pub fn binary(label_a: impl Into<String>, p: f64, label_b: impl Into<String>) -> Result<Self> {
        Self::new([(label_a.into(), p), (label_b.into(), 1.0 - p)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.items.iter().map(|(l, p)| (l.as_str(), *p))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(l, _)| l.as_str())
    }

    pub fn prob(&self, label: &str) -> Option<f64> {
        self.items.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Shannon entropy `-sum p ln p` in nats, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy_of(self.items.iter().map(|(_, p)| *p))
    }
}

/// Shannon entropy of a probability vector, natural log, `0 ln 0 = 0`.
pub fn entropy_of(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        // a point mass yields IEEE -0.0; entropy is nonnegative by contract
        .max(0.0)
}

/// Single-Gaussian belief over one connotative dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief {
    mean: f64,
    sd: f64,
}

impl GaussianBelief {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::NotFinite { what: "mean", value: mean });
        }
        if !sd.is_finite() || sd <= 0.0 {
            return Err(Error::NonPositiveScale { what: "sigma_y", value: sd });
        }
        Ok(Self { mean, sd })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

/// The coupling: per-label connotative anchors `M(x)` plus temperature
/// `gamma`, the standard deviation of the coupling kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SomaticPotential {
    anchors: BTreeMap<String, f64>,
    gamma: f64,
}

impl SomaticPotential {
    pub fn new(
        anchors: impl IntoIterator<Item = (impl Into<String>, f64)>,
        gamma: f64,
    ) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::NonPositiveScale { what: "gamma", value: gamma });
        }
        let mut map = BTreeMap::new();
        for (label, anchor) in anchors {
            let label = label.into();
            if !anchor.is_finite() {
                return Err(Error::NotFinite { what: "anchor", value: anchor });
            }
            if map.insert(label.clone(), anchor).is_some() {
                return Err(Error::DuplicateLabel(label));
            }
        }
        Ok(Self { anchors: map, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn anchor(&self, label: &str) -> Option<f64> {
        self.anchors.get(label).copied()
    }

    /// Anchors in label order.
    pub fn anchors(&self) -> impl Iterator<Item = (&str, f64)> {
        self.anchors.iter().map(|(l, a)| (l.as_str(), *a))
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    fn anchor_for(&self, label: &str) -> Result<f64> {
        self.anchor(label).ok_or_else(|| Error::MissingAnchor(label.to_owned()))
    }
}

/// One weighted Gaussian component of a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Mixture-of-Gaussians belief: the shape of connotative posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    components: Vec<MixtureComponent>,
}

impl GaussianMixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyBelief);
        }
        let mut sum = 0.0;
        for c in &components {
            if !c.weight.is_finite() || c.weight < 0.0 || c.weight > 1.0 {
                return Err(Error::InvalidProbability {
                    label: "mixture component".to_owned(),
                    value: c.weight,
                });
            }
            if !c.mean.is_finite() {
                return Err(Error::NotFinite { what: "component mean", value: c.mean });
            }
            if !c.sd.is_finite() || c.sd <= 0.0 {
                return Err(Error::NonPositiveScale { what: "component sd", value: c.sd });
            }
            sum += c.weight;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::BadMixtureWeights(sum));
        }
        Ok(Self { components })
    }

    pub fn single(belief: GaussianBelief) -> Self {
        Self {
            components: vec![MixtureComponent { weight: 1.0, mean: belief.mean(), sd: belief.sd() }],
        }
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Mixture density at `y`.
    pub fn density(&self, y: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_ln_pdf(y, c.mean, c.sd * c.sd).exp())
            .sum()
    }

    /// Mixture mean.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Mixture variance (law of total variance).
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.sd * c.sd + c.mean * c.mean))
            .sum::<f64>()
            - mean * mean
    }

    /// Collapses to the single Gaussian with the mixture's mean and variance.
    pub fn moment_match(&self) -> GaussianBelief {
        GaussianBelief::new(self.mean(), self.variance().sqrt())
            .expect("mixture moments are finite and positive")
    }
}

/// Expected coupling kernel for one label under the connotative prior:
/// the Gaussian density of the prior mean under `N(M(label), sigma_y^2 +
/// gamma^2)`. This is the per-label evidence factor of the denotative
/// posterior.
pub fn kernel_evidence(
    pot: &SomaticPotential,
    label: &str,
    prior_y: &GaussianBelief,
) -> Result<f64> {
    Ok(ln_kernel_evidence(pot, pot.anchor_for(label)?, prior_y.mean(), prior_y.sd()).exp())
}

fn ln_kernel_evidence(pot: &SomaticPotential, anchor: f64, mean: f64, sd: f64) -> f64 {
    normal_ln_pdf(mean, anchor, sd * sd + pot.gamma * pot.gamma)
}

/// Joint coupling of a categorical belief with one Gaussian prior component:
/// log-weights plus shrunk output components, in label order.
fn coupled_terms(
    prior_x: &CategoricalBelief,
    mean: f64,
    sd: f64,
    ln_weight: f64,
    pot: &SomaticPotential,
) -> Result<Vec<(f64, MixtureComponent)>> {
    let var = sd * sd;
    let gamma_sq = pot.gamma * pot.gamma;
    let denom = var + gamma_sq;
    let out_sd = (var * gamma_sq / denom).sqrt();
    prior_x
        .iter()
        .map(|(label, p)| {
            let anchor = pot.anchor_for(label)?;
            let ln_w = ln_weight + p.ln() + ln_kernel_evidence(pot, anchor, mean, sd);
            let out_mean = (mean * gamma_sq + anchor * var) / denom;
            Ok((ln_w, MixtureComponent { weight: 0.0, mean: out_mean, sd: out_sd }))
        })
        .collect()
}

/// Denotative posterior: `P'(x) ∝ P(x) * kernel_evidence(x)`, normalized,
/// label order preserved.
pub fn posterior_x(
    prior_x: &CategoricalBelief,
    prior_y: &GaussianBelief,
    pot: &SomaticPotential,
) -> Result<CategoricalBelief> {
    let terms = coupled_terms(prior_x, prior_y.mean(), prior_y.sd(), 0.0, pot)?;
    let ln_w: Vec<f64> = terms.iter().map(|(l, _)| *l).collect();
    let probs = normalize_log_weights(&ln_w).ok_or(Error::DegenerateMass)?;
    CategoricalBelief::new(prior_x.labels().map(str::to_owned).zip(probs))
}

/// Connotative posterior: one Gaussian component per label, weighted like the
/// denotative posterior and shrunk toward the label anchor. Component order
/// follows label order.
pub fn posterior_y(
    prior_x: &CategoricalBelief,
    prior_y: &GaussianBelief,
    pot: &SomaticPotential,
) -> Result<GaussianMixture> {
    let terms = coupled_terms(prior_x, prior_y.mean(), prior_y.sd(), 0.0, pot)?;
    let ln_w: Vec<f64> = terms.iter().map(|(l, _)| *l).collect();
    let weights = normalize_log_weights(&ln_w).ok_or(Error::DegenerateMass)?;
    GaussianMixture::new(
        terms
            .into_iter()
            .zip(weights)
            .map(|((_, c), weight)| MixtureComponent { weight, ..c })
            .collect(),
    )
}

/// Joint update of a categorical belief against a mixture prior over `y`:
/// every prior component crossed with every label. Returns the new
/// denotative marginal and the unpruned connotative mixture.
pub(crate) fn joint_posterior(
    prior_x: &CategoricalBelief,
    prior_y: &GaussianMixture,
    pot: &SomaticPotential,
) -> Result<(CategoricalBelief, GaussianMixture)> {
    let mut ln_w = Vec::with_capacity(prior_y.len() * prior_x.len());
    let mut comps = Vec::with_capacity(ln_w.capacity());
    for c in prior_y.components() {
        for (l, comp) in coupled_terms(prior_x, c.mean, c.sd, c.weight.ln(), pot)? {
            ln_w.push(l);
            comps.push(comp);
        }
    }
    let weights = normalize_log_weights(&ln_w).ok_or(Error::DegenerateMass)?;

    let n_labels = prior_x.len();
    let mut marginal = vec![0.0; n_labels];
    for (i, w) in weights.iter().enumerate() {
        marginal[i % n_labels] += w;
    }
    // summing normalized weights can overshoot 1 by a few ulps
    let belief_x = CategoricalBelief::new(
        prior_x.labels().map(str::to_owned).zip(marginal.into_iter().map(|m| m.min(1.0))),
    )?;
    let mixture = GaussianMixture::new(
        comps
            .into_iter()
            .zip(weights)
            .map(|(c, weight)| MixtureComponent { weight, ..c })
            .collect(),
    )?;
    Ok((belief_x, mixture))
}

/// Zero-temperature denotative read-out: the label whose anchor is closest
/// to `point_y`, ties broken lexicographically. This is the limit of
/// `posterior_x` under a point prior at `point_y` and vanishing temperature,
/// i.e. plain dictionary nearest-neighbour lookup on one dimension.
pub fn act_limit_label(point_y: f64, pot: &SomaticPotential) -> Result<&str> {
    pot.anchors()
        .map(|(label, anchor)| (label, (point_y - anchor).abs()))
        // anchors() is label-ordered, so strict `<` keeps the first of a tie
        .fold(None::<(&str, f64)>, |best, (label, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((label, d)),
        })
        .map(|(label, _)| label)
        .ok_or(Error::EmptyBelief)
}

/// `n` evenly spaced samples of the mixture density over
/// `[y_min, y_max]`.
pub fn density_grid(
    m: &GaussianMixture,
    y_min: f64,
    y_max: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(y_min.is_finite() && y_max.is_finite()) || y_min >= y_max || n < 2 {
        return Err(Error::InvalidGrid { y_min, y_max, n });
    }
    let span = y_max - y_min;
    Ok((0..n)
        .map(|i| {
            let y = y_min + span * (i as f64) / ((n - 1) as f64);
            (y, m.density(y))
        })
        .collect())
}
