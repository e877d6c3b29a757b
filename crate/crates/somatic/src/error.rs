use thiserror::Error;

/// Errors produced by lexicon handling, belief construction and inference.
#[derive(Debug, Error)]
pub enum Error {
    #[error("EPA component '{component}' is {value}, outside the rating scale [-4.3, 4.3]")]
    EpaOutOfRange { component: char, value: f64 },

    #[error("EPA component '{component}' is not a finite number")]
    EpaNotFinite { component: char },

    #[error("lexicon entry label must be non-empty")]
    EmptyLabel,

    #[error("standard deviation for '{component}' is {value}; must be finite and >= 0")]
    InvalidSd { component: char, value: f64 },

    #[error("duplicate lexicon label '{0}'")]
    DuplicateLabel(String),

    #[error("lexicon is empty; no candidate labels to rank")]
    EmptyLexicon,

    #[error("k = {k} exceeds lexicon size {size}")]
    KTooLarge { k: usize, size: usize },

    #[error("probability for '{label}' is {value}; must lie in [0, 1]")]
    InvalidProbability { label: String, value: f64 },

    #[error("probabilities sum to {sum}, not 1 within {tolerance}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("belief has no items")]
    EmptyBelief,

    #[error("{what} is {value}; must be finite and > 0")]
    NonPositiveScale { what: &'static str, value: f64 },

    #[error("{what} is {value}; must be a finite number")]
    NotFinite { what: &'static str, value: f64 },

    #[error("no connotative anchor for label '{0}'")]
    MissingAnchor(String),

    #[error("all unnormalized posterior mass is zero")]
    DegenerateMass,

    #[error("mixture weights sum to {0}, not 1 within 1e-9")]
    BadMixtureWeights(f64),

    #[error("invalid grid: y_min={y_min}, y_max={y_max}, n={n} (need y_min < y_max and n >= 2)")]
    InvalidGrid { y_min: f64, y_max: f64, n: usize },

    #[error("observation symbol '{0}' is unknown to the observation model")]
    UnknownObservation(String),

    #[error("observation has zero likelihood under every label carrying prior mass")]
    ImpossibleObservation,

    #[error("label '{0}' has zero likelihood under every observation symbol")]
    UnreachableLabel(String),

    #[error("label '{0}' is not part of the belief")]
    UnknownLabel(String),

    #[error("type weights sum to {0}, not 1 within 1e-9")]
    BadTypeWeights(f64),

    #[error("emotion E value {0} is outside the rating scale [-4.3, 4.3]")]
    EmotionOutOfRange(f64),

    #[error("record output '{name}' is {value}; outputs must be finite")]
    NonFiniteOutput { name: String, value: f64 },

    #[error("lexicon file has no header line")]
    MissingHeader,

    #[error("lexicon header {found:?} does not start with the required columns {expected:?}")]
    BadHeader { expected: String, found: String },

    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
