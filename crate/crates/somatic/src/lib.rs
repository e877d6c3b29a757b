//! Bidirectional Bayesian coupling between a discrete denotative belief and
//! a continuous connotative (EPA sentiment) belief.
//!
//! The library provides:
//!
//! * [`epa`]: EPA sentiment vectors, lexicons, nearest-label search and
//!   emotion-deflection arithmetic;
//! * [`transform`]: the somatic transform: a Gaussian coupling kernel
//!   between labels and sentiment with closed-form marginal posteriors in
//!   both directions, entropy diagnostics and the zero-temperature
//!   dictionary-lookup limit;
//! * [`sequential`]: iterated observation updates with connotative
//!   feed-forward (conformity chains) and integration over discrete
//!   dispersion types (dissonance);
//! * [`experiments`]: deterministic runners regenerating the reference
//!   simulations as tabular records;
//! * [`dict_io`]: delimited-file ingestion and emission of sentiment
//!   lexicons with per-line validation reports.
//!
//! All types are immutable values and all operations are pure functions,
//! safe to use concurrently without synchronization.
//!
//! ```
//! use somatic::{CategoricalBelief, GaussianBelief, SomaticPotential, posterior_x};
//!
//! // "I probably got the worse item" meets "I am a good person and good
//! // people have good things": the item is re-interpreted as good.
//! let prior_x = CategoricalBelief::new([("good", 0.2), ("bad", 0.8)])?;
//! let prior_y = GaussianBelief::new(2.0, 1.23)?;
//! let coupling = SomaticPotential::new([("good", 1.32), ("bad", -0.67)], 0.3)?;
//! let posterior = posterior_x(&prior_x, &prior_y, &coupling)?;
//! assert!((posterior.prob("bad").unwrap() - 0.333).abs() < 1e-3);
//! # Ok::<(), somatic::Error>(())
//! ```

pub mod dict_io;
pub mod epa;
pub mod error;
pub mod experiments;
mod math;
pub mod sequential;
pub mod transform;

pub use epa::{distance, emotion_deflection, nearest_label, EpaDelta, EpaVector, Lexicon,
    LexiconEntry, Metric};
pub use error::{Error, Result};
pub use transform::{
    act_limit_label, density_grid, kernel_evidence, posterior_x, posterior_y, CategoricalBelief,
    GaussianBelief, GaussianMixture, MixtureComponent, SomaticPotential,
};
