//! EPA sentiment vectors, sentiment lexicons and nearest-label search.
//!
//! Semantic-differential surveys rate concepts on three dimensions:
//! Evaluation (good/bad), Potency (strong/weak) and Activity
//! (active/inactive), conventionally scaled to [-4.3, 4.3]. A lexicon maps
//! concept labels to the population mean and standard deviation of those
//! ratings.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Scale bound of the semantic-differential rating space.
pub const EPA_SCALE: f64 = 4.3;

/// A point in Evaluation/Potency/Activity sentiment space.
///
/// Construction rejects components outside [-4.3, 4.3]; a value outside the
/// scale always indicates an ingestion bug, never a legitimate rating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaVector {
    e: f64,
    p: f64,
    a: f64,
}

impl EpaVector {
    pub fn new(e: f64, p: f64, a: f64) -> Result<Self> {
        for (component, value) in [('e', e), ('p', p), ('a', a)] {
            if !value.is_finite() {
                return Err(Error::EpaNotFinite { component });
            }
            if value.abs() > EPA_SCALE {
                return Err(Error::EpaOutOfRange { component, value });
            }
        }
        Ok(Self { e, p, a })
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn components(&self) -> [f64; 3] {
        [self.e, self.p, self.a]
    }
}

/// Componentwise difference of two EPA vectors.
///
/// Not itself a rating: a difference of in-scale vectors can reach +/-8.6, so
/// this type carries no range restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaDelta {
    pub e: f64,
    pub p: f64,
    pub a: f64,
}

/// Distance metric over EPA space.
///
/// `SquaredEuclidean` is the reporting default: published nearest-neighbour
/// distances for ACT dictionaries (e.g. the politician example at 0.35) are
/// squared Euclidean distances even where prose calls them "Euclidean".
/// Rankings are identical under both metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    Euclidean,
    #[default]
    SquaredEuclidean,
}

/// Distance between two EPA points under the chosen metric.
pub fn distance(a: &EpaVector, b: &EpaVector, metric: Metric) -> f64 {
    let sq = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>();
    match metric {
        Metric::SquaredEuclidean => sq,
        Metric::Euclidean => sq.sqrt(),
    }
}

/// Emotion signal: fundamental (out-of-context) minus transient (in-context)
/// sentiment, componentwise.
///
/// A positive component means the in-context impression fell below the
/// out-of-context sentiment on that dimension.
pub fn emotion_deflection(fundamental: &EpaVector, transient: &EpaVector) -> EpaDelta {
    EpaDelta {
        e: fundamental.e - transient.e,
        p: fundamental.p - transient.p,
        a: fundamental.a - transient.a,
    }
}

/// One lexicon row: a label with population mean and per-dimension standard
/// deviation of its EPA ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    label: String,
    mean: EpaVector,
    sd: [f64; 3],
}

impl LexiconEntry {
    pub fn new(label: impl Into<String>, mean: EpaVector, sd: [f64; 3]) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        for (component, value) in ['e', 'p', 'a'].into_iter().zip(sd) {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidSd { component, value });
            }
        }
        Ok(Self { label, mean, sd })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean(&self) -> &EpaVector {
        &self.mean
    }

    pub fn sd(&self) -> [f64; 3] {
        self.sd
    }
}

/// A collection of lexicon entries keyed by their (case-sensitive) label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Result<Self> {
        let mut lex = Self::new();
        for entry in entries {
            lex.insert(entry)?;
        }
        Ok(lex)
    }

    /// Adds an entry, rejecting duplicate labels.
    pub fn insert(&mut self, entry: LexiconEntry) -> Result<()> {
        if self.entries.contains_key(entry.label()) {
            return Err(Error::DuplicateLabel(entry.label().to_owned()));
        }
        self.entries.insert(entry.label().to_owned(), entry);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&LexiconEntry> {
        self.entries.get(label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in label order.
    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }
}

/// The `k` lexicon labels closest to `query`, ranked ascending by distance
/// between `query` and each entry's mean rating. Ties break lexicographically
/// by label, so the ranking is deterministic and identical under both
/// metrics.
pub fn nearest_label(
    lex: &Lexicon,
    query: &EpaVector,
    k: usize,
    metric: Metric,
) -> Result<Vec<(String, f64)>> {
    if lex.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    if k > lex.len() {
        return Err(Error::KTooLarge { k, size: lex.len() });
    }
    let mut ranked: Vec<(String, f64)> = lex
        .entries()
        .map(|entry| (entry.label().to_owned(), distance(query, entry.mean(), metric)))
        .collect();
    // Entries come out of the map in label order, so a stable sort on the
    // distance alone preserves the lexicographic tie-break.
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn epa(e: f64, p: f64, a: f64) -> EpaVector {
        EpaVector::new(e, p, a).unwrap()
    }

    #[test]
    fn construction_rejects_out_of_scale_components() {
        assert!(EpaVector::new(9.9, 0.0, 0.0).is_err());
        assert!(EpaVector::new(0.0, -4.31, 0.0).is_err());
        assert!(EpaVector::new(0.0, 0.0, f64::NAN).is_err());
        assert!(EpaVector::new(-4.3, 4.3, 0.0).is_ok());
    }

    #[test]
    fn politician_pair_distances() {
        let query = epa(-1.0, 2.0, 2.0);
        let politician = epa(-0.9, 2.3, 1.5);
        let sq = distance(&query, &politician, Metric::SquaredEuclidean);
        assert_relative_eq!(sq, 0.35, epsilon = 1e-12);
        // sqrt(0.01 + 0.09 + 0.25)
        assert_relative_eq!(
            distance(&query, &politician, Metric::Euclidean),
            0.35f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            distance(&query, &politician, Metric::Euclidean),
            0.5916,
            epsilon = 1e-4
        );
    }

    #[test]
    fn distance_is_zero_on_identity() {
        let v = epa(1.2, -0.7, 3.3);
        assert_eq!(distance(&v, &v, Metric::Euclidean), 0.0);
        assert_eq!(distance(&v, &v, Metric::SquaredEuclidean), 0.0);
    }

    #[test]
    fn deflection_matches_componentwise_subtraction() {
        let d = emotion_deflection(&epa(1.0, 1.0, 1.0), &epa(2.0, 0.0, 1.0));
        assert_eq!(d, EpaDelta { e: -1.0, p: 1.0, a: 0.0 });

        let zero = emotion_deflection(&epa(0.4, -2.2, 1.0), &epa(0.4, -2.2, 1.0));
        assert_eq!(zero, EpaDelta { e: 0.0, p: 0.0, a: 0.0 });
    }

    #[test]
    fn deflection_power_drop_example() {
        // A fundamental Potency of 3.0 observed transiently at -0.1 deflects
        // by +3.1: the agent was made to feel less powerful than expected.
        let fundamental = epa(2.7, 3.0, 0.2);
        let transient = epa(2.7, -0.1, 0.2);
        assert_relative_eq!(emotion_deflection(&fundamental, &transient).p, 3.1, epsilon = 1e-12);
    }

    fn sample_lexicon() -> Lexicon {
        Lexicon::from_entries([
            LexiconEntry::new("doctor", epa(2.7, 3.0, 0.2), [1.1, 1.4, 1.2]).unwrap(),
            LexiconEntry::new("politician", epa(-0.9, 2.3, 1.5), [1.0, 1.0, 1.0]).unwrap(),
            LexiconEntry::new("patient", epa(0.6, -1.5, -1.3), [1.0, 1.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn nearest_label_finds_politician() {
        let lex = sample_lexicon();
        let ranked = nearest_label(&lex, &epa(-1.0, 2.0, 2.0), 1, Metric::SquaredEuclidean).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].0, "politician");
        assert_relative_eq!(ranked[0].1, 0.35, epsilon = 1e-12);
    }

    #[test]
    fn nearest_label_exact_match_ranks_first_with_zero_distance() {
        let lex = sample_lexicon();
        let ranked = nearest_label(&lex, &epa(0.6, -1.5, -1.3), 3, Metric::Euclidean).unwrap();
        assert_eq!(ranked[0].0, "patient");
        assert_eq!(ranked[0].1, 0.0);
    }

    #[test]
    fn nearest_label_breaks_ties_lexicographically() {
        let lex = Lexicon::from_entries([
            LexiconEntry::new("zebra", epa(1.0, 0.0, 0.0), [0.0; 3]).unwrap(),
            LexiconEntry::new("aard", epa(-1.0, 0.0, 0.0), [0.0; 3]).unwrap(),
        ])
        .unwrap();
        let ranked = nearest_label(&lex, &epa(0.0, 0.0, 0.0), 2, Metric::Euclidean).unwrap();
        assert_eq!(ranked[0].0, "aard");
        assert_eq!(ranked[1].0, "zebra");
    }

    #[test]
    fn nearest_label_rejects_empty_lexicon_and_oversized_k() {
        let empty = Lexicon::new();
        assert!(matches!(
            nearest_label(&empty, &epa(0.0, 0.0, 0.0), 1, Metric::Euclidean),
            Err(Error::EmptyLexicon)
        ));
        let lex = sample_lexicon();
        assert!(matches!(
            nearest_label(&lex, &epa(0.0, 0.0, 0.0), 4, Metric::Euclidean),
            Err(Error::KTooLarge { k: 4, size: 3 })
        ));
    }

    #[test]
    fn lexicon_rejects_duplicates_and_bad_entries() {
        let mut lex = sample_lexicon();
        let dup = LexiconEntry::new("doctor", epa(0.0, 0.0, 0.0), [0.0; 3]).unwrap();
        assert!(matches!(lex.insert(dup), Err(Error::DuplicateLabel(_))));
        assert!(LexiconEntry::new("", epa(0.0, 0.0, 0.0), [0.0; 3]).is_err());
        assert!(LexiconEntry::new("x", epa(0.0, 0.0, 0.0), [-0.1, 0.0, 0.0]).is_err());
    }
}
