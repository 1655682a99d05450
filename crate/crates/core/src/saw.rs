//! Simple additive weighting over the bidders of one auction.
//!
//! Each preference parameter is min-max scaled across the current bidders
//! so that 1 is the best offer and 0 the worst, then the scaled row of each
//! bidder is collapsed into one score with the buyer's weights.

use crate::error::{Error, Result};
use crate::market::{Preference, PreferenceWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Higher raw value is better.
    Positive,
    /// Lower raw value is better.
    Negative,
}

impl Preference {
    pub const fn polarity(self) -> Polarity {
        match self {
            Preference::Cost => Polarity::Negative,
            Preference::Availability | Preference::AcceptanceRate => Polarity::Positive,
        }
    }
}

/// Min-max scales one parameter column. All-equal columns scale to 1.
pub fn scale_parameter(raw: &[f64], polarity: Polarity) -> Result<Vec<f64>> {
    if let Some(&bad) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let (min, max) = raw
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(Error::EmptyInput)?;
    let range = max - min;
    if range == 0.0 {
        return Ok(vec![1.0; raw.len()]);
    }
    Ok(raw
        .iter()
        .map(|&v| match polarity {
            Polarity::Negative => (max - v) / range,
            Polarity::Positive => (v - min) / range,
        })
        .collect())
}

/// Σ_q S_q · P_q for one bidder.
pub fn preference_score(scaled: &[f64], weights: &[f64]) -> Result<f64> {
    if scaled.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: scaled.len(),
        });
    }
    Ok(scaled.iter().zip(weights).map(|(s, p)| s * p).sum())
}

/// Scaled parameter rows and aggregate score for each bidder of an auction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    scaled: Vec<[f64; 3]>,
    scores: Vec<f64>,
}

impl ScoreMatrix {
    /// `raw[i]` holds bidder `i`'s values in [`Preference::ALL`] order.
    pub fn compute(raw: &[[f64; 3]], weights: &PreferenceWeights) -> Result<Self> {
        let mut scaled = vec![[0.0; 3]; raw.len()];
        for pref in Preference::ALL {
            let q = pref.index();
            let column: Vec<f64> = raw.iter().map(|row| row[q]).collect();
            for (row, s) in scaled
                .iter_mut()
                .zip(scale_parameter(&column, pref.polarity())?)
            {
                row[q] = s;
            }
        }
        let scores = scaled
            .iter()
            .map(|row| preference_score(row, weights.as_slice()))
            .collect::<Result<_>>()?;
        Ok(ScoreMatrix { scaled, scores })
    }

    pub fn scaled(&self) -> &[[f64; 3]] {
        &self.scaled
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}
