//! The distance decoder: item `i` is declared defective iff at most
//! `threshold` of its designed contacts are unexplained by the outcome,
//! i.e. `|supp(column_i) \ supp(y)| <= threshold`. With `threshold = 0`
//! this is the classical containment decoder. One word-parallel
//! AND-NOT popcount per column gives O(MN) bit operations overall.

use crate::error::{Error, Result};
use crate::model::{ContactMatrix, TestOutcome};

/// Decoder output. The detected set is never truncated: if more columns
/// pass the test than the sparsity bound allows, all of them are reported
/// and [`DecodeResult::oversize`] answers true, so callers can count the
/// trial as a failure instead of silently picking favourites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// Item indices passing the deficit test, in increasing order.
    pub detected: Vec<usize>,
}

impl DecodeResult {
    /// Whether more items were detected than the sparsity bound allows.
    pub fn oversize(&self, sparsity_bound: usize) -> bool {
        self.detected.len() > sparsity_bound
    }

    /// Exact-match success criterion against the true support.
    pub fn matches(&self, support: &[usize]) -> bool {
        self.detected == support
    }
}

/// Run the distance decoder over every column of the designed matrix.
pub fn distance_decode(
    matrix: &ContactMatrix,
    outcome: &TestOutcome,
    threshold: usize,
) -> Result<DecodeResult> {
    if outcome.len() != matrix.rows() {
        return Err(Error::DimensionMismatch {
            context: "outcome length",
            expected: matrix.rows(),
            got: outcome.len(),
        });
    }
    let positives = outcome.bits();
    let detected = matrix
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, column)| column.difference_count(positives) <= threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(DecodeResult { detected })
}

/// Per-column deficits, as a diagnostic companion to [`distance_decode`].
pub fn column_deficits(matrix: &ContactMatrix, outcome: &TestOutcome) -> Result<Vec<usize>> {
    if outcome.len() != matrix.rows() {
        return Err(Error::DimensionMismatch {
            context: "outcome length",
            expected: matrix.rows(),
            got: outcome.len(),
        });
    }
    let positives = outcome.bits();
    Ok(matrix
        .columns()
        .iter()
        .map(|column| column.difference_count(positives))
        .collect())
}
