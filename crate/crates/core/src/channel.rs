//! The stochastic sampling process: every set entry of the pooling matrix
//! survives independently with the activation probability, and clear
//! entries stay clear. This is the asymmetric one-way erasure that models a
//! defective item failing to trigger a pool it participates in.
//!
//! Erasures for column `c` are drawn from a dedicated sub-stream seeded by
//! [`seed::derive`]`(seed, COLUMN_STREAM, c)`, which makes the two entry
//! points below agree exactly: measuring a support lazily (sampling only the
//! supported columns) produces the same outcome as materializing the whole
//! sampling matrix first. It also cuts the per-measurement cost from O(MN)
//! to O(MK) random draws, which the Monte Carlo harness relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{ContactMatrix, SamplingMatrix, SupportSet, TestOutcome};
use crate::seed;

/// Sub-stream tag for per-column erasure randomness.
const COLUMN_STREAM: u64 = 0x5a_c0;

/// Activation probability and the seed of the erasure process.
#[derive(Clone, Copy, Debug)]
pub struct ChannelParams {
    /// Probability that a set entry survives, in (0, 1]. Zero is rejected:
    /// no test could ever fire and recovery would be impossible.
    pub activation: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(activation: f64, seed: u64) -> Result<Self> {
        if !(activation > 0.0 && activation <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "activation",
                value: activation,
                requirement: "0 < p <= 1",
            });
        }
        Ok(Self { activation, seed })
    }
}

fn erase_column(column: &BitSet, params: &ChannelParams, index: usize) -> BitSet {
    if params.activation >= 1.0 {
        return column.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(params.seed, COLUMN_STREAM, index as u64));
    let mut survived = BitSet::new(column.len());
    for row in column.ones() {
        if rng.random::<f64>() < params.activation {
            survived.insert(row);
        }
    }
    survived
}

/// Materialize the full erased realization of `matrix`.
pub fn z_channel_sample(matrix: &ContactMatrix, params: &ChannelParams) -> Result<SamplingMatrix> {
    ChannelParams::new(params.activation, params.seed)?;
    let columns = (0..matrix.cols())
        .map(|c| erase_column(matrix.column(c), params, c))
        .collect();
    let realized = ContactMatrix::new(matrix.rows(), matrix.cols(), columns)?;
    Ok(SamplingMatrix::from_erasure(realized))
}

/// Measure a support through a fresh channel realization without
/// materializing it: only the supported columns are sampled. Identical to
/// `boolean_measure(z_channel_sample(matrix, params), support)`.
pub fn end_to_end_measure(
    matrix: &ContactMatrix,
    support: &SupportSet,
    params: &ChannelParams,
) -> Result<TestOutcome> {
    ChannelParams::new(params.activation, params.seed)?;
    let mut bits = BitSet::new(matrix.rows());
    for &item in support.indices() {
        if item >= matrix.cols() {
            return Err(Error::ItemOutOfRange {
                index: item,
                cols: matrix.cols(),
            });
        }
        bits.union_with(&erase_column(matrix.column(item), params, item));
    }
    Ok(TestOutcome::from_bits(bits))
}
