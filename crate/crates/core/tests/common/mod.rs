//! Shared helpers for the exhaustive adversarial-recovery checks: enumerate
//! every sparse support and every legal per-column flip pattern, and compare
//! the decoder output against the truth.

use grouptest::construction::DisjunctWitness;
use grouptest::{
    adversarial_flip, boolean_measure, distance_decode, BitSet, ContactMatrix, SupportSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every subset of `0..n` with at most `kmax` elements, in lexicographic
/// prefix order (the empty support first).
pub fn all_supports(n: usize, kmax: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, kmax: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == kmax {
            return;
        }
        for j in start..n {
            cur.push(j);
            extend(n, kmax, j + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, kmax, 0, &mut Vec::new(), &mut out);
    out
}

/// Every subset of `rows` with at most `budget` elements.
fn flip_choices(rows: &[usize], budget: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in rows {
        let mut grown = Vec::new();
        for choice in &out {
            if choice.len() < budget {
                let mut next = choice.clone();
                next.push(r);
                grown.push(next);
            }
        }
        out.extend(grown);
    }
    out
}

/// Run the decoder against every `<= kmax`-sparse support and every legal
/// flip pattern of at most `budget` erasures per supported column. Returns
/// the number of cases checked, or a description of the first mismatch.
pub fn exhaustive_recovery(
    matrix: &ContactMatrix,
    kmax: usize,
    budget: usize,
) -> Result<usize, String> {
    let mut cases = 0usize;
    for support in all_supports(matrix.cols(), kmax) {
        let per_column: Vec<Vec<Vec<usize>>> = support
            .iter()
            .map(|&c| flip_choices(&matrix.column(c).ones().collect::<Vec<_>>(), budget))
            .collect();
        let support_set = SupportSet::new(support.clone(), kmax).unwrap();

        let mut odometer = vec![0usize; support.len()];
        loop {
            let mut flips = vec![Vec::new(); matrix.cols()];
            for (pos, &c) in support.iter().enumerate() {
                flips[c] = per_column[pos][odometer[pos]].clone();
            }
            let sampled = adversarial_flip(matrix, &flips, budget).unwrap();
            let outcome = boolean_measure(&sampled, &support_set).unwrap();
            let decoded = distance_decode(matrix, &outcome, budget).unwrap();
            if decoded.detected != support {
                return Err(format!(
                    "support {support:?} with flips {flips:?} decoded to {:?}",
                    decoded.detected
                ));
            }
            cases += 1;

            // Advance the mixed-radix odometer over flip patterns.
            let mut pos = 0;
            loop {
                if pos == odometer.len() {
                    break;
                }
                odometer[pos] += 1;
                if odometer[pos] < per_column[pos].len() {
                    break;
                }
                odometer[pos] = 0;
                pos += 1;
            }
            if pos == odometer.len() {
                break;
            }
        }
    }
    Ok(cases)
}

/// Build the adversarial flips a witness prescribes (erase the witness
/// column's private rows) and check that the witness subset with and
/// without the witness column become indistinguishable.
pub fn witness_collides(matrix: &ContactMatrix, witness: &DisjunctWitness, budget: usize) -> bool {
    let mut union = BitSet::new(matrix.rows());
    for &j in &witness.subset {
        union.union_with(matrix.column(j));
    }
    let private: Vec<usize> = matrix
        .column(witness.column)
        .ones()
        .filter(|r| !union.contains(*r))
        .collect();
    assert!(private.len() <= budget, "witness exceeds the flip budget");

    let mut flips = vec![Vec::new(); matrix.cols()];
    flips[witness.column] = private;
    let sampled = adversarial_flip(matrix, &flips, budget).unwrap();

    let bound = matrix.cols();
    let without = SupportSet::new(witness.subset.clone(), bound).unwrap();
    let mut with_indices = witness.subset.clone();
    with_indices.push(witness.column);
    let with = SupportSet::new(with_indices, bound).unwrap();

    boolean_measure(&sampled, &without).unwrap() == boolean_measure(&sampled, &with).unwrap()
}

/// `copies` identity blocks stacked vertically, then rows and columns
/// shuffled by `seed`. Every column keeps `copies` private rows against any
/// union of the others, so the result stays disjunct for thresholds below
/// `copies`.
pub fn shuffled_stacked_identity(n: usize, copies: usize, seed: u64) -> ContactMatrix {
    let rows = n * copies;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut row_perm: Vec<usize> = (0..rows).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for i in (1..rows).rev() {
        row_perm.swap(i, rng.random_range(0..=i));
    }
    for i in (1..n).rev() {
        col_perm.swap(i, rng.random_range(0..=i));
    }
    let mut columns = vec![BitSet::new(rows); n];
    for item in 0..n {
        columns[col_perm[item]] =
            BitSet::from_indices(rows, (0..copies).map(|block| row_perm[block * n + item]));
    }
    ContactMatrix::new(rows, n, columns).unwrap()
}
