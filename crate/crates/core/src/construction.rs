//! Probabilistic pooling-matrix generation and the exhaustive disjunctness
//! oracle used to validate small instances.
//!
//! A random matrix with i.i.d. Bernoulli(q) entries makes a good pooling
//! design when q is tuned to the sparsity (the design module picks
//! q = alpha/K). Disjunctness is the combinatorial property that guarantees
//! exact recovery against adversarial erasures; checking it exhaustively
//! costs O(N * C(N,K) * M), so the checker refuses large instances unless
//! forced.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{ContactMatrix, SamplingMatrix};

/// Parameters for random matrix generation.
#[derive(Clone, Copy, Debug)]
pub struct ConstructionParams {
    pub rows: usize,
    pub cols: usize,
    /// Per-entry inclusion probability, in (0, 1].
    pub density: f64,
    pub seed: u64,
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 {
            return Err(Error::InvalidParameter {
                name: "rows",
                value: self.rows as f64,
                requirement: "rows >= 1",
            });
        }
        if self.cols == 0 {
            return Err(Error::InvalidParameter {
                name: "cols",
                value: self.cols as f64,
                requirement: "cols >= 1",
            });
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "density",
                value: self.density,
                requirement: "0 < density <= 1",
            });
        }
        Ok(())
    }
}

/// Draw a matrix with independent Bernoulli(`density`) entries,
/// deterministically for a fixed seed.
///
/// Entries are visited in column-major order and set bits are produced by
/// geometric gap sampling, so the cost is proportional to the number of
/// ones rather than to rows x cols.
pub fn sample_contact_matrix(params: &ConstructionParams) -> Result<ContactMatrix> {
    params.validate()?;
    let mut matrix = ContactMatrix::zero(params.rows, params.cols)?;
    let total = params.rows * params.cols;

    if params.density >= 1.0 {
        for col in 0..params.cols {
            for row in 0..params.rows {
                matrix.set(row, col);
            }
        }
        return Ok(matrix);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let ln_miss = (1.0 - params.density).ln();
    let mut pos = 0usize;
    while pos < total {
        // Geometric(density) gap: failures before the next set entry.
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / ln_miss).floor();
        if gap >= (total - pos) as f64 {
            break;
        }
        pos += gap as usize;
        matrix.set(pos % params.rows, pos / params.rows);
        pos += 1;
    }
    Ok(matrix)
}

/// Size guard for the exhaustive disjunctness check.
#[derive(Clone, Copy, Debug)]
pub struct DisjunctGuard {
    pub max_cols: usize,
    pub max_k: usize,
}

impl Default for DisjunctGuard {
    fn default() -> Self {
        Self {
            max_cols: 25,
            max_k: 4,
        }
    }
}

impl DisjunctGuard {
    /// No limits; the caller accepts the exponential cost.
    pub fn unlimited() -> Self {
        Self {
            max_cols: usize::MAX,
            max_k: usize::MAX,
        }
    }
}

/// A counterexample to disjunctness: column `column` keeps at most the
/// allowed number of private rows against the union of `subset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjunctWitness {
    pub column: usize,
    pub subset: Vec<usize>,
    /// `|supp(column) \ union(subset)|`, guaranteed <= the threshold that
    /// was checked.
    pub residual: usize,
}

impl DisjunctWitness {
    /// Re-verify this witness against a matrix and threshold.
    pub fn verify(&self, matrix: &ContactMatrix, threshold: usize) -> bool {
        let mut union = BitSet::new(matrix.rows());
        for &j in &self.subset {
            union.union_with(matrix.column(j));
        }
        let residual = matrix.column(self.column).difference_count(&union);
        residual == self.residual && residual <= threshold
    }
}

/// Verdict of the exhaustive check.
#[derive(Clone, Debug)]
pub struct DisjunctReport {
    pub is_disjunct: bool,
    /// First violation in lexicographic (column, subset) order, if any.
    pub witness: Option<DisjunctWitness>,
}

/// Exhaustively decide whether every column keeps more than `threshold`
/// private rows against every union of at most `subset_size` other columns.
///
/// Subsets are enumerated in lexicographic prefix order (the empty subset
/// first), and the search stops at the first violation, so the reported
/// witness is deterministic.
pub fn is_disjunct(
    matrix: &ContactMatrix,
    subset_size: usize,
    threshold: usize,
) -> Result<DisjunctReport> {
    is_disjunct_with_guard(matrix, subset_size, threshold, DisjunctGuard::default())
}

pub fn is_disjunct_with_guard(
    matrix: &ContactMatrix,
    subset_size: usize,
    threshold: usize,
    guard: DisjunctGuard,
) -> Result<DisjunctReport> {
    if subset_size >= matrix.cols() {
        return Err(Error::InvalidParameter {
            name: "subset_size",
            value: subset_size as f64,
            requirement: "subset_size < cols",
        });
    }
    if matrix.cols() > guard.max_cols || subset_size > guard.max_k {
        return Err(Error::OracleGuard {
            cols: matrix.cols(),
            k: subset_size,
            max_cols: guard.max_cols,
            max_k: guard.max_k,
        });
    }

    for column in 0..matrix.cols() {
        let mut subset = Vec::with_capacity(subset_size);
        if let Some(witness) = search_column(
            matrix,
            column,
            threshold,
            subset_size,
            0,
            &BitSet::new(matrix.rows()),
            &mut subset,
        ) {
            return Ok(DisjunctReport {
                is_disjunct: false,
                witness: Some(witness),
            });
        }
    }
    Ok(DisjunctReport {
        is_disjunct: true,
        witness: None,
    })
}

/// Depth-first lexicographic subset walk; the current union is checked at
/// every node, so smaller subsets are visited before their extensions.
fn search_column(
    matrix: &ContactMatrix,
    column: usize,
    threshold: usize,
    remaining: usize,
    next: usize,
    union: &BitSet,
    subset: &mut Vec<usize>,
) -> Option<DisjunctWitness> {
    let residual = matrix.column(column).difference_count(union);
    if residual <= threshold {
        return Some(DisjunctWitness {
            column,
            subset: subset.clone(),
            residual,
        });
    }
    if remaining == 0 {
        return None;
    }
    for j in next..matrix.cols() {
        if j == column {
            continue;
        }
        let mut extended = union.clone();
        extended.union_with(matrix.column(j));
        subset.push(j);
        let hit = search_column(
            matrix,
            column,
            threshold,
            remaining - 1,
            j + 1,
            &extended,
            subset,
        );
        if hit.is_some() {
            return hit;
        }
        subset.pop();
    }
    None
}

/// Clear the listed support entries, enforcing the adversary's per-column
/// budget. `flips[c]` lists row indices to erase in column `c` and must lie
/// inside that column's support.
pub fn adversarial_flip(
    matrix: &ContactMatrix,
    flips: &[Vec<usize>],
    budget: usize,
) -> Result<SamplingMatrix> {
    if flips.len() != matrix.cols() {
        return Err(Error::DimensionMismatch {
            context: "flip sets",
            expected: matrix.cols(),
            got: flips.len(),
        });
    }
    let mut perturbed = matrix.clone();
    for (column, rows) in flips.iter().enumerate() {
        if rows.len() > budget {
            return Err(Error::FlipBudgetExceeded {
                column,
                got: rows.len(),
                budget,
            });
        }
        for &row in rows {
            if row >= matrix.rows() {
                return Err(Error::RowOutOfRange {
                    index: row,
                    rows: matrix.rows(),
                });
            }
            if !matrix.get(row, column) {
                return Err(Error::FlipOutsideSupport { column, row });
            }
            perturbed.clear(row, column);
        }
    }
    Ok(SamplingMatrix::from_erasure(perturbed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{boolean_measure, SupportSet};

    fn example_contact() -> ContactMatrix {
        ContactMatrix::from_row_strings(&["101010", "010101", "011011"]).unwrap()
    }

    #[test]
    fn full_density_gives_all_ones() {
        for seed in [0, 1, 99] {
            let m = sample_contact_matrix(&ConstructionParams {
                rows: 5,
                cols: 7,
                density: 1.0,
                seed,
            })
            .unwrap();
            assert_eq!(m.total_ones(), 35);
        }
    }

    #[test]
    fn ones_count_within_three_sigma() {
        // 10'000 entries at density 0.5: binomial 3-sigma band is [4850, 5150].
        let m = sample_contact_matrix(&ConstructionParams {
            rows: 100,
            cols: 100,
            density: 0.5,
            seed: 20260808,
        })
        .unwrap();
        let ones = m.total_ones();
        assert!((4850..=5150).contains(&ones), "ones = {ones}");
    }

    #[test]
    fn density_concentrates_as_matrix_grows() {
        let m = sample_contact_matrix(&ConstructionParams {
            rows: 500,
            cols: 400,
            density: 0.1,
            seed: 3,
        })
        .unwrap();
        let density = m.total_ones() as f64 / 200_000.0;
        // 3 sigma of Binomial(200000, 0.1)/200000 is about 0.002.
        assert!((density - 0.1).abs() < 0.002, "density = {density}");
    }

    #[test]
    fn same_seed_same_matrix() {
        let params = ConstructionParams {
            rows: 40,
            cols: 30,
            density: 0.2,
            seed: 777,
        };
        assert_eq!(
            sample_contact_matrix(&params).unwrap(),
            sample_contact_matrix(&params).unwrap()
        );
        let other = sample_contact_matrix(&ConstructionParams { seed: 778, ..params }).unwrap();
        assert_ne!(sample_contact_matrix(&params).unwrap(), other);
    }

    #[test]
    fn rejects_bad_parameters() {
        for density in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(sample_contact_matrix(&ConstructionParams {
                rows: 2,
                cols: 2,
                density,
                seed: 0
            })
            .is_err());
        }
    }

    #[test]
    fn identity_keeps_private_rows() {
        let id = ContactMatrix::from_row_strings(&["100", "010", "001"]).unwrap();
        let report = is_disjunct(&id, 2, 0).unwrap();
        assert!(report.is_disjunct);
        assert!(report.witness.is_none());
    }

    #[test]
    fn example_matrix_has_duplicate_columns() {
        // Columns 3 and 5 (one-based) are identical, so the matrix cannot
        // separate single items even with a zero threshold. The walk finds
        // an earlier violation: column 1's only row is already covered by
        // column 3.
        let report = is_disjunct(&example_contact(), 1, 0).unwrap();
        assert!(!report.is_disjunct);
        let witness = report.witness.unwrap();
        assert!(witness.verify(&example_contact(), 0));
        assert_eq!(witness.column, 0);
        assert_eq!(witness.subset, vec![2]);
    }

    #[test]
    fn zero_column_always_violates() {
        let m = ContactMatrix::from_row_strings(&["100", "100", "010"]).unwrap();
        for threshold in 0..3 {
            let report = is_disjunct(&m, 1, threshold).unwrap();
            assert!(!report.is_disjunct);
            let witness = report.witness.unwrap();
            assert!(witness.verify(&m, threshold));
        }
    }

    #[test]
    fn guard_refuses_large_instances() {
        let m = ContactMatrix::zero(4, 30).unwrap();
        assert!(matches!(
            is_disjunct(&m, 2, 0),
            Err(Error::OracleGuard { .. })
        ));
        // Forcing runs the check (and immediately finds the zero columns).
        let report = is_disjunct_with_guard(&m, 2, 0, DisjunctGuard::unlimited()).unwrap();
        assert!(!report.is_disjunct);
    }

    #[test]
    fn flip_with_empty_sets_is_identity() {
        let m = example_contact();
        let s = adversarial_flip(&m, &vec![Vec::new(); 6], 2).unwrap();
        assert_eq!(s.matrix(), &m);
    }

    #[test]
    fn flip_erases_an_identity_column() {
        let id = ContactMatrix::from_row_strings(&["100", "010", "001"]).unwrap();
        let mut flips = vec![Vec::new(); 3];
        flips[1] = vec![1];
        let s = adversarial_flip(&id, &flips, 1).unwrap();
        assert_eq!(s.column(1).count_ones(), 0);
        assert_eq!(s.column(0).count_ones(), 1);
    }

    #[test]
    fn flip_bookkeeping_matches_popcounts() {
        let m = example_contact();
        let flips = vec![
            vec![0],
            vec![1, 2],
            Vec::new(),
            Vec::new(),
            vec![2],
            Vec::new(),
        ];
        let s = adversarial_flip(&m, &flips, 2).unwrap();
        for (c, flip) in flips.iter().enumerate() {
            assert_eq!(
                s.column(c).count_ones(),
                m.column(c).count_ones() - flip.len(),
                "column {c}"
            );
        }
    }

    #[test]
    fn flip_rejects_budget_and_support_violations() {
        let m = example_contact();
        let mut flips = vec![Vec::new(); 6];
        flips[1] = vec![1, 2];
        assert!(matches!(
            adversarial_flip(&m, &flips, 1),
            Err(Error::FlipBudgetExceeded { column: 1, .. })
        ));
        flips[1] = vec![0]; // column 2 (one-based) has no entry in row 1
        assert!(matches!(
            adversarial_flip(&m, &flips, 2),
            Err(Error::FlipOutsideSupport { column: 1, row: 0 })
        ));
    }

    /// Converse direction of the adversarial reduction: a witness yields a
    /// flip pattern under which the witness subset with and without the
    /// witness column produce identical outcomes.
    #[test]
    fn witness_builds_colliding_outcomes() {
        let m = example_contact();
        let report = is_disjunct(&m, 1, 0).unwrap();
        let witness = report.witness.unwrap();

        let mut union = BitSet::new(m.rows());
        for &j in &witness.subset {
            union.union_with(m.column(j));
        }
        let private: Vec<usize> = m
            .column(witness.column)
            .ones()
            .filter(|r| !union.contains(*r))
            .collect();
        assert!(private.len() <= witness.residual);

        let mut flips = vec![Vec::new(); m.cols()];
        flips[witness.column] = private;
        let s = adversarial_flip(&m, &flips, witness.residual.max(1)).unwrap();

        let without = SupportSet::new(witness.subset.clone(), m.cols()).unwrap();
        let mut with_indices = witness.subset.clone();
        with_indices.push(witness.column);
        let with = SupportSet::new(with_indices, m.cols()).unwrap();
        assert_eq!(
            boolean_measure(&s, &without).unwrap(),
            boolean_measure(&s, &with).unwrap()
        );
    }
}
