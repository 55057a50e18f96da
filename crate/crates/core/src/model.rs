//! Boolean data model: pooling matrices, support sets, test outcomes, and
//! the measurement operation shared by every other module.
//!
//! Matrices are stored as one bitset per *column* (the set of pools an item
//! participates in), because decoding iterates columns and needs
//! `popcount(column & !outcome)` per column. Items and rows are indexed from
//! zero internally; the text formats below and the CLI echo one-based
//! indices only in human-readable output.
//!
//! # Matrix text format
//!
//! First line `M N` (ASCII decimals, single space), then exactly `M` lines of
//! exactly `N` characters from `{0,1}`; line `r` holds entries `(r, 0..N-1)`.
//! A trailing newline is required and no comments are allowed.
//!
//! # Support-set text format
//!
//! One ASCII decimal item index per line, zero-based.

use std::path::Path;

use crate::bitset::BitSet;
use crate::error::{Error, ParseErrorKind, Result};

/// The designed M x N pooling matrix: entry (r, c) is set when pool `r`
/// includes item `c`.
#[derive(Clone, PartialEq, Eq)]
pub struct ContactMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<BitSet>,
}

impl ContactMatrix {
    /// Build from per-column row sets. Every bitset must address exactly
    /// `rows` rows and both dimensions must be at least one.
    pub fn new(rows: usize, cols: usize, columns: Vec<BitSet>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: 1,
                kind: ParseErrorKind::BadDimensions { rows, cols },
            });
        }
        if columns.len() != cols {
            return Err(Error::DimensionMismatch {
                context: "column count",
                expected: cols,
                got: columns.len(),
            });
        }
        for col in &columns {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "column height",
                    expected: rows,
                    got: col.len(),
                });
            }
        }
        Ok(Self { rows, cols, columns })
    }

    /// All-zero matrix.
    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![BitSet::new(rows); cols])
    }

    /// Build from row strings such as `["101010", "010101"]`.
    pub fn from_row_strings(rows: &[&str]) -> Result<Self> {
        let body = rows.join("\n");
        let header = format!("{} {}\n", rows.len(), rows.first().map_or(0, |r| r.len()));
        parse_matrix(&format!("{header}{body}\n"))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, col: usize) -> &BitSet {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[BitSet] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].contains(row)
    }

    /// Total number of set entries.
    pub fn total_ones(&self) -> usize {
        self.columns.iter().map(BitSet::count_ones).sum()
    }

    pub(crate) fn set(&mut self, row: usize, col: usize) {
        self.columns[col].insert(row);
    }

    pub(crate) fn clear(&mut self, row: usize, col: usize) {
        self.columns[col].remove(row);
    }
}

impl std::fmt::Debug for ContactMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ContactMatrix({}x{})", self.rows, self.cols)
    }
}

/// A realization of the pooling matrix after the channel has erased some
/// entries. Entrywise dominated by the matrix it was derived from: erasure
/// only clears set entries, it never creates new ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingMatrix {
    inner: ContactMatrix,
}

impl SamplingMatrix {
    /// The noiseless realization: every designed contact survives.
    pub fn noiseless(parent: &ContactMatrix) -> Self {
        Self {
            inner: parent.clone(),
        }
    }

    /// Wrap an externally obtained realization, verifying shape and
    /// entrywise dominance against its parent.
    pub fn from_realization(parent: &ContactMatrix, realized: ContactMatrix) -> Result<Self> {
        if realized.rows() != parent.rows() {
            return Err(Error::DimensionMismatch {
                context: "realization rows",
                expected: parent.rows(),
                got: realized.rows(),
            });
        }
        if realized.cols() != parent.cols() {
            return Err(Error::DimensionMismatch {
                context: "realization cols",
                expected: parent.cols(),
                got: realized.cols(),
            });
        }
        for (c, (real, designed)) in realized.columns().iter().zip(parent.columns()).enumerate() {
            if !real.dominated_by(designed) {
                return Err(Error::InvalidSupport(format!(
                    "column {c} of the realization is not dominated by its parent"
                )));
            }
        }
        Ok(Self { inner: realized })
    }

    /// Used by the channel and the adversary, where dominance holds by
    /// construction (they start from a copy and only clear entries).
    pub(crate) fn from_erasure(inner: ContactMatrix) -> Self {
        Self { inner }
    }

    pub fn matrix(&self) -> &ContactMatrix {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.rows()
    }

    pub fn cols(&self) -> usize {
        self.inner.cols()
    }

    pub fn column(&self, col: usize) -> &BitSet {
        self.inner.column(col)
    }
}

/// The set of defective items: strictly increasing indices with an explicit
/// sparsity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    indices: Vec<usize>,
    bound: usize,
}

impl SupportSet {
    /// Build a support set; `indices` may arrive in any order but must not
    /// contain duplicates, and at most `bound` items are allowed.
    pub fn new(mut indices: Vec<usize>, bound: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSupport("duplicate item index".into()));
        }
        if indices.len() > bound {
            return Err(Error::InvalidSupport(format!(
                "{} items exceed the sparsity bound {bound}",
                indices.len()
            )));
        }
        Ok(Self { indices, bound })
    }

    pub fn empty(bound: usize) -> Self {
        Self {
            indices: Vec::new(),
            bound,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn contains(&self, item: usize) -> bool {
        self.indices.binary_search(&item).is_ok()
    }
}

/// The length-M vector of pool results.
#[derive(Clone, PartialEq, Eq)]
pub struct TestOutcome {
    bits: BitSet,
}

impl TestOutcome {
    pub fn all_negative(rows: usize) -> Self {
        Self {
            bits: BitSet::new(rows),
        }
    }

    pub fn from_bits(bits: BitSet) -> Self {
        Self { bits }
    }

    /// Parse an M-character 0/1 string.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = BitSet::new(text.chars().count());
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => bits.insert(i),
                '0' => {}
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        kind: ParseErrorKind::BadCharacter(other),
                    })
                }
            }
        }
        Ok(Self { bits })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Whether every pool came back negative.
    pub fn is_all_negative(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn get(&self, row: usize) -> bool {
        self.bits.contains(row)
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Entrywise `self <= other`.
    pub fn dominated_by(&self, other: &TestOutcome) -> bool {
        self.bits.dominated_by(&other.bits)
    }
}

impl std::fmt::Display for TestOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in 0..self.len() {
            f.write_str(if self.get(row) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for TestOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestOutcome({self})")
    }
}

/// Apply the realized matrix to a support set with boolean arithmetic:
/// pool `r` is positive iff some supported item has entry `(r, i)` set.
/// Equivalently, the outcome support is the union of the sampled columns
/// over the support.
pub fn boolean_measure(matrix: &SamplingMatrix, support: &SupportSet) -> Result<TestOutcome> {
    let mut bits = BitSet::new(matrix.rows());
    for &item in support.indices() {
        if item >= matrix.cols() {
            return Err(Error::ItemOutOfRange {
                index: item,
                cols: matrix.cols(),
            });
        }
        bits.union_with(matrix.column(item));
    }
    Ok(TestOutcome::from_bits(bits))
}

/// Number of rows where `column` is set but the outcome is negative,
/// i.e. `|supp(column) \ supp(outcome)|`.
pub fn support_deficit(column: &BitSet, outcome: &TestOutcome) -> Result<usize> {
    if column.len() != outcome.len() {
        return Err(Error::DimensionMismatch {
            context: "support deficit",
            expected: outcome.len(),
            got: column.len(),
        });
    }
    Ok(column.difference_count(outcome.bits()))
}

/// Parse the matrix text format. Errors carry one-based line numbers.
pub fn parse_matrix(text: &str) -> Result<ContactMatrix> {
    let mut lines = text.split('\n');
    let header = lines.next().filter(|l| !l.is_empty()).ok_or(Error::Parse {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    let (rows, cols) = parse_header(header)?;
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            line: 1,
            kind: ParseErrorKind::BadDimensions { rows, cols },
        });
    }

    let mut matrix = ContactMatrix::zero(rows, cols)?;
    for row in 0..rows {
        let line_no = row + 2;
        let line = lines.next().ok_or(Error::Parse {
            line: line_no,
            kind: ParseErrorKind::MissingRows {
                expected: rows,
                got: row,
            },
        })?;
        if line.len() != cols {
            return Err(Error::Parse {
                line: line_no,
                kind: ParseErrorKind::LineLength {
                    expected: cols,
                    got: line.chars().count(),
                },
            });
        }
        for (col, c) in line.chars().enumerate() {
            match c {
                '1' => matrix.set(row, col),
                '0' => {}
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        kind: ParseErrorKind::BadCharacter(other),
                    })
                }
            }
        }
    }

    // The trailing newline leaves exactly one empty fragment behind.
    match lines.next() {
        None => Err(Error::Parse {
            line: rows + 1,
            kind: ParseErrorKind::MissingTrailingNewline,
        }),
        Some("") => match lines.next() {
            None => Ok(matrix),
            Some(_) => Err(Error::Parse {
                line: rows + 2,
                kind: ParseErrorKind::TrailingContent,
            }),
        },
        Some(_) => Err(Error::Parse {
            line: rows + 2,
            kind: ParseErrorKind::TrailingContent,
        }),
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line: 1,
        kind: ParseErrorKind::BadHeader(header.to_string()),
    };
    let (m, n) = header.split_once(' ').ok_or_else(bad)?;
    let rows = m.parse().map_err(|_| bad())?;
    let cols = n.parse().map_err(|_| bad())?;
    Ok((rows, cols))
}

/// Serialize to the matrix text format (inverse of [`parse_matrix`]).
pub fn matrix_to_string(matrix: &ContactMatrix) -> String {
    let mut out = String::with_capacity((matrix.cols() + 1) * (matrix.rows() + 1));
    out.push_str(&format!("{} {}\n", matrix.rows(), matrix.cols()));
    for row in 0..matrix.rows() {
        for col in 0..matrix.cols() {
            out.push(if matrix.get(row, col) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ContactMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(matrix: &ContactMatrix, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, matrix_to_string(matrix))?)
}

/// Parse the support-set text format: one zero-based index per line.
pub fn parse_support(text: &str, bound: usize) -> Result<SupportSet> {
    let mut indices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let index = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            kind: ParseErrorKind::BadIndex(line.to_string()),
        })?;
        indices.push(index);
    }
    SupportSet::new(indices, bound)
}

pub fn read_support(path: impl AsRef<Path>, bound: usize) -> Result<SupportSet> {
    parse_support(&std::fs::read_to_string(path)?, bound)
}

pub fn write_support(support: &SupportSet, path: impl AsRef<Path>) -> Result<()> {
    let mut text = String::new();
    for &i in support.indices() {
        text.push_str(&format!("{i}\n"));
    }
    Ok(std::fs::write(path, text)?)
}
