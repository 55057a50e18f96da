//! Non-adaptive group testing with unreliably activating tests.
//!
//! A defective item that participates in a pool only triggers the test with
//! some activation probability `p`, so the realized pooling matrix differs
//! from the designed one by one-way erasures. This crate provides the whole
//! pipeline for that setting:
//!
//! * [`model`] — boolean matrices as column bitsets, support sets, outcomes,
//!   measurement, and the text file formats;
//! * [`construction`] — random Bernoulli pooling matrices and an exhaustive
//!   disjunctness oracle for desk-scale validation;
//! * [`channel`] — the erasure process applied to set entries, with
//!   reproducible per-column randomness;
//! * [`decoder`] — the distance decoder: keep item `i` when at most `e` of
//!   its contacts are unexplained by the outcome;
//! * [`design`](mod@design) — the solver that turns `(N, K, p)` plus two
//!   failure budgets into a test count, density and decoder threshold;
//! * [`experiments`] — a deterministic parallel Monte Carlo harness and the
//!   sweep drivers with CSV output.

pub mod bitset;
pub mod channel;
pub mod construction;
pub mod decoder;
pub mod design;
pub mod error;
pub mod experiments;
pub mod model;
pub mod seed;

pub use bitset::BitSet;
pub use channel::{end_to_end_measure, z_channel_sample, ChannelParams};
pub use construction::{
    adversarial_flip, is_disjunct, is_disjunct_with_guard, sample_contact_matrix,
    ConstructionParams, DisjunctGuard, DisjunctReport, DisjunctWitness,
};
pub use decoder::{column_deficits, distance_decode, DecodeResult};
pub use design::{
    design, ChernoffForm, DesignReport, DesignResult, DesignSpec, Strategy, SweepGrid,
};
pub use error::{Error, Result};
pub use experiments::{
    run_trials, sweep_design_surface, sweep_tests_vs_failure, MatrixMode, SupportMode,
    TrialConfig, TrialReport,
};
pub use model::{
    boolean_measure, matrix_to_string, parse_matrix, parse_support, read_matrix, read_support,
    support_deficit, write_matrix, write_support, ContactMatrix, SamplingMatrix, SupportSet,
    TestOutcome,
};
