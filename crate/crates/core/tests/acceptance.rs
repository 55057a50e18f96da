//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`) after asserting its stated tolerance.
//!
//! Run with: `cargo test -p grouptest --test acceptance -- --nocapture`

mod common;

use common::{exhaustive_recovery, shuffled_stacked_identity, witness_collides};
use grouptest::design::{design, DesignSpec, Strategy};
use grouptest::experiments::{
    minima_locus, sweep_design_surface, write_surface_csv, MatrixMode, SupportMode, TrialConfig,
};
use grouptest::{
    boolean_measure, distance_decode, is_disjunct, read_matrix, run_trials,
    sample_contact_matrix, z_channel_sample, ChannelParams, ConstructionParams, SamplingMatrix,
    SupportSet, TestOutcome,
};

const EXAMPLE_CONTACT: &str = "3 6\n101010\n010101\n011011\n";
const EXAMPLE_REALIZATION_A: &str = "3 6\n100010\n010101\n010011\n";
const EXAMPLE_REALIZATION_B: &str = "3 6\n101010\n010101\n011010\n";

fn temp_path(name: &str) -> std::path::PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("grouptest-acceptance-{}-{name}", std::process::id()));
    path
}

/// Criterion 1: the worked toy example round-trips through the file format
/// and both printed realizations reproduce the printed outcome with their
/// respective defective sets ({3,4} for the first, {4,6} for the second,
/// one-based).
#[test]
fn criterion_1_example_fidelity() {
    let contact_path = temp_path("contact.txt");
    std::fs::write(&contact_path, EXAMPLE_CONTACT).unwrap();
    let contact = read_matrix(&contact_path).unwrap();
    std::fs::remove_file(&contact_path).unwrap();
    assert_eq!((contact.rows(), contact.cols()), (3, 6));

    let expected = TestOutcome::parse("010").unwrap();

    let realization_a =
        SamplingMatrix::from_realization(&contact, grouptest::parse_matrix(EXAMPLE_REALIZATION_A).unwrap())
            .unwrap();
    let true_support = SupportSet::new(vec![2, 3], 2).unwrap();
    assert_eq!(
        boolean_measure(&realization_a, &true_support).unwrap(),
        expected
    );

    let realization_b =
        SamplingMatrix::from_realization(&contact, grouptest::parse_matrix(EXAMPLE_REALIZATION_B).unwrap())
            .unwrap();
    let alternative_support = SupportSet::new(vec![3, 5], 2).unwrap();
    assert_eq!(
        boolean_measure(&realization_b, &alternative_support).unwrap(),
        expected
    );

    // The zero-budget decoder on this outcome keeps exactly item 4.
    let decoded = distance_decode(&contact, &expected, 0).unwrap();
    assert_eq!(decoded.detected, vec![3]);

    println!("acceptance 1 (example fidelity): PASS");
}

/// Criterion 2: the solver at N=100000, K=10, p=0.8 reproduces the
/// published operating point (alpha ~ 0.44, e ~ 40, M ~ 3000) for at least
/// one reading of the 0.5 failure budget.
#[test]
fn criterion_2_operating_point() {
    let mut matched = None;
    for target in [0.5, 0.25] {
        let spec = DesignSpec::new(100_000, 10, 0.8, target, target, Strategy::PerInstance);
        let report = design(&spec).unwrap();
        let point = report.chosen.expect("design must be feasible");
        let alpha_ok = (point.alpha - 0.44).abs() <= 0.05;
        let e_ok = (point.error_param - 40.0).abs() <= 5.0;
        let m_ok = (point.tests as f64 - 3000.0).abs() <= 0.15 * 3000.0;
        println!(
            "  targets pf1=pf2={target}: M={} alpha={:.2} e={:.2} ({})",
            point.tests,
            point.alpha,
            point.error_param,
            if alpha_ok && e_ok && m_ok { "match" } else { "no match" }
        );
        if alpha_ok && e_ok && m_ok && matched.is_none() {
            matched = Some(target);
        }
    }
    let target = matched.expect("no failure-budget interpretation reproduced the operating point");
    println!("acceptance 2 (operating point, targets = {target}): PASS");
}

/// Collapse runs of nearly equal values into plateaus. Each value is
/// compared against its plateau's representative, so drift within a run is
/// bounded by the tolerance.
fn merge_plateaus(values: &[u64], rel_tol: f64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &v in values {
        match out.last() {
            Some(&rep) if (v as f64 - rep as f64).abs() <= rel_tol * rep as f64 => {}
            _ => out.push(v),
        }
    }
    out
}

/// Single valley up to discretization noise: the delta scan accepts the
/// first grid point past the overflow-budget crossing, so neighboring alpha
/// cells can land on opposite sides of a delta step, wobbling M by a
/// fraction of a percent near the flat valley floor. A genuine second
/// valley would be far deeper than the 1% plateau tolerance.
fn is_unimodal(values: &[u64]) -> bool {
    let seq = merge_plateaus(values, 0.01);
    let mut rising = false;
    for pair in seq.windows(2) {
        if pair[1] > pair[0] {
            rising = true;
        } else if rising {
            return false;
        }
    }
    true
}

/// Criterion 3: strict 0.001 budgets give a feasible self-consistent
/// design, and the emitted (alpha, p) surface has a single valley per p.
#[test]
fn criterion_3_design_targets_and_surface() {
    let spec = DesignSpec::new(100_000, 10, 0.8, 0.001, 0.001, Strategy::PerInstance);
    let report = design(&spec).unwrap();
    assert!(report.feasible);
    let point = report.chosen.unwrap();
    assert!(
        point.predicted_pf1 <= 0.001 && point.predicted_pf2 <= 0.001,
        "resubstitution violated: pf1 = {}, pf2 = {}",
        point.predicted_pf1,
        point.predicted_pf2
    );

    let activations: Vec<f64> = (6..=20).map(|i| i as f64 * 0.05).collect();
    let cells = sweep_design_surface(&spec, &activations).unwrap();

    let csv_path = temp_path("surface.csv");
    let mut file = std::fs::File::create(&csv_path).unwrap();
    write_surface_csv(&mut file, &cells).unwrap();
    let written = std::fs::metadata(&csv_path).unwrap().len();
    assert!(written > 0);

    for &p in &activations {
        let tests: Vec<u64> = cells
            .iter()
            .filter(|c| c.activation == p)
            .filter_map(|c| c.result.as_ref().map(|r| r.tests))
            .collect();
        assert!(!tests.is_empty(), "no feasible cell at p = {p}");
        assert!(is_unimodal(&tests), "double valley at p = {p}: {tests:?}");
    }
    let locus = minima_locus(&cells);
    assert_eq!(locus.len(), activations.len());

    println!(
        "acceptance 3 (0.001 targets + unimodal surface, CSV at {}): PASS",
        csv_path.display()
    );
}

/// Criterion 4: Monte Carlo at the published operating point recovers the
/// support well above the designed 0.5 failure rate.
#[test]
fn criterion_4_monte_carlo_at_operating_point() {
    let cfg = TrialConfig {
        population: 100_000,
        sparsity: 10,
        activation: 0.8,
        tests: 3000,
        alpha: 0.44,
        decoder_threshold: 40,
        trials: 200,
        master_seed: 20260808,
        support_mode: SupportMode::RandomPerTrial,
        matrix_mode: MatrixMode::FreshPerTrial,
    };
    let report = run_trials(&cfg).unwrap();
    let sigma = (report.success_rate * (1.0 - report.success_rate) / report.trials as f64).sqrt();
    assert!(
        report.success_rate - 3.0 * sigma > 0.5,
        "rate {} - 3 sigma {} not above 0.5",
        report.success_rate,
        3.0 * sigma
    );
    println!(
        "acceptance 4 (Monte Carlo at operating point): PASS \
         (rate {:.3}, CI [{:.3}, {:.3}], {} trials in {:.1}s)",
        report.success_rate,
        report.ci_low,
        report.ci_high,
        report.trials,
        report.wall.as_secs_f64()
    );
}

/// Criterion 5: over 50 seeded desk-scale matrices, every disjunct instance
/// decodes every sparse support under every legal flip pattern, and every
/// witness produces a genuine outcome collision.
#[test]
fn criterion_5_oracle_equivalence() {
    let mut forward_checks = 0usize;
    let mut forward_cases = 0usize;
    let mut collisions = 0usize;

    for seed in 0..50u64 {
        // Mix random draws with shuffled stacked identities; purely random
        // desk-scale matrices are almost never disjunct, and the forward
        // direction must not be vacuous.
        let matrix = if seed % 5 == 4 {
            shuffled_stacked_identity(4 + (seed % 2) as usize, 2, seed)
        } else {
            sample_contact_matrix(&ConstructionParams {
                rows: 6 + (seed % 5) as usize,
                cols: 8 + (seed % 5) as usize,
                density: [0.25, 0.35, 0.5][(seed % 3) as usize],
                seed,
            })
            .unwrap()
        };

        for threshold in 0..=2usize {
            let report = is_disjunct(&matrix, 2, threshold).unwrap();
            match report.witness {
                None => {
                    assert!(report.is_disjunct);
                    let cases = exhaustive_recovery(&matrix, 2, threshold)
                        .unwrap_or_else(|msg| panic!("seed {seed}, e = {threshold}: {msg}"));
                    forward_checks += 1;
                    forward_cases += cases;
                }
                Some(witness) => {
                    assert!(witness.verify(&matrix, threshold));
                    assert!(
                        witness_collides(&matrix, &witness, threshold),
                        "seed {seed}, e = {threshold}: no collision"
                    );
                    collisions += 1;
                }
            }
        }
    }

    assert!(forward_checks > 0, "no disjunct instance was exercised");
    assert!(collisions > 0, "no witness was exercised");
    println!(
        "acceptance 5 (oracle equivalence): PASS \
         ({forward_checks} disjunct instances, {forward_cases} exhaustive cases, \
         {collisions} witness collisions, zero exceptions)"
    );
}

/// Criterion 6: designed test counts fall with the activation probability,
/// grow affinely in log N (within 20%), and the universal strategy never
/// beats per-instance.
#[test]
fn criterion_6_scaling() {
    let populations = [1_000usize, 10_000, 100_000];
    let activations = [0.5, 0.7, 0.9];
    let mut per_instance = std::collections::BTreeMap::new();
    let mut universal = std::collections::BTreeMap::new();

    for &n in &populations {
        for &p in &activations {
            let spec = DesignSpec::new(n, 10, p, 0.001, 0.001, Strategy::PerInstance);
            let pi = design(&spec).unwrap().chosen.expect("feasible");
            let mut spec_u = spec.clone();
            spec_u.strategy = Strategy::Universal;
            let un = design(&spec_u).unwrap().chosen.expect("feasible");
            assert!(
                un.tests >= pi.tests,
                "universal beat per-instance at N = {n}, p = {p}"
            );
            per_instance.insert((n, (p * 10.0) as u32), pi.tests);
            universal.insert((n, (p * 10.0) as u32), un.tests);
        }
    }

    for &n in &populations {
        let mut last = u64::MAX;
        for &p in &activations {
            let m = per_instance[&(n, (p * 10.0) as u32)];
            assert!(m <= last, "M increased in p at N = {n}");
            last = m;
        }
    }

    for &p in &activations {
        let key = (p * 10.0) as u32;
        let d1 = per_instance[&(10_000, key)] as f64 - per_instance[&(1_000, key)] as f64;
        let d2 = per_instance[&(100_000, key)] as f64 - per_instance[&(10_000, key)] as f64;
        let ratio = d2 / d1;
        assert!(
            (0.8..=1.2).contains(&ratio),
            "log-N increments at p = {p} differ by more than 20%: {ratio}"
        );
    }

    println!("acceptance 6 (scaling shape): PASS");
}

/// Criterion 7: channel survival counts pass a 3-sigma binomial test at
/// p = 0.2 and p = 0.8 over a 10'000-entry matrix.
#[test]
fn criterion_7_channel_statistics() {
    let matrix = sample_contact_matrix(&ConstructionParams {
        rows: 100,
        cols: 100,
        density: 1.0,
        seed: 0,
    })
    .unwrap();
    assert_eq!(matrix.total_ones(), 10_000);

    for (p, lo, hi) in [(0.8, 7880, 8120), (0.2, 1880, 2120)] {
        let sampled =
            z_channel_sample(&matrix, &ChannelParams::new(p, 424242).unwrap()).unwrap();
        let survived = sampled.matrix().total_ones();
        assert!(
            (lo..=hi).contains(&survived),
            "p = {p}: survived {survived} outside [{lo}, {hi}]"
        );
    }
    println!("acceptance 7 (channel statistics): PASS");
}
