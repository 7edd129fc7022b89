//! Walk sampling, same-class search, and the class-count estimator against
//! matrix-power and exhaustive-partition oracles.

mod common;

use common::{arc, chi_squared_uniform, contiguous_on_all, walk_total_oracle};
use contig_core::walk::uniform_noncollapsing_walk;
use contig_core::{
    closed_walk_count, estimate_class_count, exact_class_count, same_class_walk,
    uniform_closed_walk, StandardComplex, StepRule, WalkConfig, WalkOutcome,
};
use std::sync::Arc;

// 0.999 quantile of chi-squared with 8 degrees of freedom
const CHI2_8_P999: f64 = 26.1245;

#[test]
fn walk_totals_match_matrix_power_oracle() {
    for target in [
        arc(StandardComplex::Boundary(2).build().unwrap()),
        arc(StandardComplex::TorusT.build().unwrap()),
    ] {
        for k in 3..=9 {
            for reflexive in [true, false] {
                let got = closed_walk_count(&target, 0, k, reflexive).unwrap();
                let want = walk_total_oracle(&target, 0, k, reflexive);
                assert_eq!(got, want, "k {k} reflexive {reflexive}");
            }
        }
    }
}

#[test]
fn sampler_is_uniform_on_the_nine_walk_case() {
    let y = arc(StandardComplex::Boundary(2).build().unwrap());
    let mut observed = [0u64; 9];
    for seed in 0..9000 {
        let m = uniform_closed_walk(&y, 0, 3, seed).unwrap();
        let a = m.assignment();
        assert_eq!(a[0], 0);
        observed[a[1] * 3 + a[2]] += 1;
    }
    assert!(observed.iter().all(|&c| c > 0));
    let stat = chi_squared_uniform(&observed);
    assert!(
        stat < CHI2_8_P999,
        "chi-squared {stat} exceeds the p=0.001 critical value"
    );
}

#[test]
fn noncollapsing_samples_never_collapse_an_edge() {
    let t = arc(StandardComplex::TorusT.build().unwrap());
    for seed in 0..50 {
        let m = uniform_noncollapsing_walk(&t, 0, 8, seed).unwrap();
        let a = m.assignment();
        for i in 0..a.len() {
            assert_ne!(a[i], a[(i + 1) % a.len()], "seed {seed}");
        }
    }
}

#[test]
fn found_certificates_replay_under_the_oracle() {
    let y = arc(StandardComplex::Boundary(2).build().unwrap());
    let x = arc(StandardComplex::Circle(4).build().unwrap());
    let partition = exact_class_count(&x, &y, Some((0, 0)), 100_000).unwrap();
    let cfg = WalkConfig {
        max_iters: 50_000,
        seed: 21,
        based: Some(0),
        ..WalkConfig::default()
    };
    let mut found = 0usize;
    for class in partition.classes() {
        // walk between the extremes of one exhaustively known class
        let f = &partition.maps()[class[0]];
        let g = &partition.maps()[*class.last().unwrap()];
        match same_class_walk(f, g, &cfg).unwrap() {
            WalkOutcome::Found(cert) => {
                assert!(cert.verify(f, g));
                let steps = cert.steps().unwrap();
                let mut previous = f.assignment().to_vec();
                for step in &steps {
                    assert!(contiguous_on_all(&x, &y, &previous, step.assignment()));
                    previous = step.assignment().to_vec();
                }
                assert_eq!(previous, g.assignment());
                found += 1;
            }
            WalkOutcome::NotFound { .. } => {
                assert_eq!(class.len(), 1, "singleton classes trivially lack walks");
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn contiguous_steps_never_cross_oracle_classes() {
    let y = arc(StandardComplex::Boundary(2).build().unwrap());
    let partition = exact_class_count(&y, &y, Some((0, 0)), 100_000).unwrap();
    let cfg = WalkConfig {
        max_iters: 30_000,
        seed: 3,
        based: Some(0),
        ..WalkConfig::default()
    };
    for (i, f) in partition.maps().iter().enumerate() {
        for (j, g) in partition.maps().iter().enumerate().skip(i + 1) {
            let crossed = same_class_walk(f, g, &cfg).unwrap().is_found();
            if partition.class_of(i) != partition.class_of(j) {
                assert!(!crossed, "sound walk crossed distinct classes {i} {j}");
            }
        }
    }
}

#[test]
fn literal_steps_cross_where_sound_steps_cannot() {
    let y = arc(StandardComplex::Boundary(2).build().unwrap());
    let partition = exact_class_count(&y, &y, Some((0, 0)), 100_000).unwrap();
    let plus = partition
        .maps()
        .iter()
        .position(|m| m.assignment() == [0, 1, 2])
        .unwrap();
    let minus = partition
        .maps()
        .iter()
        .position(|m| m.assignment() == [0, 2, 1])
        .unwrap();
    assert_ne!(partition.class_of(plus), partition.class_of(minus));
    let literal = WalkConfig {
        max_iters: 30_000,
        seed: 9,
        based: Some(0),
        step_rule: StepRule::PaperLiteral,
        ..WalkConfig::default()
    };
    let outcome = same_class_walk(
        &partition.maps()[plus],
        &partition.maps()[minus],
        &literal,
    )
    .unwrap();
    match outcome {
        WalkOutcome::Found(cert) => {
            // the crossing is real but fails honest contiguity replay
            assert!(!cert.verify(&partition.maps()[plus], &partition.maps()[minus]));
        }
        WalkOutcome::NotFound { .. } => panic!("complete 1-skeleton admits a literal crossing"),
    }
}

#[test]
fn estimator_stabilizes_at_exhaustive_counts() {
    let cases: Vec<(Arc<_>, usize)> = vec![
        (arc(StandardComplex::Boundary(2).build().unwrap()), 3),
        (arc(StandardComplex::Boundary(2).build().unwrap()), 4),
        (arc(StandardComplex::TorusT.build().unwrap()), 3),
    ];
    for (y, k) in cases {
        let x = arc(StandardComplex::Circle(k).build().unwrap());
        let exact = exact_class_count(&x, &y, Some((0, 0)), 1_000_000)
            .unwrap()
            .class_count();
        let cfg = WalkConfig {
            max_iters: 100_000,
            seed: 17,
            ..WalkConfig::default()
        };
        let state = estimate_class_count(&y, k, &cfg, &[200, 2_000, 20_000], 1).unwrap();
        assert_eq!(state.class_count(), exact, "k {k}");
        assert!(state.stabilized);
        // catalog growth is monotone across rounds
        for pair in state.round_sizes.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
    }
}
