//! End-to-end checks for the two map-space persistence pipelines: towers of
//! circle collapses (fixed codomain, refining domain) and Rips-graded map
//! spaces (fixed domain, growing codomain). Each pipeline is checked against
//! an exhaustive per-stage oracle that enumerates maps by odometer and
//! partitions them by the all-simplices contiguity test.

mod common;

use std::sync::Arc;

use contig_core::persistence::{circle_doubling_collapse, circle_step_collapse};
use contig_core::{
    persistent_contiguity_h0, persistent_subdivision_h0, Error, FiniteMetricSpace, SimplicialMap,
    StandardComplex,
};

fn circle(k: usize) -> Arc<contig_core::SimplicialComplex> {
    common::arc(StandardComplex::Circle(k).build().unwrap())
}

fn oracle_class_count(
    x: &contig_core::SimplicialComplex,
    y: &contig_core::SimplicialComplex,
    based: Option<(usize, usize)>,
) -> usize {
    let maps = common::enumerate_assignments_oracle(x, y, based);
    common::class_sizes_oracle(x, y, &maps).len()
}

/// Doubling the circle from 3 to 6 vertices makes room for two more winding
/// classes of based maps into the triangle boundary; nothing merges.
#[test]
fn doubling_tower_adds_winding_classes_without_deaths() {
    let stages = [circle(3), circle(6)];
    let y = common::arc(StandardComplex::Boundary(2).build().unwrap());
    let connecting = [circle_doubling_collapse(3).unwrap()];

    let barcode =
        persistent_subdivision_h0(&stages, &connecting, &y, Some((0, 0)), 100_000).unwrap();

    for (stage, x) in stages.iter().enumerate() {
        assert_eq!(
            barcode.alive_at(stage),
            oracle_class_count(x, &y, Some((0, 0))),
            "alive count at stage {stage}"
        );
    }

    let mut bars: Vec<(usize, Option<usize>)> =
        barcode.bars.iter().map(|b| (b.birth, b.death)).collect();
    bars.sort();
    assert_eq!(bars, vec![(0, None), (0, None), (0, None), (1, None), (1, None)]);
}

/// One-vertex collapses `S1_{k+1} -> S1_k` against the torus: the alive
/// count at each stage must equal the exhaustive class count of that stage's
/// map space.
#[test]
fn step_collapse_tower_alive_counts_match_exhaustive_per_stage() {
    let stages = [circle(3), circle(4), circle(5)];
    let y = common::arc(StandardComplex::TorusT.build().unwrap());
    let connecting = [circle_step_collapse(3).unwrap(), circle_step_collapse(4).unwrap()];

    let barcode =
        persistent_subdivision_h0(&stages, &connecting, &y, Some((0, 0)), 100_000).unwrap();

    for (stage, x) in stages.iter().enumerate() {
        assert_eq!(
            barcode.alive_at(stage),
            oracle_class_count(x, &y, Some((0, 0))),
            "alive count at stage {stage}"
        );
    }
}

#[test]
fn collapse_maps_preserve_base_and_cover_codomain() {
    for k in 3..=6 {
        let double = circle_doubling_collapse(k).unwrap();
        assert_eq!(double.domain().vertex_count(), 2 * k);
        assert_eq!(double.apply(0), 0);
        assert!(double.is_surjective_on_vertices());

        let step = circle_step_collapse(k).unwrap();
        assert_eq!(step.domain().vertex_count(), k + 1);
        assert_eq!(step.apply(0), 0);
        assert!(step.is_surjective_on_vertices());
    }
}

#[test]
fn subdivision_tower_rejects_bad_connecting_maps() {
    let y = common::arc(StandardComplex::Boundary(2).build().unwrap());

    // Constant self-map: simplicial but not vertex-surjective.
    let c3 = circle(3);
    let constant = SimplicialMap::new(Arc::clone(&c3), Arc::clone(&c3), vec![0, 0, 0]).unwrap();
    let err = persistent_subdivision_h0(
        &[Arc::clone(&c3), Arc::clone(&c3)],
        &[constant],
        &y,
        None,
        100_000,
    )
    .unwrap_err();
    assert!(matches!(err, Error::NotVertexSurjective(0)), "got {err:?}");

    // Rotation: surjective automorphism that moves the base vertex.
    let rotate = SimplicialMap::new(Arc::clone(&c3), Arc::clone(&c3), vec![1, 2, 0]).unwrap();
    let err = persistent_subdivision_h0(
        &[Arc::clone(&c3), Arc::clone(&c3)],
        &[rotate],
        &y,
        Some((0, 0)),
        100_000,
    )
    .unwrap_err();
    assert!(matches!(err, Error::BaseNotPreserved(0)), "got {err:?}");

    // Connecting map whose endpoints are not the listed stages.
    let err = persistent_subdivision_h0(
        &[circle(3), circle(5)],
        &[circle_step_collapse(3).unwrap()],
        &y,
        None,
        100_000,
    )
    .unwrap_err();
    assert!(matches!(err, Error::MixedComplexes), "got {err:?}");
}

/// Maps from a triangle circle into the Rips filtration of a regular
/// heptagon with its center. Reading the scale axis: disconnected points,
/// then the rim assembles (one rim class plus the isolated center), then the
/// center joins and everything is one class.
#[test]
fn heptagon_with_center_shows_three_connectivity_phases() {
    // Distance matrix with shared chord constants so equal distances are
    // bit-identical and the filtration sees exactly four positive grades.
    let chord = |steps: usize| 2.0 * (steps as f64 * std::f64::consts::PI / 7.0).sin();
    let mut rows = vec![vec![0.0; 8]; 8];
    for i in 0..7 {
        for j in 0..7 {
            if i != j {
                let steps = (i as i32 - j as i32).unsigned_abs() as usize;
                rows[i][j] = chord(steps.min(7 - steps));
            }
        }
        rows[i][7] = 1.0;
        rows[7][i] = 1.0;
    }
    let space = Arc::new(FiniteMetricSpace::from_matrix(&rows).unwrap());

    let z = circle(3);
    let barcode = persistent_contiguity_h0(&z, &space, None, None, 1_000_000).unwrap();

    // Grades: 0, rim edge, circumradius, then longer chords.
    assert_eq!(barcode.grades.len(), 5);
    assert_eq!(barcode.alive_at(0), 8);
    assert_eq!(barcode.alive_at(1), 2);
    for stage in 2..barcode.grades.len() {
        assert_eq!(barcode.alive_at(stage), 1, "alive count at stage {stage}");
    }

    let mut bars: Vec<(usize, Option<usize>)> =
        barcode.bars.iter().map(|b| (b.birth, b.death)).collect();
    bars.sort();
    let expected = vec![
        (0, None),
        (0, Some(1)),
        (0, Some(1)),
        (0, Some(1)),
        (0, Some(1)),
        (0, Some(1)),
        (0, Some(1)),
        (0, Some(2)),
    ];
    assert_eq!(bars, expected);
}

/// Metric-criterion pipeline versus honest per-stage complexes on a small
/// seeded cloud: for every Rips grade, the alive count must equal the class
/// count computed from the materialized stage complex.
#[test]
fn contiguity_pipeline_matches_per_stage_oracle_on_seeded_cloud() {
    let mut rng = common::rng(0x9e37);
    let points = common::random_cloud(&mut rng, 6, 2);
    let space = Arc::new(FiniteMetricSpace::from_points(&points).unwrap());

    let z = circle(3);
    let barcode = persistent_contiguity_h0(&z, &space, None, Some((0, 0)), 1_000_000).unwrap();

    // The pipeline decides contiguity metrically, i.e. inside the full Rips
    // complex.  Two maps' images of a domain edge span at most four target
    // vertices, so materializing cliques up to dimension three reproduces
    // exactly the simplices those checks consult.
    let oracle_dim = 2 * (z.dim().unwrap() + 1) - 1;
    let filt = contig_core::RipsFiltration::new(&space, oracle_dim);
    assert_eq!(barcode.grades.len(), filt.len());
    for stage in 0..filt.len() {
        let stage_complex = filt.complex_at(stage);
        assert_eq!(
            barcode.alive_at(stage),
            oracle_class_count(&z, &stage_complex, Some((0, 0))),
            "alive count at stage {stage}"
        );
    }
}

/// A stage window restricted to the middle of the filtration reports the
/// same alive counts as the corresponding stages of the full run.
#[test]
fn stage_window_agrees_with_full_filtration() {
    let mut rng = common::rng(0x517c);
    let points = common::random_cloud(&mut rng, 5, 2);
    let space = Arc::new(FiniteMetricSpace::from_points(&points).unwrap());
    let z = circle(3);

    let full = persistent_contiguity_h0(&z, &space, None, None, 1_000_000).unwrap();
    let stages = full.grades.len();
    assert!(stages >= 4, "cloud yields {stages} grades");
    let (lo, hi) = (1, stages - 2);
    let windowed =
        persistent_contiguity_h0(&z, &space, Some((lo, hi)), None, 1_000_000).unwrap();

    assert_eq!(windowed.grades.as_slice(), &full.grades[lo..=hi]);
    for (w, f) in (lo..=hi).enumerate() {
        assert_eq!(windowed.alive_at(w), full.alive_at(f), "window stage {w}");
    }

    let err = persistent_contiguity_h0(&z, &space, Some((2, stages + 3)), None, 1_000_000)
        .unwrap_err();
    assert!(matches!(err, Error::BadStageRange { .. }), "got {err:?}");
}
