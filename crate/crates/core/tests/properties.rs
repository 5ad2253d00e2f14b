use favardlab::fractal::{enumerate_level, per_node_slot};
use favardlab::interval::endpoint_hausdorff;
use favardlab::projection::{project_disks, projection_set_enumerated, projection_set_recursive};
use favardlab::verification::overlap_integral;
use favardlab::{FractalSpec, IntervalSet, RotationMode, RotationWord};
use proptest::prelude::*;

fn shared_case() -> impl Strategy<Value = (FractalSpec, Vec<f64>, f64)> {
    (3u32..=5, 1u32..=5).prop_flat_map(|(d, n)| {
        let spec = FractalSpec::new(d, n, RotationMode::SharedRotation).unwrap();
        let range = std::f64::consts::TAU / d as f64;
        (
            Just(spec),
            prop::collection::vec(0.0..range, n as usize),
            -10.0f64..10.0,
        )
    })
}

/// Canonical subset of `[-a, a]` from cut points in `[0, 1)`.
fn subset_of_interval(a: f64) -> impl Strategy<Value = IntervalSet<f64>> {
    prop::collection::vec(0.0f64..1.0, 0..24).prop_map(move |mut cuts| {
        cuts.sort_by(f64::total_cmp);
        let pts: Vec<f64> = cuts.iter().map(|u| -a + 2.0 * a * u).collect();
        IntervalSet::from_raw(pts.chunks_exact(2).map(|p| (p[0], p[1]))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn engines_agree((spec, angles, theta) in shared_case()) {
        let word = RotationWord::new(&spec, angles).unwrap();
        let rec = projection_set_recursive(&spec, &word, theta, 1 << 22).unwrap();
        let enu = projection_set_enumerated(&spec, &word, theta, 1 << 22).unwrap();
        prop_assert!((rec.set.measure() - enu.measure()).abs() <= 1e-12);
        prop_assert!(rec.set.is_canonical() && enu.is_canonical());
        prop_assert_eq!(rec.level_measures.len(), spec.generations() as usize);
        prop_assert_eq!(*rec.level_measures.last().unwrap(), rec.set.measure());
    }

    #[test]
    fn projections_are_nested((spec, angles, theta) in shared_case()) {
        let word = RotationWord::new(&spec, angles).unwrap();
        let mut prev = IntervalSet::single(-1.0, 1.0).unwrap();
        for level in 1..=spec.generations() {
            let disks = enumerate_level(&spec, &word, level, 1 << 22).unwrap();
            let set = project_disks(&disks, theta);
            prop_assert!(set.subset_of(&prev, 1e-12));
            prop_assert!(set.measure() <= prev.measure() + 1e-12);
            prev = set;
        }
    }

    #[test]
    fn per_node_with_level_constant_angles_is_shared((spec, angles, theta) in shared_case()) {
        let d = spec.degree();
        let per_node = FractalSpec::new(d, spec.generations(), RotationMode::PerNode).unwrap();
        let mut expanded = vec![0.0; per_node.word_len().unwrap()];
        for level in 1..=spec.generations() {
            for node in 0..(d as usize).pow(level - 1) {
                expanded[per_node_slot(d, level, node)] = angles[level as usize - 1];
            }
        }
        let shared_word = RotationWord::new(&spec, angles).unwrap();
        let node_word = RotationWord::new(&per_node, expanded).unwrap();
        let a = projection_set_enumerated(&spec, &shared_word, theta, 1 << 22).unwrap();
        let b = projection_set_enumerated(&per_node, &node_word, theta, 1 << 22).unwrap();
        prop_assert_eq!(endpoint_hausdorff(&a, &b), 0.0);
    }

    #[test]
    fn half_turn_reflects((spec, angles, theta) in shared_case()) {
        let word = RotationWord::new(&spec, angles).unwrap();
        let a = projection_set_recursive(&spec, &word, theta, 1 << 22).unwrap().set;
        let b = projection_set_recursive(&spec, &word, theta + std::f64::consts::PI, 1 << 22)
            .unwrap()
            .set;
        let mirrored =
            IntervalSet::from_raw(b.iter().map(|iv| (-iv.hi, -iv.lo))).unwrap();
        prop_assert!(endpoint_hausdorff(&a, &mirrored) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn overlap_bounds_quarter(set in subset_of_interval(0.25)) {
        let r = overlap_integral(&set, 0.25, 1024).unwrap();
        prop_assert!(r.lower_ok && r.upper_ok && r.vanishes_outside, "{r:?}");
        prop_assert!(r.coincides_at_quarter_turn);
    }

    #[test]
    fn overlap_bounds_fifth(set in subset_of_interval(0.2)) {
        let r = overlap_integral(&set, 0.2, 1024).unwrap();
        prop_assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn overlap_bounds_seventh(set in subset_of_interval(1.0 / 7.0)) {
        let r = overlap_integral(&set, 1.0 / 7.0, 1024).unwrap();
        prop_assert!(r.passed(), "{r:?}");
    }
}
