use bplab::blockgeom::{
    block_rotate, hurwitz_radon_family, random_rotation, section_frame, BlockVector, BodySpec, Gauge, NormTerm, Shape,
};
use bplab::counterexample::{PerturbationProfile, SymmetricTerm};
use bplab::integrate::Estimate;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn layout() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((1, 3)), Just((2, 2)), Just((2, 4)), Just((4, 2)), Just((8, 2))]
}

fn body_and_point() -> impl Strategy<Value = (BodySpec, Vec<f64>)> {
    layout().prop_flat_map(|(k, n)| {
        let shape = prop_oneof![
            (0.5..3.0f64).prop_map(|radius| Shape::EuclideanBall { radius }),
            (1.0..6.0f64).prop_map(|q| Shape::BlockQBall { q }),
            (prop::collection::vec(0.2..3.0f64, n), 1.0..5.0f64, 0.1..2.0f64).prop_map(move |(scales, q, w)| {
                Shape::BlockNormBody {
                    terms: vec![
                        NormTerm { weight: 1.0, q: 2.0, scales: vec![1.0; scales.len()] },
                        NormTerm { weight: w, q, scales },
                    ],
                }
            }),
        ];
        let point = prop::collection::vec(-2.0..2.0f64, k * n)
            .prop_filter("away from the origin", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-2);
        (shape.prop_map(move |s| BodySpec::new(k, n, s).unwrap()), point)
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gauge_is_positively_homogeneous((body, x) in body_and_point(), t in 0.01..50.0f64) {
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!(close(body.eval(&tx), t * body.eval(&x)));
    }

    #[test]
    fn gauge_is_even((body, x) in body_and_point()) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!(close(body.eval(&neg), body.eval(&x)));
        prop_assert!(body.eval(&x) > 0.0);
    }

    #[test]
    fn gauge_is_block_rotation_invariant((body, x) in body_and_point(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random_rotation(body.kappa, &mut rng);
        let v = BlockVector::new(x.clone(), body.kappa, body.n).unwrap();
        let r = block_rotate(&sigma, &v).unwrap();
        prop_assert!((body.eval(r.coords()) - body.eval(&x)).abs() <= 1e-9 * body.eval(&x));
    }

    #[test]
    fn gauge_satisfies_the_triangle_inequality((body, x) in body_and_point(), y in prop::collection::vec(-2.0..2.0f64, 16)) {
        let y = &y[..x.len()];
        let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert!(body.eval(&s) <= body.eval(&x) + body.eval(y) + 1e-12);
    }

    #[test]
    fn section_frames_are_orthonormal_and_contain_the_orbit(
        (k, n) in layout(),
        raw in prop::collection::vec(-1.0..1.0f64, 16),
    ) {
        let raw = &raw[..k * n];
        prop_assume!(raw.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let xi = BlockVector::new(raw.to_vec(), k, n).unwrap().normalized().unwrap();
        let family = hurwitz_radon_family(k).unwrap();
        let frame = section_frame(&xi, &family).unwrap();
        prop_assert!(frame.gram_defect() < 1e-12);
        prop_assert_eq!(frame.e_in.len(), k * n - k);
        for m in 0..k {
            let orbit = family.apply(m, xi.coords());
            for e in &frame.e_in {
                let d: f64 = orbit.iter().zip(e).map(|(a, b)| a * b).sum();
                prop_assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn z_distance_is_symmetric_and_scale_free(
        a in -1e3..1e3f64, b in -1e3..1e3f64, sa in 1e-3..10.0f64, sb in 1e-3..10.0f64, c in 0.1..10.0f64,
    ) {
        let ea = Estimate { value: a, std_error: sa, n_samples: 10, seed: 0, inconclusive: false };
        let eb = Estimate { value: b, std_error: sb, n_samples: 10, seed: 0, inconclusive: false };
        prop_assert!(close(ea.z_distance(&eb), eb.z_distance(&ea)));
        prop_assert!(close(ea.scaled(c).z_distance(&eb.scaled(c)), ea.z_distance(&eb)));
    }

    #[test]
    fn symmetric_profiles_survive_json_and_are_permutation_invariant(
        c1 in 0.0..2.0f64, c2 in 0.0..2.0f64, shares in prop::collection::vec(0.01..1.0f64, 4),
    ) {
        let profile = PerturbationProfile::symmetric(vec![
            SymmetricTerm { partition: vec![2], coefficient: c1 },
            SymmetricTerm { partition: vec![1, 1], coefficient: c2 },
        ]);
        let text = serde_json::to_string(&profile).unwrap();
        let back: PerturbationProfile = serde_json::from_str(&text).unwrap();
        let total: f64 = shares.iter().sum();
        let s: Vec<f64> = shares.iter().map(|v| v / total).collect();
        let mut rev = s.clone();
        rev.reverse();
        prop_assert!(close(back.eval_profile(&s), profile.eval_profile(&s)));
        prop_assert!(close(profile.eval_profile(&rev), profile.eval_profile(&s)));
    }
}

#[test]
fn unsupported_kappa_is_rejected_everywhere() {
    for k in [0usize, 3, 5, 6, 7, 9, 16] {
        assert!(hurwitz_radon_family(k).is_err());
        if k > 0 {
            assert!(matches!(BodySpec::ball(k, 2, 1.0), Err(bplab::Error::UnsupportedKappa(_))));
        }
    }
}
