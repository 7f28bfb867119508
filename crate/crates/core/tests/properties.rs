use hankel_spectra::assembly::{assemble, structure_residuals};
use hankel_spectra::clark::{clark_measure, inner_from_measure, reflect_measure};
use hankel_spectra::hankel::{rank_one_identity_residual, rank_one_identity_residual_dense, HankelMatrix};
use hankel_spectra::linalg::{CMatrix, C64};
use hankel_spectra::sampling::{random_circle_measure, random_cyclic_data, random_multiplicity_data, SpectrumShape};
use hankel_spectra::schema::{self, decode_matrix, encode_matrix, SpectrumDoc};
use hankel_spectra::spectral_data::{borg_weights, perturbed_weights, validate_intertwining};
use hankel_spectra::Error;
use hankel_spectra::stability::stability_report;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex() -> impl Strategy<Value = C64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn shape() -> SpectrumShape {
    SpectrumShape { ratio: (0.5, 0.8), ..SpectrumShape::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alternating_split_interlaces(mut values in prop::collection::vec(0.01..100.0f64, 2..16)) {
        values.sort_by(|a, b| b.total_cmp(a));
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * *b);
        prop_assume!(values.len() % 2 == 0 && values.len() >= 2);
        let lambda: Vec<f64> = values.iter().step_by(2).copied().collect();
        let mu: Vec<f64> = values.iter().skip(1).step_by(2).copied().collect();
        let s = validate_intertwining(&lambda, &mu).unwrap();
        let a = borg_weights(&s).unwrap();
        prop_assert!(a.atoms().iter().all(|x| x.weight > 0.0));
        let b = perturbed_weights(&s).unwrap();
        prop_assert!(b.atoms().iter().all(|x| x.weight > 0.0));
        // swapping the top pair breaks interlacing
        prop_assert_eq!(validate_intertwining(&mu, &lambda).unwrap_err(), Error::NonInterlacing(0));
    }

    #[test]
    fn fft_product_matches_dense(gamma in prop::collection::vec(complex(), 1..260), cols in 1usize..4) {
        let n = gamma.len().div_ceil(2);
        let h = HankelMatrix::from_symbol(&gamma, n).unwrap();
        let x = CMatrix::from_fn(n, cols, |i, j| C64::new((i * 7 + j) as f64 % 3.0 - 1.0, (i + 2 * j) as f64 % 5.0 - 2.0));
        let dense = h.to_dense() * &x;
        let scale = dense.norm().max(1.0);
        prop_assert!((h.apply(&x) - dense).norm() <= 1e-12 * scale);
        let r = rank_one_identity_residual_dense(&h.to_dense());
        prop_assert!((rank_one_identity_residual(&h) - r).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn binary_codec_round_trips(rows in 0usize..6, cols in 0usize..6, seed in any::<u64>()) {
        let m = CMatrix::from_fn(rows, cols, |i, j| C64::new((seed as f64).sin() * i as f64, (j as f64).cos()));
        prop_assert_eq!(decode_matrix(&encode_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn spectrum_documents_round_trip(seed in any::<u64>(), n in 1usize..5, multiplicity in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = if multiplicity {
            random_multiplicity_data(&mut rng, n, 3, &shape())
        } else {
            random_cyclic_data(&mut rng, n, &shape())
        };
        let doc = SpectrumDoc::from_data(&d);
        let text = schema::emit(&doc);
        let parsed = schema::parse_spectrum(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(schema::emit(&parsed), text);
        prop_assert_eq!(parsed.to_data().unwrap(), d);
    }

    #[test]
    fn reflection_and_clark_degree(seed in any::<u64>(), atoms in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_circle_measure(&mut rng, atoms, 0.3);
        let r = reflect_measure(&m);
        prop_assert!((r.total_mass() - m.total_mass()).abs() == 0.0);
        prop_assert_eq!(reflect_measure(&r), m.clone());
        let t = inner_from_measure(&m).unwrap();
        prop_assert_eq!(t.degree(), atoms);
        prop_assert_eq!(clark_measure(&t).unwrap().len(), atoms);
        for k in 0..100 {
            let xi = C64::from_polar(1.0, 0.0628 * k as f64 + 0.01);
            prop_assert!((t.eval(xi).norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn bundles_are_contractive_and_stable(seed in any::<u64>(), n in 1usize..6, multiplicity in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = if multiplicity {
            random_multiplicity_data(&mut rng, n, 3, &shape())
        } else {
            random_cyclic_data(&mut rng, n, &shape())
        };
        let b = assemble(&d).unwrap();
        let s = structure_residuals(&b).unwrap();
        prop_assert!(s.norm_a <= 1.0 + 1e-12);
        let r = stability_report(&b, 50);
        prop_assert!(r.decay_profile.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert!(r.intertwine_residual <= 1e-12);
        prop_assert!(r.cnu.pass() && r.stable());
        prop_assert!(r.q_h0_norm < 1.0 && r.q_complement_residual <= 1e-12);
    }
}
