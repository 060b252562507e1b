use eppm_core::analysis::{union_bound_generic, SchemeSpec};
use eppm_core::constellation::{build_aeppm, build_eppm, distance_profile, label_bits, Constellation};
use eppm_core::design::{cyclic_design_for_length, qr_difference_set, verify_difference_set};
use eppm_core::transceiver::{cyclic_correlations, decision_statistics, demodulate, SlotFrame};
use proptest::prelude::*;

fn codebook(max_q: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (2usize..=max_q, 2usize..=12).prop_flat_map(|(q, m)| prop::collection::vec(prop::collection::vec(0u8..=1, q), m))
}

fn square_codebook() -> impl Strategy<Value = Vec<Vec<u8>>> {
    (2usize..=16).prop_flat_map(|q| prop::collection::vec(prop::collection::vec(0u8..=1, q), q))
}

fn direct_dot(x: &[f64], cw: &[u8]) -> f64 {
    x.iter().zip(cw).map(|(a, &b)| a * b as f64).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn distance_sum_identity(words in codebook(20)) {
        let c = Constellation::from_codewords(words).unwrap();
        let p = distance_profile(&c);
        // brute-force pair sum, independent of the profile's spectrum
        let mut d = 0i128;
        for i in 0..c.m() {
            for j in 0..c.m() {
                d += c.codeword(i).iter().zip(c.codeword(j)).filter(|(a, b)| a != b).count() as i128;
            }
        }
        prop_assert_eq!(p.pair_sum as i128, d);
        prop_assert_eq!(p.column_identity(), d);
        prop_assert!(p.cauchy_bound_holds());
    }

    #[test]
    fn square_codebooks_meet_the_q_form(words in square_codebook()) {
        // With M = q rows: D = 2(qA − ΣW²) and D ≤ 2A(q − A/q).
        let c = Constellation::from_codewords(words).unwrap();
        let p = distance_profile(&c);
        let q = c.q() as i128;
        let a = p.a_total as i128;
        let sq: i128 = p.column_weights.iter().map(|&w| (w * w) as i128).sum();
        prop_assert_eq!(p.pair_sum as i128, 2 * (q * a - sq));
        prop_assert!(q * (p.pair_sum as i128) <= 2 * a * (q * q - a));
    }

    #[test]
    fn differential_argmax_equals_plain_correlation(
        q_idx in 0usize..4,
        x in prop::collection::vec(-3.0f64..3.0, 19),
    ) {
        let q = [7usize, 11, 15, 19][q_idx];
        let c = build_eppm(&cyclic_design_for_length(q).unwrap().expand());
        let frame = SlotFrame::new(x[..q].to_vec());
        let stats = decision_statistics(&frame, &c).unwrap();
        let total: f64 = frame.amplitudes.iter().sum();
        let g = stats.gamma_weight;
        for j in 0..q {
            let corr = direct_dot(&frame.amplitudes, c.codeword(j));
            prop_assert!((stats.z[j] - ((1.0 + g) * corr - g * total)).abs() < 1e-9);
        }
        let plain = (0..q).map(|j| direct_dot(&frame.amplitudes, c.codeword(j)))
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best });
        let diff = stats.z.iter().copied().enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best });
        prop_assert_eq!(plain.0, diff.0);
    }

    #[test]
    fn cyclic_statistics_match_direct_on_integers(x in prop::collection::vec(-20i32..20, 11)) {
        let c = build_aeppm(&qr_difference_set(11).unwrap().expand());
        let frame = SlotFrame::new(x.iter().map(|&v| v as f64).collect());
        let corr = cyclic_correlations(&frame, &c).unwrap();
        let stats = decision_statistics(&frame, &c).unwrap();
        let total: f64 = frame.amplitudes.iter().sum();
        for j in 0..11 {
            prop_assert_eq!(corr[j], direct_dot(&frame.amplitudes, c.codeword(j)));
            let comp = direct_dot(&frame.amplitudes, c.codeword(11 + j));
            prop_assert_eq!(comp, total - corr[j]);
            prop_assert!((stats.z[j] - (corr[j] - 2.0 / 3.0 * comp)).abs() < 1e-12);
        }
    }

    #[test]
    fn mapping_is_a_bijection(q_idx in 0usize..5, aug in any::<bool>()) {
        let q = [7usize, 11, 15, 19, 23][q_idx];
        let m = cyclic_design_for_length(q).unwrap().expand();
        let c = if aug { build_aeppm(&m) } else { build_eppm(&m) };
        let b = c.bits_per_symbol();
        let mut seen = vec![false; c.m()];
        for label in 0..(1usize << b) {
            let bits = label_bits(label, b);
            let idx = c.map_bits(&bits).unwrap();
            prop_assert!(!seen[idx]);
            seen[idx] = true;
            prop_assert_eq!(c.unmap_symbol(idx).unwrap(), bits);
        }
    }

    #[test]
    fn qr_sets_verify(i in 0usize..12) {
        let q = [7usize, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83][i];
        let ds = qr_difference_set(q).unwrap();
        let p = ds.params();
        prop_assert!(verify_difference_set(q, p.k(), p.lambda(), ds.residues()).passed());
        prop_assert_eq!(p.lambda() * (q - 1), p.k() * (p.k() - 1));
    }
}

#[test]
fn specialized_bounds_agree_with_generic() {
    let cases = [
        SchemeSpec::Ppm { q: 8 },
        SchemeSpec::Ppm { q: 64 },
        SchemeSpec::mppm(12, 2, Some(64)).unwrap(),
        SchemeSpec::mppm(8, 4, None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(7).unwrap().params(), None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(11).unwrap().params(), None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(67).unwrap().params(), Some(64)).unwrap(),
        SchemeSpec::aeppm(cyclic_design_for_length(11).unwrap().params(), None).unwrap(),
        SchemeSpec::Ook,
    ];
    for spec in cases {
        let c = spec.build(None).unwrap();
        for db in [-5.0, 0.0, 5.0, 10.0, 15.0] {
            let g = 10f64.powf(db / 10.0);
            let (a, b) = (spec.ser_bound(g), union_bound_generic(&c, g));
            assert!(((a - b) / b).abs() < 1e-12, "{spec} at {db} dB: {a} vs {b}");
        }
    }
}

#[test]
fn noiseless_round_trip_every_scheme() {
    let specs = [
        SchemeSpec::Ppm { q: 8 },
        SchemeSpec::Ppm { q: 5 },
        SchemeSpec::mppm(12, 2, Some(64)).unwrap(),
        SchemeSpec::mppm(9, 4, None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(7).unwrap().params(), None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(15).unwrap().params(), None).unwrap(),
        SchemeSpec::eppm(cyclic_design_for_length(19).unwrap().params(), None).unwrap(),
        SchemeSpec::aeppm(cyclic_design_for_length(7).unwrap().params(), None).unwrap(),
        SchemeSpec::aeppm(cyclic_design_for_length(19).unwrap().params(), None).unwrap(),
        SchemeSpec::Ook,
    ];
    for spec in specs {
        let c = spec.build(None).unwrap();
        for &i in c.mapped_indices() {
            let x = SlotFrame::new(c.codeword(i).iter().map(|&b| b as f64).collect());
            assert_eq!(demodulate(&x, &c), i, "{spec}");
        }
    }
}
