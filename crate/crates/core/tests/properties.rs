use campus_ar_core::qrcode::{block_shape, decode_symbol, encode_symbol, rs_correct, rs_encode};
use campus_ar_core::sqlgen::{generate_ddl, render_spec_text};
use campus_ar_core::staffdir::{encode_payload, parse_payload};
use campus_ar_core::tablespec::{normalize_ocr_text, parse_table_text, validate};
use campus_ar_core::{testkit, DdlOptions, EcLevel, Symmetry};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

proptest! {
    #[test]
    fn normalize_is_idempotent(raw in "(?s)\\PC{0,80}") {
        let once = normalize_ocr_text(&raw);
        prop_assert_eq!(normalize_ocr_text(&once), once);
    }

    #[test]
    fn normalize_repairs_numeric_tokens(digits in "[0-9]{1,4}", junk in "[Ool]{1,3}") {
        let token = format!("{digits}{junk}");
        let fixed = normalize_ocr_text(&format!("Total Number {token}"));
        let expect: String = junk.chars().map(|c| if c == 'l' { '1' } else { '0' }).collect();
        prop_assert_eq!(fixed, format!("Total Number {digits}{expect}"));
    }

    #[test]
    fn generated_specs_are_valid(seed: u64) {
        let spec = testkit::table_spec(&mut StdRng::seed_from_u64(seed));
        prop_assert!(validate(&spec).is_empty(), "{:?}", validate(&spec));
    }

    #[test]
    fn render_parse_round_trip(seed: u64) {
        let spec = testkit::table_spec(&mut StdRng::seed_from_u64(seed));
        let text = render_spec_text(&spec).unwrap();
        let parsed = parse_table_text("generated", &text).unwrap();
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(render_spec_text(&parsed).unwrap(), text);
    }

    #[test]
    fn ddl_has_one_line_per_column(seed: u64) {
        let spec = testkit::table_spec(&mut StdRng::seed_from_u64(seed));
        let ddl = generate_ddl(&spec, &DdlOptions::default()).unwrap();
        prop_assert_eq!(ddl.lines().count(), spec.columns.len() + 2);
        let checks = spec.columns.iter().filter(|c| c.constraint.is_check()).count();
        prop_assert_eq!(ddl.matches(" constraint ").count(), checks);
    }

    #[test]
    fn payload_round_trip(seed: u64) {
        let p = testkit::staff_payload(&mut StdRng::seed_from_u64(seed));
        let s = encode_payload(&p).unwrap();
        prop_assert_eq!(parse_payload(&s).unwrap(), p);
    }

    #[test]
    fn rs_corrects_up_to_t_errors(
        seed: u64,
        ec_len in prop::sample::select(vec![7usize, 10, 15, 16, 26]),
        data_len in 1usize..60,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data: Vec<u8> = (0..data_len).map(|_| rng.gen()).collect();
        let mut cw = data.clone();
        cw.extend(rs_encode(&data, ec_len).unwrap());
        let e = rng.gen_range(0..=ec_len / 2);
        for i in sample(&mut rng, cw.len(), e) {
            cw[i] ^= rng.gen_range(1..=255u8);
        }
        let (fixed, corrected) = rs_correct(&cw, ec_len).unwrap();
        prop_assert_eq!(fixed, data);
        prop_assert_eq!(corrected, e);
    }

    #[test]
    fn qr_round_trip_any_orientation(
        payload in prop::collection::vec(any::<u8>(), 0..=53),
        level in prop::sample::select(EcLevel::ALL.to_vec()),
        sym in prop::sample::select(Symmetry::ALL.to_vec()),
    ) {
        match encode_symbol(&payload, level, None) {
            Ok((m, cfg)) => {
                let r = decode_symbol(&m.transformed(sym)).unwrap();
                prop_assert_eq!(r.payload, payload);
                prop_assert_eq!(r.config, cfg);
                prop_assert_eq!(r.orientation_applied, sym);
            }
            Err(e) => {
                let capacity = block_shape(3, level).unwrap().byte_capacity();
                prop_assert!(payload.len() > capacity, "{e}");
            }
        }
    }
}
