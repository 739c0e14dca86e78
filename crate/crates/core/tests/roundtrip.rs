use symdis_core::experiments::{decode_accuracy, random_objects};
use symdis_core::{
    bind, build_memory, cosine, decode_factor, decode_object, encode_object, sample_seed,
    FactorSchema, ItemMemory, SpaceConfig, SymbolicObject,
};

const D: usize = 1024;

fn memory() -> ItemMemory {
    build_memory(&FactorSchema::dsprites(), SpaceConfig::new(D, 31).unwrap())
}

#[test]
fn encoding_is_closest_to_its_own_bindings() {
    let m = memory();
    for obj in random_objects(m.schema(), 1000, 8) {
        let o = encode_object(&obj, &m).unwrap();
        for (i, &v) in obj.values.iter().enumerate() {
            let own = cosine(&o, m.bound_pair(i, v).unwrap()).unwrap();
            for w in (0..m.schema().factors()[i].cardinality).filter(|&w| w != v) {
                assert!(own > cosine(&o, m.bound_pair(i, w).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn dsprites_round_trip_accuracy() {
    let m = memory();
    let report = decode_accuracy(&m, 10_000, 0.0, 12).unwrap();
    for (i, acc) in report.per_factor.iter().enumerate() {
        assert!(*acc >= 0.999, "factor {i}: {acc}");
    }
}

#[test]
fn single_factor_schema_recovers_exactly() {
    let schema = FactorSchema::new([("colour", 16)]).unwrap();
    let m = build_memory(&schema, SpaceConfig::new(D, 4).unwrap());
    for v in 0..16 {
        let o = encode_object(&SymbolicObject::new(vec![v]), &m).unwrap();
        let (got, sim) = decode_factor(&o, 0, &m).unwrap();
        assert_eq!(got, v);
        // a lone binding decodes at ~1/√2 similarity (involution inverse)
        assert!(sim > 0.6, "{sim}");
    }
}

#[test]
fn pure_noise_decodes_with_low_similarity() {
    let m = memory();
    for t in 0..500u64 {
        let noise = sample_seed(m.space(), 1_000_000 + t);
        let (_, sim) = decode_factor(&noise, 2, &m).unwrap();
        assert!(sim.abs() <= 0.15, "{sim}");
    }
}

#[test]
fn reencoding_a_decoded_object_reproduces_the_code() {
    let m = memory();
    for obj in random_objects(m.schema(), 200, 3) {
        let o = encode_object(&obj, &m).unwrap();
        let again = encode_object(&decode_object(&o, &m).unwrap(), &m).unwrap();
        assert!(cosine(&o, &again).unwrap() >= 0.999);
    }
}

#[test]
fn accuracy_degrades_monotonically_with_noise() {
    let m = memory();
    let unit = 1.0 / (D as f64).sqrt();
    let accs: Vec<f64> = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|k| decode_accuracy(&m, 2000, k * unit, 5).unwrap().accuracy)
        .collect();
    assert_eq!(accs[0], 1.0);
    assert!(accs.windows(2).all(|w| w[1] <= w[0]), "{accs:?}");
    assert!(accs[5] < accs[0], "{accs:?}");
}

#[test]
fn encode_is_bit_identical_across_calls() {
    let m = memory();
    let obj = SymbolicObject::new(vec![2, 5, 39, 31, 0]);
    let a = encode_object(&obj, &m).unwrap();
    let b = encode_object(&obj, &build_memory(m.schema(), m.space())).unwrap();
    assert_eq!(a, b);
    // single factor: plain binding
    let schema = FactorSchema::new([("x", 3)]).unwrap();
    let m1 = build_memory(&schema, SpaceConfig::new(64, 0).unwrap());
    assert_eq!(
        encode_object(&SymbolicObject::new(vec![1]), &m1).unwrap(),
        bind(m1.role(0).unwrap(), m1.filler(0, 1).unwrap()).unwrap()
    );
}
