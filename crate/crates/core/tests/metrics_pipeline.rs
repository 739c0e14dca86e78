mod common;

use proptest::prelude::*;
use symdis_core::experiments::{metric_objects, run_metrics, ObjectSet};
use symdis_core::metrics::ProbeRow;
use symdis_core::{
    build_change_table, build_memory, dcm, dmm, ChangeTable, Error, FactorSchema, Image,
    ItemMemory, LatentUnitSpec, Pipeline, ProbePolicy, Reconstruction, RenderConfig, Result,
    SpaceConfig, SymbolicObject, TemplateClassifier,
};

use common::{dcm_from_csv, dmm_from_csv};

struct Fixture {
    cfg: RenderConfig,
    memory: ItemMemory,
    clf: TemplateClassifier,
}

fn fixture() -> Fixture {
    let cfg = RenderConfig::metric();
    Fixture {
        memory: build_memory(&cfg.schema, SpaceConfig::new(1024, 11).unwrap()),
        clf: TemplateClassifier::new(cfg.clone()),
        cfg,
    }
}

fn with_value(o: &SymbolicObject, p: usize, v: usize) -> SymbolicObject {
    let mut out = o.clone();
    out.values[p] = v;
    out
}

fn xor(a: &SymbolicObject, b: &SymbolicObject) -> Vec<u8> {
    a.values.iter().zip(&b.values).map(|(x, y)| u8::from(x != y)).collect()
}

/// Expected DCM from the renderer's symmetry table alone.
fn oracle_dcm(cfg: &RenderConfig, objects: &[SymbolicObject], skip_identical: bool) -> f64 {
    let mut groups = Vec::new();
    for o in objects {
        let base = cfg.canonicalize(o);
        for (p, f) in cfg.schema.factors().iter().enumerate() {
            let scores: Vec<f64> = (0..f.cardinality)
                .map(|v| cfg.canonicalize(&with_value(o, p, v)))
                .filter(|probe| !(skip_identical && *probe == base))
                .map(|probe| {
                    let flips = xor(&base, &probe).iter().map(|&b| b as f64).sum::<f64>();
                    (flips - 1.0).abs()
                })
                .collect();
            if !scores.is_empty() {
                groups.push(scores.iter().sum::<f64>() / scores.len() as f64);
            }
        }
    }
    groups.iter().sum::<f64>() / groups.len() as f64
}

#[test]
fn ideal_rows_match_the_symmetry_table() {
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 40, ObjectSet::Random, 5);
    let (table, _) = run_metrics(
        &fx.memory,
        &fx.clf,
        Reconstruction::Faithful,
        &objects,
        ProbePolicy::All,
        serde_json::Value::Null,
    )
    .unwrap();
    assert_eq!(table.rows.len(), 40 * (3 + 4 + 8 + 8 + 8));
    for r in &table.rows {
        let o = &objects[r.object];
        assert_eq!(table.baselines[r.object], fx.cfg.canonicalize(o));
        let want = xor(
            &fx.cfg.canonicalize(o),
            &fx.cfg.canonicalize(&with_value(o, r.unit, r.value)),
        );
        assert_eq!(r.changed, want, "{r:?}");
        if r.value == o.values[r.unit] {
            assert!(r.changed.iter().all(|&c| c == 0));
        }
        // only the probed column moves, except the orientation reading a
        // shape probe drags along
        for (i, &c) in r.changed.iter().enumerate() {
            if i != r.unit && !(r.unit == fx.cfg.layout.shape && i == fx.cfg.layout.orientation) {
                assert_eq!(c, 0, "{r:?}");
            }
        }
    }
}

#[test]
fn ideal_dcm_is_zero_on_class_distinct_probes() {
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 60, ObjectSet::SymmetrySafe, 8);
    let (table, report) = run_metrics(
        &fx.memory,
        &fx.clf,
        Reconstruction::Faithful,
        &objects,
        ProbePolicy::SkipIdenticalReconstruction,
        serde_json::Value::Null,
    )
    .unwrap();
    assert!(table.rows.iter().all(|r| r.flips() == 1));
    assert_eq!(report.dcm, 0.0);
    assert_eq!(oracle_dcm(&fx.cfg, &objects, true), 0.0);
}

#[test]
fn ideal_dcm_equals_the_symmetry_table_value() {
    let fx = fixture();
    for (set, policy) in [
        (ObjectSet::SymmetrySafe, ProbePolicy::All),
        (ObjectSet::Random, ProbePolicy::All),
        (ObjectSet::Random, ProbePolicy::SkipIdenticalReconstruction),
    ] {
        let objects = metric_objects(&fx.cfg, 30, set, 21);
        let (_, report) = run_metrics(
            &fx.memory,
            &fx.clf,
            Reconstruction::Faithful,
            &objects,
            policy,
            serde_json::Value::Null,
        )
        .unwrap();
        let want = oracle_dcm(&fx.cfg, &objects, policy == ProbePolicy::SkipIdenticalReconstruction);
        assert!((report.dcm - want).abs() < 1e-12, "{set:?} {policy:?}: {} vs {want}", report.dcm);
    }
}

#[test]
fn safe_objects_with_all_probes_score_the_identical_fraction() {
    // every factor has exactly one class-identical probe (the unchanged
    // value) plus orientation aliases, so DCM is that fraction
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 30, ObjectSet::SymmetrySafe, 2);
    let (table, report) = run_metrics(
        &fx.memory,
        &fx.clf,
        Reconstruction::Faithful,
        &objects,
        ProbePolicy::All,
        serde_json::Value::Null,
    )
    .unwrap();
    let mut fractions = Vec::new();
    for rows in table.groups().values() {
        let identical = rows.iter().filter(|r| r.flips() == 0).count();
        assert!(rows.iter().all(|r| r.flips() <= 1));
        fractions.push(identical as f64 / rows.len() as f64);
    }
    let want = fractions.iter().sum::<f64>() / fractions.len() as f64;
    assert!((report.dcm - want).abs() < 1e-12);
}

#[test]
fn scrambling_separates_the_pipelines() {
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 30, ObjectSet::SymmetrySafe, 4);
    for policy in [ProbePolicy::All, ProbePolicy::SkipIdenticalReconstruction] {
        let run = |r| {
            run_metrics(&fx.memory, &fx.clf, r, &objects, policy, serde_json::Value::Null)
                .unwrap()
        };
        let (_, ideal) = run(Reconstruction::Faithful);
        let (table, scrambled) = run(Reconstruction::Scrambled);
        assert!(scrambled.dcm > ideal.dcm, "{policy:?}");
        assert!(scrambled.dcm >= 1.0, "{policy:?}: {}", scrambled.dcm);
        assert!(table.rows.iter().any(|r| r.flips() > 1));
        assert!(scrambled.dmm > ideal.dmm);
    }
}

#[test]
fn reports_are_deterministic() {
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 20, ObjectSet::Random, 9);
    let run = || {
        let (t, r) = run_metrics(
            &fx.memory,
            &fx.clf,
            Reconstruction::Faithful,
            &objects,
            ProbePolicy::All,
            serde_json::json!({"seed": 9}),
        )
        .unwrap();
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        (serde_json::to_string(&r).unwrap(), csv)
    };
    assert_eq!(run(), run());
}

#[test]
fn metrics_match_the_csv_oracle() {
    let fx = fixture();
    let objects = metric_objects(&fx.cfg, 25, ObjectSet::Random, 13);
    for reconstruction in [Reconstruction::Faithful, Reconstruction::Scrambled] {
        let (table, report) = run_metrics(
            &fx.memory,
            &fx.clf,
            reconstruction,
            &objects,
            ProbePolicy::All,
            serde_json::Value::Null,
        )
        .unwrap();
        let mut csv = Vec::new();
        table.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!((report.dmm - dmm_from_csv(&csv)).abs() <= 1e-6);
        assert!((report.dcm - dcm_from_csv(&csv)).abs() <= 1e-6);
    }
}

struct Failing;

impl Pipeline for Failing {
    type Latent = SymbolicObject;

    fn encode(&self, obj: &SymbolicObject) -> Result<SymbolicObject> {
        Ok(obj.clone())
    }

    fn modify(&self, latent: &SymbolicObject, unit: usize, value: usize) -> Result<SymbolicObject> {
        if unit == 2 && value == 3 {
            return Err(Error::DegenerateVector);
        }
        Ok(with_value(latent, unit, value))
    }

    fn reconstruct(&self, _: &SymbolicObject) -> Result<Image> {
        Ok(Image::blank(4, 4))
    }

    fn classify(&self, _: &Image) -> Result<SymbolicObject> {
        Ok(SymbolicObject::new(vec![0; 5]))
    }
}

#[test]
fn probe_failures_carry_their_coordinates() {
    let schema = FactorSchema::metric();
    let objects = vec![SymbolicObject::new(vec![0; 5])];
    let err = build_change_table(
        &Failing,
        &schema,
        &objects,
        &LatentUnitSpec::filler_units(&schema),
        ProbePolicy::All,
    )
    .unwrap_err();
    match err {
        Error::Probe { object, unit, value, source } => {
            assert_eq!((object, unit, value), (0, Some(2), Some(3)));
            assert!(matches!(*source, Error::DegenerateVector));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn empty_tables_are_rejected() {
    let t = ChangeTable { factors: vec!["a".into()], baselines: vec![], rows: vec![] };
    assert!(dmm(&t).is_err());
    assert!(dcm(&t).is_err());
}

fn arb_table() -> impl Strategy<Value = ChangeTable> {
    (1usize..7).prop_flat_map(|n| {
        proptest::collection::vec(
            (0usize..4, 0usize..3, proptest::collection::vec(0u8..2, n)),
            1..60,
        )
        .prop_map(move |rows| ChangeTable {
            factors: (0..n).map(|i| format!("f{i}")).collect(),
            baselines: vec![],
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (object, unit, changed))| ProbeRow { object, unit, value: i, changed })
                .collect(),
        })
    })
}

proptest! {
    #[test]
    fn dmm_is_positive_and_at_most_ln_n(t in arb_table()) {
        let n = t.factor_count() as f64;
        let m = dmm(&t).unwrap();
        prop_assert!(m > 0.0 || n == 1.0);
        prop_assert!(m <= n.ln() + 1e-12);
        prop_assert!(dcm(&t).unwrap() >= 0.0);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        prop_assert!((m - dmm_from_csv(&csv)).abs() <= 1e-9);
        prop_assert!((dcm(&t).unwrap() - dcm_from_csv(&csv)).abs() <= 1e-9);
    }
}
