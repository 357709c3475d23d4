use proptest::prelude::*;
use tautrec::store::{load_table, save_table, table_from_json, table_to_json, StoreError};
use tautrec_core::oracle::oracle_value;
use tautrec_core::witten::IntersectionTable;

fn composition(g: u32, n: usize, seed: u64) -> Vec<u32> {
    let d = 3 * g as usize + n - 3;
    let mut k = vec![0u32; n];
    let mut s = seed;
    for _ in 0..d {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        k[(s >> 33) as usize % n] += 1;
    }
    k
}

fn table_strategy() -> impl Strategy<Value = IntersectionTable> {
    prop::collection::vec((0u32..3, 0usize..3, any::<u64>()), 0..8).prop_map(|items| {
        let entries = items.into_iter().map(|(g, extra, seed)| {
            let n = if g == 0 { 3 + extra } else { 1 + extra };
            let k = composition(g, n, seed);
            let v = oracle_value(g, &k).unwrap();
            (g, k, v)
        });
        IntersectionTable::from_entries(entries).unwrap()
    })
}

proptest! {
    #[test]
    fn json_round_trip(t in table_strategy()) {
        let text = table_to_json(&t);
        let back = table_from_json(&text).unwrap();
        prop_assert!(back.entries().eq(t.entries()));
        prop_assert_eq!(table_to_json(&back), text);
    }

    #[test]
    fn file_round_trip(t in table_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        save_table(&t, &path).unwrap();
        prop_assert!(load_table(&path).unwrap().entries().eq(t.entries()));
    }

    #[test]
    fn rejects_dimension_mismatch(g in 1u32..3, seed in any::<u64>()) {
        let mut k = composition(g, 2, seed);
        k[0] += 1;
        let text = format!("{{\"version\": 1, \"entries\": [{{\"g\": {g}, \"k\": {k:?}, \"value\": \"1/2\"}}]}}");
        prop_assert!(matches!(table_from_json(&text), Err(StoreError::Entry(_))));
    }
}

#[test]
fn rejects_conflicts_and_versions() {
    let conflict = r#"{"version": 1, "entries": [{"g": 1, "k": [1], "value": "1/12"}]}"#;
    assert!(matches!(
        table_from_json(conflict),
        Err(StoreError::Entry(_))
    ));
    let version = r#"{"version": 2, "entries": []}"#;
    assert!(matches!(
        table_from_json(version),
        Err(StoreError::Version { found: 2 })
    ));
    assert!(matches!(
        table_from_json("not json"),
        Err(StoreError::Json(_))
    ));
    let bad_value = r#"{"version": 1, "entries": [{"g": 1, "k": [1], "value": "1/0"}]}"#;
    assert!(table_from_json(bad_value).is_err());
}

#[test]
fn missing_file_gives_base_table() {
    let dir = tempfile::tempdir().unwrap();
    let t = load_table(&dir.path().join("absent.json")).unwrap();
    assert_eq!(t.len(), 2);
}
