use tautrec_core::engine::compositions;
use tautrec_core::oracle::OracleTable;
use tautrec_core::witten::{IntersectionTable, Recursion};
use tautrec_core::Engine;

fn sweep(max_dim: i64) {
    let mut engine = Engine::new();
    let mut table = IntersectionTable::new();
    let mut oracle = OracleTable::new();
    let mut rec = Recursion::new(&mut engine, &mut table);
    for g in 0..=2u32 {
        for n in 1..=8usize {
            let d = 3 * g as i64 - 3 + n as i64;
            if d < 0 || d > max_dim || 2 * g as i64 - 2 + n as i64 <= 0 {
                continue;
            }
            for k in compositions(d as u32, n) {
                assert_eq!(
                    rec.intersection_number(g, &k).unwrap(),
                    oracle.value(g, &k).unwrap(),
                    "g={g} k={k:?}"
                );
            }
        }
    }
}

#[test]
fn recursion_matches_oracle() {
    sweep(4);
}
