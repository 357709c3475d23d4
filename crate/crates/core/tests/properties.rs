use std::sync::OnceLock;

use proptest::prelude::*;
use tautrec_core::exact_arith::{
    binomial, factorial, format_rational, int, lagrange_interpolate, multinomial, parse_rational,
    rat, series_coefficient, InterpError, NamedSeries, Rational, SURPLUS_SAMPLES,
};
use tautrec_core::oracle::oracle_value;
use tautrec_core::stable_graphs::{enumerate, StableGraph};

const TYPES: [(u32, usize); 8] = [
    (0, 4),
    (0, 5),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 0),
    (2, 1),
    (3, 0),
];

fn catalogue() -> &'static Vec<Vec<StableGraph>> {
    static CAT: OnceLock<Vec<Vec<StableGraph>>> = OnceLock::new();
    CAT.get_or_init(|| {
        TYPES
            .iter()
            .map(|&(g, n)| enumerate(g, n).unwrap())
            .collect()
    })
}

/// A graph drawn from the catalogue, re-encoded by random vertex and edge
/// relabelling and edge flips.
fn relabelled() -> impl Strategy<Value = (StableGraph, StableGraph)> {
    (0..TYPES.len(), any::<prop::sample::Index>(), any::<u64>()).prop_map(|(t, i, seed)| {
        let list = &catalogue()[t];
        let gr = list[i.index(list.len())].clone();
        let mut rng = seed;
        let mut next = |m: usize| {
            rng = rng
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (rng >> 33) as usize % m.max(1)
        };
        let nv = gr.num_vertices();
        let mut pv: Vec<usize> = (0..nv).collect();
        for j in (1..nv).rev() {
            pv.swap(j, next(j + 1));
        }
        let mut genera = vec![0; nv];
        for v in 0..nv {
            genera[pv[v]] = gr.genera()[v];
        }
        let legs = gr.legs().iter().map(|&v| pv[v]).collect();
        let mut edges: Vec<(usize, usize)> = gr
            .edges()
            .iter()
            .map(|&(a, b)| {
                if next(2) == 0 {
                    (pv[a], pv[b])
                } else {
                    (pv[b], pv[a])
                }
            })
            .collect();
        for j in (1..edges.len()).rev() {
            edges.swap(j, next(j + 1));
        }
        let other = StableGraph::new(genera, legs, edges).unwrap();
        (gr, other)
    })
}

proptest! {
    #[test]
    fn canonical_form_is_a_relabelling_invariant((a, b) in relabelled()) {
        prop_assert_eq!(a.canonical(), b.canonical());
        prop_assert!(a.is_isomorphic(&b));
        prop_assert_eq!(a.automorphism_order(), b.automorphism_order());
        prop_assert_eq!(b.genus(), a.genus());
        prop_assert!(b.check().is_ok());
    }

    #[test]
    fn canonicalize_returns_an_isomorphism((_, b) in relabelled()) {
        let (c, _) = b.canonicalize();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c.is_isomorphic(&b));
    }

    #[test]
    fn text_round_trip((_, b) in relabelled()) {
        let back = StableGraph::from_text(&b.to_text()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn automorphism_group_closed_under_composition((_, b) in relabelled()) {
        let auts = b.automorphisms();
        prop_assert_eq!(auts.len() as u64, b.automorphism_order());
        for p in &auts {
            for q in &auts {
                let pq: Vec<usize> = q.iter().map(|&h| p[h]).collect();
                prop_assert!(auts.contains(&pq));
            }
        }
    }

    #[test]
    fn leg_permutation_round_trip((_, b) in relabelled(), seed in any::<u64>()) {
        let n = b.num_legs();
        let mut sigma: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for j in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            sigma.swap(j, (s >> 33) as usize % (j + 1));
        }
        let mut inv = vec![0; n];
        for (i, &x) in sigma.iter().enumerate() {
            inv[x] = i;
        }
        let p = b.permute_legs(&sigma);
        prop_assert!(p.check().is_ok());
        prop_assert_eq!(p.permute_legs(&inv).canonical(), b.canonical());
    }

    #[test]
    fn binomial_symmetry_and_pascal(n in 0i64..60, k in 0i64..60) {
        prop_assert_eq!(binomial(n, k), binomial(n, n - k));
        if k >= 1 {
            prop_assert_eq!(binomial(n, k - 1) + binomial(n, k), binomial(n + 1, k));
        }
    }

    #[test]
    fn multinomial_matches_binomials(a in 0i64..15, b in 0i64..15, c in 0i64..15) {
        let m = multinomial(a + b + c, &[a, b, c]).unwrap();
        prop_assert_eq!(m, binomial(a + b + c, a) * binomial(b + c, b));
        prop_assert!(multinomial(a + b + c + 1, &[a, b, c]).is_err());
    }

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn interpolation_recovers_polynomials(coeffs in prop::collection::vec(-50i64..50, 1..7), shift in -5i64..5) {
        let bound = coeffs.len() - 1;
        let f = |x: i64| coeffs.iter().rev().fold(int(0), |acc, &c| acc * int(x) + int(c));
        let samples: Vec<(i64, Rational)> =
            (0..(bound + 1 + SURPLUS_SAMPLES) as i64).map(|i| (i + shift, f(i + shift))).collect();
        let p = lagrange_interpolate(&samples, bound).unwrap();
        prop_assert_eq!(p.coeffs, coeffs.iter().map(|&c| int(c)).collect::<Vec<_>>());
        prop_assert_eq!(p.surplus_checked, SURPLUS_SAMPLES);
    }

    #[test]
    fn interpolation_detects_low_bound(coeffs in prop::collection::vec(-50i64..50, 2..7)) {
        prop_assume!(*coeffs.last().unwrap() != 0);
        let bound = coeffs.len() - 2;
        let f = |x: i64| coeffs.iter().rev().fold(int(0), |acc, &c| acc * int(x) + int(c));
        let samples: Vec<(i64, Rational)> = (0..(bound + 1 + SURPLUS_SAMPLES) as i64).map(|x| (x, f(x))).collect();
        let is_mismatch = matches!(lagrange_interpolate(&samples, bound), Err(InterpError::SurplusMismatch { .. }));
        prop_assert!(is_mismatch);
    }

    #[test]
    fn exp_coefficients(a in -6i64..6, b in -6i64..6, i in 0u32..6, j in 0u32..6) {
        let got = series_coefficient(NamedSeries::Exp, &[int(a), int(b)], &[i, j]).unwrap();
        let want = tautrec_core::exact_arith::pow(&int(a), i) * tautrec_core::exact_arith::pow(&int(b), j)
            / (factorial(i as i64).unwrap() * factorial(j as i64).unwrap());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn oracle_is_symmetric(g in 0u32..3, seed in any::<u64>()) {
        let n = if g == 0 { 5 } else { 2 };
        let d = 3 * g + n - 3;
        let mut k = vec![0u32; n as usize];
        let mut s = seed;
        for _ in 0..d {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            k[(s >> 33) as usize % n as usize] += 1;
        }
        let v = oracle_value(g, &k).unwrap();
        k.reverse();
        prop_assert_eq!(oracle_value(g, &k).unwrap(), v);
    }
}
