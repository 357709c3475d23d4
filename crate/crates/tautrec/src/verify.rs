//! Verification suites shared by the `verify` subcommand and the acceptance run.

use tautrec_core::engine::{compositions, monomials_up_to};
use tautrec_core::exact_arith::format_rational;
use tautrec_core::identities;
use tautrec_core::oracle::{dilaton_check, string_check, OracleTable};
use tautrec_core::strata::FormalSum;
use tautrec_core::trr;
use tautrec_core::witten::{IntersectionTable, Recursion};
use tautrec_core::{Engine, Rational, Result};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn equal(name: impl Into<String>, got: &Rational, want: &Rational) -> Self {
        let detail = format!(
            "got {}, expected {}",
            format_rational(got),
            format_rational(want)
        );
        Check::new(name, got == want, detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Stable `(g, n)` with `n >= 1` and `3g - 3 + n <= max_dim`, for `g <= max_genus`.
pub fn moduli_up_to(max_genus: u32, max_dim: i64) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for g in 0..=max_genus {
        for n in 1usize.. {
            let d = 3 * g as i64 - 3 + n as i64;
            if d > max_dim {
                break;
            }
            if 2 * g as i64 - 2 + n as i64 > 0 {
                out.push((g, n));
            }
        }
    }
    out
}

/// Recursion against the classical oracle on every `(g, k)` with
/// `3g - 3 + n <= max_dim` and `g <= max_genus`.
pub fn dvv(
    engine: &mut Engine,
    table: &mut IntersectionTable,
    max_genus: u32,
    max_dim: i64,
) -> Result<Vec<Check>> {
    let mut oracle = OracleTable::new();
    let mut rec = Recursion::new(engine, table);
    let mut out = Vec::new();
    for (g, n) in moduli_up_to(max_genus, max_dim) {
        let d = (3 * g as i64 - 3 + n as i64) as u32;
        for k in compositions(d, n) {
            if k.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            let got = rec.intersection_number(g, &k)?;
            let want = oracle.value(g, &k)?;
            out.push(Check::equal(format!("<{:?}>_{}", k, g), &got, &want));
        }
    }
    Ok(out)
}

/// Symmetry, string and dilaton identities on the stored values of a table.
/// Values the identities need but the table lacks come from the recursion.
pub fn table_consistency(engine: &mut Engine, table: &IntersectionTable) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut snapshot = table.clone();
    let entries: Vec<(u32, Vec<u32>, Rational)> = table
        .entries()
        .map(|(g, k, v)| (g, k.to_vec(), v.clone()))
        .collect();
    for (g, k, v) in &entries {
        let mut rev = k.clone();
        rev.reverse();
        out.push(Check::new(
            format!("symmetry <{:?}>_{}", k, g),
            snapshot.get(*g, &rev) == Some(v),
            "",
        ));
    }
    let mut rec = Recursion::new(engine, &mut snapshot);
    for (g, k, _) in &entries {
        out.push(Check::new(
            format!("string <{:?}>_{}", k, g),
            string_check(&mut rec, *g, k)?,
            "",
        ));
        out.push(Check::new(
            format!("dilaton <{:?}>_{}", k, g),
            dilaton_check(&mut rec, *g, k)?,
            "",
        ));
    }
    Ok(out)
}

/// The smooth plus eight times one-loop identity for every monomial, and the
/// bouquet identity on each pushforward.
pub fn one_loop(engine: &mut Engine, cases: &[(u32, usize)]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &(g, n) in cases {
        for m in monomials_up_to(n - 1, 2 * g + 1) {
            let v = trr::one_loop_identity(engine, g, n, &m)?;
            out.push(Check::equal(
                format!("one-loop (g,n)=({g},{n}) M={m:?}"),
                &v,
                &Rational::from_integer(0.into()),
            ));
        }
    }
    Ok(out)
}

pub fn bouquet(engine: &mut Engine, max_genus: u32, max_markings: usize) -> Result<Vec<Check>> {
    let zero = Rational::from_integer(0.into());
    let mut cases = Vec::new();
    for g in 1..=max_genus {
        for n in 1..=max_markings {
            cases.push((g, n));
        }
    }
    let mut out = one_loop(engine, &cases)?;
    for &(g, n) in &cases {
        for m in monomials_up_to(n - 1, 2 * g + 1) {
            let p = trr::pushforward_omega(engine, g, n, &m)?;
            out.push(Check::equal(
                format!("bouquet identity pushforward (g,n)=({g},{n}) M={m:?}"),
                &trr::bouquet_identity_check(&p),
                &zero,
            ));
        }
        for k in compositions(g, n) {
            if k.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            let r = trr::trr_for_monomial(engine, g, &k)?;
            let s = r.as_sum(&mut engine.graphs)?;
            out.push(Check::equal(
                format!("bouquet identity relation g={g} k={k:?}"),
                &trr::bouquet_identity_check(&s),
                &zero,
            ));
            out.push(Check::equal(
                format!("bouquet coefficient g={g} k={k:?}"),
                &trr::bouquet_coefficient(engine, &r)?,
                &trr::expected_bouquet_coefficient(&k),
            ));
        }
    }
    Ok(out)
}

/// Kernel route agreement and the finite identities behind the recursion.
pub fn kernel(engine: &mut Engine, max_genus: u32) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (g, n, m) in [
        (1u32, 1usize, vec![]),
        (0, 3, vec![0, 0]),
        (0, 3, vec![1, 0]),
        (1, 2, vec![1]),
    ] {
        let a = trr::omega(engine, g, n, &m)?;
        let b = trr::omega_naive(engine, g, n, &m)?;
        out.push(Check::new(
            format!("omega vs naive (g,n)=({g},{n}) M={m:?}"),
            a == b && !a.is_zero(),
            format!("{} terms", a.len()),
        ));
    }
    for (g, n) in [(1u32, 1usize), (1, 2), (2, 1)] {
        for m in monomials_up_to(n - 1, 2 * g + 1) {
            let a = trr::pushforward_omega(engine, g, n, &m)?;
            let b = trr::pushforward_omega_via_forget(engine, g, n, &m)?;
            out.push(Check::new(
                format!("pushforward routes (g,n)=({g},{n}) M={m:?}"),
                a == b,
                "",
            ));
        }
    }
    for p in 1..=5 {
        out.push(Check::equal(
            format!("constant-term lemma p={p}"),
            &identities::kp_constant_term(p)?,
            &identities::kp_expected(p),
        ));
    }
    out.push(Check::new(
        "Pascal rule n<=30",
        identities::pascal_rule(30),
        "",
    ));
    let mut cosh_ok = true;
    for g in 0..=max_genus.max(4) {
        for d in 0..=2 * g + 1 {
            for e in 0..=g {
                if d + 2 * e <= 2 * g {
                    cosh_ok &= identities::cosh_shift_independence(g, d, e, 2 * g + 4)?;
                }
            }
        }
    }
    out.push(Check::new("cosh shift independence g<=4", cosh_ok, ""));
    let mut mm_ok = true;
    for g in 0..=max_genus {
        for n in 1..=4u32 {
            if (2 * g + n) < 3 {
                continue;
            }
            for d in 0..=2 * g + 1 {
                for e in 0..=3u32.min(2 * g + 2 - d) {
                    mm_ok &=
                        identities::sum_mm_lhs(g, n, d, e)? == identities::sum_mm_rhs(g, n, d, e)?;
                }
            }
        }
    }
    out.push(Check::new(
        format!("m + m* summation identity g<={max_genus}"),
        mm_ok,
        "",
    ));
    Ok(out)
}

/// Sum with every non-smooth class dropped.
pub fn smooth_part(sum: &FormalSum) -> FormalSum {
    sum.filter(|c| c.graph().num_edges() == 0)
}
