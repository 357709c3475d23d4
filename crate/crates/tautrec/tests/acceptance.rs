//! Acceptance run: one line per criterion, exit status 1 if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use tautrec::store::{table_from_json, table_to_json};
use tautrec::verify::{self, Check};
use tautrec_core::engine::compositions;
use tautrec_core::exact_arith::{int, rat};
use tautrec_core::oracle::OracleTable;
use tautrec_core::pixton::{
    lambda_bouquet_coefficient, lambda_generating_coefficient, loop_contribution_closed_form,
    pixton_class, pixton_class_sampled,
};
use tautrec_core::stable_graphs::{bouquet_graph, permutations, StableGraph};
use tautrec_core::strata::FormalSum;
use tautrec_core::trr;
use tautrec_core::witten::{IntersectionTable, Recursion};
use tautrec_core::{Engine, Rational, Result};

struct Outcome {
    passed: bool,
    summary: String,
}

fn summarize(checks: &[Check]) -> Outcome {
    let bad: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let mut summary = format!("{} checks", checks.len());
    for c in bad.iter().take(5) {
        summary.push_str(&format!("; failed {} {}", c.name, c.detail));
    }
    Outcome {
        passed: bad.is_empty() && !checks.is_empty(),
        summary,
    }
}

fn zero() -> Rational {
    int(0)
}

fn m12_example(e: &mut Engine) -> Result<Outcome> {
    let mut checks = Vec::new();
    let list = e.graphs.enumerate(1, 2, usize::MAX)?;
    checks.push(Check::new(
        "five graphs",
        list.len() == 5,
        format!("{}", list.len()),
    ));
    let g2 = StableGraph::new(vec![1, 0], vec![1, 1], vec![(0, 1)])?;
    let g3 = StableGraph::new(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)])?;
    let g4 = StableGraph::new(vec![0, 0], vec![1, 1], vec![(0, 1), (0, 0)])?;
    let g5 = StableGraph::new(vec![0], vec![0, 0], vec![(0, 0)])?;
    let figure = [
        StableGraph::trivial(1, 2)?,
        g2.clone(),
        g3.clone(),
        g4.clone(),
        g5.clone(),
    ];
    for (i, f) in figure.iter().enumerate() {
        let hits = list.iter().filter(|gr| gr.is_isomorphic(f)).count();
        checks.push(Check::new(
            format!("graph {} present once", i + 1),
            hits == 1,
            "",
        ));
    }
    let mut table = IntersectionTable::new();
    let mut rec = Recursion::new(e, &mut table);
    let eq = rec.assemble_equation(1, 2, &[0])?;
    let row_ok = eq.row.len() == 1 && eq.row.get(&vec![2, 0]) == Some(&int(360));
    checks.push(Check::new(
        "smooth row 360 x",
        row_ok,
        format!("{:?}", eq.row),
    ));
    for (f, want) in [
        (&g2, int(-3)),
        (&g3, int(-12)),
        (&g4, zero()),
        (&g5, zero()),
    ] {
        let got: Vec<&Rational> = eq
            .contributions
            .iter()
            .filter(|(gr, _)| gr.is_isomorphic(f))
            .map(|(_, c)| c)
            .collect();
        let ok = got.len() == 1 && *got[0] == want;
        checks.push(Check::new(
            format!("contribution {}", f.to_text()),
            ok,
            format!("{:?}", got),
        ));
    }
    let x = rec.intersection_number(1, &[2, 0])?;
    checks.push(Check::equal("int psi_1^2", &x, &rat(1, 24)));
    Ok(summarize(&checks))
}

fn oracle_equivalence(e: &mut Engine, table: &mut IntersectionTable) -> Result<Outcome> {
    let mut oracle = OracleTable::new();
    let mut rec = Recursion::new(e, table);
    let mut checks = Vec::new();
    for (g, n) in verify::moduli_up_to(2, 4) {
        let d = (3 * g as i64 - 3 + n as i64) as u32;
        for k in compositions(d, n) {
            let got = rec.intersection_number(g, &k)?;
            checks.push(Check::equal(
                format!("<{k:?}>_{g}"),
                &got,
                &oracle.value(g, &k)?,
            ));
        }
    }
    for (g, k, v) in [
        (1, vec![1], rat(1, 24)),
        (1, vec![2, 0], rat(1, 24)),
        (1, vec![1, 1], rat(1, 24)),
        (2, vec![4], rat(1, 1152)),
    ] {
        checks.push(Check::equal(
            format!("anchor <{k:?}>_{g}"),
            &rec.intersection_number(g, &k)?,
            &v,
        ));
    }
    Ok(summarize(&checks))
}

fn pixton_vanishing(e: &mut Engine) -> Result<Outcome> {
    let mut oracle = OracleTable::new();
    let mut checks = Vec::new();
    let mut cases: Vec<(u32, usize, Vec<i64>)> = (0..=3).map(|a| (1, 2, vec![a])).collect();
    cases.push((2, 1, vec![]));
    for (g, n, a) in cases {
        let d = 3 * g - 3 + n as u32;
        let c = pixton_class(&mut e.kernel, &mut e.graphs, g, n, &a, d)?;
        checks.push(Check::equal(
            format!("(g,n,a)=({g},{n},{a:?})"),
            &c.integrate(&mut oracle)?,
            &zero(),
        ));
    }
    // Degree 3g-3+n equals g here, so the class is -lambda_1 rather than a relation.
    let c = pixton_class(&mut e.kernel, &mut e.graphs, 1, 1, &[], 1)?;
    let v = c.integrate(&mut oracle)?;
    checks.push(Check::equal(
        "(1,1,()) integrates to -1/24",
        &v,
        &rat(-1, 24),
    ));
    let mut out = summarize(&checks);
    out.summary
        .push_str("; (1,1,()) is not a vanishing case, value -1/24");
    Ok(out)
}

fn one_loop(e: &mut Engine) -> Result<Outcome> {
    Ok(summarize(&verify::one_loop(
        e,
        &[(1, 1), (1, 2), (2, 1), (2, 2)],
    )?))
}

fn bouquet_coefficients(e: &mut Engine) -> Result<Outcome> {
    let mut checks = Vec::new();
    for (g, k, want) in [
        (1, vec![1], rat(1, 24)),
        (1, vec![1, 0], rat(1, 24)),
        (2, vec![1, 1], rat(1, 576)),
    ] {
        let r = trr::trr_for_monomial(e, g, &k)?;
        checks.push(Check::new(
            format!("normal form g={g} k={k:?}"),
            trr::is_normal_form(&r),
            "",
        ));
        checks.push(Check::equal(
            format!("g={g} k={k:?}"),
            &trr::bouquet_coefficient(e, &r)?,
            &want,
        ));
        checks.push(Check::equal(
            format!("formula g={g} k={k:?}"),
            &trr::expected_bouquet_coefficient(&k),
            &want,
        ));
    }
    Ok(summarize(&checks))
}

fn rational_tails(e: &mut Engine) -> Result<Outcome> {
    let mut checks = Vec::new();
    let r = trr::trr_for_monomial(e, 2, &[1, 1])?;
    let t = trr::rational_tail_coefficients(e, &r)?;
    checks.push(Check::new(
        "a0 at (2,2), k=(1,1)",
        t.a0 == Some(int(3)) && t.aij.is_empty(),
        format!("{t:?}"),
    ));
    let r = trr::trr_for_monomial(e, 1, &[1, 0])?;
    checks.push(Check::equal(
        "sum at (1,2), k=(1,0)",
        &trr::rational_tail_coefficients(e, &r)?.sum(),
        &int(1),
    ));
    for k in [[1, 1, 0], [2, 0, 0]] {
        let r = trr::trr_for_monomial(e, 2, &k)?;
        let t = trr::rational_tail_coefficients(e, &r)?;
        checks.push(Check::equal(
            format!("sum at (2,3), k={k:?}"),
            &t.sum(),
            &zero(),
        ));
    }
    Ok(summarize(&checks))
}

fn lambda(e: &mut Engine) -> Result<Outcome> {
    let mut checks = Vec::new();
    checks.push(Check::equal(
        "generating side g=1",
        &lambda_generating_coefficient(1),
        &rat(1, 24),
    ));
    checks.push(Check::equal(
        "generating side g=2",
        &lambda_generating_coefficient(2),
        &rat(1, 960),
    ));
    let d1 = pixton_class(&mut e.kernel, &mut e.graphs, 1, 1, &[], 1)?;
    let l1 = -d1.integrate(&mut OracleTable::new())?;
    checks.push(Check::equal("int lambda_1 on M_{1,1}", &l1, &rat(1, 24)));
    for (g, n) in [(1u32, 1usize), (2, 1), (2, 2)] {
        let full = pixton_class(&mut e.kernel, &mut e.graphs, g, n, &vec![0; n - 1], g)?;
        let mut parts = FormalSum::new(g, n);
        for m in 1..=g as usize {
            let c = loop_contribution_closed_form(&mut e.graphs, g, m, n)?;
            let gr = bouquet_graph(g - m as u32, m, n)?;
            let kern = full.restrict_to_graph(&gr, &mut e.graphs);
            checks.push(Check::new(
                format!("loop part g={g} n={n} m={m}"),
                kern == c,
                "",
            ));
            parts.add_sum(&kern, &Rational::from_integer(1.into()))?;
        }
        checks.push(Check::equal(
            format!("bouquet coefficient of lambda_{g}, n={n}"),
            &lambda_bouquet_coefficient(&parts),
            &lambda_generating_coefficient(g),
        ));
    }
    Ok(summarize(&checks))
}

fn kernel(e: &mut Engine) -> Result<Outcome> {
    let mut checks = verify::kernel(e, 3)?;
    let a = trr::omega(e, 1, 1, &[])?;
    let b = trr::omega_naive(e, 1, 1, &[])?;
    checks.push(Check::new("omega(1,1,1) = naive", a == b, ""));
    for (g, n, a, d) in [
        (1u32, 1usize, vec![], 1u32),
        (1, 2, vec![2], 2),
        (2, 1, vec![], 2),
        (1, 3, vec![1, -2], 2),
    ] {
        let fast = pixton_class(&mut e.kernel, &mut e.graphs, g, n, &a, d)?;
        let sampled = pixton_class_sampled(&mut e.graphs, g, n, &a, d);
        let ok = matches!(&sampled, Ok(s) if *s == fast);
        checks.push(Check::new(
            format!("sampled class with surplus checks ({g},{n},{a:?},{d})"),
            ok,
            "",
        ));
    }
    Ok(summarize(&checks))
}

/// Number of distinct raw encodings under vertex and edge relabelling and edge flips.
fn orbit_size(gr: &StableGraph) -> usize {
    let nv = gr.num_vertices();
    let ne = gr.num_edges();
    let mut seen = BTreeSet::new();
    for pv in permutations(nv) {
        for pe in permutations(ne) {
            for flips in 0u32..(1 << ne) {
                let mut genera = vec![0; nv];
                for v in 0..nv {
                    genera[pv[v]] = gr.genera()[v];
                }
                let legs: Vec<usize> = gr.legs().iter().map(|&v| pv[v]).collect();
                let mut edges = vec![(0, 0); ne];
                for (i, &(a, b)) in gr.edges().iter().enumerate() {
                    let (a, b) = (pv[a], pv[b]);
                    edges[pe[i]] = if flips >> i & 1 == 1 { (b, a) } else { (a, b) };
                }
                seen.insert((genera, legs, edges));
            }
        }
    }
    seen.len()
}

fn properties(e: &mut Engine, table: &IntersectionTable) -> Result<Outcome> {
    let mut checks = Vec::new();
    let counts = [
        ((0u32, 4usize), 4usize),
        ((0, 5), 26),
        ((1, 1), 2),
        ((1, 2), 5),
        ((2, 0), 7),
    ];
    for ((g, n), want) in counts {
        checks.push(Check::new(
            format!("|G_{{{g},{n}}}| = {want}"),
            e.graphs.enumerate(g, n, usize::MAX)?.len() == want,
            "",
        ));
    }
    let types = [
        (0u32, 3usize),
        (0, 4),
        (0, 5),
        (0, 6),
        (1, 1),
        (1, 2),
        (1, 3),
        (1, 4),
        (2, 0),
        (2, 1),
        (2, 2),
        (3, 0),
    ];
    for (g, n) in types {
        let list = e.graphs.enumerate(g, n, usize::MAX)?;
        let mut ok = true;
        let mut canon = BTreeSet::new();
        for gr in &list {
            ok &= gr.check().is_ok() && gr.genus() == g && gr.num_legs() == n && gr.is_connected();
            ok &= (0..gr.num_vertices()).all(|v| gr.is_stable_vertex(v));
            ok &= canon.insert(gr.canonical());
        }
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                ok &= !a.is_isomorphic(b);
            }
        }
        checks.push(Check::new(
            format!("graph invariants ({g},{n})"),
            ok,
            format!("{} graphs", list.len()),
        ));
        for gr in list.iter().filter(|gr| gr.num_half_edges() <= 6) {
            let aut = gr.automorphism_order();
            let (nv, ne) = (gr.num_vertices() as u64, gr.num_edges() as u64);
            let group: u64 = (1..=nv).product::<u64>() * (1..=ne).product::<u64>() * (1u64 << ne);
            checks.push(Check::new(
                format!("orbit-stabilizer {}", gr.to_text()),
                orbit_size(gr) as u64 * aut == group && e.graphs.automorphism_order(gr) == aut,
                format!("|Aut| = {aut}"),
            ));
        }
    }
    checks.extend(verify::table_consistency(e, table)?);
    let text = table_to_json(table);
    let back =
        table_from_json(&text).map_err(|err| tautrec_core::Error::Internal(err.to_string()))?;
    checks.push(Check::new(
        "cache round trip",
        back.entries().eq(table.entries()) && table_to_json(&back) == text,
        format!("{} entries", table.len()),
    ));
    let pf = trr::pushforward_omega(e, 1, 2, &[1])?;
    checks.push(Check::new(
        "pushforward degree",
        pf.degrees() == vec![1],
        "",
    ));
    Ok(summarize(&checks))
}

fn main() {
    let mut engine = Engine::new();
    let mut table = IntersectionTable::new();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, r: Result<Outcome>, t: Instant| {
        let (ok, text) = match r {
            Ok(o) => (o.passed, o.summary),
            Err(err) => (false, format!("error: {err}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n}: {} {name} [{text}] ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    };
    let t = Instant::now();
    report(1, "M_{1,2} worked example", m12_example(&mut engine), t);
    let t = Instant::now();
    report(
        2,
        "recursion equals oracle",
        oracle_equivalence(&mut engine, &mut table),
        t,
    );
    let t = Instant::now();
    report(
        3,
        "Pixton class relations integrate to zero",
        pixton_vanishing(&mut engine),
        t,
    );
    let t = Instant::now();
    report(
        4,
        "smooth plus 8 one-loop F identity",
        one_loop(&mut engine),
        t,
    );
    let t = Instant::now();
    report(
        5,
        "bouquet coefficients",
        bouquet_coefficients(&mut engine),
        t,
    );
    let t = Instant::now();
    report(
        6,
        "rational-tail coefficients",
        rational_tails(&mut engine),
        t,
    );
    let t = Instant::now();
    report(7, "lambda_g bouquet coefficient", lambda(&mut engine), t);
    let t = Instant::now();
    report(
        8,
        "kernel cross-validation and identities",
        kernel(&mut engine),
        t,
    );
    let t = Instant::now();
    report(9, "property suites", properties(&mut engine, &table), t);
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
