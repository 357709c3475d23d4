//! Machine-readable renderings. Every rational is a `"p/q"` string and every
//! top-level JSON object carries a `schema` field.

use serde_json::{json, Value};
use tautrec_core::exact_arith::format_rational;
use tautrec_core::stable_graphs::StableGraph;
use tautrec_core::strata::FormalSum;
use tautrec_core::trr::{RationalTails, Relation};
use tautrec_core::Rational;

pub const FORMAL_SUM_SCHEMA: &str = "tautrec.formal_sum.v1";
pub const RELATION_SCHEMA: &str = "tautrec.relation.v1";
pub const GRAPHS_SCHEMA: &str = "tautrec.graphs.v1";
pub const INTERSECTION_SCHEMA: &str = "tautrec.intersection.v1";
pub const VERIFY_SCHEMA: &str = "tautrec.verify.v1";

pub fn rational(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn terms(sum: &FormalSum) -> Value {
    Value::Array(
        sum.terms()
            .map(|(c, x)| json!({"graph": c.graph().to_text(), "psi": c.psi(), "coefficient": rational(x)}))
            .collect(),
    )
}

pub fn formal_sum(sum: &FormalSum) -> Value {
    json!({
        "schema": FORMAL_SUM_SCHEMA,
        "g": sum.genus(),
        "n": sum.num_markings(),
        "terms": terms(sum),
    })
}

/// One line per class: coefficient, graph encoding, ψ-exponents per half-edge.
pub fn formal_sum_table(sum: &FormalSum) -> String {
    let mut s = String::new();
    for (c, x) in sum.terms() {
        s.push_str(&format!(
            "{}\t{}\t{:?}\n",
            format_rational(x),
            c.graph().to_text(),
            c.psi()
        ));
    }
    s
}

pub fn formal_sum_csv(sum: &FormalSum) -> String {
    let mut s = String::from("coefficient,graph,psi\n");
    for (c, x) in sum.terms() {
        let psi: Vec<String> = c.psi().iter().map(|p| p.to_string()).collect();
        s.push_str(&format!(
            "{},{},{}\n",
            format_rational(x),
            c.graph().to_text(),
            psi.join(" ")
        ));
    }
    s
}

pub fn tails(t: &RationalTails) -> Value {
    let aij: Vec<Value> = t
        .aij
        .iter()
        .map(|((i, j), v)| json!({"i": i + 1, "j": j + 1, "value": rational(v)}))
        .collect();
    json!({
        "a0": t.a0.as_ref().map(rational),
        "aij": aij,
        "sum": rational(&t.sum()),
    })
}

pub fn relation(rel: &Relation, extra: Value) -> Value {
    let mut v = json!({
        "schema": RELATION_SCHEMA,
        "g": rel.g,
        "n": rel.n,
        "leading": rel.leading,
        "leading_coefficient": rational(&rel.leading_coefficient),
        "normalization": format!("{:?}", rel.normalization),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

pub fn relation_boundary(rel: &Relation) -> Value {
    terms(&rel.boundary)
}

pub fn graphs(g: u32, n: usize, list: &[(StableGraph, u64)]) -> Value {
    json!({
        "schema": GRAPHS_SCHEMA,
        "g": g,
        "n": n,
        "count": list.len(),
        "graphs": list
            .iter()
            .map(|(gr, aut)| json!({"graph": gr.to_text(), "edges": gr.num_edges(), "automorphisms": aut}))
            .collect::<Vec<_>>(),
    })
}

pub fn intersection(g: u32, k: &[u32], value: &Rational) -> Value {
    json!({"schema": INTERSECTION_SCHEMA, "g": g, "k": k, "value": rational(value)})
}
