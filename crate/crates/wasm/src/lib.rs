//! Browser bindings for the pivot-rule simulator: generate a family
//! instance and run a rule on it, inspect exact expectations, and
//! explore the certificate region. All values cross the boundary as
//! JSON with exact `p/q` strings plus float renderings for drawing.

use wasm_bindgen::prelude::wasm_bindgen;

use lp3sim::analysis::{check_certificate_point, certificate_system, solve_certificate_lp, CertPoint};
use lp3sim::expectation::{expected_random_edge, expected_random_facet, RandomFacetVariant};
use lp3sim::families::{generate_family, FamilyName, FamilySpec};
use lp3sim::model::{orientation_of, Instance};
use lp3sim::rational::{format_rational, parse_rational, to_f64};
use lp3sim::rules::{
    run_bland, run_greatest_decrease, run_least_entered, run_random_edge, run_shadow_vertex,
    run_steepest_decrease, RuleKind, TieBreak,
};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn err_json(msg: &str) -> String {
    format!("{{\"error\":\"{}\"}}", esc(msg))
}

fn build(family: &str, p1: usize, p2: usize) -> Result<Instance, String> {
    let name = FamilyName::parse(family).ok_or_else(|| format!("unknown family `{family}`"))?;
    let spec = match name {
        FamilyName::ReLower => FamilySpec::new(name, &[("k", p1)]),
        FamilyName::RfLower | FamilyName::LeRe => {
            FamilySpec::new(name, &[("a", p1), ("b", p2)])
        }
        _ => FamilySpec::new(name, &[("n", p1)]),
    };
    generate_family(&spec).map_err(|e| e.to_string())
}

/// Generates a family member and runs one pivot rule from its stored
/// start. Returns the oriented edge list and the realized trace.
#[wasm_bindgen]
pub fn run_family(family: &str, p1: usize, p2: usize, rule: &str, seed: u64) -> String {
    let inst = match build(family, p1, p2) {
        Ok(i) => i,
        Err(e) => return err_json(&e),
    };
    let base = inst.base();
    let start = base.start;
    let kind = match RuleKind::parse(rule) {
        Some(k) => k,
        None => return err_json(&format!("unknown rule `{rule}`")),
    };
    let trace = match kind {
        RuleKind::Bland | RuleKind::Dantzig => run_bland(base, None, start).map_err(|e| e.to_string()),
        RuleKind::GreatestDecrease => Ok(run_greatest_decrease(base, start)),
        RuleKind::RandomEdge => Ok(run_random_edge(base, start, seed)),
        RuleKind::LeastEntered => {
            run_least_entered(base, TieBreak::GreatestDecrease, start, None).map_err(|e| e.to_string())
        }
        RuleKind::SteepestDecrease => match inst.geometric() {
            Some(g) => run_steepest_decrease(g, start).map_err(|e| e.to_string()),
            None => Err("steepest-decrease needs the geometric family (sd)".to_string()),
        },
        RuleKind::ShadowVertex => match inst.geometric() {
            Some(g) => run_shadow_vertex(g, start).map_err(|e| e.to_string()),
            None => Err("shadow-vertex needs the geometric family (sd)".to_string()),
        },
        RuleKind::Rf | RuleKind::Rf1 | RuleKind::Rf2 => {
            let variant = match kind {
                RuleKind::Rf => RandomFacetVariant::Rf,
                RuleKind::Rf1 => RandomFacetVariant::Rf1,
                _ => RandomFacetVariant::Rf2,
            };
            Ok(lp3sim::rules::run_random_facet(base, variant, start, seed))
        }
    };
    let trace = match trace {
        Ok(t) => t,
        Err(e) => return err_json(&e),
    };
    let orient = orientation_of(base);
    let mut edges = String::new();
    for v in 0..base.num_vertices {
        for &u in &orient.out_neighbors[v] {
            if !edges.is_empty() {
                edges.push(',');
            }
            edges.push_str(&format!("[{v},{u}]"));
        }
    }
    let path: Vec<String> = trace.vertices.iter().map(|v| v.to_string()).collect();
    format!(
        "{{\"name\":\"{}\",\"facets\":{},\"vertices\":{},\"start\":{},\"edges\":[{}],\"trace\":[{}],\"steps\":{}}}",
        esc(&base.name),
        base.num_facets(),
        base.num_vertices,
        start,
        edges,
        path.join(","),
        trace.steps()
    )
}

/// Exact expected path lengths at the start vertex for the randomized
/// rules, as `p/q` plus floats.
#[wasm_bindgen]
pub fn expectations(family: &str, p1: usize, p2: usize) -> String {
    let inst = match build(family, p1, p2) {
        Ok(i) => i,
        Err(e) => return err_json(&e),
    };
    let base = inst.base();
    let start = base.start;
    let re = expected_random_edge(base).values[start].clone();
    let mut parts = vec![format!(
        "\"random-edge\":{{\"exact\":\"{}\",\"value\":{}}}",
        format_rational(&re),
        to_f64(&re)
    )];
    for (label, variant) in [
        ("rf", RandomFacetVariant::Rf),
        ("rf1", RandomFacetVariant::Rf1),
        ("rf2", RandomFacetVariant::Rf2),
    ] {
        if let Ok(table) = expected_random_facet(base, variant) {
            let v = &table.values[start];
            parts.push(format!(
                "\"{label}\":{{\"exact\":\"{}\",\"value\":{}}}",
                format_rational(v),
                to_f64(v)
            ));
        }
    }
    format!(
        "{{\"name\":\"{}\",\"start\":{},{}}}",
        esc(&base.name),
        start,
        parts.join(",")
    )
}

/// The 24-row certificate system, its exact optimum, and the
/// evaluation at a point chosen in the page.
#[wasm_bindgen]
pub fn certificate(alpha: &str, beta: &str) -> String {
    let alpha = match parse_rational(alpha) {
        Ok(a) => a,
        Err(e) => return err_json(&e),
    };
    let beta = match parse_rational(beta) {
        Ok(b) => b,
        Err(e) => return err_json(&e),
    };
    let point = CertPoint::new(alpha, beta);
    let check = check_certificate_point(&point);
    let system = certificate_system();
    let rows: Vec<String> = system
        .rows
        .iter()
        .map(|r| {
            format!(
                "{{\"id\":\"{}\",\"a\":{},\"b\":{},\"rhs\":{},\"exact\":\"{} a + {} b >= {}\"}}",
                r.id,
                to_f64(&r.a),
                to_f64(&r.b),
                to_f64(&r.rhs),
                format_rational(&r.a),
                format_rational(&r.b),
                format_rational(&r.rhs)
            )
        })
        .collect();
    let (opt, value) = match solve_certificate_lp() {
        Ok(x) => x,
        Err(e) => return err_json(&e.to_string()),
    };
    let list = |ids: &[&str]| -> String {
        let q: Vec<String> = ids.iter().map(|i| format!("\"{i}\"")).collect();
        q.join(",")
    };
    format!(
        "{{\"rows\":[{}],\"optimum\":{{\"alpha\":\"{}\",\"beta\":\"{}\",\"alphaValue\":{},\"betaValue\":{},\"value\":\"{}\",\"valueFloat\":{}}},\"point\":{{\"alpha\":{},\"beta\":{},\"satisfied\":[{}],\"violated\":[{}],\"tight\":[{}]}}}}",
        rows.join(","),
        format_rational(&opt.alpha),
        format_rational(&opt.beta),
        to_f64(&opt.alpha),
        to_f64(&opt.beta),
        format_rational(&value),
        to_f64(&value),
        to_f64(&point.alpha),
        to_f64(&point.beta),
        list(&check.satisfied),
        list(&check.violated),
        list(&check.tight)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_family_produces_trace_json() {
        let json = run_family("klee", 8, 0, "bland", 0);
        assert!(json.contains("\"steps\":10"), "{json}");
        assert!(json.contains("\"edges\""));
    }

    #[test]
    fn expectations_json_has_exact_values() {
        let json = expectations("re-lower", 4, 0);
        assert!(json.contains("\"exact\":\"1833/64\""), "{json}");
    }

    #[test]
    fn certificate_json_reports_optimum() {
        let json = certificate("46/87", "42/87");
        assert!(json.contains("\"value\":\"130/87\""), "{json}");
        assert!(json.contains("\"tight\":[\"8\",\"20\"]"), "{json}");
    }

    #[test]
    fn errors_become_json() {
        assert!(run_family("nope", 1, 1, "bland", 0).contains("error"));
        assert!(certificate("x", "1").contains("error"));
    }
}
