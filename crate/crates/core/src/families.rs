//! Parametric generators for the worst-case instance families.
//!
//! Each generator builds the facet complex of a simple 3-polytope whose
//! vertex ids are the intended objective ranks, ready for the pivot
//! rules. Every generated instance passes `validate` and `check_mk`;
//! the tests enforce this across the parameter ranges.

use std::collections::BTreeMap;

use crate::model::{CombinatorialInstance, Error, Instance, VertexId};
use crate::rational::{rat, rint, Rational};
use crate::rules::RuleKind;

pub mod builder;
mod gadget;
mod legd;
mod sd;

pub use gadget::{backbone, configuration_fixture, re_lower, re_lower_blocks};
pub use legd::le_gd;
pub use sd::sd;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub params: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Klee,
    ReLower,
    Gd,
    Sd,
    RfLower,
    LeRe,
    LeGd,
}

impl FamilyName {
    pub fn parse(text: &str) -> Option<FamilyName> {
        Some(match text {
            "klee" => FamilyName::Klee,
            "re-lower" => FamilyName::ReLower,
            "gd" => FamilyName::Gd,
            "sd" => FamilyName::Sd,
            "rf-lower" => FamilyName::RfLower,
            "le-re" => FamilyName::LeRe,
            "le-gd" => FamilyName::LeGd,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyName::Klee => "klee",
            FamilyName::ReLower => "re-lower",
            FamilyName::Gd => "gd",
            FamilyName::Sd => "sd",
            FamilyName::RfLower => "rf-lower",
            FamilyName::LeRe => "le-re",
            FamilyName::LeGd => "le-gd",
        }
    }
}

impl FamilySpec {
    pub fn new(name: FamilyName, params: &[(&str, usize)]) -> Self {
        FamilySpec {
            name,
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }

    fn param(&self, key: &str) -> Result<usize, Error> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("family `{}` needs parameter `{key}`", self.name.as_str())))
    }
}

/// What a closed-form prediction claims about a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    ExactSteps,
    ExactExpectation,
    LowerBoundVisited,
}

#[derive(Debug, Clone)]
pub struct FamilyPrediction {
    pub rule: RuleKind,
    pub value: Rational,
    pub kind: PredictionKind,
}

/// Builds the requested family member.
pub fn generate_family(spec: &FamilySpec) -> Result<Instance, Error> {
    match spec.name {
        FamilyName::Klee => {
            let n = spec.param("n")?;
            if n < 6 {
                return Err(Error::Invalid("klee needs n >= 6".to_string()));
            }
            Ok(Instance::Combinatorial(klee(n)))
        }
        FamilyName::Gd => {
            let n = spec.param("n")?;
            if n < 7 || n % 2 == 0 {
                return Err(Error::Invalid(
                    "gd needs odd n >= 7 (step count 3(n-3)/2 must be integral)".to_string(),
                ));
            }
            Ok(Instance::Combinatorial(gd(n)))
        }
        FamilyName::RfLower => {
            let a = spec.param("a")?;
            let b = spec.param("b")?;
            if a < 1 || b < 1 {
                return Err(Error::Invalid("rf-lower needs a >= 1, b >= 1".to_string()));
            }
            Ok(Instance::Combinatorial(rf_lower(a, b)))
        }
        FamilyName::LeRe => {
            let a = spec.param("a")?;
            let b = spec.param("b")?;
            if a < 1 || b < 1 {
                return Err(Error::Invalid("le-re needs a >= 1, b >= 1".to_string()));
            }
            Ok(Instance::Combinatorial(le_re(a, b)))
        }
        FamilyName::ReLower => {
            let k = spec.param("k")?;
            if k < 4 {
                return Err(Error::Invalid("re-lower needs k >= 4".to_string()));
            }
            Ok(Instance::Combinatorial(gadget::re_lower(k)))
        }
        FamilyName::LeGd => {
            let n = spec.param("n")?;
            if n < 8 {
                return Err(Error::Invalid("le-gd needs n >= 8".to_string()));
            }
            Ok(Instance::Combinatorial(legd::le_gd(n)?))
        }
        FamilyName::Sd => {
            let n = spec.param("n")?;
            if n < 5 {
                return Err(Error::Invalid("sd needs n >= 5".to_string()));
            }
            Ok(Instance::Geometric(sd::sd(n)?))
        }
    }
}

/// The closed form for the matching rule from the family's designated
/// start vertex.
pub fn family_prediction(spec: &FamilySpec, rule: RuleKind) -> Result<FamilyPrediction, Error> {
    let unsupported = || {
        Error::Unsupported(format!(
            "no prediction for family `{}` under rule `{}`",
            spec.name.as_str(),
            rule.as_str()
        ))
    };
    let pred = match (spec.name, rule) {
        (FamilyName::Klee, RuleKind::Bland) | (FamilyName::Klee, RuleKind::Dantzig) => {
            let n = spec.param("n")? as i64;
            FamilyPrediction {
                rule,
                value: rint(2 * n - 6),
                kind: PredictionKind::ExactSteps,
            }
        }
        (FamilyName::Gd, RuleKind::GreatestDecrease) => {
            let n = spec.param("n")? as i64;
            FamilyPrediction {
                rule,
                value: rat(3 * (n - 3), 2),
                kind: PredictionKind::ExactSteps,
            }
        }
        (FamilyName::ReLower, RuleKind::RandomEdge) => {
            let k = spec.param("k")? as i64;
            FamilyPrediction {
                rule,
                value: rat(1897 * (k - 2), 128) - rint(1),
                kind: PredictionKind::ExactExpectation,
            }
        }
        (FamilyName::LeGd, RuleKind::LeastEntered) => {
            let n = spec.param("n")? as i64;
            FamilyPrediction {
                rule,
                value: rint(2 * n - 8),
                kind: PredictionKind::ExactSteps,
            }
        }
        (FamilyName::Sd, RuleKind::SteepestDecrease) | (FamilyName::Sd, RuleKind::ShadowVertex) => {
            let n = spec.param("n")? as i64;
            FamilyPrediction {
                rule,
                value: rint(2 * n - 5),
                kind: PredictionKind::ExactSteps,
            }
        }
        (FamilyName::RfLower, RuleKind::Rf)
        | (FamilyName::RfLower, RuleKind::Rf1)
        | (FamilyName::RfLower, RuleKind::Rf2)
        | (FamilyName::LeRe, RuleKind::Rf1)
        | (FamilyName::LeRe, RuleKind::Rf2) => {
            // expected visited vertices >= (1 - q^b)(2a + b), where the
            // per-blocker escape probability q is 1/2 on the uncut
            // family and 2/3 on the cut one (the blockers there commit
            // with probability 1/3).
            let a = spec.param("a")? as i64;
            let b = spec.param("b")? as i64;
            let q = if spec.name == FamilyName::LeRe {
                rat(2, 3)
            } else {
                rat(1, 2)
            };
            let stick = rint(1) - q.pow(b as i32);
            FamilyPrediction {
                rule,
                value: stick * rint(2 * a + b),
                kind: PredictionKind::LowerBoundVisited,
            }
        }
        _ => return Err(unsupported()),
    };
    Ok(pred)
}

// ---------------------------------------------------------------------
// klee: nested-arc family over a spine
// ---------------------------------------------------------------------

/// Worst case for the monotone Hirsch bound and for Bland's rule: every
/// monotone path from `v_{n-3}` is forced along the bottom spine, and
/// with the big top facet numbered last, Bland walks the entire spine
/// from `v_{2n-6}`.
pub fn klee(n: usize) -> CombinatorialInstance {
    let m = 2 * n - 4;
    let vmax = m - 1;
    let mut facets: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    // quads between consecutive nested arcs
    for t in 0..n - 4 {
        facets.push(vec![n - 1 + t, n - 2 + t, n - 4 - t, n - 5 - t]);
    }
    // innermost arc triangle and outer triangle
    facets.push(vec![n - 2, n - 3, n - 4]);
    facets.push(vec![vmax, 2 * n - 6, 0]);
    // bottom spine facet
    let mut bot = vec![vmax];
    for v in (0..=n - 3).rev() {
        bot.push(v);
    }
    facets.push(bot);
    // top spine facet, numbered last
    let mut top = vec![vmax];
    for v in ((n - 3)..=(2 * n - 6)).rev() {
        top.push(v);
    }
    top[1..].reverse();
    facets.push(top);
    CombinatorialInstance::new(format!("klee-{n}"), facets, m, 2 * n - 6)
}

// ---------------------------------------------------------------------
// gd: greatest-decrease worst case
// ---------------------------------------------------------------------

/// Blocks of four vertices; the greatest decrease rule skips one
/// 2-vertex per block and needs 3(n-3)/2 steps from `v_{2n-6}`.
pub fn gd(n: usize) -> CombinatorialInstance {
    assert!(n >= 7 && n % 2 == 1);
    let blocks = (n - 3) / 2;
    let m = 2 * n - 4;
    let vmax = m - 1;
    let a = |t: usize| 2 * n - 4 * t - 2;
    let b = |t: usize| 2 * n - 4 * t - 3;
    let c = |t: usize| 2 * n - 4 * t - 4;
    let d = |t: usize| 2 * n - 4 * t - 5;

    let mut facets: Vec<Vec<VertexId>> = Vec::new();
    for t in 1..=blocks {
        facets.push(vec![a(t), b(t), d(t), c(t)]);
    }
    for t in 1..blocks {
        facets.push(vec![b(t), c(t + 1), a(t + 1), d(t)]);
    }
    facets.push(vec![vmax, a(1), c(1)]);
    facets.push(vec![b(blocks), d(blocks), 0]);
    // the two zigzag facets
    let mut f1 = vec![vmax];
    let mut f2 = vec![vmax];
    for t in 1..=blocks {
        if t % 2 == 1 {
            f1.push(a(t));
            f1.push(b(t));
            f2.push(c(t));
            f2.push(d(t));
        } else {
            f1.push(c(t));
            f1.push(d(t));
            f2.push(a(t));
            f2.push(b(t));
        }
    }
    f1.push(0);
    f2.push(0);
    facets.push(f1);
    facets.push(f2);
    CombinatorialInstance::new(format!("gd-{n}"), facets, m, 2 * n - 6)
}

// ---------------------------------------------------------------------
// rf-lower: random-facet worst case
// ---------------------------------------------------------------------

/// The big facet `f` carries a chain of `b` 1-vertices; at each of
/// them the recursion commits to `f` with probability 1/2 and then
/// walks the whole chain down to `opt(f) = v_a` before sweeping the
/// low chain. `n = a + b + 3` facets, `2a + 2b + 2` vertices.
pub fn rf_lower(a: usize, b: usize) -> CombinatorialInstance {
    assert!(a >= 1 && b >= 1);
    let vmax = 2 * a + 2 * b + 1;
    let o = |i: usize| 2 * a + 2 * i - 1; // i = 1..=b
    let e = |i: usize| 2 * a + 2 * i; // i = 1..=b
    let mv = |j: usize| a + j; // j = 0..=a
    let lv = |j: usize| j; // j = 0..a

    let mut facets: Vec<Vec<VertexId>> = Vec::new();
    // f: the big facet
    let mut f = vec![vmax];
    for i in (1..=b).rev() {
        f.push(o(i));
    }
    for j in (0..=a).rev() {
        f.push(mv(j));
    }
    facets.push(f);
    // quads between the 1-vertex chain and its companions
    for i in 1..b {
        facets.push(vec![e(i + 1), o(i + 1), o(i), e(i)]);
    }
    // top triangle
    facets.push(vec![vmax, o(b), e(b)]);
    // staircase quads between the middle and low chains
    for j in 1..a {
        facets.push(vec![mv(j + 1), mv(j), lv(a - j), lv(a - j - 1)]);
    }
    // wrap triangle at the right end of the staircase
    facets.push(vec![mv(1), mv(0), lv(a - 1)]);
    // quad behind the first 1-vertex
    facets.push(vec![e(1), o(1), mv(a), lv(0)]);
    // back facet
    let mut w = vec![vmax];
    for i in (1..=b).rev() {
        w.push(e(i));
    }
    for j in 0..a {
        w.push(lv(j));
    }
    w.push(mv(0));
    facets.push(w);

    CombinatorialInstance::new(
        format!("rf-lower-{a}-{b}"),
        facets,
        2 * a + 2 * b + 2,
        o(b),
    )
}

/// Least-entered/random-facet variant family: the `b` 1-vertices of
/// `rf_lower` are cut off, creating the triangles whose sources flip a
/// fair coin between leaving and keeping the big facet.
pub fn le_re(a: usize, b: usize) -> CombinatorialInstance {
    let base = rf_lower(a, b);
    let mut bld = builder::PolyBuilder::from_instance(&base);
    // cut the 1-vertices o_b, ..., o_1 (any order works; go top down)
    for i in (1..=b).rev() {
        let o = 2 * a + 2 * i - 1;
        let w = bld.key_of_rank(o);
        let in_chain = bld.neighbor_towards(w, |r| r > o && r != 2 * a + 2 * i);
        let in_rung = bld.key_of_rank(2 * a + 2 * i);
        let out = bld.neighbor_towards(w, |r| r < o);
        bld.truncate(w, [in_chain, in_rung, out]);
    }
    let start = bld.num_vertices() - 2; // rank of p_b, just below e_b
    bld.freeze(format!("le-re-{a}-{b}"), start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_mk, validate, vertex_profile, Instance};

    fn assert_valid(inst: &CombinatorialInstance) {
        let report = validate(&Instance::Combinatorial(inst.clone()));
        assert!(report.ok(), "{}: {:?}", inst.name, report.violations);
        let mk = check_mk(inst);
        assert!(
            mk.realizable(),
            "{}: facet_sink_ok={} bad={:?} paths_ok={}",
            inst.name,
            mk.facet_sink_ok,
            mk.bad_facets,
            mk.disjoint_paths_ok
        );
    }

    #[test]
    fn klee_members_are_valid() {
        for n in 6..=20 {
            let inst = klee(n);
            assert_eq!(inst.num_facets(), n);
            assert_eq!(inst.num_vertices, 2 * n - 4);
            assert_valid(&inst);
        }
    }

    #[test]
    fn klee_bottom_chain_forces_long_paths() {
        // below v_{n-3} every vertex has a single improving edge, so
        // the shortest monotone path from v_{n-3} has length exactly n-3
        for n in [6, 9, 14] {
            let inst = klee(n);
            let orient = crate::model::orientation_of(&inst);
            for v in 1..=(n - 3) {
                assert_eq!(orient.out_degree(v), 1, "n={n} v={v}");
                assert_eq!(orient.out_neighbors[v][0], v - 1);
            }
        }
    }

    #[test]
    fn gd_members_are_valid() {
        for n in (7..=31).step_by(2) {
            let inst = gd(n);
            assert_eq!(inst.num_facets(), n);
            assert_valid(&inst);
            let prof = vertex_profile(&inst);
            assert_eq!(prof.n1[inst.v_max()], n - 3);
            assert_eq!(prof.n2[inst.v_max()], n - 3);
        }
    }

    #[test]
    fn rf_lower_members_are_valid() {
        for (a, b) in [(1, 1), (2, 1), (1, 2), (4, 2), (9, 3), (6, 5)] {
            let inst = rf_lower(a, b);
            assert_eq!(inst.num_facets(), a + b + 3, "a={a} b={b}");
            assert_eq!(inst.num_vertices, 2 * a + 2 * b + 2);
            assert_eq!(inst.start, 2 * a + 2 * b - 1);
            assert_valid(&inst);
        }
    }

    #[test]
    fn le_re_members_are_valid() {
        for (a, b) in [(1, 1), (2, 1), (4, 2), (9, 3)] {
            let inst = le_re(a, b);
            assert_eq!(inst.num_facets(), a + 2 * b + 3, "a={a} b={b}");
            assert_eq!(inst.num_vertices, 2 * a + 4 * b + 2);
            assert_valid(&inst);
        }
    }

    #[test]
    fn family_round_trips_through_lp3_format() {
        let inst = generate_family(&FamilySpec::new(FamilyName::Klee, &[("n", 6)])).unwrap();
        let text = crate::model::serialize_instance(&inst);
        assert_eq!(crate::model::parse_instance(&text).unwrap(), inst);
    }
}
