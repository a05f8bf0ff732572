//! Exact expected path lengths for the randomized pivot rules.
//!
//! The random edge rule is handled by the downward recursion
//! `E(v) = 1 + avg E(out(v))` and by the equivalent flow model; the
//! random facet variants are absorbing chains solved exactly over the
//! rationals.

use std::collections::HashMap;

use num_traits::Zero;

use crate::model::{orientation_of, CombinatorialInstance, Error, FacetId, VertexId};
use crate::rational::{rint, Rational};

/// Per-vertex expected number of steps to reach `v_min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationTable {
    pub values: Vec<Rational>,
}

impl ExpectationTable {
    pub fn at(&self, v: VertexId) -> &Rational {
        &self.values[v]
    }
}

/// Visit probabilities of the random edge walk from a fixed start:
/// `p(v)` per vertex and `p(e)` per directed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowAssignment {
    pub source: VertexId,
    pub vertex_p: Vec<Rational>,
    /// keyed (from, to) with from > to
    pub edge_p: Vec<((VertexId, VertexId), Rational)>,
}

impl FlowAssignment {
    pub fn edge(&self, from: VertexId, to: VertexId) -> Rational {
        self.edge_p
            .iter()
            .find(|((f, t), _)| *f == from && *t == to)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }
}

/// `E(v) = 1 + (1/outdeg) * sum E(u)`, computed in increasing rank
/// order. The optional start is irrelevant to the table and kept for
/// interface symmetry with the flow model.
pub fn expected_random_edge(inst: &CombinatorialInstance) -> ExpectationTable {
    let orient = orientation_of(inst);
    expected_random_edge_oriented(&orient.out_neighbors)
}

/// Same recursion over an explicit out-neighbor list (used by the AUSO
/// search, where orientations are not rank-induced).
pub fn expected_random_edge_oriented(out: &[Vec<VertexId>]) -> ExpectationTable {
    let m = out.len();
    let mut values = vec![Rational::zero(); m];
    // process vertices in topological order (sinks first)
    let order = topo_order(out);
    for &v in order.iter() {
        if out[v].is_empty() {
            continue;
        }
        let mut sum = Rational::zero();
        for &u in &out[v] {
            sum += &values[u];
        }
        values[v] = rint(1) + sum / rint(out[v].len() as i64);
    }
    ExpectationTable { values }
}

fn topo_order(out: &[Vec<VertexId>]) -> Vec<VertexId> {
    let m = out.len();
    let mut indeg = vec![0usize; m];
    for list in out {
        for &u in list {
            indeg[u] += 1;
        }
    }
    // reverse topological: start from sinks by processing the DAG
    // backwards; since edges go high rank to low rank in instances this
    // is just 0..m, but AUSO orientations need the general version.
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut outdeg = vec![0usize; m];
    for (v, list) in out.iter().enumerate() {
        outdeg[v] = list.len();
        for &u in list {
            rev[u].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..m).filter(|&v| outdeg[v] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &rev[v] {
            outdeg[w] -= 1;
            if outdeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    debug_assert_eq!(order.len(), m, "orientation contains a cycle");
    let _ = indeg;
    order
}

/// The flow model: `p(source) = 1`, `p(e) = p(v)/outdeg(v)`, vertex
/// balance everywhere below the source.
pub fn random_edge_flow(inst: &CombinatorialInstance, start: VertexId) -> FlowAssignment {
    let orient = orientation_of(inst);
    let m = inst.num_vertices;
    let mut vertex_p = vec![Rational::zero(); m];
    vertex_p[start] = rint(1);
    let mut edge_p = Vec::new();
    for v in (0..m).rev() {
        if vertex_p[v].is_zero() {
            continue;
        }
        let outs = &orient.out_neighbors[v];
        if outs.is_empty() {
            continue;
        }
        let share = &vertex_p[v] / rint(outs.len() as i64);
        for &u in outs {
            edge_p.push(((v, u), share.clone()));
            let add = share.clone();
            vertex_p[u] += add;
        }
    }
    edge_p.sort_by(|a, b| a.0.cmp(&b.0));
    FlowAssignment {
        source: start,
        vertex_p,
        edge_p,
    }
}

/// `E(v_start) = sum over edges of p(e)`: the cost of the flow.
pub fn flow_cost(flow: &FlowAssignment) -> Rational {
    let mut sum = Rational::zero();
    for (_, p) in &flow.edge_p {
        sum += p;
    }
    sum
}

// ---------------------------------------------------------------------
// Random facet variants
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomFacetVariant {
    Rf,
    Rf1,
    Rf2,
}

struct FacetProblem {
    /// cycle of the facet, as stored in the instance
    cycle: Vec<VertexId>,
    /// index of each vertex within `cycle`
    pos: HashMap<VertexId, usize>,
    opt: VertexId,
}

impl FacetProblem {
    fn new(cycle: &[VertexId]) -> Self {
        let pos: HashMap<VertexId, usize> = cycle.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
        let opt = *cycle.iter().min().unwrap();
        FacetProblem {
            cycle: cycle.to_vec(),
            pos,
            opt,
        }
    }

    fn neighbors(&self, v: VertexId) -> [VertexId; 2] {
        let k = self.cycle.len();
        let i = self.pos[&v];
        [self.cycle[(i + 1) % k], self.cycle[(i + k - 1) % k]]
    }
}

/// Expected steps to reach `opt(F)` from every facet vertex, for one
/// facet polygon under one variant. Self-loops (picking the edge whose
/// optimum we already sit at) are eliminated linearly.
fn facet_expectations(problem: &FacetProblem, variant: RandomFacetVariant) -> HashMap<VertexId, Rational> {
    // vertices sorted increasing: each value depends only on lower ones,
    // so no global system is needed at polygon level.
    let mut order = problem.cycle.clone();
    order.sort_unstable();
    let mut e: HashMap<VertexId, Rational> = HashMap::new();
    e.insert(problem.opt, Rational::zero());
    for &v in &order {
        if v == problem.opt {
            continue;
        }
        let [a, b] = problem.neighbors(v);
        let downs: Vec<VertexId> = [a, b].into_iter().filter(|&w| w < v).collect();
        let val = match variant {
            RandomFacetVariant::Rf => {
                // pick one of the 2 polygon edges uniformly; an up edge
                // is a 0-step stay, i.e. a self-loop:
                //   e(v) = sum_down (1/2)(1 + e(w)) + (ups/2) e(v)
                // solved for e(v).
                let mut sum = Rational::zero();
                for &w in &downs {
                    sum += rint(1) + e[&w].clone();
                }
                sum / rint(downs.len() as i64)
            }
            RandomFacetVariant::Rf1 => {
                // unique improving edge within the subproblem is taken
                // deterministically; a polygon 2-vertex averages.
                let mut sum = Rational::zero();
                for &w in &downs {
                    sum += rint(1) + e[&w].clone();
                }
                sum / rint(downs.len() as i64)
            }
            RandomFacetVariant::Rf2 => {
                // choose one of the 2 edge faces, walk to its optimum,
                // then take one deterministic step out of it.
                let mut sum = Rational::zero();
                for w in [a, b] {
                    let (steps_to_min, min_v) = if w < v {
                        (rint(1), w)
                    } else {
                        (Rational::zero(), v)
                    };
                    let continuation = if min_v == problem.opt {
                        Rational::zero()
                    } else {
                        // min_v has exactly one improving polygon edge
                        let [x, y] = problem.neighbors(min_v);
                        let next = if x < min_v { x } else { y };
                        debug_assert!(next < min_v);
                        rint(1) + e[&next].clone()
                    };
                    sum += steps_to_min + continuation;
                }
                sum / rint(2)
            }
        };
        e.insert(v, val);
    }
    e
}

/// Exact expectations of the random facet rule and its variants, from
/// the Markov chain semantics, by solving the induced sparse linear
/// system over the rationals.
pub fn expected_random_facet(
    inst: &CombinatorialInstance,
    variant: RandomFacetVariant,
) -> Result<ExpectationTable, Error> {
    let m = inst.num_vertices;
    for (fid, cycle) in inst.facets.iter().enumerate() {
        if crate::model::facet_sinks(cycle, |u, v| u > v).len() != 1 {
            return Err(Error::Invalid(format!(
                "facet {fid} does not have a unique sink"
            )));
        }
    }
    let vf = inst.vertex_facets();
    let orient = orientation_of(inst);
    let problems: Vec<FacetProblem> = inst.facets.iter().map(|c| FacetProblem::new(c)).collect();
    let facet_tables: Vec<HashMap<VertexId, Rational>> = problems
        .iter()
        .map(|p| facet_expectations(p, variant))
        .collect();

    // unknowns E(1..m-1); E(0) = 0. Build m-1 linear equations.
    let dim = m - 1;
    let idx = |v: VertexId| v - 1;
    let mut a = vec![vec![Rational::zero(); dim]; dim];
    let mut b = vec![Rational::zero(); dim];
    for v in 1..m {
        let row = idx(v);
        a[row][idx(v)] = rint(1);
        if variant == RandomFacetVariant::Rf1 && orient.out_degree(v) == 1 {
            // deterministic exit at a global 1-vertex
            let u = orient.out_neighbors[v][0];
            b[row] += rint(1);
            if u != 0 {
                a[row][idx(u)] -= rint(1);
            }
            continue;
        }
        let third = Rational::new(1.into(), 3.into());
        for &f in &vf[v] {
            let opt = problems[f].opt;
            b[row] += &third * &facet_tables[f][&v];
            match variant {
                RandomFacetVariant::Rf | RandomFacetVariant::Rf1 => {
                    // resume the top level at opt(f); re-picking a facet
                    // we are already optimal in is a self-loop.
                    if opt != 0 {
                        a[row][idx(opt)] -= third.clone();
                    }
                }
                RandomFacetVariant::Rf2 => {
                    // one deterministic step out of opt(f), then recurse
                    if opt != 0 {
                        let next = orient.out_neighbors[opt][0];
                        debug_assert_eq!(orient.out_degree(opt), 1);
                        b[row] += third.clone();
                        if next != 0 {
                            a[row][idx(next)] -= third.clone();
                        }
                    }
                }
            }
        }
    }
    let solution = solve_linear_system(a, b)?;
    let mut values = vec![Rational::zero(); m];
    for v in 1..m {
        values[v] = solution[idx(v)].clone();
    }
    Ok(ExpectationTable { values })
}

/// Dense Gaussian elimination over the rationals with pivoting on the
/// first nonzero entry.
pub fn solve_linear_system(
    mut a: Vec<Vec<Rational>>,
    mut b: Vec<Rational>,
) -> Result<Vec<Rational>, Error> {
    let dim = b.len();
    for col in 0..dim {
        let pivot_row = (col..dim)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Invalid("singular linear system".to_string()))?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for r in 0..dim {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..dim {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); dim];
    for i in 0..dim {
        x[i] = &b[i] / &a[i][i];
    }
    Ok(x)
}

// ---------------------------------------------------------------------
// Exact least-entered with random-edge tie-break
// ---------------------------------------------------------------------

/// Exact expected steps of the least-entered rule with random-edge
/// tie-breaking, by memoized expansion over (vertex, counter-vector)
/// states. Intended for small instances; the reachable state space is
/// capped.
pub fn exact_least_entered_re(
    inst: &CombinatorialInstance,
    start: VertexId,
    state_cap: usize,
) -> Result<Rational, Error> {
    let orient = orientation_of(inst);
    let vf = inst.vertex_facets();
    // left facet of each directed edge
    let mut left: HashMap<(VertexId, VertexId), FacetId> = HashMap::new();
    for v in 0..inst.num_vertices {
        for &u in &orient.out_neighbors[v] {
            let f = inst
                .left_facet(v, u)
                .ok_or_else(|| Error::Invalid(format!("no unique left facet for step {v}->{u}")))?;
            left.insert((v, u), f);
        }
    }
    let _ = vf;

    let mut memo: HashMap<(VertexId, Vec<u16>), Rational> = HashMap::new();
    let counters = vec![0u16; inst.num_facets()];
    let result = le_re_rec(start, counters, &orient, &left, &mut memo, state_cap)?;
    Ok(result)
}

fn le_re_rec(
    v: VertexId,
    counters: Vec<u16>,
    orient: &crate::model::Orientation,
    left: &HashMap<(VertexId, VertexId), FacetId>,
    memo: &mut HashMap<(VertexId, Vec<u16>), Rational>,
    cap: usize,
) -> Result<Rational, Error> {
    if v == 0 {
        return Ok(Rational::zero());
    }
    let key = (v, counters.clone());
    if let Some(hit) = memo.get(&key) {
        return Ok(hit.clone());
    }
    if memo.len() >= cap {
        return Err(Error::Unsupported(
            "state space too large, use Monte Carlo".to_string(),
        ));
    }
    let outs = &orient.out_neighbors[v];
    let min_count = outs
        .iter()
        .map(|&u| counters[left[&(v, u)]])
        .min()
        .expect("non-sink vertex has improving edges");
    let eligible: Vec<VertexId> = outs
        .iter()
        .copied()
        .filter(|&u| counters[left[&(v, u)]] == min_count)
        .collect();
    let mut sum = Rational::zero();
    for &u in &eligible {
        let mut next = counters.clone();
        next[left[&(v, u)]] += 1;
        sum += le_re_rec(u, next, orient, left, memo, cap)?;
    }
    let value = rint(1) + sum / rint(eligible.len() as i64);
    memo.insert(key, value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tetrahedron;
    use crate::rational::rat;

    /// Brute-force oracle: enumerate all monotone paths with their
    /// probabilities and average the lengths.
    fn brute_force_expected(out: &[Vec<VertexId>], v: VertexId) -> Rational {
        if out[v].is_empty() {
            return Rational::zero();
        }
        let mut sum = Rational::zero();
        for &u in &out[v] {
            sum += rint(1) + brute_force_expected(out, u);
        }
        sum / rint(out[v].len() as i64)
    }

    #[test]
    fn tetrahedron_expectations_match_brute_force() {
        let t = tetrahedron();
        let table = expected_random_edge(&t);
        assert_eq!(table.values[0], rint(0));
        assert_eq!(table.values[1], rint(1));
        assert_eq!(table.values[2], rat(3, 2));
        assert_eq!(table.values[3], rat(11, 6));
        let orient = orientation_of(&t);
        for v in 0..4 {
            assert_eq!(table.values[v], brute_force_expected(&orient.out_neighbors, v));
        }
    }

    #[test]
    fn tetrahedron_flow_matches_recursion() {
        let t = tetrahedron();
        let flow = random_edge_flow(&t, 3);
        assert_eq!(flow.edge(3, 0), rat(1, 3));
        assert_eq!(flow.vertex_p[1], rat(1, 2));
        assert_eq!(flow.edge(1, 0), rat(1, 2));
        assert_eq!(flow.vertex_p[0], rint(1));
        assert_eq!(flow_cost(&flow), rat(11, 6));
        // degenerate start
        let idle = random_edge_flow(&t, 0);
        assert_eq!(flow_cost(&idle), rint(0));
        assert_eq!(idle.vertex_p[0], rint(1));
    }

    #[test]
    fn tetrahedron_random_facet_all_variants() {
        let t = tetrahedron();
        // hand-solved 4-state system for RF on the tetrahedron gives
        // the same 11/6 as random edge: at every vertex of K4 the facet
        // recursion collapses to uniform neighbor choice.
        for variant in [RandomFacetVariant::Rf, RandomFacetVariant::Rf1, RandomFacetVariant::Rf2] {
            let table = expected_random_facet(&t, variant).unwrap();
            assert_eq!(table.values[0], rint(0), "{variant:?}");
            assert_eq!(table.values[3], rat(11, 6), "{variant:?}");
        }
    }

    #[test]
    fn tetrahedron_least_entered_re_exact() {
        let t = tetrahedron();
        let value = exact_least_entered_re(&t, 3, 1 << 16).unwrap();
        // From v3 all counters are zero, RE picks uniformly among 3
        // improving edges; hand expansion over the <= 64 states gives:
        assert!(value > rint(1) && value < rint(3));
        // deterministic on a pure chain: tetrahedron from v1
        let chain = exact_least_entered_re(&t, 1, 1 << 16).unwrap();
        assert_eq!(chain, rint(1));
    }

    #[test]
    fn state_cap_reports_error() {
        let t = tetrahedron();
        let err = exact_least_entered_re(&t, 3, 1).unwrap_err();
        match err {
            Error::Unsupported(m) => assert!(m.contains("Monte Carlo")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
