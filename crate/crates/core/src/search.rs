//! Exhaustive enumeration of acyclic unique-sink orientations on given
//! simple 3-polytope graphs, plus the worst-case random-edge search
//! over them and a brute-force oracle for the tests.

use crate::expectation::{expected_random_edge_oriented, ExpectationTable};
use crate::model::{
    facet_sinks, CombinatorialInstance, Error, Instance, ValidationReport, VertexId,
};
use crate::rational::Rational;

/// A rank-free facet-cycle graph (`lp3graph v1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCatalogEntry {
    pub graph: CombinatorialInstance,
}

impl GraphCatalogEntry {
    pub fn new(graph: CombinatorialInstance) -> Self {
        let mut graph = graph;
        graph.rank_free = true;
        GraphCatalogEntry { graph }
    }

    pub fn validate(&self) -> ValidationReport {
        crate::model::validate(&Instance::Combinatorial(self.graph.clone()))
    }
}

/// One orientation: direction per edge in the canonical edge order;
/// `true` means the edge points from the smaller vertex label to the
/// larger one.
pub type OrientationVector = Vec<bool>;

/// Materializes out-neighbor lists from an orientation vector.
pub fn out_neighbors_of(
    graph: &CombinatorialInstance,
    orientation: &[bool],
) -> Vec<Vec<VertexId>> {
    let edges = graph.edges();
    let mut out = vec![Vec::new(); graph.num_vertices];
    for (idx, &(hi, lo)) in edges.iter().enumerate() {
        // canonical edge (hi, lo) with hi > lo; direction flag true
        // means lo -> hi
        if orientation[idx] {
            out[lo].push(hi);
        } else {
            out[hi].push(lo);
        }
    }
    out
}

/// Yields every acyclic orientation with a unique sink in every facet,
/// each exactly once, in lexicographic order on the direction vector
/// over the canonical edge order.
pub fn enumerate_ausos(graph: &CombinatorialInstance) -> Vec<OrientationVector> {
    let mut results = Vec::new();
    for_each_auso(graph, |o| {
        results.push(o.to_vec());
        true
    });
    results
}

/// Backtracking enumeration with incremental cycle detection and
/// facet-sink feasibility pruning. The callback returns false to stop.
pub fn for_each_auso(
    graph: &CombinatorialInstance,
    mut callback: impl FnMut(&[bool]) -> bool,
) -> bool {
    let edges = graph.edges();
    let m = graph.num_vertices;
    // edge ids per facet for incremental checks
    let edge_index = |u: VertexId, v: VertexId| -> usize {
        let key = (u.max(v), u.min(v));
        edges.binary_search(&key).expect("edge exists")
    };
    let facet_edges: Vec<Vec<(usize, VertexId, VertexId)>> = graph
        .facets
        .iter()
        .map(|cycle| {
            let k = cycle.len();
            (0..k)
                .map(|i| {
                    let u = cycle[i];
                    let v = cycle[(i + 1) % k];
                    (edge_index(u, v), u, v)
                })
                .collect()
        })
        .collect();
    let vertex_facets = graph.vertex_facets();

    let mut direction: Vec<Option<bool>> = vec![None; edges.len()];
    let mut out: Vec<Vec<VertexId>> = vec![Vec::new(); m];

    // directed reachability on the partial orientation
    fn reaches(out: &[Vec<VertexId>], from: VertexId, to: VertexId) -> bool {
        if from == to {
            return true;
        }
        let mut stack = vec![from];
        let mut seen = vec![false; out.len()];
        seen[from] = true;
        while let Some(x) = stack.pop() {
            for &y in &out[x] {
                if y == to {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    // facet feasibility: on the partial orientation each facet must
    // still be able to end with exactly one sink.
    let facet_feasible = |facet: usize,
                          direction: &[Option<bool>],
                          facet_edges: &[Vec<(usize, VertexId, VertexId)>],
                          cycle: &[VertexId]|
     -> bool {
        let k = cycle.len();
        let mut sinks = 0usize;
        let mut undecided = 0usize;
        for (i, &v) in cycle.iter().enumerate() {
            // v's two facet edges
            let e1 = &facet_edges[facet][i];
            let e2 = &facet_edges[facet][(i + k - 1) % k];
            let mut has_out = false;
            let mut unknown = false;
            for e in [e1, e2] {
                let (idx, a, b) = *e;
                match direction[idx] {
                    None => unknown = true,
                    Some(dir) => {
                        // dir true: min(a,b) -> max(a,b)
                        let (hi, lo) = (a.max(b), a.min(b));
                        let src = if dir { lo } else { hi };
                        if src == v {
                            has_out = true;
                        }
                    }
                }
            }
            if !has_out {
                if unknown {
                    undecided += 1;
                } else {
                    sinks += 1;
                }
            }
        }
        sinks + if undecided > 0 { 1 } else { 0 } >= 1 && sinks <= 1
    };

    fn rec(
        idx: usize,
        edges: &[(VertexId, VertexId)],
        direction: &mut Vec<Option<bool>>,
        out: &mut Vec<Vec<VertexId>>,
        graph: &CombinatorialInstance,
        facet_edges: &[Vec<(usize, VertexId, VertexId)>],
        vertex_facets: &[Vec<usize>],
        facet_feasible: &dyn Fn(
            usize,
            &[Option<bool>],
            &[Vec<(usize, VertexId, VertexId)>],
            &[VertexId],
        ) -> bool,
        reaches: &dyn Fn(&[Vec<VertexId>], VertexId, VertexId) -> bool,
        callback: &mut dyn FnMut(&[bool]) -> bool,
    ) -> bool {
        if idx == edges.len() {
            let full: Vec<bool> = direction.iter().map(|d| d.unwrap()).collect();
            return callback(&full);
        }
        let (hi, lo) = edges[idx];
        // lexicographic: false (hi -> lo) before true (lo -> hi)
        for dir in [false, true] {
            let (src, dst) = if dir { (lo, hi) } else { (hi, lo) };
            // acyclicity: adding src -> dst closes a cycle iff dst
            // already reaches src
            if reaches(out, dst, src) {
                continue;
            }
            direction[idx] = Some(dir);
            out[src].push(dst);
            let ok = vertex_facets[src]
                .iter()
                .chain(vertex_facets[dst].iter())
                .all(|&f| facet_feasible(f, direction, facet_edges, &graph.facets[f]));
            let keep_going = if ok {
                rec(
                    idx + 1,
                    edges,
                    direction,
                    out,
                    graph,
                    facet_edges,
                    vertex_facets,
                    facet_feasible,
                    reaches,
                    callback,
                )
            } else {
                true
            };
            out[src].pop();
            direction[idx] = None;
            if !keep_going {
                return false;
            }
        }
        true
    }

    rec(
        0,
        &edges,
        &mut direction,
        &mut out,
        graph,
        &facet_edges,
        &vertex_facets,
        &facet_feasible,
        &reaches,
        &mut callback,
    )
}

/// Ground truth: filters all 2^(3n-6) orientations by acyclicity and
/// the facet-sink condition. Capped at 30 edges.
pub fn brute_force_ausos(graph: &CombinatorialInstance) -> Result<Vec<OrientationVector>, Error> {
    let edges = graph.edges();
    if edges.len() > 30 {
        return Err(Error::Unsupported(format!(
            "{} edges exceed the brute force cap of 30",
            edges.len()
        )));
    }
    let mut results = Vec::new();
    'outer: for mask in 0u64..(1u64 << edges.len()) {
        let orientation: Vec<bool> = (0..edges.len()).map(|i| mask >> i & 1 == 1).collect();
        let out = out_neighbors_of(graph, &orientation);
        // acyclic?
        let mut indeg = vec![0usize; graph.num_vertices];
        for list in &out {
            for &u in list {
                indeg[u] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..graph.num_vertices).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        let mut q = queue.clone();
        while let Some(v) = q.pop() {
            seen += 1;
            for &u in &out[v] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    q.push(u);
                }
            }
        }
        queue.clear();
        if seen != graph.num_vertices {
            continue;
        }
        for cycle in &graph.facets {
            let sinks = facet_sinks(cycle, |u, v| out[u].contains(&v));
            if sinks.len() != 1 {
                continue 'outer;
            }
        }
        results.push(orientation);
    }
    Ok(results)
}

/// One worst-case search result: an orientation, a start vertex, and
/// the exact random-edge expectation, plus a rank-relabeled instance
/// snapshot realizing the orientation.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub orientation_index: usize,
    pub orientation: OrientationVector,
    pub start: VertexId,
    pub expectation: Rational,
    pub snapshot: CombinatorialInstance,
    /// whether the orientation also satisfies the disjoint-paths
    /// condition (realizable as a polytope orientation)
    pub polytopal: bool,
}

/// Rank-relabel the graph so the orientation becomes the rank
/// orientation: ids by a canonical (lexicographically smallest)
/// topological order, sinks first.
pub fn snapshot_with_ranks(
    graph: &CombinatorialInstance,
    out: &[Vec<VertexId>],
    start: VertexId,
    name: String,
) -> (CombinatorialInstance, Vec<VertexId>) {
    let m = graph.num_vertices;
    let mut outdeg: Vec<usize> = out.iter().map(|o| o.len()).collect();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (v, list) in out.iter().enumerate() {
        for &u in list {
            rev[u].push(v);
        }
    }
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..m)
        .filter(|&v| outdeg[v] == 0)
        .map(std::cmp::Reverse)
        .collect();
    let mut id_of = vec![usize::MAX; m];
    let mut next_id = 0usize;
    while let Some(std::cmp::Reverse(v)) = heap.pop() {
        id_of[v] = next_id;
        next_id += 1;
        for &w in &rev[v] {
            outdeg[w] -= 1;
            if outdeg[w] == 0 {
                heap.push(std::cmp::Reverse(w));
            }
        }
    }
    let facets = graph
        .facets
        .iter()
        .map(|cycle| cycle.iter().map(|&v| id_of[v]).collect())
        .collect();
    let inst = CombinatorialInstance::new(name, facets, m, id_of[start]);
    (inst, id_of)
}

/// Scores a slice of orientations: every (orientation, start) pair
/// with its exact expectation and rank-relabeled snapshot. Pure, so
/// slices may be scored on parallel workers and merged; the result is
/// independent of the schedule.
pub fn score_orientations(
    graph: &CombinatorialInstance,
    orientations: &[OrientationVector],
    index_offset: usize,
) -> Vec<SearchResult> {
    let mut results = Vec::new();
    for (i, orientation) in orientations.iter().enumerate() {
        let index = index_offset + i;
        let out = out_neighbors_of(graph, orientation);
        let table: ExpectationTable = expected_random_edge_oriented(&out);
        for start in 0..graph.num_vertices {
            let expectation = table.values[start].clone();
            let (snapshot, _) = snapshot_with_ranks(
                graph,
                &out,
                start,
                format!("{}-auso{}-s{}", graph.name, index, start),
            );
            let polytopal = crate::model::check_mk(&snapshot).realizable();
            results.push(SearchResult {
                orientation_index: index,
                orientation: orientation.clone(),
                start,
                expectation,
                snapshot,
                polytopal,
            });
        }
    }
    results
}

/// The `top` highest exact expectations over (AUSO, start) pairs, in a
/// deterministic order: expectation descending, then orientation index,
/// then start vertex.
pub fn worst_case_random_edge(graph: &CombinatorialInstance, top: usize) -> Vec<SearchResult> {
    let orientations = enumerate_ausos(graph);
    let mut results = score_orientations(graph, &orientations, 0);
    results.sort_by(|x, y| {
        y.expectation
            .cmp(&x.expectation)
            .then(x.orientation_index.cmp(&y.orientation_index))
            .then(x.start.cmp(&y.start))
    });
    results.truncate(top);
    results
}

/// Catalog of simple 3-polytope graphs generated from the tetrahedron
/// by repeated vertex cutting, deduplicated up to isomorphism.
/// Exhaustive for the cut-generated class, documented per n.
pub fn cut_catalog(max_facets: usize) -> Vec<GraphCatalogEntry> {
    use crate::families::builder::PolyBuilder;
    let mut all: Vec<CombinatorialInstance> = vec![crate::model::tetrahedron()];
    let mut frontier = vec![crate::model::tetrahedron()];
    while let Some(inst) = frontier.pop() {
        if inst.num_facets() >= max_facets {
            continue;
        }
        for v in 0..inst.num_vertices {
            let mut bld = PolyBuilder::from_instance(&inst);
            let mut nbrs = bld.neighbors(v);
            nbrs.sort_unstable();
            bld.truncate(v, [nbrs[0], nbrs[1], nbrs[2]]);
            let cut = bld.freeze(
                format!("cut-{}-{}", inst.num_facets() + 1, all.len()),
                0,
            );
            if all
                .iter()
                .filter(|g| g.num_facets() == cut.num_facets())
                .all(|g| !isomorphic(g, &cut))
            {
                all.push(cut.clone());
                frontier.push(cut);
            }
        }
    }
    all.sort_by_key(|g| g.num_facets());
    all.into_iter()
        .enumerate()
        .map(|(i, mut g)| {
            g.name = format!("graph-n{}-{}", g.num_facets(), i);
            GraphCatalogEntry::new(g)
        })
        .collect()
}

/// The graph catalogs shipped with the repo (`data/catalogs/`),
/// generated from the tetrahedron by repeated vertex cutting and
/// deduplicated up to isomorphism: one graph each at n = 4, 5, 6 and
/// three at n = 7. (The n = 6 cube and two further n = 7 types have
/// vertices on three quadrilaterals and are not cut-generated.)
pub fn shipped_catalog() -> Vec<GraphCatalogEntry> {
    const FILES: [&str; 6] = [
        include_str!("../data/catalogs/graph-n4-0.lp3g"),
        include_str!("../data/catalogs/graph-n5-1.lp3g"),
        include_str!("../data/catalogs/graph-n6-2.lp3g"),
        include_str!("../data/catalogs/graph-n7-3.lp3g"),
        include_str!("../data/catalogs/graph-n7-4.lp3g"),
        include_str!("../data/catalogs/graph-n7-5.lp3g"),
    ];
    FILES
        .iter()
        .map(|text| {
            let inst = crate::model::parse_instance(text).expect("shipped catalog parses");
            match inst {
                Instance::Combinatorial(graph) => GraphCatalogEntry { graph },
                Instance::Geometric(_) => unreachable!("catalogs are combinatorial"),
            }
        })
        .collect()
}

/// Graph isomorphism by brute force over degree-compatible vertex
/// bijections; fine at catalog sizes.
fn isomorphic(g1: &CombinatorialInstance, g2: &CombinatorialInstance) -> bool {
    if g1.num_vertices != g2.num_vertices || g1.num_facets() != g2.num_facets() {
        return false;
    }
    let mut sizes1: Vec<usize> = g1.facets.iter().map(|f| f.len()).collect();
    let mut sizes2: Vec<usize> = g2.facets.iter().map(|f| f.len()).collect();
    sizes1.sort_unstable();
    sizes2.sort_unstable();
    if sizes1 != sizes2 {
        return false;
    }
    let a1 = g1.adjacency();
    let a2 = g2.adjacency();
    let m = g1.num_vertices;
    // backtracking assignment
    fn extend(
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        v: usize,
        a1: &[Vec<usize>],
        a2: &[Vec<usize>],
    ) -> bool {
        if v == a1.len() {
            return true;
        }
        'cand: for c in 0..a2.len() {
            if used[c] || a2[c].len() != a1[v].len() {
                continue;
            }
            for &u in &a1[v] {
                if u < v {
                    let mu = map[u].unwrap();
                    if !a2[c].contains(&mu) {
                        continue 'cand;
                    }
                }
            }
            // mapped neighbors count must match
            map[v] = Some(c);
            used[c] = true;
            if extend(map, used, v + 1, a1, a2) {
                return true;
            }
            map[v] = None;
            used[c] = false;
        }
        false
    }
    let mut map = vec![None; m];
    let mut used = vec![false; m];
    extend(&mut map, &mut used, 0, &a1, &a2)
}
