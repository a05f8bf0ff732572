//! Core data types for LP-oriented simple 3-polytopes.
//!
//! Vertex ids double as objective ranks: id 0 is the global minimum
//! `v_min`, id `2n-5` the maximum `v_max`. Every edge is oriented from
//! the higher id to the lower one, so the orientation is acyclic by
//! construction and general position is structural.

use std::collections::BTreeMap;
use std::fmt;

use crate::rational::{format_rational, parse_rational, Rational};

pub type VertexId = usize;
pub type FacetId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Parse { line: usize, message: String },
    Invalid(String),
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error, line {line}: {message}"),
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl std::error::Error for Error {}

/// Facet-cycle description of a simple 3-polytope whose vertex ids are
/// objective ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialInstance {
    pub name: String,
    /// One cyclic vertex sequence per facet, indexed by facet id.
    pub facets: Vec<Vec<VertexId>>,
    pub num_vertices: usize,
    pub start: VertexId,
    /// When true the vertex ids carry no rank meaning (`lp3graph v1`).
    pub rank_free: bool,
}

/// A combinatorial instance plus exact vertex coordinates and the
/// objective vector(s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricInstance {
    pub base: CombinatorialInstance,
    pub coords: Vec<[Rational; 3]>,
    pub objective: [Rational; 3],
    pub aux_objective: Option<[Rational; 3]>,
}

/// Either flavour of parsed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Combinatorial(CombinatorialInstance),
    Geometric(GeometricInstance),
}

impl Instance {
    pub fn base(&self) -> &CombinatorialInstance {
        match self {
            Instance::Combinatorial(c) => c,
            Instance::Geometric(g) => &g.base,
        }
    }

    pub fn geometric(&self) -> Option<&GeometricInstance> {
        match self {
            Instance::Combinatorial(_) => None,
            Instance::Geometric(g) => Some(g),
        }
    }
}

impl CombinatorialInstance {
    pub fn new(
        name: impl Into<String>,
        facets: Vec<Vec<VertexId>>,
        num_vertices: usize,
        start: VertexId,
    ) -> Self {
        CombinatorialInstance {
            name: name.into(),
            facets,
            num_vertices,
            start,
            rank_free: false,
        }
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn v_max(&self) -> VertexId {
        self.num_vertices - 1
    }

    /// Unordered edge set (hi, lo), derived from consecutive facet
    /// cycle entries, deduplicated and sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for cycle in &self.facets {
            let k = cycle.len();
            for i in 0..k {
                let u = cycle[i];
                let v = cycle[(i + 1) % k];
                let e = (u.max(v), u.min(v));
                edges.push(e);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Neighbor lists derived from the edge set.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (u, v) in self.edges() {
            if u < self.num_vertices && v < self.num_vertices {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Facets containing each vertex.
    pub fn vertex_facets(&self) -> Vec<Vec<FacetId>> {
        let mut vf = vec![Vec::new(); self.num_vertices];
        for (fid, cycle) in self.facets.iter().enumerate() {
            for &v in cycle {
                if v < self.num_vertices {
                    vf[v].push(fid);
                }
            }
        }
        vf
    }

    /// Facet pair of every edge; `None` entries are missing in broken
    /// instances and caught by `validate`.
    pub fn edge_facets(&self) -> BTreeMap<(VertexId, VertexId), Vec<FacetId>> {
        let mut ef: BTreeMap<(VertexId, VertexId), Vec<FacetId>> = BTreeMap::new();
        for (fid, cycle) in self.facets.iter().enumerate() {
            let k = cycle.len();
            for i in 0..k {
                let u = cycle[i];
                let v = cycle[(i + 1) % k];
                ef.entry((u.max(v), u.min(v))).or_default().push(fid);
            }
        }
        ef
    }

    /// The facet a step `from -> to` leaves: the unique facet containing
    /// `from` but not `to`. Well defined on valid instances.
    pub fn left_facet(&self, from: VertexId, to: VertexId) -> Option<FacetId> {
        let vf = self.vertex_facets();
        let mut left = None;
        for &f in &vf[from] {
            if !self.facets[f].contains(&to) {
                if left.is_some() {
                    return None;
                }
                left = Some(f);
            }
        }
        left
    }
}

/// The rank orientation: out-neighbors are lower-ranked adjacent
/// vertices, ordered by descending target rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub out_neighbors: Vec<Vec<VertexId>>,
    pub in_neighbors: Vec<Vec<VertexId>>,
}

impl Orientation {
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_neighbors[v].len()
    }
}

/// Directs every edge from the higher id to the lower one.
pub fn orientation_of(inst: &CombinatorialInstance) -> Orientation {
    let mut out = vec![Vec::new(); inst.num_vertices];
    let mut inn = vec![Vec::new(); inst.num_vertices];
    for (hi, lo) in inst.edges() {
        out[hi].push(lo);
        inn[lo].push(hi);
    }
    for list in out.iter_mut().chain(inn.iter_mut()) {
        list.sort_unstable_by(|a, b| b.cmp(a));
    }
    Orientation {
        out_neighbors: out,
        in_neighbors: inn,
    }
}

/// Per-vertex counts of 1-vertices and 2-vertices at or below each
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexProfile {
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
}

impl VertexProfile {
    pub fn n(&self, v: VertexId) -> usize {
        self.n1[v] + self.n2[v]
    }
}

pub fn vertex_profile(inst: &CombinatorialInstance) -> VertexProfile {
    let orient = orientation_of(inst);
    let m = inst.num_vertices;
    let mut n1 = vec![0usize; m];
    let mut n2 = vec![0usize; m];
    let mut c1 = 0;
    let mut c2 = 0;
    for v in 0..m {
        match orient.out_degree(v) {
            1 => c1 += 1,
            2 => c2 += 1,
            _ => {}
        }
        n1[v] = c1;
        n2[v] = c2;
    }
    VertexProfile { n1, n2 }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
    pub witnesses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn push(violations: &mut Vec<Violation>, code: &'static str, message: String, witnesses: Vec<usize>) {
    violations.push(Violation {
        code,
        message,
        witnesses,
    });
}

/// Structural validation: simplicity counts, facet incidences, cycle
/// shape, and (for geometric instances) rank/coordinate consistency.
/// Always returns a report, never aborts.
pub fn validate(inst: &Instance) -> ValidationReport {
    let base = inst.base();
    let mut violations = Vec::new();
    let n = base.num_facets();
    let m = base.num_vertices;

    if m != 2 * n - 4 {
        push(
            &mut violations,
            "vertex-count",
            format!("expected 2n-4 = {} vertices, found {}", 2 * n - 4, m),
            vec![],
        );
    }

    for (fid, cycle) in base.facets.iter().enumerate() {
        if cycle.len() < 3 {
            push(
                &mut violations,
                "facet-too-small",
                format!("facet {fid} has fewer than 3 vertices"),
                vec![fid],
            );
        }
        let mut seen = cycle.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != cycle.len() {
            push(
                &mut violations,
                "facet-repeats-vertex",
                format!("facet {fid} lists a vertex twice"),
                vec![fid],
            );
        }
        if let Some(&v) = cycle.iter().find(|&&v| v >= m) {
            push(
                &mut violations,
                "vertex-out-of-range",
                format!("facet {fid} references vertex {v} out of range"),
                vec![fid, v],
            );
        }
    }
    if violations.iter().any(|v| v.code == "vertex-out-of-range") {
        return ValidationReport { violations };
    }

    let edges = base.edges();
    if edges.len() != 3 * n - 6 {
        push(
            &mut violations,
            "edge-count",
            format!("expected 3n-6 = {} edges, found {}", 3 * n - 6, edges.len()),
            vec![],
        );
    }
    for (v, fs) in base.vertex_facets().iter().enumerate() {
        if fs.len() != 3 {
            push(
                &mut violations,
                "vertex-facet-incidence",
                format!("vertex {v} lies in {} facets, expected 3", fs.len()),
                vec![v],
            );
        }
    }
    for ((u, v), fs) in base.edge_facets() {
        if fs.len() != 2 {
            push(
                &mut violations,
                "edge-facet-incidence",
                format!("edge ({u},{v}) lies in {} facets, expected 2", fs.len()),
                vec![u, v],
            );
        }
    }
    if base.start >= m {
        push(
            &mut violations,
            "start-out-of-range",
            format!("start vertex {} out of range", base.start),
            vec![base.start],
        );
    }

    if let Some(geo) = inst.geometric() {
        if geo.coords.len() != m {
            push(
                &mut violations,
                "coords-count",
                format!("{} coordinate rows for {} vertices", geo.coords.len(), m),
                vec![],
            );
        } else {
            let value = |obj: &[Rational; 3], v: usize| -> Rational {
                let x = &geo.coords[v];
                &obj[0] * &x[0] + &obj[1] * &x[1] + &obj[2] * &x[2]
            };
            let mut values: Vec<Rational> = (0..m).map(|v| value(&geo.objective, v)).collect();
            for v in 0..m.saturating_sub(1) {
                if values[v] >= values[v + 1] {
                    push(
                        &mut violations,
                        "rank-order",
                        format!(
                            "objective value of vertex {} is not below vertex {}",
                            v,
                            v + 1
                        ),
                        vec![v, v + 1],
                    );
                }
            }
            values.sort();
            values.dedup();
            if values.len() != m {
                push(
                    &mut violations,
                    "general-position",
                    "two vertices share an objective value".to_string(),
                    vec![],
                );
            }
            if let Some(aux) = &geo.aux_objective {
                let start = geo.base.start;
                for v in 0..m {
                    if v != start && value(aux, v) <= value(aux, start) {
                        push(
                            &mut violations,
                            "aux-objective-start",
                            format!("vertex {v} is not above the start in the auxiliary objective"),
                            vec![v],
                        );
                    }
                }
            }
        }
    }

    ValidationReport { violations }
}

/// Outcome of the Mihalisin-Klee realizability test.
#[derive(Debug, Clone)]
pub struct MKReport {
    pub facet_sink_ok: bool,
    pub bad_facets: Vec<FacetId>,
    pub disjoint_paths_ok: bool,
    pub paths: Option<[Vec<VertexId>; 3]>,
    pub separating_pair: Option<(VertexId, VertexId)>,
}

impl MKReport {
    pub fn realizable(&self) -> bool {
        self.facet_sink_ok && self.disjoint_paths_ok
    }
}

/// Sinks of a facet cycle under a given orientation: vertices with no
/// out-edge inside the facet.
pub fn facet_sinks(cycle: &[VertexId], is_out_edge: impl Fn(VertexId, VertexId) -> bool) -> Vec<VertexId> {
    let k = cycle.len();
    let mut sinks = Vec::new();
    for i in 0..k {
        let v = cycle[i];
        let a = cycle[(i + 1) % k];
        let b = cycle[(i + k - 1) % k];
        if !is_out_edge(v, a) && !is_out_edge(v, b) {
            sinks.push(v);
        }
    }
    sinks
}

/// Checks both Mihalisin-Klee conditions for the rank orientation:
/// a unique sink in every facet, and three node-disjoint monotone paths
/// from the source to the sink.
pub fn check_mk(inst: &CombinatorialInstance) -> MKReport {
    let mut bad_facets = Vec::new();
    for (fid, cycle) in inst.facets.iter().enumerate() {
        let sinks = facet_sinks(cycle, |u, v| u > v);
        if sinks.len() != 1 {
            bad_facets.push(fid);
        }
    }
    let facet_sink_ok = bad_facets.is_empty();

    let (value, paths, cut) = monotone_disjoint_paths(inst);
    let disjoint_paths_ok = value >= 3;
    MKReport {
        facet_sink_ok,
        bad_facets,
        disjoint_paths_ok,
        paths: if disjoint_paths_ok { Some(paths) } else { None },
        separating_pair: if disjoint_paths_ok { None } else { cut },
    }
}

/// Unit-vertex-capacity max flow from `v_max` to `v_min` along the rank
/// orientation. The value can never exceed 3 because the source has
/// out-degree 3, so the search stops at 3 augmenting paths.
fn monotone_disjoint_paths(
    inst: &CombinatorialInstance,
) -> (usize, [Vec<VertexId>; 3], Option<(VertexId, VertexId)>) {
    let m = inst.num_vertices;
    let source = m - 1;
    let sink = 0;
    let orient = orientation_of(inst);

    // node splitting: node v -> (v_in = 2v, v_out = 2v+1)
    let nodes = 2 * m;
    let mut cap: BTreeMap<(usize, usize), i32> = BTreeMap::new();
    let mut graph: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add_edge = |graph: &mut Vec<Vec<usize>>, cap: &mut BTreeMap<(usize, usize), i32>, a: usize, b: usize, c: i32| {
        if !graph[a].contains(&b) {
            graph[a].push(b);
        }
        if !graph[b].contains(&a) {
            graph[b].push(a);
        }
        *cap.entry((a, b)).or_insert(0) += c;
        cap.entry((b, a)).or_insert(0);
    };
    for v in 0..m {
        let c = if v == source || v == sink { 3 } else { 1 };
        add_edge(&mut graph, &mut cap, 2 * v, 2 * v + 1, c);
    }
    for v in 0..m {
        for &u in &orient.out_neighbors[v] {
            add_edge(&mut graph, &mut cap, 2 * v + 1, 2 * u, 1);
        }
    }

    let s = 2 * source;
    let t = 2 * sink + 1;
    let mut flow_value = 0;
    loop {
        // BFS augmenting path
        let mut prev: Vec<Option<usize>> = vec![None; nodes];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(s);
        prev[s] = Some(s);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &y in &graph[x] {
                if prev[y].is_none() && cap.get(&(x, y)).copied().unwrap_or(0) > 0 {
                    prev[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        if prev[t].is_none() || flow_value == 3 {
            if flow_value >= 3 {
                break;
            }
            // extract a separating pair from the min cut: split nodes
            // whose in-side is reachable but out-side is not.
            let mut pair = Vec::new();
            for v in 0..m {
                if v != source && v != sink && prev[2 * v].is_some() && prev[2 * v + 1].is_none() {
                    pair.push(v);
                }
            }
            let cut = if pair.len() >= 2 {
                Some((pair[0], pair[1]))
            } else if pair.len() == 1 {
                Some((pair[0], pair[0]))
            } else {
                None
            };
            return (flow_value, [Vec::new(), Vec::new(), Vec::new()], cut);
        }
        let mut x = t;
        while x != s {
            let p = prev[x].unwrap();
            *cap.get_mut(&(p, x)).unwrap() -= 1;
            *cap.get_mut(&(x, p)).unwrap() += 1;
            x = p;
        }
        flow_value += 1;
        if flow_value == 3 {
            break;
        }
    }

    // decompose the flow into 3 vertex-disjoint paths
    let mut paths: [Vec<VertexId>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut used: BTreeMap<(usize, usize), i32> = BTreeMap::new();
    for (&(a, b), &c) in &cap {
        // original capacity minus residual = used flow on (a, b)
        let orig = if a % 2 == 0 && b == a + 1 {
            if a / 2 == source || a / 2 == sink {
                3
            } else {
                1
            }
        } else if a % 2 == 1 {
            1
        } else {
            0
        };
        let f = orig - c;
        if f > 0 {
            used.insert((a, b), f);
        }
    }
    for path in paths.iter_mut() {
        let mut v = source;
        path.push(v);
        while v != sink {
            let mut next = None;
            for &u in &orient.out_neighbors[v] {
                let key = (2 * v + 1, 2 * u);
                if used.get(&key).copied().unwrap_or(0) > 0 {
                    next = Some(u);
                    *used.get_mut(&key).unwrap() -= 1;
                    break;
                }
            }
            match next {
                Some(u) => {
                    path.push(u);
                    v = u;
                }
                None => break,
            }
        }
    }
    (3, paths, None)
}

// ---------------------------------------------------------------------
// lp3 v1 file format
// ---------------------------------------------------------------------

/// Parses the `lp3 v1` / `lp3graph v1` instance format.
pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    let mut name = String::new();
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut facets: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    let mut start: Option<VertexId> = None;
    let mut coords: BTreeMap<usize, [Rational; 3]> = BTreeMap::new();
    let mut objective: Option<[Rational; 3]> = None;
    let mut aux_objective: Option<[Rational; 3]> = None;
    let mut header: Option<bool> = None; // rank_free?

    let err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if header.is_none() {
            header = match line {
                "lp3 v1" => Some(false),
                "lp3graph v1" => Some(true),
                _ => return Err(err(lineno, "expected `lp3 v1` or `lp3graph v1` header".into())),
            };
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "name" => name = rest.to_string(),
            "facets" => {
                let count: usize =
                    rest.parse().map_err(|_| err(lineno, "bad facet count".into()))?;
                if count > 500_000 {
                    return Err(err(lineno, "facet count too large".into()));
                }
                n = Some(count)
            }
            "vertices" => {
                let count: usize =
                    rest.parse().map_err(|_| err(lineno, "bad vertex count".into()))?;
                if count > 1_000_000 {
                    return Err(err(lineno, "vertex count too large".into()));
                }
                m = Some(count)
            }
            "facet" => {
                let (fid_str, verts) = rest
                    .split_once(':')
                    .ok_or_else(|| err(lineno, "facet line needs `facet <id>: <v> ...`".into()))?;
                let fid: usize = fid_str
                    .trim()
                    .parse()
                    .map_err(|_| err(lineno, "bad facet id".into()))?;
                if facets.contains_key(&fid) {
                    return Err(err(lineno, format!("duplicate facet id {fid}")));
                }
                let mut cycle = Vec::new();
                for tok in verts.split_whitespace() {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| err(lineno, format!("bad vertex id `{tok}`")))?;
                    if let Some(m) = m {
                        if v >= m {
                            return Err(err(lineno, format!("vertex id {v} out of range")));
                        }
                    }
                    if cycle.contains(&v) {
                        return Err(err(lineno, format!("facet {fid} lists vertex {v} twice")));
                    }
                    cycle.push(v);
                }
                facets.insert(fid, cycle);
            }
            "start" => {
                start = Some(rest.parse().map_err(|_| err(lineno, "bad start vertex".into()))?)
            }
            "coords" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(err(lineno, "coords line needs `coords <v> <x> <y> <z>`".into()));
                }
                let v: usize = toks[0]
                    .parse()
                    .map_err(|_| err(lineno, "bad vertex id".into()))?;
                let mut xyz = [Rational::default(), Rational::default(), Rational::default()];
                for (i, tok) in toks[1..].iter().enumerate() {
                    xyz[i] = parse_rational(tok).map_err(|e| err(lineno, e))?;
                }
                coords.insert(v, xyz);
            }
            "objective" | "aux-objective" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err(lineno, format!("{keyword} needs 3 components")));
                }
                let mut obj = [Rational::default(), Rational::default(), Rational::default()];
                for (i, tok) in toks.iter().enumerate() {
                    obj[i] = parse_rational(tok).map_err(|e| err(lineno, e))?;
                }
                if keyword == "objective" {
                    objective = Some(obj);
                } else {
                    aux_objective = Some(obj);
                }
            }
            other => return Err(err(lineno, format!("unknown keyword `{other}`"))),
        }
    }

    let rank_free = header.ok_or_else(|| err(0, "empty input".into()))?;
    let n = n.ok_or_else(|| err(0, "missing `facets` line".into()))?;
    let m = m.ok_or_else(|| err(0, "missing `vertices` line".into()))?;
    let mut facet_list = Vec::with_capacity(n);
    for fid in 0..n {
        match facets.remove(&fid) {
            Some(cycle) => facet_list.push(cycle),
            None => return Err(err(0, format!("missing facet {fid}"))),
        }
    }
    if let Some((&fid, _)) = facets.iter().next() {
        return Err(err(0, format!("facet id {fid} out of range (facets = {n})")));
    }
    let start = start.unwrap_or(m.saturating_sub(1));
    if start >= m {
        return Err(err(0, format!("start vertex {start} out of range")));
    }
    let base = CombinatorialInstance {
        name,
        facets: facet_list,
        num_vertices: m,
        start,
        rank_free,
    };

    if coords.is_empty() && objective.is_none() {
        if aux_objective.is_some() {
            return Err(err(0, "aux-objective given without coords".into()));
        }
        return Ok(Instance::Combinatorial(base));
    }
    let objective = objective.ok_or_else(|| err(0, "coords given without objective".into()))?;
    let mut coord_list = Vec::with_capacity(m);
    for v in 0..m {
        match coords.remove(&v) {
            Some(c) => coord_list.push(c),
            None => return Err(err(0, format!("missing coords for vertex {v}"))),
        }
    }
    if let Some((&v, _)) = coords.iter().next() {
        return Err(err(0, format!("coords for vertex {v} out of range")));
    }
    Ok(Instance::Geometric(GeometricInstance {
        base,
        coords: coord_list,
        objective,
        aux_objective,
    }))
}

/// Serializes back to the `lp3 v1` format; `parse_instance` of the
/// output reproduces the instance field for field.
pub fn serialize_instance(inst: &Instance) -> String {
    let base = inst.base();
    let mut out = String::new();
    out.push_str(if base.rank_free { "lp3graph v1\n" } else { "lp3 v1\n" });
    out.push_str(&format!("name {}\n", base.name));
    out.push_str(&format!("facets {}\n", base.num_facets()));
    out.push_str(&format!("vertices {}\n", base.num_vertices));
    for (fid, cycle) in base.facets.iter().enumerate() {
        let verts: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("facet {}: {}\n", fid, verts.join(" ")));
    }
    out.push_str(&format!("start {}\n", base.start));
    if let Some(geo) = inst.geometric() {
        for (v, xyz) in geo.coords.iter().enumerate() {
            out.push_str(&format!(
                "coords {} {} {} {}\n",
                v,
                format_rational(&xyz[0]),
                format_rational(&xyz[1]),
                format_rational(&xyz[2])
            ));
        }
        let fmt3 = |o: &[Rational; 3]| {
            format!(
                "{} {} {}",
                format_rational(&o[0]),
                format_rational(&o[1]),
                format_rational(&o[2])
            )
        };
        out.push_str(&format!("objective {}\n", fmt3(&geo.objective)));
        if let Some(aux) = &geo.aux_objective {
            out.push_str(&format!("aux-objective {}\n", fmt3(aux)));
        }
    }
    out
}

/// The tetrahedron: the smallest simple 3-polytope, used as a fixture
/// everywhere.
pub fn tetrahedron() -> CombinatorialInstance {
    CombinatorialInstance::new(
        "tetrahedron",
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        4,
        3,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron_is_valid() {
        let t = tetrahedron();
        let report = validate(&Instance::Combinatorial(t.clone()));
        assert!(report.ok(), "{:?}", report.violations);
        assert_eq!(t.edges().len(), 6);
        let orient = orientation_of(&t);
        let degs: Vec<usize> = (0..4).map(|v| orient.out_degree(v)).collect();
        assert_eq!(degs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tetrahedron_profile() {
        let t = tetrahedron();
        let prof = vertex_profile(&t);
        assert_eq!(prof.n1[3], 1);
        assert_eq!(prof.n2[3], 1);
        assert_eq!(prof.n(0), 0);
        assert_eq!(prof.n1[0], 0);
        // N(v_i) = i for i != 2n-5
        for v in 0..3 {
            assert_eq!(prof.n(v), v);
        }
    }

    #[test]
    fn broken_tetrahedron_reports_incidence() {
        let broken = CombinatorialInstance::new(
            "broken",
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3]],
            4,
            3,
        );
        let report = validate(&Instance::Combinatorial(broken));
        assert!(!report.ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == "vertex-facet-incidence"));
    }

    #[test]
    fn tetrahedron_mk() {
        let t = tetrahedron();
        let mk = check_mk(&t);
        assert!(mk.realizable());
        let paths = mk.paths.unwrap();
        for p in &paths {
            assert_eq!(*p.first().unwrap(), 3);
            assert_eq!(*p.last().unwrap(), 0);
            for w in p.windows(2) {
                assert!(w[0] > w[1]);
            }
        }
        // vertex-disjoint except endpoints
        let mut inner: Vec<VertexId> = paths
            .iter()
            .flat_map(|p| p[1..p.len() - 1].iter().copied())
            .collect();
        inner.sort_unstable();
        let before = inner.len();
        inner.dedup();
        assert_eq!(inner.len(), before);
    }

    #[test]
    fn facet_sink_violations_detected() {
        // an alternating quad has two sinks under the rank orientation
        let sinks = facet_sinks(&[3, 1, 2, 0], |u, v| u > v);
        assert_eq!(sinks, vec![1, 0]);
        // a directed triangle has none
        let cyclic = |u: VertexId, v: VertexId| matches!((u, v), (3, 2) | (2, 1) | (1, 3));
        assert!(facet_sinks(&[1, 2, 3], cyclic).is_empty());
    }

    #[test]
    fn parse_round_trip_tetrahedron() {
        let inst = Instance::Combinatorial(tetrahedron());
        let text = serialize_instance(&inst);
        let again = parse_instance(&text).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn parse_rejects_duplicate_facet_ids() {
        let text = "lp3 v1\nname bad\nfacets 4\nvertices 4\nfacet 0: 0 1 2\nfacet 0: 0 1 3\nfacet 2: 0 2 3\nfacet 3: 1 2 3\nstart 3\n";
        let err = parse_instance(text).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 6);
                assert!(message.contains("duplicate facet id"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_repeated_vertex_in_facet() {
        let text = "lp3 v1\nname bad\nfacets 4\nvertices 4\nfacet 0: 0 1 1\nfacet 1: 0 1 3\nfacet 2: 0 2 3\nfacet 3: 1 2 3\nstart 3\n";
        let err = parse_instance(text).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("twice"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
