//! Pivot rule execution.
//!
//! Deterministic rules produce a trace directly; randomized and
//! history-dependent rules are driven by an explicit 64-bit seed so
//! identical inputs reproduce identical traces on every platform.

use num_traits::Zero;

use crate::model::{
    orientation_of, CombinatorialInstance, Error, FacetId, GeometricInstance, VertexId,
};
use crate::rational::{rint, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Bland,
    Dantzig,
    GreatestDecrease,
    SteepestDecrease,
    ShadowVertex,
    LeastEntered,
    RandomEdge,
    Rf,
    Rf1,
    Rf2,
}

impl RuleKind {
    pub fn parse(text: &str) -> Option<RuleKind> {
        Some(match text {
            "bland" => RuleKind::Bland,
            "dantzig" => RuleKind::Dantzig,
            "greatest-decrease" => RuleKind::GreatestDecrease,
            "steepest-decrease" => RuleKind::SteepestDecrease,
            "shadow-vertex" => RuleKind::ShadowVertex,
            "least-entered" => RuleKind::LeastEntered,
            "random-edge" => RuleKind::RandomEdge,
            "rf" => RuleKind::Rf,
            "rf1" => RuleKind::Rf1,
            "rf2" => RuleKind::Rf2,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::Bland => "bland",
            RuleKind::Dantzig => "dantzig",
            RuleKind::GreatestDecrease => "greatest-decrease",
            RuleKind::SteepestDecrease => "steepest-decrease",
            RuleKind::ShadowVertex => "shadow-vertex",
            RuleKind::LeastEntered => "least-entered",
            RuleKind::RandomEdge => "random-edge",
            RuleKind::Rf => "rf",
            RuleKind::Rf1 => "rf1",
            RuleKind::Rf2 => "rf2",
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(
            self,
            RuleKind::RandomEdge | RuleKind::Rf | RuleKind::Rf1 | RuleKind::Rf2
        )
    }
}

/// Tie-break sub-rule for the least-entered rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    GreatestDecrease,
    RandomEdge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub kind: RuleKind,
    pub tiebreak: Option<TieBreak>,
    pub facet_numbering: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl RuleSpec {
    pub fn deterministic(kind: RuleKind) -> Self {
        RuleSpec {
            kind,
            tiebreak: None,
            facet_numbering: None,
            seed: None,
        }
    }
}

/// One realized run of a pivot rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotTrace {
    pub vertices: Vec<VertexId>,
    pub leave_counts: Vec<usize>,
}

impl PivotTrace {
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }
}

fn trace_from_walk(
    inst: &CombinatorialInstance,
    start: VertexId,
    mut next: impl FnMut(VertexId) -> Option<VertexId>,
) -> PivotTrace {
    let mut vertices = vec![start];
    let mut leave_counts = vec![0usize; inst.num_facets()];
    let mut v = start;
    while let Some(u) = next(v) {
        debug_assert!(u < v, "pivot step must improve");
        if let Some(f) = inst.left_facet(v, u) {
            leave_counts[f] += 1;
        }
        vertices.push(u);
        v = u;
    }
    PivotTrace {
        vertices,
        leave_counts,
    }
}

/// Bland's least-index rule: among improving edges take the one whose
/// left facet has the smallest number. The numbering is an explicit
/// permutation of facet ids (identity by default).
pub fn run_bland(
    inst: &CombinatorialInstance,
    numbering: Option<&[usize]>,
    start: VertexId,
) -> Result<PivotTrace, Error> {
    if let Some(perm) = numbering {
        if perm.len() != inst.num_facets() {
            return Err(Error::Invalid(format!(
                "numbering has {} entries for {} facets",
                perm.len(),
                inst.num_facets()
            )));
        }
        let mut seen = perm.to_vec();
        seen.sort_unstable();
        if seen != (0..inst.num_facets()).collect::<Vec<_>>() {
            return Err(Error::Invalid(
                "numbering is not a permutation of the facet ids".to_string(),
            ));
        }
    }
    let number = |f: FacetId| numbering.map_or(f, |perm| perm[f]);
    let orient = orientation_of(inst);
    Ok(trace_from_walk(inst, start, |v| {
        orient.out_neighbors[v]
            .iter()
            .copied()
            .min_by_key(|&u| number(inst.left_facet(v, u).expect("valid instance")))
    }))
}

/// Greatest decrease: jump to the adjacent vertex of minimal rank.
pub fn run_greatest_decrease(inst: &CombinatorialInstance, start: VertexId) -> PivotTrace {
    let orient = orientation_of(inst);
    trace_from_walk(inst, start, |v| {
        orient.out_neighbors[v].iter().copied().min()
    })
}

/// Inner product of a rational vector with a vertex coordinate.
fn dot(obj: &[Rational; 3], x: &[Rational; 3]) -> Rational {
    &obj[0] * &x[0] + &obj[1] * &x[1] + &obj[2] * &x[2]
}

/// Steepest decrease, resolved exactly: among improving edges compare
/// `<c, w-v>^2 * |w'-v|^2` against `<c, w'-v>^2 * |w-v|^2`; since both
/// inner products are negative, the larger ratio is the steeper edge.
/// A tie between improving edges is a general-position violation.
pub fn run_steepest_decrease(
    ginst: &GeometricInstance,
    start: VertexId,
) -> Result<PivotTrace, Error> {
    let inst = &ginst.base;
    let orient = orientation_of(inst);
    let mut tie: Option<(VertexId, VertexId, VertexId)> = None;
    let trace = trace_from_walk(inst, start, |v| {
        let mut best: Option<(VertexId, Rational, Rational)> = None; // (target, num^2, len^2)
        for &u in &orient.out_neighbors[v] {
            let diff = [
                &ginst.coords[u][0] - &ginst.coords[v][0],
                &ginst.coords[u][1] - &ginst.coords[v][1],
                &ginst.coords[u][2] - &ginst.coords[v][2],
            ];
            let drop = dot(&ginst.objective, &diff);
            let num2 = &drop * &drop;
            let len2 = &diff[0] * &diff[0] + &diff[1] * &diff[1] + &diff[2] * &diff[2];
            match &best {
                None => best = Some((u, num2, len2)),
                Some((bu, bn, bl)) => {
                    // steeper iff num2 * bl > bn * len2
                    let lhs = &num2 * bl;
                    let rhs = bn * &len2;
                    if lhs > rhs {
                        best = Some((u, num2, len2));
                    } else if lhs == rhs && tie.is_none() {
                        tie = Some((v, *bu, u));
                    }
                }
            }
        }
        best.map(|(u, _, _)| u)
    });
    if let Some((v, a, b)) = tie {
        return Err(Error::Invalid(format!(
            "steepness tie at vertex {v} between edges to {a} and {b} (general position violated)"
        )));
    }
    Ok(trace)
}

/// Shadow vertex rule: walk the relevant boundary chain of the exact
/// 2-D convex hull of the projected vertices `x -> (<c,x>, <d,x>)`,
/// from the start's image to the image of `v_min`. Every reported
/// vertex projects to a hull vertex and consecutive vertices are
/// asserted to be adjacent on the polytope.
pub fn run_shadow_vertex(ginst: &GeometricInstance, start: VertexId) -> Result<PivotTrace, Error> {
    let inst = &ginst.base;
    let aux = ginst
        .aux_objective
        .as_ref()
        .ok_or_else(|| Error::Invalid("shadow vertex needs an aux-objective".to_string()))?;
    let m = inst.num_vertices;
    let pts: Vec<(Rational, Rational)> = (0..m)
        .map(|v| (dot(&ginst.objective, &ginst.coords[v]), dot(aux, &ginst.coords[v])))
        .collect();
    // start must uniquely minimize d
    for v in 0..m {
        if v != start && pts[v].1 <= pts[start].1 {
            return Err(Error::Invalid(format!(
                "start {start} is not the unique optimum of the aux objective (vertex {v})"
            )));
        }
    }

    // lower-left hull chain from the d-minimum to the c-minimum: the
    // vertices optimal for some nonnegative interpolation of c and d.
    // Andrew's monotone chain on exact coordinates.
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&p, &q| (&pts[p].0, &pts[p].1).cmp(&(&pts[q].0, &pts[q].1)));
    let cross = |o: usize, a: usize, b: usize| -> Rational {
        let oax = &pts[a].0 - &pts[o].0;
        let oay = &pts[a].1 - &pts[o].1;
        let obx = &pts[b].0 - &pts[o].0;
        let oby = &pts[b].1 - &pts[o].1;
        &oax * &oby - &oay * &obx
    };
    let mut lower: Vec<usize> = Vec::new();
    for &p in &idx {
        while lower.len() >= 2 {
            let o = lower[lower.len() - 2];
            let a = lower[lower.len() - 1];
            let turn = cross(o, a, p);
            if turn > Rational::zero() {
                break;
            }
            if turn.is_zero() {
                return Err(Error::Invalid(format!(
                    "three collinear projected points on the hull chain ({o}, {a}, {p})"
                )));
            }
            lower.pop();
        }
        lower.push(p);
    }
    // `lower` runs from the c-minimum side to the c-maximum side along
    // the chain of minimal d; the walk goes from start down to v_min.
    let pos = lower
        .iter()
        .position(|&v| v == start)
        .ok_or_else(|| Error::Invalid("start does not project to a hull vertex".to_string()))?;
    let mut path: Vec<VertexId> = lower[..=pos].to_vec();
    path.reverse();
    if *path.last().unwrap() != 0 {
        return Err(Error::Invalid(
            "hull chain does not end at the objective optimum".to_string(),
        ));
    }
    // assert polytope adjacency of consecutive path vertices
    let adj = inst.adjacency();
    for w in path.windows(2) {
        if !adj[w[0]].contains(&w[1]) {
            return Err(Error::Invalid(format!(
                "hull neighbors {} and {} are not adjacent on the polytope",
                w[0], w[1]
            )));
        }
        if w[1] >= w[0] {
            return Err(Error::Invalid(format!(
                "hull chain is not objective-monotone at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    let mut leave_counts = vec![0usize; inst.num_facets()];
    for w in path.windows(2) {
        if let Some(f) = inst.left_facet(w[0], w[1]) {
            leave_counts[f] += 1;
        }
    }
    Ok(PivotTrace {
        vertices: path,
        leave_counts,
    })
}

/// SplitMix64, the documented per-trial seed derivation and the
/// generator driving all randomized runs.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` by rejection sampling, avoiding
    /// modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let raw = self.next_u64();
            if raw < zone {
                return raw % bound;
            }
        }
    }
}

/// Per-trial seed: SplitMix64 applied to `master_seed + trial`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    SplitMix64::new(master_seed.wrapping_add(trial)).next_u64()
}

/// The least-entered rule: per-facet leave counters start at zero, only
/// leaving a facet increments its counter, and improving edges are
/// restricted to those leaving a least-often-left facet before the
/// tie-break applies.
pub fn run_least_entered(
    inst: &CombinatorialInstance,
    tiebreak: TieBreak,
    start: VertexId,
    seed: Option<u64>,
) -> Result<PivotTrace, Error> {
    let mut rng = match (tiebreak, seed) {
        (TieBreak::RandomEdge, Some(s)) => Some(SplitMix64::new(s)),
        (TieBreak::RandomEdge, None) => {
            return Err(Error::Invalid(
                "least-entered with random-edge tie-break needs a seed".to_string(),
            ))
        }
        (TieBreak::GreatestDecrease, _) => None,
    };
    let orient = orientation_of(inst);
    let mut counters = vec![0usize; inst.num_facets()];
    let mut vertices = vec![start];
    let mut leave_counts = vec![0usize; inst.num_facets()];
    let mut v = start;
    while orient.out_degree(v) > 0 {
        let mut candidates: Vec<(VertexId, FacetId)> = orient.out_neighbors[v]
            .iter()
            .map(|&u| (u, inst.left_facet(v, u).expect("valid instance")))
            .collect();
        let min_count = candidates.iter().map(|&(_, f)| counters[f]).min().unwrap();
        candidates.retain(|&(_, f)| counters[f] == min_count);
        let (u, f) = match tiebreak {
            TieBreak::GreatestDecrease => *candidates.iter().min_by_key(|&&(u, _)| u).unwrap(),
            TieBreak::RandomEdge => {
                let rng = rng.as_mut().unwrap();
                candidates[rng.below(candidates.len() as u64) as usize]
            }
        };
        counters[f] += 1;
        leave_counts[f] += 1;
        vertices.push(u);
        v = u;
    }
    Ok(PivotTrace {
        vertices,
        leave_counts,
    })
}

/// One random-edge trace under an explicit seed.
pub fn run_random_edge(inst: &CombinatorialInstance, start: VertexId, seed: u64) -> PivotTrace {
    let orient = orientation_of(inst);
    let mut rng = SplitMix64::new(seed);
    trace_from_walk(inst, start, |v| {
        let outs = &orient.out_neighbors[v];
        if outs.is_empty() {
            None
        } else {
            Some(outs[rng.below(outs.len() as u64) as usize])
        }
    })
}

/// One random-facet trace (any variant) under an explicit seed,
/// simulating the recursion level by level. Zero-progress picks
/// (choosing a face we are already optimal in) cost no steps.
pub fn run_random_facet(
    inst: &CombinatorialInstance,
    variant: crate::expectation::RandomFacetVariant,
    start: VertexId,
    seed: u64,
) -> PivotTrace {
    use crate::expectation::RandomFacetVariant as V;
    let orient = orientation_of(inst);
    let mut rng = SplitMix64::new(seed);
    let mut vertices = vec![start];
    let mut leave_counts = vec![0usize; inst.num_facets()];
    let vf = inst.vertex_facets();

    // walk within one facet polygon to its optimum
    let facet_opt = |f: usize| *inst.facets[f].iter().min().unwrap();
    let polygon_step = |f: usize, v: VertexId| -> [VertexId; 2] {
        let cycle = &inst.facets[f];
        let k = cycle.len();
        let i = cycle.iter().position(|&x| x == v).unwrap();
        [cycle[(i + 1) % k], cycle[(i + k - 1) % k]]
    };

    let mut v = start;
    'outer: while v != 0 {
        // top level: global 1-vertex shortcut for RF1
        if variant == V::Rf1 && orient.out_degree(v) == 1 {
            let u = orient.out_neighbors[v][0];
            if let Some(f) = inst.left_facet(v, u) {
                leave_counts[f] += 1;
            }
            vertices.push(u);
            v = u;
            continue;
        }
        let f = vf[v][rng.below(3) as usize];
        let opt = facet_opt(f);
        // solve the polygon restricted to f
        let mut w = v;
        while w != opt {
            let [a, b] = polygon_step(f, w);
            let candidates = [a, b];
            let next = match variant {
                V::Rf => {
                    let pick = candidates[rng.below(2) as usize];
                    if pick > w {
                        continue; // 0-step stay at the optimum of an up edge
                    }
                    pick
                }
                V::Rf1 => {
                    let downs: Vec<VertexId> =
                        candidates.into_iter().filter(|&x| x < w).collect();
                    if downs.len() == 1 {
                        downs[0]
                    } else {
                        downs[rng.below(2) as usize]
                    }
                }
                V::Rf2 => {
                    let pick = candidates[rng.below(2) as usize];
                    let bottom = if pick < w { pick } else { w };
                    if pick < w {
                        if let Some(l) = inst.left_facet(w, pick) {
                            leave_counts[l] += 1;
                        }
                        vertices.push(pick);
                    }
                    // one deterministic step out of the edge optimum
                    if bottom == opt {
                        w = bottom;
                        continue;
                    }
                    let [x, y] = polygon_step(f, bottom);
                    let next = if x < bottom { x } else { y };
                    if let Some(l) = inst.left_facet(bottom, next) {
                        leave_counts[l] += 1;
                    }
                    vertices.push(next);
                    w = next;
                    continue;
                }
            };
            if let Some(l) = inst.left_facet(w, next) {
                leave_counts[l] += 1;
            }
            vertices.push(next);
            w = next;
        }
        v = w;
        // resume per variant
        match variant {
            V::Rf | V::Rf1 => continue 'outer,
            V::Rf2 => {
                if v != 0 {
                    let u = orient.out_neighbors[v][0];
                    debug_assert_eq!(orient.out_degree(v), 1);
                    if let Some(l) = inst.left_facet(v, u) {
                        leave_counts[l] += 1;
                    }
                    vertices.push(u);
                    v = u;
                }
            }
        }
    }
    PivotTrace {
        vertices,
        leave_counts,
    }
}

/// Aggregate statistics of seeded Monte Carlo trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialStats {
    pub trials: u64,
    pub mean: Rational,
    pub sample_variance: Rational,
    pub min_steps: usize,
    pub max_steps: usize,
    pub seed: u64,
}

/// Runs `trials` independent traces. Per-trial seeds derive from the
/// master seed through SplitMix64, so results are reproducible and
/// order-independent.
pub fn simulate_randomized(
    inst: &CombinatorialInstance,
    spec: &RuleSpec,
    start: VertexId,
    trials: u64,
    master_seed: u64,
) -> Result<TrialStats, Error> {
    use crate::expectation::RandomFacetVariant as V;
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".to_string()));
    }
    let randomized = spec.kind.is_randomized()
        || (spec.kind == RuleKind::LeastEntered && spec.tiebreak == Some(TieBreak::RandomEdge));
    if !randomized {
        return Err(Error::Invalid(format!(
            "rule `{}` is not randomized",
            spec.kind.as_str()
        )));
    }
    let mut sum = Rational::zero();
    let mut sum_sq = Rational::zero();
    let mut min_steps = usize::MAX;
    let mut max_steps = 0usize;
    for trial in 0..trials {
        let seed = trial_seed(master_seed, trial);
        let trace = match spec.kind {
            RuleKind::RandomEdge => run_random_edge(inst, start, seed),
            RuleKind::Rf => run_random_facet(inst, V::Rf, start, seed),
            RuleKind::Rf1 => run_random_facet(inst, V::Rf1, start, seed),
            RuleKind::Rf2 => run_random_facet(inst, V::Rf2, start, seed),
            RuleKind::LeastEntered => {
                run_least_entered(inst, TieBreak::RandomEdge, start, Some(seed))?
            }
            _ => unreachable!(),
        };
        let steps = trace.steps();
        min_steps = min_steps.min(steps);
        max_steps = max_steps.max(steps);
        sum += rint(steps as i64);
        sum_sq += rint((steps * steps) as i64);
    }
    let tn = rint(trials as i64);
    let mean = &sum / &tn;
    let sample_variance = if trials == 1 {
        Rational::zero()
    } else {
        (sum_sq - &tn * &mean * &mean) / (tn - rint(1))
    };
    Ok(TrialStats {
        trials,
        mean,
        sample_variance,
        min_steps,
        max_steps,
        seed: master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tetrahedron;
    use crate::rational::rat;

    #[test]
    fn bland_on_tetrahedron_descends_rank_by_rank() {
        let t = tetrahedron();
        let trace = run_bland(&t, None, 3).unwrap();
        assert_eq!(trace.vertices, vec![3, 2, 1, 0]);
        assert_eq!(trace.steps(), 3);
        assert_eq!(trace.leave_counts.iter().sum::<usize>(), 3);
        // start at the optimum: empty trace
        let idle = run_bland(&t, None, 0).unwrap();
        assert_eq!(idle.vertices, vec![0]);
        assert_eq!(idle.steps(), 0);
    }

    #[test]
    fn greatest_decrease_jumps_to_the_sink() {
        let t = tetrahedron();
        let trace = run_greatest_decrease(&t, 3);
        assert_eq!(trace.vertices, vec![3, 0]);
    }

    #[test]
    fn least_entered_gd_on_tetrahedron() {
        let t = tetrahedron();
        let trace = run_least_entered(&t, TieBreak::GreatestDecrease, 3, None).unwrap();
        // all counters zero: full tie, greatest decrease picks v0
        assert_eq!(trace.vertices, vec![3, 0]);
    }

    #[test]
    fn random_walks_are_reproducible() {
        let t = tetrahedron();
        let a = run_random_edge(&t, 3, 42);
        let b = run_random_edge(&t, 3, 42);
        assert_eq!(a, b);
        for trace in [&a] {
            assert_eq!(*trace.vertices.last().unwrap(), 0);
            for w in trace.vertices.windows(2) {
                assert!(w[0] > w[1]);
            }
        }
    }

    #[test]
    fn trial_stats_single_trial() {
        let t = tetrahedron();
        let spec = RuleSpec {
            kind: RuleKind::RandomEdge,
            tiebreak: None,
            facet_numbering: None,
            seed: Some(7),
        };
        let stats = simulate_randomized(&t, &spec, 3, 1, 7).unwrap();
        assert_eq!(stats.min_steps, stats.max_steps);
        assert_eq!(stats.mean, rint(stats.min_steps as i64));
        assert_eq!(stats.sample_variance, rat(0, 1));
    }

    #[test]
    fn monte_carlo_mean_near_exact_value() {
        let t = tetrahedron();
        let spec = RuleSpec {
            kind: RuleKind::RandomEdge,
            tiebreak: None,
            facet_numbering: None,
            seed: Some(1),
        };
        let stats = simulate_randomized(&t, &spec, 3, 4000, 1).unwrap();
        let exact = rat(11, 6);
        let err = if stats.mean > exact {
            &stats.mean - &exact
        } else {
            &exact - &stats.mean
        };
        assert!(err < rat(1, 10), "mean {:?}", stats.mean);
    }
}
