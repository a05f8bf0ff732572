//! Certificate machinery for the random edge upper bound, the
//! non-revisiting path search, and the linearity-coefficient helper.

use std::collections::HashMap;

use num_traits::Zero;

use crate::model::{
    check_mk, orientation_of, validate, vertex_profile, CombinatorialInstance, Error, Instance,
    VertexId,
};
use crate::rational::{rat, rint, Rational};
use crate::rules::RuleKind;

/// One row of the certificate system: `a*alpha + b*beta >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateRow {
    pub id: &'static str,
    pub a: Rational,
    pub b: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct CertificateSystem {
    pub rows: Vec<CertificateRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertPoint {
    pub alpha: Rational,
    pub beta: Rational,
}

impl CertPoint {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        CertPoint { alpha, beta }
    }
}

/// The 24 inequalities constraining the coefficients of the generic
/// bound `E(v) <= alpha*N1(v) + beta*N(v)`, one per case of the
/// induction, with the objective `alpha + 2*beta`.
pub fn certificate_system() -> CertificateSystem {
    let row = |id: &'static str, a: Rational, b: Rational, rhs: Rational| CertificateRow {
        id,
        a,
        b,
        rhs,
    };
    let rows = vec![
        row("5", rint(1), rint(1), rint(1)),
        row("6", rint(0), rint(1), rat(2, 5)),
        row("7", rat(1, 2), rint(2), rint(1)),
        row("8", rint(0), rint(1), rat(14, 29)),
        row("9", rint(1), rat(33, 8), rat(19, 8)),
        row("10", rint(1), rat(33, 8), rat(5, 2)),
        row("11", rint(2), rint(3), rat(5, 2)),
        row("12", rint(1), rat(5, 2), rat(3, 2)),
        row("13", rat(1, 2), rat(11, 4), rat(3, 2)),
        row("14", rint(1), rat(17, 4), rat(5, 2)),
        row("15", rint(1), rat(9, 2), rat(9, 4)),
        row("16", rint(0), rat(19, 4), rat(9, 4)),
        row("17", rint(1), rat(43, 8), rat(11, 4)),
        row("18", rint(1), rat(15, 4), rat(9, 4)),
        row("20", rint(3), rint(5), rint(4)),
        row("21", rint(2), rat(17, 4), rint(3)),
        row("22", rint(1), rat(15, 4), rat(9, 4)),
        row("23", rint(2), rat(43, 8), rat(29, 8)),
        row("24", rint(1), rat(41, 8), rint(3)),
        row("25", rint(3), rint(6), rint(4)),
        row("26", rint(2), rat(99, 16), rint(4)),
        row("27", rint(2), rat(43, 8), rat(27, 8)),
        row("27b", rint(1), rat(95, 16), rat(27, 8)),
        row("28", rint(2), rat(99, 16), rat(61, 16)),
    ];
    debug_assert_eq!(rows.len(), 24);
    CertificateSystem { rows }
}

#[derive(Debug, Clone)]
pub struct CertificateCheck {
    pub satisfied: Vec<&'static str>,
    pub violated: Vec<&'static str>,
    pub tight: Vec<&'static str>,
}

impl CertificateCheck {
    pub fn all_satisfied(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Exact evaluation of every row at a candidate point.
pub fn check_certificate_point(point: &CertPoint) -> CertificateCheck {
    let system = certificate_system();
    let mut check = CertificateCheck {
        satisfied: Vec::new(),
        violated: Vec::new(),
        tight: Vec::new(),
    };
    for row in &system.rows {
        let lhs = &row.a * &point.alpha + &row.b * &point.beta;
        if lhs < row.rhs {
            check.violated.push(row.id);
        } else {
            check.satisfied.push(row.id);
            if lhs == row.rhs {
                check.tight.push(row.id);
            }
        }
    }
    check
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(CertPoint, Rational),
    Unbounded,
    Infeasible,
}

/// Minimizes `alpha + 2*beta` over an explicit row set by enumerating
/// pairwise constraint intersections, keeping the exact feasible
/// minimizer. Variables are unrestricted in sign; unboundedness is
/// detected through the recession cone.
pub fn solve_lp_over(rows: &[CertificateRow]) -> LpOutcome {
    let obj = |p: &CertPoint| -> Rational { &p.alpha + rint(2) * &p.beta };
    let feasible = |p: &CertPoint| -> bool {
        rows.iter()
            .all(|r| &r.a * &p.alpha + &r.b * &p.beta >= r.rhs)
    };
    // unbounded iff some direction d with obj decreasing satisfies
    // a.d >= 0 for all rows; candidate extreme directions are the
    // boundary rays of the recession cone (row normals rotated) plus
    // the steepest objective descent itself.
    let mut directions: Vec<(Rational, Rational)> = vec![(rint(-1), rint(-2))];
    for r in rows {
        directions.push((rint(0) - &r.b, r.a.clone()));
        directions.push((r.b.clone(), rint(0) - &r.a));
    }
    for d in &directions {
        let improving = &d.0 + rint(2) * &d.1 < Rational::zero();
        let recession = rows
            .iter()
            .all(|r| &r.a * &d.0 + &r.b * &d.1 >= Rational::zero());
        if improving && recession {
            return LpOutcome::Unbounded;
        }
    }
    let mut best: Option<(CertPoint, Rational)> = None;
    let mut consider = |p: CertPoint| {
        if !feasible(&p) {
            return;
        }
        let v = obj(&p);
        match &best {
            None => best = Some((p, v)),
            Some((_, bv)) if v < *bv => best = Some((p, v)),
            _ => {}
        }
    };
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (r, s) = (&rows[i], &rows[j]);
            let det = &r.a * &s.b - &r.b * &s.a;
            if det.is_zero() {
                continue;
            }
            let alpha = (&r.rhs * &s.b - &r.b * &s.rhs) / &det;
            let beta = (&r.a * &s.rhs - &r.rhs * &s.a) / &det;
            consider(CertPoint::new(alpha, beta));
        }
    }
    match best {
        Some((p, v)) => LpOutcome::Optimal(p, v),
        None => LpOutcome::Infeasible,
    }
}

/// The shipped 24-row LP: exact optimum and value.
pub fn solve_certificate_lp() -> Result<(CertPoint, Rational), Error> {
    match solve_lp_over(&certificate_system().rows) {
        LpOutcome::Optimal(p, v) => Ok((p, v)),
        LpOutcome::Unbounded => Err(Error::Invalid("certificate LP unbounded".to_string())),
        LpOutcome::Infeasible => Err(Error::Invalid("certificate LP infeasible".to_string())),
    }
}

/// `alpha*N1(v) + beta*N(v)`: the generic bound instantiated at a
/// point. The rank maximum is excluded by the underlying induction.
pub fn re_upper_bound_at(
    point: &CertPoint,
    inst: &CombinatorialInstance,
    v: VertexId,
) -> Result<Rational, Error> {
    if v == inst.v_max() {
        return Err(Error::Invalid(
            "the generic bound excludes the rank maximum".to_string(),
        ));
    }
    let profile = vertex_profile(inst);
    Ok(&point.alpha * rint(profile.n1[v] as i64) + &point.beta * rint(profile.n(v) as i64))
}

/// A monotone path that never re-enters a facet it has left, found by
/// depth-first search over (vertex, entered-facet-set) states with
/// memoized dead states. On realizable instances a path of length at
/// most n-3 always exists.
pub fn find_nonrevisiting_path(
    inst: &CombinatorialInstance,
    start: VertexId,
) -> Option<Vec<VertexId>> {
    let orient = orientation_of(inst);
    let vf = inst.vertex_facets();
    let words = inst.num_facets().div_ceil(64);
    let facet_mask = |v: VertexId| -> Vec<u64> {
        let mut mask = vec![0u64; words];
        for &f in &vf[v] {
            mask[f / 64] |= 1 << (f % 64);
        }
        mask
    };
    let mut dead: HashMap<(VertexId, Vec<u64>), ()> = HashMap::new();

    fn rec(
        v: VertexId,
        entered: &[u64],
        orient: &crate::model::Orientation,
        facet_mask: &dyn Fn(VertexId) -> Vec<u64>,
        dead: &mut HashMap<(VertexId, Vec<u64>), ()>,
        path: &mut Vec<VertexId>,
    ) -> bool {
        if v == 0 {
            return true;
        }
        if dead.contains_key(&(v, entered.to_vec())) {
            return false;
        }
        let own = facet_mask(v);
        // abandoned: entered but no longer on
        let abandoned: Vec<u64> = entered
            .iter()
            .zip(&own)
            .map(|(e, o)| e & !o)
            .collect();
        for &u in &orient.out_neighbors[v] {
            let fu = facet_mask(u);
            if fu.iter().zip(&abandoned).any(|(a, b)| a & b != 0) {
                continue; // would revisit a left facet
            }
            let next: Vec<u64> = entered.iter().zip(&fu).map(|(e, f)| e | f).collect();
            path.push(u);
            if rec(u, &next, orient, facet_mask, dead, path) {
                return true;
            }
            path.pop();
        }
        dead.insert((v, entered.to_vec()), ());
        false
    }

    let mut path = vec![start];
    if rec(
        start,
        &facet_mask(start),
        &orient,
        &facet_mask,
        &mut dead,
        &mut path,
    ) {
        Some(path)
    } else {
        None
    }
}

/// Evaluation of steps-over-facets across a family parameter range.
#[derive(Debug, Clone)]
pub struct LinearityEstimate {
    pub rule: RuleKind,
    pub samples: Vec<(usize, Rational)>,
    pub max_ratio: Rational,
    /// exact two-point affine fit value/n = s + t/n on the two largest
    /// members: the slope s.
    pub fitted_slope: Rational,
}

/// Evaluates exact steps or expectations across instances and fits the
/// asymptotic slope from the two largest members.
pub fn estimate_linearity(
    samples: Vec<(usize, Rational)>,
    rule: RuleKind,
) -> Result<LinearityEstimate, Error> {
    if samples.len() < 2 {
        return Err(Error::Invalid(
            "linearity estimation needs at least two samples".to_string(),
        ));
    }
    let mut sorted = samples.clone();
    sorted.sort_by_key(|(n, _)| *n);
    let max_ratio = sorted
        .iter()
        .map(|(n, v)| v / rint(*n as i64))
        .max()
        .unwrap();
    let (n1, v1) = sorted[sorted.len() - 2].clone();
    let (n2, v2) = sorted[sorted.len() - 1].clone();
    if n1 == n2 {
        return Err(Error::Invalid("need two distinct sizes".to_string()));
    }
    // value = s*n + t exactly on the two largest members
    let slope = (&v2 - &v1) / rint((n2 - n1) as i64);
    Ok(LinearityEstimate {
        rule,
        samples: sorted,
        max_ratio,
        fitted_slope: slope,
    })
}

/// Convenience wrapper asserting an instance is usable before running
/// path searches in the CLI.
pub fn require_valid(inst: &Instance) -> Result<(), Error> {
    let report = validate(inst);
    if !report.ok() {
        return Err(Error::Invalid(format!(
            "instance fails validation: {}",
            report
                .violations
                .iter()
                .map(|v| v.message.clone())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(())
}

/// Realizability gate for the non-revisiting search.
pub fn require_realizable(inst: &CombinatorialInstance) -> Result<(), Error> {
    let mk = check_mk(inst);
    if !mk.realizable() {
        return Err(Error::Invalid(
            "instance fails the realizability conditions".to_string(),
        ));
    }
    Ok(())
}
