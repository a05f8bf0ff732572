//! Geometric family for the steepest decrease and shadow vertex rules.
//!
//! Construction: a start tetrahedron whose four vertices project to a
//! convex chain in the (x1, x2) plane, then repeated truncation of the
//! current objective minimum. Each cut places three points on the old
//! edges so that the new vertices extend both the steepest path and
//! the lower hull chain of the projection; the placement parameters
//! are validated exactly and shrunk until every condition holds, never
//! assumed.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::model::{Error, GeometricInstance, CombinatorialInstance};
use crate::rational::{rint, Rational};

type Key = usize;
type Point = [Rational; 3];

struct GeoBuilder {
    facets: Vec<Vec<Key>>,
    coords: BTreeMap<Key, Point>,
    next_key: Key,
}

impl GeoBuilder {
    fn neighbors(&self, key: Key) -> Vec<Key> {
        let mut out = Vec::new();
        for cycle in &self.facets {
            let k = cycle.len();
            for i in 0..k {
                if cycle[i] == key {
                    for t in [cycle[(i + 1) % k], cycle[(i + k - 1) % k]] {
                        if !out.contains(&t) {
                            out.push(t);
                        }
                    }
                }
            }
        }
        out
    }

    /// Cuts vertex `z`, placing the new vertex on each listed edge at
    /// the exact parameter `tau`: `z + tau * (neighbor - z)`. Returns
    /// the new keys in the order given.
    fn truncate(&mut self, z: Key, cuts: &[(Key, Rational)]) -> Vec<Key> {
        assert_eq!(cuts.len(), 3);
        let zc = self.coords[&z].clone();
        let mut new_key_of: BTreeMap<Key, Key> = BTreeMap::new();
        let mut created = Vec::new();
        for (t, tau) in cuts {
            let tc = &self.coords[t];
            let p: Point = [
                &zc[0] + tau * (&tc[0] - &zc[0]),
                &zc[1] + tau * (&tc[1] - &zc[1]),
                &zc[2] + tau * (&tc[2] - &zc[2]),
            ];
            let k = self.next_key;
            self.next_key += 1;
            self.coords.insert(k, p);
            new_key_of.insert(*t, k);
            created.push(k);
        }
        for cycle in &mut self.facets {
            if let Some(i) = cycle.iter().position(|&v| v == z) {
                let k = cycle.len();
                let prev = cycle[(i + k - 1) % k];
                let next = cycle[(i + 1) % k];
                cycle.splice(i..=i, [new_key_of[&prev], new_key_of[&next]]);
            }
        }
        self.facets.push(created.clone());
        self.coords.remove(&z);
        created
    }
}

fn x1(p: &Point) -> &Rational {
    &p[0]
}

/// 2-D cross product of (b-a) x (c-a) in the (x1, x2) projection.
fn cross2(a: &Point, b: &Point, c: &Point) -> Rational {
    let abx = &b[0] - &a[0];
    let aby = &b[1] - &a[1];
    let acx = &c[0] - &a[0];
    let acy = &c[1] - &a[1];
    &abx * &acy - &aby * &acx
}

/// steepness comparison: is edge z->p strictly steeper than z->q?
fn steeper(z: &Point, p: &Point, q: &Point, c: &[Rational; 3]) -> bool {
    let d1 = [&p[0] - &z[0], &p[1] - &z[1], &p[2] - &z[2]];
    let d2 = [&q[0] - &z[0], &q[1] - &z[1], &q[2] - &z[2]];
    let drop1 = &c[0] * &d1[0] + &c[1] * &d1[1] + &c[2] * &d1[2];
    let drop2 = &c[0] * &d2[0] + &c[1] * &d2[1] + &c[2] * &d2[2];
    let len1 = &d1[0] * &d1[0] + &d1[1] * &d1[1] + &d1[2] * &d1[2];
    let len2 = &d2[0] * &d2[0] + &d2[1] * &d2[1] + &d2[2] * &d2[2];
    &drop1 * &drop1 * len2 > &drop2 * &drop2 * len1
}

pub fn sd(n: usize) -> Result<GeometricInstance, Error> {
    assert!(n >= 5);
    // start tetrahedron: projections on a strictly convex chain, the
    // steepest path from the top visiting every vertex
    let pt = |a: i64, b: i64, c: i64| -> Point { [rint(a), rint(b), rint(c)] };
    let mut bld = GeoBuilder {
        facets: vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]],
        coords: BTreeMap::new(),
        next_key: 4,
    };
    bld.coords.insert(3, pt(8, 0, 0)); // the start, aux-objective optimum
    bld.coords.insert(2, pt(4, 1, 1));
    bld.coords.insert(1, pt(2, 4, 0));
    bld.coords.insert(0, pt(0, 9, 1));

    // path bookkeeping: current minimum, its path predecessor, and the
    // anchor whose edge carries each next minimum
    let mut z: Key = 0;
    let mut prev: Key = 1;
    let anchor: Key = 3;

    for _ in 0..n - 4 {
        let nbrs = bld.neighbors(z);
        debug_assert!(nbrs.contains(&prev) && nbrs.contains(&anchor));
        let interior = *nbrs
            .iter()
            .find(|&&t| t != prev && t != anchor)
            .expect("degree 3");
        let placed = place_cut(&mut bld, z, prev, interior, anchor)?;
        prev = placed.1;
        z = placed.2;
    }

    // freeze: ids by increasing x1
    let mut keys: Vec<Key> = bld.coords.keys().copied().collect();
    keys.sort_by(|a, b| x1(&bld.coords[a]).cmp(x1(&bld.coords[b])));
    let mut id_of: BTreeMap<Key, usize> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        id_of.insert(*k, i);
    }
    let m = keys.len();
    let facets: Vec<Vec<usize>> = bld
        .facets
        .iter()
        .map(|cycle| cycle.iter().map(|k| id_of[k]).collect())
        .collect();
    let base = CombinatorialInstance::new(format!("sd-{n}"), facets, m, m - 1);
    let coords: Vec<Point> = keys.iter().map(|k| bld.coords[k].clone()).collect();
    let ginst = GeometricInstance {
        base,
        coords,
        objective: [rint(1), rint(0), rint(0)],
        aux_objective: Some([rint(0), rint(1), rint(0)]),
    };

    // validated, not assumed: the generator fails loudly if any
    // comparison contradicts the intended path
    let report = crate::model::validate(&crate::model::Instance::Geometric(ginst.clone()));
    if !report.ok() {
        return Err(Error::Invalid(format!(
            "sd({n}) failed validation: {:?}",
            report.violations.first()
        )));
    }
    let steep = crate::rules::run_steepest_decrease(&ginst, m - 1)?;
    if steep.steps() != 2 * n - 5 {
        return Err(Error::Invalid(format!(
            "sd({n}): steepest path has {} steps, wanted {}",
            steep.steps(),
            2 * n - 5
        )));
    }
    let shadow = crate::rules::run_shadow_vertex(&ginst, m - 1)?;
    if shadow.vertices != steep.vertices {
        return Err(Error::Invalid(format!(
            "sd({n}): shadow and steepest paths differ"
        )));
    }
    Ok(ginst)
}

/// Places one cut, shrinking the spacing until the exact conditions
/// hold: x1 order (new three strictly below everything else, path
/// order x > m > z'), strict convexity of the projected chain, the
/// steepest choice at x toward m, strict separation of the cut plane,
/// and the aux-objective minimum staying at the start.
fn place_cut(
    bld: &mut GeoBuilder,
    z: Key,
    prev: Key,
    interior: Key,
    anchor: Key,
) -> Result<(Key, Key, Key), Error> {
    let z1 = bld.coords[&z][0].clone();
    // strictly between the minimum and every other vertex
    let second = bld
        .coords
        .iter()
        .filter(|(k, _)| **k != z)
        .map(|(_, p)| p[0].clone())
        .min()
        .unwrap();
    let gap = &second - &z1;
    let spacings: [(i64, i64, i64); 6] = [
        (4, 2, 1),
        (8, 2, 1),
        (3, 2, 1),
        (16, 4, 1),
        (8, 4, 1),
        (2, 4, 1),
    ];
    for (sa, sb, sc) in spacings {
        let mut delta = &gap / rint(8 * sa.max(sb));
        for _ in 0..12 {
            let tau_of = |target: &Rational, t: Key, bld: &GeoBuilder| -> Rational {
                let t1 = &bld.coords[&t][0];
                (target - &z1) / (t1 - &z1)
            };
            let x_target = &z1 + rint(sa) * &delta;
            let m_target = &z1 + rint(sb) * &delta;
            let low_target = &z1 + rint(sc) * &delta;
            let cuts = vec![
                (prev, tau_of(&x_target, prev, bld)),
                (interior, tau_of(&m_target, interior, bld)),
                (anchor, tau_of(&low_target, anchor, bld)),
            ];
            let mut trial = GeoBuilder {
                facets: bld.facets.clone(),
                coords: bld.coords.clone(),
                next_key: bld.next_key,
            };
            let created = trial.truncate(z, &cuts);
            let (x, m, low) = (created[0], created[1], created[2]);
            if cut_is_valid(&trial, z, x, m, low, &bld.coords[&z]) {
                *bld = trial;
                return Ok((x, m, low));
            }
            delta = delta / rint(2);
        }
    }
    Err(Error::Invalid(
        "sd generation could not place a cut satisfying the exact conditions".to_string(),
    ))
}

fn cut_is_valid(trial: &GeoBuilder, _z: Key, x: Key, m: Key, low: Key, zc: &Point) -> bool {
    let obj = [rint(1), rint(0), rint(0)];
    let xc = &trial.coords[&x];
    let mc = &trial.coords[&m];
    let lc = &trial.coords[&low];
    // ranks: low < m < x < everything else
    if !(lc[0] < mc[0] && mc[0] < xc[0]) {
        return false;
    }
    for (k, p) in &trial.coords {
        if *k == x || *k == m || *k == low {
            continue;
        }
        if p[0] <= xc[0] {
            return false;
        }
    }
    // all x1 distinct
    let mut xs: Vec<Rational> = trial.coords.values().map(|p| p[0].clone()).collect();
    xs.sort();
    xs.dedup();
    if xs.len() != trial.coords.len() {
        return false;
    }
    // projected chain strictly convex: sort by x1 and test every turn
    let mut pts: Vec<&Point> = trial.coords.values().collect();
    pts.sort_by(|a, b| a[0].cmp(&b[0]));
    for w in pts.windows(3) {
        if cross2(w[0], w[1], w[2]) <= Rational::zero() {
            return false;
        }
    }
    // steepest choice at x goes to m, strictly
    if !steeper(xc, mc, lc, &obj) {
        return false;
    }
    // the cut plane through (x, m, low) strictly separates the old
    // minimum from every remaining vertex
    let d1 = [&mc[0] - &xc[0], &mc[1] - &xc[1], &mc[2] - &xc[2]];
    let d2 = [&lc[0] - &xc[0], &lc[1] - &xc[1], &lc[2] - &xc[2]];
    let normal = [
        &d1[1] * &d2[2] - &d1[2] * &d2[1],
        &d1[2] * &d2[0] - &d1[0] * &d2[2],
        &d1[0] * &d2[1] - &d1[1] * &d2[0],
    ];
    let eval = |p: &Point| -> Rational {
        &normal[0] * (&p[0] - &xc[0]) + &normal[1] * (&p[1] - &xc[1]) + &normal[2] * (&p[2] - &xc[2])
    };
    let zside = eval(zc);
    if zside.is_zero() {
        return false;
    }
    for (k, p) in &trial.coords {
        if *k == x || *k == m || *k == low {
            continue;
        }
        let side = eval(p);
        if side.is_zero() || (side > Rational::zero()) == (zside > Rational::zero()) {
            return false;
        }
    }
    true
}
