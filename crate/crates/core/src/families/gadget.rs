//! The random-edge lower bound family: a dual-cyclic backbone whose
//! path vertices are each replaced by an 11-facet flow gadget obtained
//! through ten successive vertex cuts.
//!
//! The gadget recipe below was found by `find-gadget`, an exhaustive
//! search over cut sequences: it is pinned by three independent checks
//! (structural validation, Mihalisin-Klee realizability, and the exact
//! per-configuration flow cost of 1897/128 with every edge flow an
//! integer multiple of 1/128).

use std::collections::HashMap;

use crate::families::builder::{Key, PolyBuilder};
use crate::model::{CombinatorialInstance, VertexId};

/// One vertex cut: (vertex key, new-vertex rank order by neighbor key).
/// Key space: 0 = the replaced backbone vertex, 1 = the entry-side
/// neighbor, 2 = the dotted-side neighbor, 3 = the exit-side neighbor,
/// then 4.. for the cut vertices in creation order.
pub type CutStep = (Key, [Key; 3]);

/// The frozen gadget recipe, spliced in from the search tool's output
/// so generation is deterministic and instant.
pub const GADGET_RECIPE: &[CutStep] = &[
    (0, [1, 2, 3]),
    (4, [1, 6, 5]),
    (7, [1, 8, 9]),
    (10, [1, 11, 12]),
    (9, [12, 8, 5]),
    (5, [18, 2, 6]),
    (19, [18, 21, 20]),
    (6, [21, 8, 3]),
    (25, [21, 27, 26]),
    (27, [26, 29, 3]),
];

/// The dual-cyclic ladder backbone with its path orientation: the
/// a-rail vertices are the 1-vertices the configurations replace, the
/// b-rail carries the never-visited top row.
pub fn backbone(k: usize) -> CombinatorialInstance {
    assert!(k >= 4);
    let m = 2 * k - 4;
    // ranks: b_1 = 2k-5; b_j = 2k-2-2j (j = 2..=k-2); a_i = 2k-2i-3
    // (i = 2..=k-2); a_{k-1} = 0.
    let b = |j: usize| -> VertexId {
        if j == 1 {
            2 * k - 5
        } else {
            2 * k - 2 - 2 * j
        }
    };
    let a = |i: usize| -> VertexId {
        if i == k - 1 {
            0
        } else {
            2 * k - 2 * i - 3
        }
    };
    let mut facets: Vec<Vec<VertexId>> = Vec::new();
    let mut big1 = vec![b(1)];
    for i in 2..=k - 1 {
        big1.push(a(i));
    }
    facets.push(big1);
    let mut bigk = vec![b(1)];
    for j in 2..=k - 2 {
        bigk.push(b(j));
    }
    bigk.push(a(k - 1));
    facets.push(bigk);
    facets.push(vec![a(2), b(1), b(2)]);
    facets.push(vec![a(k - 2), a(k - 1), b(k - 2)]);
    for j in 3..=k - 2 {
        facets.push(vec![a(j - 1), a(j), b(j), b(j - 1)]);
    }
    CombinatorialInstance::new(format!("backbone-{k}"), facets, m, 2 * k - 7)
}

/// Replays the gadget recipe at one backbone vertex inside a builder.
/// `roles = [entry, dotted, exit]` are the builder keys of the three
/// neighbors carrying the boundary edges. Returns the keys of the
/// gadget entry (its rank maximum) and exit (its rank minimum).
pub fn replay_gadget(
    bld: &mut PolyBuilder,
    target: Key,
    roles: [Key; 3],
    recipe: &[CutStep],
) -> (Key, Key) {
    let mut map: HashMap<Key, Key> = HashMap::new();
    map.insert(0, target);
    map.insert(1, roles[0]);
    map.insert(2, roles[1]);
    map.insert(3, roles[2]);
    let mut next_recipe_key = 4;
    for &(w, order) in recipe {
        let new_keys = bld.truncate(map[&w], [map[&order[0]], map[&order[1]], map[&order[2]]]);
        for q in new_keys {
            map.insert(next_recipe_key, q);
            next_recipe_key += 1;
        }
    }
    // entry: the patch vertex adjacent to the entry-side neighbor;
    // exit: adjacent to the exit-side neighbor.
    let entry = patch_vertex_adjacent(bld, roles[0], &map);
    let exit = patch_vertex_adjacent(bld, roles[2], &map);
    (entry, exit)
}

fn patch_vertex_adjacent(bld: &PolyBuilder, role: Key, map: &HashMap<Key, Key>) -> Key {
    let patch: Vec<Key> = map
        .iter()
        .filter(|(rk, _)| **rk >= 4)
        .map(|(_, &k)| k)
        .collect();
    let hits: Vec<Key> = bld
        .neighbors(role)
        .into_iter()
        .filter(|k| patch.contains(k))
        .collect();
    assert_eq!(hits.len(), 1, "role neighbor not uniquely attached");
    hits[0]
}

/// The full lower-bound family: `n = 11k - 20` facets.
pub fn re_lower(k: usize) -> CombinatorialInstance {
    assert!(k >= 4);
    let base = backbone(k);
    let mut bld = PolyBuilder::from_instance(&base);
    let a_rank = |i: usize| -> usize {
        if i == k - 1 {
            0
        } else {
            2 * k - 2 * i - 3
        }
    };
    let b_rank = |j: usize| -> usize {
        if j == 1 {
            2 * k - 5
        } else {
            2 * k - 2 - 2 * j
        }
    };
    // keys in the builder equal the backbone vertex ids
    let mut prev_exit: Key = b_rank(1); // entry of the first gadget is fed by b_1
    let mut first_entry: Option<Key> = None;
    for i in 2..=k - 1 {
        let target = a_rank(i);
        let dotted = if i == k - 1 { b_rank(k - 2) } else { b_rank(i) };
        let exit_side = if i == k - 1 {
            b_rank(1)
        } else {
            a_rank(i + 1)
        };
        let (entry, exit) = replay_gadget(&mut bld, target, [prev_exit, dotted, exit_side], GADGET_RECIPE);
        if first_entry.is_none() {
            first_entry = Some(entry);
        }
        prev_exit = exit;
    }
    let start_rank = bld.rank_of_key(first_entry.unwrap());
    bld.freeze(format!("re-lower-{k}"), start_rank)
}

/// Vertex-id ranges of the k-2 configurations, highest first. Each
/// block spans 21 consecutive ids; the b-row ids sit between them.
pub fn re_lower_blocks(k: usize) -> Vec<std::ops::Range<VertexId>> {
    let m = 22 * k - 44;
    // order positions: b_1, b_2, block_2, b_3, block_3, ..., b_{k-2},
    // block_{k-2}, block_{k-1}
    let mut blocks = Vec::new();
    let mut pos = 2; // after b_1, b_2
    for i in 2..=k - 1 {
        let top_id = m - 1 - pos;
        blocks.push(top_id + 1 - 21..top_id + 1);
        pos += 21;
        if i < k - 2 {
            pos += 1; // b_{i+1}
        }
        let _ = i;
    }
    blocks
}

/// The smallest standalone instance holding one configuration with no
/// leaving edge: the k=4 backbone with only its bottom path vertex
/// replaced. Its start is the gadget entry, whose expectation is
/// exactly 1897/128 - 1.
pub fn configuration_fixture() -> CombinatorialInstance {
    let base = backbone(4);
    let mut bld = PolyBuilder::from_instance(&base);
    // a_3 = vertex 0: neighbors a_2 = 1 (entry side), b_2 = 2 (dotted),
    // b_1 = 3 (exit side, an in-edge here: the last configuration)
    let (entry, _exit) = replay_gadget(&mut bld, 0, [1, 2, 3], GADGET_RECIPE);
    let start_rank = bld.rank_of_key(entry);
    bld.freeze("re-configuration", start_rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectation::{expected_random_edge, flow_cost, random_edge_flow};
    use crate::model::{check_mk, validate, Instance};
    use crate::rational::{rat, rint, Rational};
    use num_bigint::BigInt;
    use num_traits::Zero;

    #[test]
    fn backbone_members_are_valid() {
        for k in 4..=12 {
            let inst = backbone(k);
            assert_eq!(inst.num_facets(), k);
            let report = validate(&Instance::Combinatorial(inst.clone()));
            assert!(report.ok(), "k={k}: {:?}", report.violations);
            assert!(check_mk(&inst).realizable(), "k={k}");
        }
    }

    #[test]
    fn re_lower_counts_and_realizability() {
        for k in [4, 5, 7] {
            let inst = re_lower(k);
            assert_eq!(inst.num_facets(), 11 * k - 20, "k={k}");
            assert_eq!(inst.num_vertices, 22 * k - 44);
            let report = validate(&Instance::Combinatorial(inst.clone()));
            assert!(report.ok(), "k={k}: {:?}", report.violations);
            assert!(check_mk(&inst).realizable(), "k={k}");
        }
    }

    #[test]
    fn re_lower_exact_expectation() {
        for k in [4, 6] {
            let inst = re_lower(k);
            let table = expected_random_edge(&inst);
            let expected = rat(1897 * (k as i64 - 2), 128) - rint(1);
            assert_eq!(table.values[inst.start], expected, "k={k}");
        }
    }

    #[test]
    fn re_lower_per_configuration_flow_cost() {
        let k = 5;
        let inst = re_lower(k);
        let flow = random_edge_flow(&inst, inst.start);
        assert_eq!(flow_cost(&flow), rat(1897 * (k as i64 - 2), 128) - rint(1));
        let blocks = re_lower_blocks(k);
        assert_eq!(blocks.len(), k - 2);
        for (i, block) in blocks.iter().enumerate() {
            assert_eq!(block.len(), 21, "block {i}");
            let mut cost = Rational::zero();
            for ((from, to), p) in &flow.edge_p {
                // edges inside the block, plus its leaving edge (the
                // unique edge out of the block's bottom vertex)
                if (block.contains(from) && block.contains(to))
                    || (*from == block.start && *to < block.start)
                {
                    cost += p;
                }
            }
            let last = i == blocks.len() - 1;
            let want = if last {
                rat(1897, 128) - rint(1)
            } else {
                rat(1897, 128)
            };
            assert_eq!(cost, want, "block {i}");
        }
        // the 128-unit pattern: every block edge flow is a multiple of 1/128
        for ((from, _), p) in &flow.edge_p {
            if blocks.iter().any(|b| b.contains(from)) {
                let scaled = p * rint(128);
                assert!(scaled.denom() == &BigInt::from(1), "flow {p} not in Z/128");
            }
        }
    }

    #[test]
    fn configuration_fixture_expectation() {
        let fixture = configuration_fixture();
        assert_eq!(fixture.num_facets(), 14);
        let report = validate(&Instance::Combinatorial(fixture.clone()));
        assert!(report.ok(), "{:?}", report.violations);
        assert!(check_mk(&fixture).realizable());
        let table = expected_random_edge(&fixture);
        assert_eq!(table.values[fixture.start], rat(1897, 128) - rint(1));
    }
}
