//! Combinatorial polytope builder based on repeated vertex truncation.
//!
//! Vertices are opaque keys; a separate descending order list carries
//! the intended objective ranks. Truncating a vertex replaces it by a
//! triangle facet whose three vertices sit on the old edges, which
//! preserves realizability and adds exactly one facet.

use crate::model::{CombinatorialInstance, VertexId};

pub type Key = usize;

#[derive(Debug, Clone)]
pub struct PolyBuilder {
    facets: Vec<Vec<Key>>,
    /// all vertex keys in descending rank order
    order: Vec<Key>,
    next_key: Key,
}

impl PolyBuilder {
    /// Starts from explicit facet cycles over keys `0..num_keys`, with
    /// `order` listing every key once, highest rank first.
    pub fn new(facets: Vec<Vec<Key>>, order: Vec<Key>) -> Self {
        let next_key = order.iter().copied().max().map_or(0, |k| k + 1);
        PolyBuilder {
            facets,
            order,
            next_key,
        }
    }

    /// Loads an instance; key = vertex id.
    pub fn from_instance(inst: &CombinatorialInstance) -> Self {
        let order: Vec<Key> = (0..inst.num_vertices).rev().collect();
        PolyBuilder::new(inst.facets.clone(), order)
    }

    pub fn num_vertices(&self) -> usize {
        self.order.len()
    }

    pub fn key_of_rank(&self, rank: usize) -> Key {
        self.order[self.order.len() - 1 - rank]
    }

    pub fn rank_of_key(&self, key: Key) -> usize {
        let pos = self
            .order
            .iter()
            .position(|&k| k == key)
            .expect("key not in order");
        self.order.len() - 1 - pos
    }

    /// Neighbors of a key, derived from the facet cycles.
    pub fn neighbors(&self, key: Key) -> Vec<Key> {
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

    /// The unique neighbor whose rank satisfies the predicate; panics
    /// if the neighbor is not unique (generator bugs, not user input).
    pub fn neighbor_towards(&self, key: Key, pred: impl Fn(usize) -> bool) -> Key {
        let hits: Vec<Key> = self
            .neighbors(key)
            .into_iter()
            .filter(|&t| pred(self.rank_of_key(t)))
            .collect();
        assert_eq!(hits.len(), 1, "ambiguous neighbor selection at key {key}");
        hits[0]
    }

    /// Cuts vertex `w`. The three new vertices sit on the edges towards
    /// the given neighbors and take `w`'s rank slot in that descending
    /// order. Returns the new keys in the same order.
    pub fn truncate(&mut self, w: Key, neighbor_rank_order: [Key; 3]) -> [Key; 3] {
        let neighbors = self.neighbors(w);
        assert_eq!(neighbors.len(), 3, "truncation needs a degree-3 vertex");
        for t in neighbor_rank_order {
            assert!(neighbors.contains(&t), "not a neighbor of the cut vertex");
        }
        let mut new_key_of = |_t: Key| {
            let k = self.next_key;
            self.next_key += 1;
            k
        };
        let q: [Key; 3] = [
            new_key_of(neighbor_rank_order[0]),
            new_key_of(neighbor_rank_order[1]),
            new_key_of(neighbor_rank_order[2]),
        ];
        let key_on_edge = |t: Key| -> Key {
            let i = neighbor_rank_order.iter().position(|&x| x == t).unwrap();
            q[i]
        };

        // splice the old facets
        for cycle in &mut self.facets {
            if let Some(i) = cycle.iter().position(|&v| v == w) {
                let k = cycle.len();
                let prev = cycle[(i + k - 1) % k];
                let next = cycle[(i + 1) % k];
                cycle.splice(i..=i, [key_on_edge(prev), key_on_edge(next)]);
            }
        }
        // the new triangle facet (any cyclic order of 3 vertices)
        self.facets.push(vec![q[0], q[1], q[2]]);

        // rank slot: replace w by the three new keys, descending
        let pos = self.order.iter().position(|&k| k == w).unwrap();
        self.order.splice(pos..=pos, q);
        q
    }

    /// Relabels keys by rank and produces the instance. `start_rank`
    /// names the designated start vertex by rank.
    pub fn freeze(&self, name: impl Into<String>, start_rank: usize) -> CombinatorialInstance {
        let m = self.order.len();
        let mut id_of_key = vec![usize::MAX; self.next_key];
        for (pos, &k) in self.order.iter().enumerate() {
            id_of_key[k] = m - 1 - pos;
        }
        let facets: Vec<Vec<VertexId>> = self
            .facets
            .iter()
            .map(|cycle| cycle.iter().map(|&k| id_of_key[k]).collect())
            .collect();
        CombinatorialInstance::new(name, facets, m, start_rank)
    }
}
