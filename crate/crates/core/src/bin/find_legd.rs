//! Search for the least-entered (greatest-decrease tie-break) family:
//! a seed instance plus a few vertex cuts such that the rule walks
//! exactly 2n-8 steps from v_{2n-6}.

use lp3sim::families::builder::PolyBuilder;
use lp3sim::families::rf_lower;
use lp3sim::model::{check_mk, validate, CombinatorialInstance, Instance};
use lp3sim::rules::{run_least_entered, TieBreak};

fn candidate_ok(inst: &CombinatorialInstance) -> bool {
    let n = inst.num_facets();
    let report = validate(&Instance::Combinatorial(inst.clone()));
    if !report.ok() {
        return false;
    }
    if !check_mk(inst).realizable() {
        return false;
    }
    let trace = match run_least_entered(inst, TieBreak::GreatestDecrease, 2 * n - 6, None) {
        Ok(t) => t,
        Err(_) => return false,
    };
    trace.steps() == 2 * n - 8
}

fn search(seed: &CombinatorialInstance, depth: usize, recipe: &mut Vec<(usize, [usize; 3])>, hits: &mut Vec<Vec<(usize, [usize; 3])>>, max_hits: usize) {
    if hits.len() >= max_hits {
        return;
    }
    if depth == 0 {
        if candidate_ok(seed) {
            println!("HIT on {} (n={}): {:?}", seed.name, seed.num_facets(), recipe);
            hits.push(recipe.clone());
        }
        return;
    }
    for w in 0..seed.num_vertices {
        let bld = PolyBuilder::from_instance(seed);
        let nbrs = bld.neighbors(w);
        if nbrs.len() != 3 {
            continue;
        }
        let ins: Vec<usize> = nbrs.iter().copied().filter(|&t| t > w).collect();
        let outs: Vec<usize> = nbrs.iter().copied().filter(|&t| t < w).collect();
        if ins.is_empty() || outs.is_empty() {
            continue;
        }
        for &top in &ins {
            for &bottom in &outs {
                let mid = *nbrs.iter().find(|&&t| t != top && t != bottom).unwrap();
                let mut b2 = PolyBuilder::from_instance(seed);
                b2.truncate(w, [top, mid, bottom]);
                let cut = b2.freeze(format!("{}+cut", seed.name), 0);
                recipe.push((w, [top, mid, bottom]));
                search(&cut, depth - 1, recipe, hits, max_hits);
                recipe.pop();
                if hits.len() >= max_hits {
                    return;
                }
            }
        }
    }
}

fn main() {
    let mut seeds: Vec<CombinatorialInstance> = Vec::new();
    for a in [2usize, 3, 4, 5] {
        for b in [1usize, 2] {
            seeds.push(rf_lower(a, b));
        }
    }
    for n in [7usize, 9] {
        seeds.push(lp3sim::families::gd(n));
    }
    for n in [6usize, 7, 8] {
        seeds.push(lp3sim::families::klee(n));
    }
    for (a, b) in [(2usize, 1usize), (3, 1)] {
        seeds.push(lp3sim::families::le_re(a, b));
    }
    for cuts in 1..=3 {
        for seed in &seeds {
            println!("seed {} (n={}), {cuts} cuts", seed.name, seed.num_facets());
            let mut recipe = Vec::new();
            let mut hits = Vec::new();
            search(seed, cuts, &mut recipe, &mut hits, 4);
        }
    }
}
