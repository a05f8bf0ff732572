//! Least-entered (greatest-decrease tie-break) worst-case family.
//!
//! Built from the nested-arc family on n-3 facets by three vertex
//! cuts at its spine top (recipe found by `find-legd`): the first tie
//! sends the greatest decrease tie-break off the big facet, two forced
//! 1-vertices re-enter it, and from then on the least-entered rule
//! sticks to fresh facets all the way down, visiting all but three
//! vertices: 2n-8 steps from v_{2n-6}.

use crate::families::builder::PolyBuilder;
use crate::families::klee;
use crate::model::{CombinatorialInstance, Error};

pub fn le_gd(n: usize) -> Result<CombinatorialInstance, Error> {
    if n < 9 {
        return Err(Error::Invalid(
            "le-gd needs n >= 9 (the base family needs n-3 >= 6)".to_string(),
        ));
    }
    let k = n - 3;
    let mut inst = klee(k);
    // (cut rank, new-vertex rank order by neighbor rank), applied with
    // a rank relabel after each cut
    let steps: [(usize, [usize; 3]); 3] = [
        (2 * k - 6, [2 * k - 5, 0, 2 * k - 7]),
        (2 * k - 6, [2 * k - 4, 2 * k - 5, 2 * k - 7]),
        (2 * k - 4, [2 * k - 2, 2 * k - 6, 2 * k - 5]),
    ];
    for (w, order) in steps {
        let mut bld = PolyBuilder::from_instance(&inst);
        let wk = bld.key_of_rank(w);
        let order_keys = [
            bld.key_of_rank(order[0]),
            bld.key_of_rank(order[1]),
            bld.key_of_rank(order[2]),
        ];
        bld.truncate(wk, order_keys);
        inst = bld.freeze("le-gd", 0);
    }
    inst.name = format!("le-gd-{n}");
    inst.start = 2 * n - 6;
    Ok(inst)
}
