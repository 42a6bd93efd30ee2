//! 4-feasible cut enumeration with per-cut truth tables.
//!
//! A cut of node `u` is a set of at most `k` nodes such that every
//! path from a PI to `u` crosses the set; the cut's truth table gives
//! `u` (non-complemented) as a function of its leaves in sorted order.

use std::collections::BTreeSet;

use crate::aig::{Aig, Literal};

use super::npn::{var_tt, Tt4};

pub const CUT_SIZE: usize = 4;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Cut {
    /// Sorted node indices.
    pub leaves: Vec<u32>,
    pub tt: Tt4,
}

impl Cut {
    fn unit(node: u32) -> Cut {
        Cut { leaves: vec![node], tt: var_tt(0) }
    }
}

/// Remaps `tt` over `old_leaves` into the coordinate order of
/// `new_leaves` (a sorted superset).
fn embed_tt(tt: Tt4, old_leaves: &[u32], new_leaves: &[u32]) -> Tt4 {
    let mut pos = [0usize; CUT_SIZE];
    for (j, leaf) in old_leaves.iter().enumerate() {
        pos[j] = new_leaves.binary_search(leaf).expect("leaf must be in union");
    }
    let mut out: Tt4 = 0;
    for i in 0..16u16 {
        let mut old_idx = 0u16;
        for j in 0..old_leaves.len() {
            old_idx |= (i >> pos[j] & 1) << j;
        }
        out |= (tt >> old_idx & 1) << i;
    }
    out
}

fn fanin_tt(cuts: &Cut, lit: Literal) -> Tt4 {
    if lit.is_complemented() {
        !cuts.tt
    } else {
        cuts.tt
    }
}

/// Enumerates cuts for every node. `max_cuts` bounds the per-node cut
/// set (smallest cuts kept, deterministic order).
pub fn enumerate_cuts(g: &Aig, max_cuts: usize) -> Vec<Vec<Cut>> {
    let total = g.num_nodes_total() as usize;
    let mut cuts: Vec<Vec<Cut>> = Vec::with_capacity(total);
    cuts.push(vec![Cut { leaves: vec![], tt: 0x0000 }]); // constant node
    for pi in 1..=g.num_pis() {
        cuts.push(vec![Cut::unit(pi)]);
    }
    for (idx, n) in g.and_nodes() {
        let mut set: BTreeSet<Cut> = BTreeSet::new();
        set.insert(Cut::unit(idx));
        let ca = &cuts[n.fanin0.node() as usize];
        let cb = &cuts[n.fanin1.node() as usize];
        'outer: for a in ca {
            for b in cb {
                let union: BTreeSet<u32> =
                    a.leaves.iter().chain(b.leaves.iter()).copied().collect();
                if union.len() > CUT_SIZE {
                    continue;
                }
                let leaves: Vec<u32> = union.into_iter().collect();
                let ta = embed_tt(fanin_tt(a, n.fanin0), &a.leaves, &leaves);
                let tb = embed_tt(fanin_tt(b, n.fanin1), &b.leaves, &leaves);
                set.insert(Cut { leaves, tt: ta & tb });
                if set.len() > 4 * max_cuts {
                    break 'outer;
                }
            }
        }
        let node_cuts: Vec<Cut> = set
            .into_iter()
            .map(|c| {
                let key = (c.leaves.len(), c.leaves.clone());
                (key, c)
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|(_, c)| c)
            .take(max_cuts)
            .collect();
        cuts.push(node_cuts);
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::AigBuilder;

    /// Truth-table consistency: evaluate each cut function on patterns
    /// derived from simulating the whole graph.
    #[test]
    fn cut_tts_match_simulation() {
        use crate::aig::random::{random_aig, RandomAigConfig};
        let cfg = RandomAigConfig { num_pis: 6, num_pos: 2, num_ands: 40, locality: 0.6 };
        for seed in 0..10 {
            let g = random_aig(&cfg, seed);
            let cuts = enumerate_cuts(&g, 16);
            // Simulate 64 exhaustive patterns over 6 PIs.
            let inputs: Vec<u64> =
                (0..6).map(|p| crate::aig::exhaustive_input_word(p, 0)).collect();
            let values = crate::aig::node_values(&g, &inputs);
            for (idx, _) in g.and_nodes() {
                for cut in &cuts[idx as usize] {
                    for pattern in 0..64u32 {
                        let mut minterm = 0u16;
                        for (j, &leaf) in cut.leaves.iter().enumerate() {
                            if values[leaf as usize] >> pattern & 1 == 1 {
                                minterm |= 1 << j;
                            }
                        }
                        let expect = values[idx as usize] >> pattern & 1;
                        let got = u64::from(cut.tt >> minterm & 1);
                        assert_eq!(expect, got, "node {idx} cut {:?}", cut.leaves);
                    }
                }
            }
        }
    }

    #[test]
    fn absorption_cut_exists() {
        // root = a & (a & b): the cut {a, b} must appear with tt = a & b.
        let mut b = AigBuilder::new(2);
        let (a, c) = (b.pi(0), b.pi(1));
        let inner = b.and(a, c);
        let root = b.and(a, inner);
        b.add_output(root);
        let g = b.build("absorb".into());
        let cuts = enumerate_cuts(&g, 16);
        let root_cuts = &cuts[root.node() as usize];
        let target: Vec<u32> = vec![a.node(), c.node()];
        let found = root_cuts.iter().find(|cut| cut.leaves == target).expect("cut {a,b}");
        assert_eq!(found.tt, var_tt(0) & var_tt(1));
    }
}
