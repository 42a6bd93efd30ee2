//! DAG-aware cut rewriting against the precomputed structure library.
//!
//! Nodes are visited in topological order while a fresh graph is grown
//! alongside. For each node, every enumerated 4-feasible cut is
//! NPN-canonicalized and looked up in the library; the replacement
//! gain is the cut-restricted MFFC of the node (what the replacement
//! frees in the original graph) minus the nodes the library structure
//! actually adds after strash reuse, measured by a trial build that is
//! rolled back. The best strictly positive gain wins (non-negative for
//! the zero-cost variant). Bypassed logic dies in the final sweep.

use crate::aig::{remap_literal, Aig, AigBuilder, Literal};

use super::cuts::{enumerate_cuts, Cut};
use super::library::Structure;
use super::mffc::mffc_size;
use super::npn::{npn_canon, NpnTransform};
use super::TransformCtx;

pub fn rewrite(g: &Aig, zero_cost: bool, ctx: &TransformCtx) -> Aig {
    let cuts = enumerate_cuts(g, ctx.config.max_cuts);
    let fanouts = g.fanout_counts();

    let mut b = AigBuilder::new(g.num_pis());
    let mut map = vec![Literal::FALSE; g.num_nodes_total() as usize];
    for pi in 1..=g.num_pis() {
        map[pi as usize] = Literal::new(pi, false);
    }

    for (idx, n) in g.and_nodes() {
        let mut best: Option<(i64, &Cut, NpnTransform, &Structure)> = None;
        for cut in &cuts[idx as usize] {
            if cut.leaves.len() < 2 || cut.leaves.contains(&idx) {
                continue;
            }
            let (canon, t) = npn_canon(cut.tt);
            let Some(structure) = ctx.library.lookup(canon) else {
                continue;
            };
            let savings = mffc_size(g, &fanouts, idx, |v| cut.leaves.binary_search(&v).is_ok());
            let sp = b.savepoint();
            instantiate(&mut b, structure, &t, cut, &map);
            let added = (b.savepoint() - sp) as i64;
            b.rollback(sp);
            let gain = savings as i64 - added;
            let accept = if zero_cost { gain >= 0 } else { gain > 0 };
            if accept && best.as_ref().map_or(true, |(bg, ..)| gain > *bg) {
                best = Some((gain, cut, t, structure));
            }
        }
        let lit = match best {
            Some((_, cut, t, structure)) => instantiate(&mut b, structure, &t, cut, &map),
            None => {
                let a = remap_literal(&map, n.fanin0);
                let c = remap_literal(&map, n.fanin1);
                b.and(a, c)
            }
        };
        map[idx as usize] = lit;
    }

    for o in g.outputs() {
        let l = remap_literal(&map, *o);
        b.add_output(l);
    }
    let out = b.build(g.name().to_string()).restrash();
    if out.num_ands() > g.num_ands() {
        return g.clone();
    }
    out
}

/// Materializes a library structure over the mapped cut leaves.
fn instantiate(
    b: &mut AigBuilder,
    structure: &Structure,
    t: &NpnTransform,
    cut: &Cut,
    map: &[Literal],
) -> Literal {
    // Structure input slot k is driven by cut leaf leaf_for_slot(k).
    // Cuts with fewer than 4 leaves pad with constants; the canonical
    // function cannot depend on the padded slots.
    let mut lits: Vec<Literal> = Vec::with_capacity(5 + structure.ands.len());
    lits.push(Literal::FALSE);
    for slot in 0..4 {
        let (leaf_idx, neg) = t.leaf_for_slot(slot);
        let lit = match cut.leaves.get(leaf_idx) {
            Some(&leaf) => remap_literal(map, Literal::new(leaf, neg)),
            None => Literal::FALSE,
        };
        lits.push(lit);
    }
    let resolve = |lits: &[Literal], raw: u8| -> Literal {
        let base = lits[(raw >> 1) as usize];
        if raw & 1 == 1 {
            !base
        } else {
            base
        }
    };
    for &(la, lb) in &structure.ands {
        let a = resolve(&lits, la);
        let c = resolve(&lits, lb);
        let r = b.and(a, c);
        lits.push(r);
    }
    let out = resolve(&lits, structure.output);
    // The structure yields the canonical function; undo the output
    // negation of the cut's canonicalizing transform.
    if t.out_neg {
        !out
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{check_equivalence, EquivMode};

    #[test]
    fn absorption_is_found() {
        // a & (a & b) is one redundant node; rewrite collapses it.
        let mut bld = AigBuilder::new(2);
        let (a, c) = (bld.pi(0), bld.pi(1));
        let inner = bld.and(a, c);
        let root = bld.and(a, inner);
        bld.add_output(root);
        let g = bld.build("absorb".into());
        assert_eq!(g.num_ands(), 2);
        let ctx = TransformCtx::with_default_library();
        let out = rewrite(&g, false, &ctx);
        assert_eq!(out.num_ands(), 1);
        assert!(check_equivalence(&g, &out, EquivMode::Exhaustive).unwrap().is_equivalent());
    }

    #[test]
    fn minimal_graph_unchanged_without_zero_cost() {
        // A bare XOR is already at the 3-node class minimum.
        let mut bld = AigBuilder::new(2);
        let o = bld.xor(bld.pi(0), bld.pi(1));
        bld.add_output(o);
        let g = bld.build("xor".into());
        let ctx = TransformCtx::with_default_library();
        let out = rewrite(&g, false, &ctx);
        assert_eq!(out.stats(), g.stats());
    }

    #[test]
    fn corpus_nodes_never_increase_and_equivalence_holds() {
        use crate::aig::random::{random_aig, RandomAigConfig};
        let ctx = TransformCtx::with_default_library();
        let cfg = RandomAigConfig { num_pis: 8, num_pos: 3, num_ands: 60, locality: 0.7 };
        for seed in 0..100 {
            let g = random_aig(&cfg, seed);
            for z in [false, true] {
                let out = rewrite(&g, z, &ctx);
                if !z {
                    assert!(out.num_ands() <= g.num_ands(), "seed {seed}");
                }
                assert!(
                    check_equivalence(&g, &out, EquivMode::Exhaustive).unwrap().is_equivalent(),
                    "seed {seed} z={z}"
                );
            }
        }
    }
}
