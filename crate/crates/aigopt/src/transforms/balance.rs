//! Depth-oriented tree balancing.
//!
//! Maximal AND trees are collected by expanding through
//! non-complemented fan-ins that have exactly one fanout (shared or
//! complemented nodes stay tree leaves, so no logic is duplicated).
//! Each tree is rebuilt as a depth-minimal binary tree by repeatedly
//! pairing the two shallowest operands, which is optimal for the
//! resulting root level; hence the overall depth never increases.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::aig::{remap_literal, Aig, AigBuilder, Literal, NodeKind};

/// Balances to a fixpoint: collapses in one sweep (constant leaves,
/// duplicate leaves, strash merges) can expose further absorbable
/// trees, so sweeps repeat until the stats settle. Depth is monotone
/// per sweep, hence over the whole pass.
pub fn balance(g: &Aig) -> Aig {
    let mut cur = balance_once(g);
    for _ in 0..16 {
        let next = balance_once(&cur);
        if next.stats() == cur.stats() {
            return cur;
        }
        cur = next;
    }
    cur
}

fn balance_once(g: &Aig) -> Aig {
    let fanouts = g.fanout_counts();
    // A node is absorbed into its fanout's tree when its single use is
    // a plain (non-complemented) AND fan-in edge.
    let mut complemented_use = vec![false; g.num_nodes_total() as usize];
    for (_, n) in g.and_nodes() {
        for f in [n.fanin0, n.fanin1] {
            if f.is_complemented() {
                complemented_use[f.node() as usize] = true;
            }
        }
    }
    for o in g.outputs() {
        complemented_use[o.node() as usize] = true; // PO refs always root
    }
    let absorbed = |v: u32| -> bool {
        g.node_kind(v) == NodeKind::And && fanouts[v as usize] == 1 && !complemented_use[v as usize]
    };

    let mut b = AigBuilder::new(g.num_pis());
    let mut map = vec![Literal::FALSE; g.num_nodes_total() as usize];
    for pi in 1..=g.num_pis() {
        map[pi as usize] = Literal::new(pi, false);
    }

    let mut leaves: Vec<Literal> = Vec::new();
    let mut stack: Vec<Literal> = Vec::new();
    for (idx, n) in g.and_nodes() {
        if absorbed(idx) {
            continue;
        }
        // Gather the leaves of the maximal tree rooted here.
        leaves.clear();
        stack.clear();
        stack.push(n.fanin0);
        stack.push(n.fanin1);
        while let Some(l) = stack.pop() {
            if !l.is_complemented() && absorbed(l.node()) {
                let inner = g.and_node(l.node());
                stack.push(inner.fanin0);
                stack.push(inner.fanin1);
            } else {
                leaves.push(remap_literal(&map, l));
            }
        }
        map[idx as usize] = build_balanced(&mut b, &mut leaves);
    }

    for o in g.outputs() {
        let l = remap_literal(&map, *o);
        b.add_output(l);
    }
    let out = b.build(g.name().to_string()).restrash();
    // The pairing argument makes depth growth impossible; the check is
    // a correctness guard, not an expected path.
    if out.stats().num_levels > g.stats().num_levels {
        return g.clone();
    }
    out
}

/// Combines `leaves` into a depth-minimal AND tree, always pairing the
/// two shallowest operands (ties broken by literal value).
fn build_balanced(b: &mut AigBuilder, leaves: &mut Vec<Literal>) -> Literal {
    // AND is idempotent: duplicate leaves collapse, and a leaf together
    // with its complement makes the whole tree constant FALSE.
    leaves.sort_unstable_by_key(|l| l.raw());
    leaves.dedup();
    for pair in leaves.windows(2) {
        if pair[0] == !pair[1] {
            return Literal::FALSE;
        }
    }
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> =
        leaves.iter().map(|l| Reverse((b.level(*l), l.raw()))).collect();
    while heap.len() > 1 {
        let Reverse((_, raw0)) = heap.pop().unwrap();
        let Reverse((_, raw1)) = heap.pop().unwrap();
        let combined = b.and(Literal::from_raw(raw0), Literal::from_raw(raw1));
        heap.push(Reverse((b.level(combined), combined.raw())));
    }
    match heap.pop() {
        Some(Reverse((_, raw))) => Literal::from_raw(raw),
        None => Literal::TRUE, // empty AND (all operands cancelled upstream)
    }
}
