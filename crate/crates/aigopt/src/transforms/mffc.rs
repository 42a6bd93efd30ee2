//! Maximum fanout-free cone queries against an immutable graph.
//!
//! The MFFC of a node is the set of AND nodes that become dead when
//! the node is replaced: every fanout path of a member passes through
//! the root. Counting follows the usual virtual-dereference scheme on
//! a fanout snapshot, so the graph itself is never mutated.

use std::collections::HashMap;

use crate::aig::{Aig, NodeKind};

/// Size of the root's MFFC, stopping at `is_leaf` nodes (which are
/// never freed even if all their fanouts die).
pub fn mffc_size(g: &Aig, fanouts: &[u32], root: u32, is_leaf: impl Fn(u32) -> bool) -> u32 {
    let mut derefs: HashMap<u32, u32> = HashMap::new();
    let mut count = 1u32; // the root itself
    let mut work = vec![root];
    while let Some(u) = work.pop() {
        let n = g.and_node(u);
        for f in [n.fanin0, n.fanin1] {
            let v = f.node();
            if g.node_kind(v) != NodeKind::And || is_leaf(v) {
                continue;
            }
            let d = derefs.entry(v).or_insert(0);
            *d += 1;
            if *d == fanouts[v as usize] {
                count += 1;
                work.push(v);
            }
        }
    }
    count
}

/// The members of the root's unrestricted MFFC, ascending node order.
pub fn collect_mffc(g: &Aig, fanouts: &[u32], root: u32) -> Vec<u32> {
    let mut derefs: HashMap<u32, u32> = HashMap::new();
    let mut members = vec![root];
    let mut work = vec![root];
    while let Some(u) = work.pop() {
        let n = g.and_node(u);
        for f in [n.fanin0, n.fanin1] {
            let v = f.node();
            if g.node_kind(v) != NodeKind::And {
                continue;
            }
            let d = derefs.entry(v).or_insert(0);
            *d += 1;
            if *d == fanouts[v as usize] {
                members.push(v);
                work.push(v);
            }
        }
    }
    members.sort_unstable();
    members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::AigBuilder;

    #[test]
    fn chain_is_fully_contained() {
        // o = ((a & b) & c) & d: every interior node has fanout 1.
        let mut b = AigBuilder::new(4);
        let mut acc = b.pi(0);
        for i in 1..4 {
            let p = b.pi(i);
            acc = b.and(acc, p);
        }
        b.add_output(acc);
        let g = b.build("chain".into());
        let fo = g.fanout_counts();
        assert_eq!(mffc_size(&g, &fo, acc.node(), |_| false), 3);
        assert_eq!(collect_mffc(&g, &fo, acc.node()).len(), 3);
    }

    #[test]
    fn shared_node_is_excluded() {
        // t = a & b feeds both outputs; MFFC of o1 is just o1.
        let mut b = AigBuilder::new(3);
        let t = b.and(b.pi(0), b.pi(1));
        let o1 = b.and(t, b.pi(2));
        b.add_output(o1);
        b.add_output(t);
        let g = b.build("shared".into());
        let fo = g.fanout_counts();
        assert_eq!(mffc_size(&g, &fo, o1.node(), |_| false), 1);
    }

    #[test]
    fn leaves_stop_the_cone() {
        let mut b = AigBuilder::new(4);
        let t = b.and(b.pi(0), b.pi(1));
        let o = b.and(t, b.pi(2));
        b.add_output(o);
        let g = b.build("cut".into());
        let fo = g.fanout_counts();
        // With t as a cut leaf, only the root is freed.
        assert_eq!(mffc_size(&g, &fo, o.node(), |v| v == t.node()), 1);
        assert_eq!(mffc_size(&g, &fo, o.node(), |_| false), 2);
    }
}
