//! Resubstitution: replace a node with existing logic.
//!
//! Seeded random simulation signatures propose candidates cheaply;
//! every acceptance is validated by exact truth-table comparison
//! first. Two forms are attempted per node:
//!
//! * 0-resub: another (topologically earlier) node or PI computes the
//!   same global function, up to complement. Proposed through a
//!   signature index, proven by exhaustive simulation over the joint
//!   primary-input support.
//! * 1-resub: one new AND of two divisors from the node's TFI window
//!   reproduces the node's function over the window leaves.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aig::{node_values, remap_literal, Aig, AigBuilder, Literal, NodeKind};

use super::mffc::mffc_size;
use super::tt::Bits;
use super::TransformCtx;

const SUPPORT_CAP: usize = 12;
const CONE_CAP: usize = 96;
const MAX_ZERO_CANDIDATES: usize = 8;
const MAX_WINDOW_NODES: usize = 48;

pub fn resub(g: &Aig, zero_cost: bool, ctx: &TransformCtx) -> Aig {
    let fanouts = g.fanout_counts();
    let sigs = signatures(g, ctx.config.resub_sig_words, ctx.config.sig_seed);
    let supports = pi_supports(g);

    // Signature index over PIs and ANDs, keyed by the first two words.
    let mut sig_index: HashMap<(u64, u64), Vec<u32>> = HashMap::new();
    for node in 1..g.num_nodes_total() {
        sig_index.entry(sig_key(&sigs[node as usize])).or_default().push(node);
    }

    let mut b = AigBuilder::new(g.num_pis());
    let mut map = vec![Literal::FALSE; g.num_nodes_total() as usize];
    for pi in 1..=g.num_pis() {
        map[pi as usize] = Literal::new(pi, false);
    }

    for (idx, n) in g.and_nodes() {
        if let Some(lit) = try_zero_resub(g, &sigs, &supports, &sig_index, idx, &map) {
            map[idx as usize] = lit;
            continue;
        }
        if let Some(lit) =
            try_one_resub(g, &fanouts, &sigs, idx, zero_cost, &mut b, &map, ctx)
        {
            map[idx as usize] = lit;
            continue;
        }
        let a = remap_literal(&map, n.fanin0);
        let c = remap_literal(&map, n.fanin1);
        map[idx as usize] = b.and(a, c);
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

/// Per-node random simulation signatures, `words` 64-bit words each.
fn signatures(g: &Aig, words: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = g.num_nodes_total() as usize;
    let mut sigs = vec![Vec::with_capacity(words); total];
    let mut inputs = vec![0u64; g.num_pis() as usize];
    for _ in 0..words {
        for w in inputs.iter_mut() {
            *w = rng.gen();
        }
        for (node, v) in node_values(g, &inputs).into_iter().enumerate() {
            sigs[node].push(v);
        }
    }
    sigs
}

fn sig_key(sig: &[u64]) -> (u64, u64) {
    (sig[0], *sig.get(1).unwrap_or(&0))
}

fn sig_equal(a: &[u64], b: &[u64], complemented: bool) -> bool {
    if complemented {
        a.iter().zip(b).all(|(x, y)| *x == !*y)
    } else {
        a == b
    }
}

/// Bounded PI support per node; `None` when wider than [`SUPPORT_CAP`].
fn pi_supports(g: &Aig) -> Vec<Option<Vec<u32>>> {
    let mut sup: Vec<Option<Vec<u32>>> = Vec::with_capacity(g.num_nodes_total() as usize);
    sup.push(Some(vec![]));
    for pi in 1..=g.num_pis() {
        sup.push(Some(vec![pi]));
    }
    for (_, n) in g.and_nodes() {
        let merged = match (&sup[n.fanin0.node() as usize], &sup[n.fanin1.node() as usize]) {
            (Some(a), Some(c)) => {
                let mut m: Vec<u32> = a.iter().chain(c.iter()).copied().collect();
                m.sort_unstable();
                m.dedup();
                (m.len() <= SUPPORT_CAP).then_some(m)
            }
            _ => None,
        };
        sup.push(merged);
    }
    sup
}

/// Transitive fan-in cone of `root`, ascending; `None` beyond the cap.
fn collect_cone(g: &Aig, root: u32, cap: usize) -> Option<Vec<u32>> {
    let mut seen = vec![root];
    let mut work = vec![root];
    while let Some(u) = work.pop() {
        if g.node_kind(u) != NodeKind::And {
            continue;
        }
        let n = g.and_node(u);
        for f in [n.fanin0, n.fanin1] {
            let v = f.node();
            if v != 0 && !seen.contains(&v) {
                seen.push(v);
                if seen.len() > cap {
                    return None;
                }
                work.push(v);
            }
        }
    }
    seen.sort_unstable();
    Some(seen)
}

/// Exact equivalence of `u` and `d` (with polarity) by exhaustive
/// simulation over their joint PI support.
fn cones_agree(
    g: &Aig,
    supports: &[Option<Vec<u32>>],
    u: u32,
    d: u32,
    complemented: bool,
) -> bool {
    let (Some(su), Some(sd)) = (&supports[u as usize], &supports[d as usize]) else {
        return false;
    };
    let mut union: Vec<u32> = su.iter().chain(sd.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    if union.len() > SUPPORT_CAP {
        return false;
    }
    let (Some(cone_u), Some(cone_d)) = (collect_cone(g, u, CONE_CAP), collect_cone(g, d, CONE_CAP))
    else {
        return false;
    };
    let mut nodes: Vec<u32> = cone_u.iter().chain(cone_d.iter()).copied().collect();
    nodes.sort_unstable();
    nodes.dedup();

    let k = union.len();
    let mut vals: HashMap<u32, Bits> = HashMap::new();
    vals.insert(0, Bits::zeros(k));
    for (j, &pi) in union.iter().enumerate() {
        vals.insert(pi, Bits::var(k, j));
    }
    for &v in &nodes {
        if g.node_kind(v) != NodeKind::And {
            continue;
        }
        let n = g.and_node(v);
        let a = fetch(&vals, n.fanin0);
        let c = fetch(&vals, n.fanin1);
        vals.insert(v, a.and(&c));
    }
    let tu = &vals[&u];
    let td = &vals[&d];
    if complemented {
        *tu == td.not()
    } else {
        tu == td
    }
}

fn fetch(vals: &HashMap<u32, Bits>, l: Literal) -> Bits {
    let base = &vals[&l.node()];
    if l.is_complemented() {
        base.not()
    } else {
        base.clone()
    }
}

fn try_zero_resub(
    g: &Aig,
    sigs: &[Vec<u64>],
    supports: &[Option<Vec<u32>>],
    sig_index: &HashMap<(u64, u64), Vec<u32>>,
    idx: u32,
    map: &[Literal],
) -> Option<Literal> {
    let su = &sigs[idx as usize];
    let not_su: Vec<u64> = su.iter().map(|w| !w).collect();
    let mut candidates: Vec<(u32, bool)> = Vec::new();
    for (key, complemented) in [(sig_key(su), false), (sig_key(&not_su), true)] {
        if let Some(nodes) = sig_index.get(&key) {
            for &d in nodes {
                if d < idx && sig_equal(&sigs[d as usize], su, complemented) {
                    candidates.push((d, complemented));
                }
            }
        }
    }
    candidates.sort_unstable();
    for (d, complemented) in candidates.into_iter().take(MAX_ZERO_CANDIDATES) {
        if cones_agree(g, supports, idx, d, complemented) {
            let lit = remap_literal(map, Literal::new(d, complemented));
            return Some(lit);
        }
    }
    None
}

/// TFI window: leaves at the depth boundary (or PIs), interior AND
/// nodes between them and `root`, both ascending.
fn tfi_window(g: &Aig, root: u32, depth: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut dist: HashMap<u32, u32> = HashMap::new();
    dist.insert(root, 0);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut leaves = Vec::new();
    let mut interior = Vec::new();
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        let is_boundary = du == depth || g.node_kind(u) != NodeKind::And;
        if is_boundary {
            leaves.push(u);
            continue;
        }
        interior.push(u);
        let n = g.and_node(u);
        for f in [n.fanin0, n.fanin1] {
            let v = f.node();
            if v == 0 {
                continue;
            }
            if !dist.contains_key(&v) {
                dist.insert(v, du + 1);
                queue.push_back(v);
            }
        }
        if leaves.len() + interior.len() > MAX_WINDOW_NODES {
            return None;
        }
    }
    leaves.sort_unstable();
    leaves.dedup();
    interior.sort_unstable();
    Some((leaves, interior))
}

#[allow(clippy::too_many_arguments)]
fn try_one_resub(
    g: &Aig,
    fanouts: &[u32],
    sigs: &[Vec<u64>],
    idx: u32,
    zero_cost: bool,
    b: &mut AigBuilder,
    map: &[Literal],
    ctx: &TransformCtx,
) -> Option<Literal> {
    let (leaves, interior) = tfi_window(g, idx, ctx.config.resub_window_depth)?;
    if leaves.len() < 2 || leaves.len() > SUPPORT_CAP {
        return None;
    }

    // Window truth tables over the leaves.
    let k = leaves.len();
    let mut vals: HashMap<u32, Bits> = HashMap::new();
    for (j, &leaf) in leaves.iter().enumerate() {
        vals.insert(leaf, Bits::var(k, j));
    }
    for &v in &interior {
        let n = g.and_node(v);
        let a = fetch(&vals, n.fanin0);
        let c = fetch(&vals, n.fanin1);
        vals.insert(v, a.and(&c));
    }
    let target = vals[&idx].clone();

    // Divisors: window nodes other than the root, ascending.
    let divisors: Vec<u32> =
        leaves.iter().chain(interior.iter()).filter(|&&v| v != idx).copied().collect();
    let mut divisors = divisors;
    divisors.sort_unstable();

    let su = &sigs[idx as usize];
    for (i, &d1) in divisors.iter().enumerate() {
        for &d2 in &divisors[i..] {
            for (p1, p2) in [(false, false), (false, true), (true, false), (true, true)] {
                if d1 == d2 && (p1, p2) != (false, true) {
                    continue; // and(x, x) and and(!x, !x) are 0-resubs
                }
                // Cheap signature screen before exact validation.
                let s1 = &sigs[d1 as usize];
                let s2 = &sigs[d2 as usize];
                let m1 = if p1 { !s1[0] } else { s1[0] };
                let m2 = if p2 { !s2[0] } else { s2[0] };
                let cand0 = m1 & m2;
                let out_pol = if cand0 == su[0] {
                    false
                } else if cand0 == !su[0] {
                    true
                } else {
                    continue;
                };
                let full = (1..su.len()).all(|w| {
                    let a = if p1 { !s1[w] } else { s1[w] };
                    let c = if p2 { !s2[w] } else { s2[w] };
                    let v = a & c;
                    if out_pol {
                        v == !su[w]
                    } else {
                        v == su[w]
                    }
                });
                if !full {
                    continue;
                }
                // Exact check over the window leaves.
                let t1 = polarized(&vals[&d1], p1);
                let t2 = polarized(&vals[&d2], p2);
                let cand = t1.and(&t2);
                let exact = if out_pol { cand == target.not() } else { cand == target };
                if !exact {
                    continue;
                }
                let savings =
                    mffc_size(g, fanouts, idx, |v| v == d1 || v == d2) as i64;
                let l1 = remap_literal(map, Literal::new(d1, p1));
                let l2 = remap_literal(map, Literal::new(d2, p2));
                let cost = b.and_cost(l1, l2) as i64;
                let accept = if zero_cost { savings >= cost } else { savings > cost };
                if !accept {
                    continue;
                }
                let lit = b.and(l1, l2);
                return Some(if out_pol { !lit } else { lit });
            }
        }
    }
    None
}

fn polarized(t: &Bits, complemented: bool) -> Bits {
    if complemented {
        t.not()
    } else {
        t.clone()
    }
}
