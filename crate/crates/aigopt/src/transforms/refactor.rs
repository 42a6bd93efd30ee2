//! Cone refactoring: extract each node's maximum fanout-free cone,
//! recompute its function over the cone leaves, and resynthesize it by
//! recursive Shannon decomposition, keeping the result only when it is
//! cheaper than the cone it replaces (not costlier, for `-z`).

use std::collections::HashMap;

use crate::aig::{remap_literal, Aig, AigBuilder, Literal, NodeKind};

use super::mffc::collect_mffc;
use super::tt::Bits;
use super::TransformCtx;

pub fn refactor(g: &Aig, zero_cost: bool, ctx: &TransformCtx) -> Aig {
    let fanouts = g.fanout_counts();
    let bound = ctx.config.refactor_leaf_bound;

    let mut b = AigBuilder::new(g.num_pis());
    let mut map = vec![Literal::FALSE; g.num_nodes_total() as usize];
    for pi in 1..=g.num_pis() {
        map[pi as usize] = Literal::new(pi, false);
    }

    for (idx, n) in g.and_nodes() {
        let default = |b: &mut AigBuilder, map: &[Literal]| {
            let a = remap_literal(map, n.fanin0);
            let c = remap_literal(map, n.fanin1);
            b.and(a, c)
        };

        let mffc = collect_mffc(g, &fanouts, idx);
        if mffc.len() < 2 {
            map[idx as usize] = default(&mut b, &map);
            continue;
        }
        let leaves = cone_leaves(g, &mffc);
        if leaves.len() < 2 || leaves.len() > bound {
            map[idx as usize] = default(&mut b, &map);
            continue;
        }
        let tt = cone_function(g, idx, &mffc, &leaves);
        let leaf_lits: Vec<Literal> =
            leaves.iter().map(|&v| remap_literal(&map, Literal::new(v, false))).collect();

        let sp = b.savepoint();
        let mut memo = HashMap::new();
        shannon(&mut b, &tt, &leaf_lits, &mut memo);
        let cost = (b.savepoint() - sp) as i64;
        b.rollback(sp);

        let delta = cost - mffc.len() as i64;
        let accept = if zero_cost { delta <= 0 } else { delta < 0 };
        map[idx as usize] = if accept {
            let mut memo = HashMap::new();
            shannon(&mut b, &tt, &leaf_lits, &mut memo)
        } else {
            default(&mut b, &map)
        };
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

/// Nodes outside the cone feeding cone members, ascending.
fn cone_leaves(g: &Aig, mffc: &[u32]) -> Vec<u32> {
    let mut leaves: Vec<u32> = Vec::new();
    for &u in mffc {
        let n = g.and_node(u);
        for f in [n.fanin0, n.fanin1] {
            let v = f.node();
            if g.node_kind(v) != NodeKind::Constant && mffc.binary_search(&v).is_err() {
                leaves.push(v);
            }
        }
    }
    leaves.sort_unstable();
    leaves.dedup();
    leaves
}

/// The root's function over the cone leaves, by simulating the cone
/// on exhaustive leaf patterns.
fn cone_function(g: &Aig, root: u32, mffc: &[u32], leaves: &[u32]) -> Bits {
    let k = leaves.len();
    let mut vals: HashMap<u32, Bits> = HashMap::new();
    for (j, &leaf) in leaves.iter().enumerate() {
        vals.insert(leaf, Bits::var(k, j));
    }
    for &u in mffc {
        // mffc is ascending, hence topologically ordered
        let n = g.and_node(u);
        let fetch = |vals: &HashMap<u32, Bits>, l: Literal| -> Bits {
            if l.node() == 0 {
                return if l.is_complemented() { Bits::ones(k) } else { Bits::zeros(k) };
            }
            let base = &vals[&l.node()];
            if l.is_complemented() {
                base.not()
            } else {
                base.clone()
            }
        };
        let a = fetch(&vals, n.fanin0);
        let c = fetch(&vals, n.fanin1);
        vals.insert(u, a.and(&c));
    }
    vals.remove(&root).expect("root evaluated")
}

/// Recursive Shannon resynthesis with structural reuse via the
/// builder's strash table and a per-call function memo.
fn shannon(
    b: &mut AigBuilder,
    tt: &Bits,
    leaf_lits: &[Literal],
    memo: &mut HashMap<Bits, Literal>,
) -> Literal {
    if tt.is_zero() {
        return Literal::FALSE;
    }
    if tt.is_ones() {
        return Literal::TRUE;
    }
    if let Some(&l) = memo.get(tt) {
        return l;
    }

    let support: Vec<usize> = (0..tt.num_vars).filter(|&j| tt.depends_on(j)).collect();
    debug_assert!(!support.is_empty());
    if support.len() == 1 {
        let j = support[0];
        let lit = if tt.cofactor(j, true).is_ones() { leaf_lits[j] } else { !leaf_lits[j] };
        memo.insert(tt.clone(), lit);
        return lit;
    }

    // Split on the variable whose cofactors depend on the fewest
    // variables combined; ties go to the lowest index.
    let (split, c0, c1) = support
        .iter()
        .map(|&j| {
            let c0 = tt.cofactor(j, false);
            let c1 = tt.cofactor(j, true);
            (j, c0, c1)
        })
        .min_by_key(|(j, c0, c1)| (c0.support_size() + c1.support_size(), *j))
        .expect("nonempty support");

    let x = leaf_lits[split];
    let lit = if c0.is_zero() {
        let hi = shannon(b, &c1, leaf_lits, memo);
        b.and(x, hi)
    } else if c1.is_zero() {
        let lo = shannon(b, &c0, leaf_lits, memo);
        b.and(!x, lo)
    } else if c0.is_ones() {
        let hi = shannon(b, &c1, leaf_lits, memo);
        !b.and(x, !hi)
    } else if c1.is_ones() {
        let lo = shannon(b, &c0, leaf_lits, memo);
        !b.and(!x, !lo)
    } else if c1 == c0.not() {
        let lo = shannon(b, &c0, leaf_lits, memo);
        b.xor(x, lo)
    } else {
        let hi = shannon(b, &c1, leaf_lits, memo);
        let lo = shannon(b, &c0, leaf_lits, memo);
        b.mux(x, hi, lo)
    };
    memo.insert(tt.clone(), lit);
    lit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{check_equivalence, EquivMode};

    #[test]
    fn factors_shared_term() {
        // (a & b) | (a & c) built literally: three AND nodes. The
        // factored form a & (b | c) needs two.
        let mut bld = AigBuilder::new(3);
        let (a, c, d) = (bld.pi(0), bld.pi(1), bld.pi(2));
        let t0 = bld.and(a, c);
        let t1 = bld.and(a, d);
        let o = bld.or(t0, t1);
        bld.add_output(o);
        let g = bld.build("share".into());
        assert_eq!(g.num_ands(), 3);
        let ctx = TransformCtx::with_default_library();
        let out = refactor(&g, false, &ctx);
        assert_eq!(out.num_ands(), 2);
        assert!(check_equivalence(&g, &out, EquivMode::Exhaustive).unwrap().is_equivalent());
    }

    #[test]
    fn pi_only_circuit_unchanged() {
        let mut bld = AigBuilder::new(2);
        let p = bld.pi(0);
        bld.add_output(p);
        bld.add_output(!p);
        let g = bld.build("wires".into());
        let ctx = TransformCtx::with_default_library();
        let out = refactor(&g, false, &ctx);
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
                let out = refactor(&g, z, &ctx);
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
