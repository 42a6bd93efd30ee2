//! And-inverter graph representation: literals, structural hashing,
//! AIGER I/O, word-parallel simulation and equivalence checking.
//!
//! Node 0 is the constant-FALSE node. Nodes `1..=num_pis` are primary
//! inputs; the remaining nodes are two-input ANDs stored in topological
//! order (every fan-in index is strictly smaller than the node index).
//! Inverters live on edges as the complement bit of a [`Literal`].

mod aiger;
mod equiv;
pub mod random;
mod sim;

pub use aiger::{parse_aiger, write_aiger, AigerFormat};
pub use equiv::{check_equivalence, EquivMode, EquivResult, EXHAUSTIVE_PI_CAP};
pub use sim::{exhaustive_input_word, node_values, simulate, simulate_words, SIM_WORD_BITS};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AigError {
    #[error("aiger parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("literal {lit} references node {node} but the graph has {count} nodes")]
    DanglingLiteral { lit: u32, node: u32, count: u32 },
    #[error("expected {expected} input words, got {got}")]
    WordCountMismatch { expected: usize, got: usize },
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("exhaustive equivalence supports at most {max} inputs, graph has {got}")]
    TooManyInputs { max: u32, got: u32 },
    #[error("empty AIG has no defined quality metric")]
    EmptyAig,
}

/// An edge reference: a node index plus a complement flag.
///
/// Encoded AIGER-style as `2*node + complemented`, so literal 0 is
/// constant FALSE and literal 1 is constant TRUE.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn new(node: u32, complemented: bool) -> Self {
        Literal(node * 2 + complemented as u32)
    }

    pub fn from_raw(raw: u32) -> Self {
        Literal(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn node(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    /// The same node with the complement bit flipped.
    pub fn complement(self) -> Self {
        Literal(self.0 ^ 1)
    }

    pub fn with_complement(self, c: bool) -> Self {
        Literal(self.0 & !1 | c as u32)
    }

    pub fn is_constant(self) -> bool {
        self.node() == 0
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.complement()
    }
}

/// Follows `l` through a node-indexed literal map, preserving edge
/// complementation on top of whatever polarity the map target carries.
pub fn remap_literal(map: &[Literal], l: Literal) -> Literal {
    let t = map[l.node() as usize];
    t.with_complement(l.is_complemented() ^ t.is_complemented())
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!n{}", self.node())
        } else {
            write!(f, "n{}", self.node())
        }
    }
}

/// A two-input AND node; fan-ins are stored sorted by raw literal value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AndNode {
    pub fanin0: Literal,
    pub fanin1: Literal,
}

/// Immutable-after-build combinational and-inverter graph.
///
/// Shareable across threads for reading; all transforms produce fresh
/// graphs rather than mutating in place.
#[derive(Clone, Debug)]
pub struct Aig {
    num_pis: u32,
    /// AND nodes; node index of `ands[i]` is `1 + num_pis + i`.
    ands: Vec<AndNode>,
    outputs: Vec<Literal>,
    name: String,
}

/// Size and depth summary of an [`Aig`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AigStats {
    pub num_pis: u32,
    pub num_pos: u32,
    pub num_nodes: u32,
    pub num_levels: u32,
}

impl fmt::Display for AigStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i/o = {}/{}  and = {}  lev = {}",
            self.num_pis, self.num_pos, self.num_nodes, self.num_levels
        )
    }
}

/// Node classification used by stats and the policy encoder.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeKind {
    Constant,
    Input,
    And,
}

impl Aig {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_pis(&self) -> u32 {
        self.num_pis
    }

    pub fn num_pos(&self) -> u32 {
        self.outputs.len() as u32
    }

    pub fn num_ands(&self) -> u32 {
        self.ands.len() as u32
    }

    /// Total node count including the constant node and PIs.
    pub fn num_nodes_total(&self) -> u32 {
        1 + self.num_pis + self.ands.len() as u32
    }

    pub fn outputs(&self) -> &[Literal] {
        &self.outputs
    }

    pub fn node_kind(&self, node: u32) -> NodeKind {
        if node == 0 {
            NodeKind::Constant
        } else if node <= self.num_pis {
            NodeKind::Input
        } else {
            NodeKind::And
        }
    }

    /// Fan-ins of an AND node; panics if `node` is not an AND.
    pub fn and_node(&self, node: u32) -> AndNode {
        self.ands[(node - 1 - self.num_pis) as usize]
    }

    /// Index of the first AND node.
    pub fn first_and(&self) -> u32 {
        1 + self.num_pis
    }

    /// Iterator over `(node_index, AndNode)` in topological order.
    pub fn and_nodes(&self) -> impl Iterator<Item = (u32, AndNode)> + '_ {
        let base = self.first_and();
        self.ands
            .iter()
            .enumerate()
            .map(move |(i, n)| (base + i as u32, *n))
    }

    /// Per-node logic level: constant and PIs are 0, an AND is
    /// 1 + max of its fan-in levels.
    pub fn levels(&self) -> Vec<u32> {
        let mut lv = vec![0u32; self.num_nodes_total() as usize];
        for (idx, n) in self.and_nodes() {
            lv[idx as usize] = 1 + lv[n.fanin0.node() as usize].max(lv[n.fanin1.node() as usize]);
        }
        lv
    }

    pub fn stats(&self) -> AigStats {
        let lv = self.levels();
        let num_levels = self
            .outputs
            .iter()
            .map(|o| lv[o.node() as usize])
            .max()
            .unwrap_or(0);
        AigStats {
            num_pis: self.num_pis,
            num_pos: self.num_pos(),
            num_nodes: self.num_ands(),
            num_levels,
        }
    }

    /// Inverse node-depth product; the optimization objective.
    /// Depth is floored at 1 so wire-only graphs stay finite.
    pub fn qor_proxy(&self) -> Result<f64, AigError> {
        let s = self.stats();
        if s.num_nodes == 0 {
            return Err(AigError::EmptyAig);
        }
        Ok(1.0 / (s.num_nodes as f64 * s.num_levels.max(1) as f64))
    }

    /// Area-delay proxy `nodes * max(levels, 1)`; lower is better.
    pub fn adp_proxy(&self) -> Result<f64, AigError> {
        Ok(1.0 / self.qor_proxy()?)
    }

    /// Number of fanout references per node (PO references included).
    pub fn fanout_counts(&self) -> Vec<u32> {
        let mut fo = vec![0u32; self.num_nodes_total() as usize];
        for (_, n) in self.and_nodes() {
            fo[n.fanin0.node() as usize] += 1;
            fo[n.fanin1.node() as usize] += 1;
        }
        for o in &self.outputs {
            fo[o.node() as usize] += 1;
        }
        fo
    }

    /// Nodes reachable from the outputs (transitive fan-in), as a mask
    /// indexed by node.
    pub fn live_mask(&self) -> Vec<bool> {
        let mut live = vec![false; self.num_nodes_total() as usize];
        for o in &self.outputs {
            live[o.node() as usize] = true;
        }
        for (idx, n) in self.and_nodes().collect::<Vec<_>>().into_iter().rev() {
            if live[idx as usize] {
                live[n.fanin0.node() as usize] = true;
                live[n.fanin1.node() as usize] = true;
            }
        }
        live
    }

    /// Rebuild through a fresh strashing builder. Dead nodes are dropped
    /// and duplicate fan-in pairs merge; the result is canonical.
    pub fn restrash(&self) -> Aig {
        let live = self.live_mask();
        let mut b = AigBuilder::new(self.num_pis);
        let mut map = vec![Literal::FALSE; self.num_nodes_total() as usize];
        for pi in 1..=self.num_pis {
            map[pi as usize] = Literal::new(pi, false);
        }
        for (idx, n) in self.and_nodes() {
            if !live[idx as usize] {
                continue;
            }
            let a = remap_literal(&map, n.fanin0);
            let c = remap_literal(&map, n.fanin1);
            map[idx as usize] = b.and(a, c);
        }
        for o in &self.outputs {
            b.add_output(remap_literal(&map, *o));
        }
        b.build(self.name.clone())
    }
}

/// Single-owner builder with structural hashing.
///
/// `and` applies the usual local simplifications (constants, repeated
/// and complementary fan-ins) and returns an existing node on a hash
/// hit, so no two ANDs ever share the same ordered fan-in pair.
pub struct AigBuilder {
    num_pis: u32,
    ands: Vec<AndNode>,
    levels: Vec<u32>,
    outputs: Vec<Literal>,
    strash: HashMap<(u32, u32), u32>,
}

impl AigBuilder {
    pub fn new(num_pis: u32) -> Self {
        AigBuilder {
            num_pis,
            ands: Vec::new(),
            levels: Vec::new(),
            outputs: Vec::new(),
            strash: HashMap::new(),
        }
    }

    /// Logic level of the node behind `l` (constants and PIs are 0).
    pub fn level(&self, l: Literal) -> u32 {
        let n = l.node();
        if n <= self.num_pis {
            0
        } else {
            self.levels[(n - 1 - self.num_pis) as usize]
        }
    }

    pub fn num_pis(&self) -> u32 {
        self.num_pis
    }

    pub fn num_ands(&self) -> u32 {
        self.ands.len() as u32
    }

    pub fn pi(&self, i: u32) -> Literal {
        debug_assert!(i < self.num_pis);
        Literal::new(1 + i, false)
    }

    /// Strashed AND of two literals.
    pub fn and(&mut self, a: Literal, b: Literal) -> Literal {
        match Self::simplify(a, b) {
            Some(lit) => lit,
            None => {
                let (f0, f1) = Self::sort_pair(a, b);
                let key = (f0.raw(), f1.raw());
                if let Some(&node) = self.strash.get(&key) {
                    return Literal::new(node, false);
                }
                let node = 1 + self.num_pis + self.ands.len() as u32;
                let lv = 1 + self.level(f0).max(self.level(f1));
                self.ands.push(AndNode { fanin0: f0, fanin1: f1 });
                self.levels.push(lv);
                self.strash.insert(key, node);
                Literal::new(node, false)
            }
        }
    }

    /// Would `and(a, b)` create a new node? Used for dry-run gain counting.
    pub fn and_cost(&self, a: Literal, b: Literal) -> u32 {
        if Self::simplify(a, b).is_some() {
            return 0;
        }
        let (f0, f1) = Self::sort_pair(a, b);
        if self.strash.contains_key(&(f0.raw(), f1.raw())) {
            0
        } else {
            1
        }
    }

    fn simplify(a: Literal, b: Literal) -> Option<Literal> {
        if a == Literal::FALSE || b == Literal::FALSE || a == !b {
            return Some(Literal::FALSE);
        }
        if a == Literal::TRUE {
            return Some(b);
        }
        if b == Literal::TRUE || a == b {
            return Some(a);
        }
        None
    }

    fn sort_pair(a: Literal, b: Literal) -> (Literal, Literal) {
        if a.raw() <= b.raw() {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Marks the current node count for [`AigBuilder::rollback`].
    pub fn savepoint(&self) -> usize {
        self.ands.len()
    }

    /// Discards every node created since `savepoint`, including their
    /// strash entries. Literals handed out in between become invalid.
    pub fn rollback(&mut self, savepoint: usize) {
        for n in self.ands.drain(savepoint..) {
            self.strash.remove(&(n.fanin0.raw(), n.fanin1.raw()));
        }
        self.levels.truncate(savepoint);
    }

    pub fn or(&mut self, a: Literal, b: Literal) -> Literal {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Literal, b: Literal) -> Literal {
        let t0 = self.and(a, !b);
        let t1 = self.and(!a, b);
        self.or(t0, t1)
    }

    pub fn mux(&mut self, sel: Literal, t: Literal, e: Literal) -> Literal {
        let on = self.and(sel, t);
        let off = self.and(!sel, e);
        self.or(on, off)
    }

    pub fn add_output(&mut self, lit: Literal) {
        self.outputs.push(lit);
    }

    pub fn build(self, name: String) -> Aig {
        Aig {
            num_pis: self.num_pis,
            ands: self.ands,
            outputs: self.outputs,
            name,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_input_and() -> Aig {
        let mut b = AigBuilder::new(2);
        let (a, c) = (b.pi(0), b.pi(1));
        let o = b.and(a, c);
        b.add_output(o);
        b.build("and2".into())
    }

    #[test]
    fn strash_identity_elements() {
        let mut b = AigBuilder::new(1);
        let x = b.pi(0);
        assert_eq!(b.and(x, Literal::TRUE), x);
        assert_eq!(b.and(Literal::TRUE, x), x);
        assert_eq!(b.and(x, Literal::FALSE), Literal::FALSE);
        assert_eq!(b.and(x, x), x);
        assert_eq!(b.and(x, !x), Literal::FALSE);
        assert_eq!(b.num_ands(), 0);
    }

    #[test]
    fn strash_commutative_hashing() {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.pi(0), b.pi(1));
        let n1 = b.and(x, y);
        let n2 = b.and(y, x);
        assert_eq!(n1, n2);
        assert_eq!(b.num_ands(), 1);
    }

    #[test]
    fn strash_canonical_under_construction_order() {
        // Build (a&b)&(c&d) in two different orders; node counts agree.
        let build = |flip: bool| {
            let mut b = AigBuilder::new(4);
            let p: Vec<_> = (0..4).map(|i| b.pi(i)).collect();
            let (l, r) = if flip {
                let r = b.and(p[3], p[2]);
                let l = b.and(p[1], p[0]);
                (l, r)
            } else {
                let l = b.and(p[0], p[1]);
                let r = b.and(p[2], p[3]);
                (l, r)
            };
            let o = b.and(l, r);
            b.add_output(o);
            b.build("t".into())
        };
        assert_eq!(build(false).stats(), build(true).stats());
    }

    #[test]
    fn stats_single_and() {
        let g = two_input_and();
        let s = g.stats();
        assert_eq!((s.num_nodes, s.num_levels), (1, 1));
        assert_eq!(g.qor_proxy().unwrap(), 1.0);
    }

    #[test]
    fn stats_balanced_tree_of_four() {
        let mut b = AigBuilder::new(4);
        let p: Vec<_> = (0..4).map(|i| b.pi(i)).collect();
        let l = b.and(p[0], p[1]);
        let r = b.and(p[2], p[3]);
        let o = b.and(l, r);
        b.add_output(o);
        let s = b.build("tree4".into()).stats();
        assert_eq!((s.num_nodes, s.num_levels), (3, 2));
    }

    #[test]
    fn stats_wire_only_circuit() {
        let mut b = AigBuilder::new(1);
        let x = b.pi(0);
        b.add_output(x);
        let s = b.build("wire".into()).stats();
        assert_eq!((s.num_nodes, s.num_levels), (0, 0));
    }

    #[test]
    fn qor_halving_nodes_at_equal_depth_doubles() {
        // 2 nodes, depth 2 vs 1 node depth 2: q doubles when nodes halve.
        let q1 = 1.0 / (4.0 * 2.0);
        let q2 = 1.0 / (2.0 * 2.0);
        assert_eq!(q2, 2.0 * q1);
    }

    #[test]
    fn qor_empty_graph_is_error() {
        let b = AigBuilder::new(1);
        let g = b.build("empty".into());
        assert!(matches!(g.qor_proxy(), Err(AigError::EmptyAig)));
    }

    #[test]
    fn levels_bounded_by_nodes() {
        let g = two_input_and();
        let s = g.stats();
        assert!(s.num_levels <= s.num_nodes);
    }

    #[test]
    fn restrash_drops_dead_nodes() {
        let mut b = AigBuilder::new(3);
        let (x, y, z) = (b.pi(0), b.pi(1), b.pi(2));
        let live = b.and(x, y);
        let _dead = b.and(y, z);
        b.add_output(live);
        let g = b.build("dead".into());
        assert_eq!(g.num_ands(), 2);
        assert_eq!(g.restrash().num_ands(), 1);
    }
}
