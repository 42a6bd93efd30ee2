//! Minimal-structure library for cut rewriting.
//!
//! Built by exhaustive enumeration of strashed AIG structures over
//! four inputs: breadth-first over "states" (the set of internal node
//! functions built so far), adding one AND of two existing literals
//! per step, up to `max_nodes` nodes. States are deduplicated up to
//! NPN transformation of the inputs, which keeps the frontier small
//! without losing any reachable class. For each NPN class the first
//! structure found (hence one of minimal node count within the bound)
//! is retained; classes never reached are recorded as uncovered.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Read, Write};

use super::npn::{npn_canon, npn_canon_tt, var_tt, NpnTransform, Tt4, NUM_NPN_CLASSES_4};

const MAGIC: &[u8; 4] = b"ALIB";
const VERSION: u32 = 1;

/// A small AIG template over four input slots.
///
/// Literal encoding is AIGER-style over template-local nodes:
/// node 0 is constant FALSE, nodes 1-4 the input slots, nodes 5+
/// the template's AND gates in definition order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Structure {
    pub ands: Vec<(u8, u8)>,
    pub output: u8,
}

impl Structure {
    pub fn num_ands(&self) -> usize {
        self.ands.len()
    }

    /// Evaluates the template as a truth table, for self-checks.
    pub fn eval(&self) -> Tt4 {
        let mut vals: Vec<Tt4> = vec![0];
        for j in 0..4 {
            vals.push(var_tt(j));
        }
        for &(a, b) in &self.ands {
            let va = vals[(a >> 1) as usize] ^ if a & 1 == 1 { 0xffff } else { 0 };
            let vb = vals[(b >> 1) as usize] ^ if b & 1 == 1 { 0xffff } else { 0 };
            vals.push(va & vb);
        }
        let v = vals[(self.output >> 1) as usize];
        if self.output & 1 == 1 {
            !v
        } else {
            v
        }
    }

    /// Rewires the template's input slots so that it evaluates to
    /// `t.apply(self.eval())`: slot `j` of the original is driven by
    /// slot `perm[j]`, complemented per `in_neg`, and the output takes
    /// `out_neg`.
    fn transformed(&self, t: &NpnTransform) -> Structure {
        let rewire = |lit: u8| -> u8 {
            let node = lit >> 1;
            if node == 0 || node >= 5 {
                return lit;
            }
            let j = (node - 1) as usize;
            let neg = (t.in_neg >> j) & 1;
            ((1 + t.perm[j]) * 2) | ((lit & 1) ^ neg)
        };
        let ands = self.ands.iter().map(|&(a, b)| (rewire(a), rewire(b))).collect();
        let output = rewire(self.output) ^ t.out_neg as u8;
        Structure { ands, output }
    }
}

/// Map from canonical 4-input truth table to its minimal known
/// structure.
pub struct RewriteLibrary {
    pub max_nodes: u8,
    entries: HashMap<Tt4, Structure>,
    uncovered: Vec<Tt4>,
}

impl RewriteLibrary {
    pub fn lookup(&self, canon_tt: Tt4) -> Option<&Structure> {
        self.entries.get(&canon_tt)
    }

    /// Number of NPN classes with a stored structure.
    pub fn coverage(&self) -> usize {
        self.entries.len()
    }

    /// Canonical truth tables of classes not reached within the bound.
    pub fn uncovered(&self) -> &[Tt4] {
        &self.uncovered
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.max_nodes);
        let mut keys: Vec<Tt4> = self.entries.keys().copied().collect();
        keys.sort_unstable();
        out.extend_from_slice(&(keys.len() as u32).to_le_bytes());
        for k in keys {
            let s = &self.entries[&k];
            out.extend_from_slice(&k.to_le_bytes());
            out.push(s.ands.len() as u8);
            for &(a, b) in &s.ands {
                out.push(a);
                out.push(b);
            }
            out.push(s.output);
        }
        out.extend_from_slice(&(self.uncovered.len() as u32).to_le_bytes());
        for &tt in &self.uncovered {
            out.extend_from_slice(&tt.to_le_bytes());
        }
        out
    }

    pub fn deserialize(mut r: impl Read) -> io::Result<RewriteLibrary> {
        let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a rewrite library file"));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        if u32::from_le_bytes(u32buf) != VERSION {
            return Err(bad("unsupported library version"));
        }
        let mut byte = [0u8; 1];
        r.read_exact(&mut byte)?;
        let max_nodes = byte[0];
        r.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        let mut entries = HashMap::with_capacity(n);
        let mut u16buf = [0u8; 2];
        for _ in 0..n {
            r.read_exact(&mut u16buf)?;
            let tt = u16::from_le_bytes(u16buf);
            r.read_exact(&mut byte)?;
            let num_ands = byte[0] as usize;
            let mut ands = Vec::with_capacity(num_ands);
            for _ in 0..num_ands {
                let mut pair = [0u8; 2];
                r.read_exact(&mut pair)?;
                ands.push((pair[0], pair[1]));
            }
            r.read_exact(&mut byte)?;
            let s = Structure { ands, output: byte[0] };
            if s.eval() != tt {
                return Err(bad("library structure does not evaluate to its key"));
            }
            entries.insert(tt, s);
        }
        r.read_exact(&mut u32buf)?;
        let nu = u32::from_le_bytes(u32buf) as usize;
        let mut uncovered = Vec::with_capacity(nu);
        for _ in 0..nu {
            r.read_exact(&mut u16buf)?;
            uncovered.push(u16::from_le_bytes(u16buf));
        }
        Ok(RewriteLibrary { max_nodes, entries, uncovered })
    }

    pub fn write_file(&self, path: &std::path::Path) -> io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.serialize())
    }

    pub fn read_file(path: &std::path::Path) -> io::Result<RewriteLibrary> {
        RewriteLibrary::deserialize(std::fs::File::open(path)?)
    }
}

/// Precomputed minterm remapping tables for the 384 input-side NPN
/// transforms (24 permutations x 16 negation masks), shared by state
/// canonicalization; entry `[t][f]` is `f` with transform `t` applied.
struct ApplyTable {
    table: Vec<Vec<Tt4>>,
}

impl ApplyTable {
    fn build() -> ApplyTable {
        let mut maps: Vec<[u8; 16]> = Vec::with_capacity(384);
        let mut perms: Vec<[u8; 4]> = Vec::new();
        let mut items = [0u8, 1, 2, 3];
        fn rec(items: &mut [u8; 4], k: usize, out: &mut Vec<[u8; 4]>) {
            if k == 4 {
                out.push(*items);
                return;
            }
            for i in k..4 {
                items.swap(k, i);
                rec(items, k + 1, out);
                items.swap(k, i);
            }
        }
        rec(&mut items, 0, &mut perms);
        perms.sort();
        for p in &perms {
            for neg in 0u8..16 {
                let mut map = [0u8; 16];
                for (i, m) in map.iter_mut().enumerate() {
                    let mut k = 0u8;
                    for (j, &pj) in p.iter().enumerate() {
                        k |= (((i >> pj) & 1) as u8) << j;
                    }
                    *m = k ^ neg;
                }
                maps.push(map);
            }
        }
        let table = maps
            .iter()
            .map(|map| {
                let mut row = vec![0u16; 1 << 16];
                for (f, slot) in row.iter_mut().enumerate() {
                    let mut g: Tt4 = 0;
                    for (i, &m) in map.iter().enumerate() {
                        g |= ((f as u16) >> m & 1) << i;
                    }
                    *slot = g;
                }
                row
            })
            .collect();
        ApplyTable { table }
    }

    /// Canonical key of a state: minimum over input-side transforms of
    /// the sorted, polarity-normalized node function list.
    fn canon_state(&self, nodes: &[Tt4]) -> Vec<Tt4> {
        let mut best: Option<Vec<Tt4>> = None;
        let mut buf: Vec<Tt4> = Vec::with_capacity(nodes.len());
        for row in &self.table {
            buf.clear();
            for &t in nodes {
                let g = row[t as usize];
                buf.push(g.min(!g));
            }
            buf.sort_unstable();
            if best.as_ref().map_or(true, |b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.unwrap()
    }
}

#[derive(Clone)]
struct State {
    /// Internal node functions, original frame, in build order.
    nodes: Vec<Tt4>,
    /// Gate list in template literal encoding.
    gates: Vec<(u8, u8)>,
}

/// Exhaustively enumerates strashed AIG structures over 4 inputs up to
/// `max_nodes` AND nodes, retaining the first (minimal) structure per
/// NPN class.
pub fn build_rewrite_library(max_nodes: u8) -> RewriteLibrary {
    let apply = ApplyTable::build();
    let mut canon_cache = vec![Tt4::MAX; 1 << 16];

    let mut entries: HashMap<Tt4, Structure> = HashMap::new();
    let cover = |f: Tt4,
                     state: &State,
                     gate: (u8, u8),
                     entries: &mut HashMap<Tt4, Structure>,
                     canon_cache: &mut Vec<Tt4>| {
        let c = if canon_cache[f as usize] != Tt4::MAX {
            canon_cache[f as usize]
        } else {
            let c = npn_canon_tt(f);
            canon_cache[f as usize] = c;
            canon_cache[(!f) as usize] = c;
            c
        };
        if entries.contains_key(&c) {
            return;
        }
        let mut gates = state.gates.clone();
        gates.push(gate);
        let raw = Structure { output: (4 + gates.len() as u8) * 2, ands: gates };
        debug_assert_eq!(raw.eval(), f);
        let (c2, t) = npn_canon(f);
        debug_assert_eq!(c2, c);
        let s = raw.transformed(&t);
        debug_assert_eq!(s.eval(), c);
        entries.insert(c, s);
    };

    // 0-node classes: constants and wires.
    for f in [0x0000u16, var_tt(0) as Tt4] {
        let (c, t) = npn_canon(f);
        let raw = Structure {
            ands: vec![],
            output: if f == 0 { 0 } else { 2 },
        };
        let s = raw.transformed(&t);
        debug_assert_eq!(s.eval(), c);
        entries.entry(c).or_insert(s);
    }

    let empty = State { nodes: vec![], gates: vec![] };
    let mut frontier: BTreeMap<Vec<Tt4>, State> = BTreeMap::new();
    frontier.insert(vec![], empty);

    for depth in 1..=max_nodes {
        let last = depth == max_nodes;
        let mut next: BTreeMap<Vec<Tt4>, State> = BTreeMap::new();
        // Identical raw node sets reached through different parents or
        // product orders share one canonicalization.
        let mut raw_seen: std::collections::HashSet<Vec<Tt4>> = std::collections::HashSet::new();
        for state in frontier.values() {
            // Operand pool: input slots then internal nodes.
            let pool_tts: Vec<Tt4> = (0..4)
                .map(var_tt)
                .chain(state.nodes.iter().copied())
                .collect();
            let pool_lits: Vec<u8> =
                (0..4).map(|j| (1 + j) * 2).chain((0..state.nodes.len()).map(|i| (5 + i as u8) * 2)).collect();
            let n = pool_tts.len();
            for i in 0..n {
                for pi in 0u8..2 {
                    let a = if pi == 1 { !pool_tts[i] } else { pool_tts[i] };
                    for j in i..n {
                        let start_pj = if j == i { pi + 1 } else { 0 };
                        for pj in start_pj..2 {
                            let b = if pj == 1 { !pool_tts[j] } else { pool_tts[j] };
                            let f = a & b;
                            // Constant or duplicate functions never help.
                            if f == 0x0000
                                || f == 0xffff
                                || pool_tts.contains(&f)
                                || pool_tts.contains(&!f)
                            {
                                continue;
                            }
                            let gate = (pool_lits[i] | pi, pool_lits[j] | pj);
                            cover(f, state, gate, &mut entries, &mut canon_cache);
                            if !last {
                                let mut raw: Vec<Tt4> =
                                    state.nodes.iter().map(|&t| t.min(!t)).collect();
                                raw.push(f.min(!f));
                                raw.sort_unstable();
                                if !raw_seen.insert(raw) {
                                    continue;
                                }
                                let mut nodes = state.nodes.clone();
                                nodes.push(f);
                                let key = apply.canon_state(&nodes);
                                next.entry(key).or_insert_with(|| {
                                    let mut gates = state.gates.clone();
                                    gates.push(gate);
                                    State { nodes, gates }
                                });
                            }
                        }
                    }
                }
            }
        }
        frontier = next;
    }

    let mut uncovered = Vec::new();
    let mut seen: HashMap<Tt4, ()> = HashMap::new();
    for f in 0u32..=0xffff {
        let c = npn_canon_tt(f as Tt4);
        if seen.insert(c, ()).is_none() && !entries.contains_key(&c) {
            uncovered.push(c);
        }
    }
    debug_assert_eq!(seen.len(), NUM_NPN_CLASSES_4);
    uncovered.sort_unstable();
    RewriteLibrary { max_nodes, entries, uncovered }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::npn::npn_canon;

    fn library() -> &'static RewriteLibrary {
        use std::sync::OnceLock;
        static LIB: OnceLock<RewriteLibrary> = OnceLock::new();
        LIB.get_or_init(|| build_rewrite_library(7))
    }

    #[test]
    fn wire_class_is_zero_nodes() {
        let (c, _) = npn_canon(var_tt(0));
        let s = library().lookup(c).unwrap();
        assert_eq!(s.num_ands(), 0);
    }

    #[test]
    fn and4_class_is_three_nodes() {
        let and4 = var_tt(0) & var_tt(1) & var_tt(2) & var_tt(3);
        let (c, _) = npn_canon(and4);
        let s = library().lookup(c).unwrap();
        assert_eq!(s.num_ands(), 3);
    }

    /// Exactly 136 of the 222 classes admit an implementation with at
    /// most 7 AND nodes; the rest are recorded as uncovered. The value
    /// is frozen from the exhaustive enumeration itself.
    #[test]
    fn coverage_at_bound_seven() {
        let lib = library();
        assert_eq!(lib.coverage() + lib.uncovered().len(), NUM_NPN_CLASSES_4);
        assert_eq!(lib.coverage(), 136, "coverage = {}", lib.coverage());
    }

    #[test]
    fn known_minimal_sizes() {
        let lib = library();
        let size = |f: Tt4| lib.lookup(npn_canon(f).0).map(|s| s.num_ands());
        let (a, b, c) = (var_tt(0), var_tt(1), var_tt(2));
        assert_eq!(size(a & b), Some(1));
        assert_eq!(size(a ^ b), Some(3));
        assert_eq!(size((a & b) | (!a & c)), Some(3)); // mux
        assert_eq!(size((a & b) | (a & c) | (b & c)), Some(4)); // maj
        assert_eq!(size(a ^ b ^ c), Some(6));
        // 4-input parity needs 9 nodes; uncovered at bound 7.
        let parity4 = a ^ b ^ c ^ var_tt(3);
        assert_eq!(size(parity4), None);
        assert!(lib.uncovered().contains(&npn_canon(parity4).0));
    }

    #[test]
    fn every_structure_evaluates_to_its_key() {
        let lib = library();
        let mut checked = 0;
        for f in (0u32..=0xffff).step_by(31) {
            let (c, _) = npn_canon(f as Tt4);
            if let Some(s) = lib.lookup(c) {
                assert_eq!(s.eval(), c);
                assert!(s.num_ands() <= lib.max_nodes as usize);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn serialization_round_trip() {
        let lib = library();
        let bytes = lib.serialize();
        let lib2 = RewriteLibrary::deserialize(bytes.as_slice()).unwrap();
        assert_eq!(lib2.coverage(), lib.coverage());
        assert_eq!(lib2.uncovered(), lib.uncovered());
        assert_eq!(lib2.max_nodes, lib.max_nodes);
        let and2 = var_tt(0) & var_tt(1);
        let (c, _) = npn_canon(and2);
        assert_eq!(lib2.lookup(c), lib.lookup(c));
    }

    #[test]
    fn deserialize_rejects_garbage() {
        assert!(RewriteLibrary::deserialize(&b"NOPE"[..]).is_err());
    }

    #[test]
    fn small_bound_library_is_subset() {
        let small = build_rewrite_library(3);
        let big = library();
        assert!(small.coverage() < big.coverage());
        for (&tt, s) in &small.entries {
            assert_eq!(s.eval(), tt);
        }
    }
}
