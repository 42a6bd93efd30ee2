//! NPN canonicalization of 4-input Boolean functions.
//!
//! A function's NPN class is its orbit under input negation, input
//! permutation, and output negation. The canonical representative is
//! the numerically smallest truth table in the orbit; the transform
//! that reaches it is recorded so library structures can be mapped
//! back onto concrete cut leaves.

/// Truth table of a function of up to 4 variables. Bit `i` holds
/// `f(x)` where variable `j` is bit `j` of `i`.
pub type Tt4 = u16;

/// Truth table of variable `j` alone.
pub const fn var_tt(j: usize) -> Tt4 {
    [0xaaaa, 0xcccc, 0xf0f0, 0xff00][j]
}

pub const NUM_NPN_CLASSES_4: usize = 222;

/// All 24 permutations of 4 elements, lexicographic.
fn all_perms() -> Vec<[u8; 4]> {
    let mut out = Vec::with_capacity(24);
    let mut items = [0u8, 1, 2, 3];
    permute(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut [u8; 4], k: usize, out: &mut Vec<[u8; 4]>) {
    if k == 4 {
        out.push(*items);
        return;
    }
    for i in k..4 {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Minterm index remapping tables: for permutation `p`,
/// `map[i] = sum_j bit(i, p[j]) << j`.
struct PermTables {
    perms: Vec<[u8; 4]>,
    maps: Vec<[u8; 16]>,
}

fn perm_tables() -> &'static PermTables {
    use std::sync::OnceLock;
    static TABLES: OnceLock<PermTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let perms = all_perms();
        let maps = perms
            .iter()
            .map(|p| {
                let mut map = [0u8; 16];
                for (i, m) in map.iter_mut().enumerate() {
                    let mut k = 0u8;
                    for (j, &pj) in p.iter().enumerate() {
                        k |= (((i >> pj) & 1) as u8) << j;
                    }
                    *m = k;
                }
                map
            })
            .collect();
        PermTables { perms, maps }
    })
}

/// An NPN transform: `g(x) = out_neg ^ f(z)` with
/// `z_j = in_neg[j] ^ x[perm[j]]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    /// Bit `j` set means input `j` of the original function is negated.
    pub in_neg: u8,
    pub out_neg: bool,
}

impl NpnTransform {
    pub const IDENTITY: NpnTransform =
        NpnTransform { perm: [0, 1, 2, 3], in_neg: 0, out_neg: false };

    /// Applies this transform to `f`.
    pub fn apply(&self, f: Tt4) -> Tt4 {
        let tables = perm_tables();
        let idx = tables.perms.iter().position(|p| *p == self.perm).unwrap();
        apply_with_map(f, &tables.maps[idx], self.in_neg, self.out_neg)
    }

    /// For a library structure implementing the canonical function,
    /// structure input slot `k` must be driven by cut leaf
    /// `leaf_for_slot(k).0`, complemented iff `.1`.
    ///
    /// Derivation: with `c = T(f)`, `f(y) = out_neg ^ c(x)` where
    /// `x_k = y_{perm^-1(k)} ^ in_neg[perm^-1(k)]`.
    pub fn leaf_for_slot(&self, slot: usize) -> (usize, bool) {
        let inv = self.perm.iter().position(|&p| p as usize == slot).unwrap();
        (inv, self.in_neg >> inv & 1 == 1)
    }
}

fn apply_with_map(f: Tt4, map: &[u8; 16], in_neg: u8, out_neg: bool) -> Tt4 {
    let mut g: Tt4 = 0;
    for (i, &m) in map.iter().enumerate() {
        let k = m ^ in_neg;
        g |= ((f >> k) & 1) << i;
    }
    if out_neg {
        !g
    } else {
        g
    }
}

/// Canonical representative and a transform `t` with `t.apply(f) == canon`.
pub fn npn_canon(f: Tt4) -> (Tt4, NpnTransform) {
    let tables = perm_tables();
    let mut best = f;
    let mut best_t = NpnTransform::IDENTITY;
    for (pi, map) in tables.maps.iter().enumerate() {
        for in_neg in 0u8..16 {
            for out_neg in [false, true] {
                let g = apply_with_map(f, map, in_neg, out_neg);
                if g < best {
                    best = g;
                    best_t = NpnTransform { perm: tables.perms[pi], in_neg, out_neg };
                }
            }
        }
    }
    (best, best_t)
}

/// Canonical representative only (no transform tracking); kept as the
/// cheap path for class counting.
pub fn npn_canon_tt(f: Tt4) -> Tt4 {
    let tables = perm_tables();
    let mut best = f;
    for map in &tables.maps {
        for in_neg in 0u8..16 {
            let g = apply_with_map(f, map, in_neg, false);
            best = best.min(g).min(!g);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_transform_is_noop() {
        for f in [0x8000u16, 0x1234, 0xffff, 0x0000, var_tt(2)] {
            assert_eq!(NpnTransform::IDENTITY.apply(f), f);
        }
    }

    #[test]
    fn canon_transform_reaches_canon() {
        for f in (0u32..=0xffff).step_by(97) {
            let f = f as Tt4;
            let (c, t) = npn_canon(f);
            assert_eq!(t.apply(f), c);
            assert_eq!(npn_canon_tt(f), c);
        }
    }

    #[test]
    fn npn_equivalent_functions_share_canon() {
        // AND(a,b) vs AND(!c,d): same class.
        let and_ab = var_tt(0) & var_tt(1);
        let and_ncd = !var_tt(2) & var_tt(3);
        assert_eq!(npn_canon_tt(and_ab), npn_canon_tt(and_ncd));
        // OR is NPN-equivalent to AND via output+input negation.
        let or_ab = var_tt(0) | var_tt(1);
        assert_eq!(npn_canon_tt(and_ab), npn_canon_tt(or_ab));
        // XOR is not.
        let xor_ab = var_tt(0) ^ var_tt(1);
        assert_ne!(npn_canon_tt(and_ab), npn_canon_tt(xor_ab));
    }

    #[test]
    fn leaf_for_slot_inverts_transform() {
        // Check the instantiation mapping: for random f, evaluating the
        // canonical function with remapped/negated arguments must
        // reproduce f on every minterm.
        for f in (0u32..=0xffff).step_by(211) {
            let f = f as Tt4;
            let (c, t) = npn_canon(f);
            for minterm in 0u16..16 {
                let y = |j: usize| minterm >> j & 1 == 1;
                let mut x_idx = 0u16;
                for slot in 0..4 {
                    let (leaf, neg) = t.leaf_for_slot(slot);
                    if y(leaf) ^ neg {
                        x_idx |= 1 << slot;
                    }
                }
                let c_val = c >> x_idx & 1 == 1;
                let f_val = f >> minterm & 1 == 1;
                assert_eq!(f_val, c_val ^ t.out_neg, "f={f:#06x} minterm={minterm}");
            }
        }
    }
}
