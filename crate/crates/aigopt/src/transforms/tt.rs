//! Multi-word truth tables for cone functions of up to ~14 variables.

/// Truth table over `num_vars` variables, bit `i` of the packed words
/// holding `f` at minterm `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bits {
    pub num_vars: usize,
    pub words: Vec<u64>,
}

fn word_count(num_vars: usize) -> usize {
    if num_vars >= 6 {
        1 << (num_vars - 6)
    } else {
        1
    }
}

/// Mask of the valid bits in a single-word table.
fn valid_mask(num_vars: usize) -> u64 {
    if num_vars >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_vars)) - 1
    }
}

impl Bits {
    pub fn zeros(num_vars: usize) -> Bits {
        Bits { num_vars, words: vec![0; word_count(num_vars)] }
    }

    pub fn ones(num_vars: usize) -> Bits {
        Bits { num_vars, words: vec![valid_mask(num_vars); word_count(num_vars)] }
    }

    /// The projection onto variable `j`.
    pub fn var(num_vars: usize, j: usize) -> Bits {
        debug_assert!(j < num_vars);
        let mut t = Bits::zeros(num_vars);
        if j < 6 {
            let pattern = crate::aig::exhaustive_input_word(j as u32, 0) & valid_mask(num_vars);
            for w in t.words.iter_mut() {
                *w = pattern;
            }
        } else {
            let block = 1 << (j - 6);
            for (wi, w) in t.words.iter_mut().enumerate() {
                if (wi / block) % 2 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        t
    }

    pub fn not(&self) -> Bits {
        let mask = valid_mask(self.num_vars);
        Bits {
            num_vars: self.num_vars,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.num_vars, other.num_vars);
        Bits {
            num_vars: self.num_vars,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_ones(&self) -> bool {
        *self == Bits::ones(self.num_vars)
    }

    pub fn get(&self, minterm: usize) -> bool {
        self.words[minterm >> 6] >> (minterm & 63) & 1 == 1
    }

    /// Cofactor with variable `j` fixed to `bit`; the result no longer
    /// depends on `j` (the freed coordinate is duplicated).
    pub fn cofactor(&self, j: usize, bit: bool) -> Bits {
        let mut out = self.clone();
        if j < 6 {
            let shift = 1usize << j;
            let keep = crate::aig::exhaustive_input_word(j as u32, 0);
            let keep = if bit { keep } else { !keep };
            for w in out.words.iter_mut() {
                let half = *w & keep;
                *w = if bit { half | (half >> shift) } else { half | (half << shift) };
            }
            let mask = valid_mask(self.num_vars);
            for w in out.words.iter_mut() {
                *w &= mask;
            }
        } else {
            let block = 1 << (j - 6);
            let n = out.words.len();
            for base in (0..n).step_by(2 * block) {
                for k in 0..block {
                    let v = if bit { self.words[base + block + k] } else { self.words[base + k] };
                    out.words[base + k] = v;
                    out.words[base + block + k] = v;
                }
            }
        }
        out
    }

    pub fn depends_on(&self, j: usize) -> bool {
        self.cofactor(j, false) != self.cofactor(j, true)
    }

    /// Number of variables the function actually depends on.
    pub fn support_size(&self) -> usize {
        (0..self.num_vars).filter(|&j| self.depends_on(j)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_tables_match_small_patterns() {
        let t = Bits::var(3, 1);
        assert_eq!(t.words[0], 0b1100_1100);
        let t = Bits::var(7, 6);
        assert_eq!(t.words, vec![0, u64::MAX]);
    }

    #[test]
    fn cofactor_removes_dependence() {
        for num_vars in [3usize, 7, 8] {
            for j in 0..num_vars {
                let v = Bits::var(num_vars, j);
                let other = Bits::var(num_vars, (j + 1) % num_vars);
                let f = v.and(&other);
                assert!(f.depends_on(j));
                let c0 = f.cofactor(j, false);
                let c1 = f.cofactor(j, true);
                assert!(!c0.depends_on(j));
                assert!(!c1.depends_on(j));
                assert!(c0.is_zero());
                assert_eq!(c1, other);
            }
        }
    }

    #[test]
    fn support_counts_dependent_vars() {
        let a = Bits::var(5, 0);
        let b = Bits::var(5, 3);
        assert_eq!(a.and(&b).support_size(), 2);
        assert_eq!(Bits::ones(5).support_size(), 0);
    }
}
