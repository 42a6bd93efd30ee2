//! Word-parallel (bit-sliced) simulation: one `u64` carries 64
//! independent input patterns through the graph per pass.

use super::{Aig, AigError};

/// Patterns evaluated per simulation word.
pub const SIM_WORD_BITS: u32 = u64::BITS;

/// Evaluates every PO for the 64 patterns packed in `input_words`
/// (one word per PI, bit `i` of each word forms pattern `i`).
pub fn simulate(g: &Aig, input_words: &[u64]) -> Result<Vec<u64>, AigError> {
    if input_words.len() != g.num_pis() as usize {
        return Err(AigError::WordCountMismatch {
            expected: g.num_pis() as usize,
            got: input_words.len(),
        });
    }
    let values = node_values(g, input_words);
    Ok(g.outputs()
        .iter()
        .map(|o| {
            let v = values[o.node() as usize];
            if o.is_complemented() {
                !v
            } else {
                v
            }
        })
        .collect())
}

/// Per-node simulation values for one word of patterns; index matches
/// node index (constant node at 0 simulates as all-zero).
pub fn node_values(g: &Aig, input_words: &[u64]) -> Vec<u64> {
    debug_assert_eq!(input_words.len(), g.num_pis() as usize);
    let mut values = vec![0u64; g.num_nodes_total() as usize];
    values[1..=g.num_pis() as usize].copy_from_slice(input_words);
    for (idx, n) in g.and_nodes() {
        let a = values[n.fanin0.node() as usize] ^ complement_mask(n.fanin0.is_complemented());
        let b = values[n.fanin1.node() as usize] ^ complement_mask(n.fanin1.is_complemented());
        values[idx as usize] = a & b;
    }
    values
}

fn complement_mask(c: bool) -> u64 {
    if c {
        u64::MAX
    } else {
        0
    }
}

/// Multi-word simulation: `input_words[p]` holds `num_words` words for
/// PI `p`. Returns `num_words` words per PO.
pub fn simulate_words(
    g: &Aig,
    input_words: &[Vec<u64>],
    num_words: usize,
) -> Result<Vec<Vec<u64>>, AigError> {
    if input_words.len() != g.num_pis() as usize {
        return Err(AigError::WordCountMismatch {
            expected: g.num_pis() as usize,
            got: input_words.len(),
        });
    }
    let mut out = vec![Vec::with_capacity(num_words); g.num_pos() as usize];
    let mut slice = vec![0u64; g.num_pis() as usize];
    for w in 0..num_words {
        for (p, words) in input_words.iter().enumerate() {
            slice[p] = words[w];
        }
        for (po, v) in simulate(g, &slice)?.into_iter().enumerate() {
            out[po].push(v);
        }
    }
    Ok(out)
}

/// Input words enumerating all `2^num_pis` patterns for word `w` of
/// the exhaustive sweep (valid for `num_pis <= 20`): bit `i` of PI `p`
/// equals bit `p` of the global pattern index `w * 64 + i`.
pub fn exhaustive_input_word(pi: u32, word_index: usize) -> u64 {
    // PIs 0..6 cycle within a word; higher PIs are constant per word.
    const PATTERNS: [u64; 6] = [
        0xaaaa_aaaa_aaaa_aaaa,
        0xcccc_cccc_cccc_cccc,
        0xf0f0_f0f0_f0f0_f0f0,
        0xff00_ff00_ff00_ff00,
        0xffff_0000_ffff_0000,
        0xffff_ffff_0000_0000,
    ];
    if pi < 6 {
        PATTERNS[pi as usize]
    } else if (word_index >> (pi - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::AigBuilder;

    #[test]
    fn simulate_and_gate() {
        let mut b = AigBuilder::new(2);
        let o = b.and(b.pi(0), b.pi(1));
        b.add_output(o);
        let g = b.build("and2".into());
        let out = simulate(&g, &[0b1100, 0b1010]).unwrap();
        assert_eq!(out[0] & 0b1111, 0b1000);
    }

    #[test]
    fn simulate_inverter() {
        let mut b = AigBuilder::new(1);
        let x = b.pi(0);
        b.add_output(!x);
        let g = b.build("inv".into());
        let out = simulate(&g, &[0b01]).unwrap();
        assert_eq!(out[0] & 0b11, 0b10);
    }

    #[test]
    fn simulate_majority3_truth_table() {
        // maj(a,b,c) = ab | ac | bc
        let mut b = AigBuilder::new(3);
        let (a, c, d) = (b.pi(0), b.pi(1), b.pi(2));
        let ab = b.and(a, c);
        let ac = b.and(a, d);
        let bc = b.and(c, d);
        let t = b.or(ab, ac);
        let m = b.or(t, bc);
        b.add_output(m);
        let g = b.build("maj3".into());
        let inputs: Vec<u64> = (0..3).map(|p| exhaustive_input_word(p, 0)).collect();
        let out = simulate(&g, &inputs).unwrap();
        assert_eq!(out[0] & 0xff, 0b1110_1000);
    }

    #[test]
    fn simulate_word_count_mismatch() {
        let mut b = AigBuilder::new(2);
        let o = b.and(b.pi(0), b.pi(1));
        b.add_output(o);
        let g = b.build("and2".into());
        assert!(matches!(
            simulate(&g, &[1]),
            Err(AigError::WordCountMismatch { expected: 2, got: 1 })
        ));
    }
}
