//! Combinational equivalence checking by simulation.
//!
//! Exhaustive mode sweeps all `2^num_pis` patterns (capped at 20 PIs)
//! and is exact. Random mode samples seeded patterns and can only
//! certify inequivalence; "equivalent" from random mode means no
//! distinguishing pattern was found among the sampled vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sim::{exhaustive_input_word, simulate, SIM_WORD_BITS};
use super::{Aig, AigError};

pub const EXHAUSTIVE_PI_CAP: u32 = 20;

#[derive(Clone, Copy, Debug)]
pub enum EquivMode {
    Exhaustive,
    /// Seeded random vectors; `num_vectors` individual patterns.
    Random { seed: u64, num_vectors: u64 },
}

impl EquivMode {
    /// Exhaustive when feasible, otherwise seeded random with the
    /// default `2^16` vectors.
    pub fn auto(num_pis: u32, seed: u64) -> Self {
        if num_pis <= EXHAUSTIVE_PI_CAP {
            EquivMode::Exhaustive
        } else {
            EquivMode::Random { seed, num_vectors: 1 << 16 }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EquivResult {
    Equivalent,
    /// A PI assignment on which some output differs.
    Counterexample(Vec<bool>),
}

impl EquivResult {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivResult::Equivalent)
    }
}

pub fn check_equivalence(g1: &Aig, g2: &Aig, mode: EquivMode) -> Result<EquivResult, AigError> {
    if g1.num_pis() != g2.num_pis() || g1.num_pos() != g2.num_pos() {
        return Err(AigError::InterfaceMismatch(format!(
            "i/o {}/{} vs {}/{}",
            g1.num_pis(),
            g1.num_pos(),
            g2.num_pis(),
            g2.num_pos()
        )));
    }
    let num_pis = g1.num_pis();
    match mode {
        EquivMode::Exhaustive => {
            if num_pis > EXHAUSTIVE_PI_CAP {
                return Err(AigError::TooManyInputs { max: EXHAUSTIVE_PI_CAP, got: num_pis });
            }
            let total: u64 = 1u64 << num_pis;
            let words = total.div_ceil(u64::from(SIM_WORD_BITS));
            let mut inputs = vec![0u64; num_pis as usize];
            for w in 0..words {
                for (p, word) in inputs.iter_mut().enumerate() {
                    *word = exhaustive_input_word(p as u32, w as usize);
                }
                let valid = (total - w * u64::from(SIM_WORD_BITS)).min(u64::from(SIM_WORD_BITS));
                if let Some(cex) = compare_word(g1, g2, &inputs, valid as u32)? {
                    return Ok(EquivResult::Counterexample(cex));
                }
            }
            Ok(EquivResult::Equivalent)
        }
        EquivMode::Random { seed, num_vectors } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let words = num_vectors.div_ceil(u64::from(SIM_WORD_BITS));
            let mut inputs = vec![0u64; num_pis as usize];
            for w in 0..words {
                for word in inputs.iter_mut() {
                    *word = rng.gen::<u64>();
                }
                let valid =
                    (num_vectors - w * u64::from(SIM_WORD_BITS)).min(u64::from(SIM_WORD_BITS));
                if let Some(cex) = compare_word(g1, g2, &inputs, valid as u32)? {
                    return Ok(EquivResult::Counterexample(cex));
                }
            }
            Ok(EquivResult::Equivalent)
        }
    }
}

/// Simulates one word on both graphs; returns the assignment of the
/// lowest differing bit if any of the first `valid_bits` differ.
fn compare_word(
    g1: &Aig,
    g2: &Aig,
    inputs: &[u64],
    valid_bits: u32,
) -> Result<Option<Vec<bool>>, AigError> {
    let o1 = simulate(g1, inputs)?;
    let o2 = simulate(g2, inputs)?;
    let mask = if valid_bits >= SIM_WORD_BITS {
        u64::MAX
    } else {
        (1u64 << valid_bits) - 1
    };
    let mut diff = 0u64;
    for (a, b) in o1.iter().zip(o2.iter()) {
        diff |= (a ^ b) & mask;
    }
    if diff == 0 {
        return Ok(None);
    }
    let bit = diff.trailing_zeros();
    Ok(Some(
        inputs.iter().map(|w| (w >> bit) & 1 == 1).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::AigBuilder;

    fn xor_pair() -> (Aig, Aig) {
        let mut b = AigBuilder::new(2);
        let o = b.xor(b.pi(0), b.pi(1));
        b.add_output(o);
        let gx = b.build("xor".into());

        let mut b = AigBuilder::new(2);
        let o = b.xor(b.pi(0), b.pi(1));
        b.add_output(!o);
        let gnx = b.build("xnor".into());
        (gx, gnx)
    }

    #[test]
    fn graph_equals_itself() {
        let (gx, _) = xor_pair();
        assert!(check_equivalence(&gx, &gx, EquivMode::Exhaustive)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn commuted_and_is_equivalent() {
        let mut b = AigBuilder::new(2);
        let o = b.and(b.pi(0), b.pi(1));
        b.add_output(o);
        let g1 = b.build("ab".into());
        let mut b = AigBuilder::new(2);
        let o = b.and(b.pi(1), b.pi(0));
        b.add_output(o);
        let g2 = b.build("ba".into());
        assert!(check_equivalence(&g1, &g2, EquivMode::Exhaustive)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn xor_vs_xnor_counterexample() {
        let (gx, gnx) = xor_pair();
        let r = check_equivalence(&gx, &gnx, EquivMode::Exhaustive).unwrap();
        // XOR and XNOR differ everywhere; the first pattern is (0,0).
        assert_eq!(r, EquivResult::Counterexample(vec![false, false]));
    }

    #[test]
    fn counterexample_distinguishes() {
        let (gx, gnx) = xor_pair();
        if let EquivResult::Counterexample(cex) =
            check_equivalence(&gx, &gnx, EquivMode::Exhaustive).unwrap()
        {
            let inputs: Vec<u64> = cex.iter().map(|&v| v as u64).collect();
            let a = simulate(&gx, &inputs).unwrap();
            let b = simulate(&gnx, &inputs).unwrap();
            assert_ne!(a[0] & 1, b[0] & 1);
        } else {
            panic!("expected counterexample");
        }
    }

    #[test]
    fn interface_mismatch_is_error() {
        let (gx, _) = xor_pair();
        let mut b = AigBuilder::new(3);
        let o = b.and(b.pi(0), b.pi(1));
        b.add_output(o);
        let g3 = b.build("g3".into());
        assert!(check_equivalence(&gx, &g3, EquivMode::Exhaustive).is_err());
    }

    #[test]
    fn random_mode_finds_differences() {
        let (gx, gnx) = xor_pair();
        let r = check_equivalence(
            &gx,
            &gnx,
            EquivMode::Random { seed: 7, num_vectors: 64 },
        )
        .unwrap();
        assert!(!r.is_equivalent());
    }
}
