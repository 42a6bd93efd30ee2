//! Seeded random AIG generation for corpus tests and desk-scale
//! experiments. Same config + same seed gives the same graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Aig, AigBuilder, Literal};

/// Shape parameters for generated graphs. Graphs sharing a config are
/// structurally of the same family; the seed picks the instance.
#[derive(Clone, Copy, Debug)]
pub struct RandomAigConfig {
    pub num_pis: u32,
    pub num_pos: u32,
    /// AND-construction attempts; strashing may merge some, so the
    /// final count can be slightly lower.
    pub num_ands: u32,
    /// Probability of drawing operands from the most recent nodes,
    /// which deepens the graph. Low values give wide, shallow graphs.
    pub locality: f64,
}

impl Default for RandomAigConfig {
    fn default() -> Self {
        RandomAigConfig { num_pis: 8, num_pos: 4, num_ands: 60, locality: 0.7 }
    }
}

pub fn random_aig(cfg: &RandomAigConfig, seed: u64) -> Aig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = AigBuilder::new(cfg.num_pis);
    let mut lits: Vec<Literal> = (0..cfg.num_pis).map(|i| b.pi(i)).collect();
    let recent_window = 8usize;

    for _ in 0..cfg.num_ands {
        let pick = |rng: &mut ChaCha8Rng, lits: &[Literal]| -> Literal {
            let idx = if rng.gen_bool(cfg.locality) && lits.len() > recent_window {
                lits.len() - 1 - rng.gen_range(0..recent_window)
            } else {
                rng.gen_range(0..lits.len())
            };
            let l = lits[idx];
            if rng.gen_bool(0.5) {
                !l
            } else {
                l
            }
        };
        let a = pick(&mut rng, &lits);
        let c = pick(&mut rng, &lits);
        let r = b.and(a, c);
        if !r.is_constant() {
            lits.push(r);
        }
    }

    // Prefer late nodes as outputs so most of the graph stays live.
    let n = lits.len();
    for _ in 0..cfg.num_pos {
        let idx = if n > 4 { n - 1 - rng.gen_range(0..n.min(6)) } else { rng.gen_range(0..n) };
        let l = lits[idx];
        b.add_output(if rng.gen_bool(0.3) { !l } else { l });
    }
    b.build(format!("rand_p{}_a{}_s{}", cfg.num_pis, cfg.num_ands, seed)).restrash()
}
