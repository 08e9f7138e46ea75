use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

pub type Amp = BTreeMap<(i64, char), Complex64>;

/// Textbook Hadamard walk: H on the coin, then S^{σz} moving the L component
/// down and the R component up, in the index flow used by the walk map.
pub fn hadamard_oracle(start: Amp, steps: usize) -> Vec<Amp> {
    let mut history = vec![start.clone()];
    let mut psi = start;
    for _ in 0..steps {
        let mut coined: Amp = BTreeMap::new();
        let sites: Vec<i64> = psi.keys().map(|(k, _)| *k).collect();
        for k in sites {
            let l = psi.get(&(k, 'L')).copied().unwrap_or_default();
            let r = psi.get(&(k, 'R')).copied().unwrap_or_default();
            coined.insert((k, 'L'), (l + r) * FRAC_1_SQRT_2);
            coined.insert((k, 'R'), (l - r) * FRAC_1_SQRT_2);
        }
        let mut moved: Amp = BTreeMap::new();
        for ((k, c), z) in coined {
            let dest = if c == 'L' { k - 1 } else { k + 1 };
            moved.insert((dest, c), z);
        }
        psi = moved;
        history.push(psi.clone());
    }
    history
}
