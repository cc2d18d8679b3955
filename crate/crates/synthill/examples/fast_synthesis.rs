// Polynomial-time synthesis with a worst-case column bound.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synthill::synthesis::{fast_bound, synthesize_fast, tau_optimal};
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in [4usize, 6, 8] {
        let mut f = WeightedPolynomial::zero(k);
        for i in 0..k {
            f.add_linear(i, rng.gen_range(0..8));
            for j in i + 1..k {
                f.add_quadratic(i, j, rng.gen_range(0..4));
                for m in j + 1..k {
                    if rng.gen_bool(0.3) {
                        f.add_cubic(i, j, m, 1);
                    }
                }
            }
        }
        let fast = synthesize_fast(&f)?;
        write!(out, "k={k}: fast {} <= bound {}", fast.t_count, fast_bound(k)).unwrap();
        if k <= 4 {
            write!(out, ", optimal {}", tau_optimal(&f)?.t_count).unwrap();
        }
        writeln!(out).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
