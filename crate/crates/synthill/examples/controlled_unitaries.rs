// Adding a control qubit to a Clifford+CS diagonal gate.

use std::fmt::Write;

use synthill::synthesis::{controlled_target, synthesize_controlled};
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for n in 1..=4 {
        let mut g = WeightedPolynomial::zero(2 * n);
        for j in 0..n {
            g.add_quadratic(2 * j, 2 * j + 1, 1);
        }
        let r = synthesize_controlled(&g, 2 * n)?;
        writeln!(out, "controlled {n}CS: t-count {} (4N+3 = {})", r.t_count, 4 * n + 3).unwrap();
        if n == 1 {
            writeln!(out, "target =\n{}", controlled_target(&g, 2)?).unwrap();
        }
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
