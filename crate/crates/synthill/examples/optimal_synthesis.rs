// Exact T-count minimization for small diagonal gates.

use std::fmt::Write;

use synthill::synthesis::tau_optimal;
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let gates = [
        ("T", WeightedPolynomial::zero(1).with_linear(0, 1)),
        ("CS", WeightedPolynomial::zero(2).with_quadratic(0, 1, 1)),
        ("CCZ", WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1)),
        ("CCZ.CS", WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1).with_quadratic(0, 1, 1)),
        ("2CS", WeightedPolynomial::zero(4).with_quadratic(0, 1, 1).with_quadratic(2, 3, 1)),
    ];
    for (name, f) in gates {
        let r = tau_optimal(&f)?;
        writeln!(out, "{name}: t-count {} (optimal {})\n{}", r.t_count, r.optimal, r.matrix).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
