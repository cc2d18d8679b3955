// The quadratic matrix B with mu(F) columns.

use std::fmt::Write;

use synthill::synthesis::mu_decompose;
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for n in 1..=4 {
        let mut f = WeightedPolynomial::zero(2 * n);
        for j in 0..n {
            f.add_quadratic(2 * j, 2 * j + 1, 1);
        }
        let d = mu_decompose(&f)?;
        writeln!(out, "{n}CS: mu = {}", d.mu).unwrap();
        if n == 2 {
            writeln!(out, "B =\n{}", d.b).unwrap();
        }
    }
    let ccz = WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1).with_quadratic(0, 1, 1);
    let d = mu_decompose(&ccz)?;
    writeln!(out, "CCZ.CS: mu = {}, cubic remainder:\n{}", d.mu, d.cubic_remainder).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
