// Raw T-state cost of synthillation against distill-then-synthesize.

use std::fmt::Write;

use synthill::analysis::{compare_pipelines, parse_probability, DistillerModel};
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    // Controlled 2CS: CCZ on (0, 1, 4) and (2, 3, 4).
    let f = WeightedPolynomial::zero(5).with_cubic(0, 1, 4, 1).with_cubic(2, 3, 4, 1);
    let e = parse_probability("0.001")?;
    for target in ["1e-10", "1e-20"] {
        let c = compare_pipelines(&f, &e, &parse_probability(target)?, &DistillerModel::default())?;
        writeln!(out, "target {target}\n{c}").unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
