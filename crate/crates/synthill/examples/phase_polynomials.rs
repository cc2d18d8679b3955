// Weighted polynomials from circuits, and the two equivalence relations.

use std::fmt::Write;

use synthill::polys::{clifford_equiv, from_circuit, mu_equiv};
use synthill::{CircuitDescription, Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let circ = CircuitDescription::parse("k 3\nCCZ 1 2 3\nCS 1 2\nT 3")?;
    let f = from_circuit(&circ)?;
    writeln!(out, "F =\n{f}").unwrap();
    for x in [0b011u64, 0b111] {
        writeln!(out, "F({x:03b}) = {}", f.eval(x)).unwrap();
    }

    // CZ(1,2) and S(3) are Clifford, CS(1,3) is not.
    let g = f.clone().with_quadratic(0, 1, 2).with_linear(2, 2);
    writeln!(out, "F ~c F + 4x0x1 + 2x2: {}", clifford_equiv(&f, &g)?).unwrap();
    let h = f.clone().with_quadratic(0, 2, 1);
    writeln!(out, "F ~c F + 2x0x2: {}", clifford_equiv(&f, &h)?).unwrap();
    writeln!(out, "F ~mu F + 4x0x1x2: {}", mu_equiv(&f, &f.clone().with_cubic(0, 1, 2, 1))?).unwrap();
    writeln!(out, "pure-cubic class: {}", WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1).is_pure_cubic_class()).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
