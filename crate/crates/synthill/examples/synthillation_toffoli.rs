// Building and checking the distillation matrix G for a Toffoli.

use std::fmt::Write;

use synthill::synthesis::Method;
use synthill::synthillation::{distance, synthillate, verify_quasitransversal};
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let f = WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1);
    let s = synthillate(&f, Method::Auto)?;
    writeln!(out, "{}", s.g).unwrap();
    let w = verify_quasitransversal(&s.g)?;
    writeln!(out, "Clifford correction independent of the check qubits: {}", w.independent_of_y(s.g.k())).unwrap();
    writeln!(out, "distance = {}", distance(&s.g)).unwrap();

    // A single flipped bit breaks quasitransversality.
    let mut bad = s.g.clone();
    bad.flip(0, 0)?;
    match verify_quasitransversal(&bad) {
        Ok(_) => writeln!(out, "flipped matrix still verifies").unwrap(),
        Err(e) => writeln!(out, "flipped matrix: {e}").unwrap(),
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
