// Turning a synthesis matrix into a CNOT+T circuit and simulating it back.

use std::fmt::Write;

use synthill::polys::clifford_equiv;
use synthill::synthesis::{emit_circuit, phase_simulate, tau_optimal};
use synthill::{GateKind, Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let f = WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1);
    let r = tau_optimal(&f)?;
    let circ = emit_circuit(&r.matrix, &f)?;
    writeln!(out, "{circ}").unwrap();
    writeln!(out, "T gates: {}", circ.count(GateKind::T)).unwrap();
    let back = phase_simulate(&circ)?;
    writeln!(out, "simulated == target: {}", back == f).unwrap();
    writeln!(out, "simulated ~c target: {}", clifford_equiv(&back, &f)?).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
