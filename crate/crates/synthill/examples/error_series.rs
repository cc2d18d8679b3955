// Exact success probability and output error of a protocol.

use std::fmt::Write;

use synthill::analysis::{error_poly, error_poly_bound, parse_probability};
use synthill::synthesis::Method;
use synthill::synthillation::synthillate;
use synthill::{Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let f = WeightedPolynomial::zero(6).with_cubic(0, 1, 2, 1).with_cubic(3, 4, 5, 1);
    let g = synthillate(&f, Method::Auto)?.g;
    let ep = error_poly(&g, 5)?;
    writeln!(out, "n = {}", ep.n).unwrap();
    writeln!(out, "p_suc = {}", ep.p_suc).unwrap();
    writeln!(out, "eps_out = {}", ep.series()).unwrap();
    let e = parse_probability("1e-3")?;
    writeln!(out, "eps_out(1e-3) = {:.4e}", num_traits::ToPrimitive::to_f64(&ep.eps_out_at(&e)).unwrap()).unwrap();
    let bound = error_poly_bound(&g)?;
    writeln!(out, "closed form: {bound}").unwrap();
    writeln!(out, "closed form at 1e-3 = {:.4e}", bound.eval_f64(1e-3)).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
