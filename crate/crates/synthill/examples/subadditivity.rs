// Gluing CCZ matrices: N Toffolis with 6N+1 T gates.

use std::fmt::Write;

use synthill::synthesis::{check_equivalence, tensor_subadditive, MatrixRole, SynthesisMatrix};
use synthill::{BitMatrix, Result, WeightedPolynomial};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let ccz = WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1);
    let a1 = SynthesisMatrix::new(BitMatrix::parse("1101100\n1011010\n0111001")?, MatrixRole::A);
    let (mut a, mut f) = (a1.clone(), ccz.clone());
    for n in 2..=5 {
        a = tensor_subadditive(&a1, &a)?;
        f = ccz.direct_sum(&f);
        // Errors unless wfm(A) and F differ by twice a weighted polynomial.
        check_equivalence(a.matrix(), &f)?;
        writeln!(out, "{n} Toffolis: {} columns (6N+1 = {}), equivalent", a.t_count(), 6 * n + 1).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
