// Minimal factorization Q = B B^T of a symmetric binary matrix.

use std::fmt::Write;

use synthill::{BitMatrix, Result};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for text in ["01\n10", "110\n101\n011", "1100\n1010\n0110\n0001"] {
        let q = BitMatrix::parse(text)?;
        let b = q.lempel_factorize()?;
        let back = b.mul(&b.transpose())? == q;
        writeln!(out, "Q =\n{q}B ({} columns, rank {}) =\n{b}B B^T == Q: {back}\n", b.cols(), q.rank()).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
