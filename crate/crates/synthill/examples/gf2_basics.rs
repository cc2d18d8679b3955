// Row reduction, rank, inverse and row-span weights over GF(2).

use std::fmt::Write;

use synthill::{BitMatrix, Result};

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let m = BitMatrix::parse("1101\n0111\n1010")?;
    writeln!(out, "M =\n{m}").unwrap();
    writeln!(out, "rank = {}", m.rank()).unwrap();
    writeln!(out, "row span weights = {:?}", m.row_span_weights()).unwrap();

    let sq = BitMatrix::parse("110\n011\n001")?;
    let inv = sq.inverse().expect("invertible");
    writeln!(out, "inverse =\n{inv}").unwrap();
    writeln!(out, "M M^-1 = I: {}", sq.mul(&inv)? == BitMatrix::identity(3)).unwrap();

    // A single row extended to a basis of GF(2)^4.
    let full = BitMatrix::parse("1011")?.complete_to_invertible()?;
    writeln!(out, "completed basis =\n{full}").unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
