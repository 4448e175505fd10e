// Double numbers: null coordinates, the indefinite norm, zero divisors.

use minimal_timelike::algebra::{AlgebraError, SplitComplex};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = SplitComplex::new(2.0, 1.0);
    let b: SplitComplex = "0.5-1.5J".parse()?;
    println!("a = {a}, b = {b}, ab = {}", a * b);
    println!("j² = {}", SplitComplex::J * SplitComplex::J);

    // multiplication is componentwise in null coordinates
    let (ap, aq) = a.to_null();
    let (bp, bq) = b.to_null();
    println!(
        "null(a)·null(b) = ({}, {}), null(ab) = {:?}",
        ap * bp,
        aq * bq,
        (a * b).to_null()
    );
    println!(
        "|a|² = {}, |b|² = {}, |ab|² = {}",
        a.norm_sqr(),
        b.norm_sqr(),
        (a * b).norm_sqr()
    );

    let null = SplitComplex::new(1.0, 1.0);
    match a.checked_div(null) {
        Err(AlgebraError::ZeroDivisor(z)) => println!("{a} / {z}: zero divisor"),
        other => return Err(format!("expected a zero divisor, got {other:?}").into()),
    }
    println!("e^(0.5j) = {}", SplitComplex::hyperbolic_unit(0.5));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
