// Parse, differentiate and integrate holomorphic expressions over 𝔻.

use minimal_timelike::algebra::SplitComplex;
use minimal_timelike::holofn::{integrate_segment, EvalError, HoloExpr, QuadratureOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = HoloExpr::parse("(z+1)/(z+2)")?;
    let z = SplitComplex::new(0.3, -0.1);
    println!("g = {g}\ng′ = {}", g.derivative());
    println!("g({z}) = {}", g.eval(z)?);

    let f = HoloExpr::parse("z^2*exp(z)")?;
    let primitive = f.antiderivative().ok_or("no closed form")?;
    let exact = primitive.eval(z)? - primitive.eval(SplitComplex::ZERO)?;
    let [numeric] = integrate_segment(
        |w| Ok::<_, EvalError>([f.eval(w)?]),
        SplitComplex::ZERO,
        z,
        QuadratureOptions::default(),
    )?;
    println!("∫₀^z {f} = {exact} (primitive), {numeric} (quadrature)");

    if let Err(e) = HoloExpr::parse("z + * 2") {
        println!("{e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
