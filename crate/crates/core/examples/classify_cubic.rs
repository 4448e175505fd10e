// Classification of cubic polynomial surfaces in isothermal parameters.

use minimal_timelike::algebra::SplitComplex;
use minimal_timelike::canonical::Sign;
use minimal_timelike::classify::{classify_cubic, BiPoly, CubicParametrization};
use minimal_timelike::equivalence::{motion_witness, MoebiusParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let enneper = CubicParametrization::enneper();
    let motion = motion_witness(&MoebiusParams::fractional(
        -0.4,
        SplitComplex::new(0.3, 0.1),
        Sign::Plus,
    )?)?;
    let moved = enneper.transformed(&motion.linear(), [1.0, -2.0, 0.5], 3.0);
    let graph = CubicParametrization::new([
        BiPoly::monomial(1.0, 1, 0),
        BiPoly::monomial(1.0, 0, 1),
        BiPoly::monomial(1.0, 2, 0),
    ]);
    let imaginary = CubicParametrization::from_json(
        r#"{"x1": {"(2,1)": -0.5, "(0,3)": -0.16666666666666666, "(0,1)": -0.5},
            "x2": {"(3,0)": -0.16666666666666666, "(1,2)": -0.5, "(1,0)": 0.5},
            "x3": {"(1,1)": 1.0}}"#,
    )?;
    for (name, x) in [
        ("Enneper", &enneper),
        ("moved, scaled by 3", &moved),
        ("graph of u²", &graph),
        ("imaginary part", &imaginary),
    ] {
        let v = classify_cubic(x);
        let pair = match (&v.f, &v.g) {
            (Some(f), Some(g)) => format!(", f = {f}, g = {g}"),
            _ => String::new(),
        };
        let scale = v.scale.map(|s| format!(", scale {s:.9}")).unwrap_or_default();
        println!("{name}: {:?}{pair}{scale}", v.verdict);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
