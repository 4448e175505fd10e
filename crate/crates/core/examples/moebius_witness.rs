// A fractional transformation of the canonical function and the Lorentz
// motion that realizes it.

use minimal_timelike::algebra::SplitComplex;
use minimal_timelike::canonical::Sign;
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::equivalence::{
    lorentz_defect, moebius_transform, motion_witness, witness_discrepancy, MoebiusParams,
};
use minimal_timelike::holofn::HoloExpr;
use minimal_timelike::weierstrass::GeneratingData;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = HoloExpr::parse("z + 0.3*z^2")?;
    let m = MoebiusParams::fractional(0.3, SplitComplex::new(0.2, 0.1), Sign::Minus)?;
    let moved = moebius_transform(&g, &m)?;
    println!("g = {g}\ng̃ = {moved}");

    let w = motion_witness(&m)?;
    println!("A·B =\n{:.6}", w.a * w.b);
    println!(
        "Lorentz defect {:.1e}, det {:.12}",
        lorentz_defect(&w.linear()),
        w.linear().determinant()
    );

    let grid = Grid::new(Rect::new(-0.4, 0.4, -0.4, 0.4)?, 5, 5)?;
    let (err, nodes) = witness_discrepancy(&g, &m, &grid)?;
    println!("max |S·A·B·Ψ′ − Ψ̃′| = {err:.1e} over {nodes} nodes");

    let (before, after) = (GeneratingData::canonical(g), GeneratingData::canonical(moved));
    let z = SplitComplex::new(0.1, -0.2);
    println!(
        "K({z}) = {:.12} before, {:.12} after",
        before.gauss_curvature(z)?,
        after.gauss_curvature(z)?
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
