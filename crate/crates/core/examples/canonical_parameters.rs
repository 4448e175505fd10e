// Canonical parameters: the affine case, a dense ODE solution, and the
// shape of the fundamental forms in canonical coordinates.

use minimal_timelike::algebra::SplitComplex;
use minimal_timelike::canonical::{
    canonicalize, verify_canonical_coefficients, CanonicalizeOptions, Sign, COEFFICIENT_NAMES,
};
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::geometry::FormMethod;
use minimal_timelike::holofn::HoloExpr;
use minimal_timelike::weierstrass::{evaluate_surface, GeneratingData, Part, SurfaceOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let domain = Rect::new(-0.3, 0.3, -0.3, 0.3)?;
    let grid = Grid::new(domain, 13, 13)?;
    let opts = CanonicalizeOptions::default();

    // f = 2, g = z + 1: z′ = 1/√2 is constant
    let affine = canonicalize(
        &HoloExpr::parse("2")?,
        &HoloExpr::parse("z+1")?,
        SplitComplex::ZERO,
        SplitComplex::real(-1.0),
        domain,
        Sign::Plus,
        &opts,
    )?;
    println!(
        "affine: g̃(w) = {}",
        affine.g_tilde_symbolic.as_ref().ok_or("not symbolic")?
    );

    // f = g = eᶻ: z(w) = ln(1 + w)
    let exp = HoloExpr::parse("exp(z)")?;
    let dense = canonicalize(
        &exp,
        &exp,
        SplitComplex::ZERO,
        SplitComplex::ZERO,
        domain,
        Sign::Plus,
        &opts,
    )?;
    let w = SplitComplex::new(0.2, 0.1);
    let (z, _) = dense.z_of_w.eval(w).ok_or("outside the solved range")?;
    let (p, q) = w.to_null();
    println!(
        "dense: z({w}) = {z}, ln(1 + w) = {}",
        SplitComplex::from_null(p.ln_1p(), q.ln_1p())
    );
    println!(
        "  residual at knots {:.1e}, on the lattice {:.1e}",
        dense.knot_residual(&grid).max,
        dense.residual(&grid).max
    );

    let patch = dense.canonical_patch(Part::Real, grid);
    let s = verify_canonical_coefficients(&patch, FormMethod::Richardson).summary();
    for (name, max) in COEFFICIENT_NAMES.iter().zip(s.max) {
        println!("  max |{name}| = {max:.1e}");
    }

    // the canonical representation of the same surface is g = w
    let canonical = evaluate_surface(
        &GeneratingData::canonical(HoloExpr::var()),
        grid,
        &SurfaceOptions::default(),
    )?;
    let t = verify_canonical_coefficients(&canonical, FormMethod::Analytic).summary();
    println!(
        "g = w in canonical form: worst coefficient residual {:.1e}",
        t.max_overall
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
