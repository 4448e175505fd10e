// The curvature of a canonical surface solves
// (ln √∓K)_uu − (ln √∓K)_vv = 2√∓K. Checked on closed-form K and on a
// curvature field measured from a mesh.

use minimal_timelike::algebra::SplitComplex;
use minimal_timelike::canonical::{curvature_pde_residual, curvature_pde_residual_sampled, CurvatureSign};
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::geometry::{FormField, FormMethod};
use minimal_timelike::holofn::HoloExpr;
use minimal_timelike::weierstrass::{evaluate_surface, GeneratingData, SurfaceOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(Rect::new(-0.9, 0.9, -0.9, 0.9)?, 37, 37)?;
    let data = GeneratingData::canonical(HoloExpr::var());
    // stay away from the lightlike locus u² − v² = 1
    let k = |u: f64, v: f64| {
        ((1.0 - (u * u - v * v)).abs() > 0.3)
            .then(|| data.gauss_curvature(SplitComplex::new(u, v)).ok())
            .flatten()
    };
    let closed = curvature_pde_residual(&k, CurvatureSign::Negative, grid, 1e-3);
    println!(
        "closed-form K: max residual {:.2e} over {} nodes",
        closed.max_abs().unwrap_or(0.0),
        closed.defined().count()
    );

    let doubled = |u: f64, v: f64| k(u, v).map(|k| 2.0 * k);
    let wrong = curvature_pde_residual(&doubled, CurvatureSign::Negative, grid, 1e-3);
    println!(
        "2K (not a canonical curvature): max residual {:.2e}",
        wrong.max_abs().unwrap_or(0.0)
    );

    let fine = Grid::new(Rect::new(-0.4, 0.4, -0.4, 0.4)?, 33, 33)?;
    let patch = evaluate_surface(&data, fine, &SurfaceOptions::default())?;
    let measured = FormField::compute(&patch, FormMethod::Richardson).curvature_field();
    let sampled = curvature_pde_residual_sampled(&measured, CurvatureSign::Negative);
    println!(
        "K measured on a mesh: max residual {:.2e}",
        sampled.max_abs().unwrap_or(0.0)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
