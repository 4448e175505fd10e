// The Enneper surface from f = 1, g = z: both parts, forms and curvature,
// written to an OBJ mesh.

use minimal_timelike::cli::write_obj;
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::geometry::{FormField, FormMethod};
use minimal_timelike::weierstrass::{evaluate_surface, GeneratingData, Part, SurfaceOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(Rect::new(-0.9, 0.9, -0.9, 0.9)?, 37, 37)?;
    for part in [Part::Real, Part::Imaginary] {
        let data = GeneratingData::parse(Some("1"), "z")?.with_part(part);
        let patch = evaluate_surface(&data, grid, &SurfaceOptions::default())?;
        let forms = FormField::compute(&patch, FormMethod::Analytic);
        let (k_min, k_max) = forms.curvature_field().range().ok_or("no forms")?;
        println!(
            "{part:?}: x(0.5, 0.25) = {:?}, max |H| = {:.1e}, K ∈ [{k_min:.3}, {k_max:.3}], lightlike nodes: {}",
            patch.point(23, 20).ok_or("missing node")?,
            forms.mean_curvature_field().max_abs().unwrap_or(0.0),
            patch.invalid_count(),
        );
        let path = std::env::temp_dir().join(format!("enneper-{part:?}.obj").to_lowercase());
        write_obj(&patch, &path)?;
        println!("  mesh: {}", path.display());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
