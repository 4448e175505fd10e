// (1, z) and (eᶻ, eᶻ) generate the same Enneper surface: their canonical
// curvature fields agree up to a translation of the parameters.

use minimal_timelike::domain::Rect;
use minimal_timelike::equivalence::{surfaces_coincide, CoincideOptions};
use minimal_timelike::weierstrass::GeneratingData;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Rect::new(-0.4, 0.4, -0.4, 0.4)?;
    let enneper = GeneratingData::parse(Some("1"), "z")?;
    let opts = CoincideOptions::default();
    for (f, g) in [("exp(z)", "exp(z)"), ("1", "3*z")] {
        let other = GeneratingData::parse(Some(f), g)?;
        let c = surfaces_coincide(&enneper, &other, window, &opts)?;
        let m = &c.field_match;
        println!(
            "(1, z) vs ({f}, {g}): coincide = {}, gauge {:?}, discrepancy {:.1e}, overlap {:.0}%",
            c.coincide,
            m.gauge,
            m.discrepancy,
            100.0 * m.overlap_fraction
        );
        if let Some(motion) = c.motion {
            println!(
                "  fitted motion: residual {:.1e}, Lorentz defect {:.1e}",
                motion.residual, motion.lorentz_defect
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
