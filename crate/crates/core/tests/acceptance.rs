//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use minimal_timelike::algebra::{AlgebraError, SplitComplex};
use minimal_timelike::canonical::{
    canonicalize, curvature_pde_residual, verify_canonical_coefficients, CurvatureSign, Sign,
};
use minimal_timelike::classify::{classify_cubic, BiPoly, CubicParametrization, Verdict};
use minimal_timelike::domain::{Grid, Rect};
use minimal_timelike::equivalence::{
    moebius_transform, motion_witness, surfaces_coincide, witness_discrepancy, CoincideOptions, MoebiusParams,
};
use minimal_timelike::geometry::{FormField, FormMethod};
use minimal_timelike::holofn::HoloExpr;
use minimal_timelike::weierstrass::{evaluate_surface, GeneratingData, Part, Point3, SurfaceOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn h(s: &str) -> HoloExpr {
    HoloExpr::parse(s).unwrap()
}

fn d(re: f64, im: f64) -> SplitComplex {
    SplitComplex::new(re, im)
}

fn square(r: f64, n: usize) -> Grid {
    Grid::new(Rect::new(-r, r, -r, r).unwrap(), n, n).unwrap()
}

fn timed(limit: Duration, run: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let out = run()?;
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{out}; {took:.2?}"))
    } else {
        Err(format!("{out}; took {took:.2?}, limit {limit:?}"))
    }
}

fn at_most(name: &str, value: f64, limit: f64) -> Check {
    if value < limit {
        Ok(format!("{name} {value:.2e} < {limit:e}"))
    } else {
        Err(format!("{name} {value:.2e} ≥ {limit:e}"))
    }
}

fn enneper_x(u: f64, v: f64) -> Point3 {
    [
        -u * (u * u + 3.0 * v * v + 3.0) / 6.0,
        -v * (3.0 * u * u + v * v - 3.0) / 6.0,
        (u * u + v * v) / 2.0,
    ]
}

fn enneper_y(u: f64, v: f64) -> Point3 {
    [
        -v * (3.0 * u * u + v * v + 3.0) / 6.0,
        -u * (u * u + 3.0 * v * v - 3.0) / 6.0,
        u * v,
    ]
}

fn closed_form_enneper() -> Check {
    timed(Duration::from_secs(5), || {
        let grid = square(0.9, 37);
        let mut worst = 0.0f64;
        for (part, oracle) in [
            (Part::Real, enneper_x as fn(f64, f64) -> Point3),
            (Part::Imaginary, enneper_y),
        ] {
            let data = GeneratingData::general(h("1"), h("z")).with_part(part);
            for prefer_antiderivative in [true, false] {
                let opts = SurfaceOptions {
                    prefer_antiderivative,
                    ..SurfaceOptions::default()
                };
                let patch = evaluate_surface(&data, grid, &opts).map_err(|e| e.to_string())?;
                for (i, k) in grid.nodes() {
                    let z = grid.node(i, k);
                    let p = patch.point(i, k).ok_or(format!("missing node {z}"))?;
                    let q = oracle(z.re, z.im);
                    worst = (0..3).fold(worst, |m, c| m.max((p[c] - q[c]).abs()));
                }
            }
        }
        at_most("max node error (both parts, primitive and quadrature)", worst, 1e-8)
    })
}

fn minimality() -> Check {
    // exp data: |g| = 1 on the lightlike line u = 0, where K blows up
    let cases = [
        ("1", "z", [-0.4, 0.4]),
        ("exp(z)", "exp(z)", [0.4, 1.2]),
        ("(z+2)^2", "(z+1)/(z+2)", [-0.4, 0.4]),
    ];
    let mut worst = 0.0f64;
    let mut nodes = 0;
    for (f, g, [u0, u1]) in cases {
        let grid = Grid::with_step(Rect::new(u0, u1, -0.4, 0.4).unwrap(), 0.05).unwrap();
        let opts = SurfaceOptions {
            prefer_antiderivative: false,
            ..SurfaceOptions::default()
        };
        let patch = evaluate_surface(&GeneratingData::general(h(f), h(g)), grid, &opts).map_err(|e| e.to_string())?;
        let field = FormField::compute(&patch, FormMethod::Richardson).mean_curvature_field();
        let count = field.defined().count();
        if count == 0 {
            return Err(format!("no valid nodes for f={f}, g={g}"));
        }
        nodes += count;
        worst = worst.max(field.max_abs().unwrap());
    }
    at_most(&format!("max |H| over {nodes} nodes, 3 datasets"), worst, 1e-6)
}

fn canonical_coefficients() -> Check {
    let grid = square(0.9, 37);
    let gate = |u: f64, v: f64| (1.0 - (u * u - v * v)).abs() > 0.3;
    let mut lines = Vec::new();
    for part in [Part::Real, Part::Imaginary] {
        let patch = evaluate_surface(
            &GeneratingData::canonical(h("z")).with_part(part),
            grid,
            &SurfaceOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let s = verify_canonical_coefficients(&patch, FormMethod::Richardson)
            .restrict(gate)
            .summary();
        if s.count == 0 {
            return Err(format!("{part:?}: no gated nodes"));
        }
        // asymptotic shape only pins L, M, N
        let worst = match part {
            Part::Real => s.max_overall,
            Part::Imaginary => s.max[3..].iter().copied().fold(0.0, f64::max),
        };
        lines.push(at_most(&format!("{part:?} ({} nodes)", s.count), worst, 1e-4)?);
    }
    Ok(lines.join(", "))
}

fn curvature_equation() -> Check {
    let grid = square(0.9, 37);
    let enneper = GeneratingData::canonical(h("z"));
    let k_enneper = |u: f64, v: f64| {
        let rho = u * u - v * v;
        ((1.0 - rho).abs() > 0.3).then(|| enneper.gauss_curvature(d(u, v)).unwrap())
    };
    let (a, b) = (2.0f64, 1.0f64);
    let k_family = |u: f64, v: f64| {
        let t = 1.0 - (b / a) * (u * u - v * v);
        (t.abs() > 0.3).then(|| -16.0 * (b / a).powi(2) / t.powi(4))
    };
    let r1 = curvature_pde_residual(&k_enneper, CurvatureSign::Negative, grid, 1e-3);
    let r2 = curvature_pde_residual(&k_family, CurvatureSign::Negative, grid, 1e-3);
    let worst = r1
        .max_abs()
        .ok_or("empty residual")?
        .max(r2.max_abs().ok_or("empty residual")?);
    at_most(
        &format!(
            "max residual over {} nodes, g=z and a=2,b=1",
            r1.defined().count() + r2.defined().count()
        ),
        worst,
        1e-5,
    )
}

fn worked_example() -> Check {
    let r = canonicalize(
        &h("2"),
        &h("z+1"),
        SplitComplex::ZERO,
        d(-1.0, 0.0),
        square(1.0, 3).rect(),
        Sign::Plus,
        &Default::default(),
    )
    .map_err(|e| e.to_string())?;
    if !r.z_of_w.is_affine() {
        return Err("z(w) not affine".into());
    }
    let p = r
        .g_tilde_symbolic
        .as_ref()
        .and_then(|g| g.as_polynomial())
        .ok_or("g̃ not polynomial")?;
    let coeff = [SplitComplex::ZERO, SplitComplex::real(0.5f64.sqrt())];
    let coeff_err = (0..=p.degree().unwrap_or(0).max(1))
        .map(|k| (p.coeff(k) - coeff.get(k).copied().unwrap_or(SplitComplex::ZERO)).magnitude())
        .fold(0.0, f64::max);
    let res = r.residual(&square(1.0, 21)).max;
    Ok(format!(
        "{}, {}",
        at_most("equation residual", res, 1e-10)?,
        at_most("g̃ − w/√2", coeff_err, 1e-10)?
    ))
}

fn random_alpha(rng: &mut ChaCha8Rng) -> SplitComplex {
    loop {
        let a = d(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if a.norm_sqr().abs() <= 0.5 {
            return a;
        }
    }
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.random_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn witness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d6f_6562);
    let grid = square(0.4, 5);
    let g = h("z");
    let before = GeneratingData::canonical(g.clone());
    let (mut w_err, mut k_err) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let m = MoebiusParams::fractional(
            rng.random_range(-1.0..1.0),
            random_alpha(&mut rng),
            random_sign(&mut rng),
        )
        .map_err(|e| e.to_string())?;
        let (err, count) = witness_discrepancy(&g, &m, &grid).map_err(|e| e.to_string())?;
        if count != grid.len() {
            return Err(format!("witness defined at {count} of {} nodes", grid.len()));
        }
        w_err = w_err.max(err);
        let after = GeneratingData::canonical(moebius_transform(&g, &m).map_err(|e| e.to_string())?);
        for (i, k) in grid.nodes() {
            let z = grid.node(i, k);
            let (k0, k1) = (before.gauss_curvature(z).unwrap(), after.gauss_curvature(z).unwrap());
            k_err = k_err.max((k0 - k1).abs() / k0.abs().max(1.0));
        }
    }
    Ok(format!(
        "{}, {}",
        at_most("witness", w_err, 1e-9)?,
        at_most("K invariance", k_err, 1e-9)?
    ))
}

/// Real part of a random cubic curve over 𝔻: harmonic, generically not isotropic.
fn random_harmonic_cubic(rng: &mut ChaCha8Rng) -> CubicParametrization {
    let binom: [&[f64]; 3] = [&[1.0, 1.0], &[1.0, 2.0, 1.0], &[1.0, 3.0, 3.0, 1.0]];
    CubicParametrization::new(std::array::from_fn(|_| {
        let mut x = BiPoly::default();
        for row in binom {
            let n = row.len() - 1;
            let c = d(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for (k, b) in row.iter().enumerate() {
                // Re(c·jᵏ): jᵏ is 1 for even k and j for odd k
                let re = if k % 2 == 0 { c.re } else { c.im };
                x = x.add(&BiPoly::monomial(b * re, n - k, k));
            }
        }
        x
    }))
}

fn classification() -> Check {
    let limit = Duration::from_secs(1);
    let enneper = CubicParametrization::enneper();
    let plain = timed(limit, || {
        let v = classify_cubic(&enneper);
        let (f, g) = (v.f.as_ref().ok_or("no f")?, v.g.as_ref().ok_or("no g")?);
        let err = [d(0.3, 0.1), d(-0.2, 0.25), d(0.0, 0.0)]
            .iter()
            .map(|&z| {
                (f.eval(z).unwrap() - SplitComplex::ONE)
                    .magnitude()
                    .max((g.eval(z).unwrap() - z).magnitude())
            })
            .fold(0.0, f64::max);
        if v.verdict != Verdict::EnneperNegative || err > 1e-12 {
            return Err(format!("{:?}, f={f}, g={g}", v.verdict));
        }
        Ok(format!("Enneper → {:?}, f={f}, g={g}", v.verdict))
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x456e_6e65);
    let m = MoebiusParams::fractional(
        rng.random_range(-1.0..1.0),
        random_alpha(&mut rng),
        random_sign(&mut rng),
    )
    .map_err(|e| e.to_string())?;
    let linear = motion_witness(&m).map_err(|e| e.to_string())?.linear();
    let t = [
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    ];
    let moved = enneper.transformed(&linear, t, 2.0);
    let scaled = timed(limit, || {
        let v = classify_cubic(&moved);
        let scale = v.scale.unwrap_or(f64::NAN);
        if v.verdict != Verdict::EnneperNegative || scale.is_nan() || (scale - 2.0).abs() >= 1e-8 {
            return Err(format!("moved Enneper → {:?}, scale {scale}", v.verdict));
        }
        Ok(format!("moved ×2 → scale {scale:.12}"))
    })?;

    let random = random_harmonic_cubic(&mut rng);
    let negative = timed(limit, || match classify_cubic(&random).verdict {
        Verdict::NotMinimal => Ok("random → NotMinimal".into()),
        other => Err(format!("random cubic → {other:?}")),
    })?;
    Ok(format!("{plain}; {scaled}; {negative}"))
}

fn equivalence() -> Check {
    let window = Rect::new(-0.4, 0.4, -0.4, 0.4).unwrap();
    let c = surfaces_coincide(
        &GeneratingData::general(h("1"), h("z")),
        &GeneratingData::general(h("exp(z)"), h("exp(z)")),
        window,
        &CoincideOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    if !c.coincide {
        return Err(format!("not coincident: {:?}", c.field_match));
    }
    at_most(
        &format!("coincide via gauge {:?}, discrepancy", c.field_match.gauge),
        c.field_match.discrepancy,
        1e-4,
    )
}

fn algebra() -> Check {
    timed(Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x616c_6762);
        let draw = |rng: &mut ChaCha8Rng| d(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let rel = |x: SplitComplex, y: SplitComplex, scale: f64| (x - y).magnitude() <= 1e-12 * scale.max(1.0);
        let mut failures = Vec::new();
        const N: usize = 100_000;
        for n in 0..N {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let s3 = a.magnitude() * b.magnitude() * c.magnitude();
            let s2 = (a.magnitude() + b.magnitude()) * c.magnitude();
            let ring = rel((a * b) * c, a * (b * c), s3)
                && rel(a * b, b * a, a.magnitude() * b.magnitude())
                && rel((a + b) * c, a * c + b * c, s2)
                && rel((a + b) + c, a + (b + c), a.magnitude() + b.magnitude() + c.magnitude());
            let (ap, aq) = a.to_null();
            let (bp, bq) = b.to_null();
            let (abp, abq) = (a * b).to_null();
            let mag = a.magnitude() * b.magnitude();
            let null = rel(SplitComplex::from_null(ap, aq), a, a.magnitude())
                && (abp - ap * bp).abs() <= 1e-12 * mag.max(1.0)
                && (abq - aq * bq).abs() <= 1e-12 * mag.max(1.0);
            let norm = ((a * b).norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() <= 1e-12 * (mag * mag).max(1.0);
            if !(ring && null && norm) && failures.len() < 3 {
                failures.push(format!("#{n}: a={a}, b={b}, c={c}"));
            }
        }
        let zero_divisors = [d(0.0, 0.0), d(1.0, 1.0), d(2.5, -2.5), d(-3.0, 3.0)];
        let typed = zero_divisors.iter().all(|&z| {
            matches!(SplitComplex::ONE.checked_div(z), Err(AlgebraError::ZeroDivisor { .. })) && z.inv().is_err()
        });
        if !failures.is_empty() {
            return Err(format!("property failures: {}", failures.join("; ")));
        }
        if !typed {
            return Err("division by a zero divisor did not return the typed error".into());
        }
        Ok(format!(
            "{N} triples × 9 identities, {} zero divisors rejected",
            zero_divisors.len()
        ))
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed-form Enneper reproduction", closed_form_enneper),
        ("minimality of three datasets", minimality),
        ("canonical coefficients", canonical_coefficients),
        ("curvature equation residual", curvature_equation),
        ("worked canonicalization example", worked_example),
        ("motion witness and K invariance", witness),
        ("cubic classification", classification),
        ("equivalence of the Enneper representations", equivalence),
        ("algebra property suite", algebra),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
