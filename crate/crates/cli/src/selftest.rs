//! Built-in consistency suites for `projhardy selftest`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use projhardy::chart::Resolution;
use projhardy::fixtures;
use projhardy::invariants::{
    apply_coordinate_change, fit_normal_form, CoordChange, NormalForm, DEFAULT_FIT_RADIUS,
};
use projhardy::kernels::{
    omega_cfl, omega_cfl_swapped, omega_reduced, pushforward_corner_check, simplex_integral,
    SimplexMode, StrongTangentSet,
};
use projhardy::measures::{reproduce, PolySection};
use projhardy::sampling::{random_incident_frame, random_incident_pair, random_map};
use projhardy::{normalize_map, Result, C};

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Suite {
    All,
    Simplex,
    Cramer,
    Symmetry,
    ChartIdentity,
    Laws,
    Corner,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Fault {
    /// Flip the sign of the corner kernel.
    CornerSign,
}

struct Case {
    name: &'static str,
    error: f64,
    tolerance: f64,
    detail: String,
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

fn simplex(rng: &mut ChaCha8Rng) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (n, tol, name) in [(2usize, 1e-8, "simplex:n=2"), (3, 1e-6, "simplex:n=3")] {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let tau: Vec<C> = (0..n)
                .map(|_| C::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..6.3)))
                .collect();
            let closed = simplex_integral(&tau, SimplexMode::Closed)?;
            let quad = simplex_integral(&tau, SimplexMode::Quadrature { order: 64 })?;
            worst = worst.max(rel(quad, closed));
        }
        out.push(Case {
            name,
            error: worst,
            tolerance: tol,
            detail: "20 points, Gauss order 64 against the closed form".into(),
        });
    }
    Ok(out)
}

fn cramer(rng: &mut ChaCha8Rng) -> Result<Vec<Case>> {
    let d = fixtures::perturbed_bidisk(0.1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let moved = d.transformed(&random_map(rng, 0.15))?;
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let z = moved.edges[0].chart.eval(&p)?.z;
        worst = worst.max(StrongTangentSet::at_edge(&moved, &[0, 1], &z)?.cramer_defect());
    }
    Ok(vec![Case {
        name: "cramer",
        error: worst,
        tolerance: 1e-12,
        detail: "50 moved corner points".into(),
    }])
}

fn symmetry(rng: &mut ChaCha8Rng) -> Result<Vec<Case>> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (z, w) = random_incident_pair(rng);
        let f = random_incident_frame(rng, &z, &w);
        let a = omega_cfl(&z, &w, &f, (1, 2))?.value;
        let b = omega_cfl_swapped(&z, &w, &f, (1, 2))?.value;
        worst = worst.max(rel(b, a));
    }
    Ok(vec![Case {
        name: "symmetry",
        error: worst,
        tolerance: 1e-10,
        detail: "100 incident pairs with roles exchanged".into(),
    }])
}

fn chart_identity(rng: &mut ChaCha8Rng) -> Result<Vec<Case>> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (z, w) = random_incident_pair(rng);
        let f = random_incident_frame(rng, &z, &w);
        let a = omega_cfl(&z, &w, &f, (0, 0))?.value;
        let b = omega_reduced(&z, &w, &f)?.value;
        worst = worst.max(rel(b, a));
    }
    Ok(vec![Case {
        name: "chart-identity",
        error: worst,
        tolerance: 1e-10,
        detail: "100 incident pairs, reduced form against the full form".into(),
    }])
}

fn laws(rng: &mut ChaCha8Rng) -> Result<Vec<Case>> {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let nf = NormalForm::new([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..-0.3),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..-0.3),
        ]);
        let d = fixtures::quadric_pair(nf.to_array(), 1.0);
        for change in [
            CoordChange::Shift(C::new(rng.gen_range(-1.0..1.0), 0.0)),
            CoordChange::Shift(C::new(0.0, rng.gen_range(-1.0..1.0))),
            CoordChange::Scale(rng.gen_range(0.5..2.0)),
            CoordChange::Swap,
            CoordChange::Shear(rng.gen_range(-1.0..1.0)),
        ] {
            let t = normalize_map(change.matrix())?;
            let moved = d.transformed(&t.inverse())?;
            let fit = fit_normal_form(&moved, &[0, 1], DEFAULT_FIT_RADIUS)?;
            let law = apply_coordinate_change(&nf, change)?;
            worst = worst.max(fit.normal_form.max_abs_diff(&law));
        }
    }
    Ok(vec![Case {
        name: "laws",
        error: worst,
        tolerance: 1e-6,
        detail: "3 edges x 5 coordinate changes, refit against the law".into(),
    }])
}

fn corner(rng: &mut ChaCha8Rng, sign: f64) -> Result<Vec<Case>> {
    let d = fixtures::perturbed_bidisk(0.1);
    let tau = [C::new(0.1, 0.0), C::new(0.0, -0.2)];
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let r = pushforward_corner_check(&d, 0, &p, &tau, 32)?;
        worst = worst.max(rel(r.kernel * sign, r.fiber));
    }
    let one = PolySection::parse("1")?;
    let r = reproduce(&one, &[C::new(0.0, 0.0); 2], &d, Resolution::uniform(32))?;
    let faces: C = r.faces.iter().map(|p| p.value).sum();
    let corner: C = r.edges.iter().map(|p| p.value).sum();
    let total = faces + corner * sign;
    Ok(vec![
        Case {
            name: "corner:pushforward",
            error: worst,
            tolerance: 1e-5,
            detail: "closed-form corner kernel against the fiber integral at 4 edge points".into(),
        },
        Case {
            name: "corner:reproduction",
            error: (total - r.expected).norm(),
            tolerance: 1e-4,
            detail: format!(
                "f = 1 at the origin: faces {:.6} + corner {:.6}",
                faces.re,
                (corner * sign).re
            ),
        },
    ])
}

pub fn run(
    suite: Suite,
    inject: Option<Fault>,
    seed: u64,
    tolerance: Option<f64>,
) -> Result<(Vec<Value>, Value, bool)> {
    let sign = if inject == Some(Fault::CornerSign) {
        -1.0
    } else {
        1.0
    };
    let selected: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Simplex,
            Suite::Cramer,
            Suite::Symmetry,
            Suite::ChartIdentity,
            Suite::Laws,
            Suite::Corner,
        ],
        s => vec![s],
    };
    let mut cases = Vec::new();
    for s in &selected {
        // Each suite gets its own stream so results do not depend on the selection.
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(*s as u64));
        cases.extend(match s {
            Suite::Simplex => simplex(&mut rng)?,
            Suite::Cramer => cramer(&mut rng)?,
            Suite::Symmetry => symmetry(&mut rng)?,
            Suite::ChartIdentity => chart_identity(&mut rng)?,
            Suite::Laws => laws(&mut rng)?,
            Suite::Corner => corner(&mut rng, sign)?,
            Suite::All => unreachable!(),
        });
    }
    let mut tolerances = Map::new();
    let mut results = Vec::new();
    let mut pass = true;
    for c in cases {
        let tol = tolerance.unwrap_or(c.tolerance);
        let ok = c.error <= tol;
        pass &= ok;
        tolerances.insert(c.name.to_string(), json!(tol));
        results
            .push(json!({"suite": c.name, "pass": ok, "max_error": c.error, "detail": c.detail}));
    }
    Ok((results, Value::Object(tolerances), pass))
}
