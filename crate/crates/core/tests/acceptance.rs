//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projhardy::chart::Resolution;
use projhardy::fixtures;
use projhardy::forms::real_det;
use projhardy::invariants::{
    apply_coordinate_change, contact_margin, eta, fit_normal_form, kappa, CoordChange, NormalForm,
    DEFAULT_FIT_RADIUS,
};
use projhardy::kernels::{
    corner_kernel, omega_cfl, omega_cfl_swapped, omega_reduced, pushforward_corner_check,
    simplex_integral, SimplexMode, StrongTangentSet,
};
use projhardy::measures::{fefferman_density, hardy_norm, reproduce, PolySection};
use projhardy::sampling::{
    random_complex, random_incident_frame, random_incident_pair, random_map,
};
use projhardy::{normalize_map, HomVec, Point2, C};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn simplex_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0.0f64; 2];
    let mut time = [Duration::ZERO; 2];
    for (slot, n) in [2usize, 3].iter().enumerate() {
        let start = Instant::now();
        for _ in 0..20 {
            // |τ_j| ≤ 0.7 keeps the integrand pole at distance ≥ 0.3.
            let tau: Vec<C> = (0..*n)
                .map(|_| C::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..6.3)))
                .collect();
            let closed = simplex_integral(&tau, SimplexMode::Closed).unwrap();
            let quad = simplex_integral(&tau, SimplexMode::Quadrature { order: 64 }).unwrap();
            worst[slot] = worst[slot].max(rel(quad, closed));
        }
        time[slot] = start.elapsed();
    }
    let pass = worst[0] <= 1e-8
        && worst[1] <= 1e-6
        && time[0] <= Duration::from_secs(1)
        && time[1] <= Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "n=2 max rel {:.1e} in {}, n=3 max rel {:.1e} in {}",
            worst[0],
            secs(time[0]),
            worst[1],
            secs(time[1])
        ),
    )
}

fn chart_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (z, w) = random_incident_pair(&mut rng);
        let f = random_incident_frame(&mut rng, &z, &w);
        let a = omega_cfl(&z, &w, &f, (0, 0)).unwrap().value;
        let b = omega_reduced(&z, &w, &f).unwrap().value;
        worst = worst.max(rel(b, a));
    }
    outcome(worst <= 1e-10, format!("100 samples, max rel {worst:.1e}"))
}

fn role_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (z, w) = random_incident_pair(&mut rng);
        let f = random_incident_frame(&mut rng, &z, &w);
        let a = omega_cfl(&z, &w, &f, (1, 2)).unwrap().value;
        // (-1)^n with n = 2.
        let b = omega_cfl_swapped(&z, &w, &f, (1, 2)).unwrap().value;
        worst = worst.max(rel(b, a));
    }
    outcome(worst <= 1e-10, format!("100 pairs, max rel {worst:.1e}"))
}

fn random_corner(rng: &mut ChaCha8Rng) -> (projhardy::domain::PwsDomain, Point2, StrongTangentSet) {
    let d = fixtures::perturbed_bidisk(0.1);
    let t = random_map(rng, 0.15);
    let moved = d.transformed(&t).unwrap();
    let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
    let z = moved.edges[0].chart.eval(&p).unwrap().z;
    let set = StrongTangentSet::at_edge(&moved, &[0, 1], &z).unwrap();
    (moved, z, set)
}

fn cramer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    let mut literal = 0.0f64;
    for _ in 0..100 {
        let (_, _, set) = random_corner(&mut rng);
        worst = worst.max(set.cramer_defect());
        let z = set.basepoint.coords();
        let l = (z[0] * set.det_minor(0) + z[1] * set.det_minor(1)).norm()
            / (set.basepoint.norm() * set.tangents[0].norm() * set.tangents[1].norm());
        literal = literal.max(l);
    }
    outcome(
        worst <= 1e-12,
        format!(
            "z1*det0 + z0*det1: max {worst:.1e} (index-swapped form z0*det0 + z1*det1: max {literal:.1e})"
        ),
    )
}

fn corner_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let d = fixtures::perturbed_bidisk(0.1);
    let tau = [c(0.1, -0.2), c(0.3, 0.1)];
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let pt = d.edges[0].chart.eval(&p).unwrap();
        let set = StrongTangentSet::at_edge(&d, &[0, 1], &pt.z).unwrap();
        let k = corner_kernel(&set, &HomVec::from_affine(&tau), &pt.tangents)
            .unwrap()
            .value;
        let t = random_map(&mut rng, 0.3);
        let moved = StrongTangentSet::new(
            t.apply(&set.basepoint),
            [t.apply(&set.tangents[0]), t.apply(&set.tangents[1])],
        )
        .unwrap();
        let frame: Vec<Point2> = pt
            .tangents
            .iter()
            .map(|v| t.differential(&pt.z, v))
            .collect();
        // τ enters with weight -2, so it moves as a homogeneous vector.
        let tau2 = t.apply(&HomVec::from_affine(&tau));
        let k2 = corner_kernel(&moved, &tau2, &frame).unwrap().value;
        worst = worst.max(rel(k2, k));
    }
    outcome(worst <= 1e-9, format!("100 maps, max rel {worst:.1e}"))
}

fn cauchy_recovery() -> Outcome {
    let d = fixtures::bidisk();
    let f = PolySection::parse(
        "1 - 2*z1 + (0,1)*z2 + 0.5*z1^2 - z1*z2 + (0.3,0.2)*z2^2 + z1^3 - (0,2)*z1^2*z2 + 0.7*z1*z2^2 - z2^3",
    )
    .unwrap();
    let taus = [
        [c(0.2, 0.1), c(-0.3, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0)],
        [c(-0.4, 0.3), c(0.1, -0.45)],
        [c(0.5, 0.0), c(0.0, 0.5)],
        [c(-0.1, -0.55), c(0.4, 0.4)],
    ];
    // The trapezoid error decays like |τ_j|^64; these points keep it below 1e-12.
    let start = Instant::now();
    let mut worst = 0.0f64;
    for tau in &taus {
        let r = reproduce(
            &f,
            tau,
            &d,
            Resolution {
                periodic: 64,
                gauss: 16,
            },
        )
        .unwrap();
        worst = worst.max(r.rel_err);
    }
    let el = start.elapsed();
    outcome(
        worst <= 1e-10 && el <= Duration::from_secs(5),
        format!("5 points, 64^2 nodes, max rel {worst:.1e} in {}", secs(el)),
    )
}

fn sphere_leray() -> Outcome {
    let d = fixtures::sphere();
    let f = PolySection::parse("1").unwrap();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for tau in [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.3, 0.0), c(0.0, -0.2)]] {
        let r = reproduce(
            &f,
            &tau,
            &d,
            Resolution {
                periodic: 48,
                gauss: 48,
            },
        )
        .unwrap();
        worst = worst.max(r.rel_err);
    }
    let el = start.elapsed();
    outcome(
        worst <= 1e-8 && el <= Duration::from_secs(30),
        format!("periodic 48, gauss 48, max rel {worst:.1e} in {}", secs(el)),
    )
}

fn piecewise_reproduction() -> Outcome {
    let d = fixtures::perturbed_bidisk(0.1);
    let res = Resolution {
        periodic: 32,
        gauss: 32,
    };
    let start = Instant::now();
    let one = PolySection::parse("1").unwrap();
    let r = reproduce(&one, &[c(0.0, 0.0); 2], &d, res).unwrap();
    let faces: C = r.faces.iter().map(|p| p.value).sum();
    let corner = r.edges[0].value;
    let poly = PolySection::parse("1 + z1 - 2*z2^2 + (0,1)*z1*z2^2").unwrap();
    let r2 = reproduce(&poly, &[c(0.2, 0.1), c(-0.3, 0.0)], &d, res).unwrap();
    let el = start.elapsed();
    let pass = r.rel_err <= 1e-4
        && r2.rel_err <= 1e-4
        && corner.norm() > 10.0 * 1e-4
        && el <= Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "periodic 32, gauss 32: faces {:.6} + corner {:.6} = {:.6}, rel {:.1e}; polynomial rel {:.1e}; {}",
            faces.re,
            corner.re,
            r.value.re,
            r.rel_err,
            r2.rel_err,
            secs(el)
        ),
    )
}

fn pushforward() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let d = fixtures::perturbed_bidisk(0.1);
    let tau = [c(0.1, 0.0), c(0.0, -0.2)];
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let r = pushforward_corner_check(&d, 0, &p, &tau, 32).unwrap();
        worst = worst.max(r.rel_dev);
    }
    outcome(
        worst <= 1e-5,
        format!("20 edge points, max rel {worst:.1e}"),
    )
}

fn transformation_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut worst = 0.0f64;
    for _ in 0..10 {
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
            CoordChange::Shift(c(rng.gen_range(-1.0..1.0), 0.0)),
            CoordChange::Shift(c(0.0, rng.gen_range(-1.0..1.0))),
            CoordChange::Scale(rng.gen_range(0.5..2.0)),
            CoordChange::Swap,
            CoordChange::Shear(rng.gen_range(-1.0..1.0)),
        ] {
            let t = normalize_map(change.matrix()).unwrap();
            let moved = d.transformed(&t.inverse()).unwrap();
            let fit = fit_normal_form(&moved, &[0, 1], DEFAULT_FIT_RADIUS).unwrap();
            let law = apply_coordinate_change(&nf, change).unwrap();
            worst = worst.max(fit.normal_form.max_abs_diff(&law));
        }
    }
    outcome(
        worst <= 1e-6,
        format!("10 edges x {{I real, I imaginary, S, W, H}}, max abs {worst:.1e}"),
    )
}

fn kappa_anchors() -> Outcome {
    let k0 = kappa(0.0, 0.0);
    let k1 = kappa(-1.0, -1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut symmetric = true;
    let mut consistent = 0;
    for _ in 0..50 {
        let (b1, b2) = (rng.gen_range(-3.0..1.0), rng.gen_range(-3.0..1.0));
        let k = kappa(b1, b2);
        symmetric &= k == kappa(b2, b1);
        let holds = contact_margin(b1, b2, 1000) > 0.0;
        if holds == (k > 0.0) {
            consistent += 1;
        }
    }
    let pass = (k0 - 1.0).abs() <= 1e-10 && k1.abs() <= 1e-8 && symmetric && consistent == 50;
    outcome(
        pass,
        format!(
            "kappa(0,0) = {k0}, kappa(-1,-1) = {k1:.1e}, swap exact: {symmetric}, contact inequality matches sign of kappa {consistent}/50"
        ),
    )
}

fn eta_pipeline() -> Outcome {
    use rayon::prelude::*;
    let d = fixtures::perturbed_bidisk(0.1);
    let n = 64;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let min_eta = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = [(k / n) as f64 * step, (k % n) as f64 * step];
            let z = d.edges[0].chart.eval(&p).unwrap().z;
            eta(&d, &[0, 1], &z).unwrap().eta_weight
        })
        .reduce(|| f64::INFINITY, f64::min);

    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let z = d.edges[0].chart.eval(&p).unwrap().z;
        let e = eta(&d, &[0, 1], &z).unwrap().eta_weight;
        let t = random_map(&mut rng, 0.15);
        let moved = d.transformed(&t).unwrap();
        let e2 = eta(&moved, &[0, 1], &t.apply_affine(&z).unwrap())
            .unwrap()
            .eta_weight;
        let expected = e / t.denominator(&z).norm().powi(3);
        worst = worst.max((e2 - expected).abs() / expected.abs());
    }

    let mut strict = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..10 {
        let p = [rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3)];
        let z = d.edges[0].chart.eval(&p).unwrap().z;
        let e = eta(&d, &[0, 1], &z).unwrap();
        let r = d
            .check_strict_convexity(&[0, 1], &z, 8, 24, Some(0.3))
            .unwrap();
        min_margin = min_margin.min(r.margin);
        if e.eta_weight > 0.0 && r.strict && r.margin > 0.0 {
            strict += 1;
        }
    }
    outcome(
        min_eta > 0.0 && worst <= 1e-6 && strict == 10,
        format!(
            "min eta on 64^2 grid {min_eta:.4}, transform max rel {worst:.1e}, strict at {strict}/10 (min margin {min_margin:.3})"
        ),
    )
}

fn fefferman() -> Outcome {
    let s = fixtures::sphere();
    let rho = s.rho(0);
    let chart = &s.faces[0].chart;
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let ratio = |pt: &projhardy::chart::ChartPoint| {
        let g = rho.real_gradient(&pt.z);
        let gn = (g[0].norm_sqr() + g[1].norm_sqr()).sqrt();
        let unit = [g[0] / gn, g[1] / gn];
        let area = real_det([&pt.tangents[0], &pt.tangents[1], &pt.tangents[2], &unit]).abs();
        fefferman_density(rho, &pt.z, &pt.tangents).unwrap() / area
    };
    let base = ratio(&chart.eval(&[0.6, 0.0, 0.0]).unwrap());
    let mut spread = 0.0f64;
    for _ in 0..1000 {
        let p = [
            rng.gen_range(0.01..1.56),
            rng.gen_range(0.0..6.3),
            rng.gen_range(0.0..6.3),
        ];
        spread = spread.max((ratio(&chart.eval(&p).unwrap()) - base).abs() / base);
    }

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let lambda = random_complex(&mut rng, 1.5);
        let m =
            nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(c(1.0, 0.0), lambda, lambda));
        let t = normalize_map(m).unwrap();
        let image = rho.transformed(&t, 2).unwrap();
        let p = [
            rng.gen_range(0.01..1.56),
            rng.gen_range(0.0..6.3),
            rng.gen_range(0.0..6.3),
        ];
        let pt = chart.eval(&p).unwrap();
        let fz = [pt.z[0] * lambda, pt.z[1] * lambda];
        let frame: Vec<Point2> = pt
            .tangents
            .iter()
            .map(|v| [v[0] * lambda, v[1] * lambda])
            .collect();
        let a = fefferman_density(rho, &pt.z, &pt.tangents).unwrap();
        let b = fefferman_density(&image, &fz, &frame).unwrap();
        let expected = a * lambda.norm().powf(8.0 / 3.0);
        worst = worst.max((b - expected).abs() / expected);
    }
    outcome(
        spread <= 1e-10 && worst <= 1e-8,
        format!(
            "sphere spread {spread:.1e} over 1000 points, |lambda|^(8/3) law max rel {worst:.1e}"
        ),
    )
}

fn hardy_invariance() -> Outcome {
    let d = fixtures::perturbed_bidisk(0.1);
    let f = PolySection::parse("1 + z1 - (0.5,0.2)*z2^2").unwrap();
    let res = Resolution {
        periodic: 16,
        gauss: 16,
    };
    let base = hardy_norm(&f, &d, res).unwrap().norm_sq;
    let mut rng = ChaCha8Rng::seed_from_u64(114);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let t = random_map(&mut rng, 0.15);
        let moved = d.transformed(&t).unwrap();
        let n = hardy_norm(&f.transformed(&t), &moved, res).unwrap().norm_sq;
        worst = worst.max((n - base).abs() / base);
    }
    outcome(
        worst <= 1e-5,
        format!("norm^2 {base:.6}, 10 maps, max rel {worst:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("simplex integral", simplex_closed_form),
        ("reduced chart identity", chart_identity),
        ("role symmetry", role_symmetry),
        ("Cramer identity", cramer),
        ("corner kernel invariance", corner_invariance),
        ("bidisk Cauchy recovery", cauchy_recovery),
        ("sphere Leray reproduction", sphere_leray),
        ("perturbed bidisk reproduction", piecewise_reproduction),
        ("pushforward consistency", pushforward),
        ("transformation laws", transformation_laws),
        ("kappa anchors", kappa_anchors),
        ("eta pipeline", eta_pipeline),
        ("Fefferman density", fefferman),
        ("Hardy norm invariance", hardy_invariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
