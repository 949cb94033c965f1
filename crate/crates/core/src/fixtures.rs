//! Reference domains used by the tests, the CLI and the reproduction checks.

use crate::chart::{ChartKind, GraphPatch};
use crate::domain::{Combine, Hypersurface, PwsDomain};
use crate::poly::{parse_poly, HermitianPoly, Poly};
use crate::projective::C;

fn hyp(label: &str, rho: HermitianPoly) -> Hypersurface {
    Hypersurface {
        label: label.into(),
        rho,
    }
}

fn origin() -> [C; 2] {
    [C::new(0.0, 0.0); 2]
}

/// `{|z1|^2 + ε|z2|^2 < 1} ∩ {ε|z1|^2 + |z2|^2 < 1}`.
pub fn perturbed_bidisk(eps: f64) -> PwsDomain {
    let r1 = parse_poly(&format!("abs2(z1) + {eps}*abs2(z2) - 1")).unwrap();
    let r2 = parse_poly(&format!("{eps}*abs2(z1) + abs2(z2) - 1")).unwrap();
    let r = 1.0 / (1.0 + eps).sqrt();
    let face = |free| {
        ChartKind::GraphPatch(GraphPatch::Reinhardt {
            free,
            r_min: 0.0,
            r_max: r,
            guess: 1.0,
        })
    };
    PwsDomain::new(
        vec![hyp("H1", r1), hyp("H2", r2)],
        vec![(0, face(1)), (1, face(0))],
        vec![(vec![0, 1], ChartKind::Torus2 { r1: r, r2: r })],
        vec![origin()],
        Combine::Intersection,
    )
    .unwrap()
}

pub fn bidisk() -> PwsDomain {
    perturbed_bidisk(0.0)
}

pub fn sphere() -> PwsDomain {
    PwsDomain::new(
        vec![hyp("S", parse_poly("abs2(z1) + abs2(z2) - 1").unwrap())],
        vec![(0, ChartKind::SpherePolar { radius: 1.0 })],
        vec![],
        vec![origin()],
        Combine::Intersection,
    )
    .unwrap()
}

fn imaginary_parts() -> Vec<Hypersurface> {
    vec![
        hyp("Y1", parse_poly("(0,-0.5)*z1 + (0,0.5)*conj(z1)").unwrap()),
        hyp("Y2", parse_poly("(0,-0.5)*z2 + (0,0.5)*conj(z2)").unwrap()),
    ]
}

fn real_plane() -> ChartKind {
    ChartKind::GraphPatch(GraphPatch::RealPlane { half_width: 0.5 })
}

/// `{Im z1 < 0} ∪ {Im z2 < 0}`: the boundary near the real plane is not a
/// local intersection of the two sheets.
pub fn wedge_complement() -> PwsDomain {
    PwsDomain::new(
        imaginary_parts(),
        vec![],
        vec![(vec![0, 1], real_plane())],
        vec![[C::new(0.0, -0.5), C::new(0.0, -0.5)]],
        Combine::Union,
    )
    .unwrap()
}

/// `{Im z1 < 0} ∩ {Im z2 < 0}`.
pub fn half_space_cone() -> PwsDomain {
    PwsDomain::new(
        imaginary_parts(),
        vec![],
        vec![(vec![0, 1], real_plane())],
        vec![[C::new(0.0, -0.5), C::new(0.0, -0.5)]],
        Combine::Intersection,
    )
    .unwrap()
}

/// `Re z_k` and `Im z_k` as Hermitian polynomials.
pub fn real_coordinate(k: usize) -> (Poly, Poly) {
    let z = Poly::var(k);
    let zb = z.conj();
    let x = z.add(&zb).scale(C::new(0.5, 0.0));
    let y = z.sub(&zb).scale(C::new(0.0, -0.5));
    (x, y)
}

/// Two quadric sheets through the origin whose edge has the prescribed
/// normal-form coefficients `[a1, b1, c1, a2, b2, c2]`:
/// `ρ1 = 2(y1 - (a1 x1^2 + b1 x1 x2 + c1 x2^2) + μ y2^2)` and symmetrically.
/// The factor 2 makes `ρ_j ≈ 2 Im z_j`, so the edge frame at the origin is
/// the identity.
pub fn quadric_pair(coeffs: [f64; 6], mu: f64) -> PwsDomain {
    let [a1, b1, c1, a2, b2, c2] = coeffs;
    let (x1, y1) = real_coordinate(0);
    let (x2, y2) = real_coordinate(1);
    let r = |v: f64| C::new(v, 0.0);
    let q1 = x1
        .mul(&x1)
        .scale(r(a1))
        .add(&x1.mul(&x2).scale(r(b1)))
        .add(&x2.mul(&x2).scale(r(c1)));
    let q2 = x2
        .mul(&x2)
        .scale(r(a2))
        .add(&x1.mul(&x2).scale(r(b2)))
        .add(&x1.mul(&x1).scale(r(c2)));
    let rho1 = y1.sub(&q1).add(&y2.mul(&y2).scale(r(mu))).scale(r(2.0));
    let rho2 = y2.sub(&q2).add(&y1.mul(&y1).scale(r(mu))).scale(r(2.0));
    PwsDomain::new(
        vec![
            hyp("Q1", HermitianPoly::new(rho1).unwrap()),
            hyp("Q2", HermitianPoly::new(rho2).unwrap()),
        ],
        vec![],
        vec![(
            vec![0, 1],
            ChartKind::GraphPatch(GraphPatch::RealPlane { half_width: 0.1 }),
        )],
        vec![[C::new(0.0, -0.05), C::new(0.0, -0.05)]],
        Combine::Intersection,
    )
    .unwrap()
}

/// Normal form with `κ = 0`.
pub fn kappa_zero() -> PwsDomain {
    quadric_pair([0.0, -1.0, -1.0, 0.0, -1.0, -1.0], 1.0)
}

/// Normal form with `κ < 0`.
pub fn kappa_negative() -> PwsDomain {
    quadric_pair([0.0, -3.0, -1.0, 0.0, -3.0, -1.0], 1.0)
}
