//! The universal CFL form, the smooth Leray kernel, the corner kernel of a
//! two-dimensional edge and the simplex integral behind it.

use std::f64::consts::PI;

use serde::Serialize;

use crate::domain::PwsDomain;
use crate::error::{Error, Result};
use crate::forms::{dz12, norm2, wedge, Covector, Density};
use crate::poly::{gradient_hyperplane, HermitianPoly};
use crate::projective::{dot3, pair, Bidegree, HomVec, Point2, Role, C};
use crate::quadrature::{gauss_legendre, integrate_simplex};

/// `(2πi)^2 = -4π^2`.
pub fn two_pi_i_sq() -> C {
    C::new(-4.0 * PI * PI, 0.0)
}

/// A tangent vector to the incidence locus, in homogeneous coordinates:
/// `δW·Z + W·δZ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceVector {
    pub dz: [C; 3],
    pub dw: [C; 3],
}

impl IncidenceVector {
    pub fn swapped(&self) -> IncidenceVector {
        IncidenceVector {
            dz: self.dw,
            dw: self.dz,
        }
    }

    pub fn scaled(&self, s: C) -> IncidenceVector {
        IncidenceVector {
            dz: self.dz.map(|x| x * s),
            dw: self.dw.map(|x| x * s),
        }
    }

    fn flat(&self) -> Vec<C> {
        self.dz.iter().chain(self.dw.iter()).copied().collect()
    }
}

fn norm3(v: &[C; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative failure of `v` to be tangent to `{W·Z = 0}` at `(Z, W)`.
pub fn tangency_defect(z: &[C; 3], w: &[C; 3], v: &IncidenceVector) -> f64 {
    let d = dot3(&v.dw, z) + dot3(w, &v.dz);
    let scale = norm3(z) * norm3(&v.dw) + norm3(w) * norm3(&v.dz);
    if scale == 0.0 {
        0.0
    } else {
        d.norm() / scale
    }
}

const TANGENCY_TOL: f64 = 1e-10;

/// Chart differential of `a_l / a_j` along `δa`.
fn chart_diff(a: &[C; 3], da: &[C; 3], j: usize, l: usize) -> C {
    (da[l] * a[j] - a[l] * da[j]) / (a[j] * a[j])
}

/// Chart expression on `U_{j,k}` evaluated with homogeneous
/// representatives, without role or tangency checks.
fn omega_chart_raw(z: &[C; 3], w: &[C; 3], frame: &[IncidenceVector; 3], j: usize, k: usize) -> C {
    let alpha = |v: &IncidenceVector| -> C {
        (0..3)
            .map(|l| z[l] / z[j] * chart_diff(w, &v.dw, k, l))
            .sum()
    };
    let beta = |u: &IncidenceVector, v: &IncidenceVector| -> C {
        (0..3)
            .map(|l| {
                chart_diff(z, &u.dz, j, l) * chart_diff(w, &v.dw, k, l)
                    - chart_diff(z, &v.dz, j, l) * chart_diff(w, &u.dw, k, l)
            })
            .sum()
    };
    let [v1, v2, v3] = frame;
    let wedge = alpha(v1) * beta(v2, v3) - alpha(v2) * beta(v1, v3) + alpha(v3) * beta(v1, v2);
    z[j] * z[j] * w[k] * w[k] / two_pi_i_sq() * wedge
}

fn check_frame(z: &HomVec, w: &HomVec, frame: &[IncidenceVector; 3]) -> Result<()> {
    pair(z, w)?;
    for (index, v) in frame.iter().enumerate() {
        let defect = tangency_defect(z.coords(), w.coords(), v);
        if defect > TANGENCY_TOL {
            return Err(Error::NotTangent { index, defect });
        }
    }
    Ok(())
}

fn omega_density(value: C, frame: &[IncidenceVector; 3]) -> Density {
    Density {
        value,
        z_bidegree: Bidegree::new(2, 0),
        w_bidegree: Bidegree::new(2, 0),
        degree: 3,
        frame: frame.iter().map(|v| v.flat()).collect(),
    }
}

/// The universal CFL 3-form on the incidence locus, from its expression on
/// the chart `U_{j,k} = {z_j ≠ 0, w_k ≠ 0}`.
pub fn omega_cfl(
    z: &HomVec,
    w: &HomVec,
    frame: &[IncidenceVector; 3],
    chart: (usize, usize),
) -> Result<Density> {
    let (j, k) = chart;
    if j > 2 || k > 2 {
        return Err(Error::InvalidChart(format!("chart ({j},{k})")));
    }
    check_frame(z, w, frame)?;
    let (zc, wc) = (z.coords(), w.coords());
    if zc[j].norm() <= 1e-12 * z.norm() || wc[k].norm() <= 1e-12 * w.norm() {
        return Err(Error::InvalidChart(format!(
            "z_{j} or w_{k} vanishes at this point"
        )));
    }
    Ok(omega_density(omega_chart_raw(zc, wc, frame, j, k), frame))
}

/// `ω_CFL` on the chart where `|z_j|` and `|w_k|` are largest.
pub fn omega_cfl_best_chart(
    z: &HomVec,
    w: &HomVec,
    frame: &[IncidenceVector; 3],
) -> Result<Density> {
    omega_cfl(z, w, frame, (argmax(z.coords()), argmax(w.coords())))
}

fn argmax(v: &[C; 3]) -> usize {
    (0..3)
        .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
        .unwrap()
}

/// `ω_CFL(w, z)`: the same chart expression with the roles of the point and
/// the hyperplane exchanged.
pub fn omega_cfl_swapped(
    z: &HomVec,
    w: &HomVec,
    frame: &[IncidenceVector; 3],
    chart: (usize, usize),
) -> Result<Density> {
    check_frame(z, w, frame)?;
    let (j, k) = chart;
    let swapped = [frame[0].swapped(), frame[1].swapped(), frame[2].swapped()];
    let value = omega_chart_raw(w.coords(), z.coords(), &swapped, j, k);
    Ok(omega_density(value, frame))
}

/// The reduced expression on `{z0 ≠ 0, z2 ≠ 0, w0 ≠ 0}`:
/// `z0^2 w0^2 / (2πi)^2 · (1/ẑ2) dŵ1 ∧ dẑ1 ∧ dẑ2`, with the hyperplane
/// affinized so that `ẑ·ŵ = 1`, i.e. `ŵ = -w/w0`.
pub fn omega_reduced(z: &HomVec, w: &HomVec, frame: &[IncidenceVector; 3]) -> Result<Density> {
    check_frame(z, w, frame)?;
    let (zc, wc) = (z.coords(), w.coords());
    if zc[0].norm() <= 1e-12 * z.norm()
        || zc[2].norm() <= 1e-12 * z.norm()
        || wc[0].norm() <= 1e-12 * w.norm()
    {
        return Err(Error::InvalidChart(
            "reduced form needs z0, z2, w0 nonzero".into(),
        ));
    }
    let z2_hat = zc[2] / zc[0];
    let m = |v: &IncidenceVector| -> [C; 3] {
        [
            -chart_diff(wc, &v.dw, 0, 1),
            chart_diff(zc, &v.dz, 0, 1),
            chart_diff(zc, &v.dz, 0, 2),
        ]
    };
    let cols: Vec<[C; 3]> = frame.iter().map(m).collect();
    let det = cols[0][0] * (cols[1][1] * cols[2][2] - cols[2][1] * cols[1][2])
        - cols[1][0] * (cols[0][1] * cols[2][2] - cols[2][1] * cols[0][2])
        + cols[2][0] * (cols[0][1] * cols[1][2] - cols[1][1] * cols[0][2]);
    let value = zc[0] * zc[0] * wc[0] * wc[0] / two_pi_i_sq() / z2_hat * det;
    Ok(omega_density(value, frame))
}

/// Leray kernel density
/// `(2πi)^{-2} ∂ρ ∧ ∂̄∂ρ / ⟨∂ρ, z - τ⟩^2` on a frame of real tangent vectors.
pub fn smooth_leray_density(
    rho: &HermitianPoly,
    z: &Point2,
    tau: &Point2,
    frame: &[Point2; 3],
) -> Result<Density> {
    let g = rho.gradient(z);
    let denom = g[0] * (z[0] - tau[0]) + g[1] * (z[1] - tau[1]);
    let scale = norm2(&g) * (1.0 + norm2(z) + norm2(tau));
    if denom.norm() <= 1e-12 * scale {
        let w = gradient_hyperplane(rho, z)?;
        return Err(Error::Pole(format!(
            "tau lies on the tangent hyperplane {:?} of the face",
            w.coords()
        )));
    }
    let levi = rho.levi_matrix(z);
    let mut num = C::new(0.0, 0.0);
    for (l, gl) in g.iter().enumerate() {
        for (k, row) in levi.iter().enumerate() {
            for (jb, h) in row.iter().enumerate() {
                if *h == C::new(0.0, 0.0) {
                    continue;
                }
                let form = wedge(
                    &[Covector::Dz(l), Covector::Dzbar(jb), Covector::Dz(k)],
                    frame,
                );
                num += gl * h * form;
            }
        }
    }
    Ok(Density {
        value: num / (denom * denom) / two_pi_i_sq(),
        z_bidegree: Bidegree::new(2, 0),
        w_bidegree: Bidegree::new(0, 0),
        degree: 3,
        frame: frame.iter().map(|v| v.to_vec()).collect(),
    })
}

/// Ordered strong tangents at a common edge point.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongTangentSet {
    pub basepoint: HomVec,
    pub tangents: [HomVec; 2],
}

impl StrongTangentSet {
    pub fn new(basepoint: HomVec, tangents: [HomVec; 2]) -> Result<Self> {
        for w in &tangents {
            let p = pair(&basepoint, w)?;
            if p.norm() > 1e-10 * basepoint.norm() * w.norm() {
                return Err(Error::InvalidParameter(format!(
                    "tangent hyperplane not incident to basepoint (|pair| = {:e})",
                    p.norm()
                )));
            }
        }
        Ok(Self {
            basepoint,
            tangents,
        })
    }

    pub fn at_edge(domain: &PwsDomain, members: &[usize], z: &Point2) -> Result<Self> {
        let w = domain.strong_tangents(members, z)?;
        Self::new(HomVec::from_affine(z), [w[0], w[1]])
    }

    /// Minor of the 2x3 matrix of hyperplane coordinates with column `k`
    /// removed.
    pub fn det_minor(&self, k: usize) -> C {
        let cols: Vec<usize> = (0..3).filter(|&c| c != k).collect();
        let a = self.tangents[0].coords();
        let b = self.tangents[1].coords();
        a[cols[0]] * b[cols[1]] - a[cols[1]] * b[cols[0]]
    }

    /// `|z1 det_0 + z0 det_1|`, normalized by the sizes of the data.
    pub fn cramer_defect(&self) -> f64 {
        let z = self.basepoint.coords();
        let lhs = z[1] * self.det_minor(0) + z[0] * self.det_minor(1);
        lhs.norm() / (self.basepoint.norm() * self.tangents[0].norm() * self.tangents[1].norm())
    }
}

/// `(2πi)^{-2} det_0(w^j) / Π ⟨τ, w^j⟩ · z0^2 dz` on affine tangent vectors
/// at the basepoint.
pub fn corner_kernel(set: &StrongTangentSet, tau: &HomVec, frame: &[Point2]) -> Result<Density> {
    if frame.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "corner kernel takes two frame vectors, got {}",
            frame.len()
        )));
    }
    if tau.role() != Role::Point {
        return Err(Error::RoleMismatch {
            expected: "point",
            got: "hyperplane",
        });
    }
    let mut prod = C::new(1.0, 0.0);
    for w in &set.tangents {
        let p = pair(tau, w)?;
        if p.norm() <= 1e-12 * tau.norm() * w.norm() {
            return Err(Error::Pole(format!(
                "tau lies on the strong tangent {:?}",
                w.coords()
            )));
        }
        prod *= p;
    }
    let z0 = set.basepoint.coords()[0];
    let value = set.det_minor(0) / prod * z0 * z0 * dz12(&frame[0], &frame[1]) / two_pi_i_sq();
    Ok(Density {
        value,
        z_bidegree: Bidegree::new(2, 0),
        w_bidegree: Bidegree::new(0, 0),
        degree: 2,
        frame: frame.iter().map(|v| v.to_vec()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimplexMode {
    Closed,
    Quadrature { order: usize },
}

/// Distance from 0 to the convex hull of the points `1 - τ_j`.
pub fn simplex_pole_distance(tau: &[C]) -> f64 {
    let pts: Vec<C> = tau.iter().map(|t| C::new(1.0, 0.0) - t).collect();
    let seg = |a: C, b: C| -> f64 {
        let d = b - a;
        let len2 = d.norm_sqr();
        let s = if len2 == 0.0 {
            0.0
        } else {
            (-(a.conj() * d).re / len2).clamp(0.0, 1.0)
        };
        (a + d * s).norm()
    };
    match pts.len() {
        1 => pts[0].norm(),
        2 => seg(pts[0], pts[1]),
        3 => {
            // Inside test by orientation signs.
            let cross = |a: C, b: C| (a.conj() * b).im;
            let s = [
                cross(pts[1] - pts[0], -pts[0]),
                cross(pts[2] - pts[1], -pts[1]),
                cross(pts[0] - pts[2], -pts[2]),
            ];
            let area = cross(pts[1] - pts[0], pts[2] - pts[0]);
            let inside = s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0);
            if area.abs() > 1e-300 && inside {
                0.0
            } else {
                seg(pts[0], pts[1])
                    .min(seg(pts[1], pts[2]))
                    .min(seg(pts[2], pts[0]))
            }
        }
        _ => f64::NAN,
    }
}

/// `∫_Δ 1/(1 - ⟨τ, w⟩)^n dw_[n]`, oriented so that the value is
/// `(-1)^n / (n-1)! Π 1/(1 - τ_j)`.
pub fn simplex_integral(tau: &[C], mode: SimplexMode) -> Result<C> {
    let n = tau.len();
    if n != 2 && n != 3 {
        return Err(Error::InvalidParameter(format!(
            "simplex integral needs n = 2 or 3, got {n}"
        )));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    match mode {
        SimplexMode::Closed => {
            if let Some(t) = tau.iter().find(|t| (C::new(1.0, 0.0) - **t).norm() < 1e-14) {
                return Err(Error::Pole(format!("tau_j = {t} equals 1")));
            }
            let fact = if n == 3 { 2.0 } else { 1.0 };
            let prod: C = tau
                .iter()
                .map(|t| C::new(1.0, 0.0) / (C::new(1.0, 0.0) - t))
                .product();
            Ok(prod * (sign / fact))
        }
        SimplexMode::Quadrature { order } => {
            let dist = simplex_pole_distance(tau);
            if dist < 1e-3 {
                return Err(Error::Pole(format!(
                    "integrand pole at distance {dist:e} from the simplex"
                )));
            }
            let r = integrate_simplex(n, order, |t| {
                let s: C = t
                    .iter()
                    .zip(tau)
                    .map(|(tj, tauj)| (C::new(1.0, 0.0) - tauj) * *tj)
                    .sum();
                C::new(1.0, 0.0) / s.powi(n as i32)
            });
            Ok(r.value * sign)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushforwardReport {
    pub point: Point2,
    pub kernel: C,
    pub fiber: C,
    pub rel_dev: f64,
}

/// Integrate `g_τ ω_CFL` over the weak-tangent fiber above an edge point and
/// compare with the closed-form corner kernel on the chart frame.
///
/// The fiber runs from the second strong tangent to the first; with this
/// orientation the bidisk reproduces the iterated Cauchy kernel.
pub fn pushforward_corner_check(
    domain: &PwsDomain,
    edge: usize,
    params: &[f64],
    tau: &Point2,
    order: usize,
) -> Result<PushforwardReport> {
    let e = &domain.edges[edge];
    if e.members.len() != 2 || e.chart.dim() != 2 {
        return Err(Error::InvalidParameter(
            "pushforward check needs a two-dimensional edge of two members".into(),
        ));
    }
    let pt = e.chart.eval(params)?;
    let z = pt.z;
    let zh = HomVec::from_affine(&z);
    let set = StrongTangentSet::at_edge(domain, &e.members, &z)?;
    let tau_h = HomVec::from_affine(tau);
    let kernel = corner_kernel(&set, &tau_h, &pt.tangents)?.value;

    // Derivatives of the strong tangents along the chart directions.
    let dw = |m: usize, v: &Point2| -> [C; 3] {
        let rho = domain.rho(m);
        let g = rho.gradient(&z);
        let dg = rho.gradient_derivative(&z, v);
        [
            -(dg[0] * z[0] + dg[1] * z[1] + g[0] * v[0] + g[1] * v[1]),
            dg[0],
            dg[1],
        ]
    };
    let (m1, m2) = (e.members[0], e.members[1]);
    let w1 = *set.tangents[0].coords();
    let w2 = *set.tangents[1].coords();
    let da: Vec<([C; 3], [C; 3])> = pt.tangents.iter().map(|v| (dw(m1, v), dw(m2, v))).collect();
    let zero = C::new(0.0, 0.0);
    let (x, wts) = gauss_legendre(order);
    let mut fiber = C::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(&wts) {
        let s = 0.5 * (xi + 1.0);
        let lerp =
            |a: &[C; 3], b: &[C; 3]| -> [C; 3] { [0, 1, 2].map(|i| b[i] * (1.0 - s) + a[i] * s) };
        let w = lerp(&w1, &w2);
        let wh = HomVec::hyperplane(w)?;
        let lift = |k: usize| IncidenceVector {
            dz: [zero, pt.tangents[k][0], pt.tangents[k][1]],
            dw: lerp(&da[k].0, &da[k].1),
        };
        let ds = IncidenceVector {
            dz: [zero; 3],
            dw: [0, 1, 2].map(|i| w1[i] - w2[i]),
        };
        let frame = [lift(0), lift(1), ds];
        let omega = omega_cfl_best_chart(&zh, &wh, &frame)?.value;
        let p = pair(&tau_h, &wh)?;
        if p.norm() <= 1e-12 * wh.norm() * tau_h.norm() {
            return Err(Error::Pole(
                "tau lies on a weak tangent of the fiber".into(),
            ));
        }
        fiber += omega / (p * p) * (0.5 * wi);
    }
    Ok(PushforwardReport {
        point: z,
        kernel,
        fiber,
        rel_dev: (fiber - kernel).norm() / kernel.norm(),
    })
}
