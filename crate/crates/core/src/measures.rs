//! Boundary measures (Fefferman on faces, η-weighted on edges), the Hardy
//! norm and the piecewise reproducing formula.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chart::Resolution;
use crate::domain::PwsDomain;
use crate::error::{Error, Result};
use crate::forms::{dz12, norm2, real_det};
use crate::invariants::eta;
use crate::kernels::{corner_kernel, smooth_leray_density, StrongTangentSet};
use crate::poly::{parse_expression, HermitianPoly, Poly};
use crate::projective::{HomVec, Point2, ProjMap, C};
use crate::quadrature::{pairwise_sum, tensor_nodes, try_integrate_tensor};

/// Holomorphic polynomial section of `O(-2, 0)`: `Z0^{-2} F(Z1/Z0, Z2/Z0)`,
/// optionally pushed forward by a projective map.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySection {
    poly: Poly,
    /// Inverse of the accumulated push-forward.
    pull: ProjMap,
}

impl PolySection {
    pub fn new(poly: Poly) -> Result<Self> {
        if !poly.is_holomorphic() {
            return Err(Error::InvalidParameter(format!(
                "section `{poly}` is not holomorphic"
            )));
        }
        Ok(Self {
            poly,
            pull: ProjMap::identity(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_expression(text)?)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Value in the affine trivialization `Z0 = 1`.
    pub fn eval(&self, z: &Point2) -> Result<C> {
        let d = self.pull.denominator(z);
        let w = self.pull.apply_affine(z)?;
        Ok(self.poly.eval(&w) / (d * d))
    }

    /// The section `f ∘ T^{-1}`, so that `f'(Tz) = D_T(z)^2 f(z)`.
    pub fn transformed(&self, t: &ProjMap) -> Self {
        Self {
            poly: self.poly.clone(),
            pull: self.pull.compose(&t.inverse()),
        }
    }
}

fn bordered_levi_det(rho: &HermitianPoly, z: &Point2) -> C {
    let g = rho.gradient(z);
    let l = rho.levi_matrix(z);
    let (gb1, gb2) = (g[0].conj(), g[1].conj());
    // det [[0, ρ_z̄1, ρ_z̄2], [ρ_z1, L11, L12], [ρ_z2, L21, L22]]
    -gb1 * (g[0] * l[1][1] - l[0][1] * g[1]) + gb2 * (g[0] * l[1][0] - l[0][0] * g[1])
}

/// Density of the Fefferman form against three real tangent vectors:
/// `2^{4/3} |J|^{1/3} |det_R[e1, e2, e3, ∇ρ]| / |∇ρ|^2`.
///
/// Zero on Levi-flat points; an error where the Levi form is negative.
pub fn fefferman_density(rho: &HermitianPoly, z: &Point2, frame: &[Point2]) -> Result<f64> {
    if frame.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "Fefferman density takes three frame vectors, got {}",
            frame.len()
        )));
    }
    let grad = rho.real_gradient(z);
    let gn = norm2(&grad);
    if gn <= 1e-14 {
        return Err(Error::DegenerateGradient { norm: gn });
    }
    let j = bordered_levi_det(rho, z);
    let levi_scale = rho
        .levi_matrix(z)
        .iter()
        .flatten()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if j.re > 1e-12 * gn * gn * levi_scale.max(1.0) {
        return Err(Error::LeviNotPositive(format!(
            "bordered determinant {j} at {z:?}"
        )));
    }
    let vol = real_det([&frame[0], &frame[1], &frame[2], &grad]).abs();
    Ok(2f64.powf(4.0 / 3.0) * j.norm().cbrt() * vol / (gn * gn))
}

const ETA_ZERO_TOL: f64 = 1e-8;

/// `η^{1/3} |dz1 ∧ dz2(e_a, e_b)|`; negative η beyond rounding is an error.
pub fn edge_measure_from_eta(eta_weight: f64, frame: &[Point2]) -> Result<f64> {
    if eta_weight < -ETA_ZERO_TOL {
        return Err(Error::NegativeEta(eta_weight));
    }
    if frame.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "edge measure takes two frame vectors, got {}",
            frame.len()
        )));
    }
    Ok(eta_weight.max(0.0).cbrt() * dz12(&frame[0], &frame[1]).norm())
}

pub fn edge_measure_density(
    d: &PwsDomain,
    members: &[usize],
    z: &Point2,
    frame: &[Point2],
) -> Result<f64> {
    edge_measure_from_eta(eta(d, members, z)?.eta_weight, frame)
}

/// `sign det_R[∇ρ, e1, e2, e3]`: +1 when the chart frame is positively
/// oriented as part of the boundary.
pub fn face_orientation(rho: &HermitianPoly, z: &Point2, frame: &[Point2]) -> f64 {
    let g = rho.real_gradient(z);
    real_det([&g, &frame[0], &frame[1], &frame[2]]).signum()
}

/// Orientation of an edge chart relative to its members.
pub fn edge_orientation(d: &PwsDomain, members: &[usize], z: &Point2, frame: &[Point2]) -> f64 {
    let g1 = d.rho(members[0]).real_gradient(z);
    let g2 = d.rho(members[1]).real_gradient(z);
    -real_det([&g1, &g2, &frame[0], &frame[1]]).signum()
}

/// A discretized boundary measure: weighted nodes per piece.
#[derive(Debug, Clone)]
pub struct BoundaryMeasure {
    pub pieces: Vec<String>,
    pub nodes: Vec<MeasureNode>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureNode {
    pub z: Point2,
    pub weight: f64,
    pub piece: usize,
}

fn face_name(d: &PwsDomain, h: usize) -> String {
    format!("face:{}", d.hypersurfaces[h].label)
}

fn edge_name(d: &PwsDomain, members: &[usize]) -> String {
    let labels: Vec<&str> = members
        .iter()
        .map(|&m| d.hypersurfaces[m].label.as_str())
        .collect();
    format!("edge:{}", labels.join("+"))
}

impl BoundaryMeasure {
    /// Fefferman density on every face chart and `η^{1/3}|dz|` on every
    /// two-dimensional edge chart, at the given resolution.
    pub fn new(d: &PwsDomain, res: Resolution) -> Result<Self> {
        use rayon::prelude::*;
        let mut pieces = Vec::new();
        let mut nodes = Vec::new();
        for face in &d.faces {
            let piece = pieces.len();
            pieces.push(face_name(d, face.hypersurface));
            let rho = d.rho(face.hypersurface);
            let part = tensor_nodes(&face.chart.axes(res))
                .par_iter()
                .map(|(p, w)| {
                    let pt = face.chart.eval(p)?;
                    let dens = fefferman_density(rho, &pt.z, &pt.tangents)?;
                    Ok(MeasureNode {
                        z: pt.z,
                        weight: dens * w,
                        piece,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            nodes.extend(part);
        }
        for edge in d.edges.iter().filter(|e| e.chart.dim() == 2) {
            let piece = pieces.len();
            pieces.push(edge_name(d, &edge.members));
            let part = tensor_nodes(&edge.chart.axes(res))
                .par_iter()
                .map(|(p, w)| {
                    let pt = edge.chart.eval(p)?;
                    let dens = edge_measure_density(d, &edge.members, &pt.z, &pt.tangents)?;
                    Ok(MeasureNode {
                        z: pt.z,
                        weight: dens * w,
                        piece,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            nodes.extend(part);
        }
        Ok(Self { pieces, nodes })
    }

    /// `∫ g dμ`, split by piece.
    pub fn integrate<G>(&self, g: G) -> Result<Vec<C>>
    where
        G: Fn(&Point2) -> Result<C>,
    {
        let mut per: Vec<Vec<C>> = vec![Vec::new(); self.pieces.len()];
        for n in &self.nodes {
            per[n.piece].push(g(&n.z)? * n.weight);
        }
        Ok(per.iter().map(|v| pairwise_sum(v)).collect())
    }

    pub fn inner(&self, f: &PolySection, g: &PolySection) -> Result<C> {
        let parts = self.integrate(|z| Ok(f.eval(z)? * g.eval(z)?.conj()))?;
        Ok(parts.iter().sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    pub norm_sq: f64,
    pub pieces: Vec<(String, f64)>,
    /// Difference to the same norm at half resolution.
    pub error_estimate: f64,
}

fn coarsened(res: Resolution) -> Resolution {
    Resolution {
        periodic: (res.periodic / 2).max(1),
        gauss: (res.gauss / 2).max(1),
    }
}

/// `‖f‖^2 = ∫_S |f|^2 dμ`.
pub fn hardy_norm(f: &PolySection, d: &PwsDomain, res: Resolution) -> Result<HardyReport> {
    let run = |res| -> Result<(Vec<String>, Vec<C>)> {
        let mu = BoundaryMeasure::new(d, res)?;
        let parts = mu.integrate(|z| Ok(C::new(f.eval(z)?.norm_sqr(), 0.0)))?;
        Ok((mu.pieces, parts))
    };
    let (names, parts) = run(res)?;
    let (_, coarse) = run(coarsened(res))?;
    let total: f64 = parts.iter().map(|c| c.re).sum();
    let coarse_total: f64 = coarse.iter().map(|c| c.re).sum();
    Ok(HardyReport {
        norm_sq: total,
        pieces: names.into_iter().zip(parts.iter().map(|c| c.re)).collect(),
        error_estimate: (total - coarse_total).abs(),
    })
}

/// Gram matrix of boundary inner products and its 2-norm condition number.
pub fn gram_matrix(
    sections: &[PolySection],
    d: &PwsDomain,
    res: Resolution,
) -> Result<(DMatrix<C>, f64)> {
    let mu = BoundaryMeasure::new(d, res)?;
    let n = sections.len();
    let mut g = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = mu.inner(&sections[i], &sections[j])?;
        }
    }
    let sv = g.clone().singular_values();
    let cond = sv.max() / sv.min();
    Ok((g, cond))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceContribution {
    pub name: String,
    pub value: C,
    pub error_estimate: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub value: C,
    pub expected: C,
    pub faces: Vec<PieceContribution>,
    pub edges: Vec<PieceContribution>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub resolution: Resolution,
}

/// `Σ_faces ∫ f L_ρ(·, τ) + Σ_edges ∫ f K(·, τ)`, compared with `f(τ)`.
pub fn reproduce(
    f: &PolySection,
    tau: &Point2,
    d: &PwsDomain,
    res: Resolution,
) -> Result<ReproduceReport> {
    if !d.contains(tau) {
        return Err(Error::NotInterior(format!("{tau:?}")));
    }
    let mut faces = Vec::new();
    for face in &d.faces {
        let rho = d.rho(face.hypersurface);
        let axes = face.chart.axes(res);
        let q = try_integrate_tensor(&axes, |p| {
            let pt = face.chart.eval(p)?;
            let frame = [pt.tangents[0], pt.tangents[1], pt.tangents[2]];
            let k = smooth_leray_density(rho, &pt.z, tau, &frame)?.value;
            Ok(f.eval(&pt.z)? * k * face_orientation(rho, &pt.z, &frame))
        })?;
        faces.push(PieceContribution {
            name: face_name(d, face.hypersurface),
            value: q.value,
            error_estimate: q.error_estimate,
            nodes: q.nodes_used,
        });
    }
    let tau_h = HomVec::from_affine(tau);
    let mut edges = Vec::new();
    for edge in d.edges.iter().filter(|e| e.chart.dim() == 2) {
        let axes = edge.chart.axes(res);
        let q = try_integrate_tensor(&axes, |p| {
            let pt = edge.chart.eval(p)?;
            let set = StrongTangentSet::at_edge(d, &edge.members, &pt.z)?;
            let k = corner_kernel(&set, &tau_h, &pt.tangents)?.value;
            let sign = edge_orientation(d, &edge.members, &pt.z, &pt.tangents);
            Ok(f.eval(&pt.z)? * k * sign)
        })?;
        edges.push(PieceContribution {
            name: edge_name(d, &edge.members),
            value: q.value,
            error_estimate: q.error_estimate,
            nodes: q.nodes_used,
        });
    }
    let value: C = faces.iter().chain(&edges).map(|p| p.value).sum();
    let expected = f.eval(tau)?;
    let abs_err = (value - expected).norm();
    let rel_err = if expected.norm() > 0.0 {
        abs_err / expected.norm()
    } else {
        abs_err
    };
    Ok(ReproduceReport {
        value,
        expected,
        faces,
        edges,
        abs_err,
        rel_err,
        resolution: res,
    })
}
