//! Piecewise-smooth domains: hypersurfaces, faces, edges, tangent
//! hyperplanes and sampling-based geometric checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{Chart, ChartKind, ChartPoint, Resolution};
use crate::error::{Error, Result};
use crate::forms::norm2;
use crate::poly::{gradient_hyperplane, HermitianPoly};
use crate::projective::{HomVec, Point2, ProjMap, C};
use crate::quadrature::tensor_nodes;

#[derive(Debug, Clone)]
pub struct Hypersurface {
    pub label: String,
    pub rho: HermitianPoly,
}

impl Hypersurface {
    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone)]
pub struct Face {
    pub hypersurface: usize,
    pub chart: Chart,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub members: Vec<usize>,
    pub chart: Chart,
}

/// How the sublevel sets `{ρ_j < 0}` combine into the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    Intersection,
    Union,
}

#[derive(Debug, Clone)]
pub struct PwsDomain {
    pub hypersurfaces: Vec<Hypersurface>,
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
    pub interior_points: Vec<Point2>,
    pub combine: Combine,
}

impl PwsDomain {
    pub fn new(
        hypersurfaces: Vec<Hypersurface>,
        faces: Vec<(usize, ChartKind)>,
        edges: Vec<(Vec<usize>, ChartKind)>,
        interior_points: Vec<Point2>,
        combine: Combine,
    ) -> Result<Self> {
        for (i, h) in hypersurfaces.iter().enumerate() {
            if hypersurfaces[..i].iter().any(|o| o.label == h.label) {
                return Err(Error::Spec(format!("duplicate label `{}`", h.label)));
            }
        }
        let n = hypersurfaces.len();
        let faces = faces
            .into_iter()
            .map(|(h, kind)| {
                if h >= n {
                    return Err(Error::Spec(format!("face refers to hypersurface {h}")));
                }
                Ok(Face {
                    hypersurface: h,
                    chart: Chart::new(kind, vec![hypersurfaces[h].rho.clone()])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = edges
            .into_iter()
            .map(|(members, kind)| {
                if members.len() < 2 || members.iter().any(|&m| m >= n) {
                    return Err(Error::Spec("edge needs at least two valid members".into()));
                }
                let polys = members
                    .iter()
                    .map(|&m| hypersurfaces[m].rho.clone())
                    .collect();
                Ok(Edge {
                    chart: Chart::new(kind, polys)?,
                    members,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hypersurfaces,
            faces,
            edges,
            interior_points,
            combine,
        })
    }

    pub fn rho(&self, j: usize) -> &HermitianPoly {
        &self.hypersurfaces[j].rho
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.hypersurfaces.iter().position(|h| h.label == label)
    }

    /// Common homogenization degree of all defining functions.
    pub fn degree(&self) -> u32 {
        self.hypersurfaces
            .iter()
            .map(|h| {
                let p = h.rho.poly();
                p.holomorphic_degree().max(p.antiholomorphic_degree())
            })
            .max()
            .unwrap_or(0)
    }

    /// `max_j ρ_j` for intersections, `min_j ρ_j` for unions; negative
    /// exactly inside the domain.
    pub fn combined_value(&self, z: &Point2) -> f64 {
        let vals = self.hypersurfaces.iter().map(|h| h.rho.eval(z));
        match self.combine {
            Combine::Intersection => vals.fold(f64::NEG_INFINITY, f64::max),
            Combine::Union => vals.fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, z: &Point2) -> bool {
        self.combined_value(z) < 0.0
    }

    /// Image of the domain under `t`. Every defining function is homogenized
    /// with the same degree, so the weak-tangent parametrization is carried
    /// along unchanged.
    pub fn transformed(&self, t: &ProjMap) -> Result<PwsDomain> {
        let d = self.degree();
        let hypersurfaces = self
            .hypersurfaces
            .iter()
            .map(|h| {
                Ok(Hypersurface {
                    label: h.label.clone(),
                    rho: h.rho.transformed(t, d)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let interior_points = self
            .interior_points
            .iter()
            .map(|p| t.apply_affine(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(PwsDomain {
            hypersurfaces,
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    hypersurface: f.hypersurface,
                    chart: f.chart.composed(t),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    members: e.members.clone(),
                    chart: e.chart.composed(t),
                })
                .collect(),
            interior_points,
            combine: self.combine,
        })
    }

    /// Maximal complex tangent hyperplanes of the members at `z`.
    pub fn strong_tangents(&self, members: &[usize], z: &Point2) -> Result<Vec<HomVec>> {
        members
            .iter()
            .map(|&m| gradient_hyperplane(self.rho(m), z))
            .collect()
    }

    /// `[-Σ t_l ⟨∂ρ_l, z⟩ : Σ t_l ∂ρ_l]` for barycentric `t`.
    pub fn weak_tangent(&self, members: &[usize], z: &Point2, t: &[f64]) -> Result<HomVec> {
        let sum: f64 = t.iter().sum();
        if t.len() != members.len() || t.iter().any(|&x| x < -1e-14) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::OutsideSimplex(t.to_vec()));
        }
        let mut g = [C::new(0.0, 0.0); 2];
        for (&m, &tl) in members.iter().zip(t) {
            let gl = self.rho(m).gradient(z);
            g[0] += gl[0] * tl;
            g[1] += gl[1] * tl;
        }
        let norm = (g[0].norm_sqr() + g[1].norm_sqr()).sqrt();
        if norm <= 1e-14 {
            return Err(Error::DegenerateGradient { norm });
        }
        HomVec::hyperplane([-(g[0] * z[0] + g[1] * z[1]), g[0], g[1]])
    }

    /// Sine of the complex angle between member gradients at `z`.
    pub fn transversality(&self, members: &[usize], z: &Point2) -> f64 {
        let a = self.rho(members[0]).gradient(z);
        let b = self.rho(members[1]).gradient(z);
        let det = (a[0] * b[1] - a[1] * b[0]).norm();
        det / (norm2(&a) * norm2(&b)).max(f64::MIN_POSITIVE)
    }

    /// Minimum-norm Newton projection onto `{ρ_m = 0 for all members}`.
    pub fn project_to_edge(&self, members: &[usize], z: &Point2) -> Result<Point2> {
        let mut z = *z;
        for _ in 0..50 {
            let f: Vec<f64> = members.iter().map(|&m| self.rho(m).eval(&z)).collect();
            if f.iter().all(|v| v.abs() <= 1e-15) {
                return Ok(z);
            }
            // Rows are the real gradients as vectors in R^4.
            let rows: Vec<[f64; 4]> = members
                .iter()
                .map(|&m| crate::forms::to_real(&self.rho(m).real_gradient(&z)))
                .collect();
            let k = rows.len();
            let gram = nalgebra::DMatrix::from_fn(k, k, |a, b| {
                (0..4).map(|i| rows[a][i] * rows[b][i]).sum::<f64>()
            });
            let rhs = nalgebra::DVector::from_vec(f.clone());
            let coeffs = gram
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::NotTransverse(0.0))?;
            let mut step = [0.0; 4];
            for (a, row) in rows.iter().enumerate() {
                for i in 0..4 {
                    step[i] += coeffs[a] * row[i];
                }
            }
            z = [
                z[0] - C::new(step[0], step[1]),
                z[1] - C::new(step[2], step[3]),
            ];
            if step.iter().map(|s| s * s).sum::<f64>().sqrt() <= 1e-16 {
                return Ok(z);
            }
        }
        let res: f64 = members
            .iter()
            .map(|&m| self.rho(m).eval(&z).abs())
            .fold(0.0, f64::max);
        if res <= 1e-12 {
            Ok(z)
        } else {
            Err(Error::NoConvergence(format!(
                "edge projection residual {res:e}"
            )))
        }
    }

    /// Compare domain membership with the local model `∩ {ρ_m < 0}` on
    /// random points of a ball around `z`.
    pub fn check_local_intersection(
        &self,
        members: &[usize],
        z: &Point2,
        radius: f64,
        samples: usize,
        seed: u64,
    ) -> Result<LocalIntersectionReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Point2> = (0..samples)
            .map(|_| {
                let g: [f64; 4] = [0; 4].map(|_| gaussian(&mut rng));
                let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                let r = radius * rng.gen::<f64>().powf(0.25);
                let s = r / n;
                [
                    z[0] + C::new(g[0] * s, g[1] * s),
                    z[1] + C::new(g[2] * s, g[3] * s),
                ]
            })
            .collect();
        for (j, h) in self.hypersurfaces.iter().enumerate() {
            if members.contains(&j) {
                continue;
            }
            let active = match self.combine {
                Combine::Intersection => points.iter().any(|p| h.rho.eval(p) >= 0.0),
                Combine::Union => points.iter().any(|p| h.rho.eval(p) < 0.0),
            };
            if active {
                return Err(Error::RadiusTooLarge {
                    label: h.label.clone(),
                });
            }
        }
        let mismatches = points
            .par_iter()
            .filter(|p| {
                let local = members.iter().all(|&m| self.rho(m).eval(p) < 0.0);
                local != self.contains(p)
            })
            .count();
        Ok(LocalIntersectionReport {
            samples,
            mismatches,
            pass: mismatches == 0,
        })
    }

    /// Sample the weak tangent lines through `z` and report how far they
    /// stay outside the closed domain, measured by `combined ρ / |ζ|^2`.
    pub fn check_strict_convexity(
        &self,
        members: &[usize],
        z: &Point2,
        t_grid: usize,
        ambient_grid: usize,
        local_radius: Option<f64>,
    ) -> Result<StrictnessReport> {
        let radius = local_radius.unwrap_or(2.0 * (1.0 + norm2(z)));
        let ts: Vec<Vec<f64>> = if members.len() == 1 {
            vec![vec![1.0]]
        } else {
            let m = t_grid.max(1);
            (0..=m)
                .map(|i| {
                    let a = i as f64 / m as f64;
                    vec![a, 1.0 - a]
                })
                .collect()
        };
        let n_ang = 4 * ambient_grid.max(1);
        let mut per_t = Vec::with_capacity(ts.len());
        for t in &ts {
            let w = self.weak_tangent(members, z, t)?;
            let c = w.coords();
            let v = [-c[2], c[1]];
            let nv = norm2(&v);
            let v = [v[0] / nv, v[1] / nv];
            let margin = (1..=ambient_grid.max(1))
                .into_par_iter()
                .map(|j| {
                    let r = radius * j as f64 / ambient_grid.max(1) as f64;
                    (0..n_ang)
                        .map(|k| {
                            let zeta = C::from_polar(
                                r,
                                2.0 * std::f64::consts::PI * k as f64 / n_ang as f64,
                            );
                            let p = [z[0] + zeta * v[0], z[1] + zeta * v[1]];
                            self.combined_value(&p) / (r * r)
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .reduce(|| f64::INFINITY, f64::min);
            per_t.push(TangentMargin {
                t: t.clone(),
                margin,
            });
        }
        let margin = per_t.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
        Ok(StrictnessReport {
            strict: margin > STRICT_TOL,
            margin,
            per_t,
        })
    }

    /// Chart points of a face or edge at the tensor nodes of `res`.
    pub fn chart_nodes(chart: &Chart, res: Resolution) -> Vec<(Vec<f64>, f64)> {
        tensor_nodes(&chart.axes(res))
    }

    /// Structural and sign checks on sampled chart points.
    pub fn validate(&self, res: Resolution) -> ValidationReport {
        let mut checks = Vec::new();

        // Orientation: interior points must lie on the negative side.
        for (j, h) in self.hypersurfaces.iter().enumerate() {
            let bad: Vec<usize> = self
                .interior_points
                .iter()
                .enumerate()
                .filter(|(_, p)| match self.combine {
                    Combine::Intersection => h.rho.eval(p) >= 0.0,
                    Combine::Union => false,
                })
                .map(|(i, _)| i)
                .collect();
            checks.push(Check {
                name: format!("orientation:{}", h.label),
                pass: bad.is_empty(),
                detail: if bad.is_empty() {
                    format!("rho_{j} < 0 at all interior points")
                } else {
                    format!(
                        "hypersurface `{}` is positive at interior points {bad:?}; rho must be negative inside",
                        h.label
                    )
                },
            });
        }
        for (i, p) in self.interior_points.iter().enumerate() {
            checks.push(Check {
                name: format!("interior:{i}"),
                pass: self.contains(p),
                detail: format!("combined rho = {:e}", self.combined_value(p)),
            });
        }

        for (fi, face) in self.faces.iter().enumerate() {
            let own = face.hypersurface;
            let label = &self.hypersurfaces[own].label;
            let mut worst_on = 0.0f64;
            let mut worst_off = f64::NEG_INFINITY;
            let mut min_grad = f64::INFINITY;
            let mut failure = None;
            for (p, _) in Self::chart_nodes(&face.chart, res) {
                match face.chart.eval(&p) {
                    Ok(ChartPoint { z, .. }) => {
                        worst_on = worst_on.max(self.rho(own).eval(&z).abs());
                        min_grad = min_grad.min(norm2(&self.rho(own).gradient(&z)));
                        for (j, h) in self.hypersurfaces.iter().enumerate() {
                            if j != own && self.combine == Combine::Intersection {
                                worst_off = worst_off.max(h.rho.eval(&z));
                            }
                        }
                    }
                    Err(e) => failure = Some(e.to_string()),
                }
            }
            let pass =
                failure.is_none() && worst_on <= CHART_TOL && worst_off < 0.0 && min_grad > 1e-12;
            checks.push(Check {
                name: format!("face:{fi}:{label}"),
                pass,
                detail: failure.unwrap_or_else(|| {
                    format!(
                        "max |rho_own| = {worst_on:e}, max rho_other = {worst_off:e}, min |d rho| = {min_grad:e}"
                    )
                }),
            });
        }

        for (ei, edge) in self.edges.iter().enumerate() {
            let mut worst_on = 0.0f64;
            let mut worst_off = f64::NEG_INFINITY;
            let mut min_transverse = f64::INFINITY;
            let mut failure = None;
            for (p, _) in Self::chart_nodes(&edge.chart, res) {
                match edge.chart.eval(&p) {
                    Ok(ChartPoint { z, .. }) => {
                        for &m in &edge.members {
                            worst_on = worst_on.max(self.rho(m).eval(&z).abs());
                        }
                        for (j, h) in self.hypersurfaces.iter().enumerate() {
                            if !edge.members.contains(&j) && self.combine == Combine::Intersection {
                                worst_off = worst_off.max(h.rho.eval(&z));
                            }
                        }
                        min_transverse = min_transverse.min(self.transversality(&edge.members, &z));
                    }
                    Err(e) => failure = Some(e.to_string()),
                }
            }
            let labels: Vec<&str> = edge
                .members
                .iter()
                .map(|&m| self.hypersurfaces[m].label.as_str())
                .collect();
            checks.push(Check {
                name: format!("edge:{ei}:{}", labels.join("+")),
                pass: failure.is_none()
                    && worst_on <= CHART_TOL
                    && worst_off < 0.0
                    && min_transverse > 1e-8,
                detail: failure.unwrap_or_else(|| {
                    format!(
                        "max |rho_member| = {worst_on:e}, max rho_other = {worst_off:e}, min complex transversality = {min_transverse:e}"
                    )
                }),
            });
        }
        let pass = checks.iter().all(|c| c.pass);
        ValidationReport { checks, pass }
    }
}

/// Tolerance for chart points on their defining equations.
pub const CHART_TOL: f64 = 1e-10;
/// Margins at or below this are treated as contact.
pub const STRICT_TOL: f64 = 1e-10;

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalIntersectionReport {
    pub samples: usize,
    pub mismatches: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentMargin {
    pub t: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictnessReport {
    pub strict: bool,
    pub margin: f64,
    pub per_t: Vec<TangentMargin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}
