//! Parameter charts for faces and edges.
//!
//! Every chart maps a parameter box to C^2 and returns the complex
//! components of the coordinate tangent vectors. An optional projective map
//! is applied after the base parametrization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::HermitianPoly;
use crate::projective::{Point2, ProjMap, C};
use crate::quadrature::Axis;

/// Chart catalog as it appears in domain description files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ChartKind {
    /// `(θ, φ) ↦ (r1 e^{iθ}, r2 e^{iφ})`.
    Torus2 { r1: f64, r2: f64 },
    /// `(χ, θ, φ) ↦ R (cos χ e^{iθ}, sin χ e^{iφ})`, `χ ∈ [0, π/2]`.
    SpherePolar { radius: f64 },
    /// A graph over simple coordinates, solved against the owning defining
    /// function(s).
    GraphPatch(GraphPatch),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "graph", rename_all = "snake_case")]
pub enum GraphPatch {
    /// Face chart `(r, θ, φ)`: `z_free = r e^{i·angle}`, while the modulus of
    /// the other coordinate is solved from `ρ = 0` along its ray.
    Reinhardt {
        free: usize,
        r_min: f64,
        r_max: f64,
        guess: f64,
    },
    /// Edge chart `(x1, x2) ∈ [-half_width, half_width]^2`:
    /// `z = x + i y(x)` with `y` solved from both member functions.
    RealPlane { half_width: f64 },
}

/// A point produced by a chart together with its coordinate tangents.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub z: Point2,
    pub tangents: Vec<Point2>,
}

/// Quadrature resolution: nodes per periodic axis and Gauss order per
/// bounded axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub periodic: usize,
    pub gauss: usize,
}

impl Resolution {
    pub fn uniform(n: usize) -> Self {
        Self {
            periodic: n,
            gauss: n,
        }
    }
}

/// A chart bound to the defining functions it is solved against.
#[derive(Debug, Clone)]
pub struct Chart {
    kind: ChartKind,
    polys: Vec<HermitianPoly>,
    map: ProjMap,
}

impl Chart {
    /// `polys` are the owning hypersurface (faces) or the members (edges).
    pub fn new(kind: ChartKind, polys: Vec<HermitianPoly>) -> Result<Self> {
        match &kind {
            ChartKind::Torus2 { r1, r2 } if *r1 <= 0.0 || *r2 <= 0.0 => {
                return Err(Error::InvalidChart("torus radii must be positive".into()))
            }
            ChartKind::SpherePolar { radius } if *radius <= 0.0 => {
                return Err(Error::InvalidChart("sphere radius must be positive".into()))
            }
            ChartKind::GraphPatch(GraphPatch::Reinhardt {
                free, r_min, r_max, ..
            }) => {
                if *free > 1 || r_min < &0.0 || r_max <= r_min {
                    return Err(Error::InvalidChart(
                        "reinhardt patch needs free in {0,1} and 0 <= r_min < r_max".into(),
                    ));
                }
                if polys.is_empty() {
                    return Err(Error::InvalidChart("reinhardt patch needs a face".into()));
                }
            }
            ChartKind::GraphPatch(GraphPatch::RealPlane { half_width }) => {
                if *half_width <= 0.0 || polys.len() != 2 {
                    return Err(Error::InvalidChart(
                        "real_plane patch needs two members and a positive width".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(Self {
            kind,
            polys,
            map: ProjMap::identity(),
        })
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn map(&self) -> &ProjMap {
        &self.map
    }

    /// The same chart followed by `t`.
    pub fn composed(&self, t: &ProjMap) -> Chart {
        Chart {
            kind: self.kind.clone(),
            polys: self.polys.clone(),
            map: t.compose(&self.map),
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ChartKind::Torus2 { .. } | ChartKind::GraphPatch(GraphPatch::RealPlane { .. }) => 2,
            _ => 3,
        }
    }

    pub fn axes(&self, res: Resolution) -> Vec<Axis> {
        let p = Axis::Periodic { n: res.periodic };
        match &self.kind {
            ChartKind::Torus2 { .. } => vec![p, p],
            ChartKind::SpherePolar { .. } => vec![
                Axis::Gauss {
                    a: 0.0,
                    b: PI / 2.0,
                    order: res.gauss,
                },
                p,
                p,
            ],
            ChartKind::GraphPatch(GraphPatch::Reinhardt { r_min, r_max, .. }) => vec![
                Axis::Gauss {
                    a: *r_min,
                    b: *r_max,
                    order: res.gauss,
                },
                p,
                p,
            ],
            ChartKind::GraphPatch(GraphPatch::RealPlane { half_width }) => {
                let g = Axis::Gauss {
                    a: -half_width,
                    b: *half_width,
                    order: res.gauss,
                };
                vec![g, g]
            }
        }
    }

    pub fn eval(&self, params: &[f64]) -> Result<ChartPoint> {
        if params.len() != self.dim() {
            return Err(Error::InvalidChart(format!(
                "expected {} parameters, got {}",
                self.dim(),
                params.len()
            )));
        }
        let base = self.eval_base(params)?;
        if self.map == ProjMap::identity() {
            return Ok(base);
        }
        let z = self.map.apply_affine(&base.z)?;
        let tangents = base
            .tangents
            .iter()
            .map(|v| self.map.differential(&base.z, v))
            .collect();
        Ok(ChartPoint { z, tangents })
    }

    fn eval_base(&self, p: &[f64]) -> Result<ChartPoint> {
        let zero = C::new(0.0, 0.0);
        match &self.kind {
            ChartKind::Torus2 { r1, r2 } => {
                let z1 = C::from_polar(*r1, p[0]);
                let z2 = C::from_polar(*r2, p[1]);
                let i = C::i();
                Ok(ChartPoint {
                    z: [z1, z2],
                    tangents: vec![[i * z1, zero], [zero, i * z2]],
                })
            }
            ChartKind::SpherePolar { radius } => {
                let (chi, th, ph) = (p[0], p[1], p[2]);
                let e1 = C::from_polar(1.0, th);
                let e2 = C::from_polar(1.0, ph);
                let z1 = e1 * radius * chi.cos();
                let z2 = e2 * radius * chi.sin();
                let i = C::i();
                Ok(ChartPoint {
                    z: [z1, z2],
                    tangents: vec![
                        [-e1 * radius * chi.sin(), e2 * radius * chi.cos()],
                        [i * z1, zero],
                        [zero, i * z2],
                    ],
                })
            }
            ChartKind::GraphPatch(GraphPatch::Reinhardt { free, guess, .. }) => {
                self.reinhardt(*free, *guess, p)
            }
            ChartKind::GraphPatch(GraphPatch::RealPlane { .. }) => self.real_plane(p),
        }
    }

    fn reinhardt(&self, free: usize, guess: f64, p: &[f64]) -> Result<ChartPoint> {
        let rho = &self.polys[0];
        let solved = 1 - free;
        let angles = [p[1], p[2]];
        let e = [C::from_polar(1.0, angles[0]), C::from_polar(1.0, angles[1])];
        let r = p[0];
        let point = |big_r: f64| {
            let mut z = [C::new(0.0, 0.0); 2];
            z[free] = e[free] * r;
            z[solved] = e[solved] * big_r;
            z
        };
        let mut ray = [C::new(0.0, 0.0); 2];
        ray[solved] = e[solved];
        let mut big_r = guess;
        let mut converged = false;
        for _ in 0..60 {
            let z = point(big_r);
            let g = rho.eval(&z);
            let dg = rho.real_differential(&z, &ray);
            if dg == 0.0 {
                break;
            }
            let step = g / dg;
            big_r -= step;
            if step.abs() <= 1e-15 * big_r.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        let z = point(big_r);
        if !converged && rho.eval(&z).abs() > 1e-12 {
            return Err(Error::NoConvergence(format!(
                "reinhardt graph at parameters {p:?}"
            )));
        }
        // Explicit tangents, then the implicit correction along the ray.
        let i = C::i();
        let mut explicit = [[C::new(0.0, 0.0); 2]; 3];
        explicit[0][free] = e[free];
        explicit[1][0] = i * z[0];
        explicit[2][1] = i * z[1];
        let dg_ray = rho.real_differential(&z, &ray);
        let tangents = explicit
            .iter()
            .map(|v| {
                let d_r = -rho.real_differential(&z, v) / dg_ray;
                [v[0] + ray[0] * d_r, v[1] + ray[1] * d_r]
            })
            .collect();
        Ok(ChartPoint { z, tangents })
    }

    fn real_plane(&self, p: &[f64]) -> Result<ChartPoint> {
        let (r1, r2) = (&self.polys[0], &self.polys[1]);
        let x = [p[0], p[1]];
        let mut y = [0.0, 0.0];
        let point = |y: &[f64; 2]| [C::new(x[0], y[0]), C::new(x[1], y[1])];
        let i = C::i();
        let dirs_y = [[i, C::new(0.0, 0.0)], [C::new(0.0, 0.0), i]];
        let jac_y = |z: &Point2| {
            [
                [
                    r1.real_differential(z, &dirs_y[0]),
                    r1.real_differential(z, &dirs_y[1]),
                ],
                [
                    r2.real_differential(z, &dirs_y[0]),
                    r2.real_differential(z, &dirs_y[1]),
                ],
            ]
        };
        let mut converged = false;
        for _ in 0..60 {
            let z = point(&y);
            let f = [r1.eval(&z), r2.eval(&z)];
            let j = jac_y(&z);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 {
                break;
            }
            let dy = [
                (j[1][1] * f[0] - j[0][1] * f[1]) / det,
                (-j[1][0] * f[0] + j[0][0] * f[1]) / det,
            ];
            y[0] -= dy[0];
            y[1] -= dy[1];
            if dy[0].abs().max(dy[1].abs()) <= 1e-17 {
                converged = true;
                break;
            }
        }
        let z = point(&y);
        if !converged && r1.eval(&z).abs().max(r2.eval(&z).abs()) > 1e-13 {
            return Err(Error::NoConvergence(format!("real_plane graph at {p:?}")));
        }
        let j = jac_y(&z);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let dirs_x = [[one, zero], [zero, one]];
        let tangents = dirs_x
            .iter()
            .map(|v| {
                let b = [-r1.real_differential(&z, v), -r2.real_differential(&z, v)];
                let dy0 = (j[1][1] * b[0] - j[0][1] * b[1]) / det;
                let dy1 = (-j[1][0] * b[0] + j[0][0] * b[1]) / det;
                [v[0] + i * dy0, v[1] + i * dy1]
            })
            .collect();
        Ok(ChartPoint { z, tangents })
    }
}
