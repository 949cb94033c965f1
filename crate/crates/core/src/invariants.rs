//! Normal forms of two-dimensional edges, their transformation laws, and the
//! invariants κ and η built from them.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2};
use serde::Serialize;

use crate::domain::PwsDomain;
use crate::error::{Error, Result};
use crate::projective::{normalize_map, Point2, ProjMap, C};

/// Quadratic part of the edge as a graph over its real tangent plane:
/// `y1 = a1 x1^2 + b1 x1 x2 + c1 x2^2`, `y2 = a2 x2^2 + b2 x1 x2 + c2 x1^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl NormalForm {
    pub fn new(c: [f64; 6]) -> Self {
        Self {
            a1: c[0],
            b1: c[1],
            c1: c[2],
            a2: c[3],
            b2: c[4],
            c2: c[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.a1, self.b1, self.c1, self.a2, self.b2, self.c2]
    }

    pub fn max_abs_diff(&self, other: &NormalForm) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn swapped(&self) -> Self {
        Self::new([self.a2, self.b2, self.c2, self.a1, self.b1, self.c1])
    }
}

/// Generators of the stabilizer of the origin and the real plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CoordChange {
    /// `I_λ`: `w0 = z0 + λ z1`.
    Shift(C),
    /// `S_r`: `w1 = r z1`.
    Scale(f64),
    /// `W`: exchange `z1` and `z2`.
    Swap,
    /// `H_r`: `w2 = z2 + r z1`.
    Shear(f64),
}

impl CoordChange {
    pub fn matrix(&self) -> Matrix3<C> {
        let r = |x: f64| C::new(x, 0.0);
        let mut m = Matrix3::identity();
        match *self {
            CoordChange::Shift(l) => m[(0, 1)] = l,
            CoordChange::Scale(s) => m[(1, 1)] = r(s),
            CoordChange::Swap => {
                m = Matrix3::from_row_slice(&[
                    r(1.0),
                    r(0.0),
                    r(0.0),
                    r(0.0),
                    r(0.0),
                    r(1.0),
                    r(0.0),
                    r(1.0),
                    r(0.0),
                ])
            }
            CoordChange::Shear(s) => m[(2, 1)] = r(s),
        }
        m
    }

    pub fn map(&self) -> Result<ProjMap> {
        normalize_map(self.matrix())
    }
}

/// Normal form of `T^{-1}(σ)` given the normal form of `σ`.
pub fn apply_coordinate_change(nf: &NormalForm, change: CoordChange) -> Result<NormalForm> {
    let NormalForm {
        a1,
        b1,
        c1,
        a2,
        b2,
        c2,
    } = *nf;
    Ok(match change {
        CoordChange::Shift(l) => NormalForm::new([a1 + l.im, b1, c1, a2, b2 + l.im, c2]),
        CoordChange::Scale(r) => {
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::InvalidParameter(format!("scale factor r = {r}")));
            }
            NormalForm::new([a1 * r, b1, c1 / r, a2, b2 * r, c2 * r * r])
        }
        CoordChange::Swap => nf.swapped(),
        CoordChange::Shear(r) => NormalForm::new([
            a1 + r * b1 + r * r * c1,
            b1 + 2.0 * r * c1,
            c1,
            a2 - r * c1,
            b2 + 2.0 * r * a2 - r * b1 - 2.0 * r * r * c1,
            c2 + r * (b2 - a1) + r * r * (a2 - b1) - r * r * r * c1,
        ]),
    })
}

/// Composite matrix of a sequence of laws applied in order.
pub fn group_element(steps: &[CoordChange]) -> Result<ProjMap> {
    let m = steps
        .iter()
        .fold(Matrix3::identity(), |acc, s| acc * s.matrix());
    normalize_map(m)
}

/// Bring `nf` to `a1 = a2 = 0`, `c1 = c2 = -1`, `b1 ≤ b2`. Returns the
/// normalized form and the laws used, in order.
pub fn normalize_coeffs(nf: &NormalForm) -> Result<(NormalForm, Vec<CoordChange>)> {
    if !(nf.c1 < 0.0 && nf.c2 < 0.0) {
        return Err(Error::NotStronglyConvex {
            c1: nf.c1,
            c2: nf.c2,
        });
    }
    let mut steps = Vec::new();
    let mut cur = *nf;
    let mut push = |cur: &mut NormalForm, s: CoordChange| -> Result<()> {
        *cur = apply_coordinate_change(cur, s)?;
        steps.push(s);
        Ok(())
    };
    if cur.a1.abs() > 1e-15 {
        let mu = -cur.a1;
        push(&mut cur, CoordChange::Shift(C::new(0.0, mu)))?;
    }
    if cur.a2.abs() > 1e-15 {
        let mu = -cur.a2;
        push(&mut cur, CoordChange::Swap)?;
        push(&mut cur, CoordChange::Shift(C::new(0.0, mu)))?;
        push(&mut cur, CoordChange::Swap)?;
    }
    let (l1, l2) = ((-cur.c1).ln(), (-cur.c2).ln());
    let ln_r = -(l1 + 2.0 * l2) / 3.0;
    let ln_s = -(2.0 * l1 + l2) / 3.0;
    if ln_r.abs() > 1e-15 {
        push(&mut cur, CoordChange::Scale(ln_r.exp()))?;
    }
    if ln_s.abs() > 1e-15 {
        push(&mut cur, CoordChange::Swap)?;
        push(&mut cur, CoordChange::Scale(ln_s.exp()))?;
        push(&mut cur, CoordChange::Swap)?;
    }
    if cur.b1 > cur.b2 {
        push(&mut cur, CoordChange::Swap)?;
    }
    // Pin the exact targets; the laws reach them up to rounding.
    cur.a1 = 0.0;
    cur.a2 = 0.0;
    cur.c1 = -1.0;
    cur.c2 = -1.0;
    Ok((cur, steps))
}

/// `f(t) = 4/(1 - t^2) - 3` on `(-1, 1)`.
pub fn contact_profile(t: f64) -> f64 {
    4.0 / (1.0 - t * t) - 3.0
}

fn contact_profile_slope(t: f64) -> f64 {
    let d = 1.0 - t * t;
    8.0 * t / (d * d)
}

/// Legendre transform `sup_t (p t - f(t))` and its maximizer.
pub fn legendre_f(p: f64) -> (f64, f64) {
    // f' is odd and strictly increasing from -inf to +inf.
    if p == 0.0 {
        return (-contact_profile(0.0), 0.0);
    }
    // Solve for |p| and reflect, so that evenness holds exactly.
    let (sign, p) = (p.signum(), p.abs());
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut t = 0.5;
    for _ in 0..200 {
        let g = contact_profile_slope(t) - p;
        if g.abs() <= 1e-15 * p.max(1.0) {
            break;
        }
        if g > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if hi - lo <= 1e-16 {
            break;
        }
        let d = 1.0 - t * t;
        let fpp = 8.0 * (1.0 + 3.0 * t * t) / (d * d * d);
        let newton = t - g / fpp;
        t = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    (p * t - contact_profile(t), sign * t)
}

/// `κ = (b1 + b2)/2 - L{f}((b2 - b1)/2)`.
pub fn kappa(b1: f64, b2: f64) -> f64 {
    0.5 * (b1 + b2) - legendre_f(0.5 * (b2 - b1)).0
}

/// Smallest value of `f(t) + ((t+1)/2) b1 + ((1-t)/2) b2` on an `n`-point
/// grid of `(-1, 1)`; the strict inequality holds when this is positive.
pub fn contact_margin(b1: f64, b2: f64, n: usize) -> f64 {
    (1..=n)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (n + 1) as f64;
            contact_profile(t) + 0.5 * (t + 1.0) * b1 + 0.5 * (1.0 - t) * b2
        })
        .fold(f64::INFINITY, f64::min)
}

/// Map sending `z` to the origin with `ρ_j ≈ 2 Im u_j` to first order.
pub fn edge_frame(d: &PwsDomain, members: &[usize], z: &Point2) -> Result<ProjMap> {
    if members.len() != 2 {
        return Err(Error::InvalidParameter(
            "edge frame needs two members".into(),
        ));
    }
    let g1 = d.rho(members[0]).gradient(z);
    let g2 = d.rho(members[1]).gradient(z);
    let det = g1[0] * g2[1] - g1[1] * g2[0];
    let scale =
        (g1[0].norm_sqr() + g1[1].norm_sqr()).sqrt() * (g2[0].norm_sqr() + g2[1].norm_sqr()).sqrt();
    if det.norm() <= 1e-10 * scale {
        return Err(Error::NotTransverse(
            det.norm() / scale.max(f64::MIN_POSITIVE),
        ));
    }
    let i = C::i();
    let zero = C::new(0.0, 0.0);
    let row = |g: &Point2| [-i * (g[0] * z[0] + g[1] * z[1]), i * g[0], i * g[1]];
    let (r1, r2) = (row(&g1), row(&g2));
    normalize_map(Matrix3::from_row_slice(&[
        C::new(1.0, 0.0),
        zero,
        zero,
        r1[0],
        r1[1],
        r1[2],
        r2[0],
        r2[1],
        r2[2],
    ]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub normal_form: NormalForm,
    /// RMS of the least-squares residual in `y`.
    pub residual: f64,
    /// Largest coefficient change between radius `h` and `h/2`.
    pub drift: f64,
    pub h: f64,
}

pub const DEFAULT_FIT_RADIUS: f64 = 1e-2;
const FIT_GRID: usize = 11;
const MAX_DRIFT: f64 = 1e-4;

/// Solve `ρ_m(x + iy) = 0` for `y` near zero.
fn solve_graph(d: &PwsDomain, members: &[usize], x: [f64; 2]) -> Result<[f64; 2]> {
    let mut y = Vector2::zeros();
    let point = |y: &Vector2<f64>| [C::new(x[0], y[0]), C::new(x[1], y[1])];
    let e = [
        [C::new(0.0, 1.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(0.0, 1.0)],
    ];
    for _ in 0..60 {
        let z = point(&y);
        let f = Vector2::new(d.rho(members[0]).eval(&z), d.rho(members[1]).eval(&z));
        let jac = Matrix2::from_fn(|l, m| d.rho(members[l]).real_differential(&z, &e[m]));
        let step = jac.lu().solve(&f).ok_or_else(|| {
            Error::RankDeficient("edge is not a graph over its tangent plane".into())
        })?;
        y -= step;
        if step.norm() <= 1e-17 + 1e-15 * y.norm() {
            return Ok([y[0], y[1]]);
        }
    }
    Err(Error::NoConvergence(format!("graph solve at x = {x:?}")))
}

fn monomials() -> Vec<(u32, u32)> {
    (2..=6u32)
        .flat_map(|deg| (0..=deg).map(move |p| (p, deg - p)))
        .collect()
}

fn fit_once(d: &PwsDomain, members: &[usize], h: f64) -> Result<(NormalForm, f64)> {
    let mons = monomials();
    let n = FIT_GRID;
    let mut rows = Vec::with_capacity(n * n);
    let mut ys = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let xi = [
                -1.0 + 2.0 * i as f64 / (n - 1) as f64,
                -1.0 + 2.0 * j as f64 / (n - 1) as f64,
            ];
            let y = solve_graph(d, members, [xi[0] * h, xi[1] * h])?;
            rows.push(
                mons.iter()
                    .map(|&(p, q)| xi[0].powi(p as i32) * xi[1].powi(q as i32))
                    .collect::<Vec<_>>(),
            );
            ys.push([y[0] / (h * h), y[1] / (h * h)]);
        }
    }
    let a = DMatrix::from_fn(rows.len(), mons.len(), |r, c| rows[r][c]);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 1e-12 * smax {
        return Err(Error::RankDeficient(format!(
            "normal form samples, singular value ratio {:e}",
            smin / smax
        )));
    }
    let idx = |p: u32, q: u32| mons.iter().position(|&m| m == (p, q)).unwrap();
    let mut coef = [[0.0; 3]; 2];
    let mut res2 = 0.0;
    for k in 0..2 {
        let b = DVector::from_iterator(ys.len(), ys.iter().map(|y| y[k]));
        let sol = svd
            .solve(&b, 0.0)
            .map_err(|e| Error::RankDeficient(e.to_string()))?;
        let r = &a * &sol - &b;
        res2 += r.norm_squared();
        coef[k] = [sol[idx(2, 0)], sol[idx(1, 1)], sol[idx(0, 2)]];
    }
    let residual = (res2 / (2 * ys.len()) as f64).sqrt() * h * h;
    let nf = NormalForm::new([
        coef[0][0], coef[0][1], coef[0][2], coef[1][2], coef[1][1], coef[1][0],
    ]);
    Ok((nf, residual))
}

/// Fit the normal form of an edge through the origin whose real tangent
/// plane is `R^2`, in the given coordinates.
pub fn fit_normal_form(d: &PwsDomain, members: &[usize], h: f64) -> Result<FitReport> {
    let (nf, residual) = fit_once(d, members, h)?;
    let (half, _) = fit_once(d, members, 0.5 * h)?;
    let drift = nf.max_abs_diff(&half);
    if !(drift <= MAX_DRIFT) {
        return Err(Error::NoConvergence(format!(
            "normal form drift {drift:e} between h and h/2"
        )));
    }
    Ok(FitReport {
        normal_form: nf,
        residual,
        drift,
        h,
    })
}

/// Normal form at an edge point, in the coordinates of `edge_frame`.
pub fn extract_normal_form(
    d: &PwsDomain,
    members: &[usize],
    z: &Point2,
    h: f64,
) -> Result<(FitReport, ProjMap)> {
    let frame = edge_frame(d, members, z)?;
    let moved = d.transformed(&frame)?;
    Ok((fit_normal_form(&moved, members, h)?, frame))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeInvariant {
    pub kappa: f64,
    /// `κ |z0|^3 / (c1 c2)` in the edge frame, where `|z0|^3 = 1/|det ∂ρ|`.
    pub eta_weight: f64,
    pub b1: f64,
    pub b2: f64,
    pub raw: NormalForm,
    pub normalized: NormalForm,
    pub fit: FitReport,
    #[serde(skip)]
    pub frame: ProjMap,
}

/// κ and η at an edge point.
pub fn eta(d: &PwsDomain, members: &[usize], z: &Point2) -> Result<EdgeInvariant> {
    let (fit, frame) = extract_normal_form(d, members, z, DEFAULT_FIT_RADIUS)?;
    let raw = fit.normal_form;
    let (normalized, _) = normalize_coeffs(&raw)?;
    let k = kappa(normalized.b1, normalized.b2);
    let g1 = d.rho(members[0]).gradient(z);
    let g2 = d.rho(members[1]).gradient(z);
    let det = (g1[0] * g2[1] - g1[1] * g2[0]).norm();
    Ok(EdgeInvariant {
        kappa: k,
        eta_weight: k / (raw.c1 * raw.c2 * det),
        b1: normalized.b1,
        b2: normalized.b2,
        raw,
        normalized,
        fit,
        frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::projective::HomVec;

    fn close(a: &NormalForm, b: &NormalForm, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn f_matches_ratio_of_cubes() {
        for i in 1..200 {
            let t = -1.0 + i as f64 / 100.0;
            let (u, v) = (0.5 * (t + 1.0), 0.5 * (1.0 - t));
            let ratio = (u.powi(3) + v.powi(3)) / (u * v);
            assert!((ratio - contact_profile(t)).abs() <= 1e-12 * ratio.abs());
        }
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_f(0.0).0, -1.0);
        for p in [0.3, 2.0, 17.0, 1e4] {
            let (l, t) = legendre_f(p);
            let (lm, tm) = legendre_f(-p);
            assert!((l - lm).abs() <= 1e-12 * l.abs().max(1.0));
            assert!((t + tm).abs() <= 1e-12);
            let eps = 1e-5;
            let slope = (legendre_f(p + eps).0 - legendre_f(p - eps).0) / (2.0 * eps);
            assert!((slope - t).abs() <= 1e-6, "{p}: {slope} vs {t}");
            assert!((contact_profile_slope(t) - p).abs() <= 1e-9 * p);
        }
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(0.0, 0.0) - 1.0).abs() <= 1e-15);
        assert!(kappa(-1.0, -1.0).abs() <= 1e-15);
        assert!((kappa(0.3, -2.0) - kappa(-2.0, 0.3)).abs() <= 1e-12);
    }

    #[test]
    fn contact_margin_sign_follows_kappa() {
        assert!(contact_margin(0.2, -0.4, 1000) > 0.0);
        assert!(contact_margin(-3.0, -3.0, 1000) < 0.0);
    }

    #[test]
    fn law_examples() {
        let nf = NormalForm::new([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = apply_coordinate_change(&nf, CoordChange::Scale(2.0)).unwrap();
        assert_eq!(s, NormalForm::new([2.0, 2.0, 1.5, 4.0, 10.0, 24.0]));
        let i = apply_coordinate_change(&nf, CoordChange::Shift(C::new(0.7, 0.0))).unwrap();
        assert_eq!(i, nf);
        let w = apply_coordinate_change(&nf, CoordChange::Swap).unwrap();
        assert_eq!(apply_coordinate_change(&w, CoordChange::Swap).unwrap(), nf);
        assert!(apply_coordinate_change(&nf, CoordChange::Scale(0.0)).is_err());
    }

    #[test]
    fn normalization() {
        let done = NormalForm::new([0.0, -0.5, -1.0, 0.0, 0.5, -1.0]);
        let (n, steps) = normalize_coeffs(&done).unwrap();
        assert!(steps.is_empty());
        assert_eq!(n, done);

        let scaled = apply_coordinate_change(&done, CoordChange::Scale(1.7)).unwrap();
        let (n, _) = normalize_coeffs(&scaled).unwrap();
        assert!(close(&n, &done, 1e-12), "{n:?}");

        let messy = NormalForm::new([0.4, 1.0, -2.0, -0.3, -0.2, -0.5]);
        let (n, steps) = normalize_coeffs(&messy).unwrap();
        let mut check = messy;
        for s in &steps {
            check = apply_coordinate_change(&check, *s).unwrap();
        }
        assert!(close(&check, &n, 1e-12));
        assert!(n.b1 <= n.b2);

        assert!(matches!(
            normalize_coeffs(&NormalForm::new([0.0, 0.0, 0.5, 0.0, 0.0, -1.0])),
            Err(Error::NotStronglyConvex { .. })
        ));
    }

    #[test]
    fn bidisk_normal_form() {
        let d = fixtures::bidisk();
        let one = [C::new(1.0, 0.0), C::new(1.0, 0.0)];
        let (fit, frame) = extract_normal_form(&d, &[0, 1], &one, DEFAULT_FIT_RADIUS).unwrap();
        let expected = NormalForm::new([-0.5, 0.0, 0.0, -0.5, 0.0, 0.0]);
        assert!(close(&fit.normal_form, &expected, 1e-8), "{fit:?}");
        let origin = frame.apply(&HomVec::from_affine(&one)).affine().unwrap();
        assert!(origin[0].norm() < 1e-15 && origin[1].norm() < 1e-15);
    }

    #[test]
    fn synthetic_round_trip() {
        let coeffs = [1.0, 2.0, -3.0, 4.0, 5.0, -6.0];
        let d = fixtures::quadric_pair(coeffs, 1.0);
        let zero = [C::new(0.0, 0.0); 2];
        let (fit, _) = extract_normal_form(&d, &[0, 1], &zero, DEFAULT_FIT_RADIUS).unwrap();
        assert!(
            close(&fit.normal_form, &NormalForm::new(coeffs), 1e-6),
            "{fit:?}"
        );
    }

    #[test]
    fn perturbed_bidisk_oracle() {
        let eps: f64 = 0.1;
        let k = 1.0 / (2.0 * (1.0 + eps) * (1.0 - eps).powi(2));
        let expected = NormalForm::new([
            -k * (1.0 + eps.powi(3)),
            2.0 * k * eps * (1.0 + eps),
            -k * eps * (1.0 + eps),
            -k * (1.0 + eps.powi(3)),
            2.0 * k * eps * (1.0 + eps),
            -k * eps * (1.0 + eps),
        ]);
        let d = fixtures::perturbed_bidisk(eps);
        for p in [[0.0, 0.0], [1.3, -2.2]] {
            let z = d.edges[0].chart.eval(&p).unwrap().z;
            let (fit, _) = extract_normal_form(&d, &[0, 1], &z, DEFAULT_FIT_RADIUS).unwrap();
            assert!(close(&fit.normal_form, &expected, 1e-8), "{fit:?}");
        }
    }

    #[test]
    fn kappa_fixtures() {
        let zero = [C::new(0.0, 0.0); 2];
        let e = eta(&fixtures::kappa_zero(), &[0, 1], &zero).unwrap();
        assert!(e.kappa.abs() <= 1e-8 && e.eta_weight.abs() <= 1e-8, "{e:?}");
        let e = eta(&fixtures::kappa_negative(), &[0, 1], &zero).unwrap();
        assert!((e.kappa + 2.0).abs() <= 1e-7 && e.eta_weight < 0.0, "{e:?}");
        let pb = fixtures::perturbed_bidisk(0.1);
        let z = pb.edges[0].chart.eval(&[0.5, 0.5]).unwrap().z;
        assert!(eta(&pb, &[0, 1], &z).unwrap().eta_weight > 0.0);
    }

    #[test]
    fn transverse_edges_only() {
        let d = fixtures::quadric_pair([0.0, 0.0, -1.0, 0.0, 0.0, -1.0], 1.0);
        let degenerate = PwsDomain::new(
            vec![
                d.hypersurfaces[0].clone(),
                d.hypersurfaces[0].clone().relabel("copy"),
            ],
            vec![],
            vec![],
            vec![],
            Default::default(),
        )
        .unwrap();
        let zero = [C::new(0.0, 0.0); 2];
        assert!(matches!(
            edge_frame(&degenerate, &[0, 1], &zero),
            Err(Error::NotTransverse(_))
        ));
    }

    #[test]
    fn laws_match_refits() {
        let nf = NormalForm::new([0.3, -0.7, -1.2, -0.4, 0.6, -0.8]);
        let d = fixtures::quadric_pair(nf.to_array(), 1.0);
        for change in [
            CoordChange::Shift(C::new(0.4, 0.3)),
            CoordChange::Scale(1.6),
            CoordChange::Swap,
            CoordChange::Shear(0.7),
            CoordChange::Shear(-1.3),
        ] {
            let moved = d.transformed(&change.map().unwrap().inverse()).unwrap();
            let fit = fit_normal_form(&moved, &[0, 1], DEFAULT_FIT_RADIUS).unwrap();
            let law = apply_coordinate_change(&nf, change).unwrap();
            assert!(
                close(&fit.normal_form, &law, 1e-6),
                "{change:?}: {:?} vs {law:?}",
                fit.normal_form
            );
        }
    }

    #[test]
    fn eta_transforms_with_cubed_denominator() {
        use crate::sampling::random_map;
        use rand::SeedableRng;
        let d = fixtures::perturbed_bidisk(0.1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let z = d.edges[0].chart.eval(&[0.8, -1.1]).unwrap().z;
        let e = eta(&d, &[0, 1], &z).unwrap();
        for _ in 0..5 {
            let t = random_map(&mut rng, 0.3);
            let moved = d.transformed(&t).unwrap();
            let tz = t.apply_affine(&z).unwrap();
            let e2 = eta(&moved, &[0, 1], &tz).unwrap();
            let expected = e.eta_weight / t.denominator(&z).norm().powi(3);
            assert!(
                (e2.eta_weight - expected).abs() <= 1e-6 * expected.abs(),
                "{} {}",
                e2.eta_weight,
                expected
            );
            assert!((e2.kappa - e.kappa).abs() <= 1e-6);
        }
    }
}
