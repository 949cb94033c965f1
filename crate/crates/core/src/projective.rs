//! Homogeneous coordinates on CP^2 and its dual, projective maps, the
//! incidence pairing and the transformation law for sections of `O(j,k)`.
//!
//! Affine coordinates are the standard chart `z0 != 0`, `ẑ_i = z_i / z0`.
//! Matrices act on column vectors, so a map `T` sends `Z` to `M Z` and the
//! dual map sends a hyperplane `W` to `M^{-T} W`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C = Complex64;

/// A point of the affine chart `z0 != 0`, or a real tangent vector there
/// written in complex components.
pub type Point2 = [C; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Point,
    Hyperplane,
}

impl Role {
    fn name(self) -> &'static str {
        match self {
            Role::Point => "point",
            Role::Hyperplane => "hyperplane",
        }
    }
}

/// A point or hyperplane of projective 2-space in homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomVec {
    coords: [C; 3],
    role: Role,
}

impl HomVec {
    pub fn new(coords: [C; 3], role: Role) -> Result<Self> {
        if coords.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { coords, role })
    }

    pub fn point(coords: [C; 3]) -> Result<Self> {
        Self::new(coords, Role::Point)
    }

    pub fn hyperplane(coords: [C; 3]) -> Result<Self> {
        Self::new(coords, Role::Hyperplane)
    }

    /// `[1 : ẑ1 : ẑ2]`.
    pub fn from_affine(z: &Point2) -> Self {
        Self {
            coords: [C::new(1.0, 0.0), z[0], z[1]],
            role: Role::Point,
        }
    }

    pub fn coords(&self) -> &[C; 3] {
        &self.coords
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Affine coordinates in the chart `z0 != 0`.
    pub fn affine(&self) -> Result<Point2> {
        let z0 = self.coords[0];
        if z0.norm() <= 1e-300 * self.norm() || z0.norm() == 0.0 {
            return Err(Error::PoleHyperplane {
                denominator: z0.norm(),
            });
        }
        Ok([self.coords[1] / z0, self.coords[2] / z0])
    }

    pub fn scaled(&self, lambda: C) -> Self {
        Self {
            coords: self.coords.map(|c| c * lambda),
            role: self.role,
        }
    }

    /// Representative with its largest-modulus coordinate equal to one.
    pub fn normalized(&self) -> Self {
        let pivot = self
            .coords
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("three coordinates");
        self.scaled(pivot.inv())
    }

    /// Proportionality test on normalized representatives, relative tolerance.
    pub fn projectively_eq(&self, other: &HomVec, tol: f64) -> bool {
        if self.role != other.role {
            return false;
        }
        let a = self.normalized();
        // Scale `other` by the same pivot index so phases line up.
        let idx = (0..3)
            .max_by(|&i, &j| self.coords[i].norm().total_cmp(&self.coords[j].norm()))
            .unwrap();
        if other.coords[idx].norm() == 0.0 {
            return false;
        }
        let b = other.scaled(other.coords[idx].inv());
        a.coords
            .iter()
            .zip(b.coords.iter())
            .all(|(x, y)| (x - y).norm() <= tol)
    }
}

/// Incidence pairing `w · z = Σ w_j z_j`.
pub fn pair(z: &HomVec, w: &HomVec) -> Result<C> {
    if z.role != Role::Point {
        return Err(Error::RoleMismatch {
            expected: "point",
            got: z.role.name(),
        });
    }
    if w.role != Role::Hyperplane {
        return Err(Error::RoleMismatch {
            expected: "hyperplane",
            got: w.role.name(),
        });
    }
    Ok(dot3(&z.coords, &w.coords))
}

pub(crate) fn dot3(a: &[C; 3], b: &[C; 3]) -> C {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bundle bidegree `(j, k)` stored as twice its value so that half-integer
/// powers such as `O(3/2, 3/2)` are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidegree {
    pub twice_j: i32,
    pub twice_k: i32,
}

impl Bidegree {
    pub const fn new(j: i32, k: i32) -> Self {
        Self {
            twice_j: 2 * j,
            twice_k: 2 * k,
        }
    }

    pub const fn from_halves(twice_j: i32, twice_k: i32) -> Self {
        Self { twice_j, twice_k }
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn k(&self) -> f64 {
        self.twice_k as f64 / 2.0
    }

    pub fn is_integral(&self) -> bool {
        self.twice_j % 2 == 0 && self.twice_k % 2 == 0
    }

    /// `λ^j · conj(λ)^k`. Half-integer exponents use the principal branch
    /// of `arg λ`, which is chart dependent unless `j - k` is an integer.
    pub fn factor(&self, lambda: C) -> C {
        if self.is_integral() {
            let j = self.twice_j / 2;
            let k = self.twice_k / 2;
            lambda.powi(j) * lambda.conj().powi(k)
        } else {
            let modulus = lambda.norm().powf(self.j() + self.k());
            C::from_polar(modulus, (self.j() - self.k()) * lambda.arg())
        }
    }

    pub fn tensor(&self, other: &Bidegree) -> Bidegree {
        Bidegree::from_halves(self.twice_j + other.twice_j, self.twice_k + other.twice_k)
    }
}

/// The value of a section at a homogeneous basepoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionValue {
    pub value: C,
    pub bidegree: Bidegree,
    pub basepoint: HomVec,
}

impl SectionValue {
    /// Re-express the value at the basepoint representative `λ Z`.
    pub fn rescaled(&self, lambda: C) -> SectionValue {
        SectionValue {
            value: self.value * self.bidegree.factor(lambda),
            bidegree: self.bidegree,
            basepoint: self.basepoint.scaled(lambda),
        }
    }
}

/// A section of `O(j,k)` known through its affine representative
/// `f(ẑ) = F(1, ẑ1, ẑ2)`.
pub trait Section: Send + Sync {
    fn bidegree(&self) -> Bidegree;

    fn eval_affine(&self, z: &Point2) -> C;

    /// `F(Z) = Z0^j conj(Z0)^k f(Z / Z0)`.
    fn eval_homogeneous(&self, z: &HomVec) -> Result<SectionValue> {
        let affine = z.affine()?;
        let z0 = z.coords()[0];
        Ok(SectionValue {
            value: self.bidegree().factor(z0) * self.eval_affine(&affine),
            bidegree: self.bidegree(),
            basepoint: *z,
        })
    }
}

impl<S: Section + ?Sized> Section for &S {
    fn bidegree(&self) -> Bidegree {
        (**self).bidegree()
    }

    fn eval_affine(&self, z: &Point2) -> C {
        (**self).eval_affine(z)
    }
}

/// Section given by a closure on the affine chart.
pub struct FnSection<F> {
    bidegree: Bidegree,
    f: F,
}

impl<F> FnSection<F>
where
    F: Fn(&Point2) -> C + Send + Sync,
{
    pub fn new(bidegree: Bidegree, f: F) -> Self {
        Self { bidegree, f }
    }
}

impl<F> Section for FnSection<F>
where
    F: Fn(&Point2) -> C + Send + Sync,
{
    fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    fn eval_affine(&self, z: &Point2) -> C {
        (self.f)(z)
    }
}

/// A projective transformation with a unit-determinant matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjMap {
    m: Matrix3<C>,
}

/// Scale an invertible matrix to unit determinant using the principal cube
/// root of its determinant.
pub fn normalize_map(m: Matrix3<C>) -> Result<ProjMap> {
    let det = m.determinant();
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-14 * scale.powi(3) || det.norm() == 0.0 {
        return Err(Error::SingularMatrix { det: det.norm() });
    }
    let root = det.cbrt();
    Ok(ProjMap { m: m / root })
}

/// The transpose-inverse map acting on hyperplanes.
pub fn dual_map(t: &ProjMap) -> ProjMap {
    t.dual()
}

impl ProjMap {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    pub fn from_matrix(m: Matrix3<C>) -> Result<Self> {
        normalize_map(m)
    }

    pub fn matrix(&self) -> &Matrix3<C> {
        &self.m
    }

    pub fn determinant(&self) -> C {
        self.m.determinant()
    }

    pub fn inverse(&self) -> ProjMap {
        // det = 1, so the inverse is again unimodular.
        ProjMap {
            m: self
                .m
                .try_inverse()
                .expect("unit determinant matrix is invertible"),
        }
    }

    pub fn dual(&self) -> ProjMap {
        ProjMap {
            m: self.inverse().m.transpose(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        ProjMap {
            m: self.m * other.m,
        }
    }

    fn mul(&self, v: &[C; 3]) -> [C; 3] {
        let m = &self.m;
        [
            m[(0, 0)] * v[0] + m[(0, 1)] * v[1] + m[(0, 2)] * v[2],
            m[(1, 0)] * v[0] + m[(1, 1)] * v[1] + m[(1, 2)] * v[2],
            m[(2, 0)] * v[0] + m[(2, 1)] * v[1] + m[(2, 2)] * v[2],
        ]
    }

    /// Apply to a point (matrix) or to a hyperplane (dual matrix).
    pub fn apply(&self, v: &HomVec) -> HomVec {
        let coords = match v.role {
            Role::Point => self.mul(&v.coords),
            Role::Hyperplane => self.dual().mul(&v.coords),
        };
        HomVec {
            coords,
            role: v.role,
        }
    }

    /// Apply the linear map to raw homogeneous coordinates.
    pub fn apply_coords(&self, v: &[C; 3]) -> [C; 3] {
        self.mul(v)
    }

    /// `M00 + Σ M0i ẑi`.
    pub fn denominator(&self, z: &Point2) -> C {
        self.m[(0, 0)] + self.m[(0, 1)] * z[0] + self.m[(0, 2)] * z[1]
    }

    pub fn apply_affine(&self, z: &Point2) -> Result<Point2> {
        let d = self.denominator(z);
        let scale = 1.0 + z[0].norm() + z[1].norm();
        if d.norm() <= 1e-12 * scale {
            return Err(Error::PoleHyperplane {
                denominator: d.norm(),
            });
        }
        let n1 = self.m[(1, 0)] + self.m[(1, 1)] * z[0] + self.m[(1, 2)] * z[1];
        let n2 = self.m[(2, 0)] + self.m[(2, 1)] * z[0] + self.m[(2, 2)] * z[1];
        Ok([n1 / d, n2 / d])
    }

    /// Push a tangent vector at `z` forward through the affine map.
    pub fn differential(&self, z: &Point2, v: &Point2) -> Point2 {
        let m = &self.m;
        let d = self.denominator(z);
        let dv = m[(0, 1)] * v[0] + m[(0, 2)] * v[1];
        let out = |row: usize| {
            let n = m[(row, 0)] + m[(row, 1)] * z[0] + m[(row, 2)] * z[1];
            let nv = m[(row, 1)] * v[0] + m[(row, 2)] * v[1];
            (nv * d - n * dv) / (d * d)
        };
        [out(1), out(2)]
    }

    /// Complex Jacobian determinant of the affine map, `det M / D^3`.
    pub fn jacobian_det(&self, z: &Point2) -> C {
        self.determinant() / self.denominator(z).powi(3)
    }
}

/// `(T* f)(ẑ) = D(ẑ)^j conj(D(ẑ))^k f(T ẑ)` with `D = M00 + Σ M0i ẑi`.
pub fn pull_back_section<S: Section + ?Sized>(
    t: &ProjMap,
    f: &S,
    z: &Point2,
) -> Result<SectionValue> {
    let image = t.apply_affine(z)?;
    let d = t.denominator(z);
    Ok(SectionValue {
        value: f.bidegree().factor(d) * f.eval_affine(&image),
        bidegree: f.bidegree(),
        basepoint: HomVec::from_affine(z),
    })
}

/// The pulled-back section `T* f` as a section in its own right.
pub struct PullBack<S> {
    map: ProjMap,
    inner: S,
}

impl<S: Section> PullBack<S> {
    pub fn new(map: ProjMap, inner: S) -> Self {
        Self { map, inner }
    }
}

impl<S: Section> Section for PullBack<S> {
    fn bidegree(&self) -> Bidegree {
        self.inner.bidegree()
    }

    fn eval_affine(&self, z: &Point2) -> C {
        match pull_back_section(&self.map, &self.inner, z) {
            Ok(v) => v.value,
            Err(_) => C::new(f64::NAN, f64::NAN),
        }
    }
}
