//! Seeded random data for invariance checks.

use nalgebra::Matrix3;
use rand::Rng;

use crate::projective::{normalize_map, HomVec, ProjMap, C};

/// Complex number with real and imaginary parts uniform in `[-scale, scale]`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> C {
    C::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

pub fn random_vec3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> [C; 3] {
    [0; 3].map(|_| random_complex(rng, scale))
}

/// `I + scale * A` with random `A`, normalized to unit determinant.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> ProjMap {
    loop {
        let m = Matrix3::from_fn(|i, j| {
            let id = if i == j {
                C::new(1.0, 0.0)
            } else {
                C::new(0.0, 0.0)
            };
            id + random_complex(rng, scale)
        });
        if m.determinant().norm() > 1e-3 {
            if let Ok(t) = normalize_map(m) {
                return t;
            }
        }
    }
}

/// Fully random map, not close to the identity.
pub fn random_generic_map<R: Rng + ?Sized>(rng: &mut R) -> ProjMap {
    loop {
        let m = Matrix3::from_fn(|_, _| random_complex(rng, 1.0));
        if m.determinant().norm() > 0.1 {
            if let Ok(t) = normalize_map(m) {
                return t;
            }
        }
    }
}

pub fn cross(a: &[C; 3], b: &[C; 3]) -> [C; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Random incident pair `(z, w)` with `w = z × a`.
pub fn random_incident_pair<R: Rng + ?Sized>(rng: &mut R) -> (HomVec, HomVec) {
    loop {
        let z = random_vec3(rng, 1.0);
        let a = random_vec3(rng, 1.0);
        let w = cross(&z, &a);
        if let (Ok(zp), Ok(wh)) = (HomVec::point(z), HomVec::hyperplane(w)) {
            if zp.norm() > 0.2 && wh.norm() > 0.2 {
                return (zp, wh);
            }
        }
    }
}

/// Three random vectors tangent to the incidence locus at `(z, w)`.
pub fn random_incident_frame<R: Rng + ?Sized>(
    rng: &mut R,
    z: &HomVec,
    w: &HomVec,
) -> [crate::kernels::IncidenceVector; 3] {
    let (zc, wc) = (z.coords(), w.coords());
    let n2: f64 = zc.iter().map(|c| c.norm_sqr()).sum();
    [0; 3].map(|_| {
        let dz = random_vec3(rng, 1.0);
        let mut dw = random_vec3(rng, 1.0);
        let defect = crate::projective::dot3(&dw, zc) + crate::projective::dot3(wc, &dz);
        for (d, zi) in dw.iter_mut().zip(zc) {
            *d -= defect / n2 * zi.conj();
        }
        crate::kernels::IncidenceVector { dz, dw }
    })
}
