//! JSON domain descriptions.

use serde::{Deserialize, Serialize};

use crate::chart::ChartKind;
use crate::domain::{Combine, Hypersurface, PwsDomain};
use crate::error::{Error, Result};
use crate::poly::parse_poly;
use crate::projective::C;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceSpec {
    pub label: String,
    pub rho: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceSpec {
    pub hypersurface: String,
    pub chart: ChartKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub members: Vec<String>,
    pub chart: ChartKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub hypersurfaces: Vec<HypersurfaceSpec>,
    #[serde(default)]
    pub faces: Vec<FaceSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    /// Points as `[[re, im], [re, im]]`.
    #[serde(default)]
    pub interior_points: Vec<[[f64; 2]; 2]>,
    #[serde(default)]
    pub combine: Combine,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<PwsDomain> {
        let hyps = self
            .hypersurfaces
            .iter()
            .map(|h| {
                let rho = parse_poly(&h.rho).map_err(|e| match e {
                    Error::Parse { .. } | Error::NotHermitian { .. } => e,
                    other => Error::Spec(format!("hypersurface `{}`: {other}", h.label)),
                })?;
                Ok(Hypersurface {
                    label: h.label.clone(),
                    rho,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let index = |label: &str| {
            hyps.iter()
                .position(|h| h.label == label)
                .ok_or_else(|| Error::Spec(format!("unknown hypersurface label `{label}`")))
        };
        let faces = self
            .faces
            .iter()
            .map(|f| Ok((index(&f.hypersurface)?, f.chart.clone())))
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let members = e
                    .members
                    .iter()
                    .map(|m| index(m))
                    .collect::<Result<Vec<_>>>()?;
                Ok((members, e.chart.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let points = self
            .interior_points
            .iter()
            .map(|p| [C::new(p[0][0], p[0][1]), C::new(p[1][0], p[1][1])])
            .collect();
        PwsDomain::new(hyps, faces, edges, points, self.combine)
    }

    pub fn from_domain(d: &PwsDomain) -> Self {
        let label = |i: usize| d.hypersurfaces[i].label.clone();
        Self {
            hypersurfaces: d
                .hypersurfaces
                .iter()
                .map(|h| HypersurfaceSpec {
                    label: h.label.clone(),
                    rho: h.rho.poly().to_string(),
                })
                .collect(),
            faces: d
                .faces
                .iter()
                .map(|f| FaceSpec {
                    hypersurface: label(f.hypersurface),
                    chart: f.chart.kind().clone(),
                })
                .collect(),
            edges: d
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    members: e.members.iter().map(|&m| label(m)).collect(),
                    chart: e.chart.kind().clone(),
                })
                .collect(),
            interior_points: d
                .interior_points
                .iter()
                .map(|p| [[p[0].re, p[0].im], [p[1].re, p[1].im]])
                .collect(),
            combine: d.combine,
        }
    }

    /// Polynomials rewritten in canonical form.
    pub fn canonical(&self) -> Result<Self> {
        let mut out = self.clone();
        for h in &mut out.hypersurfaces {
            h.rho = parse_poly(&h.rho)?.poly().to_string();
        }
        Ok(out)
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        let c = self.canonical()?;
        serde_json::to_string_pretty(&c).map_err(|e| Error::Spec(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_json_round_trips() {
        for d in [
            fixtures::perturbed_bidisk(0.1),
            fixtures::sphere(),
            fixtures::kappa_negative(),
        ] {
            let text = DomainSpec::from_domain(&d).to_canonical_json().unwrap();
            let again = DomainSpec::from_json(&text)
                .unwrap()
                .to_canonical_json()
                .unwrap();
            assert_eq!(text, again);
            let built = DomainSpec::from_json(&text).unwrap().build().unwrap();
            assert_eq!(built.hypersurfaces.len(), d.hypersurfaces.len());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let dup = r#"{"hypersurfaces": [{"label": "A", "rho": "abs2(z1) - 1"}, {"label": "A", "rho": "abs2(z2) - 1"}]}"#;
        assert!(matches!(
            DomainSpec::from_json(dup).unwrap().build(),
            Err(Error::Spec(_))
        ));
        let nh = r#"{"hypersurfaces": [{"label": "A", "rho": "z1 - 1"}]}"#;
        assert!(matches!(
            DomainSpec::from_json(nh).unwrap().build(),
            Err(Error::NotHermitian { .. })
        ));
        let unknown = r#"{"hypersurfaces": [], "faces": [{"hypersurface": "B", "chart": {"name": "sphere_polar", "radius": 1.0}}]}"#;
        assert!(DomainSpec::from_json(unknown).unwrap().build().is_err());
        assert!(DomainSpec::from_json(r#"{"hypersurfaces": [], "extra": 1}"#).is_err());
    }
}
