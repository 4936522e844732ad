//! TOML manifold spec files: import into a [`ChartManifold`] and export
//! from one.
//!
//! ```toml
//! name = "flat"
//! dimension = 3
//! coordinates = ["x", "y", "z"]
//! tolerance = 1e-9            # optional
//!
//! [sampling]                  # optional, default [-1, 1] per axis
//! lo = [-1.0, -1.0, -1.0]
//! hi = [1.0, 1.0, 1.0]
//! grid = 3                    # or one count per axis
//!
//! [metric]                    # lower triangle suffices; omitted entries are 0
//! "x,x" = "1"
//! "y,y" = "1"
//! "z,z" = "1"
//!
//! [phi]                       # φ^row_col
//! "y,x" = "1"
//! "x,y" = "-1"
//!
//! [xi]
//! z = "1"
//!
//! [difference_tensor]         # K^i_jk, or [connection] for Γ^i_jk
//! "x,x,x" = "-0.5"
//! ```
//!
//! Indices may be coordinate names or zero-based integers. Entries of the
//! metric and of the lower pair of `K` / Γ are mirrored unless both are
//! given. `[eta]` is optional; when absent η is derived as `g(ξ, ·)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::almost_contact::AlmostContactData;
use crate::error::{Error, Result};
use crate::manifold::{ChartManifold, SamplingBox, EXACT_TOL};
use crate::metric_geometry::MetricField;
use crate::statistical::{difference_from_connection, DifferenceTensorField};
use crate::tensor_core::{coordinates, Coordinates, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprText {
    Number(f64),
    Text(String),
}

impl ExprText {
    fn text(&self) -> String {
        match self {
            ExprText::Number(v) => format!("{v:?}"),
            ExprText::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

type Table = BTreeMap<String, ExprText>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSpec>,
    #[serde(default)]
    pub metric: Table,
    #[serde(default)]
    pub phi: Table,
    #[serde(default)]
    pub xi: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difference_tensor: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Table>,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

/// Resolves `"x,y"` or `"0,1"` into indices.
fn parse_key(key: &str, names: &[String], arity: usize) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != arity {
        return Err(spec_err(format!("key {key:?} needs {arity} indices")));
    }
    parts
        .iter()
        .map(|p| {
            if let Some(i) = names.iter().position(|n| n == p) {
                Ok(i)
            } else if let Ok(i) = p.parse::<usize>() {
                if i < names.len() {
                    Ok(i)
                } else {
                    Err(spec_err(format!(
                        "index {i} in key {key:?} is out of range"
                    )))
                }
            } else {
                Err(spec_err(format!("unknown coordinate {p:?} in key {key:?}")))
            }
        })
        .collect()
}

/// Dense component array from a sparse table; `mirror` gives the index
/// tuple that receives a copy when it is not set explicitly.
fn dense(
    table: &Table,
    names: &[String],
    arity: usize,
    mirror: impl Fn(&[usize]) -> Vec<usize>,
    section: &str,
) -> Result<Vec<String>> {
    let d = names.len();
    let flat = |ix: &[usize]| ix.iter().fold(0, |acc, &i| acc * d + i);
    let mut out: Vec<Option<String>> = vec![None; d.pow(arity as u32)];
    let mut explicit = vec![false; out.len()];
    for (key, v) in table {
        let ix = parse_key(key, names, arity).map_err(|e| spec_err(format!("[{section}] {e}")))?;
        let at = flat(&ix);
        if explicit[at] {
            return Err(spec_err(format!("[{section}] entry {key:?} given twice")));
        }
        explicit[at] = true;
        out[at] = Some(v.text());
    }
    for (key, v) in table {
        let ix = parse_key(key, names, arity)?;
        let m = flat(&mirror(&ix));
        if !explicit[m] {
            out[m] = Some(v.text());
        }
    }
    Ok(out
        .into_iter()
        .map(|s| s.unwrap_or_else(|| "0".into()))
        .collect())
}

fn fields(texts: &[String], coords: &Coordinates) -> Result<Vec<ScalarField>> {
    texts
        .iter()
        .map(|t| ScalarField::parse(t, coords).map_err(Error::from))
        .collect()
}

impl SpecFile {
    pub fn from_toml(text: &str) -> Result<SpecFile> {
        toml::from_str(text).map_err(|e| spec_err(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| spec_err(e.to_string()))
    }

    pub fn to_manifold(&self) -> Result<ChartManifold> {
        let d = self.dimension;
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::UnsupportedDimension(d));
        }
        if self.coordinates.len() != d {
            return Err(spec_err(format!(
                "dimension {d} but {} coordinates",
                self.coordinates.len()
            )));
        }
        let names = &self.coordinates;
        let coords = coordinates(names);
        if coords.len() != d {
            return Err(spec_err("coordinate names must be distinct"));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(spec_err("tolerance must be positive"));
            }
        }
        let swap2 = |ix: &[usize]| vec![ix[1], ix[0]];
        let same = |ix: &[usize]| ix.to_vec();
        let lower = |ix: &[usize]| vec![ix[0], ix[2], ix[1]];

        let metric = MetricField::new(
            d,
            fields(&dense(&self.metric, names, 2, swap2, "metric")?, &coords)?,
        )?;
        let phi = fields(&dense(&self.phi, names, 2, same, "phi")?, &coords)?;
        let vector = |t: &Table, section: &str| -> Result<Vec<ScalarField>> {
            fields(&dense(t, names, 1, same, section)?, &coords)
        };
        let xi = vector(&self.xi, "xi")?;
        let eta = self.eta.as_ref().map(|t| vector(t, "eta")).transpose()?;

        let sampling = match &self.sampling {
            None => SamplingBox::symmetric(d, 1.0),
            Some(s) => {
                if s.lo.len() != d || s.hi.len() != d {
                    return Err(spec_err(
                        "sampling lo/hi must have one entry per coordinate",
                    ));
                }
                if s.lo
                    .iter()
                    .zip(&s.hi)
                    .any(|(a, b)| a > b || !a.is_finite() || !b.is_finite())
                {
                    return Err(spec_err("sampling needs finite lo ≤ hi"));
                }
                let counts = match &s.grid {
                    None => None,
                    Some(GridSpec::Uniform(c)) => Some(vec![*c; d]),
                    Some(GridSpec::PerAxis(c)) if c.len() == d => Some(c.clone()),
                    Some(GridSpec::PerAxis(_)) => {
                        return Err(spec_err("sampling grid must have one count per coordinate"))
                    }
                };
                if counts.as_ref().is_some_and(|c| c.contains(&0)) {
                    return Err(spec_err("grid counts must be positive"));
                }
                SamplingBox {
                    lo: s.lo.clone(),
                    hi: s.hi.clone(),
                    counts,
                }
            }
        };
        let k = match (&self.difference_tensor, &self.connection) {
            (Some(t), None) => DifferenceTensorField::Components(fields(
                &dense(t, names, 3, lower, "difference_tensor")?,
                &coords,
            )?),
            (None, Some(t)) => {
                let gamma = fields(&dense(t, names, 3, lower, "connection")?, &coords)?;
                difference_from_connection(gamma, &metric, &sampling.grid(None))?
            }
            _ => {
                return Err(spec_err(
                    "exactly one of [difference_tensor] or [connection] is required",
                ))
            }
        };
        let m = ChartManifold {
            name: self.name.clone().unwrap_or_else(|| "spec".into()),
            coords,
            sampling,
            metric,
            structure: AlmostContactData { phi, xi, eta },
            k,
            tolerance: self.tolerance.unwrap_or(EXACT_TOL),
        };
        m.check_shape()?;
        Ok(m)
    }

    /// Spec for an existing chart; only nonzero entries are written.
    pub fn from_manifold(m: &ChartManifold) -> Result<SpecFile> {
        let d = m.dim();
        let names = &m.coords;
        let key = |ix: &[usize]| {
            ix.iter()
                .map(|&i| names[i].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        let put = |t: &mut Table, ix: &[usize], f: &ScalarField| {
            if !f.expr().is_zero() {
                t.insert(key(ix), ExprText::Text(f.to_string()));
            }
        };
        let mut metric = Table::new();
        for i in 0..d {
            for j in 0..d {
                let f = m.metric.component(i, j);
                // upper entries only when they differ from their mirror
                if j <= i || !f.same_as(m.metric.component(j, i)) {
                    put(&mut metric, &[i, j], f);
                }
            }
        }
        let mut phi = Table::new();
        for i in 0..d {
            for j in 0..d {
                put(&mut phi, &[i, j], &m.structure.phi[i * d + j]);
            }
        }
        let vector = |v: &[ScalarField]| {
            let mut t = Table::new();
            for (i, f) in v.iter().enumerate() {
                put(&mut t, &[i], f);
            }
            t
        };
        let mut k3 = Table::new();
        let comps = m.k.fields();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let f = &comps[(i * d + j) * d + k];
                    if j <= k || !f.same_as(&comps[(i * d + k) * d + j]) {
                        put(&mut k3, &[i, j, k], f);
                    }
                }
            }
        }
        let (difference_tensor, connection) = match &m.k {
            DifferenceTensorField::Components(_) => (Some(k3), None),
            DifferenceTensorField::Connection(_) => (None, Some(k3)),
            DifferenceTensorField::CubicForm(_) => {
                return Err(spec_err(
                    "cubic-form charts have no spec-file representation",
                ))
            }
        };
        Ok(SpecFile {
            name: Some(m.name.clone()),
            dimension: d,
            coordinates: names.to_vec(),
            tolerance: Some(m.tolerance),
            sampling: Some(SamplingSpec {
                lo: m.sampling.lo.clone(),
                hi: m.sampling.hi.clone(),
                grid: m.sampling.counts.clone().map(GridSpec::PerAxis),
            }),
            metric,
            phi,
            xi: vector(&m.structure.xi),
            eta: m.structure.eta.as_deref().map(vector),
            difference_tensor,
            connection,
        })
    }
}

pub fn load_spec(text: &str) -> Result<ChartManifold> {
    SpecFile::from_toml(text)?.to_manifold()
}

pub fn export_spec(m: &ChartManifold) -> Result<String> {
    SpecFile::from_manifold(m)?.to_toml()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{ParseError, Point};
    use crate::zoo;

    const R3: &str = r#"
name = "r3"
dimension = 3
coordinates = ["x", "y", "z"]

[metric]
"x,x" = 1
"y,y" = "1"
"z,z" = "1"

[phi]
"y,x" = "1"
"x,y" = "-1"

[xi]
z = "1"

[connection]
"x,x,x" = "-0.5"
"y,x,x" = "0.5"
"x,x,y" = "0.5"
"y,x,y" = "0.5"
"x,y,y" = "0.5"
"y,y,y" = "-0.5"
"#;

    #[test]
    fn imports_connection_table() {
        let m = load_spec(R3).unwrap();
        let z = zoo::example_r3_negative().manifold;
        let p = Point::from(&[0.3, 0.2, 0.1][..]);
        assert_eq!(m.frame_at(&p).unwrap().k, z.frame_at(&p).unwrap().k);
        assert_eq!(m.sample_points(None).len(), 27);
        assert_eq!(m.tolerance, EXACT_TOL);
    }

    #[test]
    fn rejects_bad_specs() {
        let both = format!("{R3}\n[difference_tensor]\n\"x,x,x\" = \"1\"\n");
        assert!(matches!(load_spec(&both), Err(Error::Spec(_))));
        let neither = R3.split("[connection]").next().unwrap();
        assert!(matches!(load_spec(neither), Err(Error::Spec(_))));
        let even = R3.replace("dimension = 3", "dimension = 4");
        assert!(matches!(
            load_spec(&even),
            Err(Error::UnsupportedDimension(4))
        ));
        let unknown = R3.replace("\"z,z\" = \"1\"", "\"z,z\" = \"1 + w\"");
        assert!(matches!(
            load_spec(&unknown),
            Err(Error::Parse(ParseError::UnknownIdentifier { .. }))
        ));
        let syntax = R3.replace("\"z,z\" = \"1\"", "\"z,z\" = \"x +\"");
        assert!(matches!(
            load_spec(&syntax),
            Err(Error::Parse(ParseError::Syntax { position: 3, .. }))
        ));
        let badkey = R3.replace("\"y,y\" = \"1\"", "\"y,q\" = \"1\"");
        assert!(matches!(load_spec(&badkey), Err(Error::Spec(_))));
        let torsion = R3.replace(
            "\"x,x,y\" = \"0.5\"",
            "\"x,x,y\" = \"0.5\"\n\"x,y,x\" = \"0.7\"",
        );
        assert!(matches!(
            load_spec(&torsion),
            Err(Error::TorsionPresent { .. })
        ));
        assert!(matches!(
            load_spec("dimension = 3\nbogus = 1"),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn zoo_round_trip() {
        let entries = [
            zoo::example_flat_acs(2).unwrap(),
            zoo::example_r3_negative(),
            zoo::example_sphere_product(0.7),
            zoo::example_twisted_frame(),
            zoo::generate_random_acs(5, 4, zoo::Family::PlanarBlock).unwrap(),
        ];
        for e in entries {
            let text = export_spec(&e.manifold).unwrap();
            let m = load_spec(&text).unwrap();
            assert_eq!(m.dim(), e.manifold.dim());
            assert_eq!(m.sample_points(None), e.manifold.sample_points(None));
            for p in e.manifold.sample_points(Some(2)) {
                let a = e.manifold.frame_at(&p).unwrap();
                let b = m.frame_at(&p).unwrap();
                assert_eq!(a.g, b.g, "{}", e.name);
                assert_eq!(a.k, b.k, "{}", e.name);
                assert_eq!(a.phi, b.phi, "{}", e.name);
                assert_eq!(a.dk, b.dk, "{}", e.name);
            }
        }
    }

    #[test]
    fn per_axis_grid_and_eta() {
        let text = R3.replace(
            "[metric]",
            "[sampling]\nlo = [0.0, 0.0, 0.0]\nhi = [1.0, 2.0, 3.0]\ngrid = [2, 1, 3]\n\n[eta]\nz = 1\n\n[metric]",
        );
        let m = load_spec(&text).unwrap();
        assert_eq!(m.sample_points(None).len(), 6);
        assert!(m.structure.eta.is_some());
        let back = load_spec(&export_spec(&m).unwrap()).unwrap();
        assert_eq!(back.sample_points(None), m.sample_points(None));
        assert!(back.structure.eta.is_some());
    }
}
