//! JSON documents for cone, norm, and operator specifications: the schema
//! consumed by the command-line tool and stored in example files.
//!
//! Documents are plain data, transcribed into domain types on load so that
//! all validation lives with the constructors. Fields that reference another
//! document ([`DocRef`]) hold either the inline object or a path to a JSON
//! file, resolved relative to the referencing file's directory.
//! Serialization always writes the canonical inline form, floats round-trip
//! exactly, and negated cones are normalized into their leaf representation
//! before writing.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::lattice::{lattice_avn, YoudineLattice};
use crate::norms::AsymmetricNormSpec;
use crate::numeric::{Matrix, ToleranceConfig, Vector};
use crate::operators::{
    avn_from_proper_cone, avn_from_proper_cone_with_axis, complement, mix, range_one,
    suspension_avn, AvnOperator,
};
use crate::projection::projection_avn;

/// Cone document: `kind` selects the representation, `dim` the ambient
/// dimension, and `columns`/`rows`/`direction` carry the data as plain float
/// arrays of length `dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConeSpecDoc {
    #[serde(rename = "simplicial")]
    Simplicial { dim: usize, columns: Vec<Vec<f64>> },
    #[serde(rename = "generators")]
    Generators { dim: usize, columns: Vec<Vec<f64>> },
    #[serde(rename = "halfspaces")]
    Halfspaces { dim: usize, rows: Vec<Vec<f64>> },
    #[serde(rename = "ray")]
    Ray { dim: usize, direction: Vec<f64> },
}

impl ConeSpecDoc {
    pub fn to_cone(&self) -> Result<ConeSpec> {
        match self {
            ConeSpecDoc::Simplicial { dim, columns } => {
                ConeSpec::simplicial(matrix_from_columns(*dim, columns, "simplicial cone")?)
            }
            ConeSpecDoc::Generators { dim, columns } => {
                ConeSpec::generators(matrix_from_columns(*dim, columns, "generator cone")?)
            }
            ConeSpecDoc::Halfspaces { dim, rows } => {
                ConeSpec::halfspaces(matrix_from_rows(*dim, rows, "halfspace cone")?)
            }
            ConeSpecDoc::Ray { dim, direction } => {
                if direction.len() != *dim {
                    return Err(Error::ParseError(format!(
                        "ray direction has {} entries, dim says {dim}",
                        direction.len()
                    )));
                }
                ConeSpec::ray(Vector::from_slice(direction))
            }
        }
    }

    /// Negations are pushed into the leaf representation, so the document
    /// always uses one of the four plain kinds.
    pub fn from_cone(k: &ConeSpec) -> ConeSpecDoc {
        match k.normalize_negation() {
            ConeSpec::Simplicial { generators } => ConeSpecDoc::Simplicial {
                dim: generators.rows(),
                columns: columns_of(&generators),
            },
            ConeSpec::GeneratorsPolyhedral { generators } => ConeSpecDoc::Generators {
                dim: generators.rows(),
                columns: columns_of(&generators),
            },
            ConeSpec::HalfspacePolyhedral { normals } => ConeSpecDoc::Halfspaces {
                dim: normals.cols(),
                rows: rows_of(&normals),
            },
            ConeSpec::Ray { direction } => ConeSpecDoc::Ray {
                dim: direction.dim(),
                direction: direction.as_slice().to_vec(),
            },
            ConeSpec::Negated(_) => unreachable!("normalize_negation returns a leaf"),
        }
    }
}

/// Norm document; `kind` values match the norm's own kind names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NormSpecDoc {
    #[serde(rename = "max-positive-part")]
    MaxPositivePart { dim: usize },
    #[serde(rename = "gauge")]
    Gauge { dim: usize, facets: Vec<Vec<f64>> },
    #[serde(rename = "suspension")]
    Suspension { inner: Box<NormSpecDoc> },
    #[serde(rename = "hilbert-lattice-pos")]
    HilbertLatticePos { cone: ConeSpecDoc },
}

impl NormSpecDoc {
    pub fn to_norm_spec(&self) -> Result<AsymmetricNormSpec> {
        match self {
            NormSpecDoc::MaxPositivePart { dim } => {
                Ok(AsymmetricNormSpec::MaxPositivePart { dim: *dim })
            }
            NormSpecDoc::Gauge { dim, facets } => Ok(AsymmetricNormSpec::GaugeH {
                facets: matrix_from_rows(*dim, facets, "gauge facets")?,
            }),
            NormSpecDoc::Suspension { inner } => Ok(AsymmetricNormSpec::Suspension {
                inner: Box::new(inner.to_norm_spec()?),
            }),
            NormSpecDoc::HilbertLatticePos { cone } => Ok(AsymmetricNormSpec::HilbertLatticePos {
                lattice: YoudineLattice::new(&cone.to_cone()?)?,
            }),
        }
    }

    pub fn from_norm_spec(spec: &AsymmetricNormSpec) -> NormSpecDoc {
        match spec {
            AsymmetricNormSpec::MaxPositivePart { dim } => {
                NormSpecDoc::MaxPositivePart { dim: *dim }
            }
            AsymmetricNormSpec::GaugeH { facets } => NormSpecDoc::Gauge {
                dim: facets.cols(),
                facets: rows_of(facets),
            },
            AsymmetricNormSpec::Suspension { inner } => NormSpecDoc::Suspension {
                inner: Box::new(NormSpecDoc::from_norm_spec(inner)),
            },
            AsymmetricNormSpec::HilbertLatticePos { lattice } => NormSpecDoc::HilbertLatticePos {
                cone: ConeSpecDoc::from_cone(lattice.cone()),
            },
        }
    }
}

/// Either the inline document or a path to a JSON file holding one; paths
/// resolve relative to the referencing file's directory.
#[derive(Clone, Debug, PartialEq)]
pub enum DocRef<T> {
    Path(String),
    Inline(T),
}

impl<T: Serialize> Serialize for DocRef<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DocRef::Path(p) => p.serialize(serializer),
            DocRef::Inline(t) => t.serialize(serializer),
        }
    }
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for DocRef<T> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        // Deserializing through a Value keeps the inner type's own error
        // message instead of an opaque untagged-enum failure.
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(path) => Ok(DocRef::Path(path)),
            other => T::deserialize(other)
                .map(DocRef::Inline)
                .map_err(serde::de::Error::custom),
        }
    }
}

impl<T: DeserializeOwned + Clone> DocRef<T> {
    /// The referenced document together with the directory nested references
    /// inside it resolve against.
    fn resolve(&self, base: &Path) -> Result<(T, PathBuf)> {
        match self {
            DocRef::Inline(doc) => Ok((doc.clone(), base.to_path_buf())),
            DocRef::Path(path) => {
                let full = base.join(path);
                let doc = read_doc(&full)?;
                let dir = full.parent().unwrap_or(Path::new(".")).to_path_buf();
                Ok((doc, dir))
            }
        }
    }
}

/// Operator document: `construction` selects the constructor, the remaining
/// fields carry its parameters, with cones and norms either inline or as
/// file references.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction")]
pub enum AvnSpecDoc {
    #[serde(rename = "range-one")]
    RangeOne {
        norm: DocRef<NormSpecDoc>,
        base: Vec<f64>,
    },
    #[serde(rename = "suspension")]
    Suspension { gauge: DocRef<NormSpecDoc> },
    #[serde(rename = "from-cone")]
    FromCone {
        cone: DocRef<ConeSpecDoc>,
        #[serde(skip_serializing_if = "Option::is_none")]
        axis: Option<Vec<f64>>,
    },
    #[serde(rename = "lattice")]
    Lattice { cone: DocRef<ConeSpecDoc> },
    #[serde(rename = "projection")]
    Projection { cone: DocRef<ConeSpecDoc> },
    #[serde(rename = "complement")]
    Complement { inner: Box<DocRef<AvnSpecDoc>> },
    #[serde(rename = "mix")]
    Mix { parts: Vec<MixPartDoc> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixPartDoc {
    pub weight: f64,
    pub avn: DocRef<AvnSpecDoc>,
}

impl AvnSpecDoc {
    /// Builds the operator, resolving file references against `base`.
    pub fn build(&self, base: &Path, tol: &ToleranceConfig) -> Result<AvnOperator> {
        match self {
            AvnSpecDoc::RangeOne { norm, base: point } => {
                let (doc, _) = norm.resolve(base)?;
                range_one(doc.to_norm_spec()?, &Vector::from_slice(point), tol)
            }
            AvnSpecDoc::Suspension { gauge } => {
                let (doc, _) = gauge.resolve(base)?;
                suspension_avn(doc.to_norm_spec()?, tol)
            }
            AvnSpecDoc::FromCone { cone, axis } => {
                let (doc, _) = cone.resolve(base)?;
                let k = doc.to_cone()?;
                match axis {
                    Some(u) => avn_from_proper_cone_with_axis(&k, &Vector::from_slice(u), tol),
                    None => avn_from_proper_cone(&k, tol),
                }
            }
            AvnSpecDoc::Lattice { cone } => {
                let (doc, _) = cone.resolve(base)?;
                Ok(lattice_avn(&YoudineLattice::new(&doc.to_cone()?)?))
            }
            AvnSpecDoc::Projection { cone } => {
                let (doc, _) = cone.resolve(base)?;
                projection_avn(&doc.to_cone()?, tol)
            }
            AvnSpecDoc::Complement { inner } => {
                let (doc, dir) = inner.resolve(base)?;
                let op = doc.build(&dir, tol)?;
                complement(&op, tol)
            }
            AvnSpecDoc::Mix { parts } => {
                let mut resolved = Vec::with_capacity(parts.len());
                for part in parts {
                    let (doc, dir) = part.avn.resolve(base)?;
                    resolved.push((part.weight, doc.build(&dir, tol)?));
                }
                mix(resolved, tol)
            }
        }
    }

    /// Resolves every file reference into its inline form, producing a
    /// self-contained document.
    pub fn canonicalize(&self, base: &Path) -> Result<AvnSpecDoc> {
        Ok(match self {
            AvnSpecDoc::RangeOne { norm, base: point } => AvnSpecDoc::RangeOne {
                norm: inline(norm, base)?,
                base: point.clone(),
            },
            AvnSpecDoc::Suspension { gauge } => AvnSpecDoc::Suspension {
                gauge: inline(gauge, base)?,
            },
            AvnSpecDoc::FromCone { cone, axis } => AvnSpecDoc::FromCone {
                cone: inline(cone, base)?,
                axis: axis.clone(),
            },
            AvnSpecDoc::Lattice { cone } => AvnSpecDoc::Lattice {
                cone: inline(cone, base)?,
            },
            AvnSpecDoc::Projection { cone } => AvnSpecDoc::Projection {
                cone: inline(cone, base)?,
            },
            AvnSpecDoc::Complement { inner } => {
                let (doc, dir) = inner.resolve(base)?;
                AvnSpecDoc::Complement {
                    inner: Box::new(DocRef::Inline(doc.canonicalize(&dir)?)),
                }
            }
            AvnSpecDoc::Mix { parts } => {
                let mut out = Vec::with_capacity(parts.len());
                for part in parts {
                    let (doc, dir) = part.avn.resolve(base)?;
                    out.push(MixPartDoc {
                        weight: part.weight,
                        avn: DocRef::Inline(doc.canonicalize(&dir)?),
                    });
                }
                AvnSpecDoc::Mix { parts: out }
            }
        })
    }
}

fn inline<T: DeserializeOwned + Clone>(r: &DocRef<T>, base: &Path) -> Result<DocRef<T>> {
    let (doc, _) = r.resolve(base)?;
    Ok(DocRef::Inline(doc))
}

pub fn load_cone(path: &Path) -> Result<ConeSpec> {
    read_doc::<ConeSpecDoc>(path)?.to_cone()
}

pub fn parse_cone(text: &str) -> Result<ConeSpec> {
    let doc: ConeSpecDoc =
        serde_json::from_str(text).map_err(|e| Error::ParseError(format!("cone spec: {e}")))?;
    doc.to_cone()
}

pub fn cone_to_json(k: &ConeSpec) -> String {
    serde_json::to_string_pretty(&ConeSpecDoc::from_cone(k)).expect("plain data serializes")
}

pub fn load_avn(path: &Path, tol: &ToleranceConfig) -> Result<AvnOperator> {
    let doc: AvnSpecDoc = read_doc(path)?;
    doc.build(base_dir(path), tol)
}

/// The document itself, for callers that re-serialize rather than build.
pub fn load_avn_doc(path: &Path) -> Result<AvnSpecDoc> {
    read_doc(path)
}

pub fn base_dir(path: &Path) -> &Path {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

fn columns_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.column_iter().map(Vector::into_inner).collect()
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).as_slice().to_vec()).collect()
}

fn matrix_from_columns(dim: usize, columns: &[Vec<f64>], what: &str) -> Result<Matrix> {
    let vectors = check_lengths(dim, columns, what)?;
    Matrix::from_columns(&vectors)
}

fn matrix_from_rows(dim: usize, rows: &[Vec<f64>], what: &str) -> Result<Matrix> {
    let vectors = check_lengths(dim, rows, what)?;
    Matrix::from_rows(&vectors)
}

fn check_lengths(dim: usize, arrays: &[Vec<f64>], what: &str) -> Result<Vec<Vector>> {
    if arrays.is_empty() {
        return Err(Error::ParseError(format!("{what}: empty array")));
    }
    arrays
        .iter()
        .map(|a| {
            if a.len() == dim {
                Ok(Vector::from_slice(a))
            } else {
                Err(Error::ParseError(format!(
                    "{what}: entry has {} components, dim says {dim}",
                    a.len()
                )))
            }
        })
        .collect()
}
