//! JSON wire formats for forms, subspaces, polynomial forms and vector fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{AlternatingForm, IndexTuple, Subspace, Vector, MAX_DIMENSION};
use crate::poly::{Poly, PolyForm, PolyVectorField};
use crate::rational::{fmt_q, parse_q, Q};

/// Exact scalar on the wire: `"p/q"` text or a plain JSON integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Int(i64),
}

impl Scalar {
    pub fn from_q(x: &Q) -> Self {
        Scalar::Text(fmt_q(x))
    }

    pub fn to_q(&self) -> Result<Q> {
        match self {
            Scalar::Text(s) => parse_q(s),
            Scalar::Int(n) => Ok(crate::rational::q(*n)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub dimension: usize,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceJson {
    pub ambient: usize,
    pub dual: bool,
    pub vectors: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub exponents: Vec<u32>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub monomials: Vec<MonomialJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermJson {
    pub indices: Vec<usize>,
    pub monomials: Vec<MonomialJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFormJson {
    pub dimension: usize,
    pub degree: usize,
    pub terms: Vec<PolyTermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFieldJson {
    pub dimension: usize,
    pub components: Vec<PolyJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionJson {
    pub dimension: usize,
    pub fields: Vec<VectorFieldJson>,
}

fn check_ambient(d: usize) -> Result<()> {
    if d > MAX_DIMENSION {
        return Err(Error::TooManyDimensions(d));
    }
    Ok(())
}

/// Strictly increasing, 1-based, within `1..=d`.
fn tuple(indices: &[usize], degree: usize, d: usize) -> Result<IndexTuple> {
    if indices.len() != degree {
        return Err(Error::DegreeOutOfRange {
            degree: indices.len(),
            reason: format!("term {indices:?} in a form of degree {degree}"),
        });
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!("indices {indices:?} are not strictly increasing")));
    }
    IndexTuple::from_indices(indices, d)
}

pub fn form_to_json(form: &AlternatingForm) -> FormJson {
    FormJson {
        dimension: form.dimension(),
        degree: form.degree(),
        terms: form
            .terms()
            .map(|(t, c)| TermJson {
                indices: t.indices(),
                coeff: Scalar::from_q(c),
            })
            .collect(),
    }
}

pub fn form_from_json(j: &FormJson) -> Result<AlternatingForm> {
    check_ambient(j.dimension)?;
    if j.degree > j.dimension {
        return Err(Error::DegreeOutOfRange {
            degree: j.degree,
            reason: format!("exceeds dimension {}", j.dimension),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        let key = tuple(&t.indices, j.degree, j.dimension)?;
        if !seen.insert(key) {
            return Err(Error::Parse(format!("duplicate term {:?}", t.indices)));
        }
        terms.push((t.indices.clone(), t.coeff.to_q()?));
    }
    AlternatingForm::from_terms(j.dimension, j.degree, terms)
}

pub fn subspace_to_json(s: &Subspace) -> SubspaceJson {
    SubspaceJson {
        ambient: s.ambient(),
        dual: s.is_dual(),
        vectors: s.basis().iter().map(|r| r.iter().map(Scalar::from_q).collect()).collect(),
    }
}

/// Subspace file whose rows are exactly the given vectors (not row-reduced).
pub fn vectors_to_json(ambient: usize, vectors: &[Vector]) -> SubspaceJson {
    SubspaceJson {
        ambient,
        dual: false,
        vectors: vectors.iter().map(|v| v.coords.iter().map(Scalar::from_q).collect()).collect(),
    }
}

pub fn subspace_from_json(j: &SubspaceJson) -> Result<Subspace> {
    check_ambient(j.ambient)?;
    let rows = subspace_rows(j)?;
    Subspace::new(j.ambient, j.dual, &rows)
}

/// Rows as given in the file, in order.
pub fn subspace_rows(j: &SubspaceJson) -> Result<Vec<Vec<Q>>> {
    j.vectors
        .iter()
        .map(|v| {
            if v.len() != j.ambient {
                return Err(Error::DimensionMismatch {
                    expected: j.ambient,
                    found: v.len(),
                });
            }
            v.iter().map(Scalar::to_q).collect()
        })
        .collect()
}

fn poly_to_monomials(p: &Poly) -> Vec<MonomialJson> {
    p.terms()
        .map(|(e, c)| MonomialJson {
            exponents: e.clone(),
            coeff: Scalar::from_q(c),
        })
        .collect()
}

fn poly_from_monomials(d: usize, ms: &[MonomialJson]) -> Result<Poly> {
    Poly::from_terms(
        d,
        ms.iter()
            .map(|m| Ok((m.exponents.clone(), m.coeff.to_q()?)))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn polyform_to_json(f: &PolyForm) -> PolyFormJson {
    PolyFormJson {
        dimension: f.dimension(),
        degree: f.degree(),
        terms: f
            .terms()
            .map(|(t, p)| PolyTermJson {
                indices: t.indices(),
                monomials: poly_to_monomials(p),
            })
            .collect(),
    }
}

pub fn polyform_from_json(j: &PolyFormJson) -> Result<PolyForm> {
    check_ambient(j.dimension)?;
    let mut f = PolyForm::zero(j.dimension, j.degree);
    for t in &j.terms {
        let key = tuple(&t.indices, j.degree, j.dimension)?;
        f.add_term(key, poly_from_monomials(j.dimension, &t.monomials)?);
    }
    Ok(f)
}

pub fn vector_field_to_json(v: &PolyVectorField) -> VectorFieldJson {
    VectorFieldJson {
        dimension: v.dimension(),
        components: v
            .components()
            .iter()
            .map(|p| PolyJson {
                monomials: poly_to_monomials(p),
            })
            .collect(),
    }
}

pub fn vector_field_from_json(j: &VectorFieldJson) -> Result<PolyVectorField> {
    check_ambient(j.dimension)?;
    if j.components.len() != j.dimension {
        return Err(Error::DimensionMismatch {
            expected: j.dimension,
            found: j.components.len(),
        });
    }
    PolyVectorField::new(
        j.components
            .iter()
            .map(|c| poly_from_monomials(j.dimension, &c.monomials))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn distribution_from_json(j: &DistributionJson) -> Result<Vec<PolyVectorField>> {
    j.fields
        .iter()
        .map(|f| {
            if f.dimension != j.dimension {
                return Err(Error::DimensionMismatch {
                    expected: j.dimension,
                    found: f.dimension,
                });
            }
            vector_field_from_json(f)
        })
        .collect()
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((value, bytes))
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_pretty(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::{q, qf};

    #[test]
    fn form_round_trip() {
        let e = catalog::example_r11().unwrap();
        let j = form_to_json(&e.form);
        let text = serde_json::to_string(&j).unwrap();
        let back = form_from_json(&parse_json(&text).unwrap()).unwrap();
        assert_eq!(back, e.form);
    }

    #[test]
    fn form_parsing_rules() {
        let ok = r#"{"dimension": 3, "degree": 2, "terms": [{"indices": [1, 3], "coeff": "-2/4"}, {"indices": [2,3], "coeff": 5}]}"#;
        let f = form_from_json(&parse_json(ok).unwrap()).unwrap();
        assert_eq!(f.coeff(IndexTuple::from_indices(&[1, 3], 3).unwrap()), qf(-1, 2));
        assert_eq!(f.coeff(IndexTuple::from_indices(&[2, 3], 3).unwrap()), q(5));

        let unsorted = r#"{"dimension": 3, "degree": 2, "terms": [{"indices": [3, 1], "coeff": "1"}]}"#;
        assert_eq!(form_from_json(&parse_json(unsorted).unwrap()).unwrap_err().kind(), "parse");
        let out_of_range = r#"{"dimension": 3, "degree": 2, "terms": [{"indices": [1, 4], "coeff": "1"}]}"#;
        assert_eq!(form_from_json(&parse_json(out_of_range).unwrap()).unwrap_err().kind(), "invalid_index");
        let bad_coeff = r#"{"dimension": 3, "degree": 1, "terms": [{"indices": [1], "coeff": "1/0"}]}"#;
        assert!(form_from_json(&parse_json(bad_coeff).unwrap()).is_err());
        assert!(parse_json::<FormJson>("{not json").is_err());
    }

    #[test]
    fn subspace_round_trip() {
        let s = Subspace::new(3, true, &[vec![q(1), q(2), qf(1, 3)], vec![q(0), q(1), q(1)]]).unwrap();
        let j = subspace_to_json(&s);
        assert_eq!(subspace_from_json(&j).unwrap(), s);
        let bad = SubspaceJson {
            ambient: 3,
            dual: false,
            vectors: vec![vec![Scalar::Int(1)]],
        };
        assert_eq!(subspace_from_json(&bad).unwrap_err().kind(), "dimension_mismatch");
    }

    #[test]
    fn polyform_round_trip() {
        let d = 3;
        let p = Poly::var(d, 0).mul(&Poly::var(d, 2)).add(&Poly::constant(d, qf(3, 7)));
        let f = PolyForm::monomial(d, &[1, 3], p.clone()).unwrap();
        let back = polyform_from_json(&polyform_to_json(&f)).unwrap();
        assert_eq!(back, f);
        let v = PolyVectorField::new(vec![p.clone(), Poly::zero(d), p]).unwrap();
        assert_eq!(vector_field_from_json(&vector_field_to_json(&v)).unwrap(), v);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        write_json(&path, &form_to_json(&AlternatingForm::zero(2, 1))).unwrap();
        let (j, _) = read_json::<FormJson>(&path).unwrap();
        assert_eq!(j.dimension, 2);
    }
}
