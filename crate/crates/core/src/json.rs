//! JSON encodings of matrices, complexes, representations and train tracks.
//!
//! ```text
//! Matrix          {"rows": r, "cols": c, "entries": [["p/q", ..], ..]}
//! ChainComplex    {"dims": [..], "boundaries": [Matrix, ..], "chain_bases": [Matrix | null, ..]}
//! HomologyBasis   {"bases": [Matrix | null, ..]}
//! Symplectic      ChainComplex plus "pairings": [Matrix, ..]
//! Representation  {"genus": g, "family": "sp", "n": 2, "field": "rational",
//!                  "generators": {"a1": Matrix, ..}}
//! TrainTrack      {"edges": ["e1", ..], "switches": [["left", "right"] | ["left", "right", "in"], ..]}
//! Cocycle         {"weights": {"e1": "1/2", ..}} or the bare weight object
//! ```
//!
//! Rationals are strings `"p/q"`, quadratic elements `"a/b+c/e√d"`, floats JSON numbers.

use serde_json::{json, Map, Value};

use crate::chain::{ChainComplex, HomologyBasis};
use crate::error::{Error, Result};
use crate::field::{Approx, FieldKind, ParseScalar, Quad, Rational, Scalar};
use crate::lie::{Family, LieAlgebraSpec};
use crate::matrix::Matrix;
use crate::pairings::{Cocycle, Switch, TrainTrack};
use crate::surface::{generator_name, SurfacePresentation, SurfaceRepresentation};
use crate::symplectic::SymplecticChainComplex;

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json<F: Scalar>(m: &Matrix<F>) -> Value {
    let entries: Vec<Value> =
        (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(Scalar::to_json).collect())).collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

pub fn matrix_from_json<F: ParseScalar>(v: &Value, kind: FieldKind) -> Result<Matrix<F>> {
    let rows = as_usize(field(v, "rows")?, "rows")?;
    let cols = as_usize(field(v, "cols")?, "cols")?;
    let entries = as_array(field(v, "entries")?, "entries")?;
    if entries.len() != rows {
        return Err(Error::Parse(format!("declared {rows} rows, found {}", entries.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in entries.iter().enumerate() {
        let row = as_array(row, "matrix row")?;
        if row.len() != cols {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
        for x in row {
            data.push(F::from_json(x, kind)?);
        }
    }
    Matrix::new(rows, cols, data)
}

fn optional_matrices<F: ParseScalar>(v: Option<&Value>, kind: FieldKind, what: &str) -> Result<Vec<Option<Matrix<F>>>> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(v) => as_array(v, what)?
            .iter()
            .map(|m| if m.is_null() { Ok(None) } else { matrix_from_json(m, kind).map(Some) })
            .collect(),
    }
}

pub fn chain_complex_from_json<F: ParseScalar>(v: &Value, kind: FieldKind) -> Result<ChainComplex<F>> {
    let dims: Vec<usize> =
        as_array(field(v, "dims")?, "dims")?.iter().map(|d| as_usize(d, "dims entry")).collect::<Result<_>>()?;
    let boundaries: Vec<Matrix<F>> = as_array(field(v, "boundaries")?, "boundaries")?
        .iter()
        .map(|m| matrix_from_json(m, kind))
        .collect::<Result<_>>()?;
    let given = optional_matrices(v.get("chain_bases"), kind, "chain_bases")?;
    if !given.is_empty() && given.len() != dims.len() {
        return Err(Error::Parse(format!("{} chain bases for {} degrees", given.len(), dims.len())));
    }
    let bases = dims
        .iter()
        .enumerate()
        .map(|(p, &d)| given.get(p).cloned().flatten().unwrap_or_else(|| Matrix::identity(d)))
        .collect();
    ChainComplex::with_bases(dims, boundaries, bases)
}

pub fn chain_complex_to_json<F: Scalar>(c: &ChainComplex<F>) -> Value {
    json!({
        "dims": c.dims(),
        "boundaries": c.boundaries().iter().map(matrix_to_json).collect::<Vec<_>>(),
        "chain_bases": c.chain_bases().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn homology_from_json<F: ParseScalar>(v: &Value, kind: FieldKind, c: &ChainComplex<F>) -> Result<HomologyBasis<F>> {
    let given = optional_matrices(Some(field(v, "bases")?), kind, "bases")?;
    if given.len() != c.dims().len() {
        return Err(Error::Parse(format!("{} homology bases for {} degrees", given.len(), c.dims().len())));
    }
    let bases = given
        .into_iter()
        .enumerate()
        .map(|(p, m)| m.unwrap_or_else(|| Matrix::zeros(c.dims()[p], 0)))
        .collect();
    Ok(HomologyBasis { bases })
}

pub fn homology_to_json<F: Scalar>(h: &HomologyBasis<F>) -> Value {
    json!({"bases": h.bases.iter().map(matrix_to_json).collect::<Vec<_>>()})
}

pub fn symplectic_from_json<F: ParseScalar>(v: &Value, kind: FieldKind) -> Result<SymplecticChainComplex<F>> {
    let base = chain_complex_from_json(v, kind)?;
    let pairings = as_array(field(v, "pairings")?, "pairings")?
        .iter()
        .map(|m| matrix_from_json(m, kind))
        .collect::<Result<_>>()?;
    SymplecticChainComplex::new(base, pairings)
}

/// Header fields of a representation file.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationHeader {
    pub genus: usize,
    pub family: Family,
    pub n: usize,
    pub field: FieldKind,
}

pub fn representation_header(v: &Value) -> Result<RepresentationHeader> {
    let family = field(v, "family")?
        .as_str()
        .ok_or_else(|| Error::Parse("family must be a string".into()))?
        .parse()?;
    let field_kind = match v.get("field") {
        None => FieldKind::Rational,
        Some(f) => f
            .as_str()
            .ok_or_else(|| Error::Parse("field must be a string".into()))?
            .parse()
            .map_err(|e: Error| Error::Parse(e.to_string()))?,
    };
    Ok(RepresentationHeader {
        genus: as_usize(field(v, "genus")?, "genus")?,
        family,
        n: as_usize(field(v, "n")?, "n")?,
        field: field_kind,
    })
}

pub fn representation_from_json<F: ParseScalar>(v: &Value, kind: FieldKind) -> Result<SurfaceRepresentation<F>> {
    let header = representation_header(v)?;
    let presentation = SurfacePresentation::new(header.genus)?;
    let gens = field(v, "generators")?
        .as_object()
        .ok_or_else(|| Error::Parse("generators must be an object".into()))?;
    for name in gens.keys() {
        presentation.generator_index(name).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let images = (0..presentation.rank())
        .map(|k| {
            let name = generator_name(k);
            let m = gens.get(&name).ok_or_else(|| Error::Parse(format!("missing generator {name}")))?;
            matrix_from_json(m, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    SurfaceRepresentation::new(header.genus, LieAlgebraSpec::build(header.family, header.n)?, images)
}

pub fn representation_to_json<F: Scalar>(rep: &SurfaceRepresentation<F>, kind: FieldKind) -> Value {
    let gens: Map<String, Value> = rep
        .images()
        .iter()
        .enumerate()
        .map(|(k, m)| (generator_name(k), matrix_to_json(m)))
        .collect();
    json!({
        "genus": rep.genus(),
        "family": rep.spec.family.label(),
        "n": rep.spec.n,
        "field": kind.to_string(),
        "generators": gens,
    })
}

/// A representation over whichever field its file declares.
#[derive(Clone, Debug)]
pub enum AnyRepresentation {
    Rational(SurfaceRepresentation<Rational>),
    Quad(SurfaceRepresentation<Quad>),
    Float(SurfaceRepresentation<Approx>),
}

impl AnyRepresentation {
    pub fn from_json(v: &Value, kind: FieldKind) -> Result<Self> {
        Ok(match kind {
            FieldKind::Rational => AnyRepresentation::Rational(representation_from_json(v, kind)?),
            FieldKind::Quad(_) => AnyRepresentation::Quad(representation_from_json(v, kind)?),
            FieldKind::Float => AnyRepresentation::Float(representation_from_json(v, kind)?),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyRepresentation::Rational(r) => representation_to_json(r, FieldKind::Rational),
            AnyRepresentation::Quad(r) => {
                let d = r.images().iter().flat_map(|m| m.entries().iter()).find_map(Quad::radicand).unwrap_or(2);
                representation_to_json(r, FieldKind::Quad(d))
            }
            AnyRepresentation::Float(r) => representation_to_json(r, FieldKind::Float),
        }
    }
}

pub fn train_track_from_json(v: &Value) -> Result<TrainTrack> {
    let edges = as_array(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| e.as_str().map(str::to_string).ok_or_else(|| Error::Parse("edge names must be strings".into())))
        .collect::<Result<Vec<_>>>()?;
    let switches = as_array(field(v, "switches")?, "switches")?
        .iter()
        .map(|s| {
            let names = as_array(s, "switch")?
                .iter()
                .map(|e| e.as_str().map(str::to_string).ok_or_else(|| Error::Parse("switch entries must be strings".into())))
                .collect::<Result<Vec<_>>>()?;
            match names.as_slice() {
                [l, r] => Ok(Switch { left: l.clone(), right: r.clone(), incoming: None }),
                [l, r, i] => Ok(Switch { left: l.clone(), right: r.clone(), incoming: Some(i.clone()) }),
                _ => Err(Error::Parse("a switch lists two or three edges".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TrainTrack::new(edges, switches)
}

pub fn cocycle_from_json<F: ParseScalar>(v: &Value, kind: FieldKind) -> Result<Cocycle<F>> {
    let weights = v.get("weights").unwrap_or(v);
    weights
        .as_object()
        .ok_or_else(|| Error::Parse("cocycle weights must be an object".into()))?
        .iter()
        .map(|(e, w)| Ok((e.clone(), F::from_json(w, kind)?)))
        .collect()
}
