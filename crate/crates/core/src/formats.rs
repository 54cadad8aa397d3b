//! JSON documents for posets, arrangements, certificates and generator
//! inputs. Every document carries `"format": 1`.
//!
//! Integers are written as JSON numbers when they fit in an `i64` and as
//! decimal strings otherwise; both forms are accepted on input. Rationals are
//! strings such as `"3/4"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::affine::{AffineArrangement, AffineError, Hyperplane};
use crate::exactalg::{ExactError, IntMatrix};
use crate::families::{FamilyError, FiniteGroupTable, SimpleGraph};
use crate::layers::{Ambient, Arrangement, LayerError, LayerPoset};
use crate::poly::IntPolynomial;
use crate::poset::{FinitePoset, PosetError};
use crate::ssolv::IdealChain;

pub const FORMAT: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u64),
    #[error("not an integer: {0}")]
    Integer(String),
    #[error("not a rational number: {0}")]
    Rational(String),
    #[error("document is neither an arrangement nor a poset")]
    UnknownDocument,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Layer(#[from] LayerError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Affine(#[from] AffineError),
}

fn check_version(v: Option<u64>) -> Result<(), FormatError> {
    match v {
        None | Some(FORMAT) => Ok(()),
        Some(other) => Err(FormatError::Version(other)),
    }
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt, FormatError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n
            .to_string()
            .parse()
            .map_err(|_| FormatError::Integer(n.to_string())),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| FormatError::Integer(s.clone())),
        other => Err(FormatError::Integer(other.to_string())),
    }
}

pub fn rational_to_json(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn rational_from_json(v: &Value) -> Result<BigRational, FormatError> {
    let s = match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        other => return Err(FormatError::Rational(other.to_string())),
    };
    let bad = || FormatError::Rational(s.clone());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn ints(rows: &[Vec<Value>]) -> Result<Vec<Vec<BigInt>>, FormatError> {
    rows.iter()
        .map(|r| r.iter().map(int_from_json).collect())
        .collect()
}

fn int_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<Value>> {
    rows.iter()
        .map(|r| r.iter().map(int_to_json).collect())
        .collect()
}

pub fn to_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
pub struct PosetDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub elements: Vec<String>,
    pub covers: Vec<[usize; 2]>,
}

pub fn poset_doc(p: &FinitePoset) -> PosetDoc {
    PosetDoc {
        format: Some(FORMAT),
        elements: p.labels().to_vec(),
        covers: p.covers().iter().map(|&(a, b)| [a, b]).collect(),
    }
}

pub fn parse_poset(s: &str) -> Result<FinitePoset, FormatError> {
    let doc: PosetDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    let covers = doc.covers.iter().map(|c| (c[0], c[1])).collect();
    Ok(FinitePoset::new(doc.elements, covers)?)
}

#[derive(Serialize, Deserialize)]
pub struct ArrangementDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub n: usize,
    pub d: usize,
    pub v: usize,
    pub vectors: Vec<Vec<Value>>,
}

pub fn arrangement_doc(a: &Arrangement) -> ArrangementDoc {
    ArrangementDoc {
        format: Some(FORMAT),
        n: a.ambient.n,
        d: a.ambient.d,
        v: a.ambient.v,
        vectors: int_rows(&a.vectors),
    }
}

pub fn parse_arrangement(s: &str) -> Result<Arrangement, FormatError> {
    let doc: ArrangementDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    Ok(Arrangement::new(
        Ambient::new(doc.n, doc.d, doc.v)?,
        ints(&doc.vectors)?,
    )?)
}

#[derive(Serialize)]
pub struct LayerDoc {
    pub lattice: Vec<Vec<Value>>,
    pub character: Vec<Vec<Value>>,
}

#[derive(Serialize)]
pub struct LayerPosetDoc {
    pub format: u64,
    pub elements: Vec<String>,
    pub covers: Vec<[usize; 2]>,
    pub ranks: Vec<usize>,
    pub layers: Vec<LayerDoc>,
}

pub fn layer_poset_doc(lp: &LayerPoset) -> LayerPosetDoc {
    let p = &lp.poset;
    LayerPosetDoc {
        format: FORMAT,
        elements: p.labels().to_vec(),
        covers: p.covers().iter().map(|&(a, b)| [a, b]).collect(),
        ranks: (0..p.len()).map(|x| p.height(x)).collect(),
        layers: lp
            .layers
            .iter()
            .map(|l| LayerDoc {
                lattice: int_rows(&l.lattice.basis.row_vecs()),
                character: l
                    .character
                    .iter()
                    .map(|r| r.iter().map(rational_to_json).collect())
                    .collect(),
            })
            .collect(),
    }
}

/// Either input accepted where a poset is analysed.
pub enum PosetInput {
    Arrangement(Arrangement),
    Poset(FinitePoset),
}

pub fn parse_poset_input(s: &str) -> Result<PosetInput, FormatError> {
    let v: Value = serde_json::from_str(s)?;
    if v.get("vectors").is_some() {
        Ok(PosetInput::Arrangement(parse_arrangement(s)?))
    } else if v.get("elements").is_some() {
        Ok(PosetInput::Poset(parse_poset(s)?))
    } else {
        Err(FormatError::UnknownDocument)
    }
}

#[derive(Serialize, Deserialize)]
pub struct CertificateDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub chain: Vec<Vec<usize>>,
    pub strict: bool,
    pub a: Vec<usize>,
}

pub fn certificate_doc(c: &IdealChain) -> CertificateDoc {
    CertificateDoc {
        format: Some(FORMAT),
        chain: c.atom_sets.clone(),
        strict: c.strict,
        a: c.a.clone(),
    }
}

pub fn parse_certificate(s: &str) -> Result<IdealChain, FormatError> {
    let doc: CertificateDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    Ok(IdealChain {
        atom_sets: doc.chain,
        strict: doc.strict,
        a: doc.a,
    })
}

#[derive(Serialize, Deserialize)]
pub struct HyperplaneDoc {
    pub normal: Vec<Value>,
    pub offset: Value,
}

#[derive(Serialize, Deserialize)]
pub struct AffineDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub n: usize,
    pub hyperplanes: Vec<HyperplaneDoc>,
}

pub fn affine_doc(a: &AffineArrangement) -> AffineDoc {
    AffineDoc {
        format: Some(FORMAT),
        n: a.n,
        hyperplanes: a
            .hyperplanes
            .iter()
            .map(|h| HyperplaneDoc {
                normal: h.normal.iter().map(rational_to_json).collect(),
                offset: rational_to_json(&h.offset),
            })
            .collect(),
    }
}

pub fn parse_affine(s: &str) -> Result<AffineArrangement, FormatError> {
    let doc: AffineDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    let hs = doc
        .hyperplanes
        .iter()
        .map(|h| {
            Ok(Hyperplane {
                normal: h
                    .normal
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<_, FormatError>>()?,
                offset: rational_from_json(&h.offset)?,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(AffineArrangement::new(doc.n, hs)?)
}

#[derive(Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

pub fn graph_doc(g: &SimpleGraph) -> GraphDoc {
    GraphDoc {
        format: Some(FORMAT),
        n: g.n,
        edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
    }
}

pub fn parse_graph(s: &str) -> Result<SimpleGraph, FormatError> {
    let doc: GraphDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    Ok(SimpleGraph::new(doc.n, &edges)?)
}

#[derive(Serialize, Deserialize)]
pub struct GroupDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub mul: Vec<Vec<usize>>,
    pub action: Vec<Vec<usize>>,
}

pub fn group_doc(g: &FiniteGroupTable) -> GroupDoc {
    GroupDoc {
        format: Some(FORMAT),
        mul: g.mul.clone(),
        action: g.action.clone(),
    }
}

pub fn parse_group(s: &str) -> Result<FiniteGroupTable, FormatError> {
    let doc: GroupDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    Ok(FiniteGroupTable::new(doc.mul, doc.action)?)
}

#[derive(Serialize, Deserialize)]
pub struct SublatticeDoc {
    #[serde(default)]
    pub format: Option<u64>,
    pub basis: Vec<Vec<Value>>,
}

pub fn sublattice_doc(m: &IntMatrix) -> SublatticeDoc {
    SublatticeDoc {
        format: Some(FORMAT),
        basis: int_rows(&m.row_vecs()),
    }
}

pub fn parse_sublattice(s: &str) -> Result<IntMatrix, FormatError> {
    let doc: SublatticeDoc = serde_json::from_str(s)?;
    check_version(doc.format)?;
    let rows = ints(&doc.basis)?;
    let cols = rows.first().map_or(0, Vec::len);
    Ok(IntMatrix::from_rows(rows, cols)?)
}

/// Ascending coefficient array.
pub fn poly_to_json(p: &IntPolynomial) -> Value {
    Value::Array(p.coeffs().iter().map(int_to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_integers_round_trip() {
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(int_to_json(&huge), Value::String(huge.to_string()));
        assert_eq!(int_from_json(&int_to_json(&huge)).unwrap(), huge);
        assert_eq!(int_to_json(&BigInt::from(-7)), Value::from(-7));
        assert!(int_from_json(&Value::from(1.5)).is_err());
    }

    #[test]
    fn rationals_parse() {
        let q = rational_from_json(&Value::String("6/8".into())).unwrap();
        assert_eq!(q.to_string(), "3/4");
        assert!(rational_from_json(&Value::String("1/0".into())).is_err());
    }

    #[test]
    fn arrangement_round_trip() {
        let a = Arrangement::from_i64(2, 1, 1, &[&[1, 0], &[0, 2], &[1, 2]]).unwrap();
        let s = to_pretty(&arrangement_doc(&a));
        assert_eq!(parse_arrangement(&s).unwrap(), a);
        assert!(matches!(
            parse_arrangement(&s.replace("\"format\": 1", "\"format\": 2")),
            Err(FormatError::Version(2))
        ));
    }
}
