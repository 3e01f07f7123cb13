//! JSON formats for multivectors, Gram matrices and quadric lists, and the
//! `std:<n>` / `j7` / `j8` space names.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ParseError;
use crate::exterior::{hyperbolic_labels, plain_labels, sort_positions, Label, MultiVector, MAX_DIM};
use crate::ideal_lab::{MonomialRecord, Quadric, QuadricRecord};
use crate::linalg::{parse_rational, Rational};
use crate::quadratic::{BasisKind, QuadraticSpace};

/// Largest input accepted by the parsers, in bytes.
pub const MAX_INPUT: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Hyperbolic,
    Plain,
}

impl From<BasisKind> for LabelKind {
    fn from(kind: BasisKind) -> Self {
        match kind {
            BasisKind::Hyperbolic => LabelKind::Hyperbolic,
            BasisKind::Plain => LabelKind::Plain,
        }
    }
}

fn labels_for(kind: LabelKind, dim: usize) -> Vec<Label> {
    match kind {
        LabelKind::Hyperbolic => hyperbolic_labels(dim),
        LabelKind::Plain => plain_labels(dim),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub indices: Vec<i32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiVectorJson {
    pub dim: usize,
    pub grade: usize,
    pub labels: LabelKind,
    pub terms: Vec<TermJson>,
}

fn check_size(text: &str) -> Result<(), ParseError> {
    if text.len() > MAX_INPUT {
        return Err(ParseError::Invalid(format!("input exceeds {MAX_INPUT} bytes")));
    }
    Ok(())
}

fn json_err(e: serde_json::Error) -> ParseError {
    ParseError::Json(e.to_string())
}

/// Positions of `labels` (read in written order) and the sorting sign.
fn term_positions(all: &[Label], labels: &[i32], index: usize) -> Result<(i32, crate::IndexSet), ParseError> {
    let term = |message: String| ParseError::Term { index, message };
    let mut positions = Vec::with_capacity(labels.len());
    for l in labels {
        let pos = all
            .iter()
            .position(|x| x.0 == *l)
            .ok_or_else(|| term(format!("label {l} is not in the basis")))?;
        if positions.contains(&pos) {
            return Err(term(format!("label {l} repeats")));
        }
        positions.push(pos);
    }
    Ok(sort_positions(&positions).expect("distinct positions"))
}

impl MultiVectorJson {
    pub fn from_multivector(omega: &MultiVector, kind: LabelKind) -> Self {
        let labels = labels_for(kind, omega.dim());
        MultiVectorJson {
            dim: omega.dim(),
            grade: omega.grade(),
            labels: kind,
            terms: omega
                .terms()
                .map(|(set, c)| TermJson {
                    indices: set.positions().map(|p| labels[p].0).collect(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_multivector(&self) -> Result<MultiVector, ParseError> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(ParseError::Invalid(format!("dim must be in 1..={MAX_DIM}, got {}", self.dim)));
        }
        if self.grade > self.dim {
            return Err(ParseError::Invalid(format!(
                "grade {} exceeds dim {}",
                self.grade, self.dim
            )));
        }
        let all = labels_for(self.labels, self.dim);
        let mut omega = MultiVector::zero(self.dim, self.grade);
        let mut seen = HashSet::new();
        for (index, t) in self.terms.iter().enumerate() {
            if t.indices.len() != self.grade {
                return Err(ParseError::Term {
                    index,
                    message: format!("expected {} indices, got {}", self.grade, t.indices.len()),
                });
            }
            let (sign, set) = term_positions(&all, &t.indices, index)?;
            if !seen.insert(set) {
                return Err(ParseError::Term {
                    index,
                    message: "duplicate index set".into(),
                });
            }
            let c = parse_rational(&t.coeff).map_err(|message| ParseError::Term { index, message })?;
            omega.add_term(set, if sign > 0 { c } else { -c });
        }
        Ok(omega)
    }
}

pub fn parse_multivector(text: &str) -> Result<MultiVector, ParseError> {
    check_size(text)?;
    let json: MultiVectorJson = serde_json::from_str(text).map_err(json_err)?;
    json.to_multivector()
}

pub fn multivector_to_json(omega: &MultiVector, kind: LabelKind) -> String {
    serde_json::to_string(&MultiVectorJson::from_multivector(omega, kind)).expect("serializable")
}

fn rational_value(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok(),
        Value::Number(n) => n.as_i64().map(crate::linalg::rat),
        _ => None,
    }
}

/// An `n×n` array whose entries are integers or `"p/q"` strings.
pub fn parse_gram(text: &str) -> Result<QuadraticSpace, ParseError> {
    check_size(text)?;
    let value: Value = serde_json::from_str(text).map_err(json_err)?;
    let rows = value
        .as_array()
        .ok_or_else(|| ParseError::Invalid("gram must be an array of rows".into()))?;
    let n = rows.len();
    if n == 0 || n > MAX_DIM {
        return Err(ParseError::Invalid(format!("gram size must be in 1..={MAX_DIM}, got {n}")));
    }
    let mut gram = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| ParseError::Invalid(format!("row {i} must have {n} entries")))?;
        let parsed = row
            .iter()
            .enumerate()
            .map(|(j, v)| {
                rational_value(v).ok_or_else(|| ParseError::Invalid(format!("entry ({i}, {j}) is not a rational")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        gram.push(parsed);
    }
    QuadraticSpace::from_gram(gram).map_err(|e| ParseError::Invalid(e.to_string()))
}

/// `std:<n>`, `j7` or `j8`.
pub fn parse_space(spec: &str) -> Result<QuadraticSpace, ParseError> {
    match spec {
        "j7" => Ok(QuadraticSpace::j7()),
        "j8" => Ok(QuadraticSpace::j8()),
        _ => {
            let n = spec
                .strip_prefix("std:")
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| ParseError::Invalid(format!("unknown space {spec:?}; use std:<n>, j7 or j8")))?;
            if n == 0 || n > MAX_DIM {
                return Err(ParseError::Invalid(format!("std:<n> needs 1 <= n <= {MAX_DIM}")));
            }
            Ok(QuadraticSpace::standard(n))
        }
    }
}

/// Quadric list: a JSON array of quadric records, or an object holding one
/// under `quadrics` or `generators`, directly or inside a run report's `outcome`.
pub fn parse_quadrics(text: &str) -> Result<Vec<(Quadric, Option<usize>)>, ParseError> {
    check_size(text)?;
    let value: Value = serde_json::from_str(text).map_err(json_err)?;
    let list = match &value {
        Value::Array(_) => &value,
        Value::Object(o) => {
            let inner = o.get("outcome").unwrap_or(&value);
            ["quadrics", "generators"]
                .iter()
                .find_map(|k| o.get(*k).or_else(|| inner.get(*k)))
                .ok_or_else(|| ParseError::Invalid("no quadrics array".into()))?
        }
        _ => return Err(ParseError::Invalid("expected an array of quadrics".into())),
    };
    let records: Vec<QuadricInput> = serde_json::from_value(list.clone()).map_err(json_err)?;
    records.iter().map(QuadricInput::to_quadric).collect()
}

/// A quadric record as read back; `rank` and `weight` are optional.
#[derive(Clone, Debug, Deserialize)]
struct QuadricInput {
    dim: usize,
    grade: usize,
    terms: Vec<MonomialRecord>,
    #[serde(default)]
    rank: Option<usize>,
}

impl QuadricInput {
    fn to_quadric(&self) -> Result<(Quadric, Option<usize>), ParseError> {
        if self.dim == 0 || self.dim > MAX_DIM || self.grade > self.dim {
            return Err(ParseError::Invalid(format!(
                "bad shape dim {} grade {}",
                self.dim, self.grade
            )));
        }
        let all = hyperbolic_labels(self.dim);
        let mut q = Quadric::zero(self.dim, self.grade);
        for (index, m) in self.terms.iter().enumerate() {
            for side in [&m.left, &m.right] {
                if side.len() != self.grade {
                    return Err(ParseError::Term {
                        index,
                        message: format!("expected {} indices, got {}", self.grade, side.len()),
                    });
                }
            }
            let (s1, a) = term_positions(&all, &m.left, index)?;
            let (s2, b) = term_positions(&all, &m.right, index)?;
            let c = parse_rational(&m.coeff).map_err(|message| ParseError::Term { index, message })?;
            q.add(a, b, if s1 * s2 > 0 { c } else { -c });
        }
        Ok((q, self.rank))
    }
}

pub fn quadrics_to_json(quadrics: &[Quadric]) -> String {
    let records: Vec<QuadricRecord> = quadrics.iter().map(QuadricRecord::new).collect();
    serde_json::to_string(&records).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    #[test]
    fn multivector_roundtrip_and_sign() {
        let text = r#"{"dim":4,"grade":2,"labels":"hyperbolic","terms":[{"indices":[-1,1],"coeff":"3/2"},{"indices":[2,-2],"coeff":"-1"}]}"#;
        let w = parse_multivector(text).unwrap();
        assert_eq!(w.coefficient_ordered(&[0, 1]), ratio(-3, 2));
        assert_eq!(w.coefficient_ordered(&[2, 3]), rat(-1));
        let out = multivector_to_json(&w, LabelKind::Hyperbolic);
        assert_eq!(parse_multivector(&out).unwrap(), w);
        assert_eq!(multivector_to_json(&parse_multivector(&out).unwrap(), LabelKind::Hyperbolic), out);
    }

    #[test]
    fn malformed_terms_name_their_index() {
        let bad = [
            (r#"{"dim":4,"grade":2,"labels":"hyperbolic","terms":[{"indices":[1,2],"coeff":"1"},{"indices":[1,1],"coeff":"1"}]}"#, 1),
            (r#"{"dim":4,"grade":2,"labels":"hyperbolic","terms":[{"indices":[1,2],"coeff":"1"},{"indices":[2,1],"coeff":"1"}]}"#, 1),
            (r#"{"dim":4,"grade":2,"labels":"hyperbolic","terms":[{"indices":[1,7],"coeff":"1"}]}"#, 0),
            (r#"{"dim":4,"grade":2,"labels":"hyperbolic","terms":[{"indices":[1],"coeff":"1"}]}"#, 0),
            (r#"{"dim":4,"grade":2,"labels":"plain","terms":[{"indices":[1,2],"coeff":"1/0"}]}"#, 0),
        ];
        for (text, index) in bad {
            match parse_multivector(text) {
                Err(ParseError::Term { index: i, .. }) => assert_eq!(i, index, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(parse_multivector("{"), Err(ParseError::Json(_))));
        assert!(parse_multivector(r#"{"dim":33,"grade":1,"labels":"plain","terms":[]}"#).is_err());
    }

    #[test]
    fn gram_and_space_specs() {
        let s = parse_gram(r#"[[0,1],[1,"0"]]"#).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(parse_gram("[[1,2],[3,4]]").is_err());
        assert!(parse_gram("[[0,0],[0,0]]").is_err());
        assert!(parse_gram("[]").is_err());
        assert_eq!(parse_space("std:9").unwrap().dim(), 9);
        assert_eq!(parse_space("j7").unwrap().gram(), QuadraticSpace::j7().gram());
        assert!(parse_space("std:0").is_err());
        assert!(parse_space("std:x").is_err());
        assert!(parse_space("k9").is_err());
    }

    #[test]
    fn quadric_roundtrip() {
        let qs = crate::ideal_lab::listed_quadrics(crate::ideal_lab::Variety::Iso37);
        let text = quadrics_to_json(&qs);
        let back: Vec<Quadric> = parse_quadrics(&text).unwrap().into_iter().map(|(q, _)| q).collect();
        assert_eq!(back, qs);
        let wrapped = format!(r#"{{"outcome":{{"quadrics":{text}}}}}"#);
        assert_eq!(parse_quadrics(&wrapped).unwrap().len(), 5);
        assert!(parse_quadrics(r#"[{"dim":7,"grade":3,"terms":[{"left":[1,2],"right":[1,2,3],"coeff":"1"}]}]"#).is_err());
    }
}
