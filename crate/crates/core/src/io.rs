//! JSON encoding of matrices, pairs and canonical decompositions.
//!
//! A matrix is `{"field": "rational" | "gaussian" | "real" | "complex",
//! "rows": [[entry, ...], ...]}`. Rationals are strings `"p/q"` (plain
//! integers as `"p"`), reals are numbers with 17 significant digits, and
//! complex entries are two-element arrays `[re, im]` whose parts follow the
//! real or rational rule. Objects are emitted with sorted keys so the output
//! is byte-stable.

use serde_json::{Map, Number, Value};

use crate::canonical::{CanonicalDecomposition, Form, SummandList};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixPair};
use crate::scalar::{format_rational, parse_rational, Gaussian, Rational, RealScalar, Scalar, C64};

/// Scalars with a JSON encoding.
pub trait JsonScalar: Scalar {
    const FIELD: &'static str;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn parse_err(what: impl std::fmt::Display) -> Error {
    Error::Parse(what.to_string())
}

/// A finite float rendered with 17 significant digits.
pub fn float_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = if x == 0.0 {
        "0.0".to_string()
    } else {
        format!("{x:.16e}")
    };
    Value::Number(
        text.parse::<Number>()
            .expect("finite float text is a JSON number"),
    )
}

fn number_text(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    let text = number_text(v).ok_or_else(|| parse_err(format!("expected a number, got {v}")))?;
    parse_rational(&text)
}

fn real_from_json(v: &Value) -> Result<f64> {
    let text = number_text(v).ok_or_else(|| parse_err(format!("expected a number, got {v}")))?;
    let x: f64 = match text.parse() {
        Ok(x) => x,
        Err(_) => parse_rational(&text)?.to_f64(),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_err(format!("non-finite number {text}")))
    }
}

fn complex_parts(v: &Value) -> Result<(&Value, Option<&Value>)> {
    match v {
        Value::Array(parts) if parts.len() == 2 => Ok((&parts[0], Some(&parts[1]))),
        Value::Array(_) => Err(parse_err("complex entries are [re, im]")),
        other => Ok((other, None)),
    }
}

impl JsonScalar for Rational {
    const FIELD: &'static str = "rational";
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        rational_from_json(v)
    }
}

impl JsonScalar for f64 {
    const FIELD: &'static str = "real";
    fn to_json(&self) -> Value {
        float_json(*self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        real_from_json(v)
    }
}

impl JsonScalar for Gaussian {
    const FIELD: &'static str = "gaussian";
    fn to_json(&self) -> Value {
        Value::Array(vec![self.re.to_json(), self.im.to_json()])
    }
    fn from_json(v: &Value) -> Result<Self> {
        let (re, im) = complex_parts(v)?;
        let im = im
            .map(rational_from_json)
            .transpose()?
            .unwrap_or_else(|| Rational::from_integer(0.into()));
        Ok(Gaussian::new(rational_from_json(re)?, im))
    }
}

impl JsonScalar for C64 {
    const FIELD: &'static str = "complex";
    fn to_json(&self) -> Value {
        Value::Array(vec![float_json(self.re), float_json(self.im)])
    }
    fn from_json(v: &Value) -> Result<Self> {
        let (re, im) = complex_parts(v)?;
        Ok(C64::new(
            real_from_json(re)?,
            im.map(real_from_json).transpose()?.unwrap_or(0.0),
        ))
    }
}

/// Matrix over a field chosen at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Rational(Matrix<Rational>),
    Gaussian(Matrix<Gaussian>),
    Real(Matrix<f64>),
    Complex(Matrix<C64>),
}

/// Field names accepted in matrix JSON and on the command line.
pub const FIELDS: [&str; 4] = ["rational", "gaussian", "real", "complex"];

impl AnyMatrix {
    pub fn field(&self) -> &'static str {
        match self {
            AnyMatrix::Rational(_) => Rational::FIELD,
            AnyMatrix::Gaussian(_) => Gaussian::FIELD,
            AnyMatrix::Real(_) => f64::FIELD,
            AnyMatrix::Complex(_) => C64::FIELD,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            AnyMatrix::Rational(m) => m.rows(),
            AnyMatrix::Gaussian(m) => m.rows(),
            AnyMatrix::Real(m) => m.rows(),
            AnyMatrix::Complex(m) => m.rows(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyMatrix::Rational(m) => matrix_to_json(m),
            AnyMatrix::Gaussian(m) => matrix_to_json(m),
            AnyMatrix::Real(m) => matrix_to_json(m),
            AnyMatrix::Complex(m) => matrix_to_json(m),
        }
    }

    /// Parses the `rows` of `v` over `field`, which overrides the `field`
    /// member of `v` when given.
    pub fn from_json(v: &Value, field: Option<&str>) -> Result<Self> {
        let declared = v.get("field").and_then(Value::as_str);
        let field = field.or(declared).unwrap_or("rational");
        let rows = v
            .get("rows")
            .ok_or_else(|| parse_err("matrix object lacks \"rows\""))?;
        Ok(match field {
            "rational" => AnyMatrix::Rational(rows_from_json(rows)?),
            "gaussian" => AnyMatrix::Gaussian(rows_from_json(rows)?),
            "real" => AnyMatrix::Real(rows_from_json(rows)?),
            "complex" => AnyMatrix::Complex(rows_from_json(rows)?),
            other => return Err(parse_err(format!("unknown field {other:?}"))),
        })
    }
}

pub fn matrix_to_json<S: JsonScalar>(m: &Matrix<S>) -> Value {
    let rows = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(JsonScalar::to_json).collect()))
        .collect();
    let mut obj = Map::new();
    obj.insert("field".into(), Value::String(S::FIELD.into()));
    obj.insert("rows".into(), Value::Array(rows));
    Value::Object(obj)
}

fn rows_from_json<S: JsonScalar>(rows: &Value) -> Result<Matrix<S>> {
    let rows = rows
        .as_array()
        .ok_or_else(|| parse_err("\"rows\" must be an array"))?;
    let parsed = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| parse_err("each row must be an array"))?
                .iter()
                .map(S::from_json)
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<Vec<S>>>>()?;
    if parsed.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(parsed).map_err(parse_err)
}

/// Matrix over a fixed field; the `field` member of `v` is ignored.
pub fn matrix_from_json<S: JsonScalar>(v: &Value) -> Result<Matrix<S>> {
    rows_from_json(
        v.get("rows")
            .ok_or_else(|| parse_err("matrix object lacks \"rows\""))?,
    )
}

/// `{"a": matrix, "b": matrix}`.
pub fn pair_to_json<S: JsonScalar>(p: &MatrixPair<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("a".into(), matrix_to_json(p.a()));
    obj.insert("b".into(), matrix_to_json(p.b()));
    Value::Object(obj)
}

/// Reads either a pair `{"a", "b"}` or a bare matrix, which is paired with
/// `Omega`. Pair invariants are checked.
pub fn pair_from_json<S: JsonScalar>(v: &Value) -> Result<MatrixPair<S>> {
    match (v.get("a"), v.get("b")) {
        (Some(a), Some(b)) => MatrixPair::new(matrix_from_json(a)?, matrix_from_json(b)?),
        (None, None) => MatrixPair::with_omega(matrix_from_json(v)?),
        _ => Err(parse_err("a pair needs both \"a\" and \"b\"")),
    }
}

fn list_name(list: SummandList) -> &'static str {
    match list {
        SummandList::Complex => "complex",
        SummandList::Real => "real",
    }
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::Symmetric => "symmetric",
        Form::Hamiltonian => "hamiltonian",
    }
}

/// `{"size", "list", "form", "summands": [{"type", "n", "sign", "params"}],
/// "certificate", "residual"}`; the certificate is included on request and
/// only when one was computed.
pub fn decomposition_to_json<S: JsonScalar>(
    d: &CanonicalDecomposition<S>,
    with_certificate: bool,
) -> Value {
    let summands = d
        .summands
        .iter()
        .map(|s| {
            let mut obj = Map::new();
            obj.insert("type".into(), Value::String(s.type_name().into()));
            obj.insert("n".into(), Value::from(s.half()));
            obj.insert("size".into(), Value::from(s.size()));
            obj.insert("sign".into(), Value::from(s.sign()));
            let params: Map<String, Value> = s
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_json()))
                .collect();
            obj.insert("params".into(), Value::Object(params));
            Value::Object(obj)
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("size".into(), Value::from(d.size));
    obj.insert("list".into(), Value::String(list_name(d.list).into()));
    obj.insert("form".into(), Value::String(form_name(d.form).into()));
    obj.insert("summands".into(), Value::Array(summands));
    obj.insert(
        "residual".into(),
        d.residual.map(float_json).unwrap_or(Value::Null),
    );
    obj.insert(
        "has_certificate".into(),
        Value::Bool(d.certificate.is_some()),
    );
    if with_certificate {
        if let Some(s) = &d.certificate {
            obj.insert("certificate".into(), matrix_to_json(s));
        }
    }
    Value::Object(obj)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize_real;
    use crate::scalar::rat;

    #[test]
    fn rational_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(-3, 1)],
            vec![rat(0, 1), rat(7, 9)],
        ])
        .unwrap();
        let v = matrix_to_json(&m);
        assert_eq!(v["rows"][0][0], Value::String("1/2".into()));
        assert_eq!(v["rows"][0][1], Value::String("-3".into()));
        assert_eq!(matrix_from_json::<Rational>(&v).unwrap(), m);
    }

    #[test]
    fn numbers_parse_exactly() {
        let v = parse(r#"{"field": "rational", "rows": [[0.25, 3], ["2/4", "-1e-2"]]}"#).unwrap();
        let m = matrix_from_json::<Rational>(&v).unwrap();
        assert_eq!(m[(0, 0)], rat(1, 4));
        assert_eq!(m[(1, 0)], rat(1, 2));
        assert_eq!(m[(1, 1)], rat(-1, 100));
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_pretty(&float_json(0.1));
        assert_eq!(text.trim(), "1.0000000000000001e-1");
        let back: f64 = real_from_json(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, 0.1);
        assert_eq!(float_json(0.0).to_string(), "0.0");
    }

    #[test]
    fn complex_entries() {
        let v = parse(r#"{"field": "complex", "rows": [[[1, 2], 3]]}"#).unwrap();
        let m = AnyMatrix::from_json(&v, None).unwrap();
        assert_eq!(
            m,
            AnyMatrix::Complex(
                Matrix::from_rows(vec![vec![C64::new(1.0, 2.0), C64::new(3.0, 0.0)]]).unwrap()
            )
        );
        let back = AnyMatrix::from_json(&m.to_json(), None).unwrap();
        assert_eq!(back, m);
        let g = AnyMatrix::from_json(&v, Some("gaussian")).unwrap();
        assert_eq!(g.field(), "gaussian");
    }

    #[test]
    fn malformed_inputs() {
        for text in [
            r#"{"rows": [[1, 2], [3]]}"#,
            r#"{"rows": [["x"]]}"#,
            r#"{"rows": 3}"#,
            r#"{"field": "quaternion", "rows": [[1]]}"#,
            r#"{"cols": []}"#,
        ] {
            let v = parse(text).unwrap();
            assert!(
                matches!(AnyMatrix::from_json(&v, None), Err(Error::Parse(_))),
                "{text}"
            );
        }
        assert!(parse("{").is_err());
    }

    #[test]
    fn pairs_and_decompositions() {
        let a = Matrix::from_i64_rows(&[&[2, 0], &[0, 2]]);
        let pair = MatrixPair::with_omega(a.clone()).unwrap();
        let v = pair_to_json(&pair);
        assert_eq!(pair_from_json::<Rational>(&v).unwrap(), pair);
        assert_eq!(
            pair_from_json::<Rational>(&matrix_to_json(&a)).unwrap(),
            pair
        );
        let d = canonicalize_real(&a).unwrap();
        let j = decomposition_to_json(&d, true);
        assert_eq!(j["summands"][0]["type"], "Q");
        assert_eq!(j["summands"][0]["params"]["c"], "2");
        assert!(j.get("certificate").is_some());
        let keys: Vec<&String> = j.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
