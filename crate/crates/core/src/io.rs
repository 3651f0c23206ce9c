//! JSON documents for operators, projections, sequences and reports.
//!
//! Matrices are nested rows of `[re, im]` pairs. Every document carries
//! `"schema": "projpair/1"`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bj::FiniteSpectrumOp;
use crate::error::{Error, Result};
use crate::kadison::{DiagonalSequence, DiagonalTail};
use crate::operators::{
    bit_from, Cycle, DenseProjection, TailDoc, TailedOperator, TailedProjection,
};
use crate::spectral::CMatrix;

pub const SCHEMA: &str = "projpair/1";

/// Serde adapter writing infinite reals as `"inf"`.
pub mod ext_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(D::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::schema(
        format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

fn check_schema(schema: &Option<String>) -> Result<()> {
    match schema {
        Some(s) if s != SCHEMA => Err(Error::schema(
            "schema",
            format!("expected {SCHEMA:?}, got {s:?}"),
        )),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailField {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    exceptions: BTreeMap<String, u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<TailDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    codomain: Option<TailDoc>,
}

impl TailField {
    fn single(doc: TailDoc) -> Self {
        TailField {
            exceptions: doc.exceptions,
            constant: doc.constant,
            period: doc.period,
            ..Default::default()
        }
    }

    fn is_split(&self) -> bool {
        self.domain.is_some() || self.codomain.is_some()
    }

    fn as_single(&self) -> TailDoc {
        TailDoc {
            exceptions: self.exceptions.clone(),
            constant: self.constant,
            period: self.period.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Dense,
    Tailed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    #[serde(default)]
    schema: Option<String>,
    kind: Kind,
    block: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shift: Option<i64>,
}

fn block_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_block(rows: &[Vec<[f64; 2]>], shift: i64) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => usize::try_from(-shift)
            .map_err(|_| Error::schema("shift", "an empty block needs shift <= 0"))?,
    };
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::schema(
            format!("block[{i}]"),
            format!("row has {} entries, expected {ncols}", rows[i].len()),
        ));
    }
    if nrows as i64 - ncols as i64 != shift {
        return Err(Error::schema(
            "shift",
            format!("block is {nrows}x{ncols} so the shift must be {}", nrows as i64 - ncols as i64),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::schema(format!("block[{i}][{j}]"), "entry is not finite"));
            }
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

/// A parsed operator document.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorInput {
    Dense(CMatrix),
    Tailed(TailedOperator),
}

/// A parsed projection document.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionInput {
    Dense(DenseProjection),
    Tailed(TailedProjection),
}

fn parse_doc(text: &str) -> Result<OperatorDoc> {
    let doc: OperatorDoc = serde_json::from_str(text).map_err(parse_error)?;
    check_schema(&doc.schema)?;
    Ok(doc)
}

pub fn operator_from_json(text: &str) -> Result<OperatorInput> {
    let doc = parse_doc(text)?;
    let shift = doc.shift.unwrap_or(0);
    let block = rows_to_block(&doc.block, shift)?;
    match doc.kind {
        Kind::Dense => {
            if doc.tail.is_some() || shift != 0 {
                return Err(Error::schema("tail", "dense operators have no tail or shift"));
            }
            Ok(OperatorInput::Dense(block))
        }
        Kind::Tailed => {
            let tail = doc.tail.unwrap_or_default();
            if tail.is_split() {
                let empty = TailDoc {
                    exceptions: BTreeMap::new(),
                    constant: None,
                    period: None,
                };
                let dom = tail.domain.clone().unwrap_or(empty.clone());
                let cod = tail.codomain.clone().unwrap_or(empty);
                if !tail.as_single().exceptions.is_empty()
                    || tail.constant.is_some()
                    || tail.period.is_some()
                {
                    return Err(Error::schema(
                        "tail",
                        "give either domain/codomain or a single pattern",
                    ));
                }
                let src = plain_cycle(&dom, "tail.domain")?;
                let dst = plain_cycle(&cod, "tail.codomain")?;
                TailedOperator::new(block, src, dst)
                    .map(OperatorInput::Tailed)
                    .map_err(|e| Error::schema("tail", e.to_string()))
            } else if shift == 0 && tail.constant != Some(1) || !tail.exceptions.is_empty() {
                let p = tailed_projection(block, &tail.as_single())?;
                Ok(OperatorInput::Tailed(p.as_operator()))
            } else {
                let c = plain_cycle(&tail.as_single(), "tail")?;
                Ok(OperatorInput::Tailed(TailedOperator::new(block, c.clone(), c)?))
            }
        }
    }
}

fn plain_cycle(doc: &TailDoc, field: &str) -> Result<Cycle> {
    if !doc.exceptions.is_empty() {
        return Err(Error::schema(
            format!("{field}.exceptions"),
            "exceptions are only allowed on projection tails",
        ));
    }
    Ok(doc.to_pattern(0, field)?.cycle)
}

fn tailed_projection(block: CMatrix, tail: &TailDoc) -> Result<TailedProjection> {
    let pattern = tail.to_pattern(block.nrows(), "tail")?;
    TailedProjection::from_pattern(block, &pattern)
}

pub fn projection_from_json(text: &str) -> Result<ProjectionInput> {
    let doc = parse_doc(text)?;
    let shift = doc.shift.unwrap_or(0);
    if shift != 0 {
        return Err(Error::schema("shift", "projections have shift 0"));
    }
    let block = rows_to_block(&doc.block, 0)?;
    match doc.kind {
        Kind::Dense => {
            if doc.tail.is_some() {
                return Err(Error::schema("tail", "dense projections have no tail"));
            }
            Ok(ProjectionInput::Dense(DenseProjection::new(block)?))
        }
        Kind::Tailed => {
            let tail = doc.tail.unwrap_or_default();
            if tail.is_split() {
                return Err(Error::schema("tail", "projections have a single tail pattern"));
            }
            Ok(ProjectionInput::Tailed(tailed_projection(block, &tail.as_single())?))
        }
    }
}

fn write_doc(doc: &OperatorDoc) -> String {
    serde_json::to_string_pretty(doc).expect("operator documents serialize")
}

pub fn dense_to_json(m: &CMatrix) -> String {
    write_doc(&OperatorDoc {
        schema: Some(SCHEMA.into()),
        kind: Kind::Dense,
        block: block_to_rows(m),
        tail: None,
        shift: None,
    })
}

pub fn projection_to_json(p: &TailedProjection) -> String {
    write_doc(&OperatorDoc {
        schema: Some(SCHEMA.into()),
        kind: Kind::Tailed,
        block: block_to_rows(p.block()),
        tail: Some(TailField::single(TailDoc::from_cycle(p.tail()))),
        shift: Some(0),
    })
}

pub fn operator_to_json(op: &TailedOperator) -> String {
    let tail = if op.src() == op.dst() && op.src().period() == 1 {
        TailField::single(TailDoc::from_cycle(op.src()))
    } else {
        TailField {
            domain: Some(TailDoc::from_cycle(op.src())),
            codomain: Some(TailDoc::from_cycle(op.dst())),
            ..Default::default()
        }
    };
    write_doc(&OperatorDoc {
        schema: Some(SCHEMA.into()),
        kind: Kind::Tailed,
        block: block_to_rows(op.block()),
        tail: Some(tail),
        shift: Some(op.shift_offset()),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SequenceTailDoc {
    Zeros,
    Ones,
    Half,
    Declared { a_finite: bool, b_finite: bool },
    Pattern(Vec<u8>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    #[serde(default)]
    schema: Option<String>,
    prefix: Vec<f64>,
    tail: SequenceTailDoc,
}

pub fn sequence_from_json(text: &str) -> Result<DiagonalSequence> {
    let doc: SequenceDoc = serde_json::from_str(text).map_err(parse_error)?;
    check_schema(&doc.schema)?;
    let tail = match doc.tail {
        SequenceTailDoc::Zeros => DiagonalTail::Zeros,
        SequenceTailDoc::Ones => DiagonalTail::Ones,
        SequenceTailDoc::Half => DiagonalTail::Half,
        SequenceTailDoc::Declared { a_finite, b_finite } => {
            DiagonalTail::Declared { a_finite, b_finite }
        }
        SequenceTailDoc::Pattern(bits) => {
            let bits = bits
                .iter()
                .map(|&b| bit_from("tail.pattern", b))
                .collect::<Result<Vec<_>>>()?;
            DiagonalTail::Pattern(
                Cycle::new(bits).map_err(|e| Error::schema("tail.pattern", e.to_string()))?,
            )
        }
    };
    DiagonalSequence::new(doc.prefix, tail).map_err(|e| Error::schema("prefix", e.to_string()))
}

pub fn sequence_to_json(d: &DiagonalSequence) -> String {
    let tail = match d.tail() {
        DiagonalTail::Zeros => SequenceTailDoc::Zeros,
        DiagonalTail::Ones => SequenceTailDoc::Ones,
        DiagonalTail::Half => SequenceTailDoc::Half,
        DiagonalTail::Declared { a_finite, b_finite } => SequenceTailDoc::Declared {
            a_finite: *a_finite,
            b_finite: *b_finite,
        },
        DiagonalTail::Pattern(c) => {
            SequenceTailDoc::Pattern(c.bits().iter().map(|&b| b as u8).collect())
        }
    };
    serde_json::to_string_pretty(&SequenceDoc {
        schema: Some(SCHEMA.into()),
        prefix: d.prefix().to_vec(),
        tail,
    })
    .expect("sequences serialize")
}

/// Finite-spectrum operator. `projections` gives one window block per
/// eigenvalue; `diagonal` instead lists the eigenvalue at each window
/// coordinate. `tail` lists the eigenvalues repeated periodically beyond the
/// window.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDoc {
    #[serde(default)]
    schema: Option<String>,
    eigenvalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projections: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diagonal: Option<Vec<f64>>,
    tail: Vec<f64>,
}

pub fn spectrum_from_json(text: &str) -> Result<FiniteSpectrumOp> {
    let doc: SpectrumDoc = serde_json::from_str(text).map_err(parse_error)?;
    check_schema(&doc.schema)?;
    let lookup = |field: String, v: f64| {
        doc.eigenvalues
            .iter()
            .position(|&a| a == v)
            .ok_or_else(|| Error::schema(field, format!("{v} is not a listed eigenvalue")))
    };
    let tail = doc
        .tail
        .iter()
        .enumerate()
        .map(|(i, &v)| lookup(format!("tail[{i}]"), v))
        .collect::<Result<Vec<_>>>()?;
    let blocks = match (&doc.projections, &doc.diagonal) {
        (Some(ps), None) => ps
            .iter()
            .enumerate()
            .map(|(j, rows)| {
                rows_to_block(rows, 0).map_err(|e| Error::schema(format!("projections[{j}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(diag)) => {
            let labels = diag
                .iter()
                .enumerate()
                .map(|(i, &v)| lookup(format!("diagonal[{i}]"), v))
                .collect::<Result<Vec<_>>>()?;
            let m = labels.len();
            (0..doc.eigenvalues.len())
                .map(|j| {
                    CMatrix::from_fn(m, m, |r, c| {
                        if r == c && labels[r] == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect()
        }
        _ => {
            return Err(Error::schema(
                "projections",
                "give exactly one of projections or diagonal",
            ))
        }
    };
    FiniteSpectrumOp::new(doc.eigenvalues.clone(), blocks, tail)
}

pub fn spectrum_to_json(z: &FiniteSpectrumOp) -> String {
    let doc = SpectrumDoc {
        schema: Some(SCHEMA.into()),
        eigenvalues: z.eigenvalues().to_vec(),
        projections: Some(z.blocks().iter().map(block_to_rows).collect()),
        diagonal: None,
        tail: z.tail_assignment().iter().map(|&j| z.eigenvalues()[j]).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("spectra serialize")
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_operator(path: &Path) -> Result<OperatorInput> {
    operator_from_json(&read_file(path)?)
}

pub fn load_projection(path: &Path) -> Result<ProjectionInput> {
    projection_from_json(&read_file(path)?)
}

pub fn load_sequence(path: &Path) -> Result<DiagonalSequence> {
    sequence_from_json(&read_file(path)?)
}

pub fn load_spectrum(path: &Path) -> Result<FiniteSpectrumOp> {
    spectrum_from_json(&read_file(path)?)
}

/// Report wrapped with the schema tag, pretty-printed with a trailing newline.
pub fn report_json<T: Serialize>(report: &T) -> String {
    #[derive(Serialize)]
    struct Tagged<'a, T> {
        schema: &'static str,
        #[serde(flatten)]
        report: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Tagged {
        schema: SCHEMA,
        report,
    })
    .expect("reports serialize");
    s.push('\n');
    s
}

pub fn save_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
