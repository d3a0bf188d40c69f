//! JSON document formats and CSV export.
//!
//! Four document kinds, all versioned and strict (unknown fields rejected):
//! `structure`, `function`, `system`, `operator`. Rationals are `"p/q"`
//! strings (pi-coefficients where the field is an angle or breakpoint),
//! complex numbers are `[re, im]` arrays, component indices are 1-based.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characterization::{CheckReport, SystemKind, WaveletSystem, Witness, WitnessIndex};
use crate::error::Error;
use crate::fiber::{Fiber, FiberIndex, FiberOperator, VectorFunction};
use crate::rational::{format_ratio, parse_ratio, RationalPi};
use crate::spectrum::StepSpectrum;
use crate::structure::AffineStructure;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDoc {
    breakpoints: Vec<String>,
    pieces: Vec<PieceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceDoc {
    value: [f64; 2],
    #[serde(rename = "mod")]
    modulation: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    kind: String,
    version: String,
    n: usize,
    #[serde(rename = "N")]
    scale: u32,
    sigma: Vec<usize>,
    theta: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    kind: String,
    version: String,
    label: String,
    components: Vec<SpectrumDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    kind: String,
    version: String,
    structure: StructureDoc,
    psis: Vec<FunctionDoc>,
    tag: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberEntryDoc {
    k: i64,
    i: usize,
    value: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixEntryDoc {
    row: IndexDoc,
    col: IndexDoc,
    value: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexDoc {
    k: i64,
    i: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    kind: String,
    version: String,
    op: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    fiber: Option<Vec<FiberEntryDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<MatrixEntryDoc>>,
}

/// A parsed, typed document.
#[derive(Debug)]
pub enum Document {
    Structure(AffineStructure),
    Function(VectorFunction),
    System(WaveletSystem),
    Operator(FiberOperator),
}

fn complex_of(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn complex_doc(v: Complex64) -> [f64; 2] {
    [v.re, v.im]
}

fn spectrum_to_doc(s: &StepSpectrum) -> SpectrumDoc {
    let segs = s.segments();
    if segs.is_empty() {
        return SpectrumDoc {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
        };
    }
    let mut breakpoints = vec![segs[0].left.to_string()];
    let mut pieces = Vec::new();
    let mut cursor = segs[0].left.clone();
    for seg in segs {
        if seg.left > cursor {
            // Explicit zero filler keeps the breakpoint list contiguous.
            pieces.push(PieceDoc {
                value: [0.0, 0.0],
                modulation: "0".into(),
            });
            breakpoints.push(seg.left.to_string());
        }
        pieces.push(PieceDoc {
            value: complex_doc(seg.value),
            modulation: format_ratio(&seg.modulation),
        });
        breakpoints.push(seg.right.to_string());
        cursor = seg.right.clone();
    }
    SpectrumDoc {
        breakpoints,
        pieces,
    }
}

fn spectrum_from_doc(doc: &SpectrumDoc, path: &str) -> Result<StepSpectrum, Error> {
    if doc.breakpoints.is_empty() {
        if doc.pieces.is_empty() {
            return Ok(StepSpectrum::zero());
        }
        return Err(Error::schema(path, "pieces without breakpoints"));
    }
    if doc.pieces.len() + 1 != doc.breakpoints.len() {
        return Err(Error::schema(
            path,
            format!(
                "{} breakpoints require {} pieces, got {}",
                doc.breakpoints.len(),
                doc.breakpoints.len() - 1,
                doc.pieces.len()
            ),
        ));
    }
    let mut points = Vec::with_capacity(doc.breakpoints.len());
    for (idx, text) in doc.breakpoints.iter().enumerate() {
        let coeff = parse_ratio(text)
            .map_err(|_| Error::schema(format!("{path}.breakpoints[{idx}]"), "not a rational"))?;
        points.push(RationalPi::from_ratio(coeff));
    }
    let mut raw = Vec::with_capacity(doc.pieces.len());
    for (idx, piece) in doc.pieces.iter().enumerate() {
        if points[idx] >= points[idx + 1] {
            return Err(Error::schema(
                format!("{path}.breakpoints[{idx}]"),
                "breakpoints must be strictly increasing",
            ));
        }
        let modulation = parse_ratio(&piece.modulation)
            .map_err(|_| Error::schema(format!("{path}.pieces[{idx}].mod"), "not a rational"))?;
        raw.push((
            points[idx].clone(),
            points[idx + 1].clone(),
            complex_of(piece.value),
            modulation,
        ));
    }
    StepSpectrum::from_pieces(raw)
}

fn structure_to_doc(structure: &AffineStructure) -> StructureDoc {
    StructureDoc {
        kind: "structure".into(),
        version: "1".into(),
        n: structure.n(),
        scale: structure.scale(),
        sigma: structure.sigma_images().to_vec(),
        theta: structure.thetas().iter().map(|t| t.to_string()).collect(),
    }
}

fn structure_from_doc(doc: &StructureDoc, path: &str) -> Result<AffineStructure, Error> {
    check_header(&doc.kind, "structure", &doc.version, path)?;
    if doc.sigma.len() != doc.n || doc.theta.len() != doc.n {
        return Err(Error::schema(
            path,
            format!(
                "n = {} but sigma has {} and theta has {} entries",
                doc.n,
                doc.sigma.len(),
                doc.theta.len()
            ),
        ));
    }
    let theta = doc
        .theta
        .iter()
        .enumerate()
        .map(|(idx, text)| {
            text.parse::<RationalPi>()
                .map_err(|_| Error::schema(format!("{path}.theta[{idx}]"), "not a rational"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    AffineStructure::new(doc.scale, doc.sigma.clone(), theta)
}

fn function_to_doc(function: &VectorFunction) -> FunctionDoc {
    FunctionDoc {
        kind: "function".into(),
        version: "1".into(),
        label: function.label.clone(),
        components: function.components.iter().map(spectrum_to_doc).collect(),
    }
}

fn function_from_doc(doc: &FunctionDoc, path: &str) -> Result<VectorFunction, Error> {
    check_header(&doc.kind, "function", &doc.version, path)?;
    let components = doc
        .components
        .iter()
        .enumerate()
        .map(|(idx, c)| spectrum_from_doc(c, &format!("{path}.components[{idx}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorFunction::new(doc.label.clone(), components))
}

fn system_to_doc(system: &WaveletSystem) -> SystemDoc {
    SystemDoc {
        kind: "system".into(),
        version: "1".into(),
        structure: structure_to_doc(&system.structure),
        psis: system.psis.iter().map(function_to_doc).collect(),
        tag: system.kind.as_str().into(),
    }
}

fn system_from_doc(doc: &SystemDoc, path: &str) -> Result<WaveletSystem, Error> {
    check_header(&doc.kind, "system", &doc.version, path)?;
    let structure = structure_from_doc(&doc.structure, &format!("{path}.structure"))?;
    let psis = doc
        .psis
        .iter()
        .enumerate()
        .map(|(idx, f)| function_from_doc(f, &format!("{path}.psis[{idx}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let kind = match doc.tag.as_str() {
        "candidate" => SystemKind::Candidate,
        "verified-NTF" => SystemKind::VerifiedNtf,
        "verified-orthonormal" => SystemKind::VerifiedOrthonormal,
        other => {
            return Err(Error::schema(
                format!("{path}.tag"),
                format!("unknown tag `{other}`"),
            ))
        }
    };
    let mut system = WaveletSystem::candidate(structure, psis)?;
    system.kind = kind;
    Ok(system)
}

fn operator_to_doc(operator: &FiberOperator) -> Result<OperatorDoc, Error> {
    let mut doc = OperatorDoc {
        kind: "operator".into(),
        version: "1".into(),
        op: String::new(),
        fiber: None,
        entries: None,
    };
    match operator {
        FiberOperator::Identity => doc.op = "identity".into(),
        FiberOperator::Zero => doc.op = "zero".into(),
        FiberOperator::RankOne(f) => {
            doc.op = "rank-one".into();
            doc.fiber = Some(
                f.iter()
                    .map(|(index, value)| FiberEntryDoc {
                        k: index.k,
                        i: index.comp,
                        value: complex_doc(*value),
                    })
                    .collect(),
            );
        }
        FiberOperator::Matrix(entries) => {
            doc.op = "matrix".into();
            doc.entries = Some(
                entries
                    .iter()
                    .map(|(row, col, value)| MatrixEntryDoc {
                        row: IndexDoc {
                            k: row.k,
                            i: row.comp,
                        },
                        col: IndexDoc {
                            k: col.k,
                            i: col.comp,
                        },
                        value: complex_doc(*value),
                    })
                    .collect(),
            );
        }
        FiberOperator::Conjugated { .. } => {
            return Err(Error::schema(
                "operator",
                "conjugated operators have no document form",
            ))
        }
    }
    Ok(doc)
}

fn operator_from_doc(doc: &OperatorDoc, path: &str) -> Result<FiberOperator, Error> {
    check_header(&doc.kind, "operator", &doc.version, path)?;
    match doc.op.as_str() {
        "identity" => Ok(FiberOperator::Identity),
        "zero" => Ok(FiberOperator::Zero),
        "rank-one" => {
            let entries = doc
                .fiber
                .as_ref()
                .ok_or_else(|| Error::schema(path, "rank-one operator requires `fiber`"))?;
            let mut fiber = Fiber::zero();
            for e in entries {
                fiber.set(FiberIndex::new(e.k, e.i), complex_of(e.value));
            }
            if fiber.is_zero() {
                return Err(Error::schema(path, "rank-one fiber must be nonzero"));
            }
            Ok(FiberOperator::RankOne(fiber))
        }
        "matrix" => {
            let entries = doc
                .entries
                .as_ref()
                .ok_or_else(|| Error::schema(path, "matrix operator requires `entries`"))?;
            Ok(FiberOperator::Matrix(
                entries
                    .iter()
                    .map(|e| {
                        (
                            FiberIndex::new(e.row.k, e.row.i),
                            FiberIndex::new(e.col.k, e.col.i),
                            complex_of(e.value),
                        )
                    })
                    .collect(),
            ))
        }
        other => Err(Error::schema(
            format!("{path}.op"),
            format!("unknown operator `{other}`"),
        )),
    }
}

fn check_header(kind: &str, expected: &str, version: &str, path: &str) -> Result<(), Error> {
    if kind != expected {
        return Err(Error::schema(
            format!("{path}.kind"),
            format!("expected `{expected}`, got `{kind}`"),
        ));
    }
    if version != "1" {
        return Err(Error::schema(
            format!("{path}.version"),
            format!("unsupported version `{version}`"),
        ));
    }
    Ok(())
}

/// Parses any document; returns the typed object plus canonicalization
/// warnings (non-canonical spectra are canonicalized on input).
pub fn parse_document(text: &str) -> Result<(Document, Vec<String>), Error> {
    #[derive(Deserialize)]
    struct Probe {
        kind: Option<String>,
    }
    let probe: Probe = serde_json::from_str(text)
        .map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
    let kind = probe
        .kind
        .ok_or_else(|| Error::schema("$.kind", "missing document kind"))?;
    let mut warnings = Vec::new();
    let doc = match kind.as_str() {
        "structure" => {
            let doc: StructureDoc = from_str_strict(text)?;
            Document::Structure(structure_from_doc(&doc, "$")?)
        }
        "function" => {
            let doc: FunctionDoc = from_str_strict(text)?;
            let function = function_from_doc(&doc, "$")?;
            note_canonicalization(&doc, &function, &mut warnings);
            Document::Function(function)
        }
        "system" => {
            let doc: SystemDoc = from_str_strict(text)?;
            let system = system_from_doc(&doc, "$")?;
            for (idx, (input, parsed)) in doc.psis.iter().zip(system.psis.iter()).enumerate() {
                let _ = idx;
                note_canonicalization(input, parsed, &mut warnings);
            }
            Document::System(system)
        }
        "operator" => {
            let doc: OperatorDoc = from_str_strict(text)?;
            Document::Operator(operator_from_doc(&doc, "$")?)
        }
        other => {
            return Err(Error::schema(
                "$.kind",
                format!("unknown document kind `{other}`"),
            ))
        }
    };
    Ok((doc, warnings))
}

fn note_canonicalization(input: &FunctionDoc, parsed: &VectorFunction, warnings: &mut Vec<String>) {
    let canonical = function_to_doc(parsed);
    let canonical_json = serde_json::to_string(&canonical).expect("serialize");
    let mut reparsed = serde_json::to_string(input).expect("serialize");
    // Label differences are impossible here; compare the component bodies.
    if let (Ok(a), Ok(b)) = (
        serde_json::from_str::<serde_json::Value>(&canonical_json),
        serde_json::from_str::<serde_json::Value>(&reparsed),
    ) {
        if a["components"] != b["components"] {
            warnings.push(format!(
                "function `{}`: components canonicalized (pieces sorted/merged, zeros dropped)",
                parsed.label
            ));
        }
    }
    reparsed.clear();
}

fn from_str_strict<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))
}

/// Canonical serialization (pretty JSON with LF endings).
pub fn serialize_document(doc: &Document) -> Result<String, Error> {
    let value = match doc {
        Document::Structure(s) => serde_json::to_value(structure_to_doc(s)),
        Document::Function(f) => serde_json::to_value(function_to_doc(f)),
        Document::System(s) => serde_json::to_value(system_to_doc(s)),
        Document::Operator(op) => serde_json::to_value(operator_to_doc(op)?),
    }
    .map_err(|e| Error::schema("$", e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::schema("$", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Report serialization: exactly the contract fields.
pub fn report_to_json(report: &CheckReport) -> serde_json::Value {
    serde_json::json!({
        "passed": report.passed,
        "mode": report.mode.as_str(),
        "max_residual": report.max_residual,
        "witness": report.witness.as_ref().map(witness_to_json),
        "cells_checked": report.cells_checked,
    })
}

fn witness_to_json(witness: &Witness) -> serde_json::Value {
    let mut value = serde_json::json!({
        "equation": witness.equation,
        "xi": witness.xi.to_string(),
        "cell": witness.cell.as_ref().map(|(l, r)| vec![l.to_string(), r.to_string()]),
        "i": witness.i,
        "j": witness.j,
        "value": [witness.value.re, witness.value.im],
    });
    match witness.index {
        WitnessIndex::None => {}
        WitnessIndex::K(k) => {
            value["k"] = serde_json::json!(k);
        }
        WitnessIndex::S(s) => {
            value["s"] = serde_json::json!(s);
        }
    }
    value
}

/// CSV export: `xi_num,xi_den,value_re,value_im`, one row per evaluation,
/// LF endings, deterministic order.
pub fn csv_string(rows: &[(RationalPi, Complex64)]) -> String {
    let mut out = String::from("xi_num,xi_den,value_re,value_im\n");
    for (xi, value) in rows {
        let coeff = xi.coefficient();
        out.push_str(&format!(
            "{},{},{},{}\n",
            coeff.numer(),
            coeff.denom(),
            value.re,
            value.im
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_system, shannon_wavelet};
    use crate::rational::Ratio;

    #[test]
    fn shannon_system_round_trip() {
        let system = builtin_system("shannon").unwrap();
        let text = serialize_document(&Document::System(system)).unwrap();
        let (parsed, warnings) = parse_document(&text).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let Document::System(parsed) = parsed else {
            panic!("expected system")
        };
        assert_eq!(parsed.psis[0].components[0], shannon_wavelet());
        // Round trip is byte-identical.
        let again = serialize_document(&Document::System(parsed)).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn gap_serialization_includes_zero_fillers() {
        let doc = spectrum_to_doc(&shannon_wavelet());
        assert_eq!(doc.breakpoints, vec!["-2", "-1", "1", "2"]);
        assert_eq!(doc.pieces.len(), 3);
        assert_eq!(doc.pieces[1].value, [0.0, 0.0]);
    }

    #[test]
    fn non_canonical_input_is_flagged() {
        let text = r#"{
            "kind": "function",
            "version": "1",
            "label": "f",
            "components": [{
                "breakpoints": ["0", "1", "2"],
                "pieces": [{"value": [1, 0], "mod": "0"}, {"value": [1, 0], "mod": "0"}]
            }]
        }"#;
        let (doc, warnings) = parse_document(text).unwrap();
        assert_eq!(warnings.len(), 1);
        let Document::Function(f) = doc else {
            panic!("expected function")
        };
        assert_eq!(f.components[0].segments().len(), 1);
    }

    #[test]
    fn schema_errors() {
        // Denominator zero.
        let text = r#"{"kind":"structure","version":"1","n":1,"N":2,"sigma":[1],"theta":["3/0"]}"#;
        assert!(matches!(
            parse_document(text),
            Err(Error::Schema { .. })
        ));
        // Unknown field.
        let text = r#"{"kind":"structure","version":"1","n":1,"N":2,"sigma":[1],"theta":["0"],"extra":1}"#;
        assert!(matches!(parse_document(text), Err(Error::Schema { .. })));
        // Unknown kind.
        let text = r#"{"kind":"nope","version":"1"}"#;
        assert!(matches!(parse_document(text), Err(Error::Schema { .. })));
        // Bad version.
        let text = r#"{"kind":"structure","version":"2","n":1,"N":2,"sigma":[1],"theta":["0"]}"#;
        assert!(matches!(parse_document(text), Err(Error::Schema { .. })));
    }

    #[test]
    fn operator_round_trip() {
        let op = FiberOperator::RankOne(Fiber::delta(0, 1));
        let text = serialize_document(&Document::Operator(op)).unwrap();
        let (parsed, _) = parse_document(&text).unwrap();
        let Document::Operator(FiberOperator::RankOne(f)) = parsed else {
            panic!("expected rank-one")
        };
        assert_eq!(f, Fiber::delta(0, 1));
    }

    #[test]
    fn csv_format() {
        let rows = vec![
            (RationalPi::new(1, 2), Complex64::new(1.0, 0.0)),
            (RationalPi::from_ratio(Ratio::new((-3).into(), 4.into())), Complex64::ZERO),
        ];
        let text = csv_string(&rows);
        assert_eq!(
            text,
            "xi_num,xi_den,value_re,value_im\n1,2,1,0\n-3,4,0,0\n"
        );
    }

    #[test]
    fn modulated_piece_round_trip() {
        let s = StepSpectrum::from_pieces(vec![(
            RationalPi::zero(),
            RationalPi::pi(),
            Complex64::new(0.5, -0.25),
            Ratio::new(1.into(), 2.into()),
        )])
        .unwrap();
        let f = VectorFunction::scalar("m", s.clone());
        let text = serialize_document(&Document::Function(f)).unwrap();
        let (Document::Function(parsed), warnings) = parse_document(&text).unwrap() else {
            panic!("expected function")
        };
        assert!(warnings.is_empty());
        assert_eq!(parsed.components[0], s);
    }
}
