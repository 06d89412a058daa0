//! Curve-spec documents and CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::{CurvatureSpec, CurveKind, CurveSpec, Dimension, SampledCurve, ScalarFn};
use crate::error::{Error, Result};
use crate::frenet::{FrameSeries, FrenetFrame3, FrenetFrame4};
use crate::mannheim::{CorrespondenceMap, PairSample3, PairSample4};
use crate::quat::Quaternion;

/// Numbers as written to CSV: 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn input_err(path: &Path, message: impl ToString) -> Error {
    Error::Input { path: path.display().to_string(), message: message.to_string() }
}

fn output_err(path: &Path, message: impl ToString) -> Error {
    Error::Output { path: path.display().to_string(), message: message.to_string() }
}

/// A curvature function as written in a document: a number, a knot table or a
/// tagged function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Constant(f64),
    Table(Vec<(f64, f64)>),
    Function(ScalarFn),
}

impl From<ScalarDoc> for ScalarFn {
    fn from(d: ScalarDoc) -> Self {
        match d {
            ScalarDoc::Constant(v) => ScalarFn::Constant(v),
            ScalarDoc::Table(t) => ScalarFn::Table(t),
            ScalarDoc::Function(f) => f,
        }
    }
}

/// `{"k", "r"}` in E3, `{"K", "k", "bitorsion"}` in E4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub big_k: Option<ScalarDoc>,
    pub k: ScalarDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<ScalarDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitorsion: Option<ScalarDoc>,
}

impl ProfileDoc {
    fn to_spec(&self, dimension: Dimension) -> Result<CurvatureSpec> {
        let missing = |what: &str| Error::InvalidSpec(format!("{dimension} profile needs `{what}`"));
        let extra = |what: &str| Error::InvalidSpec(format!("{dimension} profile does not take `{what}`"));
        match dimension {
            Dimension::Three => {
                if self.big_k.is_some() {
                    return Err(extra("K"));
                }
                if self.bitorsion.is_some() {
                    return Err(extra("bitorsion"));
                }
                Ok(CurvatureSpec::E3 {
                    curvature: self.k.clone().into(),
                    torsion: self.r.clone().ok_or_else(|| missing("r"))?.into(),
                })
            }
            Dimension::Four => {
                if self.r.is_some() {
                    return Err(extra("r"));
                }
                Ok(CurvatureSpec::E4 {
                    curvature: self.big_k.clone().ok_or_else(|| missing("K"))?.into(),
                    torsion: self.k.clone().into(),
                    bitorsion: self.bitorsion.clone().ok_or_else(|| missing("bitorsion"))?.into(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveDoc {
    Helix3 {
        a: f64,
        b: f64,
    },
    Circle3 {
        #[serde(rename = "R")]
        radius: f64,
    },
    Clifford4 {
        a: f64,
        b: f64,
        omega: f64,
    },
    /// Samples from a CSV path relative to the document, or inline.
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Vec<f64>>>,
    },
    FromCurvatures {
        profile: ProfileDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame0: Option<Vec<Vec<f64>>>,
    },
}

/// The JSON curve-spec document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub dimension: u8,
    pub curve: CurveDoc,
    pub domain: (f64, f64),
    pub samples: usize,
}

fn point_from(row: &[f64], dimension: Dimension) -> Result<Quaternion> {
    if row.len() != dimension.get() {
        return Err(Error::InvalidSpec(format!(
            "{dimension} point needs {} coordinates, got {}",
            dimension.get(),
            row.len()
        )));
    }
    Ok(Quaternion::from_coords(row))
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Resolves CSV references against `base` and validates the spec.
    pub fn to_spec(&self, base: &Path) -> Result<CurveSpec> {
        let dimension = Dimension::try_from(self.dimension).map_err(Error::InvalidSpec)?;
        let kind = match &self.curve {
            CurveDoc::Helix3 { a, b } => CurveKind::Helix3 { a: *a, b: *b },
            CurveDoc::Circle3 { radius } => CurveKind::Circle3 { radius: *radius },
            CurveDoc::Clifford4 { a, b, omega } => CurveKind::Clifford4 { a: *a, b: *b, omega: *omega },
            CurveDoc::Sampled { csv, params, points } => match (csv, params, points) {
                (Some(csv), None, None) => {
                    let (params, points) = read_curve_csv(&base.join(csv), dimension)?;
                    CurveKind::Sampled { params, points }
                }
                (None, Some(params), Some(points)) => CurveKind::Sampled {
                    params: params.clone(),
                    points: points.iter().map(|p| point_from(p, dimension)).collect::<Result<_>>()?,
                },
                _ => {
                    return Err(Error::InvalidSpec("sampled curves need either `csv` or `params` with `points`".into()))
                }
            },
            CurveDoc::FromCurvatures { profile, frame0 } => CurveKind::FromCurvatures {
                profile: profile.to_spec(dimension)?,
                seed: frame0
                    .as_ref()
                    .map(|f| f.iter().map(|v| point_from(v, dimension)).collect::<Result<Vec<_>>>())
                    .transpose()?,
            },
        };
        CurveSpec::new(dimension, kind, self.domain, self.samples)
    }

    /// Document for a sampled curve stored in `csv`.
    pub fn sampled(curve: &SampledCurve, csv: &str) -> Self {
        Self {
            dimension: curve.dimension().get() as u8,
            curve: CurveDoc::Sampled { csv: Some(csv.to_string()), params: None, points: None },
            domain: (curve.s(0), curve.s(curve.len() - 1)),
            samples: curve.len(),
        }
    }
}

/// Reads a spec document and the CSV it references.
pub fn load_spec(path: &Path) -> Result<(SpecDocument, CurveSpec)> {
    let text = fs::read_to_string(path).map_err(|e| input_err(path, e))?;
    let doc = SpecDocument::parse(&text).map_err(|e| match e {
        Error::InvalidSpec(m) => input_err(path, m),
        other => other,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let spec = doc.to_spec(&base)?;
    Ok((doc, spec))
}

fn parse_record(record: &csv::StringRecord) -> Option<Vec<f64>> {
    record.iter().map(|f| f.trim().parse::<f64>().ok()).collect()
}

/// Rows `t,x,y,z[,w]`; a leading non-numeric row is taken as a header.
pub fn read_curve_csv(path: &Path, dimension: Dimension) -> Result<(Vec<f64>, Vec<Quaternion>)> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(path).map_err(|e| input_err(path, e))?;
    let width = dimension.get() + 1;
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input_err(path, e))?;
        let Some(values) = parse_record(&record) else {
            if row == 0 {
                continue;
            }
            return Err(input_err(path, format!("row {} is not numeric", row + 1)));
        };
        if values.len() != width {
            return Err(input_err(path, format!("row {} has {} columns, expected {width}", row + 1, values.len())));
        }
        params.push(values[0]);
        points.push(Quaternion::from_coords(&values[1..]));
    }
    Ok((params, points))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| output_err(path, e))
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| output_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| output_err(path, e))?;
    }
    w.flush().map_err(|e| output_err(path, e))
}

fn coords(q: Quaternion, dimension: Dimension) -> impl Iterator<Item = String> {
    q.to_array().into_iter().take(dimension.get()).map(fmt_num)
}

pub fn write_curve_csv(path: &Path, curve: &SampledCurve) -> Result<()> {
    let dim = curve.dimension();
    let header: &[&str] = match dim {
        Dimension::Three => &["t", "x", "y", "z"],
        Dimension::Four => &["t", "x", "y", "z", "w"],
    };
    write_rows(
        path,
        header,
        (0..curve.len()).map(|i| std::iter::once(fmt_num(curve.s(i))).chain(coords(curve.point(i), dim)).collect()),
    )
}

pub fn write_map_csv(path: &Path, map: &CorrespondenceMap) -> Result<()> {
    write_rows(path, &["s", "s_star"], map.pairs().iter().map(|(a, b)| vec![fmt_num(*a), fmt_num(*b)]))
}

/// Header `s,s_star`; rows must be strictly increasing.
pub fn read_map_csv(path: &Path) -> Result<CorrespondenceMap> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| input_err(path, e))?;
    let header = reader.headers().map_err(|e| input_err(path, e))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["s", "s_star"] {
        return Err(input_err(path, "expected header `s,s_star`"));
    }
    let mut pairs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input_err(path, e))?;
        match parse_record(&record).as_deref() {
            Some([s, t]) => pairs.push((*s, *t)),
            _ => return Err(input_err(path, format!("row {} is not a numeric pair", row + 2))),
        }
    }
    CorrespondenceMap::new(pairs)
}

pub fn write_frames_3d(path: &Path, curve: &SampledCurve, series: &FrameSeries<FrenetFrame3>) -> Result<()> {
    let header = ["s", "x", "y", "z", "tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz", "k", "r"];
    let rows = series.index.iter().zip(&series.frames).map(|(i, f)| {
        let mut row = vec![fmt_num(f.s)];
        for v in [curve.point(*i), f.tangent.into(), f.normal.into(), f.binormal.into()] {
            row.extend(coords(v, Dimension::Three));
        }
        row.push(fmt_num(f.curvature));
        row.push(fmt_num(f.torsion));
        row
    });
    write_rows(path, &header, rows)
}

pub fn write_frames_4d(path: &Path, curve: &SampledCurve, series: &FrameSeries<FrenetFrame4>) -> Result<()> {
    let mut header = vec!["s".to_string()];
    for v in ["", "T", "N", "B1", "B2"] {
        for c in ["x", "y", "z", "w"] {
            header.push(if v.is_empty() { c.to_string() } else { format!("{v}{c}") });
        }
    }
    header.extend(["K", "k", "bitorsion"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = series.index.iter().zip(&series.frames).map(|(i, f)| {
        let mut row = vec![fmt_num(f.s)];
        for v in [curve.point(*i), f.tangent, f.normal, f.binormal1, f.binormal2] {
            row.extend(coords(v, Dimension::Four));
        }
        row.extend([f.curvature, f.torsion, f.bitorsion].map(fmt_num));
        row
    });
    write_rows(path, &header, rows)
}

pub fn write_lambda_csv(path: &Path, s: &[f64], lambda: &[f64], residual: &[f64]) -> Result<()> {
    let rows = s.iter().zip(lambda).zip(residual).map(|((s, l), r)| vec![fmt_num(*s), fmt_num(*l), fmt_num(*r)]);
    write_rows(path, &["s", "lambda", "residual"], rows)
}

pub fn write_pair_profile_3d(path: &Path, samples: &[PairSample3]) -> Result<()> {
    let header = [
        "s",
        "s_star",
        "distance",
        "cos_theta",
        "alignment",
        "theta",
        "signed_offset",
        "ds_ds_star",
        "speed_ratio_residual",
        "offset_angle_residual",
        "angle_rate_residual",
        "partner_k",
        "partner_r",
    ];
    let rows = samples.iter().map(|p| {
        vec![
            fmt_num(p.s),
            fmt_num(p.s_star),
            fmt_num(p.distance),
            fmt_num(p.cos_theta),
            fmt_opt(p.alignment),
            fmt_opt(p.theta),
            fmt_opt(p.signed_offset),
            fmt_num(p.ds_ds_star),
            fmt_opt(p.speed_ratio_residual),
            fmt_opt(p.offset_angle_residual),
            fmt_opt(p.angle_rate_residual),
            fmt_opt(p.partner_curvature),
            fmt_opt(p.partner_torsion),
        ]
    });
    write_rows(path, &header, rows)
}

pub fn write_pair_profile_4d(path: &Path, samples: &[PairSample4]) -> Result<()> {
    let header = [
        "s",
        "s_bar",
        "distance",
        "signed_offset",
        "g",
        "h",
        "leakage",
        "unit_deviation",
        "psi_prime",
        "psi_prime_formula",
        "identity_residual",
    ];
    let rows = samples.iter().map(|p| {
        vec![
            fmt_num(p.s),
            fmt_num(p.s_bar),
            fmt_num(p.distance),
            fmt_opt(p.signed_offset),
            fmt_opt(p.g),
            fmt_opt(p.h),
            fmt_opt(p.leakage),
            fmt_opt(p.unit_deviation),
            fmt_num(p.psi_prime),
            fmt_opt(p.psi_prime_formula),
            fmt_opt(p.identity_residual),
        ]
    });
    write_rows(path, &header, rows)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| output_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| output_err(path, e))
}
