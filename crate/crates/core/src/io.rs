//! Text formats: step-function CSV, mask JSON, and the audit report.
//!
//! Step-function CSV:
//!
//! ```text
//! rank,support_exp
//! 1,0
//! index,re_num,re_den,im_num,im_den
//! 0,1,1,0,1
//! 1,0,1,0,1
//! ```
//!
//! Emission writes every index in order with reduced fractions, so parsing and
//! re-emitting a file produced here reproduces it byte for byte. The parser
//! also accepts sparse rows (missing indices are zero), unreduced fractions,
//! `#` comment lines, and the two extra lossy float columns written by
//! [`CsvOptions::float_columns`].
//!
//! Mask JSON: `{"coefficients": [[re_num, re_den, im_num, im_den], ...]}`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::refine::Mask;
use crate::scalar::ExactScalar;
use crate::stepfn::StepFunction;
use crate::theorem1::Theorem1Report;

const SHAPE_HEADER: &str = "rank,support_exp";
const VALUE_HEADER: &str = "index,re_num,re_den,im_num,im_den";
const FLOAT_HEADER: &str = ",re_float,im_float";

#[derive(Clone, Copy, Debug, Default)]
pub struct CsvOptions {
    /// Append lossy decimal columns for plotting.
    pub float_columns: bool,
}

pub fn emit_step_csv(f: &StepFunction, opts: CsvOptions) -> String {
    let mut out = String::new();
    writeln!(out, "{SHAPE_HEADER}").unwrap();
    writeln!(out, "{},{}", f.rank(), f.support_exp()).unwrap();
    if opts.float_columns {
        writeln!(out, "{VALUE_HEADER}{FLOAT_HEADER}").unwrap();
    } else {
        writeln!(out, "{VALUE_HEADER}").unwrap();
    }
    for (k, v) in f.values().iter().enumerate() {
        write!(
            out,
            "{k},{},{},{},{}",
            v.re.numer(),
            v.re.denom(),
            v.im.numer(),
            v.im.denom()
        )
        .unwrap();
        if opts.float_columns {
            let (re, im) = v.to_f64();
            write!(out, ",{re},{im}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_step_csv(text: &str) -> Result<StepFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let mut next = |what: &str| -> Result<(u64, csv::StringRecord)> {
        match records.next() {
            None => Err(Error::parse(
                text.lines().count() as u64 + 1,
                1,
                format!("unexpected end of input, expected {what}"),
            )),
            Some(Err(e)) => Err(csv_error(e)),
            Some(Ok(r)) => Ok((r.position().map_or(0, |p| p.line()), r)),
        }
    };

    let (line, rec) = next("header `rank,support_exp`")?;
    expect_header(line, &rec, &["rank", "support_exp"])?;
    let (line, rec) = next("rank and support exponent")?;
    if rec.len() != 2 {
        return Err(Error::parse(line, 1, "expected two fields: rank,support_exp"));
    }
    let rank: i32 = field(line, &rec, 0)?;
    let support_exp: i32 = field(line, &rec, 1)?;
    let (line, rec) = next("header `index,re_num,re_den,im_num,im_den`")?;
    expect_header(line, &rec, &["index", "re_num", "re_den", "im_num", "im_den"])?;
    let has_floats = rec.len() == 7;
    if has_floats {
        expect_header(
            line,
            &rec,
            &["index", "re_num", "re_den", "im_num", "im_den", "re_float", "im_float"],
        )?;
    } else if rec.len() != 5 {
        return Err(Error::parse(line, 6, "unexpected extra header columns"));
    }

    let len = crate::stepfn::shape_len(rank, support_exp).map_err(|e| Error::parse(2, 1, e.to_string()))?;
    let mut values = vec![None; len];
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let width = if has_floats { 7 } else { 5 };
        if rec.len() != width {
            return Err(Error::parse(
                line,
                1,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let index: usize = field(line, &rec, 0)?;
        if index >= len {
            return Err(Error::parse(line, 1, format!("index {index} outside 0..{len}")));
        }
        let re = fraction(line, &rec, 1)?;
        let im = fraction(line, &rec, 3)?;
        if values[index].replace(ExactScalar::new(re, im)).is_some() {
            return Err(Error::parse(line, 1, format!("duplicate index {index}")));
        }
    }
    let values = values.into_iter().map(Option::unwrap_or_default).collect();
    StepFunction::new(rank, support_exp, values)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(line, 1, e.to_string())
}

fn expect_header(line: u64, rec: &csv::StringRecord, names: &[&str]) -> Result<()> {
    for (i, name) in names.iter().enumerate() {
        match rec.get(i) {
            Some(got) if got == *name => {}
            got => {
                return Err(Error::parse(
                    line,
                    i as u64 + 1,
                    format!("expected header field `{name}`, found {got:?}"),
                ))
            }
        }
    }
    Ok(())
}

fn field<T: std::str::FromStr>(line: u64, rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::parse(line, i as u64 + 1, format!("invalid number {raw:?}")))
}

fn fraction(line: u64, rec: &csv::StringRecord, i: usize) -> Result<BigRational> {
    let num: BigInt = field(line, rec, i)?;
    let den: BigInt = field(line, rec, i + 1)?;
    if !den.is_positive() {
        return Err(Error::parse(line, i as u64 + 2, "denominator must be positive"));
    }
    Ok(BigRational::new(num, den))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskFile {
    coefficients: Vec<CoeffRepr>,
}

#[derive(Deserialize)]
#[serde(try_from = "[serde_json::Number; 4]")]
struct CoeffRepr(ExactScalar);

impl TryFrom<[serde_json::Number; 4]> for CoeffRepr {
    type Error = String;

    fn try_from(v: [serde_json::Number; 4]) -> std::result::Result<Self, String> {
        let ints: Vec<BigInt> = v
            .iter()
            .map(|n| {
                n.to_string()
                    .parse::<BigInt>()
                    .map_err(|_| format!("coefficient entries must be integers, found {n}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        if !ints[1].is_positive() || !ints[3].is_positive() {
            return Err("denominators must be positive".into());
        }
        Ok(CoeffRepr(ExactScalar::new(
            BigRational::new(ints[0].clone(), ints[1].clone()),
            BigRational::new(ints[2].clone(), ints[3].clone()),
        )))
    }
}

/// Reads mask coefficients without checking their sum.
pub fn parse_mask_coefficients(text: &str) -> Result<Vec<ExactScalar>> {
    let file: MaskFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line() as u64, e.column() as u64, e.to_string()))?;
    if file.coefficients.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(file.coefficients.into_iter().map(|c| c.0).collect())
}

/// Reads a mask; with `normalize` the coefficients are rescaled to sum to 2
/// first, otherwise a sum other than 2 is an error.
pub fn parse_mask(text: &str, normalize: bool) -> Result<Mask> {
    let coeffs = parse_mask_coefficients(text)?;
    if normalize {
        Mask::normalized(coeffs)
    } else {
        Mask::new(coeffs)
    }
}

pub fn emit_mask_json(coeffs: &[ExactScalar]) -> String {
    let mut out = String::from("{\n  \"coefficients\": [\n");
    for (i, c) in coeffs.iter().enumerate() {
        let sep = if i + 1 < coeffs.len() { "," } else { "" };
        writeln!(
            out,
            "    [{}, {}, {}, {}]{sep}",
            c.re.numer(),
            c.re.denom(),
            c.im.numer(),
            c.im.denom()
        )
        .unwrap();
    }
    out.push_str("  ]\n}\n");
    out
}

/// The mask value table as CSV rows `q,re_num,re_den,im_num,im_den`: the value
/// of `m` on `[q 2^{-r}, (q+1) 2^{-r})`.
pub fn emit_mask_table_csv(m: &Mask) -> String {
    let mut out = format!("resolution\n{}\nq,re_num,re_den,im_num,im_den\n", m.resolution());
    for (q, v) in m.table().iter().enumerate() {
        writeln!(
            out,
            "{q},{},{},{},{}",
            v.re.numer(),
            v.re.denom(),
            v.im.numer(),
            v.im.denom()
        )
        .unwrap();
    }
    out
}

fn frac_str(v: &ExactScalar) -> String {
    v.to_string()
}

pub fn emit_theorem1_json(r: &Theorem1Report) -> String {
    let blocks: Vec<_> = r
        .fhat_values
        .iter()
        .map(|(n, v)| {
            let p = &r.paper_constant[n];
            serde_json::json!({
                "n": n,
                "computed": frac_str(v),
                "paper_value": frac_str(p),
                "matches_paper": v == p,
            })
        })
        .collect();
    let sums: Vec<_> = r
        .partial_sums
        .iter()
        .map(|(n, v)| serde_json::json!({ "N": n, "value": frac_str(v) }))
        .collect();
    let doc = serde_json::json!({
        "n_range": [r.n_range.0, r.n_range.1],
        "blocks": blocks,
        "block_zero": {
            "n": 0,
            "computed": frac_str(&r.block_zero.0),
            "paper_value": frac_str(&r.block_zero.1),
            "matches_paper": r.block_zero.0 == r.block_zero.1,
        },
        "deviations": r.deviations(),
        "partial_sums": sums,
        "partial_sums_increasing": r.partial_sums_increasing(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

pub fn emit_theorem1_csv(r: &Theorem1Report) -> String {
    let mut out = String::from("n,computed_num,computed_den,paper_value_num,paper_value_den\n");
    for (n, v) in &r.fhat_values {
        let p = &r.paper_constant[n];
        writeln!(
            out,
            "{n},{},{},{},{}",
            v.re.numer(),
            v.re.denom(),
            p.re.numer(),
            p.re.denom()
        )
        .unwrap();
    }
    out
}

/// Formats an exact scalar for single-value output; zero imaginary parts are
/// dropped.
pub fn format_scalar(v: &ExactScalar) -> String {
    if v.im.is_zero() {
        v.re.to_string()
    } else {
        v.to_string()
    }
}
