//! Number formatting and CSV/JSON emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// `%.17g`: 17 significant digits, trailing zeros removed, exponent form
/// outside `1e-4 <= |x| < 1e17`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let dot = if frac.is_empty() { "" } else { "." };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{dot}{frac}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let (int, frac) = if exp >= 0 {
        let cut = exp as usize + 1;
        (digits[..cut].to_string(), digits[cut..].to_string())
    } else {
        ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

/// Destination for a command's output: a file or stdout.
pub fn open_sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn csv_writer(path: Option<&Path>) -> io::Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(open_sink(path)?))
}

pub fn write_json(path: Option<&Path>, value: &serde_json::Value) -> io::Result<()> {
    let mut sink = open_sink(path)?;
    serde_json::to_writer_pretty(&mut sink, value)?;
    sink.write_all(b"\n")?;
    sink.flush()
}

/// Re-emits a CSV with every numeric field reformatted; non-numeric fields pass through.
pub fn reformat_csv(input: &str) -> Result<String, csv::Error> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(input.as_bytes());
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let fields: Vec<String> = record
            .iter()
            .map(|f| match (i, f.parse::<i64>(), f.parse::<f64>()) {
                (0, _, _) => f.to_string(),
                (_, Ok(v), _) => v.to_string(),
                (_, _, Ok(v)) => fmt_g17(v),
                _ => f.to_string(),
            })
            .collect();
        writer.write_record(&fields)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("utf-8 input"))
}
