//! Instance files, fixed-precision JSON and CSV emission.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::SweepRecord;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// `{"spectrum": [..], "shift": [..]}`; the shift is optional and written in
/// the eigenbasis of the sorted spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub spectrum: Spectrum,
    #[serde(default)]
    pub shift: Vec<f64>,
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::domain(format!("invalid JSON in {what}: {e}")))
}

/// Rendering with 17 significant digits: plain decimals for magnitudes in
/// `[1e-5, 1e16)`, exponent form otherwise.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent form") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// `serde_json` formatter that routes every float through [`fmt_f64`].
#[derive(Default)]
pub struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

/// One-line JSON with 17-digit floats; non-finite values become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub const SWEEP_HEADER: [&str; 6] = ["instance_id", "regime_x", "regime_y", "distance", "bound", "ratio"];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io_err = |e: csv::Error| Error::domain(format!("CSV write failed: {e}"));
    wr.write_record(SWEEP_HEADER).map_err(io_err)?;
    for r in rows {
        wr.write_record([
            r.instance_id.to_string(),
            r.regime_x.to_string(),
            r.regime_y.to_string(),
            fmt_f64(r.result.distance),
            fmt_f64(r.result.bound.value),
            fmt_f64(r.result.ratio),
        ])
        .map_err(io_err)?;
    }
    wr.flush().map_err(|e| Error::domain(format!("CSV write failed: {e}")))?;
    Ok(())
}
