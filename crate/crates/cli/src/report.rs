//! Report JSON with a fixed set of top-level fields.

use std::io;

use mare_core::problem::{Check, CheckStatus, Regime};
use mare_core::Matrix;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Clone, Debug, Serialize)]
pub struct ReportCheck {
    pub id: usize,
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub step: Option<String>,
    pub message: String,
}

/// The twelve leading fields are always present, `null` when they do not
/// apply; the rest appear only when set.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub regime: Option<Regime>,
    pub drift: Option<f64>,
    pub r: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iterations: Option<usize>,
    pub residual_primal: Option<f64>,
    pub residual_dual: Option<f64>,
    pub rho_phi_psi: Option<f64>,
    pub theoretical_rate: Option<f64>,
    pub observed_rate: Option<f64>,
    pub checks: Vec<ReportCheck>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flags: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<GridRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub alpha: f64,
    pub beta: f64,
    pub theoretical_rate: Option<f64>,
    pub observed_rate: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

impl Report {
    pub fn push_check(&mut self, name: &str, status: CheckStatus, value: f64, detail: String) {
        self.checks.push(ReportCheck {
            id: self.checks.len() + 1,
            name: name.to_string(),
            status,
            value,
            detail,
        });
    }

    pub fn push_checks(&mut self, checks: &[Check]) {
        for c in checks {
            self.push_check(&c.name, c.status, c.value, c.detail.clone());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        to_json_sig17(self)
    }
}

pub fn pass_or_fail(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Pretty JSON with every float written as `d.ddddddddddddddddde±x`.
pub fn to_json_sig17<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serializes");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_fields_always_present() {
        let v: serde_json::Value = serde_json::from_str(&Report::default().to_json()).unwrap();
        let obj = v.as_object().unwrap();
        for key in [
            "regime",
            "drift",
            "r",
            "alpha",
            "beta",
            "iterations",
            "residual_primal",
            "residual_dual",
            "rho_phi_psi",
            "theoretical_rate",
            "observed_rate",
            "checks",
        ] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert_eq!(obj.len(), 12);
    }

    #[test]
    fn floats_carry_17_digits() {
        let text = to_json_sig17(&vec![0.1, 1.0, -2.5e-300, 0.0]);
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("1.0000000000000000e0"));
        assert!(text.contains("-2.5000000000000000e-300"));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.1, 1.0, -2.5e-300, 0.0]);
    }
}
