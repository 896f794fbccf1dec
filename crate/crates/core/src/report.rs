//! Number formatting and the configuration report document.
//!
//! Every floating point number written by this crate carries 17 significant
//! digits, which round-trips any `f64` exactly.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io;

/// Largest admissible `k`.
pub const K0: usize = 8;

/// Decimal rendering with 17 significant digits; fixed point for moderate
/// magnitudes, scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let mag = x.abs().log10().floor();
    if (-4.0..15.0).contains(&mag) {
        format!("{:.*}", (16.0 - mag) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

/// A JSON formatter that writes floats through [`fmt_num`] and otherwise
/// behaves like the wrapped formatter.
pub struct SigFormatter<F = PrettyFormatter<'static>>(pub F);

macro_rules! delegate {
    ($($name:ident $(, $arg:ident: $ty:ty)*;)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl<F: Formatter> Formatter for SigFormatter<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_num(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    delegate! {
        begin_array;
        end_array;
        begin_array_value, first: bool;
        end_array_value;
        begin_object;
        end_object;
        begin_object_key, first: bool;
        end_object_key;
        begin_object_value;
        end_object_value;
    }
}

/// Pretty JSON with full-precision numbers.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// The configuration report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigReport {
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    pub l: u32,
    pub k: usize,
    pub c_hat: f64,
    pub alpha0: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub mu_kbar: f64,
    pub mean_0_alpha0: f64,
    pub mean_mukbar_alpha0: f64,
    pub gaps_alpha: Vec<f64>,
    pub gaps_beta: Vec<f64>,
}

impl ConfigReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// Shape checks that do not need any evaluation.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(1..=K0).contains(&self.k) {
            return bad(format!("k = {} outside 1..={K0}", self.k));
        }
        if self.l == 0 {
            return bad("l must be positive".into());
        }
        if self.alphas.len() != self.k || self.betas.len() != self.k {
            return bad(format!(
                "k = {} but {} alphas and {} betas",
                self.k,
                self.alphas.len(),
                self.betas.len()
            ));
        }
        if self.gaps_alpha.len() != self.k || self.gaps_beta.len() != self.k - 1 {
            return bad("gap lists do not match k".into());
        }
        Ok(())
    }
}

pub fn parse_config_report(text: &str) -> Result<ConfigReport> {
    let r: ConfigReport = serde_json::from_str(text)?;
    r.check_shape()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConfigReport {
        ConfigReport {
            t: 1e4,
            epsilon: 0.1,
            l: 1,
            k: 2,
            c_hat: 0.7123456789012345,
            alpha0: 10100.25,
            alphas: vec![10560.5, 11020.125],
            betas: vec![10555.0, 11010.0],
            lhs: 2.651,
            rhs: 2.6510000001,
            residual: 3.7e-11,
            mu_kbar: 0.0,
            mean_0_alpha0: -2.4e-4,
            mean_mukbar_alpha0: -2.4e-4,
            gaps_alpha: vec![460.25, 459.625],
            gaps_beta: vec![455.0],
        }
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(1e4), "10000.000000000000");
        assert_eq!(fmt_num(-2.5e-7), "-2.4999999999999999e-7");
        assert_eq!(fmt_num(0.0), "0.0");
        for &x in &[
            0.1,
            1.0 / 3.0,
            12345.678901234567,
            3.7e-11,
            -9.99e20,
            1e-4,
            9.999999999999999e14,
        ] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x, "{x}");
        }
    }

    #[test]
    fn report_round_trip() {
        let r = sample();
        let text = r.to_json().unwrap();
        assert!(text.contains("\"epsilon\": 0.10000000000000001"));
        assert!(text.contains("\"l\": 1,"));
        let back = parse_config_report(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn report_keys() {
        let v: serde_json::Value = serde_json::from_str(&sample().to_json().unwrap()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let want = [
            "T",
            "epsilon",
            "l",
            "k",
            "c_hat",
            "alpha0",
            "alphas",
            "betas",
            "lhs",
            "rhs",
            "residual",
            "mu_kbar",
            "mean_0_alpha0",
            "mean_mukbar_alpha0",
            "gaps_alpha",
            "gaps_beta",
        ];
        let mut a = keys.clone();
        let mut b: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_reports() {
        assert!(parse_config_report("").is_err());
        assert!(parse_config_report("{}").is_err());
        let mut r = sample();
        r.k = 3;
        assert!(parse_config_report(&r.to_json().unwrap()).is_err());
        let text = sample().to_json().unwrap().replacen("{", "{\"extra\": 1,", 1);
        assert!(parse_config_report(&text).is_err());
    }
}
