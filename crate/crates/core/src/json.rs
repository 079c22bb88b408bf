//! JSON output with floats written at 17 significant digits.
//!
//! `serde_json` writes the shortest round-tripping representation. Output
//! documents from this crate instead use a fixed 17-significant-digit
//! rendering (`%.17g` style) so that certificates are byte-stable and carry
//! full precision regardless of the printing library.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

#[derive(Clone, Copy, Debug, Default)]
struct SigDigitsFormatter;

impl Formatter for SigDigitsFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_g17(value as f64).as_bytes())
    }

    fn write_null<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        CompactFormatter.write_null(writer)
    }
}

/// Serialises `value` to a single-line JSON document.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SigDigitsFormatter);
    value.serialize(&mut ser)?;
    // The formatter only ever writes ASCII.
    Ok(String::from_utf8(out).expect("JSON output is ASCII"))
}

/// Renders a finite float with 17 significant digits, trimming trailing
/// zeros. Integral values keep a trailing `.0`.
pub fn format_g17(value: f64) -> String {
    if !value.is_finite() {
        return "null".to_owned();
    }
    if value == 0.0 {
        return if value.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-5..17).contains(&exp) {
        let trimmed = digits.trim_end_matches('0');
        out.push_str(&trimmed[..1]);
        if trimmed.len() > 1 {
            out.push('.');
            out.push_str(&trimmed[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
        return out;
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = (exp + 1) as usize;
        (digits[..split].to_owned(), digits[split..].to_owned())
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        ("0".to_owned(), format!("{zeros}{digits}"))
    };
    let frac = frac_part.trim_end_matches('0');
    out.push_str(&int_part);
    out.push('.');
    out.push_str(if frac.is_empty() { "0" } else { frac });
    out
}
