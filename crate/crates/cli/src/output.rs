//! Deterministic JSON rendering.
//!
//! Keys come out sorted (serde_json's default map is a BTreeMap) and every
//! float is printed with 17 significant digits, so fixed inputs give
//! byte-identical output.

use std::io;

use num_complex::Complex64;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

use zetareg::{PoleInfo, ZetaValue};

struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            // keeps −0 and +0 apart without an exponent
            return writer.write_all(if value.is_sign_negative() { b"-0.0" } else { b"0.0" });
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact rendering with 17 significant digits per float.
pub fn render(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    serde::Serialize::serialize(value, &mut ser).expect("serializing a JSON value cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Non-finite floats have no JSON spelling; they are written as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn pole(p: &Option<PoleInfo>) -> Value {
    match p {
        None => Value::Null,
        Some(p) => json!({
            "location": complex(p.location),
            "residue": complex(p.residue),
            "distance": num(p.distance),
        }),
    }
}

pub fn zeta_value(v: &ZetaValue) -> Value {
    json!({
        "value": complex(v.value),
        "err_estimate": num(v.err_estimate),
        "nearest_pole": pole(&v.nearest_pole),
    })
}
