//! Deterministic JSON emission: map keys come out sorted (serde_json's
//! default map is ordered) and every float is rounded to at most 12
//! significant digits before printing, so identical runs produce identical
//! bytes.

use serde::Serialize;
use serde_json::{Number, Value};

/// Rounds to 12 significant digits; the shortest round-trip representation
/// of the result never carries more.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = Number::from_f64(round_sig(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes with sorted keys and rounded floats, with a trailing newline.
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("output types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values print");
    s.push('\n');
    s
}
