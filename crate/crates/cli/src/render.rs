use cutoff_core::graphlab::fmt12;
use cutoff_core::qcalc::to_f64;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

/// `exact (decimal)`, or just the integer when the value is one.
pub fn exact(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} ({})", fmt12(to_f64(r)))
    }
}

/// Floats cut to twelve significant digits, recursively.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            if let Some(r) = fmt12(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}
