use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar used for data values, geometry and metrics: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Renders a value the way tooltips and labels show it: shortest round-trip
/// decimal, no exponent, no thousands separators, no trailing zeros.
pub fn format_value<S: Scalar>(v: S) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_zero() {
        return "0".to_string();
    }
    format!("{v}")
}

/// Equality that treats two NaNs as equal.
pub fn same_value<S: Scalar>(a: S, b: S) -> bool {
    (a.is_nan() && b.is_nan()) || a == b
}


/// Serde adapter that writes finite values as JSON numbers and non-finite
/// values as the strings `"NaN"`, `"Infinity"`, `"-Infinity"`.
pub mod serde_value {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Scalar;

    pub fn serialize<S: Scalar, Ser: Serializer>(v: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        let x = v.to_f64_lossy();
        if x.is_nan() {
            ser.serialize_str("NaN")
        } else if x.is_infinite() {
            ser.serialize_str(if x > 0.0 { "Infinity" } else { "-Infinity" })
        } else {
            ser.serialize_f64(x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(de: D) -> Result<S, D::Error> {
        let x = match Repr::deserialize(de)? {
            Repr::Num(x) => x,
            Repr::Text(t) => match t.as_str() {
                "NaN" => f64::NAN,
                "Infinity" => f64::INFINITY,
                "-Infinity" => f64::NEG_INFINITY,
                other => return Err(D::Error::custom(format!("expected a number or \"NaN\", got \"{other}\""))),
            },
        };
        Ok(S::from_f64_lossy(x))
    }
}
