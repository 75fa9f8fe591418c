//! Unit-suffixed quantities at the configuration boundary.
//!
//! Lengths accept `nm`, `um`, `µm`, `mm`, `cm` and `m`; a bare number is in
//! metres. Angles accept `deg` and `rad`; a bare number is in degrees.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};

fn split_number(text: &str) -> Result<(f64, &str)> {
    let text = text.trim();
    let lower = text.to_ascii_lowercase();
    if lower == "inf" || lower == "infinity" || lower == "+inf" {
        return Ok((f64::INFINITY, ""));
    }
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-' || ((c == 'e' || c == 'E') && is_exponent(text, i)))
        })
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let value: f64 = text[..end]
        .parse()
        .map_err(|_| Error::Config(format!("malformed quantity {text:?}")))?;
    Ok((value, text[end..].trim()))
}

/// `e` followed by a digit or sign is an exponent, not a unit.
fn is_exponent(text: &str, i: usize) -> bool {
    matches!(text[i + 1..].chars().next(), Some(c) if c.is_ascii_digit() || c == '+' || c == '-')
}

pub fn parse_length(text: &str) -> Result<f64> {
    let (v, unit) = split_number(text)?;
    let per_metre = match unit {
        "" | "m" => 1.0,
        "cm" => 1e2,
        "mm" => 1e3,
        "um" | "µm" | "μm" => 1e6,
        "nm" => 1e9,
        _ => return Err(Error::Config(format!("unknown length unit {unit:?} in {text:?}"))),
    };
    Ok(v / per_metre)
}

pub fn parse_angle(text: &str) -> Result<f64> {
    let (v, unit) = split_number(text)?;
    match unit {
        "" | "deg" | "°" => Ok(v.to_radians()),
        "rad" => Ok(v),
        _ => Err(Error::Config(format!("unknown angle unit {unit:?} in {text:?}"))),
    }
}

/// Radians as a lossless config string.
pub fn format_angle(radians: f64) -> String {
    format!("{radians}rad")
}

macro_rules! quantity {
    ($name:ident, $parse:ident, $bare:expr, $what:literal) => {
        /// Deserialises from a number or a unit-suffixed string.
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str(concat!("a number or a string ", $what))
                    }
                    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<$name, E> {
                        Ok($name($bare(v)))
                    }
                    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<$name, E> {
                        Ok($name($bare(v as f64)))
                    }
                    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<$name, E> {
                        Ok($name($bare(v as f64)))
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<$name, E> {
                        $parse(v).map($name).map_err(E::custom)
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

quantity!(Length, parse_length, |v: f64| v, "such as \"530nm\"");
quantity!(Angle, parse_angle, |v: f64| v * PI / 180.0, "such as \"9deg\"");
