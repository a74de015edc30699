//! Report records and their JSON encoding with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::verify::residual::SkippedPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value ≤ tol`.
    Upper,
    /// Passes when `value ≥ tol`.
    Lower,
    /// Passes when `value = tol`.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub bound: Bound,
    pub pass: bool,
    /// State or point where the value was measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<f64>>,
}

impl Gate {
    fn make(name: impl Into<String>, value: f64, tol: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::Upper => value <= tol,
            Bound::Lower => value >= tol,
            Bound::Equal => value == tol,
        };
        Self {
            name: name.into(),
            value,
            tol,
            bound,
            pass,
            at: None,
        }
    }

    pub fn upper(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::make(name, value, tol, Bound::Upper)
    }

    pub fn lower(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::make(name, value, tol, Bound::Lower)
    }

    pub fn equal(name: impl Into<String>, value: f64, target: f64) -> Self {
        Self::make(name, value, target, Bound::Equal)
    }

    pub fn at(mut self, x: &[f64]) -> Self {
        if !x.is_empty() {
            self.at = Some(x.to_vec());
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_echo: Value,
    pub metrics: Map<String, Value>,
    pub gates: Vec<Gate>,
    pub skipped_points: Vec<SkippedPoint>,
}

impl Report {
    pub fn new(command: &str, config_echo: Value) -> Self {
        Self {
            command: command.to_string(),
            config_echo,
            metrics: Map::new(),
            gates: Vec::new(),
            skipped_points: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metrics.insert(name.to_string(), v);
    }

    pub fn gate(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Pretty JSON with every float written as `d.ddddddddddddddddde±x`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(v))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
