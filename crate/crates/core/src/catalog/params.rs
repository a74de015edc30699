use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diffkit::{Jet2, Scalar};
use crate::error::{Error, Result};

pub type ParamMap = BTreeMap<String, Value>;

/// A built-in function of one variable, selected by name in configs:
/// `{"poly": [a0, a1, …]}`, `{"sin": {"amp": …, "freq": …, "phase": …}}`,
/// `{"cos": {…}}` or `{"exp": {"amp": …, "rate": …}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum UniFn {
    Poly(Vec<f64>),
    Sin {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    Cos {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    Exp {
        amp: f64,
        rate: f64,
    },
}

impl Default for UniFn {
    fn default() -> Self {
        UniFn::Poly(Vec::new())
    }
}

impl UniFn {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            UniFn::Poly(c) => c.iter().all(|v| v.is_finite()),
            UniFn::Sin { amp, freq, phase } | UniFn::Cos { amp, freq, phase } => {
                amp.is_finite() && freq.is_finite() && phase.is_finite()
            }
            UniFn::Exp { amp, rate } => amp.is_finite() && rate.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("non-finite coefficient in {self:?}")))
        }
    }

    /// Composes the function with a jet.
    pub fn apply<S: Scalar>(&self, x: &Jet2<S>) -> Jet2<S> {
        let dim = x.dim();
        match self {
            UniFn::Poly(coeffs) => {
                // Horner
                let mut acc = Jet2::constant(dim, S::zero());
                for &a in coeffs.iter().rev() {
                    acc = acc * x + a;
                }
                acc
            }
            UniFn::Sin { amp, freq, phase } => (x * *freq + *phase).sin() * *amp,
            UniFn::Cos { amp, freq, phase } => (x * *freq + *phase).cos() * *amp,
            UniFn::Exp { amp, rate } => (x * *rate).exp() * *amp,
        }
    }
}

/// Typed access to a JSON parameter map; keys not consumed by the entry
/// are rejected by [`ParamReader::finish`].
pub struct ParamReader<'a> {
    map: &'a ParamMap,
    used: BTreeSet<&'a str>,
    echo: ParamMap,
}

impl<'a> ParamReader<'a> {
    pub fn new(map: &'a ParamMap) -> Self {
        Self {
            map,
            used: BTreeSet::new(),
            echo: ParamMap::new(),
        }
    }

    fn take(&mut self, name: &str) -> Option<&'a Value> {
        let (key, value) = self.map.get_key_value(name)?;
        self.used.insert(key.as_str());
        Some(value)
    }

    pub fn f64(&mut self, name: &str, default: f64) -> Result<f64> {
        let v = match self.take(name) {
            None => default,
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::InvalidParams(format!("parameter `{name}` must be a number, got {v}")))?,
        };
        if !v.is_finite() {
            return Err(Error::InvalidParams(format!("parameter `{name}` must be finite")));
        }
        self.echo.insert(name.to_string(), Value::from(v));
        Ok(v)
    }

    /// A number or a `[re, im]` pair.
    pub fn complex(&mut self, name: &str, default: Complex64) -> Result<Complex64> {
        let v = match self.take(name) {
            None => default,
            Some(Value::Array(parts)) if parts.len() == 2 => match (parts[0].as_f64(), parts[1].as_f64()) {
                (Some(re), Some(im)) => Complex64::new(re, im),
                _ => return Err(Error::InvalidParams(format!("parameter `{name}` must be [re, im]"))),
            },
            Some(v) => Complex64::new(
                v.as_f64()
                    .ok_or_else(|| Error::InvalidParams(format!("parameter `{name}` must be a number or [re, im]")))?,
                0.0,
            ),
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidParams(format!("parameter `{name}` must be finite")));
        }
        let echo = if v.im == 0.0 {
            Value::from(v.re)
        } else {
            Value::from(vec![v.re, v.im])
        };
        self.echo.insert(name.to_string(), echo);
        Ok(v)
    }

    pub fn function(&mut self, name: &str) -> Result<UniFn> {
        let f = match self.take(name) {
            None => UniFn::default(),
            Some(v) => serde_json::from_value::<UniFn>(v.clone())
                .map_err(|e| Error::InvalidParams(format!("parameter `{name}`: {e}")))?,
        };
        f.validate()?;
        self.echo.insert(
            name.to_string(),
            serde_json::to_value(&f).map_err(|e| Error::InvalidParams(e.to_string()))?,
        );
        Ok(f)
    }

    /// Rejects unknown keys; returns the resolved parameters.
    pub fn finish(self) -> Result<ParamMap> {
        let unknown: Vec<&str> = self
            .map
            .keys()
            .map(String::as_str)
            .filter(|k| !self.used.contains(k))
            .collect();
        if !unknown.is_empty() {
            return Err(Error::InvalidParams(format!(
                "unknown parameter(s): {}",
                unknown.join(", ")
            )));
        }
        Ok(self.echo)
    }
}

pub fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.to_string()))
    }
}
