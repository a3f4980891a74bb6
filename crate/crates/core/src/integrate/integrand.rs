use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A deterministic real function on `R^d`.
pub trait Integrand: Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64 + Sync> Integrand for F {
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Integrands selectable by name on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// `sin(x_1^2)`
    SinX2,
    Const(f64),
    /// `<a, x> + b`
    Linear { coeffs: Vec<f64>, offset: f64 },
}

impl Integrand for Builtin {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Builtin::SinX2 => (x[0] * x[0]).sin(),
            Builtin::Const(c) => *c,
            Builtin::Linear { coeffs, offset } => {
                coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + offset
            }
        }
    }
}

impl Builtin {
    /// Checks that a linear integrand has one coefficient per coordinate.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Builtin::Linear { coeffs, .. } if coeffs.len() != d => Err(Error::InvalidArgument(format!(
                "linear integrand has {} coefficients for dimension {d}",
                coeffs.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Parses `sinx2`, `const1`, `const:<c>` and `linear:<a_1>,...,<a_d>[;<b>]`.
impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("integrand {s:?}: {msg}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("bad number"));
        match s {
            "sinx2" => return Ok(Builtin::SinX2),
            "const1" => return Ok(Builtin::Const(1.0)),
            _ => {}
        }
        if let Some(c) = s.strip_prefix("const:") {
            return Ok(Builtin::Const(num(c)?));
        }
        if let Some(rest) = s.strip_prefix("linear:") {
            let (a, b) = match rest.split_once(';') {
                Some((a, b)) => (a, num(b)?),
                None => (rest, 0.0),
            };
            let coeffs = a.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Ok(Builtin::Linear { coeffs, offset: b });
        }
        Err(bad("expected sinx2, const1, const:<c> or linear:<coeffs>[;<offset>]"))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::SinX2 => write!(f, "sinx2"),
            Builtin::Const(c) => write!(f, "const:{c}"),
            Builtin::Linear { coeffs, offset } => {
                let a: Vec<String> = coeffs.iter().map(f64::to_string).collect();
                write!(f, "linear:{};{offset}", a.join(","))
            }
        }
    }
}
