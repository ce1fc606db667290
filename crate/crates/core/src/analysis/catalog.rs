//! Built-in function families with known hypothesis status.

use std::fmt;
use std::str::FromStr;

use crate::cones::{Cone, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::SymMat;
use crate::point::dot;
use crate::value::ExtReal;

use super::FnSource;

/// Default polynomial coefficients `c0, c1, c2` of `s = <e, x>`.
pub const DEFAULT_POLY: [f64; 3] = [0.0, 0.5, 0.25];

#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    /// Use the cone's unit element.
    Default,
    /// Multiple of the unit element.
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndicatorSet {
    Origin,
    Points(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogFn {
    /// `|x|^2`
    Quad,
    /// `<a, x>`
    Lin(Param),
    /// `|x - x0|^2`
    ShiftedQuad(Param),
    /// `0` on a finite node set, `+inf` elsewhere
    Indicator(IndicatorSet),
    /// `tr x` (PSD only)
    Trace,
    /// `max_i x_i` (orthant only)
    MaxCoord,
    /// `-ln det x` on positive definite matrices, `+inf` on the boundary (PSD only)
    LogDetBarrier,
    /// `sum_k c_k s^k` with `s = <e, x>`
    Polynomial(Vec<f64>),
}

impl CatalogFn {
    /// Every family with default parameters.
    pub fn all_defaults() -> Vec<CatalogFn> {
        vec![
            CatalogFn::Quad,
            CatalogFn::Lin(Param::Default),
            CatalogFn::ShiftedQuad(Param::Default),
            CatalogFn::Indicator(IndicatorSet::Origin),
            CatalogFn::Trace,
            CatalogFn::MaxCoord,
            CatalogFn::LogDetBarrier,
            CatalogFn::Polynomial(DEFAULT_POLY.to_vec()),
        ]
    }

    pub fn applies_to(&self, cone: Cone) -> bool {
        match self {
            CatalogFn::Trace | CatalogFn::LogDetBarrier => matches!(cone, Cone::Psd(_)),
            CatalogFn::MaxCoord => matches!(cone, Cone::Orthant(_)),
            _ => true,
        }
    }

    /// Resolve parameters against a cone.
    pub fn bind(&self, cone: Cone) -> Result<BoundFn> {
        if !self.applies_to(cone) {
            return Err(Error::InvalidParameter(format!(
                "{self} is not defined on {cone}"
            )));
        }
        let d = cone.ambient_dim();
        let e = cone.unit_element().into_coords();
        let resolve = |p: &Param| -> Result<Vec<f64>> {
            match p {
                Param::Default => Ok(e.clone()),
                Param::Scalar(s) => Ok(e.iter().map(|v| v * s).collect()),
                Param::Vector(v) if v.len() == 1 && d > 1 => {
                    Ok(e.iter().map(|x| x * v[0]).collect())
                }
                Param::Vector(v) => {
                    if v.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: v.len(),
                        });
                    }
                    Ok(v.clone())
                }
            }
        };
        let kind = match self {
            CatalogFn::Quad => Bound::Quad,
            CatalogFn::Lin(p) => Bound::Lin(resolve(p)?),
            CatalogFn::ShiftedQuad(p) => Bound::ShiftedQuad(resolve(p)?),
            CatalogFn::Indicator(IndicatorSet::Origin) => Bound::Indicator(vec![vec![0.0; d]]),
            CatalogFn::Indicator(IndicatorSet::Points(pts)) => {
                for p in pts {
                    if p.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: p.len(),
                        });
                    }
                    if !cone.contains_slice(p, DEFAULT_TOL) {
                        return Err(Error::NotInCone(cone.to_string()));
                    }
                }
                Bound::Indicator(pts.clone())
            }
            CatalogFn::Trace => Bound::Lin(e),
            CatalogFn::MaxCoord => Bound::MaxCoord,
            CatalogFn::LogDetBarrier => Bound::LogDet,
            CatalogFn::Polynomial(c) => {
                if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "polynomial needs finite coefficients".into(),
                    ));
                }
                Bound::Poly(e, c.clone())
            }
        };
        Ok(BoundFn {
            spec: self.clone(),
            cone,
            kind,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Bound {
    Quad,
    Lin(Vec<f64>),
    ShiftedQuad(Vec<f64>),
    Indicator(Vec<Vec<f64>>),
    MaxCoord,
    LogDet,
    Poly(Vec<f64>, Vec<f64>),
}

/// A catalog function with parameters resolved for a particular cone.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundFn {
    spec: CatalogFn,
    cone: Cone,
    kind: Bound,
}

impl BoundFn {
    pub fn spec(&self) -> &CatalogFn {
        &self.spec
    }

    pub fn cone(&self) -> Cone {
        self.cone
    }

    /// Whether the family is proper, convex, lsc and nondecreasing on the cone
    /// (by the analytic criterion for each family).
    pub fn in_gamma(&self) -> bool {
        let c = self.cone;
        match &self.kind {
            Bound::Quad | Bound::MaxCoord => true,
            Bound::Lin(a) => c.contains_slice(a, DEFAULT_TOL),
            Bound::ShiftedQuad(x0) => {
                let neg: Vec<f64> = x0.iter().map(|v| -v).collect();
                c.contains_slice(&neg, DEFAULT_TOL)
            }
            Bound::Indicator(pts) => pts.len() == 1 && pts[0].iter().all(|&v| v == 0.0),
            // convex but decreasing along the cone
            Bound::LogDet => false,
            Bound::Poly(_, coef) => coef.iter().skip(1).all(|&v| v >= 0.0),
        }
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match &self.kind {
            Bound::Quad => ExtReal::finite(dot(x, x)),
            Bound::Lin(a) => ExtReal::finite(dot(a, x)),
            Bound::ShiftedQuad(x0) => {
                ExtReal::finite(x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum())
            }
            Bound::Indicator(pts) => {
                let hit = pts
                    .iter()
                    .any(|p| p.iter().zip(x).all(|(a, b)| (a - b).abs() <= DEFAULT_TOL));
                if hit {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }
            Bound::MaxCoord => ExtReal::finite(x.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            Bound::LogDet => {
                let Cone::Psd(n) = self.cone else {
                    unreachable!()
                };
                let e = SymMat::from_slice(n, x).expect("dims agree").eigh();
                if e.values[0] <= 1e-12 {
                    ExtReal::PosInf
                } else {
                    ExtReal::finite(-e.values.iter().map(|l| l.ln()).sum::<f64>())
                }
            }
            Bound::Poly(e, coef) => {
                let s = dot(e, x);
                // Horner
                ExtReal::finite(coef.iter().rev().fold(0.0, |acc, &c| acc * s + c))
            }
        }
    }

    /// Continuum monotone conjugate where a closed form is known.
    pub fn closed_form_conjugate(&self, y: &[f64]) -> Option<ExtReal> {
        let c = self.cone;
        match &self.kind {
            Bound::Quad => {
                let p = c.project_slice(y);
                Some(ExtReal::finite(dot(&p, &p) / 4.0))
            }
            Bound::Lin(a) => {
                let diff: Vec<f64> = a.iter().zip(y).map(|(a, b)| a - b).collect();
                Some(if c.contains_slice(&diff, DEFAULT_TOL) {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                })
            }
            Bound::ShiftedQuad(x0) => {
                let t: Vec<f64> = x0.iter().zip(y).map(|(a, b)| a + b / 2.0).collect();
                let z = c.project_slice(&t);
                let r: f64 = z.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
                Some(ExtReal::finite(dot(&z, y) - r))
            }
            Bound::Indicator(pts) => Some(ExtReal::finite(
                pts.iter()
                    .map(|p| dot(p, y))
                    .fold(f64::NEG_INFINITY, f64::max),
            )),
            _ => None,
        }
    }
}

impl FnSource for BoundFn {
    fn eval(&self, x: &[f64]) -> ExtReal {
        BoundFn::eval(self, x)
    }

    fn describe(&self) -> String {
        format!("catalog:{}", self.spec)
    }

    fn gamma_flag(&self) -> Option<bool> {
        Some(self.in_gamma())
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Default => Ok(()),
            Param::Scalar(s) => write!(f, "{s}"),
            Param::Vector(v) => write!(f, "{}", fmt_vec(v)),
        }
    }
}

impl fmt::Display for CatalogFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogFn::Quad => write!(f, "quad"),
            CatalogFn::Lin(Param::Default) => write!(f, "lin"),
            CatalogFn::Lin(p) => write!(f, "lin:{p}"),
            CatalogFn::ShiftedQuad(Param::Default) => write!(f, "shifted-quad"),
            CatalogFn::ShiftedQuad(p) => write!(f, "shifted-quad:{p}"),
            CatalogFn::Indicator(IndicatorSet::Origin) => write!(f, "indicator:0"),
            CatalogFn::Indicator(IndicatorSet::Points(p)) => {
                let parts: Vec<String> = p.iter().map(|v| fmt_vec(v)).collect();
                write!(f, "indicator:{}", parts.join(";"))
            }
            CatalogFn::Trace => write!(f, "trace"),
            CatalogFn::MaxCoord => write!(f, "maxcoord"),
            CatalogFn::LogDetBarrier => write!(f, "logdet-barrier"),
            CatalogFn::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "polynomial:{}", parts.join(","))
            }
        }
    }
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let t = t.trim_start_matches('{').trim_end_matches('}');
    if t.trim().is_empty() {
        return Err(Error::parse(s, "empty vector"));
    }
    t.split(',')
        .map(|p| {
            let p = p.trim();
            let v: f64 = p
                .parse()
                .map_err(|_| Error::parse(p, "expected a number"))?;
            if !v.is_finite() {
                return Err(Error::parse(p, "expected a finite number"));
            }
            Ok(v)
        })
        .collect()
}

fn parse_param(s: &str) -> Result<Param> {
    let s = s.trim();
    let s = s
        .strip_prefix("x0=")
        .or_else(|| s.strip_prefix("a="))
        .unwrap_or(s);
    let v = parse_vec(s)?;
    if v.len() == 1 && !s.contains('(') {
        Ok(Param::Scalar(v[0]))
    } else {
        Ok(Param::Vector(v))
    }
}

impl FromStr for CatalogFn {
    type Err = Error;

    /// Accepts the name with or without a leading `catalog:`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("catalog:").unwrap_or(s);
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let no_arg = |f: CatalogFn| match arg {
            None => Ok(f),
            Some(a) => Err(Error::parse(a, format!("`{name}` takes no parameters"))),
        };
        match name {
            "quad" => no_arg(CatalogFn::Quad),
            "trace" => no_arg(CatalogFn::Trace),
            "maxcoord" => no_arg(CatalogFn::MaxCoord),
            "logdet-barrier" => no_arg(CatalogFn::LogDetBarrier),
            "lin" => Ok(CatalogFn::Lin(
                arg.map(parse_param).transpose()?.unwrap_or(Param::Default),
            )),
            "shifted-quad" => Ok(CatalogFn::ShiftedQuad(
                arg.map(parse_param).transpose()?.unwrap_or(Param::Default),
            )),
            "indicator" => {
                let a = arg.unwrap_or("0").trim();
                if matches!(a, "0" | "{0}" | "origin") {
                    return Ok(CatalogFn::Indicator(IndicatorSet::Origin));
                }
                let inner = a.trim_start_matches('{').trim_end_matches('}');
                let pts = inner
                    .split(';')
                    .map(parse_vec)
                    .collect::<Result<Vec<_>>>()?;
                Ok(CatalogFn::Indicator(IndicatorSet::Points(pts)))
            }
            "polynomial" => match arg {
                None => Ok(CatalogFn::Polynomial(DEFAULT_POLY.to_vec())),
                Some(a) => Ok(CatalogFn::Polynomial(parse_vec(a)?)),
            },
            other => Err(Error::parse(other, "unknown catalog function")),
        }
    }
}
