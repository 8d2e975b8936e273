use num_traits::{Signed, Zero};
use serde::Serialize;

use super::SolitonError;
use crate::exactpoly::{rational, Polynomial, Rational};
use crate::liealgebras::Value;

/// Which values of `c` make every residual vanish at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CSolution {
    Unique(Value),
    Any,
}

impl std::fmt::Display for CSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CSolution::Unique(v) => write!(f, "{v}"),
            CSolution::Any => f.write_str("any"),
        }
    }
}

/// Residuals split as `a_k * c + b_k`.
#[derive(Debug, Clone)]
pub struct LinearInC {
    pub a: Vec<Polynomial>,
    pub b: Vec<Polynomial>,
    c_index: usize,
    lambda_index: usize,
}

impl LinearInC {
    pub fn new(residuals: &[Polynomial]) -> Result<Self, SolitonError> {
        let vars =
            residuals.first().map(|r| r.vars().clone()).unwrap_or_else(crate::exactpoly::VariableTable::standard);
        let c_index = vars.require("c")?;
        let lambda_index = vars.require("lambda0")?;
        for (index, r) in residuals.iter().enumerate() {
            let degree = r.degree_in(c_index);
            if degree > 1 {
                return Err(SolitonError::NonlinearInC { index, degree });
            }
        }
        Ok(LinearInC {
            a: residuals.iter().map(|r| r.coefficient_of(c_index, 1)).collect(),
            b: residuals.iter().map(|r| r.coefficient_of(c_index, 0)).collect(),
            c_index,
            lambda_index,
        })
    }

    pub fn c_index(&self) -> usize {
        self.c_index
    }

    pub fn lambda_index(&self) -> usize {
        self.lambda_index
    }

    /// Coefficients with the parameters fixed, leaving polynomials in `lambda0`.
    pub fn specialize(&self, assignment: &[Option<Rational>]) -> LinearInC {
        LinearInC {
            a: self.a.iter().map(|p| p.partial_eval(assignment)).collect(),
            b: self.b.iter().map(|p| p.partial_eval(assignment)).collect(),
            c_index: self.c_index,
            lambda_index: self.lambda_index,
        }
    }

    /// Solves at an exact assignment covering every variable except `c`.
    pub fn solve_exact(&self, assignment: &[Option<Rational>]) -> Result<Option<CSolution>, SolitonError> {
        let a = eval_all(&self.a, assignment)?;
        let b = eval_all(&self.b, assignment)?;
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            return Ok(b.iter().all(Zero::is_zero).then_some(CSolution::Any));
        };
        let c = -&b[k] / &a[k];
        let ok = a.iter().zip(&b).all(|(ai, bi)| (ai * &c + bi).is_zero());
        Ok(ok.then_some(CSolution::Unique(Value::Exact(c))))
    }

    /// Float counterpart of [`Self::solve_exact`]. The tolerance is relative
    /// to `1 + max |coefficient|`.
    pub fn solve_float(&self, assignment: &[Option<f64>], tol: f64) -> Result<Option<CSolution>, SolitonError> {
        let a = self.a.iter().map(|p| p.eval_f64(assignment)).collect::<Result<Vec<_>, _>>()?;
        let b = self.b.iter().map(|p| p.eval_f64(assignment)).collect::<Result<Vec<_>, _>>()?;
        let scale = 1.0 + a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs()));
        let (k, amax) =
            a.iter().enumerate().fold((0, 0.0f64), |(k, m), (i, x)| if x.abs() > m { (i, x.abs()) } else { (k, m) });
        if amax < tol * scale {
            return Ok(b.iter().all(|x| x.abs() < tol * scale).then_some(CSolution::Any));
        }
        let c = -b[k] / a[k];
        let ok = a.iter().zip(&b).all(|(ai, bi)| (ai * c + bi).abs() < tol * scale * (1.0 + c.abs()));
        Ok(ok.then_some(CSolution::Unique(Value::Float(c))))
    }
}

fn eval_all(ps: &[Polynomial], assignment: &[Option<Rational>]) -> Result<Vec<Rational>, SolitonError> {
    Ok(ps.iter().map(|p| p.eval_indexed(assignment)).collect::<Result<Vec<_>, _>>()?)
}

/// Solves the residuals for `c` at a parameter point and a value of `lambda0`.
/// Exact values are used when both are exact.
pub fn solve_for_c(
    residuals: &[Polynomial],
    point: &crate::liealgebras::ParameterPoint,
    lambda0: &Value,
    tol: f64,
) -> Result<Option<CSolution>, SolitonError> {
    let lin = LinearInC::new(residuals)?;
    let nvars = residuals.first().map_or(0, |r| r.vars().len());
    match (point.exact_assignment(nvars), lambda0) {
        (Some(mut exact), Value::Exact(l)) => {
            exact[lin.lambda_index] = Some(l.clone());
            lin.solve_exact(&exact)
        }
        _ => {
            let mut floats = point.float_assignment(nvars);
            floats[lin.lambda_index] = Some(lambda0.to_f64());
            lin.solve_float(&floats, tol)
        }
    }
}

/// Largest absolute value among exact residual values, as a float.
pub(crate) fn max_abs(values: &[Rational]) -> f64 {
    values.iter().map(|v| rational::to_f64(&v.abs())).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{parse_polynomial, VariableTable};

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableTable::standard()).unwrap()
    }

    fn at(alpha: i64, lambda0: i64) -> Vec<Option<Rational>> {
        let mut v = vec![None; 7];
        v[0] = Some(rational::int(alpha));
        v[5] = Some(rational::int(lambda0));
        v
    }

    #[test]
    fn unique_any_and_none() {
        let lin = LinearInC::new(&[p("alpha*c - alpha^2*lambda0"), p("2*alpha*c - 2*alpha^2*lambda0")]).unwrap();
        assert_eq!(lin.solve_exact(&at(2, 3)).unwrap(), Some(CSolution::Unique(Value::Exact(rational::int(6)))));
        assert_eq!(lin.solve_exact(&at(0, 3)).unwrap(), Some(CSolution::Any));
        let lin = LinearInC::new(&[p("c - 1"), p("c - alpha")]).unwrap();
        assert_eq!(lin.solve_exact(&at(2, 0)).unwrap(), None);
        let lin = LinearInC::new(&[p("alpha")]).unwrap();
        assert_eq!(lin.solve_exact(&at(1, 0)).unwrap(), None);
    }

    #[test]
    fn float_agrees_with_exact() {
        let lin = LinearInC::new(&[p("alpha*c + 1/3*lambda0"), p("3*alpha*c + lambda0")]).unwrap();
        let Some(CSolution::Unique(Value::Float(c))) =
            lin.solve_float(&[Some(3.0), None, None, None, None, Some(1.0), None], 1e-9).unwrap()
        else {
            panic!("expected a unique float solution");
        };
        assert!((c + 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_in_c_is_rejected() {
        assert!(matches!(LinearInC::new(&[p("c^2")]), Err(SolitonError::NonlinearInC { index: 0, degree: 2 })));
    }
}
