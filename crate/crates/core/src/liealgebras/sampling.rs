//! Seeded sampling of parameter points on a constraint locus.
//!
//! Free parameters are drawn from `{-3..3} / d` with `d in {1, 2, 3}`. Each
//! relation is then solved for the last free variable (in table order) in
//! which it is linear with a nonzero coefficient at the drawn point. A
//! relation of the form `a*v^2 + b` is solved by a square root, exactly when
//! `-b/a` is a rational square and in floating point otherwise.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::exactpoly::rational::{self, Rational};
use crate::exactpoly::Polynomial;

use super::LieAlgebraFamily;

const MAX_ATTEMPTS_PER_POINT: usize = 400;
const FLOAT_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational::to_f64(r),
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(x) => write!(f, "{x:.12e}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Exact,
    Float,
}

/// Values for a subset of the variables of a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterPoint {
    #[serde(skip)]
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    pub values: Vec<Value>,
    pub constraints_satisfied: bool,
    /// Set when exact sampling had to fall back to floating point.
    pub float_fallback: bool,
}

impl ParameterPoint {
    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| matches!(v, Value::Exact(_)))
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.names.iter().position(|n| n == name).map(|i| &self.values[i])
    }

    /// Table-indexed exact values, or `None` for a floating-point point.
    pub fn exact_assignment(&self, nvars: usize) -> Option<Vec<Option<Rational>>> {
        let mut out = vec![None; nvars];
        for (&i, v) in self.indices.iter().zip(&self.values) {
            out[i] = Some(v.as_exact()?.clone());
        }
        Some(out)
    }

    pub fn float_assignment(&self, nvars: usize) -> Vec<Option<f64>> {
        let mut out = vec![None; nvars];
        for (&i, v) in self.indices.iter().zip(&self.values) {
            out[i] = Some(v.to_f64());
        }
        out
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.names.iter().cloned().zip(self.values.iter().map(Value::to_string)).collect()
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.names.iter().zip(&self.values).map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// A locus described by sequential substitutions `var := expr`, relations that
/// must vanish and polynomials that must not.
#[derive(Debug, Clone)]
pub struct LocusSpec {
    pub parameters: Vec<usize>,
    pub substitutions: Vec<(usize, Polynomial)>,
    pub relations: Vec<Polynomial>,
    pub nonvanishing: Vec<Polynomial>,
}

impl LocusSpec {
    pub fn for_family(fam: &LieAlgebraFamily) -> Self {
        LocusSpec {
            parameters: fam.parameters(),
            substitutions: Vec::new(),
            relations: fam.constraints.clone(),
            nonvanishing: fam.nonvanishing.clone(),
        }
    }

    fn apply_substitutions(&self, p: &Polynomial) -> Polynomial {
        self.substitutions.iter().fold(p.clone(), |acc, (v, e)| acc.substitute(*v, e).expect("same table"))
    }
}

#[derive(Clone)]
enum Slot {
    Exact(Rational),
    Float(f64),
}

struct Assignment {
    slots: Vec<Option<Slot>>,
}

impl Assignment {
    fn any_float(&self) -> bool {
        self.slots.iter().any(|s| matches!(s, Some(Slot::Float(_))))
    }

    fn exact(&self, skip: Option<usize>) -> Option<Vec<Option<Rational>>> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                _ if Some(i) == skip => Some(None),
                Some(Slot::Exact(r)) => Some(Some(r.clone())),
                Some(Slot::Float(_)) => None,
                None => Some(None),
            })
            .collect()
    }

    fn floats(&self, skip: Option<usize>) -> Vec<Option<f64>> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                _ if Some(i) == skip => None,
                Some(Slot::Exact(r)) => Some(rational::to_f64(r)),
                Some(Slot::Float(x)) => Some(*x),
                None => None,
            })
            .collect()
    }
}

enum Eval {
    Exact(Rational),
    Float(f64),
}

impl Eval {
    fn is_zero(&self) -> bool {
        match self {
            Eval::Exact(r) => r.is_zero(),
            Eval::Float(x) => x.abs() < FLOAT_ZERO,
        }
    }
}

fn eval_at(p: &Polynomial, a: &Assignment, skip: Option<usize>) -> Option<Eval> {
    if !a.any_float() {
        p.eval_indexed(&a.exact(skip)?).ok().map(Eval::Exact)
    } else {
        p.eval_f64(&a.floats(skip)).ok().map(Eval::Float)
    }
}

fn grid_value(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = rng.gen_range(1..=3);
    rational::ratio(n, d)
}

/// Tries to make `relation` vanish by setting one of `free` (last first).
/// Returns `false` when the relation cannot be satisfied.
fn solve_relation(
    relation: &Polynomial,
    free: &[usize],
    locked: &mut Vec<usize>,
    a: &mut Assignment,
    rng: &mut ChaCha8Rng,
    float_fallback: &mut bool,
) -> bool {
    let candidates: Vec<usize> =
        free.iter().rev().copied().filter(|v| !locked.contains(v) && relation.degree_in(*v) > 0).collect();
    for &v in &candidates {
        if relation.degree_in(v) != 1 {
            continue;
        }
        let (Some(c1), Some(c0)) =
            (eval_at(&relation.coefficient_of(v, 1), a, Some(v)), eval_at(&relation.coefficient_of(v, 0), a, Some(v)))
        else {
            continue;
        };
        let slot = match (c1, c0) {
            (Eval::Exact(c1), Eval::Exact(c0)) if !c1.is_zero() => Slot::Exact(-c0 / c1),
            (Eval::Float(c1), Eval::Float(c0)) if c1.abs() > FLOAT_ZERO => Slot::Float(-c0 / c1),
            _ => continue,
        };
        a.slots[v] = Some(slot);
        locked.push(v);
        return true;
    }
    for &v in &candidates {
        if relation.degree_in(v) != 2 || !relation.coefficient_of(v, 1).is_zero() {
            continue;
        }
        let (Some(c2), Some(c0)) =
            (eval_at(&relation.coefficient_of(v, 2), a, Some(v)), eval_at(&relation.coefficient_of(v, 0), a, Some(v)))
        else {
            continue;
        };
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let slot = match (c2, c0) {
            (Eval::Exact(c2), Eval::Exact(c0)) if !c2.is_zero() => {
                let square = -c0 / c2;
                if square.is_negative() {
                    continue;
                }
                match rational::exact_sqrt(&square) {
                    Some(root) => Slot::Exact(root * rational::int(sign)),
                    None => {
                        *float_fallback = true;
                        Slot::Float(sign as f64 * rational::to_f64(&square).sqrt())
                    }
                }
            }
            (Eval::Float(c2), Eval::Float(c0)) if c2.abs() > FLOAT_ZERO => {
                let square = -c0 / c2;
                if square < 0.0 {
                    continue;
                }
                Slot::Float(sign as f64 * square.sqrt())
            }
            _ => continue,
        };
        a.slots[v] = Some(slot);
        locked.push(v);
        return true;
    }
    eval_at(relation, a, None).is_some_and(|e| e.is_zero())
}

fn draw_point(spec: &LocusSpec, nvars: usize, rng: &mut ChaCha8Rng, mode: SampleMode) -> Option<ParameterPoint> {
    let substituted: Vec<usize> = spec.substitutions.iter().map(|(v, _)| *v).collect();
    let free: Vec<usize> = spec.parameters.iter().copied().filter(|v| !substituted.contains(v)).collect();
    let mut a = Assignment { slots: vec![None; nvars] };
    for &v in &free {
        let r = grid_value(rng);
        a.slots[v] = Some(match mode {
            SampleMode::Exact => Slot::Exact(r),
            SampleMode::Float => Slot::Float(rational::to_f64(&r)),
        });
    }

    let relations: Vec<Polynomial> =
        spec.relations.iter().map(|r| spec.apply_substitutions(r)).filter(|r| !r.is_zero()).collect();
    let mut locked = Vec::new();
    let mut float_fallback = false;
    for r in &relations {
        if !solve_relation(r, &free, &mut locked, &mut a, rng, &mut float_fallback) {
            return None;
        }
    }
    for r in &relations {
        if !eval_at(r, &a, None)?.is_zero() {
            return None;
        }
    }

    // Resolve substituted variables from the free ones.
    for (k, (v, _)) in spec.substitutions.iter().enumerate() {
        let resolved = spec.substitutions[k..]
            .iter()
            .fold(Polynomial::var_at(spec.substitutions[k].1.vars(), *v), |acc, (w, e)| {
                acc.substitute(*w, e).expect("same table")
            });
        let value = eval_at(&resolved, &a, None)?;
        a.slots[*v] = Some(match value {
            Eval::Exact(r) => Slot::Exact(r),
            Eval::Float(x) => Slot::Float(x),
        });
    }

    for nv in &spec.nonvanishing {
        if eval_at(nv, &a, None)?.is_zero() {
            return None;
        }
    }

    let float = a.any_float();
    let values: Vec<Value> = spec
        .parameters
        .iter()
        .map(|&i| match a.slots[i].clone() {
            Some(Slot::Exact(r)) if float => Value::Float(rational::to_f64(&r)),
            Some(Slot::Exact(r)) => Value::Exact(r),
            Some(Slot::Float(x)) => Value::Float(x),
            None => Value::Exact(Rational::zero()),
        })
        .collect();
    Some(ParameterPoint {
        indices: spec.parameters.clone(),
        names: Vec::new(),
        values,
        constraints_satisfied: true,
        float_fallback,
    })
}

/// Up to `count` points on the locus, deterministic for a given rng state.
/// Fewer points are returned when the locus rejects too many draws.
pub fn sample_on_locus(
    spec: &LocusSpec,
    nvars: usize,
    names: &dyn Fn(usize) -> String,
    rng: &mut ChaCha8Rng,
    count: usize,
    mode: SampleMode,
) -> Vec<ParameterPoint> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * MAX_ATTEMPTS_PER_POINT {
        attempts += 1;
        if let Some(mut p) = draw_point(spec, nvars, rng, mode) {
            p.names = p.indices.iter().map(|&i| names(i)).collect();
            out.push(p);
        }
    }
    out
}

/// `count` points satisfying the family's constraints and nonvanishing
/// conditions. The same seed always yields the same list.
pub fn sample_parameters(fam: &LieAlgebraFamily, seed: u64, count: usize, mode: SampleMode) -> Vec<ParameterPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = fam.vars().clone();
    sample_on_locus(&LocusSpec::for_family(fam), vars.len(), &|i| vars.name(i).to_string(), &mut rng, count, mode)
}

/// Solves a constraint that is linear in `var` for that variable, given
/// values for every other variable it mentions.
pub fn solve_linear_constraint(
    constraint: &Polynomial,
    var: &str,
    values: &BTreeMap<String, Rational>,
) -> Option<Rational> {
    let v = constraint.vars().index_of(var)?;
    if constraint.degree_in(v) != 1 {
        return None;
    }
    let c1 = constraint.coefficient_of(v, 1).eval(values).ok()?;
    let c0 = constraint.coefficient_of(v, 0).eval(values).ok()?;
    if c1.is_zero() {
        None
    } else {
        Some(-c0 / c1)
    }
}
