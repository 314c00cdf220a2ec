//! JSON file formats and a canonical writer.
//!
//! Output is byte-stable: object keys are sorted, floats use 12 significant
//! digits (`%.12g`), rationals are `"p/q"` strings and qubits are 1-based.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::catalog::{CatalogMember, CatalogName, PhaseSpaceCatalog};
use crate::error::{Error, Result};
use crate::expectation::{ExactOperator, ExpectationVector, FloatOperator};
use crate::local::LocalPair;
use crate::mbpc::{Graph, MeasurementSchedule, OutcomeDistribution, ScheduleStep, SimulationReport};
use crate::pauli::{Axis, PauliPoint};
use crate::polytope::ns::NsTable;
use crate::polytope::FacetSystem;
use crate::robustness::{QuasiDistribution, QuasiTerm, RobustnessReport};
use crate::scalar::{format_rational, parse_rational, rational_from_f64, NumericMode, Rational, Scalar};
use crate::stabilizer::StabilizerProjector;

/// Scalars with a JSON encoding: numbers for `f64`, `"p/q"` for rationals.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        Value::from(*self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(x) => x.as_f64().ok_or_else(|| Error::invalid(format!("bad number {x}"))),
            Value::String(s) => parse_rational(s)
                .map(|r| r.to_f64())
                .ok_or_else(|| Error::invalid(format!("bad rational {s:?}"))),
            other => Err(Error::invalid(format!("expected a number, got {other}"))),
        }
    }
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s).ok_or_else(|| Error::invalid(format!("bad rational {s:?}"))),
            Value::Number(x) => x
                .as_i64()
                .map(Rational::from_i64)
                .or_else(|| x.as_f64().and_then(rational_from_f64))
                .ok_or_else(|| Error::invalid(format!("bad number {x}"))),
            other => Err(Error::invalid(format!("expected a rational, got {other}"))),
        }
    }
}

/// `%.12g`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(x) => match (x.as_i64(), x.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (None, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&format_float(x.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(i, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                pad(indent + 1, out);
                write_value(i, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let sorted: BTreeMap<&String, &Value> = map.iter().collect();
            out.push_str("{\n");
            for (k, (key, val)) in sorted.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(val, indent + 1, out);
                out.push_str(if k + 1 < sorted.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Canonical text with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_json(path: impl AsRef<Path>, v: &Value) -> Result<()> {
    Ok(std::fs::write(path, to_canonical_string(v))?)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::invalid(format!("missing field {key:?}")))
}

fn field_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::invalid(format!("{key:?} must be a non-negative integer")))
}

fn field_str<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| Error::invalid(format!("{key:?} must be a string")))
}

fn field_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| Error::invalid(format!("{key:?} must be an array")))
}

fn as_bit(v: &Value) -> Result<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Number(x) if x.as_u64() == Some(0) => Ok(false),
        Value::Number(x) if x.as_u64() == Some(1) => Ok(true),
        other => Err(Error::invalid(format!("expected a bit, got {other}"))),
    }
}

fn check_n(n: usize, got: usize) -> Result<()> {
    if n != got {
        return Err(Error::DimensionMismatch(got, n));
    }
    Ok(())
}

pub fn point_to_json(a: &PauliPoint) -> Value {
    let (x, z) = a.bitstrings();
    json!({ "x": x, "z": z })
}

pub fn point_from_json(v: &Value) -> Result<PauliPoint> {
    PauliPoint::from_bitstrings(field_str(v, "x")?, field_str(v, "z")?)
}

/// Non-zero entries only; the trace entry is always written.
pub fn operator_to_json<T: JsonScalar>(op: &ExpectationVector<T>) -> Value {
    let e: Vec<Value> = op
        .support()
        .filter(|(a, v)| a.is_zero() || !v.is_zero())
        .map(|(a, v)| {
            let mut m = point_to_json(&a);
            m["v"] = v.to_json();
            m
        })
        .collect();
    json!({ "n": op.n(), "mode": <T as Scalar>::MODE.as_str(), "e": e })
}

/// Reads entries in the caller's scalar type regardless of the stored mode.
pub fn operator_from_json<T: JsonScalar>(v: &Value) -> Result<ExpectationVector<T>> {
    let n = field_usize(v, "n")?;
    let mut op = ExpectationVector::<T>::zeros(n);
    op.set(&PauliPoint::zero(n), T::one());
    for entry in field_array(v, "e")? {
        let a = point_from_json(entry)?;
        check_n(n, a.n())?;
        op.set(&a, T::from_json(field(entry, "v")?)?);
    }
    Ok(op)
}

/// Stored mode of an operator file.
pub fn operator_mode(v: &Value) -> Result<NumericMode> {
    match v.get("mode").and_then(Value::as_str).unwrap_or("double") {
        "rational" => Ok(NumericMode::Rational),
        "double" => Ok(NumericMode::Double),
        m => Err(Error::invalid(format!("unknown mode {m:?}"))),
    }
}

pub fn projector_to_json(p: &StabilizerProjector) -> Value {
    let basis: Vec<Value> = p.basis().iter().map(point_to_json).collect();
    let s: Vec<u8> = p.bits().iter().map(|&b| b as u8).collect();
    json!({ "n": p.n(), "basis": basis, "s": s })
}

pub fn projector_from_json(v: &Value) -> Result<StabilizerProjector> {
    let n = field_usize(v, "n")?;
    let basis = field_array(v, "basis")?;
    let s = field_array(v, "s")?;
    if basis.len() != s.len() {
        return Err(Error::invalid("projector basis and s differ in length"));
    }
    let gens = basis.iter().zip(s).map(|(b, s)| Ok((point_from_json(b)?, as_bit(s)?))).collect::<Result<Vec<_>>>()?;
    StabilizerProjector::from_generators(n, &gens)
}

pub fn facets_to_json(system: &FacetSystem) -> Value {
    let facets: Vec<Value> = system
        .facets()
        .iter()
        .map(|f| {
            let normal: Vec<Value> = f.normal::<Rational>().iter().map(JsonScalar::to_json).collect();
            json!({ "projector": projector_to_json(f.label()), "normal": normal, "offset": 0 })
        })
        .collect();
    json!({ "n": system.n(), "facets": facets })
}

pub fn facets_from_json(v: &Value) -> Result<FacetSystem> {
    let n = field_usize(v, "n")?;
    let labels = field_array(v, "facets")?.iter().map(|f| projector_from_json(field(f, "projector")?)).collect::<Result<Vec<_>>>()?;
    FacetSystem::from_projectors(n, labels)
}

pub fn vertex_set_to_json(n: usize, vertices: &[ExactOperator]) -> Value {
    let vs: Vec<Value> = vertices.iter().map(operator_to_json).collect();
    json!({ "n": n, "vertices": vs })
}

pub fn vertex_set_from_json(v: &Value) -> Result<(usize, Vec<ExactOperator>)> {
    let n = field_usize(v, "n")?;
    let vs = field_array(v, "vertices")?.iter().map(operator_from_json::<Rational>).collect::<Result<Vec<_>>>()?;
    for op in &vs {
        check_n(n, op.n())?;
    }
    Ok((n, vs))
}

fn settings_code(s: &str) -> Result<usize> {
    s.chars().rev().try_fold(0usize, |acc, c| {
        let k = match c.to_ascii_lowercase() {
            'x' => 0,
            'y' => 1,
            'z' => 2,
            _ => return Err(Error::invalid(format!("bad setting {c:?} in {s:?}"))),
        };
        Ok(acc * 3 + k)
    })
}

fn outcome_bits(s: &str) -> Result<u64> {
    s.chars().enumerate().try_fold(0u64, |acc, (q, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << q)),
        _ => Err(Error::invalid(format!("bad outcome {c:?} in {s:?}"))),
    })
}

pub fn ns_table_to_json<T: JsonScalar>(t: &NsTable<T>) -> Value {
    let n = t.n();
    let entries: Vec<Value> = t
        .entries()
        .map(|(axes, out, p)| {
            let settings: String = axes.iter().map(|a| a.letter().to_ascii_lowercase()).collect();
            let outcomes: String = (0..n).map(|q| if (out >> q) & 1 == 1 { '1' } else { '0' }).collect();
            json!({ "settings": settings, "outcomes": outcomes, "p": p.to_json() })
        })
        .collect();
    json!({ "n": n, "mode": <T as Scalar>::MODE.as_str(), "entries": entries })
}

/// Missing entries are zero.
pub fn ns_table_from_json<T: JsonScalar>(v: &Value) -> Result<NsTable<T>> {
    let n = field_usize(v, "n")?;
    if n > crate::expectation::TABLE_LIMIT {
        return Err(Error::TooManyQubits { what: "behaviour table", n, limit: crate::expectation::TABLE_LIMIT });
    }
    let mut p = vec![T::zero(); 3usize.pow(n as u32) << n];
    for e in field_array(v, "entries")? {
        let s = field_str(e, "settings")?;
        let o = field_str(e, "outcomes")?;
        if s.len() != n || o.len() != n {
            return Err(Error::invalid(format!("entry {s}/{o} does not have {n} parties")));
        }
        p[(settings_code(s)? << n) + outcome_bits(o)? as usize] = T::from_json(field(e, "p")?)?;
    }
    NsTable::new(n, p)
}

pub fn pair_to_json(pair: &LocalPair) -> Value {
    let omega: Vec<Value> = pair.omega().elements().iter().map(point_to_json).collect();
    let gamma: Vec<u8> = pair.gamma().iter().map(|&b| b as u8).collect();
    json!({ "n": pair.n(), "omega": omega, "gamma": gamma })
}

pub fn pair_from_json(v: &Value, n: usize) -> Result<LocalPair> {
    let omega = field_array(v, "omega")?;
    let gamma = field_array(v, "gamma")?;
    if omega.len() != gamma.len() {
        return Err(Error::invalid("omega and gamma differ in length"));
    }
    let entries = omega.iter().zip(gamma).map(|(a, g)| Ok((point_from_json(a)?, as_bit(g)?))).collect::<Result<Vec<_>>>()?;
    if let Some((a, _)) = entries.iter().find(|(a, _)| a.n() != n) {
        return Err(Error::DimensionMismatch(a.n(), n));
    }
    LocalPair::from_entries(n, &entries)
}

/// A pair file carries its own `n`.
pub fn standalone_pair_from_json(v: &Value) -> Result<LocalPair> {
    pair_from_json(v, field_usize(v, "n")?)
}

pub fn catalog_to_json(c: &PhaseSpaceCatalog) -> Value {
    let members: Vec<Value> = c
        .members()
        .iter()
        .map(|m| {
            let pair = m.pair.as_ref().map_or(Value::Null, |p| {
                let mut v = pair_to_json(p);
                v.as_object_mut().expect("object").remove("n");
                v
            });
            json!({ "label": m.label, "op": operator_to_json(&m.op), "pair": pair })
        })
        .collect();
    json!({ "name": c.name().as_str(), "n": c.n(), "members": members })
}

pub fn catalog_from_json(v: &Value) -> Result<PhaseSpaceCatalog> {
    let name: CatalogName = field_str(v, "name")?.parse()?;
    let n = field_usize(v, "n")?;
    let members = field_array(v, "members")?
        .iter()
        .map(|m| {
            let op: FloatOperator = operator_from_json(field(m, "op")?)?;
            let pair = match m.get("pair") {
                None | Some(Value::Null) => None,
                Some(p) => Some(pair_from_json(p, n)?),
            };
            Ok(CatalogMember { label: field_str(m, "label")?.to_string(), op, pair })
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseSpaceCatalog::new(name, n, members)
}

pub fn quasi_to_json(q: &QuasiDistribution) -> Value {
    let coeffs: Vec<Value> = q.terms.iter().map(|t| json!({ "index": t.index, "label": t.label, "p": t.p })).collect();
    json!({ "catalog": q.catalog, "n": q.n, "coeffs": coeffs, "one_norm": q.one_norm })
}

/// Terms are matched to catalog members by label.
pub fn quasi_from_json(v: &Value, catalog: &PhaseSpaceCatalog) -> Result<QuasiDistribution> {
    let index: BTreeMap<&str, usize> = catalog.members().iter().enumerate().map(|(i, m)| (m.label.as_str(), i)).collect();
    let terms = field_array(v, "coeffs")?
        .iter()
        .map(|c| {
            let label = field_str(c, "label")?;
            let i = *index.get(label).ok_or_else(|| Error::invalid(format!("label {label:?} not in the catalog")))?;
            Ok(QuasiTerm { index: i, label: label.to_string(), p: f64::from_json(field(c, "p")?)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let one_norm = terms.iter().map(|t| t.p.abs()).sum();
    Ok(QuasiDistribution { catalog: catalog.name().to_string(), n: catalog.n(), terms, one_norm })
}

pub fn robustness_to_json(r: &RobustnessReport) -> Value {
    json!({
        "value": r.value,
        "residual": r.residual,
        "dual_objective": r.lp.dual_objective,
        "duality_gap": r.lp.duality_gap,
        "iterations": r.lp.iterations,
        "quasi": quasi_to_json(&r.quasi),
    })
}

pub fn graph_to_json(g: &Graph) -> Value {
    let edges: Vec<Value> = g.edges().iter().map(|&(i, j)| json!([i + 1, j + 1])).collect();
    json!({ "n": g.n(), "edges": edges })
}

pub fn graph_from_json(v: &Value) -> Result<Graph> {
    let n = field_usize(v, "n")?;
    let edges = field_array(v, "edges")?
        .iter()
        .map(|e| match e.as_array().map(|a| a.iter().map(Value::as_u64).collect::<Vec<_>>()).as_deref() {
            Some([Some(i), Some(j)]) if *i >= 1 && *j >= 1 => Ok((*i as usize - 1, *j as usize - 1)),
            _ => Err(Error::invalid(format!("edge {e} is not a pair of 1-based vertices"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Graph::new(n, edges)
}

pub fn schedule_to_json(s: &MeasurementSchedule) -> Value {
    let steps: Vec<Value> = s
        .steps()
        .iter()
        .map(|st| {
            let basis: Map<String, Value> = st.basis.iter().map(|(k, a)| (k.clone(), Value::from(a.letter().to_string()))).collect();
            json!({ "qubit": st.qubit + 1, "basis": basis })
        })
        .collect();
    json!({ "steps": steps })
}

pub fn schedule_from_json(v: &Value) -> Result<MeasurementSchedule> {
    let steps = field_array(v, "steps")?
        .iter()
        .map(|st| {
            let q = field_usize(st, "qubit")?;
            if q == 0 {
                return Err(Error::invalid("qubits are 1-based"));
            }
            let basis = field(st, "basis")?
                .as_object()
                .ok_or_else(|| Error::invalid("basis must be an object"))?
                .iter()
                .map(|(k, a)| {
                    let axis = a
                        .as_str()
                        .and_then(|s| s.chars().next().filter(|_| s.len() == 1))
                        .and_then(Axis::from_letter)
                        .ok_or_else(|| Error::invalid(format!("bad axis {a}")))?;
                    Ok((k.clone(), axis))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok(ScheduleStep { qubit: q - 1, basis })
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSchedule::new(steps)
}

pub fn distribution_to_json(d: &OutcomeDistribution) -> Value {
    Value::Object(d.iter().map(|(k, p)| (k.clone(), Value::from(*p))).collect())
}

pub fn report_to_json(r: &SimulationReport) -> Value {
    let opt = |d: &Option<OutcomeDistribution>| d.as_ref().map_or(Value::Null, distribution_to_json);
    json!({
        "mode": r.mode.as_str(),
        "shots": r.shots,
        "seed": r.seed,
        "catalog": r.catalog,
        "one_norm": r.one_norm,
        "distribution": distribution_to_json(&r.distribution),
        "std_error": opt(&r.std_error),
        "oracle": opt(&r.oracle),
        "tv_distance": r.tv_distance.map_or(Value::Null, Value::from),
    })
}
