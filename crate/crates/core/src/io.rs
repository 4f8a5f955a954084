//! File formats: control-problem JSON, coherent descriptors, search and
//! verification reports, reduction output. Scalars always travel as exact
//! text strings, so every emitted file round-trips through its parser to an
//! identical canonical value.

use serde_json::{json, Map, Value};

use crate::backward::CoherentProblem;
use crate::channels::{Channel, ControlProblem, DensityMatrix, Policy, PolicySet, Target};
use crate::controllability::{ControllabilityVerdict, HamiltonianPair};
use crate::dio::parse_dio;
use crate::error::{Error, Result};
use crate::forward::ReductionResult;
use crate::matrix::RatMatrix;
use crate::scalar::parse_scalar;
use crate::search::{EquivalenceReport, Scheme, SearchReport};

fn parse_err(context: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{context}: {detail}"))
}

pub fn matrix_to_json(m: &RatMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            let row: Vec<Value> = (0..m.cols())
                .map(|c| Value::String(m.get(r, c).to_string()))
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn matrix_from_json(v: &Value) -> Result<RatMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| parse_err("matrix", "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| parse_err("matrix row", "expected an array of scalar strings"))?;
        let mut parsed = Vec::with_capacity(cells.len());
        for cell in cells {
            let text = cell
                .as_str()
                .ok_or_else(|| parse_err("matrix entry", "expected a scalar string"))?;
            parsed.push(parse_scalar(text)?);
        }
        out.push(parsed);
    }
    RatMatrix::from_rows(out)
}

fn policy_to_json(p: &Policy) -> Value {
    Value::Array(p.steps().iter().map(|&s| json!(s)).collect())
}

fn policy_from_json(v: &Value) -> Result<Policy> {
    let steps = v
        .as_array()
        .ok_or_else(|| parse_err("policy", "expected an array of indices"))?;
    let mut out = Vec::with_capacity(steps.len());
    for s in steps {
        let n = s
            .as_u64()
            .ok_or_else(|| parse_err("policy step", "expected a nonnegative integer"))?;
        out.push(n as usize);
    }
    Ok(Policy(out))
}

fn policy_set_to_json(ap: &PolicySet) -> Value {
    match ap {
        PolicySet::Explicit(list) => json!({
            "explicit": list.iter().map(policy_to_json).collect::<Vec<_>>()
        }),
        PolicySet::Grid { values, length } => json!({
            "grid": { "values": values, "length": length }
        }),
    }
}

fn policy_set_from_json(v: &Value) -> Result<PolicySet> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("ap", "expected an object"))?;
    if let Some(grid) = obj.get("grid") {
        let values = grid
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("ap.grid", "missing \"values\" array"))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| parse_err("ap.grid.values", "expected nonnegative integers"))
            })
            .collect::<Result<Vec<usize>>>()?;
        let length =
            grid.get("length")
                .and_then(Value::as_u64)
                .ok_or_else(|| parse_err("ap.grid", "missing \"length\""))? as usize;
        PolicySet::grid(values, length)
    } else if let Some(list) = obj.get("explicit") {
        let arr = list
            .as_array()
            .ok_or_else(|| parse_err("ap.explicit", "expected an array of policies"))?;
        let policies = arr
            .iter()
            .map(policy_from_json)
            .collect::<Result<Vec<_>>>()?;
        PolicySet::explicit(policies)
    } else {
        Err(parse_err("ap", "expected \"grid\" or \"explicit\""))
    }
}

pub fn problem_to_json(prob: &ControlProblem) -> Value {
    let channels: Vec<Value> = prob
        .channels()
        .iter()
        .map(|c| {
            json!({
                "kraus": c.kraus().iter().map(matrix_to_json).collect::<Vec<_>>()
            })
        })
        .collect();
    let target = match prob.target() {
        Target::Observable(o) => json!({ "observable": matrix_to_json(o) }),
        Target::State(s) => json!({ "state": matrix_to_json(s.mat()) }),
    };
    json!({
        "dim": prob.dim(),
        "channels": channels,
        "rho0": matrix_to_json(prob.rho0().mat()),
        "target": target,
        "ap": policy_set_to_json(prob.ap()),
    })
}

pub fn problem_from_json(v: &Value) -> Result<ControlProblem> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("problem", "expected a JSON object"))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("problem", "missing \"dim\""))? as usize;
    let channel_values = obj
        .get("channels")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("problem", "missing \"channels\" array"))?;
    let mut channels = Vec::with_capacity(channel_values.len());
    for cv in channel_values {
        let kraus_values = cv
            .get("kraus")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("channel", "missing \"kraus\" array"))?;
        let kraus = kraus_values
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        channels.push(Channel::new(kraus)?);
    }
    let rho0 = DensityMatrix::new(matrix_from_json(
        obj.get("rho0")
            .ok_or_else(|| parse_err("problem", "missing \"rho0\""))?,
    )?)?;
    let target_obj = obj
        .get("target")
        .and_then(Value::as_object)
        .ok_or_else(|| parse_err("problem", "missing \"target\" object"))?;
    let target = if let Some(o) = target_obj.get("observable") {
        Target::Observable(matrix_from_json(o)?)
    } else if let Some(s) = target_obj.get("state") {
        Target::State(DensityMatrix::new(matrix_from_json(s)?)?)
    } else {
        return Err(parse_err("target", "expected \"observable\" or \"state\""));
    };
    let ap = policy_set_from_json(
        obj.get("ap")
            .ok_or_else(|| parse_err("problem", "missing \"ap\""))?,
    )?;
    let prob = ControlProblem::new(channels, rho0, target, ap)?;
    if prob.dim() != dim {
        return Err(parse_err(
            "problem",
            format!(
                "declared dim {dim} does not match matrices of dim {}",
                prob.dim()
            ),
        ));
    }
    Ok(prob)
}

/// Coherent problems travel as a small descriptor instead of explicit
/// (infinite-dimensional) channel matrices.
pub fn coherent_to_json(prob: &CoherentProblem) -> Value {
    json!({ "scheme": "coherent", "dio": prob.dio.to_string() })
}

pub fn coherent_from_json(v: &Value) -> Result<CoherentProblem> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("coherent descriptor", "expected a JSON object"))?;
    match obj.get("scheme").and_then(Value::as_str) {
        Some("coherent") => {}
        other => {
            return Err(parse_err(
                "coherent descriptor",
                format!("unsupported scheme {other:?}"),
            ))
        }
    }
    let text = obj
        .get("dio")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("coherent descriptor", "missing \"dio\" text"))?;
    Ok(CoherentProblem {
        dio: parse_dio(text)?,
    })
}

/// Either kind of problem file, distinguished by the "scheme" key.
#[derive(Clone, Debug)]
pub enum ProblemFile {
    Control(ControlProblem),
    Coherent(CoherentProblem),
}

pub fn problem_file_from_str(text: &str) -> Result<ProblemFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err("problem file", e))?;
    if value.get("scheme").is_some() {
        Ok(ProblemFile::Coherent(coherent_from_json(&value)?))
    } else {
        Ok(ProblemFile::Control(problem_from_json(&value)?))
    }
}

pub fn report_to_json(report: &SearchReport) -> Value {
    json!({
        "optimal_value": report.optimal_value.to_string(),
        "optimizers": report.optimizers,
        "evaluations": report.evaluations,
        "exhausted": report.exhausted,
    })
}

pub fn equivalence_to_json(report: &EquivalenceReport) -> Value {
    json!({
        "scheme": report.scheme.name(),
        "bound": report.bound,
        "equal": report.equal,
        "decoded": report.decoded,
        "oracle": report.oracle,
        "evaluations": report.evaluations,
    })
}

pub fn verdict_to_json(v: &ControllabilityVerdict) -> Value {
    json!({
        "closure_dim": v.closure_dim,
        "su_dim": v.su_dim,
        "sp_dim": v.sp_dim,
        "matches_su": v.matches_su,
        "matches_sp": v.matches_sp,
        "controllable": v.controllable,
        "note": v.note,
    })
}

pub fn scheme_from_str(name: &str) -> Result<Scheme> {
    match name {
        "shift" => Ok(Scheme::Shift),
        "damping" => Ok(Scheme::Damping),
        "coherent" => Ok(Scheme::Coherent),
        other => Err(parse_err("scheme", format!("unknown scheme {other:?}"))),
    }
}

/// The legend that accompanies an emitted equation: policy variable count,
/// ancilla names in emission order, and the denominator-clearing factor.
pub fn legend_to_json(red: &ReductionResult) -> Value {
    let mut legend = Map::new();
    legend.insert("p".into(), json!(red.policy_vars));
    legend.insert("ancillas".into(), json!(red.ancillas));
    legend.insert("scale".into(), Value::String(red.scale.to_string()));
    Value::Object(legend)
}

pub fn reduction_to_json(red: &ReductionResult) -> Value {
    json!({
        "equation": red.equation.to_string(),
        "legend": legend_to_json(red),
    })
}

pub fn hamiltonian_pair_from_json(v: &Value) -> Result<HamiltonianPair> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("lie-rank input", "expected a JSON object"))?;
    let h0 = matrix_from_json(
        obj.get("h0")
            .ok_or_else(|| parse_err("lie-rank input", "missing \"h0\""))?,
    )?;
    let int = matrix_from_json(
        obj.get("v")
            .ok_or_else(|| parse_err("lie-rank input", "missing \"v\""))?,
    )?;
    HamiltonianPair::new(h0, int)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backward::shift_encoding;
    use crate::dio::parse_dio;
    use crate::scalar::ratio;

    #[test]
    fn problem_roundtrip_is_identical() {
        let d = parse_dio("x1^2 + x2 - 5").unwrap();
        let enc = shift_encoding(&d, 3, 4).unwrap();
        let v = problem_to_json(&enc.problem);
        let back = problem_from_json(&v).unwrap();
        assert_eq!(back, enc.problem);
        // and the re-serialized form is byte-identical
        assert_eq!(
            serde_json::to_string(&problem_to_json(&back)).unwrap(),
            serde_json::to_string(&v).unwrap()
        );
    }

    #[test]
    fn explicit_policy_sets_roundtrip() {
        let x = Channel::unitary(RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap();
        let prob = ControlProblem::new(
            vec![Channel::identity(2), x],
            DensityMatrix::basis(2, 0),
            Target::State(DensityMatrix::basis(2, 1)),
            PolicySet::explicit(vec![Policy(vec![0, 1]), Policy(vec![1, 1])]).unwrap(),
        )
        .unwrap();
        let back = problem_from_json(&problem_to_json(&prob)).unwrap();
        assert_eq!(back, prob);
    }

    #[test]
    fn coherent_descriptor_roundtrip() {
        let prob = crate::backward::kerr_example(1, 1, 5).unwrap();
        let v = coherent_to_json(&prob);
        match problem_file_from_str(&serde_json::to_string(&v).unwrap()).unwrap() {
            ProblemFile::Coherent(back) => assert_eq!(back, prob),
            _ => panic!("coherent descriptor detected as control problem"),
        }
    }

    #[test]
    fn report_serialization_uses_exact_strings() {
        let report = SearchReport {
            optimal_value: ratio(-9, 25),
            optimizers: vec![vec![0, 1]],
            evaluations: 5,
            exhausted: false,
        };
        let v = report_to_json(&report);
        assert_eq!(v["optimal_value"], "-9/25");
        assert_eq!(v["optimizers"][0][1], 1);
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        assert!(matches!(problem_file_from_str("{"), Err(Error::Parse(_))));
        assert!(matches!(
            problem_file_from_str("{\"scheme\": \"laser\"}"),
            Err(Error::Parse(_))
        ));
        let missing = r#"{"dim": 2, "channels": []}"#;
        assert!(problem_file_from_str(missing).is_err());
    }

    #[test]
    fn legend_shape() {
        let d = parse_dio("x1 - 2").unwrap();
        let enc = shift_encoding(&d, 3, 2).unwrap();
        let red = crate::forward::exact_equation(&enc.problem, 2).unwrap();
        let v = reduction_to_json(&red);
        assert_eq!(v["legend"]["p"], 2);
        assert_eq!(v["legend"]["ancillas"].as_array().unwrap().len(), 0);
        assert!(v["legend"]["scale"].is_string());
        // emitted equation text re-parses to the same polynomial
        let text = v["equation"].as_str().unwrap();
        let back = parse_dio(text).unwrap().pad_vars(red.equation.nvars());
        assert_eq!(back, red.equation);
    }
}
