use serde_json::{json, Map, Value};

use noisyor::diagnosis::{build_circuit_model, diagnose};
use noisyor::reliability::{set_path_count_distribution, set_reliability};
use noisyor::{
    eliminate, path_count_distribution, two_terminal_reliability, CompileOptions, CompiledNetwork, Evidence,
    MarginalSet, ReliabilityOptions,
};

use crate::args::Mode;
use crate::document::NetworkDocument;
use crate::error::CliError;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn rounded(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&p| json!(round_sig(p))).collect())
}

fn print(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("value serializes");
    out.push('\n');
    out
}

fn evidence(net: &CompiledNetwork, assignments: &[(String, String)]) -> Result<Evidence, CliError> {
    let mut e = Evidence::new();
    for (name, state) in assignments {
        let v = net
            .variable(name)
            .ok_or_else(|| noisyor::Error::UnknownVariable(name.clone()))?;
        e.observe(name.clone(), v.resolve_state(state)?)?;
    }
    Ok(e)
}

fn marginals(m: &MarginalSet) -> String {
    let map: Map<String, Value> = m.iter().map(|(k, v)| (k.to_string(), rounded(v))).collect();
    print(&Value::Object(map))
}

pub fn compile(path: &str, node: Option<&str>, options: &CompileOptions) -> Result<String, CliError> {
    let doc = NetworkDocument::load(path)?;
    Ok(doc.compiled(node, options)?.to_json())
}

pub fn query(
    path: &str,
    assignments: &[(String, String)],
    targets: &[String],
    options: &CompileOptions,
) -> Result<String, CliError> {
    let net = NetworkDocument::load(path)?.network()?.compile(options)?;
    let e = evidence(&net, assignments)?;
    Ok(marginals(&eliminate(&net, &e, targets)?))
}

pub fn diagnose_circuit(
    path: &str,
    assignments: &[(String, String)],
    targets: &[String],
    options: &CompileOptions,
) -> Result<String, CliError> {
    let (circuit, faults) = NetworkDocument::load(path)?.circuit()?;
    let net = build_circuit_model(&circuit, &faults)?.compile(options)?;
    let e = evidence(&net, assignments)?;
    Ok(marginals(&diagnose(&net, &e, targets)?))
}

pub struct ReliabilityRequest<'a> {
    pub mode: Mode,
    pub sources: &'a [String],
    pub target: Option<&'a str>,
    pub max_states: usize,
}

pub fn reliability(path: &str, req: &ReliabilityRequest, compile: &CompileOptions) -> Result<String, CliError> {
    let mut graph = NetworkDocument::load(path)?.graph()?;
    if let Some(t) = req.target {
        graph = graph.with_terminals(graph.source().to_string(), t)?;
    }
    let options = ReliabilityOptions {
        max_states: req.max_states,
        compile: *compile,
        ..Default::default()
    };
    let sources: Vec<String> = if req.sources.is_empty() {
        vec![graph.source().to_string()]
    } else {
        req.sources.to_vec()
    };
    let single = sources.len() == 1;
    if single {
        graph = graph.with_terminals(sources[0].clone(), graph.target().to_string())?;
    }
    let mut out = Map::new();
    out.insert("source".into(), if single { json!(sources[0]) } else { json!(sources) });
    out.insert("target".into(), json!(graph.target()));
    match req.mode {
        Mode::Connect => {
            let p = if single {
                two_terminal_reliability(&graph, &options)?
            } else {
                set_reliability(&graph, &sources, &options)?
            };
            out.insert("connectivity".into(), json!(round_sig(p)));
        }
        Mode::Paths => {
            let d = if single {
                path_count_distribution(&graph, &options)?
            } else {
                set_path_count_distribution(&graph, &sources, &options)?
            };
            out.insert("paths".into(), rounded(&d));
        }
    }
    Ok(print(&Value::Object(out)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0), 1.0);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.234567890123456e-5), 1.23456789012e-5);
    }
}
