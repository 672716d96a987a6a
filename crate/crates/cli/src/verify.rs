//! Oracle cross-checks for `noisyor verify`.

use noisyor::diagnosis::build_circuit_model;
use noisyor::oracle::{brute_force_cpt, brute_force_marginal, enumerate_link_states, DEFAULT_MAX_LINKS, JOINT_LIMIT};
use noisyor::random::{self, seeded};
use noisyor::{
    choose_compiler, compile_general, eliminate, path_count_distribution, two_terminal_reliability, Backing,
    CompileOptions, Error, Evidence, Network, ReliabilityOptions,
};

use crate::document::NetworkDocument;
use crate::error::CliError;

pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub compile: CompileOptions,
}

enum Status {
    Checked(f64),
    Failed(String),
    Skipped(String),
}

#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    fn record(&mut self, name: &str, status: Status, tolerance: f64) {
        let line = match status {
            Status::Checked(dev) if dev <= tolerance => {
                format!("PASS {name}: max deviation {dev:.3e}")
            }
            Status::Checked(dev) => {
                self.failures += 1;
                format!("FAIL {name}: max deviation {dev:.3e} exceeds {tolerance:.1e}")
            }
            Status::Failed(why) => {
                self.failures += 1;
                format!("FAIL {name}: {why}")
            }
            Status::Skipped(why) => format!("SKIP {name}: {why}"),
        };
        self.lines.push(line);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        if self.passed() {
            out.push_str("verify: PASS\n");
        } else {
            out.push_str(&format!("verify: FAIL ({} failing checks)\n", self.failures));
        }
        out
    }
}

fn deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn joint_size(net: &Network) -> u128 {
    net.variables()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.cardinality() as u128))
        .unwrap_or(u128::MAX)
}

/// Compares `eliminate` with brute force on every variable.
fn inference_status(net: &Network, evidence: &Evidence, options: &CompileOptions) -> Status {
    if joint_size(net) > JOINT_LIMIT {
        return Status::Skipped(format!("joint state space above {JOINT_LIMIT}"));
    }
    let compiled = match net.compile(options) {
        Ok(c) => c,
        Err(e) => return Status::Failed(e.to_string()),
    };
    let fast = eliminate(&compiled, evidence, &[]);
    let mut worst: f64 = 0.0;
    for v in net.variables() {
        match (&fast, brute_force_marginal(net, evidence, v.name())) {
            (Ok(m), Ok(o)) => worst = worst.max(deviation(m.get(v.name()).unwrap_or(&[]), &o)),
            (Err(Error::ImpossibleEvidence), Err(Error::ImpossibleEvidence)) => {}
            (Err(e), _) => return Status::Failed(format!("`{}`: {e}", v.name())),
            (_, Err(e)) => return Status::Failed(format!("`{}`: {e}", v.name())),
        }
    }
    Status::Checked(worst)
}

fn check_network(report: &mut Report, label: &str, net: &Network, opts: &VerifyOptions) {
    let validation = net.validate();
    if !validation.is_ok() {
        report.record(
            &format!("{label} validation"),
            Status::Failed(validation.to_string()),
            opts.tolerance,
        );
        return;
    }
    report.record(&format!("{label} validation"), Status::Checked(0.0), opts.tolerance);
    for node in net.nodes() {
        if let Backing::NoisyGate(spec) = node.backing() {
            let status = match (
                choose_compiler(spec, &opts.compile),
                compile_general(spec, &opts.compile),
                brute_force_cpt(spec, opts.compile.budget),
            ) {
                (Ok(a), Ok(b), Ok(o)) => {
                    Status::Checked(deviation(a.table(), o.table()).max(deviation(b.table(), o.table())))
                }
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Status::Failed(e.to_string()),
            };
            report.record(&format!("{label} gate `{}`", node.name()), status, opts.tolerance);
        }
    }
    let status = inference_status(net, &Evidence::new(), &opts.compile);
    report.record(&format!("{label} inference"), status, opts.tolerance);
}

fn check_graph(report: &mut Report, doc: &NetworkDocument, opts: &VerifyOptions) -> Result<(), CliError> {
    let graph = doc.graph()?;
    let truth = match enumerate_link_states(&graph, DEFAULT_MAX_LINKS) {
        Ok(t) => t,
        Err(e) => {
            report.record("graph", Status::Skipped(e.to_string()), opts.tolerance);
            return Ok(());
        }
    };
    let options = ReliabilityOptions {
        compile: opts.compile,
        ..Default::default()
    };
    let status = match two_terminal_reliability(&graph, &options) {
        Ok(p) => Status::Checked((p - truth.connectivity).abs()),
        Err(e) => Status::Failed(e.to_string()),
    };
    report.record("graph connectivity", status, opts.tolerance);
    let status = match path_count_distribution(&graph, &options) {
        Ok(d) => Status::Checked(deviation(&d, &truth.histogram)),
        Err(e @ Error::StateSpaceTooLarge { .. }) => Status::Skipped(e.to_string()),
        Err(e) => Status::Failed(e.to_string()),
    };
    report.record("graph path counts", status, opts.tolerance);
    Ok(())
}

fn check_random(report: &mut Report, opts: &VerifyOptions) {
    if opts.trials == 0 {
        return;
    }
    let mut rng = seeded(opts.seed);
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for k in 0..opts.trials {
        let spec = random::noisy_gate_spec(&mut rng, 4, 4, 5);
        match (
            compile_general(&spec, &opts.compile),
            brute_force_cpt(&spec, opts.compile.budget),
        ) {
            (Ok(a), Ok(o)) => worst = worst.max(deviation(a.table(), o.table())),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(format!("spec {k}: {e}"));
            }
        }
        let spec = random::boolean_noisy_or_spec(&mut rng, 6);
        match (
            choose_compiler(&spec, &opts.compile),
            compile_general(&spec, &opts.compile),
        ) {
            (Ok(a), Ok(o)) => worst = worst.max(deviation(a.table(), o.table())),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(format!("noisy-or spec {k}: {e}"));
            }
        }
    }
    let name = format!("random specs ({} trials, seed {})", opts.trials, opts.seed);
    report.record(
        &name,
        failure.map_or(Status::Checked(worst), Status::Failed),
        opts.tolerance,
    );

    let mut worst: f64 = 0.0;
    let mut failure = None;
    for k in 0..opts.trials {
        let net = random::network(&mut rng, 8, 3);
        let e = random::evidence(&mut rng, &net, 3);
        match inference_status(&net, &e, &opts.compile) {
            Status::Checked(d) => worst = worst.max(d),
            Status::Failed(why) => {
                failure.get_or_insert(format!("network {k}: {why}"));
            }
            Status::Skipped(_) => {}
        }
    }
    let name = format!("random networks ({} trials, seed {})", opts.trials, opts.seed);
    report.record(
        &name,
        failure.map_or(Status::Checked(worst), Status::Failed),
        opts.tolerance,
    );
}

pub fn run(path: Option<&str>, opts: &VerifyOptions) -> Result<Report, CliError> {
    let mut report = Report::default();
    if let Some(path) = path {
        let doc = NetworkDocument::load(path)?;
        if !doc.nodes.is_empty() {
            check_network(&mut report, "network", &doc.network()?, opts);
        }
        if doc.graph.is_some() {
            check_graph(&mut report, &doc, opts)?;
        }
        if doc.circuit.is_some() {
            let (circuit, faults) = doc.circuit()?;
            match build_circuit_model(&circuit, &faults) {
                Ok(net) => check_network(&mut report, "circuit", &net, opts),
                Err(e) => report.record("circuit", Status::Failed(e.to_string()), opts.tolerance),
            }
        }
    }
    check_random(&mut report, opts);
    Ok(report)
}
