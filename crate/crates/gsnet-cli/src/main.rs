#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod output;
mod source;

use std::io::Write;

use anyhow::{bail, Context, Result};
use clap::Parser;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use gsnet_core::correlators::Protocol;
use gsnet_core::ensemble::{crossover_mean_degree, mc_ensemble, ClosedForm, EnsembleSpec};
use gsnet_core::genfunc::gf_fidelity;
use gsnet_core::graph::DegreeDistribution;
use gsnet_core::noise::NoiseModel;
use gsnet_core::oracle::{leaf_rule_disagreements, oracle_check};
use gsnet_core::purification::{
    first_order_fixed_point, ghz_fidelity, purification_threshold_with, purify_fixed_point, CorrelatorTable,
    ThresholdCriterion, ThresholdOptions,
};
use gsnet_core::statmech::{
    fidelity_exact, first_order_decay, mc_fidelity, mean_field_decay, transfer_matrix_fidelity, DecayResult,
    MeanFieldSpec, Method, MAX_EXACT_N,
};

use args::*;
use output::{Body, Record, Report};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
        eprintln!("{}", json!({ "error": chain[0], "causes": &chain[1..] }));
        std::process::exit(2);
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        set_threads(t)?;
    }
    let report = dispatch(&cli.command)?;
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    report.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(())
}

#[cfg(feature = "parallel")]
fn set_threads(t: usize) -> Result<()> {
    if t == 0 {
        bail!("--threads must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_threads(t: usize) -> Result<()> {
    if t == 0 {
        bail!("--threads must be positive");
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Report> {
    let config = serde_json::to_value(cmd)?;
    let (name, seed, body) = match cmd {
        Command::Fidelity(a) => ("fidelity", Some(a.graph.seed), decay_records(a, false)?),
        Command::Decay(a) => ("decay", Some(a.graph.seed), decay_records(a, true)?),
        Command::MeanField(a) => {
            let args = FidelityArgs { graph: a.clone(), method: MethodArg::MeanField, samples: 0 };
            ("mean-field", Some(a.seed), decay_records(&args, true)?)
        }
        Command::Transfer(a) => ("transfer", None, transfer(a)?),
        Command::Genfunc(a) => ("genfunc", None, genfunc(a)?),
        Command::Purify(a) => ("purify", None, purify(a)?),
        Command::Threshold(a) => ("threshold", None, threshold(a)?),
        Command::Ensemble(a) => ("ensemble", Some(a.seed), ensemble(a)?),
        Command::Crossover(a) => ("crossover", None, crossover(a)?),
        Command::OracleCheck(a) => ("oracle-check", Some(a.seed), oracle(a)?),
    };
    Ok(Report { command: name, seed, config, body })
}

fn decay_records(a: &FidelityArgs, rates_allowed: bool) -> Result<Body> {
    if !rates_allowed && matches!(a.method, MethodArg::FirstOrder | MethodArg::MeanField) {
        bail!("first-order and mean-field give a decay rate only; use the decay subcommand");
    }
    let noises = source::noise_sweep(&a.graph.noise)?;
    let built = source::build(&a.graph, source::semantics(a.graph.noise.semantics))?;
    let n = built.model.n();
    let pur = source::purification(a.graph.purification);
    let ring = || built.ring.context("this method needs --graph ring:N with a ring protocol");
    let mut records = Vec::new();
    for noise in &noises {
        let method = match a.method {
            MethodArg::Auto if n <= MAX_EXACT_N => MethodArg::Exact,
            MethodArg::Auto => MethodArg::Mc,
            m => m,
        };
        let record = match method {
            MethodArg::Exact => Record::from_decay(noise.p, &fidelity_exact(&built.model, noise)?),
            MethodArg::Mc => {
                let r = mc_fidelity(&built.model, noise, a.samples, a.graph.seed)?;
                Record::from_decay(noise.p, &r).with("samples", json!(a.samples))
            }
            MethodArg::Transfer => {
                let (v, n) = ring()?;
                let r = transfer_matrix_fidelity(v, n, noise, &pur, source::leaf_rule(a.graph.leaf_rule))?;
                Record::from_decay(noise.p, &r)
            }
            MethodArg::Genfunc => {
                let (v, n) = ring()?;
                if a.graph.leaf_rule != LeafRuleArg::Physical {
                    bail!("generating functions use the physical leaf rule");
                }
                Record::from_decay(noise.p, &gf_fidelity(v, n, noise, &pur)?)
            }
            MethodArg::FirstOrder => {
                let exact = first_order_decay(&built.model)?;
                let f = exact.to_f64().context("first-order rate out of range")?;
                let beta = noise.beta();
                let r = DecayResult {
                    n,
                    fidelity: None,
                    beta_f: f * beta,
                    f: Some(f),
                    method: Method::FirstOrder,
                    stderr: None,
                    n_samples: None,
                };
                Record::from_decay(noise.p, &r).with("f_exact", json!(exact.to_string()))
            }
            MethodArg::MeanField => {
                if !noise.is_uniform() {
                    bail!("mean field needs p1 = p2 = p");
                }
                let mf = mean_field_decay(&MeanFieldSpec::new(built.model.clone()), noise.p)?;
                let r = DecayResult::from_log_fidelity(n, -mf.beta_f_mf * n as f64, noise.beta(), Method::MeanField);
                Record::from_decay(noise.p, &DecayResult { f: Some(mf.f_mf), ..r })
                    .with("s_star", json!(mf.s_star))
                    .with("iterations", json!(mf.iterations))
            }
            MethodArg::Auto => unreachable!("resolved above"),
        };
        records.push(record);
    }
    Ok(Body::Records(records))
}

fn ring_variant(r: RingArg) -> gsnet_core::correlators::RingVariant {
    use gsnet_core::correlators::RingVariant;
    match r {
        RingArg::BipartiteA => RingVariant::BipartiteA,
        RingArg::BipartiteB => RingVariant::BipartiteB,
        RingArg::S1 => RingVariant::S1,
        RingArg::S2 => RingVariant::S2,
    }
}

fn transfer(a: &RingArgs) -> Result<Body> {
    let pur = source::purification(a.purification);
    let v = ring_variant(a.protocol);
    let mut records = Vec::new();
    for &n in &a.n {
        for noise in source::noise_sweep(&a.noise)? {
            let r = transfer_matrix_fidelity(v, n, &noise, &pur, gsnet_core::correlators::LeafRule::Physical)?;
            records.push(Record::from_decay(noise.p, &r));
        }
    }
    Ok(Body::Records(records))
}

fn genfunc(a: &GenfuncArgs) -> Result<Body> {
    let r = &a.ring;
    let pur = source::purification(r.purification);
    let v = ring_variant(r.protocol);
    let mut records = Vec::new();
    for &n in &r.n {
        for noise in source::noise_sweep(&r.noise)? {
            let gf = gf_fidelity(v, n, &noise, &pur)?;
            let mut rec = Record::from_decay(noise.p, &gf);
            if a.exact {
                let model = v.model(n, pur.clone(), noise.semantics, gsnet_core::correlators::LeafRule::Physical)?;
                let ex = fidelity_exact(&model, &noise)?;
                let diff = match (gf.fidelity, ex.fidelity) {
                    (Some(x), Some(y)) => json!((x - y).abs()),
                    _ => Value::Null,
                };
                rec = rec.with("abs_diff_exact", diff);
                records.push(rec);
                records.push(Record::from_decay(noise.p, &ex));
            } else {
                records.push(rec);
            }
        }
    }
    Ok(Body::Records(records))
}

fn table_json(t: &CorrelatorTable) -> Value {
    json!({ "center_off": t.row(0), "center_on": t.row(1) })
}

fn purify(a: &PurifyArgs) -> Result<Body> {
    let (p1, p2) = (a.p1.unwrap_or(a.p), a.p2.unwrap_or(a.p));
    let mut result = if a.first_order {
        let t = first_order_fixed_point(a.j, a.p);
        json!({ "j": a.j, "method": "first-order", "fidelity": ghz_fidelity(&t), "table": table_json(&t) })
    } else {
        let fp = purify_fixed_point(a.j, p1, p2, a.pc, a.tol, a.max_iter)?;
        json!({
            "j": a.j,
            "method": "iterate",
            "fidelity": ghz_fidelity(&fp.table),
            "iterations": fp.iterations,
            "converged": fp.converged,
            "table": table_json(&fp.table),
        })
    };
    result["p"] = json!(a.p);
    Ok(Body::Object(result))
}

fn threshold(a: &ThresholdArgs) -> Result<Body> {
    let criterion = match a.criterion {
        CriterionArg::FidelityAboveHalf => ThresholdCriterion::FidelityAboveHalf,
        CriterionArg::ImprovesOnInput => ThresholdCriterion::ImprovesOnInput,
    };
    let opts = ThresholdOptions { criterion, tol: a.tol, ..Default::default() };
    let rows =
        a.j.iter()
            .map(|&j| Ok(json!({ "j": j, "threshold": purification_threshold_with(j, a.pc, &opts)? })))
            .collect::<Result<_>>()?;
    Ok(Body::Rows(rows))
}

fn protocol(p: NetworkProtocol) -> Protocol {
    match p {
        NetworkProtocol::BipartiteA => Protocol::BipartiteA,
        NetworkProtocol::BipartiteB => Protocol::BipartiteB,
        NetworkProtocol::Subgraph => Protocol::Subgraph,
    }
}

fn form(f: FormArg) -> ClosedForm {
    match f {
        FormArg::Equation => ClosedForm::Equation,
        FormArg::Text => ClosedForm::Text,
        FormArg::RandomOrder => ClosedForm::RandomOrder,
    }
}

fn ensemble(a: &EnsembleArgs) -> Result<Body> {
    let dist = DegreeDistribution::parse(&a.dist)?;
    let spec = EnsembleSpec::new(dist, protocol(a.protocol), NoiseModel::uniform(a.p)?)?.with_form(form(a.form));
    let r = mc_ensemble(&spec, a.graphs, a.nodes, a.samples, a.seed)?;
    Ok(Body::Object(json!({
        "fbar_mc": r.fbar,
        "fbar_closed": spec.fbar()?,
        "stderr": r.stderr,
        "spread": r.spread,
        "excluded": r.excluded,
        "per_graph": r.per_graph,
        "method": "mc",
    })))
}

fn crossover(a: &CrossoverArgs) -> Result<Body> {
    let k = crossover_mean_degree(protocol(a.a), protocol(a.b), form(a.form))?;
    Ok(Body::Object(json!({ "mean_degree": k, "crossover": k.is_some(), "method": "closed-form" })))
}

fn oracle(a: &OracleArgs) -> Result<Body> {
    let src = source::parse_graph(&a.graph, a.seed)?;
    let spec = source::build_spec(
        src,
        a.protocol,
        a.orientation.as_deref(),
        a.edge_order,
        source::purification(a.purification),
        source::leaf_rule(a.leaf_rule),
        a.seed,
    )?;
    if spec.n() > a.n_max {
        bail!("graph has {} nodes, above --n-max {}", spec.n(), a.n_max);
    }
    let noise = NoiseModel::new(a.p1, a.p2, 0.0, a.p, source::semantics(a.semantics))?;
    let report = oracle_check(&spec, &noise, a.tol)?;
    let mut v = serde_json::to_value(&report)?;
    v["passed"] = json!(report.failing_configs.is_empty());
    v["literal_rule_disagreements"] = json!(leaf_rule_disagreements(&spec));
    Ok(Body::Object(v))
}
