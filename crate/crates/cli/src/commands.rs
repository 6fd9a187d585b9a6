use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sympd::calabi::twist_calabi_closed_form;
use sympd::{
    base_configuration, braid_from_loop, calabi, defect_estimate, extend_qm_with, gamma_hat, gamma_tilde, homogenize,
    lift_independence_residual, parse_flat, rotation_number, signature, BraidQm, BraidWord, Configuration,
    DiskQuadrature, Extension, IsotopySpec64, PairFamily, Point64, QMFunctional64, QMValue64, ResultRecord, RotConfig,
    Scenario64, TwistProfile,
};

use crate::args::{BraidCommand, ExperimentCommand, FunctionalArgs, InvariantArgs, InvariantName};

/// A failed run: configuration problems exit with 2, numerical ones with 1.
#[derive(Debug)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub config: bool,
}

impl Failure {
    pub fn config(code: &str, message: impl Into<String>) -> Self {
        Failure { code: code.into(), message: message.into(), config: true }
    }

    fn numeric(code: &str, message: impl Into<String>) -> Self {
        Failure { code: code.into(), message: message.into(), config: false }
    }
}

impl From<sympd::Error> for Failure {
    fn from(e: sympd::Error) -> Self {
        Failure { code: e.code().into(), message: e.to_string(), config: e.is_config_error() }
    }
}

type Out<T> = Result<T, Failure>;

fn emit<T: Serialize>(line: &T) {
    println!("{}", serde_json::to_string(line).expect("records serialize"));
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn parse_flow(text: &str) -> Out<IsotopySpec64> {
    Ok(IsotopySpec64::parse(text)?)
}

/// Config file entries overlaid with the command-line flags.
fn settings(
    fa: &FunctionalArgs,
    invariant: Option<InvariantName>,
    flow: Option<&str>,
) -> Out<BTreeMap<String, String>> {
    let mut map = match &fa.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config("ConfigUnreadable", format!("{}: {e}", path.display())))?;
            parse_flat(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: String| {
        map.insert(k.to_string(), v);
    };
    if let Some(i) = invariant {
        set("invariant", i.key().into());
    }
    if let Some(q) = &fa.qm {
        set("gg.qm", q.clone());
    }
    if let Some(n) = fa.n {
        set("gg.n", n.to_string());
    }
    if let Some(s) = fa.samples {
        set("gg.samples", s.to_string());
    }
    if let Some(s) = fa.seed {
        set("seed", s.to_string());
    }
    if let Some(text) = flow {
        map.retain(|k, _| !k.starts_with("flow."));
        map.insert("flow.kind".into(), "expr".into());
        map.insert("flow.expr".into(), text.into());
    }
    Ok(map)
}

/// Scenario whose flow is irrelevant; only the functional settings matter.
fn functional_scenario(fa: &FunctionalArgs, invariant: InvariantName) -> Out<Scenario64> {
    let mut map = settings(fa, Some(invariant), None)?;
    if !map.contains_key("flow.kind") {
        map.insert("flow.kind".into(), "id".into());
    }
    Ok(Scenario64::from_flat(&map)?)
}

pub fn invariant(args: &InvariantArgs) -> Out<()> {
    let mut map = settings(&args.functional, args.invariant, args.flow.as_deref())?;
    if let Some(k) = args.kmax {
        map.insert("gg.kmax".into(), k.to_string());
    }
    if !map.contains_key("flow.kind") {
        return Err(Failure::config("InvalidArgument", "no flow given (use --flow or flow.* config keys)"));
    }
    let scenario = Scenario64::from_flat(&map)?;
    let start = Instant::now();
    let v = scenario.run()?;
    emit(&v.record(elapsed_ms(start)));
    Ok(())
}

#[derive(Serialize)]
struct BraidRecord {
    invariant: &'static str,
    scenario: String,
    value: Vec<i32>,
    strands: usize,
    stderr: f64,
    bias: f64,
    seed: Option<u64>,
    runtime_ms: f64,
}

fn parse_points(text: &str) -> Out<Vec<Point64>> {
    text.split(';')
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| Failure::config("InvalidArgument", format!("bad point {pair:?}")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| Failure::config("InvalidArgument", format!("bad coordinate {s:?}")))
            };
            Ok(Point64::new(num(x)?, num(y)?))
        })
        .collect()
}

pub fn braid(cmd: &BraidCommand) -> Out<()> {
    let BraidCommand::Extract { flow, n, points } = cmd;
    let spec = parse_flow(flow)?;
    let config = match points {
        Some(text) => {
            let pts = parse_points(text)?;
            if pts.len() != *n {
                return Err(Failure::config(
                    "InvalidArgument",
                    format!("--points has {} points, --n is {n}", pts.len()),
                ));
            }
            Configuration::new(pts)?
        }
        None => base_configuration(*n)?,
    };
    let start = Instant::now();
    let word = braid_from_loop(&spec, &config)?;
    emit(&BraidRecord {
        invariant: "braid",
        scenario: spec.to_string(),
        value: word.letters.clone(),
        strands: word.strands,
        stderr: 0.0,
        bias: 0.0,
        seed: None,
        runtime_ms: elapsed_ms(start),
    });
    Ok(())
}

fn relabel(v: &QMValue64, invariant: String, scenario: &str, runtime_ms: f64) -> ResultRecord {
    let mut r = v.record(runtime_ms);
    r.invariant = invariant;
    r.scenario = scenario.to_string();
    r
}

fn write_csv(path: &Path, rows: &[ResultRecord]) -> Out<()> {
    let io = |e: csv::Error| Failure::numeric("IoError", format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::numeric("IoError", format!("{}: {e}", path.display())))
}

const DEFAULT_RATIO_FLOWS: [&str; 3] =
    ["twist:amp=0.7,support=0.8", "twist:amp=-0.5,support=0.6", "twist:amp=1,support=0.95"];

pub fn experiment(cmd: &ExperimentCommand) -> Out<()> {
    let mut rows = Vec::new();
    let csv = match cmd {
        ExperimentCommand::Defect { invariant, family, pairs, functional, csv } => {
            let scenario = functional_scenario(functional, *invariant)?;
            let fam = PairFamily::parse(family)?;
            let phi = scenario.functional();
            let start = Instant::now();
            let d = defect_estimate(&phi, *pairs, scenario.gg.seed, fam)?;
            rows.push(ResultRecord {
                invariant: format!("defect({phi})"),
                value: d,
                stderr: 0.0,
                bias: 0.0,
                seed: Some(scenario.gg.seed),
                scenario: format!("{family} x{pairs}"),
                runtime_ms: elapsed_ms(start),
            });
            csv
        }
        ExperimentCommand::Extension { invariant, flow, kmax, deck, functional, csv } => {
            let phi = functional_scenario(functional, *invariant)?.functional();
            let lift = parse_flow(flow)?;
            let start = Instant::now();
            let ext = Extension::new(phi.clone(), *kmax)?;
            rows.push(relabel(&ext.a_phi, format!("a_phi({phi})"), "rigid:1", elapsed_ms(start)));
            let start = Instant::now();
            let psi = extend_qm_with(&ext, &lift)?;
            rows.push(relabel(&psi, format!("ext({phi})"), &lift.to_string(), elapsed_ms(start)));
            for k in 1..=*deck {
                let start = Instant::now();
                let r = lift_independence_residual(&ext, &lift, k)?;
                rows.push(relabel(&r, format!("residual(ext({phi}),{k})"), &lift.to_string(), elapsed_ms(start)));
            }
            csv
        }
        ExperimentCommand::CalabiRatio { flow, samples, kmax, seed, csv } => {
            let texts: Vec<&str> =
                if flow.is_empty() { DEFAULT_RATIO_FLOWS.to_vec() } else { flow.iter().map(|s| s.as_str()).collect() };
            for text in texts {
                let spec = parse_flow(text)?;
                let start = Instant::now();
                let g = gamma_tilde(BraidQm::Writhe, 2, &spec, *samples, *seed, *kmax)?;
                let c = calabi(&spec, &DiskQuadrature::default())?.value;
                rows.push(ResultRecord {
                    invariant: "gg(writhe,2)/calabi".into(),
                    value: g.value / c,
                    stderr: g.stderr / c.abs(),
                    bias: g.bias_estimate / c.abs(),
                    seed: Some(*seed),
                    scenario: spec.to_string(),
                    runtime_ms: elapsed_ms(start),
                });
            }
            csv
        }
        ExperimentCommand::Homogeneity { invariant, flow, kmax, functional, csv } => {
            let phi: QMFunctional64 = functional_scenario(functional, *invariant)?.functional();
            let spec = parse_flow(flow)?;
            if *kmax == 0 || !kmax.is_power_of_two() {
                return Err(Failure::config("InvalidArgument", format!("--kmax must be a power of two, got {kmax}")));
            }
            let mut k = 1;
            while k <= *kmax {
                let start = Instant::now();
                let v = homogenize(&phi, &spec, k)?;
                rows.push(relabel(&v, format!("{phi}[k={k}]"), &spec.to_string(), elapsed_ms(start)));
                k *= 2;
            }
            csv
        }
    };
    for row in &rows {
        emit(row);
    }
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRecord {
    #[serde(flatten)]
    record: ResultRecord,
    expected: f64,
    ok: bool,
}

pub fn selftest() -> Out<()> {
    let twist = TwistProfile::compact(0.7, 0.8);
    let two = |letters: Vec<i32>| BraidWord::new(2, letters).map(|b| signature(&b) as f64);
    type Check = (&'static str, &'static str, f64, f64, Box<dyn Fn() -> sympd::Result<f64>>);
    let checks: Vec<Check> = vec![
        (
            "ruelle",
            "rigid:1",
            PI,
            1e-3,
            Box::new(|| Ok(homogenize(&QMFunctional64::ruelle(), &IsotopySpec64::rigid(1.0), 2)?.value)),
        ),
        (
            "rot",
            "rigid:1",
            1.0,
            1e-9,
            Box::new(|| Ok(rotation_number(&IsotopySpec64::rigid(1.0), &RotConfig::default())?.value)),
        ),
        (
            "rot",
            "twist:amp=0.7,support=0.8",
            0.0,
            1e-9,
            Box::new(move || Ok(rotation_number(&IsotopySpec64::twist(twist), &RotConfig::default())?.value)),
        ),
        (
            "gg(linking:1:2,2)",
            "rigid:1",
            PI * PI,
            1e-9,
            Box::new(|| Ok(gamma_hat(BraidQm::Linking(1, 2), 2, &IsotopySpec64::rigid(1.0), 256, 0)?.value)),
        ),
        (
            "gg(writhe,2)",
            "rigid:1",
            2.0 * PI * PI,
            1e-9,
            Box::new(|| Ok(gamma_tilde(BraidQm::Writhe, 2, &IsotopySpec64::rigid(1.0), 256, 0, 2)?.value)),
        ),
        ("signature", "s1^2", -1.0, 0.0, Box::new(move || two(vec![1, 1]))),
        ("signature", "s1^3", -2.0, 0.0, Box::new(move || two(vec![1, 1, 1]))),
        (
            "calabi",
            "twist:amp=0.7,support=0.8",
            twist_calabi_closed_form(&twist),
            1e-6,
            Box::new(move || Ok(calabi(&IsotopySpec64::twist(twist), &DiskQuadrature::default())?.value)),
        ),
        (
            "braid",
            "rigid:1",
            2.0,
            0.0,
            Box::new(|| {
                let b = braid_from_loop(&IsotopySpec64::rigid(1.0), &base_configuration(2)?)?;
                Ok(if b.letters == [1, 1] { 2.0 } else { -1.0 })
            }),
        ),
    ];
    let mut failures = 0;
    for (name, scenario, expected, tol, run) in checks {
        let start = Instant::now();
        let value = run()?;
        let ok = (value - expected).abs() <= tol;
        failures += usize::from(!ok);
        emit(&CheckRecord {
            record: ResultRecord {
                invariant: format!("selftest:{name}"),
                value,
                stderr: 0.0,
                bias: 0.0,
                seed: None,
                scenario: scenario.into(),
                runtime_ms: elapsed_ms(start),
            },
            expected,
            ok,
        });
    }
    if failures > 0 {
        return Err(Failure::numeric("SelftestFailed", format!("{failures} checks failed")));
    }
    Ok(())
}
