use std::fmt;
use std::fs;
use std::io::Write;

use postsel_core::montecarlo::{
    self, ArmConditioning, DetectionConfig, Mode, Model, RunConfig, RunSummary, TrialOutcome,
};
use postsel_core::params::{self, PRESET_NAMES};
use postsel_core::trajectory::{self, ImpulseGeometry};
use postsel_core::{protocol, statistics, DerivedQuantities, Error, ExperimentParams, PhysicalConstants};
use postsel_core::Superposition;
use serde_json::{Map, Value};

use crate::output::{fmt_num, num, Document, DIMENSIONLESS, WIDTHS};
use crate::{ExactArgs, FeasibilityArgs, Format, Global, ModeArg, ModelArg, SimulateArgs, SweepArgs, TrajectoryArgs};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    /// Parameters outside the physical domain or a failed computation.
    Physics(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Physics(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Physics(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) | Error::UnknownPreset(_) => Failure::Usage(e.to_string()),
            other => Failure::Physics(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

const REGIME_THRESHOLD: f64 = protocol::REGIME_THRESHOLD;
const ANGSTROM: f64 = 1e-10;

fn unit_of(field: &str) -> &'static str {
    match field {
        "m1" | "m2" => "kg",
        "d" | "delta_x" => "m",
        "tau" | "T" => "s",
        "omega" => "rad/s",
        "density" => "kg/m^3",
        _ => DIMENSIONLESS,
    }
}

struct Source {
    label: Option<(&'static str, String)>,
    params: ExperimentParams,
}

fn load_params(global: &Global) -> Outcome<Option<Source>> {
    if let Some(name) = &global.preset {
        let params = ExperimentParams::preset(name)?;
        return Ok(Some(Source {
            label: Some(("preset", name.clone())),
            params,
        }));
    }
    let Some(path) = &global.params else {
        return Ok(None);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: malformed JSON: {e}", path.display())))?;
    // an output document carries its parameters under inputs.params
    let value = match value.get("inputs").and_then(|i| i.get("params")) {
        Some(p) => p.clone(),
        None => value,
    };
    let params: ExperimentParams = serde_json::from_value(value)
        .map_err(|e| Failure::Usage(format!("{}: invalid parameter set: {e}", path.display())))?;
    Ok(Some(Source {
        label: Some(("params_file", path.display().to_string())),
        params,
    }))
}

fn require_params(global: &Global) -> Outcome<Source> {
    load_params(global)?.ok_or_else(|| {
        Failure::Usage(format!(
            "a parameter set is required: --preset {{{}}} or --params <file.json>",
            PRESET_NAMES.join("|")
        ))
    })
}

fn params_value(p: &ExperimentParams) -> Value {
    let mut m = Map::new();
    for f in ExperimentParams::FIELDS {
        m.insert(f.to_string(), num(p.get(f).expect("listed field")));
    }
    Value::Object(m)
}

fn constants_value(c: &PhysicalConstants) -> Value {
    let mut m = Map::new();
    m.insert("G".into(), num(c.g));
    m.insert("hbar".into(), num(c.hbar));
    Value::Object(m)
}

fn echo_source(doc: &mut Document, source: &Source, constants: &PhysicalConstants) {
    if let Some((key, value)) = &source.label {
        doc.input(key, Value::from(value.as_str()));
    }
    doc.input("params", params_value(&source.params));
    doc.input("constants", constants_value(constants));
}

fn check_violations(p: &ExperimentParams) -> Outcome<()> {
    let v = params::validate(p);
    if v.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = v.iter().map(|x| format!("{}: {}", x.field, x.message)).collect();
    Err(Failure::Physics(format!("invalid parameters\n  {}", lines.join("\n  "))))
}

fn check_eps_r(eps: f64, r: f64) -> Outcome<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Failure::Physics(format!("epsilon out of (0,1): {eps}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Failure::Physics(format!("r must be finite and >= 0: {r}")));
    }
    Ok(())
}

fn meters_per_width(p: &ExperimentParams, c: &PhysicalConstants) -> f64 {
    params::momentum_width(p, c) * p.t_flight / p.m2
}

pub fn feasibility(global: &Global, args: &FeasibilityArgs) -> Outcome<Document> {
    let source = require_params(global)?;
    let constants = PhysicalConstants::default();
    let p = &source.params;
    check_violations(p)?;
    let q = DerivedQuantities::evaluate(p, &constants, args.target)?;

    let mut doc = Document::new("feasibility");
    echo_source(&mut doc, &source, &constants);
    doc.input("target_successes", Value::from(args.target));

    doc.scalar("delta_p", q.delta_p, "kg m/s");
    doc.scalar("big_delta_p", q.big_delta_p, "kg m/s");
    doc.scalar("sigma", q.sigma, "m");
    doc.scalar("kick_ratio", q.kick_ratio, WIDTHS);
    doc.scalar("shift_ratio", q.shift_ratio, WIDTHS);
    doc.scalar("epsilon_required", q.epsilon_required, DIMENSIONLESS);
    doc.scalar("epsilon_required_times_eta", q.epsilon_required_times_eta, DIMENSIONLESS);
    doc.scalar("p_success", q.p_success, DIMENSIONLESS);
    doc.scalar("p_success_leading", q.p_success_leading, DIMENSIONLESS);
    doc.scalar("p_discriminate", q.p_discriminate, DIMENSIONLESS);
    doc.scalar("p_discriminate_exact", q.p_discriminate_exact, DIMENSIONLESS);
    doc.count("target_successes", q.target_successes, "successes");
    doc.count("n_runs", q.n_runs, "runs");
    doc.count("n_runs_exact", q.n_runs_exact, "runs");
    doc.scalar("displacement_t", q.displacement_t, "m");
    doc.scalar("spread_t", q.spread_t, "m");
    doc.scalar("spread_std_t", q.spread_t * std::f64::consts::FRAC_1_SQRT_2, "m");
    doc.scalar("probe_radius", q.probe_radius, "m");
    let regime = protocol::regime_parameter(p.epsilon, q.kick_ratio);
    doc.scalar("regime_parameter", regime, DIMENSIONLESS);

    if !(0.1 * ANGSTROM..=10.0 * ANGSTROM).contains(&q.displacement_t) {
        doc.warn(format!(
            "far-field displacement {:.3e} m is not of order 1 Å (1e-10 m)",
            q.displacement_t
        ));
    }
    let mismatch = p.epsilon / q.epsilon_required;
    if !(0.5..=2.0).contains(&mismatch) {
        doc.warn(format!(
            "epsilon = {:.3e} differs from epsilon_required = {:.3e}; the amplified shift is {:.3e} widths instead of {}",
            p.epsilon,
            q.epsilon_required,
            q.shift_ratio,
            params::TARGET_SHIFT_RATIO
        ));
    }
    if regime > REGIME_THRESHOLD {
        doc.warn(format!("r/(sqrt2 epsilon) = {regime:.3e} exceeds {REGIME_THRESHOLD}; first-order amplification is unreliable"));
    }
    Ok(doc)
}

fn resolve_eps_r(
    eps: Option<f64>,
    r: Option<f64>,
    source: Option<&Source>,
    constants: &PhysicalConstants,
) -> Outcome<(f64, f64)> {
    let from_params = source.map(|s| (s.params.epsilon, params::kick_ratio(&s.params, constants)));
    match (eps, r, from_params) {
        (Some(e), Some(r), _) => Ok((e, r)),
        (e, r, Some((pe, pr))) => Ok((e.unwrap_or(pe), r.unwrap_or(pr))),
        _ => Err(Failure::Usage(
            "give --eps and --r, or a parameter set (--preset/--params) to derive them".to_string(),
        )),
    }
}

pub fn exact(global: &Global, args: &ExactArgs) -> Outcome<Document> {
    let source = load_params(global)?;
    let constants = PhysicalConstants::default();
    if let Some(s) = &source {
        check_violations(&s.params)?;
    }
    let (eps, r) = resolve_eps_r(args.eps, args.r, source.as_ref(), &constants)?;
    check_eps_r(eps, r)?;

    let mut doc = Document::new("exact");
    if let Some(s) = &source {
        echo_source(&mut doc, s, &constants);
    }
    doc.input("epsilon", num(eps));
    doc.input("r", num(r));

    let pre = protocol::preselect(eps)?;
    let wv = protocol::weak_value_exact(&pre, &protocol::dark_port())?;
    let post = protocol::postselected_state(eps, r)?;
    let p_disc = statistics::discrimination_probability(&Superposition::ground(), &post.state)?;
    let regime = protocol::regime_parameter(eps, r);

    doc.scalar("weak_value_exact", wv.re, DIMENSIONLESS);
    doc.scalar("weak_value_exact_imag", wv.im, DIMENSIONLESS);
    doc.scalar("weak_value_approx", protocol::weak_value_approx(eps), DIMENSIONLESS);
    doc.scalar("p_success_exact", protocol::postselection_probability(eps, r), DIMENSIONLESS);
    doc.scalar("p_success_approx", eps * eps / 4.0, DIMENSIONLESS);
    doc.scalar("postselected_mean_exact", protocol::postselected_mean_exact(eps, r)?, WIDTHS);
    doc.scalar("postselected_mean_approx", protocol::postselected_mean_approx(eps, r), WIDTHS);
    doc.scalar("p_discriminate_exact", p_disc, DIMENSIONLESS);
    doc.scalar("p_discriminate_leading", statistics::discrimination_leading_order(r / eps), DIMENSIONLESS);
    doc.scalar("regime_parameter", regime, DIMENSIONLESS);
    if regime <= REGIME_THRESHOLD {
        doc.label("regime", "valid");
    } else {
        doc.label("regime", "approximation invalid");
        doc.warn(format!("r/(sqrt2 epsilon) = {regime:.4} exceeds {REGIME_THRESHOLD}; leading-order values are unreliable"));
    }
    Ok(doc)
}

fn summary_results(doc: &mut Document, s: &RunSummary) {
    doc.label("model", model_name(s.model));
    doc.label("mode", mode_name(s.mode));
    doc.count("n_trials", s.n_trials, "trials");
    doc.count("n_postselected", s.n_postselected, "trials");
    if let Some(p) = s.empirical_p_success {
        doc.scalar("empirical_p_success", p, DIMENSIONLESS);
    }
    if let Some(p) = s.p_success_exact {
        doc.scalar("p_success_exact", p, DIMENSIONLESS);
    }
    if let Some(n) = s.equivalent_trials {
        doc.count("equivalent_trials", n, "trials");
    }
    doc.scalar("postselected_mean", s.postselected_mean, WIDTHS);
    doc.scalar("sample_std", s.sample_std, WIDTHS);
    doc.scalar("standard_error", s.standard_error, WIDTHS);
    doc.scalar("z_against_null", s.z_against_null, DIMENSIONLESS);
    if let Some(x) = s.position_mean_m {
        doc.scalar("position_mean", x, "m");
    }
    if let Some(x) = s.position_standard_error_m {
        doc.scalar("position_standard_error", x, "m");
    }
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Quantum => "quantum",
        Model::Classical => "classical",
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Full => "full",
        Mode::Conditioned => "conditioned",
    }
}

fn write_samples(path: &std::path::Path, rows: &[TrialOutcome]) -> Outcome<()> {
    let io = |e: csv::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["trial", "postselected", "momentum", "position_m"]).map_err(io)?;
    for t in rows {
        w.write_record([
            t.trial.to_string(),
            t.postselected.to_string(),
            t.momentum.map(fmt_num).unwrap_or_default(),
            t.position_m.map(fmt_num).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn simulate(global: &Global, args: &SimulateArgs) -> Outcome<Document> {
    let source = load_params(global)?;
    let constants = PhysicalConstants::default();
    if let Some(s) = &source {
        check_violations(&s.params)?;
    }
    let (eps, r) = resolve_eps_r(args.eps, args.r, source.as_ref(), &constants)?;
    check_eps_r(eps, r)?;
    let scale = source.as_ref().map(|s| meters_per_width(&s.params, &constants));

    let mut doc = Document::new("simulate");
    let seed = match global.seed {
        Some(s) => s,
        None if args.strict => {
            return Err(Failure::Usage("--strict requires an explicit --seed".to_string()));
        }
        None => {
            doc.warn("no --seed given; using seed 0");
            0
        }
    };
    if let Some(s) = &source {
        echo_source(&mut doc, s, &constants);
    }
    let model = match args.model {
        ModelArg::Quantum => Model::Quantum,
        ModelArg::Classical => Model::Classical,
    };
    let mode = match args.mode {
        ModeArg::Full => Mode::Full,
        ModeArg::Conditioned => Mode::Conditioned,
    };
    doc.input("model", Value::from(model_name(model)));
    doc.input("mode", Value::from(mode_name(mode)));
    doc.input("epsilon", num(eps));
    doc.input("r", num(r));
    doc.input("seed", Value::from(seed));

    if let Some(z) = args.until_z {
        if model != Model::Quantum {
            return Err(Failure::Usage("--until-z applies to the quantum model only".to_string()));
        }
        doc.input("until_z", num(z));
        doc.input("budget", Value::from(args.budget));
        doc.input("replicates", Value::from(args.replicates));
        doc.input("check_every", Value::from(args.check_every));
        detection(&mut doc, eps, r, scale, seed, args)?;
        return Ok(doc);
    }

    doc.input("trials", Value::from(args.trials));
    let config = RunConfig::new(args.trials, seed, mode, model)?;
    let (summary, rows) = match model {
        Model::Quantum => {
            if args.samples_csv.is_some() {
                let (s, rows) = montecarlo::run_quantum_with_samples(&config, eps, r, scale)?;
                (s, Some(rows))
            } else {
                (montecarlo::run_quantum(&config, eps, r, scale)?, None)
            }
        }
        Model::Classical => {
            if mode == Mode::Conditioned {
                doc.warn("the classical baseline has no conditioned mode; every trial is simulated");
            }
            doc.input("accept_l", num(args.accept_l));
            doc.input("accept_r", num(args.accept_r));
            let cond = ArmConditioning::new(args.accept_l, args.accept_r)?;
            if args.samples_csv.is_some() {
                let (s, rows) = montecarlo::run_classical_with_samples(&config, eps, r, &cond, scale)?;
                (s, Some(rows))
            } else {
                (montecarlo::run_classical(&config, eps, r, &cond, scale)?, None)
            }
        }
    };
    if let (Some(path), Some(rows)) = (&args.samples_csv, &rows) {
        doc.input("samples_csv", Value::from(path.display().to_string()));
        write_samples(path, rows)?;
    }
    summary_results(&mut doc, &summary);
    if model == Model::Quantum {
        let target = protocol::postselected_mean_exact(eps, r)?;
        doc.scalar("postselected_mean_exact", target, WIDTHS);
        doc.scalar(
            "deviation_in_standard_errors",
            (summary.postselected_mean - target) / summary.standard_error,
            DIMENSIONLESS,
        );
    } else if summary.postselected_mean > 0.0 || summary.postselected_mean < -r {
        doc.warn("classical conditional mean left [-r, 0]");
    }
    Ok(doc)
}

fn detection(
    doc: &mut Document,
    eps: f64,
    r: f64,
    scale: Option<f64>,
    seed: u64,
    args: &SimulateArgs,
) -> Outcome<()> {
    let z = args.until_z.expect("detection mode");
    let config = DetectionConfig {
        significance_target: z,
        seed,
        budget: args.budget,
        check_every: args.check_every,
    };
    let p_success = protocol::postselection_probability(eps, r);
    let shift = r / eps;
    let analytic = z * z / (shift * shift * p_success);
    doc.scalar("analytic_runs", analytic, "trials");
    // the z-test is scale free; without a readout scale positions are in widths
    let scale = scale.unwrap_or(1.0);
    match montecarlo::median_runs_to_detection(eps, r, scale, &config, args.replicates) {
        Ok((median, runs)) => {
            doc.count("median_runs", median, "trials");
            doc.scalar("median_over_analytic", median as f64 / analytic, DIMENSIONLESS);
            doc.column("total_trials", "trials", runs.iter().map(|d| d.total_trials as f64).collect());
            doc.column("n_postselected", "trials", runs.iter().map(|d| d.n_postselected as f64).collect());
            doc.column("z", DIMENSIONLESS, runs.iter().map(|d| d.z).collect());
        }
        Err(Error::BudgetExhausted { trials, z: reached }) => {
            doc.warn(format!("trial budget exhausted before reaching z = {z}; partial results reported"));
            doc.count("trials_used", trials, "trials");
            doc.scalar("z_reached", reached, DIMENSIONLESS);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

const SWEEP_COLUMNS: [(&str, &str); 16] = [
    ("delta_p", "kg m/s"),
    ("big_delta_p", "kg m/s"),
    ("sigma", "m"),
    ("kick_ratio", WIDTHS),
    ("shift_ratio", WIDTHS),
    ("epsilon_required", DIMENSIONLESS),
    ("epsilon_required_times_eta", DIMENSIONLESS),
    ("p_success", DIMENSIONLESS),
    ("p_success_leading", DIMENSIONLESS),
    ("p_discriminate", DIMENSIONLESS),
    ("p_discriminate_exact", DIMENSIONLESS),
    ("n_runs", "runs"),
    ("n_runs_exact", "runs"),
    ("displacement_t", "m"),
    ("spread_t", "m"),
    ("probe_radius", "m"),
];

fn sweep_row(q: &DerivedQuantities) -> [f64; 16] {
    [
        q.delta_p,
        q.big_delta_p,
        q.sigma,
        q.kick_ratio,
        q.shift_ratio,
        q.epsilon_required,
        q.epsilon_required_times_eta,
        q.p_success,
        q.p_success_leading,
        q.p_discriminate,
        q.p_discriminate_exact,
        q.n_runs as f64,
        q.n_runs_exact as f64,
        q.displacement_t,
        q.spread_t,
        q.probe_radius,
    ]
}

pub fn sweep_grid(from: f64, to: f64, points: usize, log: bool) -> Outcome<Vec<f64>> {
    if points == 0 {
        return Err(Failure::Usage("--points must be >= 1".to_string()));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(Failure::Usage("sweep bounds must be finite".to_string()));
    }
    if log && !(from > 0.0 && to > 0.0) {
        return Err(Failure::Usage("--log needs positive bounds".to_string()));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k == 0 {
                return from;
            }
            if k == points - 1 {
                return to;
            }
            let f = k as f64 / last;
            if log {
                (from.ln() + f * (to.ln() - from.ln())).exp()
            } else {
                from + f * (to - from)
            }
        })
        .collect())
}

pub fn sweep(global: &Global, args: &SweepArgs) -> Outcome<Document> {
    let source = require_params(global)?;
    let constants = PhysicalConstants::default();
    if !ExperimentParams::FIELDS.contains(&args.param.as_str()) {
        return Err(Failure::Usage(format!(
            "`{}` is not sweepable; choose one of {}",
            args.param,
            ExperimentParams::FIELDS.join(", ")
        )));
    }
    let grid = sweep_grid(args.from, args.to, args.points, args.log)?;

    let mut doc = Document::new("sweep");
    echo_source(&mut doc, &source, &constants);
    doc.input("param", Value::from(args.param.as_str()));
    doc.input("from", num(args.from));
    doc.input("to", num(args.to));
    doc.input("points", Value::from(args.points));
    doc.input("log", Value::from(args.log));
    doc.input("target_successes", Value::from(args.target));

    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); SWEEP_COLUMNS.len()];
    for &v in &grid {
        let mut p = source.params;
        p.set(&args.param, v);
        check_violations(&p).map_err(|e| Failure::Physics(format!("at {} = {v:e}: {e}", args.param)))?;
        let q = DerivedQuantities::evaluate(&p, &constants, args.target)?;
        for (col, x) in columns.iter_mut().zip(sweep_row(&q)) {
            col.push(x);
        }
    }
    doc.column(&args.param, unit_of(&args.param), grid);
    for ((name, unit), values) in SWEEP_COLUMNS.iter().zip(columns) {
        doc.column(name, unit, values);
    }
    Ok(doc)
}

pub fn trajectory(global: &Global, args: &TrajectoryArgs) -> Outcome<Document> {
    let source = require_params(global)?;
    let constants = PhysicalConstants::default();
    let p = &source.params;
    check_violations(p)?;
    let tau = args.tau.unwrap_or(p.tau);
    let dx = args.delta_x.unwrap_or(p.delta_x);
    if args.samples < 2 {
        return Err(Failure::Usage("--samples must be >= 2".to_string()));
    }
    let traj = trajectory::sg_trajectory(tau, dx)?;
    let geometry = ImpulseGeometry::symmetric(p.d, dx);
    let impulse = trajectory::impulse_time_dependent(p, &constants, &traj, &geometry)?;
    let gmm = constants.g * p.m1 * p.m2;
    let constant = gmm * tau / (p.d * p.d);

    let mut doc = Document::new("trajectory");
    echo_source(&mut doc, &source, &constants);
    doc.input("tau", num(tau));
    doc.input("delta_x", num(dx));
    doc.input("samples", Value::from(args.samples));

    let last = (args.samples - 1) as f64;
    let t: Vec<f64> = (0..args.samples).map(|k| tau * k as f64 / last).collect();
    let s: Vec<f64> = t.iter().map(|&t| traj.separation(t)).collect();
    let d_r: Vec<f64> = t.iter().map(|&t| geometry.near_arm_distance(&traj, t)).collect();
    let force: Vec<f64> = d_r.iter().map(|&d| gmm / (d * d)).collect();

    doc.scalar("impulse", impulse.value, "kg m/s");
    doc.scalar("impulse_error_estimate", impulse.error_estimate, "kg m/s");
    doc.scalar("delta_p_constant", constant, "kg m/s");
    doc.scalar("impulse_ratio", impulse.value / constant, DIMENSIONLESS);
    let start = geometry.start_distance;
    doc.scalar("stationary_start_ratio", (p.d / start) * (p.d / start), DIMENSIONLESS);
    doc.scalar("start_distance", start, "m");
    doc.scalar("closest_distance", p.d, "m");
    let [f1, f2] = traj.flip_times();
    doc.scalar("flip_time_1", f1, "s");
    doc.scalar("flip_time_2", f2, "s");
    doc.scalar("relative_acceleration", traj.relative_acceleration(), "m/s^2");

    doc.column("t", "s", t);
    doc.column("s", "m", s);
    doc.column("d_R", "m", d_r);
    doc.column("force", "N", force);
    Ok(doc)
}

pub fn emit(global: &Global, doc: &Document) -> Outcome<()> {
    for w in doc.warnings() {
        eprintln!("warning: {w}");
    }
    let body = match global.format {
        Format::Json => doc.to_json().into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            doc.write_csv(&mut buf)
                .map_err(|e| Failure::Usage(format!("csv output: {e}")))?;
            if doc.has_table() {
                eprint!("{}", doc.scalar_summary());
            }
            buf
        }
    };
    match &global.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&body)
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
    }
}
