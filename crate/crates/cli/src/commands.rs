use crate::config::{ConfigError, ModelKind, RawConfig, ResolveError, RunConfig};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use svsnn_core::checkpoint::{config_hash, load_checkpoint, save_checkpoint, AnyModel};
use svsnn_core::model::{PointModel, Query, SvSnnConfig, SvSnnModel};
use svsnn_core::baseline::MlpModel;
use svsnn_core::diagnostics::{
    assemble_jacobian, jacobian_report, ntk_from_jacobian, OperatorKind, DEFAULT_ETA,
};
use svsnn_core::numerics::linspace;
use svsnn_core::problems::{make_problem, PdeProblem, ProblemError};
use svsnn_core::sampling::FrequencyPlan;
use svsnn_core::training::{
    stream, test_metrics, train_with, ConstraintSet, TrainConfig, TrainRecord,
};

#[derive(Debug)]
pub enum CliError {
    UnknownProblem(String),
    Config(String),
    Run(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::UnknownProblem(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Run(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownProblem(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ResolveError> for CliError {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::Config(c) => CliError::Config(c.to_string()),
            ResolveError::Problem(p) => p.into(),
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::UnknownProblem(_) => CliError::UnknownProblem(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

/// Build the configured model, seeding initialization from the run seed's
/// `init` sub-stream.
pub fn build_model(cfg: &RunConfig, problem: &PdeProblem<f64>) -> Result<AnyModel, CliError> {
    let mut rng = stream(cfg.train.seed, "init");
    match cfg.model {
        ModelKind::SvSnn => {
            let plans: Vec<FrequencyPlan<f64>> = cfg
                .w_char
                .iter()
                .map(|&w| {
                    let mut plan = FrequencyPlan::new(w, cfg.features).with_sigma(cfg.sigma);
                    plan.w_min = cfg.w_min;
                    if let Some(w_max) = cfg.w_max {
                        plan.w_max = w_max;
                    }
                    plan
                })
                .collect();
            let model_cfg = SvSnnConfig {
                modes: cfg.modes,
                features: vec![cfg.features; problem.dim],
                temporal: problem.time_dependent,
                field_count: problem.field_count,
            };
            let model = SvSnnModel::init_with_amplitude(model_cfg, &plans, cfg.amp_scale, &mut rng)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(AnyModel::SvSnn(model))
        }
        ModelKind::Baseline => Ok(AnyModel::Mlp(MlpModel::init(
            cfg.widths.clone(),
            problem.dim,
            problem.time_dependent,
            &mut rng,
        ))),
    }
}

pub struct TrainArtifacts {
    pub params: usize,
    pub final_record: Option<TrainRecord>,
    pub wall_seconds: f64,
}

/// Run one training job, writing `records.jsonl`, `checkpoint.bin`, and
/// `summary.json` into `out`.
pub fn run_training(
    cfg: &RunConfig,
    problem: &PdeProblem<f64>,
    out: &Path,
) -> Result<TrainArtifacts, CliError> {
    std::fs::create_dir_all(out)?;
    let records_path = out.join("records.jsonl");
    let mut records_file = std::io::BufWriter::new(std::fs::File::create(&records_path)?);
    let mut model = build_model(cfg, problem)?;
    let started = std::time::Instant::now();

    let mut write_record = |r: &TrainRecord| {
        let _ = writeln!(records_file, "{}", r.to_json_line());
        let _ = records_file.flush();
    };

    let result = match &mut model {
        AnyModel::SvSnn(m) => train_with(m, problem, &cfg.train, &mut write_record),
        AnyModel::Mlp(m) => train_with(m, problem, &cfg.train, &mut write_record),
    };
    drop(write_record);

    let output = result.map_err(|e| CliError::Run(e.to_string()))?;

    let flat = match &model {
        AnyModel::SvSnn(m) => m.flatten(),
        AnyModel::Mlp(m) => m.flatten(),
    };
    let hash = config_hash(cfg.text.as_bytes());
    save_checkpoint(&out.join("checkpoint.bin"), problem.id, hash, &flat)
        .map_err(|e| CliError::Run(e.to_string()))?;

    let final_record = output.records.last().cloned();
    let wall = started.elapsed().as_secs_f64();
    let summary = json!({
        "problem": problem.id,
        "model": match cfg.model { ModelKind::SvSnn => "svsnn", ModelKind::Baseline => "baseline" },
        "params": flat.layout.total,
        "epochs": cfg.train.epochs,
        "seed": cfg.train.seed,
        "final": final_record.as_ref().map(|r| json!({
            "loss_ic": r.loss_ic,
            "loss_pde": r.loss_pde,
            "loss_bc": r.loss_bc,
            "loss_total": r.loss_total,
        })),
        "rel_l2": final_record.as_ref().and_then(|r| r.rel_l2.clone()),
        "max_abs": final_record.as_ref().and_then(|r| r.max_abs.clone()),
        "wall_seconds": wall,
    });
    std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary).unwrap())?;
    Ok(TrainArtifacts {
        params: flat.layout.total,
        final_record,
        wall_seconds: wall,
    })
}

pub fn cmd_train(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let raw = RawConfig::load(config_path)?;
    let (mut cfg, problem) = RunConfig::resolve(&raw)?;
    if let Some(seed) = seed {
        cfg.train.seed = seed;
    }
    let art = run_training(&cfg, &problem, out)?;
    println!(
        "trained {} on {} ({} params) in {:.1}s -> {}",
        match cfg.model { ModelKind::SvSnn => "svsnn", ModelKind::Baseline => "baseline" },
        problem.id,
        art.params,
        art.wall_seconds,
        out.display()
    );
    if let Some(r) = &art.final_record {
        println!(
            "final losses: ic {:.3e} pde {:.3e} bc {:.3e} total {:.3e}  rel_l2 {:?}",
            r.loss_ic, r.loss_pde, r.loss_bc, r.loss_total, r.rel_l2
        );
    }
    Ok(())
}

/// Parse `AxB` / `AxBxC` grid specs.
fn parse_grid(spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split('x')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad grid spec `{spec}`; expected like 200x200")))
}

fn grid_points(
    problem: &PdeProblem<f64>,
    grid: Option<&str>,
) -> Result<Vec<(Vec<f64>, Option<f64>)>, CliError> {
    let Some(spec) = grid else {
        return Ok(problem.eval_points());
    };
    let dims = parse_grid(spec)?;
    let expect = problem.dim + usize::from(problem.time_dependent);
    if dims.len() != expect {
        return Err(CliError::Config(format!(
            "grid `{spec}` has {} axes, problem needs {expect}",
            dims.len()
        )));
    }
    let axes: Vec<Vec<f64>> = dims
        .iter()
        .zip(&problem.bounds)
        .map(|(&n, &(lo, hi))| linspace(lo, hi, n.max(2)))
        .collect();
    let mut out = Vec::new();
    match (problem.dim, problem.time_dependent) {
        (1, true) => {
            for &t in &axes[1] {
                for &x in &axes[0] {
                    out.push((vec![x], Some(t)));
                }
            }
        }
        (2, false) => {
            for &y in &axes[1] {
                for &x in &axes[0] {
                    if problem.geometry.as_ref().map_or(true, |g| g.contains([x, y])) {
                        out.push((vec![x, y], None));
                    }
                }
            }
        }
        (2, true) => {
            for &t in &axes[2] {
                for &y in &axes[1] {
                    for &x in &axes[0] {
                        if problem.geometry.as_ref().map_or(true, |g| g.contains([x, y])) {
                            out.push((vec![x, y], Some(t)));
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

fn load_model_for(
    checkpoint: &Path,
    problem_override: Option<&str>,
) -> Result<(AnyModel, PdeProblem<f64>), CliError> {
    let loaded = load_checkpoint(checkpoint).map_err(|e| CliError::Run(e.to_string()))?;
    let problem_id = problem_override.unwrap_or(&loaded.problem_id).to_string();
    let problem = make_problem::<f64>(&problem_id)?;
    let model = AnyModel::from_flat(
        problem.dim,
        problem.time_dependent,
        &loaded.params.layout.spec.clone(),
        loaded.params.data,
    )
    .map_err(|e| CliError::Run(e.to_string()))?;
    Ok((model, problem))
}

pub fn cmd_evaluate(
    checkpoint: &Path,
    problem_override: Option<&str>,
    grid: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let (model, problem) = load_model_for(checkpoint, problem_override)?;
    let points = grid_points(&problem, grid)?;
    std::fs::create_dir_all(out)?;

    let metrics = match &model {
        AnyModel::SvSnn(m) => test_metrics(m, &problem, &points),
        AnyModel::Mlp(m) => test_metrics(m, &problem, &points),
    }
    .map_err(|e| CliError::Run(e.to_string()))?;
    if metrics.iter().any(|m| !m.rel_l2.is_finite() || !m.max_abs.is_finite()) {
        return Err(CliError::Run("non-finite prediction metrics".into()));
    }

    for (f, name) in problem.field_names.iter().enumerate() {
        let mut csv = std::io::BufWriter::new(std::fs::File::create(
            out.join(format!("field_{name}.csv")),
        )?);
        let mut header: Vec<&str> = vec!["x"];
        if problem.dim == 2 {
            header.push("y");
        }
        if problem.time_dependent {
            header.push("t");
        }
        header.extend(["predicted", "exact", "abs_error"]);
        writeln!(csv, "{}", header.join(","))?;
        let query = [Query::value(f as u8)];
        let exact = problem.exact.as_ref();
        let mut scratch_sv = Default::default();
        let mut scratch_mlp = Default::default();
        for (x, t) in &points {
            let mut val = [0.0];
            match &model {
                AnyModel::SvSnn(m) => m
                    .eval_queries(&query, x, *t, &mut scratch_sv, &mut val)
                    .map_err(|e| CliError::Run(e.to_string()))?,
                AnyModel::Mlp(m) => m
                    .eval_queries(&query, x, *t, &mut scratch_mlp, &mut val)
                    .map_err(|e| CliError::Run(e.to_string()))?,
            }
            let e = exact.map(|ef| ef(x, *t, f));
            let mut cols: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            if let Some(t) = t {
                cols.push(t.to_string());
            }
            cols.push(val[0].to_string());
            match e {
                Some(e) => {
                    cols.push(e.to_string());
                    cols.push((val[0] - e).abs().to_string());
                }
                None => {
                    cols.push(String::new());
                    cols.push(String::new());
                }
            }
            writeln!(csv, "{}", cols.join(","))?;
        }
    }

    let mut per_field = serde_json::Map::new();
    for (f, name) in problem.field_names.iter().enumerate() {
        if let Some(m) = metrics.get(f) {
            per_field.insert(
                name.to_string(),
                json!({"rel_l2": m.rel_l2, "max_abs": m.max_abs}),
            );
        }
    }
    std::fs::write(
        out.join("metrics.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(per_field)).unwrap(),
    )?;
    println!("evaluated {} points -> {}", points.len(), out.display());
    for (f, name) in problem.field_names.iter().enumerate() {
        if let Some(m) = metrics.get(f) {
            println!("  {name}: rel_l2 {:.3e}  max_abs {:.3e}", m.rel_l2, m.max_abs);
        }
    }
    Ok(())
}

pub fn cmd_diagnose(
    checkpoint: &Path,
    problem_override: Option<&str>,
    out: &Path,
    seed: u64,
) -> Result<(), CliError> {
    let (model, problem) = load_model_for(checkpoint, problem_override)?;
    std::fs::create_dir_all(out)?;
    // diagnostic point sets: recommended counts, rows capped downstream
    let tc = TrainConfig {
        n_ic: problem.recommended.n_ic.min(512),
        n_bc: problem.recommended.n_bc.min(512),
        n_pde: problem.recommended.n_pde.min(512),
        seed,
        ..TrainConfig::default()
    };
    let sets =
        ConstraintSet::sample(&problem, &tc).map_err(|e| CliError::Run(e.to_string()))?;

    let mut operators = vec![OperatorKind::Pde, OperatorKind::Bc];
    if problem.time_dependent {
        operators.insert(0, OperatorKind::Ic);
    }

    let mut diag = serde_json::Map::new();
    let mut worst_ntk_residual = 0.0f64;
    for op in operators {
        let (j, residual) = match &model {
            AnyModel::SvSnn(m) => assemble_jacobian(m, &problem, op, &sets),
            AnyModel::Mlp(m) => assemble_jacobian(m, &problem, op, &sets),
        }
        .map_err(|e| CliError::Run(e.to_string()))?;
        let report = jacobian_report(op, &j, &residual, DEFAULT_ETA)
            .map_err(|e| CliError::Run(e.to_string()))?;
        let ntk = ntk_from_jacobian(&j).map_err(|e| CliError::Run(e.to_string()))?;
        worst_ntk_residual = worst_ntk_residual.max(ntk.sigma_sq_residual);

        let mut csv = std::io::BufWriter::new(std::fs::File::create(
            out.join(format!("svd_{}.csv", op.name())),
        )?);
        writeln!(csv, "sigma")?;
        for s in &report.sigma {
            writeln!(csv, "{s}")?;
        }

        diag.insert(
            op.name().to_string(),
            json!({
                "sigma": report.sigma,
                "r_eff": report.r_eff,
                "rank": report.rank,
                "cond": report.cond,
                "collapsed": report.collapsed,
                "residual_norm": report.residual_norm,
                "ntk_cond": ntk.cond,
                "decay_time_ratio": ntk.decay_time_ratio,
            }),
        );
        println!(
            "{}: rows {}  r_eff {}  rank {}  cond {:.3e}  collapsed {}",
            op.name(),
            j.rows(),
            report.r_eff,
            report.rank,
            report.cond,
            report.collapsed
        );
    }
    diag.insert("ntk_sigma_sq_residual".into(), json!(worst_ntk_residual));
    std::fs::write(
        out.join("diag.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(diag)).unwrap(),
    )?;
    println!("diagnostics -> {}", out.display());
    Ok(())
}

pub fn cmd_sweep(
    config_path: &Path,
    out: &Path,
    workers: usize,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let raw = RawConfig::load(config_path)?;
    let param = raw
        .get("sweep.param")
        .ok_or_else(|| CliError::Config("sweep requires [sweep] param = modes|w_char|sigma".into()))?
        .to_string();
    let values: Vec<f64> = raw
        .get("sweep.values")
        .ok_or_else(|| CliError::Config("sweep requires [sweep] values = a,b,c".into()))?
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config("cannot parse sweep.values".into()))?;
    if values.is_empty() {
        return Err(CliError::Config("sweep.values is empty".into()));
    }
    if !matches!(param.as_str(), "modes" | "w_char" | "sigma") {
        return Err(CliError::Config(format!(
            "sweep.param must be modes, w_char, or sigma; got `{param}`"
        )));
    }

    std::fs::create_dir_all(out)?;
    let results: Vec<Result<(usize, f64, TrainArtifacts, Vec<String>), CliError>> =
        run_cells_bounded(workers, &values, |i, value| {
            let raw = RawConfig::load(config_path)?;
            let (mut cfg, problem) = RunConfig::resolve(&raw)?;
            if let Some(seed) = seed {
                cfg.train.seed = seed;
            }
            match param.as_str() {
                "modes" => cfg.modes = value as usize,
                "w_char" => cfg.w_char = vec![value; problem.dim],
                "sigma" => cfg.sigma = value,
                _ => unreachable!(),
            }
            let cell_dir = out.join(format!("cell_{i}_{param}_{value}"));
            let art = run_training(&cfg, &problem, &cell_dir)?;
            let names = problem.field_names.iter().map(|s| s.to_string()).collect();
            Ok((i, value, art, names))
        });

    let mut rows = Vec::new();
    let mut field_names: Vec<String> = Vec::new();
    for r in results {
        let (i, value, art, names) = r?;
        field_names = names;
        rows.push((i, value, art));
    }
    rows.sort_by_key(|(i, _, _)| *i);

    let mut csv = std::io::BufWriter::new(std::fs::File::create(out.join("sweep.csv"))?);
    let mut header = vec!["cell".to_string(), param.clone(), "params".into(), "loss_total".into()];
    for n in &field_names {
        header.push(format!("rel_l2_{n}"));
    }
    header.push("wall_seconds".into());
    writeln!(csv, "{}", header.join(","))?;
    for (i, value, art) in &rows {
        let r = art.final_record.as_ref();
        let mut cols = vec![
            i.to_string(),
            value.to_string(),
            art.params.to_string(),
            r.map(|r| r.loss_total.to_string()).unwrap_or_default(),
        ];
        for f in 0..field_names.len() {
            cols.push(
                r.and_then(|r| r.rel_l2.as_ref())
                    .and_then(|v| v.get(f))
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
        }
        cols.push(format!("{:.3}", art.wall_seconds));
        writeln!(csv, "{}", cols.join(","))?;
    }
    println!("sweep over {param} ({} cells) -> {}", rows.len(), out.display());
    Ok(())
}

/// Run one closure per value with at most `workers` running at once,
/// preserving input order in the result.
fn run_cells_bounded<T: Send>(
    workers: usize,
    values: &[f64],
    job: impl Fn(usize, f64) -> T + Sync,
) -> Vec<T> {
    let workers = workers.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<T>> = (0..values.len()).map(|_| None).collect();
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(values.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= values.len() {
                    break;
                }
                let r = job(i, values[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_iter().map(|r| r.unwrap()).collect()
}

pub fn cmd_list() {
    for id in svsnn_core::problems::PROBLEM_IDS {
        println!("{id}");
    }
}

pub fn default_out_dir(kind: &str) -> PathBuf {
    PathBuf::from("runs").join(kind)
}
