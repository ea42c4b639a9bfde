//! Acceptance suite: one test per criterion, quantitative training targets
//! first, then the property batteries. Training-based criteria share their
//! trained models through `OnceLock`s, so `criterion_01`, `criterion_05`,
//! and `criterion_06` together run the heat benchmark exactly once per
//! model kind.
//!
//! Expect a long wall time (roughly an hour on two cores): the heat
//! comparator alone re-differentiates a 40k-parameter network over the full
//! point set for 5000 epochs. Run with `--nocapture` to watch progress.

use std::sync::OnceLock;
use svsnn_core::baseline::{mlp_count_parameters, MlpModel};
use svsnn_core::diagnostics::{
    assemble_jacobian, effective_rank, jacobian_report, ntk_from_jacobian, rank_estimate,
    OperatorKind,
};
use svsnn_core::model::{PointModel, SvSnnConfig, SvSnnModel};
use svsnn_core::numerics::{singular_values, RandomSource};
use svsnn_core::problems::{make_problem, PdeProblem, PROBLEM_IDS};
use svsnn_core::sampling::{three_level_frequencies, FrequencyPlan};
use svsnn_core::spectral::{FourierFeature1D, SeparableMode};
use svsnn_core::training::{
    stream, train, ConstraintSet, TrainConfig, TrainRecord,
};

const SEED: u64 = 42;

struct RunResult {
    records: Vec<TrainRecord>,
    final_rel_l2: Vec<f64>,
    sets: ConstraintSet<f64>,
}

fn svsnn_for(problem: &PdeProblem<f64>, modes: usize, features: usize) -> SvSnnModel<f64> {
    let plans: Vec<FrequencyPlan<f64>> = problem
        .w_char
        .iter()
        .map(|&w| FrequencyPlan::new(w, features).with_sigma(problem.recommended.sigma))
        .collect();
    let cfg = SvSnnConfig {
        modes,
        features: vec![features; problem.dim],
        temporal: problem.time_dependent,
        field_count: problem.field_count,
    };
    SvSnnModel::init(cfg, &plans, &mut stream(SEED, "init")).unwrap()
}

fn run_svsnn(problem: &PdeProblem<f64>, tc: &TrainConfig, modes: usize, features: usize) -> (SvSnnModel<f64>, RunResult) {
    let mut model = svsnn_for(problem, modes, features);
    let out = train(&mut model, problem, tc).unwrap();
    let final_rel_l2 = out
        .records
        .last()
        .and_then(|r| r.rel_l2.clone())
        .expect("metrics recorded");
    let sets = ConstraintSet::sample(problem, tc).unwrap();
    (
        model,
        RunResult {
            records: out.records,
            final_rel_l2,
            sets,
        },
    )
}

/// Heat benchmark configuration shared by the spectral and baseline runs:
/// the published 5000-epoch schedule with the collocation budget reduced to
/// 2000 PDE points so the 40k-parameter comparator finishes at desk scale.
fn heat_train_config() -> TrainConfig {
    TrainConfig {
        epochs: 5000,
        n_ic: 1000,
        n_bc: 400,
        n_pde: 2000,
        seed: SEED,
        eval_stride: 100,
        ..TrainConfig::default()
    }
}

fn heat20pi_svsnn() -> &'static (SvSnnModel<f64>, RunResult) {
    static CELL: OnceLock<(SvSnnModel<f64>, RunResult)> = OnceLock::new();
    CELL.get_or_init(|| {
        let problem = make_problem::<f64>("heat20pi").unwrap();
        run_svsnn(&problem, &heat_train_config(), 10, 40)
    })
}

fn heat20pi_baseline() -> &'static (MlpModel<f64>, RunResult) {
    static CELL: OnceLock<(MlpModel<f64>, RunResult)> = OnceLock::new();
    CELL.get_or_init(|| {
        let problem = make_problem::<f64>("heat20pi").unwrap();
        let tc = heat_train_config();
        let mut model = MlpModel::init(
            vec![2, 100, 100, 100, 100, 100, 1],
            1,
            true,
            &mut stream(SEED, "init"),
        );
        let out = train(&mut model, &problem, &tc).unwrap();
        let final_rel_l2 = out.records.last().and_then(|r| r.rel_l2.clone()).unwrap();
        let sets = ConstraintSet::sample(&problem, &tc).unwrap();
        (
            model,
            RunResult {
                records: out.records,
                final_rel_l2,
                sets,
            },
        )
    })
}

/// Mode-count ablation cells on the double-cylinder flow, 15000 epochs each
/// at a reduced collocation budget.
fn ns_sweep() -> &'static Vec<(usize, RunResult)> {
    static CELL: OnceLock<Vec<(usize, RunResult)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let problem = make_problem::<f64>("ns-two-cyl").unwrap();
        let tc = TrainConfig {
            epochs: 15000,
            n_ic: 0,
            n_bc: 600,
            n_pde: 2000,
            seed: SEED,
            eval_stride: 1000,
            ..TrainConfig::default()
        };
        [1usize, 4, 7, 10]
            .into_iter()
            .map(|n| {
                let (_, result) = run_svsnn(&problem, &tc, n, 16);
                println!(
                    "ns-two-cyl N={n}: loss {:.3e} rel_l2 {:?}",
                    result.records.last().unwrap().loss_total,
                    result.final_rel_l2
                );
                (n, result)
            })
            .collect()
    })
}

#[test]
fn criterion_01_heat20pi_svsnn_accuracy() {
    let (_, result) = heat20pi_svsnn();
    let rel = result.final_rel_l2[0];
    println!("criterion 01: heat20pi svsnn rel_l2 {rel:.3e} (threshold 5e-3)");
    assert!(rel <= 5e-3, "rel_l2 {rel} above 5e-3");

    // soft monotonicity: total loss non-increasing over >= 90% of 500-epoch
    // windows of the same run
    let losses: Vec<f64> = result.records.iter().map(|r| r.loss_total).collect();
    let span = 500 / 100; // records every 100 epochs
    let windows = losses.len() - span;
    let good = (0..windows)
        .filter(|&i| losses[i + span] <= losses[i])
        .count();
    let frac = good as f64 / windows as f64;
    println!("criterion 01b: monotone windows {frac:.2}");
    assert!(frac >= 0.9, "only {frac:.2} of 500-epoch windows non-increasing");
}

#[test]
fn criterion_02_heat100pi_svsnn_accuracy() {
    let problem = make_problem::<f64>("heat100pi").unwrap();
    let (_, result) = run_svsnn(&problem, &heat_train_config(), 4, 50);
    let rel = result.final_rel_l2[0];
    println!("criterion 02: heat100pi svsnn rel_l2 {rel:.3e} (threshold 5e-2)");
    assert!(rel <= 5e-2, "rel_l2 {rel} above 5e-2");
}

#[test]
fn criterion_03_helmholtz24pi_svsnn_accuracy() {
    let problem = make_problem::<f64>("helmholtz24pi").unwrap();
    let tc = TrainConfig {
        epochs: 5000,
        n_ic: 0,
        n_bc: 1024,
        n_pde: 10000,
        seed: SEED,
        eval_stride: 500,
        ..TrainConfig::default()
    };
    let (_, result) = run_svsnn(&problem, &tc, 6, 64);
    let rel = result.final_rel_l2[0];
    println!("criterion 03: helmholtz24pi svsnn rel_l2 {rel:.3e} (threshold 5e-2)");
    assert!(rel <= 5e-2, "rel_l2 {rel} above 5e-2");
}

#[test]
fn criterion_04_nonlinear_elliptic_svsnn_accuracy() {
    let problem = make_problem::<f64>("nonlin-elliptic").unwrap();
    let tc = TrainConfig {
        epochs: 5000,
        n_ic: 0,
        n_bc: 1024,
        n_pde: 10000,
        seed: SEED,
        eval_stride: 500,
        ..TrainConfig::default()
    };
    let model = svsnn_for(&problem, 4, 32);
    assert_eq!(model.param_count(), 780, "published parameter total");
    let (_, result) = run_svsnn(&problem, &tc, 4, 32);
    let rel = result.final_rel_l2[0];
    println!("criterion 04: nonlin-elliptic svsnn rel_l2 {rel:.3e} (threshold 2e-2)");
    assert!(rel <= 2e-2, "rel_l2 {rel} above 2e-2");
}

#[test]
fn criterion_05_baseline_failure_reproduced() {
    let (_, result) = heat20pi_baseline();
    let rel = result.final_rel_l2[0];
    println!("criterion 05: heat20pi baseline rel_l2 {rel:.3e} (must stay >= 0.5)");
    assert!(
        rel >= 0.5,
        "the comparator should fail on the high-frequency problem, got {rel}"
    );
}

#[test]
fn criterion_06_effective_rank_separation() {
    let (svsnn, sv_result) = heat20pi_svsnn();
    let (baseline, base_result) = heat20pi_baseline();
    let problem = make_problem::<f64>("heat20pi").unwrap();

    let (j_sv, _) = assemble_jacobian(svsnn, &problem, OperatorKind::Ic, &sv_result.sets).unwrap();
    let sigma_sv = singular_values(&j_sv).unwrap();
    let r_sv = effective_rank(&sigma_sv, 0.99).unwrap();

    let (j_base, _) =
        assemble_jacobian(baseline, &problem, OperatorKind::Ic, &base_result.sets).unwrap();
    let sigma_base = singular_values(&j_base).unwrap();
    let r_base = effective_rank(&sigma_base, 0.99).unwrap();

    println!(
        "criterion 06: ic effective rank svsnn {r_sv} vs baseline {r_base} (need >= 10x)"
    );
    assert!(
        r_sv >= 10 * r_base,
        "rank separation too small: {r_sv} vs {r_base}"
    );

    // the collapse indicator separates the two model families the same way
    let report_sv = jacobian_report(OperatorKind::Ic, &j_sv, &[0.0; 0], 0.99).unwrap();
    let report_base = jacobian_report(OperatorKind::Ic, &j_base, &[0.0; 0], 0.99).unwrap();
    assert!(report_base.collapsed, "trained baseline should be collapsed");
    assert!(!report_sv.collapsed, "trained spectral model should not be collapsed");
}

#[test]
fn criterion_07_parameter_count_goldens() {
    let golden = [
        (SvSnnConfig { modes: 10, features: vec![40], temporal: true, field_count: 1 }, 3730),
        (SvSnnConfig { modes: 4, features: vec![50], temporal: true, field_count: 1 }, 1612),
        (SvSnnConfig { modes: 4, features: vec![32, 32], temporal: false, field_count: 1 }, 780),
        (SvSnnConfig { modes: 4, features: vec![50, 50], temporal: false, field_count: 1 }, 1212),
        (SvSnnConfig { modes: 6, features: vec![64, 64], temporal: false, field_count: 1 }, 2322),
        (SvSnnConfig { modes: 8, features: vec![64, 64], temporal: false, field_count: 1 }, 3096),
        (SvSnnConfig { modes: 8, features: vec![40, 40], temporal: false, field_count: 1 }, 1944),
        (SvSnnConfig { modes: 6, features: vec![32, 32], temporal: true, field_count: 3 }, 2688),
        (SvSnnConfig { modes: 4, features: vec![16, 16], temporal: false, field_count: 3 }, 404),
    ];
    for (cfg, expect) in golden {
        assert_eq!(cfg.count_parameters(), expect, "{cfg:?}");
    }
    let mlp_golden = [
        (vec![2, 100, 100, 100, 100, 100, 1], 40_801),
        (vec![2, 120, 120, 120, 120, 120, 1], 58_561),
        (vec![2, 100, 100, 100, 1], 20_601),
        (vec![2, 50, 50, 50, 50, 3], 7_953),
        (vec![3, 100, 100, 100, 100, 100, 3], 41_103),
    ];
    for (widths, expect) in mlp_golden {
        assert_eq!(mlp_count_parameters(&widths), expect, "{widths:?}");
    }
    println!("criterion 07: nine spectral and five baseline parameter totals exact");
}

#[test]
fn criterion_08_mode_count_ablation() {
    let cells = ns_sweep();
    let rel_u: Vec<(usize, f64)> = cells
        .iter()
        .map(|(n, r)| (*n, r.final_rel_l2[0]))
        .collect();
    let rel_of = |n: usize| rel_u.iter().find(|(m, _)| *m == n).unwrap().1;
    println!("criterion 08: ns-two-cyl rel_l2(u) per N: {rel_u:?}");
    assert!(
        rel_of(1) >= 100.0 * rel_of(4),
        "single mode should be >= 100x worse: {} vs {}",
        rel_of(1),
        rel_of(4)
    );
    let trio = [rel_of(4), rel_of(7), rel_of(10)];
    let (lo, hi) = (
        trio.iter().cloned().fold(f64::INFINITY, f64::min),
        trio.iter().cloned().fold(0.0, f64::max),
    );
    assert!(hi <= 3.0 * lo, "N in {{4,7,10}} spread too wide: {trio:?}");
}

#[test]
fn criterion_08b_ns_loss_convergence() {
    // stand-in for the unpublished reference: total loss after 15000 epochs
    let cells = ns_sweep();
    let (_, four) = cells.iter().find(|(n, _)| *n == 4).unwrap();
    let loss = four.records.last().unwrap().loss_total;
    println!("criterion 08b: ns-two-cyl N=4 total loss {loss:.3e} (threshold 1e-3)");
    assert!(loss <= 1e-3, "loss {loss} above 1e-3");
}

#[test]
fn criterion_09_analytical_derivative_oracle() {
    let mut rng = RandomSource::new(0x5EED);
    let h = 1e-5;
    for case in 0..1000 {
        let k = 2 + (rng.next_u64() % 5) as usize;
        let feature: FourierFeature1D<f64> = FourierFeature1D {
            a: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
            b: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
            w: (0..k).map(|_| rng.draw_uniform(0.5, 30.0)).collect(),
            beta: rng.draw_uniform(-1.0, 1.0),
        };
        let x = rng.draw_uniform(-2.0, 2.0);
        // first and second input derivatives vs central differences
        for order in 1..=2u32 {
            let fd = (feature.deriv(x + h, order - 1).unwrap()
                - feature.deriv(x - h, order - 1).unwrap())
                / (2.0 * h);
            let an = feature.deriv(x, order).unwrap();
            assert!(
                (an - fd).abs() <= 1e-5 * fd.abs().max(1.0),
                "case {case} order {order}: {an} vs {fd}"
            );
        }
        // parameter gradients of a random order
        let order = (rng.next_u64() % 3) as u32;
        let grads = feature.param_grads(x, order).unwrap();
        let n = feature.param_count();
        let probe = (rng.next_u64() as usize) % n;
        let mut flat = Vec::new();
        feature.write_flat(&mut flat);
        let mut hi = feature.clone();
        let mut lo = feature.clone();
        let mut fhi = flat.clone();
        fhi[probe] += h;
        hi.read_flat(&fhi);
        fhi[probe] -= 2.0 * h;
        lo.read_flat(&fhi);
        let fd = (hi.deriv(x, order).unwrap() - lo.deriv(x, order).unwrap()) / (2.0 * h);
        assert!(
            (grads[probe] - fd).abs() <= 1e-5 * fd.abs().max(1.0),
            "case {case} param {probe} order {order}"
        );
        // separable mixed partial vs nested differences
        if case % 10 == 0 {
            let other: FourierFeature1D<f64> = FourierFeature1D {
                a: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
                b: (0..k).map(|_| rng.draw_uniform(-1.0, 1.0)).collect(),
                w: (0..k).map(|_| rng.draw_uniform(0.5, 20.0)).collect(),
                beta: rng.draw_uniform(-1.0, 1.0),
            };
            let mode = SeparableMode {
                directions: vec![feature.clone(), other],
            };
            let y = rng.draw_uniform(-1.5, 1.5);
            let fd = (mode.eval(&[x + h, y + h]) - mode.eval(&[x + h, y - h])
                - mode.eval(&[x - h, y + h])
                + mode.eval(&[x - h, y - h]))
                / (4.0 * h * h);
            let an = mode.mixed_partial(&[x, y], &[1, 1]).unwrap();
            assert!(
                (an - fd).abs() <= 1e-5 * fd.abs().max(1.0),
                "case {case} mixed partial"
            );
        }
    }
    println!("criterion 09: 1000 random spectral configurations within 1e-5 of finite differences");
}

#[test]
fn criterion_10_kernel_eigenvalue_relation() {
    let heat = make_problem::<f64>("heat20pi").unwrap();
    let helmholtz = make_problem::<f64>("helmholtz24pi").unwrap();
    let mut worst_rel = 0.0f64;
    let mut worst_cond = 0.0f64;
    for case in 0..50u64 {
        let (problem, op) = match case % 4 {
            0 => (&heat, OperatorKind::Ic),
            1 => (&heat, OperatorKind::Pde),
            2 => (&helmholtz, OperatorKind::Bc),
            _ => (&helmholtz, OperatorKind::Pde),
        };
        let tc = TrainConfig {
            n_ic: 12,
            n_bc: 10,
            n_pde: 8,
            seed: 1000 + case,
            ..TrainConfig::default()
        };
        let sets = ConstraintSet::sample(problem, &tc).unwrap();
        let model = {
            let plans: Vec<FrequencyPlan<f64>> = problem
                .w_char
                .iter()
                .map(|&w| FrequencyPlan::new(w, 6).with_sigma(problem.recommended.sigma))
                .collect();
            let cfg = SvSnnConfig {
                modes: 2,
                features: vec![6; problem.dim],
                temporal: problem.time_dependent,
                field_count: problem.field_count,
            };
            SvSnnModel::init(cfg, &plans, &mut RandomSource::new(case)).unwrap()
        };
        let (j, _) = assemble_jacobian(&model, problem, op, &sets).unwrap();
        let sigma = singular_values(&j).unwrap();
        let ntk = ntk_from_jacobian(&j).unwrap();
        worst_rel = worst_rel.max(ntk.sigma_sq_residual);
        let rank = rank_estimate(&sigma);
        let kj = sigma[0] / sigma[rank - 1];
        worst_cond = worst_cond.max((ntk.cond / (kj * kj) - 1.0).abs());
    }
    println!(
        "criterion 10: 50 Jacobians, worst |lambda - sigma^2| residual {worst_rel:.2e}, worst condition-number mismatch {worst_cond:.2e}"
    );
    assert!(worst_rel < 1e-8);
    assert!(worst_cond < 1e-6);
}

#[test]
fn criterion_11_effective_rank_battery() {
    assert_eq!(effective_rank(&[1.0, 0.0, 0.0], 0.99).unwrap(), 1);
    assert_eq!(effective_rank(&[1.0, 1.0, 1.0, 1.0], 0.99).unwrap(), 4);
    assert_eq!(effective_rank(&[4.0, 3.0], 0.99).unwrap(), 2);
    assert!(effective_rank(&[0.0, 0.0], 0.99).is_err());
    let sigma = [9.0, 5.0, 2.0, 1.0, 0.3, 0.05, 0.01];
    let mut prev = 0;
    for eta in [0.05, 0.2, 0.4, 0.6, 0.8, 0.95, 0.99, 0.999] {
        let r = effective_rank(&sigma, eta).unwrap();
        assert!(r >= prev);
        prev = r;
    }
    for scale in [1e-9, 1e-3, 1.0, 1e3, 1e9] {
        let scaled: Vec<f64> = sigma.iter().map(|s| s * scale).collect();
        assert_eq!(
            effective_rank(&scaled, 0.99).unwrap(),
            effective_rank(&sigma, 0.99).unwrap()
        );
    }
    println!("criterion 11: effective-rank battery passed");
}

#[test]
fn criterion_12_exact_solution_residual_battery() {
    for id in PROBLEM_IDS {
        let p = make_problem::<f64>(id).unwrap();
        let (Some(eq), Some(_)) = (p.exact_query.as_ref(), p.exact.as_ref()) else {
            panic!("{id} should carry an exact solution");
        };
        let mut rng = RandomSource::new(0xE44C7);
        let pts = (p.sample_pde)(1000, &mut rng);
        let mut q = vec![0.0; p.queries.len()];
        let mut partials = vec![0.0; p.queries.len()];
        let mut worst = 0.0f64;
        for (x, t) in &pts {
            for (qi, query) in p.queries.iter().enumerate() {
                q[qi] = eq(*query, x, *t);
            }
            for e in &p.equations {
                worst = worst.max((e.eval)(&q, x, *t, &mut partials).abs());
            }
        }
        println!("criterion 12: {id} worst closed-form residual {worst:.2e}");
        assert!(worst < 1e-6, "{id}: residual {worst}");
    }
}

#[test]
fn criterion_13_three_level_sampling() {
    // exact band counts for every K
    for k in 4..=80usize {
        let plan = FrequencyPlan::new(40.0, k);
        let mut rs = RandomSource::new(k as u64);
        let w = three_level_frequencies(&plan, &mut rs).unwrap();
        assert_eq!(w.len(), k);
        let quarter = k / 4;
        let lin = svsnn_core::numerics::linspace(plan.w_min, plan.w_char, quarter.max(1));
        assert_eq!(&w[..quarter], &lin[..quarter], "linear band k={k}");
        for &f in &w {
            assert!(f >= plan.w_min && f <= plan.w_max);
        }
        for &f in &w[k - quarter..] {
            assert!(f >= plan.w_char && f <= plan.w_max, "high band k={k}");
        }
    }
    // gaussian band mean within 1% of w_char over 1e4 draws
    let w_char = 20.0 * std::f64::consts::PI;
    let plan = FrequencyPlan::new(w_char, 40).with_sigma(20.0);
    let mut rs = RandomSource::new(99);
    let (mut sum, mut count) = (0.0, 0usize);
    while count < 10_000 {
        let w = three_level_frequencies(&plan, &mut rs).unwrap();
        for &f in &w[10..30] {
            sum += f;
            count += 1;
        }
    }
    let mean = sum / count as f64;
    println!("criterion 13: gaussian band mean {mean:.3} vs w_char {w_char:.3}");
    assert!((mean - w_char).abs() < 0.01 * w_char);
}

#[test]
fn criterion_14_determinism_across_runs_and_workers() {
    let problem = make_problem::<f64>("heat20pi").unwrap();
    let tc = TrainConfig {
        epochs: 60,
        n_ic: 64,
        n_bc: 32,
        n_pde: 96,
        seed: 7,
        eval_stride: 20,
        ..TrainConfig::default()
    };
    let run_with_pool = |threads: usize| -> String {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut model = svsnn_for(&problem, 2, 8);
            let out = train(&mut model, &problem, &tc).unwrap();
            out.records
                .iter()
                .map(|r| r.to_json_line())
                .collect::<Vec<_>>()
                .join("\n")
        })
    };
    let one_a = run_with_pool(1);
    let one_b = run_with_pool(1);
    let four = run_with_pool(4);
    assert_eq!(one_a, one_b, "reruns must be byte-identical");
    assert_eq!(one_a, four, "worker count must not change records");
    println!("criterion 14: records byte-identical across reruns and worker counts 1/4");
}
