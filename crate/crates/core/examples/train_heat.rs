//! Library quickstart: train the high-frequency heat benchmark and print
//! the loss curve. `cargo run --release --example train_heat -- 1000 2000`
//! takes the epoch count and PDE point count as optional arguments.

use svsnn_core::model::{SvSnnConfig, SvSnnModel};
use svsnn_core::problems::make_problem;
use svsnn_core::sampling::FrequencyPlan;
use svsnn_core::training::{stream, train, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let n_pde: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);

    let problem = make_problem::<f64>("heat20pi").unwrap();
    let rec = &problem.recommended;
    let plans: Vec<FrequencyPlan<f64>> = problem
        .w_char
        .iter()
        .map(|&w| FrequencyPlan::new(w, rec.features).with_sigma(rec.sigma))
        .collect();
    let cfg = SvSnnConfig {
        modes: rec.modes,
        features: vec![rec.features; problem.dim],
        temporal: problem.time_dependent,
        field_count: problem.field_count,
    };
    let mut model = SvSnnModel::init(cfg, &plans, &mut stream(42, "init")).unwrap();

    let tc = TrainConfig {
        epochs,
        n_pde,
        seed: 42,
        eval_stride: (epochs / 10).max(1),
        ..TrainConfig::default()
    };
    let out = train(&mut model, &problem, &tc).unwrap();
    println!("trained {} epochs in {:.1}s", epochs, out.wall_seconds);
    for r in &out.records {
        println!(
            "epoch {:5}  ic {:.3e}  pde {:.3e}  bc {:.3e}  rel_l2 {:.3e}",
            r.epoch,
            r.loss_ic,
            r.loss_pde,
            r.loss_bc,
            r.rel_l2.as_ref().map(|v| v[0]).unwrap_or(f64::NAN)
        );
    }
}
