//! Sweeps the temporal window and runs the surrogate search over
//! (cos_theta, tau) on a small synthetic dataset.
//!
//! `cargo run --release --example optimize_parameters`

use spiketex::classify::stratified_subsample;
use spiketex::prelude::*;

fn main() -> spiketex::Result<()> {
    let full = generate_dataset(
        &artificial_grid_set(),
        10,
        &SlideKinematics::default(),
        &SensorModel::default(),
        &TransducerConfig::default(),
        2019,
    )?;
    let dataset = stratified_subsample(&full, 6, 1);

    let sweep = sweep_delta_t(&dataset, (10, 200), 10, 4)?;
    for (dt, acc) in &sweep.evaluated {
        println!("delta_t {dt:>3} ms  {:5.1}%", acc * 100.0);
    }
    println!("best window: {} ms", sweep.best.0);

    let result = optimize_spatiotemporal(&dataset, &Bounds::default(), 20, 7, 4)?;
    let b = result.best;
    println!(
        "best after {} epochs: cos_theta {:.3}, tau {:.1} ms, {:.1}%",
        result.epochs,
        b.cos_theta,
        b.tau_ms,
        b.accuracy * 100.0
    );
    Ok(())
}
