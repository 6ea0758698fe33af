//! Leave-one-out accuracy of every coding on the 11 grid textures.
//!
//! `cargo run --release --example classify_textures [runs]`

use spiketex::classify::DEFAULT_K;
use spiketex::prelude::*;

fn main() -> spiketex::Result<()> {
    let runs = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let dataset = generate_dataset(
        &artificial_grid_set(),
        runs,
        &SlideKinematics::default(),
        &SensorModel::default(),
        &TransducerConfig::default(),
        2019,
    )?;

    let tau_ms = 76.0;
    let runs = [
        (EncoderSpec::Intensive, MetricSpec::Euclidean),
        (EncoderSpec::Spatial, MetricSpec::Euclidean),
        (EncoderSpec::Temporal { delta_t_ms: 159 }, MetricSpec::Euclidean),
        (
            EncoderSpec::Spatiotemporal { tau_ms },
            MetricSpec::VanRossum {
                tau_s: tau_ms / 1e3,
                cos_theta: 0.4,
            },
        ),
    ];
    for (encoder, metric) in runs {
        let r = leave_one_out(&dataset, &encoder, &metric, DEFAULT_K)?;
        println!(
            "{:<15} {:5.1} +/- {:4.1}",
            encoder.name(),
            r.accuracy_percent(),
            r.dispersion
        );
    }
    Ok(())
}
