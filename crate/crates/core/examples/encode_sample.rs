//! Applies the four codings to a single simulated sample.
//!
//! `cargo run --release --example encode_sample`

use spiketex::prelude::*;

fn main() -> spiketex::Result<()> {
    let dataset = generate_dataset(
        &[TextureSpec::grid(4.0)],
        1,
        &SlideKinematics::default(),
        &SensorModel::default(),
        &TransducerConfig::default(),
        11,
    )?;
    let sample = &dataset.samples()[0];

    let specs = [
        EncoderSpec::Intensive,
        EncoderSpec::Spatial,
        EncoderSpec::Temporal { delta_t_ms: 159 },
        EncoderSpec::Spatiotemporal { tau_ms: 76.0 },
    ];
    for spec in specs {
        match spec.encode(sample)? {
            EncodedSample::Intensive { value } => println!("intensive: {value:.3} spikes/taxel"),
            EncodedSample::Spatial { counts } => println!("spatial: {:?}", &counts[..10]),
            EncodedSample::Temporal { delta_t_ms, series } => {
                let peak = series.iter().cloned().fold(0.0, f64::max);
                println!("temporal ({delta_t_ms} ms): {} steps, peak {peak:.3}", series.len());
            }
            EncodedSample::Spatiotemporal { tau_s, sample } => {
                println!("spatiotemporal: tau {tau_s} s over {} spikes", sample.total_spikes())
            }
        }
    }
    Ok(())
}
