//! Round-trips a simulated stream through the binary event format and
//! transduces it into 49 spike trains.
//!
//! `cargo run --release --example transduce_stream`

use spiketex::event_model::{read_events, write_events};
use spiketex::prelude::*;
use spiketex::transduction::{fields_from_positions, filter_noise};

fn main() -> spiketex::Result<()> {
    let sensor = SensorModel::default();
    let kinematics = SlideKinematics::default();
    let events = simulate_slide(&TextureSpec::grid(3.0), &kinematics, &sensor, 1)?;

    let path = std::env::temp_dir().join("spiketex_example.ntev");
    write_events(&events, &path)?;
    let reread = read_events(&path)?;
    assert_eq!(reread, events);
    println!("{} events, {} bytes on disk", events.len(), 16 + 10 * events.len());

    let config = TransducerConfig::default();
    let fields = fields_from_positions(&sensor.taxel_layout, config.rf_diameter)?;
    let kept = filter_noise(&reread, &fields, &config);
    println!("{} events survive the noise filter", kept.len());

    let sample = transduce(&reread, &fields, &config, kinematics.duration_us())?;
    for train in sample.trains().iter().take(5) {
        println!("taxel {:>2}: {:?}", train.taxel_id(), &train.spikes()[..train.len().min(6)]);
    }
    println!("... {} spikes in total", sample.total_spikes());
    Ok(())
}
