//! Simulates one slide per grid texture and prints event and spike totals.
//!
//! `cargo run --release --example simulate_textures`

use spiketex::prelude::*;
use spiketex::simulator::layout_taxels;
use spiketex::transduction::fields_from_positions;

fn main() -> spiketex::Result<()> {
    let kinematics = SlideKinematics::default();
    let sensor = SensorModel::default();
    let transducer = TransducerConfig::default();
    let fields = fields_from_positions(&layout_taxels(), transducer.rf_diameter)?;

    println!("{:<12} {:>8} {:>8}", "texture", "events", "spikes");
    for (i, texture) in artificial_grid_set().iter().enumerate() {
        let events = simulate_slide(texture, &kinematics, &sensor, 100 + i as u64)?;
        let sample = transduce(&events, &fields, &transducer, kinematics.duration_us())?;
        println!(
            "{:<12} {:>8} {:>8}",
            texture.name,
            events.len(),
            sample.total_spikes()
        );
    }
    Ok(())
}
