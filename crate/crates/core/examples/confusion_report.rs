//! Train/test split, confusion matrix and rendered report files.
//!
//! `cargo run --release --example confusion_report [out_dir]`

use spiketex::classify::evaluate_split;
use spiketex::cli::{render_svg, render_table};
use spiketex::prelude::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("spiketex_report"));
    let dataset = generate_dataset(
        &artificial_grid_set(),
        10,
        &SlideKinematics::default(),
        &SensorModel::default(),
        &TransducerConfig::default(),
        2019,
    )?;
    let (train, test) = train_test_split(&dataset, 0.8, 1)?;
    let report = evaluate_split(&train, &test, &EncoderSpec::Spatial, &MetricSpec::Euclidean, 4)?;

    print!("{}", render_table(&report.classes, &report.confusion));
    print!("{}", report.summary_csv());

    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("confusion.csv"), report.confusion_csv())?;
    std::fs::write(out.join("confusion.svg"), render_svg(&report.classes, &report.confusion))?;
    println!("wrote {}", out.display());
    Ok(())
}
