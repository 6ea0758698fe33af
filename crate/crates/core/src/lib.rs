//! Neuromorphic tactile texture pipeline.
//!
//! Pixel events from an event camera watching the pins of an optical tactile
//! tip are transduced into 49 taxel spike trains, coded four ways
//! (intensive, spatial, temporal, spatiotemporal) and classified with a
//! k-nearest-neighbour vote under Euclidean or multi-neuron Van Rossum
//! distances. A deterministic contact simulator stands in for the sensor.
//!
//! ```no_run
//! use spiketex::prelude::*;
//!
//! let dataset = generate_dataset(
//!     &artificial_grid_set(),
//!     5,
//!     &SlideKinematics::default(),
//!     &SensorModel::default(),
//!     &TransducerConfig::default(),
//!     7,
//! )?;
//! let report = leave_one_out(&dataset, &EncoderSpec::Spatial, &MetricSpec::Euclidean, 4)?;
//! println!("{:.1} +/- {:.1}", report.accuracy_percent(), report.dispersion);
//! # Ok::<(), spiketex::Error>(())
//! ```

pub mod classify;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod event_model;
pub mod metrics;
pub mod optimize;
pub mod simulator;
pub mod stats;
pub mod transduction;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::classify::{
        confusion_matrix, knn_classify, leave_one_out, train_test_split, ClassificationReport,
    };
    pub use crate::encoding::{EncodedSample, EncoderSpec};
    pub use crate::error::{Error, Result};
    pub use crate::event_model::{Dataset, Micros, PixelEvent, Polarity, Sample, SpikeTrain};
    pub use crate::metrics::MetricSpec;
    pub use crate::optimize::{optimize_spatiotemporal, sweep_delta_t, Bounds};
    pub use crate::simulator::{
        artificial_grid_set, generate_dataset, simulate_slide, SensorModel, SlideKinematics,
        TextureSpec,
    };
    pub use crate::transduction::{transduce, ReceptiveField, TransducerConfig};
}
