use spiketex::event_model::{
    decode_events, encode_events, read_events, read_events_csv, read_sample, write_events,
    write_events_csv, write_sample, Micros, PixelEvent, Polarity, Sample,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_events(n: usize, seed: u64) -> Vec<PixelEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events: Vec<PixelEvent> = (0..n)
        .map(|_| PixelEvent {
            t: rng.random_range(0..u32::MAX as Micros),
            x: rng.random_range(0..240),
            y: rng.random_range(0..180),
            polarity: if rng.random_bool(0.5) { Polarity::On } else { Polarity::Off },
        })
        .collect();
    events.sort_by_key(|e| e.t);
    events
}

#[test]
fn ten_thousand_events_binary_and_csv() {
    let events = random_events(10_000, 42);
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("e.ntev");
    write_events(&events, &bin).unwrap();
    assert_eq!(std::fs::metadata(&bin).unwrap().len(), 16 + 10 * 10_000);
    assert_eq!(read_events(&bin).unwrap(), events);

    let csv = dir.path().join("e.csv");
    write_events_csv(&events, &csv).unwrap();
    assert_eq!(read_events_csv(&csv).unwrap(), events);
}

#[test]
fn missing_file_is_io_error() {
    let err = read_events("/nonexistent/e.ntev").unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

fn arb_event() -> impl Strategy<Value = PixelEvent> {
    (0u64..=u32::MAX as u64, 0u16..240, 0u16..180, any::<bool>()).prop_map(|(t, x, y, on)| {
        PixelEvent {
            t,
            x,
            y,
            polarity: if on { Polarity::On } else { Polarity::Off },
        }
    })
}

fn arb_sample() -> impl Strategy<Value = Sample> {
    (1u64..5_000_000).prop_flat_map(|duration| {
        (
            proptest::collection::vec(proptest::collection::btree_set(0..duration, 0..6), 49),
            "[a-z0-9_.]{0,12}",
        )
            .prop_map(move |(sets, label)| {
                Sample::from_spike_lists(
                    sets.into_iter().map(|s| s.into_iter().collect()).collect(),
                    duration,
                    label,
                )
                .unwrap()
            })
    })
}

proptest! {
    #[test]
    fn binary_roundtrip(mut events in proptest::collection::vec(arb_event(), 0..200)) {
        events.sort_by_key(|e| e.t);
        let bytes = encode_events(&events).unwrap();
        prop_assert_eq!(bytes.len(), 16 + 10 * events.len());
        prop_assert_eq!(decode_events(&bytes).unwrap(), events);
    }

    #[test]
    fn truncated_files_are_rejected(mut events in proptest::collection::vec(arb_event(), 1..50), cut in 1usize..10) {
        events.sort_by_key(|e| e.t);
        let bytes = encode_events(&events).unwrap();
        prop_assert!(decode_events(&bytes[..bytes.len() - cut]).is_err());
    }

    #[test]
    fn sample_json_roundtrip(sample in arb_sample()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        write_sample(&sample, &path).unwrap();
        prop_assert_eq!(read_sample(&path).unwrap(), sample);
    }
}
