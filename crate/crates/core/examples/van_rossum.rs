//! Single- and multi-neuron Van Rossum distances on hand-made trains.
//!
//! `cargo run --example van_rossum`

use spiketex::metrics::{van_rossum_multi, van_rossum_single};
use spiketex::prelude::*;

fn main() -> spiketex::Result<()> {
    let tau = 0.01;
    println!("one spike vs none: {:.5}", van_rossum_single(&[0], &[], tau)?);
    println!("spikes 10 ms apart: {:.5}", van_rossum_single(&[0], &[10_000], tau)?);
    println!("same train: {:.5}", van_rossum_single(&[0, 5_000], &[0, 5_000], tau)?);

    // the same spike on two different taxels
    let mut a = vec![Vec::new(); 49];
    let mut b = vec![Vec::new(); 49];
    a[0].push(20_000);
    b[1].push(20_000);
    let a = Sample::from_spike_lists(a, 100_000, "a")?;
    let b = Sample::from_spike_lists(b, 100_000, "b")?;
    for cos_theta in [0.0, 0.4, 1.0] {
        println!(
            "cos_theta {cos_theta}: {:.5}",
            van_rossum_multi(&a, &b, tau, cos_theta)?
        );
    }
    Ok(())
}
