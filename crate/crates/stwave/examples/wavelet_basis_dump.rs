//! Dumps the multiscale temporal basis as a sampled CSV (columns:
//! index,kind,t,value) for plotting.  The basis consists of a coarse block
//! of scaling hats plus boundary-adapted wavelets with vanishing moments on
//! the finer levels; every function vanishes at t = 0.
//!
//! Usage: `cargo run --example wavelet_basis_dump [-- max_level [dual_order]]`

use stwave::wavelet::{BasisFunction, MultiscaleBasis};

fn main() -> stwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_level: u32 = args.next().map(|s| s.parse().unwrap()).unwrap_or(4);
    let dual_order: u32 = args.next().map(|s| s.parse().unwrap()).unwrap_or(2);

    let basis = MultiscaleBasis::new(dual_order, max_level)?;
    let samples = 16usize << max_level;

    println!("# multiscale basis: dual_order={dual_order} max_level={max_level} dim={}", basis.len());
    println!("index,kind,t,value");
    for flat in 0..basis.len() {
        let kind = match basis.classify(flat) {
            BasisFunction::Scaling { .. } => "scaling",
            BasisFunction::Wavelet { .. } => "wavelet",
        };
        let profile = basis.profile(flat);
        for s in 0..=samples {
            let t = s as f64 / samples as f64;
            println!("{flat},{kind},{t:.6},{:.9}", profile.eval(t));
        }
    }
    Ok(())
}
