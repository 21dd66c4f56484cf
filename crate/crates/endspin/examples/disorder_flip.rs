//! Robustness of the Neel protocol against state-preparation errors.
//!
//! Each spin is flipped independently with probability eps before the
//! quench. To first order the prepared state is a mixture of the intact
//! Neel state and its N single-flip variants; the library evolves that
//! mixture exactly. Peak entanglement degrades smoothly with the expected
//! flip count N*eps.

use endspin::analysis::{time_sweep, Couplings, LinearGrid};
use endspin::disorder::flip_mixture;
use endspin::lattice::{ChainSpec, InitialState, ProductStateSpec};

fn main() -> endspin::Result<()> {
    let n = 24;
    let chain = ChainSpec::new(n, 1.0)?;
    let base = ProductStateSpec::neel(n)?;
    let grid = LinearGrid::default_time(n, 1.0)?;

    println!("Neel chain, N = {n}, flip-contaminated preparation");
    println!("{:>8}  {:>8}  {:>8}  {:>8}", "N*eps", "peak fef", "at t", "loss %");
    let mut clean_peak = 0.0;
    for total_rate in [0.0, 0.05, 0.10, 0.15] {
        let epsilon = total_rate / n as f64;
        let init = InitialState::Mixture(flip_mixture(&base, epsilon)?);
        let series = time_sweep(&init, &Couplings::Uniform(chain.clone()), &grid)?;
        let (best, report) = series
            .reports()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.fef.total_cmp(&b.1.fef))
            .expect("grid is never empty");
        if total_rate == 0.0 {
            clean_peak = report.fef;
        }
        println!(
            "{total_rate:>8.2}  {:>8.4}  {:>8.3}  {:>8.2}",
            report.fef,
            series.times()[best],
            100.0 * (1.0 - report.fef / clean_peak)
        );
    }
    println!();
    println!("a five percent expected flip count costs only a few percent of");
    println!("the peak and leaves its arrival time in place");
    Ok(())
}
