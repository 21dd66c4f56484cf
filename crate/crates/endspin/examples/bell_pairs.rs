//! End-to-end entanglement distribution from a chain of nearest-neighbor
//! Bell pairs.
//!
//! The ends start completely uncorrelated (each belongs to a different
//! singlet), yet free evolution alone delivers a distillable end pair at a
//! time set by the chain transit.

use endspin::analysis::{find_peak, Couplings, LinearGrid, PeakMeasure};
use endspin::lattice::{BellPairStateSpec, ChainSpec, InitialState};

fn main() -> endspin::Result<()> {
    println!("{:>4}  {:>8}  {:>8}  {:>8}  {:>6}", "N", "t_peak", "fef", "fidelity", "N/4J");
    for n in [16usize, 24, 32] {
        let source = Couplings::Uniform(ChainSpec::new(n, 1.0)?);
        let init = InitialState::BellPairs(BellPairStateSpec::new(n / 2)?);
        let grid = LinearGrid::default_time(n, 1.0)?;
        let peak = find_peak(&init, &source, &grid, PeakMeasure::Fef)?;
        println!(
            "{n:>4}  {:>8.3}  {:>8.4}  {:>8.4}  {:>6.1}",
            peak.t_max,
            peak.report.fef,
            peak.report.fidelity,
            n as f64 / 4.0
        );
        assert!(peak.report.distillable(), "peak should beat the classical channel");
    }
    println!();
    println!("the peak arrives slightly after the transit estimate and");
    println!("weakens with length, but stays distillable (fef > 1/2)");
    Ok(())
}
