//! Entanglement delivery through a chain with imperfect couplings.
//!
//! Every bond is drawn as J(1 + delta_k) with gaussian delta_k of spread
//! delta, once per realization. The ensemble-averaged measures of the
//! delivered end pair stay useful for surprisingly rough chains.

use endspin::analysis::LinearGrid;
use endspin::disorder::{ensemble_average, AverageMode, CouplingEnsemble};
use endspin::lattice::{BellPairStateSpec, ChainSpec, InitialState};

fn main() -> endspin::Result<()> {
    let n = 10;
    let chain = ChainSpec::new(n, 1.0)?;
    let init = InitialState::BellPairs(BellPairStateSpec::new(n / 2)?);
    let times = LinearGrid::default_time(n, 1.0)?.values();
    let realizations = 100;
    let seed = 20240817;

    println!("Bell pairs, N = {n}, {realizations} realizations per spread");
    println!("{:>7}  {:>9}  {:>8}  {:>11}", "spread", "peak fef", "at t", "distillable");
    for delta in [0.0, 0.1, 0.2] {
        let ensemble = CouplingEnsemble::new(delta, realizations, seed)?;
        let curve = ensemble_average(&ensemble, &chain, &init, &times, AverageMode::Measures)?;
        let (best, report) = curve
            .mean()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.fef.total_cmp(&b.1.fef))
            .expect("grid is never empty");
        println!(
            "{delta:>7.2}  {:>9.4}  {:>8.3}  {:>11}",
            report.fef,
            curve.times()[best],
            if report.fef > 0.5 { "yes" } else { "no" }
        );
    }
    println!();
    println!("ten percent coupling noise keeps the averaged peak distillable");
    println!("and leaves the arrival time essentially unchanged");
    Ok(())
}
