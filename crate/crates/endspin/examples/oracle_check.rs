//! Cross-check the fermionic engine against brute-force diagonalization.
//!
//! The engine computes end-pair density matrices through Jordan-Wigner
//! moments and never touches the full Hilbert space. Exact diagonalization
//! does the opposite. On chains small enough for both, the two must agree
//! to near machine precision, which pins every sign convention in the
//! mapping.

use endspin::lattice::{BellPairStateSpec, ChainSpec, InitialState, ProductStateSpec};
use endspin::oracle::{ed_rdm_ends, EdHamiltonian, FullState};
use endspin::propagator::Propagator;
use endspin::rdm::{rdm_of, TwoSpinDensityMatrix};

fn main() -> endspin::Result<()> {
    let mut worst: f64 = 0.0;
    for n in [4usize, 6, 8, 10] {
        let chain = ChainSpec::new(n, 1.0)?;
        let hamiltonian = EdHamiltonian::new(&chain.uniform_profile(), 0.0)?;

        let cases: Vec<(&str, InitialState, FullState)> = vec![
            (
                "neel",
                InitialState::Product(ProductStateSpec::neel(n)?),
                FullState::product(&ProductStateSpec::neel(n)?)?,
            ),
            (
                "canted 0.8",
                InitialState::Product(ProductStateSpec::canted(n, 0.8)?),
                FullState::product(&ProductStateSpec::canted(n, 0.8)?)?,
            ),
            (
                "bell pairs",
                InitialState::BellPairs(BellPairStateSpec::new(n / 2)?),
                FullState::bell_pairs(&BellPairStateSpec::new(n / 2)?)?,
            ),
        ];

        for (name, init, full) in &cases {
            let mut case_worst: f64 = 0.0;
            for t in [0.4, 1.1, 2.7] {
                let engine = rdm_of(init, &Propagator::analytic(&chain, t)?)?;
                let reference =
                    TwoSpinDensityMatrix::from_entries(ed_rdm_ends(&hamiltonian.evolve(full, t)?), t);
                case_worst = case_worst.max(engine.max_deviation(&reference));
            }
            println!("N = {n:2}  {name:12} max deviation {case_worst:.3e}");
            worst = worst.max(case_worst);
        }
    }
    println!();
    println!("worst case {worst:.3e}");
    assert!(worst < 1e-9, "engine and diagonalization disagree");
    println!("engine and diagonalization agree");
    Ok(())
}
