//! Reduced density matrix of the two end spins.
//!
//! Basis order `{uu, ud, du, dd}` for (site 1, site N); entry `(i, j)` is
//! `<i|rho|j>`, computed as the expectation `<|j><i|>` in the evolved state.
//!
//! Each of the sixteen entries factors into single-spin blocks. On site 1
//! the Jordan-Wigner images are string-free, `sigma^-_1 = c_1` and
//! `P^up_1 = c+_1 c_1`; on site N the ladder operators pick up the full
//! parity string, `sigma^-_N = -c_N S` and `sigma^+_N = +c+_N S`, while the
//! projectors stay string-free. The string commutes with the Hamiltonian and
//! is left unevolved.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::correlator::{
    bell_pair_partner, dynamic_moment_transfer, FermionFactor, FermionWord,
};
use crate::error::{Error, Result};
use crate::lattice::{BellPairStateSpec, InitialState, MixtureSpec, ProductStateSpec};
use crate::propagator::Propagator;

/// 4x4 state of the end-spin pair at a fixed time.
#[derive(Debug, Clone)]
pub struct TwoSpinDensityMatrix {
    entries: [[C64; 4]; 4],
    time: f64,
}

impl TwoSpinDensityMatrix {
    pub fn from_entries(entries: [[C64; 4]; 4], time: f64) -> Self {
        TwoSpinDensityMatrix { entries, time }
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.entries
    }

    /// `<i|rho|j>`; indices must be below 4.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_deviation(&self, other: &TwoSpinDensityMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }
}

#[derive(Clone)]
struct BlockTerm {
    coeff: f64,
    factors: Vec<FermionFactor>,
    string: bool,
}

/// Jordan-Wigner expansion of the single-spin operator `|ket><bra|` on an
/// end site. `far_end` selects the string-carrying site-N conventions.
fn end_block(site: usize, far_end: bool, bra: usize, ket: usize) -> Vec<BlockTerm> {
    let dag = FermionFactor::evolved(site, true);
    let ann = FermionFactor::evolved(site, false);
    match (bra, ket) {
        // P^up = c+ c.
        (0, 0) => vec![BlockTerm { coeff: 1.0, factors: vec![dag, ann], string: false }],
        // P^down = 1 - c+ c.
        (1, 1) => vec![
            BlockTerm { coeff: 1.0, factors: vec![], string: false },
            BlockTerm { coeff: -1.0, factors: vec![dag, ann], string: false },
        ],
        // sigma^-.
        (0, 1) => vec![BlockTerm {
            coeff: if far_end { -1.0 } else { 1.0 },
            factors: vec![ann],
            string: far_end,
        }],
        // sigma^+.
        (1, 0) => vec![BlockTerm { coeff: 1.0, factors: vec![dag], string: far_end }],
        _ => unreachable!("spin labels are 0 or 1"),
    }
}

/// End-spin density matrix of an evolved product state.
pub fn rdm_product(state: &ProductStateSpec, prop: &Propagator) -> Result<TwoSpinDensityMatrix> {
    let n = state.n_sites();
    if n != prop.n_sites() {
        return Err(Error::invalid(format!(
            "state has {n} sites but propagator has {}",
            prop.n_sites()
        )));
    }
    type WordKey = (Vec<(usize, bool)>, bool);
    let mut cache: BTreeMap<WordKey, C64> = BTreeMap::new();
    let mut entries = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let first = end_block(1, false, i >> 1, j >> 1);
            let second = end_block(n, true, i & 1, j & 1);
            for t1 in &first {
                for tn in &second {
                    let coeff = t1.coeff * tn.coeff;
                    let mut factors = t1.factors.clone();
                    factors.extend_from_slice(&tn.factors);
                    let string = t1.string || tn.string;
                    let moment = if factors.is_empty() {
                        debug_assert!(!string);
                        C64::new(1.0, 0.0)
                    } else {
                        let key: WordKey = (
                            factors.iter().map(|f| (f.site(), f.dagger())).collect(),
                            string,
                        );
                        match cache.get(&key) {
                            Some(&v) => v,
                            None => {
                                let word = FermionWord::new(factors.clone(), string)?;
                                let v = dynamic_moment_transfer(&word, state, prop)?;
                                cache.insert(key, v);
                                v
                            }
                        }
                    };
                    *slot += coeff * moment;
                }
            }
        }
    }
    Ok(TwoSpinDensityMatrix { entries, time: prop.time() })
}

/// End-spin density matrix of the evolved Bell-pair chain, in closed form.
///
/// The state is Gaussian and number conserving, so Wick's theorem reduces
/// everything to `G_ij = <c+_i(t) c_j(t)>` and the string-dressed
/// `C_ij = <c_i(t) c+_j(t) S>`. The result has X form: diagonal populations
/// plus one coherence between `ud` and `du`.
pub fn rdm_bell(pairs: &BellPairStateSpec, prop: &Propagator) -> Result<TwoSpinDensityMatrix> {
    let n = pairs.n_sites();
    if n != prop.n_sites() {
        return Err(Error::invalid(format!(
            "bell chain has {n} sites but propagator has {}",
            prop.n_sites()
        )));
    }
    let f = prop.matrix();
    let row1 = f.row(0);
    let rown = f.row(n - 1);
    let partner = |l: usize| bell_pair_partner(l + 1) - 1;

    // <c+_l c_m> = 1/2 on the diagonal, -1/2 across a pair:
    // (K0 row)[l] = (row[l] - row[partner]) / 2.
    let k0 = |row: &ndarray::ArrayView1<C64>| -> Vec<C64> {
        (0..n).map(|l| 0.5 * (row[l] - row[partner(l)])).collect()
    };
    // <c_l c+_m S> = (-1)^pairs / 2 on the diagonal and across a pair.
    let half = if pairs.n_pairs() % 2 == 0 { 0.5 } else { -0.5 };
    let k1 = |row: &ndarray::ArrayView1<C64>| -> Vec<C64> {
        (0..n)
            .map(|l| half * (row[l].conj() + row[partner(l)].conj()))
            .collect()
    };

    let k0_1 = k0(&row1);
    let k0_n = k0(&rown);
    let dot_conj = |a: &ndarray::ArrayView1<C64>, b: &[C64]| -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let g11 = dot_conj(&row1, &k0_1);
    let g1n = dot_conj(&row1, &k0_n);
    let gn1 = dot_conj(&rown, &k0_1);
    let gnn = dot_conj(&rown, &k0_n);

    let k1_n = k1(&rown);
    let coherence: C64 = row1.iter().zip(&k1_n).map(|(x, y)| x * y).sum();

    let one = C64::new(1.0, 0.0);
    let both_up = gnn * g11 - gn1 * g1n;
    let up_down = g11 - both_up;
    let down_up = gnn - both_up;
    let both_down = one - g11 - gnn + both_up;

    let zero = C64::new(0.0, 0.0);
    let mut entries = [[zero; 4]; 4];
    entries[0][0] = both_up;
    entries[1][1] = up_down;
    entries[2][2] = down_up;
    entries[3][3] = both_down;
    entries[1][2] = coherence;
    entries[2][1] = coherence.conj();
    Ok(TwoSpinDensityMatrix { entries, time: prop.time() })
}

/// Convex combination of product-state density matrices.
pub fn rdm_mixture(mix: &MixtureSpec, prop: &Propagator) -> Result<TwoSpinDensityMatrix> {
    let mut entries = [[C64::new(0.0, 0.0); 4]; 4];
    for (&w, component) in mix.weights().iter().zip(mix.components()) {
        let rho = rdm_product(component, prop)?;
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] += w * rho.entries[i][j];
            }
        }
    }
    Ok(TwoSpinDensityMatrix { entries, time: prop.time() })
}

/// Dispatch over the supported initial states.
pub fn rdm_of(init: &InitialState, prop: &Propagator) -> Result<TwoSpinDensityMatrix> {
    match init {
        InitialState::Product(spec) => rdm_product(spec, prop),
        InitialState::BellPairs(spec) => rdm_bell(spec, prop),
        InitialState::Mixture(spec) => rdm_mixture(spec, prop),
    }
}
