//! Expectation values of short fermion-operator words.
//!
//! The reduced density matrix of the end spins reduces to expectation values
//! of products of up to four `c` / `c+` operators, optionally multiplied by
//! the full parity string `S = prod_k (-sigma^z_k)`. This module evaluates
//! such words in initial product and Bell-pair states.
//!
//! Heisenberg evolution expands each evolved operator over sites with
//! propagator amplitudes, `c_k(t) = sum_l f[k][l] c_l`, leaving static
//! moments of the initial state. Those are products of single-site 2x2
//! expectations once every operator is rewritten through its Jordan-Wigner
//! spin image: a factor at site `l` acts as `-sigma^z` on every site left of
//! `l` and as a ladder operator on `l` itself, and the parity string acts as
//! `-sigma^z` everywhere.
//!
//! Two evaluation routes are provided for dynamic moments. The naive route
//! sums over all site placements of the evolved operators, `O(N^F)` terms.
//! The transfer route sweeps the chain once, carrying amplitudes for each
//! subset of still-unplaced operators, `O(N 3^F)`. They are independent
//! implementations of the same expansion and agree to near machine
//! precision; the naive route exists as a cross-check.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{BellPairStateSpec, ProductStateSpec};
use crate::propagator::Propagator;

/// Longest supported word; the density-matrix entries need four.
pub const MAX_FACTORS: usize = 4;

/// One `c` or `c+` factor. `evolved` marks Heisenberg evolution to the
/// propagator's time; static factors stay at their site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionFactor {
    site: usize,
    dagger: bool,
    evolved: bool,
}

impl FermionFactor {
    /// Heisenberg-evolved factor `c_site(t)` or `c+_site(t)`.
    pub fn evolved(site: usize, dagger: bool) -> Self {
        FermionFactor { site, dagger, evolved: true }
    }

    /// Unevolved factor pinned to its site.
    pub fn fixed(site: usize, dagger: bool) -> Self {
        FermionFactor { site, dagger, evolved: false }
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn dagger(&self) -> bool {
        self.dagger
    }

    pub fn is_evolved(&self) -> bool {
        self.evolved
    }
}

/// Ordered operator product, leftmost factor first, with an optional parity
/// string standing to the right of all factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermionWord {
    factors: Vec<FermionFactor>,
    global_string: bool,
}

impl FermionWord {
    pub fn new(factors: Vec<FermionFactor>, global_string: bool) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(Error::invalid(format!(
                "word length {} outside 1..={MAX_FACTORS}",
                factors.len()
            )));
        }
        if let Some(f) = factors.iter().find(|f| f.site == 0) {
            return Err(Error::invalid(format!("factor site {} must be >= 1", f.site)));
        }
        Ok(FermionWord { factors, global_string })
    }

    pub fn factors(&self) -> &[FermionFactor] {
        &self.factors
    }

    pub fn has_string(&self) -> bool {
        self.global_string
    }

    fn check_sites(&self, n_sites: usize) -> Result<()> {
        if let Some(f) = self.factors.iter().find(|f| f.site > n_sites) {
            return Err(Error::invalid(format!(
                "factor site {} exceeds chain length {n_sites}",
                f.site
            )));
        }
        Ok(())
    }
}

type Mat2 = [[f64; 2]; 2];

const ID: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
const MZ: Mat2 = [[-1.0, 0.0], [0.0, 1.0]];
const RAISE: Mat2 = [[0.0, 1.0], [0.0, 0.0]];
const LOWER: Mat2 = [[0.0, 0.0], [1.0, 0.0]];

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[0.0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// `<psi_k| m |psi_k>` for the real single-site state `(c, s)`.
fn expect2(m: &Mat2, c: f64, s: f64) -> f64 {
    c * c * m[0][0] + c * s * (m[0][1] + m[1][0]) + s * s * m[1][1]
}

/// Half-angle cosines and sines of every site of a product state.
fn half_angles(state: &ProductStateSpec) -> (Vec<f64>, Vec<f64>) {
    let cs = state.angles().iter().map(|t| (0.5 * t).cos()).collect();
    let sn = state.angles().iter().map(|t| (0.5 * t).sin()).collect();
    (cs, sn)
}

/// Moment of fully placed factors: `placed` holds 0-based sites in word
/// order with dagger flags.
fn placed_moment(placed: &[(usize, bool)], string: bool, cs: &[f64], sn: &[f64]) -> f64 {
    let mut acc = 1.0;
    for k in 0..cs.len() {
        let mut m = ID;
        for &(l, dagger) in placed {
            if k < l {
                m = mul2(&m, &MZ);
            } else if k == l {
                m = mul2(&m, if dagger { &RAISE } else { &LOWER });
            }
        }
        if string {
            m = mul2(&m, &MZ);
        }
        acc *= expect2(&m, cs[k], sn[k]);
        if acc == 0.0 {
            return 0.0;
        }
    }
    acc
}

/// Expectation of a word of unevolved factors in a product state.
pub fn static_moment(word: &FermionWord, state: &ProductStateSpec) -> Result<C64> {
    word.check_sites(state.n_sites())?;
    if word.factors.iter().any(|f| f.evolved) {
        return Err(Error::invalid(
            "static moment requires unevolved factors; use a dynamic evaluator",
        ));
    }
    let (cs, sn) = half_angles(state);
    let placed: Vec<(usize, bool)> =
        word.factors.iter().map(|f| (f.site - 1, f.dagger)).collect();
    Ok(C64::from(placed_moment(&placed, word.global_string, &cs, &sn)))
}

/// Intra-pair partner of a site in the Bell-pair layout: (1,2), (3,4), ...
pub fn bell_pair_partner(site: usize) -> usize {
    if site % 2 == 1 {
        site + 1
    } else {
        site - 1
    }
}

/// Static moments of the Bell-pair state, restricted to the two word shapes
/// its density matrix needs: `<c+_l c_m>` without string and `<c_l c+_m S>`
/// with the string. Everything else is rejected.
pub fn static_moment_bell(word: &FermionWord, pairs: &BellPairStateSpec) -> Result<C64> {
    word.check_sites(pairs.n_sites())?;
    if word.factors.iter().any(|f| f.evolved) {
        return Err(Error::invalid(
            "static moment requires unevolved factors; use a dynamic evaluator",
        ));
    }
    let shape: Vec<bool> = word.factors.iter().map(|f| f.dagger).collect();
    let (l, m) = match (shape.as_slice(), word.global_string) {
        ([true, false], false) => (word.factors[0].site, word.factors[1].site),
        ([false, true], true) => (word.factors[0].site, word.factors[1].site),
        _ => {
            return Err(Error::invalid(
                "bell static tables cover <c+ c> and <c c+ S> words only",
            ))
        }
    };
    let hit = l == m || bell_pair_partner(l) == m;
    let value = if !word.global_string {
        // <c+_l c_m>: 1/2 on the diagonal, -1/2 across a pair, 0 elsewhere.
        match (l == m, hit) {
            (true, _) => 0.5,
            (false, true) => -0.5,
            _ => 0.0,
        }
    } else {
        // <c_l c+_m S>: (-1)^{pairs}/2 on the diagonal and across a pair.
        let sign = if pairs.n_pairs() % 2 == 0 { 0.5 } else { -0.5 };
        if hit {
            sign
        } else {
            0.0
        }
    };
    Ok(C64::from(value))
}

/// Per-factor expansion weights at each (0-based) site.
///
/// Evolved factors spread with propagator amplitudes, conjugated for
/// creation operators; static factors are a point mass on their site.
fn expansion_rows(word: &FermionWord, prop: &Propagator) -> Vec<Vec<C64>> {
    let n = prop.n_sites();
    let f = prop.matrix();
    word.factors
        .iter()
        .map(|fac| {
            if fac.evolved {
                f.row(fac.site - 1)
                    .iter()
                    .map(|a| if fac.dagger { a.conj() } else { *a })
                    .collect()
            } else {
                let mut row = vec![C64::new(0.0, 0.0); n];
                row[fac.site - 1] = C64::new(1.0, 0.0);
                row
            }
        })
        .collect()
}

fn check_dynamic(word: &FermionWord, state: &ProductStateSpec, prop: &Propagator) -> Result<()> {
    if state.n_sites() != prop.n_sites() {
        return Err(Error::invalid(format!(
            "state has {} sites but propagator has {}",
            state.n_sites(),
            prop.n_sites()
        )));
    }
    word.check_sites(prop.n_sites())
}

/// Dynamic moment by explicit summation over all placements, `O(N^F)`.
/// Reference implementation; prefer [`dynamic_moment_transfer`].
pub fn dynamic_moment_naive(
    word: &FermionWord,
    state: &ProductStateSpec,
    prop: &Propagator,
) -> Result<C64> {
    check_dynamic(word, state, prop)?;
    let n = prop.n_sites();
    let rows = expansion_rows(word, prop);
    let (cs, sn) = half_angles(state);
    let daggers: Vec<bool> = word.factors.iter().map(|f| f.dagger).collect();
    let fcount = daggers.len();

    let mut total = C64::new(0.0, 0.0);
    let mut placement = vec![0usize; fcount];
    'outer: loop {
        let mut coeff = C64::new(1.0, 0.0);
        for (i, &l) in placement.iter().enumerate() {
            coeff *= rows[i][l];
        }
        if coeff.norm_sqr() != 0.0 {
            let placed: Vec<(usize, bool)> =
                placement.iter().copied().zip(daggers.iter().copied()).collect();
            let m = placed_moment(&placed, word.global_string, &cs, &sn);
            total += coeff * m;
        }
        for slot in placement.iter_mut() {
            *slot += 1;
            if *slot < n {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(total)
}

/// Dynamic moment by a single sweep along the chain, `O(N 3^F)`.
///
/// The sweep state carries one amplitude per subset of still-unplaced
/// factors. At each site every subset may place any sub-subset there; the
/// transition weight is the single-site expectation of the ordered product
/// of `-sigma^z` (pending factors and string), ladder operators (factors
/// placed here) and identities (factors already placed), times the
/// expansion weights of the newly placed factors.
pub fn dynamic_moment_transfer(
    word: &FermionWord,
    state: &ProductStateSpec,
    prop: &Propagator,
) -> Result<C64> {
    check_dynamic(word, state, prop)?;
    let n = prop.n_sites();
    let rows = expansion_rows(word, prop);
    let (cs, sn) = half_angles(state);
    let fcount = word.factors.len();
    let full = (1usize << fcount) - 1;

    // mats[p << fcount | q] = site operator when q of the pending set p
    // lands on this site.
    let mut mats = vec![ID; 1 << (2 * fcount)];
    for p in 0..=full {
        let mut q = p;
        loop {
            let mut m = ID;
            for (i, fac) in word.factors.iter().enumerate() {
                let bit = 1usize << i;
                if q & bit != 0 {
                    m = mul2(&m, if fac.dagger { &RAISE } else { &LOWER });
                } else if p & bit != 0 {
                    m = mul2(&m, &MZ);
                }
            }
            if word.global_string {
                m = mul2(&m, &MZ);
            }
            mats[(p << fcount) | q] = m;
            if q == 0 {
                break;
            }
            q = (q - 1) & p;
        }
    }

    let zero = C64::new(0.0, 0.0);
    let mut amp = [zero; 1 << MAX_FACTORS];
    amp[full] = C64::new(1.0, 0.0);
    for k in 0..n {
        let mut next = [zero; 1 << MAX_FACTORS];
        for p in 0..=full {
            if amp[p] == zero {
                continue;
            }
            let mut q = p;
            loop {
                let e = expect2(&mats[(p << fcount) | q], cs[k], sn[k]);
                if e != 0.0 {
                    let mut coeff = amp[p] * e;
                    let mut bits = q;
                    while bits != 0 {
                        let i = bits.trailing_zeros() as usize;
                        coeff *= rows[i][k];
                        bits &= bits - 1;
                    }
                    next[p & !q] += coeff;
                }
                if q == 0 {
                    break;
                }
                q = (q - 1) & p;
            }
        }
        amp = next;
    }
    Ok(amp[0])
}
