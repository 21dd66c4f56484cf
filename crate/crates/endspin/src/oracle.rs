//! Exact-diagonalization reference implementations.
//!
//! Everything here works on the full 2^N-dimensional spin Hilbert space and
//! is deliberately independent of the fermionic engine: no Jordan-Wigner
//! strings, no propagators, just dense sector-blocked diagonalization of the
//! spin Hamiltonian. The engine modules test themselves against this one.
//!
//! Basis convention: basis index `b` encodes site `k` in bit `N - k`, so
//! site 1 is the most significant bit. A cleared bit is an up spin.

use std::sync::OnceLock;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{BellPairStateSpec, CouplingProfile, ProductStateSpec};
use crate::linalg::{eigen_sym, EigenSym};

/// Largest chain the dense solver accepts; 2^14 amplitudes with the biggest
/// magnetization sector at dimension 3432.
pub const ED_MAX_SITES: usize = 14;

/// Dense many-body state vector.
#[derive(Debug, Clone)]
pub struct FullState {
    n_sites: usize,
    amp: Vec<C64>,
}

impl FullState {
    /// Product state with per-site amplitudes `(cos(theta/2), sin(theta/2))`
    /// in the (up, down) basis.
    pub fn product(spec: &ProductStateSpec) -> Result<Self> {
        let n = spec.n_sites();
        check_ed_size(n)?;
        let mut amp = vec![C64::new(0.0, 0.0); 1 << n];
        for (b, slot) in amp.iter_mut().enumerate() {
            let mut v = 1.0;
            for (k, &theta) in spec.angles().iter().enumerate() {
                let half = 0.5 * theta;
                let bit = (b >> (n - 1 - k)) & 1;
                v *= if bit == 0 { half.cos() } else { half.sin() };
            }
            *slot = C64::new(v, 0.0);
        }
        Ok(FullState { n_sites: n, amp })
    }

    /// Tensor product of nearest-neighbor singlets `(|ud> - |du>)/sqrt(2)`
    /// on site pairs (1,2), (3,4), ...
    pub fn bell_pairs(spec: &BellPairStateSpec) -> Result<Self> {
        let n = spec.n_sites();
        check_ed_size(n)?;
        let root = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = vec![C64::new(0.0, 0.0); 1 << n];
        for (b, slot) in amp.iter_mut().enumerate() {
            let mut v = 1.0;
            for pair in 0..spec.n_pairs() {
                let left = (b >> (n - 1 - 2 * pair)) & 1;
                let right = (b >> (n - 2 - 2 * pair)) & 1;
                v *= match (left, right) {
                    (0, 1) => root,
                    (1, 0) => -root,
                    _ => 0.0,
                };
                if v == 0.0 {
                    break;
                }
            }
            *slot = C64::new(v, 0.0);
        }
        Ok(FullState { n_sites: n, amp })
    }

    /// Wrap raw amplitudes; the length must be `2^n_sites`.
    pub fn from_amplitudes(n_sites: usize, amp: Vec<C64>) -> Result<Self> {
        check_ed_size(n_sites)?;
        if amp.len() != 1 << n_sites {
            return Err(Error::invalid(format!(
                "amplitude vector has length {}, expected {}",
                amp.len(),
                1usize << n_sites
            )));
        }
        if amp.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(FullState { n_sites, amp })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FullState) -> C64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Total `<sum_k sigma^z_k>`; a down bit contributes -1.
    pub fn magnetization(&self) -> f64 {
        let n = self.n_sites as i64;
        self.amp
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * (n - 2 * b.count_ones() as i64) as f64)
            .sum()
    }
}

fn check_ed_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("dense solver needs at least 2 sites"));
    }
    if n > ED_MAX_SITES {
        return Err(Error::invalid(format!(
            "dense solver is capped at {ED_MAX_SITES} sites, got {n}"
        )));
    }
    Ok(())
}

/// XX(Z) chain Hamiltonian
/// `H = sum_k (J_k/2) (sx sx + sy sy + delta * sz sz)` on open boundaries,
/// blocked by magnetization. Sector eigenbases are computed on first use and
/// cached.
pub struct EdHamiltonian {
    n_sites: usize,
    bonds: Vec<f64>,
    delta: f64,
    /// Basis indices of each magnetization sector, keyed by down-spin count.
    sectors: Vec<Vec<usize>>,
    /// Position of each basis index inside its sector.
    pos: Vec<u32>,
    eigen: Vec<OnceLock<std::result::Result<EigenSym, (usize, f64)>>>,
}

impl EdHamiltonian {
    pub fn new(profile: &CouplingProfile, delta: f64) -> Result<Self> {
        let n = profile.n_sites();
        check_ed_size(n)?;
        if !delta.is_finite() {
            return Err(Error::invalid("anisotropy must be finite"));
        }
        let dim = 1usize << n;
        let mut sectors = vec![Vec::new(); n + 1];
        let mut pos = vec![0u32; dim];
        for b in 0..dim {
            let s = b.count_ones() as usize;
            pos[b] = sectors[s].len() as u32;
            sectors[s].push(b);
        }
        let eigen = (0..=n).map(|_| OnceLock::new()).collect();
        Ok(EdHamiltonian {
            n_sites: n,
            bonds: profile.bonds().to_vec(),
            delta,
            sectors,
            pos,
            eigen,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn diagonal(&self, b: usize) -> f64 {
        let n = self.n_sites;
        let mut e = 0.0;
        for (k, &j) in self.bonds.iter().enumerate() {
            let s1 = 1.0 - 2.0 * ((b >> (n - 1 - k)) & 1) as f64;
            let s2 = 1.0 - 2.0 * ((b >> (n - 2 - k)) & 1) as f64;
            e += 0.5 * j * self.delta * s1 * s2;
        }
        e
    }

    /// `H |psi>` by direct action, bypassing the cached eigenbases.
    pub fn apply(&self, state: &FullState) -> Result<FullState> {
        if state.n_sites != self.n_sites {
            return Err(Error::invalid("state size does not match Hamiltonian"));
        }
        let n = self.n_sites;
        let mut out = vec![C64::new(0.0, 0.0); state.amp.len()];
        for (b, &a) in state.amp.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            out[b] += a * self.diagonal(b);
            for (k, &j) in self.bonds.iter().enumerate() {
                let hi = (b >> (n - 1 - k)) & 1;
                let lo = (b >> (n - 2 - k)) & 1;
                if hi != lo {
                    let flipped = b ^ ((1 << (n - 1 - k)) | (1 << (n - 2 - k)));
                    out[flipped] += a * j;
                }
            }
        }
        FullState::from_amplitudes(n, out)
    }

    fn sector_eigen(&self, s: usize) -> Result<&EigenSym> {
        let cell = self.eigen[s].get_or_init(|| {
            let basis = &self.sectors[s];
            let d = basis.len();
            let n = self.n_sites;
            let mut h = Array2::<f64>::zeros((d, d));
            for (p, &b) in basis.iter().enumerate() {
                h[[p, p]] = self.diagonal(b);
                for (k, &j) in self.bonds.iter().enumerate() {
                    let hi = (b >> (n - 1 - k)) & 1;
                    let lo = (b >> (n - 2 - k)) & 1;
                    if hi != lo {
                        let flipped = b ^ ((1 << (n - 1 - k)) | (1 << (n - 2 - k)));
                        h[[p, self.pos[flipped] as usize]] += j;
                    }
                }
            }
            match eigen_sym(&h) {
                Ok(e) => Ok(e),
                Err(Error::NoConvergence { sweeps, offdiag }) => Err((sweeps, offdiag)),
                Err(_) => unreachable!("eigen_sym only fails by non-convergence"),
            }
        });
        match cell {
            Ok(e) => Ok(e),
            Err(err) => Err(Error::NoConvergence { sweeps: err.0, offdiag: err.1 }),
        }
    }

    /// `exp(-i H t) |psi>` sector by sector.
    pub fn evolve(&self, state: &FullState, time: f64) -> Result<FullState> {
        if state.n_sites != self.n_sites {
            return Err(Error::invalid("state size does not match Hamiltonian"));
        }
        if !time.is_finite() {
            return Err(Error::invalid(format!("time {time} is not finite")));
        }
        let mut out = vec![C64::new(0.0, 0.0); state.amp.len()];
        for s in 0..=self.n_sites {
            let basis = &self.sectors[s];
            let occupied = basis.iter().any(|&b| state.amp[b] != C64::new(0.0, 0.0));
            if !occupied {
                continue;
            }
            let eig = self.sector_eigen(s)?;
            let d = basis.len();
            let v = &eig.vectors;
            // coeffs = V^T x, then y = V (phase .* coeffs)
            let mut coeffs = vec![C64::new(0.0, 0.0); d];
            for (m, c) in coeffs.iter_mut().enumerate() {
                for (p, &b) in basis.iter().enumerate() {
                    *c += v[[p, m]] * state.amp[b];
                }
                *c *= C64::from_polar(1.0, -eig.values[m] * time);
            }
            for (p, &b) in basis.iter().enumerate() {
                let mut y = C64::new(0.0, 0.0);
                for (m, &c) in coeffs.iter().enumerate() {
                    y += v[[p, m]] * c;
                }
                out[b] = y;
            }
        }
        FullState::from_amplitudes(self.n_sites, out)
    }
}

/// Reduced density matrix of the two end spins, traced over the bulk.
///
/// Entry `(i, j)` is `<i|rho|j>` in the basis
/// `{uu, ud, du, dd}` of (site 1, site N), with up listed first.
pub fn ed_rdm_ends(state: &FullState) -> [[C64; 4]; 4] {
    let n = state.n_sites;
    let mid = 1usize << (n - 2);
    let mut rho = [[C64::new(0.0, 0.0); 4]; 4];
    for m in 0..mid {
        let mut comp = [C64::new(0.0, 0.0); 4];
        for s1 in 0..2usize {
            for sn in 0..2usize {
                comp[s1 * 2 + sn] = state.amp[s1 * (1 << (n - 1)) + m * 2 + sn];
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += comp[i] * comp[j].conj();
            }
        }
    }
    rho
}

/// Fully entangled fraction by direct maximization of `<e|rho|e>` over
/// maximally entangled `|e> = (M x I)|Phi+>`, `M in SU(2)` parametrized by
/// Euler angles. Coarse grid, then pattern search from the best separated
/// candidates; the step only shrinks when a round's maximum stays interior,
/// so the search can travel along near-degenerate ridges. Accurate to well
/// under 1e-6, always from below. Slow; meant as a cross-check for the
/// magic-basis route.
pub fn fef_brute_force(rho: &[[C64; 4]; 4]) -> f64 {
    let value = |a: f64, b: f64, c: f64| -> f64 {
        // M = Rz(a) Ry(b) Rz(c); |e> components are M[s1][s2] / sqrt(2).
        let (cb, sb) = ((0.5 * b).cos(), (0.5 * b).sin());
        let ea = C64::from_polar(1.0, -0.5 * a);
        let ec = C64::from_polar(1.0, -0.5 * c);
        let m = [
            [ea * ec * cb, -ea * ec.conj() * sb],
            [ea.conj() * ec * sb, ea.conj() * ec.conj() * cb],
        ];
        let root = std::f64::consts::FRAC_1_SQRT_2;
        let v = [m[0][0] * root, m[0][1] * root, m[1][0] * root, m[1][1] * root];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * rho[i][j] * v[j];
            }
        }
        acc.re
    };

    let tau = std::f64::consts::TAU;
    let coarse = 24usize;
    let mut samples = Vec::with_capacity(coarse * (coarse / 2 + 1) * coarse);
    for ia in 0..coarse {
        let a = tau * ia as f64 / coarse as f64;
        for ib in 0..=coarse / 2 {
            let b = tau / 2.0 * ib as f64 / (coarse / 2) as f64;
            for ic in 0..coarse {
                let c = tau * ic as f64 / coarse as f64;
                samples.push((a, b, c, value(a, b, c)));
            }
        }
    }
    samples.sort_by(|x, y| y.3.total_cmp(&x.3));

    // A handful of well-separated starting points guards against the coarse
    // maximum sitting in the wrong basin when two basins run nearly level.
    let wrapped = |d: f64| -> f64 {
        let d = d.abs() % tau;
        d.min(tau - d)
    };
    let mut starts: Vec<(f64, f64, f64, f64)> = Vec::new();
    for s in &samples {
        if starts.len() == 4 {
            break;
        }
        let fresh = starts.iter().all(|p| {
            let d2 = wrapped(s.0 - p.0).powi(2) + (s.1 - p.1).powi(2) + wrapped(s.2 - p.2).powi(2);
            d2 > 0.25
        });
        if fresh {
            starts.push(*s);
        }
    }

    let mut overall = f64::NEG_INFINITY;
    for start in starts {
        // Pattern search on 9^3 boxes spanning +-step. A maximum on the box
        // edge means the walk is still traveling, so the step is kept; only
        // an interior maximum halves it.
        let mut best = start;
        let mut step = tau / coarse as f64;
        let mut rounds = 0;
        while step > 1e-6 && rounds < 64 {
            rounds += 1;
            let center = best;
            let mut on_edge = false;
            for da in -4i32..=4 {
                for db in -4i32..=4 {
                    for dc in -4i32..=4 {
                        let a = center.0 + step * da as f64 / 4.0;
                        let b = center.1 + step * db as f64 / 4.0;
                        let c = center.2 + step * dc as f64 / 4.0;
                        let f = value(a, b, c);
                        if f > best.3 {
                            best = (a, b, c, f);
                            on_edge = da.abs() == 4 || db.abs() == 4 || dc.abs() == 4;
                        }
                    }
                }
            }
            if !on_edge {
                step /= 2.0;
            }
        }
        overall = overall.max(best.3);
    }
    overall
}

/// Apply the Jordan-Wigner image of `c_site` (or `c+_site` when `dagger`)
/// to a full state: string of `-sigma^z` on sites left of `site`, then the
/// ladder operator. An occupied fermion mode is an up spin.
#[cfg(test)]
pub(crate) fn apply_fermion(state: &FullState, site: usize, dagger: bool) -> FullState {
    let n = state.n_sites;
    assert!(site >= 1 && site <= n);
    let bit = 1usize << (n - site);
    let mut out = vec![C64::new(0.0, 0.0); state.amp.len()];
    for (b, &a) in state.amp.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let occupied = (b & bit) == 0;
        if occupied == dagger {
            continue;
        }
        let ups_left = (site - 1) as u32 - (b >> (n - site + 1)).count_ones();
        let sign = if ups_left % 2 == 0 { 1.0 } else { -1.0 };
        out[b ^ bit] += a * sign;
    }
    FullState { n_sites: n, amp: out }
}

/// Apply the full parity string `prod_k (-sigma^z_k)`.
#[cfg(test)]
pub(crate) fn apply_string(state: &FullState) -> FullState {
    let n = state.n_sites;
    let amp = state
        .amp
        .iter()
        .enumerate()
        .map(|(b, &a)| {
            let ups = n as u32 - b.count_ones();
            if ups % 2 == 0 {
                a
            } else {
                -a
            }
        })
        .collect();
    FullState { n_sites: n, amp }
}
