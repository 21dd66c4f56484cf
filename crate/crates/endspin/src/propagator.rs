//! Single-particle propagator of the hopping chain.
//!
//! After the Jordan-Wigner step the chain Hamiltonian is quadratic,
//! `H = sum_k J_k (c+_k c_{k+1} + h.c.)`, so all Heisenberg dynamics is
//! carried by the matrix `f(t) = exp(-i A t)` where `A` is the tridiagonal
//! hopping matrix with `A[k][k+1] = A[k+1][k] = J_k` and zero diagonal.
//! Annihilation operators evolve as `c_k(t) = sum_l f[k][l] c_l` and
//! creation operators with the conjugate amplitudes.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{ChainSpec, CouplingProfile};
use crate::linalg::{eigen_sym, EigenSym};

/// Dense propagator matrix `f(t)` for a fixed chain and time.
///
/// Storage is 0-based; row `k-1` holds the amplitudes of site `k`.
/// All public site arguments are 1-based.
#[derive(Debug, Clone)]
pub struct Propagator {
    n_sites: usize,
    time: f64,
    amp: Array2<C64>,
}

impl Propagator {
    /// Mode-sum propagator of the uniform chain,
    /// `f[k][l] = 2/(N+1) sum_m sin(q_m k) sin(q_m l) exp(-i e_m t)`
    /// with `q_m = pi m / (N+1)` and `e_m = 2 J cos(q_m)`.
    pub fn analytic(chain: &ChainSpec, time: f64) -> Result<Self> {
        check_time(time)?;
        let n = chain.n_sites();
        let j = chain.coupling();
        let norm = 2.0 / (n as f64 + 1.0);
        let mut amp = Array2::<C64>::zeros((n, n));
        for m in 1..=n {
            let q = std::f64::consts::PI * m as f64 / (n as f64 + 1.0);
            let phase = C64::from_polar(norm, -2.0 * j * q.cos() * time);
            let s: Vec<f64> = (1..=n).map(|k| (q * k as f64).sin()).collect();
            for k in 0..n {
                let w = phase * s[k];
                let mut row = amp.row_mut(k);
                for l in 0..n {
                    row[l] += w * s[l];
                }
            }
        }
        Ok(Propagator { n_sites: n, time, amp })
    }

    /// Propagator of an arbitrary coupling profile via dense diagonalization.
    ///
    /// For repeated times on one profile, build a [`HoppingEigenbasis`] once
    /// and call [`HoppingEigenbasis::propagator`] instead.
    pub fn numeric(profile: &CouplingProfile, time: f64) -> Result<Self> {
        HoppingEigenbasis::new(profile)?.propagator(time)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Full amplitude matrix; row `k-1` belongs to site `k`.
    pub fn matrix(&self) -> ArrayView2<'_, C64> {
        self.amp.view()
    }

    /// Amplitude `f[k][l]` with 1-based sites.
    pub fn amplitude(&self, k: usize, l: usize) -> Result<C64> {
        self.check_site(k)?;
        self.check_site(l)?;
        Ok(self.amp[[k - 1, l - 1]])
    }

    /// Spread probabilities `|f[k][l]|^2` of an excitation starting on site
    /// `k`, indexed by `l-1`. Unitarity makes them sum to one.
    pub fn walk_distribution(&self, k: usize) -> Result<Vec<f64>> {
        self.check_site(k)?;
        Ok(self
            .amp
            .row(k - 1)
            .iter()
            .map(|f| f.norm_sqr())
            .collect())
    }

    fn check_site(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_sites {
            return Err(Error::invalid(format!(
                "site index {k} outside 1..={}",
                self.n_sites
            )));
        }
        Ok(())
    }
}

/// Eigendecomposition of the hopping matrix, reusable across times.
#[derive(Debug, Clone)]
pub struct HoppingEigenbasis {
    eigen: EigenSym,
    n_sites: usize,
}

impl HoppingEigenbasis {
    pub fn new(profile: &CouplingProfile) -> Result<Self> {
        let n = profile.n_sites();
        let mut a = Array2::<f64>::zeros((n, n));
        for (k, &j) in profile.bonds().iter().enumerate() {
            a[[k, k + 1]] = j;
            a[[k + 1, k]] = j;
        }
        Ok(HoppingEigenbasis { eigen: eigen_sym(&a)?, n_sites: n })
    }

    /// Single-particle energies, ascending.
    pub fn energies(&self) -> &[f64] {
        self.eigen
            .values
            .as_slice()
            .expect("eigenvalues are contiguous")
    }

    /// `f(t) = V exp(-i diag(e) t) V^T` from the stored eigenpairs.
    pub fn propagator(&self, time: f64) -> Result<Propagator> {
        check_time(time)?;
        let n = self.n_sites;
        let v = &self.eigen.vectors;
        let mut amp = Array2::<C64>::zeros((n, n));
        for m in 0..n {
            let phase = C64::from_polar(1.0, -self.eigen.values[m] * time);
            for k in 0..n {
                let w = phase * v[[k, m]];
                let mut row = amp.row_mut(k);
                for l in 0..n {
                    row[l] += w * v[[l, m]];
                }
            }
        }
        Ok(Propagator { n_sites: n, time, amp })
    }
}

fn check_time(time: f64) -> Result<()> {
    if !time.is_finite() {
        return Err(Error::invalid(format!("time {time} is not finite")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::gaussian_couplings;
    use ndarray::Array1;

    fn max_dev(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn unitarity_defect(p: &Propagator) -> f64 {
        let f = p.matrix();
        let n = p.n_sites();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = C64::new(0.0, 0.0);
                for l in 0..n {
                    dot += f[[i, l]] * f[[j, l]].conj();
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).norm());
            }
        }
        worst
    }

    /// Bessel J_0..J_{n_max} at x > 0 by Miller's backward recurrence,
    /// normalized with J_0 + 2 sum_k J_{2k} = 1. Test-only reference.
    fn bessel_j_table(n_max: usize, x: f64) -> Vec<f64> {
        let start = n_max.max(x.ceil() as usize) + 40;
        let mut out = vec![0.0; n_max + 1];
        let mut jkp1 = 0.0f64;
        let mut jk = 1e-30f64;
        if start <= n_max {
            out[start] = jk;
        }
        let mut norm = if start % 2 == 0 { 2.0 * jk } else { 0.0 };
        for k in (1..=start).rev() {
            let jkm1 = (2.0 * k as f64 / x) * jk - jkp1;
            jkp1 = jk;
            jk = jkm1;
            let idx = k - 1;
            if idx <= n_max {
                out[idx] = jk;
            }
            if idx % 2 == 0 {
                norm += if idx == 0 { jk } else { 2.0 * jk };
            }
        }
        for v in &mut out {
            *v /= norm;
        }
        out
    }

    #[test]
    fn time_zero_is_identity() {
        let chain = ChainSpec::new(9, 1.0).unwrap();
        for p in [
            Propagator::analytic(&chain, 0.0).unwrap(),
            Propagator::numeric(&chain.uniform_profile(), 0.0).unwrap(),
        ] {
            for k in 1..=9 {
                for l in 1..=9 {
                    let want = if k == l { 1.0 } else { 0.0 };
                    let got = p.amplitude(k, l).unwrap();
                    assert!((got - want).norm() < 1e-12, "f[{k}][{l}] = {got}");
                }
            }
        }
    }

    #[test]
    fn two_sites_closed_form() {
        // A = [[0, J], [J, 0]] gives f(t) = cos(Jt) I - i sin(Jt) X.
        for &j in &[1.0, 1.7] {
            let chain = ChainSpec::new(2, j).unwrap();
            for &t in &[0.3, 1.1, 2.5, 7.9] {
                let p = Propagator::analytic(&chain, t).unwrap();
                let c = C64::new((j * t).cos(), 0.0);
                let s = C64::new(0.0, -(j * t).sin());
                assert!((p.amplitude(1, 1).unwrap() - c).norm() < 1e-12);
                assert!((p.amplitude(2, 2).unwrap() - c).norm() < 1e-12);
                assert!((p.amplitude(1, 2).unwrap() - s).norm() < 1e-12);
                assert!((p.amplitude(2, 1).unwrap() - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_is_unitary_n50() {
        let chain = ChainSpec::new(50, 1.0).unwrap();
        let p = Propagator::analytic(&chain, 12.5).unwrap();
        assert!(unitarity_defect(&p) < 1e-10);
    }

    #[test]
    fn numeric_is_unitary_on_disordered_profile() {
        let chain = ChainSpec::new(30, 1.0).unwrap();
        let profile = gaussian_couplings(&chain, 0.2, 11).unwrap();
        let p = Propagator::numeric(&profile, 9.0).unwrap();
        assert!(unitarity_defect(&p) < 1e-10);
    }

    #[test]
    fn group_property() {
        // f(t1 + t2) = f(t1) f(t2) for any fixed profile.
        let chain = ChainSpec::new(16, 1.0).unwrap();
        let profile = gaussian_couplings(&chain, 0.15, 3).unwrap();
        let basis = HoppingEigenbasis::new(&profile).unwrap();
        let (t1, t2) = (1.3, 2.9);
        let f1 = basis.propagator(t1).unwrap();
        let f2 = basis.propagator(t2).unwrap();
        let f12 = basis.propagator(t1 + t2).unwrap();
        let prod = f1.matrix().dot(&f2.matrix());
        assert!(max_dev(&prod, &f12.amp) < 1e-9);
    }

    #[test]
    fn numeric_matches_analytic_on_uniform_chain() {
        for &(n, t) in &[(5usize, 0.7), (24, 12.5), (64, 50.0)] {
            let chain = ChainSpec::new(n, 1.0).unwrap();
            let a = Propagator::analytic(&chain, t).unwrap();
            let b = Propagator::numeric(&chain.uniform_profile(), t).unwrap();
            assert!(max_dev(&a.amp, &b.amp) < 1e-9, "N={n} t={t}");
        }
    }

    #[test]
    fn energies_match_dispersion() {
        let chain = ChainSpec::new(17, 0.8).unwrap();
        let basis = HoppingEigenbasis::new(&chain.uniform_profile()).unwrap();
        let mut want: Vec<f64> = (1..=17)
            .map(|m| 2.0 * 0.8 * (std::f64::consts::PI * m as f64 / 18.0).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (got, want) in basis.energies().iter().zip(&want) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_bond_decouples_site() {
        let profile = CouplingProfile::new(vec![1.0, 0.0]).unwrap();
        let p = Propagator::numeric(&profile, 3.7).unwrap();
        assert!((p.amplitude(3, 3).unwrap() - 1.0).norm() < 1e-12);
        for l in 1..=2 {
            assert!(p.amplitude(3, l).unwrap().norm() < 1e-12);
            assert!(p.amplitude(l, 3).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn bulk_amplitudes_follow_bessel_envelope() {
        // Deep in the bulk |f[k][k+d](t)| tracks |J_d(2Jt)| until the
        // wavefront feels the boundaries.
        let chain = ChainSpec::new(201, 1.0).unwrap();
        let p = Propagator::analytic(&chain, 20.0).unwrap();
        let bessel = bessel_j_table(30, 40.0);
        for d in -30i64..=30 {
            let l = (101 + d) as usize;
            let got = p.amplitude(101, l).unwrap().norm();
            let want = bessel[d.unsigned_abs() as usize].abs();
            assert!(
                (got - want).abs() < 5e-3,
                "d={d}: |f|={got:.6} |J|={want:.6}"
            );
        }
    }

    #[test]
    fn bessel_table_matches_known_values() {
        // J_0(1) and J_1(1) to 10 digits, plus the x=0+ limit behavior.
        let t = bessel_j_table(2, 1.0);
        assert!((t[0] - 0.7651976866).abs() < 1e-9);
        assert!((t[1] - 0.4400505857).abs() < 1e-9);
    }

    #[test]
    fn walk_starts_as_point_mass() {
        let chain = ChainSpec::new(13, 1.0).unwrap();
        let p = Propagator::analytic(&chain, 0.0).unwrap();
        let dist = p.walk_distribution(7).unwrap();
        for (i, &q) in dist.iter().enumerate() {
            let want = if i == 6 { 1.0 } else { 0.0 };
            assert!((q - want).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_from_center_is_mirror_symmetric() {
        let chain = ChainSpec::new(13, 1.0).unwrap();
        for &t in &[0.9, 2.3, 3.25, 5.1] {
            let p = Propagator::analytic(&chain, t).unwrap();
            let dist = p.walk_distribution(7).unwrap();
            let total: f64 = dist.iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
            for l in 0..13 {
                assert!((dist[l] - dist[12 - l]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn walk_reaches_ends_at_quarter_period() {
        // N=13 walker from the center at t = N/(4J): the two end sites hold
        // the largest probabilities of the whole distribution and are exactly
        // equal by reflection symmetry. Scanning t in [0, 6] puts the
        // end-site probability at this time within a factor ~2 of its later
        // window maximum (0.1505 here vs 0.3180 at t = 4.10).
        let chain = ChainSpec::new(13, 1.0).unwrap();
        let p = Propagator::analytic(&chain, 3.25).unwrap();
        let dist = p.walk_distribution(7).unwrap();
        assert!((dist[0] - dist[12]).abs() < 1e-12);
        assert!((dist[0] - 0.1505067937).abs() < 1e-6);
        for l in 1..12 {
            assert!(dist[0] > dist[l], "site {} beats the ends", l + 1);
        }
        let mut window_max = 0.0f64;
        for i in 0..=600 {
            let t = 6.0 * i as f64 / 600.0;
            let q = Propagator::analytic(&chain, t)
                .unwrap()
                .walk_distribution(7)
                .unwrap()[0];
            window_max = window_max.max(q);
        }
        assert!(dist[0] >= 0.45 * window_max);
    }

    #[test]
    fn rejects_bad_inputs() {
        let chain = ChainSpec::new(5, 1.0).unwrap();
        assert!(Propagator::analytic(&chain, f64::NAN).is_err());
        let p = Propagator::analytic(&chain, 1.0).unwrap();
        assert!(p.amplitude(0, 1).is_err());
        assert!(p.amplitude(1, 6).is_err());
        assert!(p.walk_distribution(6).is_err());
    }

    #[test]
    fn rows_are_contiguous_site_amplitudes() {
        let chain = ChainSpec::new(4, 1.0).unwrap();
        let p = Propagator::analytic(&chain, 0.8).unwrap();
        let m = p.matrix();
        let row: Array1<C64> = m.row(1).to_owned();
        for l in 1..=4 {
            assert_eq!(row[l - 1], p.amplitude(2, l).unwrap());
        }
    }
}
