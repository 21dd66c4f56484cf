//! Two-qubit entanglement and teleportation measures.
//!
//! Concurrence follows the Wootters construction. Instead of the
//! non-Hermitian product `rho rho~`, the eigenvalues are taken from the
//! Hermitian congruence `sqrt(rho) rho~ sqrt(rho)`, which has the same
//! spectrum and keeps every step inside real symmetric eigensolvers via the
//! 8x8 real embedding of Hermitian 4x4 matrices.
//!
//! The fully entangled fraction is the largest eigenvalue of the real part
//! of the density matrix written in the magic basis: the maximally entangled
//! states are exactly the real unit vectors in that basis, so the
//! maximization over them is a symmetric eigenvalue problem.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_sym, embed_hermitian4};
use crate::rdm::TwoSpinDensityMatrix;

/// How far below zero an eigenvalue of a density matrix may fall before the
/// state is rejected instead of clamped.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Eigenvalues below this are treated as exact zeros before square roots.
///
/// Every matrix this applies to is built from a validated unit-trace state,
/// so its spectrum lives in `[0, 1]` and anything this small is rounding
/// noise; letting it through would surface as ~1e-8 after a square root.
const EIGEN_DUST: f64 = 1e-13;

/// All derived measures at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub time: f64,
    pub concurrence: f64,
    /// Fully entangled fraction, in `[1/4, 1]` for valid states.
    pub fef: f64,
    /// Average teleportation fidelity `(2 fef + 1) / 3`.
    pub fidelity: f64,
}

impl EntanglementReport {
    /// Teleportation beats the classical channel iff `fef > 1/2`.
    pub fn distillable(&self) -> bool {
        self.fef > 0.5
    }
}

fn validate(rho: &TwoSpinDensityMatrix) -> Result<()> {
    let trace = rho.trace();
    if (trace - 1.0).norm() > 1e-8 {
        return Err(Error::invalid(format!(
            "density matrix trace {trace} is not 1"
        )));
    }
    if rho.hermiticity_defect() > 1e-8 {
        return Err(Error::invalid(format!(
            "density matrix is not Hermitian (defect {})",
            rho.hermiticity_defect()
        )));
    }
    Ok(())
}

/// Eigenvalues of the embedded Hermitian matrix come out doubled; every
/// even index is one eigenvalue of the 4x4 original, ascending.
fn spectrum4(embedded: &Array2<f64>) -> Result<[f64; 4]> {
    let eig = eigen_sym(embedded)?;
    Ok([eig.values[0], eig.values[2], eig.values[4], eig.values[6]])
}

/// Embedded `sqrt(rho)`, clamping eigenvalue dust at zero. Fails with
/// [`Error::NotPositive`] if an eigenvalue is materially negative.
fn embedded_sqrt(rho: &TwoSpinDensityMatrix) -> Result<Array2<f64>> {
    let eig = eigen_sym(&embed_hermitian4(rho.entries()))?;
    if eig.values[0] < -PSD_TOLERANCE {
        return Err(Error::NotPositive(eig.values[0]));
    }
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for (m, col) in scaled.columns_mut().into_iter().enumerate() {
        let root = if eig.values[m] > EIGEN_DUST { eig.values[m].sqrt() } else { 0.0 };
        for x in col {
            *x *= root;
        }
    }
    Ok(scaled.dot(&v.t()))
}

/// Spin-flipped state `(sy x sy) rho* (sy x sy)`.
///
/// `sy x sy` is the antidiagonal `(-1, 1, 1, -1)`, so the flip is an index
/// reversal with signs.
fn spin_flipped(rho: &TwoSpinDensityMatrix) -> [[C64; 4]; 4] {
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = SIGN[i] * SIGN[j] * rho.entry(3 - i, 3 - j).conj();
        }
    }
    out
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)` with `l` the descending
/// square roots of the eigenvalues of `sqrt(rho) rho~ sqrt(rho)`.
pub fn concurrence(rho: &TwoSpinDensityMatrix) -> Result<f64> {
    validate(rho)?;
    let root = embedded_sqrt(rho)?;
    let tilde = embed_hermitian4(&spin_flipped(rho));
    let product = root.dot(&tilde).dot(&root);
    let mut lambdas = spectrum4(&product)?;
    // The congruence is positive semidefinite up to rounding. For states of
    // zero concurrence the whole product can be rounding noise, so the dust
    // floor must not scale with its own largest eigenvalue.
    for l in &mut lambdas {
        *l = if *l > EIGEN_DUST { l.sqrt() } else { 0.0 };
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Magic basis columns in the computational basis `{uu, ud, du, dd}`.
const MAGIC: [[C64; 4]; 4] = {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    const Z: C64 = C64::new(0.0, 0.0);
    [
        [C64::new(R, 0.0), Z, Z, C64::new(R, 0.0)],
        [C64::new(0.0, R), Z, Z, C64::new(0.0, -R)],
        [Z, C64::new(0.0, R), C64::new(0.0, R), Z],
        [Z, C64::new(R, 0.0), C64::new(-R, 0.0), Z],
    ]
};

/// Largest overlap `<e|rho|e>` over maximally entangled states `|e>`.
pub fn fully_entangled_fraction(rho: &TwoSpinDensityMatrix) -> Result<f64> {
    validate(rho)?;
    // Reject non-states on the same footing as the concurrence path.
    let eig = eigen_sym(&embed_hermitian4(rho.entries()))?;
    if eig.values[0] < -PSD_TOLERANCE {
        return Err(Error::NotPositive(eig.values[0]));
    }
    let mut real_part = Array2::<f64>::zeros((4, 4));
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    acc += MAGIC[a][i].conj() * rho.entry(i, j) * MAGIC[b][j];
                }
            }
            real_part[[a, b]] = acc.re;
        }
    }
    // Symmetrize away rounding so the Jacobi solver sees an exact input.
    let sym = 0.5 * (&real_part + &real_part.t());
    let eig = eigen_sym(&sym)?;
    Ok(eig.values[3])
}

/// Average teleportation fidelity of the standard protocol.
pub fn teleportation_fidelity(fef: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&fef) {
        return Err(Error::invalid(format!(
            "fully entangled fraction {fef} outside [0, 1]"
        )));
    }
    Ok((2.0 * fef + 1.0) / 3.0)
}

/// Evaluate every measure on one state.
pub fn measure(rho: &TwoSpinDensityMatrix) -> Result<EntanglementReport> {
    let concurrence = concurrence(rho)?;
    let fef = fully_entangled_fraction(rho)?;
    Ok(EntanglementReport {
        time: rho.time(),
        concurrence,
        fef,
        fidelity: teleportation_fidelity(fef)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BellPairStateSpec, ChainSpec};
    use crate::oracle::fef_brute_force;
    use crate::propagator::Propagator;
    use crate::rdm::rdm_bell;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn from_entries(entries: [[C64; 4]; 4]) -> TwoSpinDensityMatrix {
        TwoSpinDensityMatrix::from_entries(entries, 0.0)
    }

    fn pure(v: [C64; 4]) -> TwoSpinDensityMatrix {
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = v[i] * v[j].conj();
            }
        }
        from_entries(entries)
    }

    fn werner(p: f64) -> TwoSpinDensityMatrix {
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = c(0.25 * (1.0 - p), 0.0);
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] += p * phi[i] * phi[j].conj();
            }
        }
        from_entries(entries)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> TwoSpinDensityMatrix {
        // Wishart draw: G G+ normalized to unit trace.
        let mut g = [[c(0.0, 0.0); 4]; 4];
        for row in &mut g {
            for slot in row.iter_mut() {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                *slot = c(re, im);
            }
        }
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    entries[i][j] += g[i][k] * g[j][k].conj();
                }
            }
        }
        let trace: f64 = (0..4).map(|i| entries[i][i].re).sum();
        for row in &mut entries {
            for slot in row.iter_mut() {
                *slot /= trace;
            }
        }
        from_entries(entries)
    }

    fn su2(rng: &mut ChaCha8Rng) -> [[C64; 2]; 2] {
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        let b = rng.random_range(0.0..std::f64::consts::PI);
        let g = rng.random_range(0.0..std::f64::consts::TAU);
        let (cb, sb) = ((0.5 * b).cos(), (0.5 * b).sin());
        let ea = C64::from_polar(1.0, -0.5 * a);
        let eg = C64::from_polar(1.0, -0.5 * g);
        [
            [ea * eg * cb, -ea * eg.conj() * sb],
            [ea.conj() * eg * sb, ea.conj() * eg.conj() * cb],
        ]
    }

    fn rotate(rho: &TwoSpinDensityMatrix, u: [[C64; 2]; 2], v: [[C64; 2]; 2]) -> TwoSpinDensityMatrix {
        let mut w = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                w[i][j] = u[i >> 1][j >> 1] * v[i & 1][j & 1];
            }
        }
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = c(0.0, 0.0);
                for k in 0..4 {
                    for l in 0..4 {
                        acc += w[i][k] * rho.entry(k, l) * w[j][l].conj();
                    }
                }
                out[i][j] = acc;
            }
        }
        from_entries(out)
    }

    /// Closed-form concurrence of a state with only diagonal entries and the
    /// (1,2) / (0,3) coherences.
    fn x_state_concurrence(rho: &TwoSpinDensityMatrix) -> f64 {
        let d: Vec<f64> = (0..4).map(|i| rho.entry(i, i).re).collect();
        let inner = rho.entry(1, 2).norm() - (d[0] * d[3]).sqrt();
        let outer = rho.entry(0, 3).norm() - (d[1] * d[2]).sqrt();
        2.0 * inner.max(outer).max(0.0)
    }

    #[test]
    fn singlet_is_maximally_entangled() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho = pure([c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)]);
        let report = measure(&rho).unwrap();
        assert!((report.concurrence - 1.0).abs() < 1e-10);
        assert!((report.fef - 1.0).abs() < 1e-10);
        assert!((report.fidelity - 1.0).abs() < 1e-10);
        assert!(report.distillable());
    }

    #[test]
    fn product_state_benchmarks() {
        let rho = pure([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let report = measure(&rho).unwrap();
        assert!(report.concurrence.abs() < 1e-10);
        // fef sits exactly on the 1/2 boundary, so distillable() is left to
        // rounding here; the value itself is what matters.
        assert!((report.fef - 0.5).abs() < 1e-10);
        assert!((report.fidelity - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_state_benchmarks() {
        let report = measure(&werner(0.0)).unwrap();
        assert!(report.concurrence.abs() < 1e-10);
        assert!((report.fef - 0.25).abs() < 1e-10);
        assert!((report.fidelity - 0.5).abs() < 1e-10);
        assert!(!report.distillable());
    }

    #[test]
    fn werner_family_closed_forms() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let rho = werner(p);
            let want_c = ((3.0 * p - 1.0) / 2.0).max(0.0);
            let want_f = (3.0 * p + 1.0) / 4.0;
            let got_c = concurrence(&rho).unwrap();
            let got_f = fully_entangled_fraction(&rho).unwrap();
            assert!((got_c - want_c).abs() < 1e-9, "p={p}: C {got_c} vs {want_c}");
            assert!((got_f - want_f).abs() < 1e-9, "p={p}: f {got_f} vs {want_f}");
        }
    }

    #[test]
    fn rank_two_bell_mixture_sits_on_the_concurrence_edge() {
        // Equal mixture of two Bell states: lambdas (1/2, 1/2, 0, 0).
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)];
        let psi = [c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)];
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = 0.5 * (phi[i] * phi[j].conj() + psi[i] * psi[j].conj());
            }
        }
        let report = measure(&from_entries(entries)).unwrap();
        assert!(report.concurrence.abs() < 1e-10);
        assert!((report.fef - 0.5).abs() < 1e-10);
    }

    #[test]
    fn random_states_match_the_brute_force_maximization() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..25 {
            let rho = random_state(&mut rng);
            let fef = fully_entangled_fraction(&rho).unwrap();
            assert!(fef >= 0.25 - 1e-12, "trial {trial}");
            let brute = fef_brute_force(rho.entries());
            assert!(
                (fef - brute).abs() < 1e-6,
                "trial {trial}: magic {fef} vs brute {brute}"
            );
            let conc = concurrence(&rho).unwrap();
            assert!((-1e-12..=1.0 + 1e-12).contains(&conc));
        }
    }

    #[test]
    fn measures_are_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let rho = random_state(&mut rng);
            let rotated = rotate(&rho, su2(&mut rng), su2(&mut rng));
            let a = measure(&rho).unwrap();
            let b = measure(&rotated).unwrap();
            assert!((a.concurrence - b.concurrence).abs() < 1e-10);
            assert!((a.fef - b.fef).abs() < 1e-10);
        }
    }

    #[test]
    fn x_states_match_their_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        // Synthetic X states with a PSD-safe coherence scale.
        for _ in 0..40 {
            let mut d: Vec<f64> = (0..4)
                .map(|_| {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    x * x
                })
                .collect();
            let total: f64 = d.iter().sum();
            for x in &mut d {
                *x /= total;
            }
            let scale = rng.random_range(0.0..1.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let coherence = C64::from_polar(scale * (d[1] * d[2]).sqrt(), phase);
            let mut entries = [[c(0.0, 0.0); 4]; 4];
            for i in 0..4 {
                entries[i][i] = c(d[i], 0.0);
            }
            entries[1][2] = coherence;
            entries[2][1] = coherence.conj();
            let rho = from_entries(entries);
            let got = concurrence(&rho).unwrap();
            let want = x_state_concurrence(&rho);
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
            if got == 0.0 {
                let fef = fully_entangled_fraction(&rho).unwrap();
                assert!(fef <= 0.5 + 1e-9, "separable X state with fef {fef}");
            }
        }
        // And the physical ones from the Bell-pair chain.
        for &(n, t) in &[(4usize, 0.8), (6, 1.7), (10, 2.9)] {
            let prop = Propagator::analytic(&ChainSpec::new(n, 1.0).unwrap(), t).unwrap();
            let rho = rdm_bell(&BellPairStateSpec::new(n / 2).unwrap(), &prop).unwrap();
            let got = concurrence(&rho).unwrap();
            let want = x_state_concurrence(&rho);
            assert!((got - want).abs() < 1e-10, "n={n} t={t}");
        }
    }

    #[test]
    fn rejects_non_states() {
        // Wrong trace.
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = c(0.5, 0.0);
        }
        assert!(concurrence(&from_entries(entries)).is_err());

        // Non-Hermitian.
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        entries[0][1] = c(0.1, 0.0);
        assert!(fully_entangled_fraction(&from_entries(entries)).is_err());

        // Negative eigenvalue beyond the clamp.
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        entries[0][0] = c(0.6, 0.0);
        entries[1][1] = c(0.4, 0.0);
        entries[2][2] = c(-1e-6, 0.0);
        entries[3][3] = c(1e-6, 0.0);
        match concurrence(&from_entries(entries)) {
            Err(Error::NotPositive(v)) => assert!(v < -1e-7),
            other => panic!("expected NotPositive, got {other:?}"),
        }

        assert!(teleportation_fidelity(1.5).is_err());
        assert!(teleportation_fidelity(-0.2).is_err());
    }

    #[test]
    fn eigenvalue_dust_is_clamped_not_rejected() {
        let mut entries = [[c(0.0, 0.0); 4]; 4];
        entries[0][0] = c(0.5, 0.0);
        entries[1][1] = c(0.5, 0.0);
        entries[2][2] = c(-1e-9, 0.0);
        entries[3][3] = c(1e-9, 0.0);
        let rho = from_entries(entries);
        assert!(concurrence(&rho).unwrap() >= 0.0);
        assert!(fully_entangled_fraction(&rho).unwrap() >= 0.25 - 1e-12);
    }
}
