//! Chain geometry, coupling profiles, and initial-state specifications.
//!
//! The chain is an open row of `N` spin-1/2 sites, indexed 1..=N in every
//! public signature. Product states are specified per site by a polar angle
//! theta_k: the site state is cos(theta_k/2)|up> + sin(theta_k/2)|down>.
//! The canted family sets theta_k = (k-1) alpha, so alpha = 0 is the fully
//! polarized state, alpha = pi the Neel state.
//!
//! Bell-pair states are chains of disjoint singlets (|up down> - |down up>)
//! / sqrt(2) on sites (1,2), (3,4), ..., and statistical mixtures carry a
//! normalized weight per product-state component.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::compensated_sum;

/// Uniform open chain: `n_sites` spins with nearest-neighbor coupling `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    coupling: f64,
}

impl ChainSpec {
    /// A chain needs at least two sites and a positive, finite coupling.
    pub fn new(n_sites: usize, coupling: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid(format!(
                "chain needs >= 2 sites, got {n_sites}"
            )));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::invalid(format!(
                "coupling must be positive and finite, got {coupling}"
            )));
        }
        Ok(ChainSpec { n_sites, coupling })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// The uniform bond list (J, J, ..., J) of length `n_sites - 1`.
    pub fn uniform_profile(&self) -> CouplingProfile {
        CouplingProfile {
            bonds: vec![self.coupling; self.n_sites - 1],
        }
    }
}

/// Per-bond couplings J_1..J_{N-1} of an open chain.
///
/// Bonds may be zero (a severed chain is a valid hopping problem) but must
/// be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    bonds: Vec<f64>,
}

impl CouplingProfile {
    pub fn new(bonds: Vec<f64>) -> Result<Self> {
        if bonds.is_empty() {
            return Err(Error::invalid("coupling profile needs >= 1 bond"));
        }
        if let Some(bad) = bonds.iter().find(|b| !b.is_finite()) {
            return Err(Error::invalid(format!("non-finite bond value {bad}")));
        }
        Ok(CouplingProfile { bonds })
    }

    pub fn bonds(&self) -> &[f64] {
        &self.bonds
    }

    pub fn n_sites(&self) -> usize {
        self.bonds.len() + 1
    }
}

/// Draws a disordered profile J_k = J (1 + d_k), d_k ~ N(0, delta^2).
///
/// The generator is ChaCha8 seeded with `seed`, so a profile is a pure
/// function of `(chain, delta, seed)` on every platform. `delta = 0`
/// returns the uniform profile without constructing a generator at all.
pub fn gaussian_couplings(chain: &ChainSpec, delta: f64, seed: u64) -> Result<CouplingProfile> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!(
            "disorder strength must be >= 0 and finite, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(chain.uniform_profile());
    }
    let normal = Normal::new(0.0, delta).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = chain.coupling();
    let bonds = (0..chain.n_sites() - 1)
        .map(|_| j * (1.0 + normal.sample(&mut rng)))
        .collect();
    CouplingProfile::new(bonds)
}

/// Site-by-site product state, one polar angle per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStateSpec {
    angles: Vec<f64>,
}

impl ProductStateSpec {
    /// Any finite angle list of length >= 2 is a valid product state.
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::invalid(format!(
                "product state needs >= 2 sites, got {}",
                angles.len()
            )));
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("non-finite angle {bad}")));
        }
        Ok(ProductStateSpec { angles })
    }

    /// Canted family theta_k = (k-1) alpha with alpha in [0, 2 pi].
    pub fn canted(n_sites: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && (0.0..=std::f64::consts::TAU).contains(&alpha)) {
            return Err(Error::invalid(format!(
                "canting angle must lie in [0, 2 pi], got {alpha}"
            )));
        }
        Self::from_angles((0..n_sites).map(|k| k as f64 * alpha).collect())
    }

    /// The Neel state: the canted family at alpha = pi.
    pub fn neel(n_sites: usize) -> Result<Self> {
        Self::canted(n_sites, std::f64::consts::PI)
    }

    /// The state with the spin at `site` (1-based) flipped by sigma^x,
    /// i.e. theta -> pi - theta reduced into [0, 2 pi).
    pub fn flipped(&self, site: usize) -> Result<Self> {
        if site == 0 || site > self.n_sites() {
            return Err(Error::invalid(format!(
                "flip site {site} outside 1..={}",
                self.n_sites()
            )));
        }
        let mut angles = self.angles.clone();
        angles[site - 1] = (std::f64::consts::PI - angles[site - 1]).rem_euclid(std::f64::consts::TAU);
        Ok(ProductStateSpec { angles })
    }

    pub fn n_sites(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// <sigma^z> at `site` (1-based): cos theta.
    pub fn sz_expectation(&self, site: usize) -> Result<f64> {
        self.angle_at(site).map(f64::cos)
    }

    /// <sigma^x> at `site` (1-based): sin theta.
    pub fn sx_expectation(&self, site: usize) -> Result<f64> {
        self.angle_at(site).map(f64::sin)
    }

    fn angle_at(&self, site: usize) -> Result<f64> {
        if site == 0 || site > self.n_sites() {
            return Err(Error::invalid(format!(
                "site {site} outside 1..={}",
                self.n_sites()
            )));
        }
        Ok(self.angles[site - 1])
    }
}

/// `n_pairs` disjoint singlets on sites (1,2), (3,4), ...; N = 2 n_pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellPairStateSpec {
    n_pairs: usize,
}

impl BellPairStateSpec {
    pub fn new(n_pairs: usize) -> Result<Self> {
        if n_pairs == 0 {
            return Err(Error::invalid("bell-pair state needs >= 1 pair"));
        }
        Ok(BellPairStateSpec { n_pairs })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_pairs
    }
}

/// Statistical mixture of product states with normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    weights: Vec<f64>,
    components: Vec<ProductStateSpec>,
}

impl MixtureSpec {
    /// Weights must be nonnegative with a positive total; they are
    /// normalized on construction (compensated total, so the stored weights
    /// sum to 1 up to one rounding). All components must share one size.
    pub fn new(components: Vec<(f64, ProductStateSpec)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture needs >= 1 component"));
        }
        let n = components[0].1.n_sites();
        for (w, state) in &components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::invalid(format!("mixture weight {w} is negative or non-finite")));
            }
            if state.n_sites() != n {
                return Err(Error::invalid(format!(
                    "mixture components disagree on size: {} vs {n}",
                    state.n_sites()
                )));
            }
        }
        let total = compensated_sum(components.iter().map(|(w, _)| *w));
        if total <= 0.0 {
            return Err(Error::invalid("mixture weights sum to zero"));
        }
        let (weights, components) = components
            .into_iter()
            .map(|(w, s)| (w / total, s))
            .unzip();
        Ok(MixtureSpec { weights, components })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ProductStateSpec] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.components[0].n_sites()
    }
}

/// Any initial state the reduced-density-matrix builders accept.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Product(ProductStateSpec),
    BellPairs(BellPairStateSpec),
    Mixture(MixtureSpec),
}

impl InitialState {
    pub fn n_sites(&self) -> usize {
        match self {
            InitialState::Product(s) => s.n_sites(),
            InitialState::BellPairs(s) => s.n_sites(),
            InitialState::Mixture(s) => s.n_sites(),
        }
    }
}
