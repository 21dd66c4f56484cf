//! Run configuration, dispatch, and machine-readable output.
//!
//! A run is described by a JSON document, command-line flags, or both; flags
//! override file values. Every default the run fills in is written back out
//! to a JSON sidecar next to the data file, so re-feeding the sidecar as
//! `--config` reproduces the data bit for bit (randomness included: a run
//! without a seed draws one from entropy and records it).
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::analysis::{
    alpha_map, find_peak, fwhm_alpha, scaling_sweep, time_sweep, Couplings, LinearGrid,
    PeakMeasure, StateFamily,
};
use crate::disorder::{ensemble_average, AverageMode, CouplingEnsemble, FlipEnsemble};
use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::lattice::{BellPairStateSpec, ChainSpec, InitialState, ProductStateSpec};
use crate::oracle::{ed_rdm_ends, EdHamiltonian, FullState};
use crate::propagator::Propagator;
use crate::rdm::{rdm_of, TwoSpinDensityMatrix};

pub const SCHEMA_VERSION: u64 = 1;

/// Engine-versus-diagonalization deviation above this fails `oracle-check`.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "endspin",
    version,
    about = "End-spin entanglement dynamics of open XX chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandName>,

    /// JSON run configuration; flags given here override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Number of chain sites.
    #[arg(long, global = true)]
    pub n_sites: Option<usize>,

    /// Uniform coupling strength J.
    #[arg(long, global = true)]
    pub coupling: Option<f64>,

    /// Initial state kind: neel | canted | angles | bell-pairs.
    #[arg(long, global = true)]
    pub state: Option<String>,

    /// Canting angle for --state canted, in [0, 2*pi].
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Explicit per-site tilt angles for --state angles.
    #[arg(long, global = true, value_delimiter = ',')]
    pub angles: Option<Vec<f64>>,

    /// Time grid start.
    #[arg(long, global = true)]
    pub t_start: Option<f64>,

    /// Time grid stop.
    #[arg(long, global = true)]
    pub t_stop: Option<f64>,

    /// Time grid point count.
    #[arg(long, global = true)]
    pub t_count: Option<usize>,

    /// Tilt-angle grid start.
    #[arg(long, global = true)]
    pub alpha_start: Option<f64>,

    /// Tilt-angle grid stop.
    #[arg(long, global = true)]
    pub alpha_stop: Option<f64>,

    /// Tilt-angle grid point count.
    #[arg(long, global = true)]
    pub alpha_count: Option<usize>,

    /// Chain sizes for the scaling command.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,

    /// Initial-state family for the scaling command: neel | bell-pairs.
    #[arg(long, global = true)]
    pub family: Option<String>,

    /// Peak-tracking measure: fef | concurrence.
    #[arg(long, global = true)]
    pub measure: Option<String>,

    /// Per-spin flip probability for disorder-flip.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Relative coupling spread for disorder-coupling.
    #[arg(long, global = true)]
    pub delta: Option<f64>,

    /// Number of disorder realizations.
    #[arg(long, global = true)]
    pub realizations: Option<usize>,

    /// Random seed; drawn from entropy and recorded when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Ensemble averaging mode: measures | density-matrix.
    #[arg(long, global = true)]
    pub average: Option<String>,

    /// Source site for the walk command (1-based).
    #[arg(long, global = true)]
    pub site: Option<usize>,

    /// Evolution time for the walk command.
    #[arg(long, global = true)]
    pub time: Option<f64>,

    /// Output CSV path; the JSON sidecar lands next to it.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Worker thread count; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    /// Entanglement measures of the end pair along a time grid.
    TimeSweep,
    /// Measures over the full (tilt angle, time) plane.
    AlphaMap,
    /// Width of the entanglement peak across tilt angle at the optimal time.
    Fwhm,
    /// Peak location and height versus chain size.
    Scaling,
    /// Time sweep of a spin-flip--contaminated product state.
    DisorderFlip,
    /// Ensemble-averaged sweep over random coupling profiles.
    DisorderCoupling,
    /// Compare the engine against exact diagonalization.
    OracleCheck,
    /// Single-particle spreading probabilities from one site.
    Walk,
}

impl CommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandName::TimeSweep => "time-sweep",
            CommandName::AlphaMap => "alpha-map",
            CommandName::Fwhm => "fwhm",
            CommandName::Scaling => "scaling",
            CommandName::DisorderFlip => "disorder-flip",
            CommandName::DisorderCoupling => "disorder-coupling",
            CommandName::OracleCheck => "oracle-check",
            CommandName::Walk => "walk",
        }
    }

    pub fn from_str(name: &str) -> Result<Self> {
        Ok(match name {
            "time-sweep" => CommandName::TimeSweep,
            "alpha-map" => CommandName::AlphaMap,
            "fwhm" => CommandName::Fwhm,
            "scaling" => CommandName::Scaling,
            "disorder-flip" => CommandName::DisorderFlip,
            "disorder-coupling" => CommandName::DisorderCoupling,
            "oracle-check" => CommandName::OracleCheck,
            "walk" => CommandName::Walk,
            other => {
                return Err(Error::config(
                    "command",
                    format!(
                        "unknown command {other:?}; expected one of time-sweep, alpha-map, \
                         fwhm, scaling, disorder-flip, disorder-coupling, oracle-check, walk"
                    ),
                ))
            }
        })
    }
}

/// Initial-state descriptor. Accepts either a bare string (`"neel"`) or an
/// object (`{"kind": "canted", "alpha": 3.0}`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateDoc {
    pub kind: Option<String>,
    pub alpha: Option<f64>,
    pub angles: Option<Vec<f64>>,
}

impl Serialize for StateDoc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        if let Some(kind) = &self.kind {
            map.serialize_entry("kind", kind)?;
        }
        if let Some(alpha) = &self.alpha {
            map.serialize_entry("alpha", alpha)?;
        }
        if let Some(angles) = &self.angles {
            map.serialize_entry("angles", angles)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for StateDoc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = StateDoc;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a state name or an object with kind/alpha/angles")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<StateDoc, E> {
                Ok(StateDoc { kind: Some(s.to_string()), alpha: None, angles: None })
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<StateDoc, A::Error> {
                let mut doc = StateDoc::default();
                while let Some(key) = access.next_key::<String>()? {
                    match key.as_str() {
                        "kind" => doc.kind = Some(access.next_value()?),
                        "alpha" => doc.alpha = Some(access.next_value()?),
                        "angles" => doc.angles = Some(access.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(
                                other,
                                &["kind", "alpha", "angles"],
                            ))
                        }
                    }
                }
                Ok(doc)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Grid descriptor. Accepts either `[start, stop, count]` or an object with
/// any subset of those keys; missing keys fall back to command defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridDoc {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl Serialize for GridDoc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        if let Some(start) = &self.start {
            map.serialize_entry("start", start)?;
        }
        if let Some(stop) = &self.stop {
            map.serialize_entry("stop", stop)?;
        }
        if let Some(count) = &self.count {
            map.serialize_entry("count", count)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GridDoc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = GridDoc;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("[start, stop, count] or an object with those keys")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<GridDoc, A::Error> {
                let start: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let stop: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let count: usize = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<serde_json::Value>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(GridDoc { start: Some(start), stop: Some(stop), count: Some(count) })
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<GridDoc, A::Error> {
                let mut doc = GridDoc::default();
                while let Some(key) = access.next_key::<String>()? {
                    match key.as_str() {
                        "start" => doc.start = Some(access.next_value()?),
                        "stop" => doc.stop = Some(access.next_value()?),
                        "count" => doc.count = Some(access.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(
                                other,
                                &["start", "stop", "count"],
                            ))
                        }
                    }
                }
                Ok(doc)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Informational block a run writes into its sidecar. Accepted and ignored
/// when the sidecar is fed back in as a config.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Default)]
pub struct MetaDoc {
    #[serde(default)]
    pub version: String,
    #[serde(default)]
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

/// One run description; every field optional so that file and flags can
/// each contribute a part.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(alias = "N", skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(alias = "J", skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDoc>,
    #[serde(alias = "time_grid", skip_serializing_if = "Option::is_none")]
    pub t: Option<GridDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<GridDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Written by previous runs; carried but never read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<MetaDoc>,
}

impl ConfigDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConfigDoc = serde_json::from_str(text)?;
        if let Some(schema) = doc.schema {
            if schema != SCHEMA_VERSION {
                return Err(Error::config(
                    "schema",
                    format!("unsupported schema version {schema}; this build reads {SCHEMA_VERSION}"),
                ));
            }
        }
        Ok(doc)
    }

    /// Overlay command-line flags; any flag present replaces the file value.
    pub fn apply_flags(&mut self, cli: &Cli) {
        if let Some(command) = cli.command {
            self.command = Some(command.as_str().to_string());
        }
        if let Some(n) = cli.n_sites {
            self.n_sites = Some(n);
        }
        if let Some(j) = cli.coupling {
            self.coupling = Some(j);
        }
        if cli.state.is_some() || cli.alpha.is_some() || cli.angles.is_some() {
            let state = self.state.get_or_insert_with(StateDoc::default);
            if let Some(kind) = &cli.state {
                state.kind = Some(kind.clone());
            }
            if let Some(alpha) = cli.alpha {
                state.alpha = Some(alpha);
            }
            if let Some(angles) = &cli.angles {
                state.angles = Some(angles.clone());
            }
        }
        if cli.t_start.is_some() || cli.t_stop.is_some() || cli.t_count.is_some() {
            let grid = self.t.get_or_insert_with(GridDoc::default);
            if let Some(x) = cli.t_start {
                grid.start = Some(x);
            }
            if let Some(x) = cli.t_stop {
                grid.stop = Some(x);
            }
            if let Some(x) = cli.t_count {
                grid.count = Some(x);
            }
        }
        if cli.alpha_start.is_some() || cli.alpha_stop.is_some() || cli.alpha_count.is_some() {
            let grid = self.alpha_grid.get_or_insert_with(GridDoc::default);
            if let Some(x) = cli.alpha_start {
                grid.start = Some(x);
            }
            if let Some(x) = cli.alpha_stop {
                grid.stop = Some(x);
            }
            if let Some(x) = cli.alpha_count {
                grid.count = Some(x);
            }
        }
        if let Some(sizes) = &cli.sizes {
            self.sizes = Some(sizes.clone());
        }
        if let Some(x) = &cli.family {
            self.family = Some(x.clone());
        }
        if let Some(x) = &cli.measure {
            self.measure = Some(x.clone());
        }
        if let Some(x) = cli.epsilon {
            self.epsilon = Some(x);
        }
        if let Some(x) = cli.delta {
            self.delta = Some(x);
        }
        if let Some(x) = cli.realizations {
            self.realizations = Some(x);
        }
        if let Some(x) = cli.seed {
            self.seed = Some(x);
        }
        if let Some(x) = &cli.average {
            self.average = Some(x.clone());
        }
        if let Some(x) = cli.site {
            self.site = Some(x);
        }
        if let Some(x) = cli.time {
            self.time = Some(x);
        }
        if let Some(x) = &cli.output {
            self.output = Some(x.clone());
        }
        if let Some(x) = cli.threads {
            self.threads = Some(x);
        }
    }
}

/// Everything a run needs, fully validated, plus the resolved document that
/// reproduces it.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: ResolvedCommand,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Input document with every applied default filled in.
    pub resolved: ConfigDoc,
}

#[derive(Debug, Clone)]
pub enum ResolvedCommand {
    TimeSweep {
        chain: ChainSpec,
        init: InitialState,
        time_grid: LinearGrid,
    },
    AlphaMap {
        chain: ChainSpec,
        alpha_grid: LinearGrid,
        time_grid: LinearGrid,
    },
    Fwhm {
        chain: ChainSpec,
        alpha_grid: LinearGrid,
        time_grid: LinearGrid,
        measure: PeakMeasure,
    },
    Scaling {
        sizes: Vec<usize>,
        family: StateFamily,
        coupling: f64,
        measure: PeakMeasure,
    },
    DisorderFlip {
        chain: ChainSpec,
        base: ProductStateSpec,
        epsilon: f64,
        time_grid: LinearGrid,
    },
    DisorderCoupling {
        chain: ChainSpec,
        init: InitialState,
        ensemble: CouplingEnsemble,
        mode: AverageMode,
        time_grid: LinearGrid,
    },
    OracleCheck,
    Walk {
        chain: ChainSpec,
        site: usize,
        time: f64,
    },
}

fn require<T>(value: Option<T>, path: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(path, "required but not set"))
}

fn parse_measure(name: Option<&str>) -> Result<PeakMeasure> {
    match name.unwrap_or("fef") {
        "fef" => Ok(PeakMeasure::Fef),
        "concurrence" => Ok(PeakMeasure::Concurrence),
        other => Err(Error::config(
            "measure",
            format!("unknown measure {other:?}; expected fef or concurrence"),
        )),
    }
}

fn parse_average(name: Option<&str>) -> Result<AverageMode> {
    match name.unwrap_or("measures") {
        "measures" => Ok(AverageMode::Measures),
        "density-matrix" => Ok(AverageMode::DensityMatrix),
        other => Err(Error::config(
            "average",
            format!("unknown averaging mode {other:?}; expected measures or density-matrix"),
        )),
    }
}

fn parse_family(name: &str) -> Result<StateFamily> {
    match name {
        "neel" => Ok(StateFamily::Neel),
        "bell-pairs" => Ok(StateFamily::BellPairs),
        other => Err(Error::config(
            "family",
            format!("unknown family {other:?}; expected neel or bell-pairs"),
        )),
    }
}

/// Build the initial state named by a state document. Canting angles must
/// lie in `[0, 2 pi]`; `product_only` rejects Bell pairs (spin flips need a
/// definite local spin to flip).
fn resolve_state(doc: &StateDoc, n_sites: usize, product_only: bool) -> Result<InitialState> {
    let kind = require(doc.kind.as_deref(), "state.kind")?;
    match kind {
        "neel" => Ok(InitialState::Product(
            ProductStateSpec::neel(n_sites)
                .map_err(|e| Error::config("chain.n_sites", e.to_string()))?,
        )),
        "canted" => {
            let alpha = require(doc.alpha, "state.alpha")?;
            if !(0.0..=std::f64::consts::TAU).contains(&alpha) {
                return Err(Error::config(
                    "state.alpha",
                    format!("{alpha} outside the admissible range [0, 2*pi]"),
                ));
            }
            Ok(InitialState::Product(
                ProductStateSpec::canted(n_sites, alpha)
                    .map_err(|e| Error::config("state.alpha", e.to_string()))?,
            ))
        }
        "angles" => {
            let angles = require(doc.angles.clone(), "state.angles")?;
            if angles.len() != n_sites {
                return Err(Error::config(
                    "state.angles",
                    format!("{} angles given for {} sites", angles.len(), n_sites),
                ));
            }
            Ok(InitialState::Product(
                ProductStateSpec::from_angles(angles)
                    .map_err(|e| Error::config("state.angles", e.to_string()))?,
            ))
        }
        "bell-pairs" => {
            if product_only {
                return Err(Error::config(
                    "state.kind",
                    "flip disorder needs a product state (neel, canted, or angles)",
                ));
            }
            if n_sites % 2 != 0 {
                return Err(Error::config(
                    "chain.n_sites",
                    format!("bell-pairs requires an even number of sites, got {n_sites}"),
                ));
            }
            Ok(InitialState::BellPairs(
                BellPairStateSpec::new(n_sites / 2)
                    .map_err(|e| Error::config("chain.n_sites", e.to_string()))?,
            ))
        }
        other => Err(Error::config(
            "state.kind",
            format!("unknown state {other:?}; expected neel, canted, angles, or bell-pairs"),
        )),
    }
}

/// Fill a grid document's gaps from defaults and build the grid.
fn resolve_grid(doc: Option<GridDoc>, default: (f64, f64, usize), path: &str) -> Result<(LinearGrid, GridDoc)> {
    let doc = doc.unwrap_or_default();
    let start = doc.start.unwrap_or(default.0);
    let stop = doc.stop.unwrap_or(default.1);
    let count = doc.count.unwrap_or(default.2);
    let grid = LinearGrid::new(start, stop, count)
        .map_err(|e| Error::config(path, e.to_string()))?;
    let filled = GridDoc { start: Some(start), stop: Some(stop), count: Some(count) };
    Ok((grid, filled))
}

/// Validate a merged document into a runnable configuration, recording every
/// default it applies back into the returned document.
pub fn resolve(doc: ConfigDoc) -> Result<RunConfig> {
    let mut resolved = doc;
    resolved.schema = Some(SCHEMA_VERSION);
    resolved.meta = None;
    let command = CommandName::from_str(require(resolved.command.as_deref(), "command")?)?;
    resolved.command = Some(command.as_str().to_string());

    let coupling = resolved.coupling.unwrap_or(1.0);
    if !coupling.is_finite() || coupling <= 0.0 {
        return Err(Error::config(
            "coupling",
            format!("{coupling} must be positive and finite"),
        ));
    }

    // Commands built around one chain share this resolution path.
    let chain = |resolved: &mut ConfigDoc| -> Result<ChainSpec> {
        let n = require(resolved.n_sites, "n_sites")?;
        let chain =
            ChainSpec::new(n, coupling).map_err(|e| Error::config("n_sites", e.to_string()))?;
        resolved.coupling = Some(coupling);
        Ok(chain)
    };
    let time_default = |n: usize| (0.0, n as f64 / (2.0 * coupling), 241);
    let alpha_default = (0.0, std::f64::consts::TAU, 201);

    let command = match command {
        CommandName::TimeSweep => {
            let chain = chain(&mut resolved)?;
            let state_doc = require(resolved.state.clone(), "state")?;
            let init = resolve_state(&state_doc, chain.n_sites(), false)?;
            let (time_grid, filled) =
                resolve_grid(resolved.t, time_default(chain.n_sites()), "t")?;
            resolved.t = Some(filled);
            ResolvedCommand::TimeSweep { chain, init, time_grid }
        }
        CommandName::AlphaMap => {
            let chain = chain(&mut resolved)?;
            let (alpha_grid, filled_a) = resolve_grid(resolved.alpha_grid, alpha_default, "alpha_grid")?;
            let (time_grid, filled_t) =
                resolve_grid(resolved.t, time_default(chain.n_sites()), "t")?;
            resolved.alpha_grid = Some(filled_a);
            resolved.t = Some(filled_t);
            ResolvedCommand::AlphaMap { chain, alpha_grid, time_grid }
        }
        CommandName::Fwhm => {
            let chain = chain(&mut resolved)?;
            let (alpha_grid, filled_a) = resolve_grid(resolved.alpha_grid, alpha_default, "alpha_grid")?;
            let (time_grid, filled_t) =
                resolve_grid(resolved.t, time_default(chain.n_sites()), "t")?;
            let measure = parse_measure(resolved.measure.as_deref())?;
            resolved.alpha_grid = Some(filled_a);
            resolved.t = Some(filled_t);
            resolved.measure =
                Some(if measure == PeakMeasure::Fef { "fef" } else { "concurrence" }.to_string());
            ResolvedCommand::Fwhm { chain, alpha_grid, time_grid, measure }
        }
        CommandName::Scaling => {
            let sizes = require(resolved.sizes.clone(), "sizes")?;
            if sizes.is_empty() {
                return Err(Error::config("sizes", "needs at least one chain size"));
            }
            let family = parse_family(require(resolved.family.as_deref(), "family")?)?;
            if family == StateFamily::BellPairs {
                if let Some(odd) = sizes.iter().find(|n| *n % 2 != 0) {
                    return Err(Error::config(
                        "sizes",
                        format!("bell-pairs requires even sizes, got {odd}"),
                    ));
                }
            }
            let measure = parse_measure(resolved.measure.as_deref())?;
            resolved.coupling = Some(coupling);
            resolved.measure =
                Some(if measure == PeakMeasure::Fef { "fef" } else { "concurrence" }.to_string());
            ResolvedCommand::Scaling { sizes, family, coupling, measure }
        }
        CommandName::DisorderFlip => {
            let chain = chain(&mut resolved)?;
            let state_doc = require(resolved.state.clone(), "state")?;
            let init = resolve_state(&state_doc, chain.n_sites(), true)?;
            let InitialState::Product(base) = init else {
                unreachable!("product_only resolution returned a non-product state");
            };
            let epsilon = require(resolved.epsilon, "epsilon")?;
            // Validate eagerly for a config-stage error with a key path.
            FlipEnsemble::new(base.clone(), epsilon)
                .map_err(|e| Error::config("epsilon", e.to_string()))?;
            let (time_grid, filled) =
                resolve_grid(resolved.t, time_default(chain.n_sites()), "t")?;
            resolved.t = Some(filled);
            ResolvedCommand::DisorderFlip { chain, base, epsilon, time_grid }
        }
        CommandName::DisorderCoupling => {
            let chain = chain(&mut resolved)?;
            let state_doc = require(resolved.state.clone(), "state")?;
            let init = resolve_state(&state_doc, chain.n_sites(), false)?;
            let delta = require(resolved.delta, "delta")?;
            let realizations = resolved.realizations.unwrap_or(100);
            let seed = resolved.seed.unwrap_or_else(rand::random::<u64>);
            let ensemble = CouplingEnsemble::new(delta, realizations, seed)
                .map_err(|e| Error::config("delta", e.to_string()))?;
            let mode = parse_average(resolved.average.as_deref())?;
            let (time_grid, filled) =
                resolve_grid(resolved.t, time_default(chain.n_sites()), "t")?;
            resolved.t = Some(filled);
            resolved.realizations = Some(realizations);
            resolved.seed = Some(seed);
            resolved.average = Some(
                if mode == AverageMode::Measures { "measures" } else { "density-matrix" }
                    .to_string(),
            );
            ResolvedCommand::DisorderCoupling { chain, init, ensemble, mode, time_grid }
        }
        CommandName::OracleCheck => ResolvedCommand::OracleCheck,
        CommandName::Walk => {
            let chain = chain(&mut resolved)?;
            let site = require(resolved.site, "site")?;
            if site < 1 || site > chain.n_sites() {
                return Err(Error::config(
                    "site",
                    format!("site {site} outside the chain 1..={}", chain.n_sites()),
                ));
            }
            let time = require(resolved.time, "time")?;
            if !time.is_finite() {
                return Err(Error::config("time", "must be finite"));
            }
            ResolvedCommand::Walk { chain, site, time }
        }
    };

    let output = resolved.output.clone();
    if output.is_none() && !matches!(command, ResolvedCommand::OracleCheck) {
        return Err(Error::config("output", "required but not set"));
    }

    Ok(RunConfig { command, output, threads: resolved.threads, resolved })
}

/// What a finished run hands back to `main`.
#[derive(Debug)]
pub struct RunOutcome {
    /// Human-readable result lines, printed to stdout.
    pub lines: Vec<String>,
    /// Key results recorded into the sidecar.
    pub summary: serde_json::Map<String, serde_json::Value>,
    /// False only when oracle-check measured a deviation at or above
    /// tolerance.
    pub passed: bool,
}

fn fmt(x: f64) -> String {
    // 17 significant digits: doubles survive the round trip.
    format!("{x:.16e}")
}

fn report_row(out: &mut String, prefix: &str, report: &EntanglementReport) {
    let _ = writeln!(
        out,
        "{prefix}{},{},{},{}",
        fmt(report.concurrence),
        fmt(report.fef),
        fmt(report.fidelity),
        u8::from(report.distillable())
    );
}

fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn peak_to_json(n_sites: Option<usize>, peak: &crate::analysis::PeakSummary) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    if let Some(n) = n_sites {
        map.insert("n_sites".into(), n.into());
    }
    map.insert("t_max".into(), json_f64(peak.t_max));
    map.insert("value".into(), json_f64(peak.value));
    map.insert("concurrence".into(), json_f64(peak.report.concurrence));
    map.insert("fef".into(), json_f64(peak.report.fef));
    map.insert("fidelity".into(), json_f64(peak.report.fidelity));
    map.insert("above_threshold".into(), peak.above_threshold.into());
    serde_json::Value::Object(map)
}

/// Run the command and render its CSV payload.
fn dispatch(config: &RunConfig) -> Result<(String, RunOutcome)> {
    let mut csv = String::new();
    let mut outcome = RunOutcome {
        lines: Vec::new(),
        summary: serde_json::Map::new(),
        passed: true,
    };

    match &config.command {
        ResolvedCommand::TimeSweep { chain, init, time_grid } => {
            let series = time_sweep(init, &Couplings::Uniform(chain.clone()), time_grid)?;
            csv.push_str("time,concurrence,fef,fidelity,distillable\n");
            for (t, report) in series.times().iter().zip(series.reports()) {
                report_row(&mut csv, &format!("{},", fmt(*t)), report);
            }
            let peak = find_peak(init, &Couplings::Uniform(chain.clone()), time_grid, PeakMeasure::Fef)?;
            outcome.lines.push(format!(
                "peak fef {:.6} at t = {:.4} (concurrence {:.6}, fidelity {:.6})",
                peak.report.fef, peak.t_max, peak.report.concurrence, peak.report.fidelity
            ));
            outcome.summary.insert("peak".into(), peak_to_json(None, &peak));
        }
        ResolvedCommand::AlphaMap { chain, alpha_grid, time_grid } => {
            let map = alpha_map(&Couplings::Uniform(chain.clone()), alpha_grid, time_grid)?;
            csv.push_str("alpha,time,concurrence,fef,fidelity,distillable\n");
            for (alpha, row) in map.alphas().iter().zip(map.rows()) {
                for (t, report) in map.times().iter().zip(row) {
                    report_row(&mut csv, &format!("{},{},", fmt(*alpha), fmt(*t)), report);
                }
            }
            outcome.lines.push(format!(
                "{} tilt angles x {} times written",
                map.alphas().len(),
                map.times().len()
            ));
        }
        ResolvedCommand::Fwhm { chain, alpha_grid, time_grid, measure } => {
            let report = fwhm_alpha(
                &Couplings::Uniform(chain.clone()),
                alpha_grid,
                time_grid,
                *measure,
            )?;
            csv.push_str("width,width_absolute,alpha_peak,peak_value,baseline,t_opt\n");
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt(report.width),
                fmt(report.width_absolute),
                fmt(report.alpha_peak),
                fmt(report.peak_value),
                fmt(report.baseline),
                fmt(report.t_opt)
            );
            outcome.lines.push(format!(
                "fwhm {:.6} above background ({:.6} absolute) at t_opt = {:.4}",
                report.width, report.width_absolute, report.t_opt
            ));
            for (key, value) in [
                ("width", report.width),
                ("width_absolute", report.width_absolute),
                ("alpha_peak", report.alpha_peak),
                ("peak_value", report.peak_value),
                ("baseline", report.baseline),
                ("t_opt", report.t_opt),
            ] {
                outcome.summary.insert(key.into(), json_f64(value));
            }
        }
        ResolvedCommand::Scaling { sizes, family, coupling, measure } => {
            let points = scaling_sweep(sizes, *family, *coupling, *measure)?;
            csv.push_str("n_sites,t_max,concurrence,fef,fidelity,distillable\n");
            let mut peaks = Vec::new();
            for point in &points {
                report_row(
                    &mut csv,
                    &format!("{},{},", point.n_sites, fmt(point.peak.t_max)),
                    &point.peak.report,
                );
                peaks.push(peak_to_json(Some(point.n_sites), &point.peak));
                outcome.lines.push(format!(
                    "N = {:3}  t_max = {:8.4}  fef = {:.6}",
                    point.n_sites, point.peak.t_max, point.peak.report.fef
                ));
            }
            if points.len() >= 2 {
                let (slope, intercept) = crate::analysis::peak_time_trend(&points)?;
                outcome.lines.push(format!(
                    "t_max trend: slope {:.6} per site (1/(4J) = {:.6}), intercept {:.4}",
                    slope,
                    1.0 / (4.0 * coupling),
                    intercept
                ));
                outcome.summary.insert("slope".into(), json_f64(slope));
                outcome.summary.insert("intercept".into(), json_f64(intercept));
            }
            outcome.summary.insert("peaks".into(), serde_json::Value::Array(peaks));
        }
        ResolvedCommand::DisorderFlip { chain, base, epsilon, time_grid } => {
            let mixture = FlipEnsemble::new(base.clone(), *epsilon)?.mixture()?;
            let init = InitialState::Mixture(mixture);
            let series = time_sweep(&init, &Couplings::Uniform(chain.clone()), time_grid)?;
            csv.push_str("time,concurrence,fef,fidelity,distillable\n");
            let mut best = 0;
            for (i, (t, report)) in series.times().iter().zip(series.reports()).enumerate() {
                report_row(&mut csv, &format!("{},", fmt(*t)), report);
                if report.fef > series.reports()[best].fef {
                    best = i;
                }
            }
            outcome.lines.push(format!(
                "flip rate {} per spin (N*eps = {:.3}): peak fef {:.6} at t = {:.4}",
                epsilon,
                *epsilon * chain.n_sites() as f64,
                series.reports()[best].fef,
                series.times()[best]
            ));
            outcome
                .summary
                .insert("peak_fef".into(), json_f64(series.reports()[best].fef));
            outcome
                .summary
                .insert("peak_time".into(), json_f64(series.times()[best]));
        }
        ResolvedCommand::DisorderCoupling { chain, init, ensemble, mode, time_grid } => {
            let times = time_grid.values();
            let curve = ensemble_average(ensemble, chain, init, &times, *mode)?;
            csv.push_str("time,concurrence,fef,fidelity,distillable\n");
            let mut best = 0;
            for (i, (t, report)) in curve.times().iter().zip(curve.mean()).enumerate() {
                report_row(&mut csv, &format!("{},", fmt(*t)), report);
                if report.fef > curve.mean()[best].fef {
                    best = i;
                }
            }
            outcome.lines.push(format!(
                "spread {} over {} realizations (seed {}): peak mean fef {:.6} at t = {:.4}",
                ensemble.delta(),
                ensemble.realizations(),
                ensemble.seed(),
                curve.mean()[best].fef,
                curve.times()[best]
            ));
            outcome
                .summary
                .insert("peak_fef".into(), json_f64(curve.mean()[best].fef));
            outcome
                .summary
                .insert("peak_time".into(), json_f64(curve.times()[best]));
        }
        ResolvedCommand::OracleCheck => {
            let (table, lines, max_deviation) = oracle_check()?;
            csv.push_str(&table);
            outcome.lines = lines;
            outcome.summary.insert("max_deviation".into(), json_f64(max_deviation));
            outcome
                .summary
                .insert("tolerance".into(), json_f64(ORACLE_TOLERANCE));
            outcome.passed = max_deviation < ORACLE_TOLERANCE;
        }
        ResolvedCommand::Walk { chain, site, time } => {
            let prop = Propagator::analytic(chain, *time)?;
            let dist = prop.walk_distribution(*site)?;
            csv.push_str("site,probability\n");
            for (l, p) in dist.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", l + 1, fmt(*p));
            }
            let total: f64 = crate::linalg::compensated_sum(dist.iter().copied());
            let peak = dist
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(l, _)| l + 1)
                .unwrap_or(*site);
            outcome.lines.push(format!(
                "walk from site {site} at t = {time}: total probability {total:.12}, most likely site {peak}"
            ));
            outcome.summary.insert("total_probability".into(), json_f64(total));
            outcome.summary.insert("peak_site".into(), (peak as u64).into());
        }
    }

    Ok((csv, outcome))
}

/// Engine versus exact diagonalization on a fixed grid of small chains.
fn oracle_check() -> Result<(String, Vec<String>, f64)> {
    let mut table = String::from("n_sites,state,time,deviation\n");
    let mut lines = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for n in [4usize, 6, 8] {
        let chain = ChainSpec::new(n, 1.0)?;
        let hamiltonian = EdHamiltonian::new(&chain.uniform_profile(), 0.0)?;
        let states: [(&str, InitialState, FullState); 3] = [
            (
                "neel",
                InitialState::Product(ProductStateSpec::neel(n)?),
                FullState::product(&ProductStateSpec::neel(n)?)?,
            ),
            (
                "canted",
                InitialState::Product(ProductStateSpec::canted(n, 1.3)?),
                FullState::product(&ProductStateSpec::canted(n, 1.3)?)?,
            ),
            (
                "bell-pairs",
                InitialState::BellPairs(BellPairStateSpec::new(n / 2)?),
                FullState::bell_pairs(&BellPairStateSpec::new(n / 2)?)?,
            ),
        ];
        for (name, init, full) in &states {
            for t in [0.4, 1.1, 2.7] {
                let engine = rdm_of(init, &Propagator::analytic(&chain, t)?)?;
                let evolved = hamiltonian.evolve(full, t)?;
                let reference = TwoSpinDensityMatrix::from_entries(ed_rdm_ends(&evolved), t);
                let deviation = engine.max_deviation(&reference);
                max_deviation = max_deviation.max(deviation);
                let _ = writeln!(table, "{n},{name},{},{}", fmt(t), fmt(deviation));
                lines.push(format!("n = {n}  {name:10}  t = {t:.1}  deviation {deviation:.3e}"));
            }
        }
    }
    let verdict = if max_deviation < ORACLE_TOLERANCE { "ok" } else { "FAILED" };
    lines.push(format!(
        "max deviation {max_deviation:.3e} against tolerance {ORACLE_TOLERANCE:.0e}: {verdict}"
    ));
    Ok((table, lines, max_deviation))
}

/// Execute a resolved run: honor the thread setting, write the data file and
/// its sidecar, and report the outcome.
pub fn execute(config: &RunConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    let (csv, mut outcome) = match config.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(config))?
        }
        None => dispatch(config)?,
    };

    if let Some(output) = &config.output {
        let mut file = fs::File::create(output)?;
        file.write_all(csv.as_bytes())?;
        outcome
            .lines
            .push(format!("wrote {}", output.display()));

        let mut sidecar_doc = config.resolved.clone();
        sidecar_doc.meta = Some(MetaDoc {
            version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_seconds: started.elapsed().as_secs_f64(),
            summary: outcome.summary.clone(),
        });
        let sidecar = sidecar_path(output);
        fs::write(&sidecar, serde_json::to_string_pretty(&sidecar_doc)? + "\n")?;
        outcome.lines.push(format!("wrote {}", sidecar.display()));
    }

    Ok(outcome)
}

/// The sidecar sits next to the data file with a `.json` extension.
pub fn sidecar_path(output: &Path) -> PathBuf {
    if output.extension().is_some_and(|e| e == "json") {
        let mut name = output.file_stem().unwrap_or_default().to_os_string();
        name.push(".sidecar.json");
        output.with_file_name(name)
    } else {
        output.with_extension("json")
    }
}

/// Exit code for a failed run: configuration problems are 2, everything
/// else (numerics, I/O) is 1.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Full top-to-bottom run used by `main`: load, merge, resolve, execute.
pub fn run(cli: Cli) -> Result<i32> {
    let mut doc = match &cli.config {
        Some(path) => ConfigDoc::from_json(&fs::read_to_string(path)?)?,
        None => ConfigDoc::default(),
    };
    doc.apply_flags(&cli);
    let config = resolve(doc)?;
    let outcome = execute(&config)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cli() -> Cli {
        Cli::parse_from(["endspin"])
    }

    fn resolve_json(text: &str) -> Result<RunConfig> {
        resolve(ConfigDoc::from_json(text).unwrap())
    }

    #[test]
    fn spec_example_config_parses() {
        let config = resolve_json(
            r#"{"command": "time-sweep", "N": 24, "state": "neel",
                "t": [0, 12, 241], "output": "out.csv"}"#,
        )
        .unwrap();
        let ResolvedCommand::TimeSweep { chain, init, time_grid } = &config.command else {
            panic!("wrong command");
        };
        assert_eq!(chain.n_sites(), 24);
        assert_eq!(chain.coupling(), 1.0);
        assert_eq!(init.n_sites(), 24);
        assert_eq!(time_grid.count(), 241);
        assert_eq!(time_grid.stop(), 12.0);
        // Applied defaults are recorded.
        assert_eq!(config.resolved.coupling, Some(1.0));
        assert_eq!(config.resolved.schema, Some(SCHEMA_VERSION));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigDoc::from_json(r#"{"comand": "walk"}"#).is_err());
        assert!(ConfigDoc::from_json(r#"{"state": {"knid": "neel"}}"#).is_err());
        assert!(ConfigDoc::from_json(r#"{"t": {"begin": 0}}"#).is_err());
    }

    #[test]
    fn schema_version_is_enforced() {
        let err = ConfigDoc::from_json(r#"{"schema": 2}"#).unwrap_err();
        let Error::Config { path, .. } = err else { panic!("wrong error: {err}") };
        assert_eq!(path, "schema");
    }

    #[test]
    fn missing_fields_name_their_key_path() {
        let cases = [
            (r#"{}"#, "command"),
            (r#"{"command": "time-sweep"}"#, "n_sites"),
            (r#"{"command": "time-sweep", "N": 8}"#, "state"),
            (r#"{"command": "time-sweep", "N": 8, "state": {"kind": "canted"}}"#, "state.alpha"),
            (
                r#"{"command": "time-sweep", "N": 8, "state": "neel"}"#,
                "output",
            ),
            (r#"{"command": "walk", "N": 8, "output": "o.csv"}"#, "site"),
            (r#"{"command": "walk", "N": 8, "site": 1, "output": "o.csv"}"#, "time"),
            (r#"{"command": "scaling", "output": "o.csv"}"#, "sizes"),
            (
                r#"{"command": "disorder-coupling", "N": 8, "state": "neel", "output": "o.csv"}"#,
                "delta",
            ),
        ];
        for (text, want_path) in cases {
            let err = resolve_json(text).unwrap_err();
            let Error::Config { path, .. } = &err else {
                panic!("wrong error for {text}: {err}")
            };
            assert_eq!(path, want_path, "for {text}");
        }
    }

    #[test]
    fn out_of_range_values_name_path_and_range() {
        let err = resolve_json(
            r#"{"command": "time-sweep", "N": 24,
                "state": {"kind": "canted", "alpha": 7.0}, "output": "o.csv"}"#,
        )
        .unwrap_err();
        let Error::Config { path, message } = &err else { panic!("wrong error: {err}") };
        assert_eq!(path, "state.alpha");
        assert!(message.contains("[0, 2*pi]"), "message: {message}");
    }

    #[test]
    fn bell_pairs_on_odd_chains_name_the_even_requirement() {
        let err = resolve_json(
            r#"{"command": "time-sweep", "N": 25, "state": "bell-pairs", "output": "o.csv"}"#,
        )
        .unwrap_err();
        let Error::Config { path, message } = &err else { panic!("wrong error: {err}") };
        assert_eq!(path, "chain.n_sites");
        assert!(message.contains("even"), "message: {message}");
    }

    #[test]
    fn flip_disorder_refuses_bell_pairs_and_bad_rates() {
        let err = resolve_json(
            r#"{"command": "disorder-flip", "N": 8, "state": "bell-pairs",
                "epsilon": 0.01, "output": "o.csv"}"#,
        )
        .unwrap_err();
        let Error::Config { path, .. } = &err else { panic!("wrong error: {err}") };
        assert_eq!(path, "state.kind");

        let err = resolve_json(
            r#"{"command": "disorder-flip", "N": 8, "state": "neel",
                "epsilon": 0.2, "output": "o.csv"}"#,
        )
        .unwrap_err();
        let Error::Config { path, .. } = &err else { panic!("wrong error: {err}") };
        assert_eq!(path, "epsilon");
    }

    #[test]
    fn flags_override_file_values() {
        let mut doc = ConfigDoc::from_json(
            r#"{"command": "time-sweep", "N": 8, "state": "neel",
                "t": [0, 4, 41], "output": "a.csv"}"#,
        )
        .unwrap();
        let cli = Cli::parse_from([
            "endspin", "walk", "--n-sites", "12", "--site", "3", "--time", "1.5",
            "--output", "b.csv",
        ]);
        doc.apply_flags(&cli);
        let config = resolve(doc).unwrap();
        let ResolvedCommand::Walk { chain, site, time } = &config.command else {
            panic!("cli command should win");
        };
        assert_eq!(chain.n_sites(), 12);
        assert_eq!(*site, 3);
        assert_eq!(*time, 1.5);
        assert_eq!(config.output.as_deref(), Some(Path::new("b.csv")));
    }

    #[test]
    fn grid_accepts_array_and_object_forms() {
        let array = resolve_json(
            r#"{"command": "time-sweep", "N": 8, "state": "neel",
                "t": [0, 4, 41], "output": "o.csv"}"#,
        )
        .unwrap();
        let object = resolve_json(
            r#"{"command": "time-sweep", "N": 8, "state": "neel",
                "t": {"start": 0, "stop": 4, "count": 41}, "output": "o.csv"}"#,
        )
        .unwrap();
        assert_eq!(array.resolved.t, object.resolved.t);
        // Partial objects inherit defaults for the rest.
        let partial = resolve_json(
            r#"{"command": "time-sweep", "N": 8, "state": "neel",
                "t": {"count": 11}, "output": "o.csv"}"#,
        )
        .unwrap();
        assert_eq!(partial.resolved.t.unwrap().stop, Some(4.0));
        assert_eq!(partial.resolved.t.unwrap().count, Some(11));
    }

    #[test]
    fn defaults_are_recorded_for_reproduction() {
        let config = resolve_json(
            r#"{"command": "disorder-coupling", "N": 6, "state": "bell-pairs",
                "delta": 0.1, "output": "o.csv"}"#,
        )
        .unwrap();
        let doc = &config.resolved;
        assert_eq!(doc.realizations, Some(100));
        assert!(doc.seed.is_some(), "entropy seed must be recorded");
        assert_eq!(doc.average.as_deref(), Some("measures"));
        assert_eq!(doc.coupling, Some(1.0));
        let grid = doc.t.unwrap();
        assert_eq!(grid.start, Some(0.0));
        assert_eq!(grid.stop, Some(3.0));
        assert_eq!(grid.count, Some(241));
    }

    #[test]
    fn resolved_doc_round_trips_identically() {
        let config = resolve_json(
            r#"{"command": "time-sweep", "N": 8, "state": {"kind": "canted", "alpha": 2.5},
                "t": [0, 4, 41], "seed": 7, "output": "o.csv"}"#,
        )
        .unwrap();
        let text = serde_json::to_string_pretty(&config.resolved).unwrap();
        let reparsed = resolve(ConfigDoc::from_json(&text).unwrap()).unwrap();
        assert_eq!(config.resolved, reparsed.resolved);
    }

    #[test]
    fn sidecar_meta_is_carried_but_ignored() {
        let text = r#"{"command": "walk", "N": 6, "site": 1, "time": 2.0,
                       "output": "o.csv",
                       "meta": {"version": "0.0.0", "elapsed_seconds": 1.5,
                                "summary": {"total_probability": 1.0}}}"#;
        let config = resolve_json(text).unwrap();
        assert!(config.resolved.meta.is_none(), "meta must not re-enter the run");
    }

    #[test]
    fn command_names_round_trip() {
        for name in [
            CommandName::TimeSweep,
            CommandName::AlphaMap,
            CommandName::Fwhm,
            CommandName::Scaling,
            CommandName::DisorderFlip,
            CommandName::DisorderCoupling,
            CommandName::OracleCheck,
            CommandName::Walk,
        ] {
            assert_eq!(CommandName::from_str(name.as_str()).unwrap(), name);
        }
        assert!(CommandName::from_str("timesweep").is_err());
    }

    #[test]
    fn exit_codes_partition_the_error_space() {
        assert_eq!(exit_code(&Error::config("x", "y")), 2);
        let json_err: Error =
            serde_json::from_str::<ConfigDoc>("{nope").unwrap_err().into();
        assert_eq!(exit_code(&json_err), 2);
        assert_eq!(exit_code(&Error::NotPositive(-1.0)), 1);
        assert_eq!(exit_code(&Error::SearchFailed("no peak".into())), 1);
        assert_eq!(exit_code(&Error::invalid("bad")), 1);
    }

    #[test]
    fn sidecar_path_never_clobbers_the_data_file() {
        assert_eq!(sidecar_path(Path::new("run.csv")), Path::new("run.json"));
        assert_eq!(sidecar_path(Path::new("dir/run.csv")), Path::new("dir/run.json"));
        assert_eq!(
            sidecar_path(Path::new("run.json")),
            Path::new("run.sidecar.json")
        );
        assert_eq!(sidecar_path(Path::new("bare")), Path::new("bare.json"));
    }

    #[test]
    fn csv_floats_survive_a_parse_round_trip() {
        for x in [
            0.0,
            1.0 / 3.0,
            std::f64::consts::PI,
            0.7793,
            f64::MIN_POSITIVE,
            1.2345678901234567e300,
        ] {
            let text = fmt(x);
            assert_eq!(text.parse::<f64>().unwrap(), x, "text {text}");
        }
    }

    #[test]
    fn oracle_check_grid_is_within_tolerance() {
        let (table, lines, max_deviation) = oracle_check().unwrap();
        assert!(max_deviation < ORACLE_TOLERANCE, "max deviation {max_deviation}");
        // 3 sizes x 3 states x 3 times, plus the header.
        assert_eq!(table.lines().count(), 28);
        assert!(lines.last().unwrap().contains("ok"));
    }

    #[test]
    fn cli_without_command_or_config_is_a_config_error() {
        let mut doc = ConfigDoc::default();
        doc.apply_flags(&base_cli());
        let err = resolve(doc).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }
}
