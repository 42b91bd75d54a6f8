//! Run configuration: parsing and validation.
//!
//! Everything is checked here before any computation starts, and every
//! error names the offending field.

use molspin::couplings::LatticeGeometry;
use molspin::{BasisKet, Half, MoleculeSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::registry::Registry;

/// Top-level configuration file.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Registry name (e.g. "KRb") or an inline molecule table.
    #[serde(default)]
    pub molecule: Option<toml::Value>,
    /// Highest rotational quantum number kept in the basis.
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` overrides it.
    #[serde(default)]
    pub output: Option<String>,
    pub scenario: Scenario,
}

fn default_n_max() -> u32 {
    4
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    Spectrum {
        e_field: Axis,
        b_field: Axis,
        states: Vec<StateSpec>,
    },
    Dipoles {
        #[serde(default)]
        e_field: Option<Axis>,
        /// Alternative to `e_field`: sweep the Stark parameter Ed/B_e.
        #[serde(default)]
        beta: Option<Axis>,
        b_field: f64,
        up: StateSpec,
        down: StateSpec,
        #[serde(default)]
        dss: Option<DssSpec>,
        #[serde(default = "default_spacing")]
        a_nm: f64,
    },
    Alc {
        e_field: f64,
        /// Search window [lo, hi] in G.
        window: [f64; 2],
        #[serde(default = "default_grid")]
        grid: usize,
        /// Nuclear projection shared by both ALC states.
        #[serde(default = "default_alc_mi")]
        m_i: f64,
        scan: Axis,
        #[serde(default = "default_spacing")]
        a_nm: f64,
    },
    Dressed {
        #[serde(default)]
        e_field: f64,
        /// Rabi frequency Ω in MHz.
        omega: f64,
        /// Detuning Δ in MHz.
        #[serde(default)]
        delta: f64,
        ground: StateSpec,
        excited: StateSpec,
        bare: StateSpec,
        /// Search window, swept from the first value toward the second.
        window: [f64; 2],
        #[serde(default = "default_grid")]
        grid: usize,
        /// Half-width of the scan around B_c in G.
        #[serde(default = "default_scan_half_width")]
        scan_half_width: f64,
        #[serde(default = "default_scan_steps")]
        scan_steps: usize,
        #[serde(default = "default_spacing")]
        a_nm: f64,
    },
    Couplings {
        encoding: Encoding,
        lattice: LatticeSpec,
        #[serde(default)]
        cutoff_nm: Option<f64>,
    },
    Cluster {
        encoding: Encoding,
        lattice: LatticeSpec,
        #[serde(default)]
        cutoff_nm: Option<f64>,
        /// Coherence time T₂ in ms; omitted means no white dephasing.
        #[serde(default)]
        t2_ms: Option<f64>,
        /// Evolution time in ms; defaults to t_c.
        #[serde(default)]
        t_ms: Option<f64>,
        #[serde(default = "default_true")]
        frame_correct: bool,
        #[serde(default)]
        static_noise: Option<StaticNoiseSpec>,
    },
    Squeeze {
        encoding: Encoding,
        lattice: LatticeSpec,
        #[serde(default)]
        cutoff_nm: Option<f64>,
        /// Evolution times in ms.
        t_ms: Axis,
        #[serde(default)]
        dynamics: DynamicsSpec,
    },
    Gap {
        sizes: Vec<usize>,
        j_perp_nn_hz: f64,
        delta_e_hz: f64,
    },
}

fn default_spacing() -> f64 {
    500.0
}
fn default_grid() -> usize {
    81
}
fn default_alc_mi() -> f64 {
    -0.5
}
fn default_scan_half_width() -> f64 {
    100.0
}
fn default_scan_steps() -> usize {
    41
}
fn default_true() -> bool {
    true
}
fn default_seed_field() -> f64 {
    1.0
}
fn default_track_steps() -> usize {
    40
}
fn default_samples() -> usize {
    64
}

/// A fixed value or an inclusive linear range.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    Range { from: f64, to: f64, steps: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(x) => vec![x],
            Axis::Range { from, to, steps } => match steps {
                0 => vec![],
                1 => vec![from],
                n => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
            },
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, Axis::Range { .. })
    }

    fn check(&self, path: &str, non_negative: bool) -> CliResult<()> {
        if let Axis::Range { steps: 0, .. } = self {
            return Err(CliError::field(path, "empty sweep (steps = 0)"));
        }
        if let Axis::Range { from, to, steps } = self {
            if *steps > 1 && from == to {
                return Err(CliError::field(path, "empty sweep (from = to)"));
            }
        }
        for v in self.values() {
            if !v.is_finite() || (non_negative && v < 0.0) {
                return Err(CliError::field(path, format!("value {v} must be finite{}", if non_negative { " and non-negative" } else { "" })));
            }
        }
        Ok(())
    }
}

/// A bare basis ket used as a tracking seed.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub n: u32,
    pub m_n: i32,
    #[serde(default)]
    pub m_s: Option<f64>,
    #[serde(default)]
    pub m_i: Vec<f64>,
}

impl StateSpec {
    pub fn ket(&self, path: &str) -> CliResult<BasisKet> {
        let half = |x: f64, p: String| Half::from_f64(x).map_err(|e| CliError::field(p, e));
        let m_s = self.m_s.map(|x| half(x, format!("{path}.m_s"))).transpose()?;
        let m_i = self.m_i.iter().enumerate().map(|(k, &x)| half(x, format!("{path}.m_i[{k}]"))).collect::<CliResult<Vec<_>>>()?;
        Ok(BasisKet::new(self.n, self.m_n, m_s, m_i))
    }

    pub fn seed(&self, path: &str) -> CliResult<molspin::spectrum::Seed> {
        let ket = self.ket(path)?;
        Ok(match &self.label {
            Some(l) => molspin::spectrum::Seed::named(l.clone(), ket),
            None => molspin::spectrum::Seed::ket(ket),
        })
    }
}

/// Labels of two transitions whose frequency difference is reported.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DssSpec {
    /// [lower, upper] of the encoded transition.
    pub main: [StateSpec; 2],
    /// [lower, upper] of the competing transition.
    pub competing: [StateSpec; 2],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dims: DimsSpec,
    pub l: usize,
    #[serde(default = "default_spacing")]
    pub a_nm: f64,
    #[serde(default)]
    pub field_axis: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimsSpec {
    Chain,
    Square,
}

impl LatticeSpec {
    pub fn geometry(&self) -> LatticeGeometry {
        let mut g = match self.dims {
            DimsSpec::Chain => LatticeGeometry::chain(self.l, self.a_nm),
            DimsSpec::Square => LatticeGeometry::square(self.l, self.a_nm),
        };
        if let Some(axis) = self.field_axis {
            g.field_axis = axis;
        }
        g
    }

    fn check(&self, path: &str, max_sites: Option<usize>) -> CliResult<()> {
        let g = self.geometry();
        g.validate().map_err(|e| CliError::field(path, e))?;
        if let Some(max) = max_sites {
            if g.n_sites() > max {
                return Err(CliError::field(
                    format!("{path}.l"),
                    format!("{} sites exceed the simulation limit of {max}", g.n_sites()),
                ));
            }
        }
        Ok(())
    }
}

/// Where the pseudo-spin dipoles come from.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum Encoding {
    /// Dipole matrix elements given directly, Debye.
    Dipoles { d_up: f64, d_down: f64, d_cross: f64 },
    /// Dipoles of two tracked eigenstates. Tracking starts at
    /// `seed_e_field` and ramps E to `e_field` at fixed B.
    Tracked {
        e_field: f64,
        b_field: f64,
        up: StateSpec,
        down: StateSpec,
        #[serde(default = "default_seed_field")]
        seed_e_field: f64,
        #[serde(default = "default_track_steps")]
        steps: usize,
    },
    /// Nearest-neighbour couplings J/2π in Hz; the dipolar 1/R³ shape is kept.
    Couplings { j_z_nn_hz: f64, j_perp_nn_hz: f64 },
}

impl Encoding {
    pub fn needs_molecule(&self) -> bool {
        matches!(self, Encoding::Tracked { .. })
    }

    fn check(&self, path: &str) -> CliResult<()> {
        match self {
            Encoding::Dipoles { d_up, d_down, d_cross } => {
                for (name, v) in [("d_up", d_up), ("d_down", d_down), ("d_cross", d_cross)] {
                    if !v.is_finite() {
                        return Err(CliError::field(format!("{path}.{name}"), "must be finite"));
                    }
                }
            }
            Encoding::Tracked { e_field, b_field, up, down, seed_e_field, steps } => {
                for (name, v) in [("e_field", e_field), ("b_field", b_field), ("seed_e_field", seed_e_field)] {
                    if !(v.is_finite() && *v >= 0.0) {
                        return Err(CliError::field(format!("{path}.{name}"), "must be finite and non-negative"));
                    }
                }
                if *steps < 1 {
                    return Err(CliError::field(format!("{path}.steps"), "empty sweep (steps = 0)"));
                }
                up.ket(&format!("{path}.up"))?;
                down.ket(&format!("{path}.down"))?;
            }
            Encoding::Couplings { j_z_nn_hz, j_perp_nn_hz } => {
                if !j_z_nn_hz.is_finite() || !j_perp_nn_hz.is_finite() {
                    return Err(CliError::field(path, "couplings must be finite"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StaticNoiseSpec {
    pub profile: ProfileSpec,
    /// Harmonic scale ΔE_↑↓ in Hz.
    #[serde(default)]
    pub delta_e_hz: f64,
    /// Gaussian width in Hz.
    #[serde(default)]
    pub sigma_hz: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub echo: bool,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSpec {
    Harmonic,
    Gaussian,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsSpec {
    #[default]
    Xxz,
    Ising,
}

/// A parsed configuration with its molecule resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub molecule: Option<MoleculeSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| locate(text, s.start)).unwrap_or_default();
            CliError::Validation(format!("{path}{}", e.message()))
        })
    }

    pub fn scenario_name(&self) -> &'static str {
        match self.scenario {
            Scenario::Spectrum { .. } => "spectrum",
            Scenario::Dipoles { .. } => "dipoles",
            Scenario::Alc { .. } => "alc",
            Scenario::Dressed { .. } => "dressed",
            Scenario::Couplings { .. } => "couplings",
            Scenario::Cluster { .. } => "cluster",
            Scenario::Squeeze { .. } => "squeeze",
            Scenario::Gap { .. } => "gap",
        }
    }

    fn needs_molecule(&self) -> bool {
        match &self.scenario {
            Scenario::Couplings { encoding, .. } | Scenario::Cluster { encoding, .. } | Scenario::Squeeze { encoding, .. } => {
                encoding.needs_molecule()
            }
            Scenario::Gap { .. } => false,
            _ => true,
        }
    }

    /// Resolves the molecule and checks every scenario field.
    pub fn validate(self, registry: &Registry) -> CliResult<Resolved> {
        if self.n_max > 12 {
            return Err(CliError::field("n_max", format!("{} is above the supported maximum 12", self.n_max)));
        }
        let molecule = match (&self.molecule, self.needs_molecule()) {
            (None, true) => return Err(CliError::field("molecule", "required by this scenario")),
            (None, false) => None,
            (Some(v), _) => Some(resolve_molecule(v, registry)?),
        };
        let sc = "scenario";
        match &self.scenario {
            Scenario::Spectrum { e_field, b_field, states } => {
                e_field.check(&format!("{sc}.e_field"), true)?;
                b_field.check(&format!("{sc}.b_field"), true)?;
                if e_field.is_range() && b_field.is_range() {
                    return Err(CliError::field(sc, "sweep one of e_field and b_field at a time"));
                }
                if states.is_empty() {
                    return Err(CliError::field(format!("{sc}.states"), "at least one state is required"));
                }
                for (k, s) in states.iter().enumerate() {
                    check_state(s, &format!("{sc}.states[{k}]"), molecule.as_ref())?;
                }
            }
            Scenario::Dipoles { e_field, beta, b_field, up, down, dss, a_nm } => {
                match (e_field, beta) {
                    (Some(a), None) => a.check(&format!("{sc}.e_field"), true)?,
                    (None, Some(a)) => a.check(&format!("{sc}.beta"), true)?,
                    _ => return Err(CliError::field(sc, "give exactly one of e_field and beta")),
                }
                check_non_negative(*b_field, &format!("{sc}.b_field"))?;
                check_positive(*a_nm, &format!("{sc}.a_nm"))?;
                check_state(up, &format!("{sc}.up"), molecule.as_ref())?;
                check_state(down, &format!("{sc}.down"), molecule.as_ref())?;
                if let Some(d) = dss {
                    for (k, s) in d.main.iter().enumerate() {
                        check_state(s, &format!("{sc}.dss.main[{k}]"), molecule.as_ref())?;
                    }
                    for (k, s) in d.competing.iter().enumerate() {
                        check_state(s, &format!("{sc}.dss.competing[{k}]"), molecule.as_ref())?;
                    }
                }
            }
            Scenario::Alc { e_field, window, grid, m_i, scan, a_nm } => {
                check_non_negative(*e_field, &format!("{sc}.e_field"))?;
                check_window(*window, &format!("{sc}.window"))?;
                if *grid < 3 {
                    return Err(CliError::field(format!("{sc}.grid"), "need at least 3 grid points"));
                }
                Half::from_f64(*m_i).map_err(|e| CliError::field(format!("{sc}.m_i"), e))?;
                scan.check(&format!("{sc}.scan"), true)?;
                check_positive(*a_nm, &format!("{sc}.a_nm"))?;
            }
            Scenario::Dressed { e_field, omega, ground, excited, bare, window, grid, scan_half_width, scan_steps, a_nm, delta } => {
                check_non_negative(*e_field, &format!("{sc}.e_field"))?;
                check_positive(*omega, &format!("{sc}.omega"))?;
                if !delta.is_finite() {
                    return Err(CliError::field(format!("{sc}.delta"), "must be finite"));
                }
                check_state(ground, &format!("{sc}.ground"), molecule.as_ref())?;
                check_state(excited, &format!("{sc}.excited"), molecule.as_ref())?;
                check_state(bare, &format!("{sc}.bare"), molecule.as_ref())?;
                if window[0] == window[1] || !window.iter().all(|b| b.is_finite() && *b >= 0.0) {
                    return Err(CliError::field(format!("{sc}.window"), "empty sweep; need two distinct non-negative fields"));
                }
                if *grid < 2 {
                    return Err(CliError::field(format!("{sc}.grid"), "need at least 2 grid points"));
                }
                check_positive(*scan_half_width, &format!("{sc}.scan_half_width"))?;
                if *scan_steps < 2 {
                    return Err(CliError::field(format!("{sc}.scan_steps"), "empty sweep; need at least 2 steps"));
                }
                check_positive(*a_nm, &format!("{sc}.a_nm"))?;
            }
            Scenario::Couplings { encoding, lattice, cutoff_nm } => {
                encoding.check(&format!("{sc}.encoding"))?;
                check_encoding_states(encoding, molecule.as_ref())?;
                lattice.check(&format!("{sc}.lattice"), None)?;
                check_cutoff(*cutoff_nm)?;
            }
            Scenario::Cluster { encoding, lattice, cutoff_nm, t2_ms, t_ms, static_noise, .. } => {
                encoding.check(&format!("{sc}.encoding"))?;
                check_encoding_states(encoding, molecule.as_ref())?;
                lattice.check(&format!("{sc}.lattice"), Some(molspin::manybody::MAX_SITES))?;
                check_cutoff(*cutoff_nm)?;
                if let Some(t2) = t2_ms {
                    check_positive(*t2, &format!("{sc}.t2_ms"))?;
                }
                if let Some(t) = t_ms {
                    check_non_negative(*t, &format!("{sc}.t_ms"))?;
                }
                if let Some(s) = static_noise {
                    let p = format!("{sc}.static_noise");
                    check_non_negative(s.delta_e_hz, &format!("{p}.delta_e_hz"))?;
                    check_non_negative(s.sigma_hz, &format!("{p}.sigma_hz"))?;
                    if s.samples < 1 {
                        return Err(CliError::field(format!("{p}.samples"), "need at least one sample"));
                    }
                }
            }
            Scenario::Squeeze { encoding, lattice, cutoff_nm, t_ms, .. } => {
                encoding.check(&format!("{sc}.encoding"))?;
                check_encoding_states(encoding, molecule.as_ref())?;
                lattice.check(&format!("{sc}.lattice"), Some(molspin::manybody::MAX_SITES))?;
                check_cutoff(*cutoff_nm)?;
                t_ms.check(&format!("{sc}.t_ms"), true)?;
            }
            Scenario::Gap { sizes, j_perp_nn_hz, delta_e_hz } => {
                if sizes.is_empty() {
                    return Err(CliError::field(format!("{sc}.sizes"), "at least one lattice size is required"));
                }
                if let Some(k) = sizes.iter().position(|&l| l < 1) {
                    return Err(CliError::field(format!("{sc}.sizes[{k}]"), "lattice size must be positive"));
                }
                check_positive(j_perp_nn_hz.abs(), &format!("{sc}.j_perp_nn_hz"))?;
                check_non_negative(*delta_e_hz, &format!("{sc}.delta_e_hz"))?;
            }
        }
        Ok(Resolved { config: self, molecule })
    }
}

fn resolve_molecule(v: &toml::Value, registry: &Registry) -> CliResult<MoleculeSpec> {
    let spec = match v {
        toml::Value::String(name) => registry.get(name)?,
        toml::Value::Table(_) => {
            let spec: MoleculeSpec = v.clone().try_into().map_err(|e: toml::de::Error| CliError::field("molecule", e.message()))?;
            spec
        }
        _ => return Err(CliError::field("molecule", "expected a registry name or an inline table")),
    };
    spec.validate().map_err(|e| CliError::field("molecule", e))?;
    Ok(spec)
}

fn check_state(s: &StateSpec, path: &str, spec: Option<&MoleculeSpec>) -> CliResult<()> {
    let ket = s.ket(path)?;
    if let Some(spec) = spec {
        ket.check_against(spec).map_err(|e| CliError::field(path, e))?;
    }
    Ok(())
}

fn check_encoding_states(enc: &Encoding, spec: Option<&MoleculeSpec>) -> CliResult<()> {
    if let Encoding::Tracked { up, down, .. } = enc {
        check_state(up, "scenario.encoding.up", spec)?;
        check_state(down, "scenario.encoding.down", spec)?;
    }
    Ok(())
}

fn check_positive(v: f64, path: &str) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::field(path, format!("must be positive and finite, got {v}")))
    }
}

fn check_non_negative(v: f64, path: &str) -> CliResult<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::field(path, format!("must be non-negative and finite, got {v}")))
    }
}

fn check_window(w: [f64; 2], path: &str) -> CliResult<()> {
    if w.iter().all(|b| b.is_finite() && *b >= 0.0) && w[1] > w[0] {
        Ok(())
    } else {
        Err(CliError::field(path, format!("empty sweep; need 0 <= lo < hi, got {w:?}")))
    }
}

fn check_cutoff(c: Option<f64>) -> CliResult<()> {
    match c {
        Some(v) => check_positive(v, "scenario.cutoff_nm"),
        None => Ok(()),
    }
}

/// Best-effort dotted path of the TOML key containing byte offset `at`.
fn locate(text: &str, at: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            table = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = k.trim().to_string();
        }
        offset += line.len();
        if offset > at {
            break;
        }
    }
    match (table.is_empty(), key.is_empty()) {
        (true, true) => String::new(),
        (true, false) => format!("{key}: "),
        (false, true) => format!("{table}: "),
        (false, false) => format!("{table}.{key}: "),
    }
}
