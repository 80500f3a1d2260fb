use std::path::PathBuf;

use serde::Deserialize;
use shadow_core::pauli::PauliString;
use shadow_core::stabilizer::StabilizerState;
use shadow_core::weights::Ensemble;

use crate::error::CliError;

/// Seed used when neither the command line, the config file nor the
/// environment provides one.
pub const DEFAULT_SEED: u64 = 0;
pub const SEED_ENV: &str = "SHADOWS_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ghz,
    Zxz,
    Custom,
}

/// Prepared stabilizer state. Exactly one of `n`, `n_per_k` (system size
/// `n_per_k · k` for every observable size `k`) or `generators` is used.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub kind: StateKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub n_per_k: Option<usize>,
    #[serde(default)]
    pub generators: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Z_1 … Z_k`.
    GhzZ,
    /// `Z_1 Y_2 X_3 … X_{k-2} Y_{k-1} Z_k`.
    ZxzString,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Family {
        family: Family,
        k_range: [usize; 2],
    },
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum EnsembleSpec {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LocationSpec {
    Known {
        #[serde(default)]
        offset: usize,
    },
    Sliding {
        /// Place the observable at a seeded random ring offset per `k`.
        #[serde(default = "yes")]
        random_offset: bool,
        #[serde(default)]
        offset: usize,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub state: StateSpec,
    pub observable: ObservableSpec,
    pub ensemble: EnsembleSpec,
    pub location_mode: LocationSpec,
    pub snapshots: u64,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

/// Command-line values taking precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub snapshots: Option<u64>,
    pub output: Option<PathBuf>,
}

/// Flag, then config file, then environment, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}: {v:?} is not an unsigned integer"))),
        None => Ok(DEFAULT_SEED),
    }
}

/// One observable of the sweep before placement on the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableTemplate {
    pub k: usize,
    /// Labels of the `k` sites of the observable span, first site first.
    pub body: String,
}

impl ObservableTemplate {
    /// Places the span at `offset` on an `n`-qubit ring.
    pub fn place(&self, n: usize, offset: usize) -> PauliString {
        let mut ops = vec!['I'; n];
        for (j, ch) in self.body.chars().enumerate() {
            ops[(offset + j) % n] = ch;
        }
        ops.into_iter().collect::<String>().parse().expect("labels built from I/X/Y/Z")
    }
}

/// The `zxz_string` observable on `k` sites. For `k = 3` the end factors
/// overlap and the string reduces to the cluster generator `Z X Z`.
pub fn zxz_string(k: usize) -> String {
    match k {
        0..=2 => String::new(),
        3 => "ZXZ".into(),
        _ => {
            let mut s = String::from("ZY");
            s.extend(std::iter::repeat_n('X', k - 4));
            s.push_str("YZ");
            s
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.master_seed = Some(s);
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        if let Some(n) = o.snapshots {
            self.snapshots = n;
        }
        if let Some(p) = &o.output {
            self.output_path = Some(p.clone());
        }
    }

    pub fn ensembles(&self) -> Result<Vec<Ensemble>, CliError> {
        let names = match &self.ensemble {
            EnsembleSpec::One(s) => vec![s.clone()],
            EnsembleSpec::Many(v) => v.clone(),
        };
        if names.is_empty() {
            return Err(CliError::Config("ensemble: empty list".into()));
        }
        let mut out = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let e: Ensemble = name
                .parse()
                .map_err(|_| CliError::Config(format!("ensemble[{i}]: unknown ensemble {name:?}")))?;
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(out)
    }

    pub fn templates(&self) -> Result<Vec<ObservableTemplate>, CliError> {
        match &self.observable {
            ObservableSpec::Label(label) => {
                let p: PauliString = label
                    .parse()
                    .map_err(|e| CliError::Config(format!("observable: {e}")))?;
                if p.phase() != 0 {
                    return Err(CliError::Config("observable: signed labels are not supported".into()));
                }
                let support = p.support();
                let (Some(&lo), Some(&hi)) = (support.first(), support.last()) else {
                    return Err(CliError::Config("observable: identity has no support".into()));
                };
                let body: String = p.body_label().chars().skip(lo).take(hi - lo + 1).collect();
                Ok(vec![ObservableTemplate { k: hi - lo + 1, body }])
            }
            ObservableSpec::Family { family, k_range } => {
                let [lo, hi] = *k_range;
                if lo == 0 || lo > hi {
                    return Err(CliError::Config(format!("observable.k_range: invalid range [{lo}, {hi}]")));
                }
                let min = match family {
                    Family::GhzZ => 1,
                    Family::ZxzString => 3,
                };
                if lo < min {
                    return Err(CliError::Config(format!("observable.k_range: family needs k >= {min}")));
                }
                Ok((lo..=hi)
                    .map(|k| ObservableTemplate {
                        k,
                        body: match family {
                            Family::GhzZ => "Z".repeat(k),
                            Family::ZxzString => zxz_string(k),
                        },
                    })
                    .collect())
            }
        }
    }

    /// Explicit-label offset, used when the label is not itself shifted.
    fn label_offset(&self) -> Option<usize> {
        match &self.observable {
            ObservableSpec::Label(label) => label
                .parse::<PauliString>()
                .ok()
                .and_then(|p| p.support().first().copied()),
            ObservableSpec::Family { .. } => None,
        }
    }

    /// Default placement of the observable span before random offsets.
    pub fn base_offset(&self) -> usize {
        match (&self.location_mode, self.label_offset()) {
            (_, Some(o)) => o,
            (LocationSpec::Known { offset } | LocationSpec::Sliding { offset, .. }, None) => *offset,
        }
    }

    /// Builds the state for observable size `k`.
    pub fn build_state(&self, k: usize) -> Result<StabilizerState, CliError> {
        let n = self.system_size(k)?;
        let state = match self.state.kind {
            StateKind::Ghz => StabilizerState::ghz(n),
            StateKind::Zxz => StabilizerState::zxz_cluster(n),
            StateKind::Custom => {
                let gens = self.state.generators.as_ref().expect("checked by validate");
                StabilizerState::from_labels(gens)
            }
        };
        state.map_err(|e| CliError::Config(format!("state: {e}")))
    }

    pub fn system_size(&self, k: usize) -> Result<usize, CliError> {
        let s = &self.state;
        match (s.kind, s.n, s.n_per_k, &s.generators) {
            (StateKind::Custom, None, None, Some(g)) => {
                g.first().map(|p| p.trim_start_matches(['+', '-', 'i']).len()).ok_or_else(|| {
                    CliError::Config("state.generators: empty list".into())
                })
            }
            (StateKind::Custom, _, _, _) => Err(CliError::Config(
                "state: custom states take only `generators`".into(),
            )),
            (_, Some(n), None, None) => Ok(n),
            (_, None, Some(m), None) => Ok(m * k),
            (_, _, _, Some(_)) => Err(CliError::Config("state.generators: only for kind custom".into())),
            _ => Err(CliError::Config("state: give exactly one of `n` or `n_per_k`".into())),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.snapshots < 2 {
            return Err(CliError::Config(format!("snapshots: need at least 2, got {}", self.snapshots)));
        }
        if self.name.trim().is_empty() {
            return Err(CliError::Config("name: empty".into()));
        }
        self.ensembles()?;
        let templates = self.templates()?;
        for t in &templates {
            let n = self.system_size(t.k)?;
            let min_n = match self.state.kind {
                StateKind::Ghz => 2,
                StateKind::Zxz => 3,
                StateKind::Custom => 1,
            };
            if n < min_n {
                return Err(CliError::Config(format!("state: system size {n} too small")));
            }
            if let ObservableSpec::Label(label) = &self.observable {
                if label.trim_start_matches(['+', '-']).len() != n {
                    return Err(CliError::Config(format!(
                        "observable: label has {} sites, state has {n}",
                        label.trim_start_matches(['+', '-']).len()
                    )));
                }
            }
            match self.location_mode {
                LocationSpec::Known { .. } => {
                    let offset = self.base_offset();
                    if offset + t.k > n {
                        return Err(CliError::Config(format!(
                            "location_mode.known.offset: block {offset}..{} exceeds {n} qubits (observable.k_range)",
                            offset + t.k
                        )));
                    }
                }
                LocationSpec::Sliding { .. } => {
                    if t.k > n {
                        return Err(CliError::Config(format!(
                            "observable.k_range: k = {} exceeds {n} qubits",
                            t.k
                        )));
                    }
                }
            }
        }
        if self.state.kind == StateKind::Custom {
            self.build_state(templates[0].k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zxz_family() {
        assert_eq!(zxz_string(3), "ZXZ");
        assert_eq!(zxz_string(4), "ZYYZ");
        assert_eq!(zxz_string(7), "ZYXXXYZ");
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some(2), Some("3")).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(2), Some("3")).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some("3")).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), DEFAULT_SEED);
        assert!(resolve_seed(None, None, Some("x")).is_err());
    }

    #[test]
    fn placement_wraps() {
        let t = ObservableTemplate { k: 3, body: "ZXY".into() };
        assert_eq!(t.place(5, 3).body_label(), "YIIZX");
        assert_eq!(t.place(5, 1).body_label(), "IZXYI");
    }
}
