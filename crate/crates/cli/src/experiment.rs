use std::io::{Read, Write};

use serde::Deserialize;
use shadow_core::shadows::{derive_seed, LocationMode, Protocol, ProtocolSpec};
use shadow_core::weights::Ensemble;

use crate::config::{EnsembleSpec, ExperimentConfig, LocationSpec};
use crate::error::CliError;
use crate::format::fmt_sig15;

const OFFSET_DOMAIN: u64 = 0x4f46_4653_4554_0001;

pub const RESULT_HEADER: [&str; 12] = [
    "k",
    "ensemble",
    "mode",
    "n",
    "offset",
    "snapshots",
    "mean",
    "std_error",
    "variance",
    "second_moment",
    "theory_second_moment",
    "exact_expectation",
];

/// One estimation: an observable size and ensemble.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRow {
    pub k: usize,
    pub ensemble: String,
    pub mode: String,
    pub n: usize,
    pub offset: usize,
    pub snapshots: u64,
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub theory_second_moment: f64,
    pub exact_expectation: f64,
}

impl ResultRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.ensemble.clone(),
            self.mode.clone(),
            self.n.to_string(),
            self.offset.to_string(),
            self.snapshots.to_string(),
            fmt_sig15(self.mean),
            fmt_sig15(self.std_error),
            fmt_sig15(self.variance),
            fmt_sig15(self.second_moment),
            fmt_sig15(self.theory_second_moment),
            fmt_sig15(self.exact_expectation),
        ]
    }
}

fn ensemble_code(e: Ensemble) -> u64 {
    match e {
        Ensemble::Identity => 0,
        Ensemble::RandomClifford => 1,
        Ensemble::Contractive => 2,
    }
}

/// Master seed of the estimation for `(k, ensemble)`.
pub fn row_seed(seed: u64, k: usize, ensemble: Ensemble) -> u64 {
    derive_seed(seed, ((k as u64) << 8) | ensemble_code(ensemble))
}

/// Observable offset on the ring for size `k`.
pub fn observable_offset(cfg: &ExperimentConfig, seed: u64, k: usize, n: usize) -> usize {
    match cfg.location_mode {
        LocationSpec::Sliding { random_offset: true, .. } => {
            (derive_seed(seed ^ OFFSET_DOMAIN, k as u64) % n as u64) as usize
        }
        _ => cfg.base_offset() % n,
    }
}

/// Where snapshot log lines go, if anywhere.
pub type SnapshotLog<'a> = Option<&'a mut dyn Write>;

/// Runs every `(k, ensemble)` estimation of `cfg`, in order of `k` then
/// ensemble. `progress` sees each row as soon as it is finished.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    seed: u64,
    workers: usize,
    mut log: SnapshotLog<'_>,
    progress: &mut dyn FnMut(&ResultRow),
) -> Result<Vec<ResultRow>, CliError> {
    let ensembles = cfg.ensembles()?;
    let mut rows = Vec::new();
    for template in cfg.templates()? {
        let k = template.k;
        let state = cfg.build_state(k)?;
        let n = state.num_qubits();
        let offset = observable_offset(cfg, seed, k, n);
        let observable = template.place(n, offset);
        let exact = state.expectation_pauli(&observable)? as f64;
        let location = match cfg.location_mode {
            LocationSpec::Known { .. } => LocationMode::Known { offset, k },
            LocationSpec::Sliding { .. } => LocationMode::Sliding { k },
        };
        for &ensemble in &ensembles {
            let protocol = Protocol::new(ProtocolSpec {
                ensemble,
                location,
                system_n: n,
                snapshots: cfg.snapshots,
                master_seed: row_seed(seed, k, ensemble),
                workers,
            })
            .map_err(|e| CliError::Config(format!("location_mode: {e}")))?;
            let w = protocol.pauli_weight(&observable)?;
            let result = match log.as_mut() {
                Some(out) => {
                    writeln!(out, "# k={k} ensemble={ensemble} offset={offset}")?;
                    protocol.run_estimation_logged(&state, &observable, out)?
                }
                None => protocol.run_estimation(&state, &observable)?,
            };
            let row = ResultRow {
                k,
                ensemble: ensemble.name().into(),
                mode: location.name().into(),
                n,
                offset,
                snapshots: result.count,
                mean: result.mean,
                std_error: result.std_error,
                variance: result.unbiased_variance,
                second_moment: result.second_moment,
                theory_second_moment: 1.0 / w,
                exact_expectation: exact,
            };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_results_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULT_HEADER {
        return Err(CliError::Runtime(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// Ensembles compared by `figure-data`, in column order.
pub const FIGURE_ENSEMBLES: [Ensemble; 2] = [Ensemble::Contractive, Ensemble::RandomClifford];

pub fn figure_config(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut out = cfg.clone();
    out.ensemble = EnsembleSpec::Many(FIGURE_ENSEMBLES.iter().map(|e| e.name().to_string()).collect());
    out
}

/// One line per `k` with both ensembles side by side.
pub fn write_figure_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["k", "mode", "n", "offset", "snapshots", "exact_expectation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for e in FIGURE_ENSEMBLES {
        for field in ["mean", "std_error", "variance", "second_moment", "theory_second_moment"] {
            header.push(format!("{}_{field}", e.name()));
        }
    }
    w.write_record(&header)?;
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.dedup();
    for k in ks {
        let find = |e: Ensemble| {
            rows.iter()
                .find(|r| r.k == k && r.ensemble == e.name())
                .ok_or_else(|| CliError::Runtime(format!("missing {e} row for k={k}")))
        };
        let first = find(FIGURE_ENSEMBLES[0])?;
        let mut record = vec![
            k.to_string(),
            first.mode.clone(),
            first.n.to_string(),
            first.offset.to_string(),
            first.snapshots.to_string(),
            fmt_sig15(first.exact_expectation),
        ];
        for e in FIGURE_ENSEMBLES {
            let r = find(e)?;
            for v in [r.mean, r.std_error, r.variance, r.second_moment, r.theory_second_moment] {
                record.push(fmt_sig15(v));
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
