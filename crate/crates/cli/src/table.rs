use std::io::Write;

use shadow_core::weights::{WeightKind, WeightReport};

use crate::error::CliError;
use crate::format::fmt_sig15;

pub const WEIGHTS_HEADER: &str = "ensemble,k,q,weight,shadow_norm,reference";

/// Pauli weight, shadow norm and the leading-order reference norm for every
/// kind and `k = 1..=k_max`. Defect rows use `q` defects and start at
/// `k = q + 1`; other rows report `q = 0`.
pub fn weights_table<W: Write>(k_max: usize, kinds: &[WeightKind], q: usize, mut out: W) -> Result<(), CliError> {
    if k_max == 0 {
        return Err(CliError::Config("k_max must be at least 1".into()));
    }
    writeln!(out, "{WEIGHTS_HEADER}")?;
    for &kind in kinds {
        for k in 1..=k_max {
            let defects = kind == WeightKind::ContractiveDefects;
            if defects && k <= q {
                continue;
            }
            let report = WeightReport::compute(kind, k, q)?;
            writeln!(
                out,
                "{},{k},{},{},{},{}",
                kind.name(),
                if defects { q } else { 0 },
                fmt_sig15(report.pauli_weight),
                fmt_sig15(report.shadow_norm),
                fmt_sig15(report.reference_norm()),
            )?;
        }
    }
    Ok(())
}
