//! Self-checks grouped into suites, run by the `verify` subcommand.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{
    contractive_unitary, random_clifford, single_qubit_clifford_group, CliffordTableau,
};
use crate::error::Error;
use crate::oracle;
use crate::pauli::{Pauli, PauliString};
use crate::stabilizer::StabilizerState;
use crate::weights::{self, exact, Ensemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Pauli,
    Tableau,
    Oracle,
    Weights,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Pauli => "pauli",
            Suite::Tableau => "tableau",
            Suite::Oracle => "oracle",
            Suite::Weights => "weights",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "pauli" => Ok(Suite::Pauli),
            "tableau" => Ok(Suite::Tableau),
            "oracle" => Ok(Suite::Oracle),
            "weights" => Ok(Suite::Weights),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub result: Result<(), String>,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {}/{} ({:.3} s)",
            self.suite,
            self.name,
            self.elapsed.as_secs_f64()
        )?;
        if let Err(msg) = &self.result {
            write!(f, ": {msg}")?;
        }
        Ok(())
    }
}

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    let ops: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
    PauliString::from_paulis(&ops, rng.random_range(0..4))
}

fn pauli_round_trip() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let p = random_pauli(rng.random_range(1..140), &mut rng);
        let label = p.to_label();
        let back: PauliString = label.parse().map_err(|e: Error| e.to_string())?;
        ensure(back == p, || format!("{label} did not round-trip"))?;
    }
    Ok(())
}

fn pauli_associativity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..2000 {
        let n = rng.random_range(1..=6);
        let (a, b, c) = (random_pauli(n, &mut rng), random_pauli(n, &mut rng), random_pauli(n, &mut rng));
        let left = a.multiply(&b).and_then(|ab| ab.multiply(&c)).map_err(|e| e.to_string())?;
        let right = b.multiply(&c).and_then(|bc| a.multiply(&bc)).map_err(|e| e.to_string())?;
        ensure(left == right, || format!("({a})({b})({c}) not associative"))?;
    }
    Ok(())
}

fn pauli_commutation() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let n = rng.random_range(1..=8);
        let (a, b) = (random_pauli(n, &mut rng), random_pauli(n, &mut rng));
        let ab = a.multiply(&b).map_err(|e| e.to_string())?;
        let ba = b.multiply(&a).map_err(|e| e.to_string())?;
        let commutes = a.commutes(&b).map_err(|e| e.to_string())?;
        ensure(commutes == (ab.phase() == ba.phase()), || format!("{a}, {b}"))?;
    }
    Ok(())
}

fn pauli_counts() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let n = rng.random_range(1..=200);
        let p = random_pauli(n, &mut rng);
        let identities = p.body_label().chars().filter(|&ch| ch == 'I').count();
        ensure(p.size() + identities == n && p.count_xy() <= p.size(), || p.to_label())?;
    }
    Ok(())
}

fn tableau_invariants() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=12 {
        for _ in 0..50 {
            let t = random_clifford(k, &mut rng);
            t.check_invariants().map_err(|e| e.to_string())?;
            let back = t.compose(&t.inverse()).map_err(|e| e.to_string())?;
            ensure(back.is_identity(), || format!("U U^-1 != I at k={k}"))?;
        }
    }
    Ok(())
}

fn tableau_vs_dense() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..500 {
        let n = 1 + trial % 4;
        let circuit = oracle::random_circuit(n, 12, &mut rng);
        let t = CliffordTableau::from_circuit(n, &circuit).map_err(|e| e.to_string())?;
        let p = random_pauli(n, &mut rng);
        let dense = oracle::dense_conjugate_check(n, &circuit, &p).map_err(|e| e.to_string())?;
        let tab = t.conjugate(&p).map_err(|e| e.to_string())?;
        ensure(dense == tab, || format!("{p}: dense {dense}, tableau {tab}"))?;
    }
    Ok(())
}

fn single_qubit_group() -> Result<(), String> {
    let group = single_qubit_clifford_group();
    ensure(group.len() == 24, || format!("{} elements", group.len()))?;
    for a in group {
        for b in group {
            let ab = a.compose(b).map_err(|e| e.to_string())?;
            ensure(group.contains(&ab), || "not closed under composition".into())?;
        }
    }
    Ok(())
}

fn contractive_table() -> Result<(), String> {
    let u = contractive_unitary(2);
    for (from, to) in [("XZ", "-YI"), ("YZ", "+XI"), ("ZX", "-IY"), ("ZY", "+IX"), ("ZZ", "+ZZ")] {
        let p: PauliString = from.parse().map_err(|e: Error| e.to_string())?;
        let image = u.conjugate(&p).map_err(|e| e.to_string())?;
        ensure(image.to_label() == to, || format!("{from} -> {image}, expected {to}"))?;
    }
    Ok(())
}

fn contraction_bound() -> Result<(), String> {
    let all = oracle::enumerate_two_qubit_symplectics();
    ensure(all.len() == 720, || format!("{} symplectic maps", all.len()))?;
    let mut max = 0;
    for t in &all {
        max = max.max(oracle::contraction_count(t).map_err(|e| e.to_string())?);
    }
    ensure(max == 4, || format!("maximum contraction {max}"))?;
    let attained = oracle::contraction_count(&contractive_unitary(2)).map_err(|e| e.to_string())?;
    ensure(attained == 4, || format!("contractive unitary contracts {attained}"))
}

fn stabilizer_vs_dense() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = 1 + trial % 5;
        let circuit = oracle::random_circuit(n, 20, &mut rng);
        let mut s = StabilizerState::zero(n);
        for inst in &circuit {
            s.apply_gate(inst.gate, &inst.qubits).map_err(|e| e.to_string())?;
        }
        let mut d = oracle::DenseState::zero(n).map_err(|e| e.to_string())?;
        d.apply_circuit(&circuit).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let mut p = random_pauli(n, &mut rng);
            p.set_phase(p.phase() & 2);
            let stab = s.expectation_pauli(&p).map_err(|e| e.to_string())?;
            let dense = d.expectation(&p).map_err(|e| e.to_string())?;
            ensure((dense.re - stab as f64).abs() < 1e-10 && dense.im.abs() < 1e-10, || {
                format!("{p}: dense {dense}, stabilizer {stab}")
            })?;
        }
    }
    Ok(())
}

fn brute_force_weights() -> Result<(), String> {
    for k in 1..=8 {
        let brute = oracle::brute_force_weight(k, Ensemble::Contractive, &[]).map_err(|e| e.to_string())?;
        ensure(brute == exact::weight_contractive(k), || format!("k={k}: {brute}"))?;
        for q in 1..=2usize.min(k - 1) {
            let expected = exact::weight_contractive_defects(k, q).map_err(|e| e.to_string())?;
            let defects: Vec<usize> = (0..q).collect();
            let brute = oracle::brute_force_weight(k, Ensemble::Contractive, &defects).map_err(|e| e.to_string())?;
            ensure(brute == expected, || format!("k={k}, q={q}: {brute}"))?;
        }
    }
    Ok(())
}

fn closed_form_vs_sum() -> Result<(), String> {
    for k in 1..=30 {
        let (a, b) = (weights::weight_contractive(k), weights::weight_contractive_binomial_sum(k));
        ensure((a - b).abs() <= 1e-12 * b, || format!("k={k}: {a} vs {b}"))?;
        ensure(exact::weight_contractive(k) == exact::weight_contractive_binomial_sum(k), || {
            format!("k={k}: rationals differ")
        })?;
    }
    Ok(())
}

fn asymptotics() -> Result<(), String> {
    for k in 20..=60 {
        let r = weights::weight_contractive(k) * 1.8f64.powi(k as i32);
        ensure((r - 0.5).abs() < 1e-4, || format!("k={k}: {r}"))?;
    }
    for k in 25..=60 {
        let r = weights::weight_sliding_contractive(k) * k as f64 * 1.8f64.powi(k as i32);
        ensure((r / (19.0 / 32.0) - 1.0).abs() < 0.02, || format!("k={k}: {r}"))?;
    }
    Ok(())
}

fn checks(suite: Suite) -> Vec<(&'static str, &'static str, Check)> {
    let pauli: [(&str, Check); 4] = [
        ("label_round_trip", pauli_round_trip),
        ("product_associative", pauli_associativity),
        ("commutation_matches_phase", pauli_commutation),
        ("size_counts", pauli_counts),
    ];
    let tableau: [(&str, Check); 4] = [
        ("random_clifford_invariants", tableau_invariants),
        ("conjugation_matches_dense", tableau_vs_dense),
        ("single_qubit_group", single_qubit_group),
        ("contractive_two_qubit_images", contractive_table),
    ];
    let oracle_checks: [(&str, Check); 2] = [
        ("two_qubit_contraction_bound", contraction_bound),
        ("stabilizer_matches_dense", stabilizer_vs_dense),
    ];
    let weight_checks: [(&str, Check); 3] = [
        ("brute_force_rational_k_le_8", brute_force_weights),
        ("closed_form_matches_double_sum", closed_form_vs_sum),
        ("asymptotic_ratios", asymptotics),
    ];
    let tag = |s: &'static str, list: &[(&'static str, Check)]| {
        list.iter().map(move |&(n, c)| (s, n, c)).collect::<Vec<_>>()
    };
    match suite {
        Suite::Pauli => tag("pauli", &pauli),
        Suite::Tableau => tag("tableau", &tableau),
        Suite::Oracle => tag("oracle", &oracle_checks),
        Suite::Weights => tag("weights", &weight_checks),
        Suite::All => [Suite::Pauli, Suite::Tableau, Suite::Oracle, Suite::Weights]
            .into_iter()
            .flat_map(checks)
            .collect(),
    }
}

/// Runs every check of `suite`, timing each one.
pub fn run_suite(suite: Suite) -> Vec<CheckOutcome> {
    checks(suite)
        .into_iter()
        .map(|(suite, name, check)| {
            let start = Instant::now();
            let result = check();
            CheckOutcome {
                suite,
                name,
                result,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        let outcomes = run_suite(Suite::All);
        assert_eq!(outcomes.len(), 13);
        for o in &outcomes {
            assert!(o.passed(), "{o}");
        }
        assert!(outcomes.iter().any(|o| o.name == "two_qubit_contraction_bound"));
        assert!(outcomes.iter().any(|o| o.name == "brute_force_rational_k_le_8"));
        assert_eq!("oracle".parse::<Suite>().unwrap(), Suite::Oracle);
    }
}
