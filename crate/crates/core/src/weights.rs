//! Operator-size distributions, Pauli weights and shadow norms.
//!
//! The Pauli weight of an ensemble is `w = Σ_m π(m) / 3^m`, where `π` is the
//! size distribution of the evolved operator after the first random local
//! layer; the shadow norm is `1/w`. Float routines are the runtime default,
//! [`exact`] mirrors them in arbitrary-precision rationals.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Global unitary sandwiched between the two random local layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ensemble {
    /// No global unitary, only the local layers.
    Identity,
    /// Uniformly random Clifford on the block.
    RandomClifford,
    /// The contractive unitary on the block.
    Contractive,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Identity, Ensemble::RandomClifford, Ensemble::Contractive];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Identity => "identity",
            Ensemble::RandomClifford => "random_clifford",
            Ensemble::Contractive => "contractive",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Ensemble::Identity),
            "random_clifford" | "rc" => Ok(Ensemble::RandomClifford),
            "contractive" | "ct" => Ok(Ensemble::Contractive),
            other => Err(Error::InvalidArgument(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// Probability of each operator size `m = 0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    k: usize,
    probs: Vec<f64>,
}

impl SizeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty size distribution".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "size distribution sums to {total}"
            )));
        }
        Ok(SizeDistribution {
            k: probs.len() - 1,
            probs,
        })
    }

    /// All mass on size `m`.
    pub fn delta(k: usize, m: usize) -> Self {
        assert!(m <= k);
        let mut probs = vec![0.0; k + 1];
        probs[m] = 1.0;
        SizeDistribution { k, probs }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Index of the largest entry.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (m, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = m;
            }
        }
        best
    }

    pub fn weight(&self) -> f64 {
        weight_from_distribution(self)
    }
}

/// `Σ_m π(m) / 3^m`.
pub fn weight_from_distribution(d: &SizeDistribution) -> f64 {
    d.probs
        .iter()
        .enumerate()
        .map(|(m, p)| p * 3f64.powi(-(m as i32)))
        .sum()
}

/// `ln C(k, m)` for `m = 0..=k`.
fn ln_binomials(k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for m in 1..=k {
        acc += ((k - m + 1) as f64).ln() - (m as f64).ln();
        out.push(acc);
    }
    out
}

/// Size distribution of a full-support size-`k` string after a random local
/// layer and the contractive unitary.
///
/// Each of the `C(k, N) 2^N` local images with `N` X/Y factors contracts to
/// size `N` when `N` is odd and keeps size `k` otherwise.
pub fn size_distribution_contractive(k: usize) -> SizeDistribution {
    assert!(k >= 1);
    let lnc = ln_binomials(k);
    let mut probs = vec![0.0; k + 1];
    let ln3 = 3f64.ln();
    for nxy in 0..=k {
        let p = (lnc[nxy] + nxy as f64 * 2f64.ln() - k as f64 * ln3).exp();
        let size = if nxy % 2 == 1 { nxy } else { k };
        probs[size] += p;
    }
    SizeDistribution { k, probs }
}

/// `π(m) = C(k, m) 3^m / (4^k - 1)` for `m >= 1`.
pub fn size_distribution_random_clifford(k: usize) -> SizeDistribution {
    assert!(k >= 1);
    let lnc = ln_binomials(k);
    let ln_norm = k as f64 * 4f64.ln() + (-(4f64.powi(-(k as i32)))).ln_1p();
    let mut probs = vec![0.0; k + 1];
    for m in 1..=k {
        probs[m] = (lnc[m] + m as f64 * 3f64.ln() - ln_norm).exp();
    }
    SizeDistribution { k, probs }
}

/// Local layers only: the size never changes.
pub fn size_distribution_identity(k: usize) -> SizeDistribution {
    SizeDistribution::delta(k, k)
}

/// Closed form of the contractive weight:
/// `½[3^-k + (-1/9)^k] + ½[(5/9)^k - 9^-k]`.
pub fn weight_contractive(k: usize) -> f64 {
    assert!(k >= 1);
    contractive_closed_form(k, 0)
}

fn contractive_closed_form(size: usize, defects: usize) -> f64 {
    let s = size as i32;
    let even = 0.5 * (3f64.powi(-s) + (-1.0f64 / 9.0).powi(s));
    let odd = 0.5 * ((5.0f64 / 9.0).powi(s) - 9f64.powi(-s));
    even + odd * 3f64.powi(-(defects as i32))
}

/// The contractive weight as the explicit even/odd binomial double sum over
/// the number of X/Y factors.
pub fn weight_contractive_binomial_sum(k: usize) -> f64 {
    assert!(k >= 1);
    let lnc = ln_binomials(k);
    let ln2 = 2f64.ln();
    let ln3 = 3f64.ln();
    let mut even = 0.0;
    let mut odd = 0.0;
    for nxy in 0..=k {
        let multiplicity = lnc[nxy] + nxy as f64 * ln2 - k as f64 * ln3;
        if nxy % 2 == 0 {
            even += (multiplicity - k as f64 * ln3).exp();
        } else {
            odd += (multiplicity - nxy as f64 * ln3).exp();
        }
    }
    even + odd
}

/// `1 / (2^k + 1)`.
pub fn weight_random_clifford(k: usize) -> f64 {
    assert!(k >= 1);
    1.0 / (2f64.powi(k as i32) + 1.0)
}

/// `3^-k`: local layers alone.
pub fn weight_identity(k: usize) -> f64 {
    3f64.powi(-(k as i32))
}

/// Contractive weight of a string spanning a `k`-qubit block with `q`
/// identity sites inside the block (operator size `k - q`).
///
/// In terms of the operator size `s = k - q`:
/// `½[3^-s + (-1/9)^s] + ½[(5/9)^s - 9^-s] · 3^-q`.
pub fn weight_contractive_defects(k: usize, q: usize) -> Result<f64> {
    if q >= k {
        return Err(Error::InvalidArgument(format!(
            "defect count {q} must be smaller than the span {k}"
        )));
    }
    Ok(contractive_closed_form(k - q, q))
}

/// Weight of the part of a string that occupies `size` sites of a
/// `span`-qubit contractive block; `size == 0` gives 1.
pub fn contractive_block_weight(span: usize, size: usize) -> f64 {
    assert!(size <= span);
    if size == 0 {
        1.0
    } else {
        contractive_closed_form(size, span - size)
    }
}

/// Per-block weight for a string with `support` non-identity sites inside a
/// block of `block_size` qubits. Blocks with no support contribute 1.
pub fn block_weight(ensemble: Ensemble, block_size: usize, support: usize) -> f64 {
    assert!(support <= block_size);
    if support == 0 {
        return 1.0;
    }
    match ensemble {
        Ensemble::Identity => weight_identity(support),
        Ensemble::RandomClifford => weight_random_clifford(block_size),
        Ensemble::Contractive => contractive_block_weight(block_size, support),
    }
}

/// Sliding-trick weight with contractive blocks of size `k`:
/// `(1/k) Σ_{k1=1..k} w(k1; k) · w(k - k1; k)`.
pub fn weight_sliding_contractive(k: usize) -> f64 {
    assert!(k >= 1);
    let total: f64 = (1..=k)
        .map(|k1| contractive_block_weight(k, k1) * contractive_block_weight(k, k - k1))
        .sum();
    total / k as f64
}

/// Sliding-trick weight with random-Clifford blocks of size `k`:
/// `(1/k)/(2^k+1) + ((k-1)/k)/(2^k+1)^2`.
pub fn weight_sliding_random_clifford(k: usize) -> f64 {
    assert!(k >= 1);
    let w = weight_random_clifford(k);
    let kf = k as f64;
    w / kf + (kf - 1.0) / kf * w * w
}

/// Defect fraction `γ` at which `(5/3)^γ · 1.8 = 2`, i.e. where the
/// contractive protocol with `q = γk` defects matches random Cliffords.
pub fn defect_crossover_gamma() -> f64 {
    (2.0f64 / 1.8).ln() / (5.0f64 / 3.0).ln()
}

/// Which closed form a [`WeightReport`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Identity,
    RandomClifford,
    Contractive,
    ContractiveDefects,
    SlidingContractive,
    SlidingRandomClifford,
}

impl WeightKind {
    pub const ALL: [WeightKind; 6] = [
        WeightKind::Identity,
        WeightKind::RandomClifford,
        WeightKind::Contractive,
        WeightKind::ContractiveDefects,
        WeightKind::SlidingContractive,
        WeightKind::SlidingRandomClifford,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Identity => "identity",
            WeightKind::RandomClifford => "random_clifford",
            WeightKind::Contractive => "contractive",
            WeightKind::ContractiveDefects => "contractive_defects",
            WeightKind::SlidingContractive => "sliding_contractive",
            WeightKind::SlidingRandomClifford => "sliding_random_clifford",
        }
    }

    /// Leading-order shadow norm used as a comparison column.
    pub fn reference_norm(self, k: usize, q: usize) -> f64 {
        let kf = k as f64;
        match self {
            WeightKind::Identity => 3f64.powi(k as i32),
            WeightKind::RandomClifford => 2f64.powi(k as i32) + 1.0,
            WeightKind::Contractive => 2.0 * 1.8f64.powi(k as i32),
            WeightKind::ContractiveDefects => {
                (5.0f64 / 3.0).powi(q as i32) * 2.0 * 1.8f64.powi(k as i32)
            }
            WeightKind::SlidingContractive => 32.0 / 19.0 * kf * 1.8f64.powi(k as i32),
            WeightKind::SlidingRandomClifford => kf * (2f64.powi(k as i32) + 1.0),
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown weight kind {s:?}")))
    }
}

/// A Pauli weight together with its shadow norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub kind: WeightKind,
    pub k: usize,
    pub q: Option<usize>,
    pub pauli_weight: f64,
    pub shadow_norm: f64,
}

impl WeightReport {
    pub fn new(kind: WeightKind, k: usize, q: Option<usize>, pauli_weight: f64) -> Result<Self> {
        if !(pauli_weight > 0.0 && pauli_weight <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Pauli weight {pauli_weight} outside (0, 1]"
            )));
        }
        Ok(WeightReport {
            kind,
            k,
            q,
            pauli_weight,
            shadow_norm: 1.0 / pauli_weight,
        })
    }

    /// Evaluates the closed form for `kind`. `q` is only read for defects.
    pub fn compute(kind: WeightKind, k: usize, q: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        let (w, q) = match kind {
            WeightKind::Identity => (weight_identity(k), None),
            WeightKind::RandomClifford => (weight_random_clifford(k), None),
            WeightKind::Contractive => (weight_contractive(k), None),
            WeightKind::ContractiveDefects => (weight_contractive_defects(k, q)?, Some(q)),
            WeightKind::SlidingContractive => (weight_sliding_contractive(k), None),
            WeightKind::SlidingRandomClifford => (weight_sliding_random_clifford(k), None),
        };
        Self::new(kind, k, q, w)
    }

    pub fn reference_norm(&self) -> f64 {
        self.kind.reference_norm(self.k, self.q.unwrap_or(0))
    }
}

/// Exact rational versions of the weight formulas.
pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    use crate::error::{Error, Result};

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn frac(num: i64, den: i64) -> BigRational {
        BigRational::new(int(num), int(den))
    }

    pub fn pow(base: &BigRational, e: usize) -> BigRational {
        let mut out = BigRational::one();
        for _ in 0..e {
            out *= base;
        }
        out
    }

    /// `3^-m`.
    pub fn inv_pow3(m: usize) -> BigRational {
        BigRational::new(BigInt::one(), int(3).pow(m as u32))
    }

    fn closed_form(size: usize, defects: usize) -> BigRational {
        let half = frac(1, 2);
        let even = &half * (inv_pow3(size) + pow(&frac(-1, 9), size));
        let odd = &half * (pow(&frac(5, 9), size) - pow(&frac(1, 9), size));
        even + odd * inv_pow3(defects)
    }

    pub fn weight_contractive(k: usize) -> BigRational {
        assert!(k >= 1);
        closed_form(k, 0)
    }

    pub fn weight_contractive_defects(k: usize, q: usize) -> Result<BigRational> {
        if q >= k {
            return Err(Error::InvalidArgument(format!(
                "defect count {q} must be smaller than the span {k}"
            )));
        }
        Ok(closed_form(k - q, q))
    }

    pub fn contractive_block_weight(span: usize, size: usize) -> BigRational {
        assert!(size <= span);
        if size == 0 {
            BigRational::one()
        } else {
            closed_form(size, span - size)
        }
    }

    pub fn binomial(n: usize, k: usize) -> BigInt {
        let mut out = BigInt::one();
        for i in 0..k {
            out = out * int((n - i) as i64) / int((i + 1) as i64);
        }
        out
    }

    /// Even/odd binomial double sum over the number of X/Y factors.
    pub fn weight_contractive_binomial_sum(k: usize) -> BigRational {
        let mut total = BigRational::zero();
        for nxy in 0..=k {
            let count = BigRational::from_integer(binomial(k, nxy) * int(2).pow(nxy as u32));
            let size = if nxy % 2 == 1 { nxy } else { k };
            total += count * inv_pow3(k) * inv_pow3(size);
        }
        total
    }

    pub fn weight_random_clifford(k: usize) -> BigRational {
        BigRational::new(BigInt::one(), int(2).pow(k as u32) + BigInt::one())
    }

    pub fn weight_sliding_contractive(k: usize) -> BigRational {
        assert!(k >= 1);
        let mut total = BigRational::zero();
        for k1 in 1..=k {
            total += contractive_block_weight(k, k1) * contractive_block_weight(k, k - k1);
        }
        total / BigRational::from_integer(int(k as i64))
    }

    pub fn weight_sliding_random_clifford(k: usize) -> BigRational {
        assert!(k >= 1);
        let w = weight_random_clifford(k);
        let kk = BigRational::from_integer(int(k as i64));
        &w / &kk + (&kk - BigRational::one()) / &kk * &w * &w
    }

    /// Random-Clifford size distribution as exact fractions.
    pub fn size_distribution_random_clifford(k: usize) -> Vec<BigRational> {
        let denom = int(4).pow(k as u32) - BigInt::one();
        (0..=k)
            .map(|m| {
                if m == 0 {
                    BigRational::zero()
                } else {
                    BigRational::new(binomial(k, m) * int(3).pow(m as u32), denom.clone())
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(a.abs())
    }

    #[test]
    fn weight_from_distribution_examples() {
        assert!(close(weight_from_distribution(&SizeDistribution::delta(2, 2)), 1.0 / 9.0, 1e-15));
        assert_eq!(weight_from_distribution(&SizeDistribution::delta(3, 0)), 1.0);
        let d = SizeDistribution::new(vec![0.0, 4.0 / 9.0, 5.0 / 9.0]).unwrap();
        assert!(close(d.weight(), 17.0 / 81.0, 1e-15));
        assert!(SizeDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(SizeDistribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn contractive_distribution() {
        let d1 = size_distribution_contractive(1);
        assert!(close(d1.probs()[1], 1.0, 1e-15));
        let d2 = size_distribution_contractive(2);
        assert!(close(d2.probs()[1], 4.0 / 9.0, 1e-14));
        assert!(close(d2.probs()[2], 5.0 / 9.0, 1e-14));
        assert_eq!(d2.probs()[0], 0.0);

        let d50 = size_distribution_contractive(50);
        let total: f64 = d50.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((d50.probs()[50] - 0.5).abs() < 1e-12);
        let broad: f64 = d50.probs()[..50].iter().sum();
        assert!((broad - 0.5).abs() < 1e-12);
        let broad_mode = (0..50).max_by(|&a, &b| d50.probs()[a].total_cmp(&d50.probs()[b])).unwrap();
        // odd sizes only, peaked around 2k/3
        assert!((31..=35).contains(&broad_mode), "{broad_mode}");
    }

    #[test]
    fn random_clifford_distribution() {
        assert!(close(size_distribution_random_clifford(1).probs()[1], 1.0, 1e-14));
        let d2 = size_distribution_random_clifford(2);
        assert!(close(d2.probs()[1], 6.0 / 15.0, 1e-14));
        assert!(close(d2.probs()[2], 9.0 / 15.0, 1e-14));
        let d50 = size_distribution_random_clifford(50);
        assert!((37..=38).contains(&d50.mode()));
        for k in 1..=40 {
            let d = size_distribution_random_clifford(k);
            assert!(close(d.weight(), weight_random_clifford(k), 1e-12), "k={k}");
        }
    }

    #[test]
    fn contractive_weight_values() {
        assert!(close(weight_contractive(1), 1.0 / 3.0, 1e-15));
        assert!(close(weight_contractive(2), 17.0 / 81.0, 1e-15));
        // exact value 0.00140884449253334, shadow norm 709.80
        assert!(close(weight_contractive(10), 0.0014088444925333368, 1e-12));
        assert!((1.0 / weight_contractive(10) - 709.8015467994154).abs() < 1e-8);
        for k in 1..=30 {
            let d = size_distribution_contractive(k);
            assert!(close(d.weight(), weight_contractive(k), 1e-12), "k={k}");
            assert!(close(weight_contractive_binomial_sum(k), weight_contractive(k), 1e-12));
        }
    }

    #[test]
    fn random_clifford_weight_values() {
        assert!(close(weight_random_clifford(1), 1.0 / 3.0, 1e-15));
        assert!(close(weight_random_clifford(2), 0.2, 1e-15));
        assert!(close(weight_random_clifford(10), 1.0 / 1025.0, 1e-15));
    }

    #[test]
    fn defect_weights() {
        for k in 1..=12 {
            assert_eq!(weight_contractive_defects(k, 0).unwrap(), weight_contractive(k));
        }
        assert!(close(weight_contractive_defects(3, 1).unwrap(), 1.0 / 9.0, 1e-14));
        assert!(weight_contractive_defects(3, 3).is_err());
        assert!((defect_crossover_gamma() - 0.206).abs() < 5e-4);
    }

    #[test]
    fn sliding_weights() {
        assert!(close(weight_sliding_contractive(1), 1.0 / 3.0, 1e-15));
        assert!(close(weight_sliding_contractive(2), 89.0 / 729.0, 1e-14));
        assert!(close(weight_sliding_contractive(3), 97.0 / 2187.0, 1e-14));
        assert!(close(weight_sliding_random_clifford(1), 1.0 / 3.0, 1e-15));
        assert!(close(weight_sliding_random_clifford(2), 3.0 / 25.0, 1e-14));
        assert!(close(weight_sliding_random_clifford(10), 9.841760856632956e-05, 1e-12));
    }

    #[test]
    fn asymptotic_ratios() {
        for k in 20..=60 {
            assert!((weight_contractive(k) * 1.8f64.powi(k as i32) - 0.5).abs() < 1e-4);
        }
        for k in 25..=60 {
            let r = weight_sliding_contractive(k) * k as f64 * 1.8f64.powi(k as i32);
            assert!((r / (19.0 / 32.0) - 1.0).abs() < 0.02, "k={k} r={r}");
        }
    }

    #[test]
    fn rational_paths_agree() {
        assert_eq!(exact::weight_contractive(2), q(17, 81));
        assert_eq!(exact::weight_contractive_defects(3, 1).unwrap(), q(1, 9));
        assert_eq!(exact::weight_sliding_contractive(2), q(89, 729));
        assert_eq!(exact::weight_sliding_contractive(3), q(97, 2187));
        assert_eq!(exact::weight_sliding_random_clifford(2), q(3, 25));
        for k in 1..=30 {
            let w = exact::weight_contractive(k);
            assert_eq!(exact::weight_contractive_binomial_sum(k), w, "k={k}");
            assert!(close(w.to_f64().unwrap(), weight_contractive(k), 1e-12));
            let s = exact::weight_sliding_contractive(k);
            assert!(close(s.to_f64().unwrap(), weight_sliding_contractive(k), 1e-12));
        }
    }

    #[test]
    fn reports() {
        let r = WeightReport::compute(WeightKind::RandomClifford, 10, 0).unwrap();
        assert_eq!(r.shadow_norm, 1025.0);
        for kind in WeightKind::ALL {
            for k in 1..=20 {
                let r = WeightReport::compute(kind, k, k / 3).unwrap();
                assert!((r.shadow_norm * r.pauli_weight - 1.0).abs() < 1e-12);
            }
        }
        assert!(WeightReport::compute(WeightKind::ContractiveDefects, 3, 3).is_err());
        assert_eq!("sliding_contractive".parse::<WeightKind>().unwrap(), WeightKind::SlidingContractive);
    }
}
