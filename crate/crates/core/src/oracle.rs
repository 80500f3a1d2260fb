//! Independent reference implementations: a dense state-vector simulator,
//! exact brute-force Pauli weights, and exhaustive two-qubit Clifford
//! enumeration.
//!
//! Dense amplitudes are indexed little-endian: qubit `j` is bit `j` of the
//! basis index. Pauli strings are read site by site from their labels; none
//! of the symplectic machinery is used to produce dense results.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::FRAC_1_SQRT_2;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::clifford::{CliffordTableau, Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::stabilizer::StabilizerState;
use crate::weights::Ensemble;

pub const MAX_DENSE_QUBITS: usize = 10;
pub const MAX_CONJUGATE_QUBITS: usize = 6;
pub const MAX_BRUTE_FORCE_K: usize = 8;

const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn i_pow(e: u8) -> Complex64 {
    match e & 3 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

/// `P|b⟩ = coeff · |b'⟩`, computed site by site from the single-qubit
/// matrices.
pub fn pauli_on_basis(p: &PauliString, b: usize) -> (Complex64, usize) {
    let mut coeff = i_pow(p.phase());
    let mut out = b;
    for j in 0..p.num_qubits() {
        let bit = (b >> j) & 1;
        match p.get(j) {
            Pauli::I => {}
            Pauli::X => out ^= 1 << j,
            Pauli::Z => {
                if bit == 1 {
                    coeff = -coeff;
                }
            }
            Pauli::Y => {
                out ^= 1 << j;
                coeff *= if bit == 0 { c(0.0, 1.0) } else { c(0.0, -1.0) };
            }
        }
    }
    (coeff, out)
}

fn check_dense_size(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooLarge {
            what: "dense register",
            value: n,
            max,
        });
    }
    Ok(())
}

/// A pure state as a vector of `2^n` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_dense_size(n, MAX_DENSE_QUBITS)?;
        let mut amps = vec![Complex64::zero(); 1 << n];
        amps[index] = Complex64::one();
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{len} amplitudes is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_dense_size(n, MAX_DENSE_QUBITS)?;
        let state = DenseState { n, amps };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument("state is not normalized".into()));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probability of each basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { index: q, n: self.n });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::RepeatedQubit { gate: "dense", index: q });
            }
        }
        Ok(())
    }

    /// `P|ψ⟩` (not normalized if `P` carries an imaginary phase, but still unit norm).
    pub fn apply_pauli(&self, p: &PauliString) -> Result<DenseState> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        let mut out = vec![Complex64::zero(); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if a != Complex64::zero() {
                let (coeff, b2) = pauli_on_basis(p, b);
                out[b2] += coeff * a;
            }
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        let moved = self.apply_pauli(p)?;
        Ok(self.amps.iter().zip(&moved.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        if qubits.len() != gate.arity() {
            return Err(Error::GateArity {
                gate: gate.name(),
                expected: gate.arity(),
                found: qubits.len(),
            });
        }
        self.check_qubits(qubits)?;
        let z = Complex64::zero();
        let o = Complex64::one();
        let h = c(FRAC_1_SQRT_2, 0.0);
        match gate {
            Gate::H => self.apply_single(qubits[0], [[h, h], [h, -h]]),
            Gate::S => self.apply_single(qubits[0], [[o, z], [z, c(0.0, 1.0)]]),
            Gate::Sdg => self.apply_single(qubits[0], [[o, z], [z, c(0.0, -1.0)]]),
            Gate::X => self.apply_single(qubits[0], [[z, o], [o, z]]),
            Gate::Y => self.apply_single(qubits[0], [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]]),
            Gate::Z => self.apply_single(qubits[0], [[o, z], [z, -o]]),
            Gate::CZ => {
                let mask = (1 << qubits[0]) | (1 << qubits[1]);
                for (b, a) in self.amps.iter_mut().enumerate() {
                    if b & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Gate::CNOT => {
                let (ctrl, tgt) = (1 << qubits[0], 1 << qubits[1]);
                for b in 0..self.amps.len() {
                    if b & ctrl != 0 && b & tgt == 0 {
                        self.amps.swap(b, b | tgt);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &[Instruction]) -> Result<()> {
        for inst in circuit {
            self.apply_gate(inst.gate, &inst.qubits)?;
        }
        Ok(())
    }

    /// `exp(iθ Z_a Z_b)`: phase `e^{iθ}` when the bits agree, `e^{-iθ}` otherwise.
    pub fn apply_zz_rotation(&mut self, a: usize, b: usize, theta: f64) -> Result<()> {
        self.check_qubits(&[a, b])?;
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((idx >> a) ^ (idx >> b)) & 1;
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            *amp *= Complex64::from_polar(1.0, sign * theta);
        }
        Ok(())
    }

    /// Overlap magnitude `|⟨φ|ψ⟩|`, insensitive to global phase.
    pub fn overlap_abs(&self, other: &DenseState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Multiplies by a global phase making the first significant amplitude
    /// real and positive.
    pub fn canonicalize_phase(&mut self) {
        if let Some(a) = self.amps.iter().find(|a| a.norm() > 1e-6).copied() {
            let f = a.conj() / a.norm();
            self.amps.iter_mut().for_each(|x| *x *= f);
        }
    }
}

/// The state vector stabilized by every generator of `state`.
///
/// Projects basis vectors with `Π (I + S_i)/2` until one survives.
pub fn dense_from_stabilizer(state: &StabilizerState) -> Result<DenseState> {
    let n = state.num_qubits();
    check_dense_size(n, MAX_DENSE_QUBITS)?;
    for start in 0..(1usize << n) {
        let mut v = DenseState::basis(n, start)?;
        for s in state.stabilizers() {
            let moved = v.apply_pauli(s)?;
            for (a, b) in v.amps.iter_mut().zip(&moved.amps) {
                *a = (*a + b) * 0.5;
            }
        }
        let norm = v.norm_sqr();
        if norm > 1e-6 {
            let scale = 1.0 / norm.sqrt();
            v.amps.iter_mut().for_each(|a| *a *= scale);
            for s in state.stabilizers() {
                let e = v.expectation(s)?;
                if (e - Complex64::one()).norm() > 1e-8 {
                    return Err(Error::InvalidGenerators(format!("{s} not stabilized")));
                }
            }
            v.canonicalize_phase();
            return Ok(v);
        }
    }
    Err(Error::InvalidGenerators("generators have no common +1 eigenvector".into()))
}

fn round_unit(z: Complex64) -> Option<u8> {
    (0..4u8).find(|&e| (z - i_pow(e)).norm() < TOL)
}

/// Identifies the operator with columns `M|b⟩ = coeffs[b] |b ⊕ x⟩` as a
/// signed Pauli string, or fails if it is not one.
fn monomial_to_pauli(n: usize, x: usize, coeffs: &[Complex64]) -> Result<PauliString> {
    // For Q = i^a ⊗σ_j, Q|b⟩ = i^a Π_j s_j(b_j) |b ⊕ x⟩ with
    // s_X = 1, s_Z = (-1)^b, s_Y = i(-1)^b.
    let c0 = coeffs[0];
    let mut ops = Vec::with_capacity(n);
    let mut y_count = 0u8;
    for j in 0..n {
        let ratio = coeffs[1 << j] / c0;
        let flips_sign = match round_unit(ratio) {
            Some(0) => false,
            Some(2) => true,
            _ => return Err(Error::NotPauli),
        };
        let op = match ((x >> j) & 1 == 1, flips_sign) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => {
                y_count += 1;
                Pauli::Y
            }
        };
        ops.push(op);
    }
    let a = round_unit(c0).ok_or(Error::NotPauli)?;
    let candidate = PauliString::from_paulis(&ops, (a + 4 - (y_count & 3)) & 3);
    for (b, &coeff) in coeffs.iter().enumerate() {
        let (expected, b2) = pauli_on_basis(&candidate, b);
        if b2 != b ^ x || (expected - coeff).norm() > TOL {
            return Err(Error::NotPauli);
        }
    }
    Ok(candidate)
}

/// Identifies a dense `2^n × 2^n` matrix (given by columns) as a signed Pauli.
pub fn dense_matrix_to_pauli(n: usize, columns: &[Vec<Complex64>]) -> Result<PauliString> {
    let dim = 1usize << n;
    if columns.len() != dim || columns.iter().any(|col| col.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: columns.len(),
        });
    }
    let x = columns[0]
        .iter()
        .position(|a| a.norm() > TOL)
        .ok_or(Error::NotPauli)?;
    let mut coeffs = Vec::with_capacity(dim);
    for (b, col) in columns.iter().enumerate() {
        for (row, a) in col.iter().enumerate() {
            if row != b ^ x && a.norm() > TOL {
                return Err(Error::NotPauli);
            }
        }
        coeffs.push(col[b ^ x]);
    }
    monomial_to_pauli(n, x, &coeffs)
}

fn inverse_circuit(circuit: &[Instruction]) -> Vec<Instruction> {
    circuit
        .iter()
        .rev()
        .map(|inst| {
            let gate = match inst.gate {
                Gate::S => Gate::Sdg,
                Gate::Sdg => Gate::S,
                g => g,
            };
            Instruction::new(gate, &inst.qubits)
        })
        .collect()
}

/// `U P U†` computed from dense matrices, where `U` is the product of the
/// circuit's gates (first instruction applied first).
pub fn dense_conjugate_check(n: usize, circuit: &[Instruction], p: &PauliString) -> Result<PauliString> {
    check_dense_size(n, MAX_CONJUGATE_QUBITS)?;
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.num_qubits(),
        });
    }
    let inverse = inverse_circuit(circuit);
    let mut columns = Vec::with_capacity(1 << n);
    for b in 0..(1usize << n) {
        let mut v = DenseState::basis(n, b)?;
        v.apply_circuit(&inverse)?;
        let mut v = v.apply_pauli(p)?;
        v.apply_circuit(circuit)?;
        columns.push(v.amps);
    }
    dense_matrix_to_pauli(n, &columns)
}

/// Diagonal of `Π_{i<j} exp(iπ/4 Z_i Z_j)` on `k` qubits, built by applying
/// the two-qubit rotations to the all-ones vector.
pub fn contractive_diagonal(k: usize) -> Result<Vec<Complex64>> {
    check_dense_size(k, MAX_DENSE_QUBITS)?;
    let mut v = DenseState {
        n: k,
        amps: vec![Complex64::one(); 1 << k],
    };
    for i in 0..k {
        for j in (i + 1)..k {
            v.apply_zz_rotation(i, j, std::f64::consts::FRAC_PI_4)?;
        }
    }
    Ok(v.amps)
}

/// `D P D†` for a diagonal unitary `D`.
pub fn conjugate_by_diagonal(diag: &[Complex64], p: &PauliString) -> Result<PauliString> {
    let n = p.num_qubits();
    if diag.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: diag.len(),
        });
    }
    let mut x = 0usize;
    let mut coeffs = Vec::with_capacity(diag.len());
    for b in 0..diag.len() {
        let (coeff, b2) = pauli_on_basis(p, b);
        x = b ^ b2;
        coeffs.push(diag[b2] * coeff * diag[b].conj());
    }
    monomial_to_pauli(n, x, &coeffs)
}

/// Exact Pauli weight by enumeration: the average of `3^{-size}` of
/// `U_g P U_g†` over all `3^{k-q}` local images `P` of a string spanning `k`
/// qubits whose `defects` sites are identity.
pub fn brute_force_weight(k: usize, ensemble: Ensemble, defects: &[usize]) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > MAX_BRUTE_FORCE_K {
        return Err(Error::TooLarge {
            what: "brute-force span",
            value: k,
            max: MAX_BRUTE_FORCE_K,
        });
    }
    let mut is_defect = vec![false; k];
    for &d in defects {
        if d >= k {
            return Err(Error::QubitOutOfRange { index: d, n: k });
        }
        if is_defect[d] {
            return Err(Error::InvalidArgument(format!("defect {d} repeated")));
        }
        is_defect[d] = true;
    }
    let active: Vec<usize> = (0..k).filter(|&j| !is_defect[j]).collect();
    if active.is_empty() {
        return Err(Error::InvalidArgument("string has no support".into()));
    }
    let diag = match ensemble {
        Ensemble::Contractive => Some(contractive_diagonal(k)?),
        Ensemble::Identity => None,
        Ensemble::RandomClifford => {
            return Err(Error::InvalidArgument(
                "brute-force weights need a fixed middle unitary".into(),
            ))
        }
    };
    let total_images = 3usize.pow(active.len() as u32);
    // counts[m] = number of local images with evolved size m
    let mut counts = vec![0u64; k + 1];
    let mut ops = vec![Pauli::I; k];
    for code in 0..total_images {
        let mut rest = code;
        for &site in &active {
            ops[site] = Pauli::NONTRIVIAL[rest % 3];
            rest /= 3;
        }
        let p = PauliString::from_paulis(&ops, 0);
        let size = match &diag {
            Some(d) => conjugate_by_diagonal(d, &p)?.size(),
            None => p.size(),
        };
        counts[size] += 1;
    }
    let three = BigInt::from(3);
    let mut total = BigRational::zero();
    for (m, &count) in counts.iter().enumerate() {
        if count > 0 {
            total += BigRational::new(BigInt::from(count), three.pow(m as u32));
        }
    }
    Ok(total / BigRational::from_integer(BigInt::from(total_images)))
}

/// Every two-qubit symplectic map, signs stripped, found by closing the
/// identity under `H₀, H₁, S₀, S₁, CZ`.
pub fn enumerate_two_qubit_symplectics() -> Vec<CliffordTableau> {
    let generators: [(Gate, &[usize]); 5] = [
        (Gate::H, &[0]),
        (Gate::H, &[1]),
        (Gate::S, &[0]),
        (Gate::S, &[1]),
        (Gate::CZ, &[0, 1]),
    ];
    let start = CliffordTableau::identity(2);
    let mut seen: HashSet<CliffordTableau> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &(gate, qubits) in &generators {
            let next = t.apply_gate(gate, qubits).expect("valid two-qubit gate").unsigned();
            if seen.insert(next.clone()) {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    order
}

/// How many of the nine size-2 strings a two-qubit Clifford maps to size 1.
pub fn contraction_count(t: &CliffordTableau) -> Result<usize> {
    if t.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: t.num_qubits(),
        });
    }
    let mut count = 0;
    for a in Pauli::NONTRIVIAL {
        for b in Pauli::NONTRIVIAL {
            if t.conjugate(&PauliString::from_paulis(&[a, b], 0))?.size() == 1 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Random circuit of `depth` gates over the full gate set.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Vec<Instruction> {
    const SINGLE: [Gate; 6] = [Gate::H, Gate::S, Gate::Sdg, Gate::X, Gate::Y, Gate::Z];
    (0..depth)
        .map(|_| {
            if n >= 2 && rng.random_bool(0.4) {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let gate = if rng.random_bool(0.5) { Gate::CZ } else { Gate::CNOT };
                Instruction::new(gate, &[a, b])
            } else {
                Instruction::new(SINGLE[rng.random_range(0..SINGLE.len())], &[rng.random_range(0..n)])
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::contractive_unitary;
    use crate::weights::exact;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn dense_states_from_generators() {
        let ghz = dense_from_stabilizer(&StabilizerState::ghz(2).unwrap()).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!(close(ghz.amplitudes()[0], c(r, 0.0)));
        assert!(close(ghz.amplitudes()[3], c(r, 0.0)));
        assert!(ghz.amplitudes()[1].norm() < 1e-12);

        let zero = dense_from_stabilizer(&StabilizerState::from_labels(&["+Z"]).unwrap()).unwrap();
        assert!(close(zero.amplitudes()[0], Complex64::one()));

        let zxz = dense_from_stabilizer(&StabilizerState::zxz_cluster(3).unwrap()).unwrap();
        // the generator wrapping around the ring, written site by site
        assert!(close(zxz.expectation(&p("XZZ")).unwrap(), Complex64::one()));
        assert!(close(zxz.expectation(&p("ZZX")).unwrap(), Complex64::one()));
    }

    #[test]
    fn dense_gates() {
        let mut v = DenseState::zero(1).unwrap();
        v.apply_gate(Gate::H, &[0]).unwrap();
        assert!(close(v.amplitudes()[1], c(FRAC_1_SQRT_2, 0.0)));

        let diag = contractive_diagonal(2).unwrap();
        let e = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!(close(diag[0], e) && close(diag[3], e));
        assert!(close(diag[1], e.conj()) && close(diag[2], e.conj()));

        let mut w = DenseState::from_amplitudes(vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let before = w.clone();
        w.apply_gate(Gate::CZ, &[0, 1]).unwrap();
        w.apply_gate(Gate::CZ, &[1, 0]).unwrap();
        assert_eq!(w, before);
        assert!(w.apply_gate(Gate::CZ, &[0, 0]).is_err());
    }

    #[test]
    fn pauli_matching() {
        let diag = contractive_diagonal(2).unwrap();
        assert_eq!(conjugate_by_diagonal(&diag, &p("XZ")).unwrap(), p("-YI"));
        assert_eq!(conjugate_by_diagonal(&diag, &p("ZZ")).unwrap(), p("ZZ"));
        for label in ["XY", "-iZ", "+iXYZ", "IIY"] {
            let q = p(label);
            assert_eq!(dense_conjugate_check(q.num_qubits(), &[], &q).unwrap(), q);
        }
        // the contractive unitary as CZ then S†, compared with its tableau
        let circuit = [Instruction::new(Gate::CZ, &[0, 1]), Instruction::new(Gate::Sdg, &[0]), Instruction::new(Gate::Sdg, &[1])];
        let u = contractive_unitary(2);
        for label in ["XZ", "YZ", "ZX", "ZY", "XX", "YY", "XI", "IZ"] {
            assert_eq!(dense_conjugate_check(2, &circuit, &p(label)).unwrap(), u.conjugate(&p(label)).unwrap());
            assert_eq!(conjugate_by_diagonal(&diag, &p(label)).unwrap(), u.conjugate(&p(label)).unwrap());
        }
    }

    #[test]
    fn non_pauli_rejected() {
        let h = FRAC_1_SQRT_2;
        let cols = vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]];
        assert_eq!(dense_matrix_to_pauli(1, &cols), Err(Error::NotPauli));
    }

    #[test]
    fn random_conjugations_match_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..500 {
            let n = 1 + trial % 4;
            let circuit = random_circuit(n, 12, &mut rng);
            let t = CliffordTableau::from_circuit(n, &circuit).unwrap();
            let ops: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
            let q = PauliString::from_paulis(&ops, rng.random_range(0..4));
            assert_eq!(dense_conjugate_check(n, &circuit, &q).unwrap(), t.conjugate(&q).unwrap());
        }
    }

    #[test]
    fn brute_force_examples() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(brute_force_weight(2, Ensemble::Contractive, &[]).unwrap(), q(17, 81));
        assert_eq!(brute_force_weight(3, Ensemble::Identity, &[]).unwrap(), q(1, 27));
        for d in 0..3 {
            assert_eq!(brute_force_weight(3, Ensemble::Contractive, &[d]).unwrap(), q(1, 9));
        }
        for k in 1..=5 {
            assert_eq!(brute_force_weight(k, Ensemble::Contractive, &[]).unwrap(), exact::weight_contractive(k));
        }
        assert!(brute_force_weight(9, Ensemble::Contractive, &[]).is_err());
        assert!(brute_force_weight(3, Ensemble::RandomClifford, &[]).is_err());
        assert!(brute_force_weight(2, Ensemble::Contractive, &[0, 1]).is_err());
    }

    #[test]
    fn two_qubit_enumeration() {
        let all = enumerate_two_qubit_symplectics();
        assert_eq!(all.len(), 720);
        let set: HashSet<_> = all.iter().cloned().collect();
        assert!(set.contains(&CliffordTableau::identity(2)));
        assert!(set.contains(&contractive_unitary(2).unsigned()));
        for t in &all {
            t.check_invariants().unwrap();
        }
        let counts: Vec<usize> = all.iter().map(|t| contraction_count(t).unwrap()).collect();
        assert_eq!(counts.iter().max(), Some(&4));
        assert_eq!(contraction_count(&CliffordTableau::identity(2)).unwrap(), 0);
        assert_eq!(contraction_count(&contractive_unitary(2)).unwrap(), 4);
    }

    #[test]
    fn stabilizer_expectations_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..200 {
            let n = 1 + trial % 5;
            let circuit = random_circuit(n, 15, &mut rng);
            let mut s = StabilizerState::zero(n);
            for inst in &circuit {
                s.apply_gate(inst.gate, &inst.qubits).unwrap();
            }
            let mut d = DenseState::zero(n).unwrap();
            d.apply_circuit(&circuit).unwrap();
            let ops: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
            let q = PauliString::from_paulis(&ops, 2 * rng.random_range(0..2));
            let dense = d.expectation(&q).unwrap();
            assert!(dense.im.abs() < 1e-10);
            assert!((dense.re - s.expectation_pauli(&q).unwrap() as f64).abs() < 1e-10);
            assert!(d.overlap_abs(&dense_from_stabilizer(&s).unwrap()) > 1.0 - 1e-10);
        }
    }
}
