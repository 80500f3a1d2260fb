//! Pure stabilizer states with paired destabilizers, Clifford evolution,
//! computational-basis measurement and exact Pauli expectations.

use rand::Rng;

use crate::clifford::{conjugate_by_gate, CliffordAction, Gate};
use crate::error::{Error, Result};
use crate::pauli::{BitString, Pauli, PauliString};

/// Stabilizer state on `n` qubits.
///
/// Row `i` of `destabilizers` anticommutes with row `i` of `stabilizers` and
/// commutes with every other row of both lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

impl StabilizerState {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Self {
        StabilizerState {
            n,
            stabilizers: (0..n).map(|i| PauliString::single(n, i, Pauli::Z)).collect(),
            destabilizers: (0..n).map(|i| PauliString::single(n, i, Pauli::X)).collect(),
        }
    }

    /// State stabilized by `gens`; destabilizers are synthesized.
    pub fn from_generators(gens: &[PauliString]) -> Result<Self> {
        let n = gens.len();
        if n == 0 {
            return Err(Error::InvalidGenerators("no generators".into()));
        }
        for g in gens {
            if g.num_qubits() != n {
                return Err(Error::InvalidGenerators(format!(
                    "{n} generators are needed for {} qubits, got {g} among {n}",
                    g.num_qubits()
                )));
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidGenerators(format!("{g} is not Hermitian")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if gens[i].symplectic_product(&gens[j]) {
                    return Err(Error::InvalidGenerators(format!(
                        "{} and {} anticommute",
                        gens[i], gens[j]
                    )));
                }
            }
        }
        let destabilizers = synthesize_destabilizers(gens)?;
        Ok(StabilizerState {
            n,
            stabilizers: gens.to_vec(),
            destabilizers,
        })
    }

    /// Parses generator labels, e.g. `["+ZZ", "+XX"]`.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let gens = labels
            .iter()
            .map(|s| PauliString::parse_label(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&gens)
    }

    /// GHZ state: stabilized by `X...X` and `Z_i Z_{i+1}`.
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("GHZ state needs n >= 2, got {n}")));
        }
        let mut gens = Vec::with_capacity(n);
        gens.push(PauliString::from_paulis(&vec![Pauli::X; n], 0));
        for i in 0..n - 1 {
            let mut g = PauliString::identity(n);
            g.set(i, Pauli::Z);
            g.set(i + 1, Pauli::Z);
            gens.push(g);
        }
        Self::from_generators(&gens)
    }

    /// Periodic 1D cluster state: stabilized by `Z_{i-1} X_i Z_{i+1}`.
    pub fn zxz_cluster(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cluster state needs n >= 3, got {n}"
            )));
        }
        let gens: Vec<PauliString> = (0..n)
            .map(|i| {
                let mut g = PauliString::identity(n);
                g.set((i + n - 1) % n, Pauli::Z);
                g.set(i, Pauli::X);
                g.set((i + 1) % n, Pauli::Z);
                g
            })
            .collect();
        Self::from_generators(&gens)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    /// Checks the pairing structure and Hermiticity of every row.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if !self.stabilizers[i].is_hermitian() {
                return Err(Error::InvalidGenerators(format!(
                    "stabilizer {} is not Hermitian",
                    self.stabilizers[i]
                )));
            }
            for j in 0..n {
                let ss = self.stabilizers[i].symplectic_product(&self.stabilizers[j]);
                let dd = self.destabilizers[i].symplectic_product(&self.destabilizers[j]);
                let ds = self.destabilizers[i].symplectic_product(&self.stabilizers[j]);
                if ss || dd || ds != (i == j) {
                    return Err(Error::InvalidGenerators(format!(
                        "rows {i} and {j} break the stabilizer/destabilizer pairing"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Conjugates every row by a Clifford.
    pub fn evolve<C: CliffordAction + ?Sized>(&self, u: &C) -> Result<Self> {
        let mut out = self.clone();
        out.evolve_mut(u)?;
        Ok(out)
    }

    pub fn evolve_mut<C: CliffordAction + ?Sized>(&mut self, u: &C) -> Result<()> {
        if u.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: u.num_qubits(),
            });
        }
        for row in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            *row = u.conjugate_unchecked(row);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        gate.validate(qubits, self.n)?;
        for row in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            conjugate_by_gate(row, gate, qubits);
        }
        Ok(())
    }

    /// Measures qubit `q` in the Z basis and collapses the state.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        assert!(q < self.n, "qubit {q} out of range {}", self.n);
        let pivot = (0..self.n).find(|&i| self.stabilizers[i].x_bit(q));
        match pivot {
            Some(p) => {
                let pivot_row = self.stabilizers[p].clone();
                for i in 0..self.n {
                    if i != p && self.stabilizers[i].x_bit(q) {
                        self.stabilizers[i].mul_assign_unchecked(&pivot_row);
                    }
                    if i != p && self.destabilizers[i].x_bit(q) {
                        self.destabilizers[i].mul_assign_unchecked(&pivot_row);
                    }
                }
                let outcome: bool = rng.random();
                self.destabilizers[p] = pivot_row;
                self.stabilizers[p] = PauliString::single(self.n, q, Pauli::Z)
                    .with_phase(if outcome { 2 } else { 0 });
                outcome
            }
            None => {
                let mut acc = PauliString::identity(self.n);
                for i in 0..self.n {
                    if self.destabilizers[i].x_bit(q) {
                        acc.mul_assign_unchecked(&self.stabilizers[i]);
                    }
                }
                debug_assert_eq!(acc.size(), 1);
                acc.phase() == 2
            }
        }
    }

    /// Measures `qubits` in order, collapsing this state.
    pub fn measure_qubits_in_place<R: Rng + ?Sized>(
        &mut self,
        qubits: &[usize],
        rng: &mut R,
    ) -> BitString {
        let mut out = BitString::zeros(qubits.len());
        for (j, &q) in qubits.iter().enumerate() {
            out.set(j, self.measure_qubit(q, rng));
        }
        out
    }

    /// Samples all qubits by the Born rule on a scratch copy; `self` is left
    /// untouched so a prepared state can be reused.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let mut scratch = self.clone();
        let all: Vec<usize> = (0..self.n).collect();
        scratch.measure_qubits_in_place(&all, rng)
    }

    /// `<ψ|P|ψ>` in `{-1, 0, +1}` for a Hermitian Pauli `P`.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        if !p.is_hermitian() {
            return Err(Error::InvalidObservable(p.to_label()));
        }
        if self.stabilizers.iter().any(|s| s.symplectic_product(p)) {
            return Ok(0);
        }
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if self.destabilizers[i].symplectic_product(p) {
                acc.mul_assign_unchecked(&self.stabilizers[i]);
            }
        }
        debug_assert_eq!(acc.body_label(), p.body_label());
        Ok(if acc.phase() == p.phase() { 1 } else { -1 })
    }
}

/// Dense GF(2) row with `2n` columns, packed.
#[derive(Clone)]
struct Row(Vec<u64>);

impl Row {
    fn zeros(len: usize) -> Self {
        Row(vec![0; len.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }
    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn xor(&mut self, other: &Row) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Finds destabilizers for independent commuting generators.
///
/// First solves `<g_j, d_i> = δ_ij` by Gaussian elimination over GF(2), then
/// makes the solutions mutually commute by multiplying in stabilizers.
fn synthesize_destabilizers(gens: &[PauliString]) -> Result<Vec<PauliString>> {
    let n = gens.len();
    // Unknown d = (dx, dz); <g, d> = g.x·dz + g.z·dx. Column c < n is dx_c,
    // column n + c is dz_c. Augmented columns 2n.. hold the identity RHS.
    let width = 3 * n;
    let mut rows: Vec<Row> = gens
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut r = Row::zeros(width);
            for c in 0..n {
                if g.z_bit(c) {
                    r.flip(c);
                }
                if g.x_bit(c) {
                    r.flip(n + c);
                }
            }
            r.flip(2 * n + j);
            r
        })
        .collect();

    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    for col in 0..2 * n {
        if rank == n {
            break;
        }
        let Some(found) = (rank..n).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < n {
        return Err(Error::InvalidGenerators(
            "generators are not independent".into(),
        ));
    }

    // Particular solution for right-hand side e_i: free variables zero.
    let mut destabs: Vec<PauliString> = (0..n)
        .map(|i| {
            let mut d = PauliString::identity(n);
            for (r, &col) in pivots.iter().enumerate() {
                if rows[r].get(2 * n + i) {
                    let site = col % n;
                    let (x, z) = (d.x_bit(site), d.z_bit(site));
                    if col < n {
                        d.set(site, Pauli::from_bits(!x, z));
                    } else {
                        d.set(site, Pauli::from_bits(x, !z));
                    }
                }
            }
            d
        })
        .collect();

    for j in 0..n {
        for i in 0..j {
            if destabs[j].symplectic_product(&destabs[i]) {
                destabs[j].xor_assign(&gens[i]);
            }
        }
        destabs[j].set_phase(0);
    }
    Ok(destabs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{random_clifford, CliffordTableau};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn ghz_examples() {
        let g4 = StabilizerState::ghz(4).unwrap();
        g4.check_invariants().unwrap();
        assert_eq!(g4.expectation_pauli(&p("ZZZZ")).unwrap(), 1);
        assert_eq!(g4.expectation_pauli(&p("ZZII")).unwrap(), 1);
        let g3 = StabilizerState::ghz(3).unwrap();
        assert_eq!(g3.expectation_pauli(&p("ZZZ")).unwrap(), 0);
        assert!(StabilizerState::ghz(1).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bell = StabilizerState::ghz(2).unwrap();
        let mut ones = 0;
        for _ in 0..2000 {
            let z = bell.measure_all(&mut rng);
            assert_eq!(z.get(0), z.get(1));
            ones += z.get(0) as u32;
        }
        assert!((900..1100).contains(&ones));
    }

    #[test]
    fn ghz_subsystem_strings() {
        let g = StabilizerState::ghz(12).unwrap();
        for k in 1..=12 {
            let mut o = PauliString::identity(12);
            for i in 0..k {
                o.set(i, Pauli::Z);
            }
            let expected = if k % 2 == 0 { 1 } else { 0 };
            assert_eq!(g.expectation_pauli(&o).unwrap(), expected, "k={k}");
        }
    }

    #[test]
    fn zxz_examples() {
        let c = StabilizerState::zxz_cluster(6).unwrap();
        c.check_invariants().unwrap();
        assert_eq!(c.expectation_pauli(&p("ZXZIII")).unwrap(), 1);
        assert_eq!(c.expectation_pauli(&p("XZIIIZ")).unwrap(), 1);
        assert_eq!(c.expectation_pauli(&p("XIIIII")).unwrap(), 0);

        let c12 = StabilizerState::zxz_cluster(12).unwrap();
        for k in 4..=10 {
            let mut o = PauliString::identity(12);
            o.set(0, Pauli::Z);
            o.set(1, Pauli::Y);
            for i in 2..k - 2 {
                o.set(i, Pauli::X);
            }
            o.set(k - 2, Pauli::Y);
            o.set(k - 1, Pauli::Z);
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(c12.expectation_pauli(&o).unwrap(), expected, "k={k}");
        }
    }

    #[test]
    fn generator_validation() {
        let zero = StabilizerState::from_labels(&["+Z"]).unwrap();
        assert_eq!(zero.expectation_pauli(&p("Z")).unwrap(), 1);
        assert!(StabilizerState::from_labels(&["+X", "+Z"]).is_err());
        assert!(matches!(
            StabilizerState::from_labels(&["+XI", "+ZI"]),
            Err(Error::InvalidGenerators(_))
        ));
        assert!(matches!(
            StabilizerState::from_labels(&["+ZZ", "-ZZ"]),
            Err(Error::InvalidGenerators(_))
        ));
        assert!(StabilizerState::from_labels(&["+iZ"]).is_err());

        let bell = StabilizerState::from_labels(&["+ZZ", "+XX"]).unwrap();
        bell.check_invariants().unwrap();
        let ghz2 = StabilizerState::ghz(2).unwrap();
        for label in ["XX", "ZZ", "YY", "XI", "ZI", "XY"] {
            assert_eq!(
                bell.expectation_pauli(&p(label)).unwrap(),
                ghz2.expectation_pauli(&p(label)).unwrap()
            );
        }
        assert_eq!(bell.expectation_pauli(&p("YY")).unwrap(), -1);
    }

    #[test]
    fn evolution_examples() {
        let zero = StabilizerState::zero(1);
        let h = CliffordTableau::identity(1).apply_gate(Gate::H, &[0]).unwrap();
        let plus = zero.evolve(&h).unwrap();
        assert_eq!(plus.stabilizers()[0], p("+X"));

        let g3 = StabilizerState::ghz(3).unwrap();
        assert_eq!(g3.evolve(&CliffordTableau::identity(3)).unwrap(), g3);
        assert!(g3.evolve(&CliffordTableau::identity(2)).is_err());
    }

    #[test]
    fn evolve_then_undo_restores_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let state = StabilizerState::zxz_cluster(5).unwrap();
        let u = random_clifford(5, &mut rng);
        let back = state.evolve(&u).unwrap().evolve(&u.inverse()).unwrap();
        back.check_invariants().unwrap();
        for _ in 0..50 {
            let ops: Vec<Pauli> = (0..5).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
            let q = PauliString::from_paulis(&ops, 0);
            assert_eq!(
                state.expectation_pauli(&q).unwrap(),
                back.expectation_pauli(&q).unwrap()
            );
        }
    }

    #[test]
    fn measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = StabilizerState::zero(2);
        s.apply_gate(Gate::X, &[1]).unwrap();
        for _ in 0..100 {
            assert_eq!(s.measure_all(&mut rng).to_string(), "01");
        }

        let mut plus0 = StabilizerState::zero(2);
        plus0.apply_gate(Gate::H, &[0]).unwrap();
        let mut ones = 0;
        for _ in 0..4000 {
            let z = plus0.measure_all(&mut rng);
            assert!(!z.get(1));
            ones += z.get(0) as u32;
        }
        assert!((1800..2200).contains(&ones));

        let g3 = StabilizerState::ghz(3).unwrap();
        let mut counts = [0u32; 8];
        for _ in 0..10_000 {
            counts[g3.measure_all(&mut rng).to_index()] += 1;
        }
        assert_eq!(counts.iter().sum::<u32>(), counts[0] + counts[7]);
        // 5 sigma around 5000 is ±250
        assert!(counts[0].abs_diff(5000) < 250);
    }

    #[test]
    fn post_measurement_state_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let u = random_clifford(4, &mut rng);
            let mut s = StabilizerState::zero(4).evolve(&u).unwrap();
            let z = s.measure_qubits_in_place(&[0, 1, 2, 3], &mut rng);
            s.check_invariants().unwrap();
            for q in 0..4 {
                let zq = PauliString::single(4, q, Pauli::Z);
                let expected = if z.get(q) { -1 } else { 1 };
                assert_eq!(s.expectation_pauli(&zq).unwrap(), expected);
            }
        }
    }
}
