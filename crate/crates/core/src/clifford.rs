//! Clifford tableaux: generator images under conjugation, gate rules,
//! composition, the single-qubit group, uniform sampling and the
//! contractive unitary.
//!
//! A tableau stores `U X_i U†` and `U Z_i U†` for every qubit. Tableaux
//! represent Cliffords modulo global phase, so conjugation signs are exact and
//! convention-free.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Elementary Clifford gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    S,
    /// Inverse phase gate.
    Sdg,
    X,
    Y,
    Z,
    CZ,
    /// Controlled-NOT with `qubits = [control, target]`.
    CNOT,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::CZ | Gate::CNOT => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::S => "S",
            Gate::Sdg => "Sdg",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::CZ => "CZ",
            Gate::CNOT => "CNOT",
        }
    }

    pub(crate) fn validate(self, qubits: &[usize], n: usize) -> Result<()> {
        if qubits.len() != self.arity() {
            return Err(Error::GateArity {
                gate: self.name(),
                expected: self.arity(),
                found: qubits.len(),
            });
        }
        for &q in qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit {
                gate: self.name(),
                index: qubits[0],
            });
        }
        Ok(())
    }
}

/// A gate together with the qubits it acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl Instruction {
    pub fn new(gate: Gate, qubits: &[usize]) -> Self {
        Instruction {
            gate,
            qubits: qubits.to_vec(),
        }
    }
}

/// Conjugates `p` by a gate in place: `p ← G p G†`. Indices must be valid.
pub(crate) fn conjugate_by_gate(p: &mut PauliString, gate: Gate, qubits: &[usize]) {
    let a = qubits[0];
    let (xa, za) = (p.x_bit(a), p.z_bit(a));
    let flip = match gate {
        Gate::H => {
            p.set(a, Pauli::from_bits(za, xa));
            xa && za
        }
        Gate::S => {
            p.set(a, Pauli::from_bits(xa, za ^ xa));
            xa && za
        }
        Gate::Sdg => {
            p.set(a, Pauli::from_bits(xa, za ^ xa));
            xa && !za
        }
        Gate::X => za,
        Gate::Y => xa ^ za,
        Gate::Z => xa,
        Gate::CZ => {
            let b = qubits[1];
            let (xb, zb) = (p.x_bit(b), p.z_bit(b));
            p.set(a, Pauli::from_bits(xa, za ^ xb));
            p.set(b, Pauli::from_bits(xb, zb ^ xa));
            xa && xb && (za ^ zb)
        }
        Gate::CNOT => {
            let t = qubits[1];
            let (xt, zt) = (p.x_bit(t), p.z_bit(t));
            p.set(a, Pauli::from_bits(xa, za ^ zt));
            p.set(t, Pauli::from_bits(xt ^ xa, zt));
            xa && zt && !(xt ^ za)
        }
    };
    if flip {
        p.set_phase(p.phase() + 2);
    }
}

/// Anything that acts on Pauli strings by Clifford conjugation.
pub trait CliffordAction {
    fn num_qubits(&self) -> usize;

    /// `U p U†`; `p` must have `num_qubits()` qubits.
    fn conjugate_unchecked(&self, p: &PauliString) -> PauliString;
}

/// Symplectic tableau of an n-qubit Clifford unitary.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            x_images: (0..n).map(|i| PauliString::single(n, i, Pauli::X)).collect(),
            z_images: (0..n).map(|i| PauliString::single(n, i, Pauli::Z)).collect(),
        }
    }

    /// Builds a tableau from explicit generator images, checking the
    /// commutation structure and Hermiticity.
    pub fn from_images(x_images: Vec<PauliString>, z_images: Vec<PauliString>) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: z_images.len(),
            });
        }
        let t = CliffordTableau {
            n,
            x_images,
            z_images,
        };
        t.check_invariants()?;
        Ok(t)
    }

    pub fn from_circuit(n: usize, circuit: &[Instruction]) -> Result<Self> {
        let mut t = Self::identity(n);
        for ins in circuit {
            t.apply_gate_mut(ins.gate, &ins.qubits)?;
        }
        Ok(t)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, i: usize) -> &PauliString {
        &self.x_images[i]
    }

    pub fn z_image(&self, i: usize) -> &PauliString {
        &self.z_images[i]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Verifies that images are Hermitian, sized correctly, and satisfy the
    /// canonical commutation relations.
    pub fn check_invariants(&self) -> Result<()> {
        let images = self.x_images.iter().chain(&self.z_images);
        for img in images {
            if img.num_qubits() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: img.num_qubits(),
                });
            }
            if !img.is_hermitian() {
                return Err(Error::InvalidGenerators(format!(
                    "non-Hermitian image {img}"
                )));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let xx = self.x_images[i].symplectic_product(&self.x_images[j]);
                let zz = self.z_images[i].symplectic_product(&self.z_images[j]);
                let xz = self.x_images[i].symplectic_product(&self.z_images[j]);
                if xx || zz || xz != (i == j) {
                    return Err(Error::InvalidGenerators(format!(
                        "images of qubits {i} and {j} break the commutation relations"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Returns `G ∘ self`, i.e. the gate applied after this Clifford.
    pub fn apply_gate(&self, gate: Gate, qubits: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate, qubits)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        gate.validate(qubits, self.n)?;
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            conjugate_by_gate(img, gate, qubits);
        }
        Ok(())
    }

    /// `self ∘ inner`: conjugating by the result equals conjugating by
    /// `inner` first and `self` second.
    pub fn compose(&self, inner: &CliffordTableau) -> Result<Self> {
        if self.n != inner.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.n,
            });
        }
        Ok(CliffordTableau {
            n: self.n,
            x_images: inner
                .x_images
                .iter()
                .map(|p| self.conjugate_unchecked(p))
                .collect(),
            z_images: inner
                .z_images
                .iter()
                .map(|p| self.conjugate_unchecked(p))
                .collect(),
        })
    }

    /// `U p U†` with exact phase.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        Ok(self.conjugate_unchecked(p))
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // The symplectic part of the inverse follows from preservation of the
        // symplectic form; signs are fixed afterwards.
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for i in 0..n {
            let mut xi = PauliString::identity(n);
            let mut zi = PauliString::identity(n);
            for j in 0..n {
                xi.set(
                    j,
                    Pauli::from_bits(self.z_images[j].z_bit(i), self.x_images[j].z_bit(i)),
                );
                zi.set(
                    j,
                    Pauli::from_bits(self.z_images[j].x_bit(i), self.x_images[j].x_bit(i)),
                );
            }
            x_images.push(xi);
            z_images.push(zi);
        }
        let mut inv = CliffordTableau {
            n,
            x_images,
            z_images,
        };
        for i in 0..n {
            if self.conjugate_unchecked(&inv.x_images[i]).phase() == 2 {
                inv.x_images[i].set_phase(2);
            }
            if self.conjugate_unchecked(&inv.z_images[i]).phase() == 2 {
                inv.z_images[i].set_phase(2);
            }
        }
        inv
    }

    /// Places this Clifford on `sites` of an `n_total`-qubit register,
    /// identity elsewhere.
    pub fn embed(&self, n_total: usize, sites: &[usize]) -> CliffordTableau {
        assert_eq!(sites.len(), self.n);
        let mut out = CliffordTableau::identity(n_total);
        for (j, &s) in sites.iter().enumerate() {
            out.x_images[s] = self.x_images[j].embed(n_total, sites);
            out.z_images[s] = self.z_images[j].embed(n_total, sites);
        }
        out
    }

    /// Copy with every image sign set to `+`.
    pub fn unsigned(&self) -> CliffordTableau {
        let strip = |v: &Vec<PauliString>| v.iter().map(|p| p.clone().with_phase(0)).collect();
        CliffordTableau {
            n: self.n,
            x_images: strip(&self.x_images),
            z_images: strip(&self.z_images),
        }
    }

    /// One line per generator, e.g. `X0 -> -YIZ`.
    pub fn to_debug_string(&self) -> String {
        self.to_string()
    }
}

impl CliffordAction for CliffordTableau {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        debug_assert_eq!(p.num_qubits(), self.n);
        // p = i^(phase + |x&z|) · Π X_i^x_i · Π Z_i^z_i
        let mut hidden = 0u32;
        for (x, z) in p.x_words().iter().zip(p.z_words()) {
            hidden += (x & z).count_ones();
        }
        let mut acc = PauliString::identity(self.n).with_phase((p.phase() as u32 + hidden) as u8 & 3);
        for (wi, &word) in p.x_words().iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                acc.mul_assign_unchecked(&self.x_images[wi * 64 + b]);
                bits &= bits - 1;
            }
        }
        for (wi, &word) in p.z_words().iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                acc.mul_assign_unchecked(&self.z_images[wi * 64 + b]);
                bits &= bits - 1;
            }
        }
        acc
    }
}

impl fmt::Display for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            writeln!(f, "X{i} -> {}", self.x_images[i])?;
        }
        for i in 0..self.n {
            writeln!(f, "Z{i} -> {}", self.z_images[i])?;
        }
        Ok(())
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau {{\n{self}}}")
    }
}

/// Action of one single-qubit Clifford on `I, X, Y, Z`: `(negate, image)`.
type SiteAction = [(bool, Pauli); 4];

struct SingleQubitGroup {
    elements: Vec<CliffordTableau>,
    actions: Vec<SiteAction>,
}

fn single_qubit_group() -> &'static SingleQubitGroup {
    static GROUP: OnceLock<SingleQubitGroup> = OnceLock::new();
    GROUP.get_or_init(|| {
        let start = CliffordTableau::identity(1);
        let mut seen: HashSet<CliffordTableau> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(t) = queue.pop_front() {
            for gate in [Gate::H, Gate::S] {
                let next = t.apply_gate(gate, &[0]).expect("valid single-qubit gate");
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut elements: Vec<CliffordTableau> = seen.into_iter().collect();
        elements.sort_by_key(|t| {
            (
                *t != start,
                t.x_images[0].to_label(),
                t.z_images[0].to_label(),
            )
        });
        let actions = elements
            .iter()
            .map(|t| {
                let mut action = [(false, Pauli::I); 4];
                for op in Pauli::NONTRIVIAL {
                    let img = t.conjugate_unchecked(&PauliString::single(1, 0, op));
                    action[op.index()] = (img.phase() == 2, img.get(0));
                }
                action
            })
            .collect();
        SingleQubitGroup { elements, actions }
    })
}

/// The 24 single-qubit Clifford tableaux (identity first).
pub fn single_qubit_clifford_group() -> &'static [CliffordTableau] {
    &single_qubit_group().elements
}

/// Number of elements in the single-qubit Clifford group modulo phase.
pub const SINGLE_QUBIT_GROUP_ORDER: usize = 24;

/// Independent single-qubit Cliffords on a subset of sites.
///
/// Elements are indices into [`single_qubit_clifford_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalLayer {
    n: usize,
    sites: Vec<(usize, u8)>,
}

impl LocalLayer {
    pub fn new(n: usize, sites: Vec<(usize, u8)>) -> Result<Self> {
        for &(s, e) in &sites {
            if s >= n {
                return Err(Error::QubitOutOfRange { index: s, n });
            }
            if e as usize >= SINGLE_QUBIT_GROUP_ORDER {
                return Err(Error::InvalidArgument(format!(
                    "single-qubit Clifford index {e} out of range"
                )));
            }
        }
        Ok(LocalLayer { n, sites })
    }

    /// Uniform independent draws on `sites`; an empty set gives the identity.
    pub fn random<R: Rng + ?Sized>(n: usize, sites: &[usize], rng: &mut R) -> Self {
        let sites = sites
            .iter()
            .map(|&s| {
                assert!(s < n, "site {s} out of range {n}");
                (s, rng.random_range(0..SINGLE_QUBIT_GROUP_ORDER as u8))
            })
            .collect();
        LocalLayer { n, sites }
    }

    pub fn sites(&self) -> &[(usize, u8)] {
        &self.sites
    }

    #[inline]
    pub(crate) fn apply_in_place(&self, p: &mut PauliString) {
        let actions = &single_qubit_group().actions;
        let mut negate = false;
        for &(s, e) in &self.sites {
            let op = p.get(s);
            if op != Pauli::I {
                let (neg, img) = actions[e as usize][op.index()];
                p.set(s, img);
                negate ^= neg;
            }
        }
        if negate {
            p.set_phase(p.phase() + 2);
        }
    }

    pub fn to_tableau(&self) -> CliffordTableau {
        let group = single_qubit_clifford_group();
        let mut t = CliffordTableau::identity(self.n);
        for &(s, e) in &self.sites {
            let g = &group[e as usize];
            t.x_images[s] = g.x_images[0].embed(self.n, &[s]);
            t.z_images[s] = g.z_images[0].embed(self.n, &[s]);
        }
        t
    }
}

impl CliffordAction for LocalLayer {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        let mut out = p.clone();
        self.apply_in_place(&mut out);
        out
    }
}

/// Tensor product of uniform single-qubit Cliffords on `sites`, identity
/// elsewhere.
pub fn random_local_layer<R: Rng + ?Sized>(
    n: usize,
    sites: &[usize],
    rng: &mut R,
) -> Result<CliffordTableau> {
    if let Some(&s) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::QubitOutOfRange { index: s, n });
    }
    Ok(LocalLayer::random(n, sites, rng).to_tableau())
}

fn random_combination<R: Rng + ?Sized>(basis: &[PauliString], n: usize, rng: &mut R) -> PauliString {
    let mut out = PauliString::identity(n);
    let mut bits = 0u64;
    for (i, b) in basis.iter().enumerate() {
        if i % 64 == 0 {
            bits = rng.random();
        }
        if bits & 1 == 1 {
            out.xor_assign(b);
        }
        bits >>= 1;
    }
    out
}

/// Turns a spanning set of a non-degenerate symplectic subspace into a
/// symplectic basis `[e_0, f_0, e_1, f_1, ...]` with `<e_i, f_j> = δ_ij`.
fn symplectic_basis(mut pool: Vec<PauliString>) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(pool.len());
    loop {
        pool.retain(|p| !p.is_identity_op());
        let Some(e) = pool.pop() else { break };
        let partner = pool
            .iter()
            .position(|p| p.symplectic_product(&e))
            .expect("spanning set of a non-degenerate subspace");
        let f = pool.swap_remove(partner);
        for c in pool.iter_mut() {
            let ce = c.symplectic_product(&e);
            let cf = c.symplectic_product(&f);
            if cf {
                c.xor_assign(&e);
            }
            if ce {
                c.xor_assign(&f);
            }
        }
        out.push(e);
        out.push(f);
    }
    out
}

/// Uniformly random k-qubit Clifford (modulo global phase).
///
/// The images of `X_i`, `Z_i` are drawn one symplectic pair at a time from the
/// symplectic complement of the pairs already chosen, then every image gets
/// an independent random sign.
pub fn random_clifford<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CliffordTableau {
    assert!(k >= 1, "random_clifford needs at least one qubit");
    let mut basis: Vec<PauliString> = (0..k)
        .flat_map(|i| [PauliString::single(k, i, Pauli::X), PauliString::single(k, i, Pauli::Z)])
        .collect();
    let mut x_images = Vec::with_capacity(k);
    let mut z_images = Vec::with_capacity(k);
    for _ in 0..k {
        let v = loop {
            let c = random_combination(&basis, k, rng);
            if !c.is_identity_op() {
                break c;
            }
        };
        let w = loop {
            let c = random_combination(&basis, k, rng);
            if c.symplectic_product(&v) {
                break c;
            }
        };
        let projected = basis
            .iter()
            .map(|b| {
                let mut out = b.clone();
                if b.symplectic_product(&w) {
                    out.xor_assign(&v);
                }
                if b.symplectic_product(&v) {
                    out.xor_assign(&w);
                }
                out
            })
            .collect();
        basis = symplectic_basis(projected);
        x_images.push(v);
        z_images.push(w);
    }
    let mut signs = 0u64;
    for (i, img) in x_images.iter_mut().chain(z_images.iter_mut()).enumerate() {
        if i % 64 == 0 {
            signs = rng.random();
        }
        img.set_phase(if signs & 1 == 1 { 2 } else { 0 });
        signs >>= 1;
    }
    CliffordTableau {
        n: k,
        x_images,
        z_images,
    }
}

/// The contractive unitary `Π_{i<j} exp(iπ/4 Z_i Z_j)` on `k` qubits.
///
/// Built as CZ on every pair followed by `S†^(k-1)` on every qubit; this
/// convention maps `X_0 Z_1` to `-Y_0` for `k = 2`.
pub fn contractive_unitary(k: usize) -> CliffordTableau {
    assert!(k >= 1, "contractive_unitary needs at least one qubit");
    let mut t = CliffordTableau::identity(k);
    for i in 0..k {
        for j in (i + 1)..k {
            t.apply_gate_mut(Gate::CZ, &[i, j]).expect("distinct in-range qubits");
        }
    }
    for q in 0..k {
        for _ in 0..(k - 1) % 4 {
            t.apply_gate_mut(Gate::Sdg, &[q]).expect("in-range qubit");
        }
    }
    t
}
