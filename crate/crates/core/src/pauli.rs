//! Bit-packed n-qubit Pauli strings with exact `i^k` phase tracking.
//!
//! A string is stored as two packed bit vectors (`x`, `z`) and a phase exponent.
//! Site `j` encodes `I`, `X`, `Z`, `Y` as `(x, z) = (0,0), (1,0), (0,1), (1,1)`,
//! and the operator is `i^phase` times the tensor product of the named site
//! Paulis. Labels are written with qubit 0 leftmost.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub(crate) type Words = SmallVec<[u64; 2]>;

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

/// Single-site Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    /// Index in `I, X, Y, Z` order.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Packed bit string, e.g. a computational-basis measurement outcome.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Words,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: smallvec::smallvec![0; word_count(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u32 {
        popcount(&self.words)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Integer value with bit `i` as the coefficient of `2^i`; `len <= 64`.
    pub fn to_index(&self) -> usize {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0) as usize
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(Error::InvalidBits { position, found }),
            }
        }
        Ok(Self::from_bools(&bits))
    }
}

/// An n-qubit Pauli operator `i^phase * P_0 ⊗ ... ⊗ P_{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Words,
    z: Words,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = word_count(n);
        PauliString {
            n,
            x: smallvec::smallvec![0; w],
            z: smallvec::smallvec![0; w],
            phase: 0,
        }
    }

    /// Single non-identity site `op` at `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, op: Pauli) -> Self {
        let mut p = Self::identity(n);
        p.set(site, op);
        p
    }

    pub fn from_paulis(ops: &[Pauli], phase: u8) -> Self {
        let mut p = Self::identity(ops.len());
        for (i, &op) in ops.iter().enumerate() {
            p.set(i, op);
        }
        p.phase = phase & 3;
        p
    }

    /// Parses a label such as `"ZYX"`, `"-YI"` or `"+iXZ"`.
    pub fn parse_label(label: &str) -> Result<Self> {
        let (phase, body, skip) = if let Some(rest) = label.strip_prefix("+i") {
            (1, rest, 2)
        } else if let Some(rest) = label.strip_prefix("-i") {
            (3, rest, 2)
        } else if let Some(rest) = label.strip_prefix('+') {
            (0, rest, 1)
        } else if let Some(rest) = label.strip_prefix('-') {
            (2, rest, 1)
        } else {
            (0, label, 0)
        };
        if body.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let mut ops = Vec::with_capacity(body.len());
        for (i, c) in body.chars().enumerate() {
            match Pauli::from_char(c) {
                Some(op) => ops.push(op),
                None => {
                    return Err(Error::InvalidLabel {
                        position: skip + i,
                        found: c,
                    })
                }
            }
        }
        Ok(Self::from_paulis(&ops, phase))
    }

    /// Canonical label: sign prefix (`+`, `-`, `+i`, `-i`) followed by one
    /// character per qubit.
    pub fn to_label(&self) -> String {
        let mut s = String::with_capacity(self.n + 2);
        s.push_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        });
        for i in 0..self.n {
            s.push(self.get(i).as_char());
        }
        s
    }

    /// Label without the phase prefix.
    pub fn body_label(&self) -> String {
        (0..self.n).map(|i| self.get(i).as_char()).collect()
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    #[inline]
    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    /// True when the phase is `±1`.
    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    #[inline]
    pub fn x_bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.x[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.z[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn get(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(i), self.z_bit(i))
    }

    #[inline]
    pub fn set(&mut self, i: usize, op: Pauli) {
        assert!(i < self.n, "site {i} out of range {}", self.n);
        let (xb, zb) = op.bits();
        let mask = 1u64 << (i % 64);
        let w = i / 64;
        if xb {
            self.x[w] |= mask;
        } else {
            self.x[w] &= !mask;
        }
        if zb {
            self.z[w] |= mask;
        } else {
            self.z[w] &= !mask;
        }
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Number of non-identity sites.
    pub fn size(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Number of `X` and `Y` sites.
    pub fn count_xy(&self) -> usize {
        popcount(&self.x) as usize
    }

    pub fn is_identity_op(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when no site carries `X` or `Y`.
    #[inline]
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Indices of non-identity sites, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// The product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same_size(other)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// `self ← self · rhs`. Both operands must have the same qubit count.
    #[inline]
    pub(crate) fn mul_assign_unchecked(&mut self, rhs: &PauliString) {
        debug_assert_eq!(self.n, rhs.n);
        // Write each operand as i^(a + |x&z|) X^x Z^z, multiply, then convert
        // the result back to the Y convention.
        let mut acc: u32 = self.phase as u32 + rhs.phase as u32;
        let mut hidden: u32 = 0;
        for w in 0..self.x.len() {
            let (x1, z1) = (self.x[w], self.z[w]);
            let (x2, z2) = (rhs.x[w], rhs.z[w]);
            let x = x1 ^ x2;
            let z = z1 ^ z2;
            acc += (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones();
            hidden += (x & z).count_ones();
            self.x[w] = x;
            self.z[w] = z;
        }
        self.phase = ((acc + 3 * hidden) & 3) as u8;
    }

    /// Bitwise product ignoring phase; used where only the symplectic part matters.
    #[inline]
    pub(crate) fn xor_assign(&mut self, rhs: &PauliString) {
        for w in 0..self.x.len() {
            self.x[w] ^= rhs.x[w];
            self.z[w] ^= rhs.z[w];
        }
    }

    /// Symplectic inner product mod 2 (1 when the strings anticommute).
    #[inline]
    pub(crate) fn symplectic_product(&self, rhs: &PauliString) -> bool {
        let mut acc = 0u64;
        for w in 0..self.x.len() {
            acc ^= (self.x[w] & rhs.z[w]) ^ (self.z[w] & rhs.x[w]);
        }
        acc.count_ones() & 1 == 1
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same_size(other)?;
        Ok(!self.symplectic_product(other))
    }

    /// `<z| P |z>` for a computational basis state, in `{-1, 0, +1}`.
    pub fn expectation_on_basis_state(&self, bits: &BitString) -> Result<i8> {
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: bits.len(),
            });
        }
        if !self.is_diagonal() {
            return Ok(0);
        }
        if !self.is_hermitian() {
            return Err(Error::InvalidObservable(self.to_label()));
        }
        let flips: u32 = self
            .z
            .iter()
            .zip(bits.words())
            .map(|(z, b)| (z & b).count_ones())
            .sum();
        let negative = (self.phase == 2) ^ (flips & 1 == 1);
        Ok(if negative { -1 } else { 1 })
    }

    /// Restriction to `sites` (in the given order), keeping the phase.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        let mut out = PauliString::identity(sites.len());
        for (j, &s) in sites.iter().enumerate() {
            out.set(j, self.get(s));
        }
        out.phase = self.phase;
        out
    }

    /// Places this string on `sites` of an `n`-qubit register.
    pub fn embed(&self, n: usize, sites: &[usize]) -> PauliString {
        assert_eq!(sites.len(), self.n);
        let mut out = PauliString::identity(n);
        for (j, &s) in sites.iter().enumerate() {
            out.set(s, self.get(j));
        }
        out.phase = self.phase;
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_label())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.to_label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_label(s)
    }
}
