//! Snapshot sampling and estimation.
//!
//! A snapshot applies a composite Clifford `U = L2 · U_g · L1` to the prepared
//! state, where `L1`, `L2` are independent random single-qubit Clifford layers
//! and `U_g` acts block-diagonally (contractive, random Clifford, or nothing),
//! then measures in the computational basis. The single-snapshot estimate of
//! a Pauli `O` is `⟨z| U O U† |z⟩ / w`, with `w` the exact Pauli weight of the
//! protocol.
//!
//! Seeding: snapshot `i` owns the seed `derive_seed(master_seed, i)`. Circuit
//! randomness comes from stream 0 of a ChaCha8 generator keyed by that seed and
//! measurement randomness from stream 1, so every snapshot can be regenerated
//! from its seed alone and results do not depend on the worker count.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clifford::{contractive_unitary, random_clifford, CliffordAction, CliffordTableau, LocalLayer};
use crate::error::{Error, Result};
use crate::pauli::{BitString, PauliString};
use crate::stabilizer::StabilizerState;
use crate::weights::{self, Ensemble};

/// Snapshots per parallel work unit. Fixed so that chunk boundaries, and hence
/// floating-point merge order, never depend on the worker count.
pub const CHUNK_SIZE: u64 = 2048;

const CIRCUIT_STREAM: u64 = 0;
const MEASUREMENT_STREAM: u64 = 1;
const WEIGHT_DOMAIN: u64 = 0x5745_4947_4854_0001;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th snapshot under `master_seed` (SplitMix64 of the
/// mixed master seed offset by the index).
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Where the observable is assumed to live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocationMode {
    /// One block on qubits `offset..offset + k`; only those are measured.
    Known { offset: usize, k: usize },
    /// Blocks of size `k` tiling the ring, slid by a random offset per snapshot.
    Sliding { k: usize },
}

impl LocationMode {
    pub fn k(&self) -> usize {
        match *self {
            LocationMode::Known { k, .. } | LocationMode::Sliding { k } => k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LocationMode::Known { .. } => "known",
            LocationMode::Sliding { .. } => "sliding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolSpec {
    pub ensemble: Ensemble,
    pub location: LocationMode,
    pub system_n: usize,
    pub snapshots: u64,
    pub master_seed: u64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        let k = self.location.k();
        if self.system_n == 0 {
            return Err(Error::InvalidProtocol("system size must be positive".into()));
        }
        if k == 0 {
            return Err(Error::InvalidProtocol("block size must be positive".into()));
        }
        match self.location {
            LocationMode::Known { offset, k } if offset + k > self.system_n => {
                Err(Error::InvalidProtocol(format!(
                    "block {offset}..{} exceeds {} qubits",
                    offset + k,
                    self.system_n
                )))
            }
            LocationMode::Sliding { k } if k > self.system_n => Err(Error::InvalidProtocol(
                format!("block size {k} exceeds {} qubits", self.system_n),
            )),
            _ => Ok(()),
        }
    }
}

/// One block placement: the sites covered by each block, in ring order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub blocks: Vec<Vec<usize>>,
}

impl Layout {
    fn contiguous(n: usize, start: usize, sizes: &[usize]) -> Self {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut pos = start;
        for &size in sizes {
            blocks.push((0..size).map(|j| (pos + j) % n).collect());
            pos += size;
        }
        Layout { blocks }
    }

    /// Number of support sites falling into each block.
    pub fn support_counts(&self, o: &PauliString) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|b| b.iter().filter(|&&s| o.x_bit(s) || o.z_bit(s)).count())
            .collect()
    }
}

/// Block layouts used by the sliding protocol on an `n`-qubit ring.
///
/// If `k` divides `n` there are `k` layouts, layout `s` having blocks at
/// `s, s + k, s + 2k, ...`. Otherwise, with `n = n0·k + q`, there are `n`
/// layouts, each `n0` size-`k` blocks followed by one size-`q` block, starting
/// at every site.
pub fn sliding_structures(n: usize, k: usize) -> Result<Vec<Layout>> {
    if k == 0 || k > n {
        return Err(Error::InvalidProtocol(format!(
            "block size {k} incompatible with {n} qubits"
        )));
    }
    let n0 = n / k;
    let q = n % k;
    let mut sizes = vec![k; n0];
    if q > 0 {
        sizes.push(q);
        Ok((0..n).map(|s| Layout::contiguous(n, s, &sizes)).collect())
    } else {
        Ok((0..k).map(|s| Layout::contiguous(n, s, &sizes)).collect())
    }
}

struct BlockUnitary<'a> {
    sites: &'a [usize],
    unitary: Option<Cow<'a, CliffordTableau>>,
}

/// `L2 · U_g · L1` on the full register, stored factor by factor.
pub struct Composite<'a> {
    n: usize,
    first: LocalLayer,
    blocks: Vec<BlockUnitary<'a>>,
    second: LocalLayer,
}

impl Composite<'_> {
    pub fn first_layer(&self) -> &LocalLayer {
        &self.first
    }

    pub fn second_layer(&self) -> &LocalLayer {
        &self.second
    }

    /// Sites and middle unitary of each block (`None` when skipped).
    pub fn block_unitaries(&self) -> impl Iterator<Item = (&[usize], Option<&CliffordTableau>)> {
        self.blocks.iter().map(|b| (b.sites, b.unitary.as_deref()))
    }

    /// The full tableau of the composite.
    pub fn to_tableau(&self) -> CliffordTableau {
        let mut middle = CliffordTableau::identity(self.n);
        for b in &self.blocks {
            if let Some(u) = &b.unitary {
                middle = u
                    .embed(self.n, b.sites)
                    .compose(&middle)
                    .expect("matching register sizes");
            }
        }
        let inner = middle.compose(&self.first.to_tableau()).expect("matching register sizes");
        self.second.to_tableau().compose(&inner).expect("matching register sizes")
    }
}

impl CliffordAction for Composite<'_> {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        let mut out = self.first.conjugate_unchecked(p);
        for b in &self.blocks {
            let Some(u) = &b.unitary else { continue };
            let local = out.restrict(b.sites);
            if local.is_identity_op() {
                continue;
            }
            let image = u.conjugate_unchecked(&local);
            for (j, &s) in b.sites.iter().enumerate() {
                out.set(s, image.get(j));
            }
            out.set_phase(image.phase());
        }
        self.second.apply_in_place(&mut out);
        out
    }
}

/// One measurement record.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub structure_id: usize,
    pub circuit_seed: u64,
    pub outcome: BitString,
    pub estimate: Option<f64>,
}

impl fmt::Display for Snapshot {
    /// Tab-separated log line: structure id, hex seed, outcome bits, estimate.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{:016x}\t{}\t", self.structure_id, self.circuit_seed, self.outcome)?;
        match self.estimate {
            Some(e) => write!(f, "{e}"),
            None => f.write_str("nan"),
        }
    }
}

/// Running `(count, sum, sum of squares)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        self.sum += value;
        self.sum_sq += value * value;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn finish(&self) -> EstimationResult {
        EstimationResult::from_sums(self.count, self.sum, self.sum_sq)
    }
}

/// Summary statistics of a set of single-snapshot estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub unbiased_variance: f64,
    pub std_error: f64,
}

impl EstimationResult {
    pub fn from_sums(count: u64, sum: f64, sum_sq: f64) -> Self {
        let n = count as f64;
        let (mean, second_moment) = if count == 0 { (0.0, 0.0) } else { (sum / n, sum_sq / n) };
        let unbiased_variance = if count < 2 {
            0.0
        } else {
            (n / (n - 1.0) * (second_moment - mean * mean)).max(0.0)
        };
        let std_error = if count == 0 { 0.0 } else { (unbiased_variance / n).sqrt() };
        EstimationResult {
            count,
            sum,
            sum_sq,
            mean,
            second_moment,
            unbiased_variance,
            std_error,
        }
    }

    pub fn merge(&self, other: &EstimationResult) -> EstimationResult {
        EstimationResult::from_sums(self.count + other.count, self.sum + other.sum, self.sum_sq + other.sum_sq)
    }
}

/// Exact outcome counts: estimates are `+1/w`, `-1/w` or `0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    count: u64,
    plus: u64,
    minus: u64,
}

impl Tally {
    fn add(&mut self, value: i8) {
        self.count += 1;
        match value {
            1 => self.plus += 1,
            -1 => self.minus += 1,
            _ => {}
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.count += other.count;
        self.plus += other.plus;
        self.minus += other.minus;
    }

    fn finish(&self, inverse_weight: f64) -> EstimationResult {
        let signed = self.plus as f64 - self.minus as f64;
        let nonzero = (self.plus + self.minus) as f64;
        EstimationResult::from_sums(
            self.count,
            signed * inverse_weight,
            nonzero * inverse_weight * inverse_weight,
        )
    }
}

/// Hits out of samples for a Monte-Carlo Pauli weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalWeight {
    pub samples: u64,
    pub hits: u64,
}

impl EmpiricalWeight {
    pub fn value(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    /// Binomial standard error evaluated at `p`.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// A validated protocol with its layouts and cached contractive blocks.
pub struct Protocol {
    spec: ProtocolSpec,
    layouts: Vec<Layout>,
    measured: Vec<usize>,
    contractive: HashMap<usize, CliffordTableau>,
}

impl Protocol {
    pub fn new(spec: ProtocolSpec) -> Result<Self> {
        spec.validate()?;
        let layouts = match spec.location {
            LocationMode::Known { offset, k } => vec![Layout::contiguous(spec.system_n, offset, &[k])],
            LocationMode::Sliding { k } => sliding_structures(spec.system_n, k)?,
        };
        let measured = match spec.location {
            LocationMode::Known { offset, k } => (offset..offset + k).collect(),
            LocationMode::Sliding { .. } => (0..spec.system_n).collect(),
        };
        let mut contractive = HashMap::new();
        if spec.ensemble == Ensemble::Contractive {
            for b in layouts.iter().flat_map(|l| &l.blocks) {
                contractive.entry(b.len()).or_insert_with(|| contractive_unitary(b.len()));
            }
        }
        Ok(Protocol {
            spec,
            layouts,
            measured,
            contractive,
        })
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn layouts(&self) -> &[Layout] {
        &self.layouts
    }

    pub fn num_structures(&self) -> usize {
        self.layouts.len()
    }

    /// Qubits read out by each snapshot, in outcome-bit order.
    pub fn measured_sites(&self) -> &[usize] {
        &self.measured
    }

    /// Checks that `o` is a Hermitian Pauli on the register and, in known
    /// mode, supported inside the block.
    pub fn check_observable(&self, o: &PauliString) -> Result<()> {
        if o.num_qubits() != self.spec.system_n {
            return Err(Error::DimensionMismatch {
                expected: self.spec.system_n,
                found: o.num_qubits(),
            });
        }
        if !o.is_hermitian() {
            return Err(Error::InvalidObservable(o.to_label()));
        }
        if let LocationMode::Known { offset, k } = self.spec.location {
            if o.support().iter().any(|&s| s < offset || s >= offset + k) {
                return Err(Error::UnsupportedObservable(format!(
                    "{} outside qubits {offset}..{}",
                    o.to_label(),
                    offset + k
                )));
            }
        }
        Ok(())
    }

    /// Exact Pauli weight of `o`: the layout average of the product of
    /// per-block weights.
    pub fn pauli_weight(&self, o: &PauliString) -> Result<f64> {
        self.check_observable(o)?;
        let total: f64 = self
            .layouts
            .iter()
            .map(|l| {
                l.blocks
                    .iter()
                    .zip(l.support_counts(o))
                    .map(|(b, m)| weights::block_weight(self.spec.ensemble, b.len(), m))
                    .product::<f64>()
            })
            .sum();
        Ok(total / self.layouts.len() as f64)
    }

    /// Draws the composite of `layout` from `rng`: per block, the first local
    /// layer, the middle unitary, then the second local layer.
    fn draw_composite<'a, R: Rng + ?Sized>(&'a self, layout: &'a Layout, rng: &mut R) -> Composite<'a> {
        let mut first = Vec::with_capacity(self.spec.system_n);
        let mut second = Vec::with_capacity(self.spec.system_n);
        let mut blocks = Vec::with_capacity(layout.blocks.len());
        for sites in &layout.blocks {
            first.extend(sites.iter().map(|&s| (s, rng.random_range(0..24u8))));
            let unitary = match self.spec.ensemble {
                Ensemble::Identity => None,
                Ensemble::Contractive => Some(Cow::Borrowed(&self.contractive[&sites.len()])),
                Ensemble::RandomClifford => Some(Cow::Owned(random_clifford(sites.len(), rng))),
            };
            blocks.push(BlockUnitary { sites, unitary });
            second.extend(sites.iter().map(|&s| (s, rng.random_range(0..24u8))));
        }
        let n = self.spec.system_n;
        Composite {
            n,
            first: LocalLayer::new(n, first).expect("sites and indices in range"),
            blocks,
            second: LocalLayer::new(n, second).expect("sites and indices in range"),
        }
    }

    fn circuit_rng(circuit_seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(circuit_seed);
        rng.set_stream(CIRCUIT_STREAM);
        rng
    }

    fn measurement_rng(circuit_seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(circuit_seed);
        rng.set_stream(MEASUREMENT_STREAM);
        rng
    }

    /// Regenerates the structure id and composite belonging to a seed.
    pub fn composite_for_seed(&self, circuit_seed: u64) -> (usize, Composite<'_>) {
        let mut rng = Self::circuit_rng(circuit_seed);
        let structure_id = if self.layouts.len() > 1 {
            rng.random_range(0..self.layouts.len())
        } else {
            0
        };
        (structure_id, self.draw_composite(&self.layouts[structure_id], &mut rng))
    }

    /// Builds the composite for an explicit structure id.
    pub fn build_composite<R: Rng + ?Sized>(&self, structure_id: usize, rng: &mut R) -> Result<Composite<'_>> {
        let layout = self.layouts.get(structure_id).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "structure id {structure_id} out of range for {} layouts",
                self.layouts.len()
            ))
        })?;
        Ok(self.draw_composite(layout, rng))
    }

    fn check_state(&self, state: &StabilizerState) -> Result<()> {
        if state.num_qubits() != self.spec.system_n {
            return Err(Error::DimensionMismatch {
                expected: self.spec.system_n,
                found: state.num_qubits(),
            });
        }
        Ok(())
    }

    fn measure(&self, state: &StabilizerState, composite: &Composite<'_>, circuit_seed: u64) -> BitString {
        let mut scratch = state.clone();
        scratch.evolve_mut(composite).expect("register sizes checked");
        scratch.measure_qubits_in_place(&self.measured, &mut Self::measurement_rng(circuit_seed))
    }

    /// Samples the snapshot with the given seed; the estimate is left unset.
    pub fn sample_snapshot_with_seed(&self, state: &StabilizerState, circuit_seed: u64) -> Result<Snapshot> {
        self.check_state(state)?;
        let (structure_id, composite) = self.composite_for_seed(circuit_seed);
        let outcome = self.measure(state, &composite, circuit_seed);
        Ok(Snapshot {
            structure_id,
            circuit_seed,
            outcome,
            estimate: None,
        })
    }

    /// Samples snapshot number `index` of this protocol.
    pub fn sample_snapshot(&self, state: &StabilizerState, index: u64) -> Result<Snapshot> {
        self.sample_snapshot_with_seed(state, derive_seed(self.spec.master_seed, index))
    }

    fn basis_value(&self, composite: &Composite<'_>, o: &PauliString, outcome: &BitString) -> i8 {
        let image = composite.conjugate_unchecked(o);
        if !image.is_diagonal() {
            return 0;
        }
        image
            .restrict(&self.measured)
            .expectation_on_basis_state(outcome)
            .expect("conjugate of a Hermitian Pauli is Hermitian")
    }

    /// `w⁻¹ ⟨z| U O U† |z⟩` for a recorded snapshot, rebuilding `U` from its seed.
    pub fn estimate_single(&self, snapshot: &Snapshot, o: &PauliString) -> Result<f64> {
        let w = self.pauli_weight(o)?;
        if snapshot.outcome.len() != self.measured.len() {
            return Err(Error::DimensionMismatch {
                expected: self.measured.len(),
                found: snapshot.outcome.len(),
            });
        }
        let (_, composite) = self.composite_for_seed(snapshot.circuit_seed);
        Ok(self.basis_value(&composite, o, &snapshot.outcome) as f64 / w)
    }

    fn snapshot_value(&self, state: &StabilizerState, o: &PauliString, index: u64) -> (Snapshot, i8) {
        let circuit_seed = derive_seed(self.spec.master_seed, index);
        let (structure_id, composite) = self.composite_for_seed(circuit_seed);
        let outcome = self.measure(state, &composite, circuit_seed);
        let value = self.basis_value(&composite, o, &outcome);
        let snapshot = Snapshot {
            structure_id,
            circuit_seed,
            outcome,
            estimate: None,
        };
        (snapshot, value)
    }

    fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.spec.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
    }

    fn chunks(total: u64) -> Vec<(u64, u64)> {
        (0..total.div_ceil(CHUNK_SIZE))
            .map(|c| (c * CHUNK_SIZE, ((c + 1) * CHUNK_SIZE).min(total)))
            .collect()
    }

    fn check_run(&self, state: &StabilizerState, o: &PauliString) -> Result<f64> {
        self.check_state(state)?;
        if self.spec.snapshots < 2 {
            return Err(Error::InvalidProtocol(format!(
                "need at least 2 snapshots, got {}",
                self.spec.snapshots
            )));
        }
        self.pauli_weight(o)
    }

    /// Samples `spec.snapshots` snapshots and aggregates the estimates of `o`.
    pub fn run_estimation(&self, state: &StabilizerState, o: &PauliString) -> Result<EstimationResult> {
        let w = self.check_run(state, o)?;
        let chunks = Self::chunks(self.spec.snapshots);
        let partial: Vec<Tally> = self.thread_pool()?.install(|| {
            chunks
                .par_iter()
                .map(|&(lo, hi)| {
                    let mut t = Tally::default();
                    for i in lo..hi {
                        t.add(self.snapshot_value(state, o, i).1);
                    }
                    t
                })
                .collect()
        });
        let mut total = Tally::default();
        for t in &partial {
            total.merge(t);
        }
        Ok(total.finish(1.0 / w))
    }

    /// As [`Protocol::run_estimation`], also writing one log line per snapshot.
    pub fn run_estimation_logged<W: Write>(
        &self,
        state: &StabilizerState,
        o: &PauliString,
        log: &mut W,
    ) -> Result<EstimationResult> {
        let w = self.check_run(state, o)?;
        let pool = self.thread_pool()?;
        let mut total = Tally::default();
        for &(lo, hi) in &Self::chunks(self.spec.snapshots) {
            let records: Vec<(Snapshot, i8)> =
                pool.install(|| (lo..hi).into_par_iter().map(|i| self.snapshot_value(state, o, i)).collect());
            for (mut snap, value) in records {
                total.add(value);
                snap.estimate = Some(value as f64 / w);
                writeln!(log, "{snap}").map_err(|e| Error::InvalidArgument(format!("snapshot log: {e}")))?;
            }
        }
        Ok(total.finish(1.0 / w))
    }

    /// Monte-Carlo estimate of the Pauli weight of `o`: the fraction of drawn
    /// composites that map `o` to a diagonal string. Only blocks touching the
    /// support of `o` are drawn.
    pub fn empirical_pauli_weight(&self, o: &PauliString, samples: u64, seed: u64) -> Result<EmpiricalWeight> {
        self.check_observable(o)?;
        if samples == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let touched: Vec<Layout> = self
            .layouts
            .iter()
            .map(|l| Layout {
                blocks: l
                    .blocks
                    .iter()
                    .filter(|b| b.iter().any(|&s| o.x_bit(s) || o.z_bit(s)))
                    .cloned()
                    .collect(),
            })
            .collect();
        let base = seed ^ WEIGHT_DOMAIN;
        let chunks = Self::chunks(samples);
        let hits: Vec<u64> = self.thread_pool()?.install(|| {
            chunks
                .par_iter()
                .map(|&(lo, hi)| {
                    let mut hits = 0;
                    for i in lo..hi {
                        let mut rng = Self::circuit_rng(derive_seed(base, i));
                        let id = if touched.len() > 1 { rng.random_range(0..touched.len()) } else { 0 };
                        let composite = self.draw_composite(&touched[id], &mut rng);
                        if composite.conjugate_unchecked(o).is_diagonal() {
                            hits += 1;
                        }
                    }
                    hits
                })
                .collect()
        });
        Ok(EmpiricalWeight {
            samples,
            hits: hits.iter().sum(),
        })
    }
}

/// Histogram of the operator size of `U_g L1 o L1† U_g†` over `samples`
/// draws of a random local layer `L1` and, for random Cliffords, of `U_g`.
/// Entry `m` counts draws of size `m`.
pub fn size_histogram(ensemble: Ensemble, o: &PauliString, samples: u64, seed: u64) -> Vec<u64> {
    let k = o.num_qubits();
    let sites: Vec<usize> = (0..k).collect();
    let fixed = (ensemble == Ensemble::Contractive).then(|| contractive_unitary(k));
    let mut hist = vec![0u64; k + 1];
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
        let local = LocalLayer::random(k, &sites, &mut rng).conjugate_unchecked(o);
        let image = match ensemble {
            Ensemble::Identity => local,
            Ensemble::Contractive => fixed.as_ref().expect("built above").conjugate_unchecked(&local),
            Ensemble::RandomClifford => random_clifford(k, &mut rng).conjugate_unchecked(&local),
        };
        hist[image.size()] += 1;
    }
    hist
}
