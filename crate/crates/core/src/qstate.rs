//! Dense state vectors over labeled two-level subsystems.
//!
//! A [`StateVector`] owns its [`SubsystemLayout`]; the first active entry of the
//! layout is the most significant bit of the amplitude index, so `|01⟩` lives at
//! index 1. Every operation returns a new value and leaves its inputs untouched.
//!
//! Sources that have emitted their qubit onto a photon sit in the auxiliary
//! level `|u⟩`. That level only ever appears as an exact product factor, so it is
//! tracked as a classical `parked` flag instead of a third amplitude dimension.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, Gate2};

/// Normalization/unitarity tolerance for caller-supplied inputs.
pub const INPUT_TOL: f64 = 1e-12;
/// Tolerance for checks on accumulated numerical results.
pub const CHECK_TOL: f64 = 1e-10;
/// Outcome probabilities below this are never sampled.
pub const ZERO_PROB: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsystemId(u32);

impl SubsystemId {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for SubsystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsystemKind {
    Source,
    Photon,
}

impl SubsystemKind {
    /// Label characters for the two basis levels.
    pub fn level_labels(self) -> [char; 2] {
        match self {
            SubsystemKind::Source => ['0', '1'],
            SubsystemKind::Photon => ['E', 'L'],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub id: SubsystemId,
    pub kind: SubsystemKind,
    pub parked: bool,
}

/// Ordered registry of subsystems. Parked sources stay listed (so they can be
/// read out) but carry no amplitude degrees of freedom.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubsystemLayout {
    entries: Vec<Subsystem>,
    next_id: u32,
}

impl SubsystemLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Layout holding `n` active sources, returned alongside their ids.
    pub fn with_sources(n: usize) -> (Self, Vec<SubsystemId>) {
        let mut layout = Self::new();
        let ids = (0..n).map(|_| layout.push(SubsystemKind::Source)).collect();
        (layout, ids)
    }

    /// Append a new active subsystem at the end of the ordering.
    pub fn push(&mut self, kind: SubsystemKind) -> SubsystemId {
        let id = SubsystemId(self.next_id);
        self.next_id += 1;
        self.entries.push(Subsystem { id, kind, parked: false });
        id
    }

    pub fn entries(&self) -> &[Subsystem] {
        &self.entries
    }

    pub fn active(&self) -> impl Iterator<Item = &Subsystem> + '_ {
        self.entries.iter().filter(|e| !e.parked)
    }

    pub fn active_count(&self) -> usize {
        self.active().count()
    }

    pub fn dim(&self) -> usize {
        1usize << self.active_count()
    }

    pub fn get(&self, id: SubsystemId) -> Option<&Subsystem> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn kind(&self, id: SubsystemId) -> Option<SubsystemKind> {
        self.get(id).map(|e| e.kind)
    }

    pub fn is_parked(&self, id: SubsystemId) -> Option<bool> {
        self.get(id).map(|e| e.parked)
    }

    /// Position of `id` among the active subsystems.
    pub fn active_position(&self, id: SubsystemId) -> Option<usize> {
        self.active().position(|e| e.id == id)
    }

    /// Active subsystems of the given kind, in layout order.
    pub fn active_of_kind(&self, kind: SubsystemKind) -> Vec<SubsystemId> {
        self.active().filter(|e| e.kind == kind).map(|e| e.id).collect()
    }

    fn same_active(&self, other: &Self) -> bool {
        self.active()
            .map(|e| (e.id, e.kind))
            .eq(other.active().map(|e| (e.id, e.kind)))
    }

    /// Bit shift of an active subsystem inside the amplitude index.
    fn shift_of(&self, id: SubsystemId) -> Result<usize> {
        match self.get(id) {
            None => Err(Error::Target(format!("unknown subsystem {id}"))),
            Some(e) if e.parked => Err(Error::Target(format!("subsystem {id} is parked"))),
            Some(_) => {
                let pos = self.active_position(id).expect("active entry");
                Ok(self.active_count() - 1 - pos)
            }
        }
    }

    fn without(&self, ids: &[SubsystemId]) -> Self {
        Self {
            entries: self.entries.iter().filter(|e| !ids.contains(&e.id)).copied().collect(),
            next_id: self.next_id,
        }
    }

    fn with_parked(&self, id: SubsystemId) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            if e.id == id {
                e.parked = true;
            }
        }
        out
    }

    /// Basis label of an amplitude index, e.g. `"01EL"`.
    pub fn basis_label(&self, index: usize) -> String {
        let n = self.active_count();
        self.active()
            .enumerate()
            .map(|(pos, e)| e.kind.level_labels()[(index >> (n - 1 - pos)) & 1])
            .collect()
    }
}

/// Unitary acting on a list of target subsystems. The first target is the most
/// significant bit of the matrix index.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    targets: Vec<SubsystemId>,
    matrix: DMatrix<C64>,
}

impl LocalUnitary {
    pub fn new(targets: Vec<SubsystemId>, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Layout(format!(
                "{} targets need a {dim}x{dim} matrix, got {}x{}",
                targets.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for (i, a) in targets.iter().enumerate() {
            if targets[..i].contains(a) {
                return Err(Error::Target(format!("duplicate target {a}")));
            }
        }
        let defect = gates::unitarity_defect(&matrix);
        if defect > INPUT_TOL {
            return Err(Error::Argument(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(Self { targets, matrix })
    }

    pub fn single(target: SubsystemId, gate: &Gate2) -> Result<Self> {
        Self::new(vec![target], gates::to_dynamic(gate))
    }

    pub fn z_phase(target: SubsystemId, phi: f64) -> Self {
        Self::single(target, &gates::z_phase(phi)).expect("diagonal phase is unitary")
    }

    /// `diag(1, 1, 1, -1)`.
    pub fn cz(a: SubsystemId, b: SubsystemId) -> Result<Self> {
        let mut m = DMatrix::identity(4, 4);
        m[(3, 3)] = C64::new(-1.0, 0.0);
        Self::new(vec![a, b], m)
    }

    pub fn cnot(control: SubsystemId, target: SubsystemId) -> Result<Self> {
        let mut m = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Self::new(vec![control, target], m)
    }

    pub fn swap(a: SubsystemId, b: SubsystemId) -> Result<Self> {
        let mut m = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Self::new(vec![a, b], m)
    }

    pub fn targets(&self) -> &[SubsystemId] {
        &self.targets
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amplitudes: Vec<C64>,
}

/// Index offsets of the `2^t` target configurations relative to a base index
/// whose target bits are all zero.
fn target_offsets(shifts: &[usize]) -> Vec<usize> {
    let t = shifts.len();
    (0..1usize << t)
        .map(|s| {
            shifts
                .iter()
                .enumerate()
                .map(|(j, &sh)| ((s >> (t - 1 - j)) & 1) << sh)
                .sum()
        })
        .collect()
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

impl StateVector {
    /// Wrap caller-supplied amplitudes, checking length and normalization.
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::Layout(format!(
                "expected {} amplitudes, got {}",
                layout.dim(),
                amplitudes.len()
            )));
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if (norm - 1.0).abs() > INPUT_TOL {
            return Err(Error::State(format!("amplitudes have norm {norm}")));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Computational basis state with the given amplitude index.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::Layout(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); layout.dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes })
    }

    /// Ordered tensor product of one local 2-vector per active subsystem.
    pub fn product_state(layout: SubsystemLayout, locals: &[[C64; 2]]) -> Result<Self> {
        let n = layout.active_count();
        if locals.len() != n {
            return Err(Error::Layout(format!("{n} active subsystems but {} local states", locals.len())));
        }
        for (k, l) in locals.iter().enumerate() {
            let norm = norm_sqr(l).sqrt();
            if (norm - 1.0).abs() > INPUT_TOL {
                return Err(Error::State(format!("local state {k} has norm {norm}")));
            }
        }
        let mut amplitudes = vec![C64::new(1.0, 0.0)];
        for l in locals {
            amplitudes = amplitudes.iter().flat_map(|a| [a * l[0], a * l[1]]).collect();
        }
        Ok(Self { layout, amplitudes })
    }

    /// Haar-like random state (complex Gaussian amplitudes, normalized).
    pub fn random<R: Rng + ?Sized>(layout: SubsystemLayout, rng: &mut R) -> Self {
        let mut amplitudes: Vec<C64> = (0..layout.dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = norm_sqr(&amplitudes).sqrt();
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// Multiply by a unit-modulus scalar.
    pub fn with_global_phase(&self, phase: C64) -> Self {
        Self {
            layout: self.layout.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// Tensor a fresh subsystem in `local` onto the end of the ordering.
    pub fn append(&self, kind: SubsystemKind, local: [C64; 2]) -> (Self, SubsystemId) {
        let mut layout = self.layout.clone();
        let id = layout.push(kind);
        let amplitudes = self.amplitudes.iter().flat_map(|a| [a * local[0], a * local[1]]).collect();
        (Self { layout, amplitudes }, id)
    }

    pub fn apply_unitary(&self, u: &LocalUnitary) -> Result<Self> {
        let shifts = u
            .targets
            .iter()
            .map(|&id| self.layout.shift_of(id))
            .collect::<Result<Vec<_>>>()?;
        let offsets = target_offsets(&shifts);
        let mask: usize = shifts.iter().map(|s| 1 << s).sum();
        let mut out = self.amplitudes.clone();
        let mut block = vec![C64::new(0.0, 0.0); offsets.len()];
        for base in (0..self.dim()).filter(|b| b & mask == 0) {
            for (slot, off) in block.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                out[base | off] = block
                    .iter()
                    .enumerate()
                    .map(|(col, v)| u.matrix[(row, col)] * v)
                    .sum();
            }
        }
        Ok(Self { layout: self.layout.clone(), amplitudes: out })
    }

    fn check_basis(targets: &[SubsystemId], basis: &[Vec<C64>]) -> Result<()> {
        let dim = 1usize << targets.len();
        if basis.len() != dim || basis.iter().any(|b| b.len() != dim) {
            return Err(Error::Basis(format!("need {dim} vectors of length {dim}")));
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ov: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (ov - want).norm() > CHECK_TOL {
                    return Err(Error::Basis(format!(
                        "vectors {i},{j} have overlap {ov}, expected {want}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Projected (unnormalized) remainders `⟨b_i|ψ⟩` for every basis vector.
    fn branches(&self, targets: &[SubsystemId], basis: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        Self::check_basis(targets, basis)?;
        let shifts = targets
            .iter()
            .map(|&id| self.layout.shift_of(id))
            .collect::<Result<Vec<_>>>()?;
        let offsets = target_offsets(&shifts);
        let mask: usize = shifts.iter().map(|s| 1 << s).sum();
        let rest = self.dim() >> targets.len();
        let mut out = vec![Vec::with_capacity(rest); basis.len()];
        for base in (0..self.dim()).filter(|b| b & mask == 0) {
            for (b, branch) in basis.iter().zip(out.iter_mut()) {
                branch.push(
                    b.iter()
                        .zip(&offsets)
                        .map(|(bv, off)| bv.conj() * self.amplitudes[base | off])
                        .sum(),
                );
            }
        }
        Ok(out)
    }

    /// Born-rule probabilities of each basis outcome on `targets`.
    pub fn outcome_probabilities(&self, targets: &[SubsystemId], basis: &[Vec<C64>]) -> Result<Vec<f64>> {
        Ok(self.branches(targets, basis)?.iter().map(|b| norm_sqr(b)).collect())
    }

    /// Force outcome `outcome` and return the normalized post-measurement state
    /// with the measured subsystems removed from the layout.
    pub fn project(&self, targets: &[SubsystemId], basis: &[Vec<C64>], outcome: usize) -> Result<MeasurementRecord> {
        let mut branches = self.branches(targets, basis)?;
        if outcome >= branches.len() {
            return Err(Error::Argument(format!("outcome {outcome} out of range")));
        }
        self.finish_projection(targets, branches.swap_remove(outcome), outcome)
    }

    fn finish_projection(&self, targets: &[SubsystemId], mut branch: Vec<C64>, outcome: usize) -> Result<MeasurementRecord> {
        let probability = norm_sqr(&branch);
        if probability < ZERO_PROB {
            return Err(Error::Projection { outcome, probability });
        }
        let scale = probability.sqrt();
        branch.iter_mut().for_each(|a| *a /= scale);
        Ok(MeasurementRecord {
            outcome_index: outcome,
            probability,
            post_state: Self { layout: self.layout.without(targets), amplitudes: branch },
        })
    }

    pub fn measure_in_basis<R: Rng + ?Sized>(
        &self,
        targets: &[SubsystemId],
        basis: &[Vec<C64>],
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        let branches = self.branches(targets, basis)?;
        let weights: Vec<f64> = branches
            .iter()
            .map(|b| norm_sqr(b))
            .map(|p| if p < ZERO_PROB { 0.0 } else { p })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::State("state has no weight on the target subspace".into()));
        }
        let mut u = rng.random::<f64>() * total;
        let mut outcome = weights.iter().rposition(|&w| w > 0.0).expect("positive total");
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 && u < w {
                outcome = i;
                break;
            }
            u -= w;
        }
        let branch = branches.into_iter().nth(outcome).expect("outcome in range");
        self.finish_projection(targets, branch, outcome)
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if !self.layout.same_active(&other.layout) {
            return Err(Error::Layout("states have different layouts".into()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨a|b⟩|` for normalized inputs; 1 iff the states agree up to a global phase.
    pub fn fidelity_up_to_phase(&self, other: &Self) -> Result<f64> {
        let ov = self.inner(other)?.norm();
        let denom = (norm_sqr(&self.amplitudes) * norm_sqr(&other.amplitudes)).sqrt();
        Ok((ov / denom).min(1.0))
    }

    /// The two branches of a subsystem: amplitudes with its bit 0 and bit 1.
    fn split(&self, id: SubsystemId) -> Result<[Vec<C64>; 2]> {
        let shift = self.layout.shift_of(id)?;
        let mut out = [Vec::with_capacity(self.dim() / 2), Vec::with_capacity(self.dim() / 2)];
        for base in (0..self.dim()).filter(|b| b & (1 << shift) == 0) {
            out[0].push(self.amplitudes[base]);
            out[1].push(self.amplitudes[base | (1 << shift)]);
        }
        Ok(out)
    }

    /// Reduced single-subsystem density matrix (rows/cols in level order).
    pub fn reduced_density(&self, id: SubsystemId) -> Result<[[C64; 2]; 2]> {
        let [v0, v1] = self.split(id)?;
        let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
        Ok([[dot(&v0, &v0), dot(&v0, &v1)], [dot(&v1, &v0), dot(&v1, &v1)]])
    }

    /// Remove a source that sits in an exact product factor and flag it parked.
    pub fn discard_parked(&self, source: SubsystemId) -> Result<Self> {
        match self.layout.kind(source) {
            Some(SubsystemKind::Source) => {}
            Some(SubsystemKind::Photon) => {
                return Err(Error::Target(format!("{source} is a photon, not a source")))
            }
            None => return Err(Error::Target(format!("unknown subsystem {source}"))),
        }
        let [v0, v1] = self.split(source)?;
        let (n0, n1) = (norm_sqr(&v0), norm_sqr(&v1));
        let ov: C64 = v0.iter().zip(&v1).map(|(a, b)| a.conj() * b).sum();
        // Gram determinant of the two branches; zero iff they are parallel.
        if n0 * n1 - ov.norm_sqr() > CHECK_TOL {
            return Err(Error::Entanglement(source));
        }
        let (mut keep, weight) = if n0 >= n1 { (v0, n0) } else { (v1, n1) };
        let scale = weight.sqrt();
        keep.iter_mut().for_each(|a| *a /= scale);
        Ok(Self { layout: self.layout.with_parked(source), amplitudes: keep })
    }
}

/// Free-function form of [`StateVector::fidelity_up_to_phase`].
pub fn fidelity_up_to_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity_up_to_phase(b)
}

/// Single-qubit computational basis `{|0⟩, |1⟩}` in the vector form used by
/// [`StateVector::measure_in_basis`].
pub fn computational_basis() -> Vec<Vec<C64>> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    vec![vec![one, zero], vec![zero, one]]
}
