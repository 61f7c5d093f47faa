//! Sequential preparation of matrix-product states on a chain of sources.
//!
//! A recipe is a product ket `|i₁…i_N⟩` followed by nearest-neighbour gates
//! `V₁ … V_{N−1}` with `V_k` acting on qubits `(k, k+1)`; `V₁` is applied first.
//! Gates given as CZ circuits (local layers interleaved with `U_CZ`) can be run
//! through the repeat-until-success gate instead of ideal unitaries.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, Gate2};
use crate::mubgate::{rus_cz, GateTranscript, DEFAULT_MAX_ROUNDS};
use crate::qstate::{LocalUnitary, StateVector, SubsystemId, SubsystemLayout, INPUT_TOL};

/// Local gates on `(qubit k, qubit k+1)`.
pub type LocalPair = [Gate2; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum TwoQubitGate {
    /// Raw 4×4 unitary; the first qubit is the most significant index bit.
    Matrix(DMatrix<C64>),
    /// `L_m · U_CZ · L_{m−1} · … · U_CZ · L_0`, with `layers = [L_0, …, L_m]`.
    CzCircuit { layers: Vec<LocalPair> },
}

fn kron2(pair: &LocalPair) -> DMatrix<C64> {
    gates::to_dynamic(&pair[0]).kronecker(&gates::to_dynamic(&pair[1]))
}

fn cz_matrix() -> DMatrix<C64> {
    let mut m = DMatrix::identity(4, 4);
    m[(3, 3)] = C64::new(-1.0, 0.0);
    m
}

impl TwoQubitGate {
    /// `post · U_CZ · pre`.
    pub fn single_cz(pre: LocalPair, post: LocalPair) -> Self {
        TwoQubitGate::CzCircuit { layers: vec![pre, post] }
    }

    pub fn cz_count(&self) -> Option<usize> {
        match self {
            TwoQubitGate::Matrix(_) => None,
            TwoQubitGate::CzCircuit { layers } => Some(layers.len().saturating_sub(1)),
        }
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        match self {
            TwoQubitGate::Matrix(m) => m.clone(),
            TwoQubitGate::CzCircuit { layers } => {
                let mut acc = kron2(&layers[0]);
                for layer in &layers[1..] {
                    acc = kron2(layer) * cz_matrix() * acc;
                }
                acc
            }
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        match self {
            TwoQubitGate::Matrix(m) => {
                if m.nrows() != 4 || m.ncols() != 4 {
                    return Err(Error::Recipe(format!("gate {k} is not 4x4")));
                }
                let defect = gates::unitarity_defect(m);
                if defect > INPUT_TOL {
                    return Err(Error::Recipe(format!("gate {k} is not unitary (defect {defect:e})")));
                }
            }
            TwoQubitGate::CzCircuit { layers } => {
                if layers.len() < 2 {
                    return Err(Error::Recipe(format!("gate {k} needs at least one CZ")));
                }
                for g in layers.iter().flatten() {
                    let defect = gates::unitarity_defect(&gates::to_dynamic(g));
                    if defect > INPUT_TOL {
                        return Err(Error::Recipe(format!("gate {k} has a non-unitary local (defect {defect:e})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpsRecipe {
    initial: Vec<[C64; 2]>,
    gates: Vec<TwoQubitGate>,
}

impl MpsRecipe {
    pub fn new(initial: Vec<[C64; 2]>, gates: Vec<TwoQubitGate>) -> Result<Self> {
        let n = initial.len();
        if n < 2 {
            return Err(Error::Recipe(format!("need at least 2 qubits, got {n}")));
        }
        if gates.len() != n - 1 {
            return Err(Error::Recipe(format!("{n} qubits need {} gates, got {}", n - 1, gates.len())));
        }
        for (k, ket) in initial.iter().enumerate() {
            let norm = (ket[0].norm_sqr() + ket[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > INPUT_TOL {
                return Err(Error::Recipe(format!("initial ket {k} has norm {norm}")));
            }
        }
        for (k, g) in gates.iter().enumerate() {
            g.validate(k)?;
        }
        Ok(Self { initial, gates })
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[[C64; 2]] {
        &self.initial
    }

    pub fn gates(&self) -> &[TwoQubitGate] {
        &self.gates
    }

    /// Same recipe with gate `k` replaced.
    pub fn with_gate(&self, k: usize, gate: TwoQubitGate) -> Result<Self> {
        let mut gates = self.gates.clone();
        *gates
            .get_mut(k)
            .ok_or_else(|| Error::Recipe(format!("no gate {k}")))? = gate;
        Self::new(self.initial.clone(), gates)
    }

    fn initial_state(&self) -> Result<(StateVector, Vec<SubsystemId>)> {
        let (layout, ids) = SubsystemLayout::with_sources(self.n());
        Ok((StateVector::product_state(layout, &self.initial)?, ids))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RecipeFile =
            serde_json::from_str(text).map_err(|e| Error::Recipe(format!("invalid recipe document: {e}")))?;
        file.into_recipe()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RecipeFile::from_recipe(self)).expect("recipe serializes")
    }
}

/// Apply `V_{N−1} ⋯ V₁` to the initial product ket with ideal gates.
pub fn prepare_mps(recipe: &MpsRecipe) -> Result<StateVector> {
    let (mut state, ids) = recipe.initial_state()?;
    for (k, gate) in recipe.gates.iter().enumerate() {
        let u = LocalUnitary::new(vec![ids[k], ids[k + 1]], gate.matrix())
            .map_err(|e| Error::Recipe(format!("gate {k}: {e}")))?;
        state = state.apply_unitary(&u)?;
    }
    Ok(state)
}

fn apply_pair(state: &StateVector, pair: &LocalPair, a: SubsystemId, b: SubsystemId) -> Result<StateVector> {
    state
        .apply_unitary(&LocalUnitary::single(a, &pair[0])?)?
        .apply_unitary(&LocalUnitary::single(b, &pair[1])?)
}

/// Run the recipe with every `U_CZ` realized by [`rus_cz`]. Returns one
/// transcript per CZ in application order.
pub fn prepare_via_rus<R: Rng + ?Sized>(recipe: &MpsRecipe, rng: &mut R) -> Result<(StateVector, Vec<GateTranscript>)> {
    if let Some(k) = recipe.gates.iter().position(|g| g.cz_count().is_none()) {
        return Err(Error::Recipe(format!("gate {k} is a raw matrix without a CZ decomposition")));
    }
    let (mut state, ids) = recipe.initial_state()?;
    let mut transcripts = Vec::new();
    for (k, gate) in recipe.gates.iter().enumerate() {
        let TwoQubitGate::CzCircuit { layers } = gate else { unreachable!() };
        let (a, b) = (ids[k], ids[k + 1]);
        state = apply_pair(&state, &layers[0], a, b)?;
        for layer in &layers[1..] {
            let (next, transcript) = rus_cz(&state, a, b, rng, DEFAULT_MAX_ROUNDS)?;
            transcripts.push(transcript);
            state = apply_pair(&next, layer, a, b)?;
        }
    }
    Ok((state, transcripts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PresetKind {
    #[serde(rename = "ghz")]
    Ghz,
    #[serde(rename = "w")]
    W,
    #[serde(rename = "cluster1d")]
    Cluster1d,
}

impl PresetKind {
    pub const ALL: [PresetKind; 3] = [PresetKind::Ghz, PresetKind::W, PresetKind::Cluster1d];
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetKind::Ghz => "ghz",
            PresetKind::W => "w",
            PresetKind::Cluster1d => "cluster1d",
        })
    }
}

impl FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(PresetKind::Ghz),
            "w" => Ok(PresetKind::W),
            "cluster1d" | "cluster" => Ok(PresetKind::Cluster1d),
            other => Err(Error::Argument(format!("unknown preset '{other}'"))),
        }
    }
}

const KET0: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
const KET1: [C64; 2] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
const PLUS: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];

/// Rotation by `theta` inside the `{|10⟩, |01⟩}` block
/// (`|10⟩ → cos θ|10⟩ + sin θ|01⟩`), identity on `|00⟩` and `|11⟩`, written
/// as a two-CZ circuit.
pub fn excitation_sharing_gate(theta: f64) -> TwoQubitGate {
    use gates::{hadamard, rx, rz, s_gate};
    use std::f64::consts::FRAC_PI_2;
    let h = hadamard();
    let r = rx(FRAC_PI_2);
    let mut layers = vec![
        [r, h * r * s_gate()],
        [rx(-theta), h * rz(-theta) * h],
        [r.adjoint(), s_gate().adjoint() * r.adjoint() * h],
    ];
    // fix the global phase so that |00⟩ maps to itself exactly
    let phase = TwoQubitGate::CzCircuit { layers: layers.clone() }.matrix()[(0, 0)];
    let fix = phase.conj() / phase.norm();
    layers[0][0] *= fix;
    TwoQubitGate::CzCircuit { layers }
}

pub fn preset_recipe(kind: PresetKind, n: usize) -> Result<MpsRecipe> {
    if n < 2 {
        return Err(Error::Argument(format!("presets need n >= 2, got {n}")));
    }
    let id = gates::identity();
    let h = gates::hadamard();
    match kind {
        PresetKind::Cluster1d => {
            MpsRecipe::new(vec![PLUS; n], vec![TwoQubitGate::single_cz([id, id], [id, id]); n - 1])
        }
        PresetKind::Ghz => {
            let mut initial = vec![KET0; n];
            initial[0] = PLUS;
            // CNOT(k → k+1) = (I⊗H) U_CZ (I⊗H)
            MpsRecipe::new(initial, vec![TwoQubitGate::single_cz([id, h], [id, h]); n - 1])
        }
        PresetKind::W => {
            let mut initial = vec![KET0; n];
            initial[0] = KET1;
            let gates = (1..n)
                .map(|k| excitation_sharing_gate((1.0 / (n - k + 1) as f64).sqrt().acos()))
                .collect();
            MpsRecipe::new(initial, gates)
        }
    }
}

/// Closed-form amplitudes of the preset targets.
pub fn preset_target(kind: PresetKind, n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::Argument(format!("presets need n >= 2, got {n}")));
    }
    let dim = 1usize << n;
    let zero = C64::new(0.0, 0.0);
    let mut amps = vec![zero; dim];
    match kind {
        PresetKind::Ghz => {
            amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
            amps[dim - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
        }
        PresetKind::W => {
            let a = (1.0 / n as f64).sqrt();
            for k in 0..n {
                amps[1 << k] = C64::new(a, 0.0);
            }
        }
        PresetKind::Cluster1d => {
            let a = (dim as f64).sqrt().recip();
            for (x, amp) in amps.iter_mut().enumerate() {
                // (−1)^(number of adjacent 11 pairs)
                let pairs = (x & (x >> 1)).count_ones();
                *amp = C64::new(if pairs % 2 == 0 { a } else { -a }, 0.0);
            }
        }
    }
    let (layout, _) = SubsystemLayout::with_sources(n);
    StateVector::new(layout, amps)
}

// ---- JSON document -------------------------------------------------------

type CPair = [f64; 2];
type M2 = [[CPair; 2]; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecipeFile {
    n: usize,
    initial: Vec<[CPair; 2]>,
    gates: Vec<GateFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GateFile {
    Matrix(Vec<Vec<CPair>>),
    SingleCz(SingleCzFile),
    Circuit(CircuitFile),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleCzFile {
    pre: [M2; 2],
    post: [M2; 2],
    cz: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    layers: Vec<[M2; 2]>,
}

fn c_in(p: CPair) -> C64 {
    C64::new(p[0], p[1])
}

fn c_out(c: C64) -> CPair {
    [c.re, c.im]
}

fn m2_in(m: &M2) -> Gate2 {
    Gate2::new(c_in(m[0][0]), c_in(m[0][1]), c_in(m[1][0]), c_in(m[1][1]))
}

fn m2_out(g: &Gate2) -> M2 {
    [[c_out(g[(0, 0)]), c_out(g[(0, 1)])], [c_out(g[(1, 0)]), c_out(g[(1, 1)])]]
}

impl RecipeFile {
    fn into_recipe(self) -> Result<MpsRecipe> {
        if self.initial.len() != self.n {
            return Err(Error::Recipe(format!("n = {} but {} initial kets", self.n, self.initial.len())));
        }
        let initial = self.initial.iter().map(|k| [c_in(k[0]), c_in(k[1])]).collect();
        let gates = self
            .gates
            .into_iter()
            .enumerate()
            .map(|(k, g)| match g {
                GateFile::Matrix(rows) => {
                    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                        return Err(Error::Recipe(format!("gate {k} matrix must be 4x4")));
                    }
                    Ok(TwoQubitGate::Matrix(DMatrix::from_fn(4, 4, |i, j| c_in(rows[i][j]))))
                }
                GateFile::SingleCz(s) => {
                    if !s.cz {
                        return Err(Error::Recipe(format!("gate {k}: decomposed gates need \"cz\": true")));
                    }
                    Ok(TwoQubitGate::single_cz(
                        [m2_in(&s.pre[0]), m2_in(&s.pre[1])],
                        [m2_in(&s.post[0]), m2_in(&s.post[1])],
                    ))
                }
                GateFile::Circuit(c) => Ok(TwoQubitGate::CzCircuit {
                    layers: c.layers.iter().map(|p| [m2_in(&p[0]), m2_in(&p[1])]).collect(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        MpsRecipe::new(initial, gates)
    }

    fn from_recipe(r: &MpsRecipe) -> Self {
        let gates = r
            .gates
            .iter()
            .map(|g| match g {
                TwoQubitGate::Matrix(m) => {
                    GateFile::Matrix((0..4).map(|i| (0..4).map(|j| c_out(m[(i, j)])).collect()).collect())
                }
                TwoQubitGate::CzCircuit { layers } if layers.len() == 2 => GateFile::SingleCz(SingleCzFile {
                    pre: [m2_out(&layers[0][0]), m2_out(&layers[0][1])],
                    post: [m2_out(&layers[1][0]), m2_out(&layers[1][1])],
                    cz: true,
                }),
                TwoQubitGate::CzCircuit { layers } => GateFile::Circuit(CircuitFile {
                    layers: layers.iter().map(|p| [m2_out(&p[0]), m2_out(&p[1])]).collect(),
                }),
            })
            .collect();
        RecipeFile {
            n: r.n(),
            initial: r.initial.iter().map(|k| [c_out(k[0]), c_out(k[1])]).collect(),
            gates,
        }
    }
}
