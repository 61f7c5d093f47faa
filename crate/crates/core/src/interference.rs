//! Fluorescence interference from two independent two-level atoms.
//!
//! A photon detected in direction `k̂` resets the atoms with
//! `R = R⁽¹⁾ + R⁽²⁾`, `R⁽ⁱ⁾ = d(k̂) e^{−i k0 k̂·rᵢ} σ₋⁽ⁱ⁾`, where
//! `d(k̂) = sin∠(k̂, D)` is the dipole emission amplitude (its square integrates
//! to `8π/3` over the sphere). The click density `‖R ψ‖²` splits into the two
//! single-atom intensities plus an interference term.
//!
//! Two-atom states use the basis `{gg, ge, eg, ee}` (atom 1 is the most
//! significant index bit); single-atom matrices use `{g, e}`.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionConfig {
    pub r1: Vector3<f64>,
    pub r2: Vector3<f64>,
    pub k0: f64,
    pub dipole: Vector3<f64>,
    pub gamma: f64,
    pub omega: f64,
    pub delta: f64,
}

impl EmissionConfig {
    pub fn new(
        r1: Vector3<f64>,
        r2: Vector3<f64>,
        k0: f64,
        dipole: Vector3<f64>,
        gamma: f64,
        omega: f64,
        delta: f64,
    ) -> Result<Self> {
        if (dipole.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("dipole must be a unit vector, |D| = {}", dipole.norm())));
        }
        if !(gamma > 0.0) {
            return Err(Error::Argument(format!("gamma must be positive, got {gamma}")));
        }
        if !(k0 > 0.0) {
            return Err(Error::Argument(format!("k0 must be positive, got {k0}")));
        }
        Ok(Self { r1, r2, k0, dipole, gamma, omega, delta })
    }

    /// Atoms at `±x̂/2` (unit separation), dipole along `ẑ`, and `k0 = k0r`.
    /// Drive defaults to `Γ = Ω = 1`, `Δ = 0`.
    pub fn standard(k0r: f64) -> Result<Self> {
        Self::new(
            Vector3::new(0.5, 0.0, 0.0),
            Vector3::new(-0.5, 0.0, 0.0),
            k0r,
            Vector3::z(),
            1.0,
            1.0,
            0.0,
        )
    }

    pub fn with_drive(mut self, gamma: f64, omega: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Argument(format!("gamma must be positive, got {gamma}")));
        }
        self.gamma = gamma;
        self.omega = omega;
        self.delta = delta;
        Ok(self)
    }

    pub fn separation(&self) -> Vector3<f64> {
        self.r1 - self.r2
    }

    /// Optical phase difference `k0 k̂·(r1 − r2)`.
    pub fn phase_difference(&self, dir: Direction) -> f64 {
        self.k0 * dir.unit_vector().dot(&self.separation())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::Argument(format!("direction ({theta}, {phi}) out of range")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }
}

/// `sin` of the angle between the emission direction and the dipole.
pub fn dipole_amplitude(dir: Direction, dipole: &Vector3<f64>) -> f64 {
    let c = dir.unit_vector().dot(dipole);
    (1.0 - c * c).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwoAtomState {
    Pure(Vector4<C64>),
    Density(Matrix4<C64>),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl TwoAtomState {
    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        let s = TwoAtomState::Pure(Vector4::from(amplitudes));
        s.validate()?;
        Ok(s)
    }

    pub fn density(rho: Matrix4<C64>) -> Result<Self> {
        let s = TwoAtomState::Density(rho);
        s.validate()?;
        Ok(s)
    }

    pub fn ground() -> Self {
        TwoAtomState::Pure(Vector4::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)))
    }

    /// `(|eg⟩ + |ge⟩)/√2`
    pub fn symmetric() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoAtomState::Pure(Vector4::new(c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)))
    }

    /// `(|eg⟩ − |ge⟩)/√2`
    pub fn antisymmetric() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoAtomState::Pure(Vector4::new(c(0.0, 0.0), c(-h, 0.0), c(h, 0.0), c(0.0, 0.0)))
    }

    /// `ρ₁ ⊗ ρ₂` of two single-atom density matrices.
    pub fn product(rho1: &Matrix2<C64>, rho2: &Matrix2<C64>) -> Result<Self> {
        Self::density(rho1.kronecker(rho2))
    }

    pub fn density_matrix(&self) -> Matrix4<C64> {
        match self {
            TwoAtomState::Pure(v) => v * v.adjoint(),
            TwoAtomState::Density(rho) => *rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TwoAtomState::Pure(v) => {
                if (v.norm() - 1.0).abs() > STATE_TOL {
                    return Err(Error::State(format!("pure state has norm {}", v.norm())));
                }
            }
            TwoAtomState::Density(rho) => {
                if (rho - rho.adjoint()).norm() > STATE_TOL {
                    return Err(Error::State("density matrix is not Hermitian".into()));
                }
                let tr = rho.trace();
                if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
                    return Err(Error::State(format!("density matrix has trace {tr}")));
                }
                let min = rho.symmetric_eigenvalues().min();
                if min < -STATE_TOL {
                    return Err(Error::State(format!("density matrix has eigenvalue {min:e}")));
                }
            }
        }
        Ok(())
    }
}

/// Single-atom lowering operators embedded in the two-atom space.
fn lowering(atom: usize) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    let one = c(1.0, 0.0);
    if atom == 1 {
        m[(0, 2)] = one; // eg → gg
        m[(1, 3)] = one; // ee → ge
    } else {
        m[(0, 1)] = one; // ge → gg
        m[(2, 3)] = one; // ee → eg
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResetOperator {
    pub atom1: Matrix4<C64>,
    pub atom2: Matrix4<C64>,
}

impl ResetOperator {
    pub fn total(&self) -> Matrix4<C64> {
        self.atom1 + self.atom2
    }
}

pub fn reset_operator(config: &EmissionConfig, dir: Direction) -> ResetOperator {
    let d = dipole_amplitude(dir, &config.dipole);
    let k = dir.unit_vector() * config.k0;
    let term = |r: &Vector3<f64>, atom| lowering(atom) * C64::from_polar(d, -k.dot(r));
    ResetOperator { atom1: term(&config.r1, 1), atom2: term(&config.r2, 2) }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntensityTerms {
    pub i1: f64,
    pub i2: f64,
    pub interference: f64,
}

impl IntensityTerms {
    pub fn total(&self) -> f64 {
        self.i1 + self.i2 + self.interference
    }
}

fn expectation(rho: &Matrix4<C64>, op: &Matrix4<C64>) -> C64 {
    (rho * op).trace()
}

fn intensity_unchecked(config: &EmissionConfig, state: &TwoAtomState, dir: Direction) -> f64 {
    let r = reset_operator(config, dir).total();
    match state {
        TwoAtomState::Pure(v) => (r * v).norm_squared(),
        TwoAtomState::Density(rho) => (r * rho * r.adjoint()).trace().re,
    }
}

/// Click density `‖R ψ‖²` (or `tr(R ρ R†)`).
pub fn intensity(config: &EmissionConfig, state: &TwoAtomState, dir: Direction) -> Result<f64> {
    state.validate()?;
    Ok(intensity_unchecked(config, state, dir))
}

pub fn intensity_terms(config: &EmissionConfig, state: &TwoAtomState, dir: Direction) -> Result<IntensityTerms> {
    state.validate()?;
    let r = reset_operator(config, dir);
    Ok(match state {
        TwoAtomState::Pure(v) => {
            let (a, b) = (r.atom1 * v, r.atom2 * v);
            IntensityTerms {
                i1: a.norm_squared(),
                i2: b.norm_squared(),
                interference: 2.0 * a.dotc(&b).re,
            }
        }
        TwoAtomState::Density(rho) => {
            let cross = r.atom1.adjoint() * r.atom2 + r.atom2.adjoint() * r.atom1;
            IntensityTerms {
                i1: expectation(rho, &(r.atom1.adjoint() * r.atom1)).re,
                i2: expectation(rho, &(r.atom2.adjoint() * r.atom2)).re,
                interference: expectation(rho, &cross).re,
            }
        }
    })
}

// ---- driven single atom ----------------------------------------------------

fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
}

fn paulis() -> [Matrix2<C64>; 3] {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    [
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        Matrix2::new(o, z, z, -o),
    ]
}

/// Master-equation generator for one laser-driven atom in the rotating frame:
/// `H = −Δ|e⟩⟨e| + (Ω/2)(σ₊ + σ₋)` with decay `Γ D[σ₋]`.
pub fn bloch_generator(gamma: f64, omega: f64, delta: f64, rho: &Matrix2<C64>) -> Matrix2<C64> {
    let sm = sigma_minus();
    let sp = sm.adjoint();
    let mut h = (sp + sm) * c(omega / 2.0, 0.0);
    h[(1, 1)] -= c(delta, 0.0);
    let i = C64::i();
    let coherent = (h * rho - rho * h) * -i;
    let n = sp * sm;
    let dissipative = (sm * rho * sp - (n * rho + rho * n) * c(0.5, 0.0)) * c(gamma, 0.0);
    coherent + dissipative
}

/// Stationary state of [`bloch_generator`], solved as the 3×3 real linear
/// system for the Bloch vector.
pub fn steady_state_single_atom(gamma: f64, omega: f64, delta: f64) -> Result<Matrix2<C64>> {
    if !(gamma > 0.0) {
        return Err(Error::Argument(format!("gamma must be positive, got {gamma}")));
    }
    let sig = paulis();
    let gen = |rho: &Matrix2<C64>| bloch_generator(gamma, omega, delta, rho);
    let mut m = Matrix3::zeros();
    let mut b = Vector3::zeros();
    let drift = gen(&Matrix2::identity());
    for i in 0..3 {
        b[i] = 0.5 * (sig[i] * drift).trace().re;
        for j in 0..3 {
            m[(i, j)] = 0.5 * (sig[i] * gen(&sig[j])).trace().re;
        }
    }
    let r = m
        .lu()
        .solve(&(-b))
        .ok_or_else(|| Error::Internal("singular Bloch matrix".into()))?;
    let mut rho = Matrix2::identity() * c(0.5, 0.0);
    for i in 0..3 {
        rho += sig[i] * c(0.5 * r[i], 0.0);
    }
    Ok(rho)
}

/// `ρ_ee` of a single-atom density matrix.
pub fn excited_population(rho: &Matrix2<C64>) -> f64 {
    rho[(1, 1)].re
}

// ---- angular scans ---------------------------------------------------------

#[derive(Clone, Debug)]
pub enum PatternSource {
    Explicit(TwoAtomState),
    /// Both atoms in the stationary state of the config's drive.
    Steady,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Grid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::Argument(format!("grid {n_theta}x{n_phi} too small (need >= 2 each)")));
        }
        Ok(Self { n_theta, n_phi })
    }

    /// `θ_i = π i / (n_θ − 1)`, poles included.
    pub fn theta(&self, i: usize) -> f64 {
        PI * i as f64 / (self.n_theta - 1) as f64
    }

    /// `φ_j = 2π j / n_φ`.
    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_phi as f64
    }

    pub fn direction(&self, i: usize, j: usize) -> Direction {
        Direction { theta: self.theta(i), phi: self.phi(j) }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self { n_theta: 181, n_phi: 360 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntensityMap {
    grid: Grid,
    values: Vec<f64>,
}

impl IntensityMap {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_phi + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn argmax(&self) -> (usize, usize) {
        let k = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (k / self.grid.n_phi, k % self.grid.n_phi)
    }

    /// Up to 8 neighbours of a grid cell: `φ` wraps around, `θ` stops at the poles.
    pub fn neighbours(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let n_phi = self.grid.n_phi;
        let mut out = Vec::with_capacity(8);
        for di in [-1i64, 0, 1] {
            let ii = i as i64 + di;
            if ii < 0 || ii >= self.grid.n_theta as i64 {
                continue;
            }
            for dj in [n_phi - 1, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                out.push((ii as usize, (j + dj) % n_phi));
            }
        }
        out
    }

    /// Grid cells no smaller than any neighbour and at least
    /// `rel_threshold × max`.
    pub fn local_maxima(&self, rel_threshold: f64) -> Vec<(usize, usize)> {
        let floor = rel_threshold * self.max();
        let mut out = Vec::new();
        for i in 0..self.grid.n_theta {
            for j in 0..self.grid.n_phi {
                let v = self.get(i, j);
                if v > 0.0 && v >= floor && self.neighbours(i, j).iter().all(|&(a, b)| self.get(a, b) <= v) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// CSV with header `theta,phi,intensity`, rows ordered θ-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,phi,intensity")?;
        for i in 0..self.grid.n_theta {
            for j in 0..self.grid.n_phi {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", self.grid.theta(i), self.grid.phi(j), self.get(i, j))?;
            }
        }
        Ok(())
    }
}

pub fn scan_pattern(config: &EmissionConfig, source: &PatternSource, grid: Grid) -> Result<IntensityMap> {
    let grid = Grid::new(grid.n_theta, grid.n_phi)?;
    let state = match source {
        PatternSource::Explicit(s) => {
            s.validate()?;
            s.clone()
        }
        PatternSource::Steady => {
            let rho = steady_state_single_atom(config.gamma, config.omega, config.delta)?;
            TwoAtomState::product(&rho, &rho)?
        }
    };
    let values = (0..grid.n_theta)
        .into_par_iter()
        .flat_map_iter(|i| {
            let state = &state;
            (0..grid.n_phi).map(move |j| intensity_unchecked(config, state, grid.direction(i, j)).max(0.0))
        })
        .collect();
    Ok(IntensityMap { grid, values })
}
