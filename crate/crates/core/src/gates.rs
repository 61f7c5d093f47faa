//! Fixed single-qubit matrices used to build recipes and corrections.
//!
//! All matrices act on the ordered basis `(|0⟩, |1⟩)` (equivalently `(|E⟩, |L⟩)`
//! for photons).

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Gate2 = Matrix2<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity() -> Gate2 {
    Gate2::identity()
}

pub fn hadamard() -> Gate2 {
    let h = FRAC_1_SQRT_2;
    Gate2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

pub fn pauli_x() -> Gate2 {
    Gate2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// `diag(1, e^{-iφ})`: the phase picked up when the qubit sits in `|1⟩`.
pub fn z_phase(phi: f64) -> Gate2 {
    Gate2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, -phi))
}

/// `diag(1, i)`.
pub fn s_gate() -> Gate2 {
    Gate2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
}

/// `exp(-iθX/2)`.
pub fn rx(theta: f64) -> Gate2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// `exp(-iθY/2)`.
pub fn ry(theta: f64) -> Gate2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Gate2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `exp(-iθZ/2)`.
pub fn rz(theta: f64) -> Gate2 {
    Gate2::new(
        C64::from_polar(1.0, -theta / 2.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// Largest entry-wise deviation of `m†m` from the identity.
pub fn unitarity_defect(m: &nalgebra::DMatrix<C64>) -> f64 {
    let n = m.nrows();
    if m.ncols() != n {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - c(target, 0.0)).norm());
        }
    }
    worst
}

pub fn to_dynamic(m: &Gate2) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}
