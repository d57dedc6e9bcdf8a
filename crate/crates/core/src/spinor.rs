//! Pauli two-component spinor densities.
//!
//! Pauli matrices are taken in the standard basis with `sigma_z = diag(1, -1)`.
//! Magnetic quantities follow the Gaussian form `m = -(e hbar / 2 m_e c)
//! Psi^dagger sigma Psi` evaluated with the SI constant values of
//! [`PhysicalConstants`]; only ratios between them are meaningful.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Mul, Sub};

use num_complex::Complex64;

use crate::{Error, PhysicalConstants, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor2 {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor2 {
    pub const fn new(up: Complex64, down: Complex64) -> Self {
        Spinor2 { up, down }
    }

    /// `Psi^dagger Psi`.
    pub fn norm_sq(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `Psi^dagger sigma Psi` from the explicit bilinears.
    pub fn sigma_expectation(&self) -> Vec3 {
        let cross = self.up.conj() * self.down;
        Vec3::new(
            2.0 * cross.re,
            2.0 * cross.im,
            self.up.norm_sqr() - self.down.norm_sqr(),
        )
    }

    pub fn scale(&self, f: Complex64) -> Spinor2 {
        Spinor2::new(self.up * f, self.down * f)
    }
}

/// Local densities of a spinor field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDensities {
    /// Charge density `-e Psi^dagger Psi`.
    pub rho: f64,
    /// Spin density `(hbar/2) Psi^dagger sigma Psi`.
    pub s: Vec3,
    /// Spin per unit norm; its length is always `hbar/2`.
    pub spin_vector: Vec3,
    /// Magnetic moment density `-(e / m_e c) s`.
    pub m: Vec3,
}

fn spin_density(consts: &PhysicalConstants, chi: &Spinor2) -> Vec3 {
    chi.sigma_expectation() * (0.5 * consts.hbar())
}

pub fn pointwise_densities(consts: &PhysicalConstants, chi: &Spinor2) -> Result<SpinDensities> {
    let n = chi.norm_sq();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(
            "pointwise_densities",
            "spinor must be nonzero and finite",
        ));
    }
    let s = spin_density(consts, chi);
    Ok(SpinDensities {
        rho: -consts.e_charge() * n,
        s,
        spin_vector: s * (1.0 / n),
        m: s * consts.spin_gyromagnetic_ratio(),
    })
}

/// Charge, spin angular momentum and magnetic moment of a volume element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinPortion {
    pub dq: f64,
    pub dl: Vec3,
    pub dmu: Vec3,
}

pub fn portion_spin(consts: &PhysicalConstants, chi: &Spinor2, dv: f64) -> Result<SpinPortion> {
    if !(dv.is_finite() && dv >= 0.0) {
        return Err(Error::domain("portion_spin", format!("volume must be >= 0, got {dv}")));
    }
    let s = spin_density(consts, chi);
    let dl = s * dv;
    Ok(SpinPortion {
        dq: -consts.e_charge() * chi.norm_sq() * dv,
        dl,
        dmu: dl * consts.spin_gyromagnetic_ratio(),
    })
}

/// Edge treatment for grid derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    /// Second-order one-sided differences at the first and last samples.
    OneSided,
}

/// Spinor samples on a uniform grid, `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorGrid {
    dims: [usize; 3],
    spacing: [f64; 3],
    samples: Vec<Spinor2>,
    vector_potential: Option<Vec<Vec3>>,
}

impl SpinorGrid {
    pub fn new(dims: [usize; 3], spacing: [f64; 3], samples: Vec<Spinor2>) -> Result<Self> {
        const OP: &str = "SpinorGrid::new";
        if dims.contains(&0) {
            return Err(Error::config(OP, format!("grid dimensions {dims:?} must be >= 1")));
        }
        if spacing.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::config(OP, format!("grid spacing {spacing:?} must be positive")));
        }
        let n = dims[0] * dims[1] * dims[2];
        if samples.len() != n {
            return Err(Error::config(
                OP,
                format!("{} samples for a {dims:?} grid", samples.len()),
            ));
        }
        Ok(SpinorGrid {
            dims,
            spacing,
            samples,
            vector_potential: None,
        })
    }

    /// Fills a grid from a function of the sample coordinates `(ix h_x, iy h_y, iz h_z)`.
    pub fn from_fn(dims: [usize; 3], spacing: [f64; 3], mut f: impl FnMut(Vec3) -> Spinor2) -> Result<Self> {
        let mut samples = Vec::with_capacity(dims.iter().product());
        for iz in 0..dims[2] {
            for iy in 0..dims[1] {
                for ix in 0..dims[0] {
                    samples.push(f(Vec3::new(
                        ix as f64 * spacing[0],
                        iy as f64 * spacing[1],
                        iz as f64 * spacing[2],
                    )));
                }
            }
        }
        Self::new(dims, spacing, samples)
    }

    pub fn with_vector_potential(mut self, a: Vec<Vec3>) -> Result<Self> {
        if a.len() != self.samples.len() {
            return Err(Error::config(
                "SpinorGrid::with_vector_potential",
                format!("{} potential samples for {} grid points", a.len(), self.samples.len()),
            ));
        }
        self.vector_potential = Some(a);
        Ok(self)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn samples(&self) -> &[Spinor2] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (iz * self.dims[1] + iy) * self.dims[0] + ix
    }

    /// `(ix, iy, iz)` of a flat index.
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [i % nx, (i / nx) % ny, i / (nx * ny)]
    }

    /// Central-difference derivative of `field` along `axis` at flat index `i`.
    fn derivative<T>(&self, field: &[T], axis: usize, i: usize, boundary: Boundary) -> Option<T>
    where
        T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.dims[axis];
        if n == 1 {
            return None;
        }
        let h = self.spacing[axis];
        let c = self.coords(i);
        let at = |k: usize| {
            let mut cc = c;
            cc[axis] = k;
            field[self.index(cc[0], cc[1], cc[2])]
        };
        let pos = c[axis];
        let inv2h = 0.5 / h;
        Some(match boundary {
            Boundary::Periodic => (at((pos + 1) % n) - at((pos + n - 1) % n)) * inv2h,
            Boundary::OneSided if pos == 0 => {
                // (-3 f0 + 4 f1 - f2) / 2h
                ((at(1) - at(0)) * 4.0 - (at(2) - at(0))) * inv2h
            }
            Boundary::OneSided if pos == n - 1 => ((at(n - 1) - at(n - 2)) * 4.0 - (at(n - 1) - at(n - 3))) * inv2h,
            Boundary::OneSided => (at(pos + 1) - at(pos - 1)) * inv2h,
        })
    }
}

/// Current density fields on the grid, one vector per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurrents {
    pub total: Vec<Vec3>,
    pub convective: Vec<Vec3>,
    pub spin: Vec<Vec3>,
}

/// Convective current
/// `j0 = -(e hbar / m_e) Im(Psi^dagger grad Psi) - (e^2 / m_e c) A |Psi|^2`
/// and spin current `c curl m`, by second-order finite differences.
pub fn current_on_grid(consts: &PhysicalConstants, grid: &SpinorGrid, boundary: Boundary) -> Result<GridCurrents> {
    if let Some(axis) = (0..3).find(|&a| grid.dims[a] == 2) {
        return Err(Error::config(
            "current_on_grid",
            format!("axis {axis} has 2 samples; differentiated axes need at least 3"),
        ));
    }
    let e = consts.e_charge();
    let m_e = consts.m_e();
    let c = consts.c();
    let hbar = consts.hbar();

    let ups: Vec<Complex64> = grid.samples.iter().map(|s| s.up).collect();
    let downs: Vec<Complex64> = grid.samples.iter().map(|s| s.down).collect();
    let moments: Vec<Vec3> = grid
        .samples
        .iter()
        .map(|s| spin_density(consts, s) * consts.spin_gyromagnetic_ratio())
        .collect();
    let mx: Vec<f64> = moments.iter().map(|m| m.x).collect();
    let my: Vec<f64> = moments.iter().map(|m| m.y).collect();
    let mz: Vec<f64> = moments.iter().map(|m| m.z).collect();

    let n = grid.len();
    let mut total = Vec::with_capacity(n);
    let mut convective = Vec::with_capacity(n);
    let mut spin = Vec::with_capacity(n);
    for i in 0..n {
        let s = grid.samples[i];
        let mut grad_im = [0.0; 3];
        for (axis, g) in grad_im.iter_mut().enumerate() {
            let du = grid.derivative(&ups, axis, i, boundary).unwrap_or_default();
            let dd = grid.derivative(&downs, axis, i, boundary).unwrap_or_default();
            *g = (s.up.conj() * du + s.down.conj() * dd).im;
        }
        let mut j0 = Vec3::from(grad_im) * (-e * hbar / m_e);
        if let Some(a) = &grid.vector_potential {
            j0 += a[i] * (-e * e / (m_e * c) * s.norm_sq());
        }
        let d = |f: &[f64], axis: usize| grid.derivative(f, axis, i, boundary).unwrap_or(0.0);
        let curl = Vec3::new(d(&mz, 1) - d(&my, 2), d(&mx, 2) - d(&mz, 0), d(&my, 0) - d(&mx, 1));
        let js = curl * c;
        convective.push(j0);
        spin.push(js);
        total.push(j0 + js);
    }
    Ok(GridCurrents {
        total,
        convective,
        spin,
    })
}
