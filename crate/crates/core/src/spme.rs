//! Long-range smooth PME: charge spreading, influence function, force
//! interpolation and the single-node pipeline that ties them together.
//!
//! Conventions:
//! - The charge grid `Q` is real; its spectrum is the unnormalized forward
//!   DFT `Q^`.
//! - The potential grid is `phi = P * IDFT(G . Q^)` with `P = nx*ny*nz`, i.e.
//!   the unnormalized inverse. The reciprocal energy is then
//!   `E = 1/2 sum_k Q(k) phi(k) = 1/2 sum_m G(m) |Q^(m)|^2`.
//! - No Coulomb prefactor is applied; energies are in units of `q^2 / length`.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atoms::AtomSet;
use crate::error::{Error, Result};
use crate::fft::{fft_3d, Direction};
use crate::spline::{cardinal_bspline, AxisSpline, SplineWeights};
use crate::volume::{Dims, Volume3D};

/// Orthorhombic periodic cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub lengths: [f64; 3],
}

impl Cell {
    pub fn new(lengths: [f64; 3]) -> Result<Self> {
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cell lengths must be positive, got {lengths:?}"
            )));
        }
        Ok(Cell { lengths })
    }

    pub fn cubic(l: f64) -> Result<Self> {
        Cell::new([l; 3])
    }

    pub fn unit() -> Self {
        Cell { lengths: [1.0; 3] }
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }
}

impl Default for Cell {
    fn default() -> Self {
        Cell::unit()
    }
}

/// Forces on each atom, `[fx, fy, fz]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForceSet(pub Vec<[f64; 3]>);

impl ForceSet {
    pub fn zeros(n: usize) -> Self {
        ForceSet(vec![[0.0; 3]; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[[f64; 3]] {
        &self.0
    }

    pub fn net(&self) -> [f64; 3] {
        self.0.iter().fold([0.0; 3], |acc, f| {
            [acc[0] + f[0], acc[1] + f[1], acc[2] + f[2]]
        })
    }

    /// Largest absolute force component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest component-wise difference.
    pub fn max_abs_diff(&self, other: &ForceSet) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |self - reference|` over all components, relative to
    /// `max |reference|`.
    pub fn max_rel_error(&self, reference: &ForceSet) -> f64 {
        let scale = reference.max_abs();
        if scale == 0.0 {
            self.max_abs_diff(reference)
        } else {
            self.max_abs_diff(reference) / scale
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .map(|f| format!("{:.17e} {:.17e} {:.17e}\n", f[0], f[1], f[2]))
            .collect()
    }
}

fn splines(atoms: &AtomSet, dims: Dims) -> Vec<SplineWeights> {
    let d = dims.as_array();
    atoms
        .positions()
        .iter()
        .map(|&p| SplineWeights::new(p, d))
        .collect()
}

/// Deposits every atom onto the Z rows `z_range` of the grid. `grid` holds
/// just those rows (X fastest). Atoms are processed in order, so the result
/// is deterministic.
pub(crate) fn spread_slab(atoms: &AtomSet, dims: Dims, z_range: Range<usize>, grid: &mut [f64]) {
    let plane = dims.nx * dims.ny;
    for (sw, &q) in splines(atoms, dims).iter().zip(atoms.charges()) {
        let [ax, ay, az] = &sw.axes;
        for k in 0..4 {
            let z = az.index(k, dims.nz);
            if !z_range.contains(&z) {
                continue;
            }
            let zoff = (z - z_range.start) * plane;
            let qz = q * az.weights[k];
            for j in 0..4 {
                let row = zoff + ay.index(j, dims.ny) * dims.nx;
                let qyz = qz * ay.weights[j];
                for i in 0..4 {
                    grid[row + ax.index(i, dims.nx)] += qyz * ax.weights[i];
                }
            }
        }
    }
}

/// Real charge grid: each atom contributes `q * wx * wy * wz` over its
/// 4x4x4 spline support, wrapping periodically.
pub fn spread_charges(atoms: &AtomSet, dims: Dims) -> Vec<f64> {
    let mut grid = vec![0.0; dims.len()];
    spread_slab(atoms, dims, 0..dims.nz, &mut grid);
    grid
}

/// Force contributions from the Z rows `z_range` of the potential grid.
/// `potential` holds just those rows.
pub(crate) fn interpolate_slab(
    potential: &[f64],
    dims: Dims,
    z_range: Range<usize>,
    atoms: &AtomSet,
    cell: &Cell,
) -> ForceSet {
    let sw = splines(atoms, dims);
    let plane = dims.nx * dims.ny;
    let scale = [
        dims.nx as f64 / cell.lengths[0],
        dims.ny as f64 / cell.lengths[1],
        dims.nz as f64 / cell.lengths[2],
    ];
    let forces = sw
        .par_iter()
        .zip(atoms.charges().par_iter())
        .map(|(sw, &q)| {
            let [ax, ay, az] = &sw.axes;
            let mut g = [0.0; 3];
            for k in 0..4 {
                let z = az.index(k, dims.nz);
                if !z_range.contains(&z) {
                    continue;
                }
                let zoff = (z - z_range.start) * plane;
                for j in 0..4 {
                    let row = zoff + ay.index(j, dims.ny) * dims.nx;
                    for i in 0..4 {
                        let p = potential[row + ax.index(i, dims.nx)];
                        g[0] += p * ax.dweights[i] * ay.weights[j] * az.weights[k];
                        g[1] += p * ax.weights[i] * ay.dweights[j] * az.weights[k];
                        g[2] += p * ax.weights[i] * ay.weights[j] * az.dweights[k];
                    }
                }
            }
            [-q * g[0] * scale[0], -q * g[1] * scale[1], -q * g[2] * scale[2]]
        })
        .collect();
    ForceSet(forces)
}

/// Z rows touched by an atom's spline support.
pub(crate) fn support_rows(pos: [f64; 3], dims: Dims) -> [usize; 4] {
    let az = AxisSpline::new(pos[2], dims.nz);
    [0, 1, 2, 3].map(|k| az.index(k, dims.nz))
}

/// `F = -q * grad(phi)` interpolated with spline derivatives.
pub fn interpolate_forces(
    potential: &[f64],
    dims: Dims,
    atoms: &AtomSet,
    cell: &Cell,
) -> Result<ForceSet> {
    if potential.len() != dims.len() {
        return Err(Error::LengthMismatch {
            expected: dims.len(),
            actual: potential.len(),
        });
    }
    Ok(interpolate_slab(potential, dims, 0..dims.nz, atoms, cell))
}

/// Signed frequency of FFT bin `k` on an `n`-point axis.
#[inline]
pub fn signed_freq(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// `|b(m)|^2` for order-4 splines on an `n`-point axis.
pub fn euler_factor_sq(m: usize, n: usize) -> f64 {
    let denom: Complex64 = (0..3)
        .map(|k| {
            let arg = 2.0 * PI * ((m * k) % n) as f64 / n as f64;
            Complex64::from_polar(cardinal_bspline(4, k as f64 + 1.0), arg)
        })
        .sum();
    1.0 / denom.norm_sqr()
}

/// Precomputed reciprocal-space influence function.
#[derive(Clone, Debug, PartialEq)]
pub struct GreensVolume {
    dims: Dims,
    values: Vec<f64>,
}

impl GreensVolume {
    pub fn from_values(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "influence function values must be finite and non-negative".into(),
            ));
        }
        Ok(GreensVolume { dims, values })
    }

    /// Uses the real part of a stored volume.
    pub fn from_volume(v: &Volume3D) -> Result<Self> {
        GreensVolume::from_values(v.dims(), v.real_part())
    }

    pub fn to_volume(&self) -> Volume3D {
        Volume3D::from_real(self.dims, &self.values).expect("same dims")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Smooth-PME influence function
/// `G(m) = exp(-pi^2 |m|^2 / beta^2) / (pi V |m|^2) * |b_x b_y b_z|^2`,
/// with `G(0) = 0`.
pub fn make_greens(dims: Dims, beta: f64, cell: &Cell) -> Result<GreensVolume> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let d = dims.as_array();
    let b: Vec<Vec<f64>> = (0..3)
        .map(|a| (0..d[a]).map(|m| euler_factor_sq(m, d[a])).collect())
        .collect();
    let volume = cell.volume();
    let values = (0..dims.len())
        .into_par_iter()
        .map(|idx| {
            if idx == 0 {
                return 0.0;
            }
            let (x, y, z) = dims.coords(idx);
            let m = [
                signed_freq(x, d[0]) as f64 / cell.lengths[0],
                signed_freq(y, d[1]) as f64 / cell.lengths[1],
                signed_freq(z, d[2]) as f64 / cell.lengths[2],
            ];
            let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
            (-PI * PI * m2 / (beta * beta)).exp() / (PI * volume * m2) * b[0][x] * b[1][y] * b[2][z]
        })
        .collect();
    GreensVolume::from_values(dims, values)
}

/// Ewald parameter for `dims`.
///
/// The Gaussian factor `exp(-pi^2 k^2 / beta^2)` reaches `1e-7` at half the
/// smallest axis Nyquist frequency, so it is below `1e-28` at Nyquist itself.
/// The extra headroom keeps order-4 spline aliasing under `1e-3` of the peak
/// force.
pub fn default_beta(dims: Dims, cell: &Cell) -> f64 {
    let nyquist = (0..3)
        .map(|a| dims.as_array()[a] as f64 / (2.0 * cell.lengths[a]))
        .fold(f64::INFINITY, f64::min);
    PI * (nyquist / 2.0) / (1e7f64).ln().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LrResult {
    pub forces: ForceSet,
    pub energy: f64,
}

/// Applies the influence function to a charge spectrum in place.
pub(crate) fn multiply_greens(spectrum: &mut [Complex64], greens: &[f64]) {
    spectrum
        .par_iter_mut()
        .zip(greens.par_iter())
        .for_each(|(s, &g)| *s *= g);
}

/// Potential grid from a real charge grid.
pub fn potential_grid(charge: &[f64], greens: &GreensVolume) -> Result<Vec<f64>> {
    let dims = greens.dims();
    let mut spectrum = fft_3d(&Volume3D::from_real(dims, charge)?, Direction::Forward)?;
    multiply_greens(spectrum.data_mut(), greens.values());
    let back = fft_3d(&spectrum, Direction::Inverse)?;
    let p = dims.len() as f64;
    Ok(back.data().iter().map(|c| c.re * p).collect())
}

pub fn grid_energy(charge: &[f64], potential: &[f64]) -> f64 {
    0.5 * charge.iter().zip(potential).map(|(q, p)| q * p).sum::<f64>()
}

/// spread -> forward 3D FFT -> influence multiply -> inverse 3D FFT ->
/// force interpolation.
pub fn lr_pipeline(atoms: &AtomSet, greens: &GreensVolume, cell: &Cell) -> Result<LrResult> {
    let dims = greens.dims();
    let charge = spread_charges(atoms, dims);
    let potential = potential_grid(&charge, greens)?;
    let energy = grid_energy(&charge, &potential);
    let forces = interpolate_forces(&potential, dims, atoms, cell)?;
    Ok(LrResult { forces, energy })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reordering {
    pub order: Vec<usize>,
    pub stalls: usize,
}

fn supports_overlap(a: &SplineWeights, b: &SplineWeights, dims: Dims) -> bool {
    let d = dims.as_array();
    (0..3).all(|ax| {
        let n = d[ax];
        let diff = (a.axes[ax].base + n - b.axes[ax].base) % n;
        diff.min(n - diff) < 4
    })
}

/// Greedy hazard-avoiding reorder for a spreading pipeline of depth
/// `window`.
///
/// At each issue slot the earliest pending atom whose 4x4x4 support is
/// disjoint from every atom issued in the previous `window - 1` slots is
/// issued. If no pending atom qualifies, a bubble is issued and counted as a
/// stall.
pub fn reorder_atoms(atoms: &AtomSet, dims: Dims, window: usize) -> Result<Reordering> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be >= 1".into()));
    }
    let sw = splines(atoms, dims);
    let mut pending: VecDeque<usize> = (0..atoms.len()).collect();
    let mut recent: VecDeque<Option<usize>> = VecDeque::with_capacity(window);
    let mut order = Vec::with_capacity(atoms.len());
    let mut stalls = 0;
    while !pending.is_empty() {
        let pick = pending.iter().position(|&c| {
            recent
                .iter()
                .flatten()
                .all(|&r| !supports_overlap(&sw[c], &sw[r], dims))
        });
        let issued = match pick {
            Some(p) => {
                let atom = pending.remove(p).unwrap();
                order.push(atom);
                Some(atom)
            }
            None => {
                stalls += 1;
                None
            }
        };
        if window > 1 {
            if recent.len() == window - 1 {
                recent.pop_front();
            }
            recent.push_back(issued);
        }
    }
    Ok(Reordering { order, stalls })
}
