//! Radix-2 transforms and the 3D FFT built from 1D passes.
//!
//! Forward convention: `X[k] = sum_j x[j] * exp(-2 pi i j k / n)`. The inverse
//! uses the positive exponent and, with [`Scaling::InverseOneOverN`], divides
//! by `n` (by `nx * ny * nz` in 3D).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{self, Axis, BitLabel, PermutationSpec};
use crate::volume::{Dims, Volume3D};

pub const DEFAULT_LANES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    None,
    InverseOneOverN,
}

#[derive(Clone, Debug)]
pub struct FftPlan {
    n: usize,
    direction: Direction,
    lanes: usize,
    scaling: Scaling,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(n: usize, direction: Direction) -> Result<Self> {
        FftPlan::with_options(n, direction, DEFAULT_LANES.min(n), Scaling::InverseOneOverN)
    }

    pub fn with_options(
        n: usize,
        direction: Direction,
        lanes: usize,
        scaling: Scaling,
    ) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "transform size {n} is not a power of two >= 2"
            )));
        }
        if !lanes.is_power_of_two() || lanes > n {
            return Err(Error::InvalidParameter(format!(
                "lanes = {lanes} must be a power of two no larger than n = {n}"
            )));
        }
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let twiddles = (0..n / 2)
            .map(|k| {
                let (s, c) = (2.0 * std::f64::consts::PI * k as f64 / n as f64).sin_cos();
                Complex64::new(c, sign * s)
            })
            .collect();
        let bitrev = perm::bit_reversal(n)?.dest_table();
        Ok(FftPlan {
            n,
            direction,
            lanes,
            scaling,
            twiddles,
            bitrev,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    fn scale(&self) -> Option<f64> {
        match (self.direction, self.scaling) {
            (Direction::Inverse, Scaling::InverseOneOverN) => Some(1.0 / self.n as f64),
            _ => None,
        }
    }

    /// In-place decimation-in-time transform of one contiguous pencil.
    /// Scaling is not applied here.
    fn dit_unscaled(&self, buf: &mut [Complex64]) {
        let n = self.n;
        for (i, &j) in self.bitrev.iter().enumerate() {
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }

    /// In-place decimation-in-frequency transform: natural-order input,
    /// bit-reversed output.
    fn dif_unscaled(&self, buf: &mut [Complex64]) {
        let n = self.n;
        let mut half = n / 2;
        while half >= 1 {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half];
                    buf[start + k] = a + b;
                    buf[start + k + half] = (a - b) * w;
                }
            }
            half /= 2;
        }
    }

    /// Transforms `buf` in place, including the plan's scaling.
    pub fn process(&self, buf: &mut [Complex64]) -> Result<()> {
        if buf.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: buf.len(),
            });
        }
        self.dit_unscaled(buf);
        if let Some(s) = self.scale() {
            buf.iter_mut().for_each(|v| *v *= s);
        }
        Ok(())
    }

    /// Streaming-unit view of the transform: input arrives in lane order
    /// (see [`perm::lane_input_order`]) and the spectrum leaves in full
    /// bit-reversed order.
    pub fn process_lane_ordered(&self, lane_ordered: &[Complex64]) -> Result<Vec<Complex64>> {
        let to_natural = perm::lane_input_order(self.n, self.lanes)?.inverse();
        let mut buf = to_natural.apply(lane_ordered)?;
        self.dif_unscaled(&mut buf);
        if let Some(s) = self.scale() {
            buf.iter_mut().for_each(|v| *v *= s);
        }
        Ok(buf)
    }
}

pub fn fft_1d(x: &[Complex64], plan: &FftPlan) -> Result<Vec<Complex64>> {
    let mut out = x.to_vec();
    plan.process(&mut out)?;
    Ok(out)
}

/// Address string of a block stored with `order[0]` fastest, given the
/// address bits of each axis.
fn layout_labels(bits: [u32; 3], order: [Axis; 3]) -> Vec<BitLabel> {
    order
        .iter()
        .flat_map(|&a| (0..bits[a as usize]).map(move |i| BitLabel::new(a, i)))
        .collect()
}

/// Permutation moving data stored in layout `from` to layout `to`.
pub fn relayout(dims: Dims, from: [Axis; 3], to: [Axis; 3]) -> Result<PermutationSpec> {
    relayout_bits(dims.bits(), from, to)
}

/// [`relayout`] for blocks whose extents need not be volume-sized (e.g. a
/// slab only a couple of planes thick).
pub fn relayout_bits(bits: [u32; 3], from: [Axis; 3], to: [Axis; 3]) -> Result<PermutationSpec> {
    PermutationSpec::new(layout_labels(bits, from), layout_labels(bits, to))
}

pub(crate) const XYZ: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
pub(crate) const YZX: [Axis; 3] = [Axis::Y, Axis::Z, Axis::X];
pub(crate) const ZXY: [Axis; 3] = [Axis::Z, Axis::X, Axis::Y];

/// Runs `plan` over every contiguous pencil of `data`.
pub(crate) fn transform_pencils(data: &mut [Complex64], plan: &FftPlan) {
    data.par_chunks_mut(plan.n())
        .for_each(|pencil| plan.dit_unscaled(pencil));
}

pub(crate) fn plans_for(dims: Dims, direction: Direction) -> Result<[FftPlan; 3]> {
    let mk = |n| FftPlan::with_options(n, direction, DEFAULT_LANES.min(n), Scaling::None);
    Ok([mk(dims.nx)?, mk(dims.ny)?, mk(dims.nz)?])
}

pub(crate) fn scale_inverse(data: &mut [Complex64], dims: Dims) {
    let s = 1.0 / dims.len() as f64;
    data.par_iter_mut().for_each(|v| *v *= s);
}

/// 3D transform as three passes of 1D transforms: X, Y, Z forward and
/// Z, Y, X inverse. Between passes the volume is re-addressed with a
/// bit-dimension permutation so the next axis is contiguous.
pub fn fft_3d(v: &Volume3D, direction: Direction) -> Result<Volume3D> {
    let dims = v.dims();
    let [px, py, pz] = plans_for(dims, direction)?;
    let mut data = v.data().to_vec();
    match direction {
        Direction::Forward => {
            transform_pencils(&mut data, &px);
            data = relayout(dims, XYZ, YZX)?.apply(&data)?;
            transform_pencils(&mut data, &py);
            data = relayout(dims, YZX, ZXY)?.apply(&data)?;
            transform_pencils(&mut data, &pz);
            data = relayout(dims, ZXY, XYZ)?.apply(&data)?;
        }
        Direction::Inverse => {
            data = relayout(dims, XYZ, ZXY)?.apply(&data)?;
            transform_pencils(&mut data, &pz);
            data = relayout(dims, ZXY, YZX)?.apply(&data)?;
            transform_pencils(&mut data, &py);
            data = relayout(dims, YZX, XYZ)?.apply(&data)?;
            transform_pencils(&mut data, &px);
            scale_inverse(&mut data, dims);
        }
    }
    Volume3D::from_vec(dims, data)
}

pub fn inverse_fft_3d(v: &Volume3D) -> Result<Volume3D> {
    fft_3d(v, Direction::Inverse)
}

/// Complex embedding of a real grid (imaginary parts zero).
pub fn real_to_complex_wrap(dims: Dims, real: &[f64]) -> Result<Volume3D> {
    Volume3D::from_real(dims, real)
}

/// Direct O(n²) transforms, used as runtime references by verification
/// commands. Slow by construction.
pub mod reference {
    use super::*;

    fn unit_root(num: usize, den: usize, sign: f64) -> Complex64 {
        let (s, c) = (2.0 * std::f64::consts::PI * (num % den) as f64 / den as f64).sin_cos();
        Complex64::new(c, sign * s)
    }

    pub fn naive_dft_1d(x: &[Complex64], direction: Direction) -> Vec<Complex64> {
        let n = x.len();
        let sign = if direction == Direction::Forward { -1.0 } else { 1.0 };
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| v * unit_root(j * k, n, sign))
                    .sum()
            })
            .collect()
    }

    /// Triple sum over all source points for every output point. Unscaled in
    /// both directions.
    pub fn naive_dft_3d(v: &Volume3D, direction: Direction) -> Volume3D {
        let d = v.dims();
        let sign = if direction == Direction::Forward { -1.0 } else { 1.0 };
        let out: Vec<Complex64> = (0..d.len())
            .into_par_iter()
            .map(|o| {
                let (kx, ky, kz) = d.coords(o);
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &val) in v.data().iter().enumerate() {
                    let (x, y, z) = d.coords(i);
                    let phase = (x * kx * d.ny * d.nz + y * ky * d.nx * d.nz + z * kz * d.nx * d.ny)
                        % d.len();
                    acc += val * unit_root(phase, d.len(), sign);
                }
                acc
            })
            .collect();
        Volume3D::from_vec(d, out).expect("same dims")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let den = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        num / den
    }

    #[test]
    fn impulse_gives_flat_spectrum() {
        let plan = FftPlan::new(8, Direction::Forward).unwrap();
        let mut x = vec![c(0.0, 0.0); 8];
        x[0] = c(1.0, 0.0);
        for v in fft_1d(&x, &plan).unwrap() {
            assert_eq!(v, c(1.0, 0.0));
        }
    }

    #[test]
    fn constant_gives_dc_only() {
        let plan = FftPlan::new(8, Direction::Forward).unwrap();
        let k = c(0.75, -0.25);
        let out = fft_1d(&vec![k; 8], &plan).unwrap();
        assert!((out[0] - k * 8.0).norm() < 1e-15);
        for v in &out[1..] {
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn matches_naive_dft_32() {
        let x = random_vec(32, 7);
        let plan = FftPlan::new(32, Direction::Forward).unwrap();
        let fast = fft_1d(&x, &plan).unwrap();
        let slow = reference::naive_dft_1d(&x, Direction::Forward);
        assert!(rel_err(&fast, &slow) < 1e-12);
    }

    #[test]
    fn round_trip_1d() {
        let x = random_vec(64, 3);
        let f = fft_1d(&x, &FftPlan::new(64, Direction::Forward).unwrap()).unwrap();
        let b = fft_1d(&f, &FftPlan::new(64, Direction::Inverse).unwrap()).unwrap();
        assert!(rel_err(&b, &x) < 1e-14);
    }

    #[test]
    fn length_mismatch_is_error() {
        let plan = FftPlan::new(8, Direction::Forward).unwrap();
        assert!(matches!(
            fft_1d(&[c(1.0, 0.0); 4], &plan),
            Err(Error::LengthMismatch { expected: 8, actual: 4 })
        ));
        assert!(FftPlan::new(12, Direction::Forward).is_err());
    }

    #[test]
    fn lane_ordered_path_matches_natural() {
        for n in [8usize, 32, 64] {
            let x = random_vec(n, n as u64);
            let plan = FftPlan::new(n, Direction::Forward).unwrap();
            let lane_in = perm::lane_input_order(n, 8).unwrap().apply(&x).unwrap();
            let bitrev_out = plan.process_lane_ordered(&lane_in).unwrap();
            let natural = perm::bit_reversal(n).unwrap().inverse().apply(&bitrev_out).unwrap();
            let direct = fft_1d(&x, &plan).unwrap();
            assert!(rel_err(&natural, &direct) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn impulse_3d() {
        let d = Dims::cube(8).unwrap();
        let mut v = Volume3D::zeros(d);
        v.set(0, 0, 0, c(1.0, 0.0));
        let f = fft_3d(&v, Direction::Forward).unwrap();
        assert!(f.data().iter().all(|&z| z == c(1.0, 0.0)));
    }

    #[test]
    fn anisotropic_3d_matches_naive() {
        let d = Dims::new(8, 16, 8).unwrap();
        let v = Volume3D::from_vec(d, random_vec(d.len(), 11)).unwrap();
        let fast = fft_3d(&v, Direction::Forward).unwrap();
        let slow = reference::naive_dft_3d(&v, Direction::Forward);
        assert!(rel_err(fast.data(), slow.data()) < 1e-10);
    }

    #[test]
    fn wrap_real_has_zero_imag() {
        let d = Dims::cube(8).unwrap();
        let r: Vec<f64> = (0..d.len()).map(|i| i as f64 * 0.5).collect();
        let v = real_to_complex_wrap(d, &r).unwrap();
        assert!(v.data().iter().all(|z| z.im == 0.0));
        let z = real_to_complex_wrap(d, &vec![0.0; d.len()]).unwrap();
        assert!(z.data().iter().all(|z| *z == c(0.0, 0.0)));
    }
}
