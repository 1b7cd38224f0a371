//! Dense complex 3D volumes and the `PMEV` binary container.
//!
//! Layout is X fastest, then Y, then Z: the sample at `(x, y, z)` lives at
//! flat index `x + nx * (y + ny * z)`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const PMEV_MAGIC: &[u8; 4] = b"PMEV";
pub const PMEV_VERSION: u32 = 1;

/// Sample precision used when serializing a volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F32 = 0,
    F64 = 1,
}

impl Dtype {
    fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(Dtype::F32),
            1 => Ok(Dtype::F64),
            other => Err(Error::Format(format!("unknown PMEV dtype {other}"))),
        }
    }
}

/// Grid extents. Each axis is a power of two of at least 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        for (axis, n) in [("x", nx), ("y", ny), ("z", nz)] {
            if !n.is_power_of_two() || n < 8 {
                return Err(Error::InvalidDims(format!(
                    "{axis} extent {n} must be a power of two >= 8"
                )));
            }
        }
        Ok(Dims { nx, ny, nz })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Dims::new(n, n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// Address bits per axis.
    pub fn bits(&self) -> [u32; 3] {
        [
            self.nx.trailing_zeros(),
            self.ny.trailing_zeros(),
            self.nz.trailing_zeros(),
        ]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let x = idx % self.nx;
        let y = (idx / self.nx) % self.ny;
        let z = idx / (self.nx * self.ny);
        (x, y, z)
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Volume3D {
    dims: Dims,
    data: Vec<Complex64>,
}

impl Volume3D {
    pub fn zeros(dims: Dims) -> Self {
        Volume3D {
            dims,
            data: vec![Complex64::new(0.0, 0.0); dims.len()],
        }
    }

    pub fn from_vec(dims: Dims, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Volume3D { dims, data })
    }

    /// Embeds a real grid as complex samples with zero imaginary parts.
    pub fn from_real(dims: Dims, real: &[f64]) -> Result<Self> {
        if real.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: real.len(),
            });
        }
        Ok(Volume3D {
            dims,
            data: real.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> Complex64 {
        self.data[self.dims.index(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, v: Complex64) {
        let i = self.dims.index(x, y, z);
        self.data[i] = v;
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.re).collect()
    }

    /// Rounds every component through `f32`, mimicking single-precision
    /// hardware storage.
    pub fn to_single_precision(&self) -> Volume3D {
        Volume3D {
            dims: self.dims,
            data: self
                .data
                .iter()
                .map(|c| Complex64::new(c.re as f32 as f64, c.im as f32 as f64))
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Volume3D) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn write_pmev<W: Write>(&self, mut w: W, dtype: Dtype) -> Result<()> {
        w.write_all(PMEV_MAGIC)?;
        for v in [
            PMEV_VERSION,
            self.dims.nx as u32,
            self.dims.ny as u32,
            self.dims.nz as u32,
            dtype as u32,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        match dtype {
            Dtype::F32 => {
                for c in &self.data {
                    w.write_all(&(c.re as f32).to_le_bytes())?;
                    w.write_all(&(c.im as f32).to_le_bytes())?;
                }
            }
            Dtype::F64 => {
                for c in &self.data {
                    w.write_all(&c.re.to_le_bytes())?;
                    w.write_all(&c.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_pmev<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != PMEV_MAGIC {
            return Err(Error::Format("bad PMEV magic".into()));
        }
        let mut header = [0u32; 5];
        for slot in header.iter_mut() {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            *slot = u32::from_le_bytes(b);
        }
        let [version, nx, ny, nz, dtype] = header;
        if version != PMEV_VERSION {
            return Err(Error::Format(format!("unsupported PMEV version {version}")));
        }
        let dims = Dims::new(nx as usize, ny as usize, nz as usize)?;
        let dtype = Dtype::from_code(dtype)?;
        let mut data = Vec::with_capacity(dims.len());
        match dtype {
            Dtype::F32 => {
                let mut b = [0u8; 8];
                for _ in 0..dims.len() {
                    r.read_exact(&mut b)?;
                    let re = f32::from_le_bytes(b[..4].try_into().unwrap());
                    let im = f32::from_le_bytes(b[4..].try_into().unwrap());
                    data.push(Complex64::new(re as f64, im as f64));
                }
            }
            Dtype::F64 => {
                let mut b = [0u8; 16];
                for _ in 0..dims.len() {
                    r.read_exact(&mut b)?;
                    let re = f64::from_le_bytes(b[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(b[8..].try_into().unwrap());
                    data.push(Complex64::new(re, im));
                }
            }
        }
        Ok(Volume3D { dims, data })
    }
}
