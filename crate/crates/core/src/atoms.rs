//! Atom sets in fractional box coordinates and their text format.
//!
//! One atom per line: `x y z q`, with `x y z` fractional coordinates.
//! `#` starts a comment; blank lines are skipped.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSet {
    positions: Vec<[f64; 3]>,
    charges: Vec<f64>,
}

/// Wraps a fractional coordinate into `[0, 1)`.
pub fn wrap_unit(s: f64) -> f64 {
    let w = s - s.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

impl AtomSet {
    /// Builds a set, wrapping every position into the unit cell.
    pub fn new(positions: Vec<[f64; 3]>, charges: Vec<f64>) -> Result<Self> {
        if positions.len() != charges.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                actual: charges.len(),
            });
        }
        if positions.is_empty() {
            return Err(Error::NoAtoms);
        }
        if positions.iter().flatten().chain(&charges).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite atom data".into()));
        }
        let positions = positions
            .into_iter()
            .map(|p| p.map(wrap_unit))
            .collect();
        Ok(AtomSet { positions, charges })
    }

    /// `count` atoms with uniform positions and charges in `[-1, 1]`,
    /// shifted so the total charge is zero.
    pub fn random_neutral(count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions: Vec<[f64; 3]> = (0..count)
            .map(|_| [rng.gen(), rng.gen(), rng.gen()])
            .collect();
        let mut charges: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if count > 1 {
            let mean = charges.iter().sum::<f64>() / count as f64;
            charges.iter_mut().for_each(|q| *q -= mean);
        }
        AtomSet::new(positions, charges)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn total_charge(&self) -> f64 {
        self.charges.iter().sum()
    }

    /// Copy with every position shifted by `delta` (fractional units) and
    /// rewrapped.
    pub fn translated(&self, delta: [f64; 3]) -> AtomSet {
        AtomSet {
            positions: self
                .positions
                .iter()
                .map(|p| [0, 1, 2].map(|a| wrap_unit(p[a] + delta[a])))
                .collect(),
            charges: self.charges.clone(),
        }
    }

    /// Copy with one coordinate of one atom displaced (not rewrapped, so
    /// finite-difference steps stay continuous).
    pub fn displaced(&self, atom: usize, axis: usize, delta: f64) -> AtomSet {
        let mut out = self.clone();
        out.positions[atom][axis] = wrap_unit(out.positions[atom][axis] + delta);
        out
    }

    /// Atoms listed in `order`.
    pub fn reordered(&self, order: &[usize]) -> AtomSet {
        AtomSet {
            positions: order.iter().map(|&i| self.positions[i]).collect(),
            charges: order.iter().map(|&i| self.charges[i]).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        let mut charges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::AtomParse {
                    line: i + 1,
                    message: format!("expected 4 fields 'x y z q', found {}", fields.len()),
                });
            }
            let mut vals = [0.0; 4];
            for (slot, f) in vals.iter_mut().zip(&fields) {
                *slot = f.parse::<f64>().map_err(|_| Error::AtomParse {
                    line: i + 1,
                    message: format!("cannot parse '{f}' as a number"),
                })?;
                if !slot.is_finite() {
                    return Err(Error::AtomParse {
                        line: i + 1,
                        message: format!("non-finite value '{f}'"),
                    });
                }
            }
            positions.push([vals[0], vals[1], vals[2]]);
            charges.push(vals[3]);
        }
        AtomSet::new(positions, charges)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# x y z q (fractional coordinates)\n");
        for (p, q) in self.positions.iter().zip(&self.charges) {
            writeln!(s, "{:.17e} {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2], q).unwrap();
        }
        s
    }
}
