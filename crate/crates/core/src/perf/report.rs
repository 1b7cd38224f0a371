//! Table reproductions as CSV rows.

use std::io::Write;

use serde::Serialize;

use super::tables::{
    BALANCE_MARKERS, BRAM_TABLE, FFT_TABLE_US, NETWORK_TABLE, TABLE_SIZES, TABLE_UNITS,
};
use super::*;
use crate::error::{Error, Result};

/// Model and printed values in microseconds. `delta_us` compares the model
/// rounded to the printed precision (0.1 μs) against the printed value.
fn rounded_delta(model_us: f64, printed_us: f64) -> f64 {
    ((model_us * 10.0).round() - printed_us * 10.0).round() / 10.0 + 0.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FftRow {
    pub size: String,
    pub units: usize,
    pub cycles: f64,
    pub model_us: f64,
    pub printed_us: f64,
    pub delta_us: f64,
}

pub fn fft_rows(fmax_hz: f64) -> Vec<FftRow> {
    let mut rows = Vec::new();
    for (s, size) in TABLE_SIZES.iter().enumerate() {
        for (u, &units) in TABLE_UNITS.iter().enumerate() {
            let model_us = fft_pass_time(*size, units, fmax_hz) * 1e6;
            let printed_us = FFT_TABLE_US[s][u];
            rows.push(FftRow {
                size: size.to_string(),
                units,
                cycles: fft_pass_cycles(*size, units),
                model_us,
                printed_us,
                delta_us: rounded_delta(model_us, printed_us),
            });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A2aRow {
    pub nodes: usize,
    pub topology: String,
    /// As printed: `1`, `1.25`, `2.5`.
    pub hopcount: String,
    pub links: usize,
    pub size: String,
    /// Formula value with the row's listed links.
    pub formula_us: f64,
    /// Formula value with any cell override applied.
    pub model_us: f64,
    pub printed_us: f64,
    pub delta_us: f64,
    pub flag: String,
}

pub fn a2a_rows(bandwidth_bps: f64) -> Result<Vec<A2aRow>> {
    let mut rows = Vec::new();
    for r in &NETWORK_TABLE {
        let topo = Topology::new(r.kind, r.nodes, r.links, r.hopcount)?;
        for (s, size) in TABLE_SIZES.iter().enumerate() {
            let formula_us = a2a_time(data_volume_bits(*size), &topo, bandwidth_bps) * 1e6;
            let (t, over) = table_a2a_time(r.kind, r.nodes, *size, bandwidth_bps)?;
            let model_us = t * 1e6;
            let printed_us = r.printed_us[s];
            rows.push(A2aRow {
                nodes: r.nodes,
                topology: r.kind.table_name().to_string(),
                hopcount: r.hopcount.to_string(),
                links: r.links,
                size: size.to_string(),
                formula_us,
                model_us,
                printed_us,
                delta_us: rounded_delta(model_us, printed_us),
                flag: over
                    .map(|o| format!("override L={}: {}", o.effective_links, o.note))
                    .unwrap_or_default(),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceRow {
    pub size: String,
    pub units: usize,
    pub nodes: usize,
    pub topology: String,
    pub fft_us: f64,
    pub a2a_us: f64,
    pub mismatch: f64,
    /// Marker number of a reference pairing, or empty.
    pub marker: String,
}

pub fn marker_of(units: usize, nodes: usize, kind: TopologyKind) -> Option<u8> {
    BALANCE_MARKERS
        .iter()
        .find(|(_, u, nets)| *u == units && nets.contains(&(nodes, kind)))
        .map(|(m, _, _)| *m)
}

/// Balanced points at 128³ over all tabulated networks.
pub fn balance_rows(fmax_hz: f64, bandwidth_bps: f64, threshold: f64) -> Result<Vec<BalanceRow>> {
    let pts = balance_search(
        &[GridSize::cube(128)],
        &TABLE_UNITS,
        &table_networks(),
        fmax_hz,
        bandwidth_bps,
        threshold,
    )?;
    Ok(pts
        .into_iter()
        .map(|p| BalanceRow {
            marker: marker_of(p.units, p.nodes, p.topology)
                .map(|m| format!("({m})"))
                .unwrap_or_default(),
            size: p.size,
            units: p.units,
            nodes: p.nodes,
            topology: p.topology.table_name().to_string(),
            fft_us: p.fft_us,
            a2a_us: p.a2a_us,
            mismatch: p.mismatch,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GflopsRow {
    pub size: String,
    pub pipes: usize,
    pub fmax_mhz: f64,
    pub measured_us: f64,
    pub model_gflops: f64,
    pub printed_gflops: f64,
    pub rel_delta: f64,
    pub ideal_us: f64,
    pub printed_ideal_us: f64,
    pub flag: String,
}

/// GFlops from measured times, plus the three-pass ideal time at the build's
/// clock. Ideal times that differ from the printed value by more than the
/// printed rounding are flagged.
pub fn gflops_rows() -> Vec<GflopsRow> {
    BRAM_TABLE
        .iter()
        .filter_map(|r| {
            let printed = r.gflops?;
            let model = gflops(r.size.nx, r.measured_us * 1e-6);
            let ideal_us = pipeline_ideal_time(r.size, r.pipes, r.fmax_hz, 3, None) * 1e6;
            let flag = if (ideal_us - r.ideal_us).abs() > 0.05 {
                format!("ideal differs from printed by {:.2} us", ideal_us - r.ideal_us)
            } else {
                String::new()
            };
            Some(GflopsRow {
                size: r.size.to_string(),
                pipes: r.pipes,
                fmax_mhz: r.fmax_hz / 1e6,
                measured_us: r.measured_us,
                model_gflops: model,
                printed_gflops: printed,
                rel_delta: (model - printed) / printed,
                ideal_us,
                printed_ideal_us: r.ideal_us,
                flag,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub config: String,
    pub atoms: usize,
    pub timestep_us: f64,
}

/// Modelled long-range timestep against atom count for the measured board
/// configurations (boards_pipes), on a 64³ grid.
pub fn scaling_rows(bandwidth_bps: f64) -> Result<Vec<ScalingRow>> {
    let size = GridSize::cube(64);
    let configs: [(usize, usize, f64); 4] =
        [(1, 1, 300e6), (2, 1, 300e6), (4, 1, 300e6), (4, 2, 273e6)];
    let mut rows = Vec::new();
    for (nodes, pipes, fmax) in configs {
        let topo = Topology::from_table(TopologyKind::Ptop, nodes.max(2))?;
        let topo = Topology { nodes, ..topo };
        for atoms in (0..=8).map(|k| k * 8192) {
            rows.push(ScalingRow {
                config: format!("{nodes}_{pipes}"),
                atoms,
                timestep_us: lr_timestep(atoms, size, nodes, pipes, fmax, &topo, bandwidth_bps) * 1e6,
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}
