use serde::{Deserialize, Serialize};

use super::pairing::{from_end, local_spacing};
use super::ParitySpectrum;
use crate::error::{Error, Result};
use crate::models::ordered_side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    DoubletSplitting,
    DensityPeak,
    MinGap,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::DoubletSplitting => "doublet_splitting",
            Detector::DensityPeak => "density_peak",
            Detector::MinGap => "min_gap",
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doublet_splitting" => Ok(Detector::DoubletSplitting),
            "density_peak" => Ok(Detector::DensityPeak),
            "min_gap" => Ok(Detector::MinGap),
            other => Err(Error::Config(format!("unknown detector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorParams {
    /// Splitting threshold in units of the local mean spacing.
    pub threshold_fraction: f64,
    /// Levels of one parity averaged for the local spacing.
    pub window: usize,
    /// Kernel bandwidth in global mean spacings.
    pub bandwidth_spacings: f64,
    /// Grid points per kernel bandwidth.
    pub grid_per_bandwidth: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            threshold_fraction: 0.5,
            window: 11,
            bandwidth_spacings: 5.0,
            grid_per_bandwidth: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecursorDetail {
    DoubletSplitting {
        threshold_fraction: f64,
        window: usize,
        doublet: usize,
        ratio: f64,
    },
    DensityPeak {
        bandwidth: f64,
        mean_spacing: f64,
        peak_density: f64,
        /// Peak height over the mean of the smoothed density.
        contrast: f64,
    },
    MinGap {
        gap: f64,
        index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecursorEstimate {
    /// `E_c^(N)` as an excitation energy above the ground state.
    pub energy: f64,
    pub detector: Detector,
    pub detail: PrecursorDetail,
}

pub fn detect_precursor(spectrum: &ParitySpectrum, detector: Detector, params: &DetectorParams) -> Result<PrecursorEstimate> {
    let (energy, detail) = match detector {
        Detector::DoubletSplitting => doublet_splitting(spectrum, params)?,
        Detector::DensityPeak => density_peak(spectrum, params)?,
        Detector::MinGap => min_gap(spectrum)?,
    };
    Ok(PrecursorEstimate {
        energy: energy - spectrum.ground_energy,
        detector,
        detail,
    })
}

fn doublet_splitting(s: &ParitySpectrum, p: &DetectorParams) -> Result<(f64, PrecursorDetail)> {
    let side = ordered_side(&s.spec).ok_or_else(|| {
        Error::Detector(format!("{} at λ = {} has no degenerate doublets", s.spec.model, s.spec.lambda))
    })?;
    let (plus, minus) = (&s.plus.values, &s.minus.values);
    let count = plus.len().min(minus.len());
    for k in 0..count {
        let ip = from_end(plus.len(), k, side);
        let im = from_end(minus.len(), k, side);
        let splitting = (plus[ip] - minus[im]).abs();
        let spacing = local_spacing(plus, k, p.window, side);
        let ratio = splitting / spacing;
        if ratio > p.threshold_fraction {
            if k == 0 {
                return Err(Error::Detector(format!(
                    "outermost doublet already split ({ratio:.3} spacings); no degenerate region"
                )));
            }
            return Ok((
                0.5 * (plus[ip] + minus[im]),
                PrecursorDetail::DoubletSplitting {
                    threshold_fraction: p.threshold_fraction,
                    window: p.window,
                    doublet: k,
                    ratio,
                },
            ));
        }
    }
    Err(Error::Detector("no doublet splitting crosses the threshold".into()))
}

fn density_peak(s: &ParitySpectrum, p: &DetectorParams) -> Result<(f64, PrecursorDetail)> {
    let levels: Vec<f64> = s.levels().iter().map(|l| l.energy).collect();
    let n = levels.len();
    if n < 3 {
        return Err(Error::Detector("too few levels for a density estimate".into()));
    }
    let (lo, hi) = (levels[0], levels[n - 1]);
    let mean_spacing = (hi - lo) / (n - 1) as f64;
    let h = p.bandwidth_spacings * mean_spacing;
    let (start, stop) = (lo + 3.0 * h, hi - 3.0 * h);
    if !(h > 0.0) || stop <= start {
        return Err(Error::Detector("spectrum too narrow for the kernel bandwidth".into()));
    }
    let step = h / p.grid_per_bandwidth.max(1) as f64;
    let points = ((stop - start) / step).floor() as usize + 1;
    let density = |x: f64| -> f64 {
        let a = levels.partition_point(|&e| e < x - 8.0 * h);
        let b = levels.partition_point(|&e| e <= x + 8.0 * h);
        levels[a..b]
            .iter()
            .map(|e| {
                let u = (x - e) / h;
                (-0.5 * u * u).exp()
            })
            .sum()
    };
    let values: Vec<f64> = (0..points).map(|i| density(start + i as f64 * step)).collect();
    let (best, peak) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if best == 0 || best + 1 == points {
        return Err(Error::Detector("smoothed level density is maximal at the edge of the spectrum".into()));
    }
    let (l, c, r) = (values[best - 1], values[best], values[best + 1]);
    let curvature = l - 2.0 * c + r;
    let shift = if curvature < 0.0 { 0.5 * (l - r) / curvature } else { 0.0 };
    let x = start + (best as f64 + shift) * step;
    let mean = values.iter().sum::<f64>() / points as f64;
    Ok((
        x,
        PrecursorDetail::DensityPeak {
            bandwidth: h,
            mean_spacing,
            peak_density: peak,
            contrast: peak / mean,
        },
    ))
}

fn min_gap(s: &ParitySpectrum) -> Result<(f64, PrecursorDetail)> {
    let v = &s.plus.values;
    if v.len() < 2 {
        return Err(Error::Detector("need two levels for a gap".into()));
    }
    let (index, gap) = v
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i, w[1] - w[0]))
        .fold((0, f64::INFINITY), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });
    Ok((0.5 * (v[index] + v[index + 1]), PrecursorDetail::MinGap { gap, index }))
}
