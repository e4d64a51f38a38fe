use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, ratio_with_error, PowerLawFit};
use super::target::{adaptive_n_max, initial_coupling_range, target_energy, Targeted, TruncationChoice};
use crate::error::{Error, Result};
use crate::models::{critical_energy_candidates, ordered_side, ModelKind, ModelSpec};
use crate::quench::{QuenchContext, QuenchResult};
use crate::spectral::{
    detect_precursor, pair_by_splitting, spectrum_for, with_semiclassical_pairing, Detector, DetectorParams,
    ParitySpectrum, PrecursorEstimate, SpectrumCache,
};

/// Which doublets keep their coherences in the long-time ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PairingPolicy {
    /// Every doublet on the ordered side of the semiclassical critical energy.
    #[default]
    Semiclassical,
    Splitting {
        max_splitting: f64,
    },
    /// Pure diagonal ensemble.
    None,
}

impl PairingPolicy {
    pub fn apply(self, spectrum: ParitySpectrum) -> ParitySpectrum {
        match self {
            PairingPolicy::Semiclassical => with_semiclassical_pairing(spectrum),
            PairingPolicy::Splitting { max_splitting } => match ordered_side(&spectrum.spec) {
                Some(side) => pair_by_splitting(spectrum, max_splitting, side),
                None => spectrum,
            },
            PairingPolicy::None => spectrum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum SweepGrid {
    LambdaI(Vec<f64>),
    /// Reduced energies `e`; each is reached by tuning `λ_i`.
    TargetE(Vec<f64>),
}

impl SweepGrid {
    pub fn values(&self) -> &[f64] {
        match self {
            SweepGrid::LambdaI(v) | SweepGrid::TargetE(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Model and couplings; `n` and `lambda` are replaced per run.
    pub template: ModelSpec,
    pub sizes: Vec<usize>,
    pub lambda_f: f64,
    pub grid: SweepGrid,
    pub epsilon_scale: f64,
    pub detector: Detector,
    pub detector_params: DetectorParams,
    pub branch: i8,
    pub pairing: PairingPolicy,
    /// Overrides the default scan interval of initial couplings.
    pub lambda_i_range: Option<(f64, f64)>,
}

impl SweepSpec {
    pub fn new(template: ModelSpec, sizes: Vec<usize>, grid: SweepGrid) -> Self {
        Self {
            lambda_f: template.lambda,
            template,
            sizes,
            grid,
            epsilon_scale: 1.0,
            detector: Detector::DoubletSplitting,
            detector_params: DetectorParams::default(),
            branch: 1,
            pairing: PairingPolicy::Semiclassical,
            lambda_i_range: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("size list is empty".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("sizes must be strictly increasing: {:?}", self.sizes)));
        }
        if self.branch != 1 && self.branch != -1 {
            return Err(Error::Config(format!("branch must be +1 or -1, got {}", self.branch)));
        }
        if let Some((lo, hi)) = self.lambda_i_range {
            if !(lo < hi) {
                return Err(Error::Config(format!("lambda_i_range [{lo}, {hi}] is empty")));
            }
        }
        for &n in &self.sizes {
            self.spec_for(n).with_n_max(self.template.n_max.unwrap_or(1)).validate_for(self.template.model)?;
        }
        Ok(())
    }

    /// Post-quench spec at size `n`, photon cutoff as in the template.
    pub fn spec_for(&self, n: usize) -> ModelSpec {
        ModelSpec {
            n,
            lambda: self.lambda_f,
            ..self.template
        }
    }

    pub fn range_for(&self, spec: &ModelSpec) -> (f64, f64) {
        let (lo, hi) = self.lambda_i_range.unwrap_or_else(|| initial_coupling_range(spec));
        match &self.grid {
            SweepGrid::LambdaI(v) => v.iter().fold((lo, hi), |(a, b), &x| (a.min(x), b.max(x))),
            SweepGrid::TargetE(_) => (lo, hi),
        }
    }
}

trait ValidateFor {
    fn validate_for(&self, model: ModelKind) -> Result<()>;
}

impl ValidateFor for ModelSpec {
    fn validate_for(&self, model: ModelKind) -> Result<()> {
        match model {
            ModelKind::Dicke => self.validate(),
            _ => ModelSpec { n_max: None, ..*self }.validate(),
        }
    }
}

/// Post-quench data shared by every quench at one size.
#[derive(Debug, Clone)]
pub struct PreparedSize {
    pub context: QuenchContext,
    pub truncation: Option<TruncationChoice>,
    pub range: (f64, f64),
}

pub fn prepare_size(sw: &SweepSpec, n: usize, cache: Option<&SpectrumCache>) -> Result<PreparedSize> {
    let mut spec = sw.spec_for(n);
    let range = sw.range_for(&spec);
    let truncation = match (spec.model, spec.n_max) {
        (ModelKind::Dicke, None) => {
            let t = adaptive_n_max(&spec, range.1, sw.branch)?;
            spec = spec.with_n_max(t.n_max);
            Some(t)
        }
        _ => None,
    };
    let spectrum = sw.pairing.apply(spectrum_for(&spec, cache)?);
    Ok(PreparedSize {
        context: QuenchContext::new(spectrum, sw.epsilon_scale)?,
        truncation,
        range,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Grid value: `λ_i` or a reduced energy.
    pub input: f64,
    pub result: Option<QuenchResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSweep {
    pub n: usize,
    pub n_max: Option<usize>,
    pub points: Vec<SweepPoint>,
    pub error: Option<String>,
}

fn sweep_size(sw: &SweepSpec, n: usize, cache: Option<&SpectrumCache>) -> SizeSweep {
    let prepared = match prepare_size(sw, n, cache) {
        Ok(p) => p,
        Err(e) => {
            return SizeSweep {
                n,
                n_max: sw.template.n_max,
                points: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let ctx = &prepared.context;
    let points = sw
        .grid
        .values()
        .par_iter()
        .map(|&input| {
            let outcome = match &sw.grid {
                SweepGrid::LambdaI(_) => ctx.quench(input, sw.branch),
                SweepGrid::TargetE(_) => {
                    let target = ctx.critical_excitation() * (1.0 + input / sw.epsilon_scale);
                    target_energy(ctx, target, sw.branch, prepared.range).map(|t| t.result)
                }
            };
            match outcome {
                Ok(r) => SweepPoint {
                    input,
                    result: Some(r),
                    error: None,
                },
                Err(e) => SweepPoint {
                    input,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SizeSweep {
        n,
        n_max: ctx.spec().n_max,
        points,
        error: None,
    }
}

/// Quench curves for every size in `sw`. Point failures are recorded and
/// the sweep continues; output order follows the inputs.
pub fn sweep_order_parameter(sw: &SweepSpec, cache: Option<&SpectrumCache>) -> Result<Vec<SizeSweep>> {
    sw.validate()?;
    Ok(sw.sizes.par_iter().map(|&n| sweep_size(sw, n, cache)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeExponent {
    pub n: usize,
    pub n_max: Option<usize>,
    pub ground_energy: f64,
    pub precursor: PrecursorEstimate,
    /// Semiclassical critical energy as an excitation energy, in the
    /// convention of the report.
    pub e_c: f64,
    /// `|E_c^(N) - E_c| / N`.
    pub delta_per_particle: f64,
    pub targeted: Targeted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub model: ModelKind,
    pub lambda_f: f64,
    pub detector: Detector,
    pub detector_params: DetectorParams,
    pub pairing: PairingPolicy,
    pub branch: i8,
    pub sizes: Vec<usize>,
    pub per_size: Vec<SizeExponent>,
    pub failures: Vec<(usize, String)>,
    /// Label of the critical-energy convention nearest the precursor.
    pub convention: String,
    pub zeta: PowerLawFit,
    pub zeta_extensive: PowerLawFit,
    pub nu: PowerLawFit,
    pub beta: ValueWithError,
    /// Literature value of ν used when the self-fit is unreliable.
    pub cited_nu: Option<ValueWithError>,
    pub beta_cited: Option<ValueWithError>,
    /// `|βν - ζ|`.
    pub identity_residual: f64,
    pub order_monotone: bool,
    pub delta_monotone: bool,
    pub quality: String,
    /// ζ fitted on the smallest k sizes, `k = 3..`, keyed by the largest size.
    pub running_zeta: Vec<(usize, f64, f64)>,
}

pub const CLEAN_R_SQUARED: f64 = 0.98;

fn cited_nu(model: ModelKind) -> Option<ValueWithError> {
    match model {
        ModelKind::Dicke => Some(ValueWithError { value: 1.30, error: 0.02 }),
        _ => None,
    }
}

fn measure_size(sw: &SweepSpec, n: usize, cache: Option<&SpectrumCache>) -> Result<(SizeExponent, Vec<(&'static str, f64)>)> {
    let prepared = prepare_size(sw, n, cache)?;
    let ctx = &prepared.context;
    let spectrum = ctx.spectrum();
    let precursor = detect_precursor(spectrum, sw.detector, &sw.detector_params)?;
    let targeted = target_energy(ctx, precursor.energy, sw.branch, prepared.range)?;
    let candidates = critical_energy_candidates(ctx.spec())
        .into_iter()
        .map(|(label, e)| (label, e - spectrum.ground_energy))
        .collect();
    Ok((
        SizeExponent {
            n,
            n_max: ctx.spec().n_max,
            ground_energy: spectrum.ground_energy,
            precursor,
            e_c: ctx.critical_excitation(),
            delta_per_particle: 0.0,
            targeted,
        },
        candidates,
    ))
}

fn decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// ζ from the order parameter at `E_c^(N)`, ν from the drift of
/// `E_c^(N)`, and `β = ζ/ν`.
pub fn extract_exponents(sw: &SweepSpec, cache: Option<&SpectrumCache>) -> Result<ExponentReport> {
    sw.validate()?;
    let outcomes: Vec<Result<(SizeExponent, Vec<(&'static str, f64)>)>> =
        sw.sizes.par_iter().map(|&n| measure_size(sw, n, cache)).collect();
    let mut per_size = Vec::new();
    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for (&n, outcome) in sw.sizes.iter().zip(outcomes) {
        match outcome {
            Ok((s, c)) => {
                per_size.push(s);
                candidates.push(c);
            }
            Err(e) => failures.push((n, e.to_string())),
        }
    }
    if per_size.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} sizes survived (need 3); failures: {failures:?}",
            per_size.len()
        )));
    }
    let last = per_size.len() - 1;
    let reference = per_size[last].precursor.energy;
    let (choice, _) = candidates[last]
        .iter()
        .enumerate()
        .map(|(k, &(_, e))| (k, (e - reference).abs()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let convention = candidates[last][choice].0.to_string();
    for (s, c) in per_size.iter_mut().zip(&candidates) {
        s.e_c = c[choice].1;
        s.delta_per_particle = (s.precursor.energy - s.e_c).abs() / s.n as f64;
    }
    let series = |f: &dyn Fn(&SizeExponent) -> f64| -> Vec<(f64, f64)> { per_size.iter().map(|s| (s.n as f64, f(s))).collect() };
    let order = series(&|s| s.targeted.result.order_parameter);
    let zeta = fit_power_law(&order)?;
    let zeta_extensive = fit_power_law(&series(&|s| s.targeted.result.order_parameter_extensive))?;
    let delta = series(&|s| s.delta_per_particle);
    let nu = fit_power_law(&delta)?;
    let (b, be) = ratio_with_error(zeta.exponent, zeta.stderr_exponent, nu.exponent, nu.stderr_exponent);
    let cited = cited_nu(sw.template.model);
    let beta_cited = cited.as_ref().map(|c| {
        let (value, error) = ratio_with_error(zeta.exponent, zeta.stderr_exponent, c.value, c.error);
        ValueWithError { value, error }
    });
    let running_zeta = (3..=order.len())
        .filter_map(|k| {
            fit_power_law(&order[..k])
                .ok()
                .map(|f| (order[k - 1].0 as usize, f.exponent, f.stderr_exponent))
        })
        .collect();
    let clean = zeta.r_squared > CLEAN_R_SQUARED && nu.r_squared > CLEAN_R_SQUARED;
    Ok(ExponentReport {
        model: sw.template.model,
        lambda_f: sw.lambda_f,
        detector: sw.detector,
        detector_params: sw.detector_params,
        pairing: sw.pairing,
        branch: sw.branch,
        sizes: per_size.iter().map(|s| s.n).collect(),
        order_monotone: decreasing(&order.iter().map(|p| p.1).collect::<Vec<_>>()),
        delta_monotone: decreasing(&delta.iter().map(|p| p.1).collect::<Vec<_>>()),
        identity_residual: (b * nu.exponent - zeta.exponent).abs(),
        per_size,
        failures,
        convention,
        zeta,
        zeta_extensive,
        nu,
        beta: ValueWithError { value: b, error: be },
        cited_nu: cited,
        beta_cited,
        quality: if clean { "clean" } else { "noisy" }.into(),
        running_zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_keeps_input_order_and_records_failures() {
        let sw = SweepSpec::new(ModelSpec::lmg(1, 0.7), vec![40, 60], SweepGrid::LambdaI(vec![0.4, 0.95, -3.0]));
        let out = sweep_order_parameter(&sw, None).unwrap();
        assert_eq!(out.iter().map(|s| s.n).collect::<Vec<_>>(), vec![40, 60]);
        for s in &out {
            assert_eq!(s.points.iter().map(|p| p.input).collect::<Vec<_>>(), vec![0.4, 0.95, -3.0]);
            assert!(s.points[0].result.is_some());
            assert!(s.points[1].error.is_some());
        }
    }

    #[test]
    fn rejects_unsorted_sizes() {
        let sw = SweepSpec::new(ModelSpec::lmg(1, 0.7), vec![60, 40], SweepGrid::TargetE(vec![0.0]));
        assert!(sweep_order_parameter(&sw, None).is_err());
    }

    #[test]
    fn target_grid_lands_on_reduced_energy() {
        let sw = SweepSpec::new(ModelSpec::lmg(1, 0.7), vec![100], SweepGrid::TargetE(vec![-0.5]));
        let out = sweep_order_parameter(&sw, None).unwrap();
        let r = out[0].points[0].result.unwrap();
        assert!((r.reduced_e + 0.5).abs() < 1e-4);
    }

    #[test]
    fn small_lmg_exponents() {
        let mut sw = SweepSpec::new(ModelSpec::lmg(1, 0.7), vec![400, 800, 1600], SweepGrid::TargetE(vec![]));
        sw.detector = Detector::DensityPeak;
        let r = extract_exponents(&sw, None).unwrap();
        assert_eq!(r.sizes, vec![400, 800, 1600]);
        assert_eq!(r.convention, "total");
        assert!(r.zeta.exponent > 0.0 && r.nu.exponent > 0.0);
        assert!(r.identity_residual < 1e-12);
        assert_eq!(r.running_zeta.len(), 1);
    }
}
