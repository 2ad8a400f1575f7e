//! End-to-end runs: select bands, split the labeled pixels, train the SVM on
//! the training side, and score the test side.

use std::time::Instant;

use rayon::prelude::*;

use crate::cube::{stratified_split, GroundTruth, HyperCube, Split};
use crate::error::{Error, Result};
use crate::eval::{render_map, Metrics};
use crate::io::report::{format_fixed6, ReportMetrics, ReportParams, SplitInfo, SvmInfo, Timing};
use crate::io::Report;
use crate::rng::derive_seed;
use crate::select::{select_prepared, BandTable, Method, SelectionTrace, SelectorConfig};
use crate::svm::{default_gamma, grid_search, MinMaxScaler, SvmModel, SvmParams};

pub const GRID_C: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
/// Gamma grid as powers of two around the default width.
pub const GRID_GAMMA_EXPONENTS: [i32; 5] = [-2, -1, 0, 1, 2];
pub const GRID_FOLDS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub fraction: f64,
    pub seed: u64,
    pub levels: usize,
    pub beta: f64,
    pub threshold: f64,
    pub svm: SvmParams,
    pub grid_search: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            fraction: 0.5,
            seed: 0,
            levels: crate::select::DEFAULT_LEVELS,
            beta: crate::select::DEFAULT_BETA,
            threshold: crate::select::DEFAULT_THRESHOLD,
            svm: SvmParams::default(),
            grid_search: false,
        }
    }
}

impl RunSettings {
    pub fn selector(&self, method: Method, k: usize) -> SelectorConfig {
        SelectorConfig::new(method, k)
            .with_beta(self.beta)
            .with_threshold(self.threshold)
            .with_levels(self.levels)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub model: SvmModel,
    /// Predicted class of every labeled pixel as a full raster; 0 elsewhere.
    pub predictions: Vec<u16>,
    pub split: Split,
}

impl RunOutcome {
    /// Classification map as a binary PPM.
    pub fn map(&self, gt: &GroundTruth) -> Result<Vec<u8>> {
        render_map(&self.predictions, gt.labels(), gt.rows(), gt.cols())
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Greedy selection of `k` bands, with its wall time in milliseconds.
pub fn run_selection(
    cube: &HyperCube,
    gt: &GroundTruth,
    method: Method,
    k: usize,
    settings: &RunSettings,
) -> Result<(SelectionTrace, f64)> {
    let start = Instant::now();
    gt.check_matches(cube)?;
    let config = settings.selector(method, k);
    config.validate(cube.bands())?;
    let table = BandTable::new(cube, gt, settings.levels)?;
    let trace = select_prepared(&table, cube, &config)?;
    Ok((trace, elapsed_ms(start)))
}

/// SVM parameters for a run: the configured ones, or the grid-search winner
/// on the training samples.
fn resolve_svm(train_x: &[Vec<f64>], train_y: &[u16], settings: &RunSettings) -> Result<SvmParams> {
    if !settings.grid_search {
        return Ok(settings.svm.clone());
    }
    let scaler = MinMaxScaler::fit(train_x)?;
    let scaled = train_x.iter().map(|s| scaler.transform(s)).collect::<Result<Vec<_>>>()?;
    let base = default_gamma(&scaled);
    let gammas: Vec<f64> = GRID_GAMMA_EXPONENTS.iter().map(|&e| base * 2f64.powi(e)).collect();
    grid_search(
        train_x,
        train_y,
        &GRID_C,
        &gammas,
        GRID_FOLDS,
        &settings.svm,
        derive_seed(settings.seed, "cv-folds"),
    )
}

/// Trains on the training split restricted to `bands` and reports test-set
/// metrics. `method` labels the report (`all` for the full cube).
pub fn classify_bands(
    dataset: &str,
    cube: &HyperCube,
    gt: &GroundTruth,
    method: &str,
    bands: &[usize],
    settings: &RunSettings,
    selection_ms: f64,
) -> Result<RunOutcome> {
    let start = Instant::now();
    gt.check_matches(cube)?;
    if bands.is_empty() {
        return Err(Error::InvalidParameter("no bands to classify with".into()));
    }
    settings.svm.validate()?;
    let labeled = gt.labeled();
    let split = stratified_split(gt, settings.fraction, settings.seed)?;
    let train_x = labeled.features(cube, &split.train, bands)?;
    let train_y: Vec<u16> = split.train.iter().map(|&i| labeled.labels()[i]).collect();

    let params = resolve_svm(&train_x, &train_y, settings)?;
    let model = SvmModel::train(&train_x, &train_y, &params)?;
    let training_ms = elapsed_ms(start);

    let predict_start = Instant::now();
    let all: Vec<usize> = (0..labeled.len()).collect();
    let predicted = model.predict_many(&labeled.features(cube, &all, bands)?)?;
    let prediction_ms = elapsed_ms(predict_start);

    let test_pred: Vec<u16> = split.test.iter().map(|&i| predicted[i]).collect();
    let test_true: Vec<u16> = split.test.iter().map(|&i| labeled.labels()[i]).collect();
    let metrics = Metrics::from_streams(&test_pred, &test_true)?;

    let mut predictions = vec![0u16; gt.labels().len()];
    for (&p, &v) in labeled.pixels().iter().zip(&predicted) {
        predictions[p] = v;
    }

    let report = Report {
        dataset: dataset.to_string(),
        method: method.to_string(),
        k: bands.len(),
        split: SplitInfo {
            fraction: settings.fraction.into(),
            seed: settings.seed,
        },
        params: ReportParams {
            levels: settings.levels,
            beta: settings.beta.into(),
            threshold: settings.threshold.into(),
            band_count: cube.bands(),
            svm: SvmInfo {
                c: model.c.into(),
                gamma: model.gamma.into(),
                grid_search: settings.grid_search,
            },
        },
        selected_bands: bands.to_vec(),
        metrics: ReportMetrics::from(&metrics),
        timing_ms: Timing {
            selection: selection_ms.into(),
            training: training_ms.into(),
            prediction: prediction_ms.into(),
            total: (selection_ms + training_ms + prediction_ms).into(),
        },
    };
    Ok(RunOutcome {
        report,
        model,
        predictions,
        split,
    })
}

/// Selects `k` bands with `method` and classifies with them.
pub fn classify(
    dataset: &str,
    cube: &HyperCube,
    gt: &GroundTruth,
    method: Method,
    k: usize,
    settings: &RunSettings,
) -> Result<(SelectionTrace, RunOutcome)> {
    let (trace, selection_ms) = run_selection(cube, gt, method, k, settings)?;
    let outcome = classify_bands(dataset, cube, gt, method.name(), &trace.bands(), settings, selection_ms)?;
    Ok((trace, outcome))
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub method: Method,
    pub k: usize,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// One trace per method, as long as the largest `k`.
    pub traces: Vec<SelectionTrace>,
    pub cells: Vec<SweepCell>,
}

/// Runs every `(method, k)` cell. Each method is selected once up to the
/// largest `k` and each cell classifies with a prefix of that trace.
pub fn sweep(
    dataset: &str,
    cube: &HyperCube,
    gt: &GroundTruth,
    methods: &[Method],
    k_list: &[usize],
    settings: &RunSettings,
) -> Result<SweepOutcome> {
    gt.check_matches(cube)?;
    let k_max = *k_list.iter().max().ok_or_else(|| Error::InvalidParameter("empty k list".into()))?;
    if methods.is_empty() {
        return Err(Error::InvalidParameter("empty method list".into()));
    }
    for &k in k_list {
        settings.selector(methods[0], k).validate(cube.bands())?;
    }
    let table = BandTable::new(cube, gt, settings.levels)?;
    let traces = methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let trace = select_prepared(&table, cube, &settings.selector(m, k_max))?;
            Ok((trace, elapsed_ms(start)))
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| k_list.iter().map(move |&k| (m, k)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(m, k)| {
            let (trace, ms) = &traces[m];
            let bands = trace.prefix(k).bands();
            classify_bands(dataset, cube, gt, methods[m].name(), &bands, settings, *ms).map(|outcome| SweepCell {
                method: methods[m],
                k,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepOutcome {
        traces: traces.into_iter().map(|(t, _)| t).collect(),
        cells,
    })
}

pub const SWEEP_CSV_HEADER: &str = "method,k,fraction,seed,oa,aa,kappa,specificity";

/// CSV table with the same six-decimal values as the cell reports.
pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for cell in cells {
        let r = &cell.outcome.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            cell.method.name(),
            cell.k,
            format_fixed6(r.split.fraction.0),
            r.split.seed,
            format_fixed6(r.metrics.oa.0),
            format_fixed6(r.metrics.aa.0),
            format_fixed6(r.metrics.kappa.0),
            format_fixed6(r.metrics.specificity.0),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{synth_cube, SynthSpec};

    fn informative() -> (HyperCube, GroundTruth) {
        synth_cube(&SynthSpec::informative(4)).unwrap()
    }

    #[test]
    fn separable_cube_is_classified_perfectly() {
        let (cube, gt) = synth_cube(&SynthSpec::separable(4)).unwrap();
        let all: Vec<usize> = (0..cube.bands()).collect();
        let out = classify_bands("synth", &cube, &gt, "all", &all, &RunSettings::default(), 0.0).unwrap();
        assert_eq!(out.report.metrics.oa.0, 1.0);
        assert_eq!(out.report.k, cube.bands());
        assert_eq!(out.map(&gt).unwrap(), crate::eval::render_labels(gt.labels(), 12, 12).unwrap());
    }

    #[test]
    fn planted_band_alone_suffices() {
        let (cube, gt) = informative();
        let (trace, out) = classify("synth", &cube, &gt, Method::Mim, 1, &RunSettings::default()).unwrap();
        assert_eq!(trace.bands(), vec![2]);
        assert_eq!(out.report.metrics.oa.0, 1.0);
    }

    #[test]
    fn repeated_runs_agree_except_timing() {
        let (cube, gt) = synth_cube(&SynthSpec::redundancy(1)).unwrap();
        let settings = RunSettings {
            fraction: 0.25,
            seed: 9,
            ..RunSettings::default()
        };
        let run = || {
            let (_, mut out) = classify("synth", &cube, &gt, Method::Mrms, 3, &settings).unwrap();
            out.report.timing_ms = Timing::default();
            out.report.to_json().unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn sweep_cells_match_individual_runs() {
        let (cube, gt) = synth_cube(&SynthSpec::redundancy(2)).unwrap();
        let settings = RunSettings::default();
        let out = sweep("synth", &cube, &gt, &[Method::Mim, Method::Mrmr], &[1, 3], &settings).unwrap();
        assert_eq!(out.cells.len(), 4);
        assert_eq!(out.traces[0].len(), 3);
        for cell in &out.cells {
            let (_, single) = classify("synth", &cube, &gt, cell.method, cell.k, &settings).unwrap();
            assert_eq!(single.report.selected_bands, cell.outcome.report.selected_bands);
            assert_eq!(single.report.metrics, cell.outcome.report.metrics);
        }
        let csv = sweep_csv(&out.cells);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with(SWEEP_CSV_HEADER));
    }

    #[test]
    fn grid_search_runs_on_training_side() {
        let (cube, gt) = informative();
        let settings = RunSettings {
            grid_search: true,
            ..RunSettings::default()
        };
        let out = classify_bands("synth", &cube, &gt, "all", &[2], &settings, 0.0).unwrap();
        assert!(out.report.params.svm.grid_search);
        assert!(GRID_C.contains(&out.model.c));
        assert_eq!(out.report.metrics.oa.0, 1.0);
    }

    #[test]
    fn mismatched_inputs_fail() {
        let (cube, _) = informative();
        let gt = GroundTruth::new(2, 2, vec![1, 2, 1, 2]).unwrap();
        assert!(classify("x", &cube, &gt, Method::Mim, 1, &RunSettings::default()).is_err());
        let (cube, gt) = informative();
        assert!(sweep("x", &cube, &gt, &[Method::Mim], &[], &RunSettings::default()).is_err());
        assert!(sweep("x", &cube, &gt, &[Method::Mim], &[99], &RunSettings::default()).is_err());
    }
}
