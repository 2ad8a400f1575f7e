use rayon::prelude::*;

use super::scores::{disr_term, mibf_decision_quantized, score_mrms_quantized};
use super::{Method, SelectionTrace, SelectorConfig, StepRecord};
use crate::cube::{quantize_estimate, EstimateBand, GroundTruth, HyperCube, LabeledPixels, QuantizedBand};
use crate::error::{Error, Result};
use crate::info::{interaction_info, joint_pair_class_mi, mutual_info, normalized_mi_min};

/// All bands of a cube quantized over the labeled pixels, with the class
/// stream and per-band relevance. Reusable across methods at one level count.
#[derive(Debug, Clone)]
pub struct BandTable {
    labeled: LabeledPixels,
    classes: QuantizedBand,
    bands: Vec<QuantizedBand>,
    relevance: Vec<f64>,
    levels: usize,
}

impl BandTable {
    pub fn new(cube: &HyperCube, gt: &GroundTruth, levels: usize) -> Result<Self> {
        gt.check_matches(cube)?;
        let labeled = gt.labeled();
        if labeled.is_empty() {
            return Err(Error::NoLabeledPixels);
        }
        let n_classes = labeled.classes().len();
        if n_classes < 2 {
            return Err(Error::DegenerateGroundTruth(n_classes));
        }
        let classes = labeled.class_symbols()?;
        let bands = (0..cube.bands())
            .into_par_iter()
            .map(|b| labeled.quantize_band(cube, b, levels))
            .collect::<Result<Vec<_>>>()?;
        let relevance = bands
            .par_iter()
            .map(|b| mutual_info(b, &classes))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labeled,
            classes,
            bands,
            relevance,
            levels,
        })
    }

    pub fn labeled(&self) -> &LabeledPixels {
        &self.labeled
    }

    pub fn classes(&self) -> &QuantizedBand {
        &self.classes
    }

    pub fn band(&self, index: usize) -> &QuantizedBand {
        &self.bands[index]
    }

    pub fn bands(&self) -> usize {
        self.bands.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `MI(B_i, GT)` for every band.
    pub fn relevance(&self) -> &[f64] {
        &self.relevance
    }
}

/// Runs greedy selection from scratch.
pub fn select(cube: &HyperCube, gt: &GroundTruth, config: &SelectorConfig) -> Result<SelectionTrace> {
    config.validate(cube.bands())?;
    let table = BandTable::new(cube, gt, config.levels)?;
    select_prepared(&table, cube, config)
}

/// Per-candidate running sums over the selected set.
struct Accumulators {
    sums: Vec<f64>,
}

impl Accumulators {
    fn observe(&mut self, table: &BandTable, method: Method, chosen: usize, open: &[usize]) -> Result<()> {
        let term: fn(&BandTable, usize, usize) -> Result<f64> = match method {
            Method::Mifs | Method::Mrmr => |t, b, s| mutual_info(t.band(b), t.band(s)),
            Method::Nmifs => |t, b, s| normalized_mi_min(t.band(b), t.band(s)),
            Method::Jmi => |t, b, s| joint_pair_class_mi(t.band(b), t.band(s), t.classes()),
            Method::Disr => |t, b, s| disr_term(t.band(b), t.band(s), t.classes()),
            Method::Mim | Method::Mibf | Method::Mrms => return Ok(()),
        };
        let updates = open
            .par_iter()
            .map(|&b| term(table, b, chosen).map(|v| (b, v)))
            .collect::<Result<Vec<_>>>()?;
        for (b, v) in updates {
            self.sums[b] += v;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Evaluation {
    band: usize,
    score: f64,
    interaction: Option<f64>,
    accepted: bool,
}

/// Lowest-index maximizer of `key` among `evals`.
fn argmax_by(evals: &[Evaluation], key: impl Fn(&Evaluation) -> f64) -> Option<Evaluation> {
    let mut best: Option<Evaluation> = None;
    for e in evals {
        let better = match best {
            None => true,
            Some(b) => key(e) > key(&b) || (key(e) == key(&b) && e.band < b.band),
        };
        if better {
            best = Some(*e);
        }
    }
    best
}

/// Runs greedy selection over a prepared band table.
pub fn select_prepared(table: &BandTable, cube: &HyperCube, config: &SelectorConfig) -> Result<SelectionTrace> {
    config.validate(table.bands())?;
    if config.levels != table.levels() {
        return Err(Error::InvalidParameter(format!(
            "band table was quantized at {} levels, config asks for {}",
            table.levels(),
            config.levels
        )));
    }
    let method = config.method;
    let n = table.bands();

    let first = (0..n)
        .map(|b| Evaluation {
            band: b,
            score: table.relevance[b],
            interaction: None,
            accepted: true,
        })
        .collect::<Vec<_>>();
    let first = argmax_by(&first, |e| e.score).expect("at least one band");

    let mut steps = vec![StepRecord {
        band: first.band,
        score: first.score,
        relevance: first.score,
        interaction: None,
    }];
    let mut open: Vec<usize> = (0..n).filter(|&b| b != first.band).collect();
    let mut acc = Accumulators { sums: vec![0.0; n] };
    acc.observe(table, method, first.band, &open)?;
    let mut estimate = if method.uses_estimate() {
        Some(EstimateBand::init(cube, table.labeled(), first.band)?)
    } else {
        None
    };

    while steps.len() < config.k {
        let est_q = estimate
            .as_ref()
            .map(|e| quantize_estimate(e, config.levels))
            .transpose()?;
        let selected = steps.len() as f64;
        let evals = open
            .par_iter()
            .map(|&b| {
                let relevance = table.relevance[b];
                let eval = |score, interaction, accepted| Evaluation {
                    band: b,
                    score,
                    interaction,
                    accepted,
                };
                Ok(match method {
                    Method::Mim => eval(relevance, None, true),
                    Method::Mifs | Method::Nmifs => eval(relevance - config.beta * acc.sums[b], None, true),
                    Method::Mrmr => eval(relevance - acc.sums[b] / selected, None, true),
                    Method::Jmi | Method::Disr => eval(acc.sums[b], None, true),
                    Method::Mrms => {
                        let est = est_q.as_ref().expect("estimate maintained");
                        let interaction = interaction_info(table.band(b), est, table.classes())?;
                        let score = score_mrms_quantized(table.band(b), table.classes(), est)?;
                        eval(score, Some(interaction), true)
                    }
                    Method::Mibf => {
                        let est = est_q.as_ref().expect("estimate maintained");
                        let d = mibf_decision_quantized(table.band(b), table.classes(), est, config.threshold)?;
                        eval(d.score, Some(d.interaction), d.accepted)
                    }
                })
            })
            .collect::<Result<Vec<Evaluation>>>()?;

        let accepted: Vec<Evaluation> = evals.iter().copied().filter(|e| e.accepted).collect();
        let chosen = match argmax_by(&accepted, |e| e.score) {
            Some(e) => e,
            // Every candidate exceeds the MIBF redundancy tolerance: take the
            // least redundant one so the trace still reaches k bands.
            None => argmax_by(&evals, |e| e.interaction.unwrap_or(f64::NEG_INFINITY)).expect("open bands remain"),
        };

        steps.push(StepRecord {
            band: chosen.band,
            score: chosen.score,
            relevance: table.relevance[chosen.band],
            interaction: chosen.interaction,
        });
        open.retain(|&b| b != chosen.band);
        if steps.len() < config.k {
            acc.observe(table, method, chosen.band, &open)?;
            if let Some(est) = estimate.as_mut() {
                est.update_with_values(chosen.band, &table.labeled().band_values(cube, chosen.band)?)?;
            }
        }
    }

    Ok(SelectionTrace {
        method,
        levels: config.levels,
        steps,
    })
}
