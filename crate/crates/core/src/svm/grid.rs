use rayon::prelude::*;

use super::{SvmModel, SvmParams};
use crate::error::{Error, Result};
use crate::rng::ShiftRng;

/// Assigns each sample a fold in `0..folds`. Each class is shuffled and dealt
/// round-robin, continuing where the previous class stopped, so a class with
/// fewer samples than folds ends up with one sample per fold it touches.
pub fn stratified_folds(labels: &[u16], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {folds}")));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut rng = ShiftRng::new(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut members);
        for i in members {
            assignment[i] = next;
            next = (next + 1) % folds;
        }
    }
    Ok(assignment)
}

/// Mean overall accuracy over the non-empty folds.
fn cross_validate(
    samples: &[Vec<f64>],
    labels: &[u16],
    assignment: &[usize],
    folds: usize,
    params: &SvmParams,
) -> Result<f64> {
    let mut total = 0.0;
    let mut used = 0;
    for fold in 0..folds {
        let (mut tx, mut ty, mut vx, mut vy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for ((s, &l), &a) in samples.iter().zip(labels).zip(assignment) {
            if a == fold {
                vx.push(s.clone());
                vy.push(l);
            } else {
                tx.push(s.clone());
                ty.push(l);
            }
        }
        if vx.is_empty() {
            continue;
        }
        let model = SvmModel::train(&tx, &ty, params)?;
        let predicted = model.predict_many(&vx)?;
        let correct = predicted.iter().zip(&vy).filter(|(p, t)| p == t).count();
        total += correct as f64 / vx.len() as f64;
        used += 1;
    }
    Ok(total / used as f64)
}

/// Picks the `(C, gamma)` cell with the best mean cross-validated overall
/// accuracy on the given training samples. Ties go to the smaller C, then the
/// smaller gamma. Other fields of `base` are kept.
pub fn grid_search(
    samples: &[Vec<f64>],
    labels: &[u16],
    c_grid: &[f64],
    gamma_grid: &[f64],
    folds: usize,
    base: &SvmParams,
    seed: u64,
) -> Result<SvmParams> {
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::InvalidParameter("empty hyperparameter grid".into()));
    }
    if samples.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: samples.len(),
            right: labels.len(),
        });
    }
    let assignment = stratified_folds(labels, folds, seed)?;
    let mut cs = c_grid.to_vec();
    let mut gammas = gamma_grid.to_vec();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    let cells: Vec<SvmParams> = cs
        .iter()
        .flat_map(|&c| gammas.iter().map(move |&g| base.clone().with_c(c).with_gamma(g)))
        .collect();
    for cell in &cells {
        cell.validate()?;
    }
    if cells.len() == 1 {
        return Ok(cells[0].clone());
    }
    let scores = cells
        .par_iter()
        .map(|p| cross_validate(samples, labels, &assignment, folds, p))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        log::debug!("grid C={} gamma={} cv-oa={s:.6}", cells[i].c, cells[i].gamma.unwrap_or(f64::NAN));
        if s > scores[best] {
            best = i;
        }
    }
    Ok(cells[best].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_stratified_and_balanced() {
        let labels: Vec<u16> = (0..30).map(|i| if i < 20 { 1 } else { 2 }).collect();
        let a = stratified_folds(&labels, 5, 9).unwrap();
        for f in 0..5 {
            assert_eq!(a[..20].iter().filter(|&&x| x == f).count(), 4);
            assert_eq!(a[20..].iter().filter(|&&x| x == f).count(), 2);
        }
        assert_eq!(a, stratified_folds(&labels, 5, 9).unwrap());
        assert!(stratified_folds(&labels, 1, 9).is_err());
    }

    #[test]
    fn small_class_gets_one_sample_per_fold() {
        let labels = vec![1, 1, 1, 1, 1, 1, 2, 2];
        let a = stratified_folds(&labels, 5, 1).unwrap();
        assert_ne!(a[6], a[7]);
    }

    #[test]
    fn single_cell_grid_returns_that_cell() {
        let x = vec![vec![0.0], vec![1.0], vec![0.1], vec![0.9]];
        let y = vec![1, 2, 1, 2];
        let p = grid_search(&x, &y, &[7.0], &[0.3], 2, &SvmParams::default(), 0).unwrap();
        assert_eq!((p.c, p.gamma), (7.0, Some(0.3)));
    }

    #[test]
    fn separable_data_ties_to_smallest_c() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![if i < 10 { 0.0 } else { 5.0 } + i as f64 * 0.01]).collect();
        let y: Vec<u16> = (0..20).map(|i| if i < 10 { 1 } else { 2 }).collect();
        let p = grid_search(&x, &y, &[1000.0, 10.0, 1.0, 100.0], &[2.0, 0.5], 4, &SvmParams::default(), 5).unwrap();
        assert_eq!((p.c, p.gamma), (1.0, Some(0.5)));
    }

    #[test]
    fn noisy_blobs_pick_the_exhaustive_best_cell() {
        let mut rng = ShiftRng::new(21);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..60 {
            let class = (i % 2) as u16 + 1;
            let centre = if class == 1 { 0.0 } else { 1.0 };
            x.push(vec![centre + 0.8 * rng.normal(), centre + 0.8 * rng.normal()]);
            y.push(class);
        }
        let cs = [1.0, 1000.0];
        let gammas = [0.5, 50.0];
        let base = SvmParams::default();
        let chosen = grid_search(&x, &y, &cs, &gammas, 3, &base, 4).unwrap();
        let assignment = stratified_folds(&y, 3, 4).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for &c in &cs {
            for &g in &gammas {
                let s = cross_validate(&x, &y, &assignment, 3, &base.clone().with_c(c).with_gamma(g)).unwrap();
                if s > best.0 {
                    best = (s, c, g);
                }
            }
        }
        assert_eq!((chosen.c, chosen.gamma), (best.1, Some(best.2)));
    }
}
