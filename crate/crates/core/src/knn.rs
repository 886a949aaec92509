//! A small deterministic k-nearest-neighbor classifier over standardized
//! features. Standardization statistics come from the training split only.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::types::ClassLabel;

/// Trained classifier state: standardization parameters plus the
/// standardized training matrix.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    k: usize,
    means: Vec<f64>,
    scales: Vec<f64>,
    train: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
}

fn check_features(features: &[FeatureVector]) -> Result<usize> {
    let first = features
        .first()
        .ok_or_else(|| Error::InvalidClassifier("empty feature set".into()))?;
    let dim = first.values.len();
    for fv in features {
        if fv.values.len() != dim || fv.schema != first.schema {
            return Err(Error::InvalidClassifier(format!(
                "inconsistent features: {} ({} dims) vs {} ({} dims)",
                fv.schema,
                fv.values.len(),
                first.schema,
                dim
            )));
        }
    }
    Ok(dim)
}

/// Train a k-NN model. `k` must be odd and no larger than the training size,
/// and every class that appears must have at least one example.
pub fn train_classifier(
    features: &[FeatureVector],
    labels: &[ClassLabel],
    k: usize,
) -> Result<KnnClassifier> {
    let dim = check_features(features)?;
    if features.len() != labels.len() {
        return Err(Error::InvalidClassifier(format!(
            "{} features but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if k == 0 || k % 2 == 0 {
        return Err(Error::InvalidClassifier(format!("k = {k} must be odd")));
    }
    if k > features.len() {
        return Err(Error::InvalidClassifier(format!(
            "k = {k} larger than training size {}",
            features.len()
        )));
    }

    let n = features.len() as f64;
    let mut means = vec![0.0; dim];
    for fv in features {
        for (m, v) in means.iter_mut().zip(&fv.values) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut vars = vec![0.0; dim];
    for fv in features {
        for ((var, v), m) in vars.iter_mut().zip(&fv.values).zip(&means) {
            let d = v - m;
            *var += d * d;
        }
    }
    let scales: Vec<f64> = vars
        .iter()
        .zip(&means)
        .map(|(&var, &m)| {
            let sd = (var / n).sqrt();
            // Constant dimensions carry no information; leave them centered
            // instead of amplifying round-off.
            if sd <= 1e-12 * (m.abs() + 1.0) {
                1.0
            } else {
                sd
            }
        })
        .collect();

    let train: Vec<Vec<f64>> = features
        .iter()
        .map(|fv| {
            fv.values
                .iter()
                .zip(&means)
                .zip(&scales)
                .map(|((v, m), s)| (v - m) / s)
                .collect()
        })
        .collect();

    Ok(KnnClassifier {
        k,
        means,
        scales,
        train,
        labels: labels.to_vec(),
    })
}

impl KnnClassifier {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Standardization parameters (means, scales), fixed at training time.
    pub fn standardization(&self) -> (&[f64], &[f64]) {
        (&self.means, &self.scales)
    }

    fn standardize(&self, fv: &FeatureVector) -> Result<Vec<f64>> {
        if fv.values.len() != self.means.len() {
            return Err(Error::InvalidClassifier(format!(
                "query has {} dims, model expects {}",
                fv.values.len(),
                self.means.len()
            )));
        }
        Ok(fv
            .values
            .iter()
            .zip(&self.means)
            .zip(&self.scales)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }

    /// Classify one query. Neighbors sort by (distance, training index);
    /// vote ties resolve to the tied class with the smallest summed
    /// distance, then the smallest class index.
    pub fn predict(&self, fv: &FeatureVector) -> Result<ClassLabel> {
        let q = self.standardize(fv)?;
        let mut dists: Vec<(f64, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d = row
                    .iter()
                    .zip(&q)
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum::<f64>();
                (d, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut votes = [0usize; 6];
        let mut vote_dist = [0.0f64; 6];
        for &(d, idx) in dists.iter().take(self.k) {
            let c = self.labels[idx].index();
            votes[c] += 1;
            vote_dist[c] += d;
        }
        let mut best = 0usize;
        for c in 1..6 {
            let better = votes[c] > votes[best]
                || (votes[c] == votes[best] && votes[c] > 0 && vote_dist[c] < vote_dist[best]);
            if better {
                best = c;
            }
        }
        Ok(ClassLabel::from_index(best).unwrap())
    }

    pub fn predict_batch(&self, features: &[FeatureVector]) -> Result<Vec<ClassLabel>> {
        features.par_iter().map(|fv| self.predict(fv)).collect()
    }
}

/// Fraction of correct predictions.
pub fn accuracy(predicted: &[ClassLabel], truth: &[ClassLabel]) -> f64 {
    if predicted.is_empty() {
        return 0.0;
    }
    let hits = predicted
        .iter()
        .zip(truth)
        .filter(|(a, b)| a == b)
        .count();
    hits as f64 / predicted.len() as f64
}

/// Pick k from a grid by validation accuracy; ties go to the smaller k.
pub fn select_k(
    train_features: &[FeatureVector],
    train_labels: &[ClassLabel],
    val_features: &[FeatureVector],
    val_labels: &[ClassLabel],
    k_grid: &[usize],
) -> Result<(usize, f64)> {
    if k_grid.is_empty() {
        return Err(Error::InvalidClassifier("empty k grid".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for &k in k_grid {
        let model = train_classifier(train_features, train_labels, k)?;
        let preds = model.predict_batch(val_features)?;
        let acc = accuracy(&preds, val_labels);
        let better = match best {
            None => true,
            Some((bk, ba)) => acc > ba || (acc == ba && k < bk),
        };
        if better {
            best = Some((k, acc));
        }
    }
    Ok(best.unwrap())
}
