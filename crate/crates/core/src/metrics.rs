//! Evaluation against ground truth: rank-sum AUC, accuracy, detection rate
//! and false alarm rate.
//!
//! Ranks are assigned in ascending score order (rank 1 = lowest score) with
//! midranks for ties, which makes the rank-sum formula the Mann–Whitney
//! statistic normalised to the ROC area. [`roc_auc_oracle`] computes the same
//! area geometrically and exists to cross-check [`rank_auc`].

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn class_sizes(len: usize, labels: &[bool]) -> Result<(usize, usize)> {
    if len != labels.len() {
        return Err(Error::shape(format!("{len} scores for {} labels", labels.len())));
    }
    let outliers = labels.iter().filter(|&&l| l).count();
    let normals = labels.len() - outliers;
    if outliers == 0 || normals == 0 {
        return Err(Error::UndefinedMetric(
            "AUC needs at least one outlier and one normal label".into(),
        ));
    }
    Ok((outliers, normals))
}

fn check_finite<S: Scalar>(scores: &[S]) -> Result<()> {
    match scores.iter().position(|s| !s.is_finite()) {
        Some(i) => Err(Error::invalid(format!("score {i} is not finite"))),
        None => Ok(()),
    }
}

fn ascending<S: Scalar>(scores: &[S]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    idx
}

/// `(S - (n_o² + n_o)/2) / (n_o·n_n)` where `S` is the rank sum of the true
/// outliers.
pub fn rank_auc<S: Scalar>(scores: &[S], labels: &[bool]) -> Result<f64> {
    let (n_o, n_n) = class_sizes(scores.len(), labels)?;
    check_finite(scores)?;
    let idx = ascending(scores);
    let mut rank_sum = 0.0f64;
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1..=end
        let midrank = (start + 1 + end) as f64 / 2.0;
        let hits = idx[start..end].iter().filter(|&&i| labels[i]).count();
        rank_sum += midrank * hits as f64;
        start = end;
    }
    let (n_o, n_n) = (n_o as f64, n_n as f64);
    Ok((rank_sum - (n_o * n_o + n_o) / 2.0) / (n_o * n_n))
}

/// Trapezoidal area under the ROC staircase, sweeping thresholds from the
/// highest score down; equal scores form a single step.
pub fn roc_auc_oracle<S: Scalar>(scores: &[S], labels: &[bool]) -> Result<f64> {
    let (n_o, n_n) = class_sizes(scores.len(), labels)?;
    check_finite(scores)?;
    let mut idx = ascending(scores);
    idx.reverse();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let (tpr0, fpr0) = (tp as f64 / n_o as f64, fp as f64 / n_n as f64);
        let mut end = start;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            if labels[idx[end]] {
                tp += 1;
            } else {
                fp += 1;
            }
            end += 1;
        }
        let (tpr1, fpr1) = (tp as f64 / n_o as f64, fp as f64 / n_n as f64);
        area += (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0;
        start = end;
    }
    Ok(area)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(predicted: &[bool], labels: &[bool]) -> Result<Self> {
        if predicted.len() != labels.len() {
            return Err(Error::shape(format!(
                "{} predictions for {} labels",
                predicted.len(),
                labels.len()
            )));
        }
        let mut c = Self::default();
        for (&p, &l) in predicted.iter().zip(labels) {
            match (p, l) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn detection_rate(&self) -> Result<f64> {
        match self.tp + self.fn_ {
            0 => Err(Error::UndefinedMetric("detection rate with no true outliers".into())),
            d => Ok(self.tp as f64 / d as f64),
        }
    }

    pub fn false_alarm_rate(&self) -> Result<f64> {
        match self.tn + self.fp {
            0 => Err(Error::UndefinedMetric("false alarm rate with no true normals".into())),
            d => Ok(self.fp as f64 / d as f64),
        }
    }
}

/// Threshold metrics for a top-p prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionMetrics {
    pub acc: f64,
    pub dr: f64,
    pub far: f64,
    pub counts: ConfusionCounts,
}

pub fn confusion_metrics(predicted: &[bool], labels: &[bool]) -> Result<ConfusionMetrics> {
    let counts = ConfusionCounts::from_predictions(predicted, labels)?;
    Ok(ConfusionMetrics {
        acc: counts.accuracy(),
        dr: counts.detection_rate()?,
        far: counts.false_alarm_rate()?,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub auc: f64,
    pub acc: f64,
    pub dr: f64,
    pub far: f64,
    pub counts: ConfusionCounts,
}

/// AUC from the continuous scores, the rest from the binary predictions.
pub fn evaluate<S: Scalar>(scores: &[S], predicted: &[bool], labels: &[bool]) -> Result<EvalReport> {
    let auc = rank_auc(scores, labels)?;
    let m = confusion_metrics(predicted, labels)?;
    Ok(EvalReport {
        auc,
        acc: m.acc,
        dr: m.dr,
        far: m.far,
        counts: m.counts,
    })
}
