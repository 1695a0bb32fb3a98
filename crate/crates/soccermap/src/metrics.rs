//! Calibration metrics: log-loss, expected calibration error, and the
//! binned reliability table behind calibration plots.

/// Probabilities are clamped to `[CLAMP, 1-CLAMP]` before logs.
pub const CLAMP: f64 = 1e-7;

/// Mean negative log-likelihood of binary labels under predicted
/// probabilities.
pub fn logloss(preds: &[f64], labels: &[bool]) -> f64 {
    assert_eq!(preds.len(), labels.len());
    assert!(!preds.is_empty(), "logloss of an empty sample set");
    let total: f64 = preds
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(CLAMP, 1.0 - CLAMP);
            if y {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    total / preds.len() as f64
}

/// Bin index of a prediction among `K` equal-width bins over [0,1];
/// p = 1.0 lands in the top bin.
pub fn bin_index(p: f64, k: usize) -> usize {
    ((p * k as f64).floor() as usize).min(k - 1)
}

/// One row of a [`ReliabilityTable`]: predictions falling in
/// `[lo, hi)` (top bin inclusive of 1.0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReliabilityBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Mean predicted probability within the bin (0 when empty).
    pub mean_pred: f64,
    /// Fraction of positive labels within the bin (0 when empty).
    pub frac_pos: f64,
}

/// Per-bin confidence vs observed positive rate over K equal-width bins.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityTable {
    pub bins: Vec<ReliabilityBin>,
    pub total: usize,
}

impl ReliabilityTable {
    /// Weighted mean absolute gap between confidence and positive rate —
    /// the expected calibration error this table encodes.
    pub fn ece(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.bins
            .iter()
            .map(|b| b.count as f64 / self.total as f64 * (b.frac_pos - b.mean_pred).abs())
            .sum()
    }

    /// CSV rows `bin_lo,bin_hi,count,mean_pred,frac_pos` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,mean_pred,frac_pos\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{:.6},{:.6},{},{:.9},{:.9}\n",
                b.lo, b.hi, b.count, b.mean_pred, b.frac_pos
            ));
        }
        out
    }
}

/// Bin predictions into K equal-width intervals and report, per bin, the
/// mean confidence and the empirical positive fraction.
pub fn reliability(preds: &[f64], labels: &[bool], k: usize) -> ReliabilityTable {
    assert_eq!(preds.len(), labels.len());
    assert!(k >= 1, "at least one bin");
    let mut count = vec![0usize; k];
    let mut pred_sum = vec![0.0f64; k];
    let mut pos = vec![0usize; k];
    for (&p, &y) in preds.iter().zip(labels) {
        let b = bin_index(p, k);
        count[b] += 1;
        pred_sum[b] += p;
        pos[b] += y as usize;
    }
    let bins = (0..k)
        .map(|b| ReliabilityBin {
            lo: b as f64 / k as f64,
            hi: (b + 1) as f64 / k as f64,
            count: count[b],
            mean_pred: if count[b] > 0 { pred_sum[b] / count[b] as f64 } else { 0.0 },
            frac_pos: if count[b] > 0 { pos[b] as f64 / count[b] as f64 } else { 0.0 },
        })
        .collect();
    ReliabilityTable { bins, total: preds.len() }
}

/// Expected calibration error over K bins: the bin-count-weighted mean
/// absolute difference between the positive fraction and the mean
/// confidence. Empty bins contribute nothing; a perfectly calibrated
/// model scores 0.
pub fn ece(preds: &[f64], labels: &[bool], k: usize) -> f64 {
    reliability(preds, labels, k).ece()
}
