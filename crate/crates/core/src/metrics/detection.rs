use crate::world::Box3;
use serde::{Deserialize, Serialize};

/// Default IoU threshold for a true positive.
pub const IOU_THRESHOLD: f64 = 0.5;

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Volumetric intersection over union of two axis-aligned boxes.
pub fn iou3d(a: &Box3, b: &Box3) -> f64 {
    let span = |c: f64, e: f64| (c - e / 2.0, c + e / 2.0);
    let (ax0, ax1) = span(a.center_x, a.length);
    let (bx0, bx1) = span(b.center_x, b.length);
    let (ay0, ay1) = span(a.center_y, a.width);
    let (by0, by1) = span(b.center_y, b.width);
    let (az0, az1) = span(a.center_z, a.height);
    let (bz0, bz1) = span(b.center_z, b.height);
    let inter = overlap(ax0, ax1, bx0, bx1) * overlap(ay0, ay1, by0, by1) * overlap(az0, az1, bz0, bz1);
    let union = a.volume() + b.volume() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// One-to-one assignment between predictions and ground truth.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoxMatching {
    /// `(pred index, gt index, iou)`, in matching order.
    pub pairs: Vec<(usize, usize, f64)>,
    pub pred_count: usize,
    pub gt_count: usize,
}

impl BoxMatching {
    pub fn tp(&self) -> usize {
        self.pairs.len()
    }

    pub fn fp(&self) -> usize {
        self.pred_count - self.tp()
    }

    pub fn fn_count(&self) -> usize {
        self.gt_count - self.tp()
    }
}

/// Greedy matching in descending IoU order. Ties break on lower pred index,
/// then lower gt index.
pub fn match_boxes(preds: &[Box3], gts: &[Box3], threshold: f64) -> BoxMatching {
    assert!(threshold > 0.0 && threshold <= 1.0, "threshold must lie in (0, 1]");
    let mut candidates: Vec<(usize, usize, f64)> = preds
        .iter()
        .enumerate()
        .flat_map(|(i, p)| gts.iter().enumerate().map(move |(j, g)| (i, j, iou3d(p, g))))
        .filter(|&(_, _, iou)| iou >= threshold)
        .collect();
    candidates.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut pred_used = vec![false; preds.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut pairs = Vec::new();
    for (i, j, iou) in candidates {
        if !pred_used[i] && !gt_used[j] {
            pred_used[i] = true;
            gt_used[j] = true;
            pairs.push((i, j, iou));
        }
    }
    BoxMatching { pairs, pred_count: preds.len(), gt_count: gts.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub iou_sample: f64,
    pub iou_box: f64,
    pub precision: f64,
    pub recall: f64,
    pub pred_total: usize,
    pub gt_total: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Aggregates per-sample matchings. Box-level IoU averages over all matched
/// pairs; sample-level IoU averages per-sample means over samples that have
/// at least one match.
pub fn detection_summary(samples: &[BoxMatching]) -> DetectionSummary {
    let all: Vec<f64> = samples.iter().flat_map(|s| s.pairs.iter().map(|p| p.2)).collect();
    let per_sample: Vec<f64> = samples
        .iter()
        .filter(|s| !s.pairs.is_empty())
        .map(|s| s.pairs.iter().map(|p| p.2).sum::<f64>() / s.pairs.len() as f64)
        .collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let tp: usize = samples.iter().map(BoxMatching::tp).sum();
    let pred_total = samples.iter().map(|s| s.pred_count).sum();
    let gt_total = samples.iter().map(|s| s.gt_count).sum();
    DetectionSummary {
        iou_sample: mean(&per_sample),
        iou_box: mean(&all),
        precision: ratio(tp, pred_total),
        recall: ratio(tp, gt_total),
        pred_total,
        gt_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(x: f64) -> Box3 {
        Box3::new([x, 0.0, 0.0], [2.0, 2.0, 2.0])
    }

    #[test]
    fn shifted_cube() {
        assert!((iou3d(&cube(0.0), &cube(1.0)) - 4.0 / 12.0).abs() < 1e-12);
        assert_eq!(iou3d(&cube(0.0), &cube(0.0)), 1.0);
        assert_eq!(iou3d(&cube(0.0), &cube(5.0)), 0.0);
    }

    #[test]
    fn greedy_prefers_higher_iou() {
        // solves (2 - d) / (2 + d) = iou
        let d_for = |iou: f64| 2.0 * (1.0 - iou) / (1.0 + iou);
        let preds = [cube(d_for(0.6)), cube(d_for(0.8))];
        let m = match_boxes(&preds, &[cube(0.0)], IOU_THRESHOLD);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].0, 1);
        assert!((m.pairs[0].2 - 0.8).abs() < 1e-12);
        assert_eq!((m.tp(), m.fp(), m.fn_count()), (1, 1, 0));
    }

    #[test]
    fn sample_versus_box_averaging() {
        let s1 = BoxMatching { pairs: vec![(0, 0, 1.0)], pred_count: 1, gt_count: 1 };
        let s2 = BoxMatching { pairs: vec![(0, 0, 0.5), (1, 1, 0.5)], pred_count: 2, gt_count: 3 };
        let d = detection_summary(&[s1, s2]);
        assert!((d.iou_sample - 0.75).abs() < 1e-12);
        assert!((d.iou_box - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!((d.precision, d.recall), (1.0, 0.75));
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(detection_summary(&[]), DetectionSummary::default());
    }
}
