//! Precision/recall machinery.
//!
//! A classifier declares a pair matching when its probability is strictly
//! above the threshold. Curves include every distinct predicted probability
//! in addition to an even grid, so the sharp precision cliffs of
//! name-driven matching stay visible instead of being interpolated away.
//! Precision with zero declared pairs is defined as 0, which keeps
//! `recall_at_precision` conservative.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::classifiers::{featurize_pairs, ModelError, TrainedModel};
use crate::corpus::{AttributeKind, Corpus};
use crate::features::{Featurizer, ThresholdConfig};
use crate::sampling::PairDataset;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("curve is empty")]
    EmptyCurve,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One point of a pairwise PR curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Score every pair of a dataset with a trained model. Scoring is
/// parallel; the output order matches the dataset order.
pub fn score_pairs(
    model: &TrainedModel,
    ds: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
) -> Result<Vec<(f64, bool)>, ModelError> {
    use rayon::prelude::*;
    Ok(featurize_pairs(ds, sn1, sn2, fz)?
        .into_par_iter()
        .map(|(fv, y)| (model.predict_proba(&fv), y))
        .collect())
}

/// Confusion counts at one threshold (declare iff score > threshold).
pub fn confusion_at(scores: &[(f64, bool)], threshold: f64) -> PrPoint {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for &(p, y) in scores {
        match (p > threshold, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    PrPoint {
        threshold,
        tp,
        fp,
        fn_,
        tn,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        tpr: ratio(tp, tp + fn_),
        fpr: ratio(fp, fp + tn),
    }
}

/// PR sweep over an even grid of `n_thresholds` points in [0,1] plus every
/// distinct predicted probability, ordered by threshold. One sort plus
/// prefix sums; each point matches `confusion_at` exactly.
pub fn pr_curve_from_scores(scores: &[(f64, bool)], n_thresholds: usize) -> Vec<PrPoint> {
    let mut thresholds: Vec<f64> = Vec::new();
    if n_thresholds > 1 {
        thresholds.extend((0..n_thresholds).map(|i| i as f64 / (n_thresholds - 1) as f64));
    }
    thresholds.extend(scores.iter().map(|&(p, _)| p));
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
    thresholds.dedup();

    // Descending probabilities with cumulative positive counts: at a
    // threshold t, the declared set is the prefix with p > t.
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite probabilities"));
    let mut cum_pos = Vec::with_capacity(sorted.len() + 1);
    cum_pos.push(0usize);
    for (p, y) in &sorted {
        debug_assert!(p.is_finite());
        cum_pos.push(cum_pos.last().unwrap() + usize::from(*y));
    }
    let n_pos = *cum_pos.last().unwrap();
    let n = sorted.len();

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    thresholds
        .into_iter()
        .map(|t| {
            let declared = sorted.partition_point(|&(p, _)| p > t);
            let tp = cum_pos[declared];
            let fp = declared - tp;
            let fn_ = n_pos - tp;
            let tn = n - declared - fn_;
            PrPoint {
                threshold: t,
                tp,
                fp,
                fn_,
                tn,
                precision: ratio(tp, tp + fp),
                recall: ratio(tp, tp + fn_),
                tpr: ratio(tp, tp + fn_),
                fpr: ratio(fp, fp + tn),
            }
        })
        .collect()
}

pub fn pr_curve(
    model: &TrainedModel,
    ds: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
    n_thresholds: usize,
) -> Result<Vec<PrPoint>, EvalError> {
    let scores = score_pairs(model, ds, sn1, sn2, fz)?;
    Ok(pr_curve_from_scores(&scores, n_thresholds))
}

/// Anything exposing a (precision, recall) operating point.
pub trait OperatingPoint {
    fn precision(&self) -> f64;
    fn recall(&self) -> f64;
}

impl OperatingPoint for PrPoint {
    fn precision(&self) -> f64 {
        self.precision
    }
    fn recall(&self) -> f64 {
        self.recall
    }
}

/// Max recall among points at or above the target precision; 0 when no
/// point qualifies.
pub fn recall_at_precision<P: OperatingPoint>(curve: &[P], target_precision: f64) -> f64 {
    curve
        .iter()
        .filter(|p| p.precision() >= target_precision)
        .map(|p| p.recall())
        .fold(0.0, f64::max)
}

/// One operating point of a returned-set scheme (generic pairwise,
/// topmatch, or topmatch + confidence): at a threshold, the scheme returns
/// some items, of which some are correct. Recall is measured against a
/// fixed pool of relevant items (probes with a true match), so schemes
/// with different return shapes compare on equal footing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemePoint {
    pub threshold: f64,
    pub returned: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
}

impl OperatingPoint for SchemePoint {
    fn precision(&self) -> f64 {
        self.precision
    }
    fn recall(&self) -> f64 {
        self.recall
    }
}

/// Sweep every distinct score: an item is returned when its score is
/// strictly above the threshold.
pub fn scheme_curve(scores: &[(f64, bool)], n_relevant: usize) -> Vec<SchemePoint> {
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));
    let mut cum_correct = Vec::with_capacity(sorted.len() + 1);
    cum_correct.push(0usize);
    for (_, ok) in &sorted {
        cum_correct.push(cum_correct.last().unwrap() + usize::from(*ok));
    }

    let mut thresholds: Vec<f64> = scores.iter().map(|&(s, _)| s).collect();
    thresholds.push(0.0);
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    thresholds.dedup();

    thresholds
        .into_iter()
        .map(|t| {
            let returned = sorted.partition_point(|&(s, _)| s > t);
            let correct = cum_correct[returned];
            SchemePoint {
                threshold: t,
                returned,
                correct,
                precision: if returned == 0 {
                    0.0
                } else {
                    correct as f64 / returned as f64
                },
                recall: if n_relevant == 0 {
                    0.0
                } else {
                    correct as f64 / n_relevant as f64
                },
            }
        })
        .collect()
}

/// What a TPR/FPR pair turns into under class imbalance: expected true and
/// false match counts and the resulting precision.
pub fn imbalance_demo(tpr: f64, fpr: f64, n_pos: u64, n_neg: u64) -> (f64, f64, f64) {
    let true_matches = tpr * n_pos as f64;
    let false_matches = fpr * n_neg as f64;
    let precision = if true_matches + false_matches == 0.0 {
        0.0
    } else {
        true_matches / (true_matches + false_matches)
    };
    (true_matches, false_matches, precision)
}

/// Per-attribute fraction of true / missed / false matches where the
/// attribute is available on both sides and consistent. `None` marks an
/// empty category.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownRow {
    pub attr: AttributeKind,
    pub true_matches: Option<f64>,
    pub missed_matches: Option<f64>,
    pub false_matches: Option<f64>,
}

pub fn match_breakdown(
    model: &TrainedModel,
    ds: &PairDataset,
    sn1: &Corpus,
    sn2: &Corpus,
    fz: &Featurizer,
    th_p: f64,
    thresholds: &ThresholdConfig,
) -> Result<Vec<BreakdownRow>, EvalError> {
    use rayon::prelude::*;
    let examples = featurize_pairs(ds, sn1, sn2, fz).map_err(EvalError::Model)?;
    let declared: Vec<bool> = examples
        .par_iter()
        .map(|(fv, _)| model.predict_proba(fv) > th_p)
        .collect();
    let mut rows = Vec::with_capacity(5);
    for attr in AttributeKind::ALL {
        let mut counts: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
        for ((fv, label), declared) in examples.iter().zip(&declared) {
            let category = match (declared, label) {
                (true, true) => "true",
                (false, true) => "missed",
                (true, false) => "false",
                (false, false) => continue,
            };
            let entry = counts.entry(category).or_insert((0, 0));
            entry.1 += 1;
            if thresholds.passes(attr, fv.get(attr), fz.kappa_km) {
                entry.0 += 1;
            }
        }
        let frac = |key: &str| {
            counts
                .get(key)
                .map(|&(consistent, total)| consistent as f64 / total as f64)
        };
        rows.push(BreakdownRow {
            attr,
            true_matches: frac("true"),
            missed_matches: frac("missed"),
            false_matches: frac("false"),
        });
    }
    Ok(rows)
}

/// Breakdown CSV mirroring the report table: one row per attribute.
pub fn breakdown_csv(rows: &[BreakdownRow]) -> String {
    let cell = |v: Option<f64>| match v {
        Some(x) => format!("{x:.4}"),
        None => "unknown".to_string(),
    };
    let mut out = String::from("attribute,true_matches,missed_matches,false_matches\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.attr,
            cell(r.true_matches),
            cell(r.missed_matches),
            cell(r.false_matches)
        );
    }
    out
}

/// PR CSV: `threshold,tp,fp,fn,tn,precision,recall,tpr,fpr`.
pub fn pr_csv(curve: &[PrPoint]) -> String {
    let mut out = String::from("threshold,tp,fp,fn,tn,precision,recall,tpr,fpr\n");
    for p in curve {
        let _ = writeln!(
            out,
            "{:.6},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            p.threshold, p.tp, p.fp, p.fn_, p.tn, p.precision, p.recall, p.tpr, p.fpr
        );
    }
    out
}

const SVG_PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Standalone recall-vs-precision SVG with [0,1]x[0,1] axes, one polyline
/// per labeled curve, and the CSV of the first curve written alongside
/// (same path with a .csv extension).
pub fn emit_pr_svg(curves: &[(String, Vec<PrPoint>)], path: &Path) -> Result<(), EvalError> {
    if curves.is_empty() || curves.iter().any(|(_, c)| c.is_empty()) {
        return Err(EvalError::EmptyCurve);
    }

    let (w, h, margin) = (640.0, 480.0, 60.0);
    let x = |recall: f64| margin + recall * (w - 2.0 * margin);
    let y = |precision: f64| h - margin - precision * (h - 2.0 * margin);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>"
    );
    // Axes with ticks every 0.2.
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        x(0.0),
        y(0.0),
        x(1.0),
        y(0.0)
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        x(0.0),
        y(0.0),
        x(0.0),
        y(1.0)
    );
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{v:.1}</text>",
            x(v),
            y(0.0) + 20.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{v:.1}</text>",
            x(0.0) - 8.0,
            y(v) + 4.0
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>",
            x(v),
            y(0.0),
            x(v),
            y(1.0)
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>",
            x(0.0),
            y(v),
            x(1.0),
            y(v)
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">recall</text>",
        x(0.5),
        h - 12.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">precision</text>",
        y(0.5),
        y(0.5)
    );

    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = SVG_PALETTE[i % SVG_PALETTE.len()];
        // Draw in recall order so the polyline reads left to right.
        let mut pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.recall, p.precision)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        let path_points: Vec<String> = pts
            .iter()
            .map(|(r, p)| format!("{:.2},{:.2}", x(*r), y(*p)))
            .collect();
        let _ = writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path_points.join(" ")
        );
        let ly = margin + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            w - margin - 150.0,
            ly,
            w - margin - 130.0,
            ly
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            w - margin - 124.0,
            ly + 4.0,
            xml_escape(label)
        );
    }
    svg.push_str("</svg>\n");

    let io_err = |e: std::io::Error| EvalError::Io {
        path: path.display().to_string(),
        source: e,
    };
    std::fs::write(path, svg).map_err(io_err)?;
    std::fs::write(path.with_extension("csv"), pr_csv(&curves[0].1)).map_err(io_err)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
