use std::collections::BTreeMap;
use std::ops::AddAssign;

use crate::error::{Error, Result};
use crate::metrics::matching::MatchResult;

const Q64: f64 = 18_446_744_073_709_551_616.0; // 2^64

/// Exact sum of values in `[0, 1]`, kept as a Q64 fixed-point integer.
///
/// Addition is integer addition, so merges are associative and commutative
/// bit-for-bit regardless of how work is chunked. Any `f64` in `(0.5, 1]`
/// (every true-positive IoU) converts without rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedSum(u128);

impl FixedSum {
    pub fn from_raw(raw: u128) -> Self {
        Self(raw)
    }

    pub fn raw(&self) -> u128 {
        self.0
    }

    pub fn add_unit(&mut self, x: f64) {
        assert!(
            (0.0..=1.0).contains(&x),
            "FixedSum only holds values in [0, 1], got {x}"
        );
        self.0 += (x * Q64).round() as u128;
    }

    pub fn value(&self) -> f64 {
        self.0 as f64 / Q64
    }
}

impl AddAssign for FixedSum {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

/// TP/FP/FN counts and summed TP IoU of one category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CategoryTally {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub iou_sum: FixedSum,
}

impl CategoryTally {
    pub fn is_present(&self) -> bool {
        self.tp + self.fp + self.fn_ > 0
    }

    /// `iou_sum / (tp + fp/2 + fn/2)`, or `None` when the category never occurred.
    pub fn quality(&self) -> Option<f64> {
        if !self.is_present() {
            return None;
        }
        let denom = self.tp as f64 + 0.5 * self.fp as f64 + 0.5 * self.fn_ as f64;
        Some(self.iou_sum.value() / denom)
    }

    /// Mean IoU of the matched pairs.
    pub fn segmentation_quality(&self) -> Option<f64> {
        (self.tp > 0).then(|| self.iou_sum.value() / self.tp as f64)
    }

    /// `tp / (tp + fp/2 + fn/2)`.
    pub fn recognition_quality(&self) -> Option<f64> {
        self.is_present().then(|| {
            self.tp as f64 / (self.tp as f64 + 0.5 * self.fp as f64 + 0.5 * self.fn_ as f64)
        })
    }
}

impl AddAssign for CategoryTally {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
        self.iou_sum += rhs.iou_sum;
    }
}

/// Per-category tallies for one window span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccumulatorSet {
    span_k: usize,
    tallies: BTreeMap<u32, CategoryTally>,
}

impl AccumulatorSet {
    pub fn new(span_k: usize) -> Self {
        Self {
            span_k,
            tallies: BTreeMap::new(),
        }
    }

    pub fn from_tallies(span_k: usize, tallies: BTreeMap<u32, CategoryTally>) -> Self {
        Self { span_k, tallies }
    }

    pub fn span_k(&self) -> usize {
        self.span_k
    }

    pub fn tallies(&self) -> &BTreeMap<u32, CategoryTally> {
        &self.tallies
    }

    pub fn tally(&self, category_id: u32) -> CategoryTally {
        self.tallies.get(&category_id).copied().unwrap_or_default()
    }

    pub fn record(&mut self, result: &MatchResult) {
        for m in &result.matches {
            let t = self.tallies.entry(m.category_id).or_default();
            t.tp += 1;
            t.iou_sum.add_unit(m.iou);
        }
        for p in &result.false_positives {
            self.tallies.entry(p.category_id).or_default().fp += 1;
        }
        for g in &result.false_negatives {
            self.tallies.entry(g.category_id).or_default().fn_ += 1;
        }
    }

    pub fn merge(&mut self, other: &AccumulatorSet) -> Result<()> {
        if self.span_k != other.span_k {
            return Err(Error::Label(format!(
                "cannot merge accumulators for span {} and span {}",
                self.span_k, other.span_k
            )));
        }
        for (&c, &t) in &other.tallies {
            *self.tallies.entry(c).or_default() += t;
        }
        Ok(())
    }

    pub fn merged(mut self, other: &AccumulatorSet) -> Result<Self> {
        self.merge(other)?;
        Ok(self)
    }

    /// Categories with at least one tube in prediction or GT.
    pub fn present_categories(&self) -> impl Iterator<Item = (u32, &CategoryTally)> {
        self.tallies
            .iter()
            .filter(|(_, t)| t.is_present())
            .map(|(&c, t)| (c, t))
    }

    pub fn category_count(&self) -> usize {
        self.present_categories().count()
    }

    /// Mean per-category quality over present categories.
    pub fn quality(&self) -> Result<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (_, t) in self.present_categories() {
            sum += t.quality().expect("present category has a quality");
            n += 1;
        }
        if n == 0 {
            return Err(Error::UndefinedMetric(format!(
                "no category occurs in any window of span {}",
                self.span_k
            )));
        }
        Ok(sum / n as f64)
    }
}
