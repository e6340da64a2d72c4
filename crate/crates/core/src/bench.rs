//! Accuracy and independence measurements of SBG streams.

use crate::bitstream::{and_gate, correlation, Probability};
use crate::error::{Error, Result};
use crate::mtj::{generate, pv_curve, voltage_for_probability, MtjParams, SbgNode};
use crate::rng::derive_seed;

/// `E|K/n - p|` for `K ~ Binomial(n, p)`, summed exactly in the log domain.
pub fn binomial_mean_abs_error(p: f64, n: usize) -> f64 {
    if p <= 0.0 || p >= 1.0 || n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let ln_pmf = ln_choose + k as f64 * lp + (nf - k as f64) * lq;
        total += ln_pmf.exp() * (k as f64 / nf - p).abs();
    }
    total
}

/// Which quantity a [`BenchRow`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchKind {
    /// One stream per voltage against its write probability.
    Representation,
    /// `AND` of two independent streams at the same voltage against `p^2`.
    Product,
}

impl BenchKind {
    pub fn name(self) -> &'static str {
        match self {
            BenchKind::Representation => "representation",
            BenchKind::Product => "product",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub kind: BenchKind,
    pub length: usize,
    pub points: usize,
    pub seeds: usize,
    /// Mean over voltages and seeds of `|estimate - target|`.
    pub mae: f64,
    /// Mean over voltages of `|seed-averaged estimate - target|`.
    pub mae_of_seed_mean: f64,
    /// Mean over voltages of the binomial `E|err|` of a single stream.
    pub expected_mae: f64,
}

/// Sweep `points` voltages across the window and, for every length and
/// seed, measure single-stream and product errors.
pub fn sbg_bench(
    params: &MtjParams,
    lengths: &[usize],
    points: usize,
    seeds: usize,
    master_seed: u64,
) -> Result<Vec<BenchRow>> {
    if seeds == 0 {
        return Err(Error::invalid("at least one seed is required"));
    }
    let curve = pv_curve(params, points)?;
    let mut rows = Vec::with_capacity(2 * lengths.len());
    for &n in lengths {
        let mut rep = Accumulator::new(points, seeds);
        let mut prod = Accumulator::new(points, seeds);
        for (i, &(v, p)) in curve.iter().enumerate() {
            for k in 0..seeds {
                let node = |tag: &str| {
                    let seed = derive_seed(master_seed, &format!("bench/{n}/{i}/{k}/{tag}"));
                    SbgNode::new(tag, v, seed, *params)
                };
                let a = generate(&node("a")?, n)?;
                let b = generate(&node("b")?, n)?;
                rep.add(i, a.estimate().value());
                prod.add(i, and_gate(&a, &b)?.estimate().value());
            }
            rep.target(i, p.value());
            prod.target(i, p.value() * p.value());
        }
        rows.push(rep.row(BenchKind::Representation, n));
        rows.push(prod.row(BenchKind::Product, n));
    }
    Ok(rows)
}

struct Accumulator {
    estimates: Vec<Vec<f64>>,
    targets: Vec<f64>,
    seeds: usize,
}

impl Accumulator {
    fn new(points: usize, seeds: usize) -> Self {
        Accumulator {
            estimates: vec![Vec::with_capacity(seeds); points],
            targets: vec![0.0; points],
            seeds,
        }
    }

    fn add(&mut self, i: usize, estimate: f64) {
        self.estimates[i].push(estimate);
    }

    fn target(&mut self, i: usize, p: f64) {
        self.targets[i] = p;
    }

    fn row(&self, kind: BenchKind, length: usize) -> BenchRow {
        let points = self.targets.len() as f64;
        let mut mae = 0.0;
        let mut mae_of_seed_mean = 0.0;
        let mut expected = 0.0;
        for (est, &t) in self.estimates.iter().zip(&self.targets) {
            mae += est.iter().map(|e| (e - t).abs()).sum::<f64>() / est.len() as f64;
            mae_of_seed_mean += (est.iter().sum::<f64>() / est.len() as f64 - t).abs();
            expected += binomial_mean_abs_error(t, length);
        }
        BenchRow {
            kind,
            length,
            points: self.targets.len(),
            seeds: self.seeds,
            mae: mae / points,
            mae_of_seed_mean: mae_of_seed_mean / points,
            expected_mae: expected / points,
        }
    }
}

/// Pearson correlation of `pairs` independently seeded stream pairs at
/// probability `p`.
pub fn pair_correlations(
    params: &MtjParams,
    p: Probability,
    pairs: usize,
    length: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let v = voltage_for_probability(p, params).volts;
    (0..pairs)
        .map(|k| {
            let node = |tag: &str| SbgNode::new(tag, v, derive_seed(master_seed, &format!("pair/{k}/{tag}")), *params);
            correlation(&generate(&node("a")?, length)?, &generate(&node("b")?, length)?)
        })
        .collect()
}
