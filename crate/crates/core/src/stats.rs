//! Estimators: pillar-height tails, the rates alpha_h and their slope,
//! m* and gamma, maximum heights, nested-sequence excess tails and the
//! isoperimetric check.
//!
//! Tallies are plain counts so partial results from independent chains
//! merge by addition in any order.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{IsiError, Result};
use crate::interface::Interface;
use crate::lattice::{c3, cell_star_neighbors, BoxDims, Coord, Region};
use crate::maps::Frame;
use crate::sampler::{Chain, Schedule};
use crate::spins::SpinConfig;
use crate::walls::decompose;

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Two-sided normal quantile for a confidence level.
pub fn z_value(level: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for k successes out of n.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Batch-means interval for the mean of a correlated series: cut it into
/// `batches` consecutive blocks of equal length (the tail remainder is
/// dropped) and treat the block means as independent, with a Student t
/// quantile on batches - 1 degrees of freedom. Returns (mean, lo, hi).
pub fn batch_means(series: &[f64], batches: usize, level: f64) -> Option<(f64, f64, f64)> {
    if batches < 2 || series.len() < batches {
        return None;
    }
    let len = series.len() / batches;
    let means: Vec<f64> = series.chunks_exact(len).take(batches).map(|b| b.iter().sum::<f64>() / len as f64).collect();
    let b = batches as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let t = StudentsT::new(0.0, 1.0, b - 1.0).ok()?.inverse_cdf(0.5 + level / 2.0);
    let half = t * (var / b).sqrt();
    Some((mean, mean - half, mean + half))
}

/// Do two intervals overlap.
pub fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Ordinary least squares: (slope, intercept, r^2).
pub fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, my - slope * mx, r2))
}

// ---------------------------------------------------------------------------
// tail tables

/// Tally of P(value >= h) for h = 0..=h_max.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailTable {
    pub h_max: usize,
    pub total: u64,
    /// counts[h] = number of observations with value >= h
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub h: usize,
    pub count: u64,
    pub total: u64,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TailTable {
    pub fn new(h_max: usize) -> TailTable {
        TailTable { h_max, total: 0, counts: vec![0; h_max + 1] }
    }

    pub fn add(&mut self, value: i64) {
        self.total += 1;
        let top = value.clamp(-1, self.h_max as i64);
        for h in 0..=top.max(-1) {
            self.counts[h as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: &TailTable) -> Result<()> {
        if other.h_max != self.h_max {
            return Err(IsiError::Precondition("tail tables of different length".into()));
        }
        self.total += other.total;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn p(&self, h: usize) -> f64 {
        if self.total == 0 {
            return f64::NAN;
        }
        self.counts.get(h).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn rows(&self, level: f64) -> Vec<TailRow> {
        let z = z_value(level);
        (0..=self.h_max)
            .map(|h| {
                let (lo, hi) = wilson(self.counts[h], self.total, z);
                TailRow { h, count: self.counts[h], total: self.total, p: self.p(h), lo, hi }
            })
            .collect()
    }

    /// -log(p(h+1)/p(h)); None when either count is zero.
    pub fn rate(&self, h: usize) -> Option<f64> {
        if h + 1 > self.h_max || self.counts[h] == 0 || self.counts[h + 1] == 0 {
            return None;
        }
        Some(-(self.counts[h + 1] as f64 / self.counts[h] as f64).ln())
    }

    /// Slope of log p(h) against h over the rows with nonzero counts, using
    /// a +1/2 continuity correction for zero counts.
    pub fn log_slope(&self, from: usize) -> Option<f64> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for h in from..=self.h_max {
            let k = self.counts[h] as f64;
            let k = if k == 0.0 { 0.5 } else { k };
            xs.push(h as f64);
            ys.push((k / self.total as f64).ln());
        }
        ols(&xs, &ys).map(|f| f.0)
    }

    pub fn write_csv<W: Write>(&self, w: W, level: f64) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in self.rows(level) {
            wr.serialize(r).map_err(|e| IsiError::Format(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Base faces at distance >= k columns from the side of the box.
pub fn deep_faces(dims: BoxDims, k: i32) -> Vec<Coord> {
    Region::inset(&dims, k).faces.into_iter().collect()
}

/// Pillar heights of every column in one pass: star components of plus
/// cells above height h0 that reach the first level. Returns the height of
/// the pillar over each requested face.
pub fn pillar_heights(s: &SpinConfig, xs: &[Coord], h0: i32) -> Vec<i32> {
    let d = s.dims;
    let mut label = vec![u32::MAX; d.num_cells()];
    let mut tops: Vec<i32> = Vec::new();
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let start = c3(x.x, x.y, 2 * h0 + 1);
        if !d.contains_cell(start) || s.get(start) < 0 {
            out.push(0);
            continue;
        }
        let si = d.cell_index(start);
        if label[si] == u32::MAX {
            let lab = tops.len() as u32;
            let mut top = start.z;
            label[si] = lab;
            let mut q = VecDeque::from([start]);
            while let Some(c) = q.pop_front() {
                top = top.max(c.z);
                for nb in cell_star_neighbors(c) {
                    if nb.z > 2 * h0 && d.contains_cell(nb) {
                        let k = d.cell_index(nb);
                        if label[k] == u32::MAX && s.spins[k] > 0 {
                            label[k] = lab;
                            q.push_back(nb);
                        }
                    }
                }
            }
            tops.push(top);
        }
        out.push((tops[label[si] as usize] + 1) / 2 - h0);
    }
    out
}

/// Largest face height over column x, or None for an empty column.
fn column_top(i: &Interface, x: Coord) -> Option<i32> {
    i.faces
        .range(c3(x.x, x.y, i32::MIN)..=c3(x.x, x.y, i32::MAX))
        .filter(|f| f.is_horizontal())
        .map(|f| f.z / 2)
        .max()
}

/// Empirical P(hgt(P_x) >= h) pooled over the faces xs of every sample,
/// and the diagnostic P(I reaches height h over x).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PillarTail {
    pub pillar: TailTable,
    pub reach: TailTable,
}

pub fn pillar_tail(samples: &[Interface], xs: &[Coord], h_max: usize) -> Result<PillarTail> {
    if samples.is_empty() {
        return Err(IsiError::Precondition("no samples".into()));
    }
    let mut out = PillarTail { pillar: TailTable::new(h_max), reach: TailTable::new(h_max) };
    for i in samples {
        add_pillar_obs(&mut out, i, xs)?;
    }
    Ok(out)
}

fn add_pillar_obs(t: &mut PillarTail, i: &Interface, xs: &[Coord]) -> Result<()> {
    let s = i.spins_of()?;
    for (&x, h) in xs.iter().zip(pillar_heights(&s, xs, 0)) {
        t.pillar.add(h as i64);
        t.reach.add(column_top(i, x).unwrap_or(0) as i64);
    }
    Ok(())
}

/// Pillar heights over `xs` read directly off the unconditional chain. A
/// configuration in which one of these pillars comes within one layer of
/// the lid (hgt >= H - 1) is discarded as truncated.
#[allow(clippy::too_many_arguments)]
pub fn sampled_pillar_tail(
    dims: BoxDims,
    beta: f64,
    n_samples: usize,
    sched: Schedule,
    seed: u64,
    stream: u64,
    xs: &[Coord],
    h_max: usize,
) -> Result<TailTable> {
    let mut t = TailTable::new(h_max);
    for_each_pillar_sample(dims, beta, n_samples, sched, seed, stream, xs, |hs| {
        for &h in hs {
            t.add(h as i64);
        }
    })?;
    Ok(t)
}

/// The sampling loop behind `sampled_pillar_tail`, handing each kept
/// configuration's heights (in the order of `xs`) to `f`. Returns the number
/// of discarded configurations.
#[allow(clippy::too_many_arguments)]
pub fn for_each_pillar_sample(
    dims: BoxDims,
    beta: f64,
    n_samples: usize,
    sched: Schedule,
    seed: u64,
    stream: u64,
    xs: &[Coord],
    mut f: impl FnMut(&[i32]),
) -> Result<usize> {
    let mut ch = Chain::new(&SpinConfig::ground(dims), beta, seed, stream);
    ch.sweeps(sched.burn_in);
    let (mut got, mut flagged) = (0usize, 0usize);
    while got < n_samples {
        ch.sweeps(sched.sweeps_between.max(1));
        let hs = pillar_heights(&ch.config(), xs, 0);
        if hs.iter().any(|&h| h >= dims.h - 1) {
            flagged += 1;
            if flagged * 100 > n_samples.max(1) {
                return Err(IsiError::TruncationRate { flagged, total: got + flagged });
            }
            continue;
        }
        got += 1;
        f(&hs);
    }
    Ok(flagged)
}

// ---------------------------------------------------------------------------
// alpha

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub h: usize,
    pub count: u64,
    pub total: u64,
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
    /// No success at this h: `alpha` is the continuity-corrected value and
    /// only `lo` is a bound.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    pub beta: f64,
    pub rows: Vec<AlphaRow>,
}

/// 4 beta + exp(-4 beta).
pub fn alpha_bar(beta: f64) -> f64 {
    4.0 * beta + (-4.0 * beta).exp()
}

impl AlphaTable {
    /// alpha_h = -log P(hgt >= h) from a tail table, h = 1..=h_max.
    pub fn from_tail(t: &TailTable, beta: f64, level: f64) -> AlphaTable {
        let z = z_value(level);
        let rows = (1..=t.h_max)
            .map(|h| {
                let k = t.counts[h];
                let n = t.total;
                let (plo, phi) = wilson(k, n, z);
                let censored = k == 0;
                let p = if censored { 0.5 / n as f64 } else { k as f64 / n as f64 };
                AlphaRow {
                    h,
                    count: k,
                    total: n,
                    alpha: -p.ln(),
                    lo: -phi.ln(),
                    hi: if plo > 0.0 { -plo.ln() } else { f64::INFINITY },
                    censored,
                }
            })
            .collect();
        AlphaTable { beta, rows }
    }

    /// Synthetic table from given values alpha_1, alpha_2, ...
    pub fn from_values(beta: f64, values: &[f64]) -> AlphaTable {
        let rows = values
            .iter()
            .enumerate()
            .map(|(k, &a)| AlphaRow { h: k + 1, count: 0, total: 0, alpha: a, lo: a, hi: a, censored: false })
            .collect();
        AlphaTable { beta, rows }
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.alpha).collect()
    }

    /// OLS slope of alpha_h against h over uncensored rows.
    pub fn slope(&self) -> Option<f64> {
        let rows: Vec<&AlphaRow> = self.rows.iter().filter(|r| !r.censored).collect();
        let xs: Vec<f64> = rows.iter().map(|r| r.h as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
        ols(&xs, &ys).map(|f| f.0)
    }

    /// Pairs (h1, h2) with alpha_{h1} + alpha_{h2} - slack > alpha_{h1+h2},
    /// using the lower CI ends on the left and the upper end on the right.
    pub fn superadditivity_violations(&self, slack: f64) -> Vec<(usize, usize)> {
        let get = |h: usize| self.rows.iter().find(|r| r.h == h && !r.censored);
        let mut v = Vec::new();
        for a in &self.rows {
            for b in &self.rows {
                if a.h > b.h {
                    continue;
                }
                if let (Some(a), Some(b), Some(c)) = (get(a.h), get(b.h), get(a.h + b.h)) {
                    if a.lo + b.lo - slack > c.hi {
                        v.push((a.h, b.h));
                    }
                }
            }
        }
        v
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r).map_err(|e| IsiError::Format(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Samples the unconstrained box and estimates alpha_h for h = 1..=h_max
/// from the pillars over the faces at least two columns from the side.
pub fn alpha_estimate(
    dims: BoxDims,
    beta: f64,
    h_max: usize,
    n_samples: usize,
    sched: Schedule,
    seed: u64,
) -> Result<(AlphaTable, TailTable)> {
    if n_samples == 0 {
        return Err(IsiError::Precondition("no samples".into()));
    }
    let t = sampled_pillar_tail(dims, beta, n_samples, sched, seed, 0, &deep_faces(dims, 2), h_max)?;
    Ok((AlphaTable::from_tail(&t, beta, DEFAULT_LEVEL), t))
}

/// m* = inf{h >= 1 : alpha_h > log s - 2 beta}, with log s given.
pub fn m_star_log(log_s: f64, alpha: &[f64], beta: f64) -> Result<usize> {
    let thr = log_s - 2.0 * beta;
    alpha
        .iter()
        .position(|&a| a > thr)
        .map(|k| k + 1)
        .ok_or_else(|| IsiError::Precondition(format!("alpha table too short: need h > {}", alpha.len())))
}

pub fn m_star(s: f64, alpha: &[f64], beta: f64) -> Result<usize> {
    if s <= 0.0 {
        return Err(IsiError::Precondition("s must be positive".into()));
    }
    m_star_log(s.ln(), alpha, beta)
}

/// gamma = s exp(-alpha_{m*}), with log s given.
pub fn gamma_log(log_s: f64, alpha: &[f64], beta: f64) -> Result<f64> {
    let m = m_star_log(log_s, alpha, beta)?;
    Ok((log_s - alpha[m - 1]).exp())
}

pub fn gamma(s: f64, alpha: &[f64], beta: f64) -> Result<f64> {
    if s <= 0.0 {
        return Err(IsiError::Precondition("s must be positive".into()));
    }
    gamma_log(s.ln(), alpha, beta)
}

/// gamma in (exp(-2 beta - eps), exp(2 beta)).
pub fn gamma_in_band(g: f64, beta: f64, eps: f64) -> bool {
    g > (-2.0 * beta - eps).exp() && g < (2.0 * beta).exp()
}

// ---------------------------------------------------------------------------
// maxima

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxStats {
    pub hc: i32,
    /// Per sample: max height of a face over S, minus hgt(C_W).
    pub m_bar: Vec<i32>,
    /// Per sample: max over x in S of the restricted pillar height.
    pub pillar_max: Vec<i32>,
    /// Samples where the two agree.
    pub agree: usize,
    /// Empirical P(M_bar <= h) for h = 0..=max.
    pub cdf: Vec<f64>,
    /// Fit of log(-log P(M_bar < h)) against h: (slope, intercept, r^2).
    pub gumbel_fit: Option<(f64, f64, f64)>,
}

impl MaxStats {
    pub fn mean(&self) -> f64 {
        self.m_bar.iter().map(|&v| v as f64).sum::<f64>() / self.m_bar.len().max(1) as f64
    }

    pub fn identity_holds(&self) -> bool {
        self.agree == self.m_bar.len()
    }
}

/// Max face height over S and max pillar height of one restricted sample.
pub fn sample_max(k: &Interface, region: &Region) -> Result<(i32, i32)> {
    let m = k
        .faces
        .iter()
        .filter(|f| f.is_horizontal() && region.contains(**f))
        .map(|f| f.z / 2)
        .max()
        .unwrap_or(0)
        .max(0);
    let xs: Vec<Coord> = region.faces.iter().copied().collect();
    let s = k.spins_of()?;
    let p = pillar_heights(&s, &xs, 0).into_iter().max().unwrap_or(0);
    Ok((m, p))
}

pub fn max_stats(samples: &[Interface], frame: &Frame) -> Result<MaxStats> {
    let mut m_bar = Vec::with_capacity(samples.len());
    let mut pillar_max = Vec::with_capacity(samples.len());
    for i in samples {
        let k = frame.restrict(i)?;
        let (m, p) = sample_max(&k, &frame.region)?;
        m_bar.push(m);
        pillar_max.push(p);
    }
    Ok(max_stats_from(frame.hc, m_bar, pillar_max))
}

pub fn max_stats_from(hc: i32, m_bar: Vec<i32>, pillar_max: Vec<i32>) -> MaxStats {
    let agree = m_bar.iter().zip(&pillar_max).filter(|(a, b)| a == b).count();
    let top = m_bar.iter().copied().max().unwrap_or(0).max(0) as usize;
    let n = m_bar.len().max(1) as f64;
    let cdf: Vec<f64> =
        (0..=top).map(|h| m_bar.iter().filter(|&&v| v <= h as i32).count() as f64 / n).collect();
    // P(M < h) = cdf[h-1]
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for h in 1..=top {
        let p = cdf[h - 1];
        if p > 0.0 && p < 1.0 {
            xs.push(h as f64);
            ys.push((-p.ln()).ln());
        }
    }
    MaxStats { hc, m_bar, pillar_max, agree, cdf, gumbel_fit: ols(&xs, &ys) }
}

/// Excess of the nested sequence of x in a restricted sample.
pub fn nested_excess(k: &Interface, x: Coord) -> Result<i64> {
    let dec = decompose(k)?;
    Ok(dec.nested_sequence(x).iter().map(|&w| dec.walls[w].excess()).sum())
}

/// Empirical P(m(nested sequence of x) >= r), r = 0..=r_max.
pub fn nested_excess_tail(samples: &[Interface], x: Coord, frame: &Frame, r_max: usize) -> Result<TailTable> {
    let mut t = TailTable::new(r_max);
    for i in samples {
        let k = frame.restrict(i)?;
        t.add(nested_excess(&k, x)?);
    }
    Ok(t)
}

/// Frequency of the event that every x in S has m(nested sequence) < r.
pub fn generic_event_frequency(samples: &[Interface], frame: &Frame, r: i64) -> Result<f64> {
    if samples.is_empty() {
        return Err(IsiError::Precondition("no samples".into()));
    }
    let mut hit = 0usize;
    for i in samples {
        let k = frame.restrict(i)?;
        let dec = decompose(&k)?;
        let ok = frame.region.faces.iter().all(|&x| {
            dec.nested_sequence(x).iter().map(|&w| dec.walls[w].excess()).sum::<i64>() < r
        });
        hit += ok as usize;
    }
    Ok(hit as f64 / samples.len() as f64)
}

/// |boundary S| <= |S|^((d-1)/d), compared in logs with a 1e-12 guard.
pub fn isodim_check(s: &Region, d: f64) -> bool {
    let a = s.len() as f64;
    let b = s.boundary_len() as f64;
    if a == 0.0 {
        return true;
    }
    b.ln() <= (d - 1.0) / d * a.ln() + 1e-12
}

// ---------------------------------------------------------------------------
// output

/// Provenance attached to every emitted record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub dims: BoxDims,
    pub beta: f64,
    pub constraint_hash: String,
    pub config_hash: String,
}

/// Hex SHA-256 of any serializable value.
pub fn hash_json<T: Serialize>(v: &T) -> String {
    let bytes = serde_json::to_vec(v).expect("serializable");
    format!("{:x}", Sha256::digest(&bytes))
}

impl Provenance {
    pub fn new<C: Serialize>(seed: u64, dims: BoxDims, beta: f64, frame: &Frame, config: &C) -> Provenance {
        Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            dims,
            beta,
            constraint_hash: hash_json(&frame.walls.to_json(Some(&frame.region))),
            config_hash: hash_json(config),
        }
    }
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    estimator: &'a str,
    provenance: &'a Provenance,
    result: &'a T,
}

/// One JSON line per estimator result.
pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, estimator: &str, prov: &Provenance, result: &T) -> Result<()> {
    serde_json::to_writer(&mut w, &Record { estimator, provenance: prov, result })?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pillars::Pillar;
    use crate::spins::enumerate_exact;

    #[test]
    fn wilson_matches_closed_form() {
        // k = 0: upper end z^2 / (n + z^2)
        let z = z_value(0.95);
        assert!((z - 1.959963984540054).abs() < 1e-9);
        let (lo, hi) = wilson(0, 100, z);
        assert_eq!(lo, 0.0);
        assert!((hi - z * z / (100.0 + z * z)).abs() < 1e-12);
    }

    #[test]
    fn batch_means_by_hand() {
        // blocks [1, 3] and [5, 7]: means 2 and 6, s.e. 2; t(1) at 97.5% = 12.7062
        let (m, lo, hi) = batch_means(&[1.0, 3.0, 5.0, 7.0, 100.0], 2, 0.95).unwrap();
        assert_eq!(m, 4.0);
        assert!((hi - m - 2.0 * 12.706204736).abs() < 1e-6, "{hi}");
        assert!((m - lo - (hi - m)).abs() < 1e-12);
        let (m, lo, hi) = batch_means(&[0.0, 1.0, 0.0, 1.0], 2, 0.95).unwrap();
        assert_eq!((m, lo, hi), (0.5, 0.5, 0.5));
        assert!(batch_means(&[1.0], 2, 0.95).is_none());
    }

    #[test]
    fn quarter_reaching_one() {
        let mut t = TailTable::new(3);
        for v in [1, 0, 0, 0, 1, 0, 0, 0] {
            t.add(v);
        }
        assert_eq!(t.p(1), 0.25);
        assert_eq!(t.p(0), 1.0);
        assert_eq!(t.p(2), 0.0);
    }

    #[test]
    fn merge_is_order_free() {
        let mut a = TailTable::new(4);
        let mut b = TailTable::new(4);
        for v in [0, 3, 1] {
            a.add(v);
        }
        for v in [2, 9, -1] {
            b.add(v);
        }
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.total, 6);
        assert_eq!(ab.counts, vec![5, 4, 3, 2, 1]);
    }

    #[test]
    fn synthetic_m_star_and_gamma() {
        let alpha: Vec<f64> = (1..=6).map(|h| 4.0 * h as f64).collect();
        assert_eq!(m_star_log(10.0, &alpha, 1.0).unwrap(), 3);
        assert_eq!(gamma_log(10.0, &alpha, 1.0).unwrap(), (-2.0f64).exp());
        assert!(gamma_in_band((-2.0f64).exp(), 1.0, 0.1));
        // larger s never lowers m*
        let mut last = 0;
        for k in 0..40 {
            let m = m_star_log(2.0 + 0.5 * k as f64, &alpha, 1.0).unwrap();
            assert!(m >= last);
            last = m;
        }
        assert!(m_star_log(40.0, &alpha, 1.0).is_err());
    }

    #[test]
    fn isodim_examples() {
        let sq = |k: i32| Region::new((0..k).flat_map(|i| (0..k).map(move |j| c3(2 * i + 1, 2 * j + 1, 0))));
        assert!(isodim_check(&sq(100), 3.0));
        assert!(!isodim_check(&sq(10), 2.0));
        assert!(!isodim_check(&sq(1), 2.0));
        assert!(!isodim_check(&sq(1), 2.1));
    }

    #[test]
    fn exact_alpha_one() {
        // P(origin cell plus) from the enumeration against a direct sum
        let d = BoxDims::new(1, 1, 3);
        let m = enumerate_exact(d, 0.7).unwrap();
        let x = c3(1, 1, 0);
        let via_pillar = m.expect(|s| (pillar_heights(s, &[x], 0)[0] >= 1) as u8 as f64);
        let k = d.cell_index(c3(1, 1, 1));
        let direct: f64 = m.probs.iter().enumerate().filter(|(mask, _)| mask >> k & 1 == 1).map(|(_, p)| p).sum();
        assert!((via_pillar.ln() - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn pillar_heights_match_flood_fill() {
        let d = BoxDims::new(3, 3, 4);
        let mut s = SpinConfig::ground(d);
        for c in [c3(1, 1, 1), c3(3, 3, 3), c3(3, 3, 5), c3(-3, 1, 1)] {
            s.set(c, 1).unwrap();
        }
        let xs = d.base_faces();
        let hs = pillar_heights(&s, &xs, 0);
        for (x, h) in xs.iter().zip(hs) {
            assert_eq!(h, Pillar::from_spins(&s, *x, 0).hgt());
        }
    }

    #[test]
    fn flat_max_is_zero() {
        let d = BoxDims::new(3, 3, 3);
        let f = Frame::whole(d);
        let ms = max_stats(&[Interface::flat(d), Interface::flat(d)], &f).unwrap();
        assert_eq!(ms.m_bar, vec![0, 0]);
        assert!(ms.identity_holds());
        assert_eq!(ms.cdf, vec![1.0]);
        let t = nested_excess_tail(&[Interface::flat(d)], c3(1, 1, 0), &f, 3).unwrap();
        assert_eq!(t.counts, vec![1, 0, 0, 0]);
    }
}
