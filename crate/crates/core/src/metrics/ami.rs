//! Mutual information between partitions, adjusted for chance under the
//! hypergeometric (permutation) model.

use crate::error::Result;
use crate::partition::{contingency, ContingencyTable, Partition};

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0f64; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

fn entropy(sizes: &[usize], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total() as f64;
    let mut mi = 0.0;
    for i in 0..t.rows() {
        let a = t.row_sizes()[i] as f64;
        for (j, &c) in t.row(i).iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (n * c / (a * t.col_sizes()[j] as f64)).ln();
            }
        }
    }
    mi
}

/// `E[MI]` over all contingency tables with the same margins.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total();
    let lf = ln_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in t.row_sizes().iter().filter(|&&a| a > 0) {
        for &b in t.col_sizes().iter().filter(|&&b| b > 0) {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n];
            for nij in lo..=hi {
                let ln_p = fixed - lf[nij] - lf[a - nij] - lf[b - nij] - lf[n + nij - a - b];
                let x = nij as f64;
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * ln_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with max-entropy normalization.
///
/// When the normalizer vanishes (both partitions trivial) the score is 1 for
/// equal groupings and 0 otherwise.
pub fn ami(p: &Partition, q: &Partition) -> Result<f64> {
    let t = contingency(p, q)?;
    let n = t.total() as f64;
    let mi = mutual_information(&t);
    let emi = expected_mutual_information(&t);
    let h = entropy(t.row_sizes(), n).max(entropy(t.col_sizes(), n));
    let denom = h - emi;
    if denom.abs() < 1e-12 {
        return Ok(if p.same_grouping(q) { 1.0 } else { 0.0 });
    }
    Ok((mi - emi) / denom)
}
