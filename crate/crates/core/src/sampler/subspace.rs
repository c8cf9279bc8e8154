//! Exact distributions restricted to a fixed click count.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::graph::for_each_k_subset;
use crate::gstate::CovarianceState;
use crate::rng::SimRng;

use super::detect::{threshold_distribution, ClickPattern};

/// Largest mode count for exact subspace enumeration.
pub const MAX_ENUMERATION_MODES: usize = 14;

/// Every k-click pattern with its absolute probability.
#[derive(Clone, Debug)]
pub struct SubspaceDistribution {
    k: usize,
    patterns: Vec<ClickPattern>,
    probabilities: Vec<f64>,
    norm: f64,
}

impl SubspaceDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Patterns in lexicographic order of their sorted mode lists.
    pub fn patterns(&self) -> &[ClickPattern] {
        &self.patterns
    }

    /// Absolute probabilities, summing to [`norm`](Self::norm).
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Total probability of `k` clicks.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Probabilities conditioned on `k` clicks.
    pub fn weights(&self) -> Vec<f64> {
        self.probabilities.iter().map(|p| p / self.norm).collect()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// `sum_pattern w(pattern) f(pattern)` over the conditioned weights.
    pub fn expectation(&self, mut f: impl FnMut(&ClickPattern) -> f64) -> f64 {
        self.patterns
            .iter()
            .zip(&self.probabilities)
            .map(|(p, w)| w * f(p))
            .sum::<f64>()
            / self.norm
    }

    /// CSV with columns `pattern,probability`; probabilities are conditioned on `k` clicks.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "pattern,probability")?;
        for (p, w) in self.patterns.iter().zip(self.weights()) {
            writeln!(out, "{p},{}", crate::harness::format_number(w))?;
        }
        Ok(())
    }
}

/// Exact probabilities of all `k`-click patterns.
pub fn enumerate_subspace(state: &CovarianceState, k: usize) -> Result<SubspaceDistribution> {
    let n = state.spatial_modes();
    if n > MAX_ENUMERATION_MODES {
        return Err(Error::Capacity(format!(
            "exact enumeration is limited to {MAX_ENUMERATION_MODES} modes, got {n}; use chain sampling"
        )));
    }
    if k > n {
        return Err(Error::Parameter(format!("{k} clicks requested on {n} modes")));
    }
    let table = threshold_distribution(state)?;
    let mut patterns = Vec::new();
    let mut probabilities = Vec::new();
    for_each_k_subset(n, k, |bits| {
        patterns.push(ClickPattern::new(bits, n).expect("subset within width"));
        probabilities.push(table[bits as usize]);
    });
    let norm = probabilities.iter().sum();
    Ok(SubspaceDistribution {
        k,
        patterns,
        probabilities,
        norm,
    })
}

/// Independent draws from the distribution conditioned on `k` clicks.
pub fn sample_subspace(
    dist: &SubspaceDistribution,
    rng: &mut SimRng,
    count: usize,
) -> Result<Vec<ClickPattern>> {
    if dist.is_empty() || !(dist.norm > 0.0) {
        return Err(Error::EmptyDistribution(format!(
            "the {}-click subspace carries no probability",
            dist.k
        )));
    }
    let index = WeightedIndex::new(&dist.probabilities)
        .map_err(|e| Error::EmptyDistribution(e.to_string()))?;
    Ok((0..count).map(|_| dist.patterns[index.sample(rng)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi_seeded;
    use crate::gstate::{apply_uniform_loss, embed_graph, scaling_bound};
    use crate::rng::seeded;

    fn manual(k: usize, patterns: Vec<ClickPattern>, probabilities: Vec<f64>) -> SubspaceDistribution {
        let norm = probabilities.iter().sum();
        SubspaceDistribution {
            k,
            patterns,
            probabilities,
            norm,
        }
    }

    #[test]
    fn vacuum_has_single_empty_pattern() {
        let d = enumerate_subspace(&CovarianceState::vacuum(5, 1).unwrap(), 0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.norm() - 1.0).abs() < 1e-15);
        assert_eq!(d.patterns()[0].bits(), 0);
        let none = enumerate_subspace(&CovarianceState::vacuum(5, 1).unwrap(), 2).unwrap();
        assert!(matches!(sample_subspace(&none, &mut seeded(1), 3), Err(Error::EmptyDistribution(_))));
    }

    #[test]
    fn masses_sum_to_one_and_order_is_lexicographic() {
        let g = erdos_renyi_seeded(6, 0.5, 8).unwrap();
        let s = embed_graph(&g, 0.8 * scaling_bound(&g)).unwrap();
        let total: f64 = (0..=6).map(|k| enumerate_subspace(&s, k).unwrap().norm()).sum();
        assert!((total - 1.0).abs() < 1e-8);
        let d = enumerate_subspace(&s, 2).unwrap();
        let first: Vec<Vec<usize>> = d.patterns()[..3].iter().map(|p| p.modes()).collect();
        assert_eq!(first, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        assert_eq!(d.len(), 15);
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_guard() {
        let vac = CovarianceState::vacuum(15, 1).unwrap();
        assert!(matches!(enumerate_subspace(&vac, 3), Err(Error::Capacity(_))));
    }

    #[test]
    fn sampling_examples() {
        let one = manual(1, vec![ClickPattern::new(0b10, 3).unwrap()], vec![0.2]);
        assert!(sample_subspace(&one, &mut seeded(4), 50)
            .unwrap()
            .iter()
            .all(|p| p.bits() == 0b10));
        let two = manual(
            1,
            vec![ClickPattern::new(0b01, 2).unwrap(), ClickPattern::new(0b10, 2).unwrap()],
            vec![0.3, 0.3],
        );
        let draws = sample_subspace(&two, &mut seeded(5), 100_000).unwrap();
        let freq = draws.iter().filter(|p| p.bits() == 0b01).count() as f64 / 1e5;
        assert!((freq - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampled_frequencies_match_probabilities() {
        let g = erdos_renyi_seeded(10, 0.4, 6).unwrap();
        let s = apply_uniform_loss(&embed_graph(&g, 0.9 * scaling_bound(&g)).unwrap(), 0.2).unwrap();
        let d = enumerate_subspace(&s, 3).unwrap();
        let draws = 100_000;
        let samples = sample_subspace(&d, &mut seeded(7), draws).unwrap();
        let mut counts = std::collections::HashMap::new();
        for p in samples {
            *counts.entry(p.bits()).or_insert(0usize) += 1;
        }
        // per-pattern 5 sigma, plus Pearson chi-square within 5 sigma of its mean
        let mut chi2 = 0.0;
        for (p, w) in d.patterns().iter().zip(d.weights()) {
            let observed = *counts.get(&p.bits()).unwrap_or(&0) as f64;
            let expect = w * draws as f64;
            let sd = (draws as f64 * w * (1.0 - w)).sqrt();
            assert!((observed - expect).abs() <= 5.0 * sd + 1.0, "{p}: {observed} vs {expect}");
            if expect > 0.0 {
                chi2 += (observed - expect).powi(2) / expect;
            }
        }
        let dof = (d.len() - 1) as f64;
        assert!(chi2 < dof + 5.0 * (2.0 * dof).sqrt(), "chi2 {chi2} on {dof} dof");
    }

    #[test]
    fn csv_export() {
        let d = manual(1, vec![ClickPattern::new(0b01, 2).unwrap(), ClickPattern::new(0b10, 2).unwrap()], vec![0.1, 0.3]);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "pattern,probability\n10,0.25\n01,0.75\n");
    }
}
