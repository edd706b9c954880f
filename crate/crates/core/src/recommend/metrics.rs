//! Ranking agreement metrics.

/// Cut-off actually used: `k` truncated to the shorter list.
fn effective_k<S>(recommended: &[S], truth: &[S], k: usize) -> usize {
    k.min(recommended.len()).min(truth.len())
}

/// `|top-k(recommended) ∩ top-k(truth)| / k`.
pub fn hit_ratio_at_k<S: AsRef<str>>(recommended: &[S], truth: &[S], k: usize) -> f64 {
    let k = effective_k(recommended, truth, k);
    if k == 0 {
        return 0.0;
    }
    let t: Vec<&str> = truth[..k].iter().map(AsRef::as_ref).collect();
    let hits = recommended[..k]
        .iter()
        .filter(|m| t.contains(&m.as_ref()))
        .count();
    hits as f64 / k as f64
}

/// NDCG with graded relevance `k - rank` for the truth's top-k (rank from 0).
pub fn ndcg_at_k<S: AsRef<str>>(recommended: &[S], truth: &[S], k: usize) -> f64 {
    let k = effective_k(recommended, truth, k);
    if k == 0 {
        return 0.0;
    }
    let rel = |m: &str| -> f64 {
        truth[..k]
            .iter()
            .position(|t| t.as_ref() == m)
            .map_or(0.0, |r| (k - r) as f64)
    };
    let discount = |i: usize| ((i + 2) as f64).log2();
    let dcg: f64 = recommended[..k]
        .iter()
        .enumerate()
        .map(|(i, m)| rel(m.as_ref()) / discount(i))
        .sum();
    let idcg: f64 = (0..k).map(|i| (k - i) as f64 / discount(i)).sum();
    dcg / idcg
}
