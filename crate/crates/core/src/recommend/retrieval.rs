//! Nearest-key lookup, bag sampling and model ranking.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{summarize, Bag, PropertyVector, Store};

/// Exact key if stored, else the L1-nearest key; ties go to the
/// lexicographically smallest key. Returns the key and its distance.
pub fn nearest_key(store: &Store, q: &PropertyVector) -> Result<(PropertyVector, u32)> {
    if store.index.is_empty() {
        return Err(Error::EmptyStore);
    }
    if store.index.contains_key(q) {
        return Ok((*q, 0));
    }
    let mut best: Option<(PropertyVector, u32)> = None;
    // keys iterate in ascending order, so strict `<` keeps the smallest tie
    for k in store.index.keys() {
        let d = k.l1(q);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((*k, d));
        }
    }
    Ok(best.expect("index is nonempty"))
}

/// Number of bags drawn for a group: `ceil(tau * weight)`, at least 1.
pub fn draw_count(tau: f64, weight: usize) -> usize {
    ((tau * weight as f64 - 1e-9).ceil() as usize).max(1)
}

/// `count` bags drawn uniformly with replacement from the key's bags.
pub fn sample_values<'s, R: Rng + ?Sized>(
    store: &'s Store,
    key: &PropertyVector,
    count: usize,
    rng: &mut R,
) -> Result<Vec<&'s Bag>> {
    let bags = store
        .index
        .get(key)
        .ok_or_else(|| Error::param("key", format!("{key} is not in the store")))?;
    Ok((0..count)
        .map(|_| &bags[rng.random_range(0..bags.len())])
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    pub model: String,
    pub mean_mae: f64,
    pub mean_mse: f64,
    /// Measurements averaged.
    pub count: usize,
}

/// Per-model means over all measurements in the bags, ascending by mean
/// MAE, then mean MSE, then name.
pub fn rank_models<'a>(bags: impl IntoIterator<Item = &'a Bag>) -> Vec<RankedModel> {
    let summary = summarize(bags.into_iter().flat_map(|b| b.records.iter()));
    let mut out: Vec<RankedModel> = summary
        .into_iter()
        .map(|(model, s)| RankedModel {
            model,
            mean_mae: s.mean_mae,
            mean_mse: s.mean_mse,
            count: s.count,
        })
        .collect();
    out.sort_by(|a, b| {
        a.mean_mae
            .total_cmp(&b.mean_mae)
            .then(a.mean_mse.total_cmp(&b.mean_mse))
            .then_with(|| a.model.cmp(&b.model))
    });
    out
}

pub fn model_names(ranking: &[RankedModel]) -> Vec<String> {
    ranking.iter().map(|r| r.model.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::PerfRecord;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeMap, BTreeSet};

    fn v(c: [u8; 8]) -> PropertyVector {
        PropertyVector::from_components(c).unwrap()
    }

    fn bag(id: &str, recs: &[(&str, f64, f64)]) -> Bag {
        Bag {
            series_id: id.into(),
            records: recs
                .iter()
                .map(|&(m, a, s)| PerfRecord {
                    model: m.into(),
                    mae: a,
                    mse: s,
                })
                .collect(),
        }
    }

    fn store_with(keys: &[PropertyVector]) -> Store {
        Store {
            config_hash: String::new(),
            model_universe: BTreeSet::from(["m".to_string()]),
            index: keys
                .iter()
                .map(|k| (*k, vec![bag(&k.to_string(), &[("m", 1.0, 1.0)])]))
                .collect(),
            excluded_stationary: 0,
            regular: BTreeMap::new(),
        }
    }

    fn random_vector(rng: &mut ChaCha8Rng) -> PropertyVector {
        let card = [2u8, 4, 4, 3, 4, 4, 2, 4];
        let mut c = [0u8; 8];
        for (x, m) in c.iter_mut().zip(card) {
            *x = rng.random_range(0..m);
        }
        v(c)
    }

    #[test]
    fn exact_and_nearest() {
        let a = v([0; 8]);
        let b = v([1, 3, 3, 2, 3, 3, 1, 3]);
        let st = store_with(&[a, b]);
        assert_eq!(nearest_key(&st, &b).unwrap(), (b, 0));
        assert_eq!(
            nearest_key(&st, &v([1, 0, 0, 0, 0, 0, 0, 0])).unwrap(),
            (a, 1)
        );
        assert!(matches!(
            nearest_key(&store_with(&[]), &a),
            Err(Error::EmptyStore)
        ));
    }

    #[test]
    fn matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let keys: Vec<PropertyVector> = (0..500).map(|_| random_vector(&mut rng)).collect();
        let st = store_with(&keys);
        for _ in 0..1000 {
            let q = random_vector(&mut rng);
            let mut all: Vec<(u32, PropertyVector)> =
                st.index.keys().map(|k| (k.l1(&q), *k)).collect();
            all.sort();
            assert_eq!(nearest_key(&st, &q).unwrap(), (all[0].1, all[0].0));
        }
    }

    #[test]
    fn draw_counts() {
        assert_eq!(draw_count(1.0, 5), 5);
        assert_eq!(draw_count(0.1, 10), 1);
        assert_eq!(draw_count(0.01, 10), 1);
        assert_eq!(draw_count(0.3, 10), 3);
        assert_eq!(draw_count(0.5, 7), 4);
    }

    #[test]
    fn single_bag_repeats() {
        let k = v([1, 0, 0, 0, 0, 0, 0, 0]);
        let st = store_with(&[k]);
        let drawn = sample_values(&st, &k, 5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(drawn.len(), 5);
        assert!(drawn.iter().all(|b| std::ptr::eq(*b, &st.index[&k][0])));
    }

    #[test]
    fn uniform_over_bags() {
        let k = v([1, 0, 0, 0, 0, 0, 0, 0]);
        let mut st = store_with(&[k]);
        st.index.insert(
            k,
            (0..4)
                .map(|i| bag(&i.to_string(), &[("m", 1.0, 1.0)]))
                .collect(),
        );
        let drawn = sample_values(&st, &k, 10_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for i in 0..4 {
            let f = drawn
                .iter()
                .filter(|b| b.series_id == i.to_string())
                .count() as f64
                / 1e4;
            assert!((f - 0.25).abs() < 0.02, "{f}");
        }
        let again = sample_values(&st, &k, 10, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(
            again.iter().map(|b| &b.series_id).collect::<Vec<_>>(),
            drawn[..10].iter().map(|b| &b.series_id).collect::<Vec<_>>()
        );
    }

    #[test]
    fn tie_rule() {
        let bags = [
            bag("1", &[("A", 0.1, 0.5), ("B", 0.2, 0.1)]),
            bag("2", &[("A", 0.3, 0.5)]),
        ];
        let r = rank_models(&bags);
        assert_eq!(model_names(&r), ["B", "A"]);
        assert!((r[1].mean_mae - 0.2).abs() < 1e-15);
        let single = rank_models(&[bag("x", &[("Z", 1.0, 1.0)])]);
        assert_eq!(single[0].model, "Z");
        let tie = rank_models(&[bag("1", &[("B", 0.2, 0.1), ("A", 0.2, 0.1)])]);
        assert_eq!(model_names(&tie), ["A", "B"]);
    }

    #[test]
    fn matches_brute_force_ranking() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let models: Vec<String> = (0..8).map(|i| format!("M{i}")).collect();
        let mut bags: Vec<Bag> = Vec::new();
        for i in 0..50 {
            let mut records = Vec::new();
            for m in &models {
                if rng.random_bool(0.8) {
                    records.push(PerfRecord {
                        model: m.clone(),
                        mae: rng.random_range(0.0..1.0),
                        mse: rng.random_range(0.0..1.0),
                    });
                }
            }
            bags.push(Bag {
                series_id: i.to_string(),
                records,
            });
        }
        let r = rank_models(&bags);
        let mut oracle: Vec<(f64, f64, String, usize)> = Vec::new();
        for m in &models {
            let recs: Vec<&PerfRecord> = bags
                .iter()
                .flat_map(|b| &b.records)
                .filter(|r| &r.model == m)
                .collect();
            if recs.is_empty() {
                continue;
            }
            let mut maes: Vec<f64> = recs.iter().map(|r| r.mae).collect();
            let mut mses: Vec<f64> = recs.iter().map(|r| r.mse).collect();
            maes.sort_by(f64::total_cmp);
            mses.sort_by(f64::total_cmp);
            let n = recs.len() as f64;
            oracle.push((
                maes.iter().sum::<f64>() / n,
                mses.iter().sum::<f64>() / n,
                m.clone(),
                recs.len(),
            ));
        }
        oracle.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        assert_eq!(r.len(), oracle.len());
        for (x, o) in r.iter().zip(&oracle) {
            assert_eq!(
                (x.mean_mae, x.mean_mse, &x.model, x.count),
                (o.0, o.1, &o.2, o.3)
            );
        }
    }

    proptest! {
        #[test]
        fn ranking_ignores_bag_order(seed in 0u64..1000, perm in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bags: Vec<Bag> = (0..12)
                .map(|i| bag(&i.to_string(), &[("A", rng.random_range(0.0..1.0), 0.1), ("B", rng.random_range(0.0..1.0), 0.2)]))
                .collect();
            let shuffled: Vec<&Bag> = perm.iter().map(|&i| &bags[i]).collect();
            prop_assert_eq!(rank_models(&bags), rank_models(shuffled));
        }
    }
}
