//! Interpretability suggestions: dominant properties, strategies, models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::recommend::retrieval::RankedModel;
use crate::recommend::strategy::StrategyMap;
use crate::store::{Dimension, ModelSummary, PropertyVector};

/// Models listed in each preference section.
pub const LISTED_MODELS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyShare {
    pub dimension: Dimension,
    pub bin: u8,
    pub description: String,
    pub interval: String,
    pub percentage: f64,
}

impl PropertyShare {
    pub fn text(&self) -> String {
        let plain = matches!(
            self.dimension,
            Dimension::Stationarity | Dimension::SeasonCount | Dimension::Scedasticity
        );
        if plain {
            format!("{:.2}% {}", self.percentage, self.description)
        } else {
            format!(
                "{:.2}% {} with value of {}",
                self.percentage, self.description, self.interval
            )
        }
    }
}

/// Query-conditioned mean MAE against the model's mean over all stored
/// series; `improvement = (regular - query) / regular`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelShift {
    pub model: String,
    pub query_mae: f64,
    pub regular_mae: f64,
    pub improvement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub top_properties: Vec<PropertyShare>,
    pub property_notes: Vec<String>,
    pub strategies_adopt: Vec<String>,
    pub strategies_avoid: Vec<String>,
    pub preferred_models: Option<Vec<ModelShift>>,
    pub unsuitable_models: Option<Vec<ModelShift>>,
    pub notices: Vec<String>,
}

/// Most frequent bin of every dimension, by descending share.
pub fn top_properties(vectors: &[PropertyVector]) -> Vec<PropertyShare> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = vectors.len() as f64;
    let mut out: Vec<PropertyShare> = Dimension::ALL
        .iter()
        .map(|&d| {
            let mut counts = [0usize; 4];
            for v in vectors {
                counts[v.get(d) as usize] += 1;
            }
            let (bin, c) =
                counts.iter().enumerate().fold(
                    (0, 0),
                    |best, (b, &c)| if c > best.1 { (b, c) } else { best },
                );
            PropertyShare {
                dimension: d,
                bin: bin as u8,
                description: d.describe(bin as u8),
                interval: d.label(bin as u8).to_string(),
                percentage: 100.0 * c as f64 / n,
            }
        })
        .collect();
    out.sort_by(|a, b| b.percentage.total_cmp(&a.percentage));
    out
}

pub fn interpret(
    vectors: &[PropertyVector],
    ranking: &[RankedModel],
    regular: Option<&BTreeMap<String, ModelSummary>>,
    map: &StrategyMap,
) -> Interpretation {
    let top = top_properties(vectors);
    let mut adopt: Vec<String> = Vec::new();
    let mut avoid: Vec<String> = Vec::new();
    let mut notes = Vec::new();
    for p in &top {
        for e in map.matching(p.dimension, p.bin) {
            if let Some(n) = &e.note {
                notes.push(format!("{}: {n}", e.granularity));
            }
            for s in &e.adopt {
                if !adopt.contains(s) {
                    adopt.push(s.clone());
                }
            }
            for s in &e.avoid {
                if !avoid.contains(s) {
                    avoid.push(s.clone());
                }
            }
        }
    }
    // a strategy recommended by any dominant property is not also discouraged
    let adopted: BTreeSet<&String> = adopt.iter().collect();
    avoid.retain(|s| !adopted.contains(s));
    let mut notices = Vec::new();
    let (preferred, unsuitable) = match regular.filter(|r| !r.is_empty()) {
        None => {
            notices
                .push("no regular table available; model preference section omitted".to_string());
            (None, None)
        }
        Some(reg) => {
            let mut shifts: Vec<ModelShift> = ranking
                .iter()
                .filter_map(|r| {
                    let base = reg.get(&r.model)?.mean_mae;
                    (base > 0.0).then(|| ModelShift {
                        model: r.model.clone(),
                        query_mae: r.mean_mae,
                        regular_mae: base,
                        improvement: (base - r.mean_mae) / base,
                    })
                })
                .collect();
            shifts.sort_by(|a, b| {
                b.improvement
                    .total_cmp(&a.improvement)
                    .then_with(|| a.model.cmp(&b.model))
            });
            // half of the models each, so small universes do not list everything twice
            let listed = LISTED_MODELS.min(shifts.len().div_ceil(2));
            let preferred: Vec<ModelShift> = shifts.iter().take(listed).cloned().collect();
            let unsuitable: Vec<ModelShift> = shifts.iter().rev().take(listed).cloned().collect();
            (Some(preferred), Some(unsuitable))
        }
    };
    Interpretation {
        top_properties: top,
        property_notes: notes,
        strategies_adopt: adopt,
        strategies_avoid: avoid,
        preferred_models: preferred,
        unsuitable_models: unsuitable,
        notices,
    }
}
