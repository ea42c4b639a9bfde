use super::LossTerms;
use crate::problems::ErrorMetrics;
use serde::{Deserialize, Serialize};

/// One training-curve sample. Serialized as JSON-lines with fixed keys
/// (`epoch`, `loss_ic`, `loss_pde`, `loss_bc`, `loss_total`, `lr`,
/// `rel_l2`, `max_abs`); metric arrays hold one entry per output field and
/// are null when metrics were not computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub epoch: usize,
    pub loss_ic: f64,
    pub loss_pde: f64,
    pub loss_bc: f64,
    pub loss_total: f64,
    pub lr: f64,
    pub rel_l2: Option<Vec<f64>>,
    pub max_abs: Option<Vec<f64>>,
}

impl TrainRecord {
    pub fn new(
        epoch: usize,
        terms: &LossTerms,
        total: f64,
        lr: f64,
        metrics: Option<Vec<ErrorMetrics>>,
    ) -> Self {
        TrainRecord {
            epoch,
            loss_ic: terms.ic,
            loss_pde: terms.pde,
            loss_bc: terms.bc,
            loss_total: total,
            lr,
            rel_l2: metrics.as_ref().map(|m| m.iter().map(|e| e.rel_l2).collect()),
            max_abs: metrics.map(|m| m.iter().map(|e| e.max_abs).collect()),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization")
    }
}
