//! Privacy and cost metrics for padding schemes on length distributions.
//!
//! For a length distribution `U` (a [`FrequencyTable`]) and a padding scheme
//! `s`, the padded-length observable `P` is fully determined by the scheme's
//! exact output-length distributions, so every metric here is computed in
//! closed form — no sampling.
//!
//! * `alpha1` — conditional entropy `H(U|P)` in bits: the attacker's residual
//!   uncertainty about the unpadded length after seeing the padded length.
//! * `alpha2` — k-anonymity: the minimum, over observable padded lengths, of
//!   the number of persons who could have produced that observation.
//! * `beta` — bandwidth expansion: expected padded length over expected
//!   unpadded length, weighted by person counts.
//! * `delta` — Euclidean distance from `(beta, alpha1)` to the ideal corner
//!   `(0, H(U))`; lower is better.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freqdist::FrequencyTable;
use crate::padding::{PadError, SchemeInstance};

/// Errors from pairing a scheme with a dataset.
#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dataset `{dataset}` has no entries")]
    EmptyTable { dataset: String },
    #[error("scheme `{scheme}` rejects length {length} in dataset `{dataset}`: {source}")]
    SchemeInapplicable {
        scheme: String,
        dataset: String,
        length: u32,
        source: PadError,
    },
}

/// Exact joint probability mass over (unpadded length, padded length) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    mass: BTreeMap<(u32, u32), f64>,
}

impl JointDistribution {
    /// ((u, p), probability) entries in lexicographic (u, p) order.
    pub fn mass(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.mass.iter().map(|(&k, &v)| (k, v))
    }

    pub fn probability_of(&self, u: u32, p: u32) -> f64 {
        self.mass.get(&(u, p)).copied().unwrap_or(0.0)
    }

    /// Marginal distribution of the padded length P.
    pub fn marginal_padded(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (&(_, p), &m) in &self.mass {
            *out.entry(p).or_insert(0.0) += m;
        }
        out
    }

    /// Marginal distribution of the unpadded length U.
    pub fn marginal_unpadded(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (&(u, _), &m) in &self.mass {
            *out.entry(u).or_insert(0.0) += m;
        }
        out
    }
}

/// One scheme evaluated on one dataset.
///
/// `h_u` is the dataset entropy `H(U)`, the ceiling for `alpha1` and the
/// reference line in the scatter reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub dataset: String,
    pub scheme: SchemeInstance,
    pub alpha1: f64,
    pub alpha2: u64,
    pub beta: f64,
    pub delta: f64,
    #[serde(rename = "hU")]
    pub h_u: f64,
}

/// Builds the exact joint mass of (U, P) for `scheme` on `table`.
///
/// Errors when the scheme rejects some dataset length (e.g. a `taBlk` upper
/// band below the dataset maximum); the error names the offending length.
pub fn joint(
    table: &FrequencyTable,
    scheme: &SchemeInstance,
) -> Result<JointDistribution, MetricsError> {
    let population = nonzero_population(table)?;
    let mut mass = BTreeMap::new();
    for (u, count) in table.iter() {
        let dist = scheme
            .padded_length(u)
            .map_err(|source| inapplicable(table, scheme, u, source))?;
        let p_u = count as f64 / population;
        for &(p, prob) in dist.support() {
            *mass.entry((u, p)).or_insert(0.0) += p_u * prob;
        }
    }
    Ok(JointDistribution { mass })
}

/// Conditional entropy `H(U|P) = H(U,P) − H(P)` in bits.
pub fn alpha1(j: &JointDistribution) -> f64 {
    let joint_entropy = entropy_of(j.mass.values().copied());
    let padded_entropy = entropy_of(j.marginal_padded().into_values());
    (joint_entropy - padded_entropy).max(0.0)
}

/// Possibilistic k-anonymity: for each observable padded length, the
/// anonymity set is everyone whose unpadded length could map there with
/// nonzero probability; returns the minimum set size over observations.
///
/// For deterministic schemes this is the classic minimum merged-class count.
pub fn alpha2(table: &FrequencyTable, scheme: &SchemeInstance) -> Result<u64, MetricsError> {
    nonzero_population(table)?;
    let mut candidates: BTreeMap<u32, u64> = BTreeMap::new();
    for (u, count) in table.iter() {
        let dist = scheme
            .padded_length(u)
            .map_err(|source| inapplicable(table, scheme, u, source))?;
        for &(p, _) in dist.support() {
            *candidates.entry(p).or_insert(0) += count;
        }
    }
    Ok(candidates.into_values().min().expect("table is non-empty"))
}

/// Bandwidth expansion `β = Σ count(u)·E[p|u] / Σ count(u)·u`, with the
/// expectation taken over the scheme's padding randomness.
pub fn beta(table: &FrequencyTable, scheme: &SchemeInstance) -> Result<f64, MetricsError> {
    nonzero_population(table)?;
    let mut padded_octets = 0.0;
    let mut unpadded_octets = 0.0;
    for (u, count) in table.iter() {
        let dist = scheme
            .padded_length(u)
            .map_err(|source| inapplicable(table, scheme, u, source))?;
        padded_octets += count as f64 * dist.expected();
        unpadded_octets += count as f64 * u as f64;
    }
    Ok(padded_octets / unpadded_octets)
}

/// Distance from the point `(beta, alpha1)` to the ideal corner `(0, h_u)`.
pub fn delta(beta: f64, alpha1: f64, h_u: f64) -> f64 {
    (beta * beta + (h_u - alpha1) * (h_u - alpha1)).sqrt()
}

/// Computes all four metrics for one (dataset, scheme) pair.
pub fn evaluate(
    table: &FrequencyTable,
    scheme: &SchemeInstance,
) -> Result<EvalRecord, MetricsError> {
    let j = joint(table, scheme)?;
    let alpha1 = alpha1(&j);
    let alpha2 = alpha2(table, scheme)?;
    let beta = beta(table, scheme)?;
    let h_u = table.entropy();
    Ok(EvalRecord {
        dataset: table.label().to_string(),
        scheme: *scheme,
        alpha1,
        alpha2,
        beta,
        delta: delta(beta, alpha1, h_u),
        h_u,
    })
}

fn nonzero_population(table: &FrequencyTable) -> Result<f64, MetricsError> {
    if table.is_empty() {
        Err(MetricsError::EmptyTable {
            dataset: table.label().to_string(),
        })
    } else {
        Ok(table.population() as f64)
    }
}

fn inapplicable(
    table: &FrequencyTable,
    scheme: &SchemeInstance,
    length: u32,
    source: PadError,
) -> MetricsError {
    MetricsError::SchemeInapplicable {
        scheme: scheme.code(),
        dataset: table.label().to_string(),
        length,
        source,
    }
}

fn entropy_of(probabilities: impl Iterator<Item = f64>) -> f64 {
    -probabilities
        .filter(|&p| p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>()
}
