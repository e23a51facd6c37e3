//! Padding schemes and privacy metrics for 5G SUCI identifier concealment.
//!
//! The ECIES profiles that conceal a 5G subscriber's NAI-form identity use
//! counter-mode encryption, which preserves plaintext length — so the
//! concealed identifier leaks the username length to any observer. This
//! crate quantifies that leak on name-length frequency data and evaluates
//! padding schemes that close it:
//!
//! * [`freqdist`] — ingest and summarize name-length distributions;
//! * [`padding`] — seven padding schemes as exact output-length
//!   distributions plus byte-level pad/unpad transforms;
//! * [`metrics`] — attacker costs α₁ (conditional entropy) and α₂
//!   (k-anonymity), defender cost β (bandwidth expansion), and the δ
//!   selection metric;
//! * [`sweep`] — parameter-grid evaluation, winner selection, Pareto
//!   fronts, and CSV/JSON/SVG reports;
//! * [`suci`] — an ECIES Profile A concealment codec (X25519,
//!   AES-128-CTR, HMAC-SHA-256) with the padding hook applied to the
//!   username before encryption.
//!
//! Randomized schemes are analyzed through their exact output
//! distributions, never by sampling, so every metric and report is
//! deterministic.

pub mod freqdist;
pub mod metrics;
pub mod padding;
pub mod suci;
pub mod sweep;
