//! Identifier padding schemes.
//!
//! Seven scheme kinds are modeled: the unpadded `identity` baseline, five
//! schemes from the padding-policy literature (`blk`, `pwr`, `rndBlk`,
//! `rndLen`, `maxL`), and the tail-aware block-length scheme `taBlk` that
//! pads only the rare tails of a length distribution.
//!
//! Each scheme exists at two layers that are kept in exact agreement:
//!
//! * an analytic layer, [`SchemeInstance::padded_length`], giving the exact
//!   output-length distribution for an input length (randomized schemes are
//!   represented by their full support, never sampled), and
//! * a byte layer, [`SchemeInstance::pad_bytes`] / [`unpad_bytes`], which
//!   appends `0x00` filler up to a length drawn from that distribution.
//!
//! The `0x00` filler makes de-padding unambiguous because NAI usernames may
//! not contain NUL octets.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

/// Errors from scheme parsing, length computation, and byte transforms.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadError {
    #[error("unknown scheme kind `{kind}`")]
    UnknownKind { kind: String },
    #[error("scheme `{kind}` takes {expected} parameter(s), found {found}")]
    WrongArity {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("scheme parameter `{value}` is not a non-negative integer")]
    NonIntegerParam { value: String },
    #[error("{kind}: parameter `{name}` must be >= {at_least}")]
    ParamTooSmall {
        kind: &'static str,
        name: &'static str,
        at_least: u32,
    },
    #[error("blk-like scheme: min {min} is not a multiple of size {size}")]
    MinNotMultiple { size: u32, min: u32 },
    #[error("taBlk bands must satisfy 1 <= l <= m <= r, got l={left} m={mid} r={right}")]
    BandOrder { left: u32, mid: u32, right: u32 },
    #[error("input length {input} exceeds `{scheme}` upper bound {bound}")]
    InputTooLong {
        scheme: String,
        input: u32,
        bound: u32,
    },
    #[error("input length must be >= 1")]
    ZeroInput,
    #[error("padded length overflows for input {input}")]
    Overflow { input: u32 },
    #[error("plaintext is empty")]
    EmptyPlaintext,
    #[error("plaintext contains a NUL octet at offset {offset}")]
    NulInPlaintext { offset: usize },
    #[error("nothing left after stripping padding")]
    AllPadding,
}

/// Scheme kind tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Identity,
    MaxL,
    Blk,
    Pwr,
    RndBlk,
    RndLen,
    TaBlk,
}

impl SchemeKind {
    /// The canonical, case-sensitive kind token.
    pub fn token(self) -> &'static str {
        match self {
            SchemeKind::Identity => "identity",
            SchemeKind::MaxL => "maxL",
            SchemeKind::Blk => "blk",
            SchemeKind::Pwr => "pwr",
            SchemeKind::RndBlk => "rndBlk",
            SchemeKind::RndLen => "rndLen",
            SchemeKind::TaBlk => "taBlk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Params {
    Identity,
    MaxL { len: u32 },
    Blk { size: u32, min: u32 },
    Pwr { base: u32, min: u32 },
    RndBlk { size: u32, blocks: u32, min: u32 },
    RndLen { len: u32 },
    TaBlk { left: u32, mid: u32, right: u32 },
}

/// A validated, parameterized padding scheme, e.g. `taBlk-6-15-30`.
///
/// Instances are immutable and only constructible through the checked
/// constructors or [`SchemeInstance::parse`], so the per-kind parameter
/// invariants always hold. `parse(render(s)) == s` for every instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeInstance {
    params: Params,
}

impl SchemeInstance {
    /// The unpadded baseline.
    pub fn identity() -> Self {
        Self {
            params: Params::Identity,
        }
    }

    /// Everything padded to `len`; inputs longer than `len` are rejected.
    pub fn max_l(len: u32) -> Result<Self, PadError> {
        require_at_least("maxL", "len", len, 1)?;
        Ok(Self {
            params: Params::MaxL { len },
        })
    }

    /// Pad to the next multiple of `size`, floored at `min` (a multiple of
    /// `size`).
    pub fn blk(size: u32, min: u32) -> Result<Self, PadError> {
        require_at_least("blk", "sz", size, 1)?;
        require_at_least("blk", "min", min, 1)?;
        if !min.is_multiple_of(size) {
            return Err(PadError::MinNotMultiple { size, min });
        }
        Ok(Self {
            params: Params::Blk { size, min },
        })
    }

    /// Pad to the smallest power of `base` at or above the input, floored at
    /// `min`.
    pub fn pwr(base: u32, min: u32) -> Result<Self, PadError> {
        require_at_least("pwr", "b", base, 2)?;
        require_at_least("pwr", "min", min, 1)?;
        Ok(Self {
            params: Params::Pwr { base, min },
        })
    }

    /// Like `blk`, then append a uniformly chosen number of extra whole
    /// blocks in `0..blocks`.
    pub fn rnd_blk(size: u32, blocks: u32, min: u32) -> Result<Self, PadError> {
        require_at_least("rndBlk", "sz", size, 1)?;
        require_at_least("rndBlk", "blks", blocks, 1)?;
        require_at_least("rndBlk", "min", min, 1)?;
        if !min.is_multiple_of(size) {
            return Err(PadError::MinNotMultiple { size, min });
        }
        Ok(Self {
            params: Params::RndBlk { size, blocks, min },
        })
    }

    /// Append a uniformly chosen number of extra octets in `0..=len`.
    pub fn rnd_len(len: u32) -> Self {
        Self {
            params: Params::RndLen { len },
        }
    }

    /// Tail-aware block-length padding: inputs below `left` are padded to
    /// `left`, inputs in `[left, mid]` pass unpadded, inputs in `(mid, right]`
    /// are padded to `right`. Inputs above `right` are rejected.
    pub fn ta_blk(left: u32, mid: u32, right: u32) -> Result<Self, PadError> {
        if !(1 <= left && left <= mid && mid <= right) {
            return Err(PadError::BandOrder { left, mid, right });
        }
        Ok(Self {
            params: Params::TaBlk { left, mid, right },
        })
    }

    /// Parses a canonical scheme code such as `blk-4-8` or `taBlk-6-15-30`.
    pub fn parse(code: &str) -> Result<Self, PadError> {
        let mut parts = code.split('-');
        let kind = parts.next().unwrap_or("");
        let params: Vec<u32> = parts
            .map(|p| {
                p.parse::<u32>().map_err(|_| PadError::NonIntegerParam {
                    value: p.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;

        let expect = |n: usize, kind: &'static str| -> Result<(), PadError> {
            if params.len() == n {
                Ok(())
            } else {
                Err(PadError::WrongArity {
                    kind,
                    expected: n,
                    found: params.len(),
                })
            }
        };

        match kind {
            "identity" => {
                expect(0, "identity")?;
                Ok(Self::identity())
            }
            "maxL" => {
                expect(1, "maxL")?;
                Self::max_l(params[0])
            }
            "blk" => {
                expect(2, "blk")?;
                Self::blk(params[0], params[1])
            }
            "pwr" => {
                expect(2, "pwr")?;
                Self::pwr(params[0], params[1])
            }
            "rndBlk" => {
                expect(3, "rndBlk")?;
                Self::rnd_blk(params[0], params[1], params[2])
            }
            "rndLen" => {
                expect(1, "rndLen")?;
                Ok(Self::rnd_len(params[0]))
            }
            "taBlk" => {
                expect(3, "taBlk")?;
                Self::ta_blk(params[0], params[1], params[2])
            }
            other => Err(PadError::UnknownKind {
                kind: other.to_string(),
            }),
        }
    }

    /// The canonical text code; inverse of [`SchemeInstance::parse`].
    pub fn code(&self) -> String {
        self.to_string()
    }

    pub fn kind(&self) -> SchemeKind {
        match self.params {
            Params::Identity => SchemeKind::Identity,
            Params::MaxL { .. } => SchemeKind::MaxL,
            Params::Blk { .. } => SchemeKind::Blk,
            Params::Pwr { .. } => SchemeKind::Pwr,
            Params::RndBlk { .. } => SchemeKind::RndBlk,
            Params::RndLen { .. } => SchemeKind::RndLen,
            Params::TaBlk { .. } => SchemeKind::TaBlk,
        }
    }

    /// True for schemes whose output length is a function of the input
    /// length alone.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self.params, Params::RndBlk { .. } | Params::RndLen { .. })
    }

    /// The largest input length the scheme accepts, if bounded.
    pub fn max_input(&self) -> Option<u32> {
        match self.params {
            Params::MaxL { len } => Some(len),
            Params::TaBlk { right, .. } => Some(right),
            _ => None,
        }
    }

    /// Exact output-length distribution for input length `input`.
    ///
    /// Deterministic kinds return a singleton; `rndBlk` and `rndLen` return
    /// their full uniform support. Errors when the input violates the
    /// scheme's bound (`taBlk` with `input > r`, `maxL` with `input > len`).
    pub fn padded_length(&self, input: u32) -> Result<OutputLengthDistribution, PadError> {
        if input == 0 {
            return Err(PadError::ZeroInput);
        }
        let single = |p: u64| -> Result<OutputLengthDistribution, PadError> {
            Ok(OutputLengthDistribution::singleton(narrow(p, input)?))
        };
        match self.params {
            Params::Identity => single(input as u64),
            Params::MaxL { len } => {
                if input > len {
                    Err(self.too_long(input, len))
                } else {
                    single(len as u64)
                }
            }
            Params::Blk { size, min } => single(block_round(input, size, min)),
            Params::Pwr { base, min } => single((min as u64).max(next_power_at_least(input, base))),
            Params::TaBlk { left, mid, right } => {
                if input < left {
                    single(left as u64)
                } else if input <= mid {
                    single(input as u64)
                } else if input <= right {
                    single(right as u64)
                } else {
                    Err(self.too_long(input, right))
                }
            }
            Params::RndBlk { size, blocks, min } => {
                let base = block_round(input, size, min);
                let lengths = (0..blocks as u64)
                    .map(|j| narrow(base + j * size as u64, input))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(OutputLengthDistribution::uniform(lengths))
            }
            Params::RndLen { len } => {
                let lengths = (0..=len as u64)
                    .map(|j| narrow(input as u64 + j, input))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(OutputLengthDistribution::uniform(lengths))
            }
        }
    }

    /// Pads `plaintext` with trailing `0x00` octets to a length drawn from
    /// [`SchemeInstance::padded_length`]. Deterministic kinds ignore `rng`.
    ///
    /// The plaintext must be non-empty and NUL-free so that
    /// [`unpad_bytes`] can invert the transform.
    pub fn pad_bytes<R: Rng + ?Sized>(
        &self,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<Vec<u8>, PadError> {
        if plaintext.is_empty() {
            return Err(PadError::EmptyPlaintext);
        }
        if let Some(offset) = plaintext.iter().position(|&b| b == 0) {
            return Err(PadError::NulInPlaintext { offset });
        }
        let input: u32 = plaintext
            .len()
            .try_into()
            .map_err(|_| PadError::Overflow { input: u32::MAX })?;

        let padded: u32 = match self.params {
            Params::RndBlk { size, blocks, min } => {
                let extra = rng.gen_range(0..blocks as u64);
                narrow(block_round(input, size, min) + extra * size as u64, input)?
            }
            Params::RndLen { len } => {
                let extra = rng.gen_range(0..=len as u64);
                narrow(input as u64 + extra, input)?
            }
            _ => {
                let dist = self.padded_length(input)?;
                debug_assert!(dist.is_singleton());
                dist.min_len()
            }
        };

        let mut out = Vec::with_capacity(padded as usize);
        out.extend_from_slice(plaintext);
        out.resize(padded as usize, 0);
        Ok(out)
    }

    fn too_long(&self, input: u32, bound: u32) -> PadError {
        PadError::InputTooLong {
            scheme: self.code(),
            input,
            bound,
        }
    }
}

impl fmt::Display for SchemeInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params {
            Params::Identity => write!(f, "identity"),
            Params::MaxL { len } => write!(f, "maxL-{len}"),
            Params::Blk { size, min } => write!(f, "blk-{size}-{min}"),
            Params::Pwr { base, min } => write!(f, "pwr-{base}-{min}"),
            Params::RndBlk { size, blocks, min } => write!(f, "rndBlk-{size}-{blocks}-{min}"),
            Params::RndLen { len } => write!(f, "rndLen-{len}"),
            Params::TaBlk { left, mid, right } => write!(f, "taBlk-{left}-{mid}-{right}"),
        }
    }
}

impl FromStr for SchemeInstance {
    type Err = PadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl serde::Serialize for SchemeInstance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SchemeInstance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = <String as serde::Deserialize>::deserialize(deserializer)?;
        Self::parse(&code).map_err(serde::de::Error::custom)
    }
}

/// Strips all trailing `0x00` octets; inverse of
/// [`SchemeInstance::pad_bytes`] on NUL-free plaintexts.
pub fn unpad_bytes(padded: &[u8]) -> Result<&[u8], PadError> {
    let end = padded
        .iter()
        .rposition(|&b| b != 0)
        .ok_or(PadError::AllPadding)?;
    Ok(&padded[..=end])
}

/// Exact probability mass over padded lengths for one (scheme, input) pair.
///
/// Every supported length is at least the input length, and probabilities
/// sum to 1 (up to f64 rounding). Deterministic schemes have a singleton
/// support.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputLengthDistribution {
    points: Vec<(u32, f64)>,
}

impl OutputLengthDistribution {
    fn singleton(length: u32) -> Self {
        Self {
            points: vec![(length, 1.0)],
        }
    }

    fn uniform(lengths: Vec<u32>) -> Self {
        let p = 1.0 / lengths.len() as f64;
        Self {
            points: lengths.into_iter().map(|l| (l, p)).collect(),
        }
    }

    /// (length, probability) pairs in increasing length order.
    pub fn support(&self) -> &[(u32, f64)] {
        &self.points
    }

    pub fn is_singleton(&self) -> bool {
        self.points.len() == 1
    }

    pub fn min_len(&self) -> u32 {
        self.points.first().map(|&(l, _)| l).unwrap_or(0)
    }

    pub fn max_len(&self) -> u32 {
        self.points.last().map(|&(l, _)| l).unwrap_or(0)
    }

    pub fn contains(&self, length: u32) -> bool {
        self.points.iter().any(|&(l, _)| l == length)
    }

    pub fn probability_of(&self, length: u32) -> f64 {
        self.points
            .iter()
            .find(|&&(l, _)| l == length)
            .map(|&(_, p)| p)
            .unwrap_or(0.0)
    }

    /// Expected padded length.
    pub fn expected(&self) -> f64 {
        self.points.iter().map(|&(l, p)| l as f64 * p).sum()
    }
}

fn require_at_least(
    kind: &'static str,
    name: &'static str,
    value: u32,
    at_least: u32,
) -> Result<(), PadError> {
    if value < at_least {
        Err(PadError::ParamTooSmall {
            kind,
            name,
            at_least,
        })
    } else {
        Ok(())
    }
}

/// max(min, size * ceil(input / size)) in u64 to dodge overflow.
fn block_round(input: u32, size: u32, min: u32) -> u64 {
    let size = size as u64;
    let rounded = (input as u64).div_ceil(size) * size;
    (min as u64).max(rounded)
}

/// Smallest power of `base` that is >= `input`; 1 for input 1.
fn next_power_at_least(input: u32, base: u32) -> u64 {
    let mut exp = input.ilog(base);
    if (base as u64).pow(exp) < input as u64 {
        exp += 1;
    }
    (base as u64).pow(exp)
}

fn narrow(value: u64, input: u32) -> Result<u32, PadError> {
    value.try_into().map_err(|_| PadError::Overflow { input })
}
