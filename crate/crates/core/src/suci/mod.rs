//! SUCI concealment with the padding hook.
//!
//! A subscriber's NAI-form identity `username@realm` is concealed by padding
//! the username (see [`crate::padding`]) and then encrypting it under one of
//! two schemes:
//!
//! * `null` — a verbatim copy of the (padded) plaintext, the baseline
//!   "encryption" profile;
//! * `profileA` — ephemeral-key ECIES on Curve25519 with AES-128-CTR and a
//!   truncated HMAC-SHA-256 tag (see [`ecies`]).
//!
//! Counter-mode encryption is length-preserving, so the ciphertext length
//! equals the padded username length exactly — without padding, an observer
//! of [`observed_length`] learns the username length even though the
//! content is hidden. That observable is what the evaluation in
//! [`crate::metrics`] quantifies.

pub mod ecies;

use std::fmt;

use rand::{CryptoRng, Rng};
use thiserror::Error;

use crate::padding::{unpad_bytes, PadError, SchemeInstance};

use self::ecies::{KEY_LEN, MAC_TAG_LEN};

/// Errors from NAI validation, concealment, revealing, and wire parsing.
#[derive(Debug, Error)]
pub enum SuciError {
    #[error("NAI must be `username@realm`, got `{value}`")]
    NaiShape { value: String },
    #[error("invalid NAI username: {reason}")]
    BadUsername { reason: &'static str },
    #[error("invalid NAI realm: {reason}")]
    BadRealm { reason: &'static str },
    #[error("routing indicator must be 1-4 ASCII digits, got `{value}`")]
    BadRoutingIndicator { value: String },
    #[error(transparent)]
    Pad(#[from] PadError),
    #[error("non-contributory key exchange (low-order public key)")]
    NonContributory,
    #[error("MAC tag mismatch: message tampered with or wrong key")]
    MacMismatch,
    #[error("scheme `{scheme}` requires {field}")]
    MissingField {
        scheme: &'static str,
        field: &'static str,
    },
    #[error("ciphertext length {observed} is not a padded length `{scheme}` produces for the recovered username")]
    PadMismatch { observed: u32, scheme: String },
    #[error("recovered plaintext is not valid text")]
    NotText,
    #[error("IMSI-type SUCIs carry no concealed username to reveal")]
    UnsupportedSupiType,
    #[error("malformed SUCI wire text: {detail}")]
    WireSyntax { detail: String },
}

fn printable_ascii(text: &str) -> bool {
    text.bytes().all(|b| (0x21..=0x7e).contains(&b))
}

/// A Network Access Identifier, `username@realm`.
///
/// The username is the concealed, padded part; the realm travels in clear as
/// the home network identifier. Both parts are restricted to printable
/// ASCII without `@`; the realm additionally excludes `:` (reserved by the
/// wire text form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nai {
    username: String,
    realm: String,
}

impl Nai {
    pub fn new(username: &str, realm: &str) -> Result<Self, SuciError> {
        let user_err = |reason| SuciError::BadUsername { reason };
        if username.is_empty() {
            return Err(user_err("must not be empty"));
        }
        if username.contains('@') {
            return Err(user_err("must not contain `@`"));
        }
        if !printable_ascii(username) {
            return Err(user_err("must be printable ASCII without spaces"));
        }
        let realm_err = |reason| SuciError::BadRealm { reason };
        if realm.is_empty() {
            return Err(realm_err("must not be empty"));
        }
        if realm.contains('@') {
            return Err(realm_err("must not contain `@`"));
        }
        if realm.contains(':') {
            return Err(realm_err("must not contain `:`"));
        }
        if !printable_ascii(realm) {
            return Err(realm_err("must be printable ASCII without spaces"));
        }
        Ok(Self {
            username: username.to_string(),
            realm: realm.to_string(),
        })
    }

    /// Splits `username@realm` at the first `@`.
    pub fn parse(text: &str) -> Result<Self, SuciError> {
        let (username, realm) = text.split_once('@').ok_or_else(|| SuciError::NaiShape {
            value: text.to_string(),
        })?;
        Self::new(username, realm)
    }

    pub fn username(&self) -> &str {
        &self.username
    }

    pub fn realm(&self) -> &str {
        &self.realm
    }
}

impl fmt::Display for Nai {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.username, self.realm)
    }
}

/// SUPI flavor carried by a message. Only NSI (NAI-form) identities have a
/// variable-length username; IMSI support stops at the wire representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupiType {
    Imsi,
    Nsi,
}

impl SupiType {
    pub fn token(self) -> &'static str {
        match self {
            SupiType::Imsi => "imsi",
            SupiType::Nsi => "nsi",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token {
            "imsi" => Some(SupiType::Imsi),
            "nsi" => Some(SupiType::Nsi),
            _ => None,
        }
    }
}

/// Concealment scheme identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcealmentScheme {
    /// Output equals input; no keys, no integrity.
    Null,
    /// ECIES on Curve25519 + AES-128-CTR + HMAC-SHA-256/64.
    ProfileA,
}

impl ConcealmentScheme {
    pub fn id(self) -> u8 {
        match self {
            ConcealmentScheme::Null => 0,
            ConcealmentScheme::ProfileA => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(ConcealmentScheme::Null),
            1 => Some(ConcealmentScheme::ProfileA),
            _ => None,
        }
    }
}

/// A concealed identifier as it travels to the home network.
///
/// Everything except `ciphertext` is cleartext metadata. For `profileA` the
/// ciphertext length equals the padded username length (counter mode is
/// length-preserving); for `null` the ciphertext is the padded username
/// itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuciMessage {
    pub supi_type: SupiType,
    /// Realm for NSI; MCC+MNC digits for IMSI.
    pub home_network_id: String,
    pub routing_indicator: String,
    pub scheme: ConcealmentScheme,
    pub home_key_id: u8,
    pub ephemeral_public_key: Option<[u8; KEY_LEN]>,
    pub ciphertext: Vec<u8>,
    pub mac_tag: Option<[u8; MAC_TAG_LEN]>,
}

/// A home-network X25519 key pair.
pub struct HomeKeyPair {
    secret: [u8; KEY_LEN],
    public: [u8; KEY_LEN],
}

impl HomeKeyPair {
    pub fn generate<R: Rng + CryptoRng>(rng: &mut R) -> Self {
        let mut secret = [0u8; KEY_LEN];
        rng.fill_bytes(&mut secret);
        Self::from_secret(secret)
    }

    pub fn from_secret(secret: [u8; KEY_LEN]) -> Self {
        let public = ecies::public_key(&secret);
        Self { secret, public }
    }

    pub fn public(&self) -> &[u8; KEY_LEN] {
        &self.public
    }

    pub fn secret(&self) -> &[u8; KEY_LEN] {
        &self.secret
    }
}

impl fmt::Debug for HomeKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomeKeyPair")
            .field("public", &hex::encode(self.public))
            .field("secret", &"<redacted>")
            .finish()
    }
}

fn validate_routing_indicator(value: &str) -> Result<(), SuciError> {
    let ok = (1..=4).contains(&value.len()) && value.bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(SuciError::BadRoutingIndicator {
            value: value.to_string(),
        })
    }
}

/// Conceals an NAI: pads the username, then encrypts it under `scheme`.
///
/// The rng supplies both the padding randomness (for randomized padding
/// kinds) and the ephemeral key (for `profileA`), so a seeded rng makes the
/// whole flow reproducible.
pub fn conceal<R: Rng + CryptoRng>(
    nai: &Nai,
    scheme: ConcealmentScheme,
    pad: &SchemeInstance,
    home_public_key: &[u8; KEY_LEN],
    home_key_id: u8,
    routing_indicator: &str,
    rng: &mut R,
) -> Result<SuciMessage, SuciError> {
    validate_routing_indicator(routing_indicator)?;
    let padded = pad.pad_bytes(nai.username().as_bytes(), rng)?;

    let (ephemeral_public_key, ciphertext, mac_tag) = match scheme {
        ConcealmentScheme::Null => (None, padded, None),
        ConcealmentScheme::ProfileA => {
            let mut ephemeral_secret = [0u8; KEY_LEN];
            rng.fill_bytes(&mut ephemeral_secret);
            let ephemeral_public = ecies::public_key(&ephemeral_secret);
            let shared = ecies::diffie_hellman(&ephemeral_secret, home_public_key)
                .ok_or(SuciError::NonContributory)?;
            let keys = ecies::derive_keys(&shared, &ephemeral_public);
            let mut ct = padded;
            ecies::apply_ctr(&keys.enc_key, &keys.icb, &mut ct);
            let tag = ecies::mac_tag(&keys.mac_key, &ct);
            (Some(ephemeral_public), ct, Some(tag))
        }
    };

    Ok(SuciMessage {
        supi_type: SupiType::Nsi,
        home_network_id: nai.realm().to_string(),
        routing_indicator: routing_indicator.to_string(),
        scheme,
        home_key_id,
        ephemeral_public_key,
        ciphertext,
        mac_tag,
    })
}

/// Home-network side: verifies (profileA), decrypts, de-pads, and
/// reassembles the NAI.
///
/// The recovered padded length must be one the scheme could actually have
/// produced for the recovered username; a mismatch means the wrong padding
/// scheme was supplied.
pub fn reveal(
    msg: &SuciMessage,
    pad: &SchemeInstance,
    home_private_key: &[u8; KEY_LEN],
) -> Result<Nai, SuciError> {
    if msg.supi_type == SupiType::Imsi {
        return Err(SuciError::UnsupportedSupiType);
    }

    let padded = match msg.scheme {
        ConcealmentScheme::Null => msg.ciphertext.clone(),
        ConcealmentScheme::ProfileA => {
            let missing = |field| SuciError::MissingField {
                scheme: "profileA",
                field,
            };
            let ephemeral_public = msg
                .ephemeral_public_key
                .ok_or_else(|| missing("an ephemeral public key"))?;
            let tag = msg.mac_tag.ok_or_else(|| missing("a MAC tag"))?;
            let shared = ecies::diffie_hellman(home_private_key, &ephemeral_public)
                .ok_or(SuciError::NonContributory)?;
            let keys = ecies::derive_keys(&shared, &ephemeral_public);
            if !ecies::verify_mac(&keys.mac_key, &msg.ciphertext, &tag) {
                return Err(SuciError::MacMismatch);
            }
            let mut plaintext = msg.ciphertext.clone();
            ecies::apply_ctr(&keys.enc_key, &keys.icb, &mut plaintext);
            plaintext
        }
    };

    let username_bytes = unpad_bytes(&padded)?;
    let observed = padded.len() as u32;
    let support = pad.padded_length(username_bytes.len() as u32)?;
    if !support.contains(observed) {
        return Err(SuciError::PadMismatch {
            observed,
            scheme: pad.code(),
        });
    }
    let username = std::str::from_utf8(username_bytes).map_err(|_| SuciError::NotText)?;
    Nai::new(username, &msg.home_network_id)
}

/// The attacker's observable: the concealed identifier's length in octets.
pub fn observed_length(msg: &SuciMessage) -> u32 {
    msg.ciphertext.len() as u32
}

impl SuciMessage {
    /// Renders the colon-separated wire text form:
    /// `suci:<supi_type>:<home_network_id>:<routing_indicator>:<scheme_id>:<home_key_id>:<hex fields>`
    /// where the hex fields are the ciphertext for `null`, and ephemeral
    /// key, ciphertext, MAC tag for `profileA`.
    pub fn to_wire(&self) -> String {
        let mut fields = vec![
            "suci".to_string(),
            self.supi_type.token().to_string(),
            self.home_network_id.clone(),
            self.routing_indicator.clone(),
            self.scheme.id().to_string(),
            self.home_key_id.to_string(),
        ];
        if let Some(key) = &self.ephemeral_public_key {
            fields.push(hex::encode(key));
        }
        fields.push(hex::encode(&self.ciphertext));
        if let Some(tag) = &self.mac_tag {
            fields.push(hex::encode(tag));
        }
        fields.join(":")
    }

    /// Parses the wire text form; inverse of [`SuciMessage::to_wire`].
    pub fn from_wire(text: &str) -> Result<Self, SuciError> {
        let syntax = |detail: String| SuciError::WireSyntax { detail };
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 7 {
            return Err(syntax(format!(
                "expected at least 7 `:`-separated fields, got {}",
                parts.len()
            )));
        }
        if parts[0] != "suci" {
            return Err(syntax(format!(
                "expected `suci` prefix, got `{}`",
                parts[0]
            )));
        }
        let supi_type = SupiType::parse(parts[1])
            .ok_or_else(|| syntax(format!("unknown SUPI type `{}`", parts[1])))?;
        let home_network_id = parts[2];
        if home_network_id.is_empty() {
            return Err(syntax("empty home network identifier".to_string()));
        }
        validate_routing_indicator(parts[3])?;
        let scheme_id: u8 = parts[4]
            .parse()
            .map_err(|_| syntax(format!("scheme id `{}` is not an integer", parts[4])))?;
        let scheme = ConcealmentScheme::from_id(scheme_id)
            .ok_or_else(|| syntax(format!("unknown scheme id {scheme_id}")))?;
        let home_key_id: u8 = parts[5]
            .parse()
            .map_err(|_| syntax(format!("home key id `{}` is not in 0..=255", parts[5])))?;

        let unhex = |field: &'static str, value: &str| {
            hex::decode(value).map_err(|_| syntax(format!("{field} is not valid hex")))
        };
        let (ephemeral_public_key, ciphertext, mac_tag) = match scheme {
            ConcealmentScheme::Null => {
                if parts.len() != 7 {
                    return Err(syntax(format!(
                        "null scheme takes 7 fields, got {}",
                        parts.len()
                    )));
                }
                (None, unhex("ciphertext", parts[6])?, None)
            }
            ConcealmentScheme::ProfileA => {
                if parts.len() != 9 {
                    return Err(syntax(format!(
                        "profileA takes 9 fields, got {}",
                        parts.len()
                    )));
                }
                let key: [u8; KEY_LEN] = unhex("ephemeral public key", parts[6])?
                    .try_into()
                    .map_err(|_| {
                        syntax(format!("ephemeral public key must be {KEY_LEN} octets"))
                    })?;
                let tag: [u8; MAC_TAG_LEN] = unhex("MAC tag", parts[8])?
                    .try_into()
                    .map_err(|_| syntax(format!("MAC tag must be {MAC_TAG_LEN} octets")))?;
                (Some(key), unhex("ciphertext", parts[7])?, Some(tag))
            }
        };

        Ok(Self {
            supi_type,
            home_network_id: home_network_id.to_string(),
            routing_indicator: parts[3].to_string(),
            scheme,
            home_key_id,
            ephemeral_public_key,
            ciphertext,
            mac_tag,
        })
    }
}
