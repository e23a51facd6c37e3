//! ECIES primitives for the Profile A concealment flow: X25519 key
//! agreement, the X9.63 KDF over SHA-256, AES-128-CTR, and the truncated
//! HMAC-SHA-256 tag.
//!
//! Key material layout follows the Profile A convention: the KDF expands the
//! raw shared secret (with the ephemeral public key as shared info) into
//! 64 octets — a 16-octet AES key, a 16-octet initial counter block, and a
//! 32-octet MAC key.

use aes::Aes128;
use ctr::cipher::{KeyIvInit, StreamCipher};
use hmac::{Hmac, Mac};
use sha2::{Digest, Sha256};
use x25519_dalek::{PublicKey, StaticSecret};

type Aes128Ctr = ctr::Ctr128BE<Aes128>;
type HmacSha256 = Hmac<Sha256>;

pub const KEY_LEN: usize = 32;
pub const MAC_TAG_LEN: usize = 8;

/// Symmetric key material for one concealment.
pub struct DerivedKeys {
    pub enc_key: [u8; 16],
    pub icb: [u8; 16],
    pub mac_key: [u8; 32],
}

/// ANSI X9.63 KDF over SHA-256: concatenated `SHA-256(secret ‖ counter ‖
/// shared_info)` blocks with a big-endian 32-bit counter starting at 1,
/// truncated to `out_len`.
pub fn x963_kdf_sha256(shared_secret: &[u8], shared_info: &[u8], out_len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(out_len.div_ceil(32) * 32);
    let mut counter: u32 = 1;
    while out.len() < out_len {
        let mut hasher = Sha256::new();
        hasher.update(shared_secret);
        hasher.update(counter.to_be_bytes());
        hasher.update(shared_info);
        out.extend_from_slice(&hasher.finalize());
        counter += 1;
    }
    out.truncate(out_len);
    out
}

/// Expands a raw X25519 shared secret into the Profile A key block, binding
/// the ephemeral public key as KDF shared info.
pub fn derive_keys(shared_secret: &[u8; 32], ephemeral_public: &[u8; 32]) -> DerivedKeys {
    let okm = x963_kdf_sha256(shared_secret, ephemeral_public, 64);
    DerivedKeys {
        enc_key: okm[..16].try_into().expect("16-octet slice"),
        icb: okm[16..32].try_into().expect("16-octet slice"),
        mac_key: okm[32..].try_into().expect("32-octet slice"),
    }
}

/// AES-128-CTR keystream application; encryption and decryption are the
/// same operation.
pub fn apply_ctr(enc_key: &[u8; 16], icb: &[u8; 16], data: &mut [u8]) {
    let mut cipher = Aes128Ctr::new(enc_key.into(), icb.into());
    cipher.apply_keystream(data);
}

/// Leftmost 8 octets of HMAC-SHA-256 over the ciphertext.
pub fn mac_tag(mac_key: &[u8; 32], ciphertext: &[u8]) -> [u8; MAC_TAG_LEN] {
    let mut mac = HmacSha256::new_from_slice(mac_key).expect("HMAC accepts any key length");
    mac.update(ciphertext);
    mac.finalize().into_bytes()[..MAC_TAG_LEN]
        .try_into()
        .expect("8-octet slice")
}

/// Constant-time check of a truncated tag.
pub fn verify_mac(mac_key: &[u8; 32], ciphertext: &[u8], tag: &[u8; MAC_TAG_LEN]) -> bool {
    let mut mac = HmacSha256::new_from_slice(mac_key).expect("HMAC accepts any key length");
    mac.update(ciphertext);
    mac.verify_truncated_left(tag).is_ok()
}

/// X25519 public key for a 32-octet secret.
pub fn public_key(secret: &[u8; KEY_LEN]) -> [u8; KEY_LEN] {
    PublicKey::from(&StaticSecret::from(*secret)).to_bytes()
}

/// X25519 Diffie-Hellman. Returns `None` when the shared secret is
/// non-contributory (the peer supplied a low-order point).
pub fn diffie_hellman(secret: &[u8; KEY_LEN], peer_public: &[u8; KEY_LEN]) -> Option<[u8; 32]> {
    let shared = StaticSecret::from(*secret).diffie_hellman(&PublicKey::from(*peer_public));
    shared.was_contributory().then(|| shared.to_bytes())
}
