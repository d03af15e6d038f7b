//! Hashing core: partial authenticators, element authenticators, the
//! genesis digest and the canonical hash-input encoding.
//!
//! The byte encoding produced by [`encode_hash_input`] is normative and
//! bit-exact; it is the cross-implementation compatibility contract. Every
//! field is fixed-width per log, which makes the encoding injective:
//!
//! ```text
//! input := index (8 bytes, big-endian) || level (1 byte) || datum || predecessor digest
//! ```

use std::fmt;

use sha2::{Digest as _, Sha256, Sha512};
use thiserror::Error;

use crate::skiplist::{max_level, ElementIndex, Level, TraversalError};

/// A fixed-width hash value: an element authenticator, or the commitment
/// digest a maintainer hands to verifiers. The width is constant per log,
/// fixed when the log is created.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Digest(bytes)
    }

    /// All-zero digest of the given width.
    pub fn zeroed(width: usize) -> Self {
        Digest(vec![0; width])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn to_hex(&self) -> String {
        encode_hex(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        decode_hex(s).map(Digest)
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

/// Lowercase hex, no prefix.
pub fn encode_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push(char::from_digit((b >> 4) as u32, 16).unwrap());
        out.push(char::from_digit((b & 0xf) as u32, 16).unwrap());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("hex string has odd length")]
    OddLength,
    #[error("invalid hex digit {0:?}")]
    InvalidDigit(char),
}

pub fn decode_hex(s: &str) -> Result<Vec<u8>, HexError> {
    if !s.len().is_multiple_of(2) {
        return Err(HexError::OddLength);
    }
    s.as_bytes()
        .chunks(2)
        .map(|pair| {
            let hi = (pair[0] as char)
                .to_digit(16)
                .ok_or(HexError::InvalidDigit(pair[0] as char))?;
            let lo = (pair[1] as char)
                .to_digit(16)
                .ok_or(HexError::InvalidDigit(pair[1] as char))?;
            Ok((hi << 4 | lo) as u8)
        })
        .collect()
}

/// The one-way hash backing a log. Recorded in the log preamble so files
/// self-describe; agreed out-of-band between maintainer and verifiers,
/// like the genesis digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashAlgorithm {
    #[default]
    Sha256,
    Sha512,
}

impl HashAlgorithm {
    /// Identifier stored in the file preamble.
    pub fn id(self) -> u16 {
        match self {
            HashAlgorithm::Sha256 => 1,
            HashAlgorithm::Sha512 => 2,
        }
    }

    pub fn from_id(id: u16) -> Option<Self> {
        match id {
            1 => Some(HashAlgorithm::Sha256),
            2 => Some(HashAlgorithm::Sha512),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HashAlgorithm::Sha256 => "sha-256",
            HashAlgorithm::Sha512 => "sha-512",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sha-256" => Some(HashAlgorithm::Sha256),
            "sha-512" => Some(HashAlgorithm::Sha512),
            _ => None,
        }
    }

    /// Hash output width in bytes.
    pub fn output_width(self) -> usize {
        match self {
            HashAlgorithm::Sha256 => 32,
            HashAlgorithm::Sha512 => 64,
        }
    }

    pub fn hash(self, bytes: &[u8]) -> Digest {
        match self {
            HashAlgorithm::Sha256 => Digest(Sha256::digest(bytes).to_vec()),
            HashAlgorithm::Sha512 => Digest(Sha512::digest(bytes).to_vec()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AuthenticatorError {
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error("level {level} out of range for element {index}")]
    LevelOutOfRange { index: ElementIndex, level: Level },
    #[error("element {index} takes {expected} predecessor digests, got {actual}")]
    PredecessorCount {
        index: ElementIndex,
        expected: usize,
        actual: usize,
    },
}

/// Canonical hash input for one partial authenticator. Injective as long
/// as datum and digest widths are constant per log.
pub fn encode_hash_input(
    i: ElementIndex,
    level: Level,
    datum: &[u8],
    predecessor: &Digest,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + datum.len() + predecessor.width());
    out.extend_from_slice(&i.to_be_bytes());
    out.push(level);
    out.extend_from_slice(datum);
    out.extend_from_slice(predecessor.as_bytes());
    out
}

/// Partial authenticator of element `i` on the level-`l` list: binds the
/// element's datum to the authenticator of its level-`l` predecessor.
pub fn partial_authenticator(
    hash: HashAlgorithm,
    i: ElementIndex,
    level: Level,
    datum: &[u8],
    predecessor: &Digest,
) -> Result<Digest, AuthenticatorError> {
    if level > max_level(i)? {
        return Err(AuthenticatorError::LevelOutOfRange { index: i, level });
    }
    Ok(hash.hash(&encode_hash_input(i, level, datum, predecessor)))
}

/// Element authenticator: the partial authenticators for every list the
/// element participates in, concatenated in level order and hashed once
/// more. `predecessors[l]` must be the claimed authenticator of element
/// `i - 2^l`.
pub fn element_authenticator(
    hash: HashAlgorithm,
    i: ElementIndex,
    datum: &[u8],
    predecessors: &[Digest],
) -> Result<Digest, AuthenticatorError> {
    let top = max_level(i)?;
    let expected = top as usize + 1;
    if predecessors.len() != expected {
        return Err(AuthenticatorError::PredecessorCount {
            index: i,
            expected,
            actual: predecessors.len(),
        });
    }
    let mut concatenated = Vec::with_capacity(expected * hash.output_width());
    for (level, predecessor) in predecessors.iter().enumerate() {
        let partial = hash.hash(&encode_hash_input(i, level as Level, datum, predecessor));
        concatenated.extend_from_slice(partial.as_bytes());
    }
    Ok(hash.hash(&concatenated))
}

/// Default digest for the genesis sentinel: all zeroes at the hash output
/// width. The value is a convention agreed among all users of a log and
/// may be overridden at log creation.
pub fn genesis_digest(hash: HashAlgorithm) -> Digest {
    Digest::zeroed(hash.output_width())
}
