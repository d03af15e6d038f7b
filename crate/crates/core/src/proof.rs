//! Proof components, membership proofs and advancement proofs, together
//! with their wire encoding.
//!
//! The wire format is normative and bit-exact. Indices and claim metadata
//! travel beside the proof, not inside it:
//!
//! ```text
//! component := sensitive datum || predecessor count (1 byte) || predecessors in level order
//! proof     := component count (2 bytes, big-endian) || components
//! ```

use thiserror::Error;

use crate::authenticator::Digest;
use crate::skiplist::{max_level, traversal_path, ElementIndex, TraversalError, MAX_LEVEL};

/// One traversed element's contribution to a proof: its sensitive datum and
/// the authenticators of its linked-list predecessors, level 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofComponent {
    pub datum: Vec<u8>,
    pub predecessors: Vec<Digest>,
}

/// Components for every element of the source-to-anchor traversal, the
/// claimed element itself included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipProof {
    pub components: Vec<ProofComponent>,
}

/// Components for every element of the traversal strictly after the
/// source: a membership proof without its first component. The source
/// element's authenticator is already known to the verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdvancementProof {
    pub components: Vec<ProofComponent>,
}

/// Field widths needed to parse proof bytes; both are constant per log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofLayout {
    pub sensitive_len: usize,
    pub digest_width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("proof bytes end mid-field")]
    Truncated,
    #[error("{0} trailing bytes after the last component")]
    TrailingBytes(usize),
    #[error("predecessor count {0} exceeds the level ceiling")]
    PredecessorCountOutOfRange(u8),
    #[error("datum length cannot be inferred from the payload size")]
    AmbiguousLayout,
    #[error(transparent)]
    Traversal(#[from] TraversalError),
}

fn encode_components(components: &[ProofComponent]) -> Vec<u8> {
    let count = u16::try_from(components.len()).expect("proof component count fits in u16");
    let mut out = Vec::new();
    out.extend_from_slice(&count.to_be_bytes());
    for component in components {
        out.extend_from_slice(&component.datum);
        out.push(component.predecessors.len() as u8);
        for predecessor in &component.predecessors {
            out.extend_from_slice(predecessor.as_bytes());
        }
    }
    out
}

fn decode_components(bytes: &[u8], layout: &ProofLayout) -> Result<Vec<ProofComponent>, WireError> {
    let count_bytes: [u8; 2] = bytes
        .get(..2)
        .ok_or(WireError::Truncated)?
        .try_into()
        .unwrap();
    let count = u16::from_be_bytes(count_bytes) as usize;
    let mut rest = &bytes[2..];
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        let datum = rest
            .get(..layout.sensitive_len)
            .ok_or(WireError::Truncated)?
            .to_vec();
        rest = &rest[layout.sensitive_len..];
        let predecessor_count = *rest.first().ok_or(WireError::Truncated)?;
        if predecessor_count as u64 > MAX_LEVEL as u64 + 1 {
            return Err(WireError::PredecessorCountOutOfRange(predecessor_count));
        }
        rest = &rest[1..];
        let mut predecessors = Vec::with_capacity(predecessor_count as usize);
        for _ in 0..predecessor_count {
            let digest = rest
                .get(..layout.digest_width)
                .ok_or(WireError::Truncated)?;
            predecessors.push(Digest::from_bytes(digest.to_vec()));
            rest = &rest[layout.digest_width..];
        }
        components.push(ProofComponent {
            datum,
            predecessors,
        });
    }
    if !rest.is_empty() {
        return Err(WireError::TrailingBytes(rest.len()));
    }
    Ok(components)
}

impl MembershipProof {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode_components(&self.components)
    }

    pub fn from_bytes(bytes: &[u8], layout: &ProofLayout) -> Result<Self, WireError> {
        Ok(MembershipProof {
            components: decode_components(bytes, layout)?,
        })
    }
}

impl AdvancementProof {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encode_components(&self.components)
    }

    pub fn from_bytes(bytes: &[u8], layout: &ProofLayout) -> Result<Self, WireError> {
        Ok(AdvancementProof {
            components: decode_components(bytes, layout)?,
        })
    }
}

/// Derive the sensitive-datum length of an advancement proof from its total
/// payload size. The traversal from `from` to `to` fixes the component
/// count and each component's predecessor count, so the datum width is the
/// unique exact remainder; anything non-integral is malformed.
pub fn infer_sensitive_len(
    from: ElementIndex,
    to: ElementIndex,
    digest_width: usize,
    payload_len: usize,
) -> Result<usize, WireError> {
    let path = traversal_path(from, to)?;
    let components = path.hop_count();
    if components == 0 {
        return Err(WireError::AmbiguousLayout);
    }
    let mut fixed = 2 + components; // count word plus one length byte each
    for hop in path.hops() {
        let predecessors = max_level(hop.destination)? as usize + 1;
        fixed += predecessors * digest_width;
    }
    let variable = payload_len.checked_sub(fixed).ok_or(WireError::Truncated)?;
    if variable % components != 0 {
        return Err(WireError::AmbiguousLayout);
    }
    Ok(variable / components)
}
