//! Verifier side: stateless membership verification, stateful advancement
//! verification with basis tracking, and temporal ordering of claims.
//!
//! A diligent verifier retains three things per remote log: the latest
//! size `n`, the latest digest `T^n`, and a [`Basis`] of reusable earlier
//! authenticators. The basis is what detects cross-version equivocation: a
//! maintainer who reports two different values for the same authenticator
//! in two advancements trips the consistency check.

use std::fmt;

use thiserror::Error;

use crate::authenticator::{element_authenticator, Digest, HashAlgorithm};
use crate::proof::{AdvancementProof, MembershipProof, ProofComponent};
use crate::skiplist::{max_level, traversal_path, ElementIndex, Level, MAX_INDEX};

/// Why a membership proof failed structurally. `ClaimFalse` is not an
/// error; these reasons mean nothing is known about the claim except that
/// the supplied proof does not fit it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum InvalidProof {
    /// Component count differs from the traversal length.
    #[error("count-mismatch")]
    CountMismatch,
    /// An authenticator computed in an earlier step differs from the value
    /// the next component carries for it.
    #[error("continuity-break")]
    ContinuityBreak,
    /// The final computed authenticator differs from the anchor digest.
    #[error("anchor-mismatch")]
    AnchorMismatch,
    /// A component or the claim itself is malformed.
    #[error("component-malformed")]
    ComponentMalformed,
}

/// Outcome of membership verification: the claim is true, the claim cannot
/// be true, or the proof is inappropriate for the claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationOutcome {
    ClaimTrue,
    ClaimFalse,
    ProofInvalid(InvalidProof),
}

impl VerificationOutcome {
    pub fn is_true(&self) -> bool {
        matches!(self, VerificationOutcome::ClaimTrue)
    }
}

/// Why an advancement was rejected. On rejection the verifier keeps its
/// previous state untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AdvancementError {
    #[error("count-mismatch")]
    CountMismatch,
    #[error("continuity-break")]
    ContinuityBreak,
    #[error("anchor-mismatch")]
    AnchorMismatch,
    #[error("component-malformed")]
    ComponentMalformed,
    /// The maintainer sent a different value for an authenticator whose
    /// value he reported before.
    #[error("basis-conflict")]
    BasisConflict { slot: Level },
    /// The claimed new size does not lie beyond the current one.
    #[error("not-an-advancement")]
    NotAnAdvancement { from: u64, to: u64 },
}

impl AdvancementError {
    /// Stable kebab-case reason token.
    pub fn reason(&self) -> &'static str {
        match self {
            AdvancementError::CountMismatch => "count-mismatch",
            AdvancementError::ContinuityBreak => "continuity-break",
            AdvancementError::AnchorMismatch => "anchor-mismatch",
            AdvancementError::ComponentMalformed => "component-malformed",
            AdvancementError::BasisConflict { .. } => "basis-conflict",
            AdvancementError::NotAnAdvancement { .. } => "not-an-advancement",
        }
    }
}

/// Assertion that datum `d` occupies position `i` of the log anchored at
/// the `n`-th authenticator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipClaim {
    pub position: ElementIndex,
    pub anchor: ElementIndex,
    pub datum: Vec<u8>,
}

/// Sparse vector of reusable authenticators, indexed by level (least
/// significant slot first). For a verifier tracking element `i`, slot `p`
/// is populated exactly when bit `p` of `i` is set, and holds the
/// authenticator of `i` with bits `0..=p` cleared.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basis {
    slots: Vec<Option<Digest>>,
}

impl Basis {
    pub fn empty() -> Self {
        Basis::default()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, level: Level) -> Option<&Digest> {
        self.slots.get(level as usize).and_then(Option::as_ref)
    }

    /// Populated slots in ascending level order.
    pub fn populated(&self) -> impl Iterator<Item = (Level, &Digest)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(level, slot)| slot.as_ref().map(|d| (level as Level, d)))
    }

    /// Does the population pattern equal the binary representation of
    /// `index`?
    pub fn matches_binary(&self, index: u64) -> bool {
        let expected_slots = if index == 0 {
            0
        } else {
            64 - index.leading_zeros() as usize
        };
        self.slots.len() == expected_slots
            && (0..expected_slots).all(|p| (index >> p & 1 == 1) == self.slots[p].is_some())
    }

    fn put(&mut self, level: Level, digest: Digest) {
        let idx = level as usize;
        if idx >= self.slots.len() {
            self.slots.resize(idx + 1, None);
        }
        self.slots[idx] = Some(digest);
    }

    fn clear(&mut self, level: Level) {
        self.slots[level as usize] = None;
    }
}

/// Everything a verifier retains for one remote log. The hash algorithm
/// is agreed out-of-band, like the genesis digest, and is not part of the
/// serialized state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierState {
    hash: HashAlgorithm,
    size: ElementIndex,
    digest: Digest,
    basis: Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StateCodecError {
    #[error("state bytes end mid-field")]
    Truncated,
    #[error("{0} trailing bytes after the last basis digest")]
    TrailingBytes(usize),
    #[error("slot count {stored} does not fit a log of size {size}")]
    SlotCount { stored: u8, size: u64 },
    #[error("basis bitmap does not mirror the binary size")]
    BitmapMismatch,
    #[error("size exceeds the 2^63 index ceiling")]
    SizeTooLarge,
}

impl VerifierState {
    /// The state before any advancement: size 0, the agreed genesis digest
    /// and an empty basis.
    pub fn genesis(hash: HashAlgorithm, genesis: Digest) -> Self {
        VerifierState {
            hash,
            size: 0,
            digest: genesis,
            basis: Basis::empty(),
        }
    }

    pub fn hash(&self) -> HashAlgorithm {
        self.hash
    }

    pub fn size(&self) -> ElementIndex {
        self.size
    }

    pub fn digest(&self) -> &Digest {
        &self.digest
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Process an advancement proof establishing `new_digest` as the
    /// authenticator of element `new_size`. Returns the advanced state on
    /// success and leaves `self` untouched either way.
    pub fn verify_advancement(
        &self,
        new_size: ElementIndex,
        new_digest: &Digest,
        proof: &AdvancementProof,
    ) -> Result<VerifierState, AdvancementError> {
        if new_size <= self.size || new_size > MAX_INDEX {
            return Err(AdvancementError::NotAnAdvancement {
                from: self.size,
                to: new_size,
            });
        }
        let path = traversal_path(self.size, new_size)
            .map_err(|_| AdvancementError::ComponentMalformed)?;
        if proof.components.len() != path.hop_count() {
            return Err(AdvancementError::CountMismatch);
        }

        let mut digest = self.digest.clone();
        let mut basis = self.basis.clone();
        for (hop, component) in path.hops().iter().zip(&proof.components) {
            // Basis first: a stale reusable authenticator must surface as a
            // basis conflict even when the hash chain itself is coherent.
            basis =
                process_advancement_component(hop.source, &digest, basis, component, hop.level)?;
            let computed = process_component(self.hash, hop.destination, component)
                .map_err(|_| AdvancementError::ComponentMalformed)?;
            if component.predecessors[hop.level as usize] != digest {
                return Err(AdvancementError::ContinuityBreak);
            }
            digest = computed;
        }
        if digest != *new_digest {
            return Err(AdvancementError::AnchorMismatch);
        }
        Ok(VerifierState {
            hash: self.hash,
            size: new_size,
            digest,
            basis,
        })
    }

    /// Normative serialization:
    /// `size (8 bytes, big-endian) || digest || slot count (1 byte) ||
    /// populated-slot bitmap (LSB-first) || populated digests in ascending
    /// slot order`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.size.to_be_bytes());
        out.extend_from_slice(self.digest.as_bytes());
        let slots = self.basis.slot_count();
        out.push(slots as u8);
        let mut bitmap = vec![0u8; slots.div_ceil(8)];
        for (level, _) in self.basis.populated() {
            bitmap[level as usize / 8] |= 1 << (level % 8);
        }
        out.extend_from_slice(&bitmap);
        for (_, digest) in self.basis.populated() {
            out.extend_from_slice(digest.as_bytes());
        }
        out
    }

    /// Parse and validate a serialized state. The digest width follows the
    /// agreed hash; a bitmap that does not mirror the binary representation
    /// of the size is rejected.
    pub fn from_bytes(bytes: &[u8], hash: HashAlgorithm) -> Result<Self, StateCodecError> {
        let width = hash.output_width();
        let size_bytes: [u8; 8] = bytes
            .get(..8)
            .ok_or(StateCodecError::Truncated)?
            .try_into()
            .unwrap();
        let size = u64::from_be_bytes(size_bytes);
        if size > MAX_INDEX {
            return Err(StateCodecError::SizeTooLarge);
        }
        let mut rest = &bytes[8..];
        let digest = Digest::from_bytes(
            rest.get(..width)
                .ok_or(StateCodecError::Truncated)?
                .to_vec(),
        );
        rest = &rest[width..];
        let slots = *rest.first().ok_or(StateCodecError::Truncated)? as usize;
        rest = &rest[1..];
        let expected_slots = if size == 0 {
            0
        } else {
            64 - size.leading_zeros() as usize
        };
        if slots != expected_slots {
            return Err(StateCodecError::SlotCount {
                stored: slots as u8,
                size,
            });
        }
        let bitmap = rest
            .get(..slots.div_ceil(8))
            .ok_or(StateCodecError::Truncated)?;
        rest = &rest[slots.div_ceil(8)..];
        let mut basis = Basis::empty();
        for position in 0..slots.div_ceil(8) * 8 {
            let set = bitmap[position / 8] >> (position % 8) & 1 == 1;
            let expected = position < slots && size >> position & 1 == 1;
            if set != expected {
                return Err(StateCodecError::BitmapMismatch);
            }
            if set {
                let digest = rest.get(..width).ok_or(StateCodecError::Truncated)?;
                basis.put(position as Level, Digest::from_bytes(digest.to_vec()));
                rest = &rest[width..];
            }
        }
        if !rest.is_empty() {
            return Err(StateCodecError::TrailingBytes(rest.len()));
        }
        Ok(VerifierState {
            hash,
            size,
            digest,
            basis,
        })
    }
}

/// Recompute the authenticator a proof component stands for (the component
/// is taken to describe element `j`). Fails when the predecessor count
/// does not match the element's level span.
pub fn process_component(
    hash: HashAlgorithm,
    j: ElementIndex,
    component: &ProofComponent,
) -> Result<Digest, InvalidProof> {
    let top = max_level(j).map_err(|_| InvalidProof::ComponentMalformed)?;
    if component.predecessors.len() != top as usize + 1 {
        return Err(InvalidProof::ComponentMalformed);
    }
    element_authenticator(hash, j, &component.datum, &component.predecessors)
        .map_err(|_| InvalidProof::ComponentMalformed)
}

/// Process the membership proof `proof` of `claim` against the anchor
/// digest. Walks the claimed traversal, recomputing authenticators and
/// checking that every step is consistent with the previous one; on a
/// structurally sound proof, compares the first component's datum with the
/// claimed one.
pub fn verify_membership(
    hash: HashAlgorithm,
    claim: &MembershipClaim,
    anchor_digest: &Digest,
    proof: &MembershipProof,
) -> VerificationOutcome {
    use VerificationOutcome::*;

    if claim.position == 0 || claim.position > claim.anchor || claim.anchor > MAX_INDEX {
        return ProofInvalid(InvalidProof::ComponentMalformed);
    }
    let path = match traversal_path(claim.position, claim.anchor) {
        Ok(path) => path,
        Err(_) => return ProofInvalid(InvalidProof::ComponentMalformed),
    };
    if proof.components.len() != path.hop_count() + 1 {
        return ProofInvalid(InvalidProof::CountMismatch);
    }

    let first = &proof.components[0];
    let mut digest = match process_component(hash, claim.position, first) {
        Ok(digest) => digest,
        Err(reason) => return ProofInvalid(reason),
    };
    for (hop, component) in path.hops().iter().zip(&proof.components[1..]) {
        let computed = match process_component(hash, hop.destination, component) {
            Ok(digest) => digest,
            Err(reason) => return ProofInvalid(reason),
        };
        // The hop arrived on level `hop.level`, so the component's
        // predecessor at that level names the element just left.
        if component.predecessors[hop.level as usize] != digest {
            return ProofInvalid(InvalidProof::ContinuityBreak);
        }
        digest = computed;
    }
    if digest != *anchor_digest {
        return ProofInvalid(InvalidProof::AnchorMismatch);
    }
    if first.datum == claim.datum {
        ClaimTrue
    } else {
        ClaimFalse
    }
}

/// Process one advancement component: the hop of level `level` leaves
/// element `j`, whose authenticator is `digest`, with basis `basis`.
/// Returns the basis for the hop's destination.
///
/// The update mirrors binary addition without carry when slot `level` is
/// free; otherwise every occupied slot on the carry chain must agree with
/// the corresponding authenticator in the component, and the chain's last
/// value moves up to the first free slot.
pub fn process_advancement_component(
    j: ElementIndex,
    digest: &Digest,
    mut basis: Basis,
    component: &ProofComponent,
    level: Level,
) -> Result<Basis, AdvancementError> {
    let span = 1u64
        .checked_shl(level as u32)
        .ok_or(AdvancementError::ComponentMalformed)?;
    if j & (span - 1) != 0 {
        return Err(AdvancementError::ComponentMalformed);
    }
    let destination = j
        .checked_add(span)
        .filter(|&d| d <= MAX_INDEX)
        .ok_or(AdvancementError::ComponentMalformed)?;
    let top = max_level(destination).map_err(|_| AdvancementError::ComponentMalformed)?;
    if component.predecessors.len() != top as usize + 1 {
        return Err(AdvancementError::ComponentMalformed);
    }

    if basis.slot(level).is_none() {
        basis.put(level, digest.clone());
        return Ok(basis);
    }
    let mut slot = level;
    let mut carry = None;
    while let Some(held) = basis.slot(slot) {
        let reported = component
            .predecessors
            .get(slot as usize + 1)
            .ok_or(AdvancementError::ComponentMalformed)?;
        if held != reported {
            return Err(AdvancementError::BasisConflict { slot });
        }
        carry = Some(held.clone());
        basis.clear(slot);
        slot += 1;
    }
    basis.put(slot, carry.expect("carry loop ran at least once"));
    Ok(basis)
}

/// Verdict of comparing two verified membership claims for temporal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalVerdict {
    /// The first claim's datum was committed before the second's anchor
    /// was issued, hence before the second datum.
    CommittedBefore,
    NoOrderEstablished,
}

impl fmt::Display for TemporalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemporalVerdict::CommittedBefore => "A-committed-before-B",
            TemporalVerdict::NoOrderEstablished => "no-order-established",
        })
    }
}

/// Establish, from two verified membership claims on the same log, whether
/// claim A's datum was necessarily known to the maintainer before claim
/// B's. That holds when both proofs check out and A's anchor does not come
/// after B's position.
#[allow(clippy::too_many_arguments)]
pub fn check_temporal_order(
    hash: HashAlgorithm,
    claim_a: &MembershipClaim,
    proof_a: &MembershipProof,
    digest_a: &Digest,
    claim_b: &MembershipClaim,
    proof_b: &MembershipProof,
    digest_b: &Digest,
) -> Result<TemporalVerdict, InvalidProof> {
    let outcome_a = verify_membership(hash, claim_a, digest_a, proof_a);
    let outcome_b = verify_membership(hash, claim_b, digest_b, proof_b);
    for outcome in [outcome_a, outcome_b] {
        if let VerificationOutcome::ProofInvalid(reason) = outcome {
            return Err(reason);
        }
    }
    if outcome_a.is_true() && outcome_b.is_true() && claim_a.anchor <= claim_b.position {
        Ok(TemporalVerdict::CommittedBefore)
    } else {
        Ok(TemporalVerdict::NoOrderEstablished)
    }
}
