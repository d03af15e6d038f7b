//! Authenticated append-only skip lists: a tamper-evident log engine.
//!
//! A maintainer appends data elements and publishes succinct one-way
//! digests that commit to the whole sequence and its order. A verifier who
//! retains only the latest size, digest and a small [`verifier::Basis`] of
//! reusable authenticators can check membership claims against any digest
//! it holds, follow the log as it grows through advancement proofs, and
//! detect any attempt by a malicious maintainer to rewrite or equivocate
//! about committed history.
//!
//! The crate splits along the trust boundary:
//!
//! * [`skiplist`] — deterministic traversal arithmetic shared by both sides.
//! * [`authenticator`] — the hashing rules and canonical byte encoding.
//! * [`proof`] — proof components and the proof wire format.
//! * [`log`] — the maintainer: appends, digests, proof construction.
//! * [`storage`] — the durable file format behind a maintainer log.
//! * [`verifier`] — the remote verifier: membership and advancement checks.
//! * [`adversary`] — executable attack scenarios and the forgery kit used
//!   to demonstrate why bases are necessary.
//!
//! ```
//! use aasl_core::{
//!     verify_membership, Log, LogConfig, MembershipClaim, VerificationOutcome, VerifierState,
//! };
//!
//! // Maintainer: append elements and publish digests.
//! let mut log = Log::create(LogConfig::new(8, 0)?)?;
//! for word in [b"ratified", b"recorded", b"disputed"] {
//!     log.append(word, &[])?;
//! }
//!
//! // Verifier: follow the log from its genesis, then check a claim.
//! let state = VerifierState::genesis(log.config().hash, log.config().genesis.clone());
//! let state = state.verify_advancement(3, &log.digest()?, &log.build_advancement_proof(0, 3)?)?;
//!
//! let claim = MembershipClaim { position: 2, anchor: 3, datum: b"recorded".to_vec() };
//! let proof = log.build_membership_proof(2, 3)?;
//! assert_eq!(
//!     verify_membership(log.config().hash, &claim, state.digest(), &proof),
//!     VerificationOutcome::ClaimTrue,
//! );
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod adversary;
pub mod authenticator;
pub mod log;
pub mod proof;
pub mod skiplist;
pub mod storage;
pub mod verifier;

pub use authenticator::{genesis_digest, Digest, HashAlgorithm};
pub use log::{
    AuditReport, ElementEntry, EntryRecord, EntryStore, Log, LogConfig, LogError, MemStore,
};
pub use proof::{AdvancementProof, MembershipProof, ProofComponent, ProofLayout};
pub use skiplist::{
    hop_level, max_level, traversal_path, ElementIndex, Hop, Level, TraversalPath, MAX_INDEX,
};
pub use storage::{
    audit_file, open_or_create, open_read_only, open_writable, FileStore, StorageError,
};
pub use verifier::{
    check_temporal_order, process_advancement_component, process_component, verify_membership,
    AdvancementError, Basis, InvalidProof, MembershipClaim, TemporalVerdict, VerificationOutcome,
    VerifierState,
};
