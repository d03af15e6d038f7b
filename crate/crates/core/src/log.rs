//! Maintainer side: the append-only element sequence, its authenticator
//! chain, and construction of proof components, membership proofs and
//! advancement proofs.
//!
//! A [`Log`] is generic over its [`EntryStore`]; [`MemStore`] keeps entries
//! in memory and the storage module provides the durable file backend.
//! Sensitive data and authenticators are immutable once appended;
//! insensitive data never influence authenticators and may be rewritten at
//! will.

use thiserror::Error;

use crate::authenticator::{
    element_authenticator, genesis_digest, AuthenticatorError, Digest, HashAlgorithm,
};
use crate::proof::{AdvancementProof, MembershipProof, ProofComponent};
use crate::skiplist::{max_level, traversal_path, ElementIndex, TraversalError, MAX_INDEX};
use crate::storage::StorageError;

/// Per-log configuration, fixed at creation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogConfig {
    /// Length in bytes of the sensitive datum of every element.
    pub sensitive_len: u32,
    /// Length in bytes of the insensitive data of every element; may be 0.
    pub insensitive_len: u32,
    pub hash: HashAlgorithm,
    /// Agreed authenticator of the genesis sentinel.
    pub genesis: Digest,
}

impl LogConfig {
    /// Configuration with the default hash and the all-zero genesis digest.
    pub fn new(sensitive_len: u32, insensitive_len: u32) -> Result<Self, LogError> {
        let hash = HashAlgorithm::default();
        LogConfig {
            sensitive_len,
            insensitive_len,
            hash,
            genesis: genesis_digest(hash),
        }
        .validated()
    }

    pub fn with_hash(mut self, hash: HashAlgorithm) -> Result<Self, LogError> {
        self.hash = hash;
        self.genesis = genesis_digest(hash);
        self.validated()
    }

    pub fn with_genesis(mut self, genesis: Digest) -> Result<Self, LogError> {
        self.genesis = genesis;
        self.validated()
    }

    pub fn validated(self) -> Result<Self, LogError> {
        if self.sensitive_len == 0 {
            return Err(LogError::ZeroSensitiveLength);
        }
        if self.genesis.width() != self.hash.output_width() {
            return Err(LogError::GenesisWidth {
                expected: self.hash.output_width(),
                actual: self.genesis.width(),
            });
        }
        Ok(self)
    }
}

/// Stored form of one element: data section plus authenticator section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryRecord {
    pub sensitive: Vec<u8>,
    pub insensitive: Vec<u8>,
    pub authenticator: Digest,
}

/// An element entry together with its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementEntry {
    pub index: ElementIndex,
    pub sensitive: Vec<u8>,
    pub insensitive: Vec<u8>,
    pub authenticator: Digest,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("sensitive length must be at least 1")]
    ZeroSensitiveLength,
    #[error("genesis digest is {actual} bytes wide, the hash produces {expected}")]
    GenesisWidth { expected: usize, actual: usize },
    #[error("sensitive datum is {actual} bytes, the log takes {expected}")]
    SensitiveLength { expected: usize, actual: usize },
    #[error("insensitive data is {actual} bytes, the log takes {expected}")]
    InsensitiveLength { expected: usize, actual: usize },
    #[error("index {index} out of range for a log of {size} elements")]
    OutOfRange { index: ElementIndex, size: u64 },
    #[error("log reached the 2^63 element ceiling")]
    Full,
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error(transparent)]
    Authenticator(#[from] AuthenticatorError),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Persistence backing a [`Log`]. Record 0 is the genesis sentinel; real
/// elements are stored at their 1-based index.
pub trait EntryStore {
    fn config(&self) -> &LogConfig;

    /// Number of real elements; the sentinel is not counted.
    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Record at `index`, `0..=len`.
    fn read_record(&self, index: ElementIndex) -> Result<EntryRecord, LogError>;

    /// Persist the record for element `len + 1` and commit it.
    fn append_record(&mut self, record: EntryRecord) -> Result<(), LogError>;

    /// Rewrite the insensitive bytes of an existing element in place.
    fn write_insensitive(&mut self, index: ElementIndex, bytes: &[u8]) -> Result<(), LogError>;
}

/// In-memory store; the test and scenario backend.
#[derive(Debug, Clone)]
pub struct MemStore {
    config: LogConfig,
    records: Vec<EntryRecord>,
}

impl MemStore {
    pub fn new(config: LogConfig) -> Result<Self, LogError> {
        let config = config.validated()?;
        let sentinel = EntryRecord {
            sensitive: vec![0; config.sensitive_len as usize],
            insensitive: vec![0; config.insensitive_len as usize],
            authenticator: config.genesis.clone(),
        };
        Ok(MemStore {
            config,
            records: vec![sentinel],
        })
    }
}

impl EntryStore for MemStore {
    fn config(&self) -> &LogConfig {
        &self.config
    }

    fn len(&self) -> u64 {
        self.records.len() as u64 - 1
    }

    fn read_record(&self, index: ElementIndex) -> Result<EntryRecord, LogError> {
        self.records
            .get(index as usize)
            .cloned()
            .ok_or(LogError::OutOfRange {
                index,
                size: self.len(),
            })
    }

    fn append_record(&mut self, record: EntryRecord) -> Result<(), LogError> {
        self.records.push(record);
        Ok(())
    }

    fn write_insensitive(&mut self, index: ElementIndex, bytes: &[u8]) -> Result<(), LogError> {
        let size = self.len();
        if index == 0 || index > size {
            return Err(LogError::OutOfRange { index, size });
        }
        self.records[index as usize].insensitive = bytes.to_vec();
        Ok(())
    }
}

/// Result of recomputing the whole authenticator column from the data
/// column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Elements examined (the sentinel included as element 0).
    pub elements: u64,
    /// First index whose stored authenticator differs from the recomputed
    /// one, if any.
    pub first_mismatch: Option<ElementIndex>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// An authenticated append-only log over some entry store.
#[derive(Debug)]
pub struct Log<S: EntryStore> {
    store: S,
}

impl Log<MemStore> {
    /// Fresh in-memory log holding only the genesis sentinel.
    pub fn create(config: LogConfig) -> Result<Self, LogError> {
        Ok(Log {
            store: MemStore::new(config)?,
        })
    }
}

impl<S: EntryStore> Log<S> {
    /// Wrap an already-validated store.
    pub fn from_store(store: S) -> Self {
        Log { store }
    }

    pub fn store(&self) -> &S {
        &self.store
    }

    pub fn into_store(self) -> S {
        self.store
    }

    pub fn config(&self) -> &LogConfig {
        self.store.config()
    }

    /// Number of real elements.
    pub fn size(&self) -> u64 {
        self.store.len()
    }

    /// The current commitment: the authenticator of the last element, or
    /// the genesis digest for an empty log.
    pub fn digest(&self) -> Result<Digest, LogError> {
        self.digest_at(self.size())
    }

    /// Stored authenticator of element `n`; the genesis digest for `n = 0`.
    pub fn digest_at(&self, n: ElementIndex) -> Result<Digest, LogError> {
        if n > self.size() {
            return Err(LogError::OutOfRange {
                index: n,
                size: self.size(),
            });
        }
        Ok(self.store.read_record(n)?.authenticator)
    }

    pub fn entry(&self, index: ElementIndex) -> Result<ElementEntry, LogError> {
        let record = self.store.read_record(index)?;
        Ok(ElementEntry {
            index,
            sensitive: record.sensitive,
            insensitive: record.insensitive,
            authenticator: record.authenticator,
        })
    }

    /// Append a new element. Computes its authenticator from the stored
    /// predecessor authenticators, persists the entry, and returns the new
    /// index together with the new log digest.
    pub fn append(
        &mut self,
        sensitive: &[u8],
        insensitive: &[u8],
    ) -> Result<(ElementIndex, Digest), LogError> {
        let config = self.store.config();
        if sensitive.len() != config.sensitive_len as usize {
            return Err(LogError::SensitiveLength {
                expected: config.sensitive_len as usize,
                actual: sensitive.len(),
            });
        }
        if insensitive.len() != config.insensitive_len as usize {
            return Err(LogError::InsensitiveLength {
                expected: config.insensitive_len as usize,
                actual: insensitive.len(),
            });
        }
        let hash = config.hash;
        let index = self
            .size()
            .checked_add(1)
            .filter(|&i| i <= MAX_INDEX)
            .ok_or(LogError::Full)?;
        let predecessors = self.predecessors(index)?;
        let authenticator = element_authenticator(hash, index, sensitive, &predecessors)?;
        self.store.append_record(EntryRecord {
            sensitive: sensitive.to_vec(),
            insensitive: insensitive.to_vec(),
            authenticator: authenticator.clone(),
        })?;
        Ok((index, authenticator))
    }

    /// Rewrite element `index`'s insensitive bytes. Sensitive data and
    /// authenticators stay immutable.
    pub fn set_insensitive(&mut self, index: ElementIndex, bytes: &[u8]) -> Result<(), LogError> {
        let expected = self.config().insensitive_len as usize;
        if bytes.len() != expected {
            return Err(LogError::InsensitiveLength {
                expected,
                actual: bytes.len(),
            });
        }
        self.store.write_insensitive(index, bytes)
    }

    /// Stored authenticators of `index`'s predecessors, level order.
    fn predecessors(&self, index: ElementIndex) -> Result<Vec<Digest>, LogError> {
        let top = max_level(index)?;
        (0..=top)
            .map(|level| self.digest_at(index - (1u64 << level)))
            .collect()
    }

    /// Proof component for element `j`: its datum plus the authenticators
    /// of its predecessors on every list it participates in.
    pub fn build_component(&self, j: ElementIndex) -> Result<ProofComponent, LogError> {
        if j == 0 || j > self.size() {
            return Err(LogError::OutOfRange {
                index: j,
                size: self.size(),
            });
        }
        let datum = self.store.read_record(j)?.sensitive;
        let predecessors = self.predecessors(j)?;
        Ok(ProofComponent {
            datum,
            predecessors,
        })
    }

    /// Membership proof for element `i` verifiable against the `n`-th
    /// authenticator: one component per traversal element, element `i`
    /// itself first. `i = n` yields the single component for `i`.
    pub fn build_membership_proof(
        &self,
        i: ElementIndex,
        n: ElementIndex,
    ) -> Result<MembershipProof, LogError> {
        if i == 0 || i > n || n > self.size() {
            return Err(LogError::OutOfRange {
                index: if i == 0 || i > n { i } else { n },
                size: self.size(),
            });
        }
        let path = traversal_path(i, n)?;
        let mut components = Vec::with_capacity(path.hop_count() + 1);
        components.push(self.build_component(i)?);
        for hop in path.hops() {
            components.push(self.build_component(hop.destination)?);
        }
        Ok(MembershipProof { components })
    }

    /// Advancement proof carrying a verifier from the `i`-th digest to the
    /// `n`-th: one component per traversal element strictly after `i`.
    pub fn build_advancement_proof(
        &self,
        i: ElementIndex,
        n: ElementIndex,
    ) -> Result<AdvancementProof, LogError> {
        if i >= n || n > self.size() {
            return Err(LogError::OutOfRange {
                index: n,
                size: self.size(),
            });
        }
        let path = traversal_path(i, n)?;
        let components = path
            .hops()
            .iter()
            .map(|hop| self.build_component(hop.destination))
            .collect::<Result<_, _>>()?;
        Ok(AdvancementProof { components })
    }

    /// Rebuild the entire authenticator column from the data column and
    /// report the first index, if any, where the stored value differs.
    /// Corruption is a report, not an error.
    pub fn audit(&self) -> Result<AuditReport, LogError> {
        let size = self.size();
        let config = self.store.config();
        let hash = config.hash;
        let genesis = config.genesis.clone();

        let sentinel = self.store.read_record(0)?;
        if sentinel.authenticator != genesis {
            return Ok(AuditReport {
                elements: size + 1,
                first_mismatch: Some(0),
            });
        }

        let mut recomputed: Vec<Digest> = Vec::with_capacity(size as usize + 1);
        recomputed.push(genesis);
        for index in 1..=size {
            let record = self.store.read_record(index)?;
            let top = max_level(index)?;
            let predecessors: Vec<Digest> = (0..=top)
                .map(|level| recomputed[(index - (1u64 << level)) as usize].clone())
                .collect();
            let expected = element_authenticator(hash, index, &record.sensitive, &predecessors)?;
            if record.authenticator != expected {
                return Ok(AuditReport {
                    elements: size + 1,
                    first_mismatch: Some(index),
                });
            }
            recomputed.push(expected);
        }
        Ok(AuditReport {
            elements: size + 1,
            first_mismatch: None,
        })
    }
}
