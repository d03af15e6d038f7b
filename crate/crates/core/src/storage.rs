//! Durable file representation of a log: a fixed preamble followed by
//! fixed-stride element entries, appended with a write-then-commit order.
//!
//! ```text
//! preamble (26 bytes, all integers big-endian):
//!   magic "AASL" | format version u16 | hash id u16 | digest width u16 |
//!   sensitive length u32 | insensitive length u32 | last index u64
//! entry k at offset 26 + k * (sensitive + insensitive + digest width):
//!   sensitive datum | insensitive data | authenticator
//! ```
//!
//! Entry 0 is the genesis sentinel: zero-filled data sections, genesis
//! digest in the authenticator section. A record is flushed before the
//! preamble's last-index advances past it, so a crash between the two
//! leaves a file that reopens at the old size; bytes past the committed
//! last index are ignored.

use std::fs::{File, OpenOptions};
use std::io;
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use fs2::FileExt as _;
use thiserror::Error;

use crate::authenticator::{Digest, HashAlgorithm};
use crate::log::{EntryRecord, EntryStore, Log, LogConfig, LogError};
use crate::skiplist::{ElementIndex, MAX_INDEX};

pub const MAGIC: [u8; 4] = *b"AASL";
pub const FORMAT_VERSION: u16 = 1;
pub const PREAMBLE_LEN: u64 = 26;

const LAST_INDEX_OFFSET: u64 = 18;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a log file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown hash algorithm id {0}")]
    UnknownHashAlgorithm(u16),
    #[error("preamble digest width {stated} does not match the hash output width {expected}")]
    DigestWidth { stated: u16, expected: usize },
    #[error("preamble is corrupt: {0}")]
    PreambleCorrupt(&'static str),
    #[error("file ends before committed record {index}")]
    TruncatedRecord { index: u64 },
    #[error("existing log disagrees with the requested config on {0}")]
    ConfigMismatch(&'static str),
    #[error("another process holds the write lock")]
    WriteLocked,
}

/// Parsed preamble of a log file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilePreamble {
    pub format_version: u16,
    pub hash_id: u16,
    pub digest_width: u16,
    pub sensitive_len: u32,
    pub insensitive_len: u32,
    pub last_index: u64,
}

impl FilePreamble {
    fn for_config(config: &LogConfig) -> Self {
        FilePreamble {
            format_version: FORMAT_VERSION,
            hash_id: config.hash.id(),
            digest_width: config.hash.output_width() as u16,
            sensitive_len: config.sensitive_len,
            insensitive_len: config.insensitive_len,
            last_index: 0,
        }
    }

    fn to_bytes(self) -> [u8; PREAMBLE_LEN as usize] {
        let mut out = [0u8; PREAMBLE_LEN as usize];
        out[..4].copy_from_slice(&MAGIC);
        out[4..6].copy_from_slice(&self.format_version.to_be_bytes());
        out[6..8].copy_from_slice(&self.hash_id.to_be_bytes());
        out[8..10].copy_from_slice(&self.digest_width.to_be_bytes());
        out[10..14].copy_from_slice(&self.sensitive_len.to_be_bytes());
        out[14..18].copy_from_slice(&self.insensitive_len.to_be_bytes());
        out[18..26].copy_from_slice(&self.last_index.to_be_bytes());
        out
    }

    fn from_bytes(bytes: &[u8; PREAMBLE_LEN as usize]) -> Result<Self, StorageError> {
        if bytes[..4] != MAGIC {
            return Err(StorageError::BadMagic);
        }
        let preamble = FilePreamble {
            format_version: u16::from_be_bytes(bytes[4..6].try_into().unwrap()),
            hash_id: u16::from_be_bytes(bytes[6..8].try_into().unwrap()),
            digest_width: u16::from_be_bytes(bytes[8..10].try_into().unwrap()),
            sensitive_len: u32::from_be_bytes(bytes[10..14].try_into().unwrap()),
            insensitive_len: u32::from_be_bytes(bytes[14..18].try_into().unwrap()),
            last_index: u64::from_be_bytes(bytes[18..26].try_into().unwrap()),
        };
        if preamble.format_version != FORMAT_VERSION {
            return Err(StorageError::UnsupportedVersion(preamble.format_version));
        }
        let hash = HashAlgorithm::from_id(preamble.hash_id)
            .ok_or(StorageError::UnknownHashAlgorithm(preamble.hash_id))?;
        if preamble.digest_width as usize != hash.output_width() {
            return Err(StorageError::DigestWidth {
                stated: preamble.digest_width,
                expected: hash.output_width(),
            });
        }
        if preamble.sensitive_len == 0 {
            return Err(StorageError::PreambleCorrupt("sensitive length is zero"));
        }
        if preamble.last_index > MAX_INDEX {
            return Err(StorageError::PreambleCorrupt("last index exceeds 2^63"));
        }
        Ok(preamble)
    }
}

/// How a file store is opened. Writers take an exclusive advisory lock;
/// read-only handles take none and observe the state committed at open
/// time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    ReadWrite,
    ReadOnly,
}

/// File-backed entry store with fixed-stride random access.
#[derive(Debug)]
pub struct FileStore {
    file: File,
    config: LogConfig,
    last_index: u64,
    access: Access,
}

impl FileStore {
    /// Create a fresh log file. Fails if the path already exists.
    pub fn create_new(path: &Path, config: LogConfig) -> Result<Self, StorageError> {
        let config = config.validated().map_err(invalid_config)?;
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create_new(true)
            .open(path)?;
        lock_exclusive(&file)?;
        let preamble = FilePreamble::for_config(&config);
        file.write_all(&preamble.to_bytes())?;
        // Sentinel entry 0: inconsequential data, genesis authenticator.
        file.write_all(&vec![
            0;
            config.sensitive_len as usize
                + config.insensitive_len as usize
        ])?;
        file.write_all(config.genesis.as_bytes())?;
        file.sync_all()?;
        Ok(FileStore {
            file,
            config,
            last_index: 0,
            access: Access::ReadWrite,
        })
    }

    /// Open an existing log file and validate its shape. When an expected
    /// config is given, every field of it (the genesis digest included)
    /// must match the file.
    pub fn open(
        path: &Path,
        access: Access,
        expected: Option<&LogConfig>,
    ) -> Result<Self, StorageError> {
        let mut file = match access {
            Access::ReadWrite => OpenOptions::new().read(true).write(true).open(path)?,
            Access::ReadOnly => OpenOptions::new().read(true).open(path)?,
        };
        if access == Access::ReadWrite {
            lock_exclusive(&file)?;
        }
        let mut preamble_bytes = [0u8; PREAMBLE_LEN as usize];
        file.seek(SeekFrom::Start(0))?;
        read_fully(&mut file, &mut preamble_bytes)
            .map_err(|_| StorageError::PreambleCorrupt("file shorter than the preamble"))?;
        let preamble = FilePreamble::from_bytes(&preamble_bytes)?;
        let hash = HashAlgorithm::from_id(preamble.hash_id).expect("validated above");

        let record_size = preamble.sensitive_len as u64
            + preamble.insensitive_len as u64
            + preamble.digest_width as u64;
        // Every committed record must be fully present; trailing bytes past
        // the committed last index are ignored.
        let needed = PREAMBLE_LEN + (preamble.last_index + 1) * record_size;
        if file.metadata()?.len() < needed {
            return Err(StorageError::TruncatedRecord {
                index: preamble.last_index,
            });
        }

        // The genesis digest lives in the sentinel's authenticator section.
        let genesis_offset =
            PREAMBLE_LEN + preamble.sensitive_len as u64 + preamble.insensitive_len as u64;
        file.seek(SeekFrom::Start(genesis_offset))?;
        let mut genesis = vec![0u8; preamble.digest_width as usize];
        read_fully(&mut file, &mut genesis)?;

        let config = LogConfig {
            sensitive_len: preamble.sensitive_len,
            insensitive_len: preamble.insensitive_len,
            hash,
            genesis: Digest::from_bytes(genesis),
        };
        if let Some(expected) = expected {
            if expected.hash != config.hash {
                return Err(StorageError::ConfigMismatch("hash algorithm"));
            }
            if expected.sensitive_len != config.sensitive_len {
                return Err(StorageError::ConfigMismatch("sensitive length"));
            }
            if expected.insensitive_len != config.insensitive_len {
                return Err(StorageError::ConfigMismatch("insensitive length"));
            }
            if expected.genesis != config.genesis {
                return Err(StorageError::ConfigMismatch("genesis digest"));
            }
        }
        Ok(FileStore {
            file,
            config,
            last_index: preamble.last_index,
            access,
        })
    }

    pub fn access(&self) -> Access {
        self.access
    }

    pub fn preamble(&self) -> FilePreamble {
        FilePreamble {
            last_index: self.last_index,
            ..FilePreamble::for_config(&self.config)
        }
    }

    fn record_size(&self) -> u64 {
        self.config.sensitive_len as u64
            + self.config.insensitive_len as u64
            + self.config.hash.output_width() as u64
    }

    fn offset(&self, index: ElementIndex) -> u64 {
        PREAMBLE_LEN + index * self.record_size()
    }

    fn commit_last_index(&mut self, index: u64) -> Result<(), StorageError> {
        self.file.seek(SeekFrom::Start(LAST_INDEX_OFFSET))?;
        self.file.write_all(&index.to_be_bytes())?;
        self.file.sync_data()?;
        self.last_index = index;
        Ok(())
    }

    fn require_writable(&self) -> Result<(), LogError> {
        if self.access == Access::ReadOnly {
            return Err(LogError::Storage(StorageError::Io(io::Error::new(
                io::ErrorKind::PermissionDenied,
                "store opened read-only",
            ))));
        }
        Ok(())
    }
}

impl EntryStore for FileStore {
    fn config(&self) -> &LogConfig {
        &self.config
    }

    fn len(&self) -> u64 {
        self.last_index
    }

    fn read_record(&self, index: ElementIndex) -> Result<EntryRecord, LogError> {
        if index > self.last_index {
            return Err(LogError::OutOfRange {
                index,
                size: self.last_index,
            });
        }
        let mut buf = vec![0u8; self.record_size() as usize];
        read_at(&self.file, self.offset(index), &mut buf)
            .map_err(|_| StorageError::TruncatedRecord { index })?;
        let sensitive_len = self.config.sensitive_len as usize;
        let insensitive_len = self.config.insensitive_len as usize;
        let insensitive_end = sensitive_len + insensitive_len;
        Ok(EntryRecord {
            sensitive: buf[..sensitive_len].to_vec(),
            insensitive: buf[sensitive_len..insensitive_end].to_vec(),
            authenticator: Digest::from_bytes(buf[insensitive_end..].to_vec()),
        })
    }

    fn append_record(&mut self, record: EntryRecord) -> Result<(), LogError> {
        self.require_writable()?;
        let index = self.last_index + 1;
        let mut buf = Vec::with_capacity(self.record_size() as usize);
        buf.extend_from_slice(&record.sensitive);
        buf.extend_from_slice(&record.insensitive);
        buf.extend_from_slice(record.authenticator.as_bytes());
        // Write and flush the record, then advance the commit point.
        self.file
            .seek(SeekFrom::Start(self.offset(index)))
            .map_err(StorageError::from)?;
        self.file.write_all(&buf).map_err(StorageError::from)?;
        self.file.sync_data().map_err(StorageError::from)?;
        self.commit_last_index(index)?;
        Ok(())
    }

    fn write_insensitive(&mut self, index: ElementIndex, bytes: &[u8]) -> Result<(), LogError> {
        self.require_writable()?;
        if index == 0 || index > self.last_index {
            return Err(LogError::OutOfRange {
                index,
                size: self.last_index,
            });
        }
        let offset = self.offset(index) + self.config.sensitive_len as u64;
        self.file
            .seek(SeekFrom::Start(offset))
            .map_err(StorageError::from)?;
        self.file.write_all(bytes).map_err(StorageError::from)?;
        self.file.sync_data().map_err(StorageError::from)?;
        Ok(())
    }
}

/// Open the log at `path`, creating it when absent. An existing file must
/// agree with `config` on every field.
pub fn open_or_create(path: &Path, config: LogConfig) -> Result<Log<FileStore>, StorageError> {
    let store = if path.exists() {
        FileStore::open(path, Access::ReadWrite, Some(&config))?
    } else {
        FileStore::create_new(path, config)?
    };
    Ok(Log::from_store(store))
}

/// Open an existing log without holding the write lock.
pub fn open_read_only(path: &Path) -> Result<Log<FileStore>, StorageError> {
    Ok(Log::from_store(FileStore::open(
        path,
        Access::ReadOnly,
        None,
    )?))
}

/// Open an existing log for appending.
pub fn open_writable(path: &Path) -> Result<Log<FileStore>, StorageError> {
    Ok(Log::from_store(FileStore::open(
        path,
        Access::ReadWrite,
        None,
    )?))
}

/// Recompute the whole authenticator column of the log at `path` and
/// report the first index where the stored value differs, if any.
pub fn audit_file(path: &Path) -> Result<crate::log::AuditReport, LogError> {
    let log = open_read_only(path)?;
    log.audit()
}

fn lock_exclusive(file: &File) -> Result<(), StorageError> {
    file.try_lock_exclusive().map_err(|err| {
        if err.kind() == io::ErrorKind::WouldBlock {
            StorageError::WriteLocked
        } else {
            StorageError::Io(err)
        }
    })
}

fn read_fully(mut file: impl Read, buf: &mut [u8]) -> Result<(), StorageError> {
    file.read_exact(buf)?;
    Ok(())
}

/// Positioned read that leaves no shared cursor behind, so read-only
/// handles can serve concurrent callers.
#[cfg(unix)]
fn read_at(file: &File, offset: u64, buf: &mut [u8]) -> io::Result<()> {
    use std::os::unix::fs::FileExt as _;
    file.read_exact_at(buf, offset)
}

#[cfg(not(unix))]
fn read_at(mut file: &File, offset: u64, buf: &mut [u8]) -> io::Result<()> {
    file.seek(SeekFrom::Start(offset))?;
    file.read_exact(buf)
}

fn invalid_config(err: LogError) -> StorageError {
    StorageError::Io(io::Error::new(io::ErrorKind::InvalidInput, err.to_string()))
}
