//! Operator command line over the log engine: log lifecycle, proof
//! exchange via files, verifier-state management, audits and attack
//! scenarios.
//!
//! Exit codes are a stable contract: 0 for success or a true claim, 2 for
//! a structurally valid proof of a false claim, 1 for anything invalid or
//! erroneous. All hex output is lowercase and unprefixed.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use aasl_core::adversary::run_scenario;
use aasl_core::proof::infer_sensitive_len;
use aasl_core::{
    genesis_digest, open_or_create, open_read_only, open_writable, AdvancementProof, Digest,
    HashAlgorithm, LogConfig, MembershipClaim, MembershipProof, ProofLayout, VerificationOutcome,
    VerifierState,
};

#[derive(Parser)]
#[command(
    name = "aasl",
    version,
    about = "Tamper-evident append-only log with skip-list authenticators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a log file and print its genesis digest.
    Init {
        log: PathBuf,
        /// Sensitive (authenticated) datum length in bytes.
        #[arg(long)]
        sensitive_len: u32,
        /// Insensitive (unauthenticated) data length in bytes.
        #[arg(long, default_value_t = 0)]
        insensitive_len: u32,
        /// Genesis digest as hex; defaults to all zeroes.
        #[arg(long)]
        genesis: Option<String>,
        #[arg(long, default_value = "sha-256")]
        hash: String,
    },
    /// Append one element; prints "index digest".
    Append {
        log: PathBuf,
        /// Sensitive datum, hex or @file.
        #[arg(long)]
        data: String,
        /// Insensitive data, hex or @file; zero-filled when omitted.
        #[arg(long)]
        insensitive: Option<String>,
    },
    /// Print the log digest, optionally at an earlier size.
    Digest {
        log: PathBuf,
        #[arg(long)]
        at: Option<u64>,
    },
    /// Write a membership proof; prints its component count.
    Prove {
        log: PathBuf,
        /// Claimed element position.
        #[arg(long)]
        member: u64,
        /// Anchor element whose digest the verifier holds.
        #[arg(long)]
        anchor: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an advancement proof; prints its component count.
    Advance {
        log: PathBuf,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a membership claim against an anchor digest.
    /// Prints TRUE (exit 0), FALSE (exit 2) or INVALID:<reason> (exit 1).
    Verify {
        /// Claim as "position,anchor,datum" with the datum hex or @file.
        #[arg(long)]
        claim: String,
        /// Anchor digest, hex.
        #[arg(long)]
        digest: String,
        proof: PathBuf,
        #[arg(long, default_value = "sha-256")]
        hash: String,
    },
    /// Verify an advancement proof against a verifier-state file and, on
    /// success, atomically rewrite the state file.
    AdvanceVerify {
        /// Verifier state file; starts from size 0 when absent.
        #[arg(long)]
        state: PathBuf,
        /// Claimed new size.
        #[arg(long)]
        to: u64,
        /// Claimed new digest, hex.
        #[arg(long)]
        digest: String,
        proof: PathBuf,
        /// Agreed genesis digest (hex) used when the state file is absent.
        #[arg(long)]
        genesis: Option<String>,
        #[arg(long, default_value = "sha-256")]
        hash: String,
    },
    /// Recompute every authenticator from the stored data and report the
    /// first mismatch.
    Audit { log: PathBuf },
    /// Run a named attack scenario and print one verdict line per step.
    Scenario { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        // Usage problems are plain errors; exit code 2 stays reserved for
        // structurally valid proofs of false claims.
        Err(err) => {
            eprint!("{err}");
            return ExitCode::FAILURE;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Init {
            log,
            sensitive_len,
            insensitive_len,
            genesis,
            hash,
        } => cmd_init(&log, sensitive_len, insensitive_len, genesis, &hash),
        Command::Append {
            log,
            data,
            insensitive,
        } => cmd_append(&log, &data, insensitive),
        Command::Digest { log, at } => cmd_digest(&log, at),
        Command::Prove {
            log,
            member,
            anchor,
            out,
        } => cmd_prove(&log, member, anchor, &out),
        Command::Advance { log, from, to, out } => cmd_advance(&log, from, to, &out),
        Command::Verify {
            claim,
            digest,
            proof,
            hash,
        } => cmd_verify(&claim, &digest, &proof, &hash),
        Command::AdvanceVerify {
            state,
            to,
            digest,
            proof,
            genesis,
            hash,
        } => cmd_advance_verify(&state, to, &digest, &proof, genesis, &hash),
        Command::Audit { log } => cmd_audit(&log),
        Command::Scenario { name } => cmd_scenario(&name),
    }
}

/// Bytes from a hex string, or from a file when prefixed with `@`. Files
/// are taken verbatim; nothing is padded or truncated.
fn parse_bytes(input: &str) -> Result<Vec<u8>> {
    if let Some(path) = input.strip_prefix('@') {
        return fs::read(path).with_context(|| format!("reading {path}"));
    }
    aasl_core::authenticator::decode_hex(input).with_context(|| format!("decoding hex {input:?}"))
}

fn parse_digest(input: &str) -> Result<Digest> {
    Digest::from_hex(input).with_context(|| format!("decoding digest {input:?}"))
}

fn parse_hash(name: &str) -> Result<HashAlgorithm> {
    HashAlgorithm::from_name(name)
        .with_context(|| format!("unknown hash algorithm {name:?}; use sha-256 or sha-512"))
}

fn cmd_init(
    path: &Path,
    sensitive_len: u32,
    insensitive_len: u32,
    genesis: Option<String>,
    hash: &str,
) -> Result<ExitCode> {
    if path.exists() {
        bail!("{} already exists", path.display());
    }
    let mut config =
        LogConfig::new(sensitive_len, insensitive_len)?.with_hash(parse_hash(hash)?)?;
    if let Some(genesis) = genesis {
        config = config.with_genesis(parse_digest(&genesis)?)?;
    }
    let log = open_or_create(path, config)?;
    println!("{}", log.config().genesis);
    Ok(ExitCode::SUCCESS)
}

fn cmd_append(path: &Path, data: &str, insensitive: Option<String>) -> Result<ExitCode> {
    let mut log = open_writable(path)?;
    let sensitive = parse_bytes(data)?;
    let insensitive = match insensitive {
        Some(input) => parse_bytes(&input)?,
        None => vec![0; log.config().insensitive_len as usize],
    };
    let (index, digest) = log.append(&sensitive, &insensitive)?;
    println!("{index} {digest}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_digest(path: &Path, at: Option<u64>) -> Result<ExitCode> {
    let log = open_read_only(path)?;
    let n = at.unwrap_or_else(|| log.size());
    println!("{}", log.digest_at(n)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_prove(path: &Path, member: u64, anchor: u64, out: &Path) -> Result<ExitCode> {
    let log = open_read_only(path)?;
    let proof = log.build_membership_proof(member, anchor)?;
    fs::write(out, proof.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", proof.component_count());
    Ok(ExitCode::SUCCESS)
}

fn cmd_advance(path: &Path, from: u64, to: u64, out: &Path) -> Result<ExitCode> {
    let log = open_read_only(path)?;
    let proof = log.build_advancement_proof(from, to)?;
    fs::write(out, proof.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", proof.component_count());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(claim: &str, digest: &str, proof_path: &Path, hash: &str) -> Result<ExitCode> {
    let hash = parse_hash(hash)?;
    let mut fields = claim.splitn(3, ',');
    let (position, anchor, datum) = match (fields.next(), fields.next(), fields.next()) {
        (Some(i), Some(n), Some(d)) => (i, n, d),
        _ => bail!("claim must be \"position,anchor,datum\""),
    };
    let claim = MembershipClaim {
        position: position.parse().context("claim position")?,
        anchor: anchor.parse().context("claim anchor")?,
        datum: parse_bytes(datum)?,
    };
    if claim.datum.is_empty() {
        bail!("claim datum is empty");
    }
    let anchor_digest = parse_digest(digest)?;
    if anchor_digest.width() != hash.output_width() {
        bail!(
            "digest is {} bytes, {} produces {}",
            anchor_digest.width(),
            hash.name(),
            hash.output_width()
        );
    }

    let payload =
        fs::read(proof_path).with_context(|| format!("reading {}", proof_path.display()))?;
    let layout = ProofLayout {
        sensitive_len: claim.datum.len(),
        digest_width: anchor_digest.width(),
    };
    let proof = match MembershipProof::from_bytes(&payload, &layout) {
        Ok(proof) => proof,
        Err(_) => {
            println!("INVALID:component-malformed");
            return Ok(ExitCode::FAILURE);
        }
    };
    match aasl_core::verify_membership(hash, &claim, &anchor_digest, &proof) {
        VerificationOutcome::ClaimTrue => {
            println!("TRUE");
            Ok(ExitCode::SUCCESS)
        }
        VerificationOutcome::ClaimFalse => {
            println!("FALSE");
            Ok(ExitCode::from(2))
        }
        VerificationOutcome::ProofInvalid(reason) => {
            println!("INVALID:{reason}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_advance_verify(
    state_path: &Path,
    to: u64,
    digest: &str,
    proof_path: &Path,
    genesis: Option<String>,
    hash: &str,
) -> Result<ExitCode> {
    let hash = parse_hash(hash)?;
    let new_digest = parse_digest(digest)?;
    if new_digest.width() != hash.output_width() {
        bail!(
            "digest is {} bytes, {} produces {}",
            new_digest.width(),
            hash.name(),
            hash.output_width()
        );
    }

    let state = if state_path.exists() {
        let bytes =
            fs::read(state_path).with_context(|| format!("reading {}", state_path.display()))?;
        VerifierState::from_bytes(&bytes, hash)
            .with_context(|| format!("parsing {}", state_path.display()))?
    } else {
        let genesis = match genesis {
            Some(hex) => parse_digest(&hex)?,
            None => genesis_digest(hash),
        };
        VerifierState::genesis(hash, genesis)
    };

    if to <= state.size() {
        println!("INVALID:not-an-advancement");
        return Ok(ExitCode::FAILURE);
    }
    let payload =
        fs::read(proof_path).with_context(|| format!("reading {}", proof_path.display()))?;
    // The wire format is not self-describing; the traversal from the held
    // size to the claimed one pins the datum width exactly.
    let proof = infer_sensitive_len(state.size(), to, hash.output_width(), payload.len()).and_then(
        |sensitive_len| {
            AdvancementProof::from_bytes(
                &payload,
                &ProofLayout {
                    sensitive_len,
                    digest_width: hash.output_width(),
                },
            )
        },
    );
    let proof = match proof {
        Ok(proof) => proof,
        Err(_) => {
            println!("INVALID:component-malformed");
            return Ok(ExitCode::FAILURE);
        }
    };

    match state.verify_advancement(to, &new_digest, &proof) {
        Ok(next) => {
            write_atomically(state_path, &next.to_bytes())?;
            println!("{} {}", next.size(), next.digest());
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => {
            println!("INVALID:{}", err.reason());
            Ok(ExitCode::FAILURE)
        }
    }
}

/// Write through a sibling temp file and rename, so a rejected or
/// interrupted update never touches the original.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut temp = path.as_os_str().to_owned();
    temp.push(".tmp");
    let temp = PathBuf::from(temp);
    {
        let mut file =
            fs::File::create(&temp).with_context(|| format!("creating {}", temp.display()))?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&temp, path).with_context(|| format!("renaming over {}", path.display()))?;
    Ok(())
}

fn cmd_audit(path: &Path) -> Result<ExitCode> {
    let report = aasl_core::storage::audit_file(path)?;
    match report.first_mismatch {
        None => {
            println!("clean {}", report.elements - 1);
            Ok(ExitCode::SUCCESS)
        }
        Some(index) => {
            println!("mismatch {index}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_scenario(name: &str) -> Result<ExitCode> {
    let report = run_scenario(name)?;
    print!("{report}");
    Ok(if report.all_expected() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
