//! Executable attack scenarios against the verifier.
//!
//! The centerpiece is the cross-version equivocation forgery: a malicious
//! maintainer derives two well-formed authenticators for position 8 over
//! different data, commits version 1 through one of them and version 2
//! through the other, and can then prove conflicting membership claims to
//! stateless verifiers. A basis-tracking verifier rejects the second
//! advancement instead. Forgeries are assembled straight from the hashing
//! primitives; the adversary controls hash inputs, not the library's
//! integrity rails.

use std::fmt;

use thiserror::Error;

use crate::authenticator::{element_authenticator, AuthenticatorError, Digest};
use crate::log::{EntryStore, Log, LogConfig, LogError, MemStore};
use crate::proof::{AdvancementProof, MembershipProof, ProofComponent};
use crate::verifier::{verify_membership, MembershipClaim, VerificationOutcome, VerifierState};

pub const SCENARIOS: &[&str] = &[
    "need-for-bases",
    "bit-flip-proof",
    "bit-flip-store",
    "wrong-count",
    "replay-stale-digest",
];

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("forgery prefix must hold exactly 7 elements, got {0}")]
    PrefixSize(u64),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Authenticator(#[from] AuthenticatorError),
}

/// Everything the cross-version forgery produces: two rival authenticators for
/// position 8, the two version digests built over them, and the proofs the
/// maintainer would hand out.
#[derive(Debug, Clone)]
pub struct ForgeryKit {
    /// T^8 over the datum the maintainer later wants at position 8.
    pub authenticator_8: Digest,
    /// T^8' over the datum committed in version 1.
    pub authenticator_8_alt: Digest,
    /// Version 1 digest T^9, chained over T^8'.
    pub version1_digest: Digest,
    /// Version 2 digest T^10, mixing T^9 with the rival T^8.
    pub version2_digest: Digest,
    /// A^{0,9}: advancement from the empty log to version 1.
    pub advancement_to_9: AdvancementProof,
    /// A^{9,10}: the forged advancement from version 1 to version 2.
    pub advancement_9_to_10: AdvancementProof,
    /// Claim and proof placing the alternate datum at position 8 of
    /// version 1.
    pub claim_v1: MembershipClaim,
    pub proof_v1: MembershipProof,
    /// Conflicting claim and proof placing the original datum at position
    /// 8 of version 2.
    pub claim_v2: MembershipClaim,
    pub proof_v2: MembershipProof,
}

/// Construct the cross-version forgery over an honest 7-element prefix.
/// `d8` and `d8_alt` are the two rival data for position 8; `d9` and `d10`
/// fill the later positions.
pub fn build_forgery<S: EntryStore>(
    prefix: &Log<S>,
    d8: &[u8],
    d8_alt: &[u8],
    d9: &[u8],
    d10: &[u8],
) -> Result<ForgeryKit, AdversaryError> {
    if prefix.size() != 7 {
        return Err(AdversaryError::PrefixSize(prefix.size()));
    }
    let hash = prefix.config().hash;
    let preds_8 = vec![
        prefix.digest_at(7)?,
        prefix.digest_at(6)?,
        prefix.digest_at(4)?,
        prefix.digest_at(0)?,
    ];

    // Two well-formed authenticators for position 8 over rival data.
    let authenticator_8 = element_authenticator(hash, 8, d8, &preds_8)?;
    let authenticator_8_alt = element_authenticator(hash, 8, d8_alt, &preds_8)?;

    // Version 1 chains element 9 over the alternate T^8'.
    let version1_digest =
        element_authenticator(hash, 9, d9, std::slice::from_ref(&authenticator_8_alt))?;

    // Version 2 mixes T^9 (from the T^8' lineage) with the rival T^8.
    let version2_digest = element_authenticator(
        hash,
        10,
        d10,
        &[version1_digest.clone(), authenticator_8.clone()],
    )?;

    let component_8 = ProofComponent {
        datum: d8.to_vec(),
        predecessors: preds_8.clone(),
    };
    let component_8_alt = ProofComponent {
        datum: d8_alt.to_vec(),
        predecessors: preds_8,
    };
    let component_9 = ProofComponent {
        datum: d9.to_vec(),
        predecessors: vec![authenticator_8_alt.clone()],
    };
    let component_10 = ProofComponent {
        datum: d10.to_vec(),
        predecessors: vec![version1_digest.clone(), authenticator_8.clone()],
    };

    Ok(ForgeryKit {
        authenticator_8,
        authenticator_8_alt,
        version1_digest,
        version2_digest,
        advancement_to_9: AdvancementProof {
            components: vec![component_8_alt.clone(), component_9.clone()],
        },
        advancement_9_to_10: AdvancementProof {
            components: vec![component_10.clone()],
        },
        claim_v1: MembershipClaim {
            position: 8,
            anchor: 9,
            datum: d8_alt.to_vec(),
        },
        proof_v1: MembershipProof {
            components: vec![component_8_alt, component_9],
        },
        claim_v2: MembershipClaim {
            position: 8,
            anchor: 10,
            datum: d8.to_vec(),
        },
        proof_v2: MembershipProof {
            components: vec![component_8, component_10],
        },
    })
}

/// One line of a scenario report.
#[derive(Debug, Clone)]
pub struct ScenarioStep {
    pub step: usize,
    pub action: String,
    pub outcome: String,
    pub reason: Option<String>,
    pub as_expected: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario: &'static str,
    pub steps: Vec<ScenarioStep>,
}

impl ScenarioReport {
    pub fn all_expected(&self) -> bool {
        self.steps.iter().all(|s| s.as_expected)
    }

    fn push(
        &mut self,
        action: impl Into<String>,
        outcome: &str,
        reason: Option<String>,
        as_expected: bool,
    ) {
        self.steps.push(ScenarioStep {
            step: self.steps.len() + 1,
            action: action.into(),
            outcome: outcome.to_string(),
            reason,
            as_expected,
        });
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            write!(
                f,
                "{} {} {} {}",
                self.scenario, step.step, step.action, step.outcome
            )?;
            if let Some(reason) = &step.reason {
                write!(f, ": {reason}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn scenario_datum(i: u64, len: usize) -> Vec<u8> {
    vec![(i & 0xff) as u8; len]
}

fn scenario_log(elements: u64) -> Result<Log<MemStore>, AdversaryError> {
    let mut log = Log::create(LogConfig::new(32, 0)?)?;
    for i in 1..=elements {
        log.append(&scenario_datum(i, 32), &[])?;
    }
    Ok(log)
}

fn describe_membership(outcome: &VerificationOutcome) -> (&'static str, Option<String>) {
    match outcome {
        VerificationOutcome::ClaimTrue => ("claim-true", None),
        VerificationOutcome::ClaimFalse => ("claim-false", None),
        VerificationOutcome::ProofInvalid(reason) => ("rejected", Some(reason.to_string())),
    }
}

/// Run one named scenario against a basis-tracking verifier and report the
/// verdict of every step. Scenario data are fixed, so reports are
/// reproducible byte for byte.
pub fn run_scenario(name: &str) -> Result<ScenarioReport, AdversaryError> {
    match name {
        "need-for-bases" => need_for_bases(),
        "bit-flip-proof" => bit_flip_proof(),
        "bit-flip-store" => bit_flip_store(),
        "wrong-count" => wrong_count(),
        "replay-stale-digest" => replay_stale_digest(),
        other => Err(AdversaryError::UnknownScenario(other.to_string())),
    }
}

/// The cross-version forgery end to end: both conflicting membership claims
/// pass stateless verification, and the basis catches the second
/// advancement.
fn need_for_bases() -> Result<ScenarioReport, AdversaryError> {
    let mut report = ScenarioReport {
        scenario: "need-for-bases",
        steps: Vec::new(),
    };
    let prefix = scenario_log(7)?;
    let hash = prefix.config().hash;
    let kit = build_forgery(
        &prefix,
        &scenario_datum(8, 32),
        &[0xa8; 32],
        &scenario_datum(9, 32),
        &scenario_datum(10, 32),
    )?;

    let outcome = verify_membership(hash, &kit.claim_v1, &kit.version1_digest, &kit.proof_v1);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(8,9,d8') against version 1",
        text,
        reason,
        outcome.is_true(),
    );

    let outcome = verify_membership(hash, &kit.claim_v2, &kit.version2_digest, &kit.proof_v2);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(8,10,d8) against version 2",
        text,
        reason,
        outcome.is_true(),
    );

    let state = VerifierState::genesis(hash, prefix.config().genesis.clone());
    let after_v1 = state.verify_advancement(9, &kit.version1_digest, &kit.advancement_to_9);
    let (text, reason, state) = match after_v1 {
        Ok(next) => ("accepted", None, next),
        Err(err) => ("rejected", Some(err.reason().to_string()), state),
    };
    report.push("advance-verify 0->9", text, reason, text == "accepted");

    let after_v2 = state.verify_advancement(10, &kit.version2_digest, &kit.advancement_9_to_10);
    match after_v2 {
        Ok(_) => report.push("advance-verify 9->10 (forged)", "accepted", None, false),
        Err(err) => {
            let as_expected = err.reason() == "basis-conflict";
            report.push(
                "advance-verify 9->10 (forged)",
                "rejected",
                Some(err.reason().to_string()),
                as_expected,
            );
        }
    }
    Ok(report)
}

/// Deterministic single-bit flips in an honest membership proof must never
/// survive verification.
fn bit_flip_proof() -> Result<ScenarioReport, AdversaryError> {
    let mut report = ScenarioReport {
        scenario: "bit-flip-proof",
        steps: Vec::new(),
    };
    let log = scenario_log(12)?;
    let hash = log.config().hash;
    let claim = MembershipClaim {
        position: 3,
        anchor: 12,
        datum: scenario_datum(3, 32),
    };
    let proof = log.build_membership_proof(3, 12)?;
    let anchor = log.digest_at(12)?;
    let layout = crate::proof::ProofLayout {
        sensitive_len: 32,
        digest_width: 32,
    };

    let wire = proof.to_bytes();
    for (step, position) in [8usize, wire.len() / 2, wire.len() - 1]
        .into_iter()
        .enumerate()
    {
        let mut tampered = wire.clone();
        tampered[position] ^= 1 << (step % 8);
        let outcome = match MembershipProof::from_bytes(&tampered, &layout) {
            Ok(tampered_proof) => verify_membership(hash, &claim, &anchor, &tampered_proof),
            Err(_) => {
                VerificationOutcome::ProofInvalid(crate::verifier::InvalidProof::ComponentMalformed)
            }
        };
        let (text, reason) = describe_membership(&outcome);
        report.push(
            format!(
                "verify-membership(3,12,d3) with bit {} of byte {} flipped",
                step % 8,
                position
            ),
            text,
            reason,
            !outcome.is_true(),
        );
    }
    Ok(report)
}

/// Flips inside the stored records: sensitive data and authenticators are
/// caught by the audit; insensitive bytes are not authenticated and stay
/// invisible to it.
fn bit_flip_store() -> Result<ScenarioReport, AdversaryError> {
    let mut report = ScenarioReport {
        scenario: "bit-flip-store",
        steps: Vec::new(),
    };
    let config = LogConfig::new(32, 4)?;
    let mut honest = Log::create(config.clone())?;
    for i in 1..=12u64 {
        honest.append(&scenario_datum(i, 32), &[0; 4])?;
    }

    let rebuild = |mutate: &dyn Fn(u64, &mut crate::log::EntryRecord)| -> Result<Log<MemStore>, AdversaryError> {
        let mut store = MemStore::new(config.clone())?;
        for i in 1..=12u64 {
            let mut record = honest.store().read_record(i)?;
            mutate(i, &mut record);
            store.append_record(record)?;
        }
        Ok(Log::from_store(store))
    };

    let tampered = rebuild(&|i, record| {
        if i == 5 {
            record.sensitive[3] ^= 0x40;
        }
    })?;
    let audit = tampered.audit()?;
    report.push(
        "audit after sensitive-bit flip at element 5",
        if audit.is_clean() { "clean" } else { "flagged" },
        audit.first_mismatch.map(|i| format!("index {i}")),
        audit.first_mismatch == Some(5),
    );

    let tampered = rebuild(&|i, record| {
        if i == 9 {
            let mut bytes = record.authenticator.as_bytes().to_vec();
            bytes[0] ^= 0x01;
            record.authenticator = Digest::from_bytes(bytes);
        }
    })?;
    let audit = tampered.audit()?;
    report.push(
        "audit after authenticator-bit flip at element 9",
        if audit.is_clean() { "clean" } else { "flagged" },
        audit.first_mismatch.map(|i| format!("index {i}")),
        audit.first_mismatch == Some(9),
    );

    let tampered = rebuild(&|i, record| {
        if i == 7 {
            record.insensitive[0] ^= 0xff;
        }
    })?;
    let audit = tampered.audit()?;
    report.push(
        "audit after insensitive-byte flip at element 7",
        if audit.is_clean() { "clean" } else { "flagged" },
        audit.first_mismatch.map(|i| format!("index {i}")),
        audit.is_clean(),
    );
    Ok(report)
}

/// Dropping or duplicating proof components trips the count check.
fn wrong_count() -> Result<ScenarioReport, AdversaryError> {
    let mut report = ScenarioReport {
        scenario: "wrong-count",
        steps: Vec::new(),
    };
    let log = scenario_log(12)?;
    let hash = log.config().hash;
    let claim = MembershipClaim {
        position: 3,
        anchor: 12,
        datum: scenario_datum(3, 32),
    };
    let anchor = log.digest_at(12)?;
    let honest = log.build_membership_proof(3, 12)?;

    let mut short = honest.clone();
    short.components.pop();
    let outcome = verify_membership(hash, &claim, &anchor, &short);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(3,12,d3) with last component dropped",
        text,
        reason.clone(),
        reason.as_deref() == Some("count-mismatch"),
    );

    let mut long = honest.clone();
    long.components.push(honest.components[0].clone());
    let outcome = verify_membership(hash, &claim, &anchor, &long);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(3,12,d3) with a component duplicated",
        text,
        reason.clone(),
        reason.as_deref() == Some("count-mismatch"),
    );
    Ok(report)
}

/// An old honest proof replayed against a newer digest anchors nowhere.
fn replay_stale_digest() -> Result<ScenarioReport, AdversaryError> {
    let mut report = ScenarioReport {
        scenario: "replay-stale-digest",
        steps: Vec::new(),
    };
    let log = scenario_log(12)?;
    let hash = log.config().hash;
    let claim = MembershipClaim {
        position: 2,
        anchor: 9,
        datum: scenario_datum(2, 32),
    };
    let proof = log.build_membership_proof(2, 9)?;

    let outcome = verify_membership(hash, &claim, &log.digest_at(9)?, &proof);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(2,9,d2) against the version-9 digest",
        text,
        reason,
        outcome.is_true(),
    );

    let outcome = verify_membership(hash, &claim, &log.digest_at(12)?, &proof);
    let (text, reason) = describe_membership(&outcome);
    report.push(
        "verify-membership(2,9,d2) replayed against the version-12 digest",
        text,
        reason.clone(),
        reason.as_deref() == Some("anchor-mismatch"),
    );
    Ok(report)
}
