//! Acceptance suite: one test per criterion, each printing a verdict line.
//!
//! Run with `cargo test -p aasl-cli --test acceptance -- --nocapture` to see
//! the per-criterion lines alongside the harness results.

use std::collections::HashMap;
use std::fs;
use std::io::{Read as _, Seek as _, SeekFrom, Write as _};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use aasl_core::adversary::build_forgery;
use aasl_core::{
    hop_level, open_or_create, open_read_only, traversal_path, verify_membership, AdvancementProof,
    Digest, HashAlgorithm, Log, LogConfig, MemStore, MembershipClaim, VerificationOutcome,
    VerifierState,
};

const HASH: HashAlgorithm = HashAlgorithm::Sha256;

fn datum(i: u64, len: usize) -> Vec<u8> {
    vec![(i & 0xff) as u8; len]
}

fn sample_log(elements: u64, sensitive_len: u32) -> Log<MemStore> {
    let mut log = Log::create(LogConfig::new(sensitive_len, 0).unwrap()).unwrap();
    for i in 1..=elements {
        log.append(&datum(i, sensitive_len as usize), &[]).unwrap();
    }
    log
}

fn claim(i: u64, n: u64, d: Vec<u8>) -> MembershipClaim {
    MembershipClaim {
        position: i,
        anchor: n,
        datum: d,
    }
}

fn assert_within(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed < budget,
        "{what} took {elapsed:?}, budget is {budget:?}"
    );
}

/// Criterion 1: on a 10-element honest log the advancement proofs for
/// 0->9 and 9->10 reproduce the worked component shapes, and the basis
/// after advancing to 9 has populated slots {0, 3}.
#[test]
fn criterion_1_worked_example_conformance() {
    let started = Instant::now();
    let log = sample_log(10, 32);

    let to_9 = log.build_advancement_proof(0, 9).unwrap();
    assert_eq!(to_9.component_count(), 2);
    assert_eq!(to_9.components[0].datum, datum(8, 32));
    assert_eq!(to_9.components[0].predecessors.len(), 4);
    assert_eq!(
        to_9.components[0].predecessors,
        vec![
            log.digest_at(7).unwrap(),
            log.digest_at(6).unwrap(),
            log.digest_at(4).unwrap(),
            log.digest_at(0).unwrap(),
        ]
    );
    assert_eq!(to_9.components[1].datum, datum(9, 32));
    assert_eq!(
        to_9.components[1].predecessors,
        vec![log.digest_at(8).unwrap()]
    );

    let to_10 = log.build_advancement_proof(9, 10).unwrap();
    assert_eq!(to_10.component_count(), 1);
    assert_eq!(to_10.components[0].datum, datum(10, 32));
    assert_eq!(
        to_10.components[0].predecessors,
        vec![log.digest_at(9).unwrap(), log.digest_at(8).unwrap()]
    );

    let state = VerifierState::genesis(HASH, log.config().genesis.clone());
    let state = state
        .verify_advancement(9, &log.digest_at(9).unwrap(), &to_9)
        .unwrap();
    let slots: Vec<u8> = state.basis().populated().map(|(l, _)| l).collect();
    assert_eq!(slots, vec![0, 3]);

    assert_within(started.elapsed(), Duration::from_secs(1), "criterion 1");
    println!(
        "criterion 1 (worked-example conformance): PASS in {:?}",
        started.elapsed()
    );
}

/// Criterion 2: the forged history authenticates conflicting claims for
/// position 8 through both stateless checks, and the basis-tracking
/// verifier rejects the second advancement with a basis conflict.
#[test]
fn criterion_2_need_for_bases_attack() {
    let started = Instant::now();
    let prefix = sample_log(7, 32);
    let kit = build_forgery(
        &prefix,
        &datum(8, 32),
        &[0xa8; 32],
        &datum(9, 32),
        &datum(10, 32),
    )
    .unwrap();

    // Both stateless membership verifications accept.
    assert_eq!(
        verify_membership(HASH, &kit.claim_v1, &kit.version1_digest, &kit.proof_v1),
        VerificationOutcome::ClaimTrue
    );
    assert_eq!(
        verify_membership(HASH, &kit.claim_v2, &kit.version2_digest, &kit.proof_v2),
        VerificationOutcome::ClaimTrue
    );
    // ... for conflicting claims about position 8.
    assert_eq!(kit.claim_v1.position, 8);
    assert_eq!(kit.claim_v2.position, 8);
    assert_ne!(kit.claim_v1.datum, kit.claim_v2.datum);

    // The basis-tracking verifier accepts version 1 and rejects version 2.
    let state = VerifierState::genesis(HASH, prefix.config().genesis.clone());
    let state = state
        .verify_advancement(9, &kit.version1_digest, &kit.advancement_to_9)
        .unwrap();
    let err = state
        .verify_advancement(10, &kit.version2_digest, &kit.advancement_9_to_10)
        .unwrap_err();
    assert_eq!(err.reason(), "basis-conflict");

    assert_within(started.elapsed(), Duration::from_secs(1), "criterion 2");
    println!(
        "criterion 2 (need-for-bases attack): PASS in {:?}",
        started.elapsed()
    );
}

/// Criterion 3: on a 1,024-element log, membership verification returns
/// ClaimTrue for 10,000 random (i, n) pairs plus every pair with
/// n in {1, 2, 3, 1024}.
#[test]
fn criterion_3_round_trip_completeness() {
    let started = Instant::now();
    let log = sample_log(1024, 32);
    let mut digests = HashMap::new();
    for n in 0..=1024u64 {
        digests.insert(n, log.digest_at(n).unwrap());
    }

    let mut checked = 0u64;
    let mut check = |i: u64, n: u64| {
        let proof = log.build_membership_proof(i, n).unwrap();
        let outcome = verify_membership(HASH, &claim(i, n, datum(i, 32)), &digests[&n], &proof);
        assert_eq!(outcome, VerificationOutcome::ClaimTrue, "pair ({i},{n})");
        checked += 1;
    };

    for n in [1u64, 2, 3, 1024] {
        for i in 1..=n {
            check(i, n);
        }
    }
    let mut rng = StdRng::seed_from_u64(0xacce_0003);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=1024u64);
        let i = rng.gen_range(1..=n);
        check(i, n);
    }

    assert_within(started.elapsed(), Duration::from_secs(30), "criterion 3");
    println!(
        "criterion 3 (round-trip completeness): PASS, {checked} pairs in {:?}",
        started.elapsed()
    );
}

/// Criterion 4: across >= 10,000 random single-bit flips in proof bytes,
/// stored sensitive data and stored authenticators, no flip ever yields
/// ClaimTrue for a non-honest datum, and the audit catches every stored
/// flip.
#[test]
fn criterion_4_tamper_evidence() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xacce_0004);

    // Proof-byte flips, in memory.
    let log = sample_log(64, 32);
    let mut digests = HashMap::new();
    for n in 0..=64u64 {
        digests.insert(n, log.digest_at(n).unwrap());
    }
    let mut proof_flips = 0u64;
    for _ in 0..4000 {
        let n = rng.gen_range(1..=64u64);
        let i = rng.gen_range(1..=n);
        let honest = log.build_membership_proof(i, n).unwrap();
        let mut wire = honest.to_bytes();
        let byte = rng.gen_range(0..wire.len());
        wire[byte] ^= 1 << rng.gen_range(0..8);
        let layout = aasl_core::ProofLayout {
            sensitive_len: 32,
            digest_width: 32,
        };
        if let Ok(tampered) = aasl_core::MembershipProof::from_bytes(&wire, &layout) {
            let honest_datum = datum(i, 32);
            // The honest claim must not verify true through a tampered proof;
            // the only acceptable "true" would need the untampered bytes.
            let outcome = verify_membership(
                HASH,
                &claim(i, n, honest_datum.clone()),
                &digests[&n],
                &tampered,
            );
            assert_ne!(
                outcome,
                VerificationOutcome::ClaimTrue,
                "flip at byte {byte}"
            );
            // Nor may the claim for whatever datum the tampered first
            // component now shows, when that datum is not the honest one.
            let shown = tampered.components[0].datum.clone();
            if shown != honest_datum {
                let outcome = verify_membership(HASH, &claim(i, n, shown), &digests[&n], &tampered);
                assert_ne!(outcome, VerificationOutcome::ClaimTrue);
            }
        }
        proof_flips += 1;
    }

    // Advancement-proof flips: a verifier mid-history rejects every
    // tampered advancement outright.
    let genesis_state = VerifierState::genesis(HASH, log.config().genesis.clone());
    let anchors = [0u64, 9, 32, 48];
    let mut states = HashMap::new();
    for &a in &anchors {
        let state = if a == 0 {
            genesis_state.clone()
        } else {
            genesis_state
                .verify_advancement(a, &digests[&a], &log.build_advancement_proof(0, a).unwrap())
                .unwrap()
        };
        states.insert(a, state);
    }
    let mut advancement_flips = 0u64;
    for _ in 0..2000 {
        let a = anchors[rng.gen_range(0..anchors.len())];
        let b = rng.gen_range(a + 1..=64u64);
        let honest = log.build_advancement_proof(a, b).unwrap();
        let mut wire = honest.to_bytes();
        let byte = rng.gen_range(0..wire.len());
        wire[byte] ^= 1 << rng.gen_range(0..8);
        let layout = aasl_core::ProofLayout {
            sensitive_len: 32,
            digest_width: 32,
        };
        // A flip that breaks decoding is a rejection in its own right.
        if let Ok(tampered) = AdvancementProof::from_bytes(&wire, &layout) {
            let outcome = states[&a].verify_advancement(b, &digests[&b], &tampered);
            assert!(outcome.is_err(), "advancement flip at byte {byte} accepted");
        }
        advancement_flips += 1;
    }

    // Stored-byte flips, on the durable file.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tamper.aasl");
    {
        let mut file_log = open_or_create(&path, LogConfig::new(32, 0).unwrap()).unwrap();
        for i in 1..=64u64 {
            file_log.append(&datum(i, 32), &[]).unwrap();
        }
    }
    let file_log = open_read_only(&path).unwrap();
    let honest_anchor = file_log.digest_at(64).unwrap();
    let mut raw = fs::OpenOptions::new()
        .read(true)
        .write(true)
        .open(&path)
        .unwrap();
    const PREAMBLE: u64 = 26;
    const STRIDE: u64 = 64;

    let mut flip = |offset: u64, mask: u8| {
        raw.seek(SeekFrom::Start(offset)).unwrap();
        let mut byte = [0u8];
        raw.read_exact(&mut byte).unwrap();
        byte[0] ^= mask;
        raw.seek(SeekFrom::Start(offset)).unwrap();
        raw.write_all(&byte).unwrap();
    };

    let mut data_flips = 0u64;
    for _ in 0..3000 {
        let record = rng.gen_range(1..=64u64);
        let offset = PREAMBLE + record * STRIDE + rng.gen_range(0..32);
        let mask = 1 << rng.gen_range(0..8);
        flip(offset, mask);

        let report = file_log.audit().unwrap();
        assert_eq!(
            report.first_mismatch,
            Some(record),
            "sensitive flip at {offset}"
        );

        // A proof for the tampered element authenticates its tampered datum
        // to no one holding the honest digest.
        let tampered_datum = file_log.entry(record).unwrap().sensitive;
        let proof = file_log.build_membership_proof(record, 64).unwrap();
        let outcome = verify_membership(
            HASH,
            &claim(record, 64, tampered_datum),
            &honest_anchor,
            &proof,
        );
        assert_ne!(outcome, VerificationOutcome::ClaimTrue);

        flip(offset, mask);
        data_flips += 1;
    }

    let mut authenticator_flips = 0u64;
    for _ in 0..3000 {
        let record = rng.gen_range(1..=64u64);
        let offset = PREAMBLE + record * STRIDE + 32 + rng.gen_range(0..32);
        let mask = 1 << rng.gen_range(0..8);
        flip(offset, mask);
        let report = file_log.audit().unwrap();
        assert_eq!(
            report.first_mismatch,
            Some(record),
            "authenticator flip at {offset}"
        );
        flip(offset, mask);
        authenticator_flips += 1;
    }

    let total = proof_flips + advancement_flips + data_flips + authenticator_flips;
    assert!(total >= 10_000);
    assert_within(started.elapsed(), Duration::from_secs(60), "criterion 4");
    println!(
        "criterion 4 (tamper evidence): PASS, {total} flips \
         ({proof_flips} membership-proof, {advancement_flips} advancement-proof, \
         {data_flips} data, {authenticator_flips} authenticator) in {:?}",
        started.elapsed()
    );
}

/// Criterion 5: for n = 2^20 the membership proof from position 1 has at
/// most 2*log2(n) + 1 = 41 components; the measured value is recorded in
/// the output.
#[test]
fn criterion_5_logarithmic_proof_size() {
    let started = Instant::now();
    const N: u64 = 1 << 20;
    let log = sample_log(N, 8);
    let proof = log.build_membership_proof(1, N).unwrap();
    let measured = proof.component_count();
    assert!(measured <= 41, "{measured} components exceeds the bound 41");

    // The verifier agrees end to end at this scale.
    let outcome = verify_membership(
        HASH,
        &claim(1, N, datum(1, 8)),
        &log.digest().unwrap(),
        &proof,
    );
    assert_eq!(outcome, VerificationOutcome::ClaimTrue);

    println!(
        "criterion 5 (logarithmic proof size): PASS, measured {measured} components \
         for n = 2^20 (bound 41) in {:?}",
        started.elapsed()
    );
}

/// Criterion 6: lemma suites at desk scale. Hop divisibility is exhaustive
/// for 0 <= i < n <= 512; the basis/binary correspondence and partition
/// independence are exhaustive over every advancement partition of [0, j]
/// for j <= 20 (prefixes shared across partitions) and randomized for
/// j <= 4096.
#[test]
fn criterion_6_lemma_suites() {
    let started = Instant::now();

    // Hop divisibility, exhaustive.
    let mut paths = 0u64;
    for n in 1..=512u64 {
        for i in 0..n {
            let path = traversal_path(i, n).unwrap();
            let mut at = i;
            for hop in path.hops() {
                assert_eq!(hop.source, at);
                assert_eq!(hop.destination, hop.source + (1u64 << hop.level));
                assert_eq!(hop.source % (1u64 << hop.level), 0);
                assert_eq!(hop.destination % (1u64 << hop.level), 0);
                assert_eq!(hop_level(hop.source, n).unwrap(), hop.level);
                at = hop.destination;
            }
            assert_eq!(at, n);
            paths += 1;
        }
    }

    // Exhaustive partitions of [0, j] for j <= 20. Every partition is a
    // root-to-node path of the checkpoint tree; shared prefixes are
    // verified once. Each arrival must reproduce the canonical state for
    // its element (partition independence) whose basis mirrors the binary
    // size (base correspondence).
    const J_MAX: u64 = 20;
    let log = sample_log(J_MAX, 32);
    let mut digests = Vec::new();
    for b in 0..=J_MAX {
        digests.push(log.digest_at(b).unwrap());
    }
    let mut proofs = HashMap::new();
    for a in 0..J_MAX {
        for b in a + 1..=J_MAX {
            proofs.insert((a, b), log.build_advancement_proof(a, b).unwrap());
        }
    }
    let genesis = VerifierState::genesis(HASH, log.config().genesis.clone());
    let mut canonical = vec![genesis.clone()];
    for b in 1..=J_MAX {
        let state = genesis
            .verify_advancement(b, &digests[b as usize], &proofs[&(0, b)])
            .unwrap();
        assert!(state.basis().matches_binary(b), "basis of canonical {b}");
        canonical.push(state);
    }

    struct Dfs<'a> {
        digests: &'a [Digest],
        proofs: &'a HashMap<(u64, u64), AdvancementProof>,
        canonical: &'a [VerifierState],
        partitions: u64,
    }
    impl Dfs<'_> {
        fn walk(&mut self, at: u64, state: &VerifierState) {
            for b in at + 1..=J_MAX {
                let next = state
                    .verify_advancement(b, &self.digests[b as usize], &self.proofs[&(at, b)])
                    .unwrap_or_else(|err| panic!("segment {at}->{b} rejected: {err}"));
                assert_eq!(
                    next, self.canonical[b as usize],
                    "partition state at {b} via {at} diverges"
                );
                self.partitions += 1;
                self.walk(b, &next);
            }
        }
    }
    let mut dfs = Dfs {
        digests: &digests,
        proofs: &proofs,
        canonical: &canonical,
        partitions: 0,
    };
    dfs.walk(0, &genesis);
    // One partition per composition of each j <= 20.
    assert_eq!(dfs.partitions, (1u64 << J_MAX) - 1);

    // Randomized partitions up to 4096, pairwise independence.
    let big = sample_log(4096, 32);
    let mut rng = StdRng::seed_from_u64(0xacce_0006);
    let fresh = VerifierState::genesis(HASH, big.config().genesis.clone());
    let mut randomized = 0u64;
    for _ in 0..150 {
        let j = rng.gen_range(1..=4096u64);
        let mut states = Vec::new();
        for _ in 0..2 {
            let mut state = fresh.clone();
            let mut at = 0u64;
            while at < j {
                let to = rng.gen_range(at + 1..=j);
                let proof = big.build_advancement_proof(at, to).unwrap();
                state = state
                    .verify_advancement(to, &big.digest_at(to).unwrap(), &proof)
                    .unwrap();
                at = to;
            }
            assert!(state.basis().matches_binary(j), "basis pattern at {j}");
            states.push(state);
            randomized += 1;
        }
        assert_eq!(states[0], states[1], "partition independence at {j}");
        assert_eq!(states[0].to_bytes(), states[1].to_bytes());
    }

    assert_within(started.elapsed(), Duration::from_secs(60), "criterion 6");
    println!(
        "criterion 6 (lemma suites): PASS, {paths} exhaustive paths, {} exhaustive \
         partitions, {randomized} randomized walks in {:?}",
        dfs.partitions,
        started.elapsed()
    );
}

/// Criterion 7: the shipped 10-element fixture parses and its digest
/// column is reproduced bit-exactly, cross-checked by the audit's full
/// recomputation.
#[test]
fn criterion_7_conformance_fixture() {
    let started = Instant::now();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/conformance_10.aasl");
    let log = open_read_only(&fixture).unwrap();
    assert_eq!(log.size(), 10);
    assert_eq!(log.config().sensitive_len, 32);
    assert_eq!(log.config().insensitive_len, 8);
    assert_eq!(log.config().hash, HashAlgorithm::Sha256);

    const DIGEST_COLUMN: [&str; 11] = [
        "0000000000000000000000000000000000000000000000000000000000000000",
        "766048364d9809c64d44703a72049cf9f5af5a865f4b5c937e5060af25cdf2ee",
        "4adac7bc5421a0d33c292c909465b7c9cd2e2dbbb4d84acd9ca94336a71ba3e7",
        "084f00972489d32422f9ec880c25bb9c31824fc3a1b5009be4a22da43bb7cc9b",
        "5c50966f12d64f88090b27ba4a965b945a34ac500756ee8ad24d889dea6ea02b",
        "fcc4356b54b1a4c7c8f000983a6fb61549f0f86142c71f521bec4845100984d9",
        "0c536d6adbdc2951faf01c13359cbac28dfb6fce7486c376c016868a52edb30c",
        "3720ba35d7cae80e781bfd3effd86ca413815d679459fb4c3f62130a0d4c282d",
        "f5978a2e1c23a4f7eb21d91af3a54b7adabbb2dc8cc56e987ec3362c9d185cd6",
        "08c568d3ec85b2034b9ed3b42d8c2d09fe3007b4a5017b61993c4565163ee9af",
        "68cb91541b4ba40dab0b58c0640cf599a1095523c9fce2bc6237041958bbc08b",
    ];
    for (k, expected) in DIGEST_COLUMN.iter().enumerate() {
        assert_eq!(
            log.digest_at(k as u64).unwrap(),
            Digest::from_hex(expected).unwrap(),
            "digest {k}"
        );
        if k >= 1 {
            assert_eq!(log.entry(k as u64).unwrap().sensitive, datum(k as u64, 32));
            assert_eq!(
                log.entry(k as u64).unwrap().insensitive,
                (k as u64).to_be_bytes()
            );
        }
    }
    // Independent cross-check: rebuilding the authenticator column from
    // the data column reproduces every stored value.
    assert!(log.audit().unwrap().is_clean());

    println!(
        "criterion 7 (conformance fixture): PASS, 11 digests bit-exact in {:?}",
        started.elapsed()
    );
}

fn bin_run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aasl"))
        .args(args)
        .output()
        .expect("spawn aasl")
}

/// Criterion 8: every rejected advancement leaves the verifier-state file
/// byte-identical, checked across the rejection reasons the CLI can hit.
#[test]
fn criterion_8_rejections_leave_state_file_intact() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let log_path = dir.path().join("log.aasl");
    {
        let mut log = open_or_create(&log_path, LogConfig::new(32, 0).unwrap()).unwrap();
        for i in 1..=12u64 {
            log.append(&datum(i, 32), &[]).unwrap();
        }
    }
    let log = open_read_only(&log_path).unwrap();

    let write_proof = |name: &str, bytes: &[u8]| -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, bytes).unwrap();
        path
    };
    let state_path = dir.path().join("verifier.state");
    let state_arg = state_path.to_str().unwrap().to_string();

    // Establish an honest state at size 9.
    let honest_9 = write_proof(
        "adv09.bin",
        &log.build_advancement_proof(0, 9).unwrap().to_bytes(),
    );
    let digest9 = log.digest_at(9).unwrap().to_hex();
    let out = bin_run(&[
        "advance-verify",
        "--state",
        &state_arg,
        "--to",
        "9",
        "--digest",
        &digest9,
        honest_9.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let snapshot = fs::read(&state_path).unwrap();
    let mut rejected = Vec::new();
    let mut expect_rejection = |args: &[&str], reason: &str| -> String {
        let out = bin_run(args);
        assert_eq!(out.status.code(), Some(1), "{reason}: {out:?}");
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        assert!(text.starts_with("INVALID:"), "{reason}: {text}");
        assert_eq!(
            fs::read(&state_path).unwrap(),
            snapshot,
            "state file changed after {reason}"
        );
        let code = text.trim().trim_start_matches("INVALID:").to_string();
        rejected.push(format!("{code} ({reason})"));
        code
    };

    // Anchor mismatch: honest proof, wrong claimed digest.
    let honest_12 = write_proof(
        "adv912.bin",
        &log.build_advancement_proof(9, 12).unwrap().to_bytes(),
    );
    expect_rejection(
        &[
            "advance-verify",
            "--state",
            &state_arg,
            "--to",
            "12",
            "--digest",
            &"11".repeat(32),
            honest_12.to_str().unwrap(),
        ],
        "wrong digest",
    );

    // Malformed proof bytes.
    let truncated = {
        let bytes = log.build_advancement_proof(9, 12).unwrap().to_bytes();
        write_proof("trunc.bin", &bytes[..bytes.len() - 5])
    };
    let digest12 = log.digest_at(12).unwrap().to_hex();
    expect_rejection(
        &[
            "advance-verify",
            "--state",
            &state_arg,
            "--to",
            "12",
            "--digest",
            &digest12,
            truncated.to_str().unwrap(),
        ],
        "truncated proof",
    );

    // Components drawn from a different history (same data, different
    // genesis): the remembered T^8 disagrees, and the basis check fires
    // before the chain is even followed.
    let rival_path = dir.path().join("rival.aasl");
    {
        let rival_config = LogConfig::new(32, 0)
            .unwrap()
            .with_genesis(Digest::from_bytes(vec![7; 32]))
            .unwrap();
        let mut rival = open_or_create(&rival_path, rival_config).unwrap();
        for i in 1..=12u64 {
            rival.append(&datum(i, 32), &[]).unwrap();
        }
        let rival_proof = write_proof(
            "rival.bin",
            &rival.build_advancement_proof(9, 12).unwrap().to_bytes(),
        );
        let code = expect_rejection(
            &[
                "advance-verify",
                "--state",
                &state_arg,
                "--to",
                "12",
                "--digest",
                &rival.digest_at(12).unwrap().to_hex(),
                rival_proof.to_str().unwrap(),
            ],
            "foreign history",
        );
        assert_eq!(code, "basis-conflict");
    }

    // Continuity break: flip the hop-level predecessor inside an honest
    // 9->10 component. The basis slots still agree (the reused T^8 is
    // untouched) but the chain from the held T^9 no longer connects.
    let continuity = {
        let mut bytes = log.build_advancement_proof(9, 10).unwrap().to_bytes();
        // count word (2) + datum (32) + predecessor count (1) puts
        // predecessors[0] at byte 35.
        bytes[35 + 5] ^= 0x01;
        write_proof("contbreak.bin", &bytes)
    };
    let code = expect_rejection(
        &[
            "advance-verify",
            "--state",
            &state_arg,
            "--to",
            "10",
            "--digest",
            &log.digest_at(10).unwrap().to_hex(),
            continuity.to_str().unwrap(),
        ],
        "tampered predecessor",
    );
    assert_eq!(code, "continuity-break");

    // Not an advancement: replaying the current size.
    expect_rejection(
        &[
            "advance-verify",
            "--state",
            &state_arg,
            "--to",
            "9",
            "--digest",
            &digest9,
            honest_9.to_str().unwrap(),
        ],
        "stale size",
    );

    // Basis conflict: the forged cross-version advancement, on a verifier
    // that accepted the forged version 1.
    let prefix = sample_log(7, 32);
    let kit = build_forgery(
        &prefix,
        &datum(8, 32),
        &[0xa8; 32],
        &datum(9, 32),
        &datum(10, 32),
    )
    .unwrap();
    let forged_state = dir.path().join("forged.state");
    let forged_arg = forged_state.to_str().unwrap().to_string();
    let to_9 = write_proof("forged09.bin", &kit.advancement_to_9.to_bytes());
    let out = bin_run(&[
        "advance-verify",
        "--state",
        &forged_arg,
        "--to",
        "9",
        "--digest",
        &kit.version1_digest.to_hex(),
        to_9.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let forged_snapshot = fs::read(&forged_state).unwrap();
    let to_10 = write_proof("forged910.bin", &kit.advancement_9_to_10.to_bytes());
    let out = bin_run(&[
        "advance-verify",
        "--state",
        &forged_arg,
        "--to",
        "10",
        "--digest",
        &kit.version2_digest.to_hex(),
        to_10.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "INVALID:basis-conflict\n"
    );
    assert_eq!(fs::read(&forged_state).unwrap(), forged_snapshot);
    rejected.push("basis-conflict (forged advancement)".to_string());

    println!(
        "criterion 8 (rejections keep state intact): PASS over {} rejections [{}] in {:?}",
        rejected.len(),
        rejected.join(", "),
        started.elapsed()
    );
}
