mod common;

use common::*;
use zkbid_chain::tx::{identity_auth_address, soul_cert_address};
use zkbid_chain::{
    build_certification_tx, identity_hash, CerInfo, Chain, ContractKind, ReceiptError, RegInfo, Transaction,
};
use zkbid_core::lrs::{ring_sign, Ring};
use zkbid_core::{Account, GroupElement};
use zkbid_zk::Proof;

fn chain() -> Chain {
    Chain::new(genesis(50)).unwrap()
}

fn register(chain: &mut Chain, id: &str, rng: &mut rand_chacha::ChaCha20Rng) -> Account {
    let e = enroll_user(id, rng);
    let r = run_one(chain, registration_tx(&e, 0, rng));
    assert!(r.accepted(), "{r:?}");
    e.seed
}

#[test]
fn fresh_registration_grows_seed_store() {
    let mut rng = rng(1);
    let mut c = chain();
    let e = enroll_user("ID-0001", &mut rng);
    let r = run_one(&mut c, registration_tx(&e, 0, &mut rng));
    assert_eq!(r.contract, ContractKind::IdentityAuth);
    assert!(r.accepted());
    assert_eq!(c.state().counts().seed, 1);
    assert!(c.state().contains_identity(&identity_hash("ID-0001")));
    assert!(c.state().is_registered_seed(e.seed.public_key()));
}

#[test]
fn duplicate_identity_rejected_before_proof_check() {
    let mut rng = rng(2);
    let mut c = chain();
    register(&mut c, "ID-7", &mut rng);

    let again = enroll_user("ID-7", &mut rng);
    let r = run_one(&mut c, registration_tx(&again, 0, &mut rng));
    assert_eq!(r.error(), Some(ReceiptError::DuplicateIdentity));

    // Also broken proof and signature: check (i) still wins.
    let third = Account::generate(&mut rng);
    let mut reg = RegInfo::new(Proof::from_bytes_unchecked(b"junk"), identity_hash("ID-7"), &third, &mut rng);
    reg.sig_seed = third.sign(b"other", &mut rng);
    let tx = Transaction::new_signed(&third, identity_auth_address(), 0, reg.encode(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::DuplicateIdentity));
    assert_eq!(c.state().counts().seed, 1);
}

#[test]
fn corrupted_proof_is_invalid_proof() {
    let mut rng = rng(3);
    let mut c = chain();
    let e = enroll_user("ID-3", &mut rng);
    let mut bytes = e.reg.zkp.as_bytes().to_vec();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x80;
    let mut reg = e.reg.clone();
    reg.zkp = Proof::from_bytes_unchecked(&bytes);
    let tx = Transaction::new_signed(&e.seed, identity_auth_address(), 0, reg.encode(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::InvalidProof));
    assert_eq!(c.state().counts().seed, 0);
}

#[test]
fn proof_bound_to_another_seed_key_is_invalid() {
    let mut rng = rng(4);
    let mut c = chain();
    let e = enroll_user("ID-4", &mut rng);
    let thief = Account::generate(&mut rng);
    let reg = RegInfo::new(e.reg.zkp.clone(), e.reg.id_hash, &thief, &mut rng);
    let tx = Transaction::new_signed(&thief, identity_auth_address(), 0, reg.encode(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::InvalidProof));
}

#[test]
fn mismatched_seed_signature_rejected() {
    let mut rng = rng(5);
    let mut c = chain();
    let e = enroll_user("ID-5", &mut rng);
    let mut reg = e.reg.clone();
    reg.sig_seed = e.seed.sign(identity_hash("ID-6").as_bytes(), &mut rng);
    assert!(zkbid_chain::build_registration_tx(&e.seed, &reg, 0, &mut rng).is_err());
    let tx = Transaction::new_signed(&e.seed, identity_auth_address(), 0, reg.encode(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::InvalidSeedSignature));
}

#[test]
fn transaction_level_rejections() {
    let mut rng = rng(6);
    let mut c = chain();
    let e = enroll_user("ID-6", &mut rng);

    let stranger = Account::generate(&mut rng);
    let tx = Transaction::new_signed(&stranger, identity_auth_address(), 0, e.reg.encode(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::SenderMismatch));

    let mut tx = registration_tx(&e, 0, &mut rng);
    tx.nonce = 1;
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::InvalidTxSignature));

    let tx = Transaction::new_signed(&e.seed, identity_auth_address(), 0, vec![1, 2, 3], &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::MalformedPayload));

    let tx = Transaction::new_signed(&e.seed, e.seed.address(), 0, e.reg.encode(), &mut rng);
    let r = run_one(&mut c, tx);
    assert_eq!((r.contract, r.error()), (ContractKind::Unknown, Some(ReceiptError::BadTarget)));

    assert!(run_one(&mut c, registration_tx(&e, 5, &mut rng)).accepted());
    assert_eq!(c.state().next_nonce(&e.seed.address()), 6);
    let replay = registration_tx(&e, 5, &mut rng);
    assert_eq!(run_one(&mut c, replay).error(), Some(ReceiptError::StaleNonce));
    // A fresh nonce reaches the contract, which reports the duplicate.
    assert_eq!(
        run_one(&mut c, registration_tx(&e, 6, &mut rng)).error(),
        Some(ReceiptError::DuplicateIdentity)
    );
}

#[test]
fn certification_flow_and_double_certification() {
    let mut rng = rng(7);
    let mut c = chain();
    let seeds: Vec<Account> = (0..5).map(|i| register(&mut c, &format!("ID-{i}"), &mut rng)).collect();

    let (soul, tx) = certification_tx(&seeds[2], &c, 4, &mut rng);
    let r = run_one(&mut c, tx);
    assert_eq!(r.contract, ContractKind::SoulCert);
    assert!(r.accepted(), "{r:?}");
    assert!(c.state().is_certified_soul(soul.public_key()));
    assert_eq!(c.state().counts().soul, 1);
    assert_eq!(c.state().counts().key_images, 1);

    let (_, tx) = certification_tx(&seeds[2], &c, 5, &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::DuplicateKeyImage));

    let (_, tx) = certification_tx(&seeds[3], &c, 1, &mut rng);
    assert!(run_one(&mut c, tx).accepted());
    assert_eq!(c.state().counts().soul, 2);
}

fn signed_cert(seed: &Account, members: Vec<GroupElement>, rng: &mut rand_chacha::ChaCha20Rng) -> Transaction {
    let idx = members.iter().position(|m| m == seed.public_key()).unwrap();
    let ring = Ring::new(members).unwrap();
    let soul = Account::generate(rng);
    let sig = ring_sign(seed.secret_key(), idx, &ring, &soul.public_key().to_bytes(), rng).unwrap();
    let cer = CerInfo {
        pk_soul: *soul.public_key(),
        ring,
        sig,
    };
    build_certification_tx(&soul, &cer, 0, rng).unwrap()
}

#[test]
fn ring_with_unregistered_member_rejected_first() {
    let mut rng = rng(8);
    let mut c = chain();
    let seeds: Vec<Account> = (0..3).map(|i| register(&mut c, &format!("ID-{i}"), &mut rng)).collect();

    // An attacker's self-generated ring signs validly but must still fail.
    let fake: Vec<Account> = (0..3).map(|_| Account::generate(&mut rng)).collect();
    let tx = signed_cert(&fake[0], fake.iter().map(|a| *a.public_key()).collect(), &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::UnregisteredRingMember));

    let mixed = vec![*seeds[0].public_key(), *seeds[1].public_key(), *fake[1].public_key()];
    let tx = signed_cert(&seeds[0], mixed, &mut rng);
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::UnregisteredRingMember));
    assert_eq!(c.state().counts().soul, 0);
}

#[test]
fn bad_ring_signature_rejected() {
    let mut rng = rng(9);
    let mut c = chain();
    let seeds: Vec<Account> = (0..3).map(|i| register(&mut c, &format!("ID-{i}"), &mut rng)).collect();
    let ring: Vec<GroupElement> = seeds.iter().map(|a| *a.public_key()).collect();

    // Signature over a different soul key than the one carried.
    let tx = signed_cert(&seeds[1], ring.clone(), &mut rng);
    let mut cer = CerInfo::decode(&tx.data).unwrap();
    let other = Account::generate(&mut rng);
    cer.pk_soul = *other.public_key();
    let tx = build_certification_tx(&other, &cer, 0, &mut rng).unwrap();
    assert_eq!(run_one(&mut c, tx).error(), Some(ReceiptError::InvalidRingSignature));

    // Same key image reused, but the failed attempt did not burn it.
    let tx = signed_cert(&seeds[1], ring, &mut rng);
    assert!(run_one(&mut c, tx).accepted());
}

#[test]
fn soul_tx_to_identity_contract_is_malformed() {
    let mut rng = rng(10);
    let mut c = chain();
    let s = register(&mut c, "ID-0", &mut rng);
    let (soul, tx) = certification_tx(&s, &c, 1, &mut rng);
    let misrouted = Transaction::new_signed(&soul, identity_auth_address(), 0, tx.data.clone(), &mut rng);
    assert_eq!(run_one(&mut c, misrouted).error(), Some(ReceiptError::MalformedPayload));
    assert_ne!(identity_auth_address(), soul_cert_address());
}
