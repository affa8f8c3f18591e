use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use zkbid_chain::{identity_hash, ReceiptError};
use zkbid_core::face::{RawFeatures, ThresholdConfig, FEATURE_DIM};
use zkbid_core::lrs::RingConfig;
use zkbid_core::{Account, GroupElement};
use zkbid_wallet::*;
use zkbid_zk::{facematch_circuit, transparent};

fn setup_store(dir: &std::path::Path) -> WalletStore {
    let store = WalletStore::new(dir);
    let (pk, vk) = transparent::keygen(facematch_circuit());
    install_setup(&store, &pk, &vk, &ThresholdConfig::default()).unwrap();
    store
}

/// A second wallet sharing the first one's setup and chain.
fn sibling(base: &WalletStore, dir: &std::path::Path) -> WalletStore {
    let s = WalletStore::new(dir);
    for f in ["setup/proving.key", "setup/verifying.key", "setup/threshold.json"] {
        std::fs::create_dir_all(s.path(f).parent().unwrap()).unwrap();
        std::fs::copy(base.path(f), s.path(f)).unwrap();
    }
    s
}

fn input(id: &str, rng: &mut ChaCha20Rng) -> IdentityInput {
    let live: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let card: Vec<f64> = live.iter().map(|x| x + rng.gen_range(-0.01..0.01)).collect();
    IdentityInput {
        id_number: id.into(),
        live: RawFeatures::Float(live),
        card: RawFeatures::Float(card),
    }
}

#[test]
fn enroll_register_certify_on_local_node() {
    let tmp = tempfile::tempdir().unwrap();
    let base = setup_store(&tmp.path().join("u0"));
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut stores = vec![base.clone()];
    for i in 1..4 {
        stores.push(sibling(&base, &tmp.path().join(format!("u{i}"))));
    }

    {
        let node = LocalNode::open(&base.node_dir()).unwrap();
        let s = status(&node).unwrap();
        assert_eq!((s.height, s.seed_accounts, s.soul_accounts, s.key_images), (0, 0, 0, 0));
    }

    for (i, s) in stores.iter().enumerate() {
        let e = enroll(s, &input(&format!("L-{i}"), &mut rng), &mut rng).unwrap();
        assert_eq!(e.reg.id_hash, identity_hash(&format!("L-{i}")));
        assert_eq!(s.seed().unwrap(), e.seed);
        assert_eq!(s.reginfo().unwrap(), e.reg);
        let mut node = LocalNode::open(&base.node_dir()).unwrap();
        assert!(register(s, &mut node, &mut rng).unwrap().accepted());
    }
    assert!(matches!(enroll(&stores[0], &input("L-0", &mut rng), &mut rng), Err(WalletError::AlreadyEnrolled)));

    let mut node = LocalNode::open(&base.node_dir()).unwrap();
    let again = register(&stores[0], &mut node, &mut rng).unwrap();
    assert_eq!(again.error(), Some(ReceiptError::DuplicateIdentity));

    let out = certify(&stores[1], &mut node, RingConfig { ring_size: 4 }, &mut rng).unwrap();
    assert!(out.receipt.accepted());
    assert_eq!(stores[1].soul().unwrap(), Some(out.soul.clone()));
    assert!(node.state().unwrap().is_certified_soul(out.soul.public_key()));

    let twice = certify(&stores[1], &mut node, RingConfig { ring_size: 3 }, &mut rng).unwrap();
    assert_eq!(twice.receipt.error(), Some(ReceiptError::DuplicateKeyImage));
    assert_eq!(stores[1].soul().unwrap(), Some(out.soul));

    let too_big = certify(&stores[2], &mut node, RingConfig { ring_size: 11 }, &mut rng).unwrap_err();
    assert_eq!(too_big.class(), ExitClass::AnonymitySet);

    // Reopening replays the persisted chain.
    let reopened = LocalNode::open(&base.node_dir()).unwrap();
    let s = status(&reopened).unwrap();
    assert_eq!((s.seed_accounts, s.soul_accounts, s.key_images), (4, 1, 1));
    assert_eq!(reopened.chain().head_hash(), node.chain().head_hash());
    assert_eq!(stores[1].receipts().unwrap().len(), 3);
}

#[test]
fn face_mismatch_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let store = setup_store(tmp.path());
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut a = vec![0.0; FEATURE_DIM];
    let mut b = vec![0.0; FEATURE_DIM];
    a[0] = 1.0;
    b[1] = 1.0;
    let bad = IdentityInput {
        id_number: "X".into(),
        live: RawFeatures::Float(a),
        card: RawFeatures::Float(b),
    };
    let err = enroll(&store, &bad, &mut rng).unwrap_err();
    assert!(matches!(err, WalletError::Enroll(zkbid_chain::EnrollError::FaceMismatch { .. })));
    assert_eq!(err.class(), ExitClass::Input);
    assert!(!store.path("wallet").exists());

    let zero = IdentityInput {
        id_number: "X".into(),
        live: RawFeatures::Float(vec![0.0; FEATURE_DIM]),
        card: RawFeatures::Float(vec![0.0; FEATURE_DIM]),
    };
    assert!(matches!(
        enroll(&store, &zero, &mut rng),
        Err(WalletError::Face(zkbid_core::face::FaceError::ZeroNormVector))
    ));
    assert!(!store.path("wallet").exists());
}

#[test]
fn missing_setup_and_enrollment_are_state_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let store = WalletStore::new(tmp.path());
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let err = enroll(&store, &input("A", &mut rng), &mut rng).unwrap_err();
    assert!(matches!(err, WalletError::NotSetUp(_)));
    assert_eq!(err.class(), ExitClass::WalletState);

    let store = setup_store(tmp.path());
    let mut node = LocalNode::open(&store.node_dir()).unwrap();
    assert!(matches!(register(&store, &mut node, &mut rng), Err(WalletError::NotEnrolled)));
}

#[test]
fn certify_before_registration_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let store = setup_store(tmp.path());
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    enroll(&store, &input("A", &mut rng), &mut rng).unwrap();
    let mut node = LocalNode::open(&store.node_dir()).unwrap();
    assert!(matches!(
        certify(&store, &mut node, RingConfig { ring_size: 1 }, &mut rng),
        Err(WalletError::NotRegistered)
    ));
}

#[cfg(unix)]
#[test]
fn secret_files_are_private() {
    use std::os::unix::fs::PermissionsExt;
    let tmp = tempfile::tempdir().unwrap();
    let store = setup_store(tmp.path());
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    enroll(&store, &input("A", &mut rng), &mut rng).unwrap();
    for f in ["wallet/seed.json", "wallet/features.json"] {
        let mode = std::fs::metadata(store.path(f)).unwrap().permissions().mode();
        assert_eq!(mode & 0o077, 0, "{f}");
    }
}

/// Chi-square critical value, 10 degrees of freedom, significance 0.01.
const CHI2_10_01: f64 = 23.209;

#[test]
fn signer_position_is_uniform() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let seed = Account::generate(&mut rng);
    let mut registry: Vec<GroupElement> = (0..30).map(|_| *Account::generate(&mut rng).public_key()).collect();
    registry.push(*seed.public_key());
    let n = 11;
    let trials = 1000;
    let mut counts = vec![0usize; n];
    for _ in 0..trials {
        let c = zkbid_chain::certify(&seed, &registry, RingConfig { ring_size: n }, &mut rng).unwrap();
        assert_eq!(c.cer.ring.position(seed.public_key()), Some(c.signer_index));
        counts[c.signer_index] += 1;
    }
    let expected = trials as f64 / n as f64;
    let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_10_01, "chi2 = {chi2}, counts {counts:?}");
}
