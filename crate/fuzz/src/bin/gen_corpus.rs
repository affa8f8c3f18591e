//! Writes the checked-in seed inputs under `corpus/<target>/seed-*`.
//!
//! Run from the fuzz directory: `cargo run --release --bin gen-corpus`.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use zkbid_chain::store::{append_block, create_chain_file};
use zkbid_chain::{build_certification_tx, build_registration_tx, certify, enroll, Chain, Genesis, TxPool};
use zkbid_core::face::{normalize_features, RawFeatures, ThresholdConfig, FEATURE_DIM};
use zkbid_core::lrs::RingConfig;
use zkbid_core::{Account, Scalar};
use zkbid_netsim::SimConfig;
use zkbid_zk::facematch_circuit;

fn put(target: &str, name: &str, bytes: &[u8]) {
    let dir = Path::new("corpus").join(target);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join(format!("seed-{name}")), bytes).unwrap();
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xf022);
    let cfg = ThresholdConfig::default();
    let (pk, vk) = zkbid_zk::keygen(facematch_circuit(), &mut rng);
    let genesis = Genesis::new(&vk, &cfg, 50);
    let mut chain = Chain::new(genesis.clone()).unwrap();

    let mut enrollments = Vec::new();
    for i in 0..2 {
        let raw: Vec<f64> = (0..FEATURE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let card: Vec<f64> = raw.iter().map(|x| x + rng.gen_range(-0.01..0.01)).collect();
        let live = normalize_features(&raw).unwrap();
        let card = normalize_features(&card).unwrap();
        let e = enroll(&format!("SEED-{i}"), &live, &card, &pk, &cfg, &mut rng).unwrap();
        if i == 0 {
            put("feature_json", "float", RawFeatures::Float(raw).to_json().as_bytes());
            put("feature_json", "fixed", RawFeatures::Fixed(card.coords().to_vec()).to_json().as_bytes());
        }
        enrollments.push(e);
    }

    let mut pool = TxPool::new();
    for (i, e) in enrollments.iter().enumerate() {
        let tx = build_registration_tx(&e.seed, &e.reg, 0, &mut rng).unwrap();
        if i == 0 {
            put("tx_decode", "registration", &tx.encode());
            put("reginfo_decode", "reginfo", &e.reg.encode());
            put("zk_container", "proof", e.reg.zkp.as_bytes());
        }
        pool.insert(tx, i as u64);
    }
    let (b1, r1) = chain.produce_block(&mut pool);

    let registry = chain.state().seed_keys();
    let c = certify(&enrollments[0].seed, &registry, RingConfig { ring_size: 2 }, &mut rng).unwrap();
    let tx = build_certification_tx(&c.soul, &c.cer, 0, &mut rng).unwrap();
    put("tx_decode", "certification", &tx.encode());
    put("cerinfo_decode", "cerinfo", &c.cer.encode());
    put("ring_sig", "ring2", &c.cer.sig.to_bytes());
    pool.insert(tx, 10);
    let again = certify(&enrollments[0].seed, &registry, RingConfig { ring_size: 2 }, &mut rng).unwrap();
    pool.insert(build_certification_tx(&again.soul, &again.cer, 0, &mut rng).unwrap(), 11);
    let (b2, r2) = chain.produce_block(&mut pool);
    let (empty, _) = chain.produce_block(&mut pool);

    put("block_decode", "registrations", &b1.encode());
    put("block_decode", "certification", &b2.encode());
    put("block_decode", "empty", &empty.encode());
    put("genesis_decode", "genesis", &genesis.encode());
    put("zk_container", "vk", &vk.to_bytes());
    put("state_decode", "state", &chain.state().canonical_bytes());

    let path = std::env::temp_dir().join("zkbid-seed-chain.bin");
    let _ = fs::remove_file(&path);
    create_chain_file(&path, &genesis).unwrap();
    for b in chain.blocks() {
        append_block(&path, b).unwrap();
    }
    put("chain_file", "three-blocks", &fs::read(&path).unwrap());
    fs::remove_file(&path).unwrap();

    let acct = Account::generate(&mut rng);
    put("group_decode", "point", &acct.public_key().to_bytes());
    put("group_decode", "scalar", &Scalar::random(&mut rng).to_bytes());
    put("group_decode", "identity", &[0u8; 33]);

    put("sim_config", "default-json", serde_json::to_string(&SimConfig::default()).unwrap().as_bytes());
    put("sim_config", "ring-toml", b"n_nodes = 4\ntopology = \"ring\"\nblock_interval_ms = 15000\n[latency]\nbase_ms = 20\njitter_ms = 10\n");

    put("receipt_json", "accepted", serde_json::to_string(&r1[0]).unwrap().as_bytes());
    put("receipt_json", "duplicate", serde_json::to_string(&r2[1]).unwrap().as_bytes());
}
