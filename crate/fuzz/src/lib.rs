//! Bodies of the fuzz targets. Each decodes untrusted bytes and, when the
//! input parses, checks that re-encoding is stable.

use zkbid_chain::store::decode_chain_file;
use zkbid_chain::{replay_chain, Block, CerInfo, ChainState, Genesis, Receipt, RegInfo, Transaction};
use zkbid_core::face::RawFeatures;
use zkbid_core::{GroupElement, LinkableRingSig, Scalar};
use zkbid_netsim::SimConfig;
use zkbid_zk::{Proof, ProvingKey, VerificationKey};

pub fn tx_decode(data: &[u8]) {
    if let Ok(tx) = Transaction::decode(data) {
        let again = Transaction::decode(&tx.encode()).expect("re-encoded tx decodes");
        assert_eq!(again, tx);
        assert_eq!(again.hash(), tx.hash());
        if let Ok(reg) = RegInfo::decode(&tx.data) {
            let _ = tx.verify_sender(&reg.pk_seed);
        }
    }
}

pub fn block_decode(data: &[u8]) {
    if let Ok(b) = Block::decode(data) {
        assert_eq!(Block::decode(&b.encode()).expect("re-encoded block decodes"), b);
    }
}

pub fn genesis_decode(data: &[u8]) {
    if let Ok(g) = Genesis::decode(data) {
        assert_eq!(Genesis::decode(&g.encode()).expect("re-encoded genesis decodes"), g);
        let _ = g.exec_context();
    }
}

pub fn reginfo_decode(data: &[u8]) {
    if let Ok(r) = RegInfo::decode(data) {
        assert_eq!(RegInfo::decode(&r.encode()).expect("re-encoded reginfo decodes"), r);
    }
}

pub fn cerinfo_decode(data: &[u8]) {
    if let Ok(c) = CerInfo::decode(data) {
        assert_eq!(CerInfo::decode(&c.encode()).expect("re-encoded cerinfo decodes"), c);
    }
}

pub fn chain_file(data: &[u8]) {
    if let Ok((genesis, blocks)) = decode_chain_file(data) {
        if blocks.len() <= 4 {
            let _ = replay_chain(&genesis, &blocks);
        }
    }
}

pub fn state_decode(data: &[u8]) {
    if let Ok(s) = ChainState::from_canonical_bytes(data) {
        assert_eq!(s.canonical_bytes(), data);
    }
}

pub fn zk_container(data: &[u8]) {
    if let Ok(vk) = VerificationKey::from_bytes(data) {
        assert!(VerificationKey::from_bytes(&vk.to_bytes()).is_ok());
    }
    if let Ok(pk) = ProvingKey::from_bytes(data) {
        assert!(ProvingKey::from_bytes(&pk.to_bytes()).is_ok());
    }
    if let Ok(p) = Proof::from_bytes(data) {
        let _ = p.decode_groth16();
    }
}

pub fn ring_sig(data: &[u8]) {
    if let Ok(sig) = LinkableRingSig::from_bytes(data) {
        assert_eq!(sig.to_bytes(), data);
    }
}

pub fn group_decode(data: &[u8]) {
    if let Ok(p) = GroupElement::from_bytes(data) {
        assert_eq!(p.to_bytes().as_slice(), data);
    }
    if let Ok(s) = Scalar::from_bytes(data) {
        assert_eq!(s.to_bytes().as_slice(), data);
    }
}

pub fn feature_json(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(raw) = RawFeatures::from_json(text) {
            let _ = raw.normalize();
        }
    }
}

pub fn sim_config(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        for cfg in [SimConfig::from_json(text), SimConfig::from_toml(text)].into_iter().flatten() {
            assert!(cfg.validate().is_ok());
        }
    }
}

pub fn receipt_json(data: &[u8]) {
    if let Ok(r) = serde_json::from_slice::<Receipt>(data) {
        let text = serde_json::to_string(&r).expect("receipt serializes");
        assert_eq!(serde_json::from_str::<Receipt>(&text).expect("receipt round trips"), r);
    }
}

/// Every target by name, for corpus replay.
pub const TARGETS: &[(&str, fn(&[u8]))] = &[
    ("tx_decode", tx_decode),
    ("block_decode", block_decode),
    ("genesis_decode", genesis_decode),
    ("reginfo_decode", reginfo_decode),
    ("cerinfo_decode", cerinfo_decode),
    ("chain_file", chain_file),
    ("state_decode", state_decode),
    ("zk_container", zk_container),
    ("ring_sig", ring_sig),
    ("group_decode", group_decode),
    ("feature_json", feature_json),
    ("sim_config", sim_config),
    ("receipt_json", receipt_json),
];
