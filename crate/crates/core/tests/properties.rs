use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use zkbid_core::face::{cosine_similarity_fixed, face_match, normalize_features, RawFeatures, ThresholdConfig, FEATURE_DIM};
use zkbid_core::lrs::{key_image, link, ring_sign, ring_verify, LinkableRingSig, Ring};
use zkbid_core::{Account, GroupElement};

fn features() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, FEATURE_DIM).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_signatures_verify_link_and_round_trip(seed: u64, size in 1usize..9, pos_frac in 0.0f64..1.0) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let signer = Account::generate(&mut rng);
        let pos = ((size as f64 * pos_frac) as usize).min(size - 1);
        let mut members: Vec<GroupElement> = (1..size).map(|_| *Account::generate(&mut rng).public_key()).collect();
        members.insert(pos, *signer.public_key());
        let ring = Ring::new(members).unwrap();

        let sig = ring_sign(signer.secret_key(), pos, &ring, b"msg", &mut rng).unwrap();
        prop_assert!(ring_verify(&ring, b"msg", &sig));
        prop_assert!(!ring_verify(&ring, b"other", &sig));
        prop_assert_eq!(sig.key_image, key_image(signer.secret_key(), signer.public_key()).unwrap());
        prop_assert_eq!(LinkableRingSig::from_bytes(&sig.to_bytes()).unwrap(), sig.clone());

        let solo = Ring::new(vec![*signer.public_key()]).unwrap();
        let again = ring_sign(signer.secret_key(), 0, &solo, b"msg", &mut rng).unwrap();
        prop_assert!(link(&sig, &again));
    }

    #[test]
    fn account_signatures_bind_key_and_message(seed: u64, msg in prop::collection::vec(any::<u8>(), 0..64)) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = Account::generate(&mut rng);
        let b = Account::generate(&mut rng);
        let sig = a.sign(&msg, &mut rng);
        prop_assert!(zkbid_core::account::account_verify(a.public_key(), &msg, &sig));
        prop_assert!(!zkbid_core::account::account_verify(b.public_key(), &msg, &sig));
        let mut other = msg.clone();
        other.push(0);
        prop_assert!(!zkbid_core::account::account_verify(a.public_key(), &other, &sig));
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in features(), b in features(), tau in 0.0f64..0.99) {
        let fa = normalize_features(&a).unwrap();
        let fb = normalize_features(&b).unwrap();
        let s = cosine_similarity_fixed(&fa, &fb);
        prop_assert_eq!(s, cosine_similarity_fixed(&fb, &fa));
        let bound = (fa.norm_sq() as f64 * fb.norm_sq() as f64).sqrt();
        prop_assert!((s as f64).abs() <= bound);
        let cfg = ThresholdConfig::new(tau).unwrap();
        prop_assert_eq!(face_match(&fa, &fb, &cfg), face_match(&fb, &fa, &cfg));
        prop_assert!(face_match(&fa, &fa, &cfg));
    }

    #[test]
    fn feature_files_round_trip(a in features()) {
        let raw = RawFeatures::Float(a);
        let back = RawFeatures::from_json(&raw.to_json()).unwrap();
        prop_assert_eq!(back.normalize().unwrap(), raw.normalize().unwrap());
        let fixed = RawFeatures::Fixed(raw.normalize().unwrap().coords().to_vec());
        prop_assert_eq!(RawFeatures::from_json(&fixed.to_json()).unwrap().to_f64(), fixed.to_f64());
    }
}
