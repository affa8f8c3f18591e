//! Replays every checked-in seed through its target, plus a few cheap
//! mutations of each, so the target bodies run under plain `cargo test`.

use std::path::Path;

use zkbid_fuzz::TARGETS;

#[test]
fn seeds_replay_cleanly() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    for (name, target) in TARGETS {
        let dir = root.join(name);
        let seeds: Vec<_> = std::fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
            .map(|e| e.unwrap().path())
            .collect();
        assert!(!seeds.is_empty(), "{name} has no seeds");
        for path in seeds {
            let bytes = std::fs::read(&path).unwrap();
            target(&bytes);
            for cut in [0, 1, bytes.len() / 2, bytes.len().saturating_sub(1)] {
                target(&bytes[..cut]);
            }
            for i in (0..bytes.len()).step_by(bytes.len() / 64 + 1) {
                let mut m = bytes.clone();
                m[i] ^= 0xff;
                target(&m);
            }
        }
    }
}
