use freemin_core::Density;
use sha2::{Digest, Sha256};

fn digest(d: &Density) -> String {
    let mut h = Sha256::new();
    for v in d.as_slice() {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn seeded_density_is_stable() {
    let expected = include_str!("golden/random_density_n1024_seed0.sha256").trim();
    assert_eq!(digest(&Density::random(1024, 0).unwrap()), expected);
}

#[test]
fn seeds_differ() {
    assert_ne!(digest(&Density::random(1024, 0).unwrap()), digest(&Density::random(1024, 1).unwrap()));
}
