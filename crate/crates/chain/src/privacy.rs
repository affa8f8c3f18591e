//! Field inventory of the serialized chain state, for privacy audits.
//!
//! Each entry names one stored field and which account class it belongs to.
//! The invariant checked by [`schema_has_no_join`] is that no record holds
//! both a seed-side and a soul-side field.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldClass {
    /// Identity hash, seed key, registration proof.
    Seed,
    /// Soul key, key image.
    Soul,
    /// Per-address nonce; addresses of both classes appear, one per record.
    Account,
    /// Execution log accumulator.
    Meta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub record: &'static str,
    pub field: &'static str,
    pub class: FieldClass,
}

pub const STATE_SCHEMA: &[FieldSpec] = &[
    FieldSpec { record: "seed_store", field: "id_hash", class: FieldClass::Seed },
    FieldSpec { record: "seed_store", field: "pk_seed", class: FieldClass::Seed },
    FieldSpec { record: "seed_store", field: "zkp", class: FieldClass::Seed },
    FieldSpec { record: "key_images", field: "key_image", class: FieldClass::Soul },
    FieldSpec { record: "soul_store", field: "pk_soul", class: FieldClass::Soul },
    FieldSpec { record: "nonces", field: "address", class: FieldClass::Account },
    FieldSpec { record: "nonces", field: "next_nonce", class: FieldClass::Account },
    FieldSpec { record: "history", field: "digest", class: FieldClass::Meta },
];

/// True iff no record type mixes seed-side and soul-side fields.
pub fn schema_has_no_join(schema: &[FieldSpec]) -> bool {
    let mut records: Vec<&str> = schema.iter().map(|f| f.record).collect();
    records.dedup();
    records.iter().all(|rec| {
        let classes: Vec<FieldClass> = schema.iter().filter(|f| f.record == *rec).map(|f| f.class).collect();
        !(classes.contains(&FieldClass::Seed) && classes.contains(&FieldClass::Soul))
    })
}

/// Positions of `needle` inside `haystack`.
pub fn find_all(haystack: &[u8], needle: &[u8]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    haystack
        .windows(needle.len())
        .enumerate()
        .filter(|(_, w)| *w == needle)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_schema_has_no_join() {
        assert!(schema_has_no_join(STATE_SCHEMA));
        let mut joined = STATE_SCHEMA.to_vec();
        joined.push(FieldSpec {
            record: "seed_store",
            field: "pk_soul",
            class: FieldClass::Soul,
        });
        assert!(!schema_has_no_join(&joined));
    }

    #[test]
    fn substring_search() {
        assert_eq!(find_all(b"abcabc", b"bc"), vec![1, 4]);
        assert!(find_all(b"ab", b"abc").is_empty());
    }
}
