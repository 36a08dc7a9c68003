//! Seeded synthetic schemata for benchmarks and tests.
//!
//! Schemata are two-level (tables and columns) with names and documentation
//! drawn from a shared word pool, so two schemata generated from the same
//! pool overlap partially the way real systems in one domain do.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Schema, SchemaBuilder, SourceFormat};

const WORDS: &[&str] = &[
    "account", "action", "address", "agency", "aircraft", "alert", "amount", "area", "asset", "audit",
    "balance", "base", "begin", "billing", "birth", "branch", "budget", "building", "cargo", "case",
    "category", "center", "channel", "city", "claim", "class", "code", "comment", "contact", "contract",
    "cost", "count", "country", "course", "customer", "damage", "date", "death", "delivery", "department",
    "depot", "description", "detail", "device", "distance", "district", "document", "duration", "duty", "effective",
    "email", "employee", "end", "equipment", "estimate", "event", "expiry", "facility", "family", "fee",
    "field", "flight", "fuel", "fund", "gender", "grade", "group", "height", "history", "identifier",
    "incident", "income", "info", "injury", "inventory", "invoice", "issue", "item", "language", "latitude",
    "level", "license", "limit", "line", "location", "longitude", "maintenance", "manager", "measure", "medical",
    "message", "method", "mission", "model", "name", "nation", "note", "number", "office", "operator",
    "order", "organization", "origin", "owner", "package", "part", "party", "patient", "payment", "period",
    "permit", "person", "phone", "place", "plan", "policy", "position", "priority", "product", "project",
    "quantity", "rank", "rate", "reason", "record", "region", "report", "request", "resource", "result",
    "route", "schedule", "sector", "sequence", "service", "shipment", "site", "size", "source", "staff",
    "start", "state", "station", "status", "stock", "street", "subject", "supplier", "supply", "system",
    "target", "task", "tax", "team", "time", "title", "total", "track", "transfer", "type",
    "unit", "user", "value", "vehicle", "vendor", "version", "vessel", "visit", "vital", "warehouse",
    "weapon", "weight", "window", "work", "year", "zone",
];

const FILLER: &[&str] = &["the", "of", "a", "for", "when", "which", "is", "in"];

fn phrase(rng: &mut ChaCha8Rng, pool: &[&'static str], lo: usize, hi: usize) -> Vec<&'static str> {
    let n = rng.gen_range(lo..=hi);
    (0..n).map(|_| *pool.choose(rng).expect("non-empty pool")).collect()
}

fn name(rng: &mut ChaCha8Rng, pool: &[&'static str], table: bool) -> String {
    let words = phrase(rng, pool, 1, 3);
    match rng.gen_range(0..4) {
        0 => words.iter().map(|w| w.to_uppercase()).collect::<Vec<_>>().join("_"),
        1 => words
            .iter()
            .map(|w| {
                let mut c = w.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
            })
            .collect(),
        _ if table => words.join("_"),
        _ => {
            let mut s = words.join("_");
            if rng.gen_bool(0.2) {
                s.push_str(&format!("_{}", rng.gen_range(1..999)));
            }
            s
        }
    }
}

fn documentation(rng: &mut ChaCha8Rng, pool: &[&'static str]) -> String {
    if rng.gen_bool(0.3) {
        return String::new();
    }
    let mut words = Vec::new();
    for w in phrase(rng, pool, 2, 6) {
        if rng.gen_bool(0.4) {
            words.push(*FILLER.choose(rng).expect("non-empty"));
        }
        words.push(w);
    }
    words.join(" ")
}

/// Schema with exactly `element_count` elements. `vocabulary` limits the word
/// pool to a window of it starting at `offset`, which controls how much two
/// generated schemata share.
pub fn generate_schema_with_pool(
    seed: u64,
    id: &str,
    name_: &str,
    element_count: usize,
    offset: usize,
    vocabulary: usize,
) -> Schema {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = vocabulary.clamp(1, WORDS.len());
    let pool: Vec<&'static str> = (0..size).map(|k| WORDS[(offset + k) % WORDS.len()]).collect();
    let mut b = SchemaBuilder::new(id, name_, SourceFormat::Canonical);
    let types = ["INTEGER", "VARCHAR(64)", "DATE", "DECIMAL(12,2)", "TEXT", "TIMESTAMP"];
    let mut remaining = element_count;
    while remaining > 0 {
        let columns = rng.gen_range(2..=16).min(remaining - 1);
        let t = b.add(None, name(&mut rng, &pool, true), documentation(&mut rng, &pool), "TABLE");
        for _ in 0..columns {
            let ty = types.choose(&mut rng).expect("non-empty");
            b.add(Some(t), name(&mut rng, &pool, false), documentation(&mut rng, &pool), *ty);
        }
        remaining -= columns + 1;
    }
    b.build().expect("generated ids are unique")
}

/// Schema with exactly `element_count` elements over the full word pool.
pub fn generate_schema(seed: u64, id: &str, name: &str, element_count: usize) -> Schema {
    generate_schema_with_pool(seed, id, name, element_count, 0, WORDS.len())
}

/// Two schemata over overlapping halves of the word pool.
pub fn generate_pair(seed: u64, left_count: usize, right_count: usize) -> (Schema, Schema) {
    let third = WORDS.len() / 3;
    (
        generate_schema_with_pool(seed, "left", "Left", left_count, 0, 2 * third),
        generate_schema_with_pool(seed.wrapping_add(1), "right", "Right", right_count, third, 2 * third),
    )
}

const SMALL_POOL: &[&str] = &[
    "date", "datetime", "begin", "beginning", "event", "events", "place", "person", "name", "start",
    "vital", "vitals", "code", "id", "the", "all", "info", "first", "type", "time",
];

fn random_name<R: Rng>(rng: &mut R) -> String {
    let words = rng.gen_range(1..=3);
    let mut parts: Vec<String> = (0..words)
        .map(|_| SMALL_POOL.choose(rng).expect("non-empty").to_string())
        .collect();
    if rng.gen_bool(0.15) {
        parts.push(rng.gen_range(0..200).to_string());
    }
    match rng.gen_range(0..3) {
        0 => parts.join("_").to_uppercase(),
        1 => parts
            .iter()
            .map(|w| {
                let mut c = w.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
            })
            .collect(),
        _ => parts.join("_"),
    }
}

fn random_doc<R: Rng>(rng: &mut R) -> String {
    if rng.gen_bool(0.5) {
        return String::new();
    }
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|_| *SMALL_POOL.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Small random forest (depth ≤ 3) with up to `max_elements` elements, names
/// and documentation drawn from a deliberately overlapping word pool.
pub fn random_schema<R: Rng>(rng: &mut R, id: &str, max_elements: usize) -> Schema {
    let target = rng.gen_range(0..=max_elements);
    let mut b = SchemaBuilder::new(id, id, SourceFormat::Canonical);
    fn grow<R: Rng>(rng: &mut R, b: &mut SchemaBuilder, parent: Option<usize>, depth: u32, target: usize) {
        while b.len() < target {
            let idx = b.add(parent, random_name(rng), random_doc(rng), "");
            if depth < 3 && rng.gen_bool(0.5) {
                grow(rng, b, Some(idx), depth + 1, target);
            }
            if parent.is_some() && rng.gen_bool(0.4) {
                return;
            }
        }
    }
    grow(rng, &mut b, None, 1, target);
    b.build().expect("generated ids are unique")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_canonical;

    #[test]
    fn exact_sizes_and_determinism() {
        for n in [0, 1, 2, 17, 784, 1378] {
            assert_eq!(generate_schema(7, "s", "S", n).element_count(), n);
        }
        let (a, b) = generate_pair(42, 1378, 784);
        assert_eq!((a.element_count(), b.element_count()), (1378, 784));
        let (c, _) = generate_pair(42, 1378, 784);
        assert_eq!(write_canonical(&a), write_canonical(&c));
        assert_ne!(write_canonical(&a), write_canonical(&generate_schema(43, "left", "Left", 1378)));
        assert!(a.max_depth() <= 2);
    }

    #[test]
    fn random_schemata_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_schema(&mut rng, "r", 10);
            assert!(s.element_count() <= 10);
            assert!(s.max_depth() <= 3);
        }
    }
}
