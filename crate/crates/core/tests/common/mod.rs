//! Shared fixtures: example pipelines are expensive, so each test binary
//! builds every one at most once.
#![allow(dead_code)]

pub mod oracles;

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use tropdeg::examples::{ExampleSpec, Pipeline};

type Slot = &'static OnceLock<Pipeline>;

fn slots() -> &'static Mutex<BTreeMap<String, Slot>> {
    static SLOTS: OnceLock<Mutex<BTreeMap<String, Slot>>> = OnceLock::new();
    SLOTS.get_or_init(Default::default)
}

/// The pipeline for `spec`, built on first use.
pub fn pipeline(spec: &ExampleSpec) -> &'static Pipeline {
    let key = format!("{}/{:?}/{:?}", spec.name, spec.k, spec.i);
    let slot: Slot = *slots().lock().unwrap().entry(key).or_insert_with(|| Box::leak(Box::default()));
    slot.get_or_init(|| spec.build().unwrap_or_else(|e| panic!("{spec:?}: {e}")))
}

pub fn kp1_2(k: usize) -> &'static Pipeline {
    pipeline(&ExampleSpec::kp1_2(k))
}

pub fn quintic(i: usize) -> &'static Pipeline {
    pipeline(&ExampleSpec::quintic(i))
}

pub fn hypercube(k: usize) -> &'static Pipeline {
    pipeline(&ExampleSpec::hypercube(k))
}

/// Every example in the corpus.
pub fn corpus() -> Vec<ExampleSpec> {
    let mut v: Vec<ExampleSpec> = (1..=3).map(ExampleSpec::kp1_2).collect();
    v.extend((1..=4).map(ExampleSpec::quintic));
    v.extend((1..=3).map(ExampleSpec::hypercube));
    v
}
