use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{derive_serial, BenchmarkSource, CorpusError, KernelTuple, TokenCounter, Verification};
use crate::api::Api;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleReport {
    /// Benchmarks with no OpenMP or CUDA member.
    pub discarded: Vec<String>,
    /// Benchmarks whose derived Serial member still calls `omp_*` functions.
    pub runtime_call_flags: BTreeMap<String, Vec<String>>,
    pub derived_serial: Vec<String>,
}

/// Groups sources by benchmark, deriving a Serial member from the OpenMP one
/// when `derive` is set and no Serial source exists.
pub fn build_tuples(
    sources: Vec<BenchmarkSource>,
    derive: bool,
    counter: &TokenCounter,
    categories: &BTreeMap<String, String>,
) -> Result<(Vec<KernelTuple>, TupleReport), CorpusError> {
    let mut grouped: BTreeMap<String, BTreeMap<Api, BenchmarkSource>> = BTreeMap::new();
    for source in sources {
        let members = grouped.entry(source.benchmark_id.clone()).or_default();
        if let Some(existing) = members.get(&source.api) {
            return Err(CorpusError::DuplicateSource {
                benchmark_id: source.benchmark_id.clone(),
                api: source.api,
                first: existing.main_file_path.clone(),
                second: source.main_file_path,
            });
        }
        members.insert(source.api, source);
    }

    let mut report = TupleReport::default();
    let mut tuples = Vec::new();
    for (benchmark_id, mut members) in grouped {
        if !members.contains_key(&Api::OpenMP) && !members.contains_key(&Api::Cuda) {
            report.discarded.push(benchmark_id);
            continue;
        }
        if derive && !members.contains_key(&Api::Serial) {
            if let Some(omp) = members.get(&Api::OpenMP) {
                let derivation = derive_serial(&omp.source_text);
                if !derivation.runtime_calls.is_empty() {
                    report
                        .runtime_call_flags
                        .insert(benchmark_id.clone(), derivation.runtime_calls.clone());
                }
                report.derived_serial.push(benchmark_id.clone());
                let serial = BenchmarkSource {
                    benchmark_id: benchmark_id.clone(),
                    api: Api::Serial,
                    main_file_path: omp.main_file_path.clone(),
                    token_count: counter.count(&derivation.source),
                    source_text: derivation.source,
                    verified: Verification::Unverified,
                };
                members.insert(Api::Serial, serial);
            }
        }
        tuples.push(KernelTuple {
            category: categories.get(&benchmark_id).cloned(),
            benchmark_id,
            members,
        });
    }
    Ok((tuples, report))
}
