use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use concordia_bench::{pair, SIZES};
use concordia_core::engine::similarity::{edit_similarity, prefix_jaccard};
use concordia_core::filters::confidence_filter;
use concordia_core::{match_schemas, MatchConfig};

fn full_match(c: &mut Criterion) {
    let cfg = MatchConfig::default();
    let mut group = c.benchmark_group("match");
    group.sample_size(10);
    for &(l, r) in SIZES {
        let (left, right) = pair(l, r);
        group.throughput(Throughput::Elements((l * r) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(format!("{l}x{r}")), &(left, right), |b, (left, right)| {
            b.iter(|| match_schemas(left.clone(), right.clone(), &cfg).unwrap())
        });
    }
    group.finish();
}

fn filter(c: &mut Criterion) {
    let (left, right) = pair(400, 250);
    let m = match_schemas(left, right, &MatchConfig::default()).unwrap();
    c.bench_function("confidence_filter/400x250", |b| b.iter(|| confidence_filter(&m, 0.0, 1.0).unwrap()));
}

fn voters(c: &mut Criterion) {
    c.bench_function("edit_similarity", |b| {
        b.iter(|| edit_similarity(criterion::black_box("DATE_BEGIN_156"), criterion::black_box("DATETIME_FIRST_INFO")))
    });
    let a = ["date", "begin", "event", "vital"];
    let z = ["datetime", "first", "info", "event"];
    c.bench_function("prefix_jaccard", |b| b.iter(|| prefix_jaccard(criterion::black_box(&a), criterion::black_box(&z))));
}

criterion_group!(benches, full_match, filter, voters);
criterion_main!(benches);
