use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use vpseval_core::evaluate::{evaluate_videos, VideoPair};
use vpseval_core::exec::Execution;
use vpseval_core::metrics::DEFAULT_SPANS;
use vpseval_core::synth::{corrupt, demo_categories, generate, CorruptionSpec, SceneSpec};
use vpseval_core::tubes::PairHistogram;

fn pairs(n: u64) -> Vec<VideoPair> {
    let cats = demo_categories();
    (0..n)
        .map(|seed| {
            let (gt, _) = generate(&SceneSpec::new(256, 256, 20, 5, 3, seed), &cats).unwrap();
            let spec = CorruptionSpec {
                stuff_flip_prob: 0.3,
                erode_radius: 1,
                seed,
                ..Default::default()
            };
            let pred = corrupt(&gt, &spec, &cats).unwrap();
            VideoPair {
                video_id: format!("{seed:04}"),
                pred,
                gt,
            }
        })
        .collect()
}

fn frame_histogram(c: &mut Criterion) {
    let p = pairs(1).remove(0);
    let (a, b) = (p.pred.frame(0).pixels(), p.gt.frame(0).pixels());
    let mut g = c.benchmark_group("frame_histogram");
    g.throughput(Throughput::Elements(a.len() as u64));
    g.bench_function("256x256", |bch| {
        bch.iter(|| PairHistogram::from_maps(black_box(a), black_box(b)))
    });
    g.finish();
}

fn dataset(c: &mut Criterion) {
    let cats = demo_categories();
    let data = pairs(16);
    let mut g = c.benchmark_group("evaluate_16_videos");
    g.sample_size(10);
    g.throughput(Throughput::Elements(data.len() as u64));
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel { jobs: 0 }),
    ] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bch, &exec| {
            bch.iter(|| evaluate_videos(black_box(&data), &cats, &DEFAULT_SPANS, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, frame_histogram, dataset);
criterion_main!(benches);
