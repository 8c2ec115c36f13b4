//! Parallel versus sequential throughput of the data-parallel hot paths.
//!
//! Each workload runs once on a one-thread pool and once on the default pool.
//! Built with `--no-default-features` both variants take the plain-iterator path,
//! which gives the baseline for the fallback itself.

use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use panda::dataset::{normal_configurations, split_known_n, Dataset};
use panda::dse::{explore, BaseConfig, DesignSpace, ExploreOptions};
use panda::evalharness::{run_protocol, EvalOptions, ModelKind};
use panda::par;
use panda::power_model::{train_panda, PandaOptions};
use panda::quality::train_perf;
use panda::regressor::TrainOptions;
use panda::resource::ResourceParams;
use panda::synth::{generate, SynthSpec};

const MODES: [(&str, usize); 2] = [("sequential", 1), ("parallel", 0)];

fn dataset() -> Dataset {
    generate(&SynthSpec::default_for(11)).expect("default spec is valid")
}

fn bench_synth(c: &mut Criterion) {
    let spec = SynthSpec::default_for(11);
    let mut g = c.benchmark_group("synth_generate");
    for (name, threads) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || generate(black_box(&spec)).unwrap()))
        });
    }
    g.finish();
}

fn bench_train(c: &mut Criterion) {
    let ds = dataset();
    let opts = PandaOptions::from(TrainOptions::default().with_n_trees(30).unwrap());
    let mut g = c.benchmark_group("train_panda");
    g.sample_size(10);
    for (name, threads) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || train_panda(&ds, opts, &ResourceParams::default()).unwrap()))
        });
    }
    g.finish();
}

fn bench_protocol(c: &mut Criterion) {
    let ds = dataset();
    let ids: Vec<String> = normal_configurations().into_iter().map(|c| c.id).collect();
    let plan = split_known_n(&ids, 5).unwrap();
    let opts = EvalOptions {
        panda: PandaOptions::from(TrainOptions::default().with_n_trees(20).unwrap()),
        ..Default::default()
    };
    let mut g = c.benchmark_group("known_n_protocol");
    g.sample_size(10);
    for (name, threads) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || run_protocol(&ds, &plan, ModelKind::Panda, &opts).unwrap()))
        });
    }
    g.finish();
}

fn bench_dse(c: &mut Criterion) {
    let spec = SynthSpec::default_for(11);
    let ds = generate(&spec).unwrap();
    let opts = TrainOptions::default().with_n_trees(20).unwrap();
    let pm = train_panda(&ds, opts, &ResourceParams::default()).unwrap();
    let cal = train_perf(&ds, &opts).unwrap();
    let space = DesignSpace {
        base: BaseConfig::Builtin("C8".into()),
        grid: BTreeMap::from([
            ("DecodeWidth".to_string(), vec![1, 2, 3, 4]),
            ("RobEntry".to_string(), vec![32, 64, 96, 128]),
            ("DCacheWay".to_string(), vec![2, 4, 8]),
        ]),
        ties: BTreeMap::new(),
        rules: vec![],
    };
    let explore_opts = ExploreOptions {
        constraint: 10.0,
        tolerance: 0.05,
        top_k: 5,
    };
    let mut g = c.benchmark_group("dse_explore");
    g.sample_size(10);
    for (name, threads) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || explore(&space, &pm, &cal, &spec, explore_opts).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_synth, bench_train, bench_protocol, bench_dse);
criterion_main!(benches);
