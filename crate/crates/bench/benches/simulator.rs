use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hashpim::keccak::round_body_microcode;
use hashpim::reference::{self, SoftState};
use hashpim_bench::{machine, round_programs, units};

fn reference_permutation(c: &mut Criterion) {
    let mut state =
        SoftState::from_lanes(&std::array::from_fn(|i| i as u64 * 0x9e37_79b9_7f4a_7c15));
    c.bench_function("reference/keccak_f", |b| {
        b.iter(|| {
            reference::keccak_f(&mut state);
            black_box(&state);
        })
    });
}

fn simulated_round(c: &mut Criterion) {
    let hp = machine();
    let mut group = c.benchmark_group("simulated_round");
    group.sample_size(10);
    for count in [1, 378] {
        let set = units(&hp, count);
        let (body, iota) = round_programs(&hp, &set).unwrap();
        let mut session = hp.session().unwrap();
        for u in 0..count {
            session.write_state(u, &[0x5a5a; 25]).unwrap();
        }
        group.throughput(Throughput::Elements(count as u64));
        group.bench_with_input(BenchmarkId::from_parameter(count), &count, |b, _| {
            b.iter(|| {
                session.run(&body).unwrap();
                session.run(&iota).unwrap();
            })
        });
    }
    group.finish();
}

fn schedule_round(c: &mut Criterion) {
    let hp = machine();
    let mut group = c.benchmark_group("schedule_round");
    group.sample_size(10);
    for count in [1, 378] {
        let set = units(&hp, count);
        let stream = round_body_microcode(&set).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(count), &stream, |b, s| {
            b.iter(|| black_box(hp.compile(s).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    reference_permutation,
    simulated_round,
    schedule_round
);
criterion_main!(benches);
