//! Sequential vs rayon execution of the three hot loops: repetitions of the
//! estimator, groups within one estimate, and amplitude updates.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kcommute::models::{heisenberg, tfim};
use kcommute::sim::{build_random_ansatz, Circuit, Gate};
use kcommute::{estimate, repeated_error, EstimationConfig, EstimationMode, ExecPolicy, StateVector, WeightingScheme};

const POLICIES: [(&str, ExecPolicy); 2] = [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::Parallel)];

fn repetitions(c: &mut Criterion) {
    let h = tfim(8, 1.0, 1.0, true).unwrap();
    let mut group = c.benchmark_group("repeated_error");
    group.sample_size(10);
    for reps in [16, 64] {
        group.throughput(Throughput::Elements(reps as u64));
        for (name, policy) in POLICIES {
            let mut cfg = EstimationConfig::new(8, WeightingScheme::Mean, 4_000, EstimationMode::Sampled, 1);
            cfg.policy = policy;
            group.bench_with_input(BenchmarkId::new(name, reps), &reps, |b, &reps| {
                b.iter(|| repeated_error(black_box(&h), 2, 0, &cfg, reps).unwrap().stddev)
            });
        }
    }
    group.finish();
}

fn groups(c: &mut Criterion) {
    // k = 1 splits the Heisenberg chain into several qubit-wise groups
    let n = 14;
    let h = heisenberg(n, 1.0, 0.5, true).unwrap();
    let prep = build_random_ansatz(n, 2, 3);
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    for (name, policy) in POLICIES {
        let mut cfg = EstimationConfig::new(1, WeightingScheme::Uniform, 20_000, EstimationMode::Sampled, 2);
        cfg.policy = policy;
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| estimate(black_box(&h), &prep, &cfg).unwrap().value)
        });
    }
    group.finish();
}

fn amplitudes(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_circuit");
    group.sample_size(10);
    for n in [12, 16, 20] {
        let gates: Vec<Gate> = (0..n)
            .flat_map(|q| {
                [
                    Gate::H(q),
                    Gate::Rz(q, 0.3),
                    Gate::Cnot {
                        control: q,
                        target: (q + 1) % n,
                    },
                ]
            })
            .collect();
        let circuit = Circuit::from_gates(n, gates).unwrap();
        group.throughput(Throughput::Elements(circuit.gates().len() as u64 * (1u64 << n)));
        for (name, policy) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| {
                    let mut s = StateVector::zero(n).unwrap();
                    s.apply_circuit(black_box(&circuit), policy).unwrap();
                    s
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, repetitions, groups, amplitudes);
criterion_main!(benches);
