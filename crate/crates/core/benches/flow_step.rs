//! Sequential against data-parallel speed evaluation and time stepping.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gcflab::closed_forms::paperclip_support;
use gcflab::convex::GridTrig;
use gcflab::flow::{evaluate_speed, Execution, FlowState, Stepper, DEFAULT_SPEED_CAP};

const GRIDS: [usize; 4] = [256, 1024, 4096, 16384];

fn executions() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn speed(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_speed");
    for n in GRIDS {
        let s = paperclip_support(-5.0, n).unwrap().into_values();
        let trig = GridTrig::new(n);
        let mut out = vec![0.0; n];
        group.throughput(Throughput::Elements(n as u64));
        for (name, execution) in executions() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| evaluate_speed(&s, &trig, 0.75, DEFAULT_SPEED_CAP, execution, &mut out))
            });
        }
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("stepper_step");
    for n in GRIDS {
        let initial = FlowState::new(-5.0, paperclip_support(-5.0, n).unwrap());
        group.throughput(Throughput::Elements(n as u64));
        for (name, execution) in executions() {
            let mut stepper = Stepper::new(1.0, n).with_execution(execution);
            let dt = 0.1 * stepper.cfl_dt(&initial, 0.2).unwrap();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter_batched_ref(
                    || initial.clone(),
                    |state| {
                        stepper.invalidate();
                        stepper.step(state, dt).unwrap()
                    },
                    criterion::BatchSize::SmallInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, speed, step);
criterion_main!(benches);
