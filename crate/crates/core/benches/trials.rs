use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use randpivot::lab::{convergence_study, Exec, MatrixFamily, StudyConfig};
use randpivot::{FactorizationKind, Mode, PivotRuleSpec, TransformSpec};

fn study(exec: Exec) -> StudyConfig {
    let mut cfg = StudyConfig::new(
        MatrixFamily::HaarColumns { d: 24, n: 16 },
        32,
        Mode::OneSided,
        TransformSpec::kind(FactorizationKind::UpperTriangular),
        PivotRuleSpec::Random { k: 2 },
    );
    cfg.exec = exec;
    cfg.horizon = Some(600);
    cfg.sample_every = Some(20);
    cfg
}

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("convergence-study");
    group.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        let cfg = study(exec);
        group.bench_function(name, |b| b.iter(|| black_box(convergence_study(&cfg).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
