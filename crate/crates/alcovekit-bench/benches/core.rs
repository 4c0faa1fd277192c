use alcovekit::figures::{self, FigureSpec};
use alcovekit::galois_types::{census, CENSUS_CAP};
use alcovekit::iwahori_weyl::IwahoriWeyl;
use alcovekit::loop_sim::{self, straighten::straighten_right, Ring, StraightenProblem};
use alcovekit::{GammaData, RootDatum};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    for (label, p, e, r) in [("SL2", 7u64, 24u64, 2u32), ("GL2", 7, 48, 2), ("GL3", 5, 4, 1)] {
        let rd: RootDatum = label.parse().unwrap();
        let g = GammaData::split(&rd, p, e, r).unwrap();
        group.bench_function(format!("{label}_p{p}_e{e}"), |b| b.iter(|| census(&rd, &g, CENSUS_CAP).unwrap()));
    }
    group.finish();
}

fn bench_admissible(c: &mut Criterion) {
    let mut group = c.benchmark_group("admissible_set");
    for (label, mu) in [("GL3", vec![1, 0, 0]), ("GL4", vec![1, 1, 0, 0])] {
        let rd: RootDatum = label.parse().unwrap();
        let iw = IwahoriWeyl::new(&rd).unwrap();
        group.bench_function(format!("{label}_{}", mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("")), |b| b.iter(|| iw.admissible_set(black_box(&mu)).unwrap()));
    }
    group.finish();
}

fn bench_straighten(c: &mut Criterion) {
    let mut group = c.benchmark_group("straighten");
    for (p, a) in [(7u64, 1u32), (5, 2)] {
        let ring = Ring::new(p, a).unwrap();
        let mut rng = loop_sim::rng_for(1, 0);
        let prob = StraightenProblem::random(ring, &[1, 0], a as i64, &mut rng);
        let window = loop_sim::default_window(p);
        group.bench_function(format!("p{p}_a{a}"), |b| b.iter(|| straighten_right(&prob, window, None).unwrap()));
    }
    group.finish();
}

fn bench_render(c: &mut Criterion) {
    let mut group = c.benchmark_group("render");
    let specs = [
        ("sl2", FigureSpec::sl2(7, 24)),
        ("genericity", FigureSpec::genericity(19, 36)),
        ("admissible", FigureSpec::admissible(&[1, 0, 0])),
    ];
    for (name, spec) in &specs {
        group.bench_function(*name, |b| b.iter(|| figures::render(spec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_census, bench_admissible, bench_straighten, bench_render);
criterion_main!(benches);
