use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use unveil::{
    dark_channel, estimate_airlight, estimate_transmission, refine_transmission, PriorMode,
    RefineParams, WindowSpec,
};
use unveil_bench::vga_frame;

fn bench_kernels(c: &mut Criterion) {
    let frame = vga_frame();
    let window = WindowSpec::default();

    let mut group = c.benchmark_group("kernels_vga");
    group.sample_size(30);

    group.bench_function("dark_channel_shifted_r7", |b| {
        b.iter(|| dark_channel(black_box(&frame), window, PriorMode::ShiftedRgb))
    });
    group.bench_function("dark_channel_classic_r0", |b| {
        b.iter(|| dark_channel(black_box(&frame), WindowSpec::new(0), PriorMode::Classic))
    });

    let dark = dark_channel(&frame, window, PriorMode::ShiftedRgb);
    group.bench_function("estimate_airlight", |b| {
        b.iter(|| estimate_airlight(black_box(&frame), &dark, 0.001).unwrap())
    });

    let airlight = estimate_airlight(&frame, &dark, 0.001).unwrap();
    group.bench_function("estimate_transmission", |b| {
        b.iter(|| estimate_transmission(black_box(&frame), airlight, window, 0.95).unwrap())
    });

    let raw_t = estimate_transmission(&frame, airlight, window, 0.95).unwrap();
    group.bench_function("refine_transmission_bilateral_grid", |b| {
        b.iter(|| refine_transmission(black_box(&raw_t), &frame, RefineParams::default()).unwrap())
    });

    group.bench_function("white_balance_local_gray_world", |b| {
        b.iter(|| unveil::local_gray_world(black_box(&frame), unveil::WbParams::default()).unwrap())
    });

    group.finish();
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
