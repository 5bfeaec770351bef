use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::Rng;
use stpcm_core::construction::build_construction;
use stpcm_core::mimo::{qr_decompose, sample_channel, transmit, NoiseModel};
use stpcm_core::polar::{polar_encode, PolarCode, ScDecoder, SclDecoder};
use stpcm_core::rng::{standard_normal_pair, substream};
use stpcm_core::stpcm::{PairInterleaver, StpcmCodec};

fn polar_codes(c: &mut Criterion) {
    let mut group = c.benchmark_group("polar");
    for n in [256usize, 1024] {
        let info: Vec<usize> = (n / 2..n).collect();
        let code = PolarCode::from_info_positions(n, &info).unwrap();
        let mut rng = substream(1, 90, 0);
        let u: Vec<u8> = (0..n).map(|i| if i >= n / 2 { rng.gen_range(0..=1) } else { 0 }).collect();
        let x = polar_encode(&u).unwrap();
        let llrs: Vec<f64> = x
            .iter()
            .map(|&b| {
                let (g, _) = standard_normal_pair(&mut rng);
                (1.0 - 2.0 * b as f64) * 4.0 + 2.0 * g
            })
            .collect();

        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("encode", n), &u, |b, u| {
            b.iter(|| polar_encode(u).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sc_decode", n), &llrs, |b, llrs| {
            let mut dec = ScDecoder::new(n);
            b.iter(|| dec.decode(&code, llrs).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("scl32_decode", n), &llrs, |b, llrs| {
            let mut dec = SclDecoder::new(n, 32);
            b.iter(|| dec.decode(&code, llrs).unwrap())
        });
    }
    group.finish();
}

fn mimo_qr(c: &mut Criterion) {
    let mut group = c.benchmark_group("mimo");
    for (t, m) in [(2usize, 2usize), (4, 4)] {
        let mut rng = substream(2, 90, 0);
        let real = sample_channel(t, m, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("qr", format!("{t}x{m}")), &real.h, |b, h| {
            b.iter(|| qr_decompose(h))
        });
    }
    group.finish();
}

fn frame_roundtrip(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame");
    group.sample_size(20);
    let (t, m_rx, mod_order, n) = (2usize, 2usize, 2usize, 64usize);
    let k = t * mod_order * n / 2;
    let sigma = 0.5;
    let construction = build_construction(t, m_rx, mod_order, n, k, sigma).unwrap();
    let interleaver = PairInterleaver::new(7, t, mod_order, n);
    let codec = StpcmCodec::new(construction, None, interleaver).unwrap();
    let mut rng = substream(3, 90, 0);
    let payload: Vec<u8> = (0..codec.payload_len()).map(|_| rng.gen_range(0..=1)).collect();
    let frame = codec.encode(&payload).unwrap();
    let noise = NoiseModel { sigma };
    let mut reals = Vec::new();
    let mut obs = Vec::new();
    for slot in 0..n {
        let real = sample_channel(t, m_rx, &mut rng).unwrap();
        let col: Vec<_> = (0..t).map(|p| frame.x[p][slot]).collect();
        obs.push(transmit(&col, &real, &noise, &mut rng).unwrap());
        reals.push(real);
    }

    group.bench_function("encode_2x2_qpsk_n64", |b| {
        b.iter(|| codec.encode(&payload).unwrap())
    });
    group.bench_function("decode_sc_2x2_qpsk_n64", |b| {
        b.iter(|| codec.decode_sc(&obs, &reals, sigma).unwrap())
    });
    group.bench_function("decode_cascl32_2x2_qpsk_n64", |b| {
        b.iter(|| codec.decode_cascl(&obs, &reals, sigma, 32).unwrap())
    });
    group.finish();
}

criterion_group!(benches, polar_codes, mimo_qr, frame_roundtrip);
criterion_main!(benches);
