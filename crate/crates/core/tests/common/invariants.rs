//! Randomized invariant suites. Each takes a case count and returns the
//! first counterexample as an error string.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcfec::bch::{ComponentCode, DecodeOutcome};
use pcfec::channel::{hard_bit, hard_decision, transmit, ChannelParams, RngSeed};
use pcfec::decoders::{
    bmp_gmdd, bmp_phase, decode, ibdd, soft_phase, sr_phase, AlphaSource, BinaryMessage, DecoderKind, DecoderOptions,
    DecoderSchedule,
};
use pcfec::gf2m::{Element, Field};
use pcfec::gmdd::{
    generalized_distance, gmdd_candidates, gmdd_decode, hamming_distance, GmddMetric, NormalizedReliabilities,
    ReliabilityOrder,
};
use pcfec::product::{BitMatrix, LlrMatrix, ProductCode};
use pcfec::sim::{run_sweep, CodeSpec, StopRule, SweepConfig};

use super::{codes, hamming, q_function, random_codeword};

pub type Suite = (&'static str, fn(u32) -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("gf2m field axioms", field_axioms),
    ("bch bdd radius, membership, even weight", bdd_radius),
    ("bch erasure guarantee", erasure_guarantee),
    ("gmdd trials, validity, superset", gmdd_properties),
    ("gmdd metric argmin equivalence", metric_equivalence),
    ("product linearity", product_linearity),
    ("decoders failure pass-through", failure_pass_through),
    ("decoders early-exit soundness", early_exit_soundness),
    ("decoders degenerate schedule equals ibdd", degenerate_schedule),
    ("decoders scale invariance", scale_invariance),
    ("decoders per-phase gmdd calls", per_phase_calls),
    ("sim stop rule honored", stop_rule_honored),
    ("sim worker-count independence", worker_independence),
    ("sim determinism", determinism),
    ("channel error rate and noise variance", channel_statistics),
    ("sim uncoded ber matches Q", uncoded_matches_q),
    ("sim ideal ibdd dominates ibdd", ideal_dominates),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn code_index() -> impl Strategy<Value = usize> {
    0..codes().len()
}

fn small_pc() -> ProductCode {
    ProductCode::new(ComponentCode::new(4, 2, false).unwrap())
}

fn random_frame(pc: &ProductCode, rng: &mut ChaCha8Rng, ebn0: f64) -> (BitMatrix, LlrMatrix) {
    let k = pc.k();
    let c = pc.encode(&BitMatrix::from_fn(k, |_, _| rng.random_range(0..2u8)));
    let llrs = transmit(&c, &ChannelParams::new(ebn0, pc.rate()).unwrap(), RngSeed::new(rng.random(), 0));
    (c, llrs)
}

pub fn field_axioms(cases: u32) -> Result<(), String> {
    check(cases, (2u32..=16, any::<[u16; 3]>()), |(m, raw)| {
        let f = Field::with_default_polynomial(m).unwrap();
        let mask = (1u32 << m) - 1;
        let [a, b, c] = raw.map(|x| Element((x as u32 & mask) as u16));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
        prop_assert_eq!(a + b, b + a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.pow(a, (1usize << m) - 2)), Element::ONE);
        }
        Ok(())
    })
}

/// Ten inputs per case: codewords with 0..=t+2 errors and uniform words.
pub fn bdd_radius(cases: u32) -> Result<(), String> {
    check(cases, (code_index(), any::<u64>()), |(ci, seed)| {
        let code = &codes()[ci];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..10 {
            let word: Vec<u8> = if i % 5 == 4 {
                (0..code.n()).map(|_| rng.random_range(0..2u8)).collect()
            } else {
                let mut w = random_codeword(code, &mut rng);
                let e = rng.random_range(0..=code.t() + 2);
                for p in sample(&mut rng, code.n(), e) {
                    w[p] ^= 1;
                }
                w
            };
            if let DecodeOutcome::Decoded(c) = code.bdd_decode(&word) {
                prop_assert!(hamming(&word, &c) <= code.t());
                prop_assert!(code.syndromes(&c).iter().all(|s| s.is_zero()));
                prop_assert!(code.is_codeword(&c));
                if code.is_extended() {
                    prop_assert_eq!(c.iter().filter(|&&b| b == 1).count() % 2, 0);
                }
            }
        }
        Ok(())
    })
}

pub fn erasure_guarantee(cases: u32) -> Result<(), String> {
    check(cases, (code_index(), any::<u64>()), |(ci, seed)| {
        let code = &codes()[ci];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_codeword(code, &mut rng);
        let budget = code.d_min() - 1;
        let e = rng.random_range(0..=budget / 2);
        let f = rng.random_range(0..=budget - 2 * e);
        let pos = sample(&mut rng, code.n(), e + f).into_vec();
        let (erased, errors) = pos.split_at(f);
        let mut r = c.clone();
        for &p in erased {
            r[p] = rng.random_range(0..2u8);
        }
        for &p in errors {
            r[p] ^= 1;
        }
        let out = code.erasure_decode(&r, erased);
        prop_assert_eq!(out, DecodeOutcome::Decoded(c), "e={} f={}", e, f);
        Ok(())
    })
}

pub fn gmdd_properties(cases: u32) -> Result<(), String> {
    check(cases, (code_index(), any::<u64>()), |(ci, seed)| {
        let code = &codes()[ci];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut word = random_codeword(code, &mut rng);
        let e = rng.random_range(0..=code.d_min());
        for p in sample(&mut rng, code.n(), e) {
            word[p] ^= 1;
        }
        let rel: Vec<f64> = (0..code.n()).map(|_| rng.random_range(0.0..1.0)).collect();
        let order = ReliabilityOrder::from_reliabilities(&rel, code.d_min() - 1);
        let alphas = NormalizedReliabilities::from_reliabilities(&rel);
        let set = gmdd_candidates(code, &word, &order);
        prop_assert_eq!(set.attempts(), code.t() + 1);
        prop_assert!(set.candidates().len() <= code.t() + 1);
        for cand in set.candidates() {
            prop_assert!(code.is_codeword(&cand.codeword(&word)));
        }
        if let DecodeOutcome::Decoded(b) = code.bdd_decode(&word) {
            let DecodeOutcome::Decoded(h) = gmdd_decode(code, &word, &order, GmddMetric::Hamming) else {
                return Err(TestCaseError::fail("gmdd failed where bdd succeeded"));
            };
            prop_assert!(hamming_distance(&word, &h) <= hamming_distance(&word, &b));
            let metric = GmddMetric::GeneralizedDistance(&alphas);
            let DecodeOutcome::Decoded(g) = gmdd_decode(code, &word, &order, metric) else {
                return Err(TestCaseError::fail("gmdd failed where bdd succeeded"));
            };
            prop_assert!(
                generalized_distance(&word, &g, &alphas) <= generalized_distance(&word, &b, &alphas) + 1e-12
            );
        }
        Ok(())
    })
}

pub fn metric_equivalence(cases: u32) -> Result<(), String> {
    check(cases, (code_index(), any::<u64>(), 0.01f64..100.0), |(ci, seed, magnitude)| {
        let code = &codes()[ci];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut word = random_codeword(code, &mut rng);
        let e = rng.random_range(0..=code.d_min());
        for p in sample(&mut rng, code.n(), e) {
            word[p] ^= 1;
        }
        let pos = sample(&mut rng, code.n(), code.d_min() - 1).into_vec();
        let order = ReliabilityOrder::new(&pos, code.n(), code.d_min() - 1).unwrap();
        let alphas = NormalizedReliabilities::from_reliabilities(&vec![magnitude; code.n()]);
        let gd = gmdd_decode(code, &word, &order, GmddMetric::GeneralizedDistance(&alphas));
        let hd = gmdd_decode(code, &word, &order, GmddMetric::Hamming);
        prop_assert_eq!(gd, hd);
        Ok(())
    })
}

pub fn product_linearity(cases: u32) -> Result<(), String> {
    check(cases, (0usize..3, any::<u64>()), |(ci, seed)| {
        let pc = ProductCode::new(codes()[ci].clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = pc.k();
        let a = BitMatrix::from_fn(k, |_, _| rng.random_range(0..2u8));
        let b = BitMatrix::from_fn(k, |_, _| rng.random_range(0..2u8));
        let (ca, cb) = (pc.encode(&a), pc.encode(&b));
        prop_assert_eq!(ca.xor(&cb), pc.encode(&a.xor(&b)));
        prop_assert!(pc.is_codeword(&ca));
        prop_assert_eq!(pc.message(&ca), a);
        Ok(())
    })
}

/// Every failed component emits B(L), or L itself for the soft exchange.
pub fn failure_pass_through(cases: u32) -> Result<(), String> {
    let pc = small_pc();
    let code = pc.component();
    let n = code.n();
    check(cases, (any::<u64>(), 0.0f64..5.0, 0.1f64..8.0), |(seed, ebn0, w)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, llrs) = random_frame(&pc, &mut rng, ebn0);
        let hd = hard_decision(&llrs);

        let (out, stats) = sr_phase(code, &hd, &llrs, w);
        let mut failures = 0;
        for i in 0..n {
            if !code.bdd_decode(hd.row(i)).is_decoded() {
                failures += 1;
                prop_assert_eq!(out.column(i), hd.row(i).to_vec());
            }
        }
        prop_assert_eq!(stats.failures, failures);

        let msg = BinaryMessage::from_channel(&llrs, code.d_min());
        let (out, stats) = bmp_phase(code, &msg, &llrs, w);
        let mut failures = 0;
        for i in 0..n {
            if !gmdd_decode(code, msg.psi.row(i), &msg.lists[i], GmddMetric::Hamming).is_decoded() {
                failures += 1;
                prop_assert_eq!(out.psi.column(i), hd.row(i).to_vec());
            }
        }
        prop_assert_eq!(stats.failures, failures);

        for source in [AlphaSource::Combined, AlphaSource::Channel] {
            let (out, stats) = soft_phase(code, &llrs, &llrs, w, source);
            let mut failures = 0;
            for i in 0..n {
                let order = ReliabilityOrder::from_reliabilities(llrs.row(i), code.d_min() - 1);
                let hard: Vec<u8> = llrs.row(i).iter().map(|&x| hard_bit(x)).collect();
                if gmdd_candidates(code, &hard, &order).is_empty() {
                    failures += 1;
                    prop_assert_eq!(out.column(i), llrs.row(i).to_vec());
                }
            }
            prop_assert_eq!(stats.failures, failures);
        }
        Ok(())
    })
}

fn schedule_for(kind: DecoderKind, w: f64) -> DecoderSchedule {
    if kind.uses_weights() {
        DecoderSchedule::constant(4, 2, w).unwrap()
    } else {
        DecoderSchedule::ibdd_only(6)
    }
}

pub fn early_exit_soundness(cases: u32) -> Result<(), String> {
    let pc = small_pc();
    check(cases, (any::<u64>(), 1.0f64..6.0, 0usize..5, 0.5f64..8.0), |(seed, ebn0, ki, w)| {
        let kind = DecoderKind::ALL[ki];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, llrs) = random_frame(&pc, &mut rng, ebn0);
        let rep = decode(kind, &pc, &llrs, &c, &schedule_for(kind, w), &DecoderOptions::default());
        if rep.converged {
            prop_assert!(pc.is_codeword(&rep.final_array));
        }
        prop_assert!(rep.iterations_run <= 6);
        Ok(())
    })
}

pub fn degenerate_schedule(cases: u32) -> Result<(), String> {
    let pc = small_pc();
    check(cases, (any::<u64>(), 1.0f64..6.0, 1usize..8, any::<bool>()), |(seed, ebn0, ell, early_exit)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, llrs) = random_frame(&pc, &mut rng, ebn0);
        let opts = DecoderOptions { early_exit, ..Default::default() };
        let a = bmp_gmdd(&pc, &llrs, &DecoderSchedule::ibdd_only(ell), &opts);
        let b = ibdd(&pc, &hard_decision(&llrs), ell, &opts);
        prop_assert_eq!(a, b);
        Ok(())
    })
}

/// Powers of two keep every product exact, so the comparison is bitwise.
pub fn scale_invariance(cases: u32) -> Result<(), String> {
    let pc = small_pc();
    let code = pc.component();
    check(cases, (any::<u64>(), 1.0f64..6.0, -8i32..=8, 0.5f64..8.0), |(seed, ebn0, exp, w)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, llrs) = random_frame(&pc, &mut rng, ebn0);
        let c = 2f64.powi(exp);
        let scaled = llrs.map(|x| x * c);
        let msg = BinaryMessage::from_channel(&llrs, code.d_min());
        let msg_s = BinaryMessage::from_channel(&scaled, code.d_min());
        prop_assert_eq!(&msg, &msg_s);
        let (a, _) = bmp_phase(code, &msg, &llrs, w);
        let (b, _) = bmp_phase(code, &msg_s, &scaled, w * c);
        prop_assert_eq!(a, b);
        let s = DecoderSchedule::new(6, 2, vec![w, w, 1.5 * w, 2.0 * w]).unwrap();
        let opts = DecoderOptions::default();
        let full = bmp_gmdd(&pc, &llrs, &s, &opts);
        let full_s = bmp_gmdd(&pc, &scaled, &s.scaled_by(c).unwrap(), &opts);
        prop_assert_eq!(full, full_s);
        Ok(())
    })
}

pub fn per_phase_calls(cases: u32) -> Result<(), String> {
    let pc = small_pc();
    let (n, t) = (pc.n(), pc.component().t());
    check(cases, (any::<u64>(), 1.0f64..6.0, any::<bool>()), |(seed, ebn0, igmdd)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, llrs) = random_frame(&pc, &mut rng, ebn0);
        let kind = if igmdd { DecoderKind::IgmddSr } else { DecoderKind::BmpGmdd };
        let s = DecoderSchedule::constant(5, 2, 3.0).unwrap();
        let rep = decode(kind, &pc, &llrs, &c, &s, &DecoderOptions::default());
        for (i, it) in rep.iterations.iter().enumerate() {
            let last = i + 1 == rep.iterations.len();
            if !last {
                prop_assert_eq!(it.component_decodes, 2 * n);
            } else {
                prop_assert!(it.component_decodes == n || it.component_decodes == 2 * n);
            }
            let per_call = if i < s.scaled_iterations() { t + 1 } else { 1 };
            prop_assert_eq!(it.component_attempts, it.component_decodes * per_call);
        }
        Ok(())
    })
}

fn small_sweep(decoder: Option<DecoderKind>, seed: u64, stop: StopRule, grid: Vec<f64>) -> SweepConfig {
    SweepConfig {
        code: CodeSpec { m: 4, t: 2, extended: false },
        decoder,
        ell_max: 6,
        appended_ibdd: if decoder.is_some_and(|d| d.uses_weights()) { 2 } else { 0 },
        weights: None,
        options: DecoderOptions::default(),
        ebn0_db: grid,
        stop,
        seed,
        all_zero: false,
        batch_frames: 4,
        workers: 0,
    }
}

fn decoder_choice() -> impl Strategy<Value = Option<DecoderKind>> {
    (0usize..6).prop_map(|i| DecoderKind::ALL.get(i).copied())
}

pub fn stop_rule_honored(cases: u32) -> Result<(), String> {
    check(
        cases,
        (decoder_choice(), any::<u64>(), 1u64..60, 0u64..4, 1u64..24, 0.0f64..5.0),
        |(decoder, seed, min_bits, min_frames, max_frames, ebn0)| {
            let stop = StopRule { min_bit_errors: min_bits, min_frame_errors: min_frames, max_frames };
            let recs = run_sweep(&small_sweep(decoder, seed, stop, vec![ebn0, ebn0 + 1.0])).unwrap();
            prop_assert_eq!(recs.len(), 2);
            for r in recs {
                prop_assert!(r.bit_errors >= min_bits && r.frame_errors >= min_frames || r.frames == max_frames);
                prop_assert!(r.frames <= max_frames);
                prop_assert_eq!(r.ber, r.bit_errors as f64 / r.bits_simulated as f64);
                prop_assert!(r.frame_errors <= r.frames && r.bit_errors <= r.bits_simulated);
            }
            Ok(())
        },
    )
}

pub fn worker_independence(cases: u32) -> Result<(), String> {
    check(cases, (decoder_choice(), any::<u64>(), 2usize..5, 1u64..9), |(decoder, seed, workers, batch)| {
        let stop = StopRule { min_bit_errors: 20, min_frame_errors: 0, max_frames: 12 };
        let mut one = small_sweep(decoder, seed, stop, vec![2.0, 3.5]);
        one.batch_frames = batch;
        one.workers = 1;
        let mut many = one.clone();
        many.workers = workers;
        let a: Vec<_> = run_sweep(&one).unwrap().iter().map(|r| r.counts()).collect();
        let b: Vec<_> = run_sweep(&many).unwrap().iter().map(|r| r.counts()).collect();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn determinism(cases: u32) -> Result<(), String> {
    check(cases, (decoder_choice(), any::<u64>()), |(decoder, seed)| {
        let stop = StopRule { min_bit_errors: 10, min_frame_errors: 0, max_frames: 8 };
        let cfg = small_sweep(decoder, seed, stop, vec![2.5, 3.0]);
        let strip = |v: Vec<pcfec::sim::BerRecord>| -> Vec<_> {
            v.into_iter().map(|r| (r.counts(), r.ber.to_bits(), r.fer.to_bits(), r.mean_iterations.to_bits())).collect()
        };
        prop_assert_eq!(strip(run_sweep(&cfg).unwrap()), strip(run_sweep(&cfg).unwrap()));
        Ok(())
    })
}

/// Statistical checks with fixed seeds; the case count does not apply.
pub fn channel_statistics(_cases: u32) -> Result<(), String> {
    for (i, ebn0) in [0.0, 3.0, 6.0].into_iter().enumerate() {
        let p = ChannelParams::new(ebn0, 1.0).unwrap();
        // 1000 x 1000 = 10^6 bits
        let llrs = transmit(&BitMatrix::zeros(1000), &p, RngSeed::new(77, i as u64));
        let bits = (1000 * 1000) as f64;
        let errors = hard_decision(&llrs).weight() as f64;
        let q = q_function(1.0 / p.sigma());
        let se = (q * (1.0 - q) / bits).sqrt();
        let ber = errors / bits;
        if (ber - q).abs() > 3.0 * se {
            return Err(format!("Eb/N0 {ebn0}: ber {ber} vs Q(1/sigma) {q}, se {se}"));
        }
    }
    let p = ChannelParams::new(4.0, 0.8716).unwrap();
    // 3163^2 > 10^7 noise samples, recovered from y = L sigma^2 / 2
    let llrs = transmit(&BitMatrix::zeros(3163), &p, RngSeed::new(78, 0));
    let s2 = p.sigma2();
    let noise: Vec<f64> = llrs.as_slice().iter().map(|&l| l * s2 / 2.0 - 1.0).collect();
    let count = noise.len() as f64;
    let mean = noise.iter().sum::<f64>() / count;
    let var = noise.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
    if (var / s2 - 1.0).abs() > 0.01 {
        return Err(format!("sample variance {var} vs sigma^2 {s2}"));
    }
    if mean.abs() > 4.0 * (s2 / count).sqrt() {
        return Err(format!("sample mean {mean}"));
    }
    Ok(())
}

pub fn uncoded_matches_q(_cases: u32) -> Result<(), String> {
    let mut cfg = SweepConfig::reference_setup(DecoderKind::Ibdd, vec![0.0, 2.0, 4.0, 6.0]);
    cfg.decoder = None;
    cfg.stop = StopRule { min_bit_errors: 20_000, min_frame_errors: 0, max_frames: 400 };
    cfg.seed = 2024;
    for r in run_sweep(&cfg).map_err(|e| e.to_string())? {
        let q = q_function((2.0 * 10f64.powf(r.eb_n0_db / 10.0)).sqrt());
        let se = (q * (1.0 - q) / r.bits_simulated as f64).sqrt();
        if (r.ber - q).abs() > 3.0 * se {
            return Err(format!("{} dB: ber {} vs Q {} (se {se})", r.eb_n0_db, r.ber, q));
        }
    }
    Ok(())
}

pub fn ideal_dominates(_cases: u32) -> Result<(), String> {
    let stop = StopRule { min_bit_errors: 2_000, min_frame_errors: 0, max_frames: 3_000 };
    let grid = vec![3.0, 3.5, 4.0, 4.5];
    for seed in [1, 2, 3] {
        let plain = run_sweep(&small_sweep(Some(DecoderKind::Ibdd), seed, stop, grid.clone())).unwrap();
        let ideal = run_sweep(&small_sweep(Some(DecoderKind::IbddIdeal), seed, stop, grid.clone())).unwrap();
        for (p, i) in plain.iter().zip(&ideal) {
            if i.ber > p.ber {
                return Err(format!("seed {seed} {} dB: ideal {} > plain {}", p.eb_n0_db, i.ber, p.ber));
            }
        }
    }
    Ok(())
}
