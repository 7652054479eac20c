//! Acceptance criteria 1 to 11. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use soficonv::algebra::examples::{golden, golden_square};
use soficonv::algebra::FieldElement;
use soficonv::bernoulli::{
    count_representations, matrix_count_table, BernoulliMeasure, BernoulliSpec,
};
use soficonv::cli::dispatch;
use soficonv::pisot::{
    carry_states, quasi_expansion, word_set, PisotBase, PisotMeasure, RedundancyCounter, Window,
};
use soficonv::rational::{q, qi, Q};
use soficonv::sofic::{linear_to_markov, markov_to_linear, push_forward, LinearRepresentation};
use soficonv::spectrum::{
    alpha0_estimate, binary_runs, cf_denominator, level_set, lyapunov_estimate, profile, stern,
    LyapunovMode, Sequence,
};
use soficonv::words::all_words;
use soficonv::Error;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Values `Σ ωᵢ b^{k−i}` of every word in `{0..d−1}^k`, as a histogram.
fn integer_histogram(b: usize, d: usize, k: usize) -> Vec<u64> {
    let mut hist = vec![1u64];
    for _ in 0..k {
        let mut next = vec![0u64; (hist.len() - 1) * b + d];
        for (m, &c) in hist.iter().enumerate() {
            for w in 0..d {
                next[m * b + w] += c;
            }
        }
        hist = next;
    }
    hist
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = alpha0_estimate(14).unwrap();
    let mut out = Vec::new();
    let code = dispatch(
        ["soficonv", "spectrum", "alpha0", "--K", "14"],
        &mut out,
        &mut Vec::new(),
    );
    let elapsed = start.elapsed();
    let printed: f64 = String::from_utf8(out).unwrap().trim().parse().unwrap();
    let pass =
        code == 0 && (a - 0.56).abs() <= 0.01 && printed == a && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "alpha0(K=14) = {a:.5}, target 0.56 ± 0.01, {}",
            secs(elapsed)
        ),
    )
}

fn criterion_2() -> Outcome {
    let base = PisotBase::new(&golden(), 2).unwrap();
    let half = q(1, 2);
    let z = qi(0);
    let m = PisotMeasure::new(&base, vec![half.clone(), half.clone()]).unwrap();
    let beta = base.beta();
    let expected_states = vec![
        FieldElement::zero(base.field()),
        FieldElement::one(base.field()),
        beta.add_int(-1),
    ];
    let m0 = vec![
        vec![half.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), half.clone()],
        vec![half.clone(), half.clone(), z.clone()],
    ];
    let m1 = vec![
        vec![half.clone(), half.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone()],
        vec![z.clone(), half.clone(), z.clone()],
    ];
    let mut pass = m.states() == expected_states.as_slice()
        && m.matrices()[0].to_rows() == m0
        && m.matrices()[1].to_rows() == m1;

    // The 6x6 block matrix, checked symbolically at a generic point (p0, p1).
    for (p0, p1) in [(q(1, 2), q(1, 2)), (q(1, 3), q(2, 3)), (q(2, 7), q(5, 7))] {
        let m = PisotMeasure::new(&base, vec![p0.clone(), p1.clone()]).unwrap();
        let p01 = &p0 * &p1;
        let p11 = &p1 * &p1;
        let row_a = vec![
            p0.clone(),
            z.clone(),
            z.clone(),
            p01.clone(),
            z.clone(),
            p01.clone(),
        ];
        let row_b = vec![
            z.clone(),
            z.clone(),
            p1.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
        ];
        let row_c = vec![
            p1.clone(),
            p0.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            p11.clone(),
        ];
        let printed = vec![
            row_a.clone(),
            row_b.clone(),
            row_c.clone(),
            row_a,
            row_b,
            row_c,
        ];
        let words: Vec<Vec<usize>> = m.w_set().to_vec();
        pass &= words == vec![vec![0], vec![1, 0]] && m.w_block_matrix().to_rows() == printed;
    }
    outcome(
        pass,
        "M0, M1 on (0, 1, β−1) and the 6x6 block matrix match exactly",
    )
}

fn criterion_3() -> Outcome {
    let golden_base = PisotBase::new(&golden(), 2).unwrap();
    let quasi = quasi_expansion(&golden_base).unwrap();
    let w = word_set(&quasi);
    let square = PisotBase::new(&golden_square(), 3).unwrap();
    let refused = matches!(quasi_expansion(&square), Err(Error::NotFiniteRenyi));
    let mut out = Vec::new();
    dispatch(
        [
            "soficonv",
            "pisot",
            "quasi",
            "--minpoly",
            "1,-1,-1",
            "--interval",
            "1.5,1.7",
        ],
        &mut out,
        &mut Vec::new(),
    );
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let pass = quasi.digits == vec![1, 0]
        && quasi.period == 2
        && w == vec![vec![0], vec![1, 0]]
        && refused
        && json["digits"] == "10"
        && json["T"] == 2;
    outcome(
        pass,
        format!(
            "golden: digits {:?}, T = {}, W = {:?}; β²=3β−1 refused: {refused}",
            quasi.digits, quasi.period, w
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let spec = BernoulliSpec::uniform(2, 3).unwrap();
    let mut mismatches = 0usize;
    for n in 1u64..1 << 14 {
        let s = stern(n);
        let dp = count_representations(&spec, n);
        let quotients: Vec<u64> = binary_runs(n)
            .unwrap()
            .quotients()
            .iter()
            .map(|&a| a.into())
            .collect();
        let cf = cf_denominator(&quotients).unwrap();
        if BigUint::from(s) != dp || dp != cf {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    // Brute force: every word of {0,1,2}^12 evaluated in base 2.
    let hist = integer_histogram(2, 3, 12);
    let brute_mismatches = (1u64..1 << 12)
        .filter(|&n| hist[n as usize] != stern(n))
        .count();
    let pass = mismatches == 0 && brute_mismatches == 0 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "n < 2^14: {mismatches} mismatches, {}; brute force n < 2^12: {brute_mismatches} mismatches",
            secs(elapsed)
        ),
    )
}

fn criterion_5() -> Outcome {
    let spec = BernoulliSpec::uniform(2, 3).unwrap();
    let a = spec.a();
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for k in 0..=10usize {
        let hist = integer_histogram(2, 3, k);
        let nk = |m: i64| -> BigInt {
            usize::try_from(m)
                .ok()
                .and_then(|m| hist.get(m))
                .map_or(BigInt::zero(), |&c| BigInt::from(c))
        };
        for w in all_words(2, k) {
            let n = w.iter().fold(0i64, |acc, &e| 2 * acc + e as i64);
            let table = matrix_count_table(&spec, &w).unwrap();
            let expected: Vec<Vec<BigInt>> = (0..=a)
                .map(|q| {
                    (0..=a)
                        .map(|qq| nk(n + (q as i64) * (1i64 << k) - qq as i64))
                        .collect()
                })
                .collect();
            checked += 1;
            if table != expected {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{checked} words of length ≤ 10, {mismatches} mismatches"),
    )
}

/// Every cylinder of length ≤ `depth` of two representations, by a shared depth-first walk.
fn cylinders_agree(x: &LinearRepresentation, y: &LinearRepresentation, depth: usize) -> bool {
    fn walk(
        x: &LinearRepresentation,
        y: &LinearRepresentation,
        rx: &[Q],
        ry: &[Q],
        remaining: usize,
    ) -> bool {
        let dot = |r: &[Q], c: &[Q]| r.iter().zip(c).map(|(a, b)| a * b).sum::<Q>();
        if dot(rx, x.c()) != dot(ry, y.c()) {
            return false;
        }
        if remaining == 0 {
            return true;
        }
        (0..x.alphabet_size()).all(|l| {
            let nx = x.m()[l].row_mul(rx);
            let ny = y.m()[l].row_mul(ry);
            walk(x, y, &nx, &ny, remaining - 1)
        })
    }
    x.alphabet_size() == y.alphabet_size()
        && (0..x.alphabet_size()).all(|l| walk(x, y, &x.r()[l], &y.r()[l], depth - 1))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut agreed = 0;
    for _ in 0..20 {
        let letters = rng.gen_range(1..=3);
        let dim = rng.gen_range(1..=4);
        let rep = LinearRepresentation::random(&mut rng, letters, dim);
        let (markov, psi) = linear_to_markov(&rep).unwrap();
        let back = push_forward(&markov_to_linear(&markov), &psi).unwrap();
        if cylinders_agree(&rep, &back, 8) {
            agreed += 1;
        }
    }
    outcome(
        agreed == 20,
        format!("{agreed}/20 random representations reproduce all cylinders of length ≤ 8"),
    )
}

fn criterion_7() -> Outcome {
    let spec = BernoulliSpec::uniform(2, 3).unwrap();
    let eta = BernoulliMeasure::new(spec.clone()).unwrap();
    const DEPTH: usize = 20;
    // Law of Σ_{i≤20} ωᵢ 2^{−i}, indexed by 2^20 times the value.
    let mut law = vec![1.0f64];
    for _ in 0..DEPTH {
        let mut next = vec![0.0; (law.len() - 1) * 2 + 3];
        for (m, &p) in law.iter().enumerate() {
            for w in 0..3 {
                next[2 * m + w] += p / 3.0;
            }
        }
        law = next;
    }
    let mut worst = 0.0f64;
    let mut masses_exact = true;
    for k in 0..=4usize {
        let mut total = Q::zero();
        for qq in 0..=spec.a() {
            for w in all_words(2, k) {
                let exact = eta.interval_measure(qq, &w).unwrap();
                let n = w.iter().fold(0usize, |acc, &e| 2 * acc + e);
                let width = 1usize << (DEPTH - k);
                let lo = ((qq << k) + n) * width;
                let approx: f64 = law.iter().skip(lo).take(width).sum();
                worst = worst.max((exact.to_f64().unwrap() - approx).abs());
                total += exact;
            }
        }
        masses_exact &= total == qi(1);
    }
    let bound = 2f64.powi(-10);
    outcome(
        worst <= bound && masses_exact,
        format!(
            "max deviation {worst:.3e} (bound {bound:.3e}); level masses exactly 1: {masses_exact}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let base = PisotBase::new(&golden_square(), 3).unwrap();
    let counter = RedundancyCounter::new(&base).unwrap();
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for len in 1..=6usize {
        let mut by_value: HashMap<FieldElement, u64> = HashMap::new();
        let words: Vec<Vec<usize>> = all_words(3, len).collect();
        let values: Vec<FieldElement> = words.iter().map(|w| base.value_of(w)).collect();
        for v in &values {
            *by_value.entry(v.clone()).or_default() += 1;
        }
        for (w, v) in words.iter().zip(&values) {
            checked += 1;
            if counter.count(w).unwrap() != BigUint::from(by_value[v]) {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{checked} words of length ≤ 6, {mismatches} mismatches, {}",
            secs(elapsed)
        ),
    )
}

fn criterion_9() -> Outcome {
    let binary = lyapunov_estimate(LyapunovMode::BinaryDrive, 0, 100_000).unwrap();
    let levy = lyapunov_estimate(LyapunovMode::Levy, 0, 10_000).unwrap();
    let pass =
        (0.53..=0.59).contains(&binary.normalized) && (1.167..=1.207).contains(&levy.per_quotient);
    outcome(
        pass,
        format!(
            "binary_drive log q_s/(s log 4) = {:.4} in [0.53, 0.59]; levy log q_s/s = {:.4} in [1.167, 1.207]",
            binary.normalized, levy.per_quotient
        ),
    )
}

fn criterion_10() -> Outcome {
    let base = PisotBase::new(&golden(), 2).unwrap();
    let open = carry_states(&base, Window::Open).unwrap();
    let expected = vec![
        FieldElement::zero(base.field()),
        FieldElement::one(base.field()),
        base.beta().add_int(-1),
    ];
    let square = PisotBase::new(&golden_square(), 3).unwrap();
    let closure = carry_states(&square, Window::HalfOpenRightClosed).unwrap();
    let three_minus_beta = (-square.beta()).add_int(3);
    let excluded = !closure.contains(&three_minus_beta);
    let mut sorted = open.clone();
    sorted.sort_by(|a, b| a.compare(b).unwrap());
    let mut want = expected.clone();
    want.sort_by(|a, b| a.compare(b).unwrap());
    outcome(
        sorted == want && excluded,
        format!(
            "golden OPEN states {}; 3−β outside the β²=3β−1 closure: {excluded}",
            display(&open)
        ),
    )
}

fn display(states: &[FieldElement]) -> String {
    let parts: Vec<String> = states.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn criterion_11() -> Outcome {
    let f = |n: u64| Sequence::Stern.value(n);
    let series = profile(&f, 1 << 12, 1 << 13).unwrap();
    let (min_n, min) = series.iter().fold(
        (0, f64::INFINITY),
        |acc, &(n, r)| if r < acc.1 { (n, r) } else { acc },
    );
    let max = series
        .iter()
        .map(|&(_, r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    let part_a = min == 0.0 && min_n == 8191 && max < 0.75;

    let g = |n: u64| Sequence::PowerSine.value(n);
    let level = level_set(&g, 1.0, 0.3, 1_000_000).unwrap();
    let dexp = level.profile.exponential_density();
    let part_b = dexp >= 0.95;
    outcome(
        part_a && part_b,
        format!(
            "stern on [2^12, 2^13): min {min} at n = {min_n}, max {max:.4} (< 0.75: {}); \
             n^(1+sin n) at α=1, ε=0.3, N=10^6: {} members, dexp = {dexp:.4} (≥ 0.95: {part_b})",
            max < 0.75,
            level.profile.count
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("alpha0 reproduction", criterion_1),
        ("golden-ratio matrices", criterion_2),
        ("W and quasi-expansion", criterion_3),
        ("triple-identity sweep", criterion_4),
        ("matrix-count identity", criterion_5),
        ("sofic/linear roundtrip", criterion_6),
        ("interval measures vs direct convolution", criterion_7),
        ("Pisot redundancy counts", criterion_8),
        ("Lyapunov/Levy constants", criterion_9),
        ("carry-state sets", criterion_10),
        ("level-set machinery", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {verdict} {name}: {} [{}]",
            i + 1,
            o.detail,
            secs(elapsed)
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
