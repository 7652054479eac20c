//! Level sets `{n : |log f(n)/log n − α| ≤ ε}` and their densities at finite
//! horizons, the base-2 three-digit counting function and its
//! continued-fraction form, and seeded Lyapunov/Lévy estimators.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Q;

/// `log((1+√5)/2) / log 2`.
pub fn log2_golden() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).log2()
}

/// `f(0) = 1`, `f(2m) = f(m) + f(m−1)`, `f(2m+1) = f(m)`: the number of
/// base-2 representations of `n` with digits `{0, 1, 2}`.
pub fn stern(n: u64) -> u64 {
    // (f(m), f(m−1)) along the binary digits of n, with f(−1) = 0.
    let mut pair = (1u64, 0u64);
    for bit in (0..64 - n.leading_zeros()).rev() {
        let (a, b) = pair;
        pair = if (n >> bit) & 1 == 0 {
            (a + b, b)
        } else {
            (a, a + b)
        };
    }
    pair.0
}

/// `f(0), …, f(limit−1)` by the recursion.
pub fn stern_table(limit: usize) -> Vec<u64> {
    let mut f = Vec::with_capacity(limit);
    for n in 0..limit {
        let v = match n {
            0 => 1,
            _ if n % 2 == 0 => f[n / 2] + f[n / 2 - 1],
            _ => f[(n - 1) / 2],
        };
        f.push(v);
    }
    f
}

/// `n = 1^{a_s} 0^{a_{s−1}} … 0^{a_1} 1^{a_0}` in base 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunDecomposition {
    pub a: Vec<u32>,
}

impl RunDecomposition {
    /// `a₁, …, a_s`.
    pub fn quotients(&self) -> &[u32] {
        &self.a[1..]
    }

    pub fn value(&self) -> u64 {
        let mut n = 0u64;
        for (i, &len) in self.a.iter().enumerate().rev() {
            for _ in 0..len {
                n = (n << 1) | u64::from(i % 2 == 0);
            }
        }
        n
    }
}

pub fn binary_runs(n: u64) -> Result<RunDecomposition> {
    if n == 0 {
        return Err(Error::InvalidInput("binary runs need n ≥ 1".into()));
    }
    let mut a = vec![n.trailing_ones()];
    let mut rest = n >> a[0];
    while rest != 0 {
        let run = if a.len() % 2 == 1 {
            rest.trailing_zeros()
        } else {
            rest.trailing_ones()
        };
        a.push(run);
        rest >>= run;
    }
    Ok(RunDecomposition { a })
}

/// Denominator `q_s` of `[0; a₁, …, a_s]`.
pub fn cf_denominator(quotients: &[u64]) -> Result<BigUint> {
    let (mut prev, mut cur) = (BigUint::zero(), BigUint::from(1u8));
    for &a in quotients {
        if a == 0 {
            return Err(Error::InvalidInput("partial quotients must be ≥ 1".into()));
        }
        let next = &cur * a + &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `log q_s` through the ratios `q_i/q_{i−1} = a_i + q_{i−2}/q_{i−1}`.
pub fn log_cf_denominator(quotients: impl IntoIterator<Item = u64>) -> f64 {
    let mut ratio = f64::INFINITY;
    let mut total = 0.0;
    for a in quotients {
        ratio = a as f64 + 1.0 / ratio;
        total += ratio.ln();
    }
    total
}

/// Built-in sequences for the CLI and examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sequence {
    Stern,
    Identity,
    /// `n^{1 + sin n}`
    PowerSine,
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stern" => Ok(Sequence::Stern),
            "identity" | "n" => Ok(Sequence::Identity),
            "power-sine" | "powsin" => Ok(Sequence::PowerSine),
            _ => Err(Error::Parse(format!(
                "unknown sequence {s:?} (stern, identity, power-sine)"
            ))),
        }
    }
}

impl Sequence {
    pub fn value(self, n: u64) -> f64 {
        match self {
            Sequence::Stern => stern(n) as f64,
            Sequence::Identity => n as f64,
            Sequence::PowerSine => (n as f64).powf(1.0 + (n as f64).sin()),
        }
    }
}

/// `log f(n) / log n` for `n ≥ 2`.
pub fn growth_ratio(f: &dyn Fn(u64) -> f64, n: u64) -> Result<f64> {
    let v = f(n);
    if v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NonPositiveValue { n });
    }
    Ok(v.ln() / (n as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    /// `#S ∩ [1, n)`
    pub count: u64,
}

/// Densities of a set `S ⊂ ℕ` observed up to a finite horizon.
///
/// The lower and upper values are the minimum and maximum over checkpoints
/// `⌈N/2^j⌉ ≥ max(2, √N)`; the horizon values are taken at `N` itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub horizon: u64,
    pub count: u64,
    #[serde(with = "crate::rational::serde_q")]
    pub d_minus: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub d_plus: Q,
    pub dexp_minus: f64,
    pub dexp_plus: f64,
    pub series: Vec<Checkpoint>,
}

impl DensityProfile {
    /// `members` must be sorted.
    pub fn from_members(members: &[u64], horizon: u64) -> Self {
        let horizon = horizon.max(2);
        let lower = 2u64.max((horizon as f64).sqrt().ceil() as u64);
        let mut checkpoints = Vec::new();
        let mut n = horizon;
        while n >= lower {
            checkpoints.push(n);
            if n == lower {
                break;
            }
            n = n.div_ceil(2).max(lower);
        }
        checkpoints.reverse();
        let series: Vec<Checkpoint> = checkpoints
            .iter()
            .map(|&n| Checkpoint {
                n,
                count: members.partition_point(|&m| m < n) as u64,
            })
            .collect();
        let densities: Vec<Q> = series.iter().map(|c| natural(c.count, c.n)).collect();
        let exps: Vec<f64> = series.iter().map(|c| exponential(c.count, c.n)).collect();
        DensityProfile {
            horizon,
            count: series.last().unwrap().count,
            d_minus: densities.iter().min().unwrap().clone(),
            d_plus: densities.iter().max().unwrap().clone(),
            dexp_minus: exps.iter().copied().fold(f64::INFINITY, f64::min),
            dexp_plus: exps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            series,
        }
    }

    /// `#S ∩ [1, N) / N`
    pub fn natural_density(&self) -> Q {
        natural(self.count, self.horizon)
    }

    /// `log #S ∩ [1, N) / log N`
    pub fn exponential_density(&self) -> f64 {
        exponential(self.count, self.horizon)
    }

    /// Columns `N,count,d_minus,d_plus,dexp_minus,dexp_plus`, with running
    /// extremes over the checkpoints seen so far.
    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = String::from("N,count,d_minus,d_plus,dexp_minus,dexp_plus\n");
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        let (mut elo, mut ehi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.series {
            let d = natural(c.count, c.n);
            let e = exponential(c.count, c.n);
            lo = Some(lo.map_or(d.clone(), |x| x.min(d.clone())));
            hi = Some(hi.map_or(d.clone(), |x| x.max(d.clone())));
            elo = elo.min(e);
            ehi = ehi.max(e);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.n,
                c.count,
                lo.as_ref().unwrap(),
                hi.as_ref().unwrap(),
                format_significant(elo, precision),
                format_significant(ehi, precision)
            );
        }
        out
    }
}

fn natural(count: u64, n: u64) -> Q {
    Ratio::new(count.into(), n.into())
}

fn exponential(count: u64, n: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        (count as f64).ln() / (n as f64).ln()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub alpha: f64,
    pub eps: f64,
    pub members: Vec<u64>,
    pub profile: DensityProfile,
}

/// Members of `{n ∈ [2, N) : α−ε ≤ log f(n)/log n ≤ α+ε}` with their densities.
pub fn level_set(f: &dyn Fn(u64) -> f64, alpha: f64, eps: f64, horizon: u64) -> Result<LevelSet> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    let mut members = Vec::new();
    for n in 2..horizon {
        let r = growth_ratio(f, n)?;
        if alpha - eps <= r && r <= alpha + eps {
            members.push(n);
        }
    }
    let profile = DensityProfile::from_members(&members, horizon);
    Ok(LevelSet {
        alpha,
        eps,
        members,
        profile,
    })
}

/// `(n, log f(n)/log n)` for `n ∈ [lo, hi)`, `lo ≥ 2`.
pub fn profile(f: &dyn Fn(u64) -> f64, lo: u64, hi: u64) -> Result<Vec<(u64, f64)>> {
    (lo.max(2)..hi)
        .map(|n| Ok((n, growth_ratio(f, n)?)))
        .collect()
}

pub fn profile_csv(series: &[(u64, f64)], precision: usize) -> String {
    let mut out = String::from("n,ratio\n");
    for (n, r) in series {
        let _ = writeln!(out, "{n},{}", format_significant(*r, precision));
    }
    out
}

/// Decimal rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Target densities `(d₋, d₊, d₋^exp, d₊^exp)` for one member of a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityTargets {
    pub d_minus: f64,
    pub d_plus: f64,
    pub dexp_minus: f64,
    pub dexp_plus: f64,
}

impl DensityTargets {
    pub fn from_profile(p: &DensityProfile) -> Self {
        DensityTargets {
            d_minus: crate::rational::to_f64(&p.d_minus),
            d_plus: crate::rational::to_f64(&p.d_plus),
            dexp_minus: p.dexp_minus,
            dexp_plus: p.dexp_plus,
        }
    }

    /// The profile of `{n < H : member(n)}` at horizon `H`.
    pub fn observed(member: &dyn Fn(u64) -> bool, horizon: u64) -> Self {
        let members: Vec<u64> = (1..horizon).filter(|&n| member(n)).collect();
        Self::from_profile(&DensityProfile::from_members(&members, horizon))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Interleaving {
    /// `N₁ = 1 < N₂ < …`; `E = ⋃ E_k ∩ [N_k, N_{k+1})`.
    pub cut_points: Vec<u64>,
    /// `E ∩ [1, H)`.
    pub members: Vec<u64>,
}

/// Picks cut points for `E = ⋃_k E_k ∩ [N_k, N_{k+1})`.
///
/// `N_{k+1}` is the least `N ≥ 2N_k` at which, with slack `1/k`, the counts
/// `#E_k ∩ [N_k, N)`, `#E_k ∩ [N_k, N) + N_k − 1` and `#E_{k+1} ∩ [1, N)` sit
/// between the bounds given by the targets of `E_k` and `E_{k+1}` (natural
/// and exponential). The search stops once `2N_k ≥ H` or after `k_max` cuts.
pub fn interleave(
    member: &dyn Fn(usize, u64) -> bool,
    targets: &dyn Fn(usize) -> DensityTargets,
    horizon: u64,
    k_max: usize,
) -> Result<Interleaving> {
    let mut cut_points = vec![1u64];
    let mut k = 1;
    while k < k_max && 2 * cut_points[k - 1] < horizon {
        let nk = cut_points[k - 1];
        let slack = 1.0 / k as f64;
        let (tk, tnext) = (targets(k), targets(k + 1));
        let mut own = 0u64; // #E_k ∩ [N_k, N)
        let mut next = (1..2 * nk).filter(|&n| member(k + 1, n)).count() as u64;
        own += (nk..2 * nk).filter(|&n| member(k, n)).count() as u64;
        let mut failure = String::new();
        let mut found = None;
        for n in 2 * nk..horizon {
            match cut_conditions(n, own, own + nk - 1, next, &tk, &tnext, slack) {
                Ok(()) => {
                    found = Some(n);
                    break;
                }
                Err(why) => failure = why,
            }
            own += u64::from(member(k, n));
            next += u64::from(member(k + 1, n));
        }
        match found {
            Some(n) => cut_points.push(n),
            None => {
                return Err(Error::NoCutPoint {
                    k,
                    from: 2 * nk,
                    horizon,
                    inequality: failure,
                })
            }
        }
        k += 1;
    }
    let mut members = Vec::new();
    for (i, &start) in cut_points.iter().enumerate() {
        let end = cut_points.get(i + 1).copied().unwrap_or(horizon);
        members.extend((start..end).filter(|&n| member(i + 1, n)));
    }
    Ok(Interleaving {
        cut_points,
        members,
    })
}

fn cut_conditions(
    n: u64,
    inner: u64,
    outer: u64,
    next: u64,
    tk: &DensityTargets,
    tnext: &DensityTargets,
    slack: f64,
) -> std::result::Result<(), String> {
    let nf = n as f64;
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(format!("{what} at N = {n}"))
        }
    };
    check(
        nf * (tk.d_minus - slack) <= inner as f64,
        "N(d₋(E_k) − 1/k) ≤ #E'_k",
    )?;
    check(
        outer as f64 <= nf * (tk.d_plus + slack),
        "#E''_k ≤ N(d₊(E_k) + 1/k)",
    )?;
    check(
        nf.powf(tk.dexp_minus - slack) <= inner as f64,
        "N^(d₋exp(E_k) − 1/k) ≤ #E'_k",
    )?;
    check(
        outer as f64 <= nf.powf(tk.dexp_plus + slack),
        "#E''_k ≤ N^(d₊exp(E_k) + 1/k)",
    )?;
    check(
        nf * (tnext.d_minus - slack) <= next as f64,
        "N(d₋(E_{k+1}) − 1/k) ≤ #E_{k+1}",
    )?;
    check(
        next as f64 <= nf * (tnext.d_plus + slack),
        "#E_{k+1} ≤ N(d₊(E_{k+1}) + 1/k)",
    )?;
    check(
        nf.powf(tnext.dexp_minus - slack) <= next as f64,
        "N^(d₋exp(E_{k+1}) − 1/k) ≤ #E_{k+1}",
    )?;
    check(
        next as f64 <= nf.powf(tnext.dexp_plus + slack),
        "#E_{k+1} ≤ N^(d₊exp(E_{k+1}) + 1/k)",
    )
}

/// `Σ_{n∈[2^{K−1}, 2^K)} log f(n) / (2^{K−1} log 2^{K−1})` for the counting function.
pub fn alpha0_estimate(k: u32) -> Result<f64> {
    if !(4..=40).contains(&k) {
        return Err(Error::InvalidInput("K must lie in 4..=40".into()));
    }
    let (lo, hi) = (1u64 << (k - 1), 1u64 << k);
    let sum: f64 = (lo..hi).map(|n| (stern(n) as f64).ln()).sum();
    Ok(sum / ((hi - lo) as f64 * (lo as f64).ln()))
}

/// `(log 3/log 2 − α₀, log 3/log 2 − log₂ φ)`: the ends of the singularity spectrum.
pub fn endpoint_constants(alpha0: f64) -> (f64, f64) {
    let l = 3f64.log2();
    (l - alpha0, l - log2_golden())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovMode {
    /// Quotients are the run lengths of a uniformly random binary expansion.
    BinaryDrive,
    /// Quotients are those of a uniformly random dyadic rational.
    Levy,
}

impl std::str::FromStr for LyapunovMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "binary_drive" => Ok(LyapunovMode::BinaryDrive),
            "levy" => Ok(LyapunovMode::Levy),
            _ => Err(Error::Parse(format!(
                "unknown mode {s:?} (binary-drive, levy)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub mode: LyapunovMode,
    pub seed: u64,
    pub s: usize,
    /// `log q_s / s`
    pub per_quotient: f64,
    /// `log q_s / (s log 4)` in binary-drive mode, `log q_s / s` otherwise.
    pub normalized: f64,
}

pub fn lyapunov_estimate(mode: LyapunovMode, seed: u64, s: usize) -> Result<LyapunovEstimate> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quotients = match mode {
        LyapunovMode::BinaryDrive => binary_drive_quotients(&mut rng, s),
        LyapunovMode::Levy => levy_quotients(&mut rng, s)?,
    };
    let per_quotient = log_cf_denominator(quotients) / s as f64;
    let normalized = match mode {
        LyapunovMode::BinaryDrive => per_quotient / 4f64.ln(),
        LyapunovMode::Levy => per_quotient,
    };
    Ok(LyapunovEstimate {
        mode,
        seed,
        s,
        per_quotient,
        normalized,
    })
}

/// Run lengths `a₁, …, a_s` of `t = 0.1^{a₁}0^{a₂}1^{a₃}…` with fair random bits after the leading 1.
fn binary_drive_quotients(rng: &mut impl Rng, s: usize) -> Vec<u64> {
    let mut runs = Vec::with_capacity(s);
    let mut current = true;
    let mut len = 1u64;
    while runs.len() < s {
        let bit = rng.gen::<bool>();
        if bit == current {
            len += 1;
        } else {
            runs.push(len);
            current = bit;
            len = 1;
        }
    }
    runs
}

/// First `s` quotients of `m / 2^{16s}` for a uniformly random odd `m`.
fn levy_quotients(rng: &mut impl RngCore, s: usize) -> Result<Vec<u64>> {
    let bits = 16 * s;
    let mut bytes = vec![0u8; bits / 8];
    rng.fill_bytes(&mut bytes);
    bytes[0] |= 1;
    let mut num = BigUint::from_bytes_le(&bytes);
    let mut den = BigUint::from(1u8) << bits;
    let mut quotients = Vec::with_capacity(s);
    // num/den ∈ (0, 1); Euclid on (den, num) yields a₁, a₂, …
    while quotients.len() < s && !num.is_zero() {
        let a = &den / &num;
        let r = &den - &a * &num;
        quotients.push(a.to_u64().unwrap_or(u64::MAX));
        den = num;
        num = r;
    }
    if quotients.len() < s {
        return Err(Error::InsufficientBits {
            got: quotients.len(),
            wanted: s,
        });
    }
    Ok(quotients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::{count_representations, BernoulliSpec};

    #[test]
    fn stern_values() {
        assert_eq!(stern(0), 1);
        assert_eq!(stern(4), 3);
        assert_eq!(stern(6), 3);
        for k in 1..=20 {
            assert_eq!(stern((1 << k) - 1), 1);
        }
        let table = stern_table(5000);
        for (n, &v) in table.iter().enumerate() {
            assert_eq!(stern(n as u64), v);
        }
    }

    #[test]
    fn stern_counts_representations() {
        let spec = BernoulliSpec::uniform(2, 3).unwrap();
        for n in 0..2000 {
            assert_eq!(BigUint::from(stern(n)), count_representations(&spec, n));
        }
    }

    #[test]
    fn runs() {
        assert_eq!(binary_runs(6).unwrap().a, vec![0, 1, 2]);
        assert_eq!(binary_runs(5).unwrap().a, vec![1, 1, 1]);
        assert_eq!(binary_runs(3).unwrap().a, vec![2]);
        assert!(binary_runs(0).is_err());
        for n in 1..5000 {
            assert_eq!(binary_runs(n).unwrap().value(), n);
        }
    }

    #[test]
    fn continued_fraction_denominators() {
        assert_eq!(cf_denominator(&[1, 2]).unwrap(), BigUint::from(3u8));
        assert_eq!(cf_denominator(&[]).unwrap(), BigUint::from(1u8));
        assert!(cf_denominator(&[1, 0]).is_err());
        for n in 1..4096 {
            let q: Vec<u64> = binary_runs(n)
                .unwrap()
                .quotients()
                .iter()
                .map(|&a| a.into())
                .collect();
            assert_eq!(
                cf_denominator(&q).unwrap(),
                BigUint::from(stern(n)),
                "n = {n}"
            );
        }
        assert_eq!(log_cf_denominator([1]), 0.0);
        let q = [3u64, 1, 4, 1, 5, 9, 2, 6];
        let exact = cf_denominator(&q).unwrap().to_f64().unwrap().ln();
        assert!((log_cf_denominator(q) - exact).abs() < 1e-12);
    }

    #[test]
    fn identity_level_set() {
        let f = |n: u64| n as f64;
        let ls = level_set(&f, 1.0, 0.1, 1000).unwrap();
        assert_eq!(ls.members, (2..1000).collect::<Vec<_>>());
        // #[2, 1000) = 998 of 1000 at the horizon.
        assert_eq!(ls.profile.natural_density(), Q::new(499.into(), 500.into()));
        assert!(ls.profile.exponential_density() > 0.999);
    }

    #[test]
    fn stern_level_set_contains_mersenne_numbers() {
        let f = |n: u64| stern(n) as f64;
        let ls = level_set(&f, 0.0, 0.01, 1 << 12).unwrap();
        for k in 2..12 {
            assert!(ls.members.binary_search(&((1 << k) - 1)).is_ok());
        }
    }

    #[test]
    fn disjoint_windows_give_disjoint_level_sets() {
        let f = |n: u64| stern(n) as f64;
        let a = level_set(&f, 0.3, 0.05, 1 << 13).unwrap();
        let b = level_set(&f, 0.5, 0.05, 1 << 13).unwrap();
        assert!(a
            .members
            .iter()
            .all(|m| b.members.binary_search(m).is_err()));
    }

    #[test]
    fn nonpositive_values_are_reported() {
        let f = |n: u64| if n == 10 { 0.0 } else { 1.0 };
        assert!(matches!(
            level_set(&f, 0.0, 0.1, 20),
            Err(Error::NonPositiveValue { n: 10 })
        ));
    }

    #[test]
    fn profile_monotone_counts() {
        let members: Vec<u64> = (2..5000).filter(|n| n % 3 == 0).collect();
        let p = DensityProfile::from_members(&members, 5000);
        assert!(p
            .series
            .windows(2)
            .all(|w| w[0].count <= w[1].count && w[0].n < w[1].n));
        assert!(p.d_minus <= p.d_plus);
        assert_eq!(p.series.last().unwrap().n, 5000);
        assert!(p.to_csv(6).starts_with("N,count,d_minus"));
    }

    #[test]
    fn stern_profile_extremes() {
        let f = |n: u64| stern(n) as f64;
        let series = profile(&f, 1 << 12, 1 << 13).unwrap();
        let (argmin, min) =
            series.iter().fold(
                (0, f64::INFINITY),
                |acc, &(n, r)| if r < acc.1 { (n, r) } else { acc },
            );
        let max = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((argmin, min), (8191, 0.0));
        assert!(max < 0.75);
        for k in 2..=14u32 {
            let bound = log2_golden() * k as f64 / (k as f64 - 1.0);
            for n in (1u64 << (k - 1)).max(2)..(1 << k) {
                assert!(growth_ratio(&f, n).unwrap() <= bound + 1e-12, "n = {n}");
            }
        }
        let id = |n: u64| n as f64;
        assert!(profile(&id, 2, 50)
            .unwrap()
            .iter()
            .all(|p| (p.1 - 1.0).abs() < 1e-15));
    }

    #[test]
    fn alpha0_values() {
        let a14 = alpha0_estimate(14).unwrap();
        assert!((a14 - 0.56).abs() <= 0.01, "{a14}");
        assert!((alpha0_estimate(8).unwrap() - a14).abs() <= 0.08);
        for k in 10..=14 {
            let a = alpha0_estimate(k).unwrap();
            assert!(0.5 < a && a < 0.62);
        }
        let (lo, hi) = endpoint_constants(a14);
        assert!((lo - 1.025).abs() < 0.01 && (hi - 0.891).abs() < 0.001);
    }

    #[test]
    fn constant_family_interleaves_to_itself() {
        let member = |_k: usize, n: u64| n.is_multiple_of(2);
        let t = DensityTargets::observed(&|n| n % 2 == 0, 1 << 14);
        let out = interleave(&member, &|_| t, 1 << 14, 20).unwrap();
        assert_eq!(
            out.members,
            (1..1 << 14).filter(|n| n % 2 == 0).collect::<Vec<_>>()
        );
        for &n in &out.cut_points[1..] {
            let c = out.members.partition_point(|&m| m < n) as f64;
            assert!((c / n as f64 - 0.5).abs() <= (1.0 + 1e-9) / n as f64);
        }
    }

    #[test]
    fn dyadic_family_tracks_targets() {
        let h = 1u64 << 18;
        let member = |k: usize, n: u64| n.is_multiple_of(1 << k.min(40));
        let targets = |k: usize| DensityTargets::observed(&|n| n % (1 << k.min(40)) == 0, h);
        let out = interleave(&member, &targets, h, 6).unwrap();
        assert_eq!(out.cut_points.len(), 6);
        for (i, &n) in out.cut_points.iter().enumerate().skip(1) {
            let k = i; // n = N_{k+1}
            let c = out.members.partition_point(|&m| m < n) as f64;
            assert!((c / n as f64 - 0.5f64.powi(k as i32)).abs() <= 1.0 / k as f64);
        }
    }

    #[test]
    fn unreachable_cut_is_reported() {
        let h = 1u64 << 16;
        let member = |k: usize, n: u64| n.is_multiple_of(1 << k.min(40));
        let targets = |k: usize| DensityTargets::observed(&|n| n % (1 << k.min(40)) == 0, h);
        let err = interleave(&member, &targets, h, 12).unwrap_err();
        assert!(matches!(err, Error::NoCutPoint { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn level_set_family_stays_in_window_past_cuts() {
        let h = 1u64 << 15;
        let f = |n: u64| stern(n) as f64;
        let alpha = 0.4;
        let member = move |k: usize, n: u64| {
            n >= 2 && (growth_ratio(&f, n).unwrap() - alpha).abs() <= 1.0 / k as f64
        };
        let targets = |k: usize| DensityTargets::observed(&|n| member(k, n), h);
        let out = interleave(&member, &targets, h, 6).unwrap();
        for (i, &start) in out.cut_points.iter().enumerate() {
            let k = i + 1;
            for &m in out.members.iter().filter(|&&m| m >= start) {
                assert!((growth_ratio(&f, m).unwrap() - alpha).abs() <= 1.0 / k as f64);
            }
        }
    }

    #[test]
    fn lyapunov_trivial_and_deterministic() {
        let a = lyapunov_estimate(LyapunovMode::BinaryDrive, 1, 1000).unwrap();
        let b = lyapunov_estimate(LyapunovMode::BinaryDrive, 1, 1000).unwrap();
        assert_eq!(a, b);
        assert!(a.normalized > 0.4 && a.normalized < 0.7);
        let l = lyapunov_estimate(LyapunovMode::Levy, 2, 1000).unwrap();
        assert!((l.per_quotient - 1.18657).abs() < 0.1);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.123456789, 3), "0.123");
        assert_eq!(format_significant(12.5, 3), "12.5");
        assert_eq!(format_significant(0.0, 3), "0");
    }
}
