//! Exact arithmetic in a real number field Q(β).
//!
//! β is pinned down by a monic integer minimal polynomial and a rational
//! isolating interval `[lo, hi]` with `lo > 1`. Elements are dense coefficient
//! vectors `c0 + c1 β + ... + c_{n-1} β^{n-1}` over the rationals. Equality is
//! structural; order is decided by evaluating an interval enclosure of the
//! element and bisecting the isolating interval until the enclosure excludes 0.
//! The narrowed interval is cached on the descriptor and shared by every
//! element of the field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, to_f64, Q};

/// Bisection budget for a single sign decision. A nonzero element of a field
/// with an irreducible minimal polynomial never exhausts it.
const MAX_BISECTIONS: usize = 20_000;

pub type Field = Arc<FieldDescriptor>;

#[derive(Debug, Clone)]
struct Isolation {
    lo: Q,
    hi: Q,
    sign_lo: Ordering,
}

#[derive(Debug)]
pub struct FieldDescriptor {
    minpoly: Vec<BigInt>,
    initial: (Q, Q),
    isolation: RwLock<Isolation>,
}

impl FieldDescriptor {
    /// `minpoly` is constant-first and must be monic.
    pub fn new(minpoly: Vec<BigInt>, lo: Q, hi: Q) -> Result<Field> {
        let mut minpoly = minpoly;
        while minpoly.len() > 1 && minpoly.last().is_some_and(Zero::is_zero) {
            minpoly.pop();
        }
        if minpoly.len() < 2 {
            return Err(Error::InvalidDescriptor("degree must be at least 1".into()));
        }
        if !minpoly.last().unwrap().is_one() {
            return Err(Error::InvalidDescriptor(
                "minimal polynomial must be monic".into(),
            ));
        }
        if lo >= hi {
            return Err(Error::InvalidDescriptor(
                "interval must satisfy lo < hi".into(),
            ));
        }
        if lo <= Q::one() {
            return Err(Error::InvalidDescriptor(
                "base must exceed 1 (lo > 1)".into(),
            ));
        }
        let poly: Vec<Q> = minpoly.iter().cloned().map(Q::from_integer).collect();
        let sign_lo = eval(&poly, &lo).cmp(&Q::zero());
        let sign_hi = eval(&poly, &hi).cmp(&Q::zero());
        if sign_lo == Ordering::Equal || sign_hi == Ordering::Equal || sign_lo == sign_hi {
            return Err(Error::InvalidDescriptor(
                "minimal polynomial must change sign strictly inside the interval".into(),
            ));
        }
        let roots = sturm_count(&poly, &lo, &hi);
        if roots != 1 {
            return Err(Error::InvalidDescriptor(format!(
                "interval isolates {roots} roots, expected exactly one"
            )));
        }
        Ok(Arc::new(FieldDescriptor {
            minpoly,
            initial: (lo.clone(), hi.clone()),
            isolation: RwLock::new(Isolation { lo, hi, sign_lo }),
        }))
    }

    /// Degree-one field for an integer base `b >= 2`.
    pub fn integer(b: u64) -> Result<Field> {
        if b < 2 {
            return Err(Error::InvalidDescriptor(
                "integer base must be at least 2".into(),
            ));
        }
        let b = BigInt::from(b);
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let centre = Q::from_integer(b.clone());
        Self::new(vec![-b, BigInt::one()], &centre - &half, centre + half)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn initial_interval(&self) -> (Q, Q) {
        self.initial.clone()
    }

    /// Current (possibly refined) isolating interval.
    pub fn interval(&self) -> (Q, Q) {
        let iso = self.isolation.read().unwrap();
        (iso.lo.clone(), iso.hi.clone())
    }

    pub fn beta(self: &Arc<Self>) -> FieldElement {
        if self.degree() == 1 {
            FieldElement::from_rational(self, Q::from_integer(-self.minpoly[0].clone()))
        } else {
            let mut coeffs = vec![Q::zero(); self.degree()];
            coeffs[1] = Q::one();
            FieldElement {
                field: Arc::clone(self),
                coeffs,
            }
        }
    }

    pub fn approx_beta(&self) -> f64 {
        self.refine_until_width(&Q::new(BigInt::one(), BigInt::one() << 60usize));
        let (lo, hi) = self.interval();
        to_f64(&((lo + hi) / Q::from_integer(BigInt::from(2))))
    }

    fn same_as(&self, other: &FieldDescriptor) -> bool {
        std::ptr::eq(self, other)
            || (self.minpoly == other.minpoly && self.initial == other.initial)
    }

    /// One bisection step. Concurrent callers may race; a narrower interval is
    /// never replaced by a wider one.
    fn refine_once(&self) {
        let current = self.isolation.read().unwrap().clone();
        if current.lo == current.hi {
            return;
        }
        let poly: Vec<Q> = self.minpoly.iter().cloned().map(Q::from_integer).collect();
        let mid = (&current.lo + &current.hi) / Q::from_integer(BigInt::from(2));
        let sign_mid = eval(&poly, &mid).cmp(&Q::zero());
        let next = match sign_mid {
            Ordering::Equal => Isolation {
                lo: mid.clone(),
                hi: mid,
                sign_lo: Ordering::Equal,
            },
            s if s == current.sign_lo => Isolation {
                lo: mid,
                hi: current.hi.clone(),
                sign_lo: current.sign_lo,
            },
            _ => Isolation {
                lo: current.lo.clone(),
                hi: mid,
                sign_lo: current.sign_lo,
            },
        };
        let mut guard = self.isolation.write().unwrap();
        if &next.hi - &next.lo < &guard.hi - &guard.lo {
            *guard = next;
        }
    }

    fn refine_until_width(&self, width: &Q) {
        for _ in 0..MAX_BISECTIONS {
            let (lo, hi) = self.interval();
            if &(hi - lo) <= width {
                return;
            }
            self.refine_once();
        }
    }

    fn enclose(&self, coeffs: &[Q]) -> (Q, Q) {
        let (lo, hi) = self.interval();
        let mut lo_pow = Q::one();
        let mut hi_pow = Q::one();
        let mut low = Q::zero();
        let mut high = Q::zero();
        for c in coeffs {
            if c.is_positive() {
                low += c * &lo_pow;
                high += c * &hi_pow;
            } else if c.is_negative() {
                low += c * &hi_pow;
                high += c * &lo_pow;
            }
            lo_pow *= &lo;
            hi_pow *= &hi;
        }
        (low, high)
    }

    fn reduce(&self, mut poly: Vec<Q>) -> Vec<Q> {
        let n = self.degree();
        for k in (n..poly.len()).rev() {
            let c = std::mem::take(&mut poly[k]);
            if c.is_zero() {
                continue;
            }
            // β^k = β^(k-n) * β^n and β^n = -(m_0 + ... + m_{n-1} β^{n-1}).
            for (i, m) in self.minpoly[..n].iter().enumerate() {
                if !m.is_zero() {
                    poly[k - n + i] -= &c * Q::from_integer(m.clone());
                }
            }
        }
        poly.truncate(n);
        poly.resize(n, Q::zero());
        poly
    }
}

/// JSON form: `{"minpoly": [c0, ..., cn], "interval": ["lo", "hi"]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DescriptorJson {
    pub minpoly: Vec<i64>,
    pub interval: [String; 2],
}

impl DescriptorJson {
    pub fn from_field(field: &FieldDescriptor) -> Self {
        let (lo, hi) = field.initial_interval();
        DescriptorJson {
            minpoly: field
                .minpoly
                .iter()
                .map(|c| c.to_i64().unwrap_or(0))
                .collect(),
            interval: [format_rational(&lo), format_rational(&hi)],
        }
    }

    pub fn into_field(self) -> Result<Field> {
        FieldDescriptor::new(
            self.minpoly.into_iter().map(BigInt::from).collect(),
            parse_rational(&self.interval[0])?,
            parse_rational(&self.interval[1])?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<Q>,
}

impl FieldElement {
    pub fn new(field: &Field, mut coeffs: Vec<Q>) -> Result<Self> {
        let n = field.degree();
        if coeffs.len() > n {
            return Ok(FieldElement {
                field: Arc::clone(field),
                coeffs: field.reduce(coeffs),
            });
        }
        coeffs.resize(n, Q::zero());
        Ok(FieldElement {
            field: Arc::clone(field),
            coeffs,
        })
    }

    pub fn from_rational(field: &Field, x: Q) -> Self {
        let mut coeffs = vec![Q::zero(); field.degree()];
        coeffs[0] = x;
        FieldElement {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        Self::from_rational(field, Q::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch)
        }
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        self.check(other)?;
        let coeffs = match op {
            ArithOp::Add => self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            ArithOp::Sub => self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            ArithOp::Mul => {
                let n = self.coeffs.len();
                let mut prod = vec![Q::zero(); 2 * n - 1];
                for (i, a) in self.coeffs.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coeffs.iter().enumerate() {
                        if !b.is_zero() {
                            prod[i + j] += a * b;
                        }
                    }
                }
                self.field.reduce(prod)
            }
        };
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.arith(other, ArithOp::Add)
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn add_int(&self, n: i64) -> FieldElement {
        let mut out = self.clone();
        out.coeffs[0] += Q::from_integer(BigInt::from(n));
        out
    }

    pub fn scale(&self, s: &Q) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).unwrap();
            }
            base = base.checked_mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let modulus: Vec<Q> = self
            .field
            .minpoly
            .iter()
            .cloned()
            .map(Q::from_integer)
            .collect();
        let (g, s) = ext_gcd(trim(self.coeffs.clone()), modulus);
        // g is a nonzero constant when the minimal polynomial is irreducible.
        if g.len() != 1 {
            return Err(Error::DivisionByZero);
        }
        let inv = g[0].recip();
        FieldElement::new(&self.field, s.into_iter().map(|c| c * &inv).collect())
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        self.checked_mul(&other.inverse()?)
    }

    /// Exact sign of the real embedding.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            return self.coeffs[0].cmp(&Q::zero());
        }
        for _ in 0..MAX_BISECTIONS {
            let (low, high) = self.field.enclose(&self.coeffs);
            if low.is_positive() {
                return Ordering::Greater;
            }
            if high.is_negative() {
                return Ordering::Less;
            }
            self.field.refine_once();
        }
        // Only reachable when the minimal polynomial is reducible and the
        // element vanishes at β.
        Ordering::Equal
    }

    pub fn compare(&self, other: &FieldElement) -> Result<Ordering> {
        self.check(other)?;
        if self.coeffs == other.coeffs {
            return Ok(Ordering::Equal);
        }
        Ok(self.checked_sub(other)?.signum())
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        for _ in 0..MAX_BISECTIONS {
            let (low, high) = self.field.enclose(&self.coeffs);
            let fl = low.floor();
            if fl == high.floor() {
                return fl.to_integer();
            }
            self.field.refine_once();
        }
        self.field.enclose(&self.coeffs).0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        match self.as_integer() {
            Some(n) => n,
            None => self.floor() + 1,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let beta = self.field.approx_beta();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * beta + to_f64(c))
    }

    /// Integer coefficient vector, when every coefficient is integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if wrote {
                f.write_str(if negative { " - " } else { " + " })?;
            } else if negative {
                f.write_str("-")?;
            }
            let coeff = if i > 0 && mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{coeff}β")?,
                _ => write!(f, "{coeff}β^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $op:expr) => {
        impl std::ops::$tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;

            /// Panics when the operands live in different fields.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.arith(rhs, $op)
                    .expect("field element descriptor mismatch")
            }
        }
    };
}

forward_op!(Add, add, ArithOp::Add);
forward_op!(Sub, sub, ArithOp::Sub);
forward_op!(Mul, mul, ArithOp::Mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

fn eval(poly: &[Q], x: &Q) -> Q {
    poly.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().unwrap().clone();
    let mut quot = vec![Q::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        quot[shift] = c;
        r = trim(r);
    }
    (quot, r)
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out = vec![Q::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Returns `(g, s)` with `s * a ≡ g (mod m)`, `g = gcd(a, m)`.
fn ext_gcd(a: Vec<Q>, m: Vec<Q>) -> (Vec<Q>, Vec<Q>) {
    let (mut r0, mut r1) = (a, trim(m));
    let (mut s0, mut s1) = (vec![Q::one()], Vec::new());
    while !r1.is_empty() {
        let (quot, rem) = divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&quot, &s1));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

fn derivative(p: &[Q]) -> Vec<Q> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
        .collect()
}

/// Number of distinct real roots in `(lo, hi]`.
fn sturm_count(p: &[Q], lo: &Q, hi: &Q) -> usize {
    let mut seq = vec![trim(p.to_vec()), trim(derivative(p))];
    while !seq.last().unwrap().is_empty() {
        let n = seq.len();
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq.pop();
    let variations = |x: &Q| {
        let signs: Vec<Ordering> = seq
            .iter()
            .map(|s| eval(s, x).cmp(&Q::zero()))
            .filter(|s| *s != Ordering::Equal)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(lo).saturating_sub(variations(hi))
}

/// Integer polynomial evaluation helper for tests and oracles.
pub fn minpoly_as_element(field: &Field) -> FieldElement {
    let beta = field.beta();
    let mut acc = FieldElement::zero(field);
    for (i, c) in field.minpoly().iter().enumerate() {
        let term = beta.pow(i as u32).scale(&Q::from_integer(c.clone()));
        acc = &acc + &term;
    }
    acc
}

/// Quadratic Pisot fields used throughout the examples and tests.
pub mod examples {
    use super::*;
    use crate::rational::q;

    /// `β² = β + 1`, `β ≈ 1.618`.
    pub fn golden() -> Field {
        FieldDescriptor::new(
            vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)],
            q(3, 2),
            q(17, 10),
        )
        .unwrap()
    }

    /// `β² = 3β − 1`, `β = (3 + √5)/2 ≈ 2.618`; the expansion of 1 is infinite.
    pub fn golden_square() -> Field {
        FieldDescriptor::new(
            vec![BigInt::from(1), BigInt::from(-3), BigInt::from(1)],
            q(5, 2),
            q(27, 10),
        )
        .unwrap()
    }
}
