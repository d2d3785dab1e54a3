//! Fixed-point arbitrary-precision arithmetic for oracle computations.
//!
//! Values are BigInt mantissas scaled by 10^SCALE (70 decimal digits),
//! enough to certify 50-digit reference values. Only what the oracles
//! need is implemented: field ops, sqrt, exp, ln, pow, pi, sin(pi x),
//! a Spouge-series gamma function and the direct 2F1 series.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const SCALE: u32 = 130;

fn pow10(n: u32) -> BigInt {
    BigInt::from(10u32).pow(n)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigFloat {
    mant: BigInt,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero() }
    }

    pub fn one() -> Self {
        BigFloat { mant: pow10(SCALE) }
    }

    pub fn from_i64(n: i64) -> Self {
        BigFloat { mant: BigInt::from(n) * pow10(SCALE) }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        BigFloat { mant: BigInt::from(num) * pow10(SCALE) / BigInt::from(den) }
    }

    /// Exact conversion: every finite f64 is a binary rational.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1 << 52), exp_bits - 1075)
        };
        let mut v = BigInt::from(m) * pow10(SCALE);
        if e >= 0 {
            v <<= e as usize;
        } else {
            v = div_nearest(&v, &(BigInt::one() << (-e) as usize));
        }
        if neg {
            v = -v;
        }
        BigFloat { mant: v }
    }

    pub fn to_f64(&self) -> f64 {
        // split into integer and fractional digits to stay in range
        let scale = pow10(SCALE);
        let int_part = &self.mant / &scale;
        let frac_part = &self.mant % &scale;
        let int_f: f64 = int_part.to_string().parse().unwrap();
        let frac_f: f64 = frac_part.to_string().parse().unwrap();
        int_f + frac_f / 10f64.powi(SCALE as i32)
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs() }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Decimal string with `digits` fractional digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let shift = pow10(SCALE - digits);
        let rounded = div_nearest(&self.mant, &shift);
        let ten = pow10(digits);
        let int_part = &rounded / &ten;
        let frac_part = (&rounded % &ten).abs();
        let sign = if self.mant.is_negative() && int_part.is_zero() { "-" } else { "" };
        format!("{sign}{int_part}.{frac_part:0>width$}", width = digits as usize)
    }
}

/// Round-to-nearest integer division.
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let negative = a.is_negative() != b.is_negative();
    let (aa, ab) = (a.abs(), b.abs());
    let q: BigInt = (&aa + &ab / 2) / &ab;
    if negative {
        -q
    } else {
        q
    }
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        BigFloat { mant: &self.mant + &rhs.mant }
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        BigFloat { mant: &self.mant - &rhs.mant }
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        BigFloat { mant: div_nearest(&(&self.mant * &rhs.mant), &pow10(SCALE)) }
    }
}

impl Div for &BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        assert!(!rhs.mant.is_zero(), "division by zero");
        BigFloat { mant: div_nearest(&(&self.mant * pow10(SCALE)), &rhs.mant) }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -&self.mant }
    }
}

/// sqrt by integer Newton iteration on mant * 10^SCALE.
pub fn sqrt(x: &BigFloat) -> BigFloat {
    assert!(!x.mant.is_negative());
    if x.mant.is_zero() {
        return BigFloat::zero();
    }
    let target = &x.mant * pow10(SCALE);
    let mut guess: BigInt = BigInt::from_bytes_be(num_bigint::Sign::Plus, &target.to_bytes_be().1)
        >> (target.bits() / 2) as usize;
    if guess.is_zero() {
        guess = BigInt::one();
    }
    let mut prev = BigInt::zero();
    while guess != prev {
        prev = guess.clone();
        guess = (&guess + &target / &guess) / 2;
        if (&guess - &prev).abs() <= BigInt::one() {
            break;
        }
    }
    BigFloat { mant: guess }
}

/// exp via argument halving and Taylor series.
pub fn exp(x: &BigFloat) -> BigFloat {
    let half = BigFloat::from_ratio(1, 2);
    let mut halvings = 0u32;
    let mut y = x.clone();
    while y.abs() > half {
        y = &y * &half;
        halvings += 1;
        assert!(halvings < 64, "exp argument too large");
    }
    // Taylor at |y| <= 1/2
    let mut sum = BigFloat::one();
    let mut term = BigFloat::one();
    for n in 1..200i64 {
        term = &(&term * &y) / &BigFloat::from_i64(n);
        if term.mant.is_zero() {
            break;
        }
        sum = &sum + &term;
    }
    for _ in 0..halvings {
        sum = &sum * &sum;
    }
    sum
}

/// ln by Newton iteration on exp, seeded from f64.
pub fn ln(x: &BigFloat) -> BigFloat {
    assert!(x.mant.is_positive(), "ln needs a positive argument");
    let mut y = BigFloat::from_f64(x.to_f64().ln());
    for _ in 0..6 {
        // y <- y + x e^{-y} - 1
        let e = exp(&-&y);
        let correction = &(x * &e) - &BigFloat::one();
        y = &y + &correction;
    }
    y
}

pub fn pow(x: &BigFloat, y: &BigFloat) -> BigFloat {
    exp(&(y * &ln(x)))
}

pub fn powi(x: &BigFloat, n: u32) -> BigFloat {
    let mut acc = BigFloat::one();
    for _ in 0..n {
        acc = &acc * x;
    }
    acc
}

/// pi via Machin's formula.
pub fn pi() -> BigFloat {
    fn atan_inv(n: i64) -> BigFloat {
        // arctan(1/n) = sum (-1)^k / ((2k+1) n^(2k+1))
        let mut sum = BigFloat::zero();
        let mut power = BigFloat::from_ratio(1, n);
        let inv_n2 = BigFloat::from_ratio(1, n * n);
        let mut k = 0i64;
        loop {
            let term = &power / &BigFloat::from_i64(2 * k + 1);
            if term.mant.is_zero() {
                break;
            }
            if k % 2 == 0 {
                sum = &sum + &term;
            } else {
                sum = &sum - &term;
            }
            power = &power * &inv_n2;
            k += 1;
        }
        sum
    }
    let a = atan_inv(5);
    let b = atan_inv(239);
    let sixteen = BigFloat::from_i64(16);
    let four = BigFloat::from_i64(4);
    &(&sixteen * &a) - &(&four * &b)
}

/// sin(pi x) with reduction about the nearest integer.
pub fn sin_pi(x: &BigFloat) -> BigFloat {
    let xf = x.to_f64();
    let n = xf.round() as i64;
    let r = x - &BigFloat::from_i64(n);
    let arg = &pi() * &r;
    // Taylor for |arg| <= pi/2
    let mut sum = arg.clone();
    let mut term = arg.clone();
    let arg2 = &arg * &arg;
    let mut k = 1i64;
    loop {
        term = &(&term * &arg2) / &BigFloat::from_i64((2 * k) * (2 * k + 1));
        if term.mant.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        k += 1;
    }
    if n % 2 == 0 {
        sum
    } else {
        -&sum
    }
}

/// Gamma by the Spouge series with a = 64 (relative error far below
/// 10^-50), plus reflection for the left half-plane.
pub fn gamma(x: &BigFloat) -> BigFloat {
    let half = BigFloat::from_ratio(1, 2);
    if x < &half {
        // Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        let reflected = gamma(&(&BigFloat::one() - x));
        return &pi() / &(&sin_pi(x) * &reflected);
    }
    const A: i64 = 64;
    let z = &(x - &BigFloat::one());
    let e1 = exp(&BigFloat::one());
    let mut acc = sqrt(&(&BigFloat::from_i64(2) * &pi()));
    let mut factorial = BigInt::one(); // (k-1)!
    for k in 1..A {
        if k > 1 {
            factorial *= BigInt::from(k - 1);
        }
        let amk = A - k;
        // c_k = (-1)^(k-1) (a-k)^(k-1/2) e^(a-k) / (k-1)!
        let mut ck = powi(&BigFloat::from_i64(amk), (k - 1) as u32);
        ck = &ck * &sqrt(&BigFloat::from_i64(amk));
        ck = &ck * &powi(&e1, amk as u32);
        ck = BigFloat { mant: div_nearest(&ck.mant, &factorial) };
        if k % 2 == 0 {
            ck = -&ck;
        }
        let denom = &(z + &BigFloat::from_i64(k));
        acc = &acc + &(&ck / denom);
    }
    // (z + a)^(z + 1/2) e^{-(z + a)}
    let za = &(z + &BigFloat::from_i64(A));
    let expo = &(z + &half);
    let front = &pow(za, expo) * &exp(&-za);
    &front * &acc
}

/// Direct 2F1 series in extended precision; converges for |z| < 1.
pub fn hyp2f1_series(a: &BigFloat, b: &BigFloat, c: &BigFloat, z: &BigFloat) -> BigFloat {
    // round-to-nearest keeps a 1-ulp term alive forever, so stop at a
    // few ulp instead of exact zero
    let floor = BigInt::from(1000);
    let mut sum = BigFloat::one();
    let mut term = BigFloat::one();
    for n in 0..5000i64 {
        let nf = BigFloat::from_i64(n);
        let num = &(a + &nf) * &(b + &nf);
        let den = &(c + &nf) * &BigFloat::from_i64(n + 1);
        term = &(&term * &num) / &den;
        term = &term * z;
        if term.mant.abs() <= floor {
            return sum;
        }
        sum = &sum + &term;
    }
    panic!("extended-precision 2F1 series did not converge");
}

/// |a - b| <= 10^-digits as BigFloats.
pub fn agree_to(a: &BigFloat, b: &BigFloat, digits: u32) -> bool {
    let diff = (a - b).abs();
    diff.mant <= pow10(SCALE - digits)
}
