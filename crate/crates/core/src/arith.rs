//! Exact integers and rationals, q-adic valuations, factorization, splitting in K, r-th power tests.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// A q-adic valuation: an exact rational or infinity (valuation of 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Finite(BigRational),
    Infinity,
}

impl Val {
    pub fn int(n: i64) -> Val {
        Val::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Val {
        Val::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: BigRational) -> Val {
        Val::Finite(q)
    }

    pub fn zero() -> Val {
        Val::int(0)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinity)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Val::Finite(q) => Some(q),
            Val::Infinity => None,
        }
    }

    /// The value as an integer, when it is one.
    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Val::Finite(q) if q.is_integer() => q.to_integer().to_u64(),
            _ => None,
        }
    }

    pub fn min(self, other: Val) -> Val {
        std::cmp::min(self, other)
    }

    pub fn scale(&self, k: &BigRational) -> Val {
        match self {
            Val::Finite(q) => Val::Finite(q * k),
            Val::Infinity => Val::Infinity,
        }
    }
}

impl std::ops::Add for &Val {
    type Output = Val;
    fn add(self, rhs: &Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinity,
        }
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        &self + &rhs
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(q) => write!(f, "{}", q),
            Val::Infinity => write!(f, "∞"),
        }
    }
}

impl FromStr for Val {
    type Err = Error;

    /// Accepts "n", "num/den" and "inf" / "∞".
    fn from_str(s: &str) -> Result<Val> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Val::Infinity);
        }
        let bad = || Error::Parse(format!("not a rational: {:?}", s));
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n, d),
            None => (t, "1"),
        };
        let ok = |x: &str| {
            let digits = x.strip_prefix('-').unwrap_or(x);
            !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
        };
        if !ok(n) || !ok(d) || d.starts_with('-') {
            return Err(bad());
        }
        let n = BigInt::from_str(n).map_err(|_| bad())?;
        let d = BigInt::from_str(d).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator: {:?}", s)));
        }
        Ok(Val::Finite(BigRational::new(n, d)))
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Val, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------- primality

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first 20 prime bases. Deterministic below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(x) = n.to_u64() {
        return is_prime_u64(x);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    if bases.iter().any(|&b| (n % b).is_zero()) {
        return false;
    }
    'witness: for b in bases {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn check_odd_prime(q: u64) -> Result<()> {
    if q.is_multiple_of(2) || !is_prime_u64(q) {
        return domain(format!("{} is not an odd prime", q));
    }
    Ok(())
}

pub(crate) fn check_family_prime(r: u64) -> Result<()> {
    if r < 5 || !is_prime_u64(r) {
        return domain(format!("r = {} must be a prime >= 5", r));
    }
    Ok(())
}

// ---------------------------------------------------------------- valuations

/// Exponent of q in n, for n != 0. No argument checks.
pub fn val_int(n: &BigInt, q: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut k = 0;
    let mut m = n.magnitude().clone();
    if let Some(mut x) = m.to_u128() {
        let q = q as u128;
        while x % q == 0 {
            x /= q;
            k += 1;
        }
        return Some(k);
    }
    let qb = BigUint::from(q);
    loop {
        let (d, rem) = m.div_rem(&qb);
        if !rem.is_zero() {
            return Some(k);
        }
        m = d;
        k += 1;
    }
}

/// Largest k with q^k | n, or infinity for n = 0.
pub fn vq(n: &BigInt, q: u64) -> Result<Val> {
    check_odd_prime(q)?;
    Ok(match val_int(n, q) {
        Some(k) => Val::int(k as i64),
        None => Val::Infinity,
    })
}

/// n / q^v_q(n) for nonzero n.
pub fn strip(n: &BigInt, q: u64) -> (u64, BigInt) {
    let k = val_int(n, q).expect("strip of zero");
    (k, n / BigInt::from(q).pow(k as u32))
}

// ---------------------------------------------------------------- factorization

pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 24;

/// Trial-division bound, read once from FREYCOND_FACTOR_BOUND.
pub fn factor_bound() -> u64 {
    static BOUND: OnceLock<u64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var("FREYCOND_FACTOR_BOUND")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&b| b >= 3)
            .unwrap_or(DEFAULT_FACTOR_BOUND)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub two_exponent: u64,
    /// Odd primes ascending with exponents.
    pub odd: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn odd_primes(&self) -> Vec<u64> {
        self.odd.iter().map(|&(p, _)| p).collect()
    }
}

pub fn odd_prime_factorization(n: &BigInt) -> Result<Factorization> {
    factor_with_bound(n, factor_bound())
}

fn push_prime(out: &mut Vec<(u64, u32)>, m: &BigUint) -> Result<()> {
    match m.to_u64() {
        Some(p) => {
            out.push((p, 1));
            Ok(())
        }
        None => domain(format!("prime factor {} exceeds 64 bits", m)),
    }
}

pub fn factor_with_bound(n: &BigInt, bound: u64) -> Result<Factorization> {
    if n.is_zero() {
        return domain("cannot factor 0");
    }
    let mut m = n.magnitude().clone();
    let two = m.trailing_zeros().unwrap_or(0);
    m >>= two;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut d: u64 = 3;
    while !m.is_one() {
        if is_probable_prime(&m) {
            push_prime(&mut out, &m)?;
            break;
        }
        let mut found = None;
        if let Some(mut x) = m.to_u128() {
            while d <= bound && (d as u128) * (d as u128) <= x {
                if x % d as u128 == 0 {
                    let mut e = 0;
                    while x % d as u128 == 0 {
                        x /= d as u128;
                        e += 1;
                    }
                    found = Some((d, e));
                    break;
                }
                d += 2;
            }
            if found.is_some() {
                m = BigUint::from(x);
            }
        } else {
            let dd = |d: u64| BigUint::from(d) * BigUint::from(d);
            while d <= bound && dd(d) <= m {
                if (&m % d).is_zero() {
                    let mut e = 0;
                    while (&m % d).is_zero() {
                        m /= d;
                        e += 1;
                    }
                    found = Some((d, e));
                    break;
                }
                d += 2;
            }
        }
        match found {
            Some(pe) => {
                out.push(pe);
                d += 2;
            }
            None => {
                if BigUint::from(d) * BigUint::from(d) > m {
                    push_prime(&mut out, &m)?;
                    break;
                }
                return Err(Error::Factorization { cofactor: BigInt::from(m), bound });
            }
        }
    }
    out.sort();
    Ok(Factorization { two_exponent: two, odd: out })
}

// ---------------------------------------------------------------- splitting in K

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSplitting {
    pub q: u64,
    pub r: u64,
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

pub fn k_splitting(q: u64, r: u64) -> Result<KSplitting> {
    check_odd_prime(q)?;
    check_family_prime(r)?;
    let m = (r - 1) / 2;
    if q == r {
        return Ok(KSplitting { q, r, e: m, f: 1, g: 1 });
    }
    let qr = q % r;
    let mut x = qr;
    let mut f = 1;
    while x != 1 && x != r - 1 {
        x = x * qr % r;
        f += 1;
    }
    Ok(KSplitting { q, r, e: 1, f, g: m / f })
}

// ---------------------------------------------------------------- modular helpers

pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = modp(a, m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(modp(&e.x, m))
    } else {
        None
    }
}

pub fn pow_mod(a: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    modp(a, m).modpow(e, m)
}

/// Legendre symbol (a/p) in {-1, 0, 1} for an odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let x = pow_mod(a, &BigInt::from((p - 1) / 2), &pb);
    if x.is_zero() {
        0
    } else if x.is_one() {
        1
    } else {
        -1
    }
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: &BigInt, p: u64) -> Option<BigInt> {
    let pb = BigInt::from(p);
    let a = modp(a, &pb);
    if a.is_zero() {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while legendre(&BigInt::from(z), p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(&BigInt::from(z), &BigInt::from(q), &pb);
    let mut t = pow_mod(&a, &BigInt::from(q), &pb);
    let mut x = pow_mod(&a, &BigInt::from(q.div_ceil(2)), &pb);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = &tt * &tt % &pb;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = &b * &b % &pb;
        }
        x = &x * &b % &pb;
        c = &b * &b % &pb;
        t = &t * &c % &pb;
        m = i;
    }
    Some(x)
}

/// Square root of a unit modulo p^n, lifted by Newton iteration from the root mod p.
pub fn sqrt_mod_prime_power(a: &BigInt, p: u64, n: u32) -> Option<BigInt> {
    let mut t = sqrt_mod_prime(a, p)?;
    if t.is_zero() {
        return None;
    }
    let pn = BigInt::from(p).pow(n);
    let mut k = 1;
    while k < n {
        k = (2 * k).min(n);
        let m = BigInt::from(p).pow(k);
        let inv = inv_mod(&(BigInt::from(2) * &t), &m)?;
        t = modp(&(&t - (&t * &t - a) * inv), &m);
    }
    Some(modp(&t, &pn))
}

/// The square root of Δ mod r^n whose residue lies in [1, (r-1)/2].
pub fn normalized_sqrt(delta: &BigInt, r: u64, n: u32) -> Option<BigInt> {
    let t = sqrt_mod_prime_power(delta, r, n)?;
    let rn = BigInt::from(r).pow(n);
    let res = (&t % BigInt::from(r)).to_u64()?;
    Some(if res <= (r - 1) / 2 { t } else { modp(&(-t), &rn) })
}

// ---------------------------------------------------------------- r-th powers

/// (a + b·√d)^e in Z[√d] / (m).
fn quad_pow(a: &BigInt, b: &BigInt, d: &BigInt, e: &BigInt, m: &BigInt) -> (BigInt, BigInt) {
    let mul = |x: &(BigInt, BigInt), y: &(BigInt, BigInt)| {
        (
            modp(&(&x.0 * &y.0 + d * &x.1 * &y.1), m),
            modp(&(&x.0 * &y.1 + &x.1 * &y.0), m),
        )
    };
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = (modp(a, m), modp(b, m));
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
    }
    acc
}

/// Whether the unit a + b·√Δ of the integers of Q_r(√Δ) is an r-th power, r ∤ Δ.
///
/// When Δ is a square mod r, √Δ is the root with residue in [1, (r-1)/2].
pub fn is_rth_power_unit(a: &BigInt, b: &BigInt, delta: &BigInt, r: u64) -> Result<bool> {
    if r < 3 || !is_prime_u64(r) {
        return domain(format!("{} is not an odd prime", r));
    }
    let rb = BigInt::from(r);
    if (delta % &rb).is_zero() {
        return domain("r divides Δ: ramified case");
    }
    let r2 = &rb * &rb;
    if legendre(delta, r) == 1 {
        let t = normalized_sqrt(delta, r, 2).expect("residue has a root");
        let w = modp(&(a + b * t), &r2);
        if (&w % &rb).is_zero() {
            return domain("not a unit");
        }
        Ok(pow_mod(&w, &BigInt::from(r - 1), &r2).is_one())
    } else {
        if (a % &rb).is_zero() && (b % &rb).is_zero() {
            return domain("not a unit");
        }
        let e = &r2 - 1;
        let (x, y) = quad_pow(a, b, delta, &e, &r2);
        Ok(x.is_one() && y.is_zero())
    }
}

/// Whether the nonzero residue x is an r-th power in F_q, for a prime r ≠ q.
pub fn is_rth_power_mod_prime(x: &BigInt, q: u64, r: u64) -> bool {
    let qm1 = q - 1;
    let g = qm1.gcd(&r);
    pow_mod(x, &BigInt::from(qm1 / g), &BigInt::from(q)).is_one()
}

/// Whether the nonzero residue x + y·√d (d a non-residue) is an r-th power in F_{q²}, r ≠ q.
pub fn is_rth_power_mod_prime_sq(x: &BigInt, y: &BigInt, d: &BigInt, q: u64, r: u64) -> bool {
    let big = q as u128 * q as u128 - 1;
    let g = if big.is_multiple_of(r as u128) { r as u128 } else { 1 };
    let e = BigInt::from(big / g);
    let (u, v) = quad_pow(x, y, d, &e, &BigInt::from(q));
    u.is_one() && v.is_zero()
}

/// Sign-aware integer power helper.
pub fn ipow(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}
