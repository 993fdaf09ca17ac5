//! Dense integer polynomials, the family polynomial F, resultants and Newton polygons.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{check_family_prime, check_odd_prime, ipow, val_int, Val};
use crate::error::{domain, internal, Result};

/// Integer polynomial, `coeffs[i]` is the coefficient of x^i, no leading zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> IntPoly {
        IntPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigInt) -> IntPoly {
        IntPoly::new(vec![c])
    }

    /// The polynomial x.
    pub fn x() -> IntPoly {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        IntPoly::new(c)
    }

    /// p(a + b·x).
    pub fn compose_linear(&self, a: &BigInt, b: &BigInt) -> IntPoly {
        let lin = IntPoly::new(vec![a.clone(), b.clone()]);
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &IntPoly::constant(c.clone());
        }
        acc
    }

    /// p(-x).
    pub fn negate_var(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Exact division of every coefficient; None if some division is inexact.
    pub fn div_exact(&self, k: &BigInt) -> Option<IntPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(IntPoly::new(out))
    }

    /// Minimum q-adic valuation over the coefficients; None for the zero polynomial.
    pub fn content_val(&self, q: u64) -> Option<u64> {
        self.coeffs.iter().filter_map(|c| val_int(c, q)).min()
    }
}

impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            match i {
                0 => write!(f, "{}", a)?,
                _ => {
                    if !unit {
                        write!(f, "{}", a)?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- the family

/// Minimal polynomial of ζ_r + ζ_r⁻¹.
pub fn minpoly_omega(r: u64) -> Result<IntPoly> {
    check_family_prime(r)?;
    let m = (r - 1) / 2;
    // x^k + x^-k = T_k(x + 1/x)
    let x = IntPoly::x();
    let mut prev = IntPoly::from_i64(&[2]);
    let mut cur = x.clone();
    for _ in 1..r {
        let next = &(&x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    // T_r is odd: T_r(x) = x·P(x²), and T_r(x) = (-1)^m·x·h(2 - x²).
    let p = IntPoly::new(cur.coeffs().iter().skip(1).step_by(2).cloned().collect());
    let mut h = p.compose_linear(&BigInt::from(2), &BigInt::from(-1));
    if m % 2 == 1 {
        h = h.scale(&BigInt::from(-1));
    }
    if !h.is_monic() || h.degree() as u64 != m {
        return internal("minpoly_omega: not monic of degree (r-1)/2");
    }
    Ok(h)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// F(x) = (-z)^((r-1)/2)·x·h(2 - x²/z) + s, expanded over the integers.
pub fn build_f(r: u64, z: &BigInt, s: &BigInt) -> Result<IntPoly> {
    check_family_prime(r)?;
    if z.is_zero() {
        return domain("z = 0: F is undefined");
    }
    let h = minpoly_omega(r)?;
    let m = (r - 1) / 2;
    let sign = if m.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let mut coeffs = vec![BigInt::zero(); r as usize + 1];
    for j in 0..=m {
        let mut acc = BigInt::zero();
        for i in j..=m {
            let hi = h.coeff(i as usize);
            if hi.is_zero() {
                continue;
            }
            acc += hi * binomial(i, j) * (BigInt::one() << (i - j));
        }
        if j % 2 == 1 {
            acc = -acc;
        }
        coeffs[2 * j as usize + 1] = &sign * acc * ipow(z, m - j);
    }
    coeffs[0] = s.clone();
    let f = IntPoly::new(coeffs);
    if !f.is_monic() || f.degree() as u64 != r {
        return internal("build_f: result not monic of degree r");
    }
    Ok(f)
}

// ---------------------------------------------------------------- resultants

/// Determinant by fraction-free Bareiss elimination.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Res(f, g) as the Sylvester determinant, f's rows first.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> Result<BigInt> {
    if f.is_zero() || g.is_zero() {
        return domain("resultant of the zero polynomial");
    }
    let (m, n) = (f.degree(), g.degree());
    if m == 0 {
        return Ok(ipow(&f.leading(), n as u64));
    }
    if n == 0 {
        return Ok(ipow(&g.leading(), m as u64));
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (poly, deg, count) in [(f, m, n), (g, n, m)] {
        for i in 0..count {
            let mut row = vec![BigInt::zero(); size];
            for k in 0..=deg {
                row[i + k] = poly.coeff(deg - k);
            }
            rows.push(row);
        }
    }
    Ok(det_bareiss(rows))
}

/// disc(f) = (-1)^(d(d-1)/2)·Res(f, f') for monic f of degree d >= 2.
pub fn discriminant(f: &IntPoly) -> Result<BigInt> {
    if !f.is_monic() {
        return domain("discriminant needs a monic polynomial");
    }
    let d = f.degree();
    if d < 2 {
        return domain("discriminant needs degree >= 2");
    }
    let res = resultant(f, &f.derivative())?;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -res } else { res })
}

/// Power sums p_1..p_n of the roots of a monic polynomial (Newton's identities).
fn power_sums(f: &IntPoly, n: usize) -> Vec<BigInt> {
    let d = f.degree();
    // e-coefficients: f = x^d + c_1 x^{d-1} + ... + c_d
    let c = |i: usize| if i <= d { f.coeff(d - i) } else { BigInt::zero() };
    let mut p = vec![BigInt::from(d)];
    for k in 1..=n {
        let mut acc = if k <= d { c(k) * BigInt::from(k) } else { BigInt::zero() };
        for i in 1..k.min(d + 1) {
            acc += c(i) * &p[k - i];
        }
        p.push(-acc);
    }
    p
}

/// Monic polynomial of degree n with the given power sums p_0..p_n (exact division).
fn from_power_sums(p: &[BigInt], n: usize) -> Result<IntPoly> {
    // x^n + c_1 x^{n-1} + ... ; k c_k = -(p_k + sum_{i<k} c_i p_{k-i})
    let mut c = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = p[k].clone();
        for i in 1..k {
            acc += &c[i] * &p[k - i];
        }
        let (q, rem) = acc.div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return internal("power sums do not come from an integer polynomial");
        }
        c.push(-q);
    }
    c.reverse();
    Ok(IntPoly::new(c))
}

/// Monic polynomial whose roots are the differences γ_i − γ_j (i ≠ j) of the roots of f.
pub fn difference_poly(f: &IntPoly) -> Result<IntPoly> {
    let d = f.degree();
    if discriminant(f)?.is_zero() {
        return domain("difference_poly needs a squarefree polynomial");
    }
    let n = d * (d - 1);
    let p = power_sums(f, n);
    // sum over all ordered pairs (i,j) of (γ_i − γ_j)^k, the diagonal contributes 0 for k >= 1
    let mut big = vec![BigInt::from(n)];
    let mut binom = vec![BigInt::one()];
    for k in 1..=n {
        let mut next = vec![BigInt::one(); k + 1];
        for i in 1..k {
            next[i] = &binom[i - 1] + &binom[i];
        }
        binom = next;
        let mut acc = BigInt::zero();
        for (mi, b) in binom.iter().enumerate() {
            let term = b * &p[mi] * &p[k - mi];
            if (k - mi) % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        big.push(acc);
    }
    from_power_sums(&big, n)
}

// ---------------------------------------------------------------- Newton polygons

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: BigRational,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Slopes strictly increasing.
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// (root valuation, multiplicity), ascending.
    pub fn root_valuations(&self) -> Vec<(Val, u64)> {
        let mut v: Vec<(Val, u64)> = self
            .segments
            .iter()
            .map(|s| (Val::Finite(-s.slope.clone()), s.length))
            .collect();
        v.reverse();
        v
    }
}

pub fn newton_polygon(f: &IntPoly, q: u64) -> Result<NewtonPolygon> {
    check_odd_prime(q)?;
    if f.is_zero() {
        return domain("Newton polygon of the zero polynomial");
    }
    let pts: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| val_int(c, q).map(|v| (i as i64, v as i64)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            slope: BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(w[1].0 - w[0].0)),
            length: (w[1].0 - w[0].0) as u64,
        })
        .collect();
    Ok(NewtonPolygon { segments })
}
