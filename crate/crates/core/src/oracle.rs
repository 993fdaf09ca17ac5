//! Independent q-adic oracles: root-difference valuations and Q_q-rational roots.
//!
//! Only `arith` and `poly` are used here; nothing from the classification side.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{check_odd_prime, modp, val_int, Val};
use crate::error::{domain, Result};
use crate::poly::{build_f, difference_poly, discriminant, newton_polygon, IntPoly};

/// Multiset of valuations, distinct and ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValMultiset {
    pub entries: Vec<(Val, u64)>,
}

impl ValMultiset {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Val, u64)>) -> ValMultiset {
        let mut v: Vec<(Val, u64)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort();
        let mut entries: Vec<(Val, u64)> = Vec::new();
        for (val, m) in v {
            match entries.last_mut() {
                Some(last) if last.0 == val => last.1 += m,
                _ => entries.push((val, m)),
            }
        }
        ValMultiset { entries }
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Σ valuation·multiplicity.
    pub fn weighted_sum(&self) -> Val {
        self.entries
            .iter()
            .fold(Val::zero(), |acc, (v, m)| acc + v.scale(&crate::arith::rat(*m as i64, 1)))
    }
}

/// {v_q(γ_i − γ_j) : i ≠ j} for the roots of F, read off a Newton polygon.
pub fn root_difference_valuations(r: u64, z: &BigInt, s: &BigInt, q: u64) -> Result<ValMultiset> {
    check_odd_prime(q)?;
    let f = build_f(r, z, s)?;
    let d = difference_poly(&f)?;
    let np = newton_polygon(&d, q)?;
    Ok(ValMultiset::from_pairs(np.root_valuations()))
}

// ---------------------------------------------------------------- polynomials mod q

fn mulm(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn powm(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, b, q);
        }
        b = mulm(b, b, q);
        e >>= 1;
    }
    acc
}

fn invm(a: u64, q: u64) -> u64 {
    powm(a, q - 2, q)
}

fn trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn reduce(f: &IntPoly, q: u64) -> Vec<u64> {
    let qb = BigInt::from(q);
    trim(f.coeffs().iter().map(|c| modp(c, &qb).to_u64().unwrap()).collect())
}

fn eval_m(p: &[u64], x: u64, q: u64) -> u64 {
    p.iter().rev().fold(0, |acc, &c| (mulm(acc, x, q) + c) % q)
}

fn sub_m(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + q - y) % q
            })
            .collect(),
    )
}

fn mul_m(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + mulm(x, y, q)) % q;
        }
    }
    trim(c)
}

fn divrem_m(a: &[u64], b: &[u64], q: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let db = b.len() - 1;
    let inv = invm(*b.last().unwrap(), q);
    let mut quo = vec![0u64; r.len() - db];
    for i in (0..quo.len()).rev() {
        let c = mulm(r[i + db], inv, q);
        quo[i] = c;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + q - mulm(c, y, q)) % q;
            }
        }
    }
    (trim(quo), trim(r))
}

fn gcd_m(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem_m(&a, &b, q);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = invm(l, q);
        a.iter_mut().for_each(|c| *c = mulm(*c, inv, q));
    }
    a
}

/// base^e mod (modulus, q)
fn powmod_m(base: &[u64], mut e: u64, modulus: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = divrem_m(base, modulus, q).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem_m(&mul_m(&acc, &b, q), modulus, q).1;
        }
        b = divrem_m(&mul_m(&b, &b, q), modulus, q).1;
        e >>= 1;
    }
    acc
}

const BRUTE_FORCE_LIMIT: u64 = 5000;

/// Split a monic product of distinct linear factors into its roots.
fn split_linear(h: Vec<u64>, q: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    match h.len() {
        0 | 1 => {}
        2 => out.push((q - mulm(h[0], invm(h[1], q), q)) % q),
        _ => loop {
            let a = rng.gen_range(0..q);
            let w = powmod_m(&[a, 1], (q - 1) / 2, &h, q);
            let g = gcd_m(&h, &sub_m(&w, &[1], q), q);
            if g.len() > 1 && g.len() < h.len() {
                let (other, _) = divrem_m(&h, &g, q);
                split_linear(g, q, rng, out);
                split_linear(other, q, rng, out);
                return;
            }
        },
    }
}

/// Distinct roots of f mod q, ascending. f must not vanish mod q.
pub fn roots_mod_q(f: &IntPoly, q: u64) -> Vec<u64> {
    let p = reduce(f, q);
    assert!(!p.is_empty(), "roots_mod_q: polynomial vanishes mod q");
    if p.len() == 1 {
        return vec![];
    }
    let mut out = Vec::new();
    if q <= BRUTE_FORCE_LIMIT {
        out = (0..q).filter(|&a| eval_m(&p, a, q) == 0).collect();
    } else {
        let xq = powmod_m(&[0, 1], q, &p, q);
        let h = gcd_m(&p, &sub_m(&xq, &[0, 1], q), q);
        let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_c0de);
        split_linear(h, q, &mut rng, &mut out);
        out.sort();
    }
    out
}

// ---------------------------------------------------------------- Hensel search

/// Whether the monic squarefree integer polynomial f has a root in Z_q.
pub fn has_qadic_root(f: &IntPoly, q: u64) -> Result<bool> {
    check_odd_prime(q)?;
    if !f.is_monic() {
        return domain("has_qadic_root needs a monic polynomial");
    }
    if f.degree() == 0 {
        return Ok(false);
    }
    if f.degree() == 1 {
        return Ok(true);
    }
    let disc = discriminant(f)?;
    if disc.is_zero() {
        return domain("has_qadic_root needs a squarefree polynomial");
    }
    let vd = val_int(&disc, q).unwrap();
    // Past precision v(disc) every branch that holds a root passes Hensel's test,
    // so a branch that reaches this depth unresolved holds none.
    let depth = 2 * vd + 2;
    let search = Search { f, fp: f.derivative(), q, depth };
    Ok(search.run(f, &BigInt::zero(), 0))
}

struct Search<'a> {
    f: &'a IntPoly,
    fp: IntPoly,
    q: u64,
    depth: u64,
}

impl Search<'_> {
    /// g(y) = f(x0 + q^k y) / q^c, primitive at q.
    fn run(&self, g: &IntPoly, x0: &BigInt, k: u64) -> bool {
        let qb = BigInt::from(self.q);
        let scale = qb.pow(k as u32);
        for a in roots_mod_q(g, self.q) {
            let a = BigInt::from(a);
            let x = x0 + &scale * &a;
            let fx = self.f.eval(&x);
            if fx.is_zero() {
                return true;
            }
            let fpx = self.fp.eval(&x);
            if let (Some(vf), Some(vp)) = (val_int(&fx, self.q), val_int(&fpx, self.q)) {
                if vf > 2 * vp {
                    return true;
                }
            }
            if k + 1 >= self.depth {
                continue;
            }
            let h = g.compose_linear(&a, &qb);
            let c = h.content_val(self.q).unwrap_or(0);
            let h = h.div_exact(&qb.pow(c as u32)).expect("content divides");
            if self.run(&h, &x, k + 1) {
                return true;
            }
        }
        false
    }
}
