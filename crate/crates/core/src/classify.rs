//! Family instances, bad primes, reducibility of F over Q_q and the case rows.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    check_family_prime, check_odd_prime, inv_mod, ipow, is_rth_power_mod_prime,
    is_rth_power_mod_prime_sq, is_rth_power_unit, legendre, modp, odd_prime_factorization,
    sqrt_mod_prime_power, strip, val_int, Val,
};
use crate::error::{domain, internal, Condition, Error, Result};
use crate::poly::{build_f, IntPoly};

/// Base field of the local computation: Q_q or the completion of Q(ζ_r + ζ_r⁻¹) above q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Q,
    K,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Q => "Q",
            Field::K => "K",
        })
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field> {
        match s {
            "Q" | "q" => Ok(Field::Q),
            "K" | "k" => Ok(Field::K),
            _ => Err(Error::Parse(format!("unknown field {:?} (expected Q or K)", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInstance {
    pub r: u64,
    pub z: BigInt,
    pub s: BigInt,
    pub delta: BigInt,
    pub f: IntPoly,
}

impl FamilyInstance {
    pub fn genus(&self) -> u64 {
        (self.r - 1) / 2
    }
}

pub fn make_instance(r: u64, z: &BigInt, s: &BigInt) -> Result<FamilyInstance> {
    check_family_prime(r)?;
    if z.is_zero() {
        return domain("z = 0 is not allowed");
    }
    let delta = s * s - BigInt::from(4) * ipow(z, r);
    if delta.is_zero() {
        return Err(Error::SingularCurve);
    }
    let g = z.gcd(s);
    if !g.is_one() {
        for (q, _) in odd_prime_factorization(&g)?.odd {
            let vz = val_int(z, q).unwrap();
            let Some(vs) = val_int(s, q) else {
                return Err(Error::ConditionViolation { q, which: Condition::I });
            };
            if r * vz <= 2 * vs {
                return Err(Error::ConditionViolation { q, which: Condition::I });
            }
            if vs % r == 0 {
                return Err(Error::ConditionViolation { q, which: Condition::II });
            }
        }
    }
    let f = build_f(r, z, s)?;
    Ok(FamilyInstance { r, z: z.clone(), s: s.clone(), delta, f })
}

/// {r} together with the odd primes dividing Δ, ascending.
pub fn bad_odd_primes(inst: &FamilyInstance) -> Result<Vec<u64>> {
    let mut v = odd_prime_factorization(&inst.delta)?.odd_primes();
    v.push(inst.r);
    v.sort();
    v.dedup();
    Ok(v)
}

// ---------------------------------------------------------------- reducibility

/// F reducible over Q_q iff u = (s + √Δ)/2 is an r-th power in Q_q(√Δ); here q ≠ r.
fn reducible_away_from_r(inst: &FamilyInstance, q: u64) -> Result<bool> {
    let r = inst.r;
    let qb = BigInt::from(q);
    let two = BigInt::from(2);
    let (v, d1) = strip(&inst.delta, q);
    let vs = val_int(&inst.s, q);
    if v % 2 == 0 {
        let k = v / 2;
        if legendre(&d1, q) == 1 {
            // split: u is an element of Q_q
            let vz = val_int(&inst.z, q).unwrap();
            let n = (r * vz + 2 * k + 3) as u32;
            let qn = qb.pow(n);
            let t = sqrt_mod_prime_power(&d1, q, n).expect("residue has a root");
            let inv2 = inv_mod(&two, &qn).unwrap();
            let u = modp(&((&inst.s + qb.pow(k as u32) * t) * inv2), &qn);
            let Some(vu) = val_int(&u, q).filter(|&x| x < n as u64) else {
                return internal("precision exhausted in split reducibility test");
            };
            if vu % r != 0 {
                return Ok(false);
            }
            let unit = u / qb.pow(vu as u32);
            Ok(is_rth_power_mod_prime(&unit, q, r))
        } else {
            // unramified: u = s/2 + (q^k/2)·√Δ'
            let vu = vs.map_or(k, |x| x.min(k));
            if !vu.is_multiple_of(r) {
                return Ok(false);
            }
            let inv2 = inv_mod(&two, &qb).unwrap();
            // residue of u / q^vu
            let a = match vs {
                Some(x) if x == vu => modp(&(strip(&inst.s, q).1 * &inv2), &qb),
                _ => BigInt::zero(),
            };
            let b = if k == vu { inv2 } else { BigInt::zero() };
            Ok(is_rth_power_mod_prime_sq(&a, &b, &d1, q, r))
        }
    } else {
        // ramified: π² = qΔ', v_π(s/2) = 2v(s), v_π(q^k π) = 2k+1
        let k = (v - 1) / 2;
        let vpi_s = vs.map(|x| 2 * x);
        let vu = vpi_s.map_or(v, |x| x.min(v));
        if !vu.is_multiple_of(r) {
            return Ok(false);
        }
        let residue = match vs {
            Some(x) if 2 * x < v => {
                let (_, s1) = strip(&inst.s, q);
                let den = BigInt::from(2) * ipow(&d1, x);
                modp(&(s1 * inv_mod(&den, &qb).unwrap()), &qb)
            }
            _ => {
                let den = BigInt::from(2) * ipow(&d1, k);
                inv_mod(&den, &qb).unwrap()
            }
        };
        Ok(is_rth_power_mod_prime(&residue, q, r))
    }
}

/// q = r, r ∤ Δ: the unit test in Q_r(√Δ).
fn reducible_at_r_unramified(inst: &FamilyInstance) -> Result<bool> {
    let r = inst.r;
    let rb = BigInt::from(r);
    let r2 = &rb * &rb;
    let inv2 = inv_mod(&BigInt::from(2), &r2).unwrap();
    let a = modp(&(&inst.s * &inv2), &r2);
    let mut b = inv2.clone();
    if legendre(&inst.delta, r) == 1 {
        // of u and its conjugate, at least one is a unit, and they are r-th powers together
        let t = crate::arith::normalized_sqrt(&inst.delta, r, 2).unwrap();
        if modp(&(&a + &b * t), &rb).is_zero() {
            b = -b;
        }
    }
    is_rth_power_unit(&a, &b, &inst.delta, r)
}

pub fn is_f_reducible(inst: &FamilyInstance, q: u64) -> Result<bool> {
    check_odd_prime(q)?;
    let r = inst.r;
    let vd = val_int(&inst.delta, q).unwrap();
    let rs = val_int(&inst.s, q).is_none_or(|x| x > 0);
    if q == r {
        if vd == 0 {
            return reducible_at_r_unramified(inst);
        }
        return Ok(!rs && vd >= 3);
    }
    let alg = reducible_away_from_r(inst, q)?;
    if vd > 0 {
        let closed = !rs;
        if alg != closed {
            return internal(format!(
                "reducibility at q = {}: residue test says {}, q | Δ case analysis says {}",
                q, alg, closed
            ));
        }
    }
    Ok(alg)
}

// ---------------------------------------------------------------- rows

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowTag {
    #[serde(rename = "GOOD")]
    Good,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl RowTag {
    pub const BAD: [RowTag; 8] = [
        RowTag::R1,
        RowTag::R2,
        RowTag::R3,
        RowTag::R4,
        RowTag::R5,
        RowTag::R6,
        RowTag::R7,
        RowTag::R8,
    ];

    pub fn long_name(self) -> &'static str {
        match self {
            RowTag::Good => "GOOD",
            RowTag::R1 => "R1_qNotDividesRS",
            RowTag::R2 => "R2_qDividesS",
            RowTag::R3 => "R3_rNotDividesDelta_red",
            RowTag::R4 => "R4_rNotDividesDelta_irred",
            RowTag::R5 => "R5_rDividesS",
            RowTag::R6 => "R6_valDelta1",
            RowTag::R7 => "R7_valDelta2",
            RowTag::R8 => "R8_valDeltaGe3",
        }
    }

    /// What the table says about reducibility of F over Q_q, where it says anything.
    pub fn stated_reducibility(self) -> Option<bool> {
        match self {
            RowTag::R1 | RowTag::R3 | RowTag::R8 => Some(true),
            RowTag::R2 | RowTag::R4 | RowTag::R5 | RowTag::R6 | RowTag::R7 => Some(false),
            RowTag::Good => None,
        }
    }

    /// Rows that live at q = r.
    pub fn at_r(self) -> bool {
        !matches!(self, RowTag::Good | RowTag::R1 | RowTag::R2)
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowTag::Good => "GOOD",
            RowTag::R1 => "R1",
            RowTag::R2 => "R2",
            RowTag::R3 => "R3",
            RowTag::R4 => "R4",
            RowTag::R5 => "R5",
            RowTag::R6 => "R6",
            RowTag::R7 => "R7",
            RowTag::R8 => "R8",
        })
    }
}

impl std::str::FromStr for RowTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<RowTag> {
        let all = [RowTag::Good].into_iter().chain(RowTag::BAD);
        for t in all {
            if s.eq_ignore_ascii_case(&t.to_string()) || s == t.long_name() {
                return Ok(t);
            }
        }
        Err(Error::Parse(format!("unknown row {:?}", s)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseRow {
    pub tag: RowTag,
    pub q: u64,
    pub v_delta: u64,
    pub v_s: Val,
    pub reducible: bool,
}

pub fn classify_case(inst: &FamilyInstance, q: u64) -> Result<CaseRow> {
    check_odd_prime(q)?;
    let r = inst.r;
    let vd = val_int(&inst.delta, q).unwrap();
    let vs = val_int(&inst.s, q);
    let q_div_s = vs.is_none_or(|x| x > 0);
    let reducible = is_f_reducible(inst, q)?;
    let tag = if q != r {
        match (vd, q_div_s) {
            (0, _) => RowTag::Good,
            (_, false) => RowTag::R1,
            (_, true) => RowTag::R2,
        }
    } else if vd == 0 {
        if reducible {
            RowTag::R3
        } else {
            RowTag::R4
        }
    } else if q_div_s {
        RowTag::R5
    } else {
        match vd {
            1 => RowTag::R6,
            2 => RowTag::R7,
            _ => RowTag::R8,
        }
    };
    if let Some(stated) = tag.stated_reducibility() {
        if stated != reducible {
            return internal(format!(
                "row {} at q = {} states F {}, computed the opposite",
                tag,
                q,
                if stated { "reducible" } else { "irreducible" }
            ));
        }
    }
    if matches!(tag, RowTag::R2 | RowTag::R5) {
        // v_q(√Δ) = v_q(s) when q divides both
        let vs = vs.unwrap_or(u64::MAX);
        if vd != 2 * vs {
            return internal(format!("v_q(Δ) = {} but v_q(s) = {} at q = {}", vd, vs, q));
        }
    }
    let v_s = vs.map_or(Val::Infinity, |x| Val::int(x as i64));
    Ok(CaseRow { tag, q, v_delta: vd, v_s, reducible })
}
