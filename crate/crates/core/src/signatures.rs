//! Specializations of C(z, s) to the generalized Fermat equations
//! Aa^p + Bb^p = Cc^r, Aa^r + Bb^r = Cc^p, a^2 + Bb^r = Cc^p and Aa^q + Bb^r = Cc^p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{check_family_prime, check_odd_prime, ipow, is_prime_u64, odd_prime_factorization, val_int};
use crate::classify::{is_f_reducible, make_instance, FamilyInstance, Field, RowTag};
use crate::conductor::{conductor_exponent, odd_conductor, ExponentTable, FactoredIdeal, IdealEntry, local_from_row};
use crate::error::{domain, internal, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    /// (p, p, r)
    #[serde(rename = "ppr")]
    Ppr,
    /// (r, r, p)
    #[serde(rename = "rrp")]
    Rrp,
    /// (2, r, p)
    #[serde(rename = "2rp")]
    TwoRp,
    /// (q, r, p)
    #[serde(rename = "qrp")]
    Qrp,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Ppr => "ppr",
            Signature::Rrp => "rrp",
            Signature::TwoRp => "2rp",
            Signature::Qrp => "qrp",
        })
    }
}

impl std::str::FromStr for Signature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Signature> {
        match s.to_ascii_lowercase().as_str() {
            "ppr" => Ok(Signature::Ppr),
            "rrp" => Ok(Signature::Rrp),
            "2rp" | "tworp" => Ok(Signature::TwoRp),
            "qrp" => Ok(Signature::Qrp),
            _ => Err(Error::Parse(format!("unknown signature {:?} (expected ppr, rrp, 2rp or qrp)", s))),
        }
    }
}

/// Raw equation data. Any of ap, bp, cp may stand in for the corresponding
/// power with the variable exponent p; the instance is then formal.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfeInput {
    pub signature: Signature,
    pub r: u64,
    pub q: Option<u64>,
    pub p: Option<u64>,
    pub A: BigInt,
    pub B: BigInt,
    pub C: BigInt,
    pub a: Option<BigInt>,
    pub b: Option<BigInt>,
    pub c: Option<BigInt>,
    pub ap: Option<BigInt>,
    pub bp: Option<BigInt>,
    pub cp: Option<BigInt>,
}

impl GfeInput {
    #[allow(non_snake_case)]
    pub fn new(signature: Signature, r: u64, A: i64, B: i64, C: i64) -> GfeInput {
        GfeInput {
            signature,
            r,
            q: None,
            p: None,
            A: A.into(),
            B: B.into(),
            C: C.into(),
            a: None,
            b: None,
            c: None,
            ap: None,
            bp: None,
            cp: None,
        }
    }

    pub fn solution(mut self, a: i64, b: i64, c: i64) -> GfeInput {
        self.a = Some(a.into());
        self.b = Some(b.into());
        self.c = Some(c.into());
        self
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfeInstance {
    pub signature: Signature,
    pub r: u64,
    pub q: Option<u64>,
    pub p: Option<u64>,
    pub A: BigInt,
    pub B: BigInt,
    pub C: BigInt,
    /// a, b, c where known, else the supplied powers (same prime support).
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    /// The power of c appearing in the relation.
    pub c_power: BigInt,
    pub formal: bool,
    pub inst: FamilyInstance,
}

/// base^p, or the supplied stand-in.
fn power_slot(name: &str, base: &Option<BigInt>, stand_in: &Option<BigInt>, p: Option<u64>) -> Result<(BigInt, BigInt, bool)> {
    match (base, stand_in, p) {
        (Some(x), Some(v), Some(p)) => {
            if &ipow(x, p) != v {
                return Err(Error::RelationViolated(format!("{}^p = {} but {}p = {} was given", name, ipow(x, p), name, v)));
            }
            Ok((x.clone(), v.clone(), false))
        }
        (Some(x), Some(v), None) => Ok((x.clone(), v.clone(), true)),
        (None, Some(v), _) => Ok((v.clone(), v.clone(), true)),
        (Some(x), None, Some(p)) => Ok((x.clone(), ipow(x, p), false)),
        // units have the same odd power for every p
        (Some(x), None, None) if x.abs() <= BigInt::one() => Ok((x.clone(), x.clone(), false)),
        (Some(_), None, None) => domain(format!("{} needs the exponent p or a value for {}p", name, name)),
        (None, None, _) => domain(format!("missing {} (or {}p)", name, name)),
    }
}

fn need(name: &str, x: &Option<BigInt>) -> Result<BigInt> {
    x.clone().ok_or_else(|| Error::Domain(format!("missing {}", name)))
}

fn rth_power_free(n: &BigInt, r: u64) -> Result<bool> {
    let f = odd_prime_factorization(n)?;
    Ok(f.two_exponent < r && f.odd.iter().all(|&(_, e)| (e as u64) < r))
}

fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let s = n.sqrt();
        &s * &s == *n
    }
}

#[allow(non_snake_case)]
pub fn build_gfe(input: &GfeInput) -> Result<GfeInstance> {
    let r = input.r;
    check_family_prime(r)?;
    if let Some(p) = input.p {
        if p < 3 || !is_prime_u64(p) {
            return domain(format!("p = {} is not an odd prime", p));
        }
    }
    let (A, B, C) = (input.A.clone(), input.B.clone(), input.C.clone());
    if A.is_zero() || B.is_zero() || C.is_zero() {
        return domain("coefficients A, B, C must be nonzero");
    }
    let sig = input.signature;
    let m = (r - 1) / 2;
    let four = BigInt::from(4);
    let sixteen = BigInt::from(16);
    // (a, b, c) for the gcd test, the relation sides, (z, s) and the expected Δ
    let (a, b, c, c_power, formal, lhs, rhs, z, s, delta) = match sig {
        Signature::Ppr => {
            let (a, ap, fa) = power_slot("a", &input.a, &input.ap, input.p)?;
            let (b, bp, fb) = power_slot("b", &input.b, &input.bp, input.p)?;
            let c = need("c", &input.c)?;
            if input.cp.is_some() {
                return domain("cp has no meaning for signature ppr (c carries the fixed exponent r)");
            }
            let z = &C * &C * &c * &c;
            let s = BigInt::from(2) * ipow(&C, r - 1) * (&B * &bp - &A * &ap);
            let delta = -(&sixteen * &A * &B * ipow(&C, 2 * (r - 1)) * &ap * &bp);
            (a, b, c.clone(), ipow(&c, r), fa || fb, &A * &ap + &B * &bp, &C * ipow(&c, r), z, s, delta)
        }
        Signature::Rrp => {
            let a = need("a", &input.a)?;
            let b = need("b", &input.b)?;
            let (c, cp, fc) = power_slot("c", &input.c, &input.cp, input.p)?;
            let ab = &A * &B;
            let z = -(&ab * &a * &b);
            let s = ipow(&ab, m) * (&B * ipow(&b, r) - &A * ipow(&a, r));
            let delta = ipow(&ab, r - 1) * &C * &C * &cp * &cp;
            (a.clone(), b.clone(), c, cp.clone(), fc, &A * ipow(&a, r) + &B * ipow(&b, r), &C * &cp, z, s, delta)
        }
        Signature::TwoRp => {
            if !A.is_one() {
                return Err(Error::Unsupported("A ≠ 1 unsupported (condition (i) may fail)".into()));
            }
            let a = need("a", &input.a)?;
            let b = need("b", &input.b)?;
            let (c, cp, fc) = power_slot("c", &input.c, &input.cp, input.p)?;
            let z = -(&B * &b);
            let s = BigInt::from(2) * ipow(&B, m) * &a;
            let delta = &four * ipow(&B, r - 1) * &C * &cp;
            (a.clone(), b.clone(), c, cp.clone(), fc, &a * &a + &B * ipow(&b, r), &C * &cp, z, s, delta)
        }
        Signature::Qrp => {
            let q = input.q.ok_or_else(|| Error::Domain("signature qrp needs q".into()))?;
            check_odd_prime(q)?;
            if q == r {
                return domain("q and r must be distinct");
            }
            let a = need("a", &input.a)?;
            let b = need("b", &input.b)?;
            let (c, cp, fc) = power_slot("c", &input.c, &input.cp, input.p)?;
            let aq = ipow(&a, q);
            let z = &B * &B * &b * &b;
            let s = BigInt::from(2) * ipow(&B, r - 1) * (&B * ipow(&b, r) + BigInt::from(2) * &A * &aq);
            let delta = &sixteen * ipow(&B, 2 * (r - 1)) * &A * &C * &aq * &cp;
            (a.clone(), b.clone(), c, cp.clone(), fc, &A * &aq + &B * ipow(&b, r), &C * &cp, z, s, delta)
        }
    };
    if lhs != rhs {
        return Err(Error::RelationViolated(format!("{} ≠ {} for signature {}", lhs, rhs, sig)));
    }
    let g = (&A * &a).gcd(&(&B * &b)).gcd(&(&C * &c));
    if !g.is_one() {
        return Err(Error::GcdViolated(format!("gcd(Aa, Bb, Cc) = {}", g)));
    }
    let free = |name: &str, x: &BigInt| -> Result<()> {
        if rth_power_free(x, r)? {
            Ok(())
        } else {
            Err(Error::NormalizationViolated(format!("{} = {} is not free of {}-th powers", name, x, r)))
        }
    };
    match sig {
        Signature::Ppr => free("C", &C)?,
        Signature::Rrp => {
            free("A", &A)?;
            free("B", &B)?
        }
        Signature::TwoRp | Signature::Qrp => free("B", &B)?,
    }
    let inst = make_instance(r, &z, &s)?;
    if inst.delta != delta {
        return internal(format!("Δ = {} but the signature identity gives {}", inst.delta, delta));
    }
    Ok(GfeInstance { signature: sig, r, q: input.q, p: input.p, A, B, C, a, b, c, c_power, formal, inst })
}

impl GfeInstance {
    /// Whether the Jacobian is of GL₂-type over K, and on what grounds.
    pub fn gl2_type(&self) -> (bool, &'static str) {
        if is_square(&self.inst.z) {
            (true, "z is a square")
        } else if is_square(&self.inst.delta) {
            (true, "Δ is a square")
        } else if self.signature == Signature::TwoRp {
            (true, "per cited work")
        } else {
            (false, "neither z nor Δ is a square")
        }
    }
}

/// Values the ε table allows for this instance; several rows may apply at once.
#[allow(non_snake_case)]
fn epsilon_candidates(g: &GfeInstance, reducible: bool) -> Vec<u64> {
    let r = g.r;
    let v = |x: &BigInt| val_int(x, r).unwrap_or(u64::MAX);
    let d = |x: &BigInt| v(x) > 0;
    let (A, B, C) = (&g.A, &g.B, &g.C);
    let (a, b, c) = (&g.a, &g.b, &g.c);
    let unr = if reducible { 2 } else { 3 };
    let mut out = vec![];
    let mut push = |cond: bool, e: u64| {
        if cond {
            out.push(e)
        }
    };
    match g.signature {
        Signature::Ppr => {
            let ab = a * b;
            let vab = v(&(A * B));
            push(!d(&(A * B * C * &ab)), unr);
            push(d(&ab), 2);
            push(!d(&ab) && vab == 1, (r + 5) / 2);
            push(!d(&ab) && vab == 2, 3);
            push(!d(&ab) && vab >= 3 && vab != u64::MAX, 2);
            push(d(C), r + 2);
        }
        Signature::Rrp => {
            push(!d(&(A * B * C * c)), unr);
            push(d(&(A * B)), r + 2);
            push(!d(c) && v(C) == 1, 3);
            push(d(c) || v(C) >= 2, 2);
        }
        Signature::TwoRp => {
            push(!d(&(B * C * c)), unr);
            push(d(B), r + 2);
            push(!d(&(B * c)) && v(C) == 1, (r + 5) / 2);
            push(!d(&(B * c)) && v(C) == 2, 3);
            push(!d(B) && (d(c) || v(C) >= 3), 2);
        }
        Signature::Qrp => {}
    }
    out
}

/// Exponent at the prime above r of the attached 2-dimensional representation.
pub fn epsilon_r(g: &GfeInstance) -> Result<u64> {
    if g.signature == Signature::Qrp {
        return Err(Error::Unsupported("ε_r for signature qrp (only the wild part is available)".into()));
    }
    let r = g.r;
    let n = conductor_exponent(&g.inst, r, Field::K)?.total;
    if (2 * n) % (r - 1) != 0 {
        return internal(format!("2·{} is not divisible by r − 1 = {}", n, r - 1));
    }
    let eps = 2 * n / (r - 1);
    if !g.formal {
        let reducible = is_f_reducible(&g.inst, r)?;
        let allowed = epsilon_candidates(g, reducible);
        if !allowed.contains(&eps) {
            return internal(format!("ε_r = {} from the curve, table for {} allows {:?}", eps, g.signature, allowed));
        }
    }
    Ok(eps)
}

/// The exponents the product formula attaches to odd primes q ≠ r.
#[allow(non_snake_case)]
fn product_formula(g: &GfeInstance) -> Result<Vec<(u64, u64)>> {
    let primes = |x: &BigInt| -> Result<Vec<u64>> {
        if x.is_zero() {
            return domain("zero in the product formula");
        }
        Ok(odd_prime_factorization(x)?.odd_primes().into_iter().filter(|&q| q != g.r).collect())
    };
    let (A, B, C) = (&g.A, &g.B, &g.C);
    let (a, b, c) = (&g.a, &g.b, &g.c);
    let (once, twice) = match g.signature {
        Signature::Ppr => (primes(&(A * B * a * b))?, primes(C)?),
        Signature::Rrp => (primes(&(C * c))?, primes(&(A * B))?),
        Signature::TwoRp => {
            let bp = primes(B)?;
            (primes(&(C * c))?.into_iter().filter(|q| !bp.contains(q)).collect(), bp)
        }
        Signature::Qrp => return Err(Error::Unsupported("product formula for signature qrp".into())),
    };
    let mut out: Vec<(u64, u64)> = vec![];
    for (list, e) in [(once, 1), (twice, 2)] {
        for q in list {
            match out.iter_mut().find(|x| x.0 == q) {
                Some(x) => x.1 += e,
                None => out.push((q, e)),
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Odd conductor of the attached representation over K.
pub fn rho_conductor(g: &GfeInstance) -> Result<FactoredIdeal> {
    if g.signature == Signature::Qrp {
        return Err(Error::Unsupported("ρ-conductor for signature qrp (only the wild part is available)".into()));
    }
    let r = g.r;
    let curve = odd_conductor(&g.inst, Field::K)?;
    let mut entries = vec![];
    for e in curve.entries {
        for (name, x) in [("total", e.exp), ("wild", e.wild)] {
            if (2 * x) % (r - 1) != 0 {
                return internal(format!("{} exponent {} at q = {} does not rescale to an integer", name, x, e.q));
            }
        }
        let exp = 2 * e.exp / (r - 1);
        if exp == 0 {
            continue;
        }
        let wild = 2 * e.wild / (r - 1);
        entries.push(IdealEntry { exp, wild, tame: exp - wild, ..e });
    }
    let eps = epsilon_r(g)?;
    let at_r = entries.iter().find(|e| e.q == r).map_or(0, |e| e.exp);
    if at_r != eps {
        return internal(format!("exponent {} at r differs from ε_r = {}", at_r, eps));
    }
    let got: Vec<(u64, u64)> = entries.iter().filter(|e| e.q != r).map(|e| (e.q, e.exp)).collect();
    let want = product_formula(g)?;
    if got != want {
        return internal(format!("ρ-conductor away from r is {:?}, the product formula gives {:?}", got, want));
    }
    Ok(FactoredIdeal { field: Field::K, entries })
}

/// Wild exponent at a prime above r for signature qrp, with the branch of the case list it fell in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgmWild {
    pub prime: u64,
    pub wild: u64,
    pub row: RowTag,
    pub branch: Option<String>,
}

/// Branch of the case list, in stated order, and its value.
fn hgm_case_list(inst: &FamilyInstance, b_coef: &BigInt, reducible: bool) -> Option<(&'static str, u64)> {
    let r = inst.r;
    if reducible {
        return Some(("reducible", 0));
    }
    let vd = val_int(&inst.delta, r).unwrap();
    if vd == 1 {
        return Some(("v_r(Δ) = 1", r.div_ceil(2)));
    }
    if vd == 0 || vd == 2 {
        return Some(("v_r(Δ) ∈ {0, 2}", 1));
    }
    if val_int(b_coef, r).is_some_and(|x| x > 0) {
        return Some(("r | B", r));
    }
    None
}

/// Wild conductor exponent at r of the HGM representation for signature qrp.
pub fn hgm_wild_conductor(g: &GfeInstance) -> Result<HgmWild> {
    if g.signature != Signature::Qrp {
        return domain("the HGM wild exponent needs signature qrp");
    }
    hgm_from(&g.inst, &g.B)
}

fn hgm_from(inst: &FamilyInstance, b_coef: &BigInt) -> Result<HgmWild> {
    let r = inst.r;
    let row = crate::classify::classify_case(inst, r)?;
    let lc = local_from_row(&row, r, Field::K, &ExponentTable::standard())?;
    if (2 * lc.wild) % (r - 1) != 0 {
        return internal(format!("wild exponent {} over K does not rescale", lc.wild));
    }
    let wild = 2 * lc.wild / (r - 1);
    let branch = hgm_case_list(inst, b_coef, row.reducible);
    if let Some((_, w)) = branch {
        if w != wild {
            return internal(format!("wild exponent {} in row {}, case list gives {}", wild, row.tag, w));
        }
    }
    let branch = branch.map(|(b, _)| b.to_string());
    Ok(HgmWild { prime: r, wild, row: row.tag, branch })
}

/// The same exponent at q, after interchanging q with r, A with B and a with b.
pub fn hgm_wild_conductor_at_q(g: &GfeInstance) -> Result<HgmWild> {
    if g.signature != Signature::Qrp {
        return domain("the HGM wild exponent needs signature qrp");
    }
    let q = g.q.expect("qrp instances carry q");
    check_family_prime(q)?;
    let swapped = GfeInput {
        signature: Signature::Qrp,
        r: q,
        q: Some(g.r),
        p: None,
        A: g.B.clone(),
        B: g.A.clone(),
        C: g.C.clone(),
        a: Some(g.b.clone()),
        b: Some(g.a.clone()),
        c: None,
        cp: Some(g.c_power.clone()),
        ap: None,
        bp: None,
    };
    let h = build_gfe(&swapped)?;
    hgm_from(&h.inst, &h.B)
}

/// Everything the `signature` command reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub signature: Signature,
    pub r: u64,
    pub z: String,
    pub s: String,
    pub delta: String,
    pub formal: bool,
    pub gl2_type: bool,
    pub gl2_basis: String,
    pub reducible_at_r: bool,
    pub epsilon_r: Option<u64>,
    pub rho_conductor: Option<FactoredIdeal>,
    pub hgm_wild: Vec<HgmWild>,
    pub note: Option<String>,
}

pub fn signature_report(g: &GfeInstance) -> Result<SignatureReport> {
    let (gl2_type, basis) = g.gl2_type();
    match g.signature {
        Signature::Ppr if !is_square(&g.inst.z) => return internal("z is not a square for signature ppr"),
        Signature::Rrp if !is_square(&g.inst.delta) => return internal("Δ is not a square for signature rrp"),
        _ => {}
    }
    let reducible_at_r = is_f_reducible(&g.inst, g.r)?;
    let (epsilon_r, rho, hgm, note) = if g.signature == Signature::Qrp {
        let mut hgm = vec![hgm_wild_conductor(g)?];
        let q = g.q.unwrap();
        if q >= 5 {
            hgm.push(hgm_wild_conductor_at_q(g)?);
        }
        (None, None, hgm, Some("only wild exponents at the primes above q and r are computed".to_string()))
    } else {
        (Some(epsilon_r(g)?), Some(rho_conductor(g)?), vec![], None)
    };
    Ok(SignatureReport {
        signature: g.signature,
        r: g.r,
        z: g.inst.z.to_string(),
        s: g.inst.s.to_string(),
        delta: g.inst.delta.to_string(),
        formal: g.formal,
        gl2_type,
        gl2_basis: basis.to_string(),
        reducible_at_r,
        epsilon_r,
        rho_conductor: rho,
        hgm_wild: hgm,
        note,
    })
}
