use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use freycond::arith::{ipow, is_rth_power_unit, k_splitting, legendre, normalized_sqrt, val_int, vq, Val};
use freycond::classify::{bad_odd_primes, classify_case, is_f_reducible, make_instance, FamilyInstance, Field, RowTag};
use freycond::cluster::{cluster_picture, inertia_profile, k_scale, tame_conductor_general};
use freycond::conductor::{conductor_exponent, ExponentTable};
use freycond::oracle::{has_qadic_root, root_difference_valuations, ValMultiset};
use freycond::poly::{build_f, difference_poly, discriminant, newton_polygon, IntPoly};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn family_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![5u64, 7, 11, 13])
}

fn small_instance(r: u64) -> impl Strategy<Value = Option<FamilyInstance>> {
    (1i64..60, any::<bool>(), -3000i64..3000).prop_map(move |(z, neg, s)| {
        let z = if neg { -z } else { z };
        make_instance(r, &big(z), &big(s)).ok()
    })
}

/// Dickson recurrence D_0 = 2, D_1 = x, D_n = x·D_{n−1} − z·D_{n−2}.
fn dickson(r: u64, z: &BigInt) -> IntPoly {
    let x = IntPoly::x();
    let mut prev = IntPoly::constant(big(2));
    let mut cur = x.clone();
    for _ in 1..r {
        let next = &(&x * &cur) - &prev.scale(z);
        prev = cur;
        cur = next;
    }
    cur
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn valuation_is_additive(n in 1i64..1_000_000, m in 1i64..1_000_000, q in prop::sample::select(vec![3u64, 5, 7, 11])) {
        let a = vq(&big(n), q).unwrap();
        let b = vq(&big(m), q).unwrap();
        prop_assert_eq!(vq(&(big(n) * big(m)), q).unwrap(), a + b);
    }

    #[test]
    fn splitting_degrees_multiply_out(r in family_prime(), q in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 101, 1009])) {
        let k = k_splitting(q, r).unwrap();
        prop_assert_eq!(k.e * k.f * k.g, (r - 1) / 2);
    }

    #[test]
    fn build_f_is_dickson_plus_s(r in family_prime(), z in -40i64..40, s in -500i64..500) {
        prop_assume!(z != 0);
        let f = build_f(r, &big(z), &big(s)).unwrap();
        let want = &dickson(r, &big(z)) + &IntPoly::constant(big(s));
        prop_assert_eq!(f.degree() as u64, r);
        prop_assert!(f.is_monic());
        prop_assert_eq!(f, want);
    }

    #[test]
    fn discriminant_identity(inst in family_prime().prop_flat_map(small_instance)) {
        if let Some(inst) = inst {
            let m = (inst.r - 1) / 2;
            let sign = if m % 2 == 0 { big(1) } else { big(-1) };
            let want = sign * ipow(&big(inst.r as i64), inst.r) * ipow(&inst.delta, m);
            prop_assert_eq!(discriminant(&inst.f).unwrap(), want);
        }
    }

    #[test]
    fn newton_polygon_slopes_sum_to_constant_valuation(coeffs in prop::collection::vec(-200i64..200, 2..8), q in prop::sample::select(vec![3u64, 5, 7])) {
        let mut c = coeffs.clone();
        c.push(1);
        let f = IntPoly::from_i64(&c);
        prop_assume!(!f.coeff(0).is_zero());
        let np = newton_polygon(&f, q).unwrap();
        let total = np.root_valuations().into_iter().fold(Val::zero(), |acc, (v, k)| acc + v.scale(&num_rational::BigRational::from_integer(big(k as i64))));
        prop_assert_eq!(total, Val::int(val_int(&f.coeff(0), q).unwrap() as i64));
    }

    #[test]
    fn difference_poly_is_even(r in prop::sample::select(vec![5u64, 7]), z in 1i64..20, s in 1i64..200) {
        let f = build_f(r, &big(z), &big(s)).unwrap();
        let d = difference_poly(&f).unwrap();
        prop_assert_eq!(d.negate_var(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    /// Pair valuations sum to v_q(disc F), and match the picture.
    #[test]
    fn oracle_matches_picture(inst in prop::sample::select(vec![5u64, 7]).prop_flat_map(small_instance)) {
        let Some(inst) = inst else { return Ok(()) };
        let Ok(primes) = bad_odd_primes(&inst) else { return Ok(()) };
        let disc = discriminant(&inst.f).unwrap();
        for q in primes {
            let oracle = root_difference_valuations(inst.r, &inst.z, &inst.s, q).unwrap();
            prop_assert_eq!(oracle.weighted_sum(), Val::int(val_int(&disc, q).unwrap() as i64));
            let pic = cluster_picture(&inst, q, Field::Q).unwrap();
            prop_assert_eq!(ValMultiset::from_pairs(pic.pair_valuations()), oracle);
            let k = cluster_picture(&inst, q, Field::K).unwrap();
            prop_assert_eq!(k, pic.scaled(&k_scale(inst.r, q)));
        }
    }

    #[test]
    fn row_invariants(inst in prop::sample::select(vec![5u64, 7]).prop_flat_map(small_instance)) {
        let Some(inst) = inst else { return Ok(()) };
        let Ok(primes) = bad_odd_primes(&inst) else { return Ok(()) };
        let r = inst.r;
        let m = (r - 1) / 2;
        for q in primes {
            let row = classify_case(&inst, q).unwrap();
            prop_assert_eq!(is_f_reducible(&inst, q).unwrap(), has_qadic_root(&inst.f, q).unwrap());
            if let Some(stated) = row.tag.stated_reducibility() {
                prop_assert_eq!(stated, row.reducible);
            }
            let vs = val_int(&inst.s, q);
            if row.v_delta > 0 && vs.is_none_or(|v| v > 0) {
                prop_assert_eq!(Some(row.v_delta), vs.map(|v| 2 * v));
            }
            if q == r && row.v_delta >= 2 && vs == Some(0) {
                let x = ipow(&inst.s, r) - ipow(&big(2), r - 1) * &inst.s;
                prop_assert!(val_int(&x, r).is_none_or(|v| v >= 2));
            }
            for field in [Field::Q, Field::K] {
                let lc = conductor_exponent(&inst, q, field).unwrap();
                let pic = cluster_picture(&inst, q, field).unwrap();
                let prof = inertia_profile(&inst, q, field).unwrap();
                prop_assert_eq!(tame_conductor_general(&pic, &Val::zero(), &prof, m).unwrap(), lc.tame);
                prop_assert!(lc.total >= m);
                if field == Field::K {
                    prop_assert_eq!((2 * lc.total) % (r - 1), 0);
                }
                if row.tag == RowTag::R1 {
                    prop_assert_eq!(lc.total, pic.twins().len() as u64);
                }
            }
        }
    }

    /// F(δx) for (δ²z, δ^r s) is δ^r times F for (z, s).
    #[test]
    fn twist_scaling(r in family_prime(), d in 1i64..6, z in -30i64..30, s in -300i64..300) {
        prop_assume!(z != 0);
        let (d, z, s) = (big(d), big(z), big(s));
        let g = build_f(r, &(&d * &d * &z), &(ipow(&d, r) * &s)).unwrap();
        let lhs = g.compose_linear(&BigInt::zero(), &d);
        let rhs = build_f(r, &z, &s).unwrap().scale(&ipow(&d, r));
        prop_assert_eq!(lhs, rhs);
    }

    /// With A = B = C = 1 the (r, r, p) curve has the root a − b.
    #[test]
    fn rrp_root(r in prop::sample::select(vec![5u64, 7]), a in -30i64..30, b in -30i64..30) {
        prop_assume!(a != 0 && b != 0 && a != -b && num_integer::gcd(a, b) == 1);
        let (a, b) = (big(a), big(b));
        let z = -(&a * &b);
        let s = ipow(&b, r) - ipow(&a, r);
        let f = build_f(r, &z, &s).unwrap();
        prop_assert!(f.eval(&(&a - &b)).is_zero());
    }
}

/// r-th powers of units mod r³, by brute force.
fn rth_powers_split(r: u64) -> HashSet<u64> {
    let r3 = r * r * r;
    (1..r * r).filter(|x| x % r != 0).map(|x| freycond::arith::pow_mod_u64(x, r, r3)).collect()
}

fn quad_mul(x: (u64, u64), y: (u64, u64), d: u64, m: u64) -> (u64, u64) {
    ((x.0 * y.0 + d * x.1 % m * y.1) % m, (x.0 * y.1 + x.1 * y.0) % m)
}

fn rth_powers_unramified(r: u64, d: u64) -> HashSet<(u64, u64)> {
    let r2 = r * r;
    let r3 = r2 * r;
    let mut out = HashSet::new();
    for x in 0..r2 {
        for y in 0..r2 {
            if x % r == 0 && y % r == 0 {
                continue;
            }
            let mut acc = (1, 0);
            for _ in 0..r {
                acc = quad_mul(acc, (x, y), d, r3);
            }
            out.insert(acc);
        }
    }
    out
}

#[test]
fn rth_power_unit_matches_exhaustive_search() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for r in [5u64, 7] {
        let r3 = (r * r * r) as i64;
        let split = rth_powers_split(r);
        // a residue and a non-residue mod r
        let dsq = (1..r as i64).find(|&d| legendre(&big(d), r) == 1 && d != 1).unwrap_or(1);
        let dns = (1..r as i64).find(|&d| legendre(&big(d), r) == -1).unwrap();
        let unram = rth_powers_unramified(r, dns as u64);
        let mut checked = 0;
        while checked < 200 {
            let a = rng.gen_range(0..r3);
            let b = rng.gen_range(0..r3);
            // split: Δ ≡ dsq has a square root t mod r^3; a + b·t must be a unit
            let delta = big(dsq + r as i64 * rng.gen_range(0..r as i64 * r as i64));
            let t = normalized_sqrt(&delta, r, 3).unwrap();
            let w = freycond::arith::modp(&(big(a) + big(b) * &t), &big(r3));
            if (&w % big(r as i64)).is_zero() {
                continue;
            }
            let want = split.contains(&w.try_into().unwrap());
            assert_eq!(is_rth_power_unit(&big(a), &big(b), &delta, r).unwrap(), want, "split r={} a={} b={}", r, a, b);
            if a % r as i64 != 0 || b % r as i64 != 0 {
                let want = unram.contains(&(a as u64, b as u64));
                assert_eq!(is_rth_power_unit(&big(a), &big(b), &big(dns), r).unwrap(), want, "unramified r={} a={} b={}", r, a, b);
            }
            checked += 1;
        }
    }
}

#[test]
fn table_identities_hold_symbolically() {
    let t = ExponentTable::standard();
    for r in [5u64, 7, 11, 13] {
        let m = (r - 1) / 2;
        assert_eq!(t.total(Field::Q, RowTag::R5, r), (r - 1) + r);
        assert_eq!(t.total(Field::K, RowTag::R5, r), (r - 1) + r * m);
        for row in RowTag::BAD {
            let kt = t.total(Field::K, row, r) - t.wild(Field::K, row, r);
            let qt = t.total(Field::Q, row, r) - t.wild(Field::Q, row, r);
            assert_eq!(kt, qt, "tame parts differ in row {} for r = {}", row, r);
            assert_eq!(t.wild(Field::K, row, r), m * t.wild(Field::Q, row, r));
            assert_eq!((2 * t.total(Field::K, row, r)) % (r - 1), 0);
            assert!(t.total(Field::Q, row, r) >= m);
        }
    }
}

/// Every qrp instance lands in one branch of the case list, with the table's exponent.
#[test]
fn hgm_branch_always_found() {
    use freycond::signatures::{build_gfe, hgm_wild_conductor, hgm_wild_conductor_at_q, GfeInput, Signature};
    let mut seen = HashSet::new();
    let mut built = 0;
    for (r, q) in [(5u64, 7u64), (7, 5), (5, 11)] {
        for aa in 1i64..12 {
            for bb in 1i64..12 {
                for (a, b) in [(1i64, 1i64), (1, 2), (2, 1), (1, -2), (3, 1), (1, 3), (2, 3), (3, -2)] {
                    let mut input = GfeInput::new(Signature::Qrp, r, aa, bb, 1);
                    input.q = Some(q);
                    input.a = Some(big(a));
                    input.b = Some(big(b));
                    input.cp = Some(big(aa) * ipow(&big(a), q) + big(bb) * ipow(&big(b), r));
                    let Ok(g) = build_gfe(&input) else { continue };
                    built += 1;
                    for h in [hgm_wild_conductor(&g), hgm_wild_conductor_at_q(&g)] {
                        let h = h.unwrap();
                        let branch = h.branch.clone().unwrap_or_else(|| panic!("{:?} {:?}", (r, q, aa, bb, a, b), h));
                        seen.insert(branch);
                    }
                }
            }
        }
    }
    assert!(built > 300, "{}", built);
    assert_eq!(seen.len(), 4, "{:?}", seen);
}
