//! Library results against oracles written here from first principles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freycond::arith::{ipow, k_splitting, rat, Val};
use freycond::classify::make_instance;
use freycond::oracle::roots_mod_q;
use freycond::poly::{discriminant, minpoly_omega, newton_polygon, resultant, IntPoly};

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Res(f, g) by the Euclidean algorithm over Q.
fn euclid_resultant(f: &[BigRational], g: &[BigRational]) -> BigRational {
    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }
    let (mut a, mut b) = (trim(f.to_vec()), trim(g.to_vec()));
    let mut acc = BigRational::one();
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        if da < db {
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        if db == 0 {
            return acc * b[0].pow(da as i32);
        }
        // remainder of a by b
        let mut r = a.clone();
        for i in (0..=da - db).rev() {
            let c = &r[i + db] / &b[db];
            for j in 0..=db {
                let t = &c * &b[j];
                r[i + j] -= t;
            }
        }
        let r = trim(r[..db].to_vec());
        if r.is_empty() {
            return BigRational::zero();
        }
        let dr = r.len() - 1;
        // Res(a, b) = (−1)^{da·db} · lc(b)^{da − dr} · Res(b, r)
        if (da * db) % 2 == 1 {
            acc = -acc;
        }
        acc *= b[db].pow((da - dr) as i32);
        a = b;
        b = r;
    }
}

fn to_rat(p: &IntPoly) -> Vec<BigRational> {
    p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

#[test]
fn resultant_matches_euclid() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let df = rng.gen_range(1..7);
        let dg = rng.gen_range(1..7);
        let mut cf: Vec<i64> = (0..df).map(|_| rng.gen_range(-20..20)).collect();
        cf.push(rng.gen_range(1..4));
        let mut cg: Vec<i64> = (0..dg).map(|_| rng.gen_range(-20..20)).collect();
        cg.push(rng.gen_range(1..4));
        let (f, g) = (IntPoly::from_i64(&cf), IntPoly::from_i64(&cg));
        let want = euclid_resultant(&to_rat(&f), &to_rat(&g));
        assert_eq!(BigRational::from_integer(resultant(&f, &g).unwrap()), want, "f = {}, g = {}", f, g);
    }
}

#[test]
fn family_discriminant_matches_euclid() {
    for (r, z, s) in [(5u64, 1i64, 3i64), (5, 3, 3), (7, -2, 11), (11, 2, 5), (13, 1, 7)] {
        let i = make_instance(r, &big(z), &big(s)).unwrap();
        let n = r as usize;
        let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
        let want = euclid_resultant(&to_rat(&i.f), &to_rat(&i.f.derivative())) * BigRational::from_integer(big(sign));
        assert_eq!(BigRational::from_integer(discriminant(&i.f).unwrap()), want);
    }
}

#[test]
fn delta_by_hand() {
    // s² − 4z^r written out
    assert_eq!(make_instance(5, &big(5), &big(5)).unwrap().delta, big(25 - 4 * 3125));
    assert_eq!(big(-12475), big(-25) * big(499));
    assert_eq!(make_instance(5, &big(1), &big(23)).unwrap().delta, big(529 - 4));
    assert_eq!(make_instance(5, &big(1), &big(127)).unwrap().delta, big(127 * 127 - 4));
}

/// The minimal polynomial of ω = ζ + ζ⁻¹ has (r−1)/2 roots mod q exactly when q ≡ ±1 mod r.
#[test]
fn splitting_matches_root_count() {
    for r in [5u64, 7, 11, 13] {
        let h = minpoly_omega(r).unwrap();
        let m = (r - 1) / 2;
        for q in [3u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 79, 83, 89, 97, 101, 103] {
            if q == r {
                continue;
            }
            let k = k_splitting(q, r).unwrap();
            let roots = roots_mod_q(&h, q).len() as u64;
            if q % r == 1 || q % r == r - 1 {
                assert_eq!((k.f, roots), (1, m), "q = {}, r = {}", q, r);
            } else {
                assert!(k.f > 1 && roots == 0, "q = {}, r = {}", q, r);
            }
            // f is the order of q modulo r up to sign
            let f = (1..=r).find(|&j| {
                let x = freycond::arith::pow_mod_u64(q % r, j, r);
                x == 1 || x == r - 1
            });
            assert_eq!(Some(k.f), f);
        }
    }
}

/// ω is 2·cos(2π/r): the minimal polynomial vanishes there to double precision.
#[test]
fn minpoly_vanishes_at_cosines() {
    for r in [5u64, 7, 11, 13] {
        let h = minpoly_omega(r).unwrap();
        for j in 1..=(r - 1) / 2 {
            let w = 2.0 * (2.0 * std::f64::consts::PI * j as f64 / r as f64).cos();
            let v: f64 = h.coeffs().iter().rev().fold(0.0, |acc, c| acc * w + c.to_string().parse::<f64>().unwrap());
            assert!(v.abs() < 1e-6, "r = {}, j = {}: {}", r, j, v);
        }
    }
}

/// Roots q^{a_i}·u_i with units u_i: the polygon must return the a_i.
#[test]
fn newton_polygon_on_known_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let q = [3u64, 5, 7][rng.gen_range(0..3)];
        let n = rng.gen_range(1..6);
        let mut f = IntPoly::from_i64(&[1]);
        let mut want: Vec<u64> = vec![];
        for _ in 0..n {
            let a = rng.gen_range(0..4u64);
            let mut u: i64 = rng.gen_range(1..50);
            while u % q as i64 == 0 {
                u += 1;
            }
            let root = ipow(&big(q as i64), a) * big(if rng.gen_bool(0.5) { u } else { -u });
            f = &f * &IntPoly::new(vec![-root, BigInt::one()]);
            want.push(a);
        }
        want.sort();
        let mut got: Vec<u64> = vec![];
        for (v, k) in newton_polygon(&f, q).unwrap().root_valuations() {
            let v = v.finite().unwrap().clone();
            assert!(v.is_integer() && !v.is_negative());
            let a: u64 = v.to_integer().try_into().unwrap();
            got.extend(std::iter::repeat_n(a, k as usize));
        }
        assert_eq!(got, want, "f = {}", f);
    }
    assert_eq!(Val::frac(7, 20).finite().unwrap(), &rat(7, 20));
}
