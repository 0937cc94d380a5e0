//! Number-theoretic primitives: Kronecker symbols, discriminant factorization,
//! Hurwitz class numbers, generalized Bernoulli numbers and Cohen numbers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// σ_k(n) = Σ_{d|n} d^k.
pub fn divisor_sigma(k: u32, n: u64) -> BigInt {
    assert!(n >= 1, "divisor_sigma needs n >= 1");
    divisors(n).into_iter().map(|d| BigInt::from(d).pow(k)).sum()
}

/// σ_k(n) for every 1 ≤ n ≤ len-1 (index 0 left at zero).
pub fn divisor_sigma_table(k: u32, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m < len {
            out[m] += &dk;
            m += d;
        }
    }
    out
}

pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1, "moebius needs n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Kronecker symbol (d | n) on its full domain.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol for odd n > 0
    let mut a = d.rem_euclid(n);
    let mut n = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Discriminant of a quadratic field: squarefree d ≡ 1 (mod 4), or 4m with
/// m ≡ 2, 3 (mod 4) squarefree. The value 1 is not fundamental.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// `disc = fundamental · conductor²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscriminantFactorization {
    pub disc: i64,
    /// Fundamental discriminant, or 1 when `disc` is a positive square.
    pub fundamental: i64,
    pub conductor: u64,
}

pub fn factor_discriminant(disc: i64) -> Result<DiscriminantFactorization> {
    if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return invalid(format!("{disc} is not a nonzero discriminant"));
    }
    let mut squarefree: i64 = disc.signum();
    let mut square_root: u64 = 1;
    for (p, e) in factorize(disc.unsigned_abs()) {
        square_root *= p.pow(e / 2);
        if e % 2 == 1 {
            squarefree *= p as i64;
        }
    }
    let (fundamental, conductor) = if squarefree.rem_euclid(4) == 1 {
        (squarefree, square_root)
    } else {
        debug_assert!(square_root.is_multiple_of(2));
        (4 * squarefree, square_root / 2)
    };
    Ok(DiscriminantFactorization {
        disc,
        fundamental,
        conductor,
    })
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn bernoulli_table() -> &'static Mutex<Vec<BigRational>> {
    static TABLE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BigRational::one()]))
}

/// Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli(n: u32) -> BigRational {
    let mut table = bernoulli_table().lock().expect("bernoulli memo poisoned");
    while table.len() <= n as usize {
        let m = table.len() as u32;
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += rat(binomial(m + 1, j as u32)) * b;
        }
        table.push(-acc / rat(m + 1));
    }
    table[n as usize].clone()
}

/// Bernoulli polynomial B_n(x).
pub fn bernoulli_poly(n: u32, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut xpow = BigRational::one();
    for j in (0..=n).rev() {
        acc += rat(binomial(n, j)) * bernoulli(j) * &xpow;
        xpow *= x;
    }
    acc
}

/// Generalized Bernoulli number B_{r,χ_d} for the Kronecker character of `d`
/// (`d = 1` gives the trivial character of conductor one).
pub fn generalized_bernoulli(r: u32, d: i64) -> BigRational {
    let f = d.unsigned_abs();
    // B_{r,χ} = Σ_j C(r,j) B_j f^{j-1} S_{r-j},  S_e = Σ_{a=1}^{f} χ(a) a^e
    let chars: Vec<(u64, i32)> = (1..=f)
        .map(|a| (a, kronecker(d, a as i64)))
        .filter(|&(_, c)| c != 0)
        .collect();
    let power_sums = character_power_sums(&chars, f, r);
    let fr = rat(f);
    let mut acc = BigRational::zero();
    for j in 0..=r {
        let fpow = if j == 0 {
            fr.recip()
        } else {
            rat(BigInt::from(f).pow(j - 1))
        };
        acc += rat(binomial(r, j)) * bernoulli(j) * fpow * rat(power_sums[(r - j) as usize].clone());
    }
    acc
}

fn character_power_sums(chars: &[(u64, i32)], f: u64, r: u32) -> Vec<BigInt> {
    let fits_i128 = (f as f64).powi(r as i32 + 1) < 1e36;
    if fits_i128 {
        let mut sums = vec![0i128; r as usize + 1];
        for &(a, c) in chars {
            let mut pw: i128 = 1;
            for s in sums.iter_mut() {
                *s += c as i128 * pw;
                pw *= a as i128;
            }
        }
        sums.into_iter().map(BigInt::from).collect()
    } else {
        let mut sums = vec![BigInt::zero(); r as usize + 1];
        for &(a, c) in chars {
            let mut pw = BigInt::one();
            for s in sums.iter_mut() {
                *s += &pw * c;
                pw *= a;
            }
        }
        sums
    }
}

fn l_value_memo() -> &'static Mutex<HashMap<(u32, i64), BigRational>> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, i64), BigRational>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// L(1 - r, χ_d) = -B_{r,χ_d} / r.
pub fn l_value_negative(r: u32, d: i64) -> BigRational {
    if let Some(v) = l_value_memo()
        .lock()
        .expect("L-value memo poisoned")
        .get(&(r, d))
    {
        return v.clone();
    }
    let v = -generalized_bernoulli(r, d) / rat(r);
    l_value_memo()
        .lock()
        .expect("L-value memo poisoned")
        .insert((r, d), v.clone());
    v
}

/// Hurwitz class number by enumeration of reduced forms of discriminant -N.
///
/// Reduced means |b| ≤ a ≤ c with b ≥ 0 whenever |b| = a or a = c, so each
/// SL₂(ℤ)-class is counted exactly once. Multiples of x²+y² carry weight 1/2
/// and multiples of x²+xy+y² weight 1/3. H(0) = -1/12.
pub fn hurwitz_class_number(n: u64) -> BigRational {
    if n == 0 {
        return BigRational::new((-1).into(), 12.into());
    }
    if matches!(n % 4, 1 | 2) {
        return BigRational::zero();
    }
    let n = n as i64;
    let mut twelfths: i64 = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && a == c {
                continue;
            }
            twelfths += if b == a && a == c {
                4
            } else if b == 0 && a == c {
                6
            } else {
                12
            };
        }
        a += 1;
    }
    BigRational::new(twelfths.into(), 12.into())
}

/// Cohen's number H(r, N).
pub fn cohen_h(r: u32, n: u64) -> BigRational {
    assert!(r >= 1, "cohen_h needs r >= 1");
    if n == 0 {
        return -bernoulli(2 * r) / rat(2 * r);
    }
    let disc = if r.is_multiple_of(2) { n as i64 } else { -(n as i64) };
    if !matches!(disc.rem_euclid(4), 0 | 1) {
        return BigRational::zero();
    }
    let fac = factor_discriminant(disc).expect("congruence checked above");
    let d = fac.fundamental;
    let f = fac.conductor;
    let mut sum = BigInt::zero();
    for e in divisors(f) {
        let mu = moebius(e);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d, e as i64);
        if chi == 0 {
            continue;
        }
        let term = BigInt::from(e).pow(r - 1) * divisor_sigma(2 * r - 1, f / e);
        if mu * chi > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    l_value_negative(r, d) * rat(sum)
}

/// Class number of a negative fundamental discriminant through L(0, χ_d).
pub fn class_number(d: i64) -> Result<u64> {
    if d >= 0 || !is_fundamental(d) {
        return invalid(format!("{d} is not a negative fundamental discriminant"));
    }
    let units = match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    let h = l_value_negative(1, d) * rat(units);
    if !h.is_integer() || h.is_negative() {
        return Err(crate::Error::Internal(format!("class number of {d} came out as {h}")));
    }
    Ok(h.to_integer().to_u64().expect("class number fits u64"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    // x² ≡ a (mod 2^k) solvable for all k iff a ≡ 1 (mod 8); used as an
    // independent oracle for (a|2) at odd a.
    fn square_mod_pow2(a: i64, k: u32) -> bool {
        let m = 1i64 << k;
        (0..m).any(|x| (x * x - a).rem_euclid(m) == 0)
    }

    #[test]
    fn kronecker_examples() {
        assert!(!square_mod_pow2(-3, 3));
        assert_eq!(kronecker(-3, 2), -1);
        // 5 splits in Q(i): -4 is a square mod 5
        assert!((0..5).any(|x: i64| (x * x + 4) % 5 == 0));
        assert_eq!(kronecker(-4, 5), 1);
        for d in [-15, -4, -3, 1, 5, 8, 12] {
            assert_eq!(kronecker(d, 1), 1);
        }
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-1, 0), 1);
    }

    #[test]
    fn kronecker_agrees_with_euler_criterion() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for d in -60i64..60 {
                let base = d.rem_euclid(p as i64) as u64;
                let mut e = 1u64;
                for _ in 0..(p - 1) / 2 {
                    e = e * base % p;
                }
                let expect = if d.rem_euclid(p as i64) == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(d, p as i64), expect, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn factor_discriminant_examples() {
        let f = factor_discriminant(-12).unwrap();
        assert_eq!((f.fundamental, f.conductor), (-3, 2));
        let f = factor_discriminant(-4).unwrap();
        assert_eq!((f.fundamental, f.conductor), (-4, 1));
        let f = factor_discriminant(-16).unwrap();
        assert_eq!((f.fundamental, f.conductor), (-4, 2));
        let f = factor_discriminant(36).unwrap();
        assert_eq!((f.fundamental, f.conductor), (1, 6));
        assert!(factor_discriminant(-5).is_err());
        assert!(factor_discriminant(0).is_err());
    }

    #[test]
    fn factor_discriminant_matches_exhaustive_search() {
        for disc in -400i64..400 {
            if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
                continue;
            }
            // largest f with disc/f² a discriminant that is fundamental (or 1)
            let mut best = None;
            for f in 1..=20u64 {
                let f2 = (f * f) as i64;
                if disc % f2 == 0 {
                    let d = disc / f2;
                    if is_fundamental(d) || d == 1 {
                        best = Some((d, f));
                    }
                }
            }
            let fac = factor_discriminant(disc).unwrap();
            assert_eq!(Some((fac.fundamental, fac.conductor)), best, "disc {disc}");
        }
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz_class_number(3), q(1, 3));
        assert_eq!(hurwitz_class_number(4), q(1, 2));
        assert_eq!(hurwitz_class_number(1), q(0, 1));
        assert_eq!(hurwitz_class_number(0), q(-1, 12));
        // H(12) = h'(-12) + H(3) = 1 + 1/3
        assert_eq!(hurwitz_class_number(12), q(4, 3));
        assert_eq!(hurwitz_class_number(15), q(2, 1));
    }

    #[test]
    fn cohen_matches_hurwitz() {
        for n in 0..=200 {
            assert_eq!(cohen_h(1, n), hurwitz_class_number(n), "N = {n}");
        }
    }

    #[test]
    fn cohen_values() {
        assert_eq!(cohen_h(3, 0), q(-1, 252));
        assert_eq!(cohen_h(2, 0), q(1, 120));
        // excluded congruence classes vanish
        for r in 1..=6u32 {
            for n in 1..60u64 {
                let disc = if r % 2 == 0 { n as i64 } else { -(n as i64) };
                if matches!(disc.rem_euclid(4), 2 | 3) {
                    assert!(cohen_h(r, n).is_zero());
                }
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert!(bernoulli(7).is_zero());
        assert_eq!(bernoulli_poly(2, &q(1, 2)), q(-1, 12));
    }

    #[test]
    fn divisor_functions() {
        assert_eq!(divisor_sigma(3, 2), BigInt::from(9));
        assert_eq!(divisor_sigma(0, 6), BigInt::from(4));
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(1), 1);
        let table = divisor_sigma_table(5, 50);
        for n in 1..50 {
            assert_eq!(table[n], divisor_sigma(5, n as u64));
        }
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(-3).unwrap(), 1);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(-15).unwrap(), 2);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-84).unwrap(), 4);
        assert!(class_number(-12).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kronecker_completely_multiplicative(d in -200i64..200, m in 1i64..500, n in 1i64..500) {
                prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
            }

            #[test]
            fn kronecker_periodic_for_fundamental(d in -400i64..400, n in 1i64..2000) {
                prop_assume!(is_fundamental(d));
                prop_assert_eq!(kronecker(d, n), kronecker(d, n + d.abs()));
            }

            #[test]
            fn factor_discriminant_round_trip(x in -100_000i64..100_000) {
                let disc = 4 * x + if x % 2 == 0 { 0 } else { 1 };
                prop_assume!(disc != 0);
                let fac = factor_discriminant(disc).unwrap();
                prop_assert_eq!(fac.fundamental * (fac.conductor * fac.conductor) as i64, disc);
                prop_assert!(is_fundamental(fac.fundamental) || fac.fundamental == 1);
            }
        }
    }
}
