//! Exact truncated convolution of integer sequences.
//!
//! Short inputs use schoolbook BigInt arithmetic. Long inputs are reduced
//! modulo several 31-bit primes, convolved with `u128` accumulators and
//! recombined by CRT. The number of primes comes from the a-priori bound
//! `|c_n| ≤ (n+1)·max|a|·max|b|`, so the result is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

const SCHOOLBOOK_LIMIT: usize = 96;

/// `c_n = Σ_{i+j=n} a_i b_j` for `0 ≤ n < len`.
pub fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let effective = len.min((a.len() + b.len()).saturating_sub(1));
    let mut out = if effective == 0 {
        Vec::new()
    } else if effective <= SCHOOLBOOK_LIMIT {
        schoolbook(a, b, effective)
    } else {
        multimodular(a, b, effective)
    };
    out.resize(len, BigInt::zero());
    out
}

fn schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn crt_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate: u64 = (1 << 31) - 1;
    while out.len() < count {
        if crate::arith::is_prime(candidate) {
            out.push(candidate);
        }
        candidate -= 2;
    }
    out
}

fn reduce_mod(v: &[BigInt], p: u64, len: usize) -> Vec<u64> {
    let pb = BigInt::from(p);
    v.iter()
        .take(len)
        .map(|x| x.mod_floor(&pb).to_u64().expect("residue fits u64"))
        .collect()
}

fn convolve_mod(a: &[u64], b: &[u64], p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .into_par_iter()
        .with_min_len(64)
        .map(|n| {
            let lo = n.saturating_sub(b.len() - 1);
            let hi = n.min(a.len() - 1);
            let mut acc: u128 = 0;
            if lo <= hi {
                for i in lo..=hi {
                    acc += (a[i] * b[n - i]) as u128;
                }
            }
            (acc % p as u128) as u64
        })
        .collect()
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u64().expect("inverse fits")
}

fn multimodular(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let bound_bits = max_bits(a) + max_bits(b) + 64 - (len as u64).leading_zeros() as u64 + 2;
    let count = (bound_bits / 30 + 1) as usize;
    let primes = crt_primes(count);
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let ra = reduce_mod(a, p, len);
            let rb = reduce_mod(b, p, len);
            convolve_mod(&ra, &rb, p, len)
        })
        .collect();

    // Garner: x = r0 + p0 (t1 + p1 (t2 + ...)) with mixed radix digits t_i.
    let inverses: Vec<Vec<u64>> = (0..count)
        .map(|i| (0..i).map(|j| mod_inverse(primes[j] % primes[i], primes[i])).collect())
        .collect();
    let mut modulus = BigInt::one();
    for &p in &primes {
        modulus *= p;
    }
    let half = &modulus >> 1;
    (0..len)
        .into_par_iter()
        .map(|n| {
            let mut digits = vec![0u64; count];
            for i in 0..count {
                let p = primes[i];
                let mut x = residues[i][n] % p;
                for j in 0..i {
                    let diff = (x + p - digits[j] % p) % p;
                    x = ((diff as u128 * inverses[i][j] as u128) % p as u128) as u64;
                }
                digits[i] = x;
            }
            let mut value = BigInt::zero();
            for i in (0..count).rev() {
                value = value * primes[i] + digits[i];
            }
            if value > half {
                value -= &modulus;
            }
            value
        })
        .collect()
}
