//! Exact linear algebra and polynomial arithmetic over ℚ.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<BigRational>>;

/// Polynomial with coefficients from the constant term upwards.
pub type Poly = Vec<BigRational>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigRational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn trace(a: &Matrix) -> BigRational {
    (0..a.len()).fold(BigRational::zero(), |acc, i| acc + &a[i][i])
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let v = &f * &a[row][c];
                    a[r][c] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Solves A·X = B for A of full column rank, checking every row.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.first().map_or(0, Vec::len);
    let k = b.first().map_or(0, Vec::len);
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.iter().filter(|&&c| c < n).count() < n {
        return Err(Error::IllConditionedBasis(format!(
            "coefficient matrix has rank {} < {n}",
            pivots.iter().filter(|&&c| c < n).count()
        )));
    }
    if pivots.iter().any(|&c| c >= n) {
        return Err(Error::Internal("linear system is inconsistent".into()));
    }
    Ok((0..n).map(|i| r[i][n..n + k].to_vec()).collect())
}

/// Basis of {v : M v = 0}.
pub fn nullspace(m: &Matrix) -> Vec<Vec<BigRational>> {
    let cols = m.first().map_or(0, Vec::len);
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r[i][f];
            }
            v
        })
        .collect()
}

/// det(x·I - A), monic, via Faddeev–LeVerrier.
pub fn charpoly(a: &Matrix) -> Poly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = identity(n);
    for k in 1..=n {
        let am = mat_mul(a, &mk);
        let c = -trace(&am) / BigRational::from_integer((k as i64).into());
        coeffs[n - k] = c.clone();
        mk = am;
        for i in 0..n {
            mk[i][i] += &c;
        }
    }
    coeffs
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn degree(p: &Poly) -> usize {
    trim(p.clone()).len() - 1
}

pub fn poly_eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Quotient and remainder.
pub fn poly_divrem(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let den = trim(den.clone());
    assert!(!(den.len() == 1 && den[0].is_zero()), "polynomial division by zero");
    let mut rem = trim(num.clone());
    if rem.len() < den.len() {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - den.len() + 1];
    let lead = den.last().unwrap().clone();
    for i in (0..quot.len()).rev() {
        let c = &rem[i + den.len() - 1] / &lead;
        for (j, d) in den.iter().enumerate() {
            let v = &c * d;
            rem[i + j] -= v;
        }
        quot[i] = c;
    }
    rem.truncate(den.len() - 1);
    if rem.is_empty() {
        rem.push(BigRational::zero());
    }
    (trim(quot), trim(rem))
}

fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

pub fn derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer((i as i64).into()))
        .collect()
}

pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while !is_zero_poly(&y) {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().unwrap().clone();
    x.into_iter().map(|c| c / &lead).collect()
}

fn sign_at_infinity(p: &Poly, negative: bool) -> i32 {
    let p = trim(p.clone());
    let lead = p.last().unwrap();
    let mut s = if lead.is_positive() { 1 } else if lead.is_negative() { -1 } else { 0 };
    if negative && (p.len() - 1) % 2 == 1 {
        s = -s;
    }
    s
}

/// Whether every complex root of p is real (Sturm count on the squarefree part).
pub fn all_roots_real(p: &Poly) -> bool {
    let p = trim(p.clone());
    if p.len() <= 2 {
        return true;
    }
    let g = poly_gcd(&p, &derivative(&p));
    let (s, _) = poly_divrem(&p, &g);
    let deg = degree(&s);
    let mut chain = vec![s.clone(), derivative(&s)];
    loop {
        let n = chain.len();
        let (_, r) = poly_divrem(&chain[n - 2], &chain[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |negative: bool| {
        let signs: Vec<i32> = chain.iter().map(|q| sign_at_infinity(q, negative)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(true) - changes(false) == deg
}
