//! Index-1 Jacobi forms stored by discriminant D = 4n - r².

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{cohen_h, divisors, factorize};
use crate::error::{invalid, precision, Error, Result};
use crate::qseries::{eisenstein, EllipticEigenform, QSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiIndex1Form {
    weight: u32,
    coeffs: Vec<BigRational>,
    cusp: bool,
}

impl JacobiIndex1Form {
    /// Wraps C(0..=max_d); a cusp form must have C(0) = 0.
    pub fn new(weight: u32, coeffs: Vec<BigRational>, cusp: bool) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("a Jacobi form needs at least C(0)");
        }
        if cusp && !coeffs[0].is_zero() {
            return Err(Error::Internal(format!(
                "weight {weight} Jacobi cusp form has C(0) = {}",
                coeffs[0]
            )));
        }
        Ok(Self { weight, coeffs, cusp })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn max_d(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn is_cusp(&self) -> bool {
        self.cusp
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// C(D); zero for D < 0 (holomorphy).
    pub fn c(&self, d: i64) -> Result<BigRational> {
        if d < 0 {
            return Ok(BigRational::zero());
        }
        match self.coeffs.get(d as usize) {
            Some(v) => Ok(v.clone()),
            None => precision(format!("C({d}) beyond max D = {}", self.max_d())),
        }
    }

    /// The (n, r) Fourier coefficient.
    pub fn coeff_nr(&self, n: i64, r: i64) -> Result<BigRational> {
        self.c(4 * n - r * r)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            weight: self.weight,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            cusp: self.cusp,
        }
    }
}

/// E_{k,1} with C(D) = H(k-1, D) / H(k-1, 0).
pub fn jacobi_eisenstein(k: u32, max_d: u64) -> Result<JacobiIndex1Form> {
    if k < 4 || k % 2 == 1 {
        return invalid(format!("Jacobi Eisenstein series needs even weight >= 4, got {k}"));
    }
    let h0 = cohen_h(k - 1, 0);
    let coeffs = (0..=max_d)
        .into_par_iter()
        .map(|d| cohen_h(k - 1, d) / &h0)
        .collect();
    JacobiIndex1Form::new(k, coeffs, false)
}

/// f(τ)·φ(τ, z) with f of weight `f_weight`.
pub fn scalar_jacobi_product(
    f: &QSeries,
    f_weight: u32,
    phi: &JacobiIndex1Form,
    max_d: u64,
) -> Result<JacobiIndex1Form> {
    if max_d > phi.max_d() {
        return precision(format!("product to D = {max_d} but φ known to {}", phi.max_d()));
    }
    // the second representative (n + r0 + 1, r0 + 2) reaches n = max_d/4 + 2
    let needed = (max_d / 4 + 2) as usize;
    if f.precision() < needed {
        return precision(format!("scalar factor needs precision {needed}, has {}", f.precision()));
    }
    let f = f.truncate(needed);
    let mut out = vec![BigRational::zero(); max_d as usize + 1];
    // D = 4t + s with s ∈ {0, 3}; C'(4t+s) = Σ_j f(j) C(4(t-j)+s)
    for s in [0u64, 3] {
        if s > max_d {
            continue;
        }
        let len = ((max_d - s) / 4) as usize;
        let strand: Vec<BigRational> = (0..=needed)
            .map(|t| {
                let d = 4 * t as u64 + s;
                if d <= max_d {
                    phi.coeffs[d as usize].clone()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        let prod = &f * &QSeries::from_coeffs(strand);
        for t in 0..=len {
            out[4 * t + s as usize] = prod.coeffs()[t].clone();
        }
    }
    let result = JacobiIndex1Form::new(f_weight + phi.weight, out, false)?;
    verify_index_one(&f, phi, &result)?;
    Ok(result)
}

/// Recomputes c'(n, r) directly at both representatives r0 and r0 + 2 and
/// compares with the stored C'(4n - r²).
fn verify_index_one(f: &QSeries, phi: &JacobiIndex1Form, prod: &JacobiIndex1Form) -> Result<()> {
    let max_d = prod.max_d() as i64;
    let step = (max_d / 64).max(1);
    let mut d = 0;
    while d <= max_d {
        if d % 4 == 0 || d % 4 == 3 {
            let r0 = d % 2;
            for r in [r0, r0 + 2] {
                let n = (d + r * r) / 4;
                let mut direct = BigRational::zero();
                for j in 0..=n {
                    direct += &f.coeffs()[j as usize] * phi.coeff_nr(n - j, r)?;
                }
                if direct != prod.coeffs[d as usize] {
                    return Err(Error::Internal(format!(
                        "product coefficient at (n, r) = ({n}, {r}) does not depend on 4n - r² only"
                    )));
                }
            }
        }
        d += if d < 64 { 1 } else { step };
    }
    Ok(())
}

/// φ₁₀,₁ = (E₆·E₄,₁ - E₄·E₆,₁)/144 and φ₁₂,₁ = (E₄²·E₄,₁ - E₆·E₆,₁)/144.
pub fn cusp_form_10_12(weight: u32, max_d: u64) -> Result<JacobiIndex1Form> {
    let prec = (max_d / 4 + 2) as usize;
    let e4 = eisenstein(4, prec)?;
    let e6 = eisenstein(6, prec)?;
    let e41 = jacobi_eisenstein(4, max_d)?;
    let e61 = jacobi_eisenstein(6, max_d)?;
    let (a, b) = match weight {
        10 => (
            scalar_jacobi_product(&e6, 6, &e41, max_d)?,
            scalar_jacobi_product(&e4, 4, &e61, max_d)?,
        ),
        12 => (
            scalar_jacobi_product(&e4.pow(2), 8, &e41, max_d)?,
            scalar_jacobi_product(&e6, 6, &e61, max_d)?,
        ),
        _ => return invalid(format!("cusp form of weight {weight} not available; use 10 or 12")),
    };
    let inv = BigRational::new(BigInt::one(), BigInt::from(144));
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x - y) * &inv)
        .collect();
    JacobiIndex1Form::new(weight, coeffs, true)
}

/// α(d) = d·Π_{p|d}(1 + 1/p).
pub fn alpha(d: u64) -> u64 {
    factorize(d)
        .into_iter()
        .fold(d, |acc, (p, _)| acc / p * (p + 1))
}

/// ⟨φ_m, φ_m⟩/⟨φ₁, φ₁⟩ = Σ_{d|m, (d,N)=1} α(d)·d^{k-2}·a_f(m/d).
pub fn fj_norm_ratio(f: &EllipticEigenform, k: u32, level: u64, m: u64) -> Result<BigRational> {
    if m == 0 || level == 0 {
        return invalid("m and N must be positive");
    }
    if f.weight() != 2 * k - 2 {
        return invalid(format!("eigenform weight {} is not 2k - 2 = {}", f.weight(), 2 * k - 2));
    }
    let mut total = BigInt::zero();
    for d in divisors(m) {
        if num_integer::gcd(d, level) != 1 {
            continue;
        }
        total += BigInt::from(alpha(d)) * BigInt::from(d).pow(k - 2) * f.a(m / d)?;
    }
    Ok(BigRational::from_integer(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::divisor_sigma;
    use crate::qseries::newform_onedim;
    use num_traits::{Signed, ToPrimitive};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn eisenstein_examples() {
        let e = jacobi_eisenstein(4, 20).unwrap();
        assert_eq!(e.c(0).unwrap(), q(1));
        assert!(e.c(2).unwrap().is_zero());
        assert_eq!(e.c(3).unwrap(), cohen_h(3, 3) / cohen_h(3, 0));
        // classical E_{4,1} = 1 + (ζ² + 56ζ + 126 + 56ζ⁻¹ + ζ⁻²)q + ...
        assert_eq!(e.coeff_nr(1, 2).unwrap(), q(1));
        assert_eq!(e.coeff_nr(1, 1).unwrap(), q(56));
        assert_eq!(e.coeff_nr(1, 0).unwrap(), q(126));
        let e6 = jacobi_eisenstein(6, 8).unwrap();
        assert_eq!(e6.coeff_nr(1, 1).unwrap(), q(-88));
        assert_eq!(e6.coeff_nr(1, 0).unwrap(), q(-330));
        assert!(jacobi_eisenstein(5, 3).is_err());
    }

    #[test]
    fn product_with_one_is_identity() {
        let e = jacobi_eisenstein(4, 40).unwrap();
        let p = scalar_jacobi_product(&QSeries::one(20), 0, &e, 40).unwrap();
        assert_eq!(p.coeffs(), e.coeffs());
    }

    #[test]
    fn product_matches_double_sum() {
        let e41 = jacobi_eisenstein(4, 12).unwrap();
        let e6 = eisenstein(6, 8).unwrap();
        let p = scalar_jacobi_product(&e6, 6, &e41, 12).unwrap();
        // D = 3: (j, D') ∈ {(0, 3)} and D = 7: {(0, 7), (1, 3)}
        assert_eq!(p.c(3).unwrap(), e41.c(3).unwrap());
        assert_eq!(p.c(7).unwrap(), e41.c(7).unwrap() + q(-504) * e41.c(3).unwrap());
        assert_eq!(p.c(8).unwrap(), e41.c(8).unwrap() + q(-504) * e41.c(4).unwrap() + e6.coeff(2).unwrap() * e41.c(0).unwrap());
        assert_eq!(p.coeff_nr(1, 2).unwrap(), p.coeff_nr(0, 0).unwrap());
        assert!(p.c(5).unwrap().is_zero());
    }

    #[test]
    fn cusp_forms() {
        let f10 = cusp_form_10_12(10, 40).unwrap();
        assert!(f10.c(0).unwrap().is_zero());
        assert_eq!(f10.c(3).unwrap(), q(1));
        assert_eq!(f10.c(4).unwrap(), q(-2));
        let f12 = cusp_form_10_12(12, 40).unwrap();
        assert!(f12.c(0).unwrap().is_zero());
        assert_eq!(f12.c(3).unwrap(), q(1));
        assert_eq!(f12.c(4).unwrap(), q(10));
        assert!(f10.coeffs().iter().all(|c| c.is_integer()));
        assert!(f12.coeffs().iter().all(|c| c.is_integer()));
        assert!(cusp_form_10_12(14, 10).is_err());
        for d in (1..=40).filter(|d| d % 4 == 1 || d % 4 == 2) {
            assert!(f10.c(d).unwrap().is_zero());
        }
    }

    #[test]
    fn norm_ratio_examples() {
        let f = newform_onedim(18, 20).unwrap();
        assert_eq!(fj_norm_ratio(&f, 10, 1, 1).unwrap(), q(1));
        assert_eq!(fj_norm_ratio(&f, 10, 1, 2).unwrap(), q(240));
        let expected = f.a(4).unwrap() + BigInt::from(3 * 256) * f.a(2).unwrap() + BigInt::from(6) * BigInt::from(4).pow(8);
        assert_eq!(fj_norm_ratio(&f, 10, 1, 4).unwrap(), BigRational::from_integer(expected));
        assert_eq!(alpha(12), 24);
        assert!(fj_norm_ratio(&f, 10, 1, 21).is_err());
    }

    #[test]
    fn norm_ratio_positive_and_bounded() {
        for (w, k) in [(18, 10), (22, 12)] {
            let f = newform_onedim(w, 200).unwrap();
            for m in 1..=200u64 {
                let v = fj_norm_ratio(&f, k, 1, m).unwrap();
                assert!(v.is_positive(), "m = {m}");
                let s0 = divisor_sigma(0, m).to_f64().unwrap();
                let root = divisors(m).into_iter().map(|d| (d as f64).sqrt()).fold(0.0, f64::max);
                let bound = (m as f64).powi(k as i32 - 1) * s0 * s0 * root;
                assert!(v.to_integer().to_f64().unwrap() <= bound, "m = {m}");
            }
        }
    }
}
