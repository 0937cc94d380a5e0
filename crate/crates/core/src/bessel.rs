//! Local Bessel values at h_p(ℓ, m) = diag(p^{ℓ+2m}, p^{ℓ+m}, 1, p^m): Sugano's
//! formula, the exact values for types Vb, VIb and the IIb eigenvectors, the
//! IIb spherical bound, and ratios read off Saito–Kurokawa lift coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::maass::SiegelExpansion;
use crate::quad::{HalfIntMatrix, Splitting, Unimodular};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BesselCell {
    pub p: u64,
    pub ell: u32,
    pub m: u32,
}

impl BesselCell {
    pub fn new(p: u64, ell: u32, m: u32) -> Self {
        Self { p, ell, m }
    }

    pub fn is_origin(&self) -> bool {
        self.ell == 0 && self.m == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LocalType {
    IIbSpherical,
    IIbEigen,
    Vb,
    VIb,
}

/// U^{1,0} = a + b + a⁻¹ + b⁻¹ − p^{-1/2}γ, where γ is 0, Λ(ϖ) + conj Λ(ϖ) or
/// Λ(ϖ) as p is inert, split or ramified in K.
pub fn sugano_u10(p: u64, a: Complex64, b: Complex64, splitting: Splitting, lambda: Option<Complex64>) -> Result<Complex64> {
    if a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
        return invalid("Satake parameters must be nonzero");
    }
    let gamma = match (splitting, lambda) {
        (Splitting::Inert, _) => Complex64::new(0.0, 0.0),
        (Splitting::Split, Some(l)) => l + l.conj(),
        (Splitting::Ramified, Some(l)) => l,
        (_, None) => return invalid("Λ(ϖ) is required unless p is inert"),
    };
    Ok(a + b + a.inv() + b.inv() - gamma / (p as f64).sqrt())
}

/// ± p^{-e/2}, relative to B(1). The sign is `None` when only the
/// magnitude is determined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BesselValue {
    pub sign: Option<i32>,
    pub p: u64,
    pub half_exponent: u32,
}

impl BesselValue {
    pub fn magnitude_squared(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.p).pow(self.half_exponent))
    }

    pub fn to_f64(&self) -> f64 {
        self.sign.unwrap_or(1) as f64 * (self.p as f64).powf(-(self.half_exponent as f64) / 2.0)
    }
}

pub fn exact_value(kind: LocalType, cell: BesselCell) -> Result<BesselValue> {
    let s = cell.ell + cell.m;
    let (sign, half_exponent) = match kind {
        LocalType::Vb => (Some(if s % 2 == 1 { -1 } else { 1 }), 4 * s),
        LocalType::VIb => (Some(1), 4 * s),
        LocalType::IIbEigen => (None, 3 * s),
        LocalType::IIbSpherical => {
            return invalid("no closed form for the IIb spherical vector; use the bound or the empirical ratio")
        }
    };
    Ok(BesselValue { sign, p: cell.p, half_exponent })
}

/// Square of the bound (ℓ+1)(2ℓ+2m+1)p^{-ℓ-3m/2}.
pub fn iib_spherical_bound_sq(cell: BesselCell) -> BigRational {
    let (l, m) = (cell.ell as i64, cell.m as i64);
    let c = BigInt::from((l + 1) * (2 * l + 2 * m + 1));
    BigRational::new(&c * &c, BigInt::from(cell.p).pow(2 * cell.ell + 3 * cell.m))
}

pub fn iib_spherical_bound(cell: BesselCell) -> f64 {
    let (l, m) = (cell.ell as f64, cell.m as f64);
    (l + 1.0) * (2.0 * l + 2.0 * m + 1.0) * (cell.p as f64).powf(-l - 1.5 * m)
}

/// A form GL₂(ℤ)-equivalent to s whose last entry is prime to p.
fn move_unit_corner(s: &HalfIntMatrix, p: i64) -> Result<HalfIntMatrix> {
    if s.m.rem_euclid(p) != 0 {
        return Ok(*s);
    }
    for (x, y) in [(1, 0), (1, 1)] {
        if s.eval(x, y).rem_euclid(p) != 0 {
            let u = if y == 0 { Unimodular::new(0, 1, 1, 0)? } else { Unimodular::new(1, 1, 0, 1)? };
            return Ok(s.transform(&u));
        }
    }
    Err(Error::InvalidArgument(format!("{s} is not primitive at {p}")))
}

/// p^ℓ · diag(p^m, 1) S diag(p^m, 1), after moving S so that p does not
/// divide its last entry.
pub fn cell_matrix(s: &HalfIntMatrix, cell: BesselCell) -> Result<HalfIntMatrix> {
    let p = cell.p as i64;
    let s = move_unit_corner(s, p)?;
    let pm = p.pow(cell.m);
    Ok(HalfIntMatrix::new(s.n * pm * pm, s.r * pm, s.m).scale(p.pow(cell.ell)))
}

/// a(T)/(p^{(ℓ+m)k} a(S)) for T = cell_matrix(S, cell).
pub fn empirical_ratio(f: &SiegelExpansion, s: &HalfIntMatrix, cell: BesselCell) -> Result<BigRational> {
    let a_s = f.coeff(s)?;
    if a_s.is_zero() {
        return invalid(format!("a({s}) = 0"));
    }
    let t = cell_matrix(s, cell)?;
    let scale = BigInt::from(cell.p).pow((cell.ell + cell.m) * f.weight());
    Ok(f.coeff(&t)? / (a_s * BigRational::from_integer(scale)))
}

#[derive(Clone, Debug)]
pub struct BesselRow {
    pub ell: u32,
    pub m: u32,
    pub ratio: BigRational,
    pub bound_sq: BigRational,
    pub pass: bool,
}

/// Cells (ℓ, m) with p^{2ℓ+2m} det4(S) ≤ detmax4.
pub fn cells_within(p: u64, det4: u64, detmax4: u64) -> Vec<BesselCell> {
    let mut out = Vec::new();
    let mut ell = 0;
    while det4 * p.pow(2 * ell) <= detmax4 {
        let mut m = 0;
        while det4 * p.pow(2 * (ell + m)) <= detmax4 {
            out.push(BesselCell::new(p, ell, m));
            m += 1;
        }
        ell += 1;
    }
    out
}

/// Compares |ratio|² with the squared bound: strictly, except at the origin
/// where both sides equal one.
pub fn bessel_row(f: &SiegelExpansion, s: &HalfIntMatrix, cell: BesselCell) -> Result<BesselRow> {
    let ratio = empirical_ratio(f, s, cell)?;
    let bound_sq = iib_spherical_bound_sq(cell);
    let lhs = &ratio * &ratio;
    let pass = if cell.is_origin() { lhs <= bound_sq } else { lhs < bound_sq };
    Ok(BesselRow { ell: cell.ell, m: cell.m, ratio, bound_sq, pass })
}

pub fn bessel_table(f: &SiegelExpansion, s: &HalfIntMatrix, p: u64, lmax: u32, mmax: u32) -> Result<Vec<BesselRow>> {
    let mut rows = Vec::new();
    for ell in 0..=lmax {
        for m in 0..=mmax {
            rows.push(bessel_row(f, s, BesselCell::new(p, ell, m))?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::cusp_form_10_12;
    use crate::maass::sk_lift;
    use crate::quad::class_representatives;

    fn lift(k: u32, detmax4: u64) -> SiegelExpansion {
        sk_lift(&cusp_form_10_12(k, detmax4).unwrap(), detmax4).unwrap()
    }

    #[test]
    fn sugano_examples() {
        let one = Complex64::new(1.0, 0.0);
        let v = sugano_u10(7, one, one, Splitting::Inert, None).unwrap();
        assert!((v - 4.0).norm() < 1e-12);
        let v = sugano_u10(5, one, one, Splitting::Split, Some(one)).unwrap();
        assert!((v.re - (4.0 - 2.0 / 5f64.sqrt())).abs() < 1e-12);
        let v = sugano_u10(3, one, one, Splitting::Ramified, Some(one)).unwrap();
        assert!((v.re - (4.0 - 1.0 / 3f64.sqrt())).abs() < 1e-12);
        assert!(sugano_u10(5, one, one, Splitting::Split, None).is_err());
    }

    #[test]
    fn exact_values() {
        let vb = exact_value(LocalType::Vb, BesselCell::new(3, 1, 0)).unwrap();
        assert_eq!((vb.sign, vb.half_exponent), (Some(-1), 4));
        let vib = exact_value(LocalType::VIb, BesselCell::new(3, 2, 1)).unwrap();
        assert_eq!((vib.sign, vib.half_exponent), (Some(1), 12));
        let vb = exact_value(LocalType::Vb, BesselCell::new(3, 1, 1)).unwrap();
        assert_eq!(vb.sign, Some(1));
        assert!(exact_value(LocalType::IIbSpherical, BesselCell::new(3, 1, 1)).is_err());
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(iib_spherical_bound_sq(BesselCell::new(2, 1, 0)), q(9, 1));
        assert_eq!(iib_spherical_bound_sq(BesselCell::new(2, 0, 1)), q(9, 8));
        assert_eq!(iib_spherical_bound_sq(BesselCell::new(2, 0, 0)), q(1, 1));
    }

    #[test]
    fn ratios_from_lift() {
        let f = lift(10, 400);
        let s = HalfIntMatrix::new(1, 1, 1);
        assert_eq!(empirical_ratio(&f, &s, BesselCell::new(2, 0, 0)).unwrap(), BigRational::one());
        assert_eq!(
            empirical_ratio(&f, &s, BesselCell::new(2, 1, 0)).unwrap(),
            BigRational::new(240.into(), 1024.into())
        );
        let t = cell_matrix(&HalfIntMatrix::new(1, 0, 2), BesselCell::new(2, 0, 1)).unwrap();
        assert_eq!(t.det4(), 32);
        assert_eq!(t.content(), 1);
        for d in [-3, -4] {
            for s in class_representatives(d).unwrap() {
                for cell in cells_within(2, s.det4() as u64, 400) {
                    assert!(bessel_row(&f, &s, cell).unwrap().pass, "{s} {cell:?}");
                }
            }
        }
        assert!(matches!(
            empirical_ratio(&f, &s, BesselCell::new(2, 5, 0)),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn cell_enumeration() {
        let cells = cells_within(2, 3, 48);
        assert_eq!(cells.len(), 6);
        assert!(cells.iter().all(|c| 3 * 4u64.pow(c.ell + c.m) <= 48));
    }
}
