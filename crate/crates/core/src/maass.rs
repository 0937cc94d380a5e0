//! Truncated degree-2 Fourier expansions: Maass lifts, Siegel Eisenstein
//! series, products, and the Witt and Φ operators.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::divisors;
use crate::error::{invalid, precision, Error, Result};
use crate::jacobi::{jacobi_eisenstein, JacobiIndex1Form};
use crate::qseries::{eisenstein, QSeries};
use crate::quad::{reduced_forms, HalfIntMatrix};

/// Precision of the rank-one row stored alongside a rank-two region.
/// Rank-one summands T₁ ≤ T with det4(T) ≤ D have content at most (D + 1)/4.
pub fn rank_one_precision(detmax4: u64) -> usize {
    (detmax4 / 3 + 2) as usize
}

/// Coefficients a(T) for canonical T with 4·det T ≤ `detmax4`, plus the
/// Φ-image (constant term and rank-one row) for non-cusp forms.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelExpansion {
    weight: u32,
    detmax4: u64,
    box_bound: u64,
    coeffs: HashMap<HalfIntMatrix, BigRational>,
    phi: Option<QSeries>,
}

impl SiegelExpansion {
    /// Builds an expansion; every key must be reduced and inside the region.
    pub fn from_parts(
        weight: u32,
        detmax4: u64,
        box_bound: u64,
        coeffs: HashMap<HalfIntMatrix, BigRational>,
        phi: Option<QSeries>,
    ) -> Result<Self> {
        for t in coeffs.keys() {
            if !t.is_reduced() || t.det4() <= 0 || t.det4() as u64 > detmax4 {
                return invalid(format!("key {t} is not a reduced form with det4 <= {detmax4}"));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(Self {
            weight,
            detmax4,
            box_bound,
            coeffs,
            phi,
        })
    }

    pub fn zero(weight: u32, detmax4: u64) -> Self {
        Self {
            weight,
            detmax4,
            box_bound: 0,
            coeffs: HashMap::new(),
            phi: None,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn detmax4(&self) -> u64 {
        self.detmax4
    }

    /// Bound on n and m of the completeness region; 0 means none.
    pub fn box_bound(&self) -> u64 {
        self.box_bound
    }

    pub fn is_cusp(&self) -> bool {
        self.phi.as_ref().is_none_or(QSeries::is_zero)
    }

    pub fn has_singular_part(&self) -> bool {
        self.phi.is_some()
    }

    /// Nonzero rank-two coefficients keyed by reduced form.
    pub fn coeffs(&self) -> &HashMap<HalfIntMatrix, BigRational> {
        &self.coeffs
    }

    /// Reduced keys of the completeness region in (det4, n, r) order.
    pub fn region(&self) -> Vec<HalfIntMatrix> {
        reduced_forms(self.detmax4)
    }

    /// a(T) for any positive semidefinite T inside the region.
    pub fn coeff(&self, t: &HalfIntMatrix) -> Result<BigRational> {
        let canon = t.canonical()?;
        self.coeff_canonical(&canon)
    }

    pub(crate) fn coeff_canonical(&self, canon: &HalfIntMatrix) -> Result<BigRational> {
        if canon.det4() == 0 {
            let c = canon.n as usize;
            return match &self.phi {
                None => Ok(BigRational::zero()),
                Some(phi) => phi.coeff(c).cloned().ok_or_else(|| {
                    Error::Precision(format!("rank-one coefficient at content {c} beyond {}", phi.precision()))
                }),
            };
        }
        if canon.det4() as u64 > self.detmax4 {
            return precision(format!(
                "coefficient at {canon} needs det4 {} > {}",
                canon.det4(),
                self.detmax4
            ));
        }
        if self.box_bound > 0 && canon.m as u64 > self.box_bound {
            return precision(format!("coefficient at {canon} lies outside box {}", self.box_bound));
        }
        Ok(self.coeffs.get(canon).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Φ(F): constant term and rank-one row. Zero for cusp forms.
    pub fn phi_operator(&self) -> QSeries {
        match &self.phi {
            Some(phi) => phi.clone(),
            None => QSeries::zero(rank_one_precision(self.detmax4)),
        }
    }

    /// The stored Φ-image, if the form carries a singular part.
    pub fn singular_part(&self) -> Option<&QSeries> {
        self.phi.as_ref()
    }

    /// Σ_{r² ≤ 4nm} a(n, r, m): the (n, m) coefficient of F restricted to
    /// the diagonal.
    pub fn witt_pullback(&self, n: u64, m: u64) -> Result<BigRational> {
        if 4 * n * m > self.detmax4 {
            return precision(format!("Witt coefficient ({n}, {m}) needs det4 {}", 4 * n * m));
        }
        let (n, m) = (n as i64, m as i64);
        let rmax = isqrt(4 * n * m);
        let mut total = BigRational::zero();
        for r in -rmax..=rmax {
            total += self.coeff(&HalfIntMatrix::new(n, r, m))?;
        }
        Ok(total)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            weight: self.weight,
            detmax4: self.detmax4,
            box_bound: self.box_bound,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
            phi: self.phi.as_ref().map(|p| p.scale(c)),
        }
    }

    /// Copy cut down to a smaller region.
    pub fn restrict(&self, detmax4: u64) -> Self {
        let detmax4 = detmax4.min(self.detmax4);
        Self {
            weight: self.weight,
            detmax4,
            box_bound: self.box_bound,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.det4() as u64 <= detmax4)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            phi: self.phi.clone(),
        }
    }

    /// Coefficient vector on the reduced forms of `region`, in order.
    pub fn vector(&self, region: &[HalfIntMatrix]) -> Result<Vec<BigRational>> {
        region.iter().map(|t| self.coeff_canonical(t)).collect()
    }
}

fn isqrt(v: i64) -> i64 {
    let mut s = (v as f64).sqrt() as i64;
    while s * s > v {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= v {
        s += 1;
    }
    s
}

/// Σ_j c_j F_j over expansions of a common weight.
pub fn linear_combination(terms: &[(BigRational, &SiegelExpansion)]) -> Result<SiegelExpansion> {
    let Some((_, first)) = terms.first() else {
        return invalid("empty linear combination");
    };
    let weight = first.weight;
    if terms.iter().any(|(_, f)| f.weight != weight) {
        return invalid("linear combination of expansions of different weights");
    }
    let detmax4 = terms.iter().map(|(_, f)| f.detmax4).min().unwrap();
    let box_bound = terms.iter().map(|(_, f)| f.box_bound).filter(|&b| b > 0).min().unwrap_or(0);
    let mut coeffs: HashMap<HalfIntMatrix, BigRational> = HashMap::new();
    for (c, f) in terms {
        for (k, v) in &f.coeffs {
            if k.det4() as u64 <= detmax4 {
                *coeffs.entry(*k).or_insert_with(BigRational::zero) += c * v;
            }
        }
    }
    let phis: Vec<(&BigRational, &QSeries)> = terms
        .iter()
        .filter_map(|(c, f)| f.phi.as_ref().map(|p| (c, p)))
        .collect();
    let phi = if phis.is_empty() {
        None
    } else {
        let prec = phis.iter().map(|(_, p)| p.precision()).min().unwrap();
        let mut acc = QSeries::zero(prec);
        for (c, p) in phis {
            acc = &acc + &p.scale(c);
        }
        Some(acc)
    };
    SiegelExpansion::from_parts(weight, detmax4, box_bound, coeffs, phi)
}

/// Σ_{d | gcd(n,r,m)} d^{k-1}·C(det4/d²) on every reduced T in the region.
fn lift_coefficients(phi: &JacobiIndex1Form, detmax4: u64) -> Result<HashMap<HalfIntMatrix, BigRational>> {
    if detmax4 > phi.max_d() {
        return precision(format!(
            "lift to det4 {detmax4} needs Jacobi coefficients to D = {detmax4}, have {}",
            phi.max_d()
        ));
    }
    let k = phi.weight();
    let forms = reduced_forms(detmax4);
    let coeffs = phi.coeffs();
    let pairs: Vec<(HalfIntMatrix, BigRational)> = forms
        .par_iter()
        .map(|t| {
            let det4 = t.det4() as u64;
            let content = t.content() as u64;
            let value = if content == 1 {
                coeffs[det4 as usize].clone()
            } else {
                let mut acc = BigRational::zero();
                for d in divisors(content) {
                    let term = &coeffs[(det4 / (d * d)) as usize];
                    if !term.is_zero() {
                        acc += term * BigRational::from_integer(BigInt::from(d).pow(k - 1));
                    }
                }
                acc
            };
            (*t, value)
        })
        .collect();
    Ok(pairs.into_iter().collect())
}

/// Saito–Kurokawa lift of an index-1 Jacobi cusp form.
pub fn sk_lift(phi: &JacobiIndex1Form, detmax4: u64) -> Result<SiegelExpansion> {
    if !phi.is_cusp() {
        return invalid("sk_lift expects a Jacobi cusp form; use siegel_eisenstein2 for E_{k,1}");
    }
    let coeffs = lift_coefficients(phi, detmax4)?;
    SiegelExpansion::from_parts(phi.weight(), detmax4, 0, coeffs, None)
}

/// Degree-2 Siegel Eisenstein series of weight k together with the scalar κ
/// relating its rank-two part to the lift of E_{k,1}.
#[derive(Clone, Debug)]
pub struct SiegelEisenstein {
    pub expansion: SiegelExpansion,
    pub kappa: BigRational,
}

/// E_k⁽²⁾ = κ·lift(E_{k,1}) + (rank ≤ 1 part from E_k). κ is solved from the
/// Witt identity at (1, 1); the identity is then checked on every (n, m)
/// with 4nm ≤ detmax4.
pub fn siegel_eisenstein2(k: u32, detmax4: u64) -> Result<SiegelEisenstein> {
    if k != 4 && k != 6 {
        return invalid(format!("Siegel Eisenstein series implemented for k in {{4, 6}}, got {k}"));
    }
    if detmax4 < 4 {
        return precision("Siegel Eisenstein series needs detmax4 >= 4 to fix its normalization");
    }
    let ek = eisenstein(k, rank_one_precision(detmax4))?;
    let jac = jacobi_eisenstein(k, detmax4)?;
    let base = lift_coefficients(&jac, detmax4)?;
    // κ (L(1,0,1) + 2 L(1,1,1)) + 2 e(1) = e(1)²
    let e1 = ek.coeffs()[1].clone();
    let l101 = base[&HalfIntMatrix::new(1, 0, 1)].clone();
    let l111 = base[&HalfIntMatrix::new(1, 1, 1)].clone();
    let denom = l101 + BigRational::from_integer(2.into()) * l111;
    if denom.is_zero() {
        return Err(Error::Internal("Witt normalization equation is degenerate".into()));
    }
    let kappa = (&e1 * &e1 - BigRational::from_integer(2.into()) * &e1) / denom;
    let coeffs = base.into_iter().map(|(t, v)| (t, v * &kappa)).collect();
    let expansion = SiegelExpansion::from_parts(k, detmax4, 0, coeffs, Some(ek.clone()))?;
    // full Witt identity on the region
    let mut n = 1u64;
    while 4 * n * n <= detmax4 {
        let mut m = n;
        while 4 * n * m <= detmax4 {
            let lhs = expansion.witt_pullback(n, m)?;
            let rhs = &ek.coeffs()[n as usize] * &ek.coeffs()[m as usize];
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "Witt identity fails for E_{k} at ({n}, {m}): {lhs} != {rhs}"
                )));
            }
            m += 1;
        }
        n += 1;
    }
    Ok(SiegelEisenstein { expansion, kappa })
}

/// F·G, complete on the smaller of the two regions. A summand T₁ ≤ T has
/// det T₁ ≤ det T, so all terms are available whenever T is.
pub fn multiply(f: &SiegelExpansion, g: &SiegelExpansion) -> Result<SiegelExpansion> {
    let detmax4 = f.detmax4.min(g.detmax4);
    let weight = f.weight + g.weight;
    let phi = match (&f.phi, &g.phi) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    if f.coeffs.is_empty() && f.is_cusp() || g.coeffs.is_empty() && g.is_cusp() {
        return SiegelExpansion::from_parts(weight, detmax4, 0, HashMap::new(), phi);
    }
    let forms = reduced_forms(detmax4);
    let pairs: Result<Vec<(HalfIntMatrix, BigRational)>> = forms
        .par_iter()
        .map(|t| Ok((*t, product_coefficient(f, g, t)?)))
        .collect();
    let box_bound = [f.box_bound, g.box_bound].into_iter().filter(|&b| b > 0).min().unwrap_or(0);
    SiegelExpansion::from_parts(weight, detmax4, box_bound, pairs?.into_iter().collect(), phi)
}

/// Σ_{T₁ + T₂ = T, T₁, T₂ ≥ 0} a_F(T₁)·a_G(T₂).
fn product_coefficient(f: &SiegelExpansion, g: &SiegelExpansion, t: &HalfIntMatrix) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    for n1 in 0..=t.n {
        let n2 = t.n - n1;
        for m1 in 0..=t.m {
            let m2 = t.m - m1;
            let b1 = isqrt(4 * n1 * m1);
            let b2 = isqrt(4 * n2 * m2);
            let lo = (-b1).max(t.r - b2);
            let hi = b1.min(t.r + b2);
            for r1 in lo..=hi {
                let t1 = HalfIntMatrix::new(n1, r1, m1);
                let a = f.coeff(&t1)?;
                if a.is_zero() {
                    continue;
                }
                let b = g.coeff(&HalfIntMatrix::new(n2, t.r - r1, m2))?;
                if !b.is_zero() {
                    acc += a * b;
                }
            }
        }
    }
    Ok(acc)
}

/// Pairs of reduced forms with the same (disc, content) but different
/// coefficients; empty when a(T) depends only on (disc, content).
pub fn skkey_violations(f: &SiegelExpansion, detmax4: u64) -> Result<Vec<(HalfIntMatrix, HalfIntMatrix)>> {
    let mut seen: HashMap<(i64, i64), (HalfIntMatrix, BigRational)> = HashMap::new();
    let mut bad = Vec::new();
    for t in reduced_forms(detmax4.min(f.detmax4)) {
        let v = f.coeff_canonical(&t)?;
        match seen.get(&(t.disc(), t.content())) {
            Some((t0, v0)) if *v0 != v => bad.push((*t0, t)),
            Some(_) => {}
            None => {
                seen.insert((t.disc(), t.content()), (t, v));
            }
        }
    }
    Ok(bad)
}
