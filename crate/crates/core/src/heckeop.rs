//! The degree-2 Hecke operator T(p) on truncated expansions and the
//! weight-20 space.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_fundamental, is_prime, kronecker};
use crate::error::{invalid, precision, Error, Result};
use crate::jacobi::cusp_form_10_12;
use crate::linalg::{all_roots_real, charpoly, nullspace, poly_divrem, poly_eval, solve, Matrix, Poly};
use crate::maass::{linear_combination, multiply, siegel_eisenstein2, sk_lift, SiegelExpansion};
use crate::qseries::{eigenbasis_s38, QSeries};
use crate::quad::{reduced_forms, HalfIntMatrix, Unimodular};
use crate::quadfield::QuadNumber;

pub type Mat4 = [[i64; 4]; 4];

/// Right coset representatives [[A, B], [0, D]] of Γ\{γ : γᵗJγ = pJ}.
#[derive(Clone, Debug)]
pub struct HeckeCosetSet {
    pub p: u64,
    pub reps: Vec<Mat4>,
    classes: Vec<DClass>,
}

/// One lower-right block D with its admissible Y = B·D⁻¹, stored as p·Y.
#[derive(Clone, Debug)]
struct DClass {
    d: [[i64; 2]; 2],
    det: i64,
    ys: Vec<(i64, i64, i64)>,
}

pub fn symplectic_j() -> Mat4 {
    [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut t = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Similitude factor μ with γᵗJγ = μJ, if any.
pub fn similitude(g: &Mat4) -> Option<i64> {
    let j = symplectic_j();
    let s = mat4_mul(&mat4_mul(&mat4_transpose(g), &j), g);
    let mu = s[0][2];
    let target = j.map(|row| row.map(|x| x * mu));
    (s == target).then_some(mu)
}

/// Whether g·h⁻¹ ∈ Sp₄(ℤ) for similitude-p matrices g, h.
pub fn same_right_coset(g: &Mat4, h: &Mat4, p: i64) -> bool {
    // p·h⁻¹ = -J·hᵗ·J
    let j = symplectic_j();
    let adj = mat4_mul(&mat4_mul(&j, &mat4_transpose(h)), &j).map(|row| row.map(|x| -x));
    mat4_mul(g, &adj).iter().flatten().all(|x| x % p == 0)
}

impl HeckeCosetSet {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// Representatives with D in row Hermite form dividing p·1₂ and
/// B = Y·D for Y symmetric in (1/p)ℤ modulo integral matrices.
pub fn coset_reps(p: u64) -> Result<HeckeCosetSet> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let p = p as i64;
    let mut ds = vec![[[1, 0], [0, 1]]];
    for x in 0..p {
        ds.push([[1, x], [0, p]]);
    }
    ds.push([[p, 0], [0, 1]]);
    ds.push([[p, 0], [0, p]]);
    let mut reps = Vec::new();
    let mut classes = Vec::new();
    for d in ds {
        let det = d[0][0] * d[1][1];
        let mut ys = Vec::new();
        for y11 in 0..p {
            for y12 in 0..p {
                for y22 in 0..p {
                    // p·Y·D ≡ 0 mod p
                    let yd = [
                        [y11 * d[0][0], y11 * d[0][1] + y12 * d[1][1]],
                        [y12 * d[0][0], y12 * d[0][1] + y22 * d[1][1]],
                    ];
                    if yd.iter().flatten().all(|v| v % p == 0) {
                        ys.push((y11, y12, y22));
                        // A = p·D⁻ᵗ = p·[[d22, 0], [-d12, d11]]/det
                        let a = [[d[1][1], 0], [-d[0][1], d[0][0]]].map(|row| row.map(|v| p * v / det));
                        let b = yd.map(|row| row.map(|v| v / p));
                        reps.push([
                            [a[0][0], a[0][1], b[0][0], b[0][1]],
                            [a[1][0], a[1][1], b[1][0], b[1][1]],
                            [0, 0, d[0][0], d[0][1]],
                            [0, 0, d[1][0], d[1][1]],
                        ]);
                    }
                }
            }
        }
        classes.push(DClass { d, det, ys });
    }
    for g in &reps {
        if similitude(g) != Some(p) {
            return Err(Error::Internal(format!("coset representative {g:?} is not a similitude")));
        }
    }
    Ok(HeckeCosetSet {
        p: p as u64,
        reps,
        classes,
    })
}

/// T(p)F with b(T) = p^{2k-3} Σ_D det(D)^{-k} Σ_Y e(tr(T̃Y)) a(T̃),
/// T̃ = D·T·Dᵗ/p. Output is complete for det4 ≤ detmax4/p².
pub fn apply_tp(f: &SiegelExpansion, p: u64) -> Result<SiegelExpansion> {
    let cosets = coset_reps(p)?;
    let out_det = f.detmax4() / (p * p);
    if out_det < 3 {
        return precision(format!(
            "T({p}) needs input detmax4 >= {} to produce any coefficient, have {}",
            3 * p * p,
            f.detmax4()
        ));
    }
    let k = f.weight();
    let forms = reduced_forms(out_det);
    let pairs: Result<Vec<(HalfIntMatrix, BigRational)>> = forms
        .par_iter()
        .map(|t| Ok((*t, hecke_coefficient(f, &cosets, t, k)?)))
        .collect();
    let coeffs: HashMap<HalfIntMatrix, BigRational> = pairs?.into_iter().collect();
    let phi = match f.singular_part() {
        None => None,
        Some(phi) => {
            let prec = phi.precision() / p as usize;
            let row: Result<Vec<BigRational>> = (0..=prec)
                .map(|c| hecke_coefficient(f, &cosets, &HalfIntMatrix::new(c as i64, 0, 0), k))
                .collect();
            Some(QSeries::from_coeffs(row?))
        }
    };
    SiegelExpansion::from_parts(k, out_det, f.box_bound() / p, coeffs, phi)
}

fn hecke_coefficient(f: &SiegelExpansion, cosets: &HeckeCosetSet, t: &HalfIntMatrix, k: u32) -> Result<BigRational> {
    let p = cosets.p as i64;
    let pb = BigInt::from(p);
    let mut acc = BigRational::zero();
    for class in &cosets.classes {
        let d = class.d;
        // D·T·Dᵗ is the form T evaluated on the columns of Dᵗ
        let u = Unimodular { a: d[0][0], b: d[1][0], c: d[0][1], d: d[1][1] };
        let s = t.transform(&u);
        if s.n % p != 0 || s.r % p != 0 || s.m % p != 0 {
            continue;
        }
        let s = HalfIntMatrix::new(s.n / p, s.r / p, s.m / p);
        let trivial = class
            .ys
            .iter()
            .all(|&(y11, y12, y22)| (s.n * y11 + s.r * y12 + s.m * y22) % p == 0);
        if !trivial {
            continue;
        }
        let a = f.coeff(&s)?;
        if a.is_zero() {
            continue;
        }
        // p^{2k-3}·det^{-k}·#Y
        let det_exp = match class.det {
            1 => 0,
            x if x == p => 1,
            _ => 2,
        };
        let scale = BigRational::new(
            pb.pow(2 * k - 3) * BigInt::from(class.ys.len()),
            pb.pow(det_exp * k),
        );
        acc += a * scale;
    }
    Ok(acc)
}

/// η with T(p)F = η·F, checked on the whole output region.
pub fn eigenvalue(f: &SiegelExpansion, p: u64) -> Result<BigRational> {
    let image = apply_tp(f, p)?;
    eigenvalue_from_image(f, &image, p)
}

fn eigenvalue_from_image(f: &SiegelExpansion, image: &SiegelExpansion, p: u64) -> Result<BigRational> {
    let region = image.region();
    let mut eta = None;
    for t in &region {
        let a = f.coeff(t)?;
        if !a.is_zero() {
            eta = Some(image.coeff(t)? / a);
            break;
        }
    }
    let Some(eta) = eta else {
        return Err(Error::NotEigenform(format!(
            "form vanishes on the T({p}) output region det4 <= {}",
            image.detmax4()
        )));
    };
    for t in &region {
        if image.coeff(t)? != &eta * f.coeff(t)? {
            return Err(Error::NotEigenform(format!("T({p})F differs from {eta}·F at {t}")));
        }
    }
    if let Some(phi) = image.singular_part() {
        let src = f.phi_operator();
        for c in 0..=phi.precision() {
            if phi.coeffs()[c] != &eta * &src.coeffs()[c] {
                return Err(Error::NotEigenform(format!("T({p})F differs from {eta}·F at rank one, content {c}")));
            }
        }
    }
    Ok(eta)
}

/// Matrix M with T(p)F_j = Σ_i M[i][j]·F_i on the common output region.
pub fn tp_matrix(basis: &[SiegelExpansion], p: u64) -> Result<Matrix> {
    let images: Vec<SiegelExpansion> = basis.iter().map(|f| apply_tp(f, p)).collect::<Result<_>>()?;
    matrix_from_images(basis, &images)
}

fn matrix_from_images(basis: &[SiegelExpansion], images: &[SiegelExpansion]) -> Result<Matrix> {
    let out_det = images.iter().map(SiegelExpansion::detmax4).min().unwrap_or(0);
    let region = reduced_forms(out_det);
    let columns = |fs: &[SiegelExpansion]| -> Result<Matrix> {
        let vecs: Vec<Vec<BigRational>> = fs.iter().map(|f| f.vector(&region)).collect::<Result<_>>()?;
        Ok((0..region.len()).map(|i| vecs.iter().map(|v| v[i].clone()).collect()).collect())
    };
    match solve(&columns(basis)?, &columns(images)?) {
        Err(Error::Internal(_)) => Err(Error::Internal("T(p) does not preserve the span of the basis".into())),
        other => other,
    }
}

/// The weight-20 basis {χ₁₀², E₄E₆χ₁₀, E₄²χ₁₂} built from lifts and
/// Eisenstein series.
pub fn weight20_basis(detmax4: u64) -> Result<Vec<SiegelExpansion>> {
    let chi10 = sk_lift(&cusp_form_10_12(10, detmax4)?, detmax4)?;
    let chi12 = sk_lift(&cusp_form_10_12(12, detmax4)?, detmax4)?;
    let e4 = siegel_eisenstein2(4, detmax4)?.expansion;
    let e6 = siegel_eisenstein2(6, detmax4)?.expansion;
    let f1 = multiply(&chi10, &chi10)?;
    let f2 = multiply(&multiply(&e4, &e6)?, &chi10)?;
    let f3 = multiply(&multiply(&e4, &e4)?, &chi12)?;
    Ok(vec![f1, f2, f3])
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialCheck {
    pub t0: HalfIntMatrix,
    pub p: u64,
    pub a_t0: String,
    pub a_pt0: String,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct NonLift20 {
    pub detmax4: u64,
    pub t2_matrix: Matrix,
    pub charpoly: Poly,
    /// a_g(2) + 2¹⁹ + 2¹⁸ for the two eigenforms g of S₃₈.
    pub sk_eigenvalues: [QuadNumber; 2],
    pub eta2: BigRational,
    pub eta3: BigRational,
    pub expansion: SiegelExpansion,
    pub radial: RadialCheck,
    pub commute: bool,
    pub roots_real: bool,
}

/// Splits T(2) on the weight-20 basis into the two lift eigenvalues and a
/// third rational one, and returns the third eigenvector.
pub fn nonlift20(detmax4: u64) -> Result<NonLift20> {
    if detmax4 < 144 {
        return precision(format!("nonlift20 needs detmax4 >= 144, got {detmax4}"));
    }
    let basis = weight20_basis(detmax4)?;
    let t2_images: Vec<SiegelExpansion> = basis.iter().map(|f| apply_tp(f, 2)).collect::<Result<_>>()?;
    let t3_images: Vec<SiegelExpansion> = basis.iter().map(|f| apply_tp(f, 3)).collect::<Result<_>>()?;
    let m = matrix_from_images(&basis, &t2_images)?;
    let cp = charpoly(&m);

    let s38 = eigenbasis_s38(8)?;
    let shift = BigRational::from_integer(BigInt::from(2).pow(19) + BigInt::from(2).pow(18));
    let sk_eigenvalues = s38.forms.clone().map(|g| {
        let a2 = g.a(2).expect("precision 8 covers a(2)").clone();
        let radicand = a2.radicand.clone();
        a2.add(&QuadNumber::from_rational(shift.clone(), &radicand))
    });
    // (x - c)² - t(x - c) + n with c = 2¹⁹ + 2¹⁸
    let t = &s38.trace;
    let n = &s38.determinant;
    let two = BigRational::from_integer(2.into());
    let quad: Poly = vec![&shift * &shift + t * &shift + n, -(&two * &shift) - t, BigRational::one()];
    let (quot, rem) = poly_divrem(&cp, &quad);
    if rem.iter().any(|c| !c.is_zero()) || quot.len() != 2 {
        return Err(Error::Internal(
            "T(2) on the weight-20 space does not carry the two Saito-Kurokawa eigenvalues".into(),
        ));
    }
    let eta2 = -&quot[0] / &quot[1];
    if poly_eval(&quad, &eta2).is_zero() {
        return Err(Error::Ambiguity(format!("third eigenvalue {eta2} collides with a lift eigenvalue")));
    }
    let mut shifted = m.clone();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= &eta2;
    }
    let kernel = nullspace(&shifted);
    if kernel.len() != 1 {
        return Err(Error::Ambiguity(format!("eigenspace for {eta2} has dimension {}", kernel.len())));
    }
    let v = &kernel[0];
    let terms: Vec<(BigRational, &SiegelExpansion)> = v.iter().cloned().zip(basis.iter()).collect();
    let raw = linear_combination(&terms)?;
    let region = raw.region();
    let lead = region
        .iter()
        .map(|t| raw.coeff(t))
        .find(|c| c.as_ref().map_or(true, |c| !c.is_zero()))
        .ok_or_else(|| Error::Internal("weight-20 eigenvector vanishes on its region".into()))??;
    let expansion = raw.scale(&lead.recip());

    // T(p) images of the eigenvector from the basis images
    let combine = |images: &[SiegelExpansion]| -> Result<SiegelExpansion> {
        let terms: Vec<(BigRational, &SiegelExpansion)> = v.iter().map(|c| c / &lead).zip(images.iter()).collect();
        linear_combination(&terms)
    };
    let check2 = eigenvalue_from_image(&expansion, &combine(&t2_images)?, 2)?;
    if check2 != eta2 {
        return Err(Error::Internal(format!("T(2) eigenvalue {check2} differs from {eta2}")));
    }
    let eta3 = eigenvalue_from_image(&expansion, &combine(&t3_images)?, 3)?;

    let radial = radial_check(&expansion, 3, &eta3)?;

    let mut commute = true;
    for (f2, f3) in t2_images.iter().zip(&t3_images) {
        let a = apply_tp(f2, 3)?;
        let b = apply_tp(f3, 2)?;
        let common = a.detmax4().min(b.detmax4());
        for t in reduced_forms(common) {
            if a.coeff(&t)? != b.coeff(&t)? {
                commute = false;
            }
        }
    }
    let roots_real = all_roots_real(&cp);
    Ok(NonLift20 {
        detmax4,
        t2_matrix: m,
        charpoly: cp,
        sk_eigenvalues,
        eta2,
        eta3,
        expansion,
        radial,
        commute,
        roots_real,
    })
}

/// a(pT₀) = η(p)·a(T₀) at the first fundamental T₀ in region order with
/// p inert in ℚ(√disc T₀) and a(T₀) ≠ 0.
pub fn radial_check(f: &SiegelExpansion, p: u64, eta: &BigRational) -> Result<RadialCheck> {
    let limit = f.detmax4() / (p * p);
    for t0 in reduced_forms(limit) {
        let d = t0.disc();
        if t0.content() != 1 || !is_fundamental(d) || kronecker(d, p as i64) != -1 {
            continue;
        }
        let a = f.coeff(&t0)?;
        if a.is_zero() {
            continue;
        }
        let apt = f.coeff(&t0.scale(p as i64))?;
        return Ok(RadialCheck {
            t0,
            p,
            a_t0: a.to_string(),
            a_pt0: apt.to_string(),
            pass: apt == eta * &a,
        });
    }
    Err(Error::SearchFailure(format!(
        "no fundamental T0 with {p} inert and a(T0) != 0 within det4 <= {limit}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::newform_onedim;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    struct XorShift(u64);
    impl XorShift {
        fn next(&mut self) -> u64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            self.0
        }
    }

    fn random_gamma(rng: &mut XorShift) -> Mat4 {
        let mut g: Mat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        for _ in 0..6 {
            let k = (rng.next() % 5) as i64 - 2;
            let step: Mat4 = match rng.next() % 5 {
                0 => [[1, 0, k, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                1 => [[1, 0, 0, k], [0, 1, k, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                2 => [[1, k, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -k, 1]],
                3 => [[1, 0, 0, 0], [0, 1, 0, 0], [k, 0, 1, 0], [0, 0, 0, 1]],
                _ => symplectic_j(),
            };
            g = mat4_mul(&g, &step);
        }
        g
    }

    #[test]
    fn coset_counts_follow_one_polynomial() {
        for p in [2u64, 3, 5] {
            let set = coset_reps(p).unwrap();
            assert_eq!(set.count() as u64, p.pow(3) + p.pow(2) + p + 1);
            for g in &set.reps {
                assert_eq!(similitude(g), Some(p as i64));
            }
            for i in 0..set.count() {
                for j in 0..set.count() {
                    assert_eq!(same_right_coset(&set.reps[i], &set.reps[j], p as i64), i == j);
                }
            }
        }
        assert!(coset_reps(4).is_err());
    }

    #[test]
    fn double_coset_decomposes_into_reps() {
        // Γ·diag(1,1,p,p)·Γ is the disjoint union of the right cosets Γγ_i
        for p in [2u64, 3] {
            let set = coset_reps(p).unwrap();
            let pi = p as i64;
            let base: Mat4 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, pi, 0], [0, 0, 0, pi]];
            let mut hit = vec![false; set.count()];
            let mut rng = XorShift(0x9e3779b97f4a7c15 ^ p);
            for _ in 0..3000 {
                let g = mat4_mul(&mat4_mul(&random_gamma(&mut rng), &base), &random_gamma(&mut rng));
                let matches: Vec<usize> = (0..set.count())
                    .filter(|&i| same_right_coset(&g, &set.reps[i], pi))
                    .collect();
                assert_eq!(matches.len(), 1);
                hit[matches[0]] = true;
            }
            assert!(hit.iter().all(|&h| h), "p = {p}: not every coset reached");
        }
    }

    #[test]
    fn lift_eigenvalues() {
        let f18 = newform_onedim(18, 10).unwrap();
        let f22 = newform_onedim(22, 10).unwrap();
        let chi10 = sk_lift(&cusp_form_10_12(10, 200).unwrap(), 200).unwrap();
        let chi12 = sk_lift(&cusp_form_10_12(12, 200).unwrap(), 200).unwrap();
        assert_eq!(eigenvalue(&chi10, 2).unwrap(), q(240));
        for (f, form, k) in [(&chi10, &f18, 10u32), (&chi12, &f22, 12)] {
            for p in [2u64, 3, 5, 7] {
                let eta = form.a(p).unwrap() + BigInt::from(p).pow(k - 1) + BigInt::from(p).pow(k - 2);
                assert_eq!(eigenvalue(f, p).unwrap(), BigRational::from_integer(eta), "k {k} p {p}");
            }
        }
        let zero = SiegelExpansion::zero(10, 100);
        let z = apply_tp(&zero, 2).unwrap();
        assert!(z.coeffs().is_empty());
        assert!(apply_tp(&chi10.restrict(10), 2).is_err());
    }

    #[test]
    fn eisenstein_is_an_eigenform() {
        // T(p)E₄⁽²⁾ = (1 + p^{k-2})(1 + p^{k-1})·E₄⁽²⁾
        let e4 = siegel_eisenstein2(4, 120).unwrap().expansion;
        assert_eq!(eigenvalue(&e4, 2).unwrap(), q((1 + 4) * (1 + 8)));
        assert_eq!(eigenvalue(&e4, 3).unwrap(), q((1 + 9) * (1 + 27)));
    }

    #[test]
    fn tp_matrix_on_lifts() {
        let chi10 = sk_lift(&cusp_form_10_12(10, 100).unwrap(), 100).unwrap();
        let m = tp_matrix(&[chi10.clone()], 2).unwrap();
        assert_eq!(m, vec![vec![q(240)]]);
        let dup = tp_matrix(&[chi10.clone(), chi10.scale(&q(2))], 2);
        assert!(matches!(dup, Err(Error::IllConditionedBasis(_))));
    }

    #[test]
    fn weight20_nonlift() {
        let start = std::time::Instant::now();
        let r = nonlift20(144).unwrap();
        eprintln!("nonlift20(144): {:?}", start.elapsed());
        eprintln!("eta2 = {}, eta3 = {}, radial at {}", r.eta2, r.eta3, r.radial.t0);
        assert!(r.radial.pass);
        assert!(r.commute);
        assert!(r.roots_real);
        for lam in &r.sk_eigenvalues {
            assert!(!lam.is_rational());
        }
    }
}
