//! Hecke eigenvalues of the five Arthur packet types, the spin series of a
//! Saito–Kurokawa lift, and sums over primes of linear combinations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, factorize, is_fundamental, kronecker, primes_up_to};
use crate::error::{invalid, precision, Error, Result};
use crate::qseries::{newform_onedim, EllipticEigenform};
use crate::quadfield::QuadNumber;

/// Normalized eigenvalues λ(p) = a_f(p)/p^{(w-1)/2} of an elliptic eigenform.
#[derive(Clone, Debug)]
pub struct EigenStream {
    label: String,
    form: Arc<EllipticEigenform>,
}

impl EigenStream {
    pub fn new(label: impl Into<String>, form: EllipticEigenform) -> Self {
        Self { label: label.into(), form: Arc::new(form) }
    }

    /// The level one newform of a weight with one-dimensional cusp space.
    pub fn elliptic(weight: u32, precision: usize) -> Result<Self> {
        Ok(Self::new(format!("f{weight}"), newform_onedim(weight, precision)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn form(&self) -> &EllipticEigenform {
        &self.form
    }

    pub fn max_prime(&self) -> u64 {
        self.form.precision() as u64
    }

    /// λ(p) in ℚ(√p).
    pub fn exact(&self, p: u64) -> Result<QuadNumber> {
        let a = BigRational::from_integer(self.form.a(p)?);
        let w = self.form.weight();
        let radicand = BigInt::from(p);
        let pp = |e: u32| BigRational::from_integer(BigInt::from(p).pow(e));
        Ok(if w.is_multiple_of(2) {
            QuadNumber::new(BigRational::zero(), a / pp(w / 2), radicand)
        } else {
            QuadNumber::from_rational(a / pp((w - 1) / 2), &radicand)
        })
    }

    pub fn value(&self, p: u64) -> Result<f64> {
        self.form.lambda0(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArthurKind {
    General,
    Yoshida,
    SaitoKurokawa,
    Soudry,
    HowePS,
}

/// A packet type together with the data its eigenvalue formula consumes.
/// Characters are fundamental discriminants, with 1 for the trivial one.
#[derive(Clone, Debug)]
pub enum ArthurSpec {
    General(EigenStream),
    Yoshida(EigenStream, EigenStream),
    SaitoKurokawa { lambda0: EigenStream, chi0: i64 },
    Soudry(EigenStream),
    HowePS { chi1: i64, chi2: i64 },
}

fn check_character(d: i64) -> Result<()> {
    if d == 1 || is_fundamental(d) {
        Ok(())
    } else {
        invalid(format!("{d} is not a fundamental discriminant"))
    }
}

fn character(d: i64, p: u64) -> i32 {
    if d == 1 {
        1
    } else {
        kronecker(d, p as i64)
    }
}

/// u = p^{1/2} + p^{-1/2}.
fn u(p: u64) -> QuadNumber {
    let pr = BigRational::from_integer(p.into());
    QuadNumber::new(BigRational::zero(), (&pr + BigRational::one()) / pr, BigInt::from(p))
}

/// Key under which the half-power coefficients E_j are aggregated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Constituent {
    Stream(String),
    Character(i64),
}

impl ArthurSpec {
    pub fn saito_kurokawa(lambda0: EigenStream, chi0: i64) -> Result<Self> {
        check_character(chi0)?;
        Ok(Self::SaitoKurokawa { lambda0, chi0 })
    }

    pub fn howe_ps(chi1: i64, chi2: i64) -> Result<Self> {
        check_character(chi1)?;
        check_character(chi2)?;
        if chi1 == chi2 {
            return invalid("Howe–Piatetski-Shapiro packets need two distinct characters");
        }
        Ok(Self::HowePS { chi1, chi2 })
    }

    pub fn kind(&self) -> ArthurKind {
        match self {
            Self::General(_) => ArthurKind::General,
            Self::Yoshida(..) => ArthurKind::Yoshida,
            Self::SaitoKurokawa { .. } => ArthurKind::SaitoKurokawa,
            Self::Soudry(_) => ArthurKind::Soudry,
            Self::HowePS { .. } => ArthurKind::HowePS,
        }
    }

    fn characters(&self) -> Vec<i64> {
        match self {
            Self::SaitoKurokawa { chi0, .. } => vec![*chi0],
            Self::HowePS { chi1, chi2 } => vec![*chi1, *chi2],
            _ => vec![],
        }
    }

    fn streams(&self) -> Vec<&EigenStream> {
        match self {
            Self::General(s) | Self::Soudry(s) | Self::SaitoKurokawa { lambda0: s, .. } => vec![s],
            Self::Yoshida(a, b) => vec![a, b],
            Self::HowePS { .. } => vec![],
        }
    }

    /// Product of the conductors |d| of the nontrivial characters involved.
    pub fn conductor(&self) -> i64 {
        self.characters().iter().filter(|&&d| d != 1).map(|d| d.abs()).product()
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.characters().iter().any(|&d| d != 1 && d.unsigned_abs() % p == 0)
    }

    /// Largest prime covered by every eigenvalue stream.
    pub fn max_prime(&self) -> u64 {
        self.streams().iter().map(|s| s.max_prime()).min().unwrap_or(u64::MAX)
    }

    /// The constant part D and half-power part E of λ(p) = D + E·(p^{1/2} + p^{-1/2}),
    /// each as a formal combination of streams and characters.
    pub fn split_terms(&self) -> (Vec<(Constituent, f64)>, Vec<(Constituent, f64)>) {
        let s = |x: &EigenStream| Constituent::Stream(x.label.clone());
        match self {
            Self::General(a) => (vec![(s(a), 1.0)], vec![]),
            Self::Yoshida(a, b) => (vec![(s(a), 1.0), (s(b), 1.0)], vec![]),
            Self::SaitoKurokawa { lambda0, chi0 } => {
                (vec![(s(lambda0), 1.0)], vec![(Constituent::Character(*chi0), 1.0)])
            }
            Self::Soudry(a) => (vec![], vec![(s(a), 1.0)]),
            Self::HowePS { chi1, chi2 } => (
                vec![],
                vec![(Constituent::Character(*chi1), 1.0), (Constituent::Character(*chi2), 1.0)],
            ),
        }
    }

    /// λ(p) exactly, as an element of ℚ(√p).
    pub fn lambda_exact(&self, p: u64) -> Result<QuadNumber> {
        if self.is_ramified(p) {
            return Err(Error::RamifiedPrime { p, conductor: self.conductor() });
        }
        let chi = |d: i64| BigRational::from_integer(character(d, p).into());
        Ok(match self {
            Self::General(a) => a.exact(p)?,
            Self::Yoshida(a, b) => a.exact(p)?.add(&b.exact(p)?),
            Self::SaitoKurokawa { lambda0, chi0 } => lambda0.exact(p)?.add(&u(p).scale(&chi(*chi0))),
            Self::Soudry(a) => u(p).mul(&a.exact(p)?),
            Self::HowePS { chi1, chi2 } => u(p).scale(&(chi(*chi1) + chi(*chi2))),
        })
    }

    pub fn lambda_p(&self, p: u64) -> Result<f64> {
        Ok(self.lambda_exact(p)?.to_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComboCase {
    /// Every aggregated half-power coefficient vanishes: a_R(p) stays bounded.
    Case1,
    /// Some half-power coefficient survives: a_R(p) grows like p^{1/2}.
    Case2,
}

/// a_R(p) = Σ rᵢ λᵢ(p).
#[derive(Clone, Debug)]
pub struct ComboSpec {
    terms: Vec<(f64, ArthurSpec)>,
}

const COMBO_EPS: f64 = 1e-9;

impl ComboSpec {
    pub fn new(terms: Vec<(f64, ArthurSpec)>) -> Result<Self> {
        let total: f64 = terms.iter().map(|(r, _)| r).sum();
        if terms.is_empty() || total.abs() < COMBO_EPS {
            return invalid("combination coefficients must have nonzero sum");
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, ArthurSpec)] {
        &self.terms
    }

    /// Aggregated half-power coefficients E_j, keyed by constituent.
    pub fn half_power_coefficients(&self) -> BTreeMap<Constituent, f64> {
        let mut agg = BTreeMap::new();
        for (r, spec) in &self.terms {
            for (key, c) in spec.split_terms().1 {
                *agg.entry(key).or_insert(0.0) += r * c;
            }
        }
        agg
    }

    pub fn classify(&self) -> ComboCase {
        if self.half_power_coefficients().values().any(|e| e.abs() > COMBO_EPS) {
            ComboCase::Case2
        } else {
            ComboCase::Case1
        }
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.terms.iter().any(|(_, s)| s.is_ramified(p))
    }

    pub fn max_prime(&self) -> u64 {
        self.terms.iter().map(|(_, s)| s.max_prime()).min().unwrap_or(u64::MAX)
    }

    pub fn a_r(&self, p: u64) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, (r, s)| Ok(acc + r * s.lambda_p(p)?))
    }

    /// (p, a_R(p)) for the unramified primes p ≤ pmax.
    pub fn stream(&self, pmax: u64) -> Result<Vec<(u64, f64)>> {
        if pmax > self.max_prime() {
            return precision(format!("streams known only to p = {}", self.max_prime()));
        }
        primes_up_to(pmax)
            .into_iter()
            .filter(|&p| !self.is_ramified(p))
            .map(|p| Ok((p, self.a_r(p)?)))
            .collect()
    }
}

/// Observed growth of a prime-indexed sequence.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    pub max_abs: f64,
    pub max_over_sqrt_p: f64,
    /// Smallest |s(p)|/p^{1/2} over the upper half of the prime range.
    pub tail_min_over_sqrt_p: f64,
}

pub fn growth_profile(stream: &[(u64, f64)]) -> GrowthProfile {
    let half = stream.last().map_or(0, |&(p, _)| p / 2);
    let mut g = GrowthProfile { max_abs: 0.0, max_over_sqrt_p: 0.0, tail_min_over_sqrt_p: f64::INFINITY };
    for &(p, v) in stream {
        let s = v.abs() / (p as f64).sqrt();
        g.max_abs = g.max_abs.max(v.abs());
        g.max_over_sqrt_p = g.max_over_sqrt_p.max(s);
        if p > half {
            g.tail_min_over_sqrt_p = g.tail_min_over_sqrt_p.min(s);
        }
    }
    g
}

/// Local spin series coefficients η(p^j), 0 ≤ j ≤ jmax, of a lift of weight k
/// whose elliptic form has a_f(p) = a.
pub fn sk_local_series(a: &BigInt, p: u64, k: u32, jmax: usize) -> Vec<BigInt> {
    let pp = |e: u32| BigInt::from(p).pow(e);
    let x = pp(k - 1);
    let y = pp(k - 2);
    let w = pp(2 * k - 3);
    // (1 - a t + w t²)(1 - (x + y) t + x y t²)
    let q1 = [BigInt::one(), -a.clone(), w];
    let q2 = [BigInt::one(), -(&x + &y), &x * &y];
    let mut q = vec![BigInt::zero(); 5];
    for (i, c1) in q1.iter().enumerate() {
        for (j, c2) in q2.iter().enumerate() {
            q[i + j] += c1 * c2;
        }
    }
    let mut num = vec![BigInt::zero(); jmax + 1];
    num[0] = BigInt::one();
    if jmax >= 2 {
        num[2] = -pp(2 * k - 4);
    }
    let mut eta: Vec<BigInt> = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut v = num[j].clone();
        for i in 1..=4.min(j) {
            v -= &q[i] * &eta[j - i];
        }
        eta.push(v);
    }
    eta
}

/// Hecke eigenvalues η(m), indexed 1..=mmax (index 0 is unused), of the
/// Saito–Kurokawa lift of weight k attached to f of weight 2k − 2.
pub fn sk_eta_stream(f: &EllipticEigenform, k: u32, mmax: u64) -> Result<Vec<BigInt>> {
    if f.weight() + 2 != 2 * k {
        return invalid(format!("weight {} form does not lift to weight {k}", f.weight()));
    }
    if (f.precision() as u64) < mmax {
        return precision(format!("need a_f(p) for p ≤ {mmax}, have {}", f.precision()));
    }
    let mut eta = vec![BigInt::zero(); mmax as usize + 1];
    if mmax == 0 {
        return Ok(eta);
    }
    eta[1] = BigInt::one();
    let mut local: BTreeMap<u64, Vec<BigInt>> = BTreeMap::new();
    for p in primes_up_to(mmax) {
        let mut jmax = 0;
        let mut q = 1u64;
        while q <= mmax / p {
            q *= p;
            jmax += 1;
        }
        local.insert(p, sk_local_series(&f.a(p)?, p, k, jmax));
    }
    for m in 2..=mmax {
        eta[m as usize] = factorize(m)
            .into_iter()
            .map(|(p, e)| local[&p][e as usize].clone())
            .product();
    }
    Ok(eta)
}

/// One row of a partial-sum table over primes in an arithmetic progression.
#[derive(Clone, Debug, Serialize)]
pub struct SelbergRow {
    pub x: u64,
    pub sum: f64,
    pub loglog: f64,
    /// sum − loglog X / φ(M).
    pub drift: f64,
}

/// Partial sums Σ_{p ≤ X, p ≡ a (M)} s(p)/p^e over the grid.
pub fn selberg_sums(stream: &[(u64, f64)], residue: u64, modulus: u64, exponent: f64, grid: &[u64]) -> Result<Vec<SelbergRow>> {
    check_progression(residue, modulus)?;
    let phi = euler_phi(modulus) as f64;
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    if let Some(&xmax) = grid.last() {
        let pmax = stream.last().map_or(0, |s| s.0);
        if primes_up_to(xmax).last().is_some_and(|&q| q > pmax) {
            return precision(format!("stream ends at p = {pmax}, grid needs {xmax}"));
        }
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut sum = 0.0;
    let mut it = stream.iter().peekable();
    for x in grid {
        while let Some(&&(p, v)) = it.peek() {
            if p > x {
                break;
            }
            if p % modulus == residue % modulus {
                sum += v / (p as f64).powf(exponent);
            }
            it.next();
        }
        let loglog = (x as f64).ln().ln();
        rows.push(SelbergRow { x, sum, loglog, drift: sum - loglog / phi });
    }
    Ok(rows)
}

/// Σ |drift(Xᵢ₊₁) − drift(Xᵢ)| over consecutive grid points.
pub fn drift_variation(rows: &[SelbergRow]) -> f64 {
    rows.windows(2).map(|w| (w[1].drift - w[0].drift).abs()).sum()
}

fn check_progression(residue: u64, modulus: u64) -> Result<()> {
    if modulus == 0 || num_integer::gcd(residue % modulus, modulus) != 1 {
        return invalid(format!("progression {residue} mod {modulus} contains at most one prime"));
    }
    Ok(())
}

/// Sign changes of s(p) along the primes p ≡ a (M), in increasing order.
#[derive(Clone, Debug, Serialize)]
pub struct SignScan {
    pub residue: u64,
    pub modulus: u64,
    pub primes: usize,
    pub positive: usize,
    pub negative: usize,
    pub changes: usize,
    pub first_negative: Option<u64>,
}

pub fn sign_changes(stream: &[(u64, f64)], residue: u64, modulus: u64) -> Result<SignScan> {
    check_progression(residue, modulus)?;
    let mut scan = SignScan { residue, modulus, primes: 0, positive: 0, negative: 0, changes: 0, first_negative: None };
    let mut last = 0i8;
    for &(p, v) in stream.iter().filter(|(p, _)| p % modulus == residue % modulus) {
        scan.primes += 1;
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        match s {
            1 => scan.positive += 1,
            -1 => {
                scan.negative += 1;
                scan.first_negative.get_or_insert(p);
            }
            _ => continue,
        }
        if last != 0 && s != last {
            scan.changes += 1;
        }
        last = s;
    }
    Ok(scan)
}

/// JSON description of a packet or combination, as read by `scan signs`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SpecJson {
    pub kind: Option<ArthurKind>,
    /// Weight of the elliptic form supplying λ, λ₀ or λ₁.
    pub weight: Option<u32>,
    /// Weight of the second form of a Yoshida packet.
    pub weight2: Option<u32>,
    pub chi0: Option<i64>,
    pub chi: Option<[i64; 2]>,
    pub combo: Option<Vec<(f64, SpecJson)>>,
}

/// Either a single packet or a combination.
#[derive(Clone, Debug)]
pub enum ScanTarget {
    Single(ArthurSpec),
    Combo(ComboSpec),
}

impl ScanTarget {
    pub fn stream(&self, pmax: u64) -> Result<Vec<(u64, f64)>> {
        match self {
            Self::Combo(c) => c.stream(pmax),
            Self::Single(s) => {
                if pmax > s.max_prime() {
                    return precision(format!("streams known only to p = {}", s.max_prime()));
                }
                primes_up_to(pmax)
                    .into_iter()
                    .filter(|&p| !s.is_ramified(p))
                    .map(|p| Ok((p, s.lambda_p(p)?)))
                    .collect()
            }
        }
    }
}

impl SpecJson {
    /// Builds the packet, computing elliptic streams to q^precision.
    pub fn resolve(&self, precision: usize) -> Result<ScanTarget> {
        let mut cache = BTreeMap::new();
        self.resolve_with(precision, &mut cache)
    }

    fn resolve_with(&self, prec: usize, cache: &mut BTreeMap<u32, EigenStream>) -> Result<ScanTarget> {
        if let Some(terms) = &self.combo {
            let terms = terms
                .iter()
                .map(|(r, s)| match s.resolve_with(prec, cache)? {
                    ScanTarget::Single(a) => Ok((*r, a)),
                    ScanTarget::Combo(_) => invalid("nested combinations are not supported"),
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(ScanTarget::Combo(ComboSpec::new(terms)?));
        }
        let mut stream = |w: Option<u32>| -> Result<EigenStream> {
            let w = w.ok_or_else(|| Error::InvalidArgument("missing weight".into()))?;
            if let Some(s) = cache.get(&w) {
                return Ok(s.clone());
            }
            let s = EigenStream::elliptic(w, prec)?;
            cache.insert(w, s.clone());
            Ok(s)
        };
        let kind = self.kind.ok_or_else(|| Error::InvalidArgument("missing kind".into()))?;
        let spec = match kind {
            ArthurKind::General => ArthurSpec::General(stream(self.weight)?),
            ArthurKind::Yoshida => ArthurSpec::Yoshida(stream(self.weight)?, stream(self.weight2)?),
            ArthurKind::SaitoKurokawa => ArthurSpec::saito_kurokawa(stream(self.weight)?, self.chi0.unwrap_or(1))?,
            ArthurKind::Soudry => ArthurSpec::Soudry(stream(self.weight)?),
            ArthurKind::HowePS => {
                let [a, b] = self.chi.ok_or_else(|| Error::InvalidArgument("missing chi".into()))?;
                ArthurSpec::howe_ps(a, b)?
            }
        };
        Ok(ScanTarget::Single(spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f18() -> EigenStream {
        EigenStream::elliptic(18, 1000).unwrap()
    }

    #[test]
    fn sk_lambda_matches_lift_eigenvalue() {
        // η(2)/2^{k-3/2} for k = 10 equals 240/2^{17/2}
        let l = ArthurSpec::saito_kurokawa(f18(), 1).unwrap().lambda_exact(2).unwrap();
        let expected = QuadNumber::new(
            BigRational::zero(),
            BigRational::new(240.into(), BigInt::from(2).pow(9)),
            2.into(),
        );
        assert_eq!(l, expected);
    }

    #[test]
    fn howe_ps_trichotomy() {
        let h = ArthurSpec::howe_ps(-4, -3).unwrap();
        let u13 = 13f64.sqrt() + 1.0 / 13f64.sqrt();
        assert!((h.lambda_p(13).unwrap() - 2.0 * u13).abs() < 1e-12);
        assert_eq!(h.lambda_exact(7).unwrap().signum(), 0);
        assert!(matches!(h.lambda_p(3), Err(Error::RamifiedPrime { p: 3, conductor: 12 })));
        assert!(ArthurSpec::howe_ps(-4, -4).is_err());
        for p in primes_up_to(1000).into_iter().filter(|&p| p > 3) {
            let expected = kronecker(-4, p as i64) + kronecker(-3, p as i64);
            assert_eq!(h.lambda_exact(p).unwrap().signum(), expected.signum());
        }
    }

    #[test]
    fn sk_signs() {
        let trivial = ArthurSpec::saito_kurokawa(f18(), 1).unwrap();
        let twisted = ArthurSpec::saito_kurokawa(f18(), -7).unwrap();
        for p in primes_up_to(1000) {
            assert_eq!(trivial.lambda_exact(p).unwrap().signum(), 1);
            if p != 7 {
                assert_eq!(twisted.lambda_exact(p).unwrap().signum(), kronecker(-7, p as i64));
            }
        }
    }

    #[test]
    fn soudry_and_yoshida() {
        let f = f18();
        let g = EigenStream::elliptic(12, 100).unwrap();
        let s = ArthurSpec::Soudry(f.clone()).lambda_p(5).unwrap();
        let u5 = 5f64.sqrt() + 1.0 / 5f64.sqrt();
        assert!((s - u5 * f.value(5).unwrap()).abs() < 1e-12);
        // Soudry with an even weight stream is rational: (p+1)a/p^{w/2}
        assert!(ArthurSpec::Soudry(f.clone()).lambda_exact(5).unwrap().is_rational());
        let y = ArthurSpec::Yoshida(f.clone(), g.clone()).lambda_p(3).unwrap();
        assert!((y - f.value(3).unwrap() - g.value(3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn eta_stream_values() {
        let f = newform_onedim(18, 200).unwrap();
        let eta = sk_eta_stream(&f, 10, 200).unwrap();
        assert_eq!(eta[1], BigInt::one());
        assert_eq!(eta[2], BigInt::from(240));
        assert_eq!(&eta[6], &(&eta[2] * &eta[3]));
        for p in primes_up_to(200) {
            let expected = f.a(p).unwrap() + BigInt::from(p).pow(9) + BigInt::from(p).pow(8);
            assert_eq!(eta[p as usize], expected);
        }
        assert!(sk_eta_stream(&f, 12, 10).is_err());
        assert!(matches!(sk_eta_stream(&f, 10, 500), Err(Error::Precision(_))));
    }

    #[test]
    fn eta_local_series_times_denominator_is_numerator() {
        for (a, p, k) in [(-528i64, 2u64, 10u32), (-4284, 3, 10), (-88, 5, 12)] {
            let a = BigInt::from(a);
            let eta = sk_local_series(&a, p, k, 8);
            let pp = |e: u32| BigInt::from(p).pow(e);
            // multiply the series by each factor of the denominator in turn
            let mul = |s: &[BigInt], f: &[BigInt]| -> Vec<BigInt> {
                (0..s.len())
                    .map(|j| f.iter().enumerate().filter(|(i, _)| *i <= j).map(|(i, c)| c * &s[j - i]).sum())
                    .collect()
            };
            let s = mul(&eta, &[BigInt::one(), -a.clone(), pp(2 * k - 3)]);
            let s = mul(&s, &[BigInt::one(), -pp(k - 1)]);
            let s = mul(&s, &[BigInt::one(), -pp(k - 2)]);
            let mut num = vec![BigInt::zero(); 9];
            num[0] = BigInt::one();
            num[2] = -pp(2 * k - 4);
            assert_eq!(s, num);
        }
    }

    #[test]
    fn classifier() {
        let f = f18();
        let g = EigenStream::elliptic(22, 1000).unwrap();
        let general = ComboSpec::new(vec![(1.0, ArthurSpec::General(f.clone()))]).unwrap();
        assert_eq!(general.classify(), ComboCase::Case1);
        let sk = ComboSpec::new(vec![(1.0, ArthurSpec::saito_kurokawa(f.clone(), 1).unwrap())]).unwrap();
        assert_eq!(sk.classify(), ComboCase::Case2);
        let mixed = ComboSpec::new(vec![
            (1.0, ArthurSpec::saito_kurokawa(f.clone(), 1).unwrap()),
            (-2.0, ArthurSpec::Soudry(g.clone())),
        ])
        .unwrap();
        assert_eq!(mixed.classify(), ComboCase::Case2);
        let cancelling = ComboSpec::new(vec![
            (1.0, ArthurSpec::howe_ps(-3, -4).unwrap()),
            (-1.0, ArthurSpec::saito_kurokawa(f.clone(), -3).unwrap()),
            (-1.0, ArthurSpec::saito_kurokawa(g.clone(), -4).unwrap()),
        ])
        .unwrap();
        assert_eq!(cancelling.classify(), ComboCase::Case1);
        let stream = cancelling.stream(1000).unwrap();
        assert!(stream.iter().all(|&(p, v)| (v + f.value(p).unwrap() + g.value(p).unwrap()).abs() < 1e-9));
        assert!(ComboSpec::new(vec![(1.0, ArthurSpec::General(f.clone())), (-1.0, ArthurSpec::General(g))]).is_err());
    }

    #[test]
    fn selberg_and_signs() {
        let s = ScanTarget::Single(ArthurSpec::General(f18())).stream(1000).unwrap();
        let rows = selberg_sums(&s, 1, 4, 1.0, &[100, 1000]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(selberg_sums(&s, 4, 4, 1.0, &[100]).is_err());
        assert!(selberg_sums(&s, 1, 1, 2.0, &[10_000]).is_err());
        let scan = sign_changes(&s, 3, 4).unwrap();
        assert!(scan.changes >= 1);
        assert_eq!(scan.positive + scan.negative, scan.primes);
    }

    #[test]
    fn spec_json_roundtrip() {
        let json = r#"{"combo": [[1.0, {"kind": "HowePS", "chi": [-3, -4]}],
                                 [-1.0, {"kind": "SaitoKurokawa", "weight": 18, "chi0": -3}],
                                 [-1.0, {"kind": "SaitoKurokawa", "weight": 22, "chi0": -4}]]}"#;
        let spec: SpecJson = serde_json::from_str(json).unwrap();
        match spec.resolve(100).unwrap() {
            ScanTarget::Combo(c) => assert_eq!(c.classify(), ComboCase::Case1),
            ScanTarget::Single(_) => panic!("expected a combination"),
        }
        let bad: SpecJson = serde_json::from_str(r#"{"kind": "General"}"#).unwrap();
        assert!(bad.resolve(10).is_err());
    }

    proptest! {
        #[test]
        fn eta_multiplicative(m in 1u64..60, n in 1u64..60) {
            static ETA: std::sync::OnceLock<Vec<BigInt>> = std::sync::OnceLock::new();
            let eta = ETA.get_or_init(|| sk_eta_stream(&newform_onedim(22, 3600).unwrap(), 12, 3600).unwrap());
            prop_assume!(num_integer::gcd(m, n) == 1);
            prop_assert_eq!(&eta[(m * n) as usize], &(&eta[m as usize] * &eta[n as usize]));
        }
    }
}
