//! Half-integral binary quadratic forms T = [[n, r/2], [r/2, m]].

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_discriminant, is_fundamental, kronecker};
use crate::error::{invalid, Error, Result};

/// The triple (n, r, m) standing for n x² + r xy + m y².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntMatrix {
    pub n: i64,
    pub r: i64,
    pub m: i64,
}

/// An integral 2×2 matrix [[a, b], [c, d]] of determinant ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unimodular {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Unimodular {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let u = Self { a, b, c, d };
        if u.det().abs() != 1 {
            return invalid(format!("matrix [[{a},{b}],[{c},{d}]] is not unimodular"));
        }
        Ok(u)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl HalfIntMatrix {
    pub const fn new(n: i64, r: i64, m: i64) -> Self {
        Self { n, r, m }
    }

    /// 4nm - r², i.e. four times the determinant.
    pub fn det4(&self) -> i64 {
        4 * self.n * self.m - self.r * self.r
    }

    /// r² - 4nm.
    pub fn disc(&self) -> i64 {
        -self.det4()
    }

    pub fn content(&self) -> i64 {
        self.n.gcd(&self.r).gcd(&self.m)
    }

    pub fn trace(&self) -> i64 {
        self.n + self.m
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n > 0 && self.det4() > 0
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        let det4 = self.det4();
        det4 > 0 && self.n > 0 || det4 == 0 && self.n >= 0 && self.m >= 0
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.r == 0 && self.m == 0
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::new(self.n * c, self.r * c, self.m * c)
    }

    /// Value of the form at (x, y).
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.n * x * x + self.r * x * y + self.m * y * y
    }

    /// Uᵗ T U.
    pub fn transform(&self, u: &Unimodular) -> Self {
        Self::new(
            self.eval(u.a, u.c),
            2 * self.n * u.a * u.b + self.r * (u.a * u.d + u.b * u.c) + 2 * self.m * u.c * u.d,
            self.eval(u.b, u.d),
        )
    }

    /// Canonical representative of the GL₂(ℤ)-class and a witness U with
    /// Uᵗ T U equal to it.
    pub fn reduce(&self) -> Result<(Self, Unimodular)> {
        if !self.is_positive_semidefinite() {
            return invalid(format!("{self} is not positive semidefinite"));
        }
        if self.is_zero() {
            return Ok((*self, Unimodular::IDENTITY));
        }
        if self.det4() == 0 {
            return Ok(self.reduce_rank_one());
        }
        let mut t = *self;
        let mut u = Unimodular::IDENTITY;
        let swap = Unimodular { a: 0, b: 1, c: 1, d: 0 };
        loop {
            if t.n > t.m {
                u = u.mul(&swap);
                t = Self::new(t.m, t.r, t.n);
            }
            if -t.n < t.r && t.r <= t.n {
                break;
            }
            // r ↦ r + 2nk lands in (-n, n]
            let k = Integer::div_floor(&(t.n - t.r), &(2 * t.n));
            let step = Unimodular { a: 1, b: k, c: 0, d: 1 };
            t = t.transform(&step);
            u = u.mul(&step);
        }
        if t.r < 0 {
            let flip = Unimodular { a: 1, b: 0, c: 0, d: -1 };
            t = t.transform(&flip);
            u = u.mul(&flip);
        }
        Ok((t, u))
    }

    /// Rank one: T = c (αx + βy)² with gcd(α, β) = 1 maps to (c, 0, 0).
    fn reduce_rank_one(&self) -> (Self, Unimodular) {
        let c = self.content();
        let alpha = isqrt(self.n / c);
        let beta = isqrt(self.m / c) * if self.r < 0 { -1 } else { 1 };
        let e = alpha.extended_gcd(&beta);
        let (x, y) = if e.gcd < 0 { (-e.x, -e.y) } else { (e.x, e.y) };
        let u = Unimodular { a: x, b: -beta, c: y, d: alpha };
        (Self::new(c, 0, 0), u)
    }

    pub fn canonical(&self) -> Result<Self> {
        Ok(self.reduce()?.0)
    }

    pub fn is_reduced(&self) -> bool {
        0 <= self.r && self.r <= self.n && self.n <= self.m
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

impl fmt::Display for HalfIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.r, self.m)
    }
}

/// Reduced positive definite forms with det4 ≤ `detmax4`, ordered by
/// (det4, n, r).
pub fn reduced_forms(detmax4: u64) -> Vec<HalfIntMatrix> {
    let bound = detmax4 as i64;
    let mut out = Vec::new();
    let mut n = 1;
    while 3 * n * n <= bound {
        for r in 0..=n {
            let mut m = n;
            while 4 * n * m - r * r <= bound {
                out.push(HalfIntMatrix::new(n, r, m));
                m += 1;
            }
        }
        n += 1;
    }
    out.sort_by_key(|t| (t.det4(), t.n, t.r));
    out
}

/// T ~ L·diag(M,1)·S·diag(M,1) with S of fundamental discriminant d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContentDiscDecomposition {
    #[serde(rename = "L")]
    pub content: i64,
    #[serde(rename = "M")]
    pub conductor: i64,
    pub d: i64,
    /// Reduced representative of the class of `s_prime`.
    pub class_rep: HalfIntMatrix,
    /// The fundamental form in the position matched by `witness`.
    pub s_prime: HalfIntMatrix,
    /// Uᵗ T U = L·diag(M,1)·s_prime·diag(M,1).
    pub witness: Unimodular,
}

impl ContentDiscDecomposition {
    /// L·diag(M,1)·S'·diag(M,1).
    pub fn rebuild(&self) -> HalfIntMatrix {
        let s = self.s_prime;
        let mm = self.conductor;
        HalfIntMatrix::new(s.n * mm * mm, s.r * mm, s.m).scale(self.content)
    }
}

pub fn decompose(t: &HalfIntMatrix) -> Result<ContentDiscDecomposition> {
    if !t.is_positive_definite() {
        return invalid(format!("decompose needs a positive definite matrix, got {t}"));
    }
    let content = t.content();
    let primitive = HalfIntMatrix::new(t.n / content, t.r / content, t.m / content);
    let fd = factor_discriminant(primitive.disc())?;
    let mm = fd.conductor as i64;
    let (reduced, w) = primitive.reduce()?;
    let u = conductor_witness(&reduced, mm).ok_or_else(|| {
        Error::SearchFailure(format!("no diag({mm},1) witness found for {t}"))
    })?;
    let p = reduced.transform(&u);
    let s_prime = HalfIntMatrix::new(p.n / (mm * mm), p.r / mm, p.m);
    let (class_rep, _) = s_prime.reduce()?;
    Ok(ContentDiscDecomposition {
        content,
        conductor: mm,
        d: fd.fundamental,
        class_rep,
        s_prime,
        witness: w.mul(&u),
    })
}

/// A unimodular U with Uᵗ P U = (M²a, Mb, c).
fn conductor_witness(p: &HalfIntMatrix, mm: i64) -> Option<Unimodular> {
    if mm == 1 {
        return Some(Unimodular::IDENTITY);
    }
    let m2 = mm * mm;
    for u1 in 0..=m2 {
        for u2 in 0..=m2 {
            if u1.gcd(&u2) != 1 || p.eval(u1, u2) % m2 != 0 {
                continue;
            }
            let e = u1.extended_gcd(&u2);
            // columns (u1, u2) and (-y, x) with u1 x + u2 y = 1
            let base = Unimodular { a: u1, b: -e.y, c: u2, d: e.x };
            for k in 0..mm {
                let shift = Unimodular { a: 1, b: k, c: 0, d: 1 };
                let u = base.mul(&shift);
                if p.transform(&u).r % mm == 0 {
                    return Some(u);
                }
            }
        }
    }
    None
}

/// Reduced primitive forms of discriminant d, one per SL₂(ℤ)-class.
pub fn class_representatives(d: i64) -> Result<Vec<HalfIntMatrix>> {
    if d >= 0 || !is_fundamental(d) {
        return invalid(format!("{d} is not a negative fundamental discriminant"));
    }
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) || a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(HalfIntMatrix::new(a, b, c));
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn splitting(d: i64, p: u64) -> Splitting {
    match kronecker(d, p as i64) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::class_number;
    use proptest::prelude::*;

    fn h(n: i64, r: i64, m: i64) -> HalfIntMatrix {
        HalfIntMatrix::new(n, r, m)
    }

    /// Brute force: reduced representative = minimal (n, r, m) among small
    /// unimodular images with r ≥ 0.
    fn brute_canonical(t: &HalfIntMatrix) -> HalfIntMatrix {
        let mut best: Option<HalfIntMatrix> = None;
        for a in -5..=5 {
            for b in -5..=5 {
                for c in -5..=5 {
                    for d in -5..=5 {
                        if (a * d - b * c as i64).abs() != 1 {
                            continue;
                        }
                        let s = t.transform(&Unimodular { a, b, c, d });
                        if s.is_reduced() && best.map_or(true, |x| s < x) {
                            best = Some(s);
                        }
                    }
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn reduce_examples() {
        let (t, u) = h(4, 1, 1).reduce().unwrap();
        assert_eq!(t, h(1, 1, 4));
        assert_eq!(h(4, 1, 1).transform(&u), t);
        assert_eq!(t, brute_canonical(&h(4, 1, 1)));
        assert_eq!(h(1, 0, 1).reduce().unwrap(), (h(1, 0, 1), Unimodular::IDENTITY));
        assert_eq!(h(2, -2, 2).canonical().unwrap(), h(2, 2, 2));
        assert!(h(1, 3, 1).reduce().is_err());
    }

    #[test]
    fn rank_one_and_zero() {
        for t in [h(4, 4, 1), h(0, 0, 3), h(3, 0, 0), h(2, -4, 2), h(9, 12, 4)] {
            let (c, u) = t.reduce().unwrap();
            assert_eq!(c, h(t.content(), 0, 0));
            assert_eq!(t.transform(&u), c);
            assert_eq!(u.det().abs(), 1);
        }
        assert_eq!(h(0, 0, 0).canonical().unwrap(), h(0, 0, 0));
    }

    #[test]
    fn reduce_matches_brute_force() {
        for n in 1..12 {
            for m in 1..12 {
                for r in -15..=15 {
                    let t = h(n, r, m);
                    if t.det4() > 0 {
                        assert_eq!(t.canonical().unwrap(), brute_canonical(&t), "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let x = decompose(&h(2, 2, 2)).unwrap();
        assert_eq!((x.content, x.conductor, x.d), (2, 1, -3));
        let x = decompose(&h(1, 0, 4)).unwrap();
        assert_eq!((x.content, x.conductor, x.d), (1, 2, -4));
        let x = decompose(&h(1, 1, 1)).unwrap();
        assert_eq!((x.content, x.conductor, x.d), (1, 1, -3));
        assert!(decompose(&h(1, 2, 1)).is_err());
    }

    #[test]
    fn decompose_witness_rebuilds_input() {
        for n in 1..20 {
            for m in n..20 {
                for r in 0..=n {
                    let t = h(n, r, m);
                    if t.det4() <= 0 {
                        continue;
                    }
                    let x = decompose(&t).unwrap();
                    assert_eq!(t.disc(), x.d * x.content.pow(2) * x.conductor.pow(2));
                    assert_eq!(t.transform(&x.witness), x.rebuild(), "{t}");
                    assert!(is_fundamental(x.class_rep.disc()));
                    assert!(x.class_rep.is_reduced());
                    assert_eq!(x.class_rep.content(), 1);
                }
            }
        }
    }

    #[test]
    fn class_representative_examples() {
        assert_eq!(class_representatives(-3).unwrap(), vec![h(1, 1, 1)]);
        assert_eq!(class_representatives(-4).unwrap(), vec![h(1, 0, 1)]);
        assert_eq!(class_representatives(-15).unwrap(), vec![h(1, 1, 4), h(2, 1, 2)]);
        assert!(class_representatives(-12).is_err());
    }

    #[test]
    fn class_counts_match_class_number() {
        for d in -199..0 {
            if !is_fundamental(d) {
                continue;
            }
            let reps = class_representatives(d).unwrap();
            assert_eq!(reps.len() as u64, class_number(d).unwrap(), "d = {d}");
            // brute-force count of reduced primitive forms
            let mut count = 0;
            for a in 1..200i64 {
                for b in -a..=a {
                    for c in a..200 {
                        let t = h(a, b, c);
                        let reduced = b > -a && !(b < 0 && a == c);
                        if reduced && t.disc() == d && t.content() == 1 {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(reps.len(), count, "d = {d}");
            assert!(reps.iter().all(|t| t.content() == 1));
        }
    }

    #[test]
    fn reduced_forms_are_complete() {
        let forms = reduced_forms(60);
        for t in &forms {
            assert!(t.is_reduced() && t.det4() <= 60);
        }
        let mut brute = Vec::new();
        for n in 1..=60 {
            for m in 1..=60 {
                for r in -20..=20 {
                    let t = h(n, r, m);
                    if t.det4() > 0 && t.det4() <= 60 {
                        brute.push(t.canonical().unwrap());
                    }
                }
            }
        }
        brute.sort_by_key(|t| (t.det4(), t.n, t.r));
        brute.dedup();
        assert_eq!(forms, brute);
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting(-3, 2), Splitting::Inert);
        assert_eq!(splitting(-4, 5), Splitting::Split);
        assert_eq!(splitting(-3, 3), Splitting::Ramified);
    }

    fn unimodular() -> impl Strategy<Value = Unimodular> {
        proptest::collection::vec((0..4u8, -3i64..=3), 1..8).prop_map(|steps| {
            steps.into_iter().fold(Unimodular::IDENTITY, |u, (kind, k)| {
                let s = match kind {
                    0 => Unimodular { a: 1, b: k, c: 0, d: 1 },
                    1 => Unimodular { a: 1, b: 0, c: k, d: 1 },
                    2 => Unimodular { a: 0, b: 1, c: 1, d: 0 },
                    _ => Unimodular { a: -1, b: 0, c: 0, d: 1 },
                };
                u.mul(&s)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn reduce_is_orbit_invariant_and_idempotent(n in 1i64..30, r in -30i64..30, m in 1i64..30, u in unimodular()) {
            let t = h(n, r, m);
            prop_assume!(t.det4() > 0);
            let (c, w) = t.reduce().unwrap();
            prop_assert_eq!(t.transform(&w), c);
            prop_assert_eq!(c.canonical().unwrap(), c);
            prop_assert_eq!(t.transform(&u).canonical().unwrap(), c);
        }

        #[test]
        fn decompose_is_class_invariant(n in 1i64..30, r in -30i64..30, m in 1i64..30, u in unimodular()) {
            let t = h(n, r, m);
            prop_assume!(t.det4() > 0);
            let a = decompose(&t).unwrap();
            let b = decompose(&t.transform(&u)).unwrap();
            prop_assert_eq!((a.content, a.conductor, a.d), (b.content, b.conductor, b.d));
            prop_assert_eq!(a.rebuild().canonical().unwrap(), t.canonical().unwrap());
        }
    }
}
