//! Extended rationals, P Γ(2) matrices and the two actions on Q ∪ {1/0}.
//!
//! P Γ(2) acts on the left by Möbius transformations. The fundamental group
//! acts on the right through the anti-isomorphism A ↦ α, B ↦ β, which reverses
//! products: `word_to_matrix(uv) = word_to_matrix(v) · word_to_matrix(u)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::words::{Base, Context, Letter, Word};

/// A reduced point of Q ∪ {1/0}: gcd(p, q) = 1, q ≥ 0, and 1/0 is the only point with q = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtRational {
    p: BigInt,
    q: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParityClass {
    /// p odd, q odd
    OO,
    /// p odd, q even
    OE,
    /// p even, q odd
    EO,
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::OO => "odd/odd",
            ParityClass::OE => "odd/even",
            ParityClass::EO => "even/odd",
        })
    }
}

impl ExtRational {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (mut p, mut q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(Error::BadFraction("0/0".into()));
        }
        let g = p.gcd(&q);
        p /= &g;
        q /= &g;
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        if q.is_zero() {
            p = BigInt::one();
        }
        Ok(ExtRational { p, q })
    }

    /// # Panics
    /// On 0/0.
    pub fn from_i64(p: i64, q: i64) -> Self {
        ExtRational::new(p, q).expect("not 0/0")
    }

    pub fn infinity() -> Self {
        ExtRational {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        ExtRational {
            p: BigInt::zero(),
            q: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        ExtRational {
            p: BigInt::one(),
            q: BigInt::one(),
        }
    }

    pub fn minus_one() -> Self {
        ExtRational {
            p: -BigInt::one(),
            q: BigInt::one(),
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// Naive height max(|p|, |q|).
    pub fn height(&self) -> BigInt {
        self.p.abs().max(self.q.clone())
    }

    pub fn parity_class(&self) -> ParityClass {
        match (self.p.is_odd(), self.q.is_odd()) {
            (true, true) => ParityClass::OO,
            (true, false) => ParityClass::OE,
            (false, true) => ParityClass::EO,
            (false, false) => unreachable!("reduced fraction with both parts even"),
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_infinity() {
            return self.clone();
        }
        ExtRational {
            p: -&self.p,
            q: self.q.clone(),
        }
    }

    /// q/p with the sign carried on the numerator; 1/(0/1) = 1/0.
    pub fn reciprocal(&self) -> Self {
        ExtRational::new(self.q.clone(), self.p.clone()).expect("never 0/0")
    }

    /// Curve of slope p/q corresponds to the boundary point −p/q.
    pub fn slope_to_boundary(&self) -> Self {
        self.neg()
    }

    pub(crate) fn to_vec2(&self) -> Vec2 {
        match (self.p.to_i128(), self.q.to_i128()) {
            (Some(p), Some(q)) => Vec2::Small(p, q),
            _ => Vec2::Big(self.p.clone(), self.q.clone()),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::BadFraction(s.to_string());
        let (ps, qs) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let p: BigInt = ps.parse().map_err(|_| bad())?;
        let q: BigInt = qs.parse().map_err(|_| bad())?;
        ExtRational::new(p, q).map_err(|_| bad())
    }
}

/// Ordered as extended reals with 1/0 above every rational.
impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.p * &other.q).cmp(&(&other.p * &self.q)),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Generators of P Γ(2) and their inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatLetter {
    A,
    AInv,
    B,
    BInv,
}

impl MatLetter {
    pub fn inverse(self) -> Self {
        match self {
            MatLetter::A => MatLetter::AInv,
            MatLetter::AInv => MatLetter::A,
            MatLetter::B => MatLetter::BInv,
            MatLetter::BInv => MatLetter::B,
        }
    }

    /// Image under the anti-isomorphism (letterwise part).
    pub fn to_letter(self) -> Letter {
        match self {
            MatLetter::A => Letter::gen(Base::A),
            MatLetter::AInv => Letter::inv(Base::A),
            MatLetter::B => Letter::gen(Base::B),
            MatLetter::BInv => Letter::inv(Base::B),
        }
    }

    pub fn from_letter(l: Letter) -> Result<Self> {
        Ok(match (l.base, l.inverse) {
            (Base::A, false) => MatLetter::A,
            (Base::A, true) => MatLetter::AInv,
            (Base::B, false) => MatLetter::B,
            (Base::B, true) => MatLetter::BInv,
            _ => return Err(Error::NoMatrix(l.to_char())),
        })
    }

    pub fn matrix(self) -> MobiusMat {
        let (a, b, c, d) = match self {
            MatLetter::A => (1, 0, -2, 1),
            MatLetter::AInv => (1, 0, 2, 1),
            MatLetter::B => (1, 2, 0, 1),
            MatLetter::BInv => (1, -2, 0, 1),
        };
        MobiusMat::raw(a.into(), b.into(), c.into(), d.into())
    }
}

impl fmt::Display for MatLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatLetter::A => "A",
            MatLetter::AInv => "A^-1",
            MatLetter::B => "B",
            MatLetter::BInv => "B^-1",
        })
    }
}

/// Reduce a sequence of matrix letters freely.
pub fn reduce_mat_letters(letters: impl IntoIterator<Item = MatLetter>) -> Vec<MatLetter> {
    let mut out: Vec<MatLetter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn format_mat_letters(letters: &[MatLetter]) -> String {
    if letters.is_empty() {
        return "I".to_string();
    }
    letters
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// An element of P Γ(2), stored as an SL₂(Z) matrix with canonical sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusMat {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MobiusMat {
    fn raw(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let mut m = MobiusMat { a, b, c, d };
        m.canonicalize();
        m
    }

    fn canonicalize(&mut self) {
        let first = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if first {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
            self.d = -&self.d;
        }
    }

    /// Checked constructor: determinant 1 and the level-2 congruence.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let desc = format!("[[{a},{b}],[{c},{d}]]");
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::NotInGamma2(desc));
        }
        if !(a.is_odd() && d.is_odd() && b.is_even() && c.is_even()) {
            return Err(Error::NotInGamma2(desc));
        }
        Ok(MobiusMat::raw(a, b, c, d))
    }

    pub fn identity() -> Self {
        MobiusMat::raw(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, o: &MobiusMat) -> MobiusMat {
        MobiusMat::raw(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn inverse(&self) -> MobiusMat {
        MobiusMat::raw(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Product of letters in the given order.
    pub fn product(letters: &[MatLetter]) -> MobiusMat {
        letters
            .iter()
            .fold(MobiusMat::identity(), |m, l| m.mul(&l.matrix()))
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == MobiusMat::identity()
    }

    pub fn is_parabolic(&self) -> bool {
        let t = self.trace();
        &t * &t == BigInt::from(4)
    }

    /// The unique fixed point of a non-trivial parabolic element.
    pub fn fixed_point(&self) -> Result<ExtRational> {
        if !self.is_parabolic() || self.is_identity() {
            return Err(Error::NotParabolic);
        }
        if self.c.is_zero() {
            return Ok(ExtRational::infinity());
        }
        ExtRational::new(&self.a - &self.d, BigInt::from(2) * &self.c)
    }

    /// Left Möbius action on a point.
    pub fn act(&self, x: &ExtRational) -> ExtRational {
        ExtRational::new(
            &self.a * &x.p + &self.b * &x.q,
            &self.c * &x.p + &self.d * &x.q,
        )
        .expect("determinant is non-zero")
    }
}

impl fmt::Display for MobiusMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn act(m: &MobiusMat, x: &ExtRational) -> ExtRational {
    m.act(x)
}

pub fn gen_matrix(l: Letter) -> Result<MobiusMat> {
    Ok(MatLetter::from_letter(l)?.matrix())
}

/// Matrix letters of a moduli word under the anti-isomorphism (order reversed).
pub fn word_to_mat_letters(w: &Word) -> Result<Vec<MatLetter>> {
    w.letters()
        .iter()
        .rev()
        .map(|&l| MatLetter::from_letter(l))
        .collect()
}

/// The inverse direction: matrix letters to the moduli word.
pub fn mat_letters_to_word(m: &[MatLetter]) -> Word {
    Word::reduce(Context::Moduli, m.iter().rev().map(|l| l.to_letter()))
}

pub fn word_to_matrix(w: &Word) -> Result<MobiusMat> {
    Ok(MobiusMat::product(&word_to_mat_letters(w)?))
}

/// x.w: apply the letters of `w` left to right as matrices on x.
pub fn right_act(x: &ExtRational, w: &Word) -> Result<ExtRational> {
    let mut v = x.to_vec2();
    for &l in w.letters() {
        v.apply(MatLetter::from_letter(l)?);
    }
    Ok(v.into_ext())
}

/// Position of a point relative to the decomposition intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Region {
    Zero,
    Infinity,
    One,
    MinusOne,
    BelowMinusOne,
    MinusOneToZero,
    ZeroToOne,
    AboveOne,
}

/// Projective vector (p, q) with a machine-integer fast path.
#[derive(Clone, Debug)]
pub(crate) enum Vec2 {
    Small(i128, i128),
    Big(BigInt, BigInt),
}

impl Vec2 {
    fn promote(&mut self) {
        if let Vec2::Small(p, q) = *self {
            *self = Vec2::Big(p.into(), q.into());
        }
    }

    /// Multiply by the letter's matrix on the left.
    pub(crate) fn apply(&mut self, l: MatLetter) {
        if let Vec2::Small(p, q) = self {
            let r = match l {
                MatLetter::A => p
                    .checked_mul(2)
                    .and_then(|t| q.checked_sub(t))
                    .map(|nq| (*p, nq)),
                MatLetter::AInv => p
                    .checked_mul(2)
                    .and_then(|t| q.checked_add(t))
                    .map(|nq| (*p, nq)),
                MatLetter::B => q
                    .checked_mul(2)
                    .and_then(|t| p.checked_add(t))
                    .map(|np| (np, *q)),
                MatLetter::BInv => q
                    .checked_mul(2)
                    .and_then(|t| p.checked_sub(t))
                    .map(|np| (np, *q)),
            };
            match r {
                Some((np, nq)) => {
                    *p = np;
                    *q = nq;
                    return;
                }
                None => self.promote(),
            }
        }
        if let Vec2::Big(p, q) = self {
            match l {
                MatLetter::A => *q -= &*p * 2,
                MatLetter::AInv => *q += &*p * 2,
                MatLetter::B => *p += &*q * 2,
                MatLetter::BInv => *p -= &*q * 2,
            }
        }
    }

    /// Region of the point p/q. Assumes gcd(p, q) = 1 (preserved by unimodular steps).
    pub(crate) fn region(&self) -> Region {
        fn classify(sp: Ordering, sq: Ordering, p_vs_q: Ordering, p_vs_negq: Ordering) -> Region {
            // normalize so q > 0 (or q = 0)
            if sq == Ordering::Equal {
                return Region::Infinity;
            }
            if sp == Ordering::Equal {
                return Region::Zero;
            }
            match (p_vs_q, p_vs_negq) {
                (Ordering::Equal, _) => Region::One,
                (_, Ordering::Equal) => Region::MinusOne,
                (Ordering::Greater, _) => Region::AboveOne,
                (_, Ordering::Less) => Region::BelowMinusOne,
                _ if sp == Ordering::Greater => Region::ZeroToOne,
                _ => Region::MinusOneToZero,
            }
        }
        match self {
            Vec2::Small(p, q) => {
                let (p, q) = if *q < 0 { (-*p, -*q) } else { (*p, *q) };
                classify(p.cmp(&0), q.cmp(&0), p.cmp(&q), p.cmp(&-q))
            }
            Vec2::Big(p, q) => {
                let (p, q) = if q.is_negative() {
                    (-p, -q)
                } else {
                    (p.clone(), q.clone())
                };
                let z = BigInt::zero();
                classify(p.cmp(&z), q.cmp(&z), p.cmp(&q), p.cmp(&-&q))
            }
        }
    }

    pub(crate) fn into_ext(self) -> ExtRational {
        match self {
            Vec2::Small(p, q) => ExtRational::new(p, q),
            Vec2::Big(p, q) => ExtRational::new(p, q),
        }
        .expect("unimodular image is never 0/0")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> ExtRational {
        ExtRational::from_i64(p, q)
    }

    fn a() -> MobiusMat {
        MatLetter::A.matrix()
    }

    fn b() -> MobiusMat {
        MatLetter::B.matrix()
    }

    #[test]
    fn canonical_fractions() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(1, -2), r(-1, 2));
        assert_eq!(r(-5, 0), ExtRational::infinity());
        assert_eq!(r(0, -7), ExtRational::zero());
        assert!(ExtRational::new(0, 0).is_err());
        assert_eq!("-41/18".parse::<ExtRational>().unwrap(), r(-41, 18));
        assert_eq!(
            "1/0".parse::<ExtRational>().unwrap(),
            ExtRational::infinity()
        );
        assert_eq!("7".parse::<ExtRational>().unwrap(), r(7, 1));
        assert!("x/2".parse::<ExtRational>().is_err());
        assert!("0/0".parse::<ExtRational>().is_err());
    }

    #[test]
    fn act_examples() {
        assert_eq!(a().act(&r(0, 1)), r(0, 1));
        assert_eq!(b().act(&r(1, 0)), r(1, 0));
        assert_eq!(a().act(&r(1, 1)), r(-1, 1));
        // B⁻¹A⁻¹ fixes −1
        let c = MobiusMat::product(&[MatLetter::BInv, MatLetter::AInv]);
        assert_eq!(c.act(&r(-1, 1)), r(-1, 1));
    }

    #[test]
    fn gen_matrix_examples() {
        assert_eq!(
            gen_matrix(Letter::gen(Base::A)).unwrap(),
            MobiusMat::new(1, 0, -2, 1).unwrap()
        );
        assert_eq!(
            gen_matrix(Letter::gen(Base::B)).unwrap(),
            MobiusMat::new(1, 2, 0, 1).unwrap()
        );
        assert_eq!(
            gen_matrix(Letter::inv(Base::A)).unwrap(),
            MobiusMat::new(1, 0, 2, 1).unwrap()
        );
        assert!(matches!(
            gen_matrix(Letter::gen(Base::C)),
            Err(Error::NoMatrix('c'))
        ));
    }

    #[test]
    fn gamma2_membership() {
        assert!(MobiusMat::new(1, 1, 0, 1).is_err());
        assert!(MobiusMat::new(1, 2, 0, 2).is_err());
        assert_eq!(
            MobiusMat::new(-1, 0, 2, -1).unwrap(),
            MobiusMat::new(1, 0, -2, 1).unwrap()
        );
    }

    #[test]
    fn anti_isomorphism_example() {
        let w = Word::m("AbaaB");
        let expected = MobiusMat::product(&[
            MatLetter::BInv,
            MatLetter::A,
            MatLetter::A,
            MatLetter::B,
            MatLetter::AInv,
        ]);
        assert_eq!(word_to_matrix(&w).unwrap(), expected);
        assert!(word_to_matrix(&Word::m("")).unwrap().is_identity());
        assert_eq!(word_to_matrix(&Word::m("a")).unwrap(), a());
        assert_eq!(right_act(&ExtRational::infinity(), &w).unwrap(), r(-41, 18));
        assert_eq!(expected.act(&ExtRational::infinity()), r(-41, 18));
    }

    #[test]
    fn right_act_examples() {
        assert_eq!(right_act(&r(3, 7), &Word::m("")).unwrap(), r(3, 7));
        assert_eq!(right_act(&r(1, 1), &Word::m("a")).unwrap(), r(-1, 1));
    }

    #[test]
    fn fixed_points() {
        assert_eq!(b().fixed_point().unwrap(), ExtRational::infinity());
        assert_eq!(a().fixed_point().unwrap(), ExtRational::zero());
        // B A² (A B) A⁻² B⁻¹
        use MatLetter::*;
        let m = MobiusMat::product(&[B, A, A, A, B, AInv, AInv, BInv]);
        assert!(m.is_parabolic());
        assert_eq!(m.fixed_point().unwrap(), r(9, 5));
        assert!(MobiusMat::identity().fixed_point().is_err());
        assert!(MobiusMat::product(&[A, BInv]).fixed_point().is_err());
    }

    #[test]
    fn parity_and_slope() {
        assert_eq!(ExtRational::infinity().parity_class(), ParityClass::OE);
        assert_eq!(r(203, 356).parity_class(), ParityClass::OE);
        assert_eq!(r(-1, 1).parity_class(), ParityClass::OO);
        assert_eq!(
            ExtRational::infinity().slope_to_boundary(),
            ExtRational::infinity()
        );
        assert_eq!(r(2, 3).slope_to_boundary(), r(-2, 3));
        assert_eq!(r(0, 1).slope_to_boundary(), r(0, 1));
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![ExtRational::infinity(), r(1, 2), r(-3, 1), r(0, 1)];
        v.sort();
        assert_eq!(v, vec![r(-3, 1), r(0, 1), r(1, 2), ExtRational::infinity()]);
    }

    #[test]
    fn vec2_promotes_on_overflow() {
        let mut v = Vec2::Small(i128::MAX - 1, 1);
        v.apply(MatLetter::B);
        v.apply(MatLetter::B);
        assert!(matches!(v, Vec2::Big(..)));
        v.apply(MatLetter::BInv);
        v.apply(MatLetter::BInv);
        assert_eq!(v.into_ext(), ExtRational::new(i128::MAX - 1, 1).unwrap());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(0..4u8, 0..=30).prop_map(|v| {
            Word::reduce(
                Context::Moduli,
                v.into_iter()
                    .map(|i| Letter::new(if i < 2 { Base::A } else { Base::B }, i % 2 == 1)),
            )
        })
    }

    fn arb_point() -> impl Strategy<Value = ExtRational> {
        (-500i64..500, 0i64..500).prop_filter_map("0/0", |(p, q)| ExtRational::new(p, q).ok())
    }

    proptest! {
        #[test]
        fn parity_preserved(w in arb_word(), x in arb_point()) {
            let m = word_to_matrix(&w).unwrap();
            prop_assert_eq!(m.act(&x).parity_class(), x.parity_class());
        }

        #[test]
        fn actions_compose(u in arb_word(), v in arb_word(), x in arb_point()) {
            let mu = word_to_matrix(&u).unwrap();
            let mv = word_to_matrix(&v).unwrap();
            prop_assert_eq!(mu.act(&mv.act(&x)), mu.mul(&mv).act(&x));
            let uv = &u * &v;
            prop_assert_eq!(
                right_act(&x, &uv).unwrap(),
                right_act(&right_act(&x, &u).unwrap(), &v).unwrap()
            );
            prop_assert_eq!(right_act(&x, &uv).unwrap(), word_to_matrix(&uv).unwrap().act(&x));
        }

        #[test]
        fn conjugated_fixed_points(w in arb_word(), k in 0usize..3) {
            use MatLetter::*;
            let v = [MobiusMat::product(&[A]), MobiusMat::product(&[B]), MobiusMat::product(&[BInv, AInv])][k].clone();
            let m = word_to_matrix(&w).unwrap();
            let c = m.mul(&v).mul(&m.inverse());
            prop_assert_eq!(c.fixed_point().unwrap(), m.act(&v.fixed_point().unwrap()));
        }
    }
}
