//! The index-4 subgroup H < ⟨α, β⟩: coset automaton, Reidemeister–Schreier
//! rewriting and coset labels.
//!
//! States are the right cosets H, Hβ, Hα, Hα⁻¹ with transversal
//! representatives e, β, α, α⁻¹. Reading a word left to right from `S1`
//! lands on the coset of the word.

use std::fmt;

use crate::error::{Error, Result};
use crate::words::{Base, Context, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetState {
    S1,
    SB,
    SA,
    SAInv,
}

pub const STATES: [CosetState; 4] = [
    CosetState::S1,
    CosetState::SB,
    CosetState::SA,
    CosetState::SAInv,
];

/// Moduli letters in table column order α, α⁻¹, β, β⁻¹.
pub const MODULI_LETTERS: [Letter; 4] = [
    Letter::gen(Base::A),
    Letter::inv(Base::A),
    Letter::gen(Base::B),
    Letter::inv(Base::B),
];

use CosetState::*;

const STEP: [[CosetState; 4]; 4] = [
    [SA, SAInv, SB, SA],
    [SB, SB, SA, S1],
    [SAInv, S1, S1, SB],
    [S1, SA, SAInv, SAInv],
];

/// γ(t, s) for generator letters s ∈ {α, β}, straight from the table.
const GAMMA_GEN: [[&str; 2]; 4] = [["", ""], ["baB", "bbA"], ["aaa", "ab"], ["", "Aba"]];

impl CosetState {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Transversal representative.
    pub fn rep(self) -> Word {
        Word::m(match self {
            S1 => "",
            SB => "b",
            SA => "a",
            SAInv => "A",
        })
    }
}

impl fmt::Display for CosetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            S1 => "S1",
            SB => "Sb",
            SA => "Sa",
            SAInv => "SA",
        })
    }
}

pub(crate) fn letter_index(l: Letter) -> usize {
    match (l.base, l.inverse) {
        (Base::A, false) => 0,
        (Base::A, true) => 1,
        (Base::B, false) => 2,
        (Base::B, true) => 3,
        _ => panic!("{l:?} is not a moduli letter"),
    }
}

pub fn step(s: CosetState, l: Letter) -> CosetState {
    STEP[s.index()][letter_index(l)]
}

/// Run the automaton from `start`.
pub fn run(start: CosetState, w: &Word) -> CosetState {
    w.letters().iter().fold(start, |s, &l| step(s, l))
}

pub fn coset_of(w: &Word) -> CosetState {
    run(S1, w)
}

pub fn in_h(w: &Word) -> bool {
    coset_of(w) == S1
}

pub fn gamma(t: CosetState, l: Letter) -> Word {
    if l.inverse {
        gamma(step(t, l), l.inverted()).inverse()
    } else {
        let col = if l.base == Base::A { 0 } else { 1 };
        Word::m(GAMMA_GEN[t.index()][col])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HGenerator {
    G1,
    G2,
    G3,
    G4,
    G5,
}

pub const H_GENERATORS: [HGenerator; 5] = [
    HGenerator::G1,
    HGenerator::G2,
    HGenerator::G3,
    HGenerator::G4,
    HGenerator::G5,
];

impl HGenerator {
    pub fn word(self) -> Word {
        Word::m(match self {
            HGenerator::G1 => "baB",
            HGenerator::G2 => "bbA",
            HGenerator::G3 => "BA",
            HGenerator::G4 => "aaa",
            HGenerator::G5 => "Aba",
        })
    }
}

impl fmt::Display for HGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", *self as usize + 1)
    }
}

/// A generator of H or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HLetter {
    pub gen: HGenerator,
    pub inverse: bool,
}

impl HLetter {
    pub fn word(self) -> Word {
        let w = self.gen.word();
        if self.inverse {
            w.inverse()
        } else {
            w
        }
    }

    /// Match a non-trivial table value against the generators and their inverses.
    pub fn identify(w: &Word) -> Option<HLetter> {
        H_GENERATORS.iter().find_map(|&g| {
            let gw = g.word();
            if &gw == w {
                Some(HLetter {
                    gen: g,
                    inverse: false,
                })
            } else if gw.inverse() == *w {
                Some(HLetter {
                    gen: g,
                    inverse: true,
                })
            } else {
                None
            }
        })
    }
}

impl fmt::Display for HLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// The raw factors γ(t_i, s_i), one per letter, trivial ones included.
pub fn rewrite_factors(w: &Word) -> Result<Vec<Word>> {
    if w.context() != Context::Moduli {
        return Err(Error::ContextMismatch {
            left: w.context(),
            right: Context::Moduli,
        });
    }
    let mut s = S1;
    let mut out = Vec::with_capacity(w.len());
    for &l in w.letters() {
        out.push(gamma(s, l));
        s = step(s, l);
    }
    if s != S1 {
        return Err(Error::NotInH(w.to_string()));
    }
    Ok(out)
}

/// Reidemeister–Schreier rewriting of an element of H in the generators g1..g5.
pub fn rewrite(w: &Word) -> Result<Vec<HLetter>> {
    rewrite_factors(w)?
        .into_iter()
        .filter(|f| !f.is_identity())
        .map(|f| {
            HLetter::identify(&f)
                .ok_or_else(|| Error::Inconsistent(format!("table value {f} is not a generator")))
        })
        .collect()
}

pub fn expand(factors: &[HLetter]) -> Word {
    let mut out = Word::identity(Context::Moduli);
    for f in factors {
        for &l in f.word().letters() {
            out.push(l);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeftCoset {
    H,
    BInvH,
    AH,
    AInvH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RightCoset {
    H,
    HA,
    HAInv,
    HB,
}

impl fmt::Display for LeftCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LeftCoset::H => "H",
            LeftCoset::BInvH => "BH",
            LeftCoset::AH => "aH",
            LeftCoset::AInvH => "AH",
        })
    }
}

impl fmt::Display for RightCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RightCoset::H => "H",
            RightCoset::HA => "Ha",
            RightCoset::HAInv => "HA",
            RightCoset::HB => "Hb",
        })
    }
}

/// Which of βw, α⁻¹w, αw, w lies in H.
///
/// `xw ∈ H` exactly when the state of x equals the state of w⁻¹, so a single
/// run of the automaton over w⁻¹ decides it.
pub fn left_coset(w: &Word) -> LeftCoset {
    let s = w
        .letters()
        .iter()
        .rev()
        .fold(S1, |s, &l| step(s, l.inverted()));
    match s {
        S1 => LeftCoset::H,
        SB => LeftCoset::BInvH,
        SA => LeftCoset::AInvH,
        SAInv => LeftCoset::AH,
    }
}

pub fn right_coset(w: &Word) -> RightCoset {
    match coset_of(w) {
        S1 => RightCoset::H,
        SA => RightCoset::HA,
        SAInv => RightCoset::HAInv,
        SB => RightCoset::HB,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn arb_moduli_word(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0usize..4, 0..=max)
            .prop_map(|v| Word::reduce(Context::Moduli, v.into_iter().map(|i| MODULI_LETTERS[i])))
    }

    /// Random words forced into H by appending the inverse of a transversal rep.
    pub(crate) fn arb_h_word(max: usize) -> impl Strategy<Value = Word> {
        arb_moduli_word(max.saturating_sub(1)).prop_map(|w| {
            let r = coset_of(&w).rep();
            &w * &r.inverse()
        })
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(S1, Letter::inv(Base::B)), SA);
        assert_eq!(step(SA, Letter::gen(Base::B)), S1);
        assert_eq!(step(S1, Letter::gen(Base::A)), SA);
    }

    #[test]
    fn coset_examples() {
        assert!(in_h(&Word::m("ab")));
        assert_eq!(coset_of(&Word::m("a")), SA);
        assert_eq!(coset_of(&Word::m("bbb")), S1);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(SA, Letter::gen(Base::A)), Word::m("aaa"));
        assert_eq!(gamma(SAInv, Letter::gen(Base::B)), Word::m("Aba"));
        assert_eq!(gamma(S1, Letter::gen(Base::A)), Word::m(""));
        assert_eq!(gamma(SB, Letter::gen(Base::A)), Word::m("baB"));
        assert_eq!(gamma(SA, Letter::inv(Base::B)), Word::m("aBB"));
        assert_eq!(gamma(S1, Letter::inv(Base::B)), Word::m("BA"));
    }

    #[test]
    fn full_table() {
        // (state, letter, expected γ) for all sixteen entries
        let rows = [
            (S1, ["", "", "", "BA"]),
            (SB, ["baB", "bAB", "bbA", ""]),
            (SA, ["aaa", "", "ab", "aBB"]),
            (SAInv, ["", "AAA", "Aba", "ABa"]),
        ];
        for (s, vals) in rows {
            for (i, v) in vals.iter().enumerate() {
                assert_eq!(
                    gamma(s, MODULI_LETTERS[i]),
                    Word::m(v),
                    "γ({s}, {})",
                    MODULI_LETTERS[i].to_char()
                );
            }
        }
    }

    #[test]
    fn step_consistency_and_gamma_formula() {
        for s in STATES {
            for l in MODULI_LETTERS {
                assert_eq!(step(step(s, l), l.inverted()), s);
                let lw = Word::letter(Context::Moduli, l);
                let expected = &(&s.rep() * &lw) * &step(s, l).rep().inverse();
                assert_eq!(gamma(s, l), expected);
                assert!(in_h(&gamma(s, l)));
            }
        }
    }

    #[test]
    fn rewrite_examples() {
        let f = rewrite_factors(&Word::m("abbAB")).unwrap();
        let expect: Vec<Word> = ["", "ab", "", "bAB", ""]
            .iter()
            .map(|s| Word::m(s))
            .collect();
        assert_eq!(f, expect);
        let r = rewrite(&Word::m("abbAB")).unwrap();
        assert_eq!(
            r,
            vec![
                HLetter {
                    gen: HGenerator::G3,
                    inverse: true
                },
                HLetter {
                    gen: HGenerator::G1,
                    inverse: true
                }
            ]
        );
        assert!(rewrite(&Word::m("")).unwrap().is_empty());
        assert_eq!(
            rewrite(&Word::m("bbb")).unwrap(),
            vec![
                HLetter {
                    gen: HGenerator::G2,
                    inverse: false
                },
                HLetter {
                    gen: HGenerator::G3,
                    inverse: true
                }
            ]
        );
        assert!(matches!(rewrite(&Word::m("a")), Err(Error::NotInH(_))));
    }

    #[test]
    fn coset_label_examples() {
        assert_eq!(left_coset(&Word::m("A")), LeftCoset::AInvH);
        assert_eq!(right_coset(&Word::m("b")), RightCoset::HB);
        assert_eq!(left_coset(&Word::m("")), LeftCoset::H);
    }

    #[test]
    fn rank_of_h() {
        // index 4 in a free group of rank 2
        assert_eq!(H_GENERATORS.len(), 5);
        for g in H_GENERATORS {
            assert!(in_h(&g.word()));
        }
    }

    fn label_count_left(w: &Word) -> usize {
        let b = Word::m("b");
        let a = Word::m("a");
        [&b * w, &a.inverse() * w, &a * w, w.clone()]
            .iter()
            .filter(|x| in_h(x))
            .count()
    }

    fn label_count_right(w: &Word) -> usize {
        let b = Word::m("b");
        let a = Word::m("a");
        [w * &a.inverse(), w * &a, w * &b.inverse(), w.clone()]
            .iter()
            .filter(|x| in_h(x))
            .count()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn rewrite_expands_back(w in arb_h_word(64)) {
            prop_assert_eq!(expand(&rewrite(&w).unwrap()), w);
        }

        #[test]
        fn exactly_one_label(w in arb_moduli_word(40)) {
            prop_assert_eq!(label_count_left(&w), 1);
            prop_assert_eq!(label_count_right(&w), 1);
            let b = Word::m("b");
            let a = Word::m("a");
            let check_left = match left_coset(&w) {
                LeftCoset::H => w.clone(),
                LeftCoset::BInvH => &b * &w,
                LeftCoset::AH => &a.inverse() * &w,
                LeftCoset::AInvH => &a * &w,
            };
            prop_assert!(in_h(&check_left));
            let check_right = match right_coset(&w) {
                RightCoset::H => w.clone(),
                RightCoset::HA => &w * &a.inverse(),
                RightCoset::HAInv => &w * &a,
                RightCoset::HB => &w * &b.inverse(),
            };
            prop_assert!(in_h(&check_right));
        }

        #[test]
        fn cubes_act_trivially(w in arb_moduli_word(30), k in 0usize..4) {
            let x = Word::m(["a", "b", "c", "d"][k]);
            prop_assert!(in_h(&Word::conjugate(&x.pow(3), &w).unwrap()));
        }
    }
}
