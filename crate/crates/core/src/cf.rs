//! Even continued-fraction machine: write p/q = ★.w with ★ ∈ {0/1, 1/0, 1/1}.
//!
//! Each step moves the point toward a terminal with one generator of P Γ(2)
//! and appends the inverse step to the word, so that
//! `act(∏ mat_letters, terminal) = x`.

use std::fmt;

use crate::projective::{mat_letters_to_word, ExtRational, MatLetter, MobiusMat, Region, Vec2};
use crate::words::Word;

/// One of the three orbit representatives the machine stops at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    Zero,
    Infinity,
    One,
}

impl Terminal {
    pub fn value(self) -> ExtRational {
        match self {
            Terminal::Zero => ExtRational::zero(),
            Terminal::Infinity => ExtRational::infinity(),
            Terminal::One => ExtRational::one(),
        }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Zero => "0/1",
            Terminal::Infinity => "1/0",
            Terminal::One => "1/1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub terminal: Terminal,
    /// Matrix letters in the order they were appended.
    pub mat_letters: Vec<MatLetter>,
    /// Image of `mat_letters` under the anti-isomorphism.
    pub fund_word: Word,
    /// True when the final step was −1/1 → 1/1.
    pub via_minus_one: bool,
}

/// Run the machine, returning only the appended letters.
pub(crate) fn decompose_letters(x: &ExtRational) -> (Terminal, Vec<MatLetter>, bool) {
    let mut v = x.to_vec2();
    let mut out = Vec::new();
    let mut via_minus_one = false;
    loop {
        let (apply, append) = match v.region() {
            Region::Zero => return (Terminal::Zero, out, via_minus_one),
            Region::Infinity => return (Terminal::Infinity, out, via_minus_one),
            Region::One => return (Terminal::One, out, via_minus_one),
            Region::MinusOne => {
                via_minus_one = true;
                (MatLetter::AInv, MatLetter::A)
            }
            Region::BelowMinusOne => (MatLetter::B, MatLetter::BInv),
            Region::MinusOneToZero => (MatLetter::AInv, MatLetter::A),
            Region::ZeroToOne => (MatLetter::A, MatLetter::AInv),
            Region::AboveOne => (MatLetter::BInv, MatLetter::B),
        };
        v.apply(apply);
        out.push(append);
    }
}

pub fn decompose(x: &ExtRational) -> Decomposition {
    let (terminal, mat_letters, via_minus_one) = decompose_letters(x);
    let fund_word = mat_letters_to_word(&mat_letters);
    Decomposition {
        terminal,
        mat_letters,
        fund_word,
        via_minus_one,
    }
}

pub fn recompose(d: &Decomposition) -> ExtRational {
    let mut v: Vec2 = d.terminal.value().to_vec2();
    for &l in d.mat_letters.iter().rev() {
        v.apply(l);
    }
    v.into_ext()
}

/// The transversal point fixed by a stabilizer base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabBase {
    /// A, fixing 0/1.
    A,
    /// B, fixing 1/0.
    B,
    /// B⁻¹A⁻¹, fixing −1/1.
    BInvAInv,
}

impl StabBase {
    pub fn letters(self) -> Vec<MatLetter> {
        match self {
            StabBase::A => vec![MatLetter::A],
            StabBase::B => vec![MatLetter::B],
            StabBase::BInvAInv => vec![MatLetter::BInv, MatLetter::AInv],
        }
    }

    pub fn matrix(self) -> MobiusMat {
        MobiusMat::product(&self.letters())
    }
}

impl fmt::Display for StabBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabBase::A => "A",
            StabBase::B => "B",
            StabBase::BInvAInv => "B^-1 A^-1",
        })
    }
}

/// `(w, v)` such that `w v w⁻¹` generates the parabolic stabilizer of x.
///
/// A 1/1 terminal is read through −1/1 = A.(1/1): the trailing A is absorbed
/// into the transversal point −1/1.
pub fn stabilizer(x: &ExtRational) -> (Vec<MatLetter>, StabBase) {
    let d = decompose(x);
    match d.terminal {
        Terminal::Zero => (d.mat_letters, StabBase::A),
        Terminal::Infinity => (d.mat_letters, StabBase::B),
        Terminal::One => {
            let mut w = d.mat_letters;
            w.push(MatLetter::AInv);
            (crate::projective::reduce_mat_letters(w), StabBase::BInvAInv)
        }
    }
}

pub fn stabilizer_matrix(x: &ExtRational) -> MobiusMat {
    let (w, v) = stabilizer(x);
    let m = MobiusMat::product(&w);
    m.mul(&v.matrix()).mul(&m.inverse())
}

/// Step labels followed by the terminal, e.g. `[A^-1;B^-1;B^-1;A^-1;1/0]`.
pub fn cf_labels(d: &Decomposition) -> String {
    let mut parts: Vec<String> = d.mat_letters.iter().map(|l| l.to_string()).collect();
    parts.push(d.terminal.to_string());
    format!("[{}]", parts.join(";"))
}
