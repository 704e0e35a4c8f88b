//! Freely reduced words over the twist generators.
//!
//! Text syntax: `a b c d` are the generators α β γ δ and `A B C D` their
//! inverses. `e` (or an empty string) is the identity. Which letters are stored
//! depends on the [`Context`]:
//!
//! * [`Context::Moduli`] stores α, β only. `c` expands to α⁻¹β⁻¹ and `d` to β⁻¹α⁻¹.
//! * [`Context::Dynamical`] stores α, β, γ. `d` expands to β⁻¹γ⁻¹α⁻¹, from αγβδ = 1.
//! * [`Context::Free4`] stores all four generators with no relation.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A,
    B,
    C,
    D,
}

impl Base {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Base> {
        match i {
            0 => Some(Base::A),
            1 => Some(Base::B),
            2 => Some(Base::C),
            3 => Some(Base::D),
            _ => None,
        }
    }

    fn lower(self) -> char {
        match self {
            Base::A => 'a',
            Base::B => 'b',
            Base::C => 'c',
            Base::D => 'd',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub base: Base,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(base: Base, inverse: bool) -> Self {
        Letter { base, inverse }
    }

    pub const fn gen(base: Base) -> Self {
        Letter {
            base,
            inverse: false,
        }
    }

    pub const fn inv(base: Base) -> Self {
        Letter {
            base,
            inverse: true,
        }
    }

    pub fn inverted(self) -> Self {
        Letter {
            base: self.base,
            inverse: !self.inverse,
        }
    }

    pub fn to_char(self) -> char {
        let c = self.base.lower();
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(ch: char) -> Option<Letter> {
        let base = match ch.to_ascii_lowercase() {
            'a' => Base::A,
            'b' => Base::B,
            'c' => Base::C,
            'd' => Base::D,
            _ => return None,
        };
        Some(Letter {
            base,
            inverse: ch.is_ascii_uppercase(),
        })
    }
}

/// The group a word lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Context {
    /// π₁ of the moduli space: free on α, β.
    Moduli,
    /// Dynamical-plane group: free on α, β, γ with δ = β⁻¹γ⁻¹α⁻¹.
    Dynamical,
    /// Free group on α, β, γ, δ.
    Free4,
}

impl Context {
    pub fn stores(self, base: Base) -> bool {
        match self {
            Context::Moduli => matches!(base, Base::A | Base::B),
            Context::Dynamical => !matches!(base, Base::D),
            Context::Free4 => true,
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Context::Moduli => 2,
            Context::Dynamical => 3,
            Context::Free4 => 4,
        }
    }

    /// Expansion of a generator in this context, or `None` if it is not defined here.
    fn expand(self, l: Letter) -> Option<Vec<Letter>> {
        if self.stores(l.base) {
            return Some(vec![l]);
        }
        use Base::*;
        let fwd = match (self, l.base) {
            (Context::Moduli, C) => vec![Letter::inv(A), Letter::inv(B)],
            (Context::Moduli, D) => vec![Letter::inv(B), Letter::inv(A)],
            (Context::Dynamical, D) => vec![Letter::inv(B), Letter::inv(C), Letter::inv(A)],
            _ => return None,
        };
        if l.inverse {
            Some(fwd.into_iter().rev().map(Letter::inverted).collect())
        } else {
            Some(fwd)
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Context::Moduli => "moduli",
            Context::Dynamical => "dynamical",
            Context::Free4 => "free4",
        };
        f.write_str(s)
    }
}

/// A freely reduced word. The reduction invariant holds for every value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    ctx: Context,
    letters: Vec<Letter>,
}

/// Push a letter onto a reduced stack, cancelling against the top.
#[inline]
fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverted()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

impl Word {
    pub fn identity(ctx: Context) -> Self {
        Word {
            ctx,
            letters: Vec::new(),
        }
    }

    /// Reduce an arbitrary letter sequence. Letters must be stored bases of `ctx`.
    pub fn reduce<I: IntoIterator<Item = Letter>>(ctx: Context, letters: I) -> Self {
        let mut stack = Vec::new();
        for l in letters {
            debug_assert!(ctx.stores(l.base), "{l:?} not stored in {ctx}");
            push_reduced(&mut stack, l);
        }
        Word {
            ctx,
            letters: stack,
        }
    }

    pub fn letter(ctx: Context, l: Letter) -> Self {
        Word::reduce(ctx, [l])
    }

    pub fn parse(ctx: Context, text: &str) -> Result<Self> {
        let mut stack = Vec::new();
        for ch in text.chars() {
            if ch.is_whitespace() || ch == '.' || ch == '*' {
                continue;
            }
            if ch == 'e' || ch == '1' {
                continue;
            }
            let l = Letter::from_char(ch).ok_or(Error::InvalidChar { ch })?;
            let expanded = ctx.expand(l).ok_or(Error::BaseNotAllowed { ch, ctx })?;
            for x in expanded {
                push_reduced(&mut stack, x);
            }
        }
        Ok(Word {
            ctx,
            letters: stack,
        })
    }

    /// Moduli-context parse for literals known to be valid.
    ///
    /// # Panics
    /// On invalid text.
    pub fn m(text: &str) -> Self {
        Word::parse(Context::Moduli, text).expect("valid moduli word literal")
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch {
                left: self.ctx,
                right: other.ctx,
            });
        }
        let mut stack = self.letters.clone();
        stack.reserve(other.letters.len());
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(Word {
            ctx: self.ctx,
            letters: stack,
        })
    }

    /// Append a single letter in place.
    pub fn push(&mut self, l: Letter) {
        debug_assert!(self.ctx.stores(l.base));
        push_reduced(&mut self.letters, l);
    }

    /// Prepend a single letter.
    pub fn prepend(&self, l: Letter) -> Word {
        Word::reduce(
            self.ctx,
            std::iter::once(l).chain(self.letters.iter().copied()),
        )
    }

    pub fn inverse(&self) -> Word {
        Word {
            ctx: self.ctx,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// `w⁻¹ g w`, written g^w.
    pub fn conjugate(g: &Word, w: &Word) -> Result<Word> {
        w.inverse().concat(g)?.concat(w)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.ctx);
        for _ in 0..n.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut out.letters, l);
            }
        }
        out
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.letters.starts_with(&prefix.letters)
    }

    /// Drop the first `n` letters (the result is still reduced).
    pub fn drop_front(&self, n: usize) -> Word {
        Word {
            ctx: self.ctx,
            letters: self.letters[n.min(self.len())..].to_vec(),
        }
    }

    /// Same letters viewed in another context that stores them.
    pub fn with_context(&self, ctx: Context) -> Result<Word> {
        for l in &self.letters {
            if !ctx.stores(l.base) {
                return Err(Error::BaseNotAllowed {
                    ch: l.to_char(),
                    ctx,
                });
            }
        }
        Ok(Word {
            ctx,
            letters: self.letters.clone(),
        })
    }

    /// Re-read the word in `ctx`, expanding letters that `ctx` does not store.
    pub fn expand_into(&self, ctx: Context) -> Result<Word> {
        let mut out = Word::identity(ctx);
        for &l in &self.letters {
            let ex = ctx.expand(l).ok_or(Error::BaseNotAllowed {
                ch: l.to_char(),
                ctx,
            })?;
            for x in ex {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Split into `(u, c)` with `self = u⁻¹ c u` and `c` cyclically reduced.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverted() {
            k += 1;
        }
        let u = Word {
            ctx: self.ctx,
            letters: l[l.len() - k..].to_vec(),
        };
        let c = Word {
            ctx: self.ctx,
            letters: l[k..l.len() - k].to_vec(),
        };
        (u, c)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// # Panics
/// If the two words live in different contexts.
impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs).expect("word product across contexts")
    }
}

impl Mul<Word> for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}
