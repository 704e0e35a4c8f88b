//! The virtual endomorphism φ: H → G, its total extensions φ̄ and ψ̄, and the
//! action of φ on parabolic elements.

use std::fmt;

use crate::error::{Error, Result};
use crate::schreier::{
    self, left_coset, right_coset, CosetState, HGenerator, LeftCoset, RightCoset,
};
use crate::words::{Base, Context, Letter, Word};

/// φ on the generators of H.
pub fn generator_image(g: HGenerator) -> Word {
    Word::m(match g {
        HGenerator::G1 => "b",
        HGenerator::G2 => "B",
        HGenerator::G3 => "AB",
        HGenerator::G4 => "b",
        HGenerator::G5 => "a",
    })
}

/// Output of the transducer on each transition, columns α, α⁻¹, β, β⁻¹.
const EMIT: [[&str; 4]; 4] = [
    ["", "", "", "AB"],
    ["b", "B", "B", ""],
    ["b", "", "ba", "b"],
    ["", "B", "a", "A"],
];

fn emission_table() -> &'static [[Word; 4]; 4] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[[Word; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| EMIT.map(|row| row.map(Word::m)))
}

fn require_moduli(w: &Word) -> Result<()> {
    if w.context() != Context::Moduli {
        return Err(Error::ContextMismatch {
            left: w.context(),
            right: Context::Moduli,
        });
    }
    Ok(())
}

/// φ by the transducer. Errors if `w ∉ H`.
pub fn phi(w: &Word) -> Result<Word> {
    require_moduli(w)?;
    let table = emission_table();
    let mut s = CosetState::S1;
    let mut out = Word::identity(Context::Moduli);
    for &l in w.letters() {
        let li = schreier::letter_index(l);
        for &x in table[s.index()][li].letters() {
            out.push(x);
        }
        s = schreier::step(s, l);
    }
    if s != CosetState::S1 {
        return Err(Error::NotInH(w.to_string()));
    }
    Ok(out)
}

/// φ by Reidemeister–Schreier rewriting and the generator images.
pub fn phi_via_rewrite(w: &Word) -> Result<Word> {
    let mut out = Word::identity(Context::Moduli);
    for f in schreier::rewrite(w)? {
        let img = generator_image(f.gen);
        let img = if f.inverse { img.inverse() } else { img };
        out = &out * &img;
    }
    Ok(out)
}

fn gen_word(base: Base) -> Word {
    Word::letter(Context::Moduli, Letter::gen(base))
}

/// φ̄, extending φ to all of G through left cosets.
pub fn phi_bar(w: &Word) -> Result<Word> {
    require_moduli(w)?;
    let h = match left_coset(w) {
        LeftCoset::H => w.clone(),
        LeftCoset::BInvH => w.prepend(Letter::gen(Base::B)),
        LeftCoset::AH => w.prepend(Letter::inv(Base::A)),
        LeftCoset::AInvH => w.prepend(Letter::gen(Base::A)),
    };
    phi(&h)
}

/// ψ̄, extending φ to all of G through right cosets.
pub fn psi_bar(g: &Word) -> Result<Word> {
    require_moduli(g)?;
    let (prefix, h) = match right_coset(g) {
        RightCoset::H => (None, g.clone()),
        RightCoset::HA => (Some(Letter::gen(Base::A)), g * &gen_word(Base::A).inverse()),
        RightCoset::HAInv => (Some(Letter::inv(Base::A)), g * &gen_word(Base::A)),
        RightCoset::HB => (Some(Letter::gen(Base::B)), g * &gen_word(Base::B).inverse()),
    };
    let img = phi(&h)?;
    Ok(match prefix {
        Some(l) => img.prepend(l),
        None => img,
    })
}

/// Letterwise section with φ ∘ s = id: s(α) = α⁻¹βα, s(β) = βαβ⁻¹.
pub fn section(w: &Word) -> Word {
    let sa = Word::m("Aba");
    let sb = Word::m("baB");
    let mut out = Word::identity(Context::Moduli);
    for &l in w.letters() {
        let img = match l.base {
            Base::A => &sa,
            Base::B => &sb,
            _ => panic!("section is defined on moduli words"),
        };
        let img = if l.inverse {
            img.inverse()
        } else {
            img.clone()
        };
        for &x in img.letters() {
            out.push(x);
        }
    }
    out
}

/// `x^{n·w} = w⁻¹ xⁿ w` with x one of α, β, γ = α⁻¹β⁻¹, δ = β⁻¹α⁻¹.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParabolicForm {
    pub base: Base,
    pub exponent: i64,
    pub conj: Word,
}

impl ParabolicForm {
    /// Builds a form and strips leading powers of the base from the conjugator.
    pub fn new(base: Base, exponent: i64, conj: Word) -> Self {
        let b = base_word(base);
        let bi = b.inverse();
        let mut conj = conj;
        loop {
            if !b.is_empty() && conj.starts_with(&b) {
                conj = conj.drop_front(b.len());
            } else if !bi.is_empty() && conj.starts_with(&bi) {
                conj = conj.drop_front(bi.len());
            } else {
                break;
            }
        }
        ParabolicForm {
            base,
            exponent,
            conj,
        }
    }

    pub fn to_word(&self) -> Word {
        Word::conjugate(&base_word(self.base).pow(self.exponent), &self.conj).expect("moduli words")
    }
}

impl fmt::Display for ParabolicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.base {
            Base::A => 'a',
            Base::B => 'b',
            Base::C => 'c',
            Base::D => 'd',
        };
        write!(f, "{name}^{{{}*{}}}", self.exponent, self.conj)
    }
}

pub fn base_word(base: Base) -> Word {
    Word::m(match base {
        Base::A => "a",
        Base::B => "b",
        Base::C => "c",
        Base::D => "d",
    })
}

/// Predicted image `(base, k-independent exponent factor, conjugator)` for φ(x^{3n·w}).
/// `None` in the factor slot means the exponent is `k·n` with k ∈ {1, 3}.
fn predicted(base: Base, w: &Word) -> Result<(Base, Option<i64>, Word)> {
    let pb = phi_bar(w)?;
    let lc = left_coset(w);
    Ok(match base {
        Base::A => (Base::B, None, pb),
        Base::B => match lc {
            LeftCoset::AInvH => (Base::A, Some(1), &Word::m("B") * &pb),
            _ => (Base::A, None, pb),
        },
        Base::C => match lc {
            LeftCoset::H | LeftCoset::AInvH => (Base::C, None, pb),
            _ => (Base::D, Some(1), pb),
        },
        Base::D => (Base::C, None, pb),
    })
}

/// φ(w⁻¹ x^{3n} w), computed directly and matched against the predicted form.
pub fn phi_parabolic(p: &ParabolicForm) -> Result<ParabolicForm> {
    if p.exponent % 3 != 0 {
        return Err(Error::ExponentNotCube(p.exponent));
    }
    let n = p.exponent / 3;
    let direct = phi(&p.to_word())?;
    let (base, fixed, conj) = predicted(p.base, &p.conj)?;
    let ks: &[i64] = match fixed {
        Some(k) => &[k],
        None => &[1, 3],
    };
    for &k in ks {
        let cand = ParabolicForm::new(base, k * n, conj.clone());
        if cand.to_word() == direct {
            return Ok(cand);
        }
    }
    Err(Error::Inconsistent(format!(
        "phi({p}) = {direct} does not match the predicted base {base:?} with conjugator {conj}"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    /// Forms after each application, starting with the input.
    pub trace: Vec<ParabolicForm>,
    /// False when the cap ran out before the conjugator became trivial.
    pub completed: bool,
}

pub fn default_elimination_cap(p: &ParabolicForm) -> usize {
    10 * (p.conj.len() + 3)
}

/// Iterate φ on suitable powers until the conjugator is trivial.
///
/// Exponents are tracked projectively: every step re-cubes the current form,
/// so the trace records the per-step factor k rather than the accumulated 3ⁿ.
pub fn eliminate_conjugator(p: &ParabolicForm, cap: usize) -> Result<Elimination> {
    let mut cur = ParabolicForm::new(p.base, p.exponent, p.conj.clone());
    let mut trace = vec![cur.clone()];
    for _ in 0..cap {
        let next = phi_parabolic(&ParabolicForm::new(cur.base, 3, cur.conj.clone()))?;
        trace.push(next.clone());
        if next.conj.is_identity() {
            return Ok(Elimination {
                trace,
                completed: true,
            });
        }
        cur = next;
    }
    Ok(Elimination {
        trace,
        completed: false,
    })
}
