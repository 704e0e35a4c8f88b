//! The twisting problem: push a mapping class by ψ̄ into the finite limit set
//! 𝔐 and read off which rational map f·g is equivalent to.

use std::fmt;

use crate::boundary::{
    attractor_scan, AttractorSummary, BoundaryMap, ExceptionKind, DEFAULT_ORBIT_CAP,
};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::projective::ExtRational;
use crate::virtualendo::psi_bar;
use crate::words::{Context, Word};

/// Seeds of height ≤ this are scanned for evidence.
pub const EVIDENCE_HEIGHT: u64 = 50;

/// An element of the limit set 𝔐.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MElement {
    Identity,
    B,
    AInv,
    AABInv,
    AInvBAInv,
    ABInv,
    BB,
    /// α(βα)^k.
    Family(i64),
}

const TAGS: [(MElement, &str); 7] = [
    (MElement::Identity, ""),
    (MElement::B, "b"),
    (MElement::AInv, "A"),
    (MElement::AABInv, "aaB"),
    (MElement::AInvBAInv, "AbA"),
    (MElement::ABInv, "aB"),
    (MElement::BB, "bb"),
];

impl MElement {
    pub const FINITE: [MElement; 7] = [
        MElement::Identity,
        MElement::B,
        MElement::AInv,
        MElement::AABInv,
        MElement::AInvBAInv,
        MElement::ABInv,
        MElement::BB,
    ];

    pub fn to_word(self) -> Word {
        match self {
            MElement::Family(k) => family_word(k),
            other => Word::m(
                TAGS.iter()
                    .find(|(e, _)| *e == other)
                    .expect("finite tag")
                    .1,
            ),
        }
    }

    /// Match a reduced moduli word against 𝔐.
    pub fn recognize(w: &Word) -> Option<MElement> {
        if w.context() != Context::Moduli {
            return None;
        }
        for (e, s) in TAGS {
            if *w == Word::m(s) {
                return Some(e);
            }
        }
        // α(βα)^k has length 2k+1 for k ≥ 0 and 2|k|−1 for k < 0
        let n = w.len() as i64;
        if n % 2 == 0 {
            return None;
        }
        [(n - 1) / 2, -(n + 1) / 2]
            .into_iter()
            .map(MElement::Family)
            .find(|m| m.to_word() == *w)
    }
}

fn family_word(k: i64) -> Word {
    &Word::m("a") * &Word::m("ba").pow(k)
}

impl fmt::Display for MElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MElement::Identity => f.write_str("e"),
            MElement::Family(k) => write!(f, "a(ba)^{k}"),
            other => write!(f, "{}", other.to_word()),
        }
    }
}

/// Iterate ψ̄ until the word lands in 𝔐; returns the element and the number of steps.
pub fn reduce_to_m(g: &Word, cap: usize) -> Result<(MElement, usize)> {
    if g.context() != Context::Moduli {
        return Err(Error::ContextMismatch {
            left: g.context(),
            right: Context::Moduli,
        });
    }
    let mut cur = g.clone();
    for steps in 0..=cap {
        if let Some(m) = MElement::recognize(&cur) {
            return Ok((m, steps));
        }
        if steps < cap {
            cur = psi_bar(&cur)?;
        }
    }
    Err(Error::CapExceeded { cap })
}

/// ψ̄-step cap used by [`classify`].
pub fn default_cap(g: &Word) -> usize {
    10 * g.len().max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwistKind {
    RationalF,
    RationalG,
    Obstructed { k: i64 },
}

impl fmt::Display for TwistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwistKind::RationalF => f.write_str("RationalF"),
            TwistKind::RationalG => f.write_str("RationalG"),
            TwistKind::Obstructed { k } => write!(f, "Obstructed{{k={k}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistClass {
    pub kind: TwistKind,
    pub representative: MElement,
    pub steps: usize,
    /// Attractor of σ_{f·m} for the representative m; absent for obstructed maps.
    pub evidence: Option<AttractorSummary>,
}

impl TwistClass {
    pub fn evidence_cycles(&self) -> Vec<Vec<ExtRational>> {
        self.evidence
            .as_ref()
            .map(AttractorSummary::cycle_set)
            .unwrap_or_default()
    }
}

impl fmt::Display for TwistClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.kind)?;
        writeln!(f, "representative: {}", self.representative)?;
        write!(f, "steps: {}", self.steps)?;
        if self.evidence.is_some() {
            let cs: Vec<String> = self
                .evidence_cycles()
                .iter()
                .map(|c| {
                    format!(
                        "[{}]",
                        c.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
                .collect();
            write!(f, "\nevidence cycles: {}", cs.join(" "))?;
        }
        Ok(())
    }
}

pub fn kind_of(m: MElement) -> TwistKind {
    match m {
        MElement::Identity | MElement::BB | MElement::ABInv => TwistKind::RationalF,
        MElement::B | MElement::AInv | MElement::AABInv | MElement::AInvBAInv => {
            TwistKind::RationalG
        }
        MElement::Family(k) => TwistKind::Obstructed { k },
    }
}

/// Check the attractor against the class: f has one 2-cycle and one fixed
/// point (−1/1 when untwisted; twisting by β² moves it to 1/1), g has at
/// least two 2-cycles.
pub fn evidence_consistent(kind: TwistKind, ev: &AttractorSummary) -> bool {
    if ev
        .exceptions
        .iter()
        .any(|e| matches!(e.kind, ExceptionKind::CapExceeded))
    {
        return false;
    }
    match kind {
        TwistKind::RationalF => {
            ev.two_cycles() == 1 && ev.fixed_points() == 1 && ev.cycles.len() == 2
        }
        TwistKind::RationalG => ev.two_cycles() >= 2,
        TwistKind::Obstructed { .. } => true,
    }
}

pub fn classify(g: &Word) -> Result<TwistClass> {
    classify_with(g, default_cap(g), Exec::Parallel)
}

pub fn classify_with(g: &Word, cap: usize, exec: Exec) -> Result<TwistClass> {
    let (m, steps) = reduce_to_m(g, cap)?;
    let kind = kind_of(m);
    let evidence = match kind {
        TwistKind::Obstructed { .. } => None,
        _ => {
            let map = BoundaryMap::twisted(&m.to_word())?;
            let ev = attractor_scan(&map, EVIDENCE_HEIGHT, DEFAULT_ORBIT_CAP, exec);
            if !evidence_consistent(kind, &ev) {
                return Err(Error::Inconsistent(format!(
                    "attractor of f·{m} does not match {kind}: {} two-cycles, {} fixed points",
                    ev.two_cycles(),
                    ev.fixed_points()
                )));
            }
            Some(ev)
        }
    };
    Ok(TwistClass {
        kind,
        representative: m,
        steps,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> ExtRational {
        ExtRational::from_i64(p, q)
    }

    #[test]
    fn recognizer() {
        for e in MElement::FINITE {
            assert_eq!(MElement::recognize(&e.to_word()), Some(e));
        }
        for k in -10..=10 {
            assert_eq!(
                MElement::recognize(&family_word(k)),
                Some(MElement::Family(k))
            );
        }
        assert_eq!(
            MElement::recognize(&Word::m("B")),
            Some(MElement::Family(-1))
        );
        assert_eq!(MElement::recognize(&Word::m("ab")), None);
        assert_eq!(MElement::recognize(&Word::m("aa")), None);
    }

    #[test]
    fn fixed_and_two_cycles() {
        for s in ["", "b", "A"] {
            assert_eq!(psi_bar(&Word::m(s)).unwrap(), Word::m(s));
        }
        for s in ["aaB", "AbA", "aB", "bb"] {
            let w = Word::m(s);
            let once = psi_bar(&w).unwrap();
            assert_ne!(once, w);
            assert_eq!(psi_bar(&once).unwrap(), w);
        }
    }

    #[test]
    fn closed_under_psi_bar() {
        let elems = MElement::FINITE
            .into_iter()
            .chain((-10..=10).map(MElement::Family));
        for e in elems {
            let img = psi_bar(&e.to_word()).unwrap();
            assert!(MElement::recognize(&img).is_some(), "psi_bar({e}) = {img}");
        }
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(
            reduce_to_m(&Word::m(""), 1).unwrap(),
            (MElement::Identity, 0)
        );
        assert_eq!(reduce_to_m(&Word::m("b"), 1).unwrap(), (MElement::B, 0));
        let g = Word::m("abbAB");
        let (m, steps) = reduce_to_m(&g, 10 * g.len()).unwrap();
        assert!(steps <= 50, "{m} {steps}");
    }

    #[test]
    fn classification_table() {
        for s in ["", "bb", "aB"] {
            assert_eq!(
                classify(&Word::m(s)).unwrap().kind,
                TwistKind::RationalF,
                "{s}"
            );
        }
        for s in ["b", "A", "aaB", "AbA"] {
            assert_eq!(
                classify(&Word::m(s)).unwrap().kind,
                TwistKind::RationalG,
                "{s}"
            );
        }
        for k in -3..=3 {
            let c = classify(&family_word(k)).unwrap();
            assert_eq!(c.kind, TwistKind::Obstructed { k });
            assert!(c.evidence.is_none());
        }
        let c = classify(&Word::m("")).unwrap();
        assert_eq!(
            c.evidence_cycles(),
            vec![vec![r(-1, 1)], vec![r(0, 1), r(1, 0)]]
        );
        let c = classify(&Word::m("bb")).unwrap();
        assert_eq!(
            c.evidence_cycles(),
            vec![vec![r(0, 1), r(1, 0)], vec![r(1, 1)]]
        );
        let c = classify(&Word::m("b")).unwrap();
        assert_eq!(
            c.evidence_cycles(),
            vec![vec![r(-1, 1), r(1, 1)], vec![r(0, 1), r(1, 0)]]
        );
    }

    fn arb_moduli(max: usize) -> impl Strategy<Value = Word> {
        crate::schreier::tests::arb_moduli_word(max)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn reaches_m(g in arb_moduli(40)) {
            let cap = default_cap(&g);
            prop_assert!(reduce_to_m(&g, cap).is_ok());
        }

        #[test]
        fn constant_on_orbits(g in arb_moduli(20)) {
            let a = reduce_to_m(&g, default_cap(&g)).unwrap().0;
            let b = reduce_to_m(&psi_bar(&g).unwrap(), default_cap(&g)).unwrap().0;
            prop_assert_eq!(kind_of(a), kind_of(b));
        }
    }
}
