//! The boundary pullback σ on Q ∪ {1/0}, its twisted variants, orbits and
//! scans over all fractions of bounded height.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_integer::Integer;

use crate::cf::{decompose, stabilizer, StabBase, Terminal};
use crate::error::{Error, Result};
use crate::par::{map_ordered, Exec};
use crate::projective::{right_act, word_to_matrix, ExtRational, ParityClass};
use crate::schreier::{in_h, left_coset, LeftCoset};
use crate::virtualendo::{phi, phi_bar, section};
use crate::words::{Base, Context, Letter, Word};

/// Default iteration cap for orbits.
pub const DEFAULT_ORBIT_CAP: usize = 100_000;

fn swap(t: Terminal) -> ExtRational {
    match t {
        Terminal::Zero => ExtRational::infinity(),
        Terminal::Infinity => ExtRational::zero(),
        Terminal::One => ExtRational::minus_one(),
    }
}

/// σ(★.w) = swap(★).φ̄(w), except that for ★ = 1/0 and w ∈ α⁻¹H the
/// conjugator is β⁻¹φ̄(w), as φ on cubes of β-twists dictates. Without that
/// factor the value would depend on which word represents the point.
pub fn sigma(x: &ExtRational) -> ExtRational {
    let d = decompose(x);
    let mut img = phi_bar(&d.fund_word).expect("machine words are moduli words");
    if d.terminal == Terminal::Infinity && left_coset(&d.fund_word) == LeftCoset::AInvH {
        img = img.prepend(Letter::inv(Base::B));
    }
    right_act(&swap(d.terminal), &img).expect("moduli word")
}

/// The decomposition formula taken literally, with no β⁻¹ factor.
/// Kept for comparison; it disagrees with [`sigma`] on part of the 1/0 orbit.
pub fn sigma_literal(x: &ExtRational) -> ExtRational {
    let d = decompose(x);
    let img = phi_bar(&d.fund_word).expect("machine words are moduli words");
    right_act(&swap(d.terminal), &img).expect("moduli word")
}

/// σ through the stabilizer: the fixed point of φ applied to the cube of the
/// Dehn twist about x.
pub fn sigma_via_stabilizer(x: &ExtRational) -> Result<ExtRational> {
    let (w, v) = stabilizer(x);
    let tw = crate::projective::mat_letters_to_word(&w);
    let tv = Word::m(match v {
        StabBase::A => "a",
        StabBase::B => "b",
        StabBase::BInvAInv => "AB",
    });
    let twist = Word::conjugate(&tv.pow(3), &tw)?;
    let img =
        phi(&twist).map_err(|e| Error::Inconsistent(format!("cube of twist about {x}: {e}")))?;
    let m = word_to_matrix(&img)?;
    m.fixed_point()
        .map_err(|_| Error::Inconsistent(format!("phi({twist}) = {img} is not parabolic")))
}

/// σ_{f·h}(x) = σ_f(M(h)⁻¹.x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMap {
    twist: Word,
    twist_inv: Word,
}

impl BoundaryMap {
    pub fn untwisted() -> Self {
        BoundaryMap {
            twist: Word::identity(Context::Moduli),
            twist_inv: Word::identity(Context::Moduli),
        }
    }

    pub fn twisted(h: &Word) -> Result<Self> {
        if h.context() != Context::Moduli {
            return Err(Error::ContextMismatch {
                left: h.context(),
                right: Context::Moduli,
            });
        }
        Ok(BoundaryMap {
            twist: h.clone(),
            twist_inv: h.inverse(),
        })
    }

    pub fn twist(&self) -> &Word {
        &self.twist
    }

    pub fn is_untwisted(&self) -> bool {
        self.twist.is_identity()
    }

    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        if self.twist.is_identity() {
            return sigma(x);
        }
        // x.h⁻¹ is M(h)⁻¹ acting on x
        sigma(&right_act(x, &self.twist_inv).expect("moduli word"))
    }
}

pub fn sigma_twisted(h: &Word, x: &ExtRational) -> Result<ExtRational> {
    Ok(BoundaryMap::twisted(h)?.apply(x))
}

/// Rotate a cycle so its least element comes first.
pub fn canonical_cycle(cycle: &[ExtRational]) -> Vec<ExtRational> {
    let Some(i) = cycle
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
    else {
        return Vec::new();
    };
    cycle[i..].iter().chain(&cycle[..i]).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub seed: ExtRational,
    pub tail: Vec<ExtRational>,
    /// In the order first reached; see [`OrbitReport::canonical_cycle`].
    pub cycle: Vec<ExtRational>,
    pub steps_to_cycle: usize,
}

impl OrbitReport {
    pub fn canonical_cycle(&self) -> Vec<ExtRational> {
        canonical_cycle(&self.cycle)
    }
}

pub fn format_points(v: &[ExtRational]) -> String {
    format!(
        "[{}]",
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    )
}

impl fmt::Display for OrbitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed  {}", self.seed)?;
        writeln!(f, "tail  {}", format_points(&self.tail))?;
        writeln!(f, "cycle {}", format_points(&self.cycle))?;
        write!(f, "steps {}", self.steps_to_cycle)
    }
}

pub fn orbit_with(
    map: impl Fn(&ExtRational) -> ExtRational,
    seed: &ExtRational,
    cap: usize,
) -> Result<OrbitReport> {
    let mut seen: HashMap<ExtRational, usize> = HashMap::new();
    let mut seq = Vec::new();
    let mut x = seed.clone();
    loop {
        if let Some(&i) = seen.get(&x) {
            let cycle = seq.split_off(i);
            return Ok(OrbitReport {
                seed: seed.clone(),
                steps_to_cycle: seq.len(),
                tail: seq,
                cycle,
            });
        }
        if seq.len() >= cap {
            return Err(Error::CapExceeded { cap });
        }
        seen.insert(x.clone(), seq.len());
        let next = map(&x);
        seq.push(x);
        x = next;
    }
}

pub fn orbit(map: &BoundaryMap, seed: &ExtRational, cap: usize) -> Result<OrbitReport> {
    orbit_with(|x| map.apply(x), seed, cap)
}

/// All reduced fractions with denominator q and |p| ≤ height, in increasing p.
pub fn seeds_with_denominator(q: u64, height: u64) -> Vec<ExtRational> {
    if q == 0 {
        return vec![ExtRational::infinity()];
    }
    let h = height as i64;
    let q = q as i64;
    (-h..=h)
        .filter(|&p| p.gcd(&q) == 1)
        .map(|p| ExtRational::from_i64(p, q))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExceptionKind {
    CapExceeded,
    /// The untwisted orbit ended on the wrong cycle for the parity of the seed.
    ParityRule {
        cycle: Vec<ExtRational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanException {
    pub seed: ExtRational,
    pub kind: ExceptionKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityCounts {
    pub oo: usize,
    pub oe: usize,
    pub eo: usize,
}

impl ParityCounts {
    fn bump(&mut self, c: ParityClass) {
        match c {
            ParityClass::OO => self.oo += 1,
            ParityClass::OE => self.oe += 1,
            ParityClass::EO => self.eo += 1,
        }
    }

    fn add(&mut self, o: &ParityCounts) {
        self.oo += o.oo;
        self.oe += o.oe;
        self.eo += o.eo;
    }

    pub fn total(&self) -> usize {
        self.oo + self.oe + self.eo
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorSummary {
    pub height: u64,
    pub twist: Word,
    pub seeds: usize,
    /// Canonical cycle ↦ seeds landing on it, by parity class.
    pub cycles: BTreeMap<Vec<ExtRational>, ParityCounts>,
    pub exceptions: Vec<ScanException>,
}

impl AttractorSummary {
    pub fn cycle_set(&self) -> Vec<Vec<ExtRational>> {
        self.cycles.keys().cloned().collect()
    }

    pub fn two_cycles(&self) -> usize {
        self.cycles.keys().filter(|c| c.len() == 2).count()
    }

    pub fn fixed_points(&self) -> usize {
        self.cycles.keys().filter(|c| c.len() == 1).count()
    }
}

impl fmt::Display for AttractorSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "twist {}  height {}  seeds {}",
            self.twist, self.height, self.seeds
        )?;
        for (c, n) in &self.cycles {
            writeln!(
                f,
                "cycle {}  odd/odd {}  odd/even {}  even/odd {}",
                format_points(c),
                n.oo,
                n.oe,
                n.eo
            )?;
        }
        write!(f, "exceptions {}", self.exceptions.len())?;
        for e in self.exceptions.iter().take(20) {
            write!(f, "\n  {} {:?}", e.seed, e.kind)?;
        }
        Ok(())
    }
}

fn expected_untwisted_cycle(c: ParityClass) -> Vec<ExtRational> {
    match c {
        ParityClass::OO => vec![ExtRational::minus_one()],
        _ => vec![ExtRational::zero(), ExtRational::infinity()],
    }
}

struct ChunkResult {
    seeds: usize,
    cycles: BTreeMap<Vec<ExtRational>, ParityCounts>,
    exceptions: Vec<ScanException>,
}

/// Orbit fates for one block of seeds, memoized within the block.
fn scan_chunk(map: &BoundaryMap, seeds: Vec<ExtRational>, cap: usize) -> ChunkResult {
    let mut fate: HashMap<ExtRational, usize> = HashMap::new();
    let mut cycles: Vec<Vec<ExtRational>> = Vec::new();
    let mut counts: Vec<ParityCounts> = Vec::new();
    let mut exceptions = Vec::new();
    let n = seeds.len();
    for seed in seeds {
        let mut path: Vec<ExtRational> = Vec::new();
        let mut on_path: HashMap<ExtRational, usize> = HashMap::new();
        let mut x = seed.clone();
        let outcome = loop {
            if let Some(&id) = fate.get(&x) {
                break Some(id);
            }
            if let Some(&i) = on_path.get(&x) {
                let c = canonical_cycle(&path[i..]);
                let id = match cycles.iter().position(|k| *k == c) {
                    Some(id) => id,
                    None => {
                        cycles.push(c);
                        counts.push(ParityCounts::default());
                        cycles.len() - 1
                    }
                };
                break Some(id);
            }
            if path.len() >= cap {
                break None;
            }
            on_path.insert(x.clone(), path.len());
            let next = map.apply(&x);
            path.push(x);
            x = next;
        };
        match outcome {
            Some(id) => {
                for p in path {
                    fate.insert(p, id);
                }
                let class = seed.parity_class();
                counts[id].bump(class);
                if map.is_untwisted() && cycles[id] != expected_untwisted_cycle(class) {
                    exceptions.push(ScanException {
                        seed,
                        kind: ExceptionKind::ParityRule {
                            cycle: cycles[id].clone(),
                        },
                    });
                }
            }
            None => exceptions.push(ScanException {
                seed,
                kind: ExceptionKind::CapExceeded,
            }),
        }
    }
    ChunkResult {
        seeds: n,
        cycles: cycles.into_iter().zip(counts).collect(),
        exceptions,
    }
}

/// Denominator blocks small enough to balance across workers.
fn denominator_blocks(height: u64) -> Vec<(u64, u64)> {
    let step = 8u64;
    let mut out = Vec::new();
    let mut lo = 0;
    while lo <= height {
        let hi = (lo + step - 1).min(height);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

/// Classify the eventual cycle of every reduced fraction of height ≤ `height`.
pub fn attractor_scan(map: &BoundaryMap, height: u64, cap: usize, exec: Exec) -> AttractorSummary {
    let blocks = denominator_blocks(height);
    let parts = map_ordered(exec, blocks, |(lo, hi)| {
        let seeds: Vec<ExtRational> = (lo..=hi)
            .flat_map(|q| seeds_with_denominator(q, height))
            .collect();
        scan_chunk(map, seeds, cap)
    });
    let mut summary = AttractorSummary {
        height,
        twist: map.twist().clone(),
        seeds: 0,
        cycles: BTreeMap::new(),
        exceptions: Vec::new(),
    };
    for part in parts {
        summary.seeds += part.seeds;
        for (c, n) in part.cycles {
            summary.cycles.entry(c).or_default().add(&n);
        }
        summary.exceptions.extend(part.exceptions);
    }
    summary
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotRow {
    pub p: BigInt,
    pub q: BigInt,
    pub sp: BigInt,
    pub sq: BigInt,
}

/// (x, σ(x)) for every reduced x of height ≤ `height`, sorted by (q, p).
pub fn plot_rows(map: &BoundaryMap, height: u64, exec: Exec) -> Vec<PlotRow> {
    let qs: Vec<u64> = (0..=height).collect();
    map_ordered(exec, qs, |q| {
        seeds_with_denominator(q, height)
            .into_iter()
            .map(|x| {
                let s = map.apply(&x);
                PlotRow {
                    p: x.numer().clone(),
                    q: x.denom().clone(),
                    sp: s.numer().clone(),
                    sq: s.denom().clone(),
                }
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn write_plot_csv<W: Write>(rows: &[PlotRow], mut out: W) -> io::Result<()> {
    writeln!(out, "p,q,sp,sq")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.p, r.q, r.sp, r.sq)?;
    }
    Ok(())
}

/// `count` distinct points mapped onto `target` by σ.
///
/// Writes target = ★′.w′, lifts w′ through the section s and prepends powers of
/// β²α², which lies in the kernel of φ.
pub fn preimage_family(target: &ExtRational, count: usize) -> Vec<ExtRational> {
    let d = decompose(target);
    let (seed, w) = match d.terminal {
        Terminal::Zero => (ExtRational::infinity(), d.fund_word),
        Terminal::Infinity => (ExtRational::zero(), d.fund_word),
        // 1/1 = (−1/1).α⁻¹ and σ sends 1/1 to −1/1
        Terminal::One => (ExtRational::one(), &Word::m("A") * &d.fund_word),
    };
    let lift = section(&w);
    let kernel = Word::m("bbaa");
    (0..count as i64)
        .map(|j| right_act(&seed, &(&kernel.pow(j) * &lift)).expect("moduli word"))
        .collect()
}

/// σ(x.w) = σ(x).φ(w) for w ∈ H.
pub fn verify_functional_equation(x: &ExtRational, w: &Word) -> Result<bool> {
    if !in_h(w) {
        return Err(Error::NotInH(w.to_string()));
    }
    let lhs = sigma(&right_act(x, w)?);
    let rhs = right_act(&sigma(x), &phi(w)?)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schreier::tests::{arb_h_word, arb_moduli_word};
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> ExtRational {
        ExtRational::from_i64(p, q)
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&r(203, 356)), r(-50, 33));
        assert_eq!(sigma(&r(1, 1)), r(-1, 1));
        assert_eq!(sigma(&r(1, 3)), r(-1, 1));
        assert_eq!(sigma(&r(3, 2)), r(-2, 3));
        assert_eq!(sigma(&r(-2, 1)), r(1, 0));
        assert_eq!(sigma(&r(-1, 2)), r(0, 1));
        // the literal formula gives 0/1 here; the stabilizer gives −2/1
        assert_eq!(sigma_literal(&r(1, 2)), r(0, 1));
        assert_eq!(sigma(&r(1, 2)), r(-2, 1));
        assert_eq!(sigma_via_stabilizer(&r(1, 2)).unwrap(), r(-2, 1));
        assert_eq!(sigma(&r(2, 1)), r(-1, 2));
    }

    #[test]
    fn stabilizer_oracle_examples() {
        assert_eq!(sigma_via_stabilizer(&r(0, 1)).unwrap(), r(1, 0));
        assert_eq!(sigma_via_stabilizer(&r(1, 0)).unwrap(), r(0, 1));
        assert_eq!(sigma_via_stabilizer(&r(9, 5)).unwrap(), sigma(&r(9, 5)));
    }

    #[test]
    fn twisted_examples() {
        let b = Word::m("b");
        assert_eq!(sigma_twisted(&b, &r(-1, 1)).unwrap(), r(1, 1));
        assert_eq!(sigma_twisted(&b, &r(1, 1)).unwrap(), r(-1, 1));
        assert_eq!(sigma_twisted(&b, &r(0, 1)).unwrap(), r(1, 0));
        assert_eq!(
            sigma_twisted(&Word::m(""), &r(7, 12)).unwrap(),
            sigma(&r(7, 12))
        );
    }

    #[test]
    fn orbit_examples() {
        let f = BoundaryMap::untwisted();
        let o = orbit(&f, &r(203, 356), 100).unwrap();
        assert_eq!(
            o.tail,
            vec![r(203, 356), r(-50, 33), r(-13, 6), r(6, 1), r(-1, 2)]
        );
        assert_eq!(o.cycle, vec![r(0, 1), r(1, 0)]);
        let o = orbit_with(sigma_literal, &r(203, 354), 100).unwrap();
        assert_eq!(o.tail, vec![r(203, 354), r(-28, 19), r(-7, 4), r(-4, 1)]);
        assert_eq!(o.cycle, vec![r(1, 0), r(0, 1)]);
        let o = orbit(&f, &r(203, 354), 100).unwrap();
        assert_eq!(o.tail, vec![r(203, 354), r(-34, 23), r(-7, 4), r(-4, 1)]);
        assert_eq!(o.cycle, vec![r(1, 0), r(0, 1)]);
        assert_eq!(o.canonical_cycle(), vec![r(0, 1), r(1, 0)]);
        let o = orbit(&f, &r(-1, 1), 100).unwrap();
        assert!(o.tail.is_empty());
        assert_eq!(o.cycle, vec![r(-1, 1)]);
        assert!(matches!(
            orbit(&f, &r(203, 356), 3),
            Err(Error::CapExceeded { cap: 3 })
        ));
    }

    #[test]
    fn small_scans() {
        let s = attractor_scan(
            &BoundaryMap::untwisted(),
            60,
            DEFAULT_ORBIT_CAP,
            Exec::Sequential,
        );
        assert!(s.exceptions.is_empty(), "{s}");
        assert_eq!(s.cycle_set(), vec![vec![r(-1, 1)], vec![r(0, 1), r(1, 0)]]);
        let p = attractor_scan(
            &BoundaryMap::untwisted(),
            60,
            DEFAULT_ORBIT_CAP,
            Exec::Parallel,
        );
        assert_eq!(s, p);

        let fb = BoundaryMap::twisted(&Word::m("b")).unwrap();
        let s = attractor_scan(&fb, 50, DEFAULT_ORBIT_CAP, Exec::Parallel);
        assert_eq!(
            s.cycle_set(),
            vec![vec![r(-1, 1), r(1, 1)], vec![r(0, 1), r(1, 0)]]
        );

        let fa = BoundaryMap::twisted(&Word::m("A")).unwrap();
        assert!(attractor_scan(&fa, 50, DEFAULT_ORBIT_CAP, Exec::Parallel).two_cycles() >= 2);
    }

    #[test]
    fn plot_is_sorted() {
        let rows = plot_rows(&BoundaryMap::untwisted(), 6, Exec::Parallel);
        assert_eq!(
            (rows[0].p.clone(), rows[0].q.clone()),
            (BigInt::from(1), BigInt::from(0))
        );
        let keys: Vec<_> = rows.iter().map(|r| (r.q.clone(), r.p.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let mut buf = Vec::new();
        write_plot_csv(&rows[..2], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "p,q,sp,sq\n1,0,0,1\n-6,1,1,2\n"
        );
    }

    #[test]
    fn fibers() {
        for k in -10i64..=10 {
            let x = right_act(&r(0, 1), &Word::m("bbaa").pow(k)).unwrap();
            assert_eq!(sigma(&x), r(1, 0));
        }
        let fam = preimage_family(&r(1, 0), 5);
        assert_eq!(fam.len(), 5);
        assert_eq!(fam[0], r(0, 1));
        for x in &fam {
            assert_eq!(sigma(x), r(1, 0));
        }
        let fam = preimage_family(&r(-50, 33), 3);
        for x in &fam {
            assert_eq!(sigma(x), r(-50, 33));
        }
        let one = preimage_family(&r(0, 1), 1);
        assert_eq!(sigma(&one[0]), r(0, 1));
    }

    #[test]
    fn functional_equation_examples() {
        assert!(verify_functional_equation(&r(1, 1), &Word::m("BA")).unwrap());
        assert!(verify_functional_equation(&r(0, 1), &Word::m("")).unwrap());
        assert!(verify_functional_equation(&r(0, 1), &Word::m("a")).is_err());
    }

    fn arb_point(h: i64) -> impl Strategy<Value = ExtRational> {
        (-h..=h, 0..=h).prop_filter_map("0/0", |(p, q)| ExtRational::new(p, q).ok())
    }

    proptest! {
        #[test]
        fn functional_equation(x in arb_point(100), w in arb_h_word(40)) {
            prop_assert!(verify_functional_equation(&x, &w).unwrap());
        }

        #[test]
        fn stabilizer_oracle(x in arb_point(200)) {
            prop_assert_eq!(sigma_via_stabilizer(&x).unwrap(), sigma(&x));
        }

        #[test]
        fn inversion_symmetry(x in arb_point(300)) {
            prop_assert_eq!(sigma(&x.reciprocal()), sigma(&x).reciprocal());
        }

        #[test]
        fn family_distinct(x in arb_point(50), k in 1usize..6) {
            let fam = preimage_family(&x, k);
            for (i, y) in fam.iter().enumerate() {
                prop_assert_eq!(sigma(y), x.clone());
                prop_assert!(!fam[..i].contains(y));
            }
        }

        #[test]
        fn twisting_by_h_word(h in arb_moduli_word(6), x in arb_point(50)) {
            // σ_{f·h} agrees with σ_f after moving x by h⁻¹
            let lhs = sigma_twisted(&h, &x).unwrap();
            let m = word_to_matrix(&h).unwrap().inverse();
            prop_assert_eq!(lhs, sigma(&m.act(&x)));
        }
    }
}
