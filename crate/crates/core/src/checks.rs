//! The acceptance table: one check per criterion, each returning the items
//! that failed. Shared by `verify` in the CLI and the acceptance test.

use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::{
    attractor_scan, orbit, preimage_family, sigma, sigma_via_stabilizer,
    verify_functional_equation, BoundaryMap, DEFAULT_ORBIT_CAP,
};
use crate::par::Exec;
use crate::projective::{right_act, ExtRational, ParityClass};
use crate::schreier::{coset_of, expand, in_h, rewrite, rewrite_factors, H_GENERATORS};
use crate::twister::{classify_with, default_cap, reduce_to_m, TwistKind};
use crate::virtualendo::{generator_image, phi, phi_via_rewrite};
use crate::words::{Base, Context, Letter, Word};
use crate::wreath::{nucleus_search, phi_cross_check, Perm, Recursion, WreathElement};

pub const ORBIT_TIME_LIMIT: Duration = Duration::from_millis(1);
pub const SCAN_TIME_LIMIT: Duration = Duration::from_secs(60);
pub const SCAN_HEIGHT: u64 = 1000;
pub const ORACLE_HEIGHT: i64 = 200;
pub const INVERSION_HEIGHT: i64 = 300;
pub const PARITY_HEIGHT: i64 = 500;
pub const RANDOM_H_WORDS: usize = 10_000;
pub const H_WORD_LEN: usize = 64;
pub const FE_PAIRS: usize = 1_000;
pub const TWIST_WORDS: usize = 2_000;
pub const SEED: u64 = 0x5eed_f00d;

pub const TITLES: [&str; 10] = [
    "sample orbits",
    "finite global attractor",
    "oracle equivalence",
    "transducer",
    "rewriting",
    "point and family identities",
    "functional equation",
    "fibers",
    "wreath engine",
    "twisting",
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    /// Short item label plus detail for each failed item.
    pub failures: Vec<(String, String)>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed_items(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.failures.iter().map(|(i, _)| i.as_str()).collect();
        v.dedup();
        v
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} {status}  {} ({:.1?})",
            self.id, self.title, self.elapsed
        )?;
        for (item, detail) in self.failures.iter().take(8) {
            write!(f, "\n    {item}: {detail}")?;
        }
        if self.failures.len() > 8 {
            write!(f, "\n    ... {} more", self.failures.len() - 8)?;
        }
        Ok(())
    }
}

struct Log(Vec<(String, String)>);

impl Log {
    fn check(&mut self, ok: bool, item: impl Into<String>, detail: impl FnOnce() -> String) {
        if !ok {
            self.0.push((item.into(), detail()));
        }
    }
}

pub fn run(id: usize, exec: Exec) -> Outcome {
    let start = Instant::now();
    let mut log = Log(Vec::new());
    match id {
        1 => sample_orbits(&mut log),
        2 => attractor(&mut log, exec),
        3 => oracle(&mut log),
        4 => transducer(&mut log),
        5 => rewriting(&mut log),
        6 => identities(&mut log),
        7 => functional_equation(&mut log),
        8 => fibers(&mut log),
        9 => wreath_engine(&mut log),
        10 => twisting(&mut log, exec),
        _ => log.check(false, "unknown criterion", || id.to_string()),
    }
    Outcome {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("?"),
        failures: log.0,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(exec: Exec) -> Vec<Outcome> {
    (1..=10).map(|id| run(id, exec)).collect()
}

fn r(p: i64, q: i64) -> ExtRational {
    ExtRational::from_i64(p, q)
}

fn pts(v: &[ExtRational]) -> String {
    crate::boundary::format_points(v)
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

const MODULI: [(Base, bool); 4] = [
    (Base::A, false),
    (Base::A, true),
    (Base::B, false),
    (Base::B, true),
];

/// Uniform letters, freely reduced afterwards; length at most `max_len`.
pub fn random_moduli_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    let mut w = Word::identity(Context::Moduli);
    for _ in 0..n {
        let (b, inv) = MODULI[rng.gen_range(0..4)];
        w.push(Letter::new(b, inv));
    }
    w
}

/// A random word in H of length at most `max_len`: a random word followed by
/// the inverse of its coset representative.
pub fn random_h_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let w = random_moduli_word(rng, max_len.saturating_sub(1));
    let h = &w * &coset_of(&w).rep().inverse();
    debug_assert!(in_h(&h));
    h
}

/// A random reduced fraction of height ≤ `height` (1/0 included).
pub fn random_fraction(rng: &mut impl Rng, height: i64) -> ExtRational {
    loop {
        let p = rng.gen_range(-height..=height);
        let q = rng.gen_range(0..=height);
        if (p, q) != (0, 0) && p.gcd(&q) == 1 && (q != 0 || p == 1) {
            return r(p, q);
        }
    }
}

fn fractions(height: i64) -> impl Iterator<Item = ExtRational> {
    (0..=height).flat_map(move |q| {
        (-height..=height).filter_map(move |p| {
            let ok = if q == 0 { p == 1 } else { p.gcd(&q) == 1 };
            ok.then(|| r(p, q))
        })
    })
}

fn sample_orbits(log: &mut Log) {
    let map = BoundaryMap::untwisted();
    let cases = [
        (
            (203, 356),
            vec![r(203, 356), r(-50, 33), r(-13, 6), r(6, 1), r(-1, 2)],
            vec![r(0, 1), r(1, 0)],
        ),
        (
            (203, 354),
            vec![r(203, 354), r(-28, 19), r(-7, 4), r(-4, 1)],
            vec![r(1, 0), r(0, 1)],
        ),
    ];
    for ((p, q), tail, cycle) in cases {
        let item = format!("orbit {p}/{q}");
        let t = Instant::now();
        let got = orbit(&map, &r(p, q), DEFAULT_ORBIT_CAP);
        let dt = t.elapsed();
        match got {
            Ok(o) => {
                log.check(o.tail == tail && o.cycle == cycle, item.clone(), || {
                    format!(
                        "got {} -> {}, expected {} -> {}",
                        pts(&o.tail),
                        pts(&o.cycle),
                        pts(&tail),
                        pts(&cycle)
                    )
                });
                log.check(dt < ORBIT_TIME_LIMIT, item, || format!("took {dt:?}"));
            }
            Err(e) => log.check(false, item, || e.to_string()),
        }
    }
}

fn attractor(log: &mut Log, exec: Exec) {
    let t = Instant::now();
    let ev = attractor_scan(
        &BoundaryMap::untwisted(),
        SCAN_HEIGHT,
        DEFAULT_ORBIT_CAP,
        exec,
    );
    let dt = t.elapsed();
    let fixed = vec![r(-1, 1)];
    let two = vec![r(0, 1), r(1, 0)];
    log.check(ev.exceptions.is_empty(), "exceptions", || {
        format!(
            "{} exceptions, first {:?}",
            ev.exceptions.len(),
            ev.exceptions.first()
        )
    });
    log.check(
        ev.cycle_set() == vec![fixed.clone(), two.clone()],
        "cycle set",
        || format!("{:?}", ev.cycle_set()),
    );
    if let Some(c) = ev.cycles.get(&fixed) {
        log.check(
            c.oe == 0 && c.eo == 0 && c.oo > 0,
            "parity of -1/1 basin",
            || format!("{c:?}"),
        );
    }
    if let Some(c) = ev.cycles.get(&two) {
        log.check(
            c.oo == 0 && c.oe > 0 && c.eo > 0,
            "parity of 2-cycle basin",
            || format!("{c:?}"),
        );
    }
    let expected_seeds = fractions(SCAN_HEIGHT as i64).count();
    log.check(ev.seeds == expected_seeds, "seed count", || {
        format!("{} seeds, expected {expected_seeds}", ev.seeds)
    });
    log.check(dt < SCAN_TIME_LIMIT, "time", || format!("took {dt:?}"));
}

fn oracle(log: &mut Log) {
    for x in fractions(ORACLE_HEIGHT) {
        let s = sigma(&x);
        match sigma_via_stabilizer(&x) {
            Ok(o) => log.check(o == s, "sigma = stabilizer oracle", || {
                format!("{x}: {s} vs {o}")
            }),
            Err(e) => log.check(false, "stabilizer oracle error", || format!("{x}: {e}")),
        }
    }
}

fn transducer(log: &mut Log) {
    let m = Word::m;
    let eq = |log: &mut Log, item: &str, w: &str, want: &str| {
        let got = phi(&m(w))
            .map(|g| g.to_string())
            .unwrap_or_else(|e| e.to_string());
        log.check(got == m(want).to_string(), item, || {
            format!("phi({w}) = {got}, expected {want}")
        });
    };
    eq(log, "worked example", "aaBABaaB", "bAbb");
    for (g, want) in H_GENERATORS.iter().zip(["b", "B", "AB", "b", "a"]) {
        log.check(generator_image(*g) == m(want), "generator table", || {
            format!("{g}")
        });
        eq(log, "generator images", &g.word().to_string(), want);
    }
    eq(log, "cubes", "aaa", "b");
    eq(log, "cubes", "bbb", "a");
    let gamma_cubed = Word::m("ccc");
    let got = phi(&gamma_cubed).map_err(|e| e.to_string());
    log.check(got == Ok(Word::m("c")), "cubes", || {
        format!("phi(ccc) = {got:?}")
    });
    let mut rng = rng();
    for _ in 0..RANDOM_H_WORDS {
        let w = random_h_word(&mut rng, H_WORD_LEN);
        let a = phi(&w).map_err(|e| e.to_string());
        let b = phi_via_rewrite(&w).map_err(|e| e.to_string());
        log.check(a.is_ok() && a == b, "transducer = rewrite", || {
            format!("{w}: {a:?} vs {b:?}")
        });
    }
}

fn rewriting(log: &mut Log) {
    let trace = rewrite_factors(&Word::m("abbAB")).map_err(|e| e.to_string());
    let want: Vec<Word> = ["", "ab", "", "bAB", ""]
        .iter()
        .map(|s| Word::m(s))
        .collect();
    log.check(trace.as_ref() == Ok(&want), "factor trace", || {
        format!("{trace:?}")
    });
    let mut rng = rng();
    for _ in 0..RANDOM_H_WORDS {
        let w = random_h_word(&mut rng, H_WORD_LEN);
        match rewrite(&w) {
            Ok(f) => log.check(expand(&f) == w, "expand(rewrite(w)) = w", || w.to_string()),
            Err(e) => log.check(false, "rewrite error", || format!("{w}: {e}")),
        }
    }
}

fn identities(log: &mut Log) {
    let pairs = [
        ((1, 1), (-1, 1)),
        ((1, 3), (-1, 1)),
        ((-2, 1), (1, 0)),
        ((1, 2), (0, 1)),
        ((-1, 2), (0, 1)),
    ];
    for ((p, q), (a, b)) in pairs {
        let got = sigma(&r(p, q));
        log.check(got == r(a, b), format!("sigma({p}/{q})"), || {
            format!("got {got}, expected {a}/{b}")
        });
    }
    for n in 1..=100i64 {
        let got = sigma(&r(n + 1, n));
        log.check(got == r(-n, n + 1), "sigma((n+1)/n)", || {
            format!("n={n}: got {got}")
        });
        let want = if n % 2 == 1 {
            r(-(n - 1), n - 2)
        } else {
            r(-(n + 1), n)
        };
        let got = sigma(&r(n, n + 1));
        let item = if n % 2 == 1 {
            "sigma(n/(n+1)) odd n"
        } else {
            "sigma(n/(n+1)) even n"
        };
        log.check(got == want, item, || {
            format!("n={n}: got {got}, expected {want}")
        });
    }
    for x in fractions(INVERSION_HEIGHT) {
        let lhs = sigma(&x.reciprocal());
        let rhs = sigma(&x).reciprocal();
        log.check(lhs == rhs, "inversion symmetry", || {
            format!("{x}: {lhs} vs {rhs}")
        });
    }
    for x in fractions(PARITY_HEIGHT) {
        let want = match x.parity_class() {
            ParityClass::OO => ParityClass::OO,
            ParityClass::OE => ParityClass::EO,
            ParityClass::EO => ParityClass::OE,
        };
        let got = sigma(&x).parity_class();
        log.check(got == want, "parity transitions", || format!("{x}: {got}"));
    }
}

fn functional_equation(log: &mut Log) {
    let mut rng = rng();
    for _ in 0..FE_PAIRS {
        let x = random_fraction(&mut rng, 100);
        let w = random_h_word(&mut rng, 40);
        let ok = verify_functional_equation(&x, &w).map_err(|e| e.to_string());
        log.check(ok == Ok(true), "sigma(x.w) = sigma(x).phi(w)", || {
            format!("x={x}, w={w}: {ok:?}")
        });
    }
}

fn fibers(log: &mut Log) {
    let kernel = Word::m("bbaa");
    for k in -10..=10 {
        let x = right_act(&ExtRational::zero(), &kernel.pow(k)).expect("moduli word");
        let s = sigma(&x);
        log.check(s.is_infinity(), "sigma(0/1.(b^2a^2)^k) = 1/0", || {
            format!("k={k}: {x} -> {s}")
        });
    }
    let mut rng = rng();
    for _ in 0..300 {
        let target = random_fraction(&mut rng, 50);
        let k = rng.gen_range(1..=6);
        let fam = preimage_family(&target, k);
        let mut sorted = fam.clone();
        sorted.sort();
        sorted.dedup();
        log.check(
            fam.len() == k && sorted.len() == k,
            "distinct preimages",
            || format!("{target}: {}", pts(&fam)),
        );
        for x in &fam {
            let s = sigma(x);
            log.check(s == target, "preimage maps to target", || {
                format!("{x} -> {s}, target {target}")
            });
        }
    }
}

fn wreath_engine(log: &mut Log) {
    let m = Word::m;
    let el = |secs: [&str; 4], perm: &str| WreathElement {
        sections: secs.iter().map(|s| m(s)).collect(),
        perm: Perm::parse_cycles(4, perm).expect("cycle literal"),
    };
    let u = el(["", "ba", "a", "B"], "(1 4 2)");
    let v = el(["ba", "A", "", "b"], "(1 3 4)");
    let prod = u.mul(&v).map_err(|e| e.to_string());
    log.check(
        prod == Ok(el(["b", "baba", "a", "BA"], "(2 3 4)")),
        "worked product",
        || format!("{prod:?}"),
    );

    let phi_m = Recursion::builtin("phi-moduli").expect("built-in");
    for n in 1..=6i64 {
        let got = phi_m.apply(&m("ba").pow(3 * n)).map_err(|e| e.to_string());
        let want = WreathElement {
            sections: vec![
                m("ba").pow(n),
                m("ba").pow(n),
                m("ba").pow(3 * n),
                m("ab").pow(n),
            ],
            perm: Perm::identity(4),
        };
        log.check(got == Ok(want), "non-contraction witness", || {
            format!("n={n}: {got:?}")
        });
    }

    let phi_f = Recursion::builtin("phi-f").expect("built-in");
    let rel = Word::parse(Context::Free4, "acbd").expect("word literal");
    let got = phi_f
        .apply(&rel)
        .map(|e| e.is_identity())
        .map_err(|e| e.to_string());
    log.check(got == Ok(true), "relation acbd", || format!("{got:?}"));

    let b2 = Recursion::builtin("phi-f-b2").expect("built-in");
    match nucleus_search(&b2, 200, 50) {
        Ok(res) => log.check(res.is_contracting(), "nucleus of f.b^2", || res.to_string()),
        Err(e) => log.check(false, "nucleus of f.b^2", || e.to_string()),
    }

    let mut rng = rng();
    for _ in 0..RANDOM_H_WORDS {
        let w = random_h_word(&mut rng, H_WORD_LEN);
        let ok = phi_cross_check(&w).map_err(|e| e.to_string());
        log.check(ok == Ok(true), "phi cross-check", || format!("{w}: {ok:?}"));
    }
}

fn twisting(log: &mut Log, exec: Exec) {
    let table: [(&str, TwistKind); 7] = [
        ("", TwistKind::RationalF),
        ("bb", TwistKind::RationalF),
        ("aB", TwistKind::RationalF),
        ("b", TwistKind::RationalG),
        ("A", TwistKind::RationalG),
        ("aaB", TwistKind::RationalG),
        ("AbA", TwistKind::RationalG),
    ];
    let family = (-5..=5).map(|k| {
        (
            (&Word::m("a") * &Word::m("ba").pow(k)),
            TwistKind::Obstructed { k },
        )
    });
    let cases = table.iter().map(|(s, k)| (Word::m(s), *k)).chain(family);
    for (w, want) in cases {
        let got = classify_with(&w, default_cap(&w), exec);
        match got {
            Ok(c) => {
                log.check(c.kind == want, "classify table", || {
                    format!("{w}: {} expected {want}", c.kind)
                });
                if w == Word::m("b") {
                    let cyc = c.evidence_cycles();
                    let want = vec![vec![r(-1, 1), r(1, 1)], vec![r(0, 1), r(1, 0)]];
                    log.check(cyc == want, "evidence for f.b", || format!("{cyc:?}"));
                }
                if w == Word::m("A") || w == Word::m("aaB") {
                    let n = c.evidence.as_ref().map_or(0, |e| e.two_cycles());
                    log.check(n >= 2, "two 2-cycles", || format!("{w}: {n}"));
                }
            }
            Err(e) => log.check(false, "classify table", || format!("{w}: {e}")),
        }
    }
    let mut rng = rng();
    for _ in 0..TWIST_WORDS {
        let g = random_moduli_word(&mut rng, 40);
        let cap = 10 * g.len();
        let got = reduce_to_m(&g, cap.max(1));
        log.check(got.is_ok(), "reach M within 10 len", || {
            format!("{g}: {got:?}")
        });
    }
}
