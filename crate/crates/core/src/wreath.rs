//! Wreath recursions G → G ≀ S_d: the product, evaluation on words, sections
//! at tree addresses, level actions and a bounded nucleus search.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::par::{map_ordered, Exec};
use crate::schreier::in_h;
use crate::virtualendo::phi;
use crate::words::{Base, Context, Letter, Word};

/// A permutation of {0, …, d−1}, printed 1-indexed in cycle notation.
///
/// Products compose left to right: `(σ·τ)(i) = τ(σ(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm {
            images: (0..d).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::Inconsistent(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Parse 1-indexed cycle notation such as `(1 3)(2 4)`; `id` or empty is the identity.
    pub fn parse_cycles(d: usize, text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::RecursionParse {
            line: 0,
            msg: format!("{msg} in permutation {text:?}"),
        };
        let mut images: Vec<usize> = (0..d).collect();
        let mut moved = vec![false; d];
        let t = text.trim();
        if t.is_empty() || t == "id" || t == "()" {
            return Ok(Perm { images });
        }
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = open.find(')').ok_or_else(|| bad("missing ')'"))?;
            let body = &open[..close];
            let pts: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("bad point")))
                .collect::<Result<_>>()?;
            for &p in &pts {
                if p == 0 || p > d {
                    return Err(bad("point out of range"));
                }
                if moved[p - 1] {
                    return Err(bad("repeated point"));
                }
                moved[p - 1] = true;
            }
            for (i, &p) in pts.iter().enumerate() {
                images[p - 1] = pts[(i + 1) % pts.len()] - 1;
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// σ then τ.
    pub fn then(&self, tau: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&i| tau.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Perm { images: inv }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut i = self.images[start];
            while i != start {
                seen[i] = true;
                c.push(i);
                i = self.images[i];
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cs.is_empty() {
            return f.write_str("id");
        }
        for c in cs {
            let pts: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// Order of a permutation given as an image array: the lcm of its cycle lengths.
pub fn perm_order(images: &[u32]) -> BigUint {
    let mut seen = vec![false; images.len()];
    let mut order = BigUint::one();
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i] as usize;
            len += 1;
        }
        order = order.lcm(&BigUint::from(len));
    }
    order
}

/// `⟨⟨g₁, …, g_d⟩⟩σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub sections: Vec<Word>,
    pub perm: Perm,
}

impl WreathElement {
    pub fn identity(ctx: Context, d: usize) -> Self {
        WreathElement {
            sections: vec![Word::identity(ctx); d],
            perm: Perm::identity(d),
        }
    }

    pub fn degree(&self) -> usize {
        self.perm.degree()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.is_identity() && self.sections.iter().all(Word::is_identity)
    }

    /// `⟨⟨g⟩⟩σ · ⟨⟨h⟩⟩τ = ⟨⟨g_i h_{σ(i)}⟩⟩ στ`.
    pub fn mul(&self, other: &WreathElement) -> Result<WreathElement> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        let sections = self
            .sections
            .iter()
            .enumerate()
            .map(|(i, g)| g.concat(&other.sections[self.perm.apply(i)]))
            .collect::<Result<_>>()?;
        Ok(WreathElement {
            sections,
            perm: self.perm.then(&other.perm),
        })
    }

    pub fn inverse(&self) -> WreathElement {
        let inv = self.perm.inverse();
        let sections = (0..self.degree())
            .map(|i| self.sections[inv.apply(i)].inverse())
            .collect();
        WreathElement {
            sections,
            perm: inv,
        }
    }
}

impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.sections.iter().map(|w| w.to_string()).collect();
        write!(f, "<{}> {}", s.join(", "), self.perm)
    }
}

/// A wreath recursion: images of generators in `G ≀ S_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recursion {
    pub name: String,
    pub degree: usize,
    /// Group the section words live in.
    pub ctx: Context,
    images: BTreeMap<Base, WreathElement>,
}

pub const BUILTIN_NAMES: [&str; 4] = ["phi-moduli", "phi-f", "phi-g", "phi-f-b2"];

const PHI_MODULI: &str = "
degree 4
context moduli
gen a = <ba, b, A, e> (1 3 4)
gen b = <B, ba, e, a> (1 2 3)
";

const PHI_F: &str = "
degree 3
context dynamical
gen a = <e, e, b> (1 3)
gen b = <B, e, CD> (1 3)
gen c = <e, c, e> (2 3)
gen d = <d, e, e> (1 2)
";

const PHI_G: &str = "
degree 3
context free4
gen a = <e, BDC, e> (1 2)
gen b = <c, e, e> (1 2)
gen c = <e, db, D> (2 3)
gen d = <e, d, e> (2 3)
";

// The displayed images do not satisfy αγβδ = 1, so no relation is imposed.
const PHI_F_B2: &str = "
degree 3
context free4
gen a = <e, e, b> (1 3)
gen b = <a, e, e> (1 2)
gen c = <e, c, e> (2 3)
gen d = <e, c, AB> (2 3)
";

impl Recursion {
    pub fn builtin(name: &str) -> Result<Recursion> {
        let text = match name {
            "phi-moduli" => PHI_MODULI,
            "phi-f" => PHI_F,
            "phi-g" => PHI_G,
            "phi-f-b2" => PHI_F_B2,
            _ => return Err(Error::UnknownRecursion(name.to_string())),
        };
        let mut r = Recursion::parse(text)?;
        r.name = name.to_string();
        Ok(r)
    }

    /// Parse the line format:
    ///
    /// ```text
    /// degree 3
    /// context dynamical        # optional: moduli | dynamical | free4
    /// gen a = <e, e, b> (1 3)
    /// ```
    ///
    /// Without a `context` line the group is the moduli one when only `a`, `b`
    /// occur, and free of rank 4 otherwise.
    pub fn parse(text: &str) -> Result<Recursion> {
        let mut degree = None;
        let mut ctx = None;
        let mut raw: Vec<(usize, char, Vec<String>, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            let err = |msg: String| Error::RecursionParse { line: lineno, msg };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("degree") {
                let d: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad degree {:?}", rest.trim())))?;
                if d == 0 {
                    return Err(err("degree must be positive".into()));
                }
                degree = Some(d);
            } else if let Some(rest) = line.strip_prefix("context") {
                ctx = Some(match rest.trim() {
                    "moduli" => Context::Moduli,
                    "dynamical" => Context::Dynamical,
                    "free4" => Context::Free4,
                    other => return Err(err(format!("unknown context {other:?}"))),
                });
            } else if let Some(rest) = line.strip_prefix("gen") {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected '='".into()))?;
                let mut gch = lhs.trim().chars();
                let g = match (gch.next(), gch.next()) {
                    (Some(c @ 'a'..='d'), None) => c,
                    _ => return Err(err(format!("bad generator {:?}", lhs.trim()))),
                };
                let rhs = rhs.trim();
                let body = rhs
                    .strip_prefix('<')
                    .ok_or_else(|| err("expected '<'".into()))?;
                let close = body.find('>').ok_or_else(|| err("expected '>'".into()))?;
                let sections = body[..close]
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .collect();
                raw.push((lineno, g, sections, body[close + 1..].trim().to_string()));
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        let degree = degree.ok_or(Error::RecursionParse {
            line: 0,
            msg: "missing degree line".into(),
        })?;
        let ctx = ctx.unwrap_or_else(|| {
            let uses_cd = raw.iter().any(|(_, g, secs, _)| {
                matches!(g, 'c' | 'd') || secs.iter().any(|s| s.chars().any(|c| "cdCD".contains(c)))
            });
            if uses_cd {
                Context::Free4
            } else {
                Context::Moduli
            }
        });
        let mut images = BTreeMap::new();
        for (line, g, secs, perm) in raw {
            let err = |msg: String| Error::RecursionParse { line, msg };
            if secs.len() != degree {
                return Err(err(format!("{} sections for degree {degree}", secs.len())));
            }
            let sections = secs
                .iter()
                .map(|s| Word::parse(ctx, s).map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let perm = Perm::parse_cycles(degree, &perm).map_err(|e| err(e.to_string()))?;
            let base = Letter::from_char(g).expect("checked above").base;
            if images
                .insert(base, WreathElement { sections, perm })
                .is_some()
            {
                return Err(err(format!("generator {g} defined twice")));
            }
        }
        Ok(Recursion {
            name: String::new(),
            degree,
            ctx,
            images,
        })
    }

    pub fn image(&self, base: Base) -> Option<&WreathElement> {
        self.images.get(&base)
    }

    pub fn generators(&self) -> impl Iterator<Item = Base> + '_ {
        self.images.keys().copied()
    }

    /// Generator words in the section group.
    pub fn generator_words(&self) -> Vec<Word> {
        self.generators()
            .map(|b| {
                let l = Letter::gen(b).to_char().to_string();
                Word::parse(self.ctx, &l).expect("every context expands every generator")
            })
            .collect()
    }

    fn letter_image(&self, l: Letter) -> Result<WreathElement> {
        let img = self
            .images
            .get(&l.base)
            .ok_or(Error::UnknownGenerator(l.to_char()))?;
        Ok(if l.inverse {
            img.inverse()
        } else {
            img.clone()
        })
    }

    /// Evaluate the homomorphism on a word, letter by letter.
    pub fn apply(&self, w: &Word) -> Result<WreathElement> {
        let mut acc = WreathElement::identity(self.ctx, self.degree);
        for &l in w.letters() {
            acc = acc.mul(&self.letter_image(l)?)?;
        }
        Ok(acc)
    }

    /// Parse a word in the section group of this recursion.
    pub fn word(&self, text: &str) -> Result<Word> {
        Word::parse(self.ctx, text)
    }

    /// `g|_v` for a 1-indexed address string such as `"13"`.
    pub fn restriction(&self, w: &Word, address: &str) -> Result<Word> {
        let addr = parse_address(self.degree, address)?;
        self.restriction_at(w, &addr)
    }

    /// `g|_{xv} = (g|_x)|_v` with 0-indexed letters.
    pub fn restriction_at(&self, w: &Word, addr: &[usize]) -> Result<Word> {
        let mut cur = w.clone();
        for &x in addr {
            cur = self.apply(&cur)?.sections.swap_remove(x);
        }
        Ok(cur)
    }

    /// Image of the address under the tree action.
    pub fn act_on_address(&self, w: &Word, addr: &[usize]) -> Result<Vec<usize>> {
        let mut cur = w.clone();
        let mut out = Vec::with_capacity(addr.len());
        for &x in addr {
            let el = self.apply(&cur)?;
            out.push(el.perm.apply(x));
            cur = el.sections[x].clone();
        }
        Ok(out)
    }

    /// Permutation of X^n induced by `w`; addresses are read most significant letter first.
    pub fn act_level(&self, w: &Word, n: usize, exec: Exec) -> Result<Vec<u32>> {
        let size = (self.degree as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if n > MAX_LEVEL || size > MAX_LEVEL_SIZE {
            return Err(Error::LevelTooLarge {
                level: n,
                degree: self.degree,
            });
        }
        if n == 0 {
            return Ok(vec![0]);
        }
        let el = self.apply(w)?;
        let block = size as usize / self.degree;
        let subs = map_ordered(exec, el.sections.clone(), |s| {
            let mut memo = HashMap::new();
            self.level_rec(&s, n - 1, &mut memo)
        });
        let mut out = vec![0u32; size as usize];
        for (x, sub) in subs.into_iter().enumerate() {
            let sub = sub?;
            let base = (el.perm.apply(x) * block) as u32;
            for (u, &img) in sub.iter().enumerate() {
                out[x * block + u] = base + img;
            }
        }
        Ok(out)
    }

    fn level_rec(
        &self,
        w: &Word,
        n: usize,
        memo: &mut HashMap<(Word, usize), std::sync::Arc<Vec<u32>>>,
    ) -> Result<std::sync::Arc<Vec<u32>>> {
        if let Some(v) = memo.get(&(w.clone(), n)) {
            return Ok(v.clone());
        }
        let v = if n == 0 {
            vec![0]
        } else {
            let el = self.apply(w)?;
            let block = self.degree.pow(n as u32 - 1);
            let mut out = vec![0u32; block * self.degree];
            for x in 0..self.degree {
                let sub = self.level_rec(&el.sections[x], n - 1, memo)?;
                let base = (el.perm.apply(x) * block) as u32;
                for (u, &img) in sub.iter().enumerate() {
                    out[x * block + u] = base + img;
                }
            }
            out
        };
        let v = std::sync::Arc::new(v);
        memo.insert((w.clone(), n), v.clone());
        Ok(v)
    }
}

pub const MAX_LEVEL: usize = 12;
pub const MAX_LEVEL_SIZE: u128 = 1 << 24;

/// Parse `"13"` or `"1 3"` or `"1,3"` into 0-indexed letters.
pub fn parse_address(d: usize, text: &str) -> Result<Vec<usize>> {
    let bad = || Error::BadAddress(text.to_string());
    let t = text.trim();
    let parts: Vec<&str> = if t.contains(|c: char| c == ',' || c.is_whitespace()) {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect()
    } else {
        t.char_indices()
            .map(|(i, c)| &t[i..i + c.len_utf8()])
            .collect()
    };
    parts
        .into_iter()
        .map(|p| match p.parse::<usize>() {
            Ok(x) if (1..=d).contains(&x) => Ok(x - 1),
            _ => Err(bad()),
        })
        .collect()
}

/// Outcome of [`nucleus_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NucleusResult {
    Contracting {
        nucleus: Vec<Word>,
        /// Depth k with ((S ∪ N)²)|_{X^k} ⊆ N.
        depth: usize,
        rounds: usize,
    },
    Unknown {
        rounds: usize,
        /// Size of the last candidate set or closure that tripped a cap.
        size: usize,
        longest: Vec<Word>,
    },
}

impl NucleusResult {
    pub fn is_contracting(&self) -> bool {
        matches!(self, NucleusResult::Contracting { .. })
    }
}

impl fmt::Display for NucleusResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NucleusResult::Contracting {
                nucleus,
                depth,
                rounds,
            } => {
                let ws: Vec<String> = nucleus.iter().map(|w| w.to_string()).collect();
                write!(
                    f,
                    "contracting: nucleus of size {} after {rounds} rounds, depth {depth}\n{{{}}}",
                    nucleus.len(),
                    ws.join(", ")
                )
            }
            NucleusResult::Unknown {
                rounds,
                size,
                longest,
            } => {
                let ws: Vec<String> = longest.iter().map(|w| w.to_string()).collect();
                write!(
                    f,
                    "unknown after {rounds} rounds (size {size}); longest elements: {}",
                    ws.join(", ")
                )
            }
        }
    }
}

/// Nodes and their outgoing restriction edges.
type Graph = (Vec<Word>, Vec<Vec<usize>>);

/// Restriction graph on everything reachable from `start`; `None` past `cap` nodes.
fn closure(
    r: &Recursion,
    start: impl IntoIterator<Item = Word>,
    cap: usize,
) -> Result<Option<Graph>> {
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut nodes: Vec<Word> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for w in start {
        if !index.contains_key(&w) {
            index.insert(w.clone(), nodes.len());
            nodes.push(w);
            edges.push(Vec::new());
            queue.push_back(nodes.len() - 1);
        }
    }
    while let Some(i) = queue.pop_front() {
        if nodes.len() > cap {
            return Ok(None);
        }
        let el = r.apply(&nodes[i])?;
        for s in el.sections {
            let j = match index.get(&s) {
                Some(&j) => j,
                None => {
                    index.insert(s.clone(), nodes.len());
                    nodes.push(s);
                    edges.push(Vec::new());
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            edges[i].push(j);
        }
    }
    Ok(Some((nodes, edges)))
}

/// Nodes lying on a cycle of the restriction graph.
fn core(nodes: &[Word], edges: &[Vec<usize>]) -> Vec<Word> {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let ids: Vec<_> = nodes.iter().map(|_| g.add_node(())).collect();
    for (i, es) in edges.iter().enumerate() {
        for &j in es {
            g.add_edge(ids[i], ids[j], ());
        }
    }
    let mut out = Vec::new();
    for comp in tarjan_scc(&g) {
        let cyclic = comp.len() > 1 || edges[comp[0].index()].contains(&comp[0].index());
        if cyclic {
            out.extend(comp.iter().map(|n| nodes[n.index()].clone()));
        }
    }
    out.sort();
    out
}

fn longest(ws: &[Word], k: usize) -> Vec<Word> {
    let mut v = ws.to_vec();
    v.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    v.truncate(k);
    v
}

/// Bounded search for the nucleus.
///
/// Starting from the cycles of the restriction graph of S ∪ S⁻¹ ∪ {e}, each
/// round adds the cycles reachable from products of pairs in N ∪ S ∪ S⁻¹.
/// When a round adds nothing, the depth k with ((S ∪ N)²)|_{X^k} ⊆ N is found
/// and returned as a certificate.
pub fn nucleus_search(r: &Recursion, max_size: usize, max_rounds: usize) -> Result<NucleusResult> {
    let closure_cap = max_size.saturating_mul(100).max(1000);
    let mut s: Vec<Word> = r.generator_words();
    s.extend(s.clone().iter().map(Word::inverse));
    s.push(Word::identity(r.ctx));
    s.sort();
    s.dedup();

    let Some((nodes, edges)) = closure(r, s.clone(), closure_cap)? else {
        return Ok(NucleusResult::Unknown {
            rounds: 0,
            size: closure_cap,
            longest: longest(&s, 5),
        });
    };
    let mut n: Vec<Word> = core(&nodes, &edges);
    for round in 1..=max_rounds {
        let pool: Vec<Word> = {
            let mut p: Vec<Word> = n.iter().chain(&s).cloned().collect();
            p.sort();
            p.dedup();
            p
        };
        let mut products: Vec<Word> = Vec::with_capacity(pool.len() * pool.len());
        let mut seen = HashSet::new();
        for a in &pool {
            for b in &pool {
                let ab = a.concat(b)?;
                if seen.insert(ab.clone()) {
                    products.push(ab);
                }
            }
        }
        let Some((nodes, edges)) = closure(r, products.clone(), closure_cap)? else {
            return Ok(NucleusResult::Unknown {
                rounds: round,
                size: closure_cap,
                longest: longest(&products, 5),
            });
        };
        let mut next: Vec<Word> = n.iter().cloned().chain(core(&nodes, &edges)).collect();
        next.sort();
        next.dedup();
        if next.len() > max_size {
            return Ok(NucleusResult::Unknown {
                rounds: round,
                size: next.len(),
                longest: longest(&next, 5),
            });
        }
        if next == n {
            let members: HashSet<&Word> = n.iter().collect();
            let index: HashMap<&Word, usize> =
                nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let mut level: HashSet<usize> = products.iter().map(|w| index[w]).collect();
            for depth in 0..=nodes.len() {
                if level.iter().all(|&i| members.contains(&nodes[i])) {
                    return Ok(NucleusResult::Contracting {
                        nucleus: n,
                        depth,
                        rounds: round,
                    });
                }
                level = level
                    .iter()
                    .flat_map(|&i| edges[i].iter().copied())
                    .collect();
            }
            return Err(Error::Inconsistent(
                "restriction graph does not settle into its cycles".into(),
            ));
        }
        n = next;
    }
    Ok(NucleusResult::Unknown {
        rounds: max_rounds,
        size: n.len(),
        longest: longest(&n, 5),
    })
}

/// Φ(w) fixes the first letter and has φ(w) as its first section.
pub fn phi_cross_check(w: &Word) -> Result<bool> {
    if !in_h(w) {
        return Err(Error::NotInH(w.to_string()));
    }
    let r = moduli_recursion();
    let el = r.apply(w)?;
    Ok(el.perm.apply(0) == 0 && el.sections[0] == phi(w)?)
}

fn moduli_recursion() -> &'static Recursion {
    use std::sync::OnceLock;
    static R: OnceLock<Recursion> = OnceLock::new();
    R.get_or_init(|| Recursion::builtin("phi-moduli").expect("built-in parses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schreier::tests::arb_h_word;
    use proptest::prelude::*;

    fn m(s: &str) -> Word {
        Word::m(s)
    }

    fn el(secs: &[&str], perm: &str) -> WreathElement {
        WreathElement {
            sections: secs.iter().map(|s| m(s)).collect(),
            perm: Perm::parse_cycles(secs.len(), perm).unwrap(),
        }
    }

    #[test]
    fn perm_convention() {
        let a = Perm::parse_cycles(4, "(1 4 2)").unwrap();
        let b = Perm::parse_cycles(4, "(1 3 4)").unwrap();
        assert_eq!(a.then(&b), Perm::parse_cycles(4, "(2 3 4)").unwrap());
        assert_eq!(a.then(&b).to_string(), "(2 3 4)");
        assert!(Perm::parse_cycles(3, "(1 4)").is_err());
        assert!(Perm::parse_cycles(3, "(1 2)(2 3)").is_err());
        assert_eq!(Perm::parse_cycles(3, "id").unwrap(), Perm::identity(3));
    }

    #[test]
    fn worked_product() {
        let u = el(&["", "ba", "a", "B"], "(1 4 2)");
        let v = el(&["ba", "A", "", "b"], "(1 3 4)");
        assert_eq!(u.mul(&v).unwrap(), el(&["b", "baba", "a", "BA"], "(2 3 4)"));
        assert_eq!(
            u.mul(&WreathElement::identity(Context::Moduli, 4)).unwrap(),
            u
        );
        assert!(u.mul(&u.inverse()).unwrap().is_identity());
        assert!(matches!(
            u.mul(&WreathElement::identity(Context::Moduli, 3)),
            Err(Error::DegreeMismatch(4, 3))
        ));
    }

    #[test]
    fn builtins_verbatim() {
        let r = Recursion::builtin("phi-moduli").unwrap();
        assert_eq!(
            r.image(Base::B).unwrap(),
            &el(&["B", "ba", "", "a"], "(1 2 3)")
        );
        assert_eq!(
            r.image(Base::A).unwrap(),
            &el(&["ba", "b", "A", ""], "(1 3 4)")
        );
        for name in BUILTIN_NAMES {
            assert!(Recursion::builtin(name).is_ok(), "{name}");
        }
        assert!(matches!(
            Recursion::builtin("nope"),
            Err(Error::UnknownRecursion(_))
        ));
        let g = Recursion::builtin("phi-g").unwrap();
        assert_eq!(g.image(Base::A).unwrap().to_string(), "<e, BDC, e> (1 2)");
    }

    #[test]
    fn moduli_witness() {
        let r = Recursion::builtin("phi-moduli").unwrap();
        assert_eq!(
            r.apply(&m("ba").pow(3)).unwrap(),
            el(&["ba", "ba", "bababa", "ab"], "id")
        );
        for n in 1..=6 {
            let got = r.apply(&m("ba").pow(3 * n)).unwrap();
            let want = WreathElement {
                sections: vec![
                    m("ba").pow(n),
                    m("ba").pow(n),
                    m("ba").pow(3 * n),
                    m("ab").pow(n),
                ],
                perm: Perm::identity(4),
            };
            assert_eq!(got, want);
        }
        assert_eq!(r.apply(&m("aaa")).unwrap().sections[0], m("b"));
        assert_eq!(r.restriction(&m("ba").pow(3), "3").unwrap(), m("ba").pow(3));
    }

    #[test]
    fn f_relation() {
        let r = Recursion::builtin("phi-f").unwrap();
        let rel = Word::parse(Context::Free4, "acbd").unwrap();
        assert!(r.apply(&rel).unwrap().is_identity());
        let l1 = r
            .act_level(&r.word("a").unwrap(), 1, Exec::Sequential)
            .unwrap();
        assert_eq!(l1, vec![2, 1, 0]);
    }

    #[test]
    fn level_actions() {
        for name in BUILTIN_NAMES {
            let r = Recursion::builtin(name).unwrap();
            let id = r
                .act_level(&Word::identity(r.ctx), 4, Exec::Parallel)
                .unwrap();
            assert!(id.iter().enumerate().all(|(i, &j)| i as u32 == j));
        }
        let r = Recursion::builtin("phi-f").unwrap();
        assert!(matches!(
            r.act_level(&r.word("a").unwrap(), 13, Exec::Sequential),
            Err(Error::LevelTooLarge { .. })
        ));
        assert!(matches!(
            r.restriction(&r.word("a").unwrap(), "4"),
            Err(Error::BadAddress(_))
        ));
    }

    #[test]
    fn orders() {
        assert_eq!(perm_order(&[1, 2, 0, 4, 3]), BigUint::from(6u32));
        assert_eq!(perm_order(&[0]), BigUint::from(1u32));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Recursion::parse("gen a = <e> id"),
            Err(Error::RecursionParse { .. })
        ));
        assert!(matches!(
            Recursion::parse("degree 2\ngen a = <e> id"),
            Err(Error::RecursionParse { line: 2, .. })
        ));
        assert!(matches!(
            Recursion::parse("degree 2\ngen x = <e, e> id"),
            Err(Error::RecursionParse { .. })
        ));
        assert!(matches!(
            Recursion::parse("degree 2\ngen a = <e, e> (1 3)"),
            Err(Error::RecursionParse { .. })
        ));
        let r = Recursion::parse("degree 2\ngen a = <e, a> (1 2)\n# adding machine\n").unwrap();
        assert_eq!(r.ctx, Context::Moduli);
        assert!(matches!(
            r.apply(&m("b")),
            Err(Error::UnknownGenerator('b'))
        ));
    }

    #[test]
    fn nucleus_examples() {
        let r = Recursion::builtin("phi-f-b2").unwrap();
        let res = nucleus_search(&r, 200, 50).unwrap();
        assert!(res.is_contracting(), "{res}");

        let r = Recursion::builtin("phi-moduli").unwrap();
        let res = nucleus_search(&r, 200, 50).unwrap();
        assert!(!res.is_contracting(), "{res}");

        let triv = Recursion::parse("degree 2\ngen a = <e, e> id\ngen b = <e, e> id").unwrap();
        match nucleus_search(&triv, 10, 5).unwrap() {
            NucleusResult::Contracting { nucleus, .. } => assert_eq!(nucleus, vec![m("")]),
            other => panic!("{other}"),
        }

        // binary adding machine: nucleus {e, a, a⁻¹}
        let add = Recursion::parse("degree 2\ngen a = <e, a> (1 2)").unwrap();
        match nucleus_search(&add, 10, 5).unwrap() {
            NucleusResult::Contracting { nucleus, .. } => {
                assert_eq!(nucleus, vec![m(""), m("a"), m("A")])
            }
            other => panic!("{other}"),
        }
    }

    fn arb_word(ctx: Context, n: usize, max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..n, any::<bool>()), 0..=max).prop_map(move |v| {
            let text: String = v
                .into_iter()
                .map(|(i, inv)| {
                    let c = ['a', 'b', 'c', 'd'][i];
                    if inv {
                        c.to_ascii_uppercase()
                    } else {
                        c
                    }
                })
                .collect();
            Word::parse(ctx, &text).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn cross_check(w in arb_h_word(64)) {
            prop_assert!(phi_cross_check(&w).unwrap());
        }

        #[test]
        fn apply_is_homomorphism(k in 0usize..4, u in arb_word(Context::Free4, 4, 12), v in arb_word(Context::Free4, 4, 12)) {
            let r = Recursion::builtin(BUILTIN_NAMES[k]).unwrap();
            let u = u.expand_into(r.ctx).unwrap();
            let v = v.expand_into(r.ctx).unwrap();
            prop_assert_eq!(r.apply(&(&u * &v)).unwrap(), r.apply(&u).unwrap().mul(&r.apply(&v).unwrap()).unwrap());
        }

        #[test]
        fn restriction_composes(u in arb_word(Context::Free4, 4, 10), a in prop::collection::vec(0usize..3, 0..4), b in prop::collection::vec(0usize..3, 0..4)) {
            let r = Recursion::builtin("phi-g").unwrap();
            let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
            let lhs = r.restriction_at(&u, &ab).unwrap();
            let rhs = r.restriction_at(&r.restriction_at(&u, &a).unwrap(), &b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn levels_compatible(u in arb_word(Context::Dynamical, 3, 10), n in 1usize..5) {
            let r = Recursion::builtin("phi-f").unwrap();
            let hi = r.act_level(&u, n + 1, Exec::Sequential).unwrap();
            let lo = r.act_level(&u, n, Exec::Sequential).unwrap();
            for (i, &img) in hi.iter().enumerate() {
                prop_assert_eq!(img / 3, lo[i / 3]);
            }
            // level action agrees with walking addresses one letter at a time
            let addr: Vec<usize> = (0..n).map(|j| (j * 7 + 1) % 3).collect();
            let idx = addr.iter().fold(0usize, |a, &x| a * 3 + x);
            let walked = r.act_on_address(&u, &addr).unwrap();
            let widx = walked.iter().fold(0usize, |a, &x| a * 3 + x);
            prop_assert_eq!(lo[idx] as usize, widx);
        }
    }
}
