use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pullback_core::boundary::{
    attractor_scan, orbit, orbit_with, plot_rows, preimage_family, sigma_literal,
    sigma_via_stabilizer, write_plot_csv, BoundaryMap, DEFAULT_ORBIT_CAP,
};
use pullback_core::cf::{cf_labels, decompose};
use pullback_core::checks;
use pullback_core::par::{with_jobs, Exec};
use pullback_core::projective::{right_act, MatLetter};
use pullback_core::schreier::{coset_of, in_h, left_coset, rewrite, rewrite_factors, right_coset};
use pullback_core::twister::{classify_with, default_cap};
use pullback_core::virtualendo::{phi, phi_bar, psi_bar};
use pullback_core::wreath::{nucleus_search, parse_address, perm_order, Recursion, BUILTIN_NAMES};
use pullback_core::{Context, ExtRational, Word};

const WORD_HELP: &str = "\
Words are strings over a/A (alpha and its inverse) and b/B (beta and its inverse),
c/C and d/D where the group has them; `e` or the empty string is the identity.
Points are extended rationals written p/q (or an integer p); 1/0 is infinity.";

#[derive(Parser)]
#[command(name = "pullback", version, about = "Boundary pullback map, virtual endomorphism and wreath recursions", after_help = WORD_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Parallel {
    /// Worker threads for the scan (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Run the scan on the calling thread only
    #[arg(long)]
    sequential: bool,
}

impl Parallel {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    /// Continued-fraction decomposition and the virtual endomorphism
    Decomp,
    /// Fixed point of the image of the stabilizer
    Stab,
    /// Both, failing when they differ
    Both,
    /// The closed formula without the coset correction
    Literal,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued-fraction decomposition of a point
    Expand {
        #[arg(allow_hyphen_values = true)]
        x: ExtRational,
    },
    /// Evaluate the boundary map
    Sigma {
        #[arg(allow_hyphen_values = true)]
        x: ExtRational,
        #[arg(long)]
        orbit: bool,
        #[arg(long, value_enum, default_value = "decomp")]
        oracle: Oracle,
        /// Mapping class h; evaluates the map of f·h
        #[arg(long)]
        twist: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
    },
    /// Terminal cycles of every orbit up to a height
    Attractor {
        #[arg(long)]
        height: u64,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
        #[command(flatten)]
        par: Parallel,
    },
    /// CSV of (p, q, sp, sq) for every reduced p/q up to a height
    Plot {
        #[arg(long)]
        height: u64,
        #[arg(long)]
        twist: Option<String>,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        par: Parallel,
    },
    /// Virtual endomorphism on H, or its extensions to the whole group
    Phi {
        word: String,
        #[arg(long, conflicts_with = "psi_bar")]
        bar: bool,
        #[arg(long)]
        psi_bar: bool,
    },
    /// Rewrite a word of H in the subgroup generators
    Rewrite { word: String },
    /// Coset data of a word
    Coset { word: String },
    /// Evaluate a wreath recursion (built-in name or file)
    Wreath {
        recursion: String,
        word: Option<String>,
        /// Print the order of the action on level n
        #[arg(long)]
        level: Option<usize>,
        /// Section at an address such as 13 or "1 3"
        #[arg(long)]
        restrict: Option<String>,
        #[arg(long)]
        nucleus: bool,
        #[arg(long, default_value_t = 200)]
        max_size: usize,
        #[arg(long, default_value_t = 50)]
        max_rounds: usize,
    },
    /// Classify the twisted map f·g
    Twist {
        word: String,
        /// ψ̄-step cap (default 10·length)
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Distinct preimages of a point
    Fibers {
        #[arg(allow_hyphen_values = true)]
        x: ExtRational,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Run the acceptance table
    Verify {
        /// Only this criterion (1-10)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Option<u8>,
        #[command(flatten)]
        par: Parallel,
    },
}

type PointMap<'a> = dyn Fn(&ExtRational) -> Result<ExtRational> + 'a;

fn moduli(text: &str) -> Result<Word> {
    Word::parse(Context::Moduli, text).with_context(|| format!("bad word {text:?}"))
}

fn map_for(twist: &Option<String>) -> Result<BoundaryMap> {
    Ok(match twist {
        Some(t) => BoundaryMap::twisted(&moduli(t)?)?,
        None => BoundaryMap::untwisted(),
    })
}

fn unicode(l: MatLetter) -> &'static str {
    match l {
        MatLetter::A => "A",
        MatLetter::AInv => "A⁻¹",
        MatLetter::B => "B",
        MatLetter::BInv => "B⁻¹",
    }
}

fn load_recursion(source: &str) -> Result<Recursion> {
    if BUILTIN_NAMES.contains(&source) {
        return Ok(Recursion::builtin(source)?);
    }
    let text = std::fs::read_to_string(source).with_context(|| {
        format!(
            "{source:?} is neither a built-in ({}) nor a readable file",
            BUILTIN_NAMES.join(", ")
        )
    })?;
    let mut r = Recursion::parse(&text)?;
    r.name = source.to_string();
    Ok(r)
}

fn run(cmd: Cmd, out: &mut impl Write) -> Result<bool> {
    match cmd {
        Cmd::Expand { x } => {
            let d = decompose(&x);
            let letters: Vec<&str> = d.mat_letters.iter().map(|&l| unicode(l)).collect();
            let body = if letters.is_empty() {
                "I".to_string()
            } else {
                letters.join(" ")
            };
            writeln!(out, "{body} | terminal {}", d.terminal)?;
            writeln!(out, "word {}", d.fund_word)?;
            writeln!(out, "labels {}", cf_labels(&d))?;
            if d.via_minus_one {
                writeln!(out, "reached through -1/1")?;
            }
        }
        Cmd::Sigma {
            x,
            orbit: show_orbit,
            oracle,
            twist,
            cap,
        } => {
            let map = map_for(&twist)?;
            let pre = |y: &ExtRational| -> ExtRational {
                right_act(y, &map.twist().inverse()).expect("moduli word")
            };
            let f: Box<PointMap> = match oracle {
                Oracle::Decomp => Box::new(|y| Ok(map.apply(y))),
                Oracle::Literal => Box::new(|y| Ok(sigma_literal(&pre(y)))),
                Oracle::Stab => Box::new(|y| Ok(sigma_via_stabilizer(&pre(y))?)),
                Oracle::Both => Box::new(|y| {
                    let a = map.apply(y);
                    let b = sigma_via_stabilizer(&pre(y))?;
                    if a != b {
                        bail!("oracles disagree at {y}: decomposition {a}, stabilizer {b}");
                    }
                    Ok(a)
                }),
            };
            if show_orbit {
                let report = match oracle {
                    Oracle::Decomp => orbit(&map, &x, cap)?,
                    _ => {
                        // orbit_with wants an infallible map: keep the first error and stall there
                        let err = std::cell::RefCell::new(None);
                        let rep = orbit_with(
                            |y| {
                                f(y).unwrap_or_else(|e| {
                                    err.borrow_mut().get_or_insert(e);
                                    y.clone()
                                })
                            },
                            &x,
                            cap,
                        )?;
                        if let Some(e) = err.into_inner() {
                            return Err(e);
                        }
                        rep
                    }
                };
                writeln!(out, "{report}")?;
            } else {
                writeln!(out, "{}", f(&x)?)?;
            }
        }
        Cmd::Attractor {
            height,
            twist,
            cap,
            par,
        } => {
            if height == 0 {
                bail!("height must be at least 1");
            }
            let map = map_for(&twist)?;
            let summary = with_jobs(par.jobs, || attractor_scan(&map, height, cap, par.exec()));
            writeln!(out, "{summary}")?;
            return Ok(summary.exceptions.is_empty());
        }
        Cmd::Plot {
            height,
            twist,
            out: path,
            par,
        } => {
            let map = map_for(&twist)?;
            let rows = with_jobs(par.jobs, || plot_rows(&map, height, par.exec()));
            match path {
                Some(p) => {
                    let f = File::create(&p)
                        .with_context(|| format!("cannot create {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    write_plot_csv(&rows, &mut w)?;
                    w.flush()?;
                }
                None => write_plot_csv(&rows, &mut *out)?,
            }
        }
        Cmd::Phi {
            word,
            bar,
            psi_bar: psi,
        } => {
            let w = moduli(&word)?;
            let img = if bar {
                phi_bar(&w)?
            } else if psi {
                psi_bar(&w)?
            } else {
                phi(&w)?
            };
            writeln!(out, "{img}")?;
        }
        Cmd::Rewrite { word } => {
            let w = moduli(&word)?;
            let factors = rewrite_factors(&w)?;
            let trace: Vec<String> = factors
                .iter()
                .map(|f| {
                    if f.is_identity() {
                        "1".into()
                    } else {
                        f.to_string()
                    }
                })
                .collect();
            writeln!(out, "factors {}", trace.join(" · "))?;
            let gens: Vec<String> = rewrite(&w)?.iter().map(|g| g.to_string()).collect();
            writeln!(
                out,
                "generators {}",
                if gens.is_empty() {
                    "1".to_string()
                } else {
                    gens.join(" ")
                }
            )?;
        }
        Cmd::Coset { word } => {
            let w = moduli(&word)?;
            writeln!(out, "state {}", coset_of(&w))?;
            writeln!(out, "in H {}", in_h(&w))?;
            writeln!(out, "right coset {}", right_coset(&w))?;
            writeln!(out, "left coset {}", left_coset(&w))?;
        }
        Cmd::Wreath {
            recursion,
            word,
            level,
            restrict,
            nucleus,
            max_size,
            max_rounds,
        } => {
            let r = load_recursion(&recursion)?;
            if max_size == 0 || max_rounds == 0 {
                bail!("caps must be positive");
            }
            if let Some(text) = &word {
                let w = r.word(text)?;
                writeln!(out, "{}", r.apply(&w)?)?;
                if let Some(v) = &restrict {
                    let addr = parse_address(r.degree, v)?;
                    writeln!(out, "restriction {}", r.restriction_at(&w, &addr)?)?;
                }
                if let Some(n) = level {
                    let p = r.act_level(&w, n, Exec::Parallel)?;
                    writeln!(out, "order on level {n}: {}", perm_order(&p))?;
                }
            } else if restrict.is_some() || level.is_some() {
                bail!("--restrict and --level need a word");
            }
            if nucleus {
                writeln!(out, "{}", nucleus_search(&r, max_size, max_rounds)?)?;
            }
            if word.is_none() && !nucleus {
                writeln!(out, "degree {}", r.degree)?;
                for b in r.generators() {
                    let img = r.image(b).expect("listed generator");
                    writeln!(
                        out,
                        "gen {} = {img}",
                        pullback_core::Letter::gen(b).to_char()
                    )?;
                }
            }
        }
        Cmd::Twist { word, cap } => {
            let g = moduli(&word)?;
            let cap = cap.unwrap_or_else(|| default_cap(&g));
            writeln!(out, "{}", classify_with(&g, cap, Exec::Parallel)?)?;
        }
        Cmd::Fibers { x, count } => {
            for y in preimage_family(&x, count) {
                writeln!(out, "{y}")?;
            }
        }
        Cmd::Verify { criterion, par } => {
            let ids: Vec<usize> = match criterion {
                Some(c) => vec![c as usize],
                None => (1..=10).collect(),
            };
            let outcomes = with_jobs(par.jobs, || {
                ids.into_iter()
                    .map(|id| checks::run(id, par.exec()))
                    .collect::<Vec<_>>()
            });
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let ok = outcomes.iter().all(|o| o.passed());
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.cmd, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<io::Error>()
                    .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
