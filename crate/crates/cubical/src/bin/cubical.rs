//! Command-line front end. Every verb prints a deterministic report:
//! a version stamp, the echoed command, and either a certificate or a
//! canonical serialization. Exit codes: 0 pass, 1 fail with witness,
//! 2 inconclusive, 3 usage or unusable input.

use clap::{Args, Parser, Subcommand};
use cubical::cert::{Certificate, Value, Witness};
use cubical::cmap::check_local_isometry;
use cubical::develop::{convex_hull, develop_ball, superconvexity_check, systole, SystoleResult};
use cubical::dual::{
    dual_complex, facing_triple_search, hemi_restrict_dual, strong_separation, SeparationVerdict,
};
use cubical::fiber::{aut_over_x, component_metrics, fiber_product, ComponentVerdict};
use cubical::fixtures::{fixture_files, FIXTURE_NAMES};
use cubical::freegroup::{
    avoider, canonical_form, fold, graphical_cprime, malnormalize, parse_word, sc_words,
    word_to_string, LabeledGraph, Letter,
};
use cubical::hyperplane::{hyperplane_certificate, pseudograph_certificate};
use cubical::io;
use cubical::pipeline::{quotient_build, quotient_pair, regular_cover, MultTable};
use cubical::smallcancel::{check_cprime, enumerate_pieces, induced_presentation};
use cubical::wallspace::{
    antipodal_walls, check_b6, check_freeness_bounds, check_k_wall_convexity,
    check_wall_separation, B6Mode, Rank2Decomposition,
};
use cubical::{Error, Status};
use num_rational::Rational64;
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "cubical", version, about = "Workbench for finite NPC cube complexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GuardOpt {
    /// Development guard radius (default: CUBICAL_GUARD or 64).
    #[arg(long)]
    guard: Option<u32>,
}

impl GuardOpt {
    fn value(&self) -> u32 {
        self.guard.unwrap_or_else(|| {
            std::env::var("CUBICAL_GUARD")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(64)
        })
    }
}

fn parse_ratio(s: &str) -> Result<Rational64, String> {
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || format!("expected a rational p/q, got `{s}`");
    match parts.as_slice() {
        [p] => p.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
        [p, q] => {
            let p: i64 = p.parse().map_err(|_| bad())?;
            let q: i64 = q.parse().map_err(|_| bad())?;
            if q == 0 {
                return Err("zero denominator".into());
            }
            Ok(Rational64::new(p, q))
        }
        _ => Err(bad()),
    }
}

fn parse_cycle(s: &str) -> cubical::Result<Vec<(u32, u8)>> {
    cycle_tokens(s).map_err(Error::Parse)
}

fn cycle_tokens(s: &str) -> Result<Vec<(u32, u8)>, String> {
    s.split_whitespace()
        .map(|tok| {
            let (e, end) = tok
                .split_once(':')
                .ok_or_else(|| format!("expected edge:end, got `{tok}`"))?;
            let e: u32 = e.parse().map_err(|_| format!("bad edge id `{e}`"))?;
            let end: u8 = end.parse().map_err(|_| format!("bad end `{end}`"))?;
            if end > 1 {
                return Err(format!("edge end must be 0 or 1, got {end}"));
            }
            Ok((e, end))
        })
        .collect()
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural and curvature validation of a complex.
    Validate { complex: PathBuf },
    /// The link of one vertex, with its flag/simplicial verdict.
    Link { complex: PathBuf, vertex: u32 },
    /// Hyperplane census: embedded, two-sided, contractible.
    Hyperplanes { complex: PathBuf },
    /// Pseudograph certificate: every hyperplane a contractible tree.
    Pseudograph { complex: PathBuf },
    /// Local isometry check for a cubical map.
    Localisom { map: PathBuf },
    /// Cubical subdivision, printed in the canonical serialization.
    Subdivide { complex: PathBuf },
    /// Development of a radius-r ball in the universal cover.
    Develop { complex: PathBuf, base: u32, radius: u32 },
    /// Shortest essential loop length.
    Systole {
        complex: PathBuf,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// Convex hull of seed vertices inside a developed ball.
    Hull {
        complex: PathBuf,
        base: u32,
        radius: u32,
        seed: Vec<u32>,
    },
    /// Superconvexity of the image of a local isometry.
    Superconvex {
        map: PathBuf,
        #[arg(long, default_value_t = 8)]
        cutoff: u32,
    },
    /// Fiber product of two maps with a common target.
    Fiber {
        f: PathBuf,
        g: PathBuf,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// Automorphisms of a map over its target.
    Aut { map: PathBuf },
    /// Induced presentation along a local isometry.
    Induce {
        map: PathBuf,
        presentation: PathBuf,
        /// Directory to write the induced presentation into.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "induced")]
        name: String,
    },
    /// Piece enumeration for a presentation.
    Pieces {
        presentation: PathBuf,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// Cubical C'(alpha) certificate.
    Cprime {
        presentation: PathBuf,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rational64,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// Stallings fold of a wedge of words, in canonical form.
    Fold {
        #[arg(long)]
        rank: usize,
        words: Vec<String>,
    },
    /// A wedge pair avoiding every given constraint word's subgroup.
    Avoider {
        #[arg(long)]
        rank: usize,
        constraints: Vec<String>,
    },
    /// The wedge words U' = U V U V^2 ... U V^n U and V' = V, with a
    /// malnormality certificate for the result.
    Malnormalize {
        u: String,
        v: String,
        n: usize,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// The standard small-cancellation word pair for parameters (m, n).
    Scwords { m: usize, n: usize },
    /// Classical graphical C'(alpha) on cyclic words.
    Gcprime {
        #[arg(long)]
        rank: usize,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rational64,
        words: Vec<String>,
    },
    /// Quotient pipeline: malnormal core, relator search, certificates.
    #[command(subcommand)]
    Quotient(QuotientCmd),
    /// Regular cover of a graph over its target for a cyclic deck group.
    Cover {
        map: PathBuf,
        #[arg(long)]
        order: usize,
        /// Generator images in Z/order, comma separated.
        #[arg(long, value_delimiter = ',')]
        images: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wallspace constructions.
    #[command(subcommand)]
    Walls(WallsCmd),
    /// B(6) certificate for a presentation with one wallspace per relator.
    B6 {
        presentation: PathBuf,
        /// Wallspace documents, one per relator.
        #[arg(long, value_delimiter = ',', required = true)]
        walls: Vec<PathBuf>,
        #[arg(long, default_value = "sufficient")]
        mode: String,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// k-wall convexity certificate.
    Kwall {
        presentation: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        walls: Vec<PathBuf>,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rational64,
        #[command(flatten)]
        guard: GuardOpt,
    },
    /// Freeness bounds for a rank-2 decomposed relator.
    FreenessBounds {
        presentation: PathBuf,
        #[arg(long, default_value_t = 0)]
        relator: usize,
        /// First cycle, as space-separated edge:end pairs.
        #[arg(long)]
        z1: String,
        /// Second cycle, as space-separated edge:end pairs.
        #[arg(long)]
        z2: String,
    },
    /// Dual cube complex of a finite wallspace.
    Dual { wallspace: PathBuf },
    /// Dual restricted to the walls meeting a point set.
    Hemi {
        wallspace: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<u32>,
    },
    /// Strong separation of two hyperplanes in a developed ball.
    Strongsep {
        complex: PathBuf,
        base: u32,
        radius: u32,
        u: u32,
        v: u32,
        /// Separation constant for the strong criterion.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Search for a facing triple of hyperplanes in a developed ball.
    Facing {
        complex: PathBuf,
        base: u32,
        radius: u32,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        m: Option<u32>,
    },
    /// List fixture names, or write one fixture's files.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QuotientCmd {
    /// One-relator quotient plan for a pseudograph over X.
    Build {
        map: PathBuf,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rational64,
        #[arg(long, default_value_t = 1)]
        min_sys: u32,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Words whose survival in the quotient should be reported.
        #[arg(long, value_delimiter = ',')]
        survive: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-relator quotient plan with a joint C'(alpha) certificate.
    Pair {
        map: PathBuf,
        #[arg(long, value_parser = parse_ratio)]
        alpha: Rational64,
        #[arg(long, default_value_t = 1)]
        min_sys: u32,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum WallsCmd {
    /// Antipodal wallspace of a systolic pseudograph (subdividing once
    /// when the systole is odd).
    Antipodal {
        complex: PathBuf,
        #[command(flatten)]
        guard: GuardOpt,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "walls")]
        name: String,
    },
    /// Wallspace of a rank-2 decomposition (two cycles sharing edges).
    Rank2 {
        complex: PathBuf,
        /// Cycle as space-separated edge:end pairs.
        #[arg(long)]
        z1: String,
        #[arg(long)]
        z2: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "walls")]
        name: String,
    },
}

fn stamp() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    println!("cubical {VERSION}");
    println!("command: {}", args.join(" "));
}

fn emit(cert: &Certificate) -> ExitCode {
    println!("{cert}");
    ExitCode::from(cert.exit_code() as u8)
}

fn words_of(rank: usize, words: &[String]) -> cubical::Result<Vec<Vec<Letter>>> {
    words.iter().map(|w| parse_word(w, rank)).collect()
}

fn print_graph(g: &LabeledGraph) {
    println!("graph rank {} verts {}", g.rank, g.verts);
    for &(s, t, l) in &g.edges {
        println!("edge {s} {t} label {l}");
    }
}

fn b6_mode(s: &str) -> cubical::Result<B6Mode> {
    match s {
        "sufficient" => Ok(B6Mode::Sufficient),
        "exhaustive" => Ok(B6Mode::Exhaustive),
        other => Err(Error::Parse(format!(
            "mode must be `sufficient` or `exhaustive`, got `{other}`"
        ))),
    }
}

fn loop_cert(check: &str, s: &SystoleResult) -> Certificate {
    match s {
        SystoleResult::Exact { length, base, witness } => {
            let mut c = Certificate::pass(check).with_int("systole", *length as i64);
            c.push("base", Value::Int(*base as i64));
            c.push(
                "witness",
                Value::Text(
                    witness
                        .iter()
                        .map(|(e, end)| format!("{e}:{end}"))
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
            );
            c
        }
        SystoleResult::AtLeast(b) => {
            Certificate::inconclusive(check, *b as u64).with_int("at_least", *b as i64)
        }
    }
}

fn save_plan(
    out: &Option<PathBuf>,
    plan: &cubical::pipeline::QuotientPlan,
) -> cubical::Result<()> {
    if let Some(dir) = out {
        let pres = cubical::smallcancel::CubicalPresentation {
            x: plan.x.clone(),
            relators: plan.relators.clone(),
        };
        let path = io::save_presentation(dir, "quotient", &pres)?;
        io::save(&dir.join("quotient.w.cmap"), &io::serialize_map(&plan.w))?;
        println!("wrote: {}", path.display());
    }
    Ok(())
}

fn plan_cert(plan: &cubical::pipeline::QuotientPlan) -> Certificate {
    let mut cert = Certificate::pass("quotient");
    cert.push("relators", Value::Int(plan.relators.len() as i64));
    cert.push("alpha", Value::Ratio(plan.alpha));
    cert.push("min_sys", Value::Int(plan.min_sys as i64));
    for sub in &plan.certificates {
        if sub.status != Status::Pass && cert.status == Status::Pass {
            cert.status = sub.status;
            cert.witness = sub.witness.clone();
            cert.bound = sub.bound;
        }
        cert.parts.push(sub.clone());
    }
    cert
}

fn run(cmd: Cmd) -> cubical::Result<ExitCode> {
    match cmd {
        Cmd::Validate { complex } => {
            let x = io::load_complex(&complex)?;
            Ok(emit(&x.validate()?))
        }
        Cmd::Link { complex, vertex } => {
            let x = io::load_complex(&complex)?;
            x.check_structure()?;
            let link = x.vertex_link(vertex)?;
            let cert = match x.check_link(&link) {
                Ok(()) => Certificate::pass("link"),
                Err(w) => Certificate::fail("link", w),
            }
            .with_int("vertex", vertex as i64)
            .with_int("link_vertices", link.vertices.len() as i64)
            .with_int(
                "simplices",
                link.simplices.iter().map(|s| s.len()).sum::<usize>() as i64,
            );
            Ok(emit(&cert))
        }
        Cmd::Hyperplanes { complex } => {
            let x = io::load_complex(&complex)?;
            x.check_structure()?;
            Ok(emit(&hyperplane_certificate(&x)))
        }
        Cmd::Pseudograph { complex } => {
            let x = io::load_complex(&complex)?;
            Ok(emit(&pseudograph_certificate(&x)?))
        }
        Cmd::Localisom { map } => {
            let f = io::load_map(&map)?;
            Ok(emit(&check_local_isometry(&f)?))
        }
        Cmd::Subdivide { complex } => {
            let x = io::load_complex(&complex)?;
            x.check_structure()?;
            print!("{}", io::serialize_complex(&x.subdivide()));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Develop { complex, base, radius } => {
            let x = io::load_complex(&complex)?;
            let ball = develop_ball(&x, base, radius)?;
            println!(
                "ball base {} radius {} vertices {} frontier {}",
                ball.base_image,
                ball.radius,
                ball.complex.vertex_count(),
                ball.frontier.iter().filter(|&&f| f).count()
            );
            print!("{}", io::serialize_map(&ball.projection));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Systole { complex, guard } => {
            let x = io::load_complex(&complex)?;
            Ok(emit(&loop_cert("systole", &systole(&x, guard.value())?)))
        }
        Cmd::Hull { complex, base, radius, seed } => {
            let x = io::load_complex(&complex)?;
            let ball = develop_ball(&x, base, radius)?;
            let (_, incl) = convex_hull(&ball, &seed)?;
            print!("{}", io::serialize_map(&incl));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Superconvex { map, cutoff } => {
            let f = io::load_map(&map)?;
            Ok(emit(&superconvexity_check(&f, cutoff)?))
        }
        Cmd::Fiber { f, g, guard } => {
            let f = io::load_map(&f)?;
            let g = io::load_map(&g)?;
            let fp = fiber_product(&f, &g)?;
            let mut cert = Certificate::pass("fiber");
            cert.push("components", Value::Int(fp.components.len() as i64));
            if let Some(d) = fp.diagonal {
                cert.push("diagonal", Value::Int(d as i64));
            }
            for c in 0..fp.components.len() {
                let v = match component_metrics(&fp, c, guard.value()).verdict {
                    ComponentVerdict::Contractible(d) => format!("contractible diameter {d}"),
                    ComponentVerdict::Essential(_) => "essential".to_string(),
                    ComponentVerdict::Inconclusive(b) => format!("inconclusive at {b}"),
                };
                cert.push(&format!("component{c}"), Value::Text(v));
            }
            Ok(emit(&cert))
        }
        Cmd::Aut { map } => {
            let f = io::load_map(&map)?;
            let auts = aut_over_x(&f);
            Ok(emit(
                &Certificate::pass("aut").with_int("order", auts.len() as i64),
            ))
        }
        Cmd::Induce { map, presentation, out, name } => {
            let e = io::load_map(&map)?;
            let pres = io::load_presentation(&presentation)?;
            let ind = induced_presentation(&e, &pres)?;
            let mut cert = Certificate::pass("induce");
            cert.push("relators", Value::Int(ind.relators.len() as i64));
            if let Some(dir) = out {
                let path = io::save_presentation(&dir, &name, &ind)?;
                cert.push("wrote", Value::Text(path.display().to_string()));
            }
            Ok(emit(&cert))
        }
        Cmd::Pieces { presentation, guard } => {
            let pres = io::load_presentation(&presentation)?;
            let rep = enumerate_pieces(&pres, guard.value())?;
            let mut cert = Certificate::pass("pieces");
            cert.push("total", Value::Int(rep.pieces.len() as i64));
            cert.push(
                "cone_components.raw",
                Value::Int(rep.raw_cone_components as i64),
            );
            cert.push(
                "cone_components.identified",
                Value::Int(rep.identified_cone_components as i64),
            );
            for i in 0..pres.relators.len() {
                cert.push(
                    &format!("relator{i}.aut_order"),
                    Value::Int(rep.aut_orders[i] as i64),
                );
                let max = rep
                    .max_for_host(i)
                    .map(|p| p.diameter.value() as i64)
                    .unwrap_or(0);
                cert.push(&format!("relator{i}.max_piece"), Value::Int(max));
            }
            Ok(emit(&cert))
        }
        Cmd::Cprime { presentation, alpha, guard } => {
            let pres = io::load_presentation(&presentation)?;
            Ok(emit(&check_cprime(&pres, alpha, Some(guard.value()))?))
        }
        Cmd::Fold { rank, words } => {
            let ws = words_of(rank, &words)?;
            let g = canonical_form(&fold(&LabeledGraph::wedge(rank, &ws)));
            print_graph(&g);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Avoider { rank, constraints } => {
            let ws = words_of(rank, &constraints)?;
            let graphs: Vec<LabeledGraph> = ws
                .iter()
                .map(|w| fold(&LabeledGraph::wedge(rank, std::slice::from_ref(w))))
                .collect();
            let (w, (u, v)) = avoider(rank, &graphs)?;
            println!("word {}", word_to_string(&w));
            println!("u {}", word_to_string(&u));
            println!("v {}", word_to_string(&v));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Malnormalize { u, v, n, guard } => {
            let rank = 26;
            let uw = parse_word(&u, rank)?;
            let vw = parse_word(&v, rank)?;
            let _ = guard;
            let ((u2, v2), cert) = malnormalize(&uw, &vw, n)?;
            println!("u' {}", word_to_string(&u2));
            println!("v' {}", word_to_string(&v2));
            Ok(emit(&cert))
        }
        Cmd::Scwords { m, n } => {
            let (wm, wn) = sc_words(m, n)?;
            println!("u {}", word_to_string(&wm));
            println!("v {}", word_to_string(&wn));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gcprime { rank, alpha, words } => {
            let ws = words_of(rank, &words)?;
            Ok(emit(&graphical_cprime(rank, &ws, alpha)?))
        }
        Cmd::Quotient(q) => match q {
            QuotientCmd::Build { map, alpha, min_sys, budget, survive, out } => {
                let y = io::load_map(&map)?;
                let sw = words_of(26, &survive)?;
                let plan = quotient_build(&y, alpha, min_sys, budget, &sw)?;
                save_plan(&out, &plan)?;
                Ok(emit(&plan_cert(&plan)))
            }
            QuotientCmd::Pair { map, alpha, min_sys, budget, out } => {
                let y = io::load_map(&map)?;
                let plan = quotient_pair(&y, alpha, min_sys, budget)?;
                save_plan(&out, &plan)?;
                Ok(emit(&plan_cert(&plan)))
            }
        },
        Cmd::Cover { map, order, images, out } => {
            let z = io::load_map(&map)?;
            let (cover, cert) = regular_cover(&z, &MultTable::cyclic(order), &images)?;
            if let Some(path) = out {
                io::save(&path, &io::serialize_map(&cover))?;
            }
            Ok(emit(&cert))
        }
        Cmd::Walls(w) => match w {
            WallsCmd::Antipodal { complex, guard, out, name } => {
                let y = io::load_complex(&complex)?;
                let (yprime, ws) = antipodal_walls(&y, guard.value())?;
                let mut cert = check_wall_separation(&yprime, &ws)?;
                if let Some(dir) = out {
                    let path = io::save_wallspace(&dir, &name, &yprime, &ws)?;
                    cert.push("wrote", Value::Text(path.display().to_string()));
                }
                Ok(emit(&cert))
            }
            WallsCmd::Rank2 { complex, z1, z2, out, name } => {
                let yprime = io::load_complex(&complex)?;
                let dec = Rank2Decomposition {
                    yprime,
                    z1: parse_cycle(&z1)?,
                    z2: parse_cycle(&z2)?,
                };
                let ws = cubical::wallspace::rank2_walls(&dec)?;
                let mut cert = check_wall_separation(&dec.yprime, &ws)?;
                if let Some(dir) = out {
                    let path = io::save_wallspace(&dir, &name, &dec.yprime, &ws)?;
                    cert.push("wrote", Value::Text(path.display().to_string()));
                }
                Ok(emit(&cert))
            }
        },
        Cmd::B6 { presentation, walls, mode, guard } => {
            let pres = io::load_presentation(&presentation)?;
            let mode = b6_mode(&mode)?;
            let mut wss = Vec::new();
            for p in &walls {
                let (_, ws) = io::load_wallspace(p)?;
                wss.push(ws);
            }
            Ok(emit(&check_b6(&pres, &wss, mode, guard.value())?))
        }
        Cmd::Kwall { presentation, walls, k, alpha, guard } => {
            let pres = io::load_presentation(&presentation)?;
            let mut wss = Vec::new();
            for p in &walls {
                let (_, ws) = io::load_wallspace(p)?;
                wss.push(ws);
            }
            Ok(emit(&check_k_wall_convexity(&pres, &wss, k, alpha, guard.value())?))
        }
        Cmd::FreenessBounds { presentation, relator, z1, z2 } => {
            let pres = io::load_presentation(&presentation)?;
            if relator >= pres.relators.len() {
                return Err(Error::Parse(format!("no relator {relator}")));
            }
            let dec = Rank2Decomposition {
                yprime: pres.relators[relator].source.clone(),
                z1: parse_cycle(&z1)?,
                z2: parse_cycle(&z2)?,
            };
            Ok(emit(&check_freeness_bounds(&pres, relator, &dec)?))
        }
        Cmd::Dual { wallspace } => {
            let ws = io::load_finite_wallspace(&wallspace)?;
            let dual = dual_complex(&ws)?;
            print!("{}", io::serialize_complex(&dual.complex));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Hemi { wallspace, points } => {
            let ws = io::load_finite_wallspace(&wallspace)?;
            let s: std::collections::BTreeSet<u32> = points.into_iter().collect();
            let (_, dual) = hemi_restrict_dual(&ws, &s)?;
            print!("{}", io::serialize_complex(&dual.complex));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Strongsep { complex, base, radius, u, v, m } => {
            let x = io::load_complex(&complex)?;
            let ball = develop_ball(&x, base, radius)?;
            let cert = match strong_separation(&ball, u, v, m)? {
                SeparationVerdict::Separated => Certificate::pass("strongsep"),
                SeparationVerdict::Crossed(w) => {
                    Certificate::fail("strongsep", Witness::Wall(w as usize))
                }
                SeparationVerdict::Inconclusive => {
                    Certificate::inconclusive("strongsep", radius as u64)
                }
            }
            .with_int("u", u as i64)
            .with_int("v", v as i64);
            Ok(emit(&cert))
        }
        Cmd::Facing { complex, base, radius, strong, m } => {
            let x = io::load_complex(&complex)?;
            let ball = develop_ball(&x, base, radius)?;
            let cert = match facing_triple_search(&ball, strong, m)? {
                Some((a, b, c)) => Certificate::pass("facing")
                    .with_text("triple", &format!("{a} {b} {c}")),
                None => Certificate::fail(
                    "facing",
                    Witness::Text("no facing triple in this ball".into()),
                ),
            };
            Ok(emit(&cert))
        }
        Cmd::Fixtures { name, out } => {
            match name {
                None => {
                    for n in FIXTURE_NAMES {
                        println!("{n}");
                    }
                }
                Some(n) => {
                    let files = fixture_files(&n)?;
                    for (fname, contents) in files {
                        match &out {
                            Some(dir) => {
                                std::fs::create_dir_all(dir)
                                    .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                                io::save(&dir.join(&fname), &contents)?;
                                println!("wrote: {fname}");
                            }
                            None => {
                                println!("file: {fname}");
                                print!("{contents}");
                            }
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    stamp();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
