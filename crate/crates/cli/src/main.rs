use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tropforms::cohomology::{cohomology_basis, dbar_preimage, dolbeault_dimensions, poincare_pairing, Preimage};
use tropforms::forms::validate_form;
use tropforms::graph::{EdgeId, WeightedMetricGraph};
use tropforms::harmonic::{harmonicity, integrate_pullback_check, pullback_form, validate_plmap};
use tropforms::io::{self, IoError};
use tropforms::quotient::{invariant_cohomology, quotient, verify_quotient};
use tropforms::rational::{parse_rational, Rational};
use tropforms::report::ValidationReport;
use tropforms::skeleton::curve_cohomology;
use tropforms::tropical::{
    check_balancing, check_harmonic_trop, integration_compat_check, local_pullback_certificate, pullback_lagerberg, trop_cycle,
    GammaGroup, TropicalError,
};
use tropforms::{Bidegree, GraphForm};

/// Exact forms, cohomology, harmonic maps and tropicalizations on weighted
/// metric graphs.
#[derive(Parser)]
#[command(name = "tropforms", version)]
struct Cli {
    /// Smoothness order of form coefficients (at least 2).
    #[arg(long = "K", env = "TROPFORMS_K", default_value_t = 3, global = true, value_parser = clap::value_parser!(u32).range(2..))]
    k: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct GraphFormArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    form: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph, and optionally a form on it or a map.
    Validate {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, requires = "graph")]
        form: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Dolbeault dimensions, per component and in total.
    Cohomology(GraphArg),
    /// Cohomology basis forms.
    Basis {
        #[command(flatten)]
        g: GraphArg,
        /// Only this bidegree, written p,q.
        #[arg(long)]
        bidegree: Option<String>,
    },
    /// Poincaré pairing matrices of a boundaryless graph.
    Pairing(GraphArg),
    /// Integral of a (1,1)-form, or boundary integral of a (1,0)/(0,1)-form.
    Integrate(GraphFormArgs),
    /// Both sides of Stokes' formula for a (1,0)/(0,1)-form.
    Stokes(GraphFormArgs),
    /// A d''-preimage, or the obstruction to one.
    DdbarPreimage(GraphFormArgs),
    /// Pull a form back along a harmonic map.
    Pullback {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        form: PathBuf,
    },
    /// Quotient by a finite group of automorphisms.
    Quotient {
        #[arg(long)]
        action: PathBuf,
    },
    /// Harmonicity, tropical cycle and balancing of a tropicalization.
    Tropicalize {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        trop: PathBuf,
        /// Lagerberg form to pull back and integrate both ways.
        #[arg(long)]
        lagerberg: Option<PathBuf>,
        /// Generators of the value group; defaults to 1 and the edge lengths.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<String>>,
    },
    /// Local pullback certificate of a form at a point (v<id> or e<id>@<t>).
    CertifyLocal {
        #[command(flatten)]
        gf: GraphFormArgs,
        #[arg(long)]
        point: String,
    },
    /// Unweighted graph, and the transported form.
    Unweight {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        form: Option<PathBuf>,
    },
    /// Subdivide at points e<id>@<t>, transporting a form if given.
    Subdivide {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long = "at", required = true)]
        at: Vec<String>,
        #[arg(long)]
        form: Option<PathBuf>,
    },
    /// Curve cohomology table from skeleton data.
    Skeleton {
        #[arg(long)]
        skeleton: PathBuf,
    },
}

enum Failure {
    /// Malformed or inconsistent input.
    Input(String),
    /// A computation or check did not succeed.
    Math(String),
}

type Outcome = Result<(String, bool), Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn math(e: impl std::fmt::Display) -> Failure {
    Failure::Math(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: IoError) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<WeightedMetricGraph, Failure> {
    io::parse_graph(&read(path)?).map_err(|e| located(path, e))
}

fn load_form(path: &Path, g: &WeightedMetricGraph, k: u32) -> Result<GraphForm, Failure> {
    io::parse_form(&read(path)?, g, k).map_err(|e| located(path, e))
}

/// Loads a form and insists that it is valid on `g`.
fn load_valid_form(path: &Path, g: &WeightedMetricGraph, k: u32) -> Result<GraphForm, Failure> {
    let f = load_form(path, g, k)?;
    let r = validate_form(g, &f).map_err(input)?;
    if !r.is_valid() {
        return Err(Failure::Input(format!("{}: invalid form\n{r}", path.display())));
    }
    Ok(f)
}

fn run(cli: Cli) -> Outcome {
    let k = cli.k;
    let mut out = String::new();
    let ok = match cli.command {
        Command::Validate { graph, form, map } => {
            let mut ok = true;
            if let Some(p) = graph {
                let g = io::parse_graph_unchecked(&read(&p)?).map_err(|e| located(&p, e))?;
                let r = g.validate();
                if !r.is_valid() {
                    return Err(Failure::Input(format!("{}: invalid graph\n{r}", p.display())));
                }
                let _ = writeln!(out, "graph: valid, vertices {}, edges {}", g.num_vertices(), g.num_edges());
                if let Some(fp) = form {
                    let f = load_form(&fp, &g, k)?;
                    let r = validate_form(&g, &f).map_err(input)?;
                    ok &= r.is_valid();
                    let _ = writeln!(out, "form: {}", if r.is_valid() { "valid" } else { "invalid" });
                    write_report(&mut out, &r);
                }
            }
            if let Some(mp) = map {
                let m = io::parse_map(&read(&mp)?).map_err(|e| located(&mp, e))?;
                let r = validate_plmap(&m);
                ok &= r.is_valid();
                let _ = writeln!(out, "map: {}", if r.is_valid() { "valid" } else { "invalid" });
                write_report(&mut out, &r);
                if r.is_valid() {
                    match harmonicity(&m) {
                        Ok(c) => {
                            let d = c.degree.map_or("none".to_string(), |d| d.to_string());
                            let _ = writeln!(out, "harmonic: true\ndegree: {d}");
                        }
                        Err(e) => {
                            ok = false;
                            let _ = writeln!(out, "harmonic: false\nreason: {e}");
                        }
                    }
                }
            }
            ok
        }
        Command::Cohomology(a) => {
            let g = load_graph(&a.graph)?;
            let t = dolbeault_dimensions(&g);
            let _ = writeln!(out, "dimensions: {}", t.total);
            for (i, (d, c)) in t.per_component.iter().zip(&t.closed_form).enumerate() {
                let _ = writeln!(out, "component {i}: {d} closed-form {c}");
            }
            let _ = writeln!(out, "agrees: {}", t.agrees);
            t.agrees
        }
        Command::Basis { g: a, bidegree } => {
            let g = load_graph(&a.graph)?;
            let only = match bidegree {
                Some(s) => Some(parse_bidegree(&s)?),
                None => None,
            };
            let basis = cohomology_basis(&g, k).map_err(math)?;
            for b in Bidegree::all() {
                if only.is_some_and(|o| o != b) {
                    continue;
                }
                let forms = basis.get(b);
                let (p, q) = b.pq();
                let _ = writeln!(out, "h{p}{q}: {}", forms.len());
                for f in forms {
                    out.push_str(&io::serialize_form(f));
                }
            }
            true
        }
        Command::Pairing(a) => {
            let g = load_graph(&a.graph)?;
            let basis = cohomology_basis(&g, k).map_err(math)?;
            let p = poincare_pairing(&g, &basis).map_err(input)?;
            let _ = writeln!(out, "scalars: {}", join(&p.scalars));
            let _ = writeln!(out, "gram: {}x{}", p.gram.rows(), p.gram.cols());
            for i in 0..p.gram.rows() {
                let _ = writeln!(out, "  {}", join(p.gram.row(i)));
            }
            let _ = writeln!(out, "determinant: {}\nperfect: {}", p.determinant, p.perfect);
            p.perfect
        }
        Command::Integrate(a) => {
            let g = load_graph(&a.graph)?;
            let f = load_valid_form(&a.form, &g, k)?;
            let v = match f.bidegree() {
                Bidegree::B11 => f.integrate_graph(&g),
                Bidegree::B10 | Bidegree::B01 => f.integrate_boundary(&g),
                Bidegree::B00 => return Err(Failure::Input("functions have no integral; give a (1,1), (1,0) or (0,1) form".into())),
            }
            .map_err(math)?;
            let _ = writeln!(out, "integral: {v}");
            true
        }
        Command::Stokes(a) => {
            let g = load_graph(&a.graph)?;
            let f = load_valid_form(&a.form, &g, k)?;
            if !matches!(f.bidegree(), Bidegree::B10 | Bidegree::B01) {
                return Err(Failure::Input("stokes needs a (1,0) or (0,1) form".into()));
            }
            let s = f.stokes_check(&g).map_err(math)?;
            let _ = writeln!(out, "lhs={}\nrhs={}\nequal={}", s.lhs, s.rhs, s.equal);
            s.equal
        }
        Command::DdbarPreimage(a) => {
            let g = load_graph(&a.graph)?;
            let f = load_valid_form(&a.form, &g, k)?;
            match dbar_preimage(&g, &f).map_err(math)? {
                Preimage::Exact(eta) => {
                    let _ = writeln!(out, "exact: true");
                    out.push_str(&io::serialize_form(&eta));
                    true
                }
                Preimage::Obstructed(v) => {
                    let _ = writeln!(out, "exact: false\nobstruction: {}", join(&v));
                    false
                }
            }
        }
        Command::Pullback { map, form } => {
            let m = io::parse_map(&read(&map)?).map_err(|e| located(&map, e))?;
            let r = validate_plmap(&m);
            if !r.is_valid() {
                return Err(Failure::Input(format!("{}: invalid map\n{r}", map.display())));
            }
            let f = load_valid_form(&form, m.target(), k)?;
            let pulled = pullback_form(&m, &f).map_err(math)?;
            let mut ok = true;
            if f.bidegree() != Bidegree::B00 {
                let c = integrate_pullback_check(&m, &f).map_err(math)?;
                let _ = writeln!(out, "integral: pulled back {} degree times original {} equal {}", c.lhs, c.rhs, c.equal);
                ok = c.equal;
            }
            out.push_str(&io::serialize_form(&pulled));
            ok
        }
        Command::Quotient { action } => {
            let a = io::parse_action(&read(&action)?).map_err(|e| located(&action, e))?;
            let q = quotient(&a).map_err(math)?;
            let r = verify_quotient(&q.subdivision, &q.projection).map_err(math)?;
            let inv = invariant_cohomology(&a, k).map_err(math)?;
            let _ = writeln!(out, "group order: {}", a.order());
            out.push_str(&io::serialize_graph(&q.graph));
            let classes: Vec<String> = q.vertex_classes.iter().map(|v| v.0.to_string()).collect();
            let _ = writeln!(out, "vertex classes: {}", classes.join(" "));
            let _ = writeln!(out, "verified: {}", r.is_valid());
            write_report(&mut out, &r);
            let _ = writeln!(out, "invariant cohomology: {}\nquotient cohomology: {}\nagrees: {}", inv.invariant, inv.quotient, inv.agrees);
            r.is_valid() && inv.agrees && q.degrees_consistent
        }
        Command::Tropicalize { g: a, trop, lagerberg, gamma } => {
            let g = load_graph(&a.graph)?;
            let h = io::parse_tropicalization(&read(&trop)?, &g).map_err(|e| located(&trop, e))?;
            let gamma = value_group(&g, gamma)?;
            let c = check_harmonic_trop(&g, &h, &gamma, None).map_err(math)?;
            let _ = writeln!(out, "harmonic: {}\nintegral slopes: {}\ngamma-rational: {}", c.harmonic, c.integral, c.gamma);
            for w in &c.witnesses {
                let _ = writeln!(out, "  {w:?}");
            }
            let mut ok = c.harmonic && c.integral;
            if ok {
                let cycle = trop_cycle(&g, &h).map_err(math)?.refined();
                let _ = writeln!(out, "segments: {}", cycle.segments().len());
                for s in cycle.segments() {
                    let _ = writeln!(out, "  ({}) ({}) m={}", join(&s.start), join(&s.end), s.multiplicity);
                }
                let bad = check_balancing(&cycle);
                let _ = writeln!(out, "balanced: {}", bad.is_empty());
                for b in &bad {
                    let _ = writeln!(out, "  at ({}) sum ({})", join(&b.point), io::format_ints(&b.sum));
                }
                ok &= bad.is_empty();
                if let Some(lp) = lagerberg {
                    let eta = io::parse_lagerberg(&read(&lp)?).map_err(|e| located(&lp, e))?;
                    if eta.dim() != h.dim() {
                        return Err(Failure::Input(format!("form lives on R^{}, tropicalization on R^{}", eta.dim(), h.dim())));
                    }
                    let pulled = pullback_lagerberg(&g, &h, &eta, k).map_err(math)?;
                    out.push_str(&io::serialize_form(&pulled));
                    if eta.bidegree() != Bidegree::B00 {
                        let cc = integration_compat_check(&g, &h, &eta).map_err(math)?;
                        let _ = writeln!(out, "graph integral: {}\ntropical integral: {}\nequal: {}", cc.graph_side, cc.trop_side, cc.equal);
                        ok &= cc.equal;
                    }
                }
            }
            ok
        }
        Command::CertifyLocal { gf, point } => {
            let g = load_graph(&gf.graph)?;
            let f = load_valid_form(&gf.form, &g, k)?;
            let x = io::parse_point(&point, &g).map_err(input)?;
            let gamma = value_group(&g, None)?;
            let c = match local_pullback_certificate(&g, &f, &x, &gamma) {
                Ok(c) => c,
                Err(e @ TropicalError::NotPolynomialNear(_)) => return Err(math(e)),
                Err(e) => return Err(input(e)),
            };
            let _ = writeln!(out, "case: {}", c.case.name());
            let _ = writeln!(out, "centre: {}", io::format_point(&c.centre));
            let _ = writeln!(out, "scale: {}", c.scale);
            for iv in &c.ambient {
                let _ = writeln!(out, "  edge {} [{}, {}]", iv.edge.0, iv.start, iv.end);
            }
            out.push_str(&io::serialize_graph(&c.neighbourhood.graph));
            out.push_str(&io::serialize_tropicalization(&c.neighbourhood.graph, &c.tropicalization));
            out.push_str(&io::serialize_lagerberg(&c.eta));
            let _ = writeln!(out, "verified: {}", c.verified);
            c.verified
        }
        Command::Unweight { g: a, form } => {
            let g = load_graph(&a.graph)?;
            let (g0, _) = g.unweight();
            out.push_str(&io::serialize_graph(&g0));
            if let Some(fp) = form {
                let f = load_valid_form(&fp, &g, k)?;
                out.push_str(&io::serialize_form(&f.to_unweighted(&g).map_err(math)?));
            }
            true
        }
        Command::Subdivide { g: a, at, form } => {
            let g = load_graph(&a.graph)?;
            let mut points = Vec::new();
            for s in &at {
                points.push(parse_edge_point(s, &g)?);
            }
            let (sub, corr) = g.subdivide(&points).map_err(input)?;
            out.push_str(&io::serialize_graph(&sub));
            for (i, iv) in corr.edge_intervals.iter().enumerate() {
                let _ = writeln!(out, "piece {i} of edge {} [{}, {}]", iv.edge.0, iv.start, iv.end);
            }
            if let Some(fp) = form {
                let f = load_valid_form(&fp, &g, k)?;
                out.push_str(&io::serialize_form(&f.along_correspondence(&sub, &g, &corr).map_err(math)?));
            }
            true
        }
        Command::Skeleton { skeleton } => {
            let d = io::parse_skeleton(&read(&skeleton)?).map_err(|e| located(&skeleton, e))?;
            let c = curve_cohomology(&d).map_err(input)?;
            for v in &c.blown_up {
                let _ = writeln!(out, "blown up: component at vertex {}", v.0);
            }
            for (i, comp) in c.components.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "component {i}: genus {} boundary {} computed {} expected {}",
                    comp.genus, comp.boundary, comp.computed, comp.expected
                );
            }
            let _ = writeln!(out, "agrees: {}", c.agrees);
            c.agrees
        }
    };
    Ok((out, ok))
}

fn join(v: &[Rational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_report(out: &mut String, r: &ValidationReport) {
    if r.is_valid() {
        return;
    }
    for line in r.to_string().lines().filter(|l| !l.trim().is_empty()) {
        let _ = writeln!(out, "  {line}");
    }
}

fn parse_bidegree(s: &str) -> Result<Bidegree, Failure> {
    let (p, q) = s.split_once(',').ok_or_else(|| Failure::Input(format!("`{s}` is not a bidegree p,q")))?;
    p.parse()
        .ok()
        .zip(q.parse().ok())
        .and_then(|(p, q)| Bidegree::from_pq(p, q))
        .ok_or_else(|| Failure::Input(format!("`{s}` is not a bidegree p,q")))
}

fn parse_edge_point(s: &str, g: &WeightedMetricGraph) -> Result<(EdgeId, Rational), Failure> {
    let bad = || Failure::Input(format!("`{s}` is not an edge point e<id>@<t>"));
    let (e, t) = s.strip_prefix('e').and_then(|r| r.split_once('@')).ok_or_else(bad)?;
    let e: usize = e.parse().map_err(|_| bad())?;
    let t = parse_rational(t).ok_or_else(bad)?;
    if e >= g.num_edges() {
        return Err(Failure::Input(format!("unknown edge {e}")));
    }
    Ok((EdgeId(e), t))
}

fn value_group(g: &WeightedMetricGraph, gens: Option<Vec<String>>) -> Result<GammaGroup, Failure> {
    let gens = match gens {
        Some(list) => list
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| Failure::Input(format!("`{s}` is not a rational"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => std::iter::once(Rational::from_integer(1.into())).chain(g.edges().iter().map(|e| e.length.clone())).collect(),
    };
    GammaGroup::new(gens, false).ok_or_else(|| Failure::Input("value group generators must be positive".into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}
