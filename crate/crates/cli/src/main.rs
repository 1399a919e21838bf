//! `drwkit`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails or an
//! operation reports a mathematical obstruction, 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use drwkit::arith::{apply_map, lattice_intersect, smith_decompose, IntMatrix, MPoly, RingMap};
use drwkit::derham::{build_de_rham, frobenius_on_forms, universal_da_map, Form};
use drwkit::dieudonne::{
    check_dieudonne, check_dieudonne_algebra, check_wr_structure, classification_catalog,
    classify_relations_check, complex_catalog, eta_p, is_saturated, saturate, solve_verschiebung,
    strictness_probe, wr_quotient, DieudonneComplex, Orientation, DEFAULT_MAX_ITER, DEFAULT_R_MAX,
};
use drwkit::drw::{self, BaseRing, DRWTruncation};
use drwkit::mixed::{
    adjunction_check, beilinson_truncate, check_mixed, ddr_mixed, eta_p_mixed, heart_embed, mixed_catalog,
    p_twist, CochainComplex, GradedMixedComplex, DEFAULT_HOM_BUDGET,
};
use drwkit::report::CheckReport;
use drwkit::selftest::{selftest, SelftestConfig};
use drwkit::witt::{
    char_poly_witt, delta_laws_check, delta_of, ker_membership, w2_section_check, BigWittVector, DeltaRing,
    EndoClass, WittVector,
};
use drwkit::{Error, SCHEMA_VERSION};

/// Environment variables overriding the default budgets.
const ENV_HOM_BUDGET: &str = "DRWKIT_HOM_BUDGET";
const ENV_SPAN_BUDGET: &str = "DRWKIT_SPAN_BUDGET";

#[derive(Parser)]
#[command(name = "drwkit", version, about = "Witt vectors, Dieudonné complexes and de Rham–Witt complexes")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Polynomials and integer matrices.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// p-typical and big Witt vectors, δ-rings.
    #[command(subcommand)]
    Witt(WittCmd),
    /// de Rham complexes of Z_(p)[x] with Frobenius.
    #[command(subcommand)]
    Derham(DerhamCmd),
    /// Dieudonné complexes and algebras.
    #[command(subcommand)]
    Dieudonne(DieudonneCmd),
    /// Graded mixed complexes.
    #[command(subcommand)]
    Mixed(MixedCmd),
    /// Truncated de Rham–Witt complexes of F_p[x].
    #[command(subcommand)]
    Drw(DrwCmd),
    /// Runs every acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Subcommand)]
enum ArithCmd {
    /// Substitutes the images into a polynomial.
    Apply {
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Target variables; defaults to the source variables.
        #[arg(long, value_delimiter = ',')]
        target_vars: Option<Vec<String>>,
        /// One image per source variable, separated by commas.
        #[arg(long)]
        map: String,
        #[arg(long)]
        poly: String,
    },
    /// Divides a polynomial by p exactly.
    Divp {
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        poly: String,
    },
    /// Smith form U·A·V = D.
    Smith {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        matrix: String,
    },
    /// Intersection of two column lattices.
    Intersect {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Args)]
struct WittVec {
    #[arg(long)]
    p: u64,
    /// Length; the coordinates are padded with zeros up to it.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coords: Vec<i64>,
}

#[derive(Subcommand)]
enum WittCmd {
    /// Ghost components.
    Ghost(WittVec),
    /// Witt vector with the given ghost components.
    FromGhost {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ghost: Vec<i64>,
    },
    /// Witt sum of --coords and --other.
    Add {
        #[command(flatten)]
        x: WittVec,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        other: Vec<i64>,
    },
    /// Witt product of --coords and --other.
    Mul {
        #[command(flatten)]
        x: WittVec,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        other: Vec<i64>,
    },
    /// Frobenius (length drops by one).
    Frob(WittVec),
    /// Verschiebung (length grows by one).
    Versch(WittVec),
    /// Teichmüller representative [a] of length n.
    Teich {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
    },
    /// δ of a polynomial for a Frobenius lift, with the δ-ring laws.
    Delta {
        /// Base ring, e.g. Z_(2)[x,y].
        #[arg(long)]
        ring: String,
        /// Images of the variables under φ, separated by commas.
        #[arg(long)]
        lift: String,
        /// Polynomials to apply δ to and to test the laws on.
        #[arg(long, value_delimiter = ',')]
        samples: Vec<String>,
    },
    /// Big Witt vectors.
    #[command(subcommand)]
    Bigwitt(BigWittCmd),
}

#[derive(Subcommand)]
enum BigWittCmd {
    /// det(1 − tA) as a big Witt vector.
    Charpoly {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 8)]
        trunc: usize,
    },
    /// F_m of 1 + a_1 t + … .
    Frob {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        series: Vec<i64>,
        #[arg(long)]
        m: usize,
    },
    /// V_m of 1 + a_1 t + … .
    Versch {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        series: Vec<i64>,
        #[arg(long)]
        m: usize,
    },
    /// Whether F_p(w) = 1 for all primes p up to the bound.
    Kernel {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        series: Vec<i64>,
        #[arg(long)]
        prime_bound: u64,
    },
}

#[derive(Args)]
struct RingLift {
    /// Base ring, e.g. Z_(3)[x,y].
    #[arg(long)]
    ring: String,
    /// Images of the variables under φ; defaults to x ↦ x^p.
    #[arg(long)]
    lift: Option<String>,
    #[arg(long, default_value_t = 3)]
    degree_bound: u32,
}

#[derive(Subcommand)]
enum DerhamCmd {
    /// Ranks and d on monomial forms.
    Build {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
    },
    /// F(dx_i) for a Frobenius lift, with dF = pFd checked.
    Frob(RingLift),
    /// The map of Dieudonné algebras extending a ring map.
    Map {
        #[command(flatten)]
        source: RingLift,
        #[arg(long)]
        target_ring: String,
        #[arg(long)]
        target_lift: Option<String>,
        /// Images of the source variables, separated by commas.
        #[arg(long)]
        map: String,
    },
}

#[derive(Args)]
struct ComplexSource {
    /// Dieudonné complex JSON file.
    #[arg(long, conflicts_with = "catalog")]
    complex: Option<PathBuf>,
    /// Index into the built-in catalog.
    #[arg(long)]
    catalog: Option<usize>,
}

#[derive(Subcommand)]
enum DieudonneCmd {
    /// dd = 0 and dF = pFd.
    Check(ComplexSource),
    /// Décalage η_p with the comparison map α.
    Eta(ComplexSource),
    /// The saturation tower.
    Saturate {
        #[command(flatten)]
        src: ComplexSource,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// V with FV = VF = p on a saturated complex.
    Verschiebung(ComplexSource),
    /// The quotient W_r with its structure maps.
    Wr {
        #[command(flatten)]
        src: ComplexSource,
        #[arg(long)]
        r: u32,
    },
    /// Strictness probe up to W_{r_max}.
    Strict {
        #[command(flatten)]
        src: ComplexSource,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: u32,
    },
    /// The Dieudonné algebra axioms for the de Rham complex of a lift.
    Algebra(RingLift),
    /// The classification relations on a catalog datum.
    Classify {
        #[arg(long)]
        catalog: usize,
        #[arg(long, value_enum, default_value_t = OrientationArg::Standard)]
        orientation: OrientationArg,
        #[arg(long, default_value_t = 3)]
        degree_bound: u32,
    },
    /// Lists the built-in complexes.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Standard,
    Reversed,
}

#[derive(Args)]
struct MixedSource {
    /// Graded mixed complex JSON file.
    #[arg(long)]
    complex: Option<PathBuf>,
    /// Built-in complex over Z/p², as p:index.
    #[arg(long)]
    catalog: Option<String>,
    /// Heart of the Dieudonné catalog complex with this index (exact).
    #[arg(long)]
    heart_of: Option<usize>,
}

#[derive(Subcommand)]
enum MixedCmd {
    /// The graded mixed complex laws.
    Check(MixedSource),
    /// [p]*: ε multiplied by p.
    Twist(MixedSource),
    /// Mixed décalage η_p.
    Eta(MixedSource),
    /// |Hom([p]*M, N)| = |Hom(M, η_pN)|.
    Adjoint {
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        /// Largest total dimension to enumerate.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Beilinson t-structure report and truncation.
    Truncate(MixedSource),
    /// Heart embedding of a Dieudonné complex.
    Heart(ComplexSource),
    /// The de Rham complex of a lift as a graded mixed complex.
    Ddr(RingLift),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Direct,
    Saturation,
    Both,
}

#[derive(Args)]
struct DrwArgs {
    /// e.g. F2[x] or F3[x,y].
    #[arg(long)]
    ring: String,
    #[arg(long)]
    level: usize,
    #[arg(long)]
    weight_bound: u64,
}

#[derive(Subcommand)]
enum DrwCmd {
    /// Presents W_nΩ by either route and reports every nonzero piece.
    Compute {
        #[command(flatten)]
        t: DrwArgs,
        #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
        route: RouteArg,
        #[arg(long, default_value_t = drw::DEFAULT_ITER_CAP)]
        iter_cap: usize,
        /// Cap on the spanning set of the direct route.
        #[arg(long)]
        budget: Option<usize>,
        /// Also run the identity suite on each route.
        #[arg(long)]
        check: bool,
    },
    /// W_n(F_p[x]) by generators and relations, against the Witt-coordinate oracle.
    Presentation(DrwArgs),
    /// The eight identities on the generators of one route.
    Identities {
        #[command(flatten)]
        t: DrwArgs,
        #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
        route: RouteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    hom_budget: Option<usize>,
    #[arg(long)]
    span_budget: Option<usize>,
}

/// A finished command: a JSON document, its text rendering, and whether
/// every check in it passed.
struct Outcome {
    json: Value,
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Outcome { json, text: text.into(), passed: true }
    }

    fn checked(json: Value, text: impl Into<String>, passed: bool) -> Self {
        Outcome { json, text: text.into(), passed }
    }
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::ShapeMismatch(_)
            | Error::ArityMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage(s: impl Into<String>) -> Failure {
    Failure::Usage(s.into())
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
    match run(&cli.command) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => {
                    let mut doc = json!({ "schema_version": SCHEMA_VERSION });
                    if let (Value::Object(d), Value::Object(o)) = (&mut doc, out.json) {
                        d.extend(o);
                    }
                    doc["passed"] = json!(out.passed);
                    serde_json::to_string_pretty(&doc).expect("json") + "\n"
                }
                Format::Text => out.text.trim_end().to_string() + "\n",
            };
            if let Err(e) = emit(&cli.out, &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(m)) => {
            eprintln!("failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::Arith(c) => arith(c),
        Command::Witt(c) => witt(c),
        Command::Derham(c) => derham(c),
        Command::Dieudonne(c) => dieudonne(c),
        Command::Mixed(c) => mixed(c),
        Command::Drw(c) => drw_cmd(c),
        Command::Selftest(a) => selftest_cmd(a),
    }
}

// ---- parsing helpers ----

fn parse_matrix(s: &str) -> Res<IntMatrix> {
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| usage(format!("bad matrix {s:?}: {e}")))?;
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(usage(format!("ragged matrix {s:?}")));
    }
    Ok(IntMatrix::from_rows(&rows))
}

/// `Z_(p)[x,y]`, `Z(p)[x]` or `Zp[x]`.
fn parse_zp_ring(s: &str) -> Res<(u64, Vec<String>)> {
    let bad = || usage(format!("expected a ring like Z_(3)[x,y], found {s:?}"));
    let rest = s.trim().strip_prefix('Z').ok_or_else(bad)?;
    let rest = rest.trim_start_matches('_').trim_start_matches('(');
    let (num, vars) = rest.split_once('[').ok_or_else(bad)?;
    let p: u64 = num.trim_end_matches(')').parse().map_err(|_| bad())?;
    let vars = vars.strip_suffix(']').ok_or_else(bad)?;
    let vars: Vec<String> = vars.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    Ok((p, vars))
}

fn parse_polys(vars: &[String], s: &str) -> Res<Vec<MPoly>> {
    s.split(',').map(|q| MPoly::parse(vars, q.trim()).map_err(Failure::from)).collect()
}

fn lift_for(ring: &str, lift: &Option<String>) -> Res<DeltaRing> {
    let (p, vars) = parse_zp_ring(ring)?;
    Ok(match lift {
        Some(l) => DeltaRing::new(p, RingMap::new(&vars, &vars, parse_polys(&vars, l)?)?)?,
        None => DeltaRing::frobenius_lift(&vars, p)?,
    })
}

fn witt_vec(a: &WittVec) -> Res<WittVector<BigInt>> {
    coords_vec(a.p, a.n, &a.coords)
}

fn coords_vec(p: u64, n: Option<usize>, coords: &[i64]) -> Res<WittVector<BigInt>> {
    let mut c: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
    if let Some(n) = n {
        if c.len() > n {
            return Err(usage(format!("{} coordinates for length {n}", c.len())));
        }
        c.resize(n, BigInt::from(0));
    }
    Ok(WittVector::new(p, c)?)
}

fn big_witt(series: &[i64]) -> Res<BigWittVector<BigInt>> {
    Ok(BigWittVector::new(series.iter().map(|&x| BigInt::from(x)).collect())?)
}

fn int_list(v: &[BigInt]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn big_json(v: &[BigInt]) -> Value {
    json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn witt_out(op: &str, w: &WittVector<BigInt>) -> Outcome {
    Outcome::ok(json!({ "op": op, "p": w.p(), "coords": big_json(w.coords()) }), int_list(w.coords()))
}

fn report_json(r: &CheckReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn reports(op: &str, reps: Vec<CheckReport>, extra: Value, text_head: String) -> Outcome {
    let passed = reps.iter().all(|r| r.passed);
    let mut text = text_head;
    for r in &reps {
        text += &format!("{r}\n");
    }
    let mut doc = json!({ "op": op, "checks": reps.iter().map(report_json).collect::<Vec<_>>() });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    Outcome::checked(doc, text, passed)
}

fn forms_json(forms: &[(String, Form)]) -> Value {
    Value::Array(
        forms
            .iter()
            .map(|(k, f)| json!({ "input": k, "image": serde_json::to_value(f).expect("forms serialize") }))
            .collect(),
    )
}

fn forms_text(forms: &[(String, Form)]) -> String {
    forms.iter().map(|(k, f)| format!("{k} ↦ {f}\n")).collect()
}

// ---- arith ----

fn arith(c: &ArithCmd) -> Res<Outcome> {
    match c {
        ArithCmd::Apply { vars, target_vars, map, poly } => {
            let target = target_vars.clone().unwrap_or_else(|| vars.clone());
            let f = RingMap::new(vars, &target, parse_polys(&target, map)?)?;
            let q = MPoly::parse(vars, poly)?;
            let r = apply_map(&f, &q)?;
            Ok(Outcome::ok(json!({ "op": "apply_map", "result": r, "text": r.to_string() }), r.to_string()))
        }
        ArithCmd::Divp { vars, p, poly } => {
            let q = MPoly::parse(vars, poly)?;
            let r = q.exact_div_p(*p)?;
            Ok(Outcome::ok(json!({ "op": "exact_div_p", "result": r, "text": r.to_string() }), r.to_string()))
        }
        ArithCmd::Smith { matrix } => {
            let a = parse_matrix(matrix)?;
            let (u, d, v) = smith_decompose(&a);
            let ok = u.mul(&a).mul(&v) == d;
            let text = format!("U = {u}\nD = {d}\nV = {v}");
            Ok(Outcome::checked(json!({ "op": "smith_decompose", "U": u, "D": d, "V": v }), text, ok))
        }
        ArithCmd::Intersect { a, b } => {
            let m = lattice_intersect(&parse_matrix(a)?, &parse_matrix(b)?)?;
            Ok(Outcome::ok(json!({ "op": "lattice_intersect", "generators": m }), m.to_string()))
        }
    }
}

// ---- witt ----

fn witt(c: &WittCmd) -> Res<Outcome> {
    match c {
        WittCmd::Ghost(a) => {
            let g = witt_vec(a)?.ghost();
            Ok(Outcome::ok(json!({ "op": "ghost", "p": a.p, "ghost": big_json(&g) }), int_list(&g)))
        }
        WittCmd::FromGhost { p, ghost } => {
            let g: Vec<BigInt> = ghost.iter().map(|&x| BigInt::from(x)).collect();
            Ok(witt_out("from_ghost", &WittVector::from_ghost(*p, &g)?))
        }
        WittCmd::Add { x, other } => {
            let y = coords_vec(x.p, x.n, other)?;
            Ok(witt_out("witt_add", &witt_vec(x)?.add(&y)?))
        }
        WittCmd::Mul { x, other } => {
            let y = coords_vec(x.p, x.n, other)?;
            Ok(witt_out("witt_mul", &witt_vec(x)?.mul(&y)?))
        }
        WittCmd::Frob(a) => Ok(witt_out("frobenius", &witt_vec(a)?.frobenius()?)),
        WittCmd::Versch(a) => Ok(witt_out("verschiebung", &witt_vec(a)?.verschiebung())),
        WittCmd::Teich { p, n, a } => {
            Ok(witt_out("teichmuller", &WittVector::teichmuller(BigInt::from(*a), *p, *n)))
        }
        WittCmd::Delta { ring, lift, samples } => {
            let r = lift_for(ring, &Some(lift.clone()))?;
            let samples: Vec<MPoly> = if samples.is_empty() {
                (0..r.vars().len()).map(|i| MPoly::var(r.vars(), i)).collect()
            } else {
                samples.iter().map(|s| MPoly::parse(r.vars(), s)).collect::<drwkit::Result<_>>()?
            };
            let mut values = Vec::new();
            let mut head = String::new();
            for a in &samples {
                let d = delta_of(&r, a)?;
                head += &format!("δ({a}) = {d}\n");
                values.push(json!({ "input": a.to_string(), "delta": d.to_string() }));
            }
            let reps = vec![delta_laws_check(&r, &samples), w2_section_check(&r, &samples)];
            Ok(reports("delta_of", reps, json!({ "p": r.p(), "values": values }), head))
        }
        WittCmd::Bigwitt(b) => bigwitt(b),
    }
}

fn bigwitt(c: &BigWittCmd) -> Res<Outcome> {
    let out = |op: &str, w: &BigWittVector<BigInt>| {
        Outcome::ok(json!({ "op": op, "series": big_json(w.series()) }), int_list(w.series()))
    };
    match c {
        BigWittCmd::Charpoly { matrix, trunc } => {
            let e = EndoClass::new(parse_matrix(matrix)?)?;
            Ok(out("char_poly_witt", &char_poly_witt(&e, *trunc)))
        }
        BigWittCmd::Frob { series, m } => Ok(out("bigwitt_frobenius", &big_witt(series)?.frobenius(*m)?)),
        BigWittCmd::Versch { series, m } => {
            Ok(out("bigwitt_verschiebung", &big_witt(series)?.verschiebung(*m)?))
        }
        BigWittCmd::Kernel { series, prime_bound } => {
            let k = ker_membership(&big_witt(series)?, *prime_bound)?;
            Ok(Outcome::ok(json!({ "op": "ker_membership", "member": k }), k.to_string()))
        }
    }
}

// ---- derham ----

fn derham(c: &DerhamCmd) -> Res<Outcome> {
    match c {
        DerhamCmd::Build { ring, degree_bound } => {
            let (_, vars) = parse_zp_ring(ring)?;
            let cx = build_de_rham(&vars);
            let ranks: Vec<usize> = (0..=vars.len()).map(|i| cx.rank(i)).collect();
            let dga = frobenius_on_forms(&cx, &DeltaRing::frobenius_lift(&vars, 2)?)?;
            let mut images = Vec::new();
            for k in 0..vars.len() {
                for w in dga.dga().monomial_basis(k, *degree_bound) {
                    images.push((w.to_string(), cx.d(&w)));
                }
            }
            let text = format!("ranks {ranks:?}\n{}", forms_text(&images));
            Ok(Outcome::ok(
                json!({ "op": "build_de_rham", "vars": vars, "ranks": ranks, "d": forms_json(&images) }),
                text,
            ))
        }
        DerhamCmd::Frob(a) => {
            let r = lift_for(&a.ring, &a.lift)?;
            let cx = build_de_rham(r.vars());
            let f = frobenius_on_forms(&cx, &r)?;
            let images: Vec<(String, Form)> = (0..r.vars().len())
                .map(|i| (format!("d{}", r.vars()[i]), f.frobenius_dx(i).clone()))
                .collect();
            let reps = vec![
                f.dga().check_dieudonne_relation(a.degree_bound),
                f.dga().check_d_squared(a.degree_bound),
            ];
            Ok(reports("frobenius_on_forms", reps, json!({ "F": forms_json(&images) }), forms_text(&images)))
        }
        DerhamCmd::Map { source, target_ring, target_lift, map } => {
            let r = lift_for(&source.ring, &source.lift)?;
            let t = lift_for(target_ring, target_lift)?;
            let target = frobenius_on_forms(&build_de_rham(t.vars()), &t)?;
            let f = RingMap::new(r.vars(), t.vars(), parse_polys(t.vars(), map)?)?;
            let m = universal_da_map(&r, &target, &f)?;
            let images: Vec<(String, Form)> =
                (0..r.vars().len()).map(|i| (format!("d{}", r.vars()[i]), m.image_dx(i).clone())).collect();
            Ok(reports(
                "universal_da_map",
                vec![m.check()],
                json!({ "dx": forms_json(&images) }),
                forms_text(&images),
            ))
        }
    }
}

// ---- dieudonne ----

fn load_complex(src: &ComplexSource) -> Res<(String, DieudonneComplex)> {
    match (&src.complex, src.catalog) {
        (Some(path), _) => {
            let s = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&s).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), DieudonneComplex::from_json(&v)?))
        }
        (None, Some(i)) => {
            let cat = complex_catalog();
            let c = cat.get(i).ok_or_else(|| usage(format!("catalog has {} entries", cat.len())))?;
            Ok((c.name.to_string(), c.complex.clone()))
        }
        (None, None) => Err(usage("pass --complex FILE or --catalog INDEX")),
    }
}

fn matrices(ms: &[IntMatrix]) -> Value {
    serde_json::to_value(ms).expect("matrices serialize")
}

fn dieudonne(c: &DieudonneCmd) -> Res<Outcome> {
    match c {
        DieudonneCmd::Check(src) => {
            let (name, m) = load_complex(src)?;
            Ok(reports("check_dieudonne", vec![check_dieudonne(&m)], json!({ "input": name }), String::new()))
        }
        DieudonneCmd::Eta(src) => {
            let (name, m) = load_complex(src)?;
            let e = eta_p(&m)?;
            let text = format!("η_p({name}):\n{}\nα = {:?}", e.complex.to_json(), e.alpha);
            Ok(Outcome::ok(
                json!({ "op": "eta_p", "input": name, "complex": e.complex.to_json(), "alpha": matrices(&e.alpha) }),
                text,
            ))
        }
        DieudonneCmd::Saturate { src, max_iter } => {
            let (name, m) = load_complex(src)?;
            let t = saturate(&m, *max_iter)?;
            let sat = t.result().expect("saturate returns stabilized towers");
            let text = format!(
                "{name}: stabilized at stage {}; saturated: {}\n{}",
                t.stabilized_at.expect("stabilized"),
                is_saturated(sat),
                sat.to_json()
            );
            let doc = json!({
                "op": "saturate",
                "input": name,
                "stabilized_at": t.stabilized_at,
                "is_saturated": is_saturated(sat),
                "stages": t.stages.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            });
            Ok(reports("saturate", vec![t.check_functoriality()], doc, text + "\n"))
        }
        DieudonneCmd::Verschiebung(src) => {
            let (name, m) = load_complex(src)?;
            let v = solve_verschiebung(&m)?;
            Ok(Outcome::ok(
                json!({ "op": "solve_verschiebung", "input": name, "V": matrices(&v) }),
                format!("V = {v:?}"),
            ))
        }
        DieudonneCmd::Wr { src, r } => {
            let (name, m) = load_complex(src)?;
            let q = wr_quotient(&m, *r)?;
            let text = format!("W_{r}({name}): log_p orders {:?}\n", q.log_sizes(m.p()));
            let doc = json!({ "op": "wr_quotient", "input": name, "quotient": serde_json::to_value(&q).expect("json") });
            Ok(reports("wr_quotient", vec![check_wr_structure(&m, *r)?], doc, text))
        }
        DieudonneCmd::Strict { src, r_max } => {
            let (name, m) = load_complex(src)?;
            let s = strictness_probe(&m, *r_max)?;
            let text = format!("{name}: {:?}", s.verdict);
            Ok(Outcome::ok(
                json!({ "op": "strictness_probe", "input": name, "report": serde_json::to_value(&s).expect("json") }),
                text,
            ))
        }
        DieudonneCmd::Algebra(a) => {
            let r = lift_for(&a.ring, &a.lift)?;
            let f = frobenius_on_forms(&build_de_rham(r.vars()), &r)?;
            let rep = check_dieudonne_algebra(f.dga(), a.degree_bound);
            Ok(reports("check_dieudonne_algebra", vec![rep], json!({}), String::new()))
        }
        DieudonneCmd::Classify { catalog, orientation, degree_bound } => {
            let cat = classification_catalog();
            let d = cat.get(*catalog).ok_or_else(|| usage(format!("catalog has {} entries", cat.len())))?;
            let o = match orientation {
                OrientationArg::Standard => Orientation::Standard,
                OrientationArg::Reversed => Orientation::Reversed,
            };
            let c = classify_relations_check(&d.datum, o, *degree_bound);
            let mut reps = vec![c.relations.clone()];
            reps.extend(c.assembled.clone());
            let mut out = reports(
                "classify_relations_check",
                reps,
                json!({ "input": d.name }),
                format!("{}\n", d.name),
            );
            out.passed = c.passed();
            Ok(out)
        }
        DieudonneCmd::Catalog => {
            let cat = complex_catalog();
            let text: String =
                cat.iter().enumerate().map(|(i, c)| format!("{i}: {} ({:?})\n", c.name, c.expect)).collect();
            let doc: Vec<Value> = cat
                .iter()
                .enumerate()
                .map(|(i, c)| json!({ "index": i, "name": c.name, "complex": c.complex.to_json() }))
                .collect();
            Ok(Outcome::ok(json!({ "op": "catalog", "complexes": doc }), text))
        }
    }
}

// ---- mixed ----

fn catalog_mixed(entry: &str) -> Res<(String, GradedMixedComplex)> {
    let bad = || usage(format!("expected --catalog p:index, found {entry:?}"));
    let (p, i) = entry.split_once(':').ok_or_else(bad)?;
    let (p, i): (u64, usize) = (p.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?);
    if !drwkit::arith::is_prime(p) {
        return Err(usage(format!("{p} is not prime")));
    }
    let cat = mixed_catalog(p);
    let (name, c) = cat.get(i).ok_or_else(|| usage(format!("catalog has {} entries", cat.len())))?;
    Ok((format!("{name} (p = {p})"), c.clone()))
}

fn load_mixed(src: &MixedSource) -> Res<(String, GradedMixedComplex)> {
    match (&src.complex, &src.catalog, src.heart_of) {
        (Some(path), None, None) => {
            let s = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&s).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), GradedMixedComplex::from_json(&v)?))
        }
        (None, Some(entry), None) => catalog_mixed(entry),
        (None, None, Some(i)) => {
            let (name, m) = load_complex(&ComplexSource { complex: None, catalog: Some(i) })?;
            Ok((format!("heart of {name}"), heart_embed(&CochainComplex::from_dieudonne(&m))))
        }
        _ => Err(usage("pass exactly one of --complex, --catalog, --heart-of")),
    }
}

/// `p:index` from the catalog, or a JSON file.
fn mixed_arg(s: &str) -> Res<(String, GradedMixedComplex)> {
    if s.contains(':') && !std::path::Path::new(s).exists() {
        catalog_mixed(s)
    } else {
        load_mixed(&MixedSource { complex: Some(PathBuf::from(s)), catalog: None, heart_of: None })
    }
}

fn env_budget(var: &str) -> Res<Option<usize>> {
    match std::env::var(var) {
        Ok(v) => v.parse().map(Some).map_err(|_| usage(format!("{var} must be a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn mixed_out(op: &str, name: &str, c: &GradedMixedComplex) -> Outcome {
    let chk = check_mixed(c);
    let text = format!("{op}({name}):\n{}\n{chk}", serde_json::to_string(&c.to_json()).expect("json"));
    let passed = chk.passed;
    Outcome::checked(
        json!({ "op": op, "input": name, "complex": c.to_json(), "checks": [report_json(&chk)] }),
        text,
        passed,
    )
}

fn mixed(c: &MixedCmd) -> Res<Outcome> {
    match c {
        MixedCmd::Check(src) => {
            let (name, m) = load_mixed(src)?;
            Ok(reports("check_mixed", vec![check_mixed(&m)], json!({ "input": name }), String::new()))
        }
        MixedCmd::Twist(src) => {
            let (name, m) = load_mixed(src)?;
            Ok(mixed_out("p_twist", &name, &p_twist(&m)))
        }
        MixedCmd::Eta(src) => {
            let (name, m) = load_mixed(src)?;
            Ok(mixed_out("eta_p_mixed", &name, &eta_p_mixed(&m)?.complex))
        }
        MixedCmd::Adjoint { m, n, budget, samples, seed } => {
            let (mn, mc) = mixed_arg(m)?;
            let (nn, nc) = mixed_arg(n)?;
            let budget = budget.or(env_budget(ENV_HOM_BUDGET)?).unwrap_or(DEFAULT_HOM_BUDGET);
            let r = adjunction_check(&mc, &nc, budget, *samples, *seed)?;
            let mut rep = r.report.clone();
            rep.check(
                "|Hom([p]*M, N)| = |Hom(M, η_pN)|",
                r.left_log_count == r.right_log_count,
                String::new,
                || format!("p^{} vs p^{}", r.left_log_count, r.right_log_count),
            );
            let head = format!(
                "M = {mn}, N = {nn}\nlog_p |Hom([p]*M, N)| = {}\nlog_p |Hom(M, η_pN)| = {}\n",
                r.left_log_count, r.right_log_count
            );
            let doc = json!({ "M": mn, "N": nn, "left_log_count": r.left_log_count, "right_log_count": r.right_log_count });
            Ok(reports("adjunction_check", vec![rep], doc, head))
        }
        MixedCmd::Truncate(src) => {
            let (name, m) = load_mixed(src)?;
            let (rep, t) = beilinson_truncate(&m);
            let text = format!(
                "{name}: t-connective {}, t-coconnective {}\n{}",
                rep.t_connective,
                rep.t_coconnective,
                t.as_ref().map_or("no strict truncation (not exact)".into(), |t| serde_json::to_string(
                    &t.to_json()
                )
                .expect("json"))
            );
            let doc = json!({
                "op": "beilinson_truncate",
                "input": name,
                "report": serde_json::to_value(&rep).expect("json"),
                "truncation": t.map(|t| t.to_json()),
            });
            Ok(Outcome::ok(doc, text))
        }
        MixedCmd::Heart(src) => {
            let (name, m) = load_complex(src)?;
            Ok(mixed_out("heart_embed", &name, &heart_embed(&CochainComplex::from_dieudonne(&m))))
        }
        MixedCmd::Ddr(a) => {
            let r = lift_for(&a.ring, &a.lift)?;
            let m = ddr_mixed(&build_de_rham(r.vars()), &r)?;
            let pres = m.presentation(a.degree_bound);
            let doc = json!({ "presentation": serde_json::to_value(&pres).expect("json"), "finite_model": m.finite_model(a.degree_bound).to_json() });
            Ok(reports("ddr_mixed", vec![m.check(a.degree_bound)], doc, String::new()))
        }
    }
}

// ---- drw ----

fn base_ring(a: &DrwArgs) -> Res<BaseRing> {
    Ok(BaseRing::parse(&a.ring)?)
}

fn drw_text(t: &DRWTruncation) -> String {
    let rep = t.report();
    let mut s =
        format!("W_{}Ω of {} in weights ≤ {} ({} route)\n", rep.level, rep.ring, rep.weight_bound, rep.route);
    for c in &rep.components {
        let factors: Vec<String> = c.invariant_factors.iter().map(|q| format!("Z/{q}")).collect();
        s += &format!(
            "  degree {} weight {}: {}  [{}]\n",
            c.degree,
            c.weight,
            factors.join(" ⊕ "),
            c.generators.join(", ")
        );
    }
    s
}

fn drw_cmd(c: &DrwCmd) -> Res<Outcome> {
    match c {
        DrwCmd::Compute { t, route, iter_cap, budget, check } => {
            let r = base_ring(t)?;
            let budget = budget.or(env_budget(ENV_SPAN_BUDGET)?).unwrap_or(drw::DEFAULT_SPAN_BUDGET);
            let mut models = Vec::new();
            if *route != RouteArg::Saturation {
                models.push(drw::drw_truncated_with_budget(&r, t.level, t.weight_bound, budget)?);
            }
            if *route != RouteArg::Direct {
                models.push(drw::drw_via_saturation(&r, t.level, t.weight_bound, *iter_cap)?);
            }
            let mut reps = Vec::new();
            if *check {
                reps.extend(models.iter().map(drw::drw_identity_suite));
            }
            if let [a, b] = models.as_slice() {
                reps.push(drw::compare_routes(a, b));
            }
            let text: String = models.iter().map(drw_text).collect();
            let doc = json!({
                "reports": models.iter().map(|m| serde_json::to_value(m.report()).expect("json")).collect::<Vec<_>>(),
            });
            Ok(reports("drw_compute", reps, doc, text))
        }
        DrwCmd::Presentation(t) => {
            let r = base_ring(t)?;
            let pres = drw::witt_ring_presentation(&r, t.level, t.weight_bound)?;
            let oracle = drw::witt_coordinate_oracle(&r, t.level, t.weight_bound)?;
            let mut rep = CheckReport::new("Witt-coordinate oracle");
            rep.check("components agree", pres.components == oracle, String::new, || format!("{oracle:?}"));
            let text: String = pres
                .components
                .iter()
                .map(|c| {
                    format!(
                        "weight {}: {:?}\n",
                        c.weight,
                        c.invariants.iter().map(|&e| r.p.pow(e)).collect::<Vec<_>>()
                    )
                })
                .collect();
            let doc = json!({ "presentation": serde_json::to_value(&pres).expect("json") });
            Ok(reports("witt_ring_presentation", vec![rep], doc, text))
        }
        DrwCmd::Identities { t, route, seed } => {
            let r = base_ring(t)?;
            let m = match route {
                RouteArg::Direct => drw::drw_truncated(&r, t.level, t.weight_bound)?,
                RouteArg::Saturation => {
                    drw::drw_via_saturation(&r, t.level, t.weight_bound, drw::DEFAULT_ITER_CAP)?
                }
                RouteArg::Both => return Err(usage("identities run on one route at a time")),
            };
            let rep = drw::drw_identity_suite_with(&m, drw::DEFAULT_PAIR_CAP, *seed);
            Ok(reports("drw_identity_suite", vec![rep], json!({ "laws": drw::IDENTITY_LAWS }), String::new()))
        }
    }
}

// ---- selftest ----

fn selftest_cmd(a: &SelftestArgs) -> Res<Outcome> {
    let d = SelftestConfig::default();
    let cfg = SelftestConfig {
        seed: a.seed,
        hom_budget: a.hom_budget.or(env_budget(ENV_HOM_BUDGET)?).unwrap_or(d.hom_budget),
        span_budget: a.span_budget.or(env_budget(ENV_SPAN_BUDGET)?).unwrap_or(d.span_budget),
        ..d
    };
    let rep = selftest(&cfg);
    // timings vary between runs, so they go to stderr only
    eprint!("{}", rep.summary());
    let text: String = rep
        .suites
        .iter()
        .map(|s| format!("{:>2} {:<32} {:?}\n", s.id, s.name, s.status).to_lowercase())
        .collect();
    let json = serde_json::to_value(&rep).expect("json");
    Ok(Outcome::checked(json, text, rep.passed))
}
