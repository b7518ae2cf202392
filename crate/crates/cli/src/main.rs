//! `cell24`: verify, analyse and search side pairings of the ideal
//! right-angled 24-cell.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use cell24::covers::{build_cover, geography, signature, CoverSpec};
use cell24::cusps::{census, cusp_complexes, euclidean_parts, parabolic_generators, primitive_screw};
use cell24::exact::json::Fraction;
use cell24::group::Word;
use cell24::homology::truncated_homology;
use cell24::pairing::{parse_pairing, verify_poincare, SidePairing};
use cell24::search::{parse_prefix, search, Mode, Profile, SearchConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const SCHEMA: u32 = 1;
const BUNDLED_NAME: &str = "m_paper.pairing";

#[derive(Parser)]
#[command(name = "cell24", version, about = "Hyperbolic 4-manifolds glued from the ideal 24-cell")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// pairing-v1 file; defaults to the bundled manifold.
    file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CoverArgs {
    /// Sheets along h (cyclic factor Z/n).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Sheets along v (cyclic factor Z/m).
    #[arg(long, default_value_t = 1)]
    m: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Check the polytope theorem conditions.
    Verify(Input),
    /// Everything: verification, homology, cusps and geography.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Cusp census.
    Cusps(Input),
    /// Homology of the manifold and of its cusp sections.
    Homology(Input),
    /// Geography of an abelian cover along (h mod n, v mod m).
    Cover {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Signature from cusp η-invariants.
    Signature {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Search for side pairings.
    Search {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Node budget.
        #[arg(long)]
        nodes: Option<u64>,
        /// Cusp profile: any, all-f1, one-f4.
        #[arg(long, default_value = "any")]
        filter: String,
        /// Minimum first Betti number.
        #[arg(long, default_value_t = 0)]
        min_betti: usize,
        /// pairing-v1 lines fixing the first assignments.
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SearchMode::Exhaustive)]
        mode: SearchMode,
        /// Directory for found pairings and the certificate index.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cube complex, lattice and screw of one cusp (1-based id).
    ExportCusp {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cusp: usize,
    },
}

/// Exit statuses.
enum Failure {
    Check(String),
    Input(String),
    Budget,
}

impl From<cell24::Error> for Failure {
    fn from(e: cell24::Error) -> Self {
        use cell24::Error as E;
        match e {
            E::Parse { .. }
            | E::FixedSide(_)
            | E::NotInvolutive(_)
            | E::VertexNotOnSide { .. }
            | E::NotAnIsometry(..)
            | E::UnknownCycle(_) => Failure::Input(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    schema: u32,
    tool_version: &'a str,
    input_digest: String,
    payload: Value,
}

struct Loaded {
    text: String,
    pairing: SidePairing,
}

fn bundled_text() -> Result<String, Failure> {
    match std::env::var_os("CELL24_DATA") {
        Some(dir) => {
            let path = Path::new(&dir).join(BUNDLED_NAME);
            std::fs::read_to_string(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => Ok(cell24::BUNDLED_PAIRING.to_string()),
    }
}

fn load_text(input: &Input) -> Result<String, Failure> {
    match &input.file {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => bundled_text(),
    }
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let text = load_text(input)?;
    let pairing = parse_pairing(&text)?;
    Ok(Loaded { text, pairing })
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn require_verified(sp: &SidePairing) -> Result<(), Failure> {
    let r = verify_poincare(sp);
    if r.overall {
        Ok(())
    } else {
        Err(Failure::Check("pairing fails verification".into()))
    }
}

fn cover_of(sp: &SidePairing, c: &CoverArgs) -> Result<cell24::covers::CoverComplex, Failure> {
    if c.n == 0 || c.m == 0 {
        return Err(Failure::Input("cover factors must be positive".into()));
    }
    Ok(build_cover(&CoverSpec::of_bundled(sp.clone(), c.n, c.m))?)
}

fn cmd_verify(input: &Input) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    let r = verify_poincare(&l.pairing);
    Ok((digest(&l.text), to_value(&r), r.overall))
}

fn cmd_report(input: &Input, c: &CoverArgs) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    let v = verify_poincare(&l.pairing);
    if !v.overall {
        return Ok((digest(&l.text), json!({ "verification": v }), false));
    }
    let cc = cover_of(&l.pairing, c)?;
    let geo = geography(&cc, c.n, c.m)?;
    let hom = truncated_homology(&cc)?;
    let ranks: Vec<usize> = hom.groups.iter().map(|g| g.rank).collect();
    let payload = json!({
        "verification": { "overall": v.overall, "proper": v.proper, "orientable": v.orientable,
                          "cusp_complete": v.cusp_complete },
        "degree": geo.degree,
        "chi": geo.chi,
        "sigma_signed": geo.sigma_signed,
        "sigma_abs": geo.sigma_abs,
        "slope": geo.slope,
        "cusps": geo.cusps.iter().map(|r| r.flat).collect::<Vec<_>>(),
        "homology_ranks": ranks,
        "homology": hom,
        "geography": geo,
    });
    Ok((digest(&l.text), payload, true))
}

fn cmd_cusps(input: &Input) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    require_verified(&l.pairing)?;
    let recs = census(&l.pairing)?;
    let mut rows = Vec::new();
    for (i, (rec, cx)) in recs.iter().zip(cusp_complexes(&l.pairing)?).enumerate() {
        let pg = parabolic_generators(&l.pairing, &cx)?;
        let geom = euclidean_parts(&pg)?;
        rows.push(json!({
            "id": i + 1,
            "record": rec,
            "section_volume_cubes": geom.section_volume_in_cubes().map(Fraction),
            "matrix_label": geom.label(),
        }));
    }
    Ok((digest(&l.text), Value::Array(rows), true))
}

fn cmd_homology(input: &Input) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    require_verified(&l.pairing)?;
    let hom = truncated_homology(&l.pairing)?;
    let sections: Vec<Value> = cusp_complexes(&l.pairing)?
        .iter()
        .map(|c| cell24::homology::cusp_section_homology(c).map(|h| to_value(&h)))
        .collect::<Result<_, _>>()?;
    Ok((digest(&l.text), json!({ "manifold": hom, "cusp_sections": sections }), true))
}

fn cmd_cover(input: &Input, c: &CoverArgs) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    require_verified(&l.pairing)?;
    let cc = cover_of(&l.pairing, c)?;
    let geo = geography(&cc, c.n, c.m)?;
    let slope = geo.slope.0.clone();
    let payload = json!({
        "degree": geo.degree,
        "chi": geo.chi,
        "cusps": geo.cusps,
        "type_counts": geo.type_counts,
        "sigma_signed": geo.sigma_signed,
        "sigma_abs": geo.sigma_abs,
        "slope_num": slope.numer().to_string().parse::<i64>().ok(),
        "slope_den": slope.denom().to_string().parse::<i64>().ok(),
        "volume_over_pi2": geo.volume_over_pi2,
        "bounds": geo.bounds,
        "bounds_ok": geo.bounds_ok,
    });
    Ok((digest(&l.text), payload, geo.bounds_ok))
}

fn cmd_signature(input: &Input, c: &CoverArgs) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    require_verified(&l.pairing)?;
    let cc = cover_of(&l.pairing, c)?;
    let recs = census(&cc)?;
    let (signed, abs) = signature(&recs)?;
    let etas: Vec<Value> = recs
        .iter()
        .map(|r| json!({ "type": r.flat, "handedness": r.handedness, "eta": Fraction(cell24::covers::eta(r)) }))
        .collect();
    Ok((
        digest(&l.text),
        json!({ "sigma_signed": signed, "sigma_abs": abs, "cusps": etas }),
        true,
    ))
}

fn word_text(w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.to_string()
    }
}

fn cmd_export_cusp(input: &Input, id: usize) -> Result<(String, Value, bool), Failure> {
    let l = load(input)?;
    require_verified(&l.pairing)?;
    let sp = &l.pairing;
    let complexes = cusp_complexes(sp)?;
    let cx = complexes
        .get(id.wrapping_sub(1))
        .ok_or(Failure::Input(format!("unknown cusp id {id} (1..={})", complexes.len())))?;
    let rec = &census(sp)?[id - 1];
    let cubes: Vec<Value> = cx
        .cubes
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "cube": i, "vertex": c.vertex + 1 }))
        .collect();
    let mut faces = Vec::new();
    for (i, fs) in cx.faces.iter().enumerate() {
        for (f, g) in fs.iter().enumerate() {
            let corners: Vec<[u8; 2]> = cell24::polytope::cube_face_corners(f)
                .iter()
                .map(|&c| [c, g.corners[c as usize]])
                .collect();
            faces.push(json!({
                "cube": i, "face": f, "side": g.side.map(|s| s + 1),
                "target": g.target, "target_face": g.target_face, "corners": corners,
            }));
        }
    }
    let pg = parabolic_generators(sp, cx)?;
    let geom = euclidean_parts(&pg)?;
    let frac = |v: &[cell24::exact::Rational]| v.iter().cloned().map(Fraction).collect::<Vec<_>>();
    let lattice: Vec<Value> = geom.lattice.iter().map(|b| to_value(&frac(b))).collect();
    let screw = primitive_screw(&geom).map(|s| {
        let word = s
            .exponents
            .iter()
            .zip(&pg.words)
            .fold(Word::empty(), |acc, (e, w)| {
                let e: i32 = e.try_into().unwrap_or(0);
                acc.concat(&w.pow(e))
            })
            .free_reduce();
        json!({
            "word": word_text(&word),
            "rotation_order": s.part.rotation_order(),
            "rotation": s.part.rotation.iter().map(|r| frac(r)).collect::<Vec<_>>(),
            "translation": frac(&s.part.translation),
            "axis": frac(&s.axis),
        })
    });
    let generators: Vec<String> = pg.words.iter().map(word_text).collect();
    let frame: Vec<Value> = geom.frame.basis.iter().map(|b| to_value(&frac(b))).collect();
    let payload = json!({
        "id": id,
        "type": rec.flat,
        "handedness": rec.handedness,
        "ideal_vertex": pg.vertex + 1,
        "cubes": cubes,
        "face_gluings": faces,
        "generators": generators,
        "frame_basis": frame,
        "cube_edge_squared": Fraction(geom.cube_edge2.clone()),
        "lattice_basis": lattice,
        "lattice_covolume_cubes": geom.covolume_in_cubes().map(Fraction),
        "section_volume_cubes": geom.section_volume_in_cubes().map(Fraction),
        "screw": screw,
    });
    Ok((digest(&l.text), payload, true))
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    seed: u64,
    budget: Option<f64>,
    nodes: Option<u64>,
    filter: &str,
    min_betti: usize,
    prefix: Option<&Path>,
    mode: SearchMode,
    out: Option<&Path>,
) -> Result<(String, Value, bool), Failure> {
    let profile: Profile = filter.parse()?;
    let (prefix_text, prefix) = match prefix {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let a = parse_prefix(&t)?;
            (t, a)
        }
        None => (String::new(), Vec::new()),
    };
    if let Some(b) = budget {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Failure::Input(format!("bad budget {b}")));
        }
    }
    let cfg = SearchConfig {
        mode: match mode {
            SearchMode::Exhaustive => Mode::Exhaustive,
            SearchMode::Random => Mode::RandomRestart,
        },
        seed,
        node_budget: nodes,
        time_budget: budget.map(Duration::from_secs_f64),
        profile,
        min_betti,
        prefix,
        ..SearchConfig::default()
    };
    let outcome = search(&cfg)?;
    let mut index = Vec::new();
    for (i, f) in outcome.found.iter().enumerate() {
        let name = format!("found_{:04}.pairing", i + 1);
        if let Some(dir) = out {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
            std::fs::write(dir.join(&name), f.pairing.to_text())
                .map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
        }
        index.push(json!({ "file": name, "certificate": f.certificate, "digest": digest(&f.pairing.to_text()) }));
    }
    if let Some(dir) = out {
        let text = serde_json::to_string_pretty(&index).expect("index");
        std::fs::write(dir.join("index.json"), text).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    }
    if outcome.found.is_empty() && outcome.budget_exhausted {
        return Err(Failure::Budget);
    }
    let payload = json!({
        "found": index,
        "verified": outcome.verified,
        "budget_exhausted": outcome.budget_exhausted,
    });
    Ok((digest(&prefix_text), payload, true))
}

fn run(cli: &Cli) -> Result<(&'static str, String, Value, bool), Failure> {
    let (name, (d, v, ok)) = match &cli.command {
        Command::Verify(i) => ("verify", cmd_verify(i)?),
        Command::Report { input, cover } => ("report", cmd_report(input, cover)?),
        Command::Cusps(i) => ("cusps", cmd_cusps(i)?),
        Command::Homology(i) => ("homology", cmd_homology(i)?),
        Command::Cover { input, cover } => ("cover", cmd_cover(input, cover)?),
        Command::Signature { input, cover } => ("signature", cmd_signature(input, cover)?),
        Command::Search {
            seed,
            budget,
            nodes,
            filter,
            min_betti,
            prefix,
            mode,
            out,
        } => (
            "search",
            cmd_search(*seed, *budget, *nodes, filter, *min_betti, prefix.as_deref(), *mode, out.as_deref())?,
        ),
        Command::ExportCusp { input, cusp } => ("export-cusp", cmd_export_cusp(input, *cusp)?),
    };
    Ok((name, d, v, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((command, input_digest, payload, ok)) => {
            let env = Envelope {
                command,
                schema: SCHEMA,
                tool_version: env!("CARGO_PKG_VERSION"),
                input_digest,
                payload,
            };
            println!("{}", serde_json::to_string_pretty(&env).expect("envelope"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget) => {
            eprintln!("search budget exhausted without results");
            ExitCode::from(3)
        }
    }
}
