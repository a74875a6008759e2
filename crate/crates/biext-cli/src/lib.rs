//! Command-line front end: parse motive files, run the computations, emit
//! deterministic JSON reports. Exit codes: 0 success, 1 computation or
//! assertion failure, 2 input or validation error.

pub mod expr;
pub mod format;

use std::collections::BTreeMap;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;
use sha2::{Digest, Sha256};

use biext::hodge::{gr_profile, validate_mhs, validate_one_motive};
use biext::homspace::{
    biext_from_map, hom_multilinear, is_antisymmetric_pairing, pairing_matrix,
    pairing_unimodular, pullback_pairing, sym_antisym_split, rank_decomposition_report, weil_pairing,
    HomLattice, MultilinearMap,
};
use biext::motives::cartier_dual;
use biext::oracle::suites;
use biext::realize::{commute_check, curvature, reduce_map_mod_n, tower_compatible};

use format::{FieldDto, Loaded};

pub const BUILTIN_FILE: &str = include_str!("builtin.json");

/// An error with the exit code it maps to (1 computation, 2 input).
#[derive(Debug)]
pub struct CliError {
    pub exit: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        CliError { exit: 2, message }
    }

    pub fn computation(message: String) -> Self {
        CliError { exit: 1, message }
    }

    pub fn computation_from(e: biext::Error) -> Self {
        CliError::computation(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "biext", version, about = "Exact computations with 1-motives: morphism lattices, pairings, realizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every motive in the file.
    Validate { file: String },
    /// Compute the lattice of multilinear morphisms from sources to target.
    Hom {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<String>,
        #[arg(long)]
        target: String,
        /// Also split into symmetric/antisymmetric sublattices (equal sources).
        #[arg(long)]
        split_sym: bool,
    },
    /// Profile and filtration dimensions of the Cartier dual.
    Dual {
        file: String,
        #[arg(long)]
        motive: String,
    },
    /// The evaluation (Weil) pairing of a motive, optionally pulled back
    /// along a named self-duality fixture.
    Pairing {
        file: String,
        #[arg(long)]
        motive: String,
        #[arg(long)]
        self_dual: Option<String>,
    },
    /// Reduce a named map fixture mod n and check the compatibility square.
    Modn {
        file: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        n: u64,
    },
    /// Curvature pairing of the biextension carried by a named map fixture.
    Curvature {
        file: String,
        #[arg(long)]
        map: String,
    },
    /// Rank decomposition of a multilinear morphism group into bilinear terms.
    Decompose {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<String>,
        #[arg(long)]
        target: String,
    },
    /// Graded rank profile of a tensor/quotient expression.
    Grprofile {
        file: String,
        #[arg(long)]
        expr: String,
    },
    /// Run property suites; exit 0 iff all pass.
    Check {
        file: Option<String>,
        #[arg(long)]
        builtin: bool,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    field: FieldDto,
    input_digest: String,
    result: T,
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
}

struct Input {
    loaded: Loaded,
    digest: String,
}

fn read_input(path: &str) -> Result<Input, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::input(format!("{path} is not UTF-8")))?;
    load_text(&text)
}

fn load_text(text: &str) -> Result<Input, CliError> {
    let digest = hex_digest(text.as_bytes());
    let file = format::parse_file(text)?;
    let loaded = format::load(&file)?;
    Ok(Input { loaded, digest })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut s = String::with_capacity(out.len() * 2);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn render<T: Serialize>(
    command: &'static str,
    input: &Input,
    result: T,
) -> String {
    let report = Report {
        command,
        field: input.loaded.field.clone(),
        input_digest: input.digest.clone(),
        result,
    };
    serde_json::to_string_pretty(&report).expect("reports serialize")
}

/// Entry point shared by the binary and the tests: argv in, exit code and
/// report document out.
pub fn run_command<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits with clap's own rendering
            if e.use_stderr() {
                let doc = serde_json::to_string_pretty(&ErrorReport { error: e.to_string() })
                    .expect("error reports serialize");
                return (2, doc);
            }
            return (0, e.to_string());
        }
    };
    match dispatch(cli.command) {
        Ok((code, doc)) => (code, doc),
        Err(e) => {
            let doc = serde_json::to_string_pretty(&ErrorReport { error: e.message })
                .expect("error reports serialize");
            (e.exit, doc)
        }
    }
}

fn dispatch(command: Command) -> Result<(i32, String), CliError> {
    match command {
        Command::Validate { file } => cmd_validate(&read_input(&file)?),
        Command::Hom { file, sources, target, split_sym } => {
            cmd_hom(&read_input(&file)?, &sources, &target, split_sym)
        }
        Command::Dual { file, motive } => cmd_dual(&read_input(&file)?, &motive),
        Command::Pairing { file, motive, self_dual } => {
            cmd_pairing(&read_input(&file)?, &motive, self_dual.as_deref())
        }
        Command::Modn { file, map, n } => cmd_modn(&read_input(&file)?, &map, n),
        Command::Curvature { file, map } => cmd_curvature(&read_input(&file)?, &map),
        Command::Decompose { file, sources, target } => {
            cmd_decompose(&read_input(&file)?, &sources, &target)
        }
        Command::Grprofile { file, expr } => cmd_grprofile(&read_input(&file)?, &expr),
        Command::Check { file, builtin, suite, seed } => {
            let input = match (file, builtin) {
                (Some(_), true) => {
                    return Err(CliError::input("pass either a file or --builtin, not both".into()))
                }
                (Some(path), false) => read_input(&path)?,
                (None, true) => load_text(BUILTIN_FILE)?,
                (None, false) => {
                    return Err(CliError::input("check needs a file or --builtin".into()))
                }
            };
            cmd_check(&input, &suite, seed)
        }
    }
}

#[derive(Serialize)]
struct MotiveValidation {
    name: String,
    rank: usize,
    ok: bool,
    one_motive_type: bool,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct ValidateResult {
    motives: Vec<MotiveValidation>,
    all_ok: bool,
}

fn cmd_validate(input: &Input) -> Result<(i32, String), CliError> {
    let mut motives = Vec::new();
    let mut all_ok = true;
    for (name, mhs) in &input.loaded.motives {
        let report = validate_mhs(mhs);
        let ok = report.ok();
        all_ok &= ok;
        motives.push(MotiveValidation {
            name: name.clone(),
            rank: mhs.rank(),
            ok,
            one_motive_type: validate_one_motive(mhs).ok(),
            violations: report.violations.iter().map(ToString::to_string).collect(),
        });
    }
    let code = if all_ok { 0 } else { 2 };
    Ok((code, render("validate", input, ValidateResult { motives, all_ok })))
}

#[derive(Serialize)]
struct TensorDto {
    source_ranks: Vec<usize>,
    target_rank: usize,
    coeffs: Vec<Vec<i64>>,
}

impl TensorDto {
    fn from_map(m: &MultilinearMap) -> Result<Self, CliError> {
        let coeffs = (0..m.coeffs().rows())
            .map(|r| {
                m.coeffs()
                    .row(r)
                    .iter()
                    .map(|x| {
                        x.to_i64().ok_or_else(|| {
                            CliError::computation("tensor entry exceeds i64".into())
                        })
                    })
                    .collect::<Result<Vec<i64>, CliError>>()
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(TensorDto {
            source_ranks: m.source_ranks().to_vec(),
            target_rank: m.target_rank(),
            coeffs,
        })
    }
}

#[derive(Serialize)]
struct NamingDto {
    symmetric_maps: &'static str,
    antisymmetric_maps: &'static str,
}

#[derive(Serialize)]
struct SplitDto {
    symmetric_rank: usize,
    antisymmetric_rank: usize,
    sum_saturation_rank: usize,
    naming: NamingDto,
}

#[derive(Serialize)]
struct HomResult {
    sources: Vec<String>,
    target: String,
    rank: usize,
    basis: Vec<TensorDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitDto>,
}

fn resolve_lattice(
    input: &Input,
    sources: &[String],
    target: &str,
) -> Result<HomLattice, CliError> {
    let source_mhs: Result<Vec<_>, CliError> = sources
        .iter()
        .map(|s| input.loaded.motive(s).cloned())
        .collect();
    let target_mhs = input.loaded.motive(target)?;
    hom_multilinear(&source_mhs?, target_mhs).map_err(CliError::computation_from)
}

fn cmd_hom(
    input: &Input,
    sources: &[String],
    target: &str,
    split_sym: bool,
) -> Result<(i32, String), CliError> {
    let lat = resolve_lattice(input, sources, target)?;
    let basis = lat
        .basis_maps()
        .iter()
        .map(TensorDto::from_map)
        .collect::<Result<Vec<_>, CliError>>()?;
    let split = if split_sym {
        let s = sym_antisym_split(&lat).map_err(|e| CliError::input(e.to_string()))?;
        Some(SplitDto {
            symmetric_rank: s.symmetric.rank(),
            antisymmetric_rank: s.antisymmetric.rank(),
            sum_saturation_rank: s.sum_saturation_rank,
            naming: NamingDto {
                symmetric_maps: "classes of skew-symmetric biextensions",
                antisymmetric_maps: "classes of symmetric biextensions",
            },
        })
    } else {
        None
    };
    let result = HomResult {
        sources: sources.to_vec(),
        target: target.to_string(),
        rank: lat.rank(),
        basis,
        split,
    };
    Ok((0, render("hom", input, result)))
}

#[derive(Serialize)]
struct DualResult {
    motive: String,
    rank: usize,
    gr_profile: BTreeMap<i64, usize>,
    hodge_dims: BTreeMap<i64, usize>,
}

fn cmd_dual(input: &Input, motive: &str) -> Result<(i32, String), CliError> {
    let h = input.loaded.motive(motive)?;
    let dual = cartier_dual(h).map_err(|e| CliError::input(e.to_string()))?;
    let result = DualResult {
        motive: motive.to_string(),
        rank: dual.rank(),
        gr_profile: gr_profile(&dual).entries().collect(),
        hodge_dims: dual.hodge_dims(),
    };
    Ok((0, render("dual", input, result)))
}

#[derive(Serialize)]
struct SelfDualDto {
    map: String,
    pullback: Vec<Vec<i64>>,
    antisymmetric: bool,
}

#[derive(Serialize)]
struct PairingResult {
    motive: String,
    pairing: TensorDto,
    unimodular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_dual: Option<SelfDualDto>,
}

fn cmd_pairing(
    input: &Input,
    motive: &str,
    self_dual: Option<&str>,
) -> Result<(i32, String), CliError> {
    let h = input.loaded.motive(motive)?;
    let (pairing, _) = weil_pairing(h).map_err(CliError::computation_from)?;
    let unimodular = pairing_unimodular(&pairing).map_err(CliError::computation_from)?;
    let self_dual = match self_dual {
        None => None,
        Some(name) => {
            let fixture = input.loaded.map(name)?;
            let dual = cartier_dual(h).map_err(|e| CliError::input(e.to_string()))?;
            if fixture.sources.len() != 1 || input.loaded.motive(&fixture.sources[0])? != h {
                return Err(CliError::input(format!(
                    "self-duality {name:?} must have the single source {motive:?}"
                )));
            }
            if input.loaded.motive(&fixture.target)? != &dual {
                return Err(CliError::input(format!(
                    "self-duality {name:?} must target the Cartier dual of {motive:?}"
                )));
            }
            let lat = resolve_lattice(input, &fixture.sources, &fixture.target)?;
            if !lat.contains(&fixture.map) {
                return Err(CliError::computation(format!(
                    "map {name:?} is not a morphism of Hodge structures"
                )));
            }
            let pulled = pullback_pairing(h, &fixture.map).map_err(CliError::computation_from)?;
            let matrix = pairing_matrix(&pulled).map_err(CliError::computation_from)?;
            let pullback = (0..matrix.rows())
                .map(|r| {
                    matrix
                        .row(r)
                        .iter()
                        .map(|x| x.to_i64().expect("fixture entries are small"))
                        .collect()
                })
                .collect();
            Some(SelfDualDto {
                map: name.to_string(),
                pullback,
                antisymmetric: is_antisymmetric_pairing(&pulled)
                    .map_err(CliError::computation_from)?,
            })
        }
    };
    let code = if unimodular { 0 } else { 1 };
    let result = PairingResult {
        motive: motive.to_string(),
        pairing: TensorDto::from_map(&pairing)?,
        unimodular,
        self_dual,
    };
    Ok((code, render("pairing", input, result)))
}

#[derive(Serialize)]
struct TowerDto {
    n: u64,
    m: u64,
    compatible: bool,
}

#[derive(Serialize)]
struct ModnResult {
    map: String,
    n: u64,
    reduced: Vec<Vec<u64>>,
    commute_check: bool,
    tower: Vec<TowerDto>,
}

fn fixture_lattice(input: &Input, name: &str) -> Result<(HomLattice, MultilinearMap), CliError> {
    let fixture = input.loaded.map(name)?;
    let lat = resolve_lattice(input, &fixture.sources, &fixture.target)?;
    if !lat.contains(&fixture.map) {
        return Err(CliError::computation(format!(
            "map {name:?} is not a morphism of Hodge structures"
        )));
    }
    Ok((lat, fixture.map.clone()))
}

fn cmd_modn(input: &Input, map: &str, n: u64) -> Result<(i32, String), CliError> {
    let (lat, phi) = fixture_lattice(input, map)?;
    let reduced = reduce_map_mod_n(&lat, &phi, n).map_err(|e| CliError::input(e.to_string()))?;
    let ok = commute_check(&phi, &reduced);
    let mut tower = Vec::new();
    for m in [2u64, 3] {
        let compatible =
            tower_compatible(&lat, &phi, n, m).map_err(CliError::computation_from)?;
        tower.push(TowerDto { n, m, compatible });
    }
    let all_ok = ok && tower.iter().all(|t| t.compatible);
    let result = ModnResult {
        map: map.to_string(),
        n,
        reduced: reduced
            .coeffs
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(|x| x.to_u64().expect("reduced mod n")).collect())
            .collect(),
        commute_check: ok,
        tower,
    };
    Ok((if all_ok { 0 } else { 1 }, render("modn", input, result)))
}

#[derive(Serialize)]
struct CurvatureResult {
    map: String,
    upsilon: Vec<Vec<String>>,
    identity_holds: bool,
}

fn cmd_curvature(input: &Input, map: &str) -> Result<(i32, String), CliError> {
    let (lat, phi) = fixture_lattice(input, map)?;
    if phi.source_ranks().len() != 2 {
        return Err(CliError::input("curvature needs a bilinear map fixture".into()));
    }
    let data = biext_from_map(&lat, &phi, None).map_err(CliError::computation_from)?;
    let report = curvature(&data).map_err(CliError::computation_from)?;
    let upsilon = (0..report.upsilon.rows())
        .map(|r| report.upsilon.row(r).iter().map(ToString::to_string).collect())
        .collect();
    let code = if report.identity_holds { 0 } else { 1 };
    let result = CurvatureResult {
        map: map.to_string(),
        upsilon,
        identity_holds: report.identity_holds,
    };
    Ok((code, render("curvature", input, result)))
}

#[derive(Serialize)]
struct TermDto {
    pair: (usize, usize),
    copies: usize,
    rank: usize,
}

#[derive(Serialize)]
struct DecomposeResult {
    sources: Vec<String>,
    target: String,
    lhs_rank: usize,
    rhs_rank: usize,
    ranks_agree: bool,
    terms: Vec<TermDto>,
}

fn cmd_decompose(
    input: &Input,
    sources: &[String],
    target: &str,
) -> Result<(i32, String), CliError> {
    let source_mhs: Result<Vec<_>, CliError> =
        sources.iter().map(|s| input.loaded.motive(s).cloned()).collect();
    let target_mhs = input.loaded.motive(target)?;
    let report = rank_decomposition_report(&source_mhs?, target_mhs)
        .map_err(|e| CliError::input(e.to_string()))?;
    let result = DecomposeResult {
        sources: sources.to_vec(),
        target: target.to_string(),
        lhs_rank: report.lhs_rank,
        rhs_rank: report.rhs_rank,
        ranks_agree: report.ranks_agree(),
        terms: report
            .terms
            .iter()
            .map(|t| TermDto { pair: t.pair, copies: t.copies, rank: t.rank })
            .collect(),
    };
    Ok((0, render("decompose", input, result)))
}

#[derive(Serialize)]
struct GrProfileResult {
    expr: String,
    rank: usize,
    gr_profile: BTreeMap<i64, usize>,
}

fn cmd_grprofile(input: &Input, expression: &str) -> Result<(i32, String), CliError> {
    let mhs = expr::evaluate(expression, &input.loaded)?;
    let result = GrProfileResult {
        expr: expression.to_string(),
        rank: mhs.rank(),
        gr_profile: gr_profile(&mhs).entries().collect(),
    };
    Ok((0, render("grprofile", input, result)))
}

#[derive(Serialize)]
struct CaseDto {
    label: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct SuiteDto {
    name: String,
    passed: bool,
    cases: Vec<CaseDto>,
}

#[derive(Serialize)]
struct CheckResult {
    seed: u64,
    suites: Vec<SuiteDto>,
    all_passed: bool,
}

fn cmd_check(input: &Input, suite: &str, seed: u64) -> Result<(i32, String), CliError> {
    let outcomes = if suite == "all" {
        suites::run_all(seed).map_err(CliError::computation_from)?
    } else {
        vec![suites::run_suite(suite, seed).map_err(|e| CliError::input(e.to_string()))?]
    };
    let all_passed = outcomes.iter().all(|o| o.passed());
    let result = CheckResult {
        seed,
        suites: outcomes
            .into_iter()
            .map(|o| SuiteDto {
                name: o.name.clone(),
                passed: o.passed(),
                cases: o
                    .cases
                    .into_iter()
                    .map(|c| CaseDto { label: c.label, passed: c.passed, detail: c.detail })
                    .collect(),
            })
            .collect(),
        all_passed,
    };
    Ok((if all_passed { 0 } else { 1 }, render("check", input, result)))
}
