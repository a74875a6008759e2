//! The motive file format: a field context, named motive specs and optional
//! named map fixtures, all scalars in the literal grammar ("p/q", "a+b*w").
//! Parsing validates every scalar; serialization passes the original
//! literals through, so valid files round-trip byte-identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use biext::exact::{FieldContext, KScalar, Mat, MatK};
use biext::hodge::Mhs;
use biext::homspace::MultilinearMap;
use biext::motives::{MotiveSpec, PeriodPresentation};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldDto {
    pub d: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum MotiveSpecDto {
    Lattice(usize),
    Torus(usize),
    Elliptic(String),
    Kummer(String),
    Tate(u32),
    Periods(PeriodsDto),
    Sum(Vec<MotiveSpecDto>),
    Dual(Box<MotiveSpecDto>),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PeriodsDto {
    pub lattice_rank: usize,
    pub elliptic_moduli: Vec<String>,
    pub torus_rank: usize,
    pub abelian_lifts: Vec<Vec<String>>,
    pub torus_lifts: Vec<Vec<String>>,
    pub extension_periods: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapDto {
    pub sources: Vec<String>,
    pub target: String,
    /// target_rank rows, columns in lexicographic tensor-basis order.
    pub coeffs: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MotiveFile {
    pub field: FieldDto,
    pub motives: BTreeMap<String, MotiveSpecDto>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapDto>,
}

fn scalar(s: &str) -> Result<KScalar, CliError> {
    KScalar::parse(s).map_err(|e| CliError::input(e.to_string()))
}

fn scalar_matrix(rows: &[Vec<String>], expect_cols: Option<usize>) -> Result<MatK, CliError> {
    let parsed: Result<Vec<Vec<KScalar>>, CliError> =
        rows.iter().map(|r| r.iter().map(|s| scalar(s)).collect()).collect();
    let parsed = parsed?;
    if let (Some(c), Some(first)) = (expect_cols, parsed.first()) {
        if first.len() != c {
            return Err(CliError::input(format!(
                "matrix row has {} entries, expected {c}",
                first.len()
            )));
        }
    }
    if parsed.is_empty() {
        return Ok(Mat::empty(expect_cols.unwrap_or(0)));
    }
    Mat::from_rows(parsed).map_err(|e| CliError::input(e.to_string()))
}

impl MotiveSpecDto {
    /// Canonical serialization of a library-level spec. Used to write
    /// generated instances; scalars come out in the canonical literal form.
    pub fn from_spec(spec: &MotiveSpec) -> Self {
        match spec {
            MotiveSpec::Lattice(r) => MotiveSpecDto::Lattice(*r),
            MotiveSpec::Torus(t) => MotiveSpecDto::Torus(*t),
            MotiveSpec::Elliptic(tau) => MotiveSpecDto::Elliptic(tau.to_string()),
            MotiveSpec::Kummer(pi) => MotiveSpecDto::Kummer(pi.to_string()),
            MotiveSpec::Tate(n) => MotiveSpecDto::Tate(*n),
            MotiveSpec::Periods(p) => {
                let strings = |m: &MatK| -> Vec<Vec<String>> {
                    (0..m.rows())
                        .map(|r| m.row(r).iter().map(ToString::to_string).collect())
                        .collect()
                };
                MotiveSpecDto::Periods(PeriodsDto {
                    lattice_rank: p.lattice_rank,
                    elliptic_moduli: p.elliptic_moduli.iter().map(ToString::to_string).collect(),
                    torus_rank: p.torus_rank,
                    abelian_lifts: strings(&p.abelian_lifts),
                    torus_lifts: strings(&p.torus_lifts),
                    extension_periods: strings(&p.extension_periods),
                })
            }
            MotiveSpec::Sum(parts) => {
                MotiveSpecDto::Sum(parts.iter().map(MotiveSpecDto::from_spec).collect())
            }
            MotiveSpec::Dual(inner) => {
                MotiveSpecDto::Dual(Box::new(MotiveSpecDto::from_spec(inner)))
            }
        }
    }

    pub fn to_spec(&self) -> Result<MotiveSpec, CliError> {
        Ok(match self {
            MotiveSpecDto::Lattice(r) => MotiveSpec::Lattice(*r),
            MotiveSpecDto::Torus(t) => MotiveSpec::Torus(*t),
            MotiveSpecDto::Elliptic(s) => MotiveSpec::Elliptic(scalar(s)?),
            MotiveSpecDto::Kummer(s) => MotiveSpec::Kummer(scalar(s)?),
            MotiveSpecDto::Tate(n) => MotiveSpec::Tate(*n),
            MotiveSpecDto::Periods(p) => {
                let g = p.elliptic_moduli.len();
                let moduli: Result<Vec<KScalar>, CliError> =
                    p.elliptic_moduli.iter().map(|s| scalar(s)).collect();
                let presentation = PeriodPresentation::new(
                    p.lattice_rank,
                    moduli?,
                    p.torus_rank,
                    scalar_matrix(&p.abelian_lifts, Some(p.lattice_rank))?,
                    scalar_matrix(&p.torus_lifts, Some(p.lattice_rank))?,
                    scalar_matrix(&p.extension_periods, Some(2 * g))?,
                )
                .map_err(|e| CliError::input(e.to_string()))?;
                MotiveSpec::Periods(presentation)
            }
            MotiveSpecDto::Sum(parts) => {
                let specs: Result<Vec<MotiveSpec>, CliError> =
                    parts.iter().map(MotiveSpecDto::to_spec).collect();
                MotiveSpec::Sum(specs?)
            }
            MotiveSpecDto::Dual(inner) => MotiveSpec::Dual(Box::new(inner.to_spec()?)),
        })
    }
}

/// A loaded motive file: built Hodge structures and resolved map fixtures.
pub struct Loaded {
    pub ctx: FieldContext,
    pub field: FieldDto,
    pub motives: BTreeMap<String, Mhs>,
    pub maps: BTreeMap<String, LoadedMap>,
}

pub struct LoadedMap {
    pub sources: Vec<String>,
    pub target: String,
    pub map: MultilinearMap,
}

pub fn parse_file(bytes: &str) -> Result<MotiveFile, CliError> {
    serde_json::from_str(bytes).map_err(|e| CliError::input(format!("malformed motive file: {e}")))
}

pub fn load(file: &MotiveFile) -> Result<Loaded, CliError> {
    let ctx = FieldContext::new(file.field.d).map_err(|e| CliError::input(e.to_string()))?;
    let mut motives = BTreeMap::new();
    for (name, dto) in &file.motives {
        let built = dto
            .to_spec()?
            .build(ctx)
            .map_err(|e| CliError::input(format!("motive {name:?}: {e}")))?;
        motives.insert(name.clone(), built);
    }
    let mut maps = BTreeMap::new();
    for (name, dto) in &file.maps {
        let mut source_ranks = Vec::new();
        for s in &dto.sources {
            let m = motives
                .get(s)
                .ok_or_else(|| CliError::input(format!("map {name:?}: unknown motive {s:?}")))?;
            source_ranks.push(m.rank());
        }
        let target = motives
            .get(&dto.target)
            .ok_or_else(|| CliError::input(format!("map {name:?}: unknown motive {:?}", dto.target)))?;
        let rows: Vec<Vec<num_bigint::BigInt>> = dto
            .coeffs
            .iter()
            .map(|r| r.iter().map(|&x| num_bigint::BigInt::from(x)).collect())
            .collect();
        let coeffs = Mat::from_rows(rows)
            .map_err(|e| CliError::input(format!("map {name:?}: {e}")))?;
        let map = MultilinearMap::new(source_ranks, target.rank(), coeffs)
            .map_err(|e| CliError::input(format!("map {name:?}: {e}")))?;
        maps.insert(
            name.clone(),
            LoadedMap { sources: dto.sources.clone(), target: dto.target.clone(), map },
        );
    }
    Ok(Loaded { ctx, field: file.field.clone(), motives, maps })
}

impl Loaded {
    pub fn motive(&self, name: &str) -> Result<&Mhs, CliError> {
        self.motives
            .get(name)
            .ok_or_else(|| CliError::input(format!("unknown motive {name:?}")))
    }

    pub fn map(&self, name: &str) -> Result<&LoadedMap, CliError> {
        self.maps
            .get(name)
            .ok_or_else(|| CliError::input(format!("unknown map {name:?}")))
    }
}
