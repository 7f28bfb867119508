//! Versioned JSON documents, CSV exports and the dense binary matrix layout.
//!
//! Complex numbers are `[re, im]` pairs throughout. Documents reject unknown
//! fields, and `parse ∘ emit` is the identity on every valid document.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::assembly::OperatorBundle;
use crate::clark::BlaschkeProduct;
use crate::hankel::{ForwardData, HankelMatrix, LevelRecovery};
use crate::linalg::{CMatrix, C64};
use crate::spectral_data::{validate_intertwining_tol, Atom, AtomicMeasure, CompactSpectralData, Mode, PhaseData, DISTINCT_TOL};
use crate::stability::StabilityReport;
use crate::{Error, Result};

/// A complex number on the wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Cx(C64::new(re, im)))
    }
}

fn cx(v: &[C64]) -> Vec<Cx> {
    v.iter().copied().map(Cx).collect()
}

fn uncx(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|z| z.0).collect()
}

/// An atom location, either a real number or a complex pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Real(f64),
    Complex(Cx),
}

impl PointDoc {
    pub fn value(self) -> C64 {
        match self {
            PointDoc::Real(x) => C64::new(x, 0.0),
            PointDoc::Complex(z) => z.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub point: PointDoc,
    pub weight: f64,
}

/// `measure.v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub atoms: Vec<AtomDoc>,
    #[serde(default)]
    pub flags: Vec<MeasureFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureFlag {
    Probability,
    Circle,
}

impl MeasureDoc {
    pub fn from_measure(m: &AtomicMeasure) -> Self {
        let atoms = m
            .atoms()
            .iter()
            .map(|a| AtomDoc {
                point: if m.is_circle() { PointDoc::Complex(Cx(a.point)) } else { PointDoc::Real(a.point.re) },
                weight: a.weight,
            })
            .collect();
        let mut flags = Vec::new();
        if m.is_probability() {
            flags.push(MeasureFlag::Probability);
        }
        if m.is_circle() {
            flags.push(MeasureFlag::Circle);
        }
        MeasureDoc { atoms, flags }
    }

    pub fn to_measure(&self) -> Result<AtomicMeasure> {
        let atoms = self.atoms.iter().map(|a| Atom { point: a.point.value(), weight: a.weight }).collect();
        AtomicMeasure::new(atoms, self.flags.contains(&MeasureFlag::Probability), self.flags.contains(&MeasureFlag::Circle))
    }

    /// Per-level measures must be circle probability measures even when the
    /// flags are omitted.
    fn to_level_measure(&self) -> Result<AtomicMeasure> {
        let atoms = self.atoms.iter().map(|a| Atom { point: a.point.value(), weight: a.weight }).collect();
        AtomicMeasure::new(atoms, true, true)
    }
}

/// `spectrum.v1`. Without phase fields the data is cyclic with all phases 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDoc {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Option<Cx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<MeasureDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho1: Option<Vec<Option<MeasureDoc>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeDoc {
    Cyclic,
    Multiplicity,
}

impl From<Mode> for ModeDoc {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Cyclic => ModeDoc::Cyclic,
            Mode::Multiplicity => ModeDoc::Multiplicity,
        }
    }
}

impl From<ModeDoc> for Mode {
    fn from(m: ModeDoc) -> Self {
        match m {
            ModeDoc::Cyclic => Mode::Cyclic,
            ModeDoc::Multiplicity => Mode::Multiplicity,
        }
    }
}

impl SpectrumDoc {
    pub fn from_data(d: &CompactSpectralData) -> Self {
        let s = d.spectrum();
        let mut doc = SpectrumDoc {
            lambda: s.lambda().to_vec(),
            mu: s.mu().to_vec(),
            mode: Some(d.mode().into()),
            xi: None,
            eta: None,
            rho: None,
            rho1: None,
        };
        match d.phases() {
            PhaseData::Cyclic { xi, eta } => {
                doc.xi = Some(cx(xi));
                doc.eta = Some(eta.iter().map(|z| z.map(Cx)).collect());
            }
            PhaseData::Multiplicity { rho, rho1 } => {
                doc.rho = Some(rho.iter().map(MeasureDoc::from_measure).collect());
                doc.rho1 = Some(rho1.iter().map(|m| m.as_ref().map(MeasureDoc::from_measure)).collect());
            }
        }
        doc
    }

    /// Validates and converts. The mode is taken from the document, or
    /// inferred from which phase fields are present.
    pub fn to_data(&self) -> Result<CompactSpectralData> {
        self.to_data_tol(DISTINCT_TOL)
    }

    /// As [`SpectrumDoc::to_data`] with a custom distinctness tolerance.
    pub fn to_data_tol(&self, pole_tol: f64) -> Result<CompactSpectralData> {
        let s = validate_intertwining_tol(&self.lambda, &self.mu, pole_tol)?;
        let has_cyclic = self.xi.is_some() || self.eta.is_some();
        let has_measures = self.rho.is_some() || self.rho1.is_some();
        let mode = match (self.mode, has_cyclic, has_measures) {
            (_, true, true) => return Err(Error::InvalidLevelData("both phases and measures given".into())),
            (Some(m), _, _) => Mode::from(m),
            (None, _, true) => Mode::Multiplicity,
            (None, _, false) => Mode::Cyclic,
        };
        let n = s.len();
        match mode {
            Mode::Cyclic => {
                if has_measures {
                    return Err(Error::InvalidLevelData("cyclic mode with measures".into()));
                }
                let xi = self.xi.as_ref().map(|v| uncx(v)).unwrap_or_else(|| vec![C64::new(1.0, 0.0); n]);
                let eta = match &self.eta {
                    Some(v) => v.iter().map(|z| z.map(|z| z.0)).collect(),
                    None => s.mu().iter().map(|&m| (m > 0.0).then_some(C64::new(1.0, 0.0))).collect(),
                };
                CompactSpectralData::cyclic(s, xi, eta)
            }
            Mode::Multiplicity => {
                if has_cyclic {
                    return Err(Error::InvalidLevelData("multiplicity mode with scalar phases".into()));
                }
                let rho = match &self.rho {
                    Some(v) => v.iter().map(MeasureDoc::to_level_measure).collect::<Result<_>>()?,
                    None => vec![AtomicMeasure::unit(); n],
                };
                let rho1 = match &self.rho1 {
                    Some(v) => v.iter().map(|m| m.as_ref().map(MeasureDoc::to_level_measure).transpose()).collect::<Result<_>>()?,
                    None => s.mu().iter().map(|&m| (m > 0.0).then(AtomicMeasure::unit)).collect(),
                };
                CompactSpectralData::multiplicity(s, rho, rho1)
            }
        }
    }
}

/// `hankel.v1`: `γ_0..γ_{2N−2}` and `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HankelDoc {
    pub gamma: Vec<Cx>,
    #[serde(rename = "N")]
    pub n: usize,
}

impl HankelDoc {
    pub fn from_matrix(h: &HankelMatrix) -> Self {
        HankelDoc { gamma: cx(h.gamma()), n: h.size() }
    }

    pub fn to_matrix(&self) -> Result<HankelMatrix> {
        HankelMatrix::from_symbol(&uncx(&self.gamma), self.n)
    }
}

/// A dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Cx>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| Cx(m[(i, j)]))).collect();
        MatrixDoc { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let len = self.rows.checked_mul(self.cols).ok_or_else(|| Error::Dimension("matrix dimensions overflow".into()))?;
        if self.data.len() != len {
            return Err(Error::LengthMismatch { left: self.data.len(), right: len });
        }
        Ok(CMatrix::from_row_iterator(self.rows, self.cols, self.data.iter().map(|z| z.0)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelBlocksDoc {
    pub lambda_block: [usize; 2],
    pub mu_block: [usize; 2],
}

/// `bundle.v1`, for inspection and golden files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub dim: usize,
    pub levels: Vec<LevelBlocksDoc>,
    pub r: MatrixDoc,
    pub r1: MatrixDoc,
    pub p: Vec<Cx>,
    pub jp: MatrixDoc,
    pub phi: MatrixDoc,
    pub phi1: MatrixDoc,
    pub q: Vec<Cx>,
    pub sigma_star: MatrixDoc,
    pub a: MatrixDoc,
}

impl BundleDoc {
    pub fn from_bundle(b: &OperatorBundle) -> Self {
        BundleDoc {
            dim: b.dim(),
            levels: b
                .layout()
                .levels
                .iter()
                .map(|l| LevelBlocksDoc {
                    lambda_block: [l.lambda_block.start, l.lambda_block.end],
                    mu_block: [l.mu_block.start, l.mu_block.end],
                })
                .collect(),
            r: MatrixDoc::from_matrix(b.r()),
            r1: MatrixDoc::from_matrix(b.r1()),
            p: cx(b.p().as_slice()),
            jp: MatrixDoc::from_matrix(b.jp()),
            phi: MatrixDoc::from_matrix(b.phi()),
            phi1: MatrixDoc::from_matrix(b.phi1()),
            q: cx(b.q().as_slice()),
            sigma_star: MatrixDoc::from_matrix(b.sigma_star()),
            a: MatrixDoc::from_matrix(b.a()),
        }
    }
}

/// `blaschke.v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeDoc {
    pub zeros: Vec<Cx>,
    pub constant: Cx,
}

impl BlaschkeDoc {
    pub fn from_product(t: &BlaschkeProduct) -> Self {
        BlaschkeDoc { zeros: cx(t.zeros()), constant: Cx(t.constant()) }
    }

    pub fn to_product(&self) -> Result<BlaschkeProduct> {
        BlaschkeProduct::new(uncx(&self.zeros), self.constant.0)
    }
}

/// `stability.v1`.
pub type StabilityDoc = StabilityReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDoc {
    pub multiplicity: usize,
    pub phase: Option<Cx>,
    pub measure: MeasureDoc,
}

impl LevelDoc {
    fn from_level(l: &LevelRecovery) -> Self {
        LevelDoc { multiplicity: l.multiplicity, phase: l.phase.map(Cx), measure: MeasureDoc::from_measure(&l.measure) }
    }
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardDoc {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
    pub w1: Vec<f64>,
    pub lambda_levels: Vec<LevelDoc>,
    pub mu_levels: Vec<Option<LevelDoc>>,
    pub rank: usize,
    pub conjugation_residual: f64,
    pub unitarity_residual: f64,
    pub rank_one_identity_residual: f64,
    /// The recovered data as a `spectrum.v1` document.
    pub spectrum: SpectrumDoc,
}

impl ForwardDoc {
    pub fn from_forward(f: &ForwardData, mode: Option<Mode>) -> Result<Self> {
        Ok(ForwardDoc {
            lambda: f.lambda.clone(),
            mu: f.mu.clone(),
            w: f.w.clone(),
            w1: f.w1.clone(),
            lambda_levels: f.lambda_levels.iter().map(LevelDoc::from_level).collect(),
            mu_levels: f.mu_levels.iter().map(|l| l.as_ref().map(LevelDoc::from_level)).collect(),
            rank: f.residuals.rank,
            conjugation_residual: f.residuals.conjugation,
            unitarity_residual: f.residuals.unitarity,
            rank_one_identity_residual: f.residuals.rank_one_identity,
            spectrum: SpectrumDoc::from_data(&f.to_spectral_data(mode)?),
        })
    }
}

pub fn parse_spectrum(s: &str) -> serde_json::Result<SpectrumDoc> {
    serde_json::from_str(s)
}

pub fn parse_measure(s: &str) -> serde_json::Result<MeasureDoc> {
    serde_json::from_str(s)
}

pub fn parse_hankel(s: &str) -> serde_json::Result<HankelDoc> {
    serde_json::from_str(s)
}

pub fn parse_matrix(s: &str) -> serde_json::Result<MatrixDoc> {
    serde_json::from_str(s)
}

pub fn parse_blaschke(s: &str) -> serde_json::Result<BlaschkeDoc> {
    serde_json::from_str(s)
}

/// Compact JSON with a trailing newline.
pub fn emit<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Leading bytes of the dense binary layout.
pub const BINARY_MAGIC: &[u8; 8] = b"HSPMAT01";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("missing or wrong magic header")]
    BadMagic,
    #[error("truncated header")]
    ShortHeader,
    #[error("dimensions {rows}x{cols} need {expected} payload bytes, found {found}")]
    PayloadLength { rows: u64, cols: u64, expected: u128, found: usize },
    #[error("non-finite entry at {0}")]
    NonFinite(usize),
}

/// Row-major little-endian layout: magic, `u64` rows, `u64` cols, then
/// `(re, im)` as `f64` pairs.
pub fn encode_matrix(m: &CMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * m.len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

pub fn decode_matrix(bytes: &[u8]) -> std::result::Result<CMatrix, DecodeError> {
    let body = bytes.strip_prefix(BINARY_MAGIC.as_slice()).ok_or(DecodeError::BadMagic)?;
    if body.len() < 16 {
        return Err(DecodeError::ShortHeader);
    }
    let (head, payload) = body.split_at(16);
    let rows = u64::from_le_bytes(head[..8].try_into().expect("eight bytes"));
    let cols = u64::from_le_bytes(head[8..].try_into().expect("eight bytes"));
    // saturates only far beyond any real payload, so it still mismatches
    let expected = (rows as u128 * cols as u128).saturating_mul(16);
    if expected != payload.len() as u128 {
        return Err(DecodeError::PayloadLength { rows, cols, expected, found: payload.len() });
    }
    let values: Vec<f64> = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes"))).collect();
    if let Some(i) = values.iter().position(|x| !x.is_finite()) {
        return Err(DecodeError::NonFinite(i / 2));
    }
    Ok(CMatrix::from_row_iterator(rows as usize, cols as usize, values.chunks_exact(2).map(|p| C64::new(p[0], p[1]))))
}

fn two_column_csv(header: [&str; 2], values: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for (k, v) in values.iter().enumerate() {
        w.write_record([k.to_string(), format!("{v:e}")]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// `index,sigma` rows.
pub fn singular_values_csv(values: &[f64]) -> String {
    two_column_csv(["index", "sigma"], values)
}

/// `k,norm` rows of `‖(Σ*)^k p‖`.
pub fn decay_profile_csv(profile: &[f64]) -> String {
    two_column_csv(["k", "norm"], profile)
}
