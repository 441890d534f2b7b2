use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Catalog family or tabulated density.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Arcsine measure `dt / (π √(1 − t²))` on the reference interval.
    Chebyshev,
    /// Uniform measure `dt / 2` on the reference interval.
    Legendre,
    /// `(1 − t)^alpha (1 + t)^beta dt`, normalized, with `alpha, beta > −1`.
    Jacobi { alpha: f64, beta: f64 },
    /// Piecewise-linear density through tabulated samples.
    Table(TableDensity),
}

/// Raw `(t, w(t))` samples on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TableDensity {
    t: Vec<f64>,
    w: Vec<f64>,
}

impl TableDensity {
    pub fn new(t: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != w.len() {
            return Err(Error::InvalidInput(format!(
                "table density needs at least two (t, w) pairs of equal length (got {} and {})",
                t.len(),
                w.len()
            )));
        }
        if t.iter().chain(&w).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("table density contains non-finite values".into()));
        }
        if t.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidInput("table grid must be strictly increasing".into()));
        }
        if let Some(v) = w.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidInput(format!("negative density sample {v}")));
        }
        let table = Self { t, w };
        if !(table.trapezoid_mass() > 0.0) {
            return Err(Error::InvalidInput("table density has zero mass".into()));
        }
        Ok(table)
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn samples(&self) -> &[f64] {
        &self.w
    }

    fn trapezoid_mass(&self) -> f64 {
        self.t
            .windows(2)
            .zip(self.w.windows(2))
            .map(|(t, w)| 0.5 * (t[1] - t[0]) * (w[0] + w[1]))
            .sum()
    }

    /// Linear interpolation of the raw samples; zero outside the grid.
    fn interpolate(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x < self.t[0] || x > self.t[n - 1] {
            return 0.0;
        }
        let j = self.t.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (t0, t1) = (self.t[j - 1], self.t[j]);
        let s = (x - t0) / (t1 - t0);
        self.w[j - 1] * (1.0 - s) + self.w[j] * s
    }

    /// Parses two-column delimited text (comma, semicolon or whitespace).
    /// A single non-numeric header line is skipped; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut t, mut w) = (Vec::new(), Vec::new());
        let mut seen_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parsed: Option<Vec<f64>> = cols.iter().map(|c| parse_real(c).ok()).collect();
            match parsed {
                Some(v) if v.len() == 2 => {
                    t.push(v[0]);
                    w.push(v[1]);
                    seen_data = true;
                }
                None if !seen_data && t.is_empty() => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "table line {}: expected two numeric columns, got {:?}",
                        lineno + 1,
                        raw
                    )))
                }
            }
        }
        Self::new(t, w)
    }
}

/// A probability measure on the real line.
///
/// Catalog families live on `[-1, 1]` and are moved to `support` by an affine
/// map; the normalization makes the total mass exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    family: Family,
    support: (f64, f64),
    normalization: f64,
}

impl WeightSpec {
    pub fn chebyshev() -> Self {
        Self::catalog(Family::Chebyshev, (-1.0, 1.0)).expect("valid catalog spec")
    }

    pub fn legendre() -> Self {
        Self::catalog(Family::Legendre, (-1.0, 1.0)).expect("valid catalog spec")
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        Self::catalog(Family::Jacobi { alpha, beta }, (-1.0, 1.0))
    }

    pub fn table(t: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let table = TableDensity::new(t, w)?;
        let support = (table.t[0], *table.t.last().unwrap());
        let normalization = 1.0 / table.trapezoid_mass();
        Ok(Self { family: Family::Table(table), support, normalization })
    }

    /// Catalog family moved to the interval `[lo, hi]`.
    pub fn catalog(family: Family, support: (f64, f64)) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("invalid support [{lo}, {hi}]")));
        }
        let half = 0.5 * (hi - lo);
        let reference = match family {
            Family::Chebyshev => std::f64::consts::FRAC_1_PI,
            Family::Legendre => 0.5,
            Family::Jacobi { alpha, beta } => {
                if !(alpha > -1.0 && beta > -1.0) {
                    return Err(Error::InvalidInput(format!(
                        "jacobi exponents must exceed -1 (got alpha={alpha}, beta={beta})"
                    )));
                }
                jacobi_reference_normalization(alpha, beta)
            }
            Family::Table(_) => {
                return Err(Error::InvalidInput("use WeightSpec::table for tabulated densities".into()))
            }
        };
        Ok(Self { family, support, normalization: reference / half })
    }

    /// Same family moved to a new interval (catalog families only).
    pub fn with_support(self, lo: f64, hi: f64) -> Result<Self> {
        Self::catalog(self.family, (lo, hi))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Multiplier applied to the unnormalized shape to obtain a probability density.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self.family, Family::Table(_))
    }

    /// Exponents `(alpha, beta)` of the Jacobi shape for catalog families.
    pub fn jacobi_exponents(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Chebyshev => Some((-0.5, -0.5)),
            Family::Legendre => Some((0.0, 0.0)),
            Family::Jacobi { alpha, beta } => Some((alpha, beta)),
            Family::Table(_) => None,
        }
    }

    /// Center and half-width of the support.
    pub(crate) fn affine(&self) -> (f64, f64) {
        (0.5 * (self.support.0 + self.support.1), 0.5 * (self.support.1 - self.support.0))
    }

    /// Probability density `w(t)`; zero outside the support. Catalog
    /// densities are evaluated on the open interval only.
    pub fn density(&self, t: f64) -> f64 {
        match &self.family {
            Family::Table(table) => self.normalization * table.interpolate(t),
            _ => {
                let (c, h) = self.affine();
                let u = (t - c) / h;
                if !(u > -1.0 && u < 1.0) {
                    return 0.0;
                }
                let (alpha, beta) = self.jacobi_exponents().unwrap();
                self.normalization * (1.0 - u).powf(alpha) * (1.0 + u).powf(beta)
            }
        }
    }

    /// Supremum of the density over `[lo, hi]`, sampled on a fine grid that
    /// includes the endpoints (exact for densities monotone on each side of an
    /// interior extremum and for tables).
    pub fn density_sup(&self, lo: f64, hi: f64) -> f64 {
        const SAMPLES: usize = 4096;
        let mut sup = self.density(lo).max(self.density(hi));
        for i in 1..SAMPLES {
            let t = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            sup = sup.max(self.density(t));
        }
        if let Family::Table(table) = &self.family {
            for (&t, &w) in table.t.iter().zip(&table.w) {
                if t >= lo && t <= hi {
                    sup = sup.max(self.normalization * w);
                }
            }
        }
        sup
    }

    /// Parses the line-oriented `key=value` weight description.
    ///
    /// Recognized keys: `family` (`chebyshev`/`arcsine`, `legendre`/`uniform`,
    /// `jacobi`, `table`), `alpha`, `beta`, `support=lo,hi`, `file=<path>`.
    /// Relative table paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut family: Option<String> = None;
        let (mut alpha, mut beta) = (None, None);
        let mut support = None;
        let mut file = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("spec line {}: expected key=value, got {:?}", lineno + 1, raw))
            })?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            match key.as_str() {
                "family" => family = Some(value.to_ascii_lowercase()),
                "alpha" => alpha = Some(parse_real(value)?),
                "beta" => beta = Some(parse_real(value)?),
                "support" => {
                    let parts: Vec<&str> = value.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::Parse(format!("support must be lo,hi (got {value:?})")));
                    }
                    support = Some((parse_real(parts[0])?, parse_real(parts[1])?));
                }
                "file" => file = Some(value.to_string()),
                other => return Err(Error::Parse(format!("unknown spec key {other:?}"))),
            }
        }
        let family = family.ok_or_else(|| Error::Parse("spec is missing `family`".into()))?;
        let support = support.unwrap_or((-1.0, 1.0));
        match family.as_str() {
            "chebyshev" | "arcsine" => Self::catalog(Family::Chebyshev, support),
            "legendre" | "uniform" => Self::catalog(Family::Legendre, support),
            "jacobi" => {
                let alpha = alpha.ok_or_else(|| Error::Parse("jacobi spec needs alpha".into()))?;
                let beta = beta.ok_or_else(|| Error::Parse("jacobi spec needs beta".into()))?;
                Self::catalog(Family::Jacobi { alpha, beta }, support)
            }
            "table" => {
                let file = file.ok_or_else(|| Error::Parse("table spec needs file=<path>".into()))?;
                let path = match base_dir {
                    Some(dir) if Path::new(&file).is_relative() => dir.join(&file),
                    _ => Path::new(&file).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let table = TableDensity::parse(&text)?;
                Self::table(table.t, table.w)
            }
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }
}

impl fmt::Display for WeightSpec {
    /// Canonical one-line description, stable across runs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.support;
        match &self.family {
            Family::Chebyshev => write!(f, "family=chebyshev;support={lo:e},{hi:e}"),
            Family::Legendre => write!(f, "family=legendre;support={lo:e},{hi:e}"),
            Family::Jacobi { alpha, beta } => {
                write!(f, "family=jacobi;alpha={alpha:e};beta={beta:e};support={lo:e},{hi:e}")
            }
            Family::Table(table) => {
                write!(f, "family=table;points={}", table.t.len())?;
                for (t, w) in table.t.iter().zip(&table.w) {
                    write!(f, ";{t:e}:{w:e}")?;
                }
                Ok(())
            }
        }
    }
}

/// `1 / (2^{α+β+1} B(α+1, β+1))`, the constant making the Jacobi shape a
/// probability density on `[-1, 1]`.
pub(crate) fn jacobi_reference_normalization(alpha: f64, beta: f64) -> f64 {
    let log_beta_fn =
        libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0) - libm::lgamma(alpha + beta + 2.0);
    (-(alpha + beta + 1.0) * std::f64::consts::LN_2 - log_beta_fn).exp()
}

/// Parses a real number, accepting the Unicode minus sign.
pub(crate) fn parse_real(s: &str) -> Result<f64> {
    let cleaned = s.trim().replace('\u{2212}', "-");
    cleaned.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}
