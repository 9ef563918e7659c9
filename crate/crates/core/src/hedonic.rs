//! Hedonic price regressions.
//!
//! Builds dummy-encoded design matrices from auction feature rows, fits
//! ordinary least squares with classical (homoskedastic) inference, and
//! produces add-one / drop-one comparison panels and per-topic fits.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use crate::catalog::TopicLabel;
use crate::linalg::{lstsq_colpiv, Mat};
use crate::Scalar;

/// Pivot threshold for declaring a design column collinear, relative to the
/// largest pivot.
pub const PIVOT_REL_TOL: f64 = 1e-10;

/// Continuous regressors available on a feature row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContinuousField {
    EG,
    Redpct,
    Bluepct,
    Height,
    Width,
    Signed,
    Dated,
}

impl ContinuousField {
    pub fn name(&self) -> &'static str {
        match self {
            ContinuousField::EG => "e_g",
            ContinuousField::Redpct => "redpct",
            ContinuousField::Bluepct => "bluepct",
            ContinuousField::Height => "height",
            ContinuousField::Width => "width",
            ContinuousField::Signed => "signed",
            ContinuousField::Dated => "dated",
        }
    }

    pub fn value<T: Scalar>(&self, row: &FeatureRow<T>) -> T {
        let ind = |b: bool| if b { T::one() } else { T::zero() };
        match self {
            ContinuousField::EG => row.e_g,
            ContinuousField::Redpct => row.redpct,
            ContinuousField::Bluepct => row.bluepct,
            ContinuousField::Height => row.height,
            ContinuousField::Width => row.width,
            ContinuousField::Signed => ind(row.signed),
            ContinuousField::Dated => ind(row.dated),
        }
    }
}

impl FromStr for ContinuousField {
    type Err = HedonicError;

    fn from_str(s: &str) -> Result<Self, HedonicError> {
        match s.trim() {
            "e_g" => Ok(ContinuousField::EG),
            "redpct" => Ok(ContinuousField::Redpct),
            "bluepct" => Ok(ContinuousField::Bluepct),
            "height" => Ok(ContinuousField::Height),
            "width" => Ok(ContinuousField::Width),
            "signed" => Ok(ContinuousField::Signed),
            "dated" => Ok(ContinuousField::Dated),
            other => Err(HedonicError::UnknownField(other.to_string())),
        }
    }
}

/// One design column built as a product of continuous fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub name: String,
    factors: Vec<ContinuousField>,
}

impl Term {
    pub fn identity(f: ContinuousField) -> Term {
        Term { name: f.name().to_string(), factors: vec![f] }
    }

    pub fn square(f: ContinuousField) -> Term {
        Term { name: format!("{}^2", f.name()), factors: vec![f, f] }
    }

    pub fn product(a: ContinuousField, b: ContinuousField) -> Term {
        Term { name: format!("{}*{}", a.name(), b.name()), factors: vec![a, b] }
    }

    pub fn square_product(a: ContinuousField, b: ContinuousField) -> Term {
        Term {
            name: format!("({}*{})^2", a.name(), b.name()),
            factors: vec![a, b, a, b],
        }
    }

    pub fn triple(a: ContinuousField, b: ContinuousField, c: ContinuousField) -> Term {
        Term {
            name: format!("{}*{}*{}", a.name(), b.name(), c.name()),
            factors: vec![a, b, c],
        }
    }

    /// Parses `field`, `field^2`, `a*b`, `(a*b)^2`, or `a*b*c`.
    pub fn parse(s: &str) -> Result<Term, HedonicError> {
        let s = s.trim();
        let bad = || HedonicError::UnknownField(format!("cannot parse term `{s}`"));
        if let Some(inner) = s.strip_prefix('(') {
            let inner = inner.strip_suffix(")^2").ok_or_else(bad)?;
            let fields = split_fields(inner)?;
            if fields.len() != 2 {
                return Err(bad());
            }
            return Ok(Term::square_product(fields[0], fields[1]));
        }
        if let Some(base) = s.strip_suffix("^2") {
            if base.contains('*') {
                return Err(bad());
            }
            return Ok(Term::square(base.parse()?));
        }
        let fields = split_fields(s)?;
        match fields.len() {
            1 => Ok(Term::identity(fields[0])),
            2 => Ok(Term::product(fields[0], fields[1])),
            3 => Ok(Term::triple(fields[0], fields[1], fields[2])),
            _ => Err(bad()),
        }
    }

    fn value<T: Scalar>(&self, row: &FeatureRow<T>) -> T {
        self.factors.iter().fold(T::one(), |acc, f| acc * f.value(row))
    }
}

fn split_fields(s: &str) -> Result<Vec<ContinuousField>, HedonicError> {
    s.split('*').map(ContinuousField::from_str).collect()
}

/// Categorical regressors encoded as dummy groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CategoricalField {
    Artist,
    Medium,
    House,
    City,
    Year,
    Month,
    Topic,
    Style,
}

impl CategoricalField {
    pub fn name(&self) -> &'static str {
        match self {
            CategoricalField::Artist => "artist",
            CategoricalField::Medium => "medium",
            CategoricalField::House => "house",
            CategoricalField::City => "city",
            CategoricalField::Year => "year",
            CategoricalField::Month => "month",
            CategoricalField::Topic => "topic",
            CategoricalField::Style => "style",
        }
    }

    fn value<T: Scalar>(&self, row: &FeatureRow<T>) -> String {
        match self {
            CategoricalField::Artist => row.artist.clone(),
            CategoricalField::Medium => row.medium.clone(),
            CategoricalField::House => row.house.clone(),
            CategoricalField::City => row.city.clone(),
            CategoricalField::Year => row.year.to_string(),
            // Zero-padded so lexicographic level order matches calendar order.
            CategoricalField::Month => format!("{:02}", row.month),
            CategoricalField::Topic => row.topic.name().to_string(),
            CategoricalField::Style => row.style.clone().unwrap_or_else(|| "(none)".to_string()),
        }
    }
}

impl FromStr for CategoricalField {
    type Err = HedonicError;

    fn from_str(s: &str) -> Result<Self, HedonicError> {
        match s.trim() {
            "artist" => Ok(CategoricalField::Artist),
            "medium" => Ok(CategoricalField::Medium),
            "house" => Ok(CategoricalField::House),
            "city" => Ok(CategoricalField::City),
            "year" => Ok(CategoricalField::Year),
            "month" => Ok(CategoricalField::Month),
            "topic" => Ok(CategoricalField::Topic),
            "style" => Ok(CategoricalField::Style),
            other => Err(HedonicError::UnknownField(other.to_string())),
        }
    }
}

/// A dummy-encoded categorical group. `reference` picks the omitted level;
/// `None` omits the lexicographically smallest observed level.
#[derive(Clone, Debug, PartialEq)]
pub struct DummyGroup {
    pub field: CategoricalField,
    pub reference: Option<String>,
}

impl DummyGroup {
    pub fn new(field: CategoricalField) -> DummyGroup {
        DummyGroup { field, reference: None }
    }

    pub fn with_reference(field: CategoricalField, level: impl Into<String>) -> DummyGroup {
        DummyGroup { field, reference: Some(level.into()) }
    }
}

/// A regression model: continuous terms plus dummy groups. `include_topic`
/// and `include_style` append the corresponding dummy groups; callers are
/// expected to have restricted the sample accordingly (classified topics,
/// styled records).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub terms: Vec<Term>,
    pub dummy_groups: Vec<DummyGroup>,
    pub include_topic: bool,
    pub include_style: bool,
}

impl ModelSpec {
    /// Built-in specifications 1 through 5.
    ///
    /// 1 is the baseline (size, signature, date, sale dummies); 2 adds the
    /// grayscale entropy e_g; 3 adds e_g^2 on top; 4 and 5 instead add the
    /// e_g interactions with height and width.
    pub fn preset(n: u8) -> Option<ModelSpec> {
        use CategoricalField as C;
        use ContinuousField as F;
        let mut terms = vec![
            Term::identity(F::Height),
            Term::square(F::Height),
            Term::identity(F::Width),
            Term::square(F::Width),
            Term::identity(F::Signed),
            Term::identity(F::Dated),
        ];
        match n {
            1 => {}
            2 => terms.insert(0, Term::identity(F::EG)),
            3 => {
                terms.insert(0, Term::square(F::EG));
                terms.insert(0, Term::identity(F::EG));
            }
            4 => {
                terms.insert(0, Term::product(F::EG, F::Height));
                terms.insert(0, Term::identity(F::EG));
            }
            5 => {
                terms.insert(0, Term::product(F::EG, F::Width));
                terms.insert(0, Term::identity(F::EG));
            }
            _ => return None,
        }
        let dummy_groups = [C::Artist, C::Medium, C::House, C::City, C::Year, C::Month]
            .into_iter()
            .map(DummyGroup::new)
            .collect();
        Some(ModelSpec { terms, dummy_groups, include_topic: false, include_style: false })
    }
}

/// One observation ready for regression. `log_price` is the response.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow<T> {
    pub log_price: T,
    pub e_g: T,
    pub redpct: T,
    pub bluepct: T,
    pub height: T,
    pub width: T,
    pub signed: bool,
    pub dated: bool,
    pub artist: String,
    pub medium: String,
    pub house: String,
    pub city: String,
    pub year: i32,
    pub month: u8,
    pub topic: TopicLabel,
    pub style: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum HedonicError {
    #[error("no rows in sample")]
    EmptySample,
    #[error("unknown field: {0}")]
    UnknownField(String),
    #[error("duplicate design column `{0}`")]
    DuplicateTerm(String),
    #[error("underdetermined system: {rows} rows for {cols} columns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("non-finite value in design or response")]
    NonFinite,
    #[error("subsample for topic {topic} is too small to fit")]
    SubsampleTooSmall { topic: TopicLabel },
}

/// Builds the design matrix, response vector, and column names for `spec`.
///
/// Columns are: `const`, the terms in order, then one dummy column per
/// non-reference level of each group (levels sorted, names `field=level`).
/// Groups with a single observed level contribute no columns.
pub fn build_design<T: Scalar>(
    rows: &[FeatureRow<T>],
    spec: &ModelSpec,
) -> Result<(Mat<T>, Vec<T>, Vec<String>), HedonicError> {
    if rows.is_empty() {
        return Err(HedonicError::EmptySample);
    }

    let mut groups: Vec<DummyGroup> = spec.dummy_groups.clone();
    if spec.include_topic {
        groups.push(DummyGroup::new(CategoricalField::Topic));
    }
    if spec.include_style {
        groups.push(DummyGroup::new(CategoricalField::Style));
    }

    // Column builders: name plus per-row value.
    let mut names: Vec<String> = vec!["const".to_string()];
    let mut columns: Vec<Vec<T>> = vec![vec![T::one(); rows.len()]];

    for term in &spec.terms {
        names.push(term.name.clone());
        let col: Vec<T> = rows.iter().map(|r| term.value(r)).collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(HedonicError::NonFinite);
        }
        columns.push(col);
    }

    for group in &groups {
        let values: Vec<String> = rows.iter().map(|r| group.field.value(r)).collect();
        let mut levels: Vec<&String> = values.iter().collect::<HashSet<_>>().into_iter().collect();
        levels.sort();
        if levels.len() < 2 {
            continue;
        }
        let reference = match &group.reference {
            Some(level) => {
                if !levels.iter().any(|l| *l == level) {
                    return Err(HedonicError::UnknownField(format!(
                        "reference level `{level}` not observed for {}",
                        group.field.name()
                    )));
                }
                level.clone()
            }
            None => levels[0].clone(),
        };
        for level in levels {
            if *level == reference {
                continue;
            }
            names.push(format!("{}={}", group.field.name(), level));
            columns.push(
                values
                    .iter()
                    .map(|v| if v == level { T::one() } else { T::zero() })
                    .collect(),
            );
        }
    }

    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(HedonicError::DuplicateTerm(name.clone()));
        }
    }

    let y: Vec<T> = rows.iter().map(|r| r.log_price).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(HedonicError::NonFinite);
    }

    let (n, k) = (rows.len(), names.len());
    let x = Mat::from_fn(n, k, |i, j| columns[j][i]);
    Ok((x, y, names))
}

/// Per-coefficient fit statistics.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TermStats<T> {
    pub name: String,
    pub coef: T,
    pub se: T,
    pub t: T,
    pub p: T,
    pub stars: String,
}

/// Ordinary least squares fit summary with classical inference.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FitSummary<T> {
    pub terms: Vec<TermStats<T>>,
    pub n: usize,
    pub r_squared: T,
    pub adj_r_squared: T,
    /// Names of design columns dropped as collinear.
    pub dropped: Vec<String>,
}

fn stars_for<T: Scalar>(p: T) -> &'static str {
    if p < T::real(0.01) {
        "***"
    } else if p < T::real(0.05) {
        "**"
    } else if p < T::real(0.1) {
        "*"
    } else {
        ""
    }
}

/// Fits y on x by least squares and derives classical standard errors,
/// t statistics, two-sided p-values, and (adjusted) R-squared.
///
/// Collinear columns are dropped at the [`PIVOT_REL_TOL`] pivot threshold
/// and reported by name; inference treats the retained columns as the
/// model. Requires strictly more rows than columns.
pub fn fit_ols<T: Scalar>(
    x: &Mat<T>,
    y: &[T],
    names: &[String],
) -> Result<FitSummary<T>, HedonicError> {
    let (n, k) = (x.rows(), x.cols());
    assert_eq!(y.len(), n, "response length must match row count");
    assert_eq!(names.len(), k, "one name per design column");
    if n == 0 {
        return Err(HedonicError::EmptySample);
    }
    if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(HedonicError::NonFinite);
    }
    if n <= k {
        return Err(HedonicError::Underdetermined { rows: n, cols: k });
    }

    let ls = lstsq_colpiv(x, y, T::real(PIVOT_REL_TOL));
    let k_eff = ls.retained.len();

    let mut full_coef = vec![T::zero(); k];
    for (slot, &j) in ls.retained.iter().enumerate() {
        full_coef[j] = ls.coef[slot];
    }
    let fitted = x.matvec(&full_coef);
    let mut rss = T::zero();
    for i in 0..n {
        let r = y[i] - fitted[i];
        rss = rss + r * r;
    }

    let dof = n - k_eff;
    let s2 = rss / T::real(dof as f64);

    let mean = y.iter().copied().sum::<T>() / T::real(n as f64);
    let tss = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>();
    let r_squared = if tss > T::zero() { T::one() - rss / tss } else { T::zero() };
    let adj_r_squared = T::one()
        - (T::one() - r_squared) * T::real((n - 1) as f64) / T::real(dof as f64);

    let mut terms = Vec::with_capacity(k_eff);
    for (slot, &j) in ls.retained.iter().enumerate() {
        let coef = ls.coef[slot];
        let se = (s2 * ls.gram_inv_diag[slot]).sqrt();
        let t = if se > T::zero() {
            coef / se
        } else if coef == T::zero() {
            T::zero()
        } else {
            T::infinity() * coef.signum()
        };
        let p = student_t_two_sided_p(t, dof);
        terms.push(TermStats {
            name: names[j].clone(),
            coef,
            se,
            t,
            p,
            stars: stars_for(p).to_string(),
        });
    }
    let dropped = ls.dropped.iter().map(|&j| names[j].clone()).collect();

    Ok(FitSummary { terms, n, r_squared, adj_r_squared, dropped })
}

/// Builds the design for `spec` and fits it.
pub fn fit_model<T: Scalar>(
    rows: &[FeatureRow<T>],
    spec: &ModelSpec,
) -> Result<FitSummary<T>, HedonicError> {
    let (x, y, names) = build_design(rows, spec)?;
    fit_ols(&x, &y, &names)
}

fn as_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn fmt_p(p: f64) -> String {
    if p.is_nan() {
        "NaN".to_string()
    } else if p != 0.0 && p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

impl<T: Scalar> FitSummary<T> {
    /// Plain-text coefficient table.
    pub fn to_text_table(&self) -> String {
        let name_w = self.terms.iter().map(|t| t.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        out.push_str(&format!(
            "{:<name_w$}  {:>12}  {:>12}  {:>10}  {:>10}  sig\n",
            "term", "coef", "std err", "t", "p>|t|"
        ));
        out.push_str(&"-".repeat(name_w + 57));
        out.push('\n');
        for t in &self.terms {
            out.push_str(&format!(
                "{:<name_w$}  {:>12.6}  {:>12.6}  {:>10.3}  {:>10}  {}\n",
                t.name,
                as_f64(t.coef),
                as_f64(t.se),
                as_f64(t.t),
                fmt_p(as_f64(t.p)),
                t.stars
            ));
        }
        out.push_str(&format!(
            "\nn = {}   R^2 = {:.6}   adj R^2 = {:.6}\n",
            self.n,
            as_f64(self.r_squared),
            as_f64(self.adj_r_squared)
        ));
        if !self.dropped.is_empty() {
            out.push_str(&format!("dropped (collinear): {}\n", self.dropped.join(", ")));
        }
        out
    }
}

/// Which direction a comparison panel runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonKind {
    Add,
    Drop,
}

/// The reference fit of a comparison. For drop panels, `candidate_rows`
/// carries the candidates' coefficient rows inside the full model.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PanelFit<T> {
    pub label: String,
    pub summary: FitSummary<T>,
    pub candidate_rows: Vec<TermStats<T>>,
}

/// One comparison line: the refit statistics after adding or dropping
/// `var`. `coef_row` is the candidate's row in the augmented fit (add
/// panels only; `None` if the column was dropped as collinear).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComparisonEntry<T> {
    pub var: String,
    pub n: usize,
    pub adj_r_squared: T,
    pub coef_row: Option<TermStats<T>>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComparisonReport<T> {
    pub kind: ComparisonKind,
    pub reference: PanelFit<T>,
    pub entries: Vec<ComparisonEntry<T>>,
}

/// Fits `base`, then refits once per candidate term added to it.
pub fn compare_fit_add<T: Scalar>(
    rows: &[FeatureRow<T>],
    base: &ModelSpec,
    candidates: &[Term],
) -> Result<ComparisonReport<T>, HedonicError> {
    let reference = fit_model(rows, base)?;
    let mut entries = Vec::with_capacity(candidates.len());
    for cand in candidates {
        if base.terms.iter().any(|t| t.name == cand.name) {
            return Err(HedonicError::DuplicateTerm(cand.name.clone()));
        }
        let mut spec = base.clone();
        spec.terms.push(cand.clone());
        let fit = fit_model(rows, &spec)?;
        let coef_row = fit.terms.iter().find(|t| t.name == cand.name).cloned();
        entries.push(ComparisonEntry {
            var: cand.name.clone(),
            n: fit.n,
            adj_r_squared: fit.adj_r_squared,
            coef_row,
        });
    }
    Ok(ComparisonReport {
        kind: ComparisonKind::Add,
        reference: PanelFit {
            label: "base".to_string(),
            summary: reference,
            candidate_rows: Vec::new(),
        },
        entries,
    })
}

/// Fits `full`, then refits once per candidate term removed from it.
pub fn compare_fit_drop<T: Scalar>(
    rows: &[FeatureRow<T>],
    full: &ModelSpec,
    candidates: &[Term],
) -> Result<ComparisonReport<T>, HedonicError> {
    let reference = fit_model(rows, full)?;
    let candidate_rows: Vec<TermStats<T>> = candidates
        .iter()
        .filter_map(|c| reference.terms.iter().find(|t| t.name == c.name).cloned())
        .collect();
    let mut entries = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let pos = full
            .terms
            .iter()
            .position(|t| t.name == cand.name)
            .ok_or_else(|| {
                HedonicError::UnknownField(format!("term `{}` not in the full model", cand.name))
            })?;
        let mut spec = full.clone();
        spec.terms.remove(pos);
        let fit = fit_model(rows, &spec)?;
        entries.push(ComparisonEntry {
            var: cand.name.clone(),
            n: fit.n,
            adj_r_squared: fit.adj_r_squared,
            coef_row: None,
        });
    }
    Ok(ComparisonReport {
        kind: ComparisonKind::Drop,
        reference: PanelFit {
            label: "full".to_string(),
            summary: reference,
            candidate_rows,
        },
        entries,
    })
}

impl<T: Scalar> ComparisonReport<T> {
    /// Plain-text rendering: the reference table followed by one line per
    /// candidate variable.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (title, action) = match self.kind {
            ComparisonKind::Add => ("base model", "after adding"),
            ComparisonKind::Drop => ("full model", "after dropping"),
        };
        out.push_str(&format!("reference ({title})\n"));
        out.push_str(&self.reference.summary.to_text_table());
        out.push('\n');
        let var_w = self
            .entries
            .iter()
            .map(|e| e.var.len())
            .max()
            .unwrap_or(3)
            .max(3);
        out.push_str(&format!(
            "adjusted R^2 {action} each variable (reference adj R^2 = {:.6})\n",
            as_f64(self.reference.summary.adj_r_squared)
        ));
        out.push_str(&format!(
            "{:<var_w$}  {:>8}  {:>12}  {:>12}  {:>12}  {:>10}  sig\n",
            "var", "n", "adj R^2", "coef", "std err", "p>|t|"
        ));
        out.push_str(&"-".repeat(var_w + 70));
        out.push('\n');
        for e in &self.entries {
            let row = match self.kind {
                ComparisonKind::Add => e.coef_row.as_ref(),
                ComparisonKind::Drop => {
                    self.reference.candidate_rows.iter().find(|r| r.name == e.var)
                }
            };
            match row {
                Some(r) => out.push_str(&format!(
                    "{:<var_w$}  {:>8}  {:>12.6}  {:>12.6}  {:>12.6}  {:>10}  {}\n",
                    e.var,
                    e.n,
                    as_f64(e.adj_r_squared),
                    as_f64(r.coef),
                    as_f64(r.se),
                    fmt_p(as_f64(r.p)),
                    r.stars
                )),
                None => out.push_str(&format!(
                    "{:<var_w$}  {:>8}  {:>12.6}  {:>12}  {:>12}  {:>10}\n",
                    e.var,
                    e.n,
                    as_f64(e.adj_r_squared),
                    "-",
                    "-",
                    "-"
                )),
            }
        }
        out
    }
}

/// Fits `spec` separately on each content-topic subsample.
///
/// Untitled and Unknown rows are ignored; topics with no rows are simply
/// absent from the result. A topic with too few rows for the design turns
/// into [`HedonicError::SubsampleTooSmall`].
pub fn fit_by_topic<T: Scalar>(
    rows: &[FeatureRow<T>],
    spec: &ModelSpec,
) -> Result<BTreeMap<TopicLabel, FitSummary<T>>, HedonicError> {
    let mut out = BTreeMap::new();
    for topic in TopicLabel::CONTENT {
        let sub: Vec<FeatureRow<T>> =
            rows.iter().filter(|r| r.topic == topic).cloned().collect();
        if sub.is_empty() {
            continue;
        }
        match fit_model(&sub, spec) {
            Ok(fit) => {
                out.insert(topic, fit);
            }
            Err(HedonicError::Underdetermined { .. }) | Err(HedonicError::EmptySample) => {
                return Err(HedonicError::SubsampleTooSmall { topic });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Two-sided p-value of a Student t statistic with `dof` degrees of
/// freedom, via the regularized incomplete beta function.
fn student_t_two_sided_p<T: Scalar>(t: T, dof: usize) -> T {
    debug_assert!(dof >= 1);
    let nu = T::real(dof as f64);
    let t2 = t * t;
    if !t2.is_finite() {
        return T::zero();
    }
    let x = nu / (nu + t2);
    incomplete_beta(nu / T::real(2.0), T::real(0.5), x)
}

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
fn incomplete_beta<T: Scalar>(a: T, b: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_bt =
        gammln(a + b) - gammln(a) - gammln(b) + a * x.ln() + b * (T::one() - x).ln();
    let bt = ln_bt.exp();
    if x < (a + T::one()) / (a + b + T::real(2.0)) {
        bt * betacf(a, b, x) / a
    } else {
        T::one() - bt * betacf(b, a, T::one() - x) / b
    }
}

/// Log gamma by the Lanczos series.
fn gammln<T: Scalar>(xx: T) -> T {
    const COF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let x = xx;
    let mut y = xx;
    let mut tmp = x + T::real(5.5);
    tmp = tmp - (x + T::real(0.5)) * tmp.ln();
    let mut ser = T::real(1.000000000190015);
    for &c in COF.iter() {
        y = y + T::one();
        ser = ser + T::real(c) / y;
    }
    -tmp + (T::real(2.5066282746310005) * ser / x).ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn betacf<T: Scalar>(a: T, b: T, x: T) -> T {
    let eps = T::epsilon() * T::real(4.0);
    let fpmin = T::min_positive_value() / T::epsilon();
    let clamp = |v: T| if v.abs() < fpmin { fpmin } else { v };

    let qab = a + b;
    let qap = a + T::one();
    let qam = a - T::one();
    let mut c = T::one();
    let mut d = T::one() / clamp(T::one() - qab * x / qap);
    let mut h = d;
    for m in 1..=300 {
        let mt = T::real(m as f64);
        let m2 = T::real((2 * m) as f64);
        let aa = mt * (b - mt) * x / ((qam + m2) * (a + m2));
        d = T::one() / clamp(T::one() + aa * d);
        c = clamp(T::one() + aa / c);
        h = h * d * c;
        let aa = -(a + mt) * (qab + mt) * x / ((a + m2) * (qap + m2));
        d = T::one() / clamp(T::one() + aa * d);
        c = clamp(T::one() + aa / c);
        let del = d * c;
        h = h * del;
        if (del - T::one()).abs() < eps {
            break;
        }
    }
    h
}
