//! Report data structures shared by the CLI and the C ABI.
//!
//! Everything here is plain serializable data. Numbers travel as strings in
//! two forms — a 12-significant-digit scientific rendering for humans and an
//! exact decimal expansion for auditing — so no floating point enters the
//! report and identical inputs produce byte-identical JSON (struct fields
//! serialize in declaration order; there are no maps with unstable order).
//!
//! [`RunConfig`] is the single configuration surface: the CLI builds it from
//! an optional JSON config file overlaid with command-line flags (flags win),
//! validates it once, and threads it through every command.

use crate::baker::BoundCertificate;
use crate::factor::Factorization;
use crate::lattice::ReductionOutcome;
use crate::mp::FixedReal;
use crate::order::{OrderFact, OrderKind};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Bumped whenever the JSON layout of [`PipelineReport`] changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Output rendering selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Md,
}

/// Runtime configuration: precision and lattice parameters, factor-table
/// location, search bounds, and output shape.
///
/// Every field has a default, so a config file may specify any subset;
/// command-line flags override file values field by field.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Override of the per-case `ln` working precision (decimal digits).
    /// `None` uses the case defaults (450 / 200 / 150).
    pub precision: Option<u32>,
    /// Override of the lattice scaling constant `C` (decimal integer,
    /// at least `10^10`) for whichever reduction case is run. `None` uses
    /// the case defaults (`10^370` / `10^157` / `10^111`).
    pub scaling_c: Option<String>,
    /// Criterion weight: the reduction certifies `l(Gamma) > X_1
    /// sqrt(16 + 4 gamma)`.
    pub gamma: u32,
    /// Lovász parameter delta as a fraction `[num, den]`, `1/4 < delta <= 1`.
    /// The reduction is implemented for the classical 3/4; any other value
    /// is rejected at validation.
    pub delta: [u32; 2],
    /// Factor-table path. `None` falls back to the `SIGMAPQ_FACTOR_DB`
    /// environment variable, then to the bundled table.
    pub db_path: Option<PathBuf>,
    /// Trial bound for smooth-part extraction in order computations.
    pub smooth_bound: u64,
    /// Half-width of the exhaustive `(a, b, c)` cross-check box for `solve`.
    pub brute_box: u64,
    /// Enumeration ceiling on `b` for the parametric solution family.
    pub family_iv_bound: u64,
    /// Report rendering.
    pub format: OutputFormat,
    /// Include wall-clock timings per stage. Off by default: timings are
    /// nondeterministic and would break byte-identical reports.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: None,
            scaling_c: None,
            gamma: 2,
            delta: [3, 4],
            db_path: None,
            smooth_bound: 100_000,
            brute_box: 20,
            family_iv_bound: 1000,
            format: OutputFormat::Json,
            timings: false,
        }
    }
}

impl RunConfig {
    /// Parse a JSON config file.
    pub fn from_file(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Check every invariant once, up front.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.precision {
            if p < 20 {
                return Err(Error::Config(format!(
                    "precision must be at least 20 digits (got {p})"
                )));
            }
        }
        if let Some(c) = &self.scaling_c {
            let val: BigInt = c
                .parse()
                .map_err(|_| Error::Config(format!("scaling_c is not a decimal integer: {c}")))?;
            if val < BigInt::from(10u64.pow(10)) {
                return Err(Error::Config(format!("scaling_c must be >= 10^10 (got {c})")));
            }
        }
        if self.gamma == 0 {
            return Err(Error::Config("gamma must be positive".into()));
        }
        let [num, den] = self.delta;
        if num == 0 || den == 0 || 4 * num <= den || num > den {
            return Err(Error::Config(format!(
                "delta must satisfy 1/4 < num/den <= 1 (got {num}/{den})"
            )));
        }
        if [num, den] != [3, 4] {
            return Err(Error::Config(format!(
                "only the classical delta = 3/4 is implemented (got {num}/{den})"
            )));
        }
        if self.smooth_bound < 2 {
            return Err(Error::Config("smooth_bound must be at least 2".into()));
        }
        if self.brute_box == 0 {
            return Err(Error::Config("brute_box must be positive".into()));
        }
        if self.family_iv_bound == 0 {
            return Err(Error::Config("family_iv_bound must be positive".into()));
        }
        Ok(())
    }

    /// Parsed scaling override, when present. `validate` has already
    /// checked the syntax and the lower bound.
    pub fn scaling_override(&self) -> Option<BigInt> {
        self.scaling_c.as_ref().map(|c| c.parse().expect("validated"))
    }
}

/// A number in both renderings: display-rounded and exact.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ValueDto {
    /// 12 significant digits, scientific notation. Display only.
    pub sci: String,
    /// Exact decimal expansion of the underlying fixed-point value.
    pub exact: String,
}

impl From<&FixedReal> for ValueDto {
    fn from(v: &FixedReal) -> Self {
        ValueDto { sci: v.to_sci(12), exact: exact_decimal(v) }
    }
}

/// `mantissa * 10^-scale` written out exactly.
fn exact_decimal(v: &FixedReal) -> String {
    let neg = v.mantissa.is_negative();
    let digits = v.mantissa.abs().to_string();
    let scale = v.scale as usize;
    let body = if scale == 0 {
        digits
    } else if digits.len() > scale {
        let split = digits.len() - scale;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat(scale - digits.len()), digits)
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg && body != "0" {
        format!("-{body}")
    } else {
        body
    }
}

/// A named scalar (chain constants and similar).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: ValueDto,
}

impl NamedValue {
    pub fn new(name: &str, value: &FixedReal) -> Self {
        NamedValue { name: name.into(), value: value.into() }
    }
}

/// Serialized form of a [`BoundCertificate`]: the certified value plus the
/// derivation chain that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDto {
    pub name: String,
    pub value: ValueDto,
    pub derivation: Vec<String>,
}

impl From<&BoundCertificate> for CertificateDto {
    fn from(c: &BoundCertificate) -> Self {
        CertificateDto {
            name: c.name.clone(),
            value: (&c.value).into(),
            derivation: c.derivation.clone(),
        }
    }
}

/// One lattice-reduction case, end to end.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionDto {
    /// `first`, `nodiv`, or `div`.
    pub case: String,
    /// Scaling constant actually used (after any retries), exact decimal.
    pub c: String,
    pub gamma: u32,
    /// Coefficient cap `X_1` fed to the criterion.
    pub x1: ValueDto,
    /// Case bound on `H = max |h_i|`.
    pub h_case: ValueDto,
    /// Columns of the LLL-reduced basis (each inner vector is one basis
    /// vector), exact integers.
    pub reduced_basis: Vec<Vec<String>>,
    /// Unimodular transform: `reduced[j] = sum_i transform[j][i] *
    /// input[i]`.
    pub transform: Vec<Vec<String>>,
    /// Certified lower bound on the shortest nonzero vector.
    pub l_lower: ValueDto,
    /// Certified lower bound on `|Lambda|`.
    pub lambda_lower: ValueDto,
    /// New certified upper bound on `log x`.
    pub new_bound: ValueDto,
    /// How many times `C` was raised by `10^5` after a criterion failure.
    pub retries: u32,
    pub certificate: CertificateDto,
}

impl From<&ReductionOutcome> for ReductionDto {
    fn from(o: &ReductionOutcome) -> Self {
        ReductionDto {
            case: o.case.label().into(),
            c: o.c.to_string(),
            gamma: o.gamma,
            x1: (&o.x1).into(),
            h_case: (&o.h_case).into(),
            reduced_basis: o
                .basis
                .cols
                .iter()
                .map(|col| col.iter().map(|x| x.to_string()).collect())
                .collect(),
            transform: o
                .transform
                .iter()
                .map(|col| col.iter().map(|x| x.to_string()).collect())
                .collect(),
            l_lower: (&o.l_lower).into(),
            lambda_lower: (&o.lambda_lower).into(),
            new_bound: (&o.new_bound).into(),
            retries: o.retries,
            certificate: (&o.certificate).into(),
        }
    }
}

/// One prime power of a factorization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimePowerDto {
    pub prime: String,
    pub exponent: u32,
}

/// A (possibly partial) repunit factorization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationDto {
    pub base: u32,
    pub exponent: u64,
    /// The factored number `(base^exponent - 1)/(base - 1)`, exact decimal.
    pub value: String,
    pub factors: Vec<PrimePowerDto>,
    /// Composite unfactored remainder, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
    pub complete: bool,
    /// Certified lower bound on the number of distinct primes.
    pub omega_lower_bound: usize,
}

impl FactorizationDto {
    pub fn new(base: u32, exponent: u64, fac: &Factorization) -> Self {
        FactorizationDto {
            base,
            exponent,
            value: fac.value().to_string(),
            factors: fac
                .factors
                .iter()
                .map(|(p, k)| PrimePowerDto { prime: p.to_string(), exponent: *k })
                .collect(),
            cofactor: fac.cofactor.as_ref().map(|c| c.to_string()),
            complete: fac.complete(),
            omega_lower_bound: fac.omega_lower_bound(),
        }
    }
}

/// A verified multiplicative-order statement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderFactDto {
    pub base: String,
    pub modulus: String,
    /// `exact` when the full order is known, `multiple_of` when only a
    /// certified divisor of the order is claimed.
    pub kind: String,
    pub order: String,
    /// Table rendering: exact orders print bare, partial facts in
    /// parentheses.
    pub display: String,
}

impl From<&OrderFact> for OrderFactDto {
    fn from(f: &OrderFact) -> Self {
        let (kind, order) = match &f.kind {
            OrderKind::Exact(n) => ("exact", n.to_string()),
            OrderKind::MultipleOf(m) => ("multiple_of", m.to_string()),
        };
        OrderFactDto {
            base: f.base.to_string(),
            modulus: f.modulus.to_string(),
            kind: kind.into(),
            order,
            display: f.kind.to_string(),
        }
    }
}

/// Top-level report emitted by every CLI command.
///
/// Only the sections a command produces are serialized; the rest are
/// omitted, so each command's JSON is self-describing and minimal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    /// The subcommand that produced this report.
    pub command: String,
    /// Echo of the validated configuration.
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub constants: Vec<NamedValue>,
    /// Prose derivation of the constants section (one line per chain step).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub derivations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificates: Vec<CertificateDto>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub reductions: Vec<ReductionDto>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub factorization: Option<FactorizationDto>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<OrderFactDto>,
    /// Wall-clock milliseconds per stage, only when `timings` is on.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<Vec<(String, u64)>>,
}

impl PipelineReport {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        PipelineReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: config.clone(),
            constants: Vec::new(),
            derivations: Vec::new(),
            certificates: Vec::new(),
            reductions: Vec::new(),
            factorization: None,
            order: None,
            timings_ms: None,
        }
    }

    /// Pretty JSON with a trailing newline. Field order is declaration
    /// order, so identical contents give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Markdown rendering of the populated sections.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, s: &str| {
            out.push_str(s);
            out.push('\n');
        };
        push(&mut out, &format!("# sigmapq report: {}", self.command));
        push(&mut out, "");
        if !self.constants.is_empty() {
            push(&mut out, "## Constants");
            push(&mut out, "");
            push(&mut out, "| name | value |");
            push(&mut out, "| --- | --- |");
            for c in &self.constants {
                push(&mut out, &format!("| {} | {} |", c.name, c.value.sci));
            }
            push(&mut out, "");
        }
        if !self.derivations.is_empty() {
            push(&mut out, "## Derivation");
            push(&mut out, "");
            for step in &self.derivations {
                push(&mut out, &format!("- {step}"));
            }
            push(&mut out, "");
        }
        if !self.certificates.is_empty() {
            push(&mut out, "## Certificates");
            push(&mut out, "");
            for c in &self.certificates {
                push(&mut out, &format!("### {} = {}", c.name, c.value.sci));
                push(&mut out, "");
                for step in &c.derivation {
                    push(&mut out, &format!("- {step}"));
                }
                push(&mut out, "");
            }
        }
        for r in &self.reductions {
            push(&mut out, &format!("## Reduction case `{}`", r.case));
            push(&mut out, "");
            push(&mut out, &format!("- C = {}", pow_of_ten_or_plain(&r.c)));
            push(&mut out, &format!("- gamma = {}", r.gamma));
            push(&mut out, &format!("- X_1 = {}", r.x1.sci));
            push(&mut out, &format!("- H bound for this case = {}", r.h_case.sci));
            push(&mut out, &format!("- l(Gamma) >= {}", r.l_lower.sci));
            push(&mut out, &format!("- |Lambda| >= {}", r.lambda_lower.sci));
            push(&mut out, &format!("- new log x bound = {}", r.new_bound.sci));
            push(&mut out, &format!("- retries = {}", r.retries));
            push(&mut out, "");
            push(&mut out, &format!("### {} = {}", r.certificate.name, r.certificate.value.sci));
            push(&mut out, "");
            for step in &r.certificate.derivation {
                push(&mut out, &format!("- {step}"));
            }
            push(&mut out, "");
        }
        if let Some(f) = &self.factorization {
            push(&mut out, &format!("## Repunit ({}^{} - 1)/{}", f.base, f.exponent, f.base - 1));
            push(&mut out, "");
            push(&mut out, &format!("- value = {}", f.value));
            let parts: Vec<String> = f
                .factors
                .iter()
                .map(|pp| {
                    if pp.exponent == 1 {
                        pp.prime.clone()
                    } else {
                        format!("{}^{}", pp.prime, pp.exponent)
                    }
                })
                .collect();
            let mut product = parts.join(" * ");
            if let Some(c) = &f.cofactor {
                if !product.is_empty() {
                    product.push_str(" * ");
                }
                product.push_str(&format!("C ({c})"));
            }
            push(&mut out, &format!("- factors = {product}"));
            push(&mut out, &format!("- complete = {}", f.complete));
            push(&mut out, &format!("- omega >= {}", f.omega_lower_bound));
            push(&mut out, "");
        }
        if let Some(o) = &self.order {
            push(&mut out, &format!("## ord_{}({})", o.modulus, o.base));
            push(&mut out, "");
            let what = if o.kind == "exact" { "order" } else { "certified divisor of the order" };
            push(&mut out, &format!("- {what} = {}", o.order));
            push(&mut out, &format!("- table cell = {}", o.display));
            push(&mut out, "");
        }
        if let Some(t) = &self.timings_ms {
            push(&mut out, "## Timings");
            push(&mut out, "");
            for (stage, ms) in t {
                push(&mut out, &format!("- {stage}: {ms} ms"));
            }
            push(&mut out, "");
        }
        out
    }

    /// Render per the configured output format.
    pub fn render(&self) -> Result<String> {
        match self.config.format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Md => Ok(self.to_markdown()),
        }
    }
}

/// `10^k` integers print as a power for readability; anything else prints
/// as-is.
fn pow_of_ten_or_plain(decimal: &str) -> String {
    let mut chars = decimal.chars();
    if chars.next() == Some('1') && chars.clone().all(|c| c == '0') {
        format!("10^{}", decimal.len() - 1)
    } else {
        decimal.to_string()
    }
}
