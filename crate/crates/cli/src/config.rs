//! Experiment configuration: a flat `key = value` text format with
//! `[section]` headers (one scenario per file), validated up front.
//!
//! Validation is total: every structural, referential, and domain error in
//! the file is collected and reported at once, referenced files are read and
//! parsed during validation, and all scenario data is materialized into the
//! returned [`ExperimentConfig`], so a validated config cannot fail later
//! except by exceeding an explicit budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use polylab_core::exactnum::{parse_rat, BigRat};
use polylab_core::expansion::{BoundParams, FiniteSet, SurfaceSpec};
use polylab_core::groupaction::{
    make_action, ActionKind, ActionSubset, GroupAction, GroupElem, PointElem,
};
use polylab_core::polyalg::{
    parse_family, parse_poly, parse_surface_poly, parse_uni, CompositeKind, MultiPoly, PolyFamily,
    UniPoly,
};

/// Largest explicit collection a config may request (range expansions, value
/// lists, progression lengths). Keeps a typo from allocating unboundedly.
pub const MAX_LIST: u64 = 1_000_000;

/// Default iterated-sumset budget (`k * |S_N|` must stay at or below it).
pub const DEFAULT_SPAN_BUDGET: u64 = 1_000_000_000;

/// Default stabilizer-enumeration budget (`|A|^n` must stay at or below it).
pub const DEFAULT_STAB_BUDGET: u64 = 100_000_000;

/// The ten scenario kinds, in subcommand order.
pub const SCENARIO_KINDS: [&str; 10] = [
    "measure",
    "classify",
    "decompose",
    "incidence",
    "construct",
    "span",
    "tower",
    "bsg",
    "stab",
    "bounds",
];

/// Input of a `measure` scenario: a univariate family or one multivariate
/// polynomial. The original text is kept for the summary.
pub enum MeasureInput {
    Family { text: String, family: PolyFamily },
    Multi { text: String, poly: MultiPoly },
}

/// What a `construct` scenario builds.
pub enum ConstructSpec {
    Ap {
        start: BigRat,
        step: BigRat,
        count: u64,
    },
    Gp {
        start: BigRat,
        ratio: BigRat,
        count: u64,
    },
    Family {
        kind: CompositeKind,
        g: UniPoly,
        h: UniPoly,
        params: FiniteSet,
    },
    Span {
        big_n: u64,
    },
}

/// Fully materialized scenario data; everything referenced by the config
/// file has already been read, parsed, and validated.
pub enum Scenario {
    Measure {
        input: MeasureInput,
        n_values: Vec<u64>,
        start: i64,
    },
    Classify {
        text: String,
        family: PolyFamily,
        eps: f64,
    },
    Decompose {
        text: String,
        poly: UniPoly,
    },
    Incidence {
        implicit: bool,
        text: String,
        surface: SurfaceSpec,
        a: FiniteSet,
        d: FiniteSet,
        b: FiniteSet,
    },
    Construct(ConstructSpec),
    Span {
        big_n: u64,
        k_values: Vec<u32>,
        budget: u64,
    },
    Tower {
        n_values: Vec<u32>,
    },
    Bsg {
        action: GroupAction,
        s: ActionSubset,
        a: ActionSubset,
        delta: f64,
        cover_k: u64,
    },
    Stab {
        action: GroupAction,
        w: ActionSubset,
        a: ActionSubset,
        tuple_len: u64,
        budget: u64,
    },
    Bounds,
}

/// A validated experiment: scenario kind and data, label, seed, shared
/// numeric parameters, and the optional coarse-dimension scale override.
pub struct ExperimentConfig {
    pub kind: &'static str,
    pub label: String,
    pub seed: Option<u64>,
    pub params: BoundParams,
    pub xi: Option<f64>,
    pub scenario: Scenario,
}

struct RawEntry {
    value: String,
    line: usize,
    used: bool,
}

/// The flat key space after section flattening: `[sets]` + `n_values` is the
/// key `sets.n_values`.
struct RawConfig {
    entries: BTreeMap<String, RawEntry>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig, Vec<String>> {
        let mut entries: BTreeMap<String, RawEntry> = BTreeMap::new();
        let mut errors = Vec::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            // `#` also starts a trailing comment; `;` does not, because it
            // separates family members inside values.
            let line = match trimmed.find('#') {
                Some(i) => trimmed[..i].trim_end(),
                None => trimmed,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name)
                        if !name.is_empty()
                            && name.chars().all(|c| c.is_ascii_lowercase() || c == '_') =>
                    {
                        section = name.to_string();
                    }
                    _ => errors.push(format!("line {lineno}: malformed section header `{line}`")),
                }
                continue;
            }
            let Some((key_part, value_part)) = line.split_once('=') else {
                errors.push(format!(
                    "line {lineno}: expected `key = value` or `[section]`, got `{line}`"
                ));
                continue;
            };
            let key = key_part.trim();
            let value = value_part.trim();
            let key_ok = !key.is_empty()
                && key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !key_ok {
                errors.push(format!("line {lineno}: malformed key `{key}`"));
                continue;
            }
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if entries.contains_key(&full) {
                errors.push(format!("line {lineno}: duplicate key `{full}`"));
                continue;
            }
            entries.insert(
                full,
                RawEntry {
                    value: value.to_string(),
                    line: lineno,
                    used: false,
                },
            );
        }
        if errors.is_empty() {
            Ok(RawConfig { entries })
        } else {
            Err(errors)
        }
    }
}

/// Validation context: raw entries, base directory for file references, and
/// the running error list.
struct Ctx<'a> {
    raw: RawConfig,
    base_dir: &'a Path,
    errors: Vec<String>,
}

impl Ctx<'_> {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn has(&self, key: &str) -> bool {
        self.raw.entries.contains_key(key)
    }

    /// Consumes a key if present.
    fn take(&mut self, key: &str) -> Option<String> {
        let entry = self.raw.entries.get_mut(key)?;
        entry.used = true;
        Some(entry.value.clone())
    }

    /// Consumes a required key; records an error when absent.
    fn take_req(&mut self, key: &str) -> Option<String> {
        let v = self.take(key);
        if v.is_none() {
            self.err(format!("{key} is required"));
        }
        v
    }

    fn take_u64(&mut self, key: &str) -> Option<u64> {
        let v = self.take(key)?;
        match v.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(format!("{key}: expected a nonnegative integer, got `{v}`"));
                None
            }
        }
    }

    /// Required u64: records an error when absent or malformed.
    fn req_u64(&mut self, key: &str) -> Option<u64> {
        let v = self.take_req(key)?;
        match v.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(format!("{key}: expected a nonnegative integer, got `{v}`"));
                None
            }
        }
    }

    fn take_i64(&mut self, key: &str) -> Option<i64> {
        let v = self.take(key)?;
        match v.parse::<i64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(format!("{key}: expected an integer, got `{v}`"));
                None
            }
        }
    }

    fn take_f64(&mut self, key: &str) -> Option<f64> {
        let v = self.take(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.err(format!("{key}: expected a finite number, got `{v}`"));
                None
            }
        }
    }

    fn take_rat(&mut self, key: &str) -> Option<BigRat> {
        let v = self.take(key)?;
        match parse_rat(&v) {
            Ok(r) => Some(r),
            Err(e) => {
                self.err(format!("{key}: {e}"));
                None
            }
        }
    }

    /// Reads a file referenced by `key`, resolving relative paths against
    /// the config's directory. A missing file names the resolved path.
    fn read_file(&mut self, key: &str, rel: &str) -> Option<String> {
        let path: PathBuf = if Path::new(rel).is_absolute() {
            PathBuf::from(rel)
        } else {
            self.base_dir.join(rel)
        };
        match fs::read_to_string(&path) {
            Ok(text) => Some(text),
            Err(_) => {
                self.err(format!("{key}: file not found: {}", path.display()));
                None
            }
        }
    }

    /// `a,b,c`, `a..b` (exclusive) or `a..=b` (inclusive) over nonnegative
    /// integers, capped at [`MAX_LIST`] values.
    fn int_list(&mut self, key: &str, spec: &str) -> Option<Vec<u64>> {
        match parse_u64_list(spec) {
            Ok(v) => Some(v),
            Err(e) => {
                self.err(format!("{key}: {e}"));
                None
            }
        }
    }

    /// A rational set: `file:<path>` (one element per line), an integer
    /// range, or a comma list of rationals.
    fn rational_set(&mut self, key: &str) -> Option<FiniteSet> {
        let spec = self.take_req(key)?;
        let set = if let Some(rel) = spec.strip_prefix("file:") {
            let text = self.read_file(key, rel.trim())?;
            match FiniteSet::parse(&text) {
                Ok(s) => s,
                Err(e) => {
                    self.err(format!("{key}: {e}"));
                    return None;
                }
            }
        } else if spec.contains("..") {
            let ints = self.int_list(key, &spec)?;
            FiniteSet::from_rationals(ints.into_iter().map(|x| BigRat::from_integer(x.into())))
        } else {
            let mut vals = Vec::new();
            for part in spec.split(',') {
                match parse_rat(part.trim()) {
                    Ok(r) => vals.push(r),
                    Err(e) => {
                        self.err(format!("{key}: {e}"));
                        return None;
                    }
                }
            }
            FiniteSet::from_rationals(vals)
        };
        if set.is_empty() {
            self.err(format!("{key}: set is empty"));
            return None;
        }
        Some(set)
    }

    /// Builds the group action from the `[action]` section.
    fn action(&mut self) -> Option<GroupAction> {
        let kind = self.take_req("action.kind")?;
        let ak = match kind.as_str() {
            "cyclic" => ActionKind::CyclicAdd(self.req_u64("action.modulus")?),
            "agl1" => ActionKind::Agl1(self.req_u64("action.prime")?),
            "psl2" => ActionKind::Psl2(self.req_u64("action.prime")?),
            "perm" => {
                let rel = self.take_req("action.table_file")?;
                let text = self.read_file("action.table_file", &rel)?;
                ActionKind::Perm(text)
            }
            other => {
                self.err(format!(
                    "action.kind: unknown action kind `{other}` (expected cyclic, agl1, psl2, perm)"
                ));
                return None;
            }
        };
        match make_action(ak) {
            Ok(act) => Some(act),
            Err(e) => {
                self.err(format!("action: {e}"));
                None
            }
        }
    }

    /// Parses an already-taken group-side subset spec: `all`, `file:<path>`
    /// (element lines), or — for cyclic actions only — residues as an
    /// integer range/list.
    fn group_subset(&mut self, key: &str, act: &GroupAction, spec: &str) -> Option<ActionSubset> {
        let built = if spec == "all" {
            ActionSubset::group(act, act.elements())
        } else if let Some(rel) = spec.strip_prefix("file:") {
            let text = self.read_file(key, rel.trim())?;
            ActionSubset::parse_group(act, &text)
        } else if let GroupAction::CyclicAdd { n } = act {
            let ints = self.int_list(key, spec)?;
            let n = *n;
            ActionSubset::group(act, ints.into_iter().map(|x| GroupElem::Cyclic(x % n)))
        } else {
            self.err(format!(
                "{key}: use `all` or `file:<path>` for {} subsets",
                act.name()
            ));
            return None;
        };
        match built {
            Ok(s) => Some(s),
            Err(e) => {
                self.err(format!("{key}: {e}"));
                None
            }
        }
    }

    /// Point-side counterpart of [`Ctx::group_subset`].
    fn point_subset(&mut self, key: &str, act: &GroupAction, spec: &str) -> Option<ActionSubset> {
        let built = if spec == "all" {
            ActionSubset::points(act, act.points())
        } else if let Some(rel) = spec.strip_prefix("file:") {
            let text = self.read_file(key, rel.trim())?;
            ActionSubset::parse_points(act, &text)
        } else if let GroupAction::CyclicAdd { n } = act {
            let ints = self.int_list(key, spec)?;
            let n = *n;
            ActionSubset::points(act, ints.into_iter().map(|x| PointElem::Cyclic(x % n)))
        } else {
            self.err(format!(
                "{key}: use `all` or `file:<path>` for {} subsets",
                act.name()
            ));
            return None;
        };
        match built {
            Ok(s) => Some(s),
            Err(e) => {
                self.err(format!("{key}: {e}"));
                None
            }
        }
    }

    /// Polynomial source text for `<section>.<stem>` / `<section>.<stem>_file`
    /// (inline text uses `;` as a line separator). Returns `None` without an
    /// error when neither spelling is present.
    fn poly_text(&mut self, section: &str, stem: &str) -> Option<String> {
        let inline_key = format!("{section}.{stem}");
        let file_key = format!("{section}.{stem}_file");
        let inline = self.take(&inline_key);
        let file = self.take(&file_key);
        match (inline, file) {
            (Some(text), None) => Some(text.replace(';', "\n")),
            (None, Some(rel)) => self.read_file(&file_key, &rel),
            (Some(_), Some(_)) => {
                self.err(format!(
                    "{inline_key}: give exactly one of {inline_key} or {file_key}"
                ));
                None
            }
            (None, None) => None,
        }
    }

    /// Like [`Ctx::poly_text`] but records an error when absent entirely.
    fn poly_text_req(&mut self, section: &str, stem: &str) -> Option<String> {
        let present =
            self.has(&format!("{section}.{stem}")) || self.has(&format!("{section}.{stem}_file"));
        if !present {
            self.err(format!(
                "missing input: give {section}.{stem} or {section}.{stem}_file"
            ));
            return None;
        }
        self.poly_text(section, stem)
    }

    /// The shared numeric parameter block, defaults filled in.
    fn bound_params(&mut self) -> BoundParams {
        let mut p = BoundParams::default();
        if let Some(v) = self.take_f64("params.eps") {
            p.eps = v;
        }
        if let Some(v) = self.take_f64("params.eta") {
            p.eta = v;
        }
        if let Some(v) = self.take_f64("params.eta0") {
            p.eta0 = v;
        }
        if let Some(v) = self.take_f64("params.delta") {
            p.delta = v;
        }
        if let Some(v) = self.take_f64("params.gamma") {
            p.gamma = v;
        }
        if let Some(v) = self.take_f64("params.gamma_prime") {
            p.gamma_prime = v;
        }
        if let Some(v) = self.take_u64("params.k") {
            p.k = v;
        }
        if let Some(v) = self.take_u64("params.n") {
            p.n = v;
        }
        if let Some(v) = self.take_u64("params.cap_m") {
            p.cap_m = v;
        }
        if let Some(v) = self.take_u64("params.m") {
            p.m = v;
        }
        if let Some(v) = self.take_f64("params.r") {
            p.r = v;
        }
        if let Some(v) = self.take_f64("params.t") {
            p.t = v;
        }
        if let Some(v) = self.take_f64("params.c") {
            p.c = v;
        }
        if let Some(v) = self.take_f64("params.c_prime") {
            p.c_prime = v;
        }
        p
    }

    /// Reports every key never consumed by the scenario builder.
    fn report_unknown_keys(&mut self, kind: &str) {
        let unknown: Vec<String> = self
            .raw
            .entries
            .iter()
            .filter(|(_, e)| !e.used)
            .map(|(k, e)| format!("unknown key `{k}` (line {}) for scenario `{kind}`", e.line))
            .collect();
        self.errors.extend(unknown);
    }
}

fn parse_u64_list(spec: &str) -> Result<Vec<u64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty list".into());
    }
    if let Some((lo_s, rest)) = spec.split_once("..") {
        let (hi_s, inclusive) = match rest.strip_prefix('=') {
            Some(h) => (h, true),
            None => (rest, false),
        };
        let lo: u64 = lo_s
            .trim()
            .parse()
            .map_err(|_| format!("bad range start `{lo_s}`"))?;
        let hi: u64 = hi_s
            .trim()
            .parse()
            .map_err(|_| format!("bad range end `{hi_s}`"))?;
        let upper = if inclusive {
            hi.checked_add(1).ok_or("range end overflows")?
        } else {
            hi
        };
        if upper <= lo {
            return Err(format!("empty range `{spec}`"));
        }
        if upper - lo > MAX_LIST {
            return Err(format!("range `{spec}` exceeds {MAX_LIST} values"));
        }
        Ok((lo..upper).collect())
    } else {
        let mut out = Vec::new();
        for part in spec.split(',') {
            let x: u64 = part
                .trim()
                .parse()
                .map_err(|_| format!("bad integer `{}`", part.trim()))?;
            out.push(x);
        }
        if out.len() as u64 > MAX_LIST {
            return Err(format!("list exceeds {MAX_LIST} values"));
        }
        Ok(out)
    }
}

/// Validates config text and materializes the experiment. All errors in the
/// file are returned together; file references are resolved against
/// `base_dir` (normally the config file's directory).
pub fn validate_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig, Vec<String>> {
    let raw = RawConfig::parse(text)?;
    let mut ctx = Ctx {
        raw,
        base_dir,
        errors: Vec::new(),
    };

    let kind_raw = ctx.take_req("experiment.kind");
    let kind: Option<&'static str> = match kind_raw.as_deref() {
        Some(k) => {
            let hit = SCENARIO_KINDS.iter().find(|s| **s == k).copied();
            if hit.is_none() {
                ctx.err(format!(
                    "experiment.kind: unknown scenario kind `{k}` (expected one of {})",
                    SCENARIO_KINDS.join(", ")
                ));
            }
            hit
        }
        None => None,
    };

    let label = match ctx.take("experiment.label") {
        Some(l) => {
            if l.contains(',') || l.contains('"') || l.contains('/') {
                ctx.err("experiment.label: must not contain commas, quotes, or slashes");
            }
            if l.is_empty() {
                ctx.err("experiment.label: must not be empty");
            }
            l
        }
        None => kind.unwrap_or("experiment").to_string(),
    };

    let seed = ctx.take_u64("params.seed");
    let xi = ctx.take_f64("params.xi");
    if let Some(x) = xi {
        if x <= 1.0 {
            ctx.err("params.xi: xi must be > 1");
        }
    }
    let delta_given = ctx.has("params.delta");
    let params = ctx.bound_params();
    if let Err(e) = params.validate() {
        ctx.err(format!("params: {e}"));
    }

    let scenario = kind.and_then(|k| build_scenario(k, &mut ctx, &params, delta_given));

    if let Some(k) = kind {
        ctx.report_unknown_keys(k);
    }

    match (scenario, ctx.errors.is_empty()) {
        (Some(scenario), true) => Ok(ExperimentConfig {
            kind: kind.expect("scenario implies kind"),
            label,
            seed,
            params,
            xi,
            scenario,
        }),
        _ => Err(ctx.errors),
    }
}

fn build_scenario(
    kind: &'static str,
    ctx: &mut Ctx<'_>,
    params: &BoundParams,
    delta_given: bool,
) -> Option<Scenario> {
    match kind {
        "measure" => build_measure(ctx),
        "classify" => {
            let text = ctx.poly_text_req("input", "family");
            let family =
                text.as_ref()
                    .and_then(|t| match parse_family(t).and_then(PolyFamily::new) {
                        Ok(f) => Some(f),
                        Err(e) => {
                            ctx.err(format!("input.family: {e}"));
                            None
                        }
                    });
            let eps = params.eps;
            if !(eps > 0.0 && eps < 1.0) {
                ctx.err("params.eps: eps must be in (0,1)");
                return None;
            }
            Some(Scenario::Classify {
                text: text?,
                family: family?,
                eps,
            })
        }
        "decompose" => {
            let text = ctx.poly_text_req("input", "poly")?;
            match parse_uni(&text) {
                Ok(poly) => Some(Scenario::Decompose { text, poly }),
                Err(e) => {
                    ctx.err(format!("input.poly: {e}"));
                    None
                }
            }
        }
        "incidence" => build_incidence(ctx),
        "construct" => build_construct(ctx),
        "span" => build_span(ctx),
        "tower" => {
            let spec = ctx.take_req("tower.n_values")?;
            let vals = ctx.int_list("tower.n_values", &spec)?;
            let mut out = Vec::new();
            for v in vals {
                if v < 1 || v > u32::MAX as u64 {
                    ctx.err(format!("tower.n_values: n must be >= 1, got {v}"));
                    return None;
                }
                out.push(v as u32);
            }
            Some(Scenario::Tower { n_values: out })
        }
        "bsg" => {
            let action = ctx.action();
            let s_spec = ctx.take_req("subsets.s");
            let a_spec = ctx.take_req("subsets.a");
            if !delta_given {
                ctx.err("params.delta is required for bsg (certificate exponent to verify)");
            }
            let delta = params.delta;
            if delta < 0.0 {
                ctx.err("params.delta: must be >= 0");
            }
            let cover_k = ctx.take_u64("params.cover_k").unwrap_or(3);
            if cover_k < 1 {
                ctx.err("params.cover_k: must be >= 1");
            }
            let action = action?;
            let s = s_spec.and_then(|sp| ctx.group_subset("subsets.s", &action, &sp));
            let a = a_spec.and_then(|sp| ctx.point_subset("subsets.a", &action, &sp));
            if !delta_given || delta < 0.0 || cover_k < 1 {
                return None;
            }
            Some(Scenario::Bsg {
                s: s?,
                a: a?,
                action,
                delta,
                cover_k,
            })
        }
        "stab" => {
            let action = ctx.action();
            let w_spec = ctx.take_req("subsets.w");
            let a_spec = ctx.take_req("subsets.a");
            let tuple_len = ctx.req_u64("stab.tuple_len");
            if tuple_len == Some(0) {
                ctx.err("stab.tuple_len: must be >= 1");
            }
            let budget = ctx.take_u64("stab.budget").unwrap_or(DEFAULT_STAB_BUDGET);
            let action = action?;
            let w = w_spec.and_then(|sp| ctx.group_subset("subsets.w", &action, &sp));
            let a = a_spec.and_then(|sp| ctx.point_subset("subsets.a", &action, &sp));
            let tuple_len = tuple_len.filter(|t| *t >= 1)?;
            Some(Scenario::Stab {
                w: w?,
                a: a?,
                action,
                tuple_len,
                budget,
            })
        }
        "bounds" => {
            let mut ok = true;
            if !(params.eps > 0.0 && params.eps <= 1.0) {
                ctx.err("params.eps: eps must be in (0,1] for bounds");
                ok = false;
            }
            if !(params.c > 0.0 && params.c <= 1.0) {
                ctx.err("params.c: c must be in (0,1] for bounds");
                ok = false;
            }
            if params.m < 1 {
                ctx.err("params.m: must be >= 1");
                ok = false;
            }
            if params.k < 1 {
                ctx.err("params.k: must be >= 1");
                ok = false;
            }
            if params.gamma <= 0.0 {
                ctx.err("params.gamma: must be > 0");
                ok = false;
            }
            if params.gamma_prime <= 0.0 {
                ctx.err("params.gamma_prime: must be > 0");
                ok = false;
            }
            if params.r <= 0.0 {
                ctx.err("params.r: must be > 0");
                ok = false;
            }
            if ok {
                Some(Scenario::Bounds)
            } else {
                None
            }
        }
        _ => unreachable!("kind checked by caller"),
    }
}

fn build_measure(ctx: &mut Ctx<'_>) -> Option<Scenario> {
    let poly_text = ctx.poly_text("input", "poly");
    let fam_text = ctx.poly_text("input", "family");
    let input = match (poly_text, fam_text) {
        (Some(_), Some(_)) => {
            ctx.err("input: give either a poly or a family, not both");
            None
        }
        (Some(text), None) => match parse_measure_poly(&text) {
            Ok(poly) => Some(MeasureInput::Multi { text, poly }),
            Err(e) => {
                ctx.err(format!("input.poly: {e}"));
                None
            }
        },
        (None, Some(text)) => match parse_family(&text).and_then(PolyFamily::new) {
            Ok(family) => Some(MeasureInput::Family { text, family }),
            Err(e) => {
                ctx.err(format!("input.family: {e}"));
                None
            }
        },
        (None, None) => {
            // Only complain when nothing was attempted at all; conflicting
            // *_file spellings already produced their own errors above.
            if !ctx.errors.iter().any(|e| e.starts_with("input.")) {
                ctx.err(
                    "missing input: give one of input.family, input.family_file, \
                     input.poly, input.poly_file",
                );
            }
            None
        }
    };
    let n_values = match ctx.take_req("sets.n_values") {
        Some(spec) => ctx.int_list("sets.n_values", &spec).and_then(|vals| {
            for v in &vals {
                if *v < 1 || *v > MAX_LIST {
                    ctx.err(format!(
                        "sets.n_values: n must be in 1..={MAX_LIST}, got {v}"
                    ));
                    return None;
                }
            }
            Some(vals)
        }),
        None => None,
    };
    let start = ctx.take_i64("sets.start").unwrap_or(1);
    Some(Scenario::Measure {
        input: input?,
        n_values: n_values?,
        start,
    })
}

/// Parses a measure polynomial, inferring the arity from the variables used:
/// `x` plus the highest `y<k>` index present.
fn parse_measure_poly(text: &str) -> Result<MultiPoly, String> {
    let bytes = text.as_bytes();
    let mut max_y: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch == 'y' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                let idx: usize = text[i + 1..j]
                    .parse()
                    .map_err(|_| "unreadable y-variable index".to_string())?;
                max_y = Some(max_y.map_or(idx, |m| m.max(idx)));
            }
        }
    }
    let arity = match max_y {
        Some(m) => m + 2,
        None => return Err("measure polynomials need at least variables x and y0".into()),
    };
    parse_poly(text, arity).map_err(|e| e.to_string())
}

fn build_incidence(ctx: &mut Ctx<'_>) -> Option<Scenario> {
    let mode = ctx.take_req("surface.mode");
    let implicit = match mode.as_deref() {
        Some("implicit") => Some(true),
        Some("graph") => Some(false),
        Some(other) => {
            ctx.err(format!(
                "surface.mode: expected `implicit` or `graph`, got `{other}`"
            ));
            None
        }
        None => None,
    };
    let text = ctx.poly_text_req("surface", "poly");
    let a = ctx.rational_set("sets.a");
    let d = ctx.rational_set("sets.d");
    let b = ctx.rational_set("sets.b");
    let implicit = implicit?;
    let text = text?;
    let surface = match parse_surface_poly(&text, implicit) {
        Ok(p) => {
            let made = if implicit {
                SurfaceSpec::implicit(p)
            } else {
                SurfaceSpec::graph(p)
            };
            match made {
                Ok(s) => Some(s),
                Err(e) => {
                    ctx.err(format!("surface.poly: {e}"));
                    None
                }
            }
        }
        Err(e) => {
            ctx.err(format!("surface.poly: {e}"));
            None
        }
    };
    Some(Scenario::Incidence {
        implicit,
        text,
        surface: surface?,
        a: a?,
        d: d?,
        b: b?,
    })
}

fn build_span(ctx: &mut Ctx<'_>) -> Option<Scenario> {
    let big_n = ctx.req_u64("span.big_n");
    if let Some(n) = big_n {
        if n < 4 {
            ctx.err("span.big_n: must be >= 4");
        }
    }
    let k_values = match ctx.take_req("span.k_values") {
        Some(spec) => ctx.int_list("span.k_values", &spec).and_then(|vals| {
            let mut out = Vec::new();
            for v in vals {
                if v < 1 || v > u32::MAX as u64 {
                    ctx.err(format!("span.k_values: k must be >= 1, got {v}"));
                    return None;
                }
                out.push(v as u32);
            }
            Some(out)
        }),
        None => None,
    };
    let budget = ctx.take_u64("span.budget").unwrap_or(DEFAULT_SPAN_BUDGET);
    let big_n = big_n.filter(|n| *n >= 4)?;
    Some(Scenario::Span {
        big_n,
        k_values: k_values?,
        budget,
    })
}

fn build_construct(ctx: &mut Ctx<'_>) -> Option<Scenario> {
    let kind = ctx.take_req("construct.kind")?;
    let spec = match kind.as_str() {
        "ap" => {
            let start = ctx.take_rat("construct.start");
            let step = ctx.take_rat("construct.step");
            let count = ctx.req_u64("construct.count");
            let (start, step, count) = (start?, step?, count?);
            if !(1..=MAX_LIST).contains(&count) {
                ctx.err(format!("construct.count: must be in 1..={MAX_LIST}"));
                return None;
            }
            if step == BigRat::from_integer(0.into()) {
                ctx.err("construct.step: progression step must be nonzero");
                return None;
            }
            ConstructSpec::Ap { start, step, count }
        }
        "gp" => {
            let start = ctx.take_rat("construct.start");
            let ratio = ctx.take_rat("construct.ratio");
            let count = ctx.req_u64("construct.count");
            let (start, ratio, count) = (start?, ratio?, count?);
            if !(1..=MAX_LIST).contains(&count) {
                ctx.err(format!("construct.count: must be in 1..={MAX_LIST}"));
                return None;
            }
            let zero = BigRat::from_integer(0.into());
            let one = BigRat::from_integer(1.into());
            let minus_one = BigRat::from_integer((-1).into());
            if start == zero {
                ctx.err("construct.start: geometric start must be nonzero");
                return None;
            }
            if ratio == zero || ratio == one || ratio == minus_one {
                ctx.err("construct.ratio: geometric ratio must avoid 0, 1 and -1");
                return None;
            }
            ConstructSpec::Gp {
                start,
                ratio,
                count,
            }
        }
        "family" => {
            let fk = ctx.take_req("construct.family_kind");
            let fam_kind = match fk.as_deref() {
                Some("additive") => Some(CompositeKind::Additive),
                Some("multiplicative") => Some(CompositeKind::Multiplicative),
                Some(other) => {
                    ctx.err(format!(
                        "construct.family_kind: expected `additive` or `multiplicative`, got `{other}`"
                    ));
                    None
                }
                None => None,
            };
            let g = ctx
                .take_req("construct.g")
                .and_then(|t| match parse_uni(&t) {
                    Ok(p) => Some(p),
                    Err(e) => {
                        ctx.err(format!("construct.g: {e}"));
                        None
                    }
                });
            let h = ctx
                .take_req("construct.h")
                .and_then(|t| match parse_uni(&t) {
                    Ok(p) => Some(p),
                    Err(e) => {
                        ctx.err(format!("construct.h: {e}"));
                        None
                    }
                });
            let pset = ctx.rational_set("construct.params");
            let (fam_kind, g, h, pset) = (fam_kind?, g?, h?, pset?);
            if g.is_constant() || h.is_constant() {
                ctx.err("construct.g: g and h must both be nonconstant");
                return None;
            }
            if fam_kind == CompositeKind::Multiplicative {
                let zero = BigRat::from_integer(0.into());
                let has_zero = pset
                    .rationals()
                    .map(|rs| rs.iter().any(|r| **r == zero))
                    .unwrap_or(false);
                if has_zero {
                    ctx.err(
                        "construct.params: scaling parameter 0 would produce a constant member",
                    );
                    return None;
                }
            }
            ConstructSpec::Family {
                kind: fam_kind,
                g,
                h,
                params: pset,
            }
        }
        "span" => {
            let big_n = ctx.req_u64("construct.big_n")?;
            if big_n < 4 {
                ctx.err("construct.big_n: must be >= 4");
                return None;
            }
            ConstructSpec::Span { big_n }
        }
        other => {
            ctx.err(format!(
                "construct.kind: unknown construction `{other}` (expected ap, gp, family, span)"
            ));
            return None;
        }
    };
    Some(Scenario::Construct(spec))
}
