//! Scenario execution: turns a validated [`ExperimentConfig`] into a
//! [`CsvReport`] plus a human-readable summary, or a typed error for the
//! exit-code mapping (budget vs. internal invariant).

use polylab_core::constructions::{
    gen_ap, gen_counterexample, gen_gp, gen_span, gen_structured_family, span_iterated_sumset,
    ConstructionError,
};
use polylab_core::exactnum::{format_rat, BigRat};
use polylab_core::expansion::{
    coarse_dim, delta_jz, eta0_main1d, eta_unbalanced_er, fit_exponent, image_size,
    image_size_multi, incidence_surface, FiniteSet,
};
use polylab_core::groupaction::{
    bsg_extract, stab_count, verify_approx_subgroup, verify_bsg, GroupError,
};
use polylab_core::polyalg::{classify_family, decompose_uni, eps_structured, CompositeKind};

use crate::config::{ConstructSpec, ExperimentConfig, MeasureInput, Scenario};
use crate::report::{fmt_f64, CsvReport, CsvRow};

/// Options supplied on the command line rather than in the config file. The
/// seed overrides the config's `params.seed`; it is recorded in the summary
/// as the single randomness source (current scenarios are deterministic and
/// draw nothing from it).
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
}

/// Run failure categories, mapped to exit codes by the binary: budget
/// overruns exit 3, internal invariant violations exit 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    Budget(String),
    Internal(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Budget(m) => write!(f, "budget exceeded: {m}"),
            RunError::Internal(m) => write!(f, "internal invariant violation: {m}"),
        }
    }
}

/// A finished run: the CSV report (already finalized) and summary lines.
pub struct RunOutcome {
    pub report: CsvReport,
    pub summary: Vec<String>,
}

fn internal(e: impl std::fmt::Display) -> RunError {
    RunError::Internal(e.to_string())
}

fn from_construction(e: ConstructionError) -> RunError {
    match e {
        ConstructionError::BudgetExceeded { .. } => RunError::Budget(e.to_string()),
        other => RunError::Internal(other.to_string()),
    }
}

fn from_group(e: GroupError) -> RunError {
    match e {
        GroupError::BudgetExceeded { .. } => RunError::Budget(e.to_string()),
        other => RunError::Internal(other.to_string()),
    }
}

fn effective_seed(cfg: &ExperimentConfig, opts: &RunOptions) -> u64 {
    opts.seed.or(cfg.seed).unwrap_or(0)
}

fn xi_note(cfg: &ExperimentConfig, default_desc: &str) -> String {
    match cfg.xi {
        Some(x) => fmt_f64(x),
        None => default_desc.to_string(),
    }
}

/// The constants line every summary carries: no reported bound or dimension
/// is interpretable without c, c', and the scale xi in force.
fn constants_line(cfg: &ExperimentConfig, xi_desc: &str) -> String {
    format!(
        "constants: c = {}, c_prime = {}, xi = {}",
        fmt_f64(cfg.params.c),
        fmt_f64(cfg.params.c_prime),
        xi_desc
    )
}

fn prologue(cfg: &ExperimentConfig, opts: &RunOptions, xi_desc: &str) -> Vec<String> {
    vec![
        format!("scenario: {}", cfg.kind),
        format!("label: {}", cfg.label),
        constants_line(cfg, xi_desc),
        format!(
            "seed: {} (single randomness source; current scenarios are deterministic)",
            effective_seed(cfg, opts)
        ),
    ]
}

/// Executes the scenario and assembles the deterministic report. Rows are
/// computed with exact arithmetic; any parallel reductions are over exact
/// integers, so results do not depend on thread count.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let mut report = CsvReport::new();
    let mut summary;
    match &cfg.scenario {
        Scenario::Measure {
            input,
            n_values,
            start,
        } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "per-row n"));
            summary.push(match input {
                MeasureInput::Family { text, family } => {
                    format!("input: family of {} ({})", family.len(), brief(text))
                }
                MeasureInput::Multi { text, poly } => {
                    format!(
                        "input: polynomial in {} variables ({})",
                        poly.arity(),
                        brief(text)
                    )
                }
            });
            let mut points: Vec<(u64, u64)> = Vec::new();
            for &n in n_values {
                let a = range_set(*start, n);
                let img = match input {
                    MeasureInput::Family { family, .. } => {
                        image_size(family, &a).map_err(internal)?
                    }
                    MeasureInput::Multi { poly, .. } => {
                        let bs = vec![&a; poly.arity() - 1];
                        image_size_multi(poly, &a, &bs).map_err(internal)?
                    }
                };
                points.push((n, img));
                let scale = cfg.xi.unwrap_or(n as f64);
                let dim = dim_at(img as u128, scale);
                report.push(CsvRow {
                    scenario: cfg.kind.into(),
                    label: cfg.label.clone(),
                    n: Some(n as u128),
                    f_count: Some(match input {
                        MeasureInput::Family { family, .. } => family.len() as u64,
                        MeasureInput::Multi { .. } => 1,
                    }),
                    image: Some(img as u128),
                    incidence: None,
                    log_scale: dim.as_ref().map(|d| d.0),
                    coarse_dim: dim.as_ref().map(|d| d.1),
                    slope: None,
                    residual: None,
                });
                summary.push(format!("n = {n}: image = {img}"));
            }
            match fit_exponent(&points) {
                Ok(fit) => {
                    for row in report.rows_mut() {
                        row.slope = Some(fit.slope);
                        row.residual = Some(fit.residual);
                    }
                    summary.push(format!(
                        "fit: slope = {}, intercept = {}, residual = {}",
                        fmt_f64(fit.slope),
                        fmt_f64(fit.intercept),
                        fmt_f64(fit.residual)
                    ));
                }
                Err(_) => summary.push("fit: n/a (needs two distinct scales)".into()),
            }
        }
        Scenario::Classify { text, family, eps } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            summary.push(format!(
                "family: {} members ({})",
                family.len(),
                brief(text)
            ));
            for (kind, suffix) in [
                (CompositeKind::Additive, "additive"),
                (CompositeKind::Multiplicative, "multiplicative"),
            ] {
                let classes = classify_family(family, kind);
                summary.push(format!("{suffix} classes: {}", classes.len()));
                for (idx, class) in classes.iter().enumerate() {
                    let cert_name = match kind {
                        CompositeKind::Additive => "shift",
                        CompositeKind::Multiplicative => "scale",
                    };
                    let members: Vec<String> = class
                        .members
                        .iter()
                        .map(|(i, s)| format!("#{i} ({cert_name} {})", format_rat(s)))
                        .collect();
                    summary.push(format!(
                        "  {suffix} class {}: outer = {}, inner = {}, members = [{}]",
                        idx + 1,
                        class.outer,
                        class.inner,
                        members.join(", ")
                    ));
                    report.push(CsvRow {
                        scenario: cfg.kind.into(),
                        label: format!("{}/{suffix}", cfg.label),
                        n: Some((idx + 1) as u128),
                        f_count: Some(class.members.len() as u64),
                        ..CsvRow::default()
                    });
                }
            }
            let verdict = eps_structured(family, *eps).map_err(internal)?;
            summary.push(format!(
                "eps_structured(eps = {}): additive = {}, multiplicative = {}",
                fmt_f64(*eps),
                verdict.eps_additive,
                verdict.eps_multiplicative
            ));
            if let Some(w) = &verdict.witness {
                summary.push(format!(
                    "witness class: outer = {}, inner = {}, size = {}",
                    w.outer,
                    w.inner,
                    w.members.len()
                ));
            }
        }
        Scenario::Decompose { text, poly } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            summary.push(format!(
                "poly: {} (degree {})",
                brief(text),
                poly.degree().unwrap_or(0)
            ));
            let splits = decompose_uni(poly);
            summary.push(format!("decompositions: {}", splits.len()));
            for dec in &splits {
                let r = dec.inner.degree().unwrap_or(0);
                summary.push(format!("  outer = {}, inner = {}", dec.outer, dec.inner));
                report.push(CsvRow {
                    scenario: cfg.kind.into(),
                    label: cfg.label.clone(),
                    n: Some(r as u128),
                    f_count: Some(splits.len() as u64),
                    ..CsvRow::default()
                });
            }
            if splits.is_empty() {
                summary.push("  (indecomposable over the rationals)".into());
            }
        }
        Scenario::Incidence {
            implicit,
            text,
            surface,
            a,
            d,
            b,
        } => {
            let default_scale = a.len() as f64;
            summary = prologue(cfg, opts, &xi_note(cfg, &fmt_f64(default_scale)));
            summary.push(format!(
                "surface: {} ({})",
                if *implicit { "implicit" } else { "graph" },
                brief(text)
            ));
            summary.push(format!(
                "|A| = {}, |D| = {}, |B| = {}",
                a.len(),
                d.len(),
                b.len()
            ));
            let count = incidence_surface(surface, a, d, b).map_err(internal)?;
            let scale = cfg.xi.unwrap_or(default_scale);
            let dim = dim_at(count as u128, scale);
            summary.push(format!("incidences: {count}"));
            report.push(CsvRow {
                scenario: cfg.kind.into(),
                label: cfg.label.clone(),
                n: Some(a.len() as u128),
                f_count: Some(d.len() as u64),
                incidence: Some(count),
                log_scale: dim.as_ref().map(|d| d.0),
                coarse_dim: dim.as_ref().map(|d| d.1),
                ..CsvRow::default()
            });
        }
        Scenario::Construct(spec) => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            run_construct(cfg, spec, &mut report, &mut summary)?;
        }
        Scenario::Span {
            big_n,
            k_values,
            budget,
        } => {
            summary = prologue(cfg, opts, &xi_note(cfg, &format!("N = {big_n}")));
            let inst = gen_span(*big_n).map_err(from_construction)?;
            summary.push(inst.description.clone());
            summary.push(format!(
                "levels = {}, |S_N| = {}, budget = {budget}",
                inst.levels,
                inst.s_n.len()
            ));
            for &k in k_values {
                let (count, base_dim) =
                    span_iterated_sumset(&inst, k, *budget).map_err(from_construction)?;
                let (scale, dim) = match cfg.xi {
                    Some(x) => {
                        let d = coarse_dim(count, x).map_err(internal)?;
                        (x, d.value)
                    }
                    None => (base_dim.scale, base_dim.value),
                };
                summary.push(format!(
                    "k = {k}: |kS| = {count}, coarse_dim at {} = {}",
                    fmt_f64(scale),
                    fmt_f64(dim)
                ));
                report.push(CsvRow {
                    scenario: cfg.kind.into(),
                    label: cfg.label.clone(),
                    n: Some(k as u128),
                    f_count: Some(inst.s_n.len() as u64),
                    image: Some(count),
                    log_scale: Some(scale.ln()),
                    coarse_dim: Some(dim),
                    ..CsvRow::default()
                });
            }
        }
        Scenario::Tower { n_values } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            for &n in n_values {
                let inst = gen_counterexample(n);
                let img = inst.image_size();
                if n <= 4 {
                    let dense = inst.image_size_bigint().map_err(internal)?;
                    if dense != img {
                        return Err(RunError::Internal(format!(
                            "tower cross-check failed at n = {n}: big-integer image {dense} \
                             vs tower-exponent image {img}"
                        )));
                    }
                }
                report.push(CsvRow {
                    scenario: cfg.kind.into(),
                    label: cfg.label.clone(),
                    n: Some(n as u128),
                    f_count: Some(n as u64),
                    image: Some(img as u128),
                    ..CsvRow::default()
                });
            }
            summary.push(format!(
                "instances: {} (big-integer cross-check on n <= 4)",
                n_values.len()
            ));
        }
        Scenario::Bsg {
            action,
            s,
            a,
            delta,
            cover_k,
        } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            summary.push(format!(
                "action: {}, |S| = {}, |A| = {}",
                action.name(),
                s.len(),
                a.len()
            ));
            let result = bsg_extract(action, s, a, &cfg.params).map_err(from_group)?;
            let stats = &result.stats;
            summary.push(format!(
                "extractor: h = {}, m = {}, quantile = {}, delta_min = {}",
                result.h,
                result.m_used,
                fmt_f64(result.quantile_used),
                fmt_f64(result.delta_min)
            ));
            summary.push(format!(
                "sets: |H| = {}, |T| = {}, |H n hS| = {}, |H*T| = {}, incidences = {}",
                stats.h_size, stats.t_size, stats.h_cap_hs, stats.ht_size, stats.incidences
            ));
            let check = verify_bsg(action, &result, a, s, *delta, cfg.params.n, cfg.params.t);
            summary.push(format!(
                "verify_bsg(delta = {}, n = {}, t = {}): {}",
                fmt_f64(*delta),
                cfg.params.n,
                fmt_f64(cfg.params.t),
                pass_str(check.pass)
            ));
            for c in &check.checks {
                summary.push(format!(
                    "  {}: lhs = {}, rhs = {}, ok = {}",
                    c.name,
                    fmt_f64(c.lhs),
                    fmt_f64(c.rhs),
                    c.ok
                ));
            }
            let cert =
                verify_approx_subgroup(action, &result.h_set, *cover_k).map_err(from_group)?;
            match &cert.cover {
                Some(cover) => {
                    let elems: Vec<String> = cover.iter().map(|g| g.to_string()).collect();
                    summary.push(format!(
                        "approx subgroup (K = {cover_k}): pass (symmetric = {}, identity = {}, \
                         cover size = {}: [{}])",
                        cert.symmetric,
                        cert.has_identity,
                        cover.len(),
                        elems.join("; ")
                    ));
                }
                None => summary.push(format!(
                    "approx subgroup (K = {cover_k}): FAIL (symmetric = {}, identity = {}, \
                     no cover within budget)",
                    cert.symmetric, cert.has_identity
                )),
            }
            report.push(CsvRow {
                scenario: cfg.kind.into(),
                label: cfg.label.clone(),
                n: Some(a.len() as u128),
                f_count: Some(s.len() as u64),
                image: Some(stats.ht_size as u128),
                incidence: Some(stats.incidences),
                ..CsvRow::default()
            });
        }
        Scenario::Stab {
            action,
            w,
            a,
            tuple_len,
            budget,
        } => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            summary.push(format!(
                "action: {}, |W| = {}, |A| = {}, tuple length = {tuple_len}, budget = {budget}",
                action.name(),
                w.len(),
                a.len()
            ));
            let rep = stab_count(action, w, a, *tuple_len, *budget).map_err(from_group)?;
            summary.push(format!(
                "tuples = {}, with nontrivial stabilizer = {}",
                rep.tuples, rep.nontrivial
            ));
            for (size, count) in &rep.histogram {
                summary.push(format!("  stabilizer size {size}: {count} tuples"));
            }
            report.push(CsvRow {
                scenario: cfg.kind.into(),
                label: cfg.label.clone(),
                n: Some(*tuple_len as u128),
                f_count: Some(w.len() as u64),
                incidence: Some(rep.nontrivial),
                ..CsvRow::default()
            });
        }
        Scenario::Bounds => {
            summary = prologue(cfg, opts, &xi_note(cfg, "n/a"));
            let p = &cfg.params;
            summary.push(format!(
                "inputs: eps = {}, m = {}, k = {}, n = {}, r = {}, t = {}, gamma = {}, \
                 gamma_prime = {}",
                fmt_f64(p.eps),
                p.m,
                p.k,
                p.n,
                fmt_f64(p.r),
                fmt_f64(p.t),
                fmt_f64(p.gamma),
                fmt_f64(p.gamma_prime)
            ));
            let dj = delta_jz(p).map_err(internal)?;
            let e0 = eta0_main1d(p.eps, p.c);
            let eu = eta_unbalanced_er(p.m, p.eps, p.c_prime);
            for (name, value) in [
                ("delta_jz", dj),
                ("eta0_main1d", e0),
                ("eta_unbalanced", eu),
            ] {
                summary.push(format!("{name} = {}", fmt_f64(value)));
                report.push(CsvRow {
                    scenario: cfg.kind.into(),
                    label: format!("{}/{name}", cfg.label),
                    slope: Some(value),
                    ..CsvRow::default()
                });
            }
            summary.push("values are reported in the `slope` CSV column".into());
        }
    }
    report.finalize();
    summary.push(format!("rows: {}", report.rows().len()));
    Ok(RunOutcome { report, summary })
}

fn run_construct(
    cfg: &ExperimentConfig,
    spec: &ConstructSpec,
    report: &mut CsvReport,
    summary: &mut Vec<String>,
) -> Result<(), RunError> {
    let base = CsvRow {
        scenario: cfg.kind.into(),
        label: cfg.label.clone(),
        ..CsvRow::default()
    };
    match spec {
        ConstructSpec::Ap { start, step, count } => {
            let set = gen_ap(start, step, *count).map_err(from_construction)?;
            summary.push(format!(
                "arithmetic progression: start = {}, step = {}, count = {count}",
                format_rat(start),
                format_rat(step)
            ));
            summary.push(format!("distinct elements: {}", set.len()));
            push_set_preview(summary, &set);
            report.push(CsvRow {
                n: Some(*count as u128),
                image: Some(set.len() as u128),
                ..base
            });
        }
        ConstructSpec::Gp {
            start,
            ratio,
            count,
        } => {
            let set = gen_gp(start, ratio, *count).map_err(from_construction)?;
            summary.push(format!(
                "geometric progression: start = {}, ratio = {}, count = {count}",
                format_rat(start),
                format_rat(ratio)
            ));
            summary.push(format!("distinct elements: {}", set.len()));
            push_set_preview(summary, &set);
            report.push(CsvRow {
                n: Some(*count as u128),
                image: Some(set.len() as u128),
                ..base
            });
        }
        ConstructSpec::Family { kind, g, h, params } => {
            let fam = gen_structured_family(*kind, g, h, params).map_err(from_construction)?;
            summary.push(format!(
                "structured family ({}): g = {g}, h = {h}, parameters = {}",
                match kind {
                    CompositeKind::Additive => "additive",
                    CompositeKind::Multiplicative => "multiplicative",
                },
                params.len()
            ));
            summary.push(format!("members: {}", fam.len()));
            for member in fam.members().iter().take(PREVIEW) {
                summary.push(format!("  {member}"));
            }
            if fam.len() > PREVIEW {
                summary.push(format!("  ... ({} more)", fam.len() - PREVIEW));
            }
            report.push(CsvRow {
                n: Some(params.len() as u128),
                f_count: Some(fam.len() as u64),
                ..base
            });
        }
        ConstructSpec::Span { big_n } => {
            let inst = gen_span(*big_n).map_err(from_construction)?;
            summary.push(inst.description.clone());
            summary.push(format!(
                "levels = {}, interval bounds = {:?}, |S_N| = {}",
                inst.levels,
                inst.interval_bounds,
                inst.s_n.len()
            ));
            report.push(CsvRow {
                n: Some(*big_n as u128),
                f_count: Some(inst.s_n.len() as u64),
                ..base
            });
        }
    }
    Ok(())
}

const PREVIEW: usize = 20;

fn push_set_preview(summary: &mut Vec<String>, set: &FiniteSet) {
    let sorted = set.sorted_elements();
    for e in sorted.iter().take(PREVIEW) {
        summary.push(format!("  {e}"));
    }
    if sorted.len() > PREVIEW {
        summary.push(format!("  ... ({} more)", sorted.len() - PREVIEW));
    }
}

/// `{start, start+1, ..., start+n-1}` as a rational set.
fn range_set(start: i64, n: u64) -> FiniteSet {
    FiniteSet::from_rationals((0..n as i64).map(|i| BigRat::from_integer((start + i).into())))
}

/// `(ln scale, coarse dimension)` when the scale admits one (`scale > 1`).
fn dim_at(size: u128, scale: f64) -> Option<(f64, f64)> {
    if scale > 1.0 && size >= 1 {
        coarse_dim(size, scale).ok().map(|d| (scale.ln(), d.value))
    } else {
        None
    }
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn brief(text: &str) -> String {
    let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if flat.chars().count() > 60 {
        let head: String = flat.chars().take(57).collect();
        format!("{head}...")
    } else {
        flat
    }
}

/// Describes what a run would do, without computing anything. Printed by
/// `--dry-run` after successful validation.
pub fn plan(cfg: &ExperimentConfig) -> Vec<String> {
    let mut out = vec![format!(
        "plan: scenario `{}`, label `{}`",
        cfg.kind, cfg.label
    )];
    match &cfg.scenario {
        Scenario::Measure {
            input,
            n_values,
            start,
        } => {
            out.push(match input {
                MeasureInput::Family { family, .. } => {
                    format!(
                        "  evaluate a family of {} over A = {{{start}..}}",
                        family.len()
                    )
                }
                MeasureInput::Multi { poly, .. } => format!(
                    "  evaluate a {}-variable polynomial over A = {{{start}..}}",
                    poly.arity()
                ),
            });
            out.push(format!(
                "  input scales: {} values of n; then fit the growth exponent",
                n_values.len()
            ));
            out.push(format!("  would write {} CSV rows", n_values.len()));
        }
        Scenario::Classify { family, eps, .. } => {
            out.push(format!(
                "  partition {} members into additive and multiplicative classes",
                family.len()
            ));
            out.push(format!(
                "  evaluate the eps-structure verdict at eps = {}",
                fmt_f64(*eps)
            ));
        }
        Scenario::Decompose { poly, .. } => {
            out.push(format!(
                "  enumerate complete decompositions of a degree-{} polynomial",
                poly.degree().unwrap_or(0)
            ));
        }
        Scenario::Incidence { a, d, b, .. } => {
            out.push(format!(
                "  count surface incidences over |A| = {}, |D| = {}, |B| = {}",
                a.len(),
                d.len(),
                b.len()
            ));
            out.push("  would write 1 CSV row".into());
        }
        Scenario::Construct(spec) => {
            out.push(match spec {
                ConstructSpec::Ap { count, .. } => {
                    format!("  generate an arithmetic progression of length {count}")
                }
                ConstructSpec::Gp { count, .. } => {
                    format!("  generate a geometric progression of length {count}")
                }
                ConstructSpec::Family { params, .. } => format!(
                    "  generate a structured family over {} parameters",
                    params.len()
                ),
                ConstructSpec::Span { big_n } => {
                    format!("  generate the span instance for N = {big_n}")
                }
            });
            out.push("  would write 1 CSV row".into());
        }
        Scenario::Span {
            big_n,
            k_values,
            budget,
        } => {
            out.push(format!(
                "  build the span instance for N = {big_n}, then count k-fold sumsets for \
                 {} values of k (budget {budget})",
                k_values.len()
            ));
            out.push(format!("  would write {} CSV rows", k_values.len()));
        }
        Scenario::Tower { n_values } => {
            out.push(format!(
                "  evaluate tower-family image sizes for {} values of n \
                 (big-integer cross-check on n <= 4)",
                n_values.len()
            ));
            out.push(format!("  would write {} CSV rows", n_values.len()));
        }
        Scenario::Bsg {
            s,
            a,
            delta,
            cover_k,
            ..
        } => {
            out.push(format!(
                "  extract an approximate-subgroup certificate from |S| = {}, |A| = {}",
                s.len(),
                a.len()
            ));
            out.push(format!(
                "  verify it at delta = {} and search a {cover_k}-translate cover",
                fmt_f64(*delta)
            ));
            out.push("  would write 1 CSV row".into());
        }
        Scenario::Stab {
            w,
            a,
            tuple_len,
            budget,
            ..
        } => {
            out.push(format!(
                "  enumerate {}^{tuple_len} tuples (budget {budget}) and count nontrivial \
                 stabilizers within |W| = {}",
                a.len(),
                w.len()
            ));
            out.push("  would write 1 CSV row".into());
        }
        Scenario::Bounds => {
            out.push("  evaluate delta_jz, eta0_main1d, eta_unbalanced from [params]".into());
            out.push("  would write 3 CSV rows".into());
        }
    }
    out.push("dry run: validated only; nothing was computed".into());
    out
}
