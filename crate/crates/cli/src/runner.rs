//! Job execution: build the system, run each requested analysis in declared
//! order, and assemble the report. Analyses are independent; a failure in
//! one becomes an error block and the rest still run.

use std::str::FromStr;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context, Result};

use skewflow_core::certificate::{Certificate, EnvelopeBound, SplitCertificate, Verdict};
use skewflow_core::corpus::{
    self, builtin, default_states, nuet_constants_report, random_triples, BuiltinName,
    BuiltinParams, CeVariant, StepSequenceCocycle,
};
use skewflow_core::criteria::{
    adjoint_criterion, datko_criterion, eis_certificate, es_certificate, estimate_exponent,
    fit_decay, fit_growth, instability_criterion, ExponentDirection, ExponentSearch,
};
use skewflow_core::spectra::{
    dichotomy_certificate, dichotomy_sum_criterion, four_from_three, four_projector_certificate,
    trichotomy_certificate, trichotomy_sum_criterion, FamilyKind, ProjectorFamily,
};
use skewflow_core::{
    ConstantProjector, Horizon, LinearOperator, MonotoneGauge, SkewEvolutionSystem,
    TranslationSemiflow, VerdictConfig,
};

use crate::job::{AnalysisJob, AnalysisSpec, GaugeSpec, ProjectorSpec, SystemSource};
use crate::report::{fmt_float, AnalysisBlock, Report, Table};

pub fn build_system(job: &AnalysisJob) -> Result<SkewEvolutionSystem> {
    match &job.system {
        SystemSource::Builtin { name, variant } => {
            let name = BuiltinName::from_str(name)?;
            let variant = match variant {
                Some(v) => CeVariant::from_str(v)?,
                None => CeVariant::Corrected,
            };
            let params = BuiltinParams {
                variant,
                norm: Some(job.norm),
                t_max: 130.0_f64.max(job.horizon.n_max as f64 + 10.0),
            };
            Ok(builtin(name, &params)?.0)
        }
        SystemSource::Inline { dim, steps } => {
            if (job.horizon.n_max as usize) > steps.len() {
                return Err(anyhow!(
                    "horizon n_max {} exceeds the {} inline steps",
                    job.horizon.n_max,
                    steps.len()
                ));
            }
            let cocycle = StepSequenceCocycle::new(*dim, job.norm, steps.clone())?;
            Ok(SkewEvolutionSystem::new(
                "inline",
                job.norm,
                Arc::new(TranslationSemiflow),
                Arc::new(cocycle),
            ))
        }
    }
}

pub fn build_horizon(job: &AnalysisJob, system: &SkewEvolutionSystem) -> Result<Horizon> {
    Ok(Horizon::with_default_vectors(
        job.horizon.n_max,
        system.dim(),
        system.norm_kind(),
        job.horizon.vectors,
        job.seed,
        default_states(system, job.horizon.states),
    )?)
}

fn verdict_config(job: &AnalysisJob) -> VerdictConfig {
    let mut cfg = VerdictConfig::default();
    if let Some(k) = job.verdict.central_k {
        cfg.central_trend_factor = k;
    }
    if let Some(f) = job.verdict.judge_fraction {
        cfg.judge_fraction = f;
    }
    cfg
}

fn gauge_of(spec: &GaugeSpec) -> Result<MonotoneGauge> {
    Ok(match spec {
        GaugeSpec::Identity => MonotoneGauge::identity(),
        GaugeSpec::Power(p) => MonotoneGauge::power(*p)?,
        GaugeSpec::Table(pairs) => MonotoneGauge::table(pairs)?,
    })
}

fn family_of(
    spec: &ProjectorSpec,
    system: &SkewEvolutionSystem,
    want_triple_for_quad: bool,
) -> Result<ProjectorFamily> {
    let dim = system.dim();
    let family = match spec {
        ProjectorSpec::Coordinate(sizes) => ProjectorFamily::coordinate(dim, sizes)?,
        ProjectorSpec::Inline(mats) => {
            let mut members: Vec<Arc<dyn skewflow_core::ProjectorFn>> = Vec::new();
            for m in mats {
                let op = LinearOperator::from_entries(dim, system.norm_kind(), m.clone())?;
                members.push(Arc::new(ConstantProjector::new(&op)));
            }
            let kind = match members.len() {
                1 => FamilyKind::Single,
                2 => FamilyKind::Pair,
                3 => FamilyKind::Triple,
                4 => FamilyKind::Quad,
                n => return Err(anyhow!("projector family of {n} members unsupported")),
            };
            ProjectorFamily::new(kind, members)?
        }
    };
    if want_triple_for_quad && family.kind == FamilyKind::Triple {
        return Ok(four_from_three(&family)?);
    }
    Ok(family)
}

fn verdict_kv(block: &mut AnalysisBlock, verdict: &Verdict) {
    match verdict {
        Verdict::Holds => block.kv("verdict", "holds"),
        Verdict::Fails(w) => {
            block.kv("verdict", "fails");
            block.kv(
                "witness",
                format!(
                    "index {} inner {} state {} vector {} value {} :: {}",
                    w.coefficient_index,
                    w.inner_index,
                    w.state_index,
                    w.vector_index,
                    fmt_float(w.value),
                    w.description
                ),
            );
        }
    }
}

fn coefficients_table(name: &str, cert: &Certificate) -> Table {
    let flag = if cert.holds() { "1" } else { "0" };
    Table {
        name: name.into(),
        header: vec![
            "n".into(),
            "coefficient".into(),
            "max_ratio".into(),
            "verdict".into(),
        ],
        rows: cert
            .coefficients
            .iter()
            .zip(&cert.raw_maxima)
            .enumerate()
            .map(|(n, (c, r))| vec![n.to_string(), fmt_float(*c), fmt_float(*r), flag.into()])
            .collect(),
    }
}

fn certificate_block(mut block: AnalysisBlock, cert: &Certificate) -> AnalysisBlock {
    block.kv("exponent", fmt_float(cert.exponent));
    verdict_kv(&mut block, &cert.verdict);
    for note in &cert.notes {
        block.kv("note", note.clone());
    }
    block.tables.push(coefficients_table("coefficients", cert));
    block
}

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect::<String>()
        .split('_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn split_block(mut block: AnalysisBlock, cert: &SplitCertificate) -> AnalysisBlock {
    verdict_kv(&mut block, &cert.verdict);
    block.kv(
        "exponents",
        cert.exponents
            .iter()
            .map(|e| fmt_float(*e))
            .collect::<Vec<_>>()
            .join(" "),
    );
    if let Some(agree) = cert.cross_check {
        block.kv("cross_check", if agree { "agrees" } else { "disagrees" });
    }
    for note in &cert.notes {
        block.kv("note", note.clone());
    }
    for part in &cert.parts {
        block.kv(
            format!("part_{}", slug(&part.label)),
            if part.holds() { "holds" } else { "fails" },
        );
        block
            .tables
            .push(coefficients_table(&slug(&part.label), part));
    }
    if let Some(shared) = &cert.shared_coefficients {
        let flag = if cert.holds() { "1" } else { "0" };
        block.tables.push(Table {
            name: "shared".into(),
            header: vec![
                "n".into(),
                "coefficient".into(),
                "max_ratio".into(),
                "verdict".into(),
            ],
            rows: shared
                .iter()
                .enumerate()
                .map(|(n, c)| vec![n.to_string(), fmt_float(*c), fmt_float(*c), flag.into()])
                .collect(),
        });
    }
    block
}

fn envelope_block(mut block: AnalysisBlock, env: &EnvelopeBound) -> AnalysisBlock {
    verdict_kv(&mut block, &env.verdict);
    block.kv("max_rate", fmt_float(env.max_rate()));
    let flag = if env.holds() { "1" } else { "0" };
    block.tables.push(Table {
        name: "envelope".into(),
        header: vec![
            "s".into(),
            "coefficient".into(),
            "omega".into(),
            "verdict".into(),
        ],
        rows: env
            .points
            .iter()
            .map(|p| {
                vec![
                    p.index.to_string(),
                    fmt_float(p.coefficient),
                    fmt_float(p.rate),
                    flag.into(),
                ]
            })
            .collect(),
    });
    block
}

fn run_axioms(
    job: &AnalysisJob,
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    index: usize,
    triples: usize,
) -> Result<AnalysisBlock> {
    let mut block = AnalysisBlock::new(index, "axioms");
    let t_max = job.horizon.n_max as f64;
    let grid = random_triples(
        job.seed.wrapping_add(index as u64),
        triples,
        t_max,
        system.discrete_only(),
    );
    let report = system.verify_axioms(&grid, &horizon.states, job.tolerance)?;
    block.kv("passes", if report.passes { "true" } else { "false" });
    block.kv(
        "max_cocycle_residual_rel",
        fmt_float(report.max_cocycle_residual_rel),
    );
    block.kv(
        "max_cocycle_residual_abs",
        fmt_float(report.max_cocycle_residual_abs),
    );
    block.kv("max_identity_residual", fmt_float(report.max_identity_residual));
    block.kv("max_semiflow_residual", fmt_float(report.max_semiflow_residual));
    block.kv("tolerance", fmt_float(report.tolerance));
    if let Some((t, s, t0)) = report.worst_triple {
        block.kv("worst_triple", format!("{t} {s} {t0}"));
    }
    // per-triple residual rows for external plotting
    let mut rows = Vec::with_capacity(grid.len());
    for &(t, s, t0) in &grid {
        let one = system.verify_axioms(&[(t, s, t0)], &horizon.states, job.tolerance)?;
        rows.push(vec![
            fmt_float(t),
            fmt_float(s),
            fmt_float(one.max_cocycle_residual_rel),
        ]);
    }
    block.tables.push(Table {
        name: "residuals".into(),
        header: vec!["t".into(), "s".into(), "residual".into()],
        rows,
    });
    Ok(block)
}

fn run_one(
    job: &AnalysisJob,
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    cfg: &VerdictConfig,
    index: usize,
    spec: &AnalysisSpec,
) -> Result<AnalysisBlock> {
    let block = AnalysisBlock::new(index, spec.kind());
    Ok(match spec {
        AnalysisSpec::Axioms { triples } => run_axioms(job, system, horizon, index, *triples)?,
        AnalysisSpec::Growth => envelope_block(block, &fit_growth(system, horizon, cfg)?),
        AnalysisSpec::Decay => envelope_block(block, &fit_decay(system, horizon, cfg)?),
        AnalysisSpec::Es { mu } => {
            certificate_block(block, &es_certificate(system, *mu, horizon, cfg)?)
        }
        AnalysisSpec::Eis { mu } => {
            certificate_block(block, &eis_certificate(system, *mu, horizon, cfg)?)
        }
        AnalysisSpec::Datko { rho, gauge } => certificate_block(
            block,
            &datko_criterion(system, &gauge_of(gauge)?, *rho, horizon, cfg)?,
        ),
        AnalysisSpec::Adjoint { gamma, gauge } => certificate_block(
            block,
            &adjoint_criterion(system, &gauge_of(gauge)?, *gamma, horizon, cfg)?,
        ),
        AnalysisSpec::Instability { rho, gauge } => certificate_block(
            block,
            &instability_criterion(system, &gauge_of(gauge)?, *rho, horizon, cfg)?,
        ),
        AnalysisSpec::Dichotomy { nu1, nu2, projectors } => {
            let pair = family_of(projectors, system, false)?;
            split_block(
                block,
                &dichotomy_certificate(system, &pair, *nu1, *nu2, horizon, cfg)?,
            )
        }
        AnalysisSpec::DichotomySum {
            rho1,
            rho2,
            gauge,
            projectors,
        } => {
            let pair = family_of(projectors, system, false)?;
            split_block(
                block,
                &dichotomy_sum_criterion(
                    system,
                    &pair,
                    *rho1,
                    *rho2,
                    &gauge_of(gauge)?,
                    horizon,
                    cfg,
                )?,
            )
        }
        AnalysisSpec::Trichotomy { nus, projectors } => {
            let triple = family_of(projectors, system, false)?;
            let cert = trichotomy_certificate(system, &triple, *nus, horizon, cfg)?;
            let mut block = split_block(block, &cert);
            // for the function-space fixture, record how the worked
            // example's stated coefficient functions fare as written
            if system.state_kind() == "function-shift" {
                let grid = random_triples(job.seed.wrapping_add(index as u64), 60, 12.0, false);
                match nuet_constants_report(system, &horizon.states, &grid) {
                    Ok(checks) => {
                        for c in checks {
                            block.kv(
                                "constants_check",
                                format!(
                                    "{} => {} (min slack {})",
                                    c.name,
                                    if c.holds { "holds" } else { "fails" },
                                    fmt_float(c.min_slack)
                                ),
                            );
                        }
                    }
                    Err(e) => block.kv("constants_check_error", e.to_string()),
                }
            }
            block
        }
        AnalysisSpec::TrichotomySum { rhos, projectors } => {
            let triple = family_of(projectors, system, false)?;
            split_block(
                block,
                &trichotomy_sum_criterion(system, &triple, *rhos, horizon, cfg)?,
            )
        }
        AnalysisSpec::FourProjector { mu, nu, projectors } => {
            let quad = family_of(projectors, system, true)?;
            split_block(
                block,
                &four_projector_certificate(system, &quad, *mu, *nu, horizon, cfg)?,
            )
        }
        AnalysisSpec::Estimate { direction, lo, hi, tol } => {
            let mut block = block;
            let dir = match direction.as_str() {
                "stable" => ExponentDirection::Stable,
                _ => ExponentDirection::Instable,
            };
            let est = estimate_exponent(
                system,
                dir,
                horizon,
                ExponentSearch::new(*lo, *hi, *tol)?,
                cfg,
            )?;
            block.kv("direction", direction.clone());
            match est.value {
                Some(v) => block.kv("exponent", fmt_float(v)),
                None => block.kv("exponent", "none"),
            }
            block.kv("note", est.note.clone());
            block.tables.push(Table {
                name: "probes".into(),
                header: vec!["probe".into(), "holds".into()],
                rows: est
                    .probes
                    .iter()
                    .map(|(p, ok)| vec![fmt_float(*p), if *ok { "1".into() } else { "0".into() }])
                    .collect(),
            });
            block
        }
    })
}

/// Execute every analysis of a validated job.
pub fn run(job: &AnalysisJob) -> Result<Report> {
    let system = build_system(job).context("building the system")?;
    let horizon = build_horizon(job, &system).context("building the horizon")?;
    let cfg = verdict_config(job);
    let mut analyses = Vec::with_capacity(job.analyses.len());
    for (i, spec) in job.analyses.iter().enumerate() {
        let index = i + 1;
        let block = match run_one(job, &system, &horizon, &cfg, index, spec) {
            Ok(b) => b,
            Err(e) => {
                let mut b = AnalysisBlock::new(index, spec.kind());
                b.kv("error", e.to_string());
                b
            }
        };
        analyses.push(block);
    }
    // descriptor note for builtin fixtures
    let mut job_echo = crate::job::canonical_text(job);
    if let SystemSource::Builtin { name, .. } = &job.system {
        if let Ok(parsed) = BuiltinName::from_str(name) {
            let params = BuiltinParams {
                norm: Some(job.norm),
                ..BuiltinParams::default()
            };
            if let Ok((_, desc)) = corpus::builtin(parsed, &params) {
                job_echo.push_str(&format!("# expected: {}\n", desc.expected));
            }
        }
    }
    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: job.seed,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        job_echo,
        analyses,
    })
}
