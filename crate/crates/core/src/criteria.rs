//! Discrete characterizations and summation criteria for exponential
//! stability and instability, envelope fitting, and sharp-exponent search.
//!
//! All operations sample the integer grid `0..=n_max` of the horizon, fold
//! exact maxima over the sampled states and unit vectors, and accumulate
//! sums in ascending index order with compensated summation.

use crate::certificate::{
    clip_coefficients, is_uniform, start_pointwise_divergence, sum_tail_divergence, Certificate,
    EnvelopeBound, EnvelopeDirection, EnvelopePoint, Verdict, VerdictConfig, Witness,
};
use crate::certificate::{end_indexed_failure, max_scan};
use crate::error::{Error, Result};
use crate::gauge::MonotoneGauge;
use crate::horizon::Horizon;
use crate::sum::CompensatedSum;
use crate::system::{adjoint_apply, SkewEvolutionSystem};

/// Norms `|Phi(e, n0, x) v|` for one state over the triangle
/// `0 <= n0 <= e <= n_max`, indexed `[n0][e - n0][w]`.
pub(crate) fn triangle_norms(
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    state_index: usize,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let x = &horizon.states[state_index];
    let n_max = horizon.n_max;
    let norm = system.norm_kind();
    let mut table = Vec::with_capacity(n_max as usize + 1);
    for n0 in 0..=n_max {
        let mut rows = Vec::with_capacity((n_max - n0) as usize + 1);
        for e in n0..=n_max {
            let op = system.evaluate(e as f64, n0 as f64, x)?;
            let row: Vec<f64> = horizon
                .vectors
                .iter()
                .map(|v| norm.vector_norm(&op.apply(v).expect("dims checked")))
                .collect();
            rows.push(row);
        }
        table.push(rows);
    }
    Ok(table)
}

fn vector_norms(system: &SkewEvolutionSystem, horizon: &Horizon) -> Vec<f64> {
    horizon
        .vectors
        .iter()
        .map(|v| system.norm_kind().vector_norm(v))
        .collect()
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {value}"
        )));
    }
    Ok(())
}

/// Discrete exponential-stability characterization: fit the smallest
/// per-start coefficients `a_m` with
/// `|Phi(n, m, x) v| <= a_m e^{-mu (n - m)} |v|` on the sampled horizon.
pub fn es_certificate(
    system: &SkewEvolutionSystem,
    mu: f64,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<Certificate> {
    check_positive("mu", mu)?;
    let n_max = horizon.n_max;
    let judge = cfg.judge_limit(n_max);
    let vnorms = vector_norms(system, horizon);
    let mut coeffs = vec![1.0f64; n_max as usize + 1];
    let mut raw = vec![0.0f64; n_max as usize + 1];
    let mut verdict = Verdict::Holds;

    for si in 0..horizon.states.len() {
        let table = triangle_norms(system, horizon, si)?;
        for (w, vn) in vnorms.iter().enumerate() {
            for j in 0..=n_max {
                let profile: Vec<f64> = (j..=n_max)
                    .map(|e| {
                        (mu * (e - j) as f64).exp() * table[j as usize][(e - j) as usize][w] / vn
                    })
                    .collect();
                let (pmax, _) = max_scan(&profile);
                raw[j as usize] = raw[j as usize].max(pmax);
                coeffs[j as usize] = coeffs[j as usize].max(pmax);
                if verdict.holds() && j <= judge {
                    if let Some(off) = start_pointwise_divergence(&profile, cfg) {
                        verdict = Verdict::Fails(Witness {
                            coefficient_index: j,
                            inner_index: j + off as u32,
                            state_index: si,
                            vector_index: w,
                            value: profile[off],
                            description: format!(
                                "e^(mu (n-m)) |Phi(n,m,x)v| keeps growing toward the horizon \
                                 (m={}, n={}, requirement {:.6e})",
                                j,
                                j + off as u32,
                                profile[off]
                            ),
                        });
                    }
                }
            }
        }
    }

    clip_coefficients(&mut coeffs);
    let mut notes = Vec::new();
    if is_uniform(&coeffs, cfg.uniform_tolerance) {
        notes.push("coefficients sit at the uniform floor a = 1".into());
    }
    Ok(Certificate {
        label: "es".into(),
        exponent: mu,
        coefficients: coeffs,
        raw_maxima: raw,
        verdict,
        notes,
    })
}

/// Discrete exponential-instability characterization: fit `a_m` with
/// `|Phi(n, n0, x) v| <= a_m e^{-mu (m - n)} |Phi(m, n0, x) v|` over
/// `n0 <= n <= m`. The inequality compares an earlier-time norm against a
/// later-time norm.
pub fn eis_certificate(
    system: &SkewEvolutionSystem,
    mu: f64,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<Certificate> {
    check_positive("mu", mu)?;
    let n_max = horizon.n_max;
    let mut coeffs = vec![1.0f64; n_max as usize + 1];
    let mut raw = vec![0.0f64; n_max as usize + 1];
    let mut degenerate: Option<Witness> = None;

    for si in 0..horizon.states.len() {
        let table = triangle_norms(system, horizon, si)?;
        for w in 0..horizon.vectors.len() {
            for n0 in 0..=n_max {
                for n in n0..=n_max {
                    let num_base = table[n0 as usize][(n - n0) as usize][w];
                    for m in n..=n_max {
                        let den = table[n0 as usize][(m - n0) as usize][w];
                        if den <= 1e-300 {
                            if num_base > 1e-300 && degenerate.is_none() {
                                degenerate = Some(Witness {
                                    coefficient_index: m,
                                    inner_index: n,
                                    state_index: si,
                                    vector_index: w,
                                    value: f64::INFINITY,
                                    description: format!(
                                        "|Phi({m},{n0},x)v| = 0 with a nonzero earlier norm: \
                                         instability impossible along this direction"
                                    ),
                                });
                            }
                            continue;
                        }
                        let req = (mu * (m - n) as f64).exp() * num_base / den;
                        raw[m as usize] = raw[m as usize].max(req);
                        coeffs[m as usize] = coeffs[m as usize].max(req);
                    }
                }
            }
        }
    }

    clip_coefficients(&mut coeffs);
    let verdict = if let Some(w) = degenerate {
        Verdict::Fails(w)
    } else if let Some(idx) = end_indexed_failure(&coeffs, cfg.end_ratio_pointwise) {
        Verdict::Fails(Witness {
            coefficient_index: idx as u32,
            inner_index: idx as u32,
            state_index: 0,
            vector_index: 0,
            value: coeffs[idx],
            description: format!(
                "needed coefficients never return to their early floor \
                 (a_{} = {:.6e})",
                idx, coeffs[idx]
            ),
        })
    } else {
        Verdict::Holds
    };

    let mut notes = Vec::new();
    if is_uniform(&coeffs, cfg.uniform_tolerance) {
        notes.push("coefficients sit at the uniform floor a = 1".into());
    }
    Ok(Certificate {
        label: "eis".into(),
        exponent: mu,
        coefficients: coeffs,
        raw_maxima: raw,
        verdict,
        notes,
    })
}

/// Summation criterion for stability: partial sums
/// `sum_k R(e^{rho (k-n)} |Phi(k, n, x) v|) <= alpha_n R(|v|)`.
pub fn datko_criterion(
    system: &SkewEvolutionSystem,
    gauge: &MonotoneGauge,
    rho: f64,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<Certificate> {
    check_positive("rho", rho)?;
    let n_max = horizon.n_max;
    let judge = cfg.judge_limit(n_max);
    let vnorms = vector_norms(system, horizon);
    let mut coeffs = vec![1.0f64; n_max as usize + 1];
    let mut raw = vec![0.0f64; n_max as usize + 1];
    let mut verdict = Verdict::Holds;

    for si in 0..horizon.states.len() {
        let table = triangle_norms(system, horizon, si)?;
        for (w, vn) in vnorms.iter().enumerate() {
            let denom = gauge.eval(*vn);
            for j in 0..=n_max {
                let mut acc = CompensatedSum::new();
                let mut profile = Vec::with_capacity((n_max - j) as usize + 1);
                for k in j..=n_max {
                    let weighted =
                        (rho * (k - j) as f64).exp() * table[j as usize][(k - j) as usize][w];
                    acc.add(gauge.eval(weighted));
                    profile.push(acc.value() / denom);
                }
                let last = *profile.last().expect("nonempty");
                raw[j as usize] = raw[j as usize].max(last);
                coeffs[j as usize] = coeffs[j as usize].max(last);
                if verdict.holds() && j <= judge {
                    if let Some(off) = sum_tail_divergence(&profile, cfg) {
                        verdict = Verdict::Fails(Witness {
                            coefficient_index: j,
                            inner_index: j + off as u32,
                            state_index: si,
                            vector_index: w,
                            value: profile[off],
                            description: format!(
                                "weighted partial sums from n={j} keep growing \
                                 (value {:.6e} at m={})",
                                profile[off],
                                j + off as u32
                            ),
                        });
                    }
                }
            }
        }
    }

    clip_coefficients(&mut coeffs);
    let mut notes = Vec::new();
    if verdict.holds() {
        notes.push(
            "bounded weighted sums: consistent with exponential stability \
             under exponential growth on this horizon"
                .into(),
        );
    }
    Ok(Certificate {
        label: "datko".into(),
        exponent: rho,
        coefficients: coeffs,
        raw_maxima: raw,
        verdict,
        notes,
    })
}

/// Adjoint summation criterion: sums anchored at the final time over the
/// transpose action on dual vectors,
/// `sum_k R(e^{gamma (m-k)} |Phi(m, k, phi(k, n, x))^* v^*|) <= beta_n R(|v^*|)`.
/// The sampled vectors are normalized in the dual norm.
pub fn adjoint_criterion(
    system: &SkewEvolutionSystem,
    gauge: &MonotoneGauge,
    gamma: f64,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<Certificate> {
    check_positive("gamma", gamma)?;
    let n_max = horizon.n_max;
    let judge = cfg.judge_limit(n_max);
    let dual = system.norm_kind().dual();
    let dual_vectors: Vec<Vec<f64>> = horizon
        .vectors
        .iter()
        .map(|v| {
            let n = dual.vector_norm(v);
            v.iter().map(|c| c / n).collect()
        })
        .collect();
    let mut coeffs = vec![1.0f64; n_max as usize + 1];
    let mut raw = vec![0.0f64; n_max as usize + 1];
    let mut verdict = Verdict::Holds;

    for (si, x) in horizon.states.iter().enumerate() {
        for j in 0..=n_max {
            // states along the orbit from time j
            let mut orbit = Vec::with_capacity((n_max - j) as usize + 1);
            for k in j..=n_max {
                orbit.push(system.advance(k as f64, j as f64, x)?);
            }
            for (w, vstar) in dual_vectors.iter().enumerate() {
                let denom = gauge.eval(dual.vector_norm(vstar));
                let mut profile = Vec::with_capacity((n_max - j) as usize + 1);
                for m in j..=n_max {
                    let mut acc = CompensatedSum::new();
                    for k in j..=m {
                        let op = system.evaluate(m as f64, k as f64, &orbit[(k - j) as usize])?;
                        let (_, dual_norm) = adjoint_apply(&op, vstar)?;
                        acc.add(gauge.eval((gamma * (m - k) as f64).exp() * dual_norm));
                    }
                    profile.push(acc.value() / denom);
                }
                let (pmax, _) = max_scan(&profile);
                raw[j as usize] = raw[j as usize].max(pmax);
                coeffs[j as usize] = coeffs[j as usize].max(pmax);
                if verdict.holds() && j <= judge {
                    if let Some(off) = sum_tail_divergence(&profile, cfg) {
                        verdict = Verdict::Fails(Witness {
                            coefficient_index: j,
                            inner_index: j + off as u32,
                            state_index: si,
                            vector_index: w,
                            value: profile[off],
                            description: format!(
                                "adjoint-weighted sums anchored at m keep growing \
                                 (value {:.6e} at m={})",
                                profile[off],
                                j + off as u32
                            ),
                        });
                    }
                }
            }
        }
    }

    clip_coefficients(&mut coeffs);
    Ok(Certificate {
        label: "adjoint".into(),
        exponent: gamma,
        coefficients: coeffs,
        raw_maxima: raw,
        verdict,
        notes: Vec::new(),
    })
}

/// Summation criterion for instability (rho < 0 kept verbatim):
/// `sum_k R(e^{-rho (m-k)} |Phi(k, n, x) v|) <= R(alpha_m |Phi(m, n, x) v|)`,
/// fitting `alpha_m` through the gauge inverse.
pub fn instability_criterion(
    system: &SkewEvolutionSystem,
    gauge: &MonotoneGauge,
    rho: f64,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<Certificate> {
    if !(rho < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "instability criterion needs rho < 0, got {rho}"
        )));
    }
    let rate = -rho;
    let n_max = horizon.n_max;
    let mut coeffs = vec![1.0f64; n_max as usize + 1];
    let mut raw = vec![0.0f64; n_max as usize + 1];
    let mut degenerate: Option<Witness> = None;

    for si in 0..horizon.states.len() {
        let table = triangle_norms(system, horizon, si)?;
        for w in 0..horizon.vectors.len() {
            for n in 0..=n_max {
                for m in n..=n_max {
                    let den = table[n as usize][(m - n) as usize][w];
                    let mut acc = CompensatedSum::new();
                    for k in n..=m {
                        let weighted =
                            (rate * (m - k) as f64).exp() * table[n as usize][(k - n) as usize][w];
                        acc.add(gauge.eval(weighted));
                    }
                    let total = acc.value();
                    if den <= 1e-300 {
                        if total > 1e-300 && degenerate.is_none() {
                            degenerate = Some(Witness {
                                coefficient_index: m,
                                inner_index: n,
                                state_index: si,
                                vector_index: w,
                                value: f64::INFINITY,
                                description: format!(
                                    "|Phi({m},{n},x)v| = 0 under a nonzero weighted sum"
                                ),
                            });
                        }
                        continue;
                    }
                    let req = gauge.inverse(total) / den;
                    raw[m as usize] = raw[m as usize].max(req);
                    coeffs[m as usize] = coeffs[m as usize].max(req);
                }
            }
        }
    }

    clip_coefficients(&mut coeffs);
    let verdict = if let Some(w) = degenerate {
        Verdict::Fails(w)
    } else if let Some(idx) = end_indexed_failure(&coeffs, cfg.end_ratio_sum) {
        Verdict::Fails(Witness {
            coefficient_index: idx as u32,
            inner_index: idx as u32,
            state_index: 0,
            vector_index: 0,
            value: coeffs[idx],
            description: format!(
                "needed coefficients keep rising across the horizon \
                 (alpha_{} = {:.6e})",
                idx, coeffs[idx]
            ),
        })
    } else {
        Verdict::Holds
    };

    Ok(Certificate {
        label: "instability".into(),
        exponent: rho,
        coefficients: coeffs,
        raw_maxima: raw,
        verdict,
        notes: Vec::new(),
    })
}

/// The log-spaced candidate rates used by the envelope fits.
pub fn envelope_rate_grid() -> Vec<f64> {
    vec![
        0.0625, 0.125, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0,
    ]
}

/// Exponential-growth envelope: per-s smallest (M(s), omega(s)) on the rate
/// grid with `|Phi(t, t0, x) v| <= M(s) e^{omega(s) (t-s)} |Phi(s, t0, x) v|`
/// for all sampled t >= s >= t0. The anchor times t0 are subsampled at
/// {0, s/2, s}.
pub fn fit_growth(
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<EnvelopeBound> {
    fit_envelope(system, horizon, cfg, EnvelopeDirection::Growth)
}

/// Exponential-decay envelope, the time-reversed mirror:
/// `|Phi(s, t0, x) v| <= M(t) e^{omega(t) (t-s)} |Phi(t, t0, x) v|`.
/// The rate is selected globally (the coefficient index is the later time,
/// so saturation can only be judged across the whole sequence).
pub fn fit_decay(
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    cfg: &VerdictConfig,
) -> Result<EnvelopeBound> {
    fit_envelope(system, horizon, cfg, EnvelopeDirection::Decay)
}

fn anchor_samples(s: u32) -> Vec<u32> {
    let mut t0s = vec![0, s / 2, s];
    t0s.dedup();
    t0s
}

fn fit_envelope(
    system: &SkewEvolutionSystem,
    horizon: &Horizon,
    cfg: &VerdictConfig,
    direction: EnvelopeDirection,
) -> Result<EnvelopeBound> {
    if horizon.states.is_empty() || horizon.vectors.is_empty() {
        return Err(Error::EmptySamples("envelope fit".into()));
    }
    let n_max = horizon.n_max;
    let grid = envelope_rate_grid();
    let norm = system.norm_kind();

    // triangle norms per state
    let mut tables = Vec::new();
    for si in 0..horizon.states.len() {
        tables.push(triangle_norms(system, horizon, si)?);
    }
    let tiny = 1e-300;

    match direction {
        EnvelopeDirection::Growth => {
            let mut points = Vec::with_capacity(n_max as usize + 1);
            for s in 0..=n_max {
                let mut chosen: Option<(f64, f64)> = None;
                let mut last_violation: Option<Witness> = None;
                'rates: for &omega in &grid {
                    let mut m_req = 1.0f64;
                    for (si, table) in tables.iter().enumerate() {
                        for w in 0..horizon.vectors.len() {
                            for &t0 in &anchor_samples(s) {
                                let den = table[t0 as usize][(s - t0) as usize][w];
                                if den <= tiny {
                                    continue;
                                }
                                let profile: Vec<f64> = (s..=n_max)
                                    .map(|t| {
                                        table[t0 as usize][(t - t0) as usize][w]
                                            * (-omega * (t - s) as f64).exp()
                                            / den
                                    })
                                    .collect();
                                if let Some(off) = start_pointwise_divergence(&profile, cfg) {
                                    last_violation = Some(Witness {
                                        coefficient_index: s,
                                        inner_index: s + off as u32,
                                        state_index: si,
                                        vector_index: w,
                                        value: profile[off],
                                        description: format!(
                                            "trajectory from t0={t0} through s={s} outgrows \
                                             every grid rate (ratio {:.6e} at t={})",
                                            profile[off],
                                            s + off as u32
                                        ),
                                    });
                                    continue 'rates;
                                }
                                let (pmax, _) = max_scan(&profile);
                                m_req = m_req.max(pmax);
                            }
                        }
                    }
                    chosen = Some((m_req, omega));
                    break;
                }
                match chosen {
                    Some((m, omega)) => points.push(EnvelopePoint {
                        index: s,
                        coefficient: m,
                        rate: omega,
                    }),
                    None => {
                        let witness = last_violation.unwrap_or(Witness {
                            coefficient_index: s,
                            inner_index: n_max,
                            state_index: 0,
                            vector_index: 0,
                            value: f64::INFINITY,
                            description: format!("no rate on the grid bounds the growth from s={s}"),
                        });
                        return Ok(EnvelopeBound {
                            direction,
                            points,
                            verdict: Verdict::Fails(witness),
                            norm,
                        });
                    }
                }
            }
            Ok(EnvelopeBound {
                direction,
                points,
                verdict: Verdict::Holds,
                norm,
            })
        }
        EnvelopeDirection::Decay => {
            for &omega in &grid {
                let mut coeffs = vec![1.0f64; n_max as usize + 1];
                for table in tables.iter() {
                    for w in 0..horizon.vectors.len() {
                        for t in 0..=n_max {
                            for &t0 in &anchor_samples(t) {
                                let den = table[t0 as usize][(t - t0) as usize][w];
                                if den <= tiny {
                                    continue;
                                }
                                for s2 in t0..=t {
                                    let req = table[t0 as usize][(s2 - t0) as usize][w]
                                        * (-omega * (t - s2) as f64).exp()
                                        / den;
                                    coeffs[t as usize] = coeffs[t as usize].max(req);
                                }
                            }
                        }
                    }
                }
                if end_indexed_failure(&coeffs, cfg.end_ratio_pointwise).is_none() {
                    let points = coeffs
                        .iter()
                        .enumerate()
                        .map(|(t, &m)| EnvelopePoint {
                            index: t as u32,
                            coefficient: m,
                            rate: omega,
                        })
                        .collect();
                    return Ok(EnvelopeBound {
                        direction,
                        points,
                        verdict: Verdict::Holds,
                        norm,
                    });
                }
            }
            Ok(EnvelopeBound {
                direction,
                points: Vec::new(),
                verdict: Verdict::Fails(Witness {
                    coefficient_index: n_max,
                    inner_index: 0,
                    state_index: 0,
                    vector_index: 0,
                    value: f64::INFINITY,
                    description: "no rate on the grid bounds the backward decay".into(),
                }),
                norm,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentDirection {
    Stable,
    Instable,
}

#[derive(Debug, Clone, Copy)]
pub struct ExponentSearch {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
}

impl ExponentSearch {
    pub fn new(lo: f64, hi: f64, tolerance: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent search needs 0 < lo < hi and tolerance > 0, got [{lo}, {hi}] / {tolerance}"
            )));
        }
        Ok(Self { lo, hi, tolerance })
    }
}

#[derive(Debug, Clone)]
pub struct ExponentEstimate {
    /// Largest parameter for which the certificate holds, or `None` when the
    /// certificate already fails at the search floor.
    pub value: Option<f64>,
    pub probes: Vec<(f64, bool)>,
    pub note: String,
}

/// Bisect for the supremum of the certificate parameter: the largest mu with
/// `es_certificate` holding (stable direction) or the largest nu with
/// `eis_certificate` holding (instable direction). The verdict is assumed
/// monotone in the parameter; the probed points are checked for it.
pub fn estimate_exponent(
    system: &SkewEvolutionSystem,
    direction: ExponentDirection,
    horizon: &Horizon,
    search: ExponentSearch,
    cfg: &VerdictConfig,
) -> Result<ExponentEstimate> {
    let probe = |param: f64| -> Result<bool> {
        Ok(match direction {
            ExponentDirection::Stable => es_certificate(system, param, horizon, cfg)?.holds(),
            ExponentDirection::Instable => eis_certificate(system, param, horizon, cfg)?.holds(),
        })
    };
    let mut probes: Vec<(f64, bool)> = Vec::new();
    let lo_holds = probe(search.lo)?;
    probes.push((search.lo, lo_holds));
    if !lo_holds {
        return Ok(ExponentEstimate {
            value: None,
            probes,
            note: format!(
                "no positive exponent: certificate already fails at the search floor {}",
                search.lo
            ),
        });
    }
    let hi_holds = probe(search.hi)?;
    probes.push((search.hi, hi_holds));
    if hi_holds {
        return Ok(ExponentEstimate {
            value: Some(search.hi),
            probes,
            note: "certificate still holds at the search ceiling".into(),
        });
    }
    let mut lo = search.lo;
    let mut hi = search.hi;
    while hi - lo > search.tolerance {
        let mid = 0.5 * (lo + hi);
        let ok = probe(mid)?;
        probes.push((mid, ok));
        if ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // verdicts must be monotone (holds below, fails above) across the probes
    let mut sorted = probes.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    for pair in sorted.windows(2) {
        if !pair[0].1 && pair[1].1 {
            return Err(Error::NonMonotoneVerdict(format!(
                "fails at {} but holds at {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    Ok(ExponentEstimate {
        value: Some(lo),
        probes,
        note: "bisection converged".into(),
    })
}
