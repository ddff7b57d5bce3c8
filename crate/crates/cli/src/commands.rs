use std::path::Path;

use serde::Serialize;

use qsvlab::cost::{cmin_estimate, shots_to_resolve, spectral_gap};
use qsvlab::instances::worst_case_instance;
use qsvlab::typical::{concentration_experiment, sample_strict_instance, trial_rng};
use qsvlab::verifier::{
    acceptance_stats, make_test_state, verifier_runs, AcceptanceStats, OutcomeRecord,
};
use qsvlab::{
    build_pair, pm_certificate, GapReport, PairCertificate, PmCertificate, QlspInstanceF64,
    QueryBound,
};

use crate::output::{csv, float, json, with_ext, Artifact};
use crate::settings::{Family, Kind, Settings};
use crate::CliError;

pub fn instance(s: &Settings, kappa: f64) -> Result<QlspInstanceF64, CliError> {
    Ok(match s.family {
        Family::WorstCase => worst_case_instance(kappa, s.n)?,
        Family::Random => sample_strict_instance(s.n, kappa, &mut trial_rng(s.seed, 0))?,
    })
}

fn emit(
    s: &Settings,
    stem: &Path,
    json_body: String,
    csv_body: impl FnOnce() -> String,
) -> Vec<Artifact> {
    let mut out = Vec::new();
    if s.format.json() {
        out.push(Artifact {
            path: with_ext(stem, "json"),
            contents: json_body,
        });
    }
    if s.format.csv() {
        out.push(Artifact {
            path: with_ext(stem, "csv"),
            contents: csv_body(),
        });
    }
    out
}

fn bound_cell(q: QueryBound) -> String {
    match q {
        QueryBound::Finite(v) => v.to_string(),
        QueryBound::Unbounded => "unbounded".into(),
    }
}

pub fn gen_instance(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let kappa = s.single_kappa("gen-instance")?;
    let record = instance(s, kappa)?.to_record();
    Ok(emit(s, stem, json(&record), || {
        csv(
            "index,eigval,b_re,b_im",
            (0..record.eigvals.len()).map(|i| {
                vec![
                    i.to_string(),
                    float(record.eigvals[i]),
                    float(record.b_re[i]),
                    float(record.b_im[i]),
                ]
            }),
        )
    }))
}

pub fn adversary_pair(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let kappa = s.single_kappa("adversary-pair")?;
    let c: PairCertificate = build_pair(&instance(s, kappa)?)?.certificate();
    Ok(emit(s, stem, json(&c), || {
        csv(
            "kappa,inverse_norm,v,theta,dist_bb,dist_xx,sin_theta,q0_exact,q0_floor13,bounds_ok",
            [vec![
                float(c.kappa),
                float(c.inverse_norm),
                float(c.v),
                float(c.theta),
                float(c.dist_bb),
                float(c.dist_xx),
                float(c.sin_theta),
                bound_cell(c.q0_exact),
                c.q0_floor13.to_string(),
                c.bounds_ok.to_string(),
            ]],
        )
    }))
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    n: usize,
    kappa: f64,
    family: Family,
    d: f64,
    kind: Kind,
    eps: f64,
    seed: u64,
    #[serde(flatten)]
    stats: AcceptanceStats,
    outcomes: Vec<OutcomeRecord>,
}

pub fn verify(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let kappa = s.single_kappa("verify")?;
    let inst = instance(s, kappa)?;
    let test = make_test_state(inst.solve(), s.d, s.kind.into())?;
    let runs = verifier_runs(&inst, &test.rho, s.eps, s.trials, s.seed)?;
    let report = VerifyReport {
        n: s.n,
        kappa,
        family: s.family,
        d: s.d,
        kind: s.kind,
        eps: s.eps,
        seed: s.seed,
        stats: acceptance_stats(&runs),
        outcomes: runs.iter().map(|o| o.record()).collect(),
    };
    Ok(emit(s, stem, json(&report), || {
        csv(
            "run,r,hamming,p_r1_exact,q_uses,rounds,p_success,seed",
            report.outcomes.iter().enumerate().map(|(i, o)| {
                vec![
                    i.to_string(),
                    o.r.to_string(),
                    o.hamming.to_string(),
                    float(o.p_r1_exact),
                    o.q_uses.to_string(),
                    o.rounds.to_string(),
                    float(o.p_success),
                    o.seed.to_string(),
                ]
            }),
        )
    }))
}

pub fn typical_sweep(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let kappa = s.single_kappa("typical-sweep")?;
    let report = concentration_experiment(s.n, kappa, s.trials, s.seed)?;
    Ok(emit(s, stem, json(&report), || {
        csv(
            "trial,inverse_norm,in_window",
            report
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| vec![i.to_string(), float(*v), report.in_window(i).to_string()]),
        )
    }))
}

pub fn pm_bound(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let kappa = s.single_kappa("pm-bound")?;
    let c: PmCertificate = pm_certificate(&build_pair(&instance(s, kappa)?)?);
    Ok(emit(s, stem, json(&c), || {
        csv(
            "overlap,q0_pm_exact,q0_pm_floor150,distance_at_q0",
            [vec![
                float(c.overlap),
                bound_cell(c.q0_pm_exact),
                c.q0_pm_floor150.to_string(),
                float(c.distance_at_q0),
            ]],
        )
    }))
}

#[derive(Debug, Serialize)]
struct GapRow {
    kappa: f64,
    #[serde(flatten)]
    report: GapReport,
    cmin: f64,
    shots: u64,
}

#[derive(Debug, Serialize)]
struct GapSweep {
    n: usize,
    family: Family,
    z: f64,
    rows: Vec<GapRow>,
    /// Least-squares slope of ln(shots) against ln(kappa); null below two points.
    slope: Option<f64>,
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn cost_gap(s: &Settings, stem: &Path) -> Result<Vec<Artifact>, CliError> {
    let rows = s
        .kappa
        .iter()
        .map(|&kappa| {
            let report = spectral_gap(&instance(s, kappa)?)?;
            Ok(GapRow {
                kappa,
                cmin: cmin_estimate(&report)?,
                shots: shots_to_resolve(&report, s.z)?,
                report,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let slope = log_log_slope(
        &rows
            .iter()
            .map(|r| (r.kappa, r.shots as f64))
            .collect::<Vec<_>>(),
    );
    let sweep = GapSweep {
        n: s.n,
        family: s.family,
        z: s.z,
        rows,
        slope,
    };
    Ok(emit(s, stem, json(&sweep), || {
        csv(
            "kappa,gap,lambda_ss_sq,cmin,shots",
            sweep.rows.iter().map(|r| {
                vec![
                    float(r.kappa),
                    float(r.report.gap),
                    float(r.report.bound),
                    float(r.cmin),
                    r.shots.to_string(),
                ]
            }),
        )
    }))
}

/// Every experiment into the directory `dir`. Single-kappa experiments use
/// the first `--kappa`; cost-gap sweeps all of them.
pub fn report_all(s: &Settings, dir: &Path) -> Result<Vec<Artifact>, CliError> {
    let first = Settings {
        kappa: vec![s.kappa[0]],
        ..s.clone()
    };
    let mut out = Vec::new();
    out.extend(gen_instance(&first, &dir.join("gen-instance"))?);
    out.extend(adversary_pair(&first, &dir.join("adversary-pair"))?);
    out.extend(verify(&first, &dir.join("verify"))?);
    out.extend(typical_sweep(&first, &dir.join("typical-sweep"))?);
    out.extend(pm_bound(&first, &dir.join("pm-bound"))?);
    out.extend(cost_gap(s, &dir.join("cost-gap"))?);
    Ok(out)
}
