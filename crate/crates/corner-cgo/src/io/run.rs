//! Experiment orchestration: dispatches a validated config to the
//! compute modules, writes RFC-4180 CSV reports plus a JSON manifest,
//! and records wall time per stage.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{
    decay_delta, incomplete_gamma_bound_check, phase, Branch, GammaBoundInputs, PhaseParams,
    SectorDomain,
};
use crate::cauchy::cauchy_apply;
use crate::cgo::{
    build_cgo, verify_smapping, CgoBuildOptions, HolomorphicPoly, PotentialSpec,
};
use crate::corner::{
    rate_fit, sector_moment, sector_moment_quad, sharp_c0, sharp_c1, sharp_c2,
    IncidentFieldModel, IncidentTerm, MediumModel, SymMat2,
};
use crate::error::{Error, Result};
use crate::fd::fd_dbar;
use crate::grid::{build_sector_grid, integrate, ComplexFieldSample, PolarGrid};
use crate::norms::{l2_norm, lp_norm_masked};
use crate::verdict::{classify, rectangle_witness, witness_cross_check, CornerSpec, IncidentDescriptor};

use super::config::{Command, ExperimentConfig};

/// One report row: a named quantity, optionally attached to an h value,
/// a predicted exponent, and a measured slope.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub quantity: String,
    pub h: Option<f64>,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub abs: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub measured_slope: Option<f64>,
}

impl CsvRow {
    fn value(quantity: impl Into<String>, v: Complex64) -> Self {
        CsvRow {
            quantity: quantity.into(),
            h: None,
            re: Some(v.re),
            im: Some(v.im),
            abs: Some(v.norm()),
            predicted_exponent: None,
            measured_slope: None,
        }
    }

    fn scalar(quantity: impl Into<String>, v: f64) -> Self {
        CsvRow {
            quantity: quantity.into(),
            h: None,
            re: None,
            im: None,
            abs: Some(v),
            predicted_exponent: None,
            measured_slope: None,
        }
    }

    fn with_h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    fn with_predicted(mut self, p: f64) -> Self {
        self.predicted_exponent = Some(p);
        self
    }

    fn with_slope(mut self, s: f64) -> Self {
        self.measured_slope = Some(s);
        self
    }
}

/// A value recorded in the manifest with its provenance (closed-form,
/// quadrature, fit, ...).
#[derive(Debug, Clone, Serialize)]
pub struct EmittedValue {
    pub name: String,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub provenance: String,
}

impl EmittedValue {
    fn new(name: impl Into<String>, v: Complex64, provenance: &str) -> Self {
        EmittedValue {
            name: name.into(),
            re: v.re,
            im: v.im,
            abs: v.norm(),
            provenance: provenance.into(),
        }
    }

    fn real(name: impl Into<String>, v: f64, provenance: &str) -> Self {
        Self::new(name, Complex64::new(v, 0.0), provenance)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Reproducibility manifest; sufficient to re-run bit-identically under
/// the same deterministic-reduction mode.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub status: String,
    pub config: ExperimentConfig,
    pub grid_checksum: String,
    pub timings: Vec<StageTiming>,
    pub values: Vec<EmittedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct CommandOutput {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    values: Vec<EmittedValue>,
    grid_checksum: String,
    /// A check that failed after the outputs were produced.
    failure: Option<Error>,
    timings: Vec<StageTiming>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn standard_rows(rows: &[CsvRow]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "quantity",
        "h",
        "re",
        "im",
        "abs",
        "predicted_exponent",
        "measured_slope",
    ];
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.quantity.clone(),
                fmt_opt(r.h),
                fmt_opt(r.re),
                fmt_opt(r.im),
                fmt_opt(r.abs),
                fmt_opt(r.predicted_exponent),
                fmt_opt(r.measured_slope),
            ]
        })
        .collect();
    (header, body)
}

fn medium_from_config(config: &ExperimentConfig) -> Result<MediumModel> {
    if config.amp1 > 0.0 || config.amp2 > 0.0 {
        MediumModel::power_perturbed(
            config.c1,
            config.c2,
            config.beta1,
            config.beta2,
            config.amp1,
            config.amp2,
            config.k,
        )
    } else {
        let mut m = MediumModel::constant(config.c1, config.c2, config.k)?;
        // keep the declared perturbation orders visible to the verdict table
        m.beta1 = config.beta1;
        m.beta2 = config.beta2;
        Ok(m)
    }
}

fn incident_from_config(config: &ExperimentConfig) -> Result<IncidentFieldModel> {
    let terms = config
        .incident
        .iter()
        .map(|t| IncidentTerm {
            m: t.m,
            a: Complex64::new(t.a_re, t.a_im),
            b: Complex64::new(t.b_re, t.b_im),
        })
        .collect();
    IncidentFieldModel::new(config.k, terms)
}

fn grid_from_config(config: &ExperimentConfig) -> Result<(Arc<PolarGrid>, PhaseParams)> {
    let sector = SectorDomain::new(config.theta0, config.radius)?;
    let params = PhaseParams::new(config.alpha, config.h)?;
    let grid = build_sector_grid(&sector, config.nr, config.ntheta, &params)?;
    Ok((grid, params))
}

fn run_cgo_build(config: &ExperimentConfig, timings: &mut Vec<StageTiming>) -> Result<CommandOutput> {
    let t0 = Instant::now();
    let (grid, params) = grid_from_config(config)?;
    timings.push(StageTiming {
        stage: "grid".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    let pot = if config.use_medium {
        PotentialSpec::Medium(medium_from_config(config)?)
    } else {
        PotentialSpec::constant_q(&grid, Complex64::new(config.q_const, 0.0))
    };
    let opts = CgoBuildOptions {
        tol: config.tol,
        maxiter: config.maxiter,
        ..CgoBuildOptions::default()
    };
    let t1 = Instant::now();
    let sol = build_cgo(
        &HolomorphicPoly::one(),
        &pot,
        &params,
        &grid,
        Branch::Principal,
        &opts,
    )?;
    timings.push(StageTiming {
        stage: "solve".into(),
        seconds: t1.elapsed().as_secs_f64(),
    });

    let mut rows = vec![
        CsvRow::scalar("residual_rel", sol.residual_rel).with_h(params.h),
        CsvRow::scalar("iterations", sol.iterations as f64).with_h(params.h),
    ];
    let mut values = vec![
        EmittedValue::real("residual_rel", sol.residual_rel, "fd-factored-residual"),
        EmittedValue::real("iterations", sol.iterations as f64, "neumann-series"),
    ];
    for n in &sol.norms {
        let name = format!("{}_l{}", n.method, n.p);
        rows.push(CsvRow::scalar(&name, n.lp).with_h(params.h));
        rows.push(CsvRow::scalar(format!("{}_w1_{}", n.method, n.p), n.w1p).with_h(params.h));
        values.push(EmittedValue::real(&name, n.lp, "discrete-norm"));
    }
    let (header, body) = standard_rows(&rows);
    Ok(CommandOutput {
        header,
        rows: body,
        values,
        grid_checksum: format!("{:016x}", grid.checksum()),
        failure: None,
        timings: Vec::new(),
    })
}

fn run_rate_sweep(config: &ExperimentConfig, timings: &mut Vec<StageTiming>) -> Result<CommandOutput> {
    let sector = SectorDomain::new(config.theta0, config.radius)?;
    let predicted = (config.beta + 2.0) / config.alpha;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut mags = Vec::new();
    let t0 = Instant::now();
    let params0 = PhaseParams::new(config.alpha, config.h_grid[0])?;
    let grid = build_sector_grid(&sector, config.nr, config.ntheta, &params0)?;
    // positive decay constant is required for the sweep to make sense
    decay_delta(&params0, &sector)?;
    for &h in &config.h_grid {
        let params = params0.with_h(h);
        let f = ComplexFieldSample::from_fn(&grid, |z| {
            let rb = z.norm().powf(config.beta);
            rb * (-phase(z, &params, Branch::Principal).unwrap() / h).exp()
        });
        let moment = integrate(&f)?;
        mags.push(moment.norm());
        rows.push(
            CsvRow::value("moment", moment)
                .with_h(h)
                .with_predicted(predicted),
        );
        values.push(EmittedValue::new(format!("moment_h_{h}"), moment, "quadrature"));
    }
    timings.push(StageTiming {
        stage: "sweep".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    let fit = rate_fit(&config.h_grid, &mags, predicted)?;
    rows.push(
        CsvRow::scalar("fit_r_squared", fit.r_squared)
            .with_predicted(predicted)
            .with_slope(fit.slope),
    );
    values.push(EmittedValue::real("measured_slope", fit.slope, "log-log-fit"));
    values.push(EmittedValue::real("r_squared", fit.r_squared, "log-log-fit"));
    let (header, body) = standard_rows(&rows);
    Ok(CommandOutput {
        header,
        rows: body,
        values,
        grid_checksum: format!("{:016x}", grid.checksum()),
        failure: None,
        timings: Vec::new(),
    })
}

fn run_constants(config: &ExperimentConfig, timings: &mut Vec<StageTiming>) -> Result<CommandOutput> {
    let t0 = Instant::now();
    let alpha = config.alpha;
    let theta0 = config.theta0;
    let k = config.k;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(0.5, 0.0);

    for n0 in 0..=4u32 {
        let (b1, b2) = if n0 == 0 { (half, half) } else { (one, one) };
        let c0 = sharp_c0(n0, b1, b2, alpha, theta0)?;
        for (j, v) in c0.iter().enumerate() {
            let name = format!("C0_{n0}_{}", j + 1);
            rows.push(CsvRow::value(&name, *v));
            values.push(EmittedValue::new(&name, *v, "closed-form"));
        }
    }
    for n in 0..=3u32 {
        let (c1v, vanishing) = sharp_c1(n, one, one, alpha, theta0);
        for (j, v) in c1v.iter().enumerate() {
            let name = format!("C1_{n}_{}", j + 1);
            rows.push(CsvRow::value(&name, *v));
            values.push(EmittedValue::new(&name, *v, "closed-form"));
        }
        rows.push(CsvRow::scalar(
            format!("C1_{n}_vanishing"),
            if vanishing { 1.0 } else { 0.0 },
        ));
    }
    if config.c1 != 0.0 {
        let v0 = one;
        let k2v0 = k * k * v0;
        let cos2 = (2.0 * theta0).cos();
        let b = if cos2.abs() > 1e-14 {
            let c0 = (1.0 - config.c2 / config.c1) / cos2;
            rows.push(CsvRow::scalar("c0_coeff", c0));
            values.push(EmittedValue::real("c0_coeff", c0, "closed-form"));
            SymMat2 {
                m11: -0.5 * k2v0 * (1.0 - c0),
                m12: Complex64::new(0.0, 0.0),
                m22: -0.5 * k2v0 * (1.0 + c0),
            }
        } else {
            SymMat2 {
                m11: -0.5 * k2v0,
                m12: Complex64::new(0.0, 0.0),
                m22: -0.5 * k2v0,
            }
        };
        let (c2v, deg) = sharp_c2(&b, v0, config.c1, config.c2, alpha, theta0, k)?;
        for (j, v) in c2v.iter().enumerate() {
            let name = format!("C2_{}", j + 1);
            rows.push(CsvRow::value(&name, *v));
            values.push(EmittedValue::new(&name, *v, "closed-form"));
        }
        rows.push(CsvRow::scalar(
            "C2_both_zero",
            if deg.both_zero() { 1.0 } else { 0.0 },
        ));
    }
    // cross-validation of the closed-form moment against 2-D quadrature
    let sector = SectorDomain::new(theta0, config.radius)?;
    let h = *config.h_grid.last().unwrap();
    let params = PhaseParams::new(alpha, h)?;
    decay_delta(&params, &sector)?;
    let grid = build_sector_grid(&sector, config.nr, config.ntheta, &params)?;
    let closed = sector_moment(config.n0, 1, Branch::Principal, alpha, theta0, h);
    let quad = sector_moment_quad(config.n0, 1, Branch::Principal, &params, &grid)?;
    rows.push(CsvRow::value("moment_closed", closed).with_h(h));
    rows.push(CsvRow::value("moment_quadrature", quad).with_h(h));
    let rel = (closed - quad).norm() / quad.norm().max(1e-300);
    rows.push(CsvRow::scalar("moment_rel_gap", rel).with_h(h));
    values.push(EmittedValue::new("moment_closed", closed, "closed-form"));
    values.push(EmittedValue::new("moment_quadrature", quad, "quadrature"));
    timings.push(StageTiming {
        stage: "constants".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    let (header, body) = standard_rows(&rows);
    Ok(CommandOutput {
        header,
        rows: body,
        values,
        grid_checksum: format!("{:016x}", grid.checksum()),
        failure: None,
        timings: Vec::new(),
    })
}

fn run_verdict(config: &ExperimentConfig, timings: &mut Vec<StageTiming>) -> Result<CommandOutput> {
    let t0 = Instant::now();
    let media = medium_from_config(config)?;
    let incident = IncidentDescriptor::Concrete(incident_from_config(config)?);
    let spec = CornerSpec {
        theta0: config.theta0,
        media,
        incident,
    };
    let verdict = classify(&spec)?;
    timings.push(StageTiming {
        stage: "classify".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    let (tag, reason) = match &verdict {
        crate::verdict::ScatterVerdict::AlwaysScatters(tag) => (tag.to_string(), String::new()),
        crate::verdict::ScatterVerdict::Inconclusive(r) => (String::new(), r.clone()),
        crate::verdict::ScatterVerdict::ExcludedClass(r) => (String::new(), r.clone()),
    };
    let values = vec![EmittedValue::real(
        format!("verdict_{}", verdict.outcome_label()),
        1.0,
        "decision-table",
    )];
    Ok(CommandOutput {
        header: vec!["outcome", "item_tag", "reason"],
        rows: vec![vec![verdict.outcome_label().to_string(), tag, reason]],
        values,
        grid_checksum: String::new(),
        failure: None,
        timings: Vec::new(),
    })
}

fn run_witness(config: &ExperimentConfig, timings: &mut Vec<StageTiming>) -> Result<CommandOutput> {
    let t0 = Instant::now();
    let witness = rectangle_witness(config.k1, config.k2, config.a0, config.a1, config.a2)?;
    let report = witness_cross_check(&witness)?;
    timings.push(StageTiming {
        stage: "witness".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    let rows = vec![
        CsvRow::scalar("dirichlet_boundary_max", report.max_dirichlet_boundary),
        CsvRow::scalar("neumann_flux_boundary_max", report.max_neumann_flux_boundary),
        CsvRow::scalar("transmission_value_max", report.max_transmission_value),
        CsvRow::scalar("transmission_flux_max", report.max_transmission_flux),
        CsvRow::scalar("pde_residual_max", report.max_pde_residual),
        CsvRow::scalar(
            "classify_consistent",
            if report.classify_consistent { 1.0 } else { 0.0 },
        ),
        CsvRow::scalar("wavenumber", witness.k),
    ];
    let values = rows
        .iter()
        .map(|r| EmittedValue::real(&r.quantity, r.abs.unwrap(), "closed-form-sampling"))
        .collect();
    let failure = if report.max_residual() > 1e-12 {
        Some(Error::CheckFailed(format!(
            "witness residual {:.3e} exceeds 1e-12",
            report.max_residual()
        )))
    } else if !report.classify_consistent {
        Some(Error::CheckFailed(
            "decision table marked the witness corner as always scattering".into(),
        ))
    } else {
        None
    };
    let (header, body) = standard_rows(&rows);
    Ok(CommandOutput {
        header,
        rows: body,
        values,
        grid_checksum: String::new(),
        failure,
        timings: Vec::new(),
    })
}

fn run_verify_lemma(
    config: &ExperimentConfig,
    timings: &mut Vec<StageTiming>,
) -> Result<CommandOutput> {
    let mut rows = Vec::new();
    let mut values = Vec::new();

    // tail-bound sweep
    let t0 = Instant::now();
    let mut violations = 0usize;
    let mut cases = 0usize;
    for &b0 in &[0.5, 1.0, 2.0] {
        for &b1 in &[0.5, 1.0, 3.0] {
            for &mu in &[0.5, 2.0] {
                for &eps in &[0.5, 1.0, 2.0] {
                    let inputs = GammaBoundInputs::new(
                        b0,
                        Complex64::new(b1, 0.25),
                        Complex64::new(mu, 0.4),
                        eps,
                    )?;
                    let check = incomplete_gamma_bound_check(&inputs, 1e-10)?;
                    cases += 1;
                    if !check.holds {
                        violations += 1;
                    }
                }
            }
        }
    }
    rows.push(CsvRow::scalar("gamma_bound_cases", cases as f64));
    rows.push(CsvRow::scalar("gamma_bound_violations", violations as f64));
    values.push(EmittedValue::real(
        "gamma_bound_violations",
        violations as f64,
        "adaptive-quadrature",
    ));
    timings.push(StageTiming {
        stage: "gamma-sweep".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });

    // Cauchy right-inverse on a fixed 128x96 grid
    let t1 = Instant::now();
    let sector = SectorDomain::new(config.theta0, config.radius)?;
    let params = PhaseParams::new(config.alpha, config.h)?;
    let grid = build_sector_grid(&sector, 128, 96, &params)?;
    let a = config.radius;
    let center = Complex64::from_polar(0.55 * a, 0.0);
    let f = ComplexFieldSample::from_fn(&grid, |z| {
        Complex64::new((-(z - center).norm_sqr() / (0.015 * a * a)).exp(), 0.0)
    });
    let transformed = cauchy_apply(&f, false)?;
    let db = fd_dbar(&transformed);
    let mask = grid.interior_mask(2);
    let err = lp_norm_masked(&db.sub(&f)?, 2.0, &mask)?;
    let base = l2_norm(&f)?;
    let cauchy_rel = err / base;
    rows.push(CsvRow::scalar("cauchy_inverse_rel_l2", cauchy_rel));
    values.push(EmittedValue::real(
        "cauchy_inverse_rel_l2",
        cauchy_rel,
        "fd-oracle",
    ));
    timings.push(StageTiming {
        stage: "cauchy-check".into(),
        seconds: t1.elapsed().as_secs_f64(),
    });

    // operator-norm h-trend
    let t2 = Instant::now();
    let sgrid = build_sector_grid(&sector, config.nr, config.ntheta, &params)?;
    let pot = PotentialSpec::constant_q(&sgrid, Complex64::new(1.0, 0.0));
    let report = verify_smapping(&pot, &config.h_grid, 2.0, &sgrid, config.alpha)?;
    let mut slope_ok = true;
    for probe in &report.probes {
        for row in &probe.rows {
            rows.push(
                CsvRow::scalar(format!("smapping_{}_l2_ratio", probe.name), row.lp_ratio)
                    .with_h(row.h),
            );
        }
        rows.push(
            CsvRow::scalar(format!("smapping_{}_slope", probe.name), probe.lp_slope)
                .with_predicted(1.0)
                .with_slope(probe.lp_slope),
        );
        values.push(EmittedValue::real(
            format!("smapping_{}_slope", probe.name),
            probe.lp_slope,
            "log-log-fit",
        ));
        if !(0.75..=1.25).contains(&probe.lp_slope) {
            slope_ok = false;
        }
    }
    timings.push(StageTiming {
        stage: "smapping".into(),
        seconds: t2.elapsed().as_secs_f64(),
    });

    let failure = if violations > 0 {
        Some(Error::CheckFailed(format!(
            "{violations} tail-bound violations in the {cases}-case sweep"
        )))
    } else if cauchy_rel > 2e-2 {
        Some(Error::CheckFailed(format!(
            "Cauchy right-inverse relative error {cauchy_rel:.3e} exceeds 2e-2"
        )))
    } else if !slope_ok {
        Some(Error::CheckFailed(
            "operator-norm slope left the [0.75, 1.25] window".into(),
        ))
    } else {
        None
    };
    let (header, body) = standard_rows(&rows);
    Ok(CommandOutput {
        header,
        rows: body,
        values,
        grid_checksum: format!("{:016x}", grid.checksum()),
        failure,
        timings: Vec::new(),
    })
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs a validated config: dispatches on the command, writes
/// `report.csv` and `manifest.json` into the output directory, and
/// returns the manifest. Check failures still flush their partial
/// outputs under a FAILED manifest status before surfacing the error.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let out_dir = PathBuf::from(
        config
            .output_path
            .clone()
            .unwrap_or_else(|| "out".to_string()),
    );
    std::fs::create_dir_all(&out_dir)?;

    let exec = || -> Result<CommandOutput> {
        let mut timings = Vec::new();
        let mut out = match config.command {
            Command::CgoBuild => run_cgo_build(config, &mut timings),
            Command::RateSweep => run_rate_sweep(config, &mut timings),
            Command::Constants => run_constants(config, &mut timings),
            Command::Verdict => run_verdict(config, &mut timings),
            Command::Witness => run_witness(config, &mut timings),
            Command::VerifyLemma => run_verify_lemma(config, &mut timings),
        }?;
        out.timings = timings;
        Ok(out)
    };

    let result: Result<CommandOutput> = if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool construction failed: {e}")))?;
        pool.install(exec)
    } else {
        exec()
    };

    match result {
        Ok(output) => {
            write_csv(&out_dir.join("report.csv"), &output.header, &output.rows)?;
            let status = if output.failure.is_some() {
                "FAILED"
            } else {
                "OK"
            };
            let manifest = RunManifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                status: status.to_string(),
                config: config.clone(),
                grid_checksum: output.grid_checksum.clone(),
                timings: output.timings.clone(),
                values: output.values.clone(),
                error: output.failure.as_ref().map(|e| e.to_string()),
            };
            write_manifest(&out_dir.join("manifest.json"), &manifest)?;
            match output.failure {
                Some(err) => Err(err),
                None => Ok(manifest),
            }
        }
        Err(err) => {
            let manifest = RunManifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                status: "FAILED".to_string(),
                config: config.clone(),
                grid_checksum: String::new(),
                timings: Vec::new(),
                values: Vec::new(),
                error: Some(err.to_string()),
            };
            write_manifest(&out_dir.join("manifest.json"), &manifest)?;
            Err(err)
        }
    }
}
