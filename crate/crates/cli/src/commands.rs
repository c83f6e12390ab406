use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use bidisk_ar::ar2d::{self, design_filters, extend_covariance_2d, spectral_density, DesignOptions, StabilityCertificate};
use bidisk_ar::covariance::IndexRect;
use bidisk_ar::fourier::unit_root;
use bidisk_ar::linalg::{self, CMat};
use bidisk_ar::nehari::{nehari_2d_unchecked, solve_nehari_1d, solve_nehari_2d, HankelData1D, LittleHankelData, NehariSolution2D};
use bidisk_ar::poly::MatrixPolynomial2D;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::doc::{entry, poly_entries, to_rows, DesignDoc, GridDoc, Hankel1Doc, Hankel2Doc, TableDoc};
use crate::{Command, Failure, JobConfig};

const DEFAULT_SPECTRUM_GRID: usize = 64;
const DEFAULT_TRUNC_1D: usize = 16;
const DEFAULT_TRUNC_2D: usize = 6;
const DEFAULT_REACH_2D: usize = 4;

pub fn run(cmd: Command, cfg: &JobConfig) -> Result<(), Failure> {
    match cmd {
        Command::Check => check(cfg),
        Command::Design => design(cfg),
        Command::Extend => extend(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Nehari1d => nehari1d(cfg),
        Command::Nehari2d => nehari2d(cfg),
    }
}

fn read_input(cfg: &JobConfig) -> Result<String, Failure> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Failure::input("--input is required".into()))?;
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// serde_json's messages already carry line and column.
fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input(format!("malformed input: {e}")))
}

fn write_output(cfg: &JobConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("standard output: {e}"))),
    }
}

fn write_json(cfg: &JobConfig, v: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("documents serialize");
    text.push('\n');
    write_output(cfg, &text)
}

fn matrix(m: &CMat) -> Value {
    let (re, im) = to_rows(m);
    json!({ "re": re, "im": im })
}

fn certificate(c: &StabilityCertificate) -> Value {
    json!({
        "grid_n": c.grid_n,
        "margin": c.margin,
        "min_modulus_w_roots": c.min_modulus_w_roots,
        "min_modulus_z_roots": c.min_modulus_z_roots,
        "passed": c.passed,
    })
}

fn check(cfg: &JobConfig) -> Result<(), Failure> {
    let grid = parse::<GridDoc>(&read_input(cfg)?)?.to_grid()?;
    let r = ar2d::check_conditions(&grid, cfg.tol_comm, cfg.tol_pd)?;
    write_json(
        cfg,
        &json!({
            "feasible": r.feasible,
            "comm_residual": r.comm_residual,
            "tol_comm": r.tol_comm,
            "tol_pd": r.tol_pd,
            "phi_min_eig": r.phi_min_eig,
            "pd_min_eig1": r.pd_min_eig1,
            "pd_min_eig2": r.pd_min_eig2,
            "corner_c_minus_nm": matrix(&r.corner_minus_nm),
        }),
    )?;
    if r.feasible {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: format!("infeasible: commutation residual {:.3e}", r.comm_residual),
        })
    }
}

fn design_doc(cfg: &JobConfig, grid: &GridDoc) -> Result<DesignDoc, Failure> {
    let grid = grid.to_grid()?;
    let opts = DesignOptions {
        tol_comm: cfg.tol_comm,
        tol_pd: cfg.tol_pd,
        grid_n: cfg.grid_n.unwrap_or(ar2d::DEFAULT_GRID_N),
        margin: cfg.margin,
        ..DesignOptions::default()
    };
    let ds = design_filters(&grid, opts)?;
    let f = &ds.feasibility;
    Ok(DesignDoc {
        d: ds.p.d,
        n: ds.p.n,
        m: ds.p.m,
        p: poly_entries(&ds.p),
        r: poly_entries(&ds.r),
        report: Some(json!({
            "comm_residual": f.comm_residual,
            "pd_min_eig1": f.pd_min_eig1,
            "pd_min_eig2": f.pd_min_eig2,
            "corner_c_minus_nm": matrix(&f.corner_minus_nm),
            "p_structure_deviation": ds.p_structure_deviation,
            "r_structure_deviation": ds.r_structure_deviation,
            "p_stability": certificate(&ds.p_stability),
            "r_stability": certificate(&ds.r_stability),
        })),
    })
}

fn design(cfg: &JobConfig) -> Result<(), Failure> {
    let grid: GridDoc = parse(&read_input(cfg)?)?;
    write_json(cfg, &design_doc(cfg, &grid)?)
}

/// Accepts either a `design` output (has `p`) or a correlation grid.
fn load_filter(cfg: &JobConfig) -> Result<MatrixPolynomial2D, Failure> {
    let text = read_input(cfg)?;
    let value: Value = parse(&text)?;
    let ds = if value.get("p").is_some() {
        parse::<DesignDoc>(&text)?
    } else {
        design_doc(cfg, &parse(&text)?)?
    };
    ds.p()
}

fn extend(cfg: &JobConfig) -> Result<(), Failure> {
    let p = load_filter(cfg)?;
    let reach = cfg.extend_j.unwrap_or(2 * p.n.max(p.m)) as i64;
    let rect = IndexRect::centered(reach, reach);
    let table = extend_covariance_2d(&p, rect, cfg.fft_n)?;
    let entries = rect.iter().map(|k| entry(k.0, k.1, &table.entries[&k])).collect();
    write_json(
        cfg,
        &TableDoc {
            d: p.d,
            z_range: [-reach, reach],
            w_range: [-reach, reach],
            entries,
        },
    )
}

fn spectrum(cfg: &JobConfig) -> Result<(), Failure> {
    let p = load_filter(cfg)?;
    let n = cfg.grid_n.unwrap_or(DEFAULT_SPECTRUM_GRID);
    let mut out = String::from("theta_z,theta_w,entry_row,entry_col,re,im\n");
    for tz in 0..n {
        for tw in 0..n {
            let f = spectral_density(&p, unit_root(tz, n), unit_root(tw, n))?;
            let (az, aw) = (angle(tz, n), angle(tw, n));
            for r in 0..p.d {
                for c in 0..p.d {
                    let v = f[(r, c)];
                    writeln!(out, "{az},{aw},{r},{c},{},{}", v.re, v.im).expect("string write");
                }
            }
        }
    }
    write_output(cfg, &out)
}

fn angle(t: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * t as f64 / n as f64
}

fn nehari1d(cfg: &JobConfig) -> Result<(), Failure> {
    let doc: Hankel1Doc = parse(&read_input(cfg)?)?;
    let n = cfg.trunc_n.unwrap_or(DEFAULT_TRUNC_1D);
    let j = cfg.extend_j.unwrap_or(n);
    let h = HankelData1D::new(doc.blocks()?, n)?;
    let sol = solve_nehari_1d(&h, j)?;
    let coefficients: Vec<Value> = (-(j as i64)..sol.given.len() as i64)
        .map(|k| {
            let mut v = matrix(&sol.coefficient(k));
            v["k"] = json!(k);
            v
        })
        .collect();
    write_json(
        cfg,
        &json!({
            "n": sol.n,
            "j": j,
            "hankel_norm": sol.hankel_norm,
            "disagreement": sol.disagreement,
            "yw_residual": sol.yw_residual,
            "sup_norm": sol.sup_norm(cfg.fft_n),
            "delta0": matrix(&sol.delta0),
            "alpha0": matrix(&sol.alpha0),
            "coefficients": coefficients,
        }),
    )
}

fn nehari2d_report(sol: &NehariSolution2D, accepted: bool) -> Value {
    let gammas: Vec<_> = sol.gammas.iter().map(|(k, g)| entry(k.0, k.1, g)).collect();
    json!({
        "accepted": accepted,
        "d": sol.d,
        "j": sol.j,
        "comm_residual": sol.comm_residual,
        "section_norm": sol.section_norm,
        "claim_d_deviation": sol.claim_d_deviation,
        "claim_a_deviation": sol.claim_a_deviation,
        "hankel_deviation": sol.hankel_deviation,
        "sup_norm": sol.sup_norm,
        "gammas": gammas,
    })
}

fn nehari2d(cfg: &JobConfig) -> Result<(), Failure> {
    let doc: Hankel2Doc = parse(&read_input(cfg)?)?;
    let (k, pairs) = doc.square()?;
    let n = cfg.trunc_n.unwrap_or(DEFAULT_TRUNC_2D);
    let j = cfg.extend_j.unwrap_or(DEFAULT_REACH_2D);
    let g = LittleHankelData::from_fn(doc.d, k, n, n, |a, b| {
        pairs
            .get(&(a as i64, b as i64))
            .cloned()
            .unwrap_or_else(|| linalg::zeros(doc.d, doc.d))
    })?;
    match solve_nehari_2d(&g, j, cfg.tol) {
        Ok(sol) => write_json(cfg, &nehari2d_report(&sol, true)),
        Err(e) => {
            // Still emit the diagnostics when only the gates failed.
            if let Ok(sol) = nehari_2d_unchecked(&g, j) {
                write_json(cfg, &nehari2d_report(&sol, false))?;
            }
            Err(e.into())
        }
    }
}
