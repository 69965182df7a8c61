use std::fmt::Write as _;
use std::io::Read;

use cmc_glue::floquet::indicial_spectrum;
use cmc_glue::gluing::{assemble_glued_mesh, match_cauchy_data, Base, CauchyPair, GlueOptions};
use cmc_glue::harmonic::{
    dtn_matching, dtn_matching_inverse, exterior_extension, halfcylinder_extension,
    interior_extension, CircleFourier,
};
use cmc_glue::jacobi::{geometric_jacobi, JacobiKind};
use cmc_glue::meshio::{export_mesh, MeshFormat};
use cmc_glue::verify::{run_suite, Suite, VerifyConfig, DEFAULT_TAU_GRID};
use cmc_glue::{embedding::mesh_delaunay, solve_profile, DelaunayParam, Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::{
    emit, output_path, BaseArg, GlueArgs, HarmonicArgs, HarmonicOp, IndicialArgs, JacobiArgs,
    MatchArgs, MeshArgs, MeshFormatArg, Outcome, ProfileArgs, VerifyArgs,
};

/// CSV floats: 17 significant digits, `.` decimal, no negative zero.
fn f(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("{what}: '{x}' is not a number")))
        })
        .collect()
}

fn read_input(src: &str) -> Result<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(src)?)
    }
}

fn positive_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1e-2 {
        Ok(())
    } else {
        Err(bad(format!("tol must lie in (0, 1e-2), got {tol}")))
    }
}

fn envelope<T: Serialize>(command: &str, config: serde_json::Value, body: T) -> Result<Vec<u8>> {
    let doc = json!({
        "schema_version": cmc_glue::verify::SCHEMA_VERSION,
        "tool": "cmc-glue",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": body,
    });
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

pub fn profile(a: &ProfileArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let p = solve_profile(DelaunayParam::new(a.tau)?, a.tol)?;
    let mut text = p.to_json()?;
    text.push('\n');
    emit(a.common.out.as_deref(), text.as_bytes())?;
    Ok(Outcome::Done)
}

pub fn mesh(a: &MeshArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let (rows, cols) = a
        .res
        .split_once(['x', 'X'])
        .and_then(|(r, c)| {
            Some((
                r.trim().parse::<usize>().ok()?,
                c.trim().parse::<usize>().ok()?,
            ))
        })
        .ok_or_else(|| bad(format!("--res expects NxM, got '{}'", a.res)))?;
    let p = solve_profile(DelaunayParam::new(a.tau)?, a.tol)?;
    let (s0, s1) = match &a.s_range {
        Some(r) => match parse_list(r, "--s-range")?[..] {
            [x, y] => (x, y),
            _ => return Err(bad("--s-range expects a,b")),
        },
        None if p.param().is_cylinder() => (0.0, std::f64::consts::TAU),
        None => (0.0, p.period()),
    };
    let m = mesh_delaunay(&p, s0, s1, rows, cols)?;
    let fmt = match a.format {
        MeshFormatArg::Obj => MeshFormat::Obj,
        MeshFormatArg::Ply => MeshFormat::Ply,
    };
    emit(a.common.out.as_deref(), &export_mesh(&m, fmt)?)?;
    Ok(Outcome::Done)
}

pub fn indicial(a: &IndicialArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let p = solve_profile(DelaunayParam::new(a.tau)?, a.tol)?;
    let spec = indicial_spectrum(&p, a.jmax, a.tol)?;
    let mut csv = String::from("j,gamma,trace,det,classification\n");
    for m in &spec {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            m.j,
            f(m.gamma),
            f(m.trace_t),
            f(m.det_t),
            m.classification.as_str()
        );
    }
    emit(a.common.out.as_deref(), csv.as_bytes())?;
    Ok(Outcome::Done)
}

pub fn jacobi(a: &JacobiArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let kind: JacobiKind = a.field.parse()?;
    let p = solve_profile(DelaunayParam::new(a.tau)?, a.tol)?;
    let field = geometric_jacobi(&p, kind)?;
    let res = field.residual(&p)?;
    let mut csv = String::from("s,phi,residual\n");
    for ((s, phi), r) in field.s.iter().zip(&field.phi).zip(&res) {
        let _ = writeln!(csv, "{},{},{}", f(*s), f(*phi), f(*r));
    }
    emit(a.common.out.as_deref(), csv.as_bytes())?;
    Ok(Outcome::Done)
}

pub fn harmonic(a: &HarmonicArgs) -> Result<Outcome> {
    let h = CircleFourier::from_json(&read_input(&a.input)?)?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| bad(format!("--op needs {flag}")));
    let body = match a.op {
        HarmonicOp::Interior => json!(interior_extension(&h, a.rho, need(a.r, "--r")?)?),
        HarmonicOp::Exterior => json!(exterior_extension(&h, a.rho, need(a.r, "--r")?)?),
        HarmonicOp::Halfcyl => json!(halfcylinder_extension(&h, need(a.s, "--s")?)?),
        HarmonicOp::Dtn if a.inverse => json!(dtn_matching_inverse(&h)?),
        HarmonicOp::Dtn => json!(dtn_matching(&h)?),
    };
    let mut out = serde_json::to_vec(&body)?;
    out.push(b'\n');
    emit(a.common.out.as_deref(), &out)?;
    Ok(Outcome::Done)
}

pub fn matching(a: &MatchArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let d: CauchyPair = serde_json::from_str(&read_input(&a.delaunay_corr)?)?;
    let s: CauchyPair = serde_json::from_str(&read_input(&a.surface_corr)?)?;
    let radius = match a.radius {
        Some(r) => r,
        None => solve_profile(DelaunayParam::new(a.tau)?, a.tol)?
            .neck_geometry()
            .r_tau
            .abs(),
    };
    let result = match_cauchy_data(&d, &s, a.tau, radius)?;
    let config = json!({ "tau": a.tau, "radius": radius, "tol": a.tol });
    emit(a.common.out.as_deref(), &envelope("match", config, result)?)?;
    Ok(Outcome::Done)
}

pub fn glue(a: &GlueArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let point = match parse_list(&a.point, "--point")?[..] {
        [x, y, z] => [x, y, z],
        _ => return Err(bad("--point expects x,y,z")),
    };
    let base = match a.base {
        BaseArg::Sphere => Base::Sphere,
        BaseArg::Delaunay => {
            let tau = a
                .base_tau
                .ok_or_else(|| bad("--base delaunay needs --base-tau"))?;
            let s = match a.base_s {
                Some(s) => s,
                None => 4.0 * solve_profile(DelaunayParam::new(tau)?, a.tol)?.s_tau(),
            };
            Base::Delaunay { tau, s }
        }
    };
    let format: MeshFormat = a
        .out
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("obj")
        .parse()?;
    let opts = GlueOptions {
        resolution: a.resolution,
        point,
        profile_tol: a.tol,
    };
    let glued = assemble_glued_mesh(&base, a.tau, &opts)?;
    emit(Some(&a.out), &export_mesh(&glued.mesh, format)?)?;
    let config = json!({
        "base": base,
        "tau": a.tau,
        "resolution": a.resolution,
        "point": point,
        "tol": a.tol,
        "out": output_path(&a.out),
    });
    let body = json!({
        "interface_mismatch": glued.report.interface_mismatch,
        "interior_H_error": glued.report.interior_h_error,
        "report": glued.report,
        "state": glued.state,
    });
    emit(a.report.as_deref(), &envelope("glue", config, body)?)?;
    Ok(Outcome::Done)
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    positive_tol(a.tol)?;
    let suite: Suite = a.suite.parse()?;
    let tau_grid = match &a.tau_grid {
        Some(g) => parse_list(g, "--tau-grid")?,
        None => DEFAULT_TAU_GRID.to_vec(),
    };
    for &t in &tau_grid {
        DelaunayParam::new(t)?;
    }
    let cfg = VerifyConfig {
        suite,
        tau_grid,
        seed: a.seed,
        profile_tol: a.tol,
        glue_resolution: a.glue_resolution,
    };
    let report = run_suite(&cfg);
    let mut out = serde_json::to_vec_pretty(&report)?;
    out.push(b'\n');
    emit(a.common.out.as_deref(), &out)?;
    if report.all_passed() {
        Ok(Outcome::Done)
    } else {
        Ok(Outcome::VerificationFailed(
            report
                .failures()
                .map(|c| match c.tau {
                    Some(t) => format!("{}/{} (tau = {t})", c.suite, c.name),
                    None => format!("{}/{}", c.suite, c.name),
                })
                .collect(),
        ))
    }
}
