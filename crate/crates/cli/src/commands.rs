use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use asymnet::camc::{
    classify, field_at_rho, field_with_parameter, h_deviation, solve_camc, ClassificationReport, Tolerances,
};
use asymnet::conormal::{propagate, DEFAULT_LELIEUVRE_TOL};
use asymnet::demoulin::{demoulin_report, PAIR_CROSS_TOL};
use asymnet::generators::{
    minimal_from_polylines, perturb_polylines, planar_polylines, random_moutard_net, sphere_from_quadric,
    standard_pair,
};
use asymnet::io::{NetDocument, ObjMesh, Report};
use asymnet::quadric::{canonicalize_pair, QuadricField};
use asymnet::{AsymptoticNet, Quad, Vec3};
use serde_json::json;

use crate::{Cli, Command, GenerateKind, Input};

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let tol = match cli.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => bail!("--tol must be positive and finite, got {t}"),
        Some(t) => Tolerances::uniform(t),
        None => Tolerances::default(),
    };
    match &cli.command {
        Command::Validate(input) => validate(cli, &read_net(input)?, &tol),
        Command::Conormal { input, seed } => conormal(cli, &read_net(input)?, *seed),
        Command::Quadrics { input, rho } => quadrics(cli, &read_net(input)?, *rho),
        Command::Camc { input, a, rho } => camc(cli, &read_net(input)?, &tol, *a, *rho),
        Command::Classify(input) => classify_net(cli, &read_net(input)?, &tol),
        Command::Demoulin(input) => demoulin(cli, &read_net(input)?, &tol),
        Command::Generate { kind, output } => generate(kind, output.as_deref()),
        Command::Export { input, samples, rho, output } => {
            export(&read_net(input)?, &tol, *samples, *rho, output.as_deref())
        }
    }
}

fn read_net(input: &Input) -> Result<AsymptoticNet> {
    let (text, source) = match input.input.as_deref() {
        None => (read_stdin()?, "stdin".to_owned()),
        Some(p) if p == Path::new("-") => (read_stdin()?, "stdin".to_owned()),
        Some(p) => (
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            p.display().to_string(),
        ),
    };
    let doc = NetDocument::parse(&text).with_context(|| format!("parsing {source}"))?;
    Ok(doc.to_net()?)
}

fn read_stdin() -> Result<String> {
    let mut text = String::new();
    io::stdin().read_to_string(&mut text).context("reading stdin")?;
    Ok(text)
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn print_stdout(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e).context("writing stdout"),
        _ => Ok(()),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => print_stdout(text),
    }
}

/// Prints the summary or the JSON report and maps the verdict to an exit code.
fn emit(cli: &Cli, report: Report, text: String) -> Result<ExitCode> {
    let json = report.to_json();
    if let Some(path) = &cli.report {
        fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        print_stdout(&format!("{json}\n"))?;
    } else {
        print_stdout(&text)?;
    }
    Ok(match report.verdict {
        Some(false) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn validate(cli: &Cli, net: &AsymptoticNet, tol: &Tolerances) -> Result<ExitCode> {
    let v = net.validate(tol.cross);
    let text = format!(
        "asymptotic net {}x{}: {}\n  max cross residual {:.3e} (tol {:.1e})\n  min delta {:.6e}\n",
        net.domain().m(),
        net.domain().n(),
        if v.is_valid() { "valid" } else { "INVALID" },
        v.max_cross_residual,
        v.tol,
        v.min_delta
    );
    let report = Report::new("validate")
        .verdict(v.is_valid())
        .residual("max_cross_residual", v.max_cross_residual)
        .residual("min_delta", v.min_delta)
        .result(&v)?;
    emit(cli, report, text)
}

fn conormal(cli: &Cli, net: &AsymptoticNet, seed: Option<[f64; 3]>) -> Result<ExitCode> {
    let tol = cli.tol.unwrap_or(DEFAULT_LELIEUVRE_TOL);
    let field = match seed {
        Some(s) => propagate(net, (0, 0), Vec3::from(s), tol)?,
        None => asymnet::propagate_default(net, tol)?,
    };
    let lelieuvre = field.lelieuvre_residual(net);
    let moutard = field.moutard_angle();
    let omega = field.omega_residual(net).ok();
    let mut text = format!(
        "co-normal field on {} vertices\n  Lelieuvre residual {lelieuvre:.3e}\n  Moutard angle {moutard:.3e} rad\n",
        field.vectors().len()
    );
    match omega {
        Some(o) => {
            text.push_str(&format!("  Omega = det/lambda residual {o:.3e}\n"));
            if o > 1.0 {
                text.push_str("  (det[nu, nu1, nu2] < 0: the seed has the opposite orientation)\n");
            }
        }
        None => text.push_str("  Omega identity not available (degenerate quadrangle)\n"),
    }
    for (q, l) in net.domain().quads().zip(field.lambdas()) {
        text.push_str(&format!("  lambda({}, {}) = {l:.12}\n", q.i, q.j));
    }
    let mut report = Report::new("conormal")
        .residual("lelieuvre", lelieuvre)
        .residual("moutard_angle", moutard)
        .result(&json!({ "vectors": field.vectors(), "lambdas": field.lambdas() }))?;
    if let Some(o) = omega {
        report = report.residual("omega", o);
    }
    emit(cli, report, text)
}

fn field_rows(field: &QuadricField) -> Vec<serde_json::Value> {
    field
        .domain()
        .quads()
        .map(|q| {
            let patch = field.patch(q);
            json!({
                "quad": q,
                "a": patch.parameter(),
                "h": patch.mean_curvature(),
                "omega": patch.affine_metric(),
                "center": patch.center().ok(),
            })
        })
        .collect()
}

fn quadrics(cli: &Cli, net: &AsymptoticNet, rho: f64) -> Result<ExitCode> {
    let field = field_at_rho(net, rho)?;
    let (h, dev) = h_deviation(&field);
    let mut text = format!(
        "compatible field at rho = {rho}\n  max edge residual {:.3e} rad\n  mean H {h:.12}, max relative deviation {dev:.3e}\n",
        field.max_edge_residual()
    );
    for q in net.domain().quads() {
        let p = field.patch(q);
        text.push_str(&format!("  quad ({}, {}): a = {:.12}, H = {:.12}\n", q.i, q.j, p.parameter(), p.mean_curvature()));
    }
    let report = Report::new("quadrics")
        .residual("max_edge_residual", field.max_edge_residual())
        .residual("max_h_deviation", dev)
        .result(&json!({ "rho": rho, "patches": field_rows(&field) }))?;
    emit(cli, report, text)
}

fn camc(cli: &Cli, net: &AsymptoticNet, tol: &Tolerances, a: Option<f64>, rho: Option<f64>) -> Result<ExitCode> {
    let solved = solve_camc(net, tol.camc)?;
    let summary = solved.summary();
    let mut alternative = String::new();
    if let Some(p) = summary.pair {
        alternative = format!(
            "  CAMC pair on edge {:?}: a = {:.15}, b = {:.15}\n  CAMC field H = {:.12}\n",
            p.edge, p.a, p.b, summary.h
        );
    }

    let tested = match (a, rho) {
        (None, None) => None,
        (Some(a), _) => {
            let edge = net.domain().interior_edges().next();
            let (quad, a_net, pair) = match edge {
                Some(edge) => {
                    let cp = canonicalize_pair(net, edge, PAIR_CROSS_TOL)?;
                    (cp.reference, cp.a_from_net(a), Some(cp))
                }
                None => (Quad::new(0, 0), a, None),
            };
            let (rho, field) = field_with_parameter(net, quad, a_net)?;
            let b_bar = pair.as_ref().map(|cp| cp.b_bar_from_net(field.parameter(cp.neighbor)));
            Some((rho, field, Some(a), b_bar))
        }
        (None, Some(rho)) => Some((rho, field_at_rho(net, rho)?, None, None)),
    };

    let Some((rho, field, a, b_bar)) = tested else {
        let text = format!(
            "CAMC: {}\n  max relative H deviation {:.3e} (tol {:.1e})\n{alternative}",
            yes_no(solved.is_camc()),
            summary.max_h_deviation,
            tol.camc
        );
        let report = Report::new("camc")
            .verdict(solved.is_camc())
            .residual("max_h_deviation", summary.max_h_deviation)
            .result(&summary)?;
        return emit(cli, report, text);
    };

    let (h, dev) = h_deviation(&field);
    let is_camc = dev <= tol.camc;
    let mut text = format!("tested field rho = {rho:.12}");
    if let Some(a) = a {
        text.push_str(&format!(", reference a = {a}"));
    }
    if let Some(b) = b_bar {
        text.push_str(&format!(", compatible b_bar = {b:.12}"));
    }
    text.push_str(&format!(
        "\n  CAMC under this field: {}\n  max relative H deviation {dev:.3e} (tol {:.1e})\n",
        yes_no(is_camc),
        tol.camc
    ));
    for q in net.domain().quads() {
        text.push_str(&format!("  quad ({}, {}): H = {:.12}\n", q.i, q.j, field.patch(q).mean_curvature()));
    }
    text.push_str(&format!("alternative (solved), CAMC: {}\n{alternative}", yes_no(solved.is_camc())));
    let report = Report::new("camc")
        .verdict(is_camc)
        .residual("max_h_deviation", dev)
        .result(&json!({
            "tested": {
                "rho": rho,
                "a": a,
                "b_bar": b_bar,
                "h": h,
                "max_h_deviation": dev,
                "is_camc": is_camc,
                "patches": field_rows(&field),
            },
            "solved": summary,
        }))?;
    emit(cli, report, text)
}

/// Most specific class name of a classified net.
pub fn class_name(r: &ClassificationReport) -> &'static str {
    if r.improper_sphere {
        "improper affine sphere"
    } else if r.proper_sphere.is_some() {
        "proper affine sphere"
    } else if r.minimal.is_minimal {
        "affine minimal"
    } else if r.camc.is_camc {
        "CAMC"
    } else {
        "not CAMC"
    }
}

fn classify_net(cli: &Cli, net: &AsymptoticNet, tol: &Tolerances) -> Result<ExitCode> {
    let r = classify(net, tol)?;
    let class = class_name(&r);
    let mut text = format!(
        "class: {class}\n  CAMC: {} (H = {:.12}, deviation {:.3e})\n  minimal: {} (H = 0 field: {}, strips coplanar: {})\n  improper sphere: {}\n  proper sphere: {}\n  Demoulin: {}\n",
        yes_no(r.camc.is_camc),
        r.camc.h,
        r.camc.max_h_deviation,
        yes_no(r.minimal.is_minimal),
        yes_no(r.minimal.camc_h_zero),
        yes_no(r.minimal.strips_coplanar),
        yes_no(r.improper_sphere),
        yes_no(r.proper_sphere.is_some()),
        yes_no(r.demoulin),
    );
    if let Some(s) = &r.proper_sphere {
        text.push_str(&format!(
            "  centre ({:.12}, {:.12}, {:.12}), spread {:.3e}\n",
            s.center.x, s.center.y, s.center.z, s.center_spread
        ));
    }
    if let Some(q) = &r.q_surface {
        text.push_str(&format!("  Q-surface: {}\n", yes_no(q.is_q_surface)));
    }
    if let Some(d) = r.ruled {
        text.push_str(&format!("  ruled: {d:?}\n"));
    }
    let mut report = Report::new("classify")
        .residual("max_h_deviation", r.camc.max_h_deviation)
        .residual("conormal_flatness", r.conormal_flatness)
        .result(&json!({ "class": class, "report": &r }))?;
    if let Some(s) = &r.proper_sphere {
        report = report.residual("center_spread", s.center_spread);
    }
    emit(cli, report, text)
}

fn demoulin(cli: &Cli, net: &AsymptoticNet, tol: &Tolerances) -> Result<ExitCode> {
    let outcome = solve_camc(net, tol.camc)?;
    let field = &outcome.candidate().field;
    let r = demoulin_report(net, field, tol.demoulin)?;
    let mut text = format!(
        "Demoulin: {} (CAMC field: {})\n",
        yes_no(r.is_demoulin),
        yes_no(outcome.is_camc())
    );
    for e in &r.edges {
        let infinite = e.roots.infinite_multiplicity();
        let finite: Vec<String> = e.roots.finite().iter().map(|s| format!("{s:.9}")).collect();
        text.push_str(&format!(
            "  edge {:?}: roots at infinity {infinite}, finite [{}]\n",
            e.edge,
            finite.join(", ")
        ));
    }
    let leading = r.edges.iter().map(|e| e.polynomial.normalized().c2.abs()).fold(0.0, f64::max);
    let report = Report::new("demoulin")
        .verdict(r.is_demoulin)
        .residual("max_leading_coefficient", leading)
        .result(&json!({ "is_camc": outcome.is_camc(), "report": r }))?;
    emit(cli, report, text)
}

fn generate(kind: &GenerateKind, output: Option<&Path>) -> Result<ExitCode> {
    let doc = match kind {
        GenerateKind::Minimal { m, n, magnitude, seed } => {
            let (alpha, beta) = planar_polylines(*m, *n);
            let (alpha, beta) = perturb_polylines(&alpha, &beta, *magnitude, *seed);
            let (net, _) = minimal_from_polylines(&alpha, &beta, Vec3::zeros())?;
            NetDocument::from_net(&net)
                .with_meta("generator", "minimal")
                .with_meta("magnitude", magnitude)
                .with_meta("seed", seed)
        }
        GenerateKind::Sphere { a, grid, vgrid } => {
            let v = vgrid.as_ref().unwrap_or(grid);
            let net = sphere_from_quadric(*a, grid, v)?;
            NetDocument::from_net(&net).with_meta("generator", "sphere").with_meta("a", a)
        }
        GenerateKind::Pair { x1, y1, x2, y2 } => {
            let net = standard_pair(*x1, *y1, *x2, *y2)?;
            NetDocument::from_net(&net)
                .with_meta("generator", "pair")
                .with_meta("coordinates", format!("{x1},{y1},{x2},{y2}"))
        }
        GenerateKind::Moutard { m, n, spread, seed } => {
            let (net, _) = random_moutard_net(*m, *n, *spread, *seed)?;
            NetDocument::from_net(&net)
                .with_meta("generator", "moutard")
                .with_meta("spread", spread)
                .with_meta("seed", seed)
        }
    };
    write_output(output, &doc.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn export(
    net: &AsymptoticNet,
    tol: &Tolerances,
    samples: usize,
    rho: Option<f64>,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let field = match rho {
        Some(rho) => field_at_rho(net, rho)?,
        None => {
            let outcome = solve_camc(net, tol.camc)?;
            if !outcome.is_camc() {
                eprintln!("note: net is not CAMC; exporting the solver's candidate field");
            }
            outcome.into_candidate().field
        }
    };
    let mesh = ObjMesh::build(net, &field, samples)?;
    write_output(output, &mesh.to_obj_string())?;
    eprintln!(
        "exported {} vertices, {} faces, {} control polylines",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.lines.len()
    );
    Ok(ExitCode::SUCCESS)
}
