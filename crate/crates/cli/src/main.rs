mod args;
mod output;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use spinduality::bridge::{
    connected_path_correlation, edges_to_angles, moment_theorem, verify_angle_maps,
    verify_fundamental_equality, verify_mean_spin_bridge, FUNDAMENTAL_DEGREE,
};
use spinduality::criticality::{
    critical_y, emit_curve, isoradial_check, parse_triangle_pairs, stationary_pair,
    write_curve_csv, ELLIPTIC_CONVENTION,
};
use spinduality::graph::{Orientation, PlanarGraph};
use spinduality::grassmann::{z_f, z_f_complex, z_f_squared};
use spinduality::ising::{
    dimer_p_gamma, nn_correlation, p_gamma, spin_correlation, z_ising_bruteforce,
};
use spinduality::kasteleyn::{
    all_kasteleyn_orientations, check_cycle_lemma, flip_orbit, is_kasteleyn, make_kasteleyn,
    orientation_text,
};
use spinduality::report::Check;
use spinduality::spinnet::{
    self, convert, evaluate_tensor, verify_comparison_theorem, whitehead_move, Normalization,
};
use spinduality::suite;
use spinduality::{Error, Result};

use args::*;
use output::{checks_json, emit, poly_json, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(names)) => {
            eprintln!("verification failed: {}", names.join(", "));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let json = cli.json;
    match &cli.command {
        Command::Graph(action) => graph_cmd(json, &action.source().load()?, action),
        Command::Kasteleyn(action) => kasteleyn_cmd(json, &action.source().load()?, action),
        Command::Ising(c) => ising_cmd(json, c),
        Command::Grassmann { source, form } => {
            let g = source.load()?;
            let o = make_kasteleyn(&g)?;
            let (z, want, label) = match form {
                Form::Real => (z_f(&g, &o)?, p_gamma(&g)?, "p_gamma"),
                Form::Complex => (z_f_complex(&g, &o)?, z_f(&g, &o)?, "z_f"),
                Form::Squared => {
                    let p = z_f(&g, &o)?;
                    (z_f_squared(&g, &o)?, &p * &p, "z_f^2")
                }
            };
            let mut c = Check::new(format!("{:?} form = {}", form, label).to_lowercase());
            c.record(z == want, || format!("got {}", z));
            let text = format!("{}\n{}", z.to_canonical_text().trim_end(), c);
            emit(
                json,
                "grassmann",
                json!({"form": form, "z": poly_json(&z), "check": c}),
                &text,
            );
            Ok(Outcome::from_checks(&[c]))
        }
        Command::Spinnet(c) => spinnet_cmd(json, c),
        Command::Bridge(c) => bridge_cmd(json, c),
        Command::Crit(c) => crit_cmd(json, c),
        Command::VerifyAll { source, couplings } => {
            let g = source.load()?;
            let y = couplings.resolve(&g)?;
            let checks = suite::verify_all(&g, &y);
            let text = checks
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            emit(json, "verify-all", checks_json(&checks), &text);
            Ok(Outcome::from_checks(&checks))
        }
    }
}

fn graph_cmd(json: bool, g: &PlanarGraph, action: &GraphAction) -> Result<Outcome> {
    match action {
        GraphAction::Info { .. } => {
            let text = format!(
                "vertices {}\nedges {}\nfaces {}\nfirst Betti number {}",
                g.num_vertices(),
                g.num_edges(),
                g.num_faces(),
                g.num_edges() + 1 - g.num_vertices()
            );
            let faces: Vec<Vec<usize>> = g.faces().to_vec();
            emit(
                json,
                "graph info",
                json!({"vertices": g.num_vertices(), "edges": g.num_edges(), "faces": faces}),
                &text,
            );
        }
        GraphAction::Text { .. } => emit(
            json,
            "graph text",
            json!({"text": g.to_text()}),
            g.to_text().trim_end(),
        ),
        GraphAction::Canonical { .. } => {
            let c = g.canonical_form();
            emit(json, "graph canonical", json!({"canonical": c}), &c);
        }
        GraphAction::Cycles { .. } => {
            let cycles: Vec<Vec<usize>> = g
                .simple_cycles()?
                .iter()
                .map(|c| c.edges().to_vec())
                .collect();
            let text = cycles
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n");
            emit(json, "graph cycles", json!({"cycles": cycles}), &text);
        }
    }
    Ok(Outcome::Pass)
}

fn kasteleyn_cmd(json: bool, g: &PlanarGraph, action: &KasteleynAction) -> Result<Outcome> {
    match action {
        KasteleynAction::Make { .. } => {
            let o = make_kasteleyn(g)?;
            let text = orientation_text(g, &o);
            emit(
                json,
                "kasteleyn make",
                json!({"reversed": o.0, "text": text}),
                text.trim_end(),
            );
            Ok(Outcome::Pass)
        }
        KasteleynAction::Check { .. } => {
            let r = is_kasteleyn(g, &Orientation::stored(g));
            let mut c = Check::new("stored orientation is Kasteleyn");
            for (f, n) in r.face_counts.iter().enumerate() {
                c.record(n % 2 == 1, || {
                    format!("face {} has {} clockwise edges", f, n)
                });
            }
            emit(
                json,
                "kasteleyn check",
                json!({"is_kasteleyn": r.is_kasteleyn, "face_counts": r.face_counts}),
                &c.to_string(),
            );
            Ok(Outcome::from_checks(&[c]))
        }
        KasteleynAction::Lemma { .. } => {
            let o = make_kasteleyn(g)?;
            let r = check_cycle_lemma(g, &o)?;
            let mut c = Check::new("cycle parity lemma");
            c.cases = r.cycles_checked;
            if let Some(v) = &r.violation {
                c.fail(format!(
                    "cycle {:?} with outer face {}: {:?}",
                    v.cycle, v.outer_face, v.stats
                ));
            }
            emit(json, "kasteleyn lemma", json!({"check": c}), &c.to_string());
            Ok(Outcome::from_checks(&[c]))
        }
        KasteleynAction::Scan { .. } => {
            let o = make_kasteleyn(g)?;
            let orbit = flip_orbit(g, &o)?;
            let all = all_kasteleyn_orientations(g)?;
            let mut c = Check::new("flip orbit = all Kasteleyn orientations");
            c.record(orbit == all, || {
                format!("orbit {} vs scan {}", orbit.len(), all.len())
            });
            let c = c.with_detail(format!("{} orientations", all.len()));
            emit(
                json,
                "kasteleyn scan",
                json!({"orientations": all, "check": c}),
                &c.to_string(),
            );
            Ok(Outcome::from_checks(&[c]))
        }
    }
}

fn ising_cmd(json: bool, c: &IsingCmd) -> Result<Outcome> {
    match c {
        IsingCmd::Z { source, couplings } => {
            let g = source.load()?;
            let y = couplings.resolve(&g)?;
            let z = z_ising_bruteforce(&g, &y)?;
            let p = p_gamma(&g)?.eval(&y);
            let text = format!("Z / (2^V prod cosh y) = {}\nP(Y) = {}", z, p);
            emit(
                json,
                "ising z",
                json!({"z_normalized": z.to_string(), "p": p.to_string()}),
                &text,
            );
        }
        IsingCmd::Corr {
            source,
            couplings,
            edge,
            vertices,
        } => {
            let g = source.load()?;
            let y = couplings.resolve(&g)?;
            let (what, v) = match (edge, vertices) {
                (Some(e), _) => (
                    format!("<sigma sigma> on edge {}", e),
                    nn_correlation(&g, &y, *e)?,
                ),
                (None, Some(vs)) => (
                    format!("<prod sigma> on {:?}", vs),
                    spin_correlation(&g, &y, vs)?,
                ),
                (None, None) => return Err(Error::Invalid("give --edge or --vertices".into())),
            };
            emit(
                json,
                "ising corr",
                json!({"what": what, "value": v.to_string()}),
                &format!("{} = {}", what, v),
            );
        }
        IsingCmd::P { source } => {
            let p = p_gamma(&source.load()?)?;
            emit(
                json,
                "ising p",
                poly_json(&p),
                p.to_canonical_text().trim_end(),
            );
        }
        IsingCmd::Dimer { source } => {
            let g = source.load()?;
            let o = make_kasteleyn(&g)?;
            let d = dimer_p_gamma(&g, &o)?;
            let mut c = Check::new("dimer pfaffian = loop sum");
            c.record(d == p_gamma(&g)?, || format!("pfaffian {}", d));
            let text = format!("{}\n{}", d.to_canonical_text().trim_end(), c);
            emit(
                json,
                "ising dimer",
                json!({"pfaffian": poly_json(&d), "check": c}),
                &text,
            );
            return Ok(Outcome::from_checks(&[c]));
        }
    }
    Ok(Outcome::Pass)
}

fn orientation_for(g: &PlanarGraph, stored: bool) -> Result<Orientation> {
    if stored {
        Ok(Orientation::stored(g))
    } else {
        make_kasteleyn(g)
    }
}

fn spinnet_cmd(json: bool, c: &SpinnetCmd) -> Result<Outcome> {
    match c {
        SpinnetCmd::Eval {
            source,
            colors,
            norm,
            stored_orientation,
        } => {
            let g = source.load()?;
            let o = orientation_for(&g, *stored_orientation)?;
            let t = evaluate_tensor(&g, &o, colors)?;
            let r = if *norm == Normalization::Tensor {
                t
            } else {
                convert(&t, &g, colors, *norm)?
            };
            let mut text = format!("{} = {} (error bound {:.3e})", norm, r.value, r.error_bound);
            if *norm == Normalization::Integral {
                let exact = spinnet::evaluate_integral_exact(&g, colors)?;
                if let Some(q) = &exact.exact {
                    text.push_str(&format!("\nseries coefficient = {}", q));
                }
            }
            emit(json, "spinnet eval", json!(r), &text);
        }
        SpinnetCmd::Series { source, degree } => {
            let s = spinnet::z_spin_series(&source.load()?, *degree)?;
            emit(
                json,
                "spinnet series",
                poly_json(s.poly()),
                s.poly().to_canonical_text().trim_end(),
            );
        }
        SpinnetCmd::Compare {
            source,
            max_color,
            stored_orientation,
        } => {
            let g = source.load()?;
            let o = orientation_for(&g, *stored_orientation)?;
            let r = verify_comparison_theorem(&g, &o, *max_color)?;
            let mut c = Check::new(format!(
                "tensor x normalization = series (colors <= {})",
                max_color
            ));
            c.cases = r.colorings_checked;
            if let Some(m) = r.mismatches.first() {
                c.fail(format!(
                    "coloring {:?}: {} vs {}",
                    m.coloring, m.tensor_integral, m.series
                ));
            }
            let c = c.with_detail(format!("max error {:.2e}", r.max_abs_error));
            let mut text = c.to_string();
            if let Some(w) = &r.only_if {
                text.push_str(&format!(
                    "\nonly-if witness: flip edge {}, coloring {:?}: {} vs {}",
                    w.flipped_edge, w.coloring, w.tensor_integral, w.series
                ));
            }
            emit(json, "spinnet compare", json!(r), &text);
            return Ok(Outcome::from_checks(&[c]));
        }
        SpinnetCmd::Whitehead { source, edge } => {
            let g = source.load()?;
            let o = make_kasteleyn(&g)?;
            let m = whitehead_move(&g, &o, *edge)?;
            let text = format!(
                "{}\nflipped edge: {}\ncanonical form: {}",
                m.graph.to_text().trim_end(),
                m.flipped_edge.map_or("none".to_string(), |e| e.to_string()),
                m.graph.canonical_form()
            );
            emit(
                json,
                "spinnet whitehead",
                json!({"graph": m.graph.to_text(), "flipped_edge": m.flipped_edge, "neighbours": m.neighbours}),
                &text,
            );
        }
    }
    Ok(Outcome::Pass)
}

fn bridge_cmd(json: bool, c: &BridgeCmd) -> Result<Outcome> {
    match c {
        BridgeCmd::Verify {
            source,
            couplings,
            all,
        } => {
            let g = source.load()?;
            let y = couplings.resolve(&g)?;
            let mut checks = vec![suite::fundamental(&g, &y)];
            let edges: Vec<usize> = if *all {
                (0..g.num_edges()).collect()
            } else {
                vec![0]
            };
            for &e in &edges {
                let r = verify_mean_spin_bridge(&g, &y, e)?;
                checks.extend(r.checks.into_iter().map(|mut k| {
                    k.name = format!("{} (edge {})", k.name, e);
                    k
                }));
                match moment_theorem(&g, &y, e, suite::MOMENT_ORDER) {
                    Ok(m) => checks.extend(m.checks.into_iter().map(|mut k| {
                        k.name = format!("{} (edge {})", k.name, e);
                        k
                    })),
                    Err(err) => {
                        let mut k = Check::new(format!("moment theorem (edge {})", e));
                        k.fail(err.to_string());
                        checks.push(k);
                    }
                }
            }
            // angle couplings need Y >= 0
            match verify_angle_maps(&g, &y) {
                Ok(v) => checks.extend(v),
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
            let text = checks
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            emit(json, "bridge verify", checks_json(&checks), &text);
            Ok(Outcome::from_checks(&checks))
        }
        BridgeCmd::Fundamental { source, couplings } => {
            let g = source.load()?;
            let r = verify_fundamental_equality(&g, &couplings.resolve(&g)?, FUNDAMENTAL_DEGREE)?;
            let text = format!(
                "P = {}\n1/P^2 = {}\nseries sum (degree {}) = {}\nseries error = {:.3e}\ntail bound = {:.3e}\nroot radius = {}",
                r.p, r.z_spin, r.degree, r.series_sum, r.series_error, r.tail_bound, r.root_radius
            );
            let pass = r.exact_product_is_one && r.series_agrees;
            emit(json, "bridge fundamental", json!(r), &text);
            Ok(if pass {
                Outcome::Pass
            } else {
                Outcome::Fail(vec!["fundamental equality".into()])
            })
        }
        BridgeCmd::Angles { source, couplings } => {
            let g = source.load()?;
            let x = edges_to_angles(&g, &couplings.resolve(&g)?)?;
            let text = x
                .iter()
                .enumerate()
                .map(|(h, v)| format!("X[{}] = {}", h, v))
                .collect::<Vec<_>>()
                .join("\n");
            let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            emit(json, "bridge angles", json!({"angles": xs}), &text);
            Ok(Outcome::Pass)
        }
        BridgeCmd::Moments {
            source,
            couplings,
            edge,
            order,
        } => {
            let g = source.load()?;
            let r = moment_theorem(&g, &couplings.resolve(&g)?, *edge, *order)?;
            let list = |v: &[spinduality::exact::Rational]| {
                v.iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let mut text = format!(
                "<j> = {}\nkappa = [{}]\nmu = [{}]\nmoments <(2j)^n> = [{}]\nP(2j = n) = [{}]\nsigned: {}",
                r.mean_j,
                list(&r.kappa),
                list(&r.mu),
                list(&r.moments_stirling),
                list(&r.distribution),
                r.is_signed
            );
            for c in &r.checks {
                text.push_str(&format!("\n{}", c));
            }
            emit(json, "bridge moments", json!(r), &text);
            Ok(Outcome::from_checks(&r.checks))
        }
        BridgeCmd::Path {
            source,
            couplings,
            edges,
        } => {
            let g = source.load()?;
            let r = connected_path_correlation(&g, &couplings.resolve(&g)?, edges)?;
            let text = format!(
                "vertices {:?}\nising cumulant = {}\ncolor side = {}\ncumulant identity: {}\nising cut sum = {}\ncolor cut sum = {}\ncut-sum identity: {}",
                r.vertices,
                r.ising_cumulant,
                r.spin_cumulant_side,
                r.cumulant_identity_holds,
                r.ising_cut_sum,
                r.spin_cut_sum_side,
                r.cut_sum_identity_holds
            );
            let pass = r.cumulant_identity_holds;
            emit(json, "bridge path", json!(r), &text);
            Ok(if pass {
                Outcome::Pass
            } else {
                Outcome::Fail(vec!["path cumulant identity".into()])
            })
        }
    }
}

fn crit_cmd(json: bool, c: &CritCmd) -> Result<Outcome> {
    match c {
        CritCmd::Hex {
            from,
            to,
            step,
            out,
        } => {
            let pts = emit_curve(*from, *to, *step)?;
            let mut buf = Vec::new();
            write_curve_csv(&mut buf, &pts).map_err(|e| Error::Invalid(e.to_string()))?;
            let flagged = pts.iter().filter(|p| p.near_critical).count();
            match out {
                Some(path) => {
                    fs::write(path, &buf)
                        .map_err(|e| Error::Invalid(format!("{}: {}", path.display(), e)))?;
                    let text = format!(
                        "wrote {} rows to {} ({} near-critical)",
                        pts.len(),
                        path.display(),
                        flagged
                    );
                    emit(
                        json,
                        "crit hex",
                        json!({"rows": pts.len(), "near_critical": flagged, "elliptic_convention": ELLIPTIC_CONVENTION}),
                        &text,
                    );
                }
                None => emit(
                    json,
                    "crit hex",
                    json!({"elliptic_convention": ELLIPTIC_CONVENTION, "points": pts}),
                    String::from_utf8_lossy(&buf).trim_end(),
                ),
            }
        }
        CritCmd::Stationary { triangles } => {
            let text_in = fs::read_to_string(triangles)
                .map_err(|e| Error::Invalid(format!("{}: {}", triangles.display(), e)))?;
            let pairs = parse_triangle_pairs(&text_in)?;
            let rows = pairs
                .iter()
                .map(|(s, t)| stationary_pair(s, t))
                .collect::<Result<Vec<_>>>()?;
            let text = std::iter::once("tangent,ratio,gamma_source,gamma_target".to_string())
                .chain(rows.iter().map(|r| {
                    format!(
                        "{},{},{},{}",
                        r.tangent, r.ratio, r.gamma_source, r.gamma_target
                    )
                }))
                .collect::<Vec<_>>()
                .join("\n");
            emit(json, "crit stationary", json!(rows), &text);
        }
        CritCmd::Yc => {
            let yc = critical_y();
            let text = format!(
                "y_c = {}\ntanh y_c = {}\n1/sqrt(3) = {}",
                yc,
                yc.tanh(),
                1.0 / 3f64.sqrt()
            );
            emit(
                json,
                "crit yc",
                json!({"y_c": yc, "tanh_y_c": yc.tanh()}),
                &text,
            );
        }
        CritCmd::Isoradial { theta } => {
            let r = isoradial_check(*theta)?;
            let text = format!(
                "Y_c = {} (tan(theta/2) = {})",
                r.from_exponential, r.half_tangent
            );
            emit(json, "crit isoradial", json!(r), &text);
        }
    }
    Ok(Outcome::Pass)
}
