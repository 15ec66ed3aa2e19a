use incidence_core::applications::{
    alpha_closed_form, circumradius_sq, eval_bound, rich_unit_circles, sigma_surface, similar_triangles_bruteforce,
    similar_triangles_circles, staging, unit_alpha_closed_form, unit_staging, BoundKind, BoundParams, SigmaSurface,
    TriangleShape,
};
use incidence_core::engine::{
    bruteforce_report, circle_surface_crossings, count_bruteforce, count_with_config, rich_points, CountReport,
    EngineConfig,
};
use incidence_core::generators::{gen_triangle_cloud, generate, GenError, GenKind, GenSpec};
use incidence_core::geometry::incidence_test;
use incidence_core::io::{circle_json, parse_instance, point_json, write_instance};
use incidence_core::partition::build_partition;
use incidence_core::poly::divides;
use incidence_core::rational::{fmt_q, parse_q};
use incidence_core::ruling::{
    flecnode, line_from_plucker, meets_absolute_conic, plucker_from_line, ruled_test, surface_points, RuledVerdict,
};
use incidence_core::transforms::Line3;
use incidence_core::{IncidenceInstance, MultiPoly, Point3};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::Path;

use crate::report::{csv, float, json as to_json, parse_list, parse_point, poly_lines, read_instance, read_poly, CliError, CliResult};
use crate::{Cli, Command, Format, Global, Kind, Method};

pub fn run(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen { kind, m, n, q, out } => gen(g, *kind, *m, *n, *q, out.as_deref()),
        Command::Count { input, method, r } => count(g, &read_instance(input)?, *method, *r),
        Command::Crossings { input, poly } => crossings(g, &read_instance(input)?, &read_poly(poly)?),
        Command::Partition { input, r } => partition(g, &read_instance(input)?, *r),
        Command::Flecnode { poly } => flecnode_cmd(g, &read_poly(poly)?),
        Command::Ruled { poly, budget } => ruled(g, &read_poly(poly)?, *budget),
        Command::Plucker { base, dir } => plucker(g, &parse_point(base, "--base")?, &parse_point(dir, "--dir")?),
        Command::Triangles { input, t, shape } => {
            let points = match (input, t) {
                (Some(p), _) => read_instance(p)?.points,
                (None, Some(t)) => gen_triangle_cloud(*t, g.seed),
                (None, None) => return Err(CliError::input("--in", "give --in FILE or --t SIZE")),
            };
            triangles(g, &points, shape)
        }
        Command::Unit { o, a, input } => match (o, a, input) {
            (Some(o), Some(a), _) => sigma(g, &parse_point(o, "--o")?, &parse_point(a, "--a")?),
            (_, _, Some(p)) => unit_rich(g, &read_instance(p)?),
            _ => Err(CliError::input("--o", "give --o and --a, or --in FILE")),
        },
        Command::Bounds { m, n, q, k, d, eps, a, constant, which } => {
            let params = BoundParams { m: *m, n: *n, q: *q, eps: *eps, a: *a, k: *k, d: *d, constant: *constant };
            bounds(g, &params, which.as_deref())
        }
        Command::Sweep { sizes, qs, rs, k, kind } => sweep(g, sizes, qs, rs, *k, *kind),
    }
}

fn gen_kind(k: Kind) -> GenKind {
    match k {
        Kind::Grid => GenKind::Grid,
        Kind::CappedSpheres => GenKind::CappedSpheres,
        Kind::UnitBundle => GenKind::UnitBundle,
        Kind::Random => GenKind::Random,
        Kind::TriangleCloud => GenKind::TriangleCloud,
    }
}

fn generate_instance(kind: Kind, m: usize, n: usize, q: usize, seed: u64) -> CliResult<IncidenceInstance> {
    generate(&GenSpec { kind: gen_kind(kind), m, n, q, seed }).map_err(|e| match e {
        GenError::InfeasibleCap { .. } | GenError::CapUnattainable { .. } => CliError::input("--q", e),
    })
}

fn gen(g: &Global, kind: Kind, m: usize, n: usize, q: usize, out: Option<&Path>) -> CliResult<String> {
    if g.format == Format::Csv {
        return Err(CliError::input("--format", "gen writes JSON instances only"));
    }
    let inst = generate_instance(kind, m, n, q, g.seed)?;
    let text = write_instance(&inst);
    if g.verify {
        let back = parse_instance(&text).map_err(|e| CliError::Verify(format!("generated instance rejected: {e}")))?;
        if back.points != inst.points || back.circles != inst.circles {
            return Err(CliError::Verify("instance does not survive a round trip".into()));
        }
    }
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn count_report(inst: &IncidenceInstance, method: Method, r: usize, seed: u64) -> CountReport {
    match method {
        Method::Bruteforce => bruteforce_report(inst),
        Method::Partition => count_with_config(inst, &EngineConfig { r, seed, ..EngineConfig::default() }),
    }
}

fn check_r(r: usize) -> CliResult<()> {
    if r < 2 {
        return Err(CliError::input("--r", "r must be at least 2"));
    }
    Ok(())
}

fn count(g: &Global, inst: &IncidenceInstance, method: Method, r: usize) -> CliResult<String> {
    check_r(r)?;
    let rep = count_report(inst, method, r, g.seed);
    if g.verify {
        let brute = count_bruteforce(inst);
        if brute != rep.total || !rep.consistent() {
            return Err(CliError::Verify(format!("{} counted {}, brute force {brute}", rep.method, rep.total)));
        }
    }
    Ok(match g.format {
        Format::Json => to_json(&rep),
        Format::Csv => csv(
            &["method", "m", "n", "q", "total", "p0_c0", "p0_cprime", "pprime_cprime", "recursion_depth", "cells_visited", "crossing_total", "partition_degree"],
            &[vec![
                rep.method.clone(),
                inst.m().to_string(),
                inst.n().to_string(),
                inst.q.to_string(),
                rep.total.to_string(),
                rep.breakdown.p0_c0.to_string(),
                rep.breakdown.p0_cprime.to_string(),
                rep.breakdown.pprime_cprime.to_string(),
                rep.recursion_depth.to_string(),
                rep.cells_visited.to_string(),
                rep.crossing_total.to_string(),
                rep.partition_degree.map(|d| d.to_string()).unwrap_or_default(),
            ]],
        ),
    })
}

fn crossings(g: &Global, inst: &IncidenceInstance, f: &MultiPoly) -> CliResult<String> {
    if f.is_constant() {
        return Err(CliError::input("--poly", "surface polynomial must be nonconstant"));
    }
    let deg = f.degree() as usize;
    let rows = inst
        .circles
        .par_iter()
        .map(|c| circle_surface_crossings(c, f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::input("--poly", e))?;
    if g.verify {
        if let Some(i) = rows.iter().position(|x| !x.contained && x.crossings > 2 * deg) {
            return Err(CliError::Verify(format!("circle {i} crosses {} times, above 2 deg f = {}", rows[i].crossings, 2 * deg)));
        }
    }
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "degree": deg,
            "bound": 2 * deg,
            "circles": rows.iter().enumerate().map(|(i, x)| json!({"index": i, "contained": x.contained, "crossings": x.crossings})).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            &["index", "contained", "crossings"],
            &rows.iter().enumerate().map(|(i, x)| vec![i.to_string(), x.contained.to_string(), x.crossings.to_string()]).collect::<Vec<_>>(),
        ),
    })
}

fn partition(g: &Global, inst: &IncidenceInstance, r: usize) -> CliResult<String> {
    check_r(r)?;
    let part = build_partition(&inst.points, r, g.seed).map_err(|e| CliError::input("--in", e))?;
    let rep = part.report();
    if g.verify && !(rep.stats.guarantee_holds() && rep.stats.degree_bound_ok) {
        return Err(CliError::Verify(format!(
            "largest cell {} (cap {}), {} cells, degree {}",
            rep.stats.max_cell, rep.stats.cell_cap, rep.stats.nonempty_cells, rep.stats.degree
        )));
    }
    Ok(match g.format {
        Format::Json => to_json(&rep),
        Format::Csv => csv(&["signs", "size"], &rep.cells.iter().map(|c| vec![c.signs.clone(), c.size.to_string()]).collect::<Vec<_>>()),
    })
}

fn poly_rows(f: &MultiPoly) -> Vec<Vec<String>> {
    poly_lines(f).iter().map(|l| l.split(' ').map(str::to_owned).collect()).collect()
}

fn flecnode_cmd(g: &Global, f: &MultiPoly) -> CliResult<String> {
    let fl = flecnode(f).map_err(|e| CliError::input("--poly", e))?;
    let d = f.degree();
    let bound = 11 * d - 24;
    if g.verify && !fl.is_zero() && fl.degree() > bound {
        return Err(CliError::Verify(format!("flecnode degree {} exceeds 11d-24 = {bound}", fl.degree())));
    }
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "input_degree": d,
            "degree": if fl.is_zero() { Value::Null } else { json!(fl.degree()) },
            "bound": bound,
            "poly": poly_lines(&fl),
        })),
        Format::Csv => csv(&["coeff", "e1", "e2", "e3"], &poly_rows(&fl)),
    })
}

fn ruled(g: &Global, f: &MultiPoly, budget: usize) -> CliResult<String> {
    let verdict = ruled_test(f, budget, g.seed).map_err(|e| CliError::input("--poly", e))?;
    if g.verify {
        let fl = flecnode(f).map_err(|e| CliError::input("--poly", e))?;
        match &verdict {
            RuledVerdict::RuledCertified => {
                if !divides(f, &fl).unwrap_or(false) {
                    return Err(CliError::Verify("f does not divide its flecnode polynomial".into()));
                }
            }
            RuledVerdict::NotRuledCertified { witness } => {
                let w: Vec<_> = witness.iter().map(|s| parse_q(s).expect("witness is a rational")).collect();
                let on_f = f.eval(&w).map(|v| v.is_zero()).unwrap_or(false);
                let off_fl = fl.eval(&w).map(|v| !v.is_zero()).unwrap_or(false);
                if !(on_f && off_fl) {
                    return Err(CliError::Verify("witness is not a non-flecnode surface point".into()));
                }
            }
            RuledVerdict::Inconclusive { .. } => {}
        }
    }
    Ok(match g.format {
        Format::Json => to_json(&verdict),
        Format::Csv => {
            let row = match &verdict {
                RuledVerdict::RuledCertified => vec!["ruled_certified".into(), String::new(), String::new(), String::new(), String::new()],
                RuledVerdict::NotRuledCertified { witness } => {
                    let [x, y, z] = witness.clone();
                    vec!["not_ruled_certified".into(), x, y, z, String::new()]
                }
                RuledVerdict::Inconclusive { sampled } => {
                    vec!["inconclusive".into(), String::new(), String::new(), String::new(), sampled.to_string()]
                }
            };
            csv(&["verdict", "x", "y", "z", "sampled"], &[row])
        }
    })
}

fn plucker(g: &Global, base: &Point3, dir: &Point3) -> CliResult<String> {
    let line = Line3::new(base.clone(), dir.clone()).map_err(|e| CliError::input("--dir", e))?;
    let p = plucker_from_line(&line);
    let c = p.coords();
    let on_quadric = (&c[0] * &c[5] + &c[1] * &c[4] + &c[2] * &c[3]).is_zero();
    let meets = meets_absolute_conic(&p).map_err(|e| CliError::input("--dir", e))?;
    if g.verify {
        let back = line_from_plucker(&p).map_err(|e| CliError::Verify(e.to_string()))?;
        let same = back.contains(base) && back.direction.is_parallel(dir) && plucker_from_line(&back) == p;
        if !(on_quadric && same) {
            return Err(CliError::Verify("Pluecker round trip failed".into()));
        }
    }
    let coords = p.to_strings();
    let normalized: Vec<String> = p.normalized().iter().map(fmt_q).collect();
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "coords": coords,
            "normalized": normalized,
            "on_quadric": on_quadric,
            "meets_absolute_conic": meets,
        })),
        Format::Csv => {
            let mut row: Vec<String> = normalized.clone();
            row.push(on_quadric.to_string());
            row.push(meets.to_string());
            csv(&["x0", "x1", "x2", "x3", "x4", "x5", "on_quadric", "meets_absolute_conic"], &[row])
        }
    })
}

fn triangles(g: &Global, points: &[Point3], shape: &str) -> CliResult<String> {
    let verts: Vec<&str> = shape.split(';').collect();
    if verts.len() != 3 {
        return Err(CliError::input("--shape", "expected three vertices x,y,z;x,y,z;x,y,z"));
    }
    let u = parse_point(verts[0], "--shape[0]")?;
    let v = parse_point(verts[1], "--shape[1]")?;
    let w = parse_point(verts[2], "--shape[2]")?;
    let shape = TriangleShape::from_points(&u, &v, &w).map_err(|e| CliError::input("--shape", e))?;
    let count = similar_triangles_circles(points, &shape);
    if g.verify {
        let brute = similar_triangles_bruteforce(points, &shape);
        if brute != count {
            return Err(CliError::Verify(format!("{count} by circles, {brute} by triples")));
        }
    }
    let (lambda, mu) = (fmt_q(&shape.lambda), fmt_q(&shape.mu));
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "t": points.len(),
            "lambda": lambda,
            "mu": mu,
            "symmetry": shape.symmetry(),
            "count": count,
        })),
        Format::Csv => csv(
            &["t", "lambda", "mu", "symmetry", "count"],
            &[vec![points.len().to_string(), lambda, mu, shape.symmetry().to_string(), count.to_string()]],
        ),
    })
}

fn sigma(g: &Global, o: &Point3, a: &Point3) -> CliResult<String> {
    let s = sigma_surface(o, a).map_err(|e| CliError::input("--a", e))?;
    if g.verify {
        let ok = match &s {
            SigmaSurface::Empty => (a - o).norm_sq() > incidence_core::rational::q(4),
            SigmaSurface::Sphere(sp) => sp.radius_sq.is_one() && sp.contains(o) && sp.contains(a),
            SigmaSurface::Quartic(f) => surface_points(f, 16, g.seed)
                .iter()
                .all(|w| circumradius_sq(o, a, w).map_or(true, |r2| r2.is_one())),
        };
        if !ok {
            return Err(CliError::Verify("sigma surface check failed".into()));
        }
    }
    let (kind, body) = match &s {
        SigmaSurface::Empty => ("empty", json!({"kind": "empty"})),
        SigmaSurface::Sphere(sp) => (
            "sphere",
            json!({"kind": "sphere", "center": point_json(&sp.center), "r2": fmt_q(&sp.radius_sq)}),
        ),
        SigmaSurface::Quartic(f) => ("quartic", json!({"kind": "quartic", "degree": f.degree(), "poly": poly_lines(f)})),
    };
    Ok(match g.format {
        Format::Json => to_json(&body),
        Format::Csv => {
            let rows = match &s {
                SigmaSurface::Quartic(f) => poly_rows(f).into_iter().map(|mut r| {
                    r.insert(0, kind.into());
                    r
                }).collect(),
                _ => vec![vec![kind.into(), String::new(), String::new(), String::new(), String::new()]],
            };
            csv(&["kind", "coeff", "e1", "e2", "e3"], &rows)
        }
    })
}

fn unit_rich(g: &Global, inst: &IncidenceInstance) -> CliResult<String> {
    let circles = rich_unit_circles(&inst.points);
    let hits: Vec<usize> = circles.iter().map(|c| inst.points.iter().filter(|p| incidence_test(p, c)).count()).collect();
    if g.verify {
        if let Some(i) = (0..circles.len()).find(|&i| hits[i] < 3 || !circles[i].radius_sq().is_one()) {
            return Err(CliError::Verify(format!("circle {i} is not a 3-rich unit circle")));
        }
    }
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "m": inst.m(),
            "circles": circles.iter().zip(&hits).map(|(c, h)| json!({"circle": circle_json(c), "points": h})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = circles
                .iter()
                .zip(&hits)
                .map(|(c, h)| {
                    let ctr = c.center();
                    let nrm = c.normal();
                    [&ctr.x, &ctr.y, &ctr.z, &nrm.x, &nrm.y, &nrm.z].iter().map(|v| fmt_q(v)).chain([h.to_string()]).collect()
                })
                .collect();
            csv(&["cx", "cy", "cz", "nx", "ny", "nz", "points"], &rows)
        }
    })
}

fn parse_kinds(which: Option<&str>) -> CliResult<Vec<BoundKind>> {
    match which {
        None => Ok(BoundKind::ALL.to_vec()),
        Some(s) => s
            .split(',')
            .map(|w| BoundKind::parse(w.trim()).ok_or_else(|| CliError::input("--which", format!("unknown bound {w:?}"))))
            .collect(),
    }
}

fn bounds(g: &Global, p: &BoundParams, which: Option<&str>) -> CliResult<String> {
    let kinds = parse_kinds(which)?;
    let values: Vec<(BoundKind, Result<f64, String>)> = kinds.iter().map(|&k| (k, eval_bound(k, p).map_err(|e| e.to_string()))).collect();
    let st = staging(p.m, p.n).ok();
    let ust = unit_staging(p.m, p.n).ok();
    if g.verify {
        let ok = st.as_ref().map_or(true, |s| s.alphas.iter().enumerate().all(|(j, a)| *a == alpha_closed_form(j as u32)))
            && ust.as_ref().map_or(true, |s| s.alphas.iter().enumerate().all(|(j, a)| *a == unit_alpha_closed_form(j as u32)));
        if !ok {
            return Err(CliError::Verify("staging exponents disagree with the closed form".into()));
        }
    }
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "m": p.m,
            "n": p.n,
            "q": p.q,
            "k": p.k,
            "bounds": values.iter().map(|(k, v)| match v {
                Ok(x) => json!({"bound": k.name(), "value": x}),
                Err(e) => json!({"bound": k.name(), "error": e}),
            }).collect::<Vec<_>>(),
            "staging": st,
            "unit_staging": ust,
        })),
        Format::Csv => csv(
            &["m", "n", "q", "k", "bound_name", "value"],
            &values
                .iter()
                .map(|(k, v)| {
                    vec![p.m.to_string(), p.n.to_string(), p.q.to_string(), p.k.to_string(), k.name().into(), v.as_ref().map(|x| float(*x)).unwrap_or_default()]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

/// Column names of the sweep table, in order.
pub const SWEEP_COLUMNS: [&str; 16] = [
    "m", "n", "q", "r", "seed", "incidences", "partition_degree", "cells_visited", "kst", "thm1.1", "thm1.2", "thm1.3",
    "unit_no_eps", "rich_k", "rich_points", "max_point_degree",
];

struct Cell {
    size: usize,
    q: usize,
    r: usize,
    seed: u64,
}

fn sweep(g: &Global, sizes: &str, qs: &str, rs: &str, k: usize, kind: Kind) -> CliResult<String> {
    let sizes: Vec<usize> = parse_list(sizes, "--sizes")?;
    if sizes.contains(&0) {
        return Err(CliError::input("--sizes", "sizes must be positive"));
    }
    let qs: Vec<&str> = qs.split(',').map(str::trim).collect();
    let rs: Vec<usize> = parse_list(rs, "--rs")?;
    if rs.iter().any(|&r| r < 2) {
        return Err(CliError::input("--rs", "r must be at least 2"));
    }
    let mut cells = Vec::new();
    for (si, &size) in sizes.iter().enumerate() {
        for (qi, qtext) in qs.iter().enumerate() {
            let q = match *qtext {
                "n" => size,
                s => s.parse::<usize>().ok().filter(|&q| q >= 1 && q <= size).ok_or_else(|| {
                    CliError::input("--qs", format!("cap {s:?} must be an integer in 1..=n or \"n\""))
                })?,
            };
            // one instance per (size, q), shared by all r
            let seed = g.seed.wrapping_add((si * qs.len() + qi) as u64);
            cells.extend(rs.iter().map(|&r| Cell { size, q, r, seed }));
        }
    }
    let rows = cells
        .par_iter()
        .map(|c| sweep_row(g, c, k, kind))
        .collect::<CliResult<Vec<_>>>()?;
    if g.format == Format::Json {
        let objs: Vec<Value> = rows
            .iter()
            .map(|r| Value::Object(SWEEP_COLUMNS.iter().zip(r).map(|(k, v)| (k.to_string(), cell_json(v))).collect()))
            .collect();
        return Ok(to_json(&objs));
    }
    Ok(csv(&SWEEP_COLUMNS, &rows))
}

fn cell_json(v: &str) -> Value {
    if v.is_empty() {
        Value::Null
    } else if let Ok(i) = v.parse::<u64>() {
        json!(i)
    } else {
        v.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| json!(v))
    }
}

fn sweep_row(g: &Global, c: &Cell, k: usize, kind: Kind) -> CliResult<Vec<String>> {
    let inst = generate_instance(kind, c.size, c.size, c.q, c.seed)?;
    let rep = count_report(&inst, Method::Partition, c.r, g.seed);
    if g.verify {
        let brute = count_bruteforce(&inst);
        if brute != rep.total {
            return Err(CliError::Verify(format!("m = n = {}: partition {} vs brute force {brute}", c.size, rep.total)));
        }
    }
    let params = BoundParams { m: inst.m() as u64, n: inst.n() as u64, q: inst.q as u64, ..BoundParams::default() };
    let b = |kind| eval_bound(kind, &params).map(float).unwrap_or_default();
    let rich = rich_points(&inst, k);
    let max_deg = inst.points.iter().map(|p| inst.circles.iter().filter(|cc| incidence_test(p, cc)).count()).max().unwrap_or(0);
    Ok(vec![
        inst.m().to_string(),
        inst.n().to_string(),
        inst.q.to_string(),
        c.r.to_string(),
        c.seed.to_string(),
        rep.total.to_string(),
        rep.partition_degree.map(|d| d.to_string()).unwrap_or_default(),
        rep.cells_visited.to_string(),
        b(BoundKind::Kst),
        b(BoundKind::Thm11),
        b(BoundKind::Thm12),
        b(BoundKind::Thm13),
        b(BoundKind::UnitNoEps),
        k.to_string(),
        rich.len().to_string(),
        max_deg.to_string(),
    ])
}
