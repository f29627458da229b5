//! One function per subcommand. Each returns a JSON value and a text
//! rendering of the same result; vertices are 1-based on the wire.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use clustercc_core::cone::{
    kernel_cone_trivial, matrix_conditions_report, order_compare, KernelConeCertificate,
    KernelConeReport,
};
use clustercc_core::qp::gentle::{bypass_column_identity, find_bypasses, gentle_report};
use clustercc_core::qp::{mutate_qp, QP};
use clustercc_core::rep::{
    cc_function, e_invariant, e_invariant_pair, f_polynomial, g_vector_pair, mutate_rep, ChiMethod,
    DecoratedRep,
};
use clustercc_core::seed::{cluster_variable, Seed, SeedJson};
use clustercc_core::surface::{
    build_nice_triangulation, corank_check, gentle_qp, MarkedSurface, Triangulation,
};
use clustercc_core::verify::{run_property_suite, SuiteConfig};

use crate::io::{
    load_matrix, load_qp, load_rep, load_triangulation, read_json, truncation_for_reps, vertex,
    vertices, CliError, CliResult,
};

pub struct Output {
    pub json: Value,
    pub text: String,
    /// False when the command ran but its check failed (exit status 1).
    pub ok: bool,
}

impl Output {
    fn new(json: impl Serialize, text: String) -> Self {
        Output {
            json: serde_json::to_value(json).expect("serializable"),
            text,
            ok: true,
        }
    }
}

fn matrix_text(rows: &[Vec<i64>]) -> String {
    let width = rows
        .iter()
        .flatten()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| format!("{x:>width$}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn mutate_matrix(matrix: &Path, seq: &[usize]) -> CliResult<Output> {
    let b = load_matrix(matrix)?.mutate_seq(&vertices(seq)?)?;
    let text = matrix_text(&b.rows);
    Ok(Output::new(&b, text))
}

fn load_seed(matrix: Option<&Path>, seed: Option<&Path>) -> CliResult<Seed> {
    match (matrix, seed) {
        (Some(m), None) => Ok(Seed::initial(load_matrix(m)?)),
        (None, Some(s)) => Ok(Seed::from_json(&read_json::<SeedJson>(s)?)?),
        _ => Err(CliError::new(
            "Usage",
            "pass exactly one of --matrix and --seed",
        )),
    }
}

pub fn mutate_seed(matrix: Option<&Path>, seed: Option<&Path>, seq: &[usize]) -> CliResult<Output> {
    let s = load_seed(matrix, seed)?.mutate_seq(&vertices(seq)?)?;
    let mut text = matrix_text(&s.matrix.rows);
    for (i, c) in s.cluster.iter().enumerate() {
        write!(text, "\nx{}' = {c}", i + 1).unwrap();
    }
    Ok(Output::new(s.to_json(), text))
}

pub fn cluster_var(matrix: &Path, seq: &[usize], j: usize) -> CliResult<Output> {
    let b = load_matrix(matrix)?;
    let f = cluster_variable(&b, &vertices(seq)?, vertex(j)?)?;
    let text = f.to_string();
    Ok(Output::new(
        json!({ "variable": f.to_json(), "text": text }),
        text,
    ))
}

pub fn qp_mutate(qp: &Path, k: usize, truncation: Option<usize>) -> CliResult<Output> {
    let qp = load_qp(qp, truncation)?;
    let mq = mutate_qp(&qp, vertex(k)?)?;
    let pre = &mq.premutated.qp;
    let pairs: Vec<[String; 2]> = mq
        .reduced
        .pairs
        .iter()
        .map(|&(a, b)| {
            [
                pre.quiver.arrows[a].id.clone(),
                pre.quiver.arrows[b].id.clone(),
            ]
        })
        .collect();
    let out = mq.qp();
    let mut text = qp_text(out);
    if !pairs.is_empty() {
        let removed: Vec<String> = pairs.iter().map(|[a, b]| format!("{a}/{b}")).collect();
        write!(text, "\nremoved 2-cycles: {}", removed.join(", ")).unwrap();
    }
    if mq.reduced.truncated {
        text.push_str("\nwarning: reduction truncated at the path-length bound");
    }
    Ok(Output::new(
        json!({ "qp": out.to_json(), "removedPairs": pairs, "truncated": mq.reduced.truncated }),
        text,
    ))
}

fn qp_text(qp: &QP) -> String {
    let mut text = format!("{} mutable, {} frozen vertices\n", qp.n(), qp.quiver.m);
    for a in &qp.quiver.arrows {
        writeln!(text, "  {}: {} -> {}", a.id, a.source + 1, a.target + 1).unwrap();
    }
    let terms: Vec<String> = qp
        .potential
        .terms()
        .iter()
        .map(|(cyc, c)| {
            format!(
                "{} {}",
                clustercc_core::linalg::fmt_rat(c),
                qp.path_label(cyc)
            )
        })
        .collect();
    write!(
        text,
        "S = {}",
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    )
    .unwrap();
    text
}

fn rep_text(rep: &DecoratedRep) -> String {
    format!("dims {:?}, decoration {:?}", rep.dims, rep.decoration)
}

pub fn rep_mutate(qp: &Path, rep: &Path, k: usize, truncation: Option<usize>) -> CliResult<Output> {
    let truncation = truncation_for_reps(truncation, &[rep])?;
    let qp = load_qp(qp, truncation)?;
    let m = load_rep(rep, &qp)?;
    let out = mutate_rep(&m, &qp, vertex(k)?)?;
    let target = out.qp.qp();
    let text = format!("{}\n{}", rep_text(&out.rep), qp_text(target));
    Ok(Output::new(
        json!({ "rep": out.rep.to_json(target), "qp": target.to_json() }),
        text,
    ))
}

pub fn g_vector(
    qp: &Path,
    ext: Option<&Path>,
    rep: &Path,
    truncation: Option<usize>,
) -> CliResult<Output> {
    let truncation = truncation_for_reps(truncation, &[rep])?;
    let base = load_qp(qp, truncation)?;
    let full = match ext {
        Some(e) => load_qp(e, truncation)?,
        None => base.clone(),
    };
    let m = load_rep(rep, &full)?;
    let pair_ext = g_vector_pair(&m, &full)?;
    let mut text = format!("g = {:?}", pair_ext.kernel_route);
    let mut out = json!({ "g": pair_ext.kernel_route, "routes": pair_ext });
    if ext.is_some() {
        let restricted = m.transport(&full, &base)?;
        let pair = g_vector_pair(&restricted, &base)?;
        text = format!(
            "g = {:?}\nextended g = {:?}",
            pair.kernel_route, pair_ext.kernel_route
        );
        out = json!({ "g": pair.kernel_route, "gExt": pair_ext.kernel_route, "routes": pair, "routesExt": pair_ext });
    }
    Ok(Output::new(out, text))
}

pub fn e_inv(
    qp: &Path,
    rep: &Path,
    other: Option<&Path>,
    truncation: Option<usize>,
) -> CliResult<Output> {
    let reps: Vec<&Path> = std::iter::once(rep).chain(other).collect();
    let truncation = truncation_for_reps(truncation, &reps)?;
    let qp = load_qp(qp, truncation)?;
    let m = load_rep(rep, &qp)?;
    let e = match other {
        Some(o) => e_invariant_pair(&m, &load_rep(o, &qp)?, &qp),
        None => e_invariant(&m, &qp),
    };
    Ok(Output::new(json!({ "e": e }), format!("E = {e}")))
}

pub fn cc(
    qp: &Path,
    ext: Option<&Path>,
    rep: &Path,
    method: ChiMethod,
    truncation: Option<usize>,
) -> CliResult<Output> {
    let truncation = truncation_for_reps(truncation, &[rep])?;
    let base = load_qp(qp, truncation)?;
    let Some(ext) = ext else {
        let m = load_rep(rep, &base)?;
        let f = cc_function(&m, &base, method)?;
        return Ok(Output::new(
            json!({ "cc": f.to_json(), "text": f.to_string() }),
            f.to_string(),
        ));
    };
    let full = load_qp(ext, truncation)?;
    let m = load_rep(rep, &full)?;
    let f_ext = cc_function(&m, &full, method)?;
    let f = cc_function(&m.transport(&full, &base)?, &base, method)?;
    Ok(Output::new(
        json!({
            "cc": f_ext.to_json(),
            "text": f_ext.to_string(),
            "ccRestricted": f.to_json(),
            "textRestricted": f.to_string(),
        }),
        format!("{f_ext}\nwithout coefficients: {f}"),
    ))
}

pub fn f_poly(
    qp: &Path,
    rep: &Path,
    method: ChiMethod,
    truncation: Option<usize>,
) -> CliResult<Output> {
    let truncation = truncation_for_reps(truncation, &[rep])?;
    let qp = load_qp(qp, truncation)?;
    let m = load_rep(rep, &qp)?;
    let f = f_polynomial(&m, &qp, method)?;
    Ok(Output::new(
        json!({ "f": f.to_json(), "text": f.to_string() }),
        f.to_string(),
    ))
}

fn kernel_text(r: &KernelConeReport) -> String {
    match &r.certificate {
        KernelConeCertificate::NonnegativeKernelVector { vector } => {
            format!("false: nonnegative kernel vector ({})", vector.join(","))
        }
        KernelConeCertificate::PositiveImage { y, image } => {
            format!(
                "true: B y = ({}) > 0 for y = ({})",
                image.join(","),
                y.join(",")
            )
        }
    }
}

pub fn kernel_cone(matrix: &Path) -> CliResult<Output> {
    let b = load_matrix(matrix)?;
    let r = kernel_cone_trivial(&b.principal())?;
    let text = kernel_text(&r);
    Ok(Output::new(&r, text))
}

pub fn order_cmp(matrix: &Path, a: &[i64], b: &[i64], bound: u64) -> CliResult<Output> {
    let bm = load_matrix(matrix)?;
    let o = order_compare(a, b, &bm.principal(), bound)?;
    Ok(Output::new(json!({ "order": o }), format!("{o:?}")))
}

pub fn conditions(matrix: &Path) -> CliResult<Output> {
    let b = load_matrix(matrix)?;
    let r = matrix_conditions_report(&b.principal())?;
    let cc = match r.column_condition {
        Some(v) => v.to_string(),
        None => "skipped".into(),
    };
    let text = format!(
        "rank {} of {}\nfull rank: {}\ncolumn condition: {cc}\npositive image: {}\nkernel cone (rational): {}\n\
         kernel cone (integer): {}\nimplications hold: {}",
        r.rank, r.n, r.full_rank, r.positive_image, r.kernel_cone_rational, r.kernel_cone_integer, r.implications_hold
    );
    Ok(Output::new(&r, text))
}

fn labelled_matrix(t: &Triangulation) -> (Value, String) {
    let b = t.b_matrix();
    (
        json!({ "arcs": t.arcs, "rows": b }),
        format!("arcs {}\n{}", t.arcs.join(" "), matrix_text(&b)),
    )
}

pub fn surface_b(triangulation: &Path) -> CliResult<Output> {
    let t = load_triangulation(triangulation)?;
    let (json, text) = labelled_matrix(&t);
    Ok(Output::new(json, text))
}

pub fn surface_build(s: &MarkedSurface, base: Option<&Path>) -> CliResult<Output> {
    let base = base.map(load_triangulation).transpose()?;
    let nice = build_nice_triangulation(s, base.as_ref())?;
    let (_, mut text) = labelled_matrix(&nice.sigma);
    let cert = &nice.certificate;
    write!(
        text,
        "\nrank {}; kernel cone {}",
        cert.rank,
        kernel_text(&cert.kernel_cone)
    )
    .unwrap();
    for e in &cert.expressions {
        let terms: Vec<String> = e.terms.iter().map(|(a, c)| format!("{c}*b[{a}]")).collect();
        write!(text, "\nb[{}] = {}", e.arc, terms.join(" + ")).unwrap();
    }
    if !cert.flips.is_empty() {
        write!(text, "\nfound by flipping {}", cert.flips.join(", ")).unwrap();
    }
    let json = json!({
        "triangulation": nice.sigma.to_json(),
        "bMatrix": nice.sigma.b_matrix(),
        "certificate": cert,
    });
    Ok(Output::new(json, text))
}

pub fn surface_check(triangulation: &Path) -> CliResult<Output> {
    let t = load_triangulation(triangulation)?;
    let corank = corank_check(&t)?;
    let kc = kernel_cone_trivial(&t.b_matrix())?;
    let text = format!(
        "valid triangulation with {} arcs\nrank {} (expected {})\nkernel cone {}",
        t.n(),
        corank.rank,
        corank.expected_rank,
        kernel_text(&kc)
    );
    Ok(Output::new(
        json!({ "valid": true, "corank": corank, "kernelCone": kc }),
        text,
    ))
}

pub fn bypass_scan(
    qp: Option<&Path>,
    triangulation: Option<&Path>,
    truncation: Option<usize>,
) -> CliResult<Output> {
    let qp = match (qp, triangulation) {
        (Some(q), None) => load_qp(q, truncation)?,
        (None, Some(t)) => gentle_qp(
            &load_triangulation(t)?,
            truncation.unwrap_or(clustercc_core::qp::DEFAULT_TRUNCATION),
        )?,
        _ => {
            return Err(CliError::new(
                "Usage",
                "pass exactly one of --qp and --triangulation",
            ))
        }
    };
    let gentle = gentle_report(&qp);
    if !gentle.gentle {
        let text = format!("not gentle: {}", gentle.reason.clone().unwrap_or_default());
        return Ok(Output::new(
            json!({ "gentle": gentle, "bypasses": [] }),
            text,
        ));
    }
    let mut items = Vec::new();
    let mut text = format!("gentle; {} arrows", qp.quiver.arrows.len());
    let mut all_hold = true;
    for b in find_bypasses(&qp)? {
        let r = bypass_column_identity(&qp, &b)?;
        let ids = |v: &[usize]| {
            v.iter()
                .map(|&a| qp.quiver.arrows[a].id.clone())
                .collect::<Vec<_>>()
        };
        let holds = r.lhs == r.rhs;
        all_hold &= holds;
        let verts: Vec<usize> = r.vertices.iter().map(|v| v + 1).collect();
        write!(
            text,
            "\n{:?} {} (vertices {verts:?}): identity {}",
            b.kind,
            ids(&b.path).join(" "),
            holds
        )
        .unwrap();
        items.push(json!({
            "kind": b.kind,
            "path": ids(&b.path),
            "closing": ids(&b.closing),
            "source": b.source + 1,
            "sink": b.sink + 1,
            "vertices": verts,
            "columnSum": r.lhs,
            "expected": r.rhs,
            "holds": holds,
        }));
    }
    let mut out = Output::new(
        json!({ "gentle": gentle, "qp": qp.to_json(), "bypasses": items }),
        text,
    );
    out.ok = all_hold;
    Ok(out)
}

pub fn verify(config: &SuiteConfig) -> CliResult<Output> {
    let report = run_property_suite(config)?;
    let mut text = format!(
        "{} representations over {} QPs, {} triangulations, {} ms",
        report.representations, report.qps, report.triangulations, report.elapsed_ms
    );
    for p in &report.properties {
        write!(
            text,
            "\n({}) {}: {} checked, {} skipped, {} failed",
            p.key,
            p.name,
            p.checked,
            p.skipped,
            p.failures.len()
        )
        .unwrap();
        for f in p.failures.iter().take(3) {
            write!(text, "\n    {f}").unwrap();
        }
    }
    let passed = report.passed();
    write!(text, "\n{}", if passed { "PASS" } else { "FAIL" }).unwrap();
    let mut out = Output::new(json!({ "passed": passed, "report": report }), text);
    out.ok = passed;
    Ok(out)
}
