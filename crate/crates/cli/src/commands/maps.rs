use besico::dynsys::{
    interval_decomposition, k_g, power_invariance, product_map, root_of_unity_eigencheck, search_nonhyperbolic,
    tn_samples, verify_decomposition, MistakeForm, MistakeFunction, TnMap, TorusAuto,
};
use besico::rational::{q_usize, Q};
use num::{One, Zero};
use serde_json::json;

use super::{matrix, rational};
use crate::args::{DecompositionArgs, DecompositionKind, EigenArgs, KgArgs, MapsCmd, SearchArgs, TnArgs};
use crate::report::{input, rq, to_value, CliResult, Outcome, Table};
use crate::Ctx;

pub fn run(cmd: &MapsCmd, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        MapsCmd::Tn(a) => tn(a),
        MapsCmd::Eigencheck(a) => eigencheck(a),
        MapsCmd::Search(a) => search(a),
        MapsCmd::Decomposition(a) => decomposition(a, ctx),
        MapsCmd::Kg(a) => kg(a),
    }
}

fn tn(a: &TnArgs) -> CliResult<Outcome> {
    let t = TnMap::new(a.n)?;
    let n = a.n;
    let points = a.points.unwrap_or(300 * n);
    if points == 0 {
        return input("--points must be >= 1");
    }
    let limits = t.branch_limits();
    let continuous = limits.iter().all(|(_, l, r)| l == r);
    // T_n([j/n, (j+1)/n]) ⊂ [(j+1)/n, (j+2)/n] mod 1 on the grid
    let mut violations = 0usize;
    for i in 0..points {
        let x = q_usize(i, points);
        let j = (i * n) / points;
        let y = t.apply_q(&x);
        let lo = q_usize((j + 1) % n, n);
        let hi = &lo + q_usize(1, n);
        let ok = (y >= lo && y <= hi) || (hi == Q::one() && y.is_zero());
        violations += usize::from(!ok);
    }
    let mut table = Table::new(&["x", "y"]);
    for (x, y) in tn_samples(n, a.power, points)? {
        table.push(vec![rq(&x), rq(&y)]);
    }
    let results = json!({
        "n": n,
        "power": a.power,
        "breakpoints": limits.iter().map(|(x, l, r)| json!({"x": rq(x), "left": rq(l), "right": rq(r)})).collect::<Vec<_>>(),
        "continuous": continuous,
        "grid_points": points,
        "arc_violations": violations,
    });
    Ok(Outcome::new(results)
        .with_table(table)
        .fail_unless(continuous, "T_n is discontinuous at a breakpoint")
        .fail_unless(violations == 0, format!("{violations} grid points left their arc")))
}

fn eigencheck(a: &EigenArgs) -> CliResult<Outcome> {
    let s = TorusAuto::new(matrix(&a.matrix)?)?;
    let r = root_of_unity_eigencheck(&s, a.max_order)?;
    Ok(Outcome::new(json!({ "matrix": s.matrix(), "det": s.det(), "report": to_value(&r) })))
}

fn search(a: &SearchArgs) -> CliResult<Outcome> {
    if a.range < 0 {
        return input("--range must be >= 0");
    }
    let found = search_nonhyperbolic(a.range)?;
    let mut table = Table::new(&["a", "b"]);
    let mut list = Vec::new();
    for s in &found {
        let m = s.matrix();
        // companion of x^4 + a x^3 + b x^2 + a x + 1: last column is -coefficients
        let (ca, cb) = (-m[3][3], -m[2][3]);
        table.push(vec![json!(ca), json!(cb)]);
        list.push(json!({ "a": ca, "b": cb, "matrix": m }));
    }
    Ok(Outcome::new(json!({ "range": a.range, "count": found.len(), "found": list })).with_table(table))
}

fn decomposition(a: &DecompositionArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let t = TnMap::new(a.n)?;
    let r = match a.kind {
        DecompositionKind::Interval => verify_decomposition(&t, &interval_decomposition(a.n)?, a.samples, seed, 300 * a.n)?,
        DecompositionKind::Product => {
            let s = TorusAuto::new(matrix(&a.matrix)?)?;
            power_invariance(&product_map(s, t), a.samples, seed)?
        }
    };
    let pass = r.pass;
    Ok(Outcome::new(to_value(&r)).fail_unless(pass, "a sampled point left its target piece"))
}

fn mistake_form(s: &str) -> CliResult<MistakeForm> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    Ok(match (kind, arg) {
        ("zero", "") => MistakeForm::Zero,
        ("sqrt", "") => MistakeForm::SqrtCeil,
        ("const", c) => MistakeForm::Constant(c.parse().map_err(|_| crate::report::CliError::Input(format!("bad constant {c:?}")))?),
        ("floor", r) => MistakeForm::Floor(rational(r, "floor rate")?),
        _ => return input(format!("unknown mistake form {s:?}")),
    })
}

fn kg(a: &KgArgs) -> CliResult<Outcome> {
    let g = MistakeFunction::new(mistake_form(&a.form)?, rational(&a.eps0, "--eps0")?)?;
    let eps = rational(&a.eps, "--eps")?;
    let report = k_g(&g, &eps, a.scan_limit)?;
    let check = g.verify(&eps, a.scan_limit)?;
    Ok(Outcome::new(json!({
        "form": format!("{:?}", g.form),
        "eps": rq(&eps),
        "k_g": to_value(&report),
        "check": to_value(&check),
    })))
}
