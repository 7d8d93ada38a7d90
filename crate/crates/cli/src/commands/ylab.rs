use besico::proximal::{
    growth_condition, in_y_horizon, project_to_y, return_times_point, s_i, sample_member, schedule_sum, t_i, tail_sum,
    YParams,
};
use besico::pseudometrics::dbar;
use besico::rational::{q, to_f64, Q};
use besico::seqcore::{Alphabet, SymbolicSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::rational;
use crate::args::{MemberArgs, ProjectArgs, ReturnTimesArgs, TermsArgs, YLabCmd};
use crate::report::{input, rq, to_value, CliResult, Outcome, Table};
use crate::Ctx;

pub fn run(cmd: &YLabCmd, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        YLabCmd::SumCheck(a) => sum_check(a),
        YLabCmd::Constants(a) => constants(a),
        YLabCmd::Member(a) => member(a, ctx),
        YLabCmd::Project(a) => project(a, ctx),
        YLabCmd::ReturnTimes(a) => return_times(a, ctx),
    }
}

fn sum_check(a: &TermsArgs) -> CliResult<Outcome> {
    if a.terms == 0 {
        return input("--terms must be >= 1");
    }
    let s = schedule_sum(a.terms);
    let tail = tail_sum(a.terms);
    let quarter = q(1, 4);
    let exact = &s + &tail == quarter;
    let err = (to_f64(&s) - 0.25).abs();
    let results = json!({
        "terms": a.terms,
        "value": rq(&s),
        "value_f64": to_f64(&s),
        "tail": rq(&tail),
        "partial_plus_tail_is_quarter": exact,
        "abs_error": err,
        "within_1e-12": err <= 1e-12,
    });
    Ok(Outcome::new(results).fail_unless(exact, "partial sum plus tail differs from 1/4"))
}

fn constants(a: &TermsArgs) -> CliResult<Outcome> {
    let mut table = Table::new(&["i", "s_i", "t_i", "holds"]);
    let mut all = true;
    for i in 1..=a.terms {
        let ok = growth_condition(i);
        all &= ok;
        let t = t_i(i).map(|t| t.to_string()).unwrap_or_else(|| format!("10^{i}"));
        table.push(vec![json!(i), json!(s_i(i).to_string()), json!(t), json!(ok)]);
    }
    Ok(Outcome::new(json!({ "terms": a.terms, "all_hold": all }))
        .with_table(table)
        .fail_unless(all, "t_i > 3 s_i + 2i > 5i fails"))
}

fn member(a: &MemberArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(10_000);
    let yp = YParams::new(a.depth)?;
    let x = SymbolicSequence::parse(&Alphabet::binary(), &a.x)?;
    let m = in_y_horizon(&yp, &x, h)?;
    Ok(Outcome::new(json!({
        "horizon": h,
        "depth": a.depth,
        "decisions": [to_value(&m)],
        "densities": [],
    })))
}

/// Random members of the exact levels are projected into the truncated
/// intersection; each projection must be accepted and moves the point by
/// the measured disagreement density.
fn project(a: &ProjectArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(10_000);
    let seed = ctx.seed()?;
    let yp = YParams::new(a.depth)?;
    let eps = rational(&a.eps, "--eps")?;
    if !(0.0..=1.0).contains(&a.ones) {
        return input("--ones must lie in [0, 1]");
    }
    if tail_sum(a.depth) >= eps {
        return input(format!("--eps must exceed the tail sum {}", tail_sum(a.depth)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decisions = Vec::new();
    let mut densities = Vec::new();
    let mut table = Table::new(&["sample", "accepted", "density"]);
    let mut max_density = Q::from_integer(0.into());
    let mut all = true;
    for i in 0..a.samples {
        let x = sample_member(&yp, h, &mut rng, a.ones)?;
        let z = project_to_y(&yp, &x, &eps)?;
        let m = in_y_horizon(&yp, &z, h)?;
        let d = dbar(&x, &z, h)?.final_value;
        all &= m.accepted;
        table.push(vec![json!(i), json!(m.accepted), rq(&d)]);
        if d > max_density {
            max_density = d.clone();
        }
        decisions.push(to_value(&m));
        densities.push(rq(&d));
    }
    let results = json!({
        "horizon": h,
        "depth": a.depth,
        "eps": rq(&eps),
        "tail_sum": rq(&tail_sum(a.depth)),
        "all_accepted": all,
        "max_density": rq(&max_density),
        "decisions": decisions,
        "densities": densities,
    });
    Ok(Outcome::new(results).with_table(table).fail_unless(all, "a projected point was rejected"))
}

fn return_times(a: &ReturnTimesArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(10_000);
    let word = Alphabet::binary().parse_word(&a.cylinder)?;
    let r = return_times_point(&word, a.level, h)?;
    let yp = YParams::new(a.level)?;
    let m = in_y_horizon(&yp, &r.y, h)?;
    let mut table = Table::new(&["position"]);
    for b in &r.certified {
        table.push(vec![json!(b)]);
    }
    let results = json!({
        "horizon": h,
        "depth": a.level,
        "level": r.level,
        "residue": r.residue,
        "certified": r.certified.len(),
        "gamma": rq(&r.gamma),
        "bound": rq(&r.bound),
        "met_bound": r.met_bound,
        "decisions": [to_value(&m)],
        "densities": [rq(&r.density)],
    });
    Ok(Outcome::new(results).with_table(table).fail_unless(m.accepted, "the return-times point was rejected"))
}
