use besico::measures::{empirical, prokhorov, prokhorov_bruteforce, pushforward, FiniteMeasure};
use besico::rational::{geometric_schedule, q_usize};
use besico::seqcore::{orbit, EventuallyPeriodic, Point, ShiftMap, Space};
use serde_json::json;

use super::{alphabet, json_arg, space};
use crate::args::{MeasuresCmd, ProkhorovArgs, ShiftBoundArgs};
use crate::report::{rq, CliResult, Outcome, Table};
use crate::Ctx;

pub fn run(cmd: &MeasuresCmd, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        MeasuresCmd::Prokhorov(a) => prokhorov_cmd(a),
        MeasuresCmd::ShiftBound(a) => shift_bound(a, ctx),
    }
}

fn prokhorov_cmd(a: &ProkhorovArgs) -> CliResult<Outcome> {
    let sp = space(&a.space)?;
    let mu = FiniteMeasure::from_json(sp.clone(), &json_arg(&a.mu)?)?;
    let nu = FiniteMeasure::from_json(sp, &json_arg(&a.nu)?)?;
    let d = prokhorov(&mu, &nu)?;
    let mut results = json!({
        "space": a.space,
        "support_sizes": [mu.support_size(), nu.support_size()],
        "value": rq(&d),
    });
    let mut agree = true;
    if a.oracle {
        let b = prokhorov_bruteforce(&mu, &nu)?;
        agree = b == d;
        results["oracle"] = rq(&b);
        results["oracle_agrees"] = json!(agree);
    }
    Ok(Outcome::new(results).fail_unless(agree, "flow and brute force disagree"))
}

/// Along the geometric schedule: `π(m(x,n), m(σx,n)) <= 2/n`, and the
/// pushforward of `m(x,n)` under the shift equals `m(σx,n)`.
fn shift_bound(a: &ShiftBoundArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(1000);
    let al = alphabet(&a.alphabet)?;
    let x = EventuallyPeriodic::parse(&al, &a.x)?;
    let map = ShiftMap::new(al.clone());
    let orb = orbit(&map, &Point::Seq(x), h + 1)?;
    let shifted = orb.shift(1)?;
    let mut table = Table::new(&["n", "distance", "bound", "pushforward_equal"]);
    let (mut bound_ok, mut push_ok) = (true, true);
    for n in geometric_schedule(h) {
        let mu = empirical(&orb, n)?;
        let nu = empirical(&shifted, n)?;
        let d = prokhorov(&mu, &nu)?;
        let bound = q_usize(2, n);
        let push = pushforward(&map, &mu)? == nu;
        bound_ok &= d <= bound;
        push_ok &= push;
        table.push(vec![json!(n), rq(&d), rq(&bound), json!(push)]);
    }
    let results = json!({
        "space": Space::Shift(al).to_string(),
        "horizon": h,
        "bound_holds": bound_ok,
        "pushforward_commutes": push_ok,
    });
    Ok(Outcome::new(results)
        .with_table(table)
        .fail_unless(bound_ok, "shift moved the empirical measure by more than 2/n")
        .fail_unless(push_ok, "pushforward of the empirical measure differs"))
}
