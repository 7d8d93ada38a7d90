use besico::pseudometrics::{besicovitch, dbar, dprime, j_delta, star_check, ScheduleValue, StarReport};
use besico::rational::{q_usize, Q};
use besico::seqcore::{circle_distance, Point, PointSequence, Space, SymbolicSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{alphabet, rational, rational_list};
use crate::args::{DistArgs, Metric, SeqSpace, StarArgs};
use crate::report::{input, obj, rq, CliResult, Outcome, Table};
use crate::Ctx;

fn schedule_table(values: &[ScheduleValue]) -> Table {
    let mut t = Table::new(&["n", "value"]);
    for v in values {
        t.push(vec![json!(v.n), rq(&v.value)]);
    }
    t
}

fn circle_sequence(s: &str, horizon: usize) -> CliResult<PointSequence> {
    let pts = rational_list(s, "circle points")?;
    let points = (0..horizon).map(|i| Point::circle(pts[i % pts.len()].clone())).collect();
    Ok(PointSequence::new(Space::Circle, points)?)
}

pub fn dist(a: &DistArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(1000);
    let delta = match (&a.metric, &a.delta) {
        (Metric::Jdelta, Some(d)) => Some(rational(d, "--delta")?),
        (Metric::Jdelta, None) => return input("--metric jdelta needs --delta"),
        (_, Some(_)) => return input("--delta only applies to --metric jdelta"),
        _ => None,
    };
    let (px, py, symbols) = match a.space {
        SeqSpace::Symbolic => {
            let al = alphabet(&a.alphabet)?;
            let x = SymbolicSequence::parse(&al, &a.x)?;
            let y = SymbolicSequence::parse(&al, &a.y)?;
            (PointSequence::from_symbols(&x, h)?, PointSequence::from_symbols(&y, h)?, Some((x, y)))
        }
        SeqSpace::Circle => (circle_sequence(&a.x, h)?, circle_sequence(&a.y, h)?, None),
    };
    let base = |value: &Q| vec![("metric", crate::report::to_value(&a.metric)), ("horizon", json!(h)), ("value", rq(value))];
    Ok(match a.metric {
        Metric::Besicovitch => {
            let r = besicovitch(&px, &py, h)?;
            let mut fields = base(&r.value);
            fields.push(("window_sup", rq(&r.window_sup)));
            Outcome::new(obj(fields)).with_table(schedule_table(&r.schedule))
        }
        Metric::Dbar => {
            let Some((x, y)) = symbols else {
                return input("dbar is defined for symbolic sequences only");
            };
            let r = dbar(&x, &y, h)?;
            let mut fields = base(&r.final_value);
            fields.push(("running_max", rq(&r.running_max)));
            Outcome::new(obj(fields)).with_table(schedule_table(&r.running_values))
        }
        Metric::Dprime => Outcome::new(obj(base(&dprime(&px, &py, h)?))),
        Metric::Jdelta => {
            let d = delta.expect("checked above");
            let r = j_delta(&px, &py, &d, h)?;
            let mut fields = base(&r.final_value);
            fields.push(("delta", rq(&d)));
            fields.push(("running_max", rq(&r.running_max)));
            Outcome::new(obj(fields)).with_table(schedule_table(&r.running_values))
        }
    })
}

const KINDS: [&str; 3] = ["symbolic", "circle", "rotation"];

/// Distances of a random pair of the given kind: biased coin flips under
/// the discrete metric, random points of `(1/24)Z` on the circle, or two
/// rational rotation orbits.
fn random_distances(rng: &mut ChaCha8Rng, kind: usize, h: usize) -> Vec<Q> {
    match kind {
        0 => {
            let p = rng.gen_range(1..10) as f64 / 10.0;
            (0..h).map(|_| if rng.gen_bool(p) { Q::from_integer(1.into()) } else { Q::from_integer(0.into()) }).collect()
        }
        1 => (0..h)
            .map(|_| circle_distance(&q_usize(rng.gen_range(0..24), 24), &q_usize(rng.gen_range(0..24), 24)))
            .collect(),
        _ => {
            let den = rng.gen_range(2..60);
            let (a, b) = (q_usize(rng.gen_range(0..den), den), q_usize(rng.gen_range(0..den), den));
            let (x0, y0) = (q_usize(rng.gen_range(0..den), den), q_usize(rng.gen_range(0..den), den));
            (0..h)
                .map(|i| {
                    let n = Q::from_integer(i.into());
                    circle_distance(&(&x0 + &n * &a), &(&y0 + &n * &b))
                })
                .collect()
        }
    }
}

pub fn star(a: &StarArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(10_000);
    let seed = ctx.seed()?;
    if a.trials == 0 {
        return input("--trials must be >= 1");
    }
    // one ChaCha stream per trial, collected in trial order
    let reports: Vec<(usize, StarReport)> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let kind = i % KINDS.len();
            (kind, star_check(&random_distances(&mut rng, kind, h)))
        })
        .collect();
    let mut table = Table::new(&["trial", "kind", "horizons", "checked", "violations"]);
    let (mut checked, mut violations) = (0u64, 0u64);
    for (i, (kind, r)) in reports.iter().enumerate() {
        checked += r.checked;
        violations += r.violations;
        table.push(vec![json!(i), json!(KINDS[*kind]), json!(r.horizons), json!(r.checked), json!(r.violations)]);
    }
    let results = json!({
        "trials": a.trials,
        "horizon": h,
        "checked": checked,
        "violations": violations,
        "all_hold": violations == 0,
    });
    Ok(Outcome::new(results).with_table(table).fail_unless(violations == 0, format!("{violations} violations")))
}
