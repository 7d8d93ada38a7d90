use besico::dynsys::TnMap;
use besico::measures::FiniteMeasure;
use besico::pseudometrics::upper_density;
use besico::rational::q_usize;
use besico::seqcore::{EventuallyPeriodic, Point, PowerMap, ShiftMap, Space};
use besico::shadowing::{
    brute_force_tracer, check_asymptotic_average_po, check_spaced_specification, expand_from_power, lift_to_power,
    sigmund_pseudo_orbit, QuasiGeneric, Segment, SegmentSchedule, Specification,
};
use besico::shiftspace::Sft;
use serde_json::json;

use super::{alphabet, rational, rational_list};
use crate::args::{ScheduleArgs, SegmentArgs, ShadowCmd, SigmundArgs, SpecCmd};
use crate::report::{input, null_if_none, rq, to_value, CliError, CliResult, Outcome, Table};
use crate::Ctx;

pub fn run(cmd: &ShadowCmd, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        ShadowCmd::Sigmund(a) => sigmund(a, ctx),
        ShadowCmd::Schedule(a) => schedule(a, ctx),
    }
}

/// The uniform measure on the periodic part of the orbit of `p`.
fn orbit_measure(space: &Space, p: &EventuallyPeriodic) -> CliResult<FiniteMeasure> {
    let start = p.prefix().len();
    let pts: Vec<Point> = (0..p.period().len()).map(|i| Point::Seq(p.shifted(start + i))).collect();
    Ok(FiniteMeasure::uniform(space.clone(), &pts)?)
}

fn sigmund(a: &SigmundArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let h = ctx.horizon_or(1 << 16);
    let al = alphabet(&a.alphabet)?;
    let space = Space::Shift(al.clone());
    let tolerance = rational(&a.tolerance, "--tolerance")?;
    let mut targets = Vec::new();
    for t in a.targets.split(',') {
        let p = EventuallyPeriodic::parse(&al, t.trim())?;
        targets.push(QuasiGeneric { target: orbit_measure(&space, &p)?, base: Point::Seq(p), tolerance: tolerance.clone() });
    }
    let map = ShiftMap::new(al);
    let out = sigmund_pseudo_orbit(&map, &targets, a.r, a.ratio, h)?;
    let best = out.best_per_target(targets.len());
    let close = best.iter().all(|b| b.as_ref().is_some_and(|d| *d <= tolerance));
    let po = if h >= 2 { Some(check_asymptotic_average_po(&map, &out.sequence, h - 1, None)?) } else { None };
    let po_ok = po.as_ref().is_none_or(|r| r.consistent_with_zero == Some(true));
    let boundary = upper_density(out.boundary_indicator(), h)?;
    let mut table = Table::new(&["n", "target", "distance"]);
    for c in &out.checkpoints {
        table.push(vec![json!(c.n), json!(c.target), rq(&c.distance)]);
    }
    let results = json!({
        "horizon": h,
        "segments": out.schedule.lengths().len() - 1,
        "best_per_target": best.iter().map(|b| b.as_ref().map(rq)).collect::<Vec<_>>(),
        "certified": out.certified.iter().map(rq).collect::<Vec<_>>(),
        "targets_reached": close,
        "boundary_density": rq(&boundary.final_value),
        "pseudo_orbit": null_if_none(po),
        "note": out.note,
    });
    Ok(Outcome::new(results)
        .with_table(table)
        .fail_unless(close, "a target was never approached within the tolerance")
        .fail_unless(po_ok, "the sequence is not an asymptotic average pseudo-orbit at this horizon"))
}

fn schedule(a: &ScheduleArgs, ctx: &Ctx) -> CliResult<Outcome> {
    let t = TnMap::new(a.n)?;
    let bases = rational_list(&a.bases, "--bases")?.into_iter().map(Point::circle).collect();
    let s = SegmentSchedule::quadratic(a.r, a.segments, bases)?;
    let total = s.total();
    let h = ctx.horizon_or(total).min(total);
    if h < 2 {
        return input("the schedule needs at least two points");
    }
    let z = s.build(&t, h)?;
    let rep = check_asymptotic_average_po(&t, &z, h - 1, None)?;
    let mut table = Table::new(&["n", "tail_avg", "bound"]);
    let mut decay = true;
    for v in &rep.tail_avgs {
        let bound = q_usize(3 * s.segments_before(v.n + 1), v.n);
        decay &= v.value <= bound;
        table.push(vec![json!(v.n), rq(&v.value), rq(&bound)]);
    }
    let power = PowerMap { base: &t, r: a.r };
    let zp = lift_to_power(&z, a.r)?;
    let lifted = if zp.horizon() >= 2 { Some(check_asymptotic_average_po(&power, &zp, zp.horizon() - 1, None)?) } else { None };
    let lift_ok = lifted.as_ref().is_none_or(|r| r.consistent_with_zero == Some(true));
    let round_trip = expand_from_power(&zp, &t, a.r, z.horizon())? == z;
    let po_ok = rep.consistent_with_zero == Some(true);
    let results = json!({
        "map": format!("T_{}", a.n),
        "horizon": h,
        "lengths": s.lengths(),
        "consistent_with_zero": po_ok,
        "tail_decay": decay,
        "final_avg": rq(&rep.max_window_avg),
        "power_lift_consistent": lift_ok,
        "expand_round_trip": round_trip,
    });
    Ok(Outcome::new(results)
        .with_table(table)
        .fail_unless(po_ok && decay, "tail averages did not decay")
        .fail_unless(lift_ok && round_trip, "the power-map lift failed"))
}

fn segments(a: &SegmentArgs) -> CliResult<Specification> {
    let al = alphabet(&a.alphabet)?;
    let mut segs = Vec::new();
    for entry in a.segments.split(';').filter(|e| !e.trim().is_empty()) {
        let mut parts = entry.trim().splitn(3, ':');
        let (Some(sa), Some(sb), Some(p)) = (parts.next(), parts.next(), parts.next()) else {
            return input(format!("segment {entry:?} is not a:b:prefix|period"));
        };
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::Input(format!("bad index in {entry:?}")));
        segs.push(Segment { a: num(sa)?, b: num(sb)?, point: Point::Seq(EventuallyPeriodic::parse(&al, p.trim())?) });
    }
    let gap = a.gap;
    Ok(Specification::new(segs, move |_| gap)?)
}

pub fn spec(cmd: &SpecCmd, _ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        SpecCmd::Check(a) => {
            let s = segments(&a.seg)?;
            Ok(Outcome::new(json!({ "segments": s.segments().len(), "spaced": check_spaced_specification(&s) })))
        }
        SpecCmd::Trace(a) => {
            let s = segments(&a.seg)?;
            let al = alphabet(&a.seg.alphabet)?;
            let words: Vec<&str> = a.forbidden.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
            let sft = Sft::parse(al, &words)?;
            let eps = rational(&a.eps, "--eps")?;
            let r = brute_force_tracer(&sft, &s, &eps, a.max_depth)?;
            Ok(Outcome::new(json!({
                "segments": s.segments().len(),
                "spaced": check_spaced_specification(&s),
                "eps": rq(&eps),
                "trace": to_value(&r),
            })))
        }
    }
}
