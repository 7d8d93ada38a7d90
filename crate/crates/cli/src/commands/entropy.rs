use besico::proximal::{build_f_graph, GstParams, YParams};
use besico::seqcore::Alphabet;
use besico::shiftspace::{entropy_estimate, intersect, Language, Sft, Shift, SoficShift};
use serde_json::json;

use crate::args::EntropyArgs;
use crate::report::{input, CliError, CliResult, Outcome, Table};
use crate::Ctx;

fn level_shift(p: GstParams) -> CliResult<Shift> {
    Ok(Shift::Sofic(SoficShift::new(build_f_graph(p))?))
}

/// The shift named by `--shift`, and ln of the golden ratio when it is the
/// golden mean shift.
fn named_shift(s: &str) -> CliResult<(Box<dyn Language>, Option<f64>)> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    match (kind, arg) {
        ("golden", "") => Ok((Box::new(Sft::golden_mean()), Some(((1.0 + 5f64.sqrt()) / 2.0).ln()))),
        ("y2", "") | ("y", _) => {
            let depth: u32 = if kind == "y2" { 2 } else { arg.parse().map_err(|_| CliError::Input(format!("bad depth in {s:?}")))? };
            let yp = YParams::new(depth)?;
            let levels = (1..=depth).map(|i| level_shift(yp.level(i)?)).collect::<CliResult<Vec<_>>>()?;
            Ok((Box::new(intersect(&levels)?.shift), None))
        }
        ("f", st) => {
            let nums: Vec<usize> = st.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| CliError::Input(format!("bad f:S,T in {s:?}")))?;
            let [a, b] = nums[..] else {
                return input(format!("expected f:S,T, got {s:?}"));
            };
            let Shift::Sofic(sh) = level_shift(GstParams::new(a, b)?)? else { unreachable!() };
            Ok((Box::new(sh), None))
        }
        ("sft", words) => {
            let w: Vec<&str> = words.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
            Ok((Box::new(Sft::parse(Alphabet::binary(), &w)?), None))
        }
        _ => input(format!("unknown shift {s:?}")),
    }
}

pub fn run(a: &EntropyArgs, _ctx: &Ctx) -> CliResult<Outcome> {
    let (space, reference) = named_shift(&a.shift)?;
    let e = entropy_estimate(space.as_ref(), a.n)?;
    let mut table = Table::new(&["n", "estimate"]);
    for (n, v) in &e.values {
        table.push(vec![json!(n), json!(v)]);
    }
    let results = json!({
        "shift": a.shift,
        "n": a.n,
        "estimate": e.final_value,
        "nonincreasing": e.nonincreasing,
        "reference": reference,
        "abs_error": reference.map(|r| (e.final_value - r).abs()),
    });
    Ok(Outcome::new(results).with_table(table))
}
