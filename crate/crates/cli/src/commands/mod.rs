mod dist;
mod entropy;
mod maps;
mod measures;
mod shadow;
mod ylab;

use besico::rational::parse_q;
use besico::seqcore::{Alphabet, Space};
use besico::Q;
use serde_json::Value;

use crate::args::Command;
use crate::report::{input, CliError, CliResult, Outcome};
use crate::Ctx;

pub fn dispatch(cmd: &Command, ctx: &Ctx) -> CliResult<Outcome> {
    match cmd {
        Command::Dist(a) => dist::dist(a, ctx),
        Command::StarCheck(a) => dist::star(a, ctx),
        Command::Measures(c) => measures::run(c, ctx),
        Command::YLab(c) => ylab::run(c, ctx),
        Command::Shadow(c) => shadow::run(c, ctx),
        Command::Spec(c) => shadow::spec(c, ctx),
        Command::Maps(c) => maps::run(c, ctx),
        Command::Entropy(a) => entropy::run(a, ctx),
        Command::Run(_) => unreachable!("run is expanded before dispatch"),
    }
}

pub(crate) fn rational(s: &str, what: &str) -> CliResult<Q> {
    parse_q(s).ok_or_else(|| CliError::Input(format!("{what}: cannot read {s:?} as a rational")))
}

pub(crate) fn rational_list(s: &str, what: &str) -> CliResult<Vec<Q>> {
    let out = s.split(',').map(|x| rational(x, what)).collect::<CliResult<Vec<_>>>()?;
    if out.is_empty() {
        return input(format!("{what}: empty list"));
    }
    Ok(out)
}

pub(crate) fn alphabet(s: &str) -> CliResult<Alphabet> {
    Ok(Alphabet::new(s.chars())?)
}

/// `circle`, `torus:K`, `discrete:GLYPHS` or `shift:GLYPHS`.
pub(crate) fn space(s: &str) -> CliResult<Space> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    match (kind, arg) {
        ("circle", "") => Ok(Space::Circle),
        ("torus", k) => match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Space::Torus(k)),
            _ => input(format!("bad torus dimension in {s:?}")),
        },
        ("discrete", g) => Ok(Space::Discrete(alphabet(g)?)),
        ("shift", g) => Ok(Space::Shift(alphabet(g)?)),
        _ => input(format!("unknown space {s:?}")),
    }
}

/// Inline JSON or the contents of a file.
pub(crate) fn json_arg(s: &str) -> CliResult<Value> {
    let text = if s.trim_start().starts_with(['{', '[']) {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::Input(format!("{s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

/// Integer matrix `a,b;c,d`.
pub(crate) fn matrix(s: &str) -> CliResult<Vec<Vec<i64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Input(format!("bad matrix entry {x:?}"))))
                .collect()
        })
        .collect()
}
