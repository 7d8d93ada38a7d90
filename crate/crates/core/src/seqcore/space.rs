use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use super::alphabet::{Alphabet, Symbol};
use super::sequence::{EventuallyPeriodic, SymbolicSequence};
use crate::error::{Error, Result};
use crate::rational::{frac, parse_q, pow2_neg, q_usize, Q};

/// Ambient compact metric spaces, every one normalized to diameter 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    /// Discrete 0/1 metric on an alphabet.
    Discrete(Alphabet),
    /// `R/Z` with `2·min(|x−y|, 1−|x−y|)`.
    Circle,
    /// `T^k` with the max of coordinate circle distances.
    Torus(usize),
    /// Max of the component distances.
    Product(Vec<Space>),
    /// One-sided full shift with `2^{-first difference}`; points are
    /// eventually periodic sequences.
    Shift(Alphabet),
}

/// A point in one of the [`Space`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Symbol(Symbol),
    Circle(Q),
    Torus(Vec<Q>),
    Product(Vec<Point>),
    Seq(EventuallyPeriodic),
}

impl Point {
    pub fn circle(x: Q) -> Point {
        Point::Circle(frac(&x))
    }

    pub fn torus(coords: Vec<Q>) -> Point {
        Point::Torus(coords.iter().map(frac).collect())
    }

    pub fn as_circle(&self) -> Option<&Q> {
        match self {
            Point::Circle(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<Symbol> {
        match self {
            Point::Symbol(s) => Some(*s),
            _ => None,
        }
    }
}

pub fn circle_distance(x: &Q, y: &Q) -> Q {
    let d = (x - y).abs();
    let d = frac(&d);
    let other = Q::one() - &d;
    let m = if d < other { d } else { other };
    m * Q::from_integer(2.into())
}

/// The discrete symbol metric.
pub fn discrete_distance(alphabet: &Alphabet, a: Symbol, b: Symbol) -> Result<u8> {
    if !alphabet.contains(a) || !alphabet.contains(b) {
        return Err(Error::AlphabetMismatch(format!("symbols {} / {} not in {alphabet}", a.0, b.0)));
    }
    Ok(u8::from(a != b))
}

fn max_q(values: impl Iterator<Item = Q>) -> Q {
    values.fold(Q::zero(), |m, v| if v > m { v } else { m })
}

impl Space {
    pub fn contains(&self, p: &Point) -> bool {
        let unit = |x: &Q| x >= &Q::zero() && x < &Q::one();
        match (self, p) {
            (Space::Discrete(a), Point::Symbol(s)) => a.contains(*s),
            (Space::Circle, Point::Circle(x)) => unit(x),
            (Space::Torus(k), Point::Torus(v)) => v.len() == *k && v.iter().all(unit),
            (Space::Product(spaces), Point::Product(ps)) => {
                spaces.len() == ps.len() && spaces.iter().zip(ps).all(|(s, p)| s.contains(p))
            }
            (Space::Shift(a), Point::Seq(ep)) => {
                ep.prefix().iter().chain(ep.period()).all(|s| a.contains(*s))
            }
            _ => false,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("{p:?} is not a point of {self}")))
        }
    }

    /// Distance in `[0, 1]`. Panics if either point is outside the space;
    /// use [`Space::check`] first on untrusted input.
    pub fn distance(&self, a: &Point, b: &Point) -> Q {
        match (self, a, b) {
            (Space::Discrete(_), Point::Symbol(x), Point::Symbol(y)) => {
                if x == y {
                    Q::zero()
                } else {
                    Q::one()
                }
            }
            (Space::Circle, Point::Circle(x), Point::Circle(y)) => circle_distance(x, y),
            (Space::Torus(_), Point::Torus(x), Point::Torus(y)) => {
                max_q(x.iter().zip(y).map(|(u, v)| circle_distance(u, v)))
            }
            (Space::Product(spaces), Point::Product(x), Point::Product(y)) => {
                max_q(spaces.iter().zip(x.iter().zip(y)).map(|(s, (u, v))| s.distance(u, v)))
            }
            (Space::Shift(_), Point::Seq(x), Point::Seq(y)) => match x.first_difference(y) {
                None => Q::zero(),
                Some(k) => pow2_neg(k),
            },
            _ => panic!("points {a:?} and {b:?} do not belong to {self}"),
        }
    }

    /// Checked distance.
    pub fn try_distance(&self, a: &Point, b: &Point) -> Result<Q> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distance(a, b))
    }

    /// A uniform grid with `res` values per real coordinate; symbol
    /// coordinates range over the alphabet.
    pub fn grid(&self, res: usize) -> Vec<Point> {
        let res = res.max(1);
        match self {
            Space::Discrete(a) => a.symbols().map(Point::Symbol).collect(),
            Space::Circle => (0..res).map(|j| Point::Circle(q_usize(j, res))).collect(),
            Space::Torus(k) => {
                let mut out = vec![Vec::new()];
                for _ in 0..*k {
                    out = out
                        .into_iter()
                        .flat_map(|v: Vec<Q>| {
                            (0..res).map(move |j| {
                                let mut w = v.clone();
                                w.push(q_usize(j, res));
                                w
                            })
                        })
                        .collect();
                }
                out.into_iter().map(Point::Torus).collect()
            }
            Space::Product(spaces) => {
                let mut out = vec![Vec::new()];
                for s in spaces {
                    let g = s.grid(res);
                    out = out
                        .into_iter()
                        .flat_map(|v: Vec<Point>| {
                            g.iter().map(move |p| {
                                let mut w = v.clone();
                                w.push(p.clone());
                                w
                            })
                        })
                        .collect();
                }
                out.into_iter().map(Point::Product).collect()
            }
            Space::Shift(a) => a.symbols().map(|s| Point::Seq(EventuallyPeriodic::constant(s))).collect(),
        }
    }

    /// Random rational point; real coordinates have denominator `den`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, den: usize) -> Point {
        let den = den.max(1);
        match self {
            Space::Discrete(a) => Point::Symbol(Symbol(rng.gen_range(0..a.len()) as u8)),
            Space::Circle => Point::Circle(q_usize(rng.gen_range(0..den), den)),
            Space::Torus(k) => Point::Torus((0..*k).map(|_| q_usize(rng.gen_range(0..den), den)).collect()),
            Space::Product(spaces) => Point::Product(spaces.iter().map(|s| s.sample(rng, den)).collect()),
            Space::Shift(a) => {
                let pre = (0..rng.gen_range(0..4)).map(|_| Symbol(rng.gen_range(0..a.len()) as u8)).collect();
                let per = (0..rng.gen_range(1..5)).map(|_| Symbol(rng.gen_range(0..a.len()) as u8)).collect();
                Point::Seq(EventuallyPeriodic::new(pre, per).expect("nonempty period"))
            }
        }
    }

    pub fn point_json(&self, p: &Point) -> Value {
        match (self, p) {
            (Space::Discrete(a), Point::Symbol(s)) => json!(a.glyph(*s).to_string()),
            (Space::Circle, Point::Circle(x)) => json!(x.to_string()),
            (Space::Torus(_), Point::Torus(v)) => json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            (Space::Product(spaces), Point::Product(ps)) => {
                Value::Array(spaces.iter().zip(ps).map(|(s, p)| s.point_json(p)).collect())
            }
            (Space::Shift(a), Point::Seq(ep)) => json!(ep.render(a)),
            _ => Value::Null,
        }
    }

    pub fn parse_point(&self, v: &Value) -> Result<Point> {
        let bad = || Error::Parse(format!("cannot read {v} as a point of {self}"));
        let p = match (self, v) {
            (Space::Discrete(a), Value::String(s)) => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Point::Symbol(a.symbol(c)?),
                    _ => return Err(bad()),
                }
            }
            (Space::Circle, Value::String(s)) => Point::circle(parse_q(s).ok_or_else(bad)?),
            (Space::Torus(_), Value::Array(xs)) => Point::torus(
                xs.iter()
                    .map(|x| x.as_str().and_then(parse_q).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (Space::Product(spaces), Value::Array(xs)) if xs.len() == spaces.len() => Point::Product(
                spaces.iter().zip(xs).map(|(s, x)| s.parse_point(x)).collect::<Result<Vec<_>>>()?,
            ),
            (Space::Shift(a), Value::String(s)) => Point::Seq(EventuallyPeriodic::parse(a, s)?),
            _ => return Err(bad()),
        };
        self.check(&p)?;
        Ok(p)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Discrete(a) => write!(f, "discrete{a}"),
            Space::Circle => write!(f, "circle"),
            Space::Torus(k) => write!(f, "torus^{k}"),
            Space::Product(s) => {
                write!(f, "product(")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Space::Shift(a) => write!(f, "shift{a}"),
        }
    }
}

/// A continuous self-map of a [`Space`].
pub trait PointMap: Send + Sync {
    fn space(&self) -> &Space;
    fn apply(&self, p: &Point) -> Point;

    fn name(&self) -> String {
        "map".to_string()
    }

    fn iterate(&self, p: &Point, n: usize) -> Point {
        let mut x = p.clone();
        for _ in 0..n {
            x = self.apply(&x);
        }
        x
    }
}

/// Identity on a space.
#[derive(Debug, Clone)]
pub struct Identity(pub Space);

impl PointMap for Identity {
    fn space(&self) -> &Space {
        &self.0
    }
    fn apply(&self, p: &Point) -> Point {
        p.clone()
    }
    fn name(&self) -> String {
        "identity".into()
    }
}

/// The shift map on eventually periodic points.
#[derive(Debug, Clone)]
pub struct ShiftMap {
    space: Space,
}

impl ShiftMap {
    pub fn new(alphabet: Alphabet) -> Self {
        ShiftMap { space: Space::Shift(alphabet) }
    }
}

impl PointMap for ShiftMap {
    fn space(&self) -> &Space {
        &self.space
    }
    fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Seq(ep) => Point::Seq(ep.shifted(1)),
            _ => panic!("shift map applied to {p:?}"),
        }
    }
    fn name(&self) -> String {
        "shift".into()
    }
}

/// Circle rotation `x ↦ x + alpha mod 1`.
#[derive(Debug, Clone)]
pub struct Rotation {
    pub alpha: Q,
}

impl PointMap for Rotation {
    fn space(&self) -> &Space {
        &Space::Circle
    }
    fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Circle(x) => Point::circle(x + &self.alpha),
            _ => panic!("rotation applied to {p:?}"),
        }
    }
    fn name(&self) -> String {
        format!("rotation({})", self.alpha)
    }
}

/// A map given by a closure.
#[derive(Clone)]
pub struct FnMap {
    space: Space,
    label: String,
    f: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
}

impl FnMap {
    pub fn new(space: Space, label: impl Into<String>, f: impl Fn(&Point) -> Point + Send + Sync + 'static) -> Self {
        FnMap { space, label: label.into(), f: Arc::new(f) }
    }
}

impl PointMap for FnMap {
    fn space(&self) -> &Space {
        &self.space
    }
    fn apply(&self, p: &Point) -> Point {
        (self.f)(p)
    }
    fn name(&self) -> String {
        self.label.clone()
    }
}

/// `T^r`.
pub struct PowerMap<'a> {
    pub base: &'a dyn PointMap,
    pub r: usize,
}

impl PointMap for PowerMap<'_> {
    fn space(&self) -> &Space {
        self.base.space()
    }
    fn apply(&self, p: &Point) -> Point {
        self.base.iterate(p, self.r)
    }
    fn name(&self) -> String {
        format!("{}^{}", self.base.name(), self.r)
    }
}

/// A finite stretch `x_0 .. x_{horizon-1}` of points in a space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSequence {
    space: Space,
    points: Vec<Point>,
}

impl PointSequence {
    pub fn new(space: Space, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySequence("point sequence needs horizon >= 1".into()));
        }
        for p in &points {
            space.check(p)?;
        }
        Ok(PointSequence { space, points })
    }

    /// The first `horizon` symbols as points of the discrete space.
    pub fn from_symbols(seq: &SymbolicSequence, horizon: usize) -> Result<Self> {
        let word = seq.prefix(horizon)?;
        Self::new(Space::Discrete(seq.alphabet().clone()), word.into_iter().map(Point::Symbol).collect())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn shift(&self, k: usize) -> Result<Self> {
        if k >= self.points.len() {
            return Err(Error::EmptySequence(format!("shift by {k} of horizon {}", self.points.len())));
        }
        Ok(PointSequence { space: self.space.clone(), points: self.points[k..].to_vec() })
    }

    /// Pointwise image `T(x_0), T(x_1), ...`.
    pub fn map(&self, map: &dyn PointMap) -> Result<Self> {
        ensure_space(map.space(), &self.space)?;
        Ok(PointSequence { space: self.space.clone(), points: self.points.iter().map(|p| map.apply(p)).collect() })
    }

    pub fn truncate(&self, horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon > self.points.len() {
            return Err(Error::OutOfRange { index: horizon, horizon: self.points.len() });
        }
        Ok(PointSequence { space: self.space.clone(), points: self.points[..horizon].to_vec() })
    }

    /// Pointwise distances to another sequence over the first `horizon` indices.
    pub fn distances(&self, other: &PointSequence, horizon: usize) -> Result<Vec<Q>> {
        ensure_space(&self.space, &other.space)?;
        let h = self.horizon().min(other.horizon());
        if horizon > h {
            return Err(Error::OutOfRange { index: horizon, horizon: h });
        }
        Ok((0..horizon).map(|i| self.space.distance(&self.points[i], &other.points[i])).collect())
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

pub fn ensure_space(a: &Space, b: &Space) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{a} vs {b}")))
    }
}

/// `x0, T(x0), T²(x0), ...` up to `horizon` points.
pub fn orbit(map: &dyn PointMap, x0: &Point, horizon: usize) -> Result<PointSequence> {
    map.space().check(x0)?;
    if horizon == 0 {
        return Err(Error::EmptySequence("orbit horizon must be >= 1".into()));
    }
    let mut points = Vec::with_capacity(horizon);
    let mut x = x0.clone();
    for _ in 1..horizon {
        let next = map.apply(&x);
        points.push(x);
        x = next;
    }
    points.push(x);
    Ok(PointSequence { space: map.space().clone(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_metric(space: &Space, seed: u64, den: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x = space.sample(&mut rng, den);
            let y = space.sample(&mut rng, den);
            let z = space.sample(&mut rng, den);
            let dxy = space.distance(&x, &y);
            assert_eq!(space.distance(&x, &x), Q::zero());
            assert_eq!(dxy, space.distance(&y, &x));
            assert!(space.distance(&x, &z) <= &dxy + space.distance(&y, &z));
            assert!(dxy <= Q::one());
        }
    }

    #[test]
    fn metric_axioms_on_all_spaces() {
        let a = Alphabet::new(['a', 'b', 'c']).unwrap();
        check_metric(&Space::Discrete(a.clone()), 1, 1);
        check_metric(&Space::Circle, 2, 97);
        check_metric(&Space::Torus(3), 3, 12);
        check_metric(&Space::Product(vec![Space::Torus(2), Space::Circle, Space::Discrete(a.clone())]), 4, 10);
        check_metric(&Space::Shift(Alphabet::binary()), 5, 1);
    }

    #[test]
    fn diameter_is_one() {
        assert_eq!(circle_distance(&q(0, 1), &q(1, 2)), Q::one());
        let t = Space::Torus(2);
        assert_eq!(t.distance(&Point::torus(vec![q(0, 1), q(0, 1)]), &Point::torus(vec![q(1, 4), q(1, 2)])), Q::one());
    }

    #[test]
    fn discrete_distance_cases() {
        let a = Alphabet::new(['0', 'd', 'x']).unwrap();
        let z = a.symbol('0').unwrap();
        let d = a.symbol('d').unwrap();
        assert_eq!(discrete_distance(&a, z, z).unwrap(), 0);
        assert_eq!(discrete_distance(&a, z, d).unwrap(), 1);
        for x in a.symbols() {
            for y in a.symbols() {
                assert_eq!(discrete_distance(&a, x, y).unwrap(), discrete_distance(&a, y, x).unwrap());
            }
        }
        assert!(discrete_distance(&Alphabet::binary(), Symbol(0), Symbol(5)).is_err());
    }

    #[test]
    fn orbit_identity_and_rotation() {
        let x = Point::circle(q(1, 3));
        let o = orbit(&Identity(Space::Circle), &x, 5).unwrap();
        assert!(o.points().iter().all(|p| *p == x));
        let r = orbit(&Rotation { alpha: q(1, 3) }, &x, 3).unwrap();
        assert_eq!(r.points(), &[Point::circle(q(1, 3)), Point::circle(q(2, 3)), Point::circle(q(0, 1))]);
    }

    #[test]
    fn point_sequence_shift_composes() {
        let a = Alphabet::binary();
        let s = SymbolicSequence::parse(&a, "|0110").unwrap();
        let x = PointSequence::from_symbols(&s, 50).unwrap();
        let ab = x.shift(3).unwrap().shift(5).unwrap();
        assert_eq!(ab, x.shift(8).unwrap());
        assert!(x.shift(50).is_err());
    }
}
