use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use super::maps::ProductMap;
use crate::error::{param, Result};
use crate::rational::{q_usize, Q};
use crate::seqcore::{Point, PointMap, Space};

/// Decomposition checks are sampled, not proofs.
pub const SAMPLED_NOTE: &str = "sampled evidence";

type Membership = Arc<dyn Fn(&Point) -> bool + Send + Sync>;
type Sampler = Arc<dyn Fn(&mut ChaCha8Rng) -> Point + Send + Sync>;

/// A closed piece given by a membership test and a sampler.
#[derive(Clone)]
pub struct Piece {
    pub name: String,
    contains: Membership,
    sample: Sampler,
}

impl Piece {
    pub fn new(
        name: impl Into<String>,
        contains: impl Fn(&Point) -> bool + Send + Sync + 'static,
        sample: impl Fn(&mut ChaCha8Rng) -> Point + Send + Sync + 'static,
    ) -> Self {
        Piece { name: name.into(), contains: Arc::new(contains), sample: Arc::new(sample) }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.contains)(p)
    }
}

impl std::fmt::Debug for Piece {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Piece({})", self.name)
    }
}

/// Pieces `D_0, ..., D_{r-1}` that the map should permute cyclically.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
}

impl Decomposition {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return param("a decomposition needs at least one piece");
        }
        Ok(Decomposition { pieces })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceReport {
    pub piece: usize,
    pub pass_fraction: f64,
    /// Up to ten sampled points whose image left the next piece.
    pub violations: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub pieces: Vec<PieceReport>,
    pub pass: bool,
    /// Fraction of grid points lying in some piece.
    pub coverage: f64,
    /// Fraction of grid points lying in more than one piece; closed pieces
    /// share boundaries, so this is small but not zero.
    pub overlap: f64,
    pub note: &'static str,
}

const MAX_VIOLATIONS: usize = 10;

/// Samples `samples` points from each piece and checks
/// `T(D_i) ⊂ D_{(i+1) mod r}`; coverage and overlap use a grid with
/// `grid_res` values per coordinate.
pub fn verify_decomposition(
    map: &dyn PointMap,
    d: &Decomposition,
    samples: usize,
    seed: u64,
    grid_res: usize,
) -> Result<DecompositionReport> {
    if samples == 0 {
        return param("samples must be >= 1");
    }
    let space = map.space();
    let r = d.pieces.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(r);
    for (i, piece) in d.pieces.iter().enumerate() {
        let next = &d.pieces[(i + 1) % r];
        let mut ok = 0usize;
        let mut violations = Vec::new();
        for _ in 0..samples {
            let p = (piece.sample)(&mut rng);
            space.check(&p)?;
            if next.contains(&map.apply(&p)) {
                ok += 1;
            } else if violations.len() < MAX_VIOLATIONS {
                violations.push(space.point_json(&p));
            }
        }
        reports.push(PieceReport { piece: i, pass_fraction: ok as f64 / samples as f64, violations });
    }
    let grid = space.grid(grid_res);
    let (mut covered, mut multiple) = (0usize, 0usize);
    for p in &grid {
        let hits = d.pieces.iter().filter(|pc| pc.contains(p)).count();
        covered += usize::from(hits > 0);
        multiple += usize::from(hits > 1);
    }
    let total = grid.len().max(1) as f64;
    Ok(DecompositionReport {
        pass: reports.iter().all(|p| p.violations.is_empty()),
        pieces: reports,
        coverage: covered as f64 / total,
        overlap: multiple as f64 / total,
        note: SAMPLED_NOTE,
    })
}

const SAMPLE_DEN: usize = 1 << 16;

fn in_arc(x: &Q, j: usize, n: usize) -> bool {
    let lo = q_usize(j, n);
    let hi = q_usize(j + 1, n);
    (*x >= lo && *x <= hi) || (j + 1 == n && *x == Q::from_integer(0.into()))
}

fn sample_arc(rng: &mut ChaCha8Rng, j: usize, n: usize) -> Q {
    let u = rng.gen_range(0..=SAMPLE_DEN);
    let x = q_usize(j * SAMPLE_DEN + u, n * SAMPLE_DEN);
    crate::rational::frac(&x)
}

/// The arcs `[j/n, (j+1)/n]` of the circle.
pub fn interval_decomposition(n: usize) -> Result<Decomposition> {
    if n == 0 {
        return param("need at least one arc");
    }
    Decomposition::new(
        (0..n)
            .map(|j| {
                Piece::new(
                    format!("[{j}/{n},{}/{n}]", j + 1),
                    move |p| p.as_circle().is_some_and(|x| in_arc(x, j, n)),
                    move |rng| Point::Circle(sample_arc(rng, j, n)),
                )
            })
            .collect(),
    )
}

/// `T^k × [j/n, (j+1)/n]` for `j` in `arcs`.
pub fn product_decomposition(k: usize, n: usize, arcs: &[usize]) -> Result<Decomposition> {
    if arcs.iter().any(|&j| j >= n) {
        return param("arc index out of range");
    }
    Decomposition::new(
        arcs.iter()
            .map(|&j| {
                Piece::new(
                    format!("T^{k}x[{j}/{n},{}/{n}]", j + 1),
                    move |p| match p {
                        Point::Product(parts) if parts.len() == 2 => {
                            parts[1].as_circle().is_some_and(|x| in_arc(x, j, n))
                        }
                        _ => false,
                    },
                    move |rng| {
                        let torus = Space::Torus(k).sample(rng, SAMPLE_DEN);
                        Point::Product(vec![torus, Point::Circle(sample_arc(rng, j, n))])
                    },
                )
            })
            .collect(),
    )
}

/// Checks `F^n(T^k × [0, 1/n]) ⊂ T^k × [0, 1/n]` on sampled points.
pub fn power_invariance(f: &ProductMap, samples: usize, seed: u64) -> Result<DecompositionReport> {
    let n = f.t.n();
    let power = crate::seqcore::PowerMap { base: f, r: n };
    let d = product_decomposition(f.s.dim(), n, &[0])?;
    verify_decomposition(&power, &d, samples, seed, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{product_map, TnMap, TorusAuto};
    use crate::seqcore::Identity;

    #[test]
    fn whole_space_single_piece() {
        let d = Decomposition::new(vec![Piece::new("all", |_| true, |rng| Space::Circle.sample(rng, 64))]).unwrap();
        let r = verify_decomposition(&Identity(Space::Circle), &d, 100, 1, 64).unwrap();
        assert!(r.pass);
        assert_eq!(r.coverage, 1.0);
    }

    #[test]
    fn tn_arcs_cycle() {
        for n in [2, 3, 5] {
            let t = TnMap::new(n).unwrap();
            let r = verify_decomposition(&t, &interval_decomposition(n).unwrap(), 1000, 7, 300 * n).unwrap();
            assert!(r.pass, "n = {n}");
            assert_eq!(r.coverage, 1.0);
        }
    }

    #[test]
    fn wrong_order_fails() {
        let t = TnMap::new(3).unwrap();
        let mut d = interval_decomposition(3).unwrap();
        d.pieces.swap(1, 2);
        let r = verify_decomposition(&t, &d, 200, 7, 30).unwrap();
        assert!(!r.pass);
        assert!(!r.pieces[0].violations.is_empty());
    }

    #[test]
    fn product_power_keeps_first_slab() {
        let s = TorusAuto::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        let f = product_map(s, TnMap::new(3).unwrap());
        assert!(power_invariance(&f, 100, 3).unwrap().pass);
        let d = product_decomposition(2, 3, &[0, 1, 2]).unwrap();
        assert!(verify_decomposition(&f, &d, 200, 5, 6).unwrap().pass);
    }
}
