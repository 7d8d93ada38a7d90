use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::error::{param, Error, Result};
use crate::rational::{frac, q_usize, Q};
use crate::seqcore::{Point, PointMap, Space};

/// The circle map `T_n` with three linear branches on `[0, 1/n)` and the
/// rotation by `1/n` on `[1/n, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TnMap {
    n: usize,
}

impl TnMap {
    /// Checks that the branches glue continuously on the circle.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return param(format!("T_n needs n >= 2, got {n}"));
        }
        let m = TnMap { n };
        for (x, left, right) in m.branch_limits() {
            if left != right {
                return Err(Error::Invariant(format!("T_{n} jumps at {x}: {left} vs {right}")));
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn inv_n(&self) -> Q {
        q_usize(1, self.n)
    }

    fn branch(&self, b: usize, x: &Q) -> Q {
        let three = Q::from_integer(3.into());
        let inv = self.inv_n();
        match b {
            0 => &three * x + &inv,
            1 => -(&three * x) + &three * &inv,
            2 => &three * x - &inv,
            _ => x + &inv,
        }
    }

    fn branch_index(&self, x: &Q) -> usize {
        let three_n = Q::from_integer((3 * self.n).into());
        let scaled = x * &three_n;
        if scaled < Q::one() {
            0
        } else if scaled < Q::from_integer(2.into()) {
            1
        } else if scaled < Q::from_integer(3.into()) {
            2
        } else {
            3
        }
    }

    /// `(x, left limit, right value)` at each breakpoint, all mod 1. The
    /// point `1 ≡ 0` compares the last branch at 1 with the first at 0.
    pub fn branch_limits(&self) -> Vec<(Q, Q, Q)> {
        let mut out = Vec::new();
        for b in 1..=3 {
            let x = q_usize(b, 3 * self.n);
            out.push((x.clone(), frac(&self.branch(b - 1, &x)), frac(&self.branch(b, &x))));
        }
        out.push((Q::one(), frac(&self.branch(3, &Q::one())), frac(&self.branch(0, &Q::zero()))));
        out
    }

    /// Exact image of `x ∈ [0, 1)`, reduced mod 1.
    pub fn apply_q(&self, x: &Q) -> Q {
        let x = frac(x);
        frac(&self.branch(self.branch_index(&x), &x))
    }
}

impl PointMap for TnMap {
    fn space(&self) -> &Space {
        &Space::Circle
    }
    fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Circle(x) => Point::Circle(self.apply_q(x)),
            _ => panic!("T_n applied to {p:?}"),
        }
    }
    fn name(&self) -> String {
        format!("T_{}", self.n)
    }
}

/// Plot-ready samples `(x, T_n^power(x))` on `points` equally spaced inputs.
pub fn tn_samples(n: usize, power: usize, points: usize) -> Result<Vec<(Q, Q)>> {
    let t = TnMap::new(n)?;
    if points == 0 {
        return param("need at least one sample point");
    }
    Ok((0..points)
        .map(|i| {
            let x = q_usize(i, points);
            let mut y = x.clone();
            for _ in 0..power {
                y = t.apply_q(&y);
            }
            (x, y)
        })
        .collect())
}

/// A toral automorphism given by an integer matrix with `|det| = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusAuto {
    matrix: Vec<Vec<i64>>,
    space: Space,
}

impl TorusAuto {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 || matrix.iter().any(|r| r.len() != k) {
            return param("toral automorphism needs a nonempty square matrix");
        }
        let det = determinant(&matrix);
        if det.abs() != BigInt::one() {
            return param(format!("determinant {det} is not ±1"));
        }
        Ok(TorusAuto { matrix, space: Space::Torus(k) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn det(&self) -> i64 {
        determinant(&self.matrix).to_i64().expect("|det| = 1")
    }

    /// `M^r`, or an error if an entry leaves `i64`.
    pub fn power(&self, r: usize) -> Result<TorusAuto> {
        let k = self.dim();
        let mut acc: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        for _ in 0..r {
            let mut next = vec![vec![0i64; k]; k];
            for i in 0..k {
                for j in 0..k {
                    let mut s: i128 = 0;
                    for l in 0..k {
                        s += acc[i][l] as i128 * self.matrix[l][j] as i128;
                    }
                    next[i][j] = i64::try_from(s).map_err(|_| Error::Resource("matrix power overflows i64".into()))?;
                }
            }
            acc = next;
        }
        TorusAuto::new(acc)
    }

    /// `(M v) mod 1`.
    pub fn apply_vec(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.dim() {
            return Err(Error::SpaceMismatch(format!("vector of length {} on T^{}", v.len(), self.dim())));
        }
        Ok(self
            .matrix
            .iter()
            .map(|row| frac(&row.iter().zip(v).map(|(a, x)| Q::from_integer((*a).into()) * x).sum::<Q>()))
            .collect())
    }
}

impl PointMap for TorusAuto {
    fn space(&self) -> &Space {
        &self.space
    }
    fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Torus(v) => Point::Torus(self.apply_vec(v).expect("dimension checked by space")),
            _ => panic!("toral automorphism applied to {p:?}"),
        }
    }
    fn name(&self) -> String {
        format!("S{:?}", self.matrix)
    }
}

/// Bareiss fraction-free elimination.
fn determinant(m: &[Vec<i64>]) -> BigInt {
    let k = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k {
        if a[p][p].is_zero() {
            match (p + 1..k).find(|&r| !a[r][p].is_zero()) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                a[i][j] = (&a[i][j] * &a[p][p] - &a[i][p] * &a[p][j]) / &prev;
            }
        }
        prev = a[p][p].clone();
    }
    sign * &a[k - 1][k - 1]
}

/// `F = S × T_n` on `T^k × T^1`.
#[derive(Debug, Clone)]
pub struct ProductMap {
    pub s: TorusAuto,
    pub t: TnMap,
    space: Space,
}

pub fn product_map(s: TorusAuto, t: TnMap) -> ProductMap {
    let space = Space::Product(vec![s.space().clone(), Space::Circle]);
    ProductMap { s, t, space }
}

impl PointMap for ProductMap {
    fn space(&self) -> &Space {
        &self.space
    }
    fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Product(parts) if parts.len() == 2 => {
                Point::Product(vec![self.s.apply(&parts[0]), self.t.apply(&parts[1])])
            }
            _ => panic!("product map applied to {p:?}"),
        }
    }
    fn name(&self) -> String {
        format!("{}x{}", self.s.name(), self.t.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn tn_examples() {
        assert_eq!(TnMap::new(2).unwrap().apply_q(&Q::zero()), q(1, 2));
        let t3 = TnMap::new(3).unwrap();
        assert_eq!(t3.apply_q(&q(1, 9)), q(2, 3));
        assert_eq!(t3.apply_q(&q(1, 3)), q(2, 3));
        assert_eq!(t3.apply_q(&q(2, 9)), q(1, 3));
        assert!(TnMap::new(1).is_err());
    }

    #[test]
    fn tn_is_continuous() {
        for n in 2..12 {
            for (_, l, r) in TnMap::new(n).unwrap().branch_limits() {
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn torus_examples() {
        let id = TorusAuto::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let v = vec![q(1, 2), q(1, 4)];
        assert_eq!(id.apply_vec(&v).unwrap(), v);
        let shear = TorusAuto::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(shear.apply_vec(&v).unwrap(), vec![q(3, 4), q(1, 4)]);
        assert!(shear.apply_vec(&[q(1, 2)]).is_err());
        assert!(TorusAuto::new(vec![vec![2, 0], vec![0, 1]]).is_err());
        let cat = TorusAuto::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        for r in 0..8 {
            assert_eq!(cat.power(r).unwrap().det(), 1);
        }
        let flip = TorusAuto::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(flip.det(), -1);
        assert_eq!(flip.power(3).unwrap().det(), -1);
    }

    #[test]
    fn product_acts_coordinatewise() {
        let s = TorusAuto::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        let f = product_map(s.clone(), TnMap::new(3).unwrap());
        let v = vec![q(1, 5), q(2, 7)];
        let p = Point::Product(vec![Point::Torus(v.clone()), Point::circle(q(1, 9))]);
        let img = f.apply(&p);
        assert_eq!(img, Point::Product(vec![Point::Torus(s.apply_vec(&v).unwrap()), Point::circle(q(2, 3))]));
        assert!(f.space().contains(&f.iterate(&p, 50)));
    }
}
