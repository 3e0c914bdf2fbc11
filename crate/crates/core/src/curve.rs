//! Curves y^2 = x^3 + a*x over Q and their rational points.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactnum::{int_str, is_perfect_square, rat_from_int, rat_str, Int, Rat};

/// The curve y^2 = x(x^2 + a) with a != 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveA {
    #[serde(with = "int_str")]
    a: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvePoint {
    Infinity,
    Affine {
        #[serde(with = "rat_str")]
        x: Rat,
        #[serde(with = "rat_str")]
        y: Rat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoTorsionKind {
    Origin,
    PlusRoot,
    MinusRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionVerdict {
    Identity,
    TwoTorsion(TwoTorsionKind),
    FiniteOrder(u32),
    InfiniteOrder,
}

/// Largest torsion order over Q (Mazur).
pub const MAX_TORSION_ORDER: u32 = 12;

impl CurvePoint {
    pub fn affine(x: Rat, y: Rat) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        CurvePoint::Affine {
            x: Rat::from_integer(x.into()),
            y: Rat::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&Rat> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rat> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn neg(&self) -> CurvePoint {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y },
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl CurveA {
    pub fn new(a: Int) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Zero("curve coefficient A"));
        }
        Ok(CurveA { a })
    }

    pub fn from_i64(a: i64) -> Result<Self> {
        Self::new(Int::from(a))
    }

    pub fn a(&self) -> &Int {
        &self.a
    }

    /// Right-hand side x^3 + a*x.
    pub fn rhs(&self, x: &Rat) -> Rat {
        x * x * x + rat_from_int(&self.a) * x
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    pub fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(p.to_string(), self.a.to_string()))
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return CurvePoint::Infinity;
            }
            let three = Rat::from_integer(3.into());
            let two = Rat::from_integer(2.into());
            (three * x1 * x1 + rat_from_int(&self.a)) / (two * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.add(p, p)
    }

    /// k*P by double-and-add; negative k multiplies the negated point.
    pub fn mul(&self, p: &CurvePoint, k: i64) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.mul_unchecked(p, k))
    }

    pub(crate) fn mul_unchecked(&self, p: &CurvePoint, k: i64) -> CurvePoint {
        let mut base = if k < 0 { p.neg() } else { p.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// Rational roots of x(x^2 + a) other than 0, as (plus, minus) when -a is a square.
    pub fn nonzero_roots(&self) -> Option<(Int, Int)> {
        let k = is_perfect_square(&(-&self.a))?;
        Some((k.clone(), -k))
    }

    /// All rational points of order dividing 2, identity first.
    pub fn two_torsion_points(&self) -> Vec<CurvePoint> {
        let mut out = vec![
            CurvePoint::Infinity,
            CurvePoint::Affine {
                x: Rat::zero(),
                y: Rat::zero(),
            },
        ];
        if let Some((p, m)) = self.nonzero_roots() {
            out.push(CurvePoint::Affine {
                x: rat_from_int(&p),
                y: Rat::zero(),
            });
            out.push(CurvePoint::Affine {
                x: rat_from_int(&m),
                y: Rat::zero(),
            });
        }
        out
    }

    pub fn torsion(&self, p: &CurvePoint) -> Result<TorsionVerdict> {
        self.check(p)?;
        let (x, y) = match p {
            CurvePoint::Infinity => return Ok(TorsionVerdict::Identity),
            CurvePoint::Affine { x, y } => (x, y),
        };
        if y.is_zero() {
            let kind = if x.is_zero() {
                TwoTorsionKind::Origin
            } else if x.is_positive() {
                TwoTorsionKind::PlusRoot
            } else {
                TwoTorsionKind::MinusRoot
            };
            return Ok(TorsionVerdict::TwoTorsion(kind));
        }
        let mut acc = p.clone();
        for k in 2..=MAX_TORSION_ORDER {
            acc = self.add_unchecked(&acc, p);
            if acc.is_infinity() {
                return Ok(TorsionVerdict::FiniteOrder(k));
            }
        }
        Ok(TorsionVerdict::InfiniteOrder)
    }

    /// (x, y) -> (mu^2 x, mu^3 y) onto y^2 = x^3 + a mu^4 x.
    pub fn quartic_twist(&self, p: &CurvePoint, mu: &Rat) -> Result<(CurveA, CurvePoint)> {
        if mu.is_zero() {
            return Err(Error::Zero("twist factor mu"));
        }
        self.check(p)?;
        let mu2 = mu * mu;
        let mu4 = &mu2 * &mu2;
        let a_new = rat_from_int(&self.a) * mu4;
        if !a_new.is_integer() {
            return domain(format!(
                "twist by {mu} takes A = {} to non-integral {a_new}",
                self.a
            ));
        }
        let curve = CurveA::new(a_new.to_integer())?;
        let q = twist_point(p, mu);
        Ok((curve, q))
    }
}

pub(crate) fn twist_point(p: &CurvePoint, mu: &Rat) -> CurvePoint {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => {
            let mu2 = mu * mu;
            let mu3 = &mu2 * mu;
            CurvePoint::Affine {
                x: x * mu2,
                y: y * mu3,
            }
        }
    }
}

pub fn on_curve(c: &CurveA, p: &CurvePoint) -> bool {
    c.contains(p)
}

pub fn add_points(c: &CurveA, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
    c.add(p, q)
}

pub fn torsion_classify(c: &CurveA, p: &CurvePoint) -> Result<TorsionVerdict> {
    c.torsion(p)
}

pub fn quartic_twist(c: &CurveA, p: &CurvePoint, mu: &Rat) -> Result<(CurveA, CurvePoint)> {
    c.quartic_twist(p, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use num_traits::One;
    use proptest::prelude::*;

    fn e36() -> CurveA {
        CurveA::from_i64(-36).unwrap()
    }

    #[test]
    fn membership() {
        let c = e36();
        assert!(c.contains(&CurvePoint::from_ints(12, 36)));
        assert!(c.contains(&CurvePoint::Infinity));
        assert!(!c.contains(&CurvePoint::from_ints(1, 1)));
        assert!(CurveA::from_i64(0).is_err());
    }

    #[test]
    fn group_law_examples() {
        let c = e36();
        let p = CurvePoint::from_ints(12, 36);
        assert_eq!(c.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(c.add(&p, &p.neg()).unwrap(), CurvePoint::Infinity);
        assert_eq!(c.double(&p).unwrap(), CurvePoint::affine(rat(25, 4), rat(-35, 8)));
        assert!(c.add(&p, &CurvePoint::from_ints(1, 1)).is_err());
        assert_eq!(c.mul(&p, 2).unwrap(), c.double(&p).unwrap());
        assert_eq!(c.mul(&p, -1).unwrap(), p.neg());
        assert_eq!(c.mul(&p, 0).unwrap(), CurvePoint::Infinity);
    }

    #[test]
    fn torsion_examples() {
        let c = e36();
        let v = |x, y| c.torsion(&CurvePoint::from_ints(x, y)).unwrap();
        assert_eq!(v(0, 0), TorsionVerdict::TwoTorsion(TwoTorsionKind::Origin));
        assert_eq!(v(6, 0), TorsionVerdict::TwoTorsion(TwoTorsionKind::PlusRoot));
        assert_eq!(v(-6, 0), TorsionVerdict::TwoTorsion(TwoTorsionKind::MinusRoot));
        assert_eq!(v(12, 36), TorsionVerdict::InfiniteOrder);
        assert_eq!(
            c.torsion(&CurvePoint::Infinity).unwrap(),
            TorsionVerdict::Identity
        );
        // y^2 = x^3 + 4x has the 4-torsion point (2, 4)
        let c4 = CurveA::from_i64(4).unwrap();
        assert_eq!(
            c4.torsion(&CurvePoint::from_ints(2, 4)).unwrap(),
            TorsionVerdict::FiniteOrder(4)
        );
    }

    #[test]
    fn twist_examples() {
        let c = e36();
        let p = CurvePoint::from_ints(12, 36);
        let (c1, p1) = c.quartic_twist(&p, &rat(1, 1)).unwrap();
        assert_eq!((c1, p1), (c.clone(), p.clone()));
        let (c2, p2) = c.quartic_twist(&p, &rat(2, 1)).unwrap();
        assert_eq!(c2.a(), &Int::from(-576));
        assert_eq!(p2, CurvePoint::from_ints(48, 288));
        assert!(c2.contains(&p2));
        let big = CurveA::from_i64(-225 * 16).unwrap();
        let (c3, _) = big.quartic_twist(&CurvePoint::Infinity, &rat(1, 2)).unwrap();
        assert_eq!(c3.a(), &Int::from(-225));
        assert!(c.quartic_twist(&p, &rat(0, 1)).is_err());
    }

    #[test]
    fn two_torsion_of_congruent_curves() {
        for n in 1..40i64 {
            let c = CurveA::from_i64(-n * n).unwrap();
            for x in [n, -n] {
                let t = c.torsion(&CurvePoint::from_ints(x, 0)).unwrap();
                assert!(matches!(t, TorsionVerdict::TwoTorsion(_)));
            }
            assert_eq!(c.two_torsion_points().len(), 4);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn group_law_identities(i in -6i64..6, j in -6i64..6, k in -4i64..4) {
            let c = e36();
            let g = CurvePoint::from_ints(12, 36);
            let h = CurvePoint::from_ints(-3, 9);
            let p = c.add(&c.mul(&g, i).unwrap(), &CurvePoint::from_ints(0, 0)).unwrap();
            let q = c.mul(&h, j).unwrap();
            let r = c.mul(&g, k).unwrap();
            let pq = c.add(&p, &q).unwrap();
            prop_assert!(c.contains(&pq));
            prop_assert_eq!(&pq, &c.add(&q, &p).unwrap());
            prop_assert_eq!(c.add(&p, &CurvePoint::Infinity).unwrap(), p.clone());
            prop_assert_eq!(c.add(&p, &p.neg()).unwrap(), CurvePoint::Infinity);
            let left = c.add(&pq, &r).unwrap();
            let right = c.add(&p, &c.add(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn twist_round_trip(k in 1i64..5, num in 1i64..7, den in 1i64..7) {
            let c = e36();
            let p = c.mul(&CurvePoint::from_ints(12, 36), k).unwrap();
            let mu = rat(num, den);
            // a mu^4 must stay integral: scale the curve by den^4 first
            let (cb, pb) = c.quartic_twist(&p, &rat(den, 1)).unwrap();
            let (c2, p2) = cb.quartic_twist(&pb, &mu).unwrap();
            prop_assert!(c2.contains(&p2));
            let (c3, p3) = c2.quartic_twist(&p2, &(Rat::one() / &mu)).unwrap();
            prop_assert_eq!((c3, p3), (cb, pb));
        }
    }
}
