//! The 2-isogenies between E: y^2 = x^3 + a x and Ebar: y^2 = x^3 - 4a x,
//! the descent maps alpha / alpha-bar, and quadruple-to-point.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurveA, CurvePoint};
use crate::error::{Error, Result};
use crate::exactnum::{rat_from_int, rat_sqrt, Int, Rat, SquareClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyPair {
    e: CurveA,
    ebar: CurveA,
}

impl IsogenyPair {
    pub fn new(e: CurveA) -> Self {
        let ebar = CurveA::new(-e.a() * 4).expect("nonzero times -4 is nonzero");
        IsogenyPair { e, ebar }
    }

    pub fn from_a(a: Int) -> Result<Self> {
        Ok(Self::new(CurveA::new(a)?))
    }

    pub fn e(&self) -> &CurveA {
        &self.e
    }

    pub fn ebar(&self) -> &CurveA {
        &self.ebar
    }

    /// phi: E -> Ebar, (x, y) -> (y^2/x^2, y(x^2 - a)/x^2), kernel {O, T}.
    pub fn phi(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.e.check(p)?;
        Ok(phi_raw(self.e.a(), p))
    }

    /// psi: Ebar -> E, (x, y) -> (y^2/4x^2, y(x^2 + 4a)/8x^2), kernel {O, T}.
    pub fn psi(&self, q: &CurvePoint) -> Result<CurvePoint> {
        self.ebar.check(q)?;
        Ok(psi_raw(self.e.a(), q))
    }

    /// All rational Q on Ebar with psi(Q) = p.
    pub fn psi_preimages(&self, p: &CurvePoint) -> Result<Vec<CurvePoint>> {
        self.e.check(p)?;
        let a = rat_from_int(self.e.a());
        let mut out = Vec::new();
        match p {
            CurvePoint::Infinity => {
                out.push(CurvePoint::Infinity);
                out.push(origin());
            }
            CurvePoint::Affine { x, .. } => {
                // x(psi) = (xb^2 - 4a) / 4xb, so xb^2 - 4x xb - 4a = 0
                let disc = x * x + &a;
                if let Some(root) = rat_sqrt(&disc) {
                    let two = Rat::from_integer(2.into());
                    for xb in [&two * x + &two * &root, &two * x - &two * &root] {
                        self.collect_matching(&xb, &self.ebar, p, true, &mut out);
                    }
                }
            }
        }
        Ok(out)
    }

    /// All rational P on E with phi(P) = q.
    pub fn phi_preimages(&self, q: &CurvePoint) -> Result<Vec<CurvePoint>> {
        self.ebar.check(q)?;
        let a = rat_from_int(self.e.a());
        let mut out = Vec::new();
        match q {
            CurvePoint::Infinity => {
                out.push(CurvePoint::Infinity);
                out.push(origin());
            }
            CurvePoint::Affine { x, .. } => {
                // x(phi) = (x^2 + a)/x, so x^2 - xb x + a = 0
                let disc = x * x - &a * Rat::from_integer(4.into());
                if let Some(root) = rat_sqrt(&disc) {
                    let half = Rat::new(1.into(), 2.into());
                    for xe in [(x + &root) * &half, (x - &root) * &half] {
                        self.collect_matching(&xe, &self.e, q, false, &mut out);
                    }
                }
            }
        }
        Ok(out)
    }

    fn collect_matching(
        &self,
        x: &Rat,
        curve: &CurveA,
        target: &CurvePoint,
        via_psi: bool,
        out: &mut Vec<CurvePoint>,
    ) {
        let Some(y) = rat_sqrt(&curve.rhs(x)) else {
            return;
        };
        for cand_y in [y.clone(), -y] {
            let cand = CurvePoint::affine(x.clone(), cand_y);
            let image = if via_psi {
                psi_raw(self.e.a(), &cand)
            } else {
                phi_raw(self.e.a(), &cand)
            };
            if &image == target && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
}

fn origin() -> CurvePoint {
    CurvePoint::affine(Rat::zero(), Rat::zero())
}

fn phi_raw(a: &Int, p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Affine { x, y } if !x.is_zero() => {
            let x2 = x * x;
            let a = rat_from_int(a);
            CurvePoint::affine(y * y / &x2, y * (&x2 - a) / &x2)
        }
        _ => CurvePoint::Infinity,
    }
}

fn psi_raw(a: &Int, q: &CurvePoint) -> CurvePoint {
    match q {
        CurvePoint::Affine { x, y } if !x.is_zero() => {
            let x2 = x * x;
            let four_a = rat_from_int(&(a * 4));
            let xn = y * y / (&x2 * Rat::from_integer(4.into()));
            let yn = y * (&x2 + four_a) / (&x2 * Rat::from_integer(8.into()));
            CurvePoint::affine(xn, yn)
        }
        _ => CurvePoint::Infinity,
    }
}

/// alpha on y^2 = x^3 + c x: O -> 1, (0,0) -> c, otherwise x, all modulo squares.
/// Applied to Ebar (c = -4a) this is alpha-bar, since -4a and -a agree modulo squares.
pub fn alpha(c: &CurveA, p: &CurvePoint) -> Result<SquareClass> {
    c.check(p)?;
    match p {
        CurvePoint::Infinity => Ok(SquareClass::one()),
        CurvePoint::Affine { x, .. } if x.is_zero() => SquareClass::of_int(c.a()),
        CurvePoint::Affine { x, .. } => SquareClass::of_rat(x),
    }
}

pub fn alpha_bar(cbar: &CurveA, q: &CurvePoint) -> Result<SquareClass> {
    alpha(cbar, q)
}

/// Result of turning (b1, N, e, M) into a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadrupleImage {
    Affine(CurvePoint),
    /// e = 0: the quadruple proves b1 is a square but names no affine point.
    AtInfinity,
}

/// (b1 M^2 / e^2, b1 M N / e^3) on y^2 = x(x^2 + b1 b2), after checking
/// N^2 = b1 M^4 + b2 e^4.
pub fn point_from_quadruple(
    b1: &Int,
    b2: &Int,
    n: &Int,
    e: &Int,
    m: &Int,
) -> Result<(CurveA, QuadrupleImage)> {
    let lhs = n * n;
    let rhs = b1 * m.pow(4) + b2 * e.pow(4);
    if lhs != rhs {
        return Err(Error::BadWitness(format!("{n}^2 != {b1}*{m}^4 + {b2}*{e}^4")));
    }
    if e.is_zero() && m.is_zero() {
        return Err(Error::BadWitness("(e, M) = (0, 0) is trivial".into()));
    }
    let curve = CurveA::new(b1 * b2)?;
    if e.is_zero() {
        return Ok((curve, QuadrupleImage::AtInfinity));
    }
    let e2 = Rat::from_integer(e * e);
    let e3 = Rat::from_integer(e.pow(3));
    let x = Rat::from_integer(b1 * m * m) / e2;
    let y = Rat::from_integer(b1 * m * n) / e3;
    let p = CurvePoint::affine(x, y);
    debug_assert!(curve.contains(&p));
    Ok((curve, QuadrupleImage::Affine(p)))
}

/// Inverse direction: a point (x, y) with x != 0 written as a quadruple with
/// squarefree b1, x = b1 M^2/e^2, y = b1 M N/e^3. Returns (b1, b2, N, e, M).
pub fn quadruple_from_point(c: &CurveA, p: &CurvePoint) -> Result<(Int, Int, Int, Int, Int)> {
    c.check(p)?;
    let (x, y) = match p {
        CurvePoint::Affine { x, y } if !x.is_zero() => (x, y),
        _ => return Err(Error::Domain(format!("{p} has no quadruple (x must be nonzero)"))),
    };
    let e = crate::exactnum::is_perfect_square(x.denom())
        .ok_or_else(|| Error::Domain(format!("denominator of {x} is not a square")))?;
    let p_num = x.numer();
    let (b1, m) = crate::exactnum::squarefree_decompose(p_num)?;
    let b1m = &b1 * &m;
    let n_rat = y * Rat::from_integer(e.pow(3)) / Rat::from_integer(b1m);
    if !n_rat.is_integer() {
        return Err(Error::Domain(format!("{p} gives non-integral N = {n_rat}")));
    }
    let c_a = c.a();
    if (c_a % &b1) != Int::zero() {
        return Err(Error::Domain(format!("{b1} does not divide {c_a}")));
    }
    let b2 = c_a / &b1;
    let n = n_rat.to_integer();
    debug_assert!(e.is_positive());
    Ok((b1, b2, n, e, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    fn pair36() -> IsogenyPair {
        IsogenyPair::from_a(int(-36)).unwrap()
    }

    #[test]
    fn phi_psi_examples() {
        let pr = pair36();
        assert_eq!(pr.ebar().a(), &int(144));
        let t = CurvePoint::from_ints(0, 0);
        assert_eq!(pr.phi(&t).unwrap(), CurvePoint::Infinity);
        assert_eq!(pr.phi(&CurvePoint::Infinity).unwrap(), CurvePoint::Infinity);
        let p = CurvePoint::from_ints(12, 36);
        let q = pr.phi(&p).unwrap();
        assert_eq!(q, CurvePoint::from_ints(9, 45));
        assert_eq!(pr.psi(&t).unwrap(), CurvePoint::Infinity);
        assert_eq!(pr.psi(&CurvePoint::Infinity).unwrap(), CurvePoint::Infinity);
        assert_eq!(pr.psi(&q).unwrap(), CurvePoint::affine(rat(25, 4), rat(-35, 8)));
        assert!(pr.phi(&CurvePoint::from_ints(1, 1)).is_err());
    }

    #[test]
    fn alpha_examples() {
        let pr = pair36();
        let c = |v| SquareClass::of_int(&int(v)).unwrap();
        assert_eq!(alpha(pr.e(), &CurvePoint::Infinity).unwrap(), c(1));
        assert_eq!(alpha(pr.e(), &CurvePoint::from_ints(0, 0)).unwrap(), c(-1));
        assert_eq!(alpha(pr.e(), &CurvePoint::from_ints(12, 36)).unwrap(), c(3));
        assert_eq!(alpha_bar(pr.ebar(), &CurvePoint::Infinity).unwrap(), c(1));
        assert_eq!(alpha_bar(pr.ebar(), &CurvePoint::from_ints(0, 0)).unwrap(), c(1));
        assert_eq!(alpha_bar(pr.ebar(), &CurvePoint::from_ints(9, 45)).unwrap(), c(1));
    }

    #[test]
    fn preimages_invert_the_isogenies() {
        let pr = pair36();
        let p = CurvePoint::from_ints(12, 36);
        let q = pr.phi(&p).unwrap();
        let pre = pr.phi_preimages(&q).unwrap();
        assert!(pre.contains(&p));
        assert!(pre.iter().all(|r| pr.phi(r).unwrap() == q));
        let two_p = pr.e().double(&p).unwrap();
        let back = pr.psi_preimages(&two_p).unwrap();
        assert!(back.contains(&q));
        assert!(back.iter().all(|r| pr.psi(r).unwrap() == two_p));
        // (12, 36) is not in psi(Ebar): its alpha class 3 is nontrivial
        assert!(pr.psi_preimages(&p).unwrap().is_empty());
    }

    #[test]
    fn quadruple_examples() {
        let (c, img) = point_from_quadruple(&int(-6), &int(7350), &int(-60), &int(1), &int(5)).unwrap();
        assert_eq!(c.a(), &int(-44100));
        assert_eq!(img, QuadrupleImage::Affine(CurvePoint::from_ints(-150, 1800)));
        let (c, img) = point_from_quadruple(&int(10), &int(90), &int(10), &int(1), &int(1)).unwrap();
        assert_eq!(c.a(), &int(900));
        assert_eq!(img, QuadrupleImage::Affine(CurvePoint::from_ints(10, 100)));
        let (_, img) = point_from_quadruple(&int(1), &int(-225), &int(1), &int(0), &int(1)).unwrap();
        assert_eq!(img, QuadrupleImage::AtInfinity);
        assert!(point_from_quadruple(&int(1), &int(-225), &int(2), &int(0), &int(1)).is_err());
    }

    #[test]
    fn quadruple_round_trip() {
        let c = CurveA::from_i64(-44100).unwrap();
        let p = CurvePoint::from_ints(-150, 1800);
        let (b1, b2, n, e, m) = quadruple_from_point(&c, &p).unwrap();
        assert_eq!((b1.clone(), e.clone(), m.clone()), (int(-6), int(1), int(5)));
        let (_, img) = point_from_quadruple(&b1, &b2, &n, &e, &m).unwrap();
        assert_eq!(img, QuadrupleImage::Affine(p));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn psi_phi_is_doubling(k in -8i64..8, j in -3i64..3, n in prop::sample::select(vec![5i64, 6, 7, 15, 21])) {
            let gens: std::collections::HashMap<i64, (CurvePoint, CurvePoint)> = [
                (5, (CurvePoint::affine(rat(-4, 1), rat(6, 1)), CurvePoint::affine(rat(45, 1), rat(300, 1)))),
                (6, (CurvePoint::from_ints(12, 36), CurvePoint::from_ints(-3, 9))),
                (7, (CurvePoint::affine(rat(25, 1), rat(120, 1)), CurvePoint::from_ints(7, 0))),
                (15, (CurvePoint::from_ints(-9, 36), CurvePoint::from_ints(60, 450))),
                (21, (CurvePoint::from_ints(-3, 36), CurvePoint::from_ints(28, 98))),
            ].into_iter().collect();
            let pr = IsogenyPair::from_a(int(-n * n)).unwrap();
            let (g, h) = &gens[&n];
            let p = pr.e().add(&pr.e().mul(g, k).unwrap(), &pr.e().mul(h, j).unwrap()).unwrap();
            let img = pr.phi(&p).unwrap();
            prop_assert!(pr.ebar().contains(&img));
            prop_assert_eq!(pr.psi(&img).unwrap(), pr.e().double(&p).unwrap());
            prop_assert_eq!(pr.phi(&pr.psi(&img).unwrap()).unwrap(), pr.ebar().double(&img).unwrap());
        }

        #[test]
        fn alpha_is_homomorphism(i in -6i64..6, j in -6i64..6, ti in 0usize..4) {
            let c = CurveA::from_i64(-36).unwrap();
            let g = CurvePoint::from_ints(12, 36);
            let tors = c.two_torsion_points();
            let p = c.add(&c.mul(&g, i).unwrap(), &tors[ti]).unwrap();
            let q = c.mul(&CurvePoint::from_ints(-3, 9), j).unwrap();
            let s = c.add(&p, &q).unwrap();
            // compare by squareness of the product so large coordinates need no factoring
            let raw = |t: &CurvePoint| match t {
                CurvePoint::Infinity => <Rat as num_traits::One>::one(),
                CurvePoint::Affine { x, .. } if x.is_zero() => rat_from_int(c.a()),
                CurvePoint::Affine { x, .. } => x.clone(),
            };
            prop_assert!(rat_sqrt(&(raw(&p) * raw(&q) * raw(&s))).is_some());
            let limit = Int::from(10u64).pow(20);
            if [&p, &q, &s].iter().all(|t| t.x().is_none_or(|x| x.numer().abs() < limit && x.denom() < &limit)) {
                let lhs = alpha(&c, &p).unwrap().mul(&alpha(&c, &q).unwrap());
                prop_assert_eq!(lhs, alpha(&c, &s).unwrap());
            }
        }

        #[test]
        fn quadruple_points_land_in_class(b1 in -40i64..40, m0 in 1i64..30, e in 1i64..8, n0 in 1i64..60) {
            prop_assume!(b1 != 0);
            // N = n0 e^2 and M = m0 e make e^4 divide N^2 - b1 M^4
            let (n, m) = (n0 * e * e, m0 * e);
            let b2 = n0 * n0 - b1 * m0.pow(4);
            prop_assume!(b2 != 0);
            let (c, img) = point_from_quadruple(&int(b1), &int(b2), &int(n), &int(e), &int(m)).unwrap();
            if let QuadrupleImage::Affine(p) = img {
                prop_assert!(c.contains(&p));
                prop_assert_eq!(alpha(&c, &p).unwrap(), SquareClass::of_int(&int(b1)).unwrap());
            }
        }
    }
}
