//! Congruent numbers: triangles, squares in progression, (u, v, m) triples,
//! points on y^2 = x^3 - n^2 x, and Tunnell's counts.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveA, CurvePoint};
use crate::error::{domain, Error, Result};
use crate::exactnum::{exact_sqrt_u128, int_str, is_perfect_square, rat_from_int, rat_str, Int, Rat};

/// Right triangle with rational sides. Legs may carry signs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    #[serde(with = "rat_str")]
    pub x_leg: Rat,
    #[serde(with = "rat_str")]
    pub y_leg: Rat,
    #[serde(with = "rat_str")]
    pub z_hyp: Rat,
}

impl Triangle {
    pub fn new(x_leg: Rat, y_leg: Rat, z_hyp: Rat) -> Result<Self> {
        if x_leg.is_zero() || y_leg.is_zero() {
            return domain("triangle leg is zero");
        }
        if &x_leg * &x_leg + &y_leg * &y_leg != &z_hyp * &z_hyp {
            return domain(format!("{x_leg}^2 + {y_leg}^2 != {z_hyp}^2"));
        }
        Ok(Triangle { x_leg, y_leg, z_hyp })
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Self> {
        Self::new(
            Rat::from_integer(x.into()),
            Rat::from_integer(y.into()),
            Rat::from_integer(z.into()),
        )
    }

    /// Half the product of the legs (signed).
    pub fn area(&self) -> Rat {
        &self.x_leg * &self.y_leg / Rat::from_integer(2.into())
    }
}

/// P^2 + n Q^2 = R^2 and P^2 - n Q^2 = S^2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    #[serde(with = "int_str")]
    pub p: Int,
    #[serde(with = "int_str")]
    pub q: Int,
    #[serde(with = "int_str")]
    pub r: Int,
    #[serde(with = "int_str")]
    pub s: Int,
}

impl ApWitness {
    pub fn holds_for(&self, n: &Int) -> bool {
        let p2 = &self.p * &self.p;
        let nq2 = n * &self.q * &self.q;
        &p2 + &nq2 == &self.r * &self.r && &p2 - &nq2 == &self.s * &self.s
    }
}

/// n m^2 = u v (u^2 - v^2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UvmTriple {
    #[serde(with = "int_str")]
    pub u: Int,
    #[serde(with = "int_str")]
    pub v: Int,
    #[serde(with = "int_str")]
    pub m: Int,
    #[serde(with = "int_str")]
    pub n: Int,
}

impl UvmTriple {
    pub fn new(u: Int, v: Int, m: Int, n: Int) -> Result<Self> {
        let t = UvmTriple { u, v, m, n };
        t.check()?;
        Ok(t)
    }

    pub fn check(&self) -> Result<()> {
        if self.m.is_zero() {
            return domain("m = 0");
        }
        let lhs = &self.n * &self.m * &self.m;
        let rhs = &self.u * &self.v * (&self.u * &self.u - &self.v * &self.v);
        if lhs != rhs {
            return domain(format!(
                "{} * {}^2 != {} * {} * ({}^2 - {}^2)",
                self.n, self.m, self.u, self.v, self.u, self.v
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunnellCounts {
    pub a_n: u64,
    pub b_n: u64,
    pub c_n: u64,
    pub d_n: u64,
}

pub fn congruent_curve(n: &Int) -> Result<CurveA> {
    CurveA::new(-(n * n))
}

/// (a, b, c) -> (n b/(c - a), 2 n^2/(c - a)) once the legs multiply to 2n;
/// for legs multiplying to -2n the second leg is negated first.
pub fn triangle_to_point(n: &Int, t: &Triangle) -> Result<CurvePoint> {
    if n.is_zero() {
        return Err(Error::Zero("n"));
    }
    let nr = rat_from_int(n);
    let two_n = &nr * Rat::from_integer(2.into());
    let prod = &t.x_leg * &t.y_leg;
    let b = if prod == two_n {
        t.y_leg.clone()
    } else if prod == -&two_n {
        -&t.y_leg
    } else {
        return domain(format!("legs multiply to {prod}, not 2|n| = {}", two_n.abs()));
    };
    let d = &t.z_hyp - &t.x_leg;
    if d.is_zero() {
        return domain("degenerate triangle: hypotenuse equals leg");
    }
    let p = CurvePoint::affine(&nr * b / &d, Rat::from_integer(2.into()) * &nr * &nr / d);
    congruent_curve(n)?.check(&p)?;
    Ok(p)
}

/// (x, y) -> ((x^2 - n^2)/y, 2 n x/y, (x^2 + n^2)/y).
pub fn point_to_triangle(n: &Int, p: &CurvePoint) -> Result<Triangle> {
    let curve = congruent_curve(n)?;
    curve.check(p)?;
    let (x, y) = match p {
        CurvePoint::Affine { x, y } if !y.is_zero() => (x, y),
        _ => return domain(format!("{p} is a torsion point (y = 0 or infinity)")),
    };
    let n = rat_from_int(n);
    let x2 = x * x;
    let n2 = &n * &n;
    Triangle::new(
        (&x2 - &n2) / y,
        Rat::from_integer(2.into()) * &n * x / y,
        (&x2 + &n2) / y,
    )
}

fn check_area(n: &Int, t: &Triangle) -> Result<()> {
    if t.area() != rat_from_int(n) {
        return domain(format!("triangle area {} is not {n}", t.area()));
    }
    Ok(())
}

/// (P, Q, R, S) = (ZW, 2W, (X + Y)W, (X - Y)W) with W the common denominator.
pub fn triangle_to_ap(n: &Int, t: &Triangle) -> Result<ApWitness> {
    check_area(n, t)?;
    let w = t.x_leg.denom().lcm(t.y_leg.denom()).lcm(t.z_hyp.denom());
    let wr = rat_from_int(&w);
    let scale = |q: Rat| (q * &wr).to_integer().abs();
    let out = ApWitness {
        p: scale(t.z_hyp.clone()),
        q: &w * 2,
        r: scale(&t.x_leg + &t.y_leg),
        s: scale(&t.x_leg - &t.y_leg),
    };
    debug_assert!(out.holds_for(n));
    Ok(out)
}

/// Legs (R + S)/Q, (R - S)/Q, hypotenuse 2P/Q.
pub fn ap_to_triangle(n: &Int, w: &ApWitness) -> Result<Triangle> {
    if w.q.is_zero() {
        return Err(Error::Zero("Q"));
    }
    if !w.holds_for(n) {
        return domain(format!(
            "({}, {}, {}, {}) is not a progression witness for {n}",
            w.p, w.q, w.r, w.s
        ));
    }
    let q = rat_from_int(&w.q);
    let t = Triangle::new(
        rat_from_int(&(&w.r + &w.s)) / &q,
        rat_from_int(&(&w.r - &w.s)) / &q,
        rat_from_int(&(&w.p * 2)) / &q,
    )?;
    check_area(n, &t)?;
    Ok(t)
}

/// Roberts' construction: clear denominators, divide out k, and read (r, s)
/// off the primitive Pythagorean triple.
pub fn roberts_uvm(n: &Int, t: &Triangle) -> Result<UvmTriple> {
    if n.is_zero() {
        return Err(Error::Zero("n"));
    }
    let na = n.abs();
    let (x, y, z) = (t.x_leg.abs(), t.y_leg.abs(), t.z_hyp.abs());
    if &x * &y != rat_from_int(&(&na * 2)) {
        return domain(format!("legs multiply to {}, not 2|n|", &x * &y));
    }
    Triangle::new(x.clone(), y.clone(), z.clone())?;
    let (x1, x2) = (x.numer(), x.denom());
    let (y1, y2) = (y.numer(), y.denom());
    let (z1, z2) = (z.numer(), z.denom());
    let p1 = x1 * y2 * z2;
    let p2 = x2 * y1 * z2;
    let p3 = x2 * y2 * z1;
    let k = p1.gcd(&p2).gcd(&p3);
    let mut a = &p1 / &k;
    let c = &p3 / &k;
    if a.is_even() {
        a = &p2 / &k;
    }
    let r = is_perfect_square(&((&c + &a) / 2));
    let s = is_perfect_square(&((&c - &a) / 2));
    let (Some(r), Some(s)) = (r, s) else {
        return domain("primitive triple does not parametrize in either leg order");
    };
    let m = &k * x2 * y2 * z2;
    let (u, v) = if n.is_negative() {
        (&k * &s, &k * &r)
    } else {
        (&k * &r, &k * &s)
    };
    UvmTriple::new(u, v, m, n.clone())
}

/// (n u/v, n^2 m/v^2) on y^2 = x^3 - n^2 x.
pub fn uvm_to_point(w: &UvmTriple) -> Result<CurvePoint> {
    w.check()?;
    if w.v.is_zero() {
        return Err(Error::Zero("v"));
    }
    let v = rat_from_int(&w.v);
    let n = rat_from_int(&w.n);
    let p = CurvePoint::affine(
        &n * rat_from_int(&w.u) / &v,
        &n * &n * rat_from_int(&w.m) / (&v * &v),
    );
    congruent_curve(&w.n)?.check(&p)?;
    Ok(p)
}

/// Least coprime (u, |v|) with 1 <= |v| < u <= bound and u v (u^2 - v^2) = n m^2.
pub fn search_uvm(n: &Int, bound: u64) -> Option<UvmTriple> {
    if n.is_zero() {
        return None;
    }
    let small = n.to_i128();
    for u in 2..=bound {
        for va in 1..u {
            if u.gcd(&va) != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let (ui, vi) = (Int::from(u), Int::from(va) * sign);
                let prod = &ui * &vi * (&ui * &ui - &vi * &vi);
                let m = match small {
                    Some(ns) => prod
                        .to_i128()
                        .filter(|p| p % ns == 0 && p / ns > 0)
                        .and_then(|p| exact_sqrt_u128((p / ns) as u128))
                        .map(Int::from),
                    None => {
                        let (q, rem) = prod.div_rem(n);
                        if rem.is_zero() && q.is_positive() {
                            is_perfect_square(&q)
                        } else {
                            None
                        }
                    }
                };
                if let Some(m) = m {
                    return Some(UvmTriple {
                        u: ui,
                        v: vi,
                        m,
                        n: n.clone(),
                    });
                }
            }
        }
    }
    None
}

/// Pairs |u|, |v| <= bound with u v (u^2 - v^2) = +-w^2 and w != 0.
pub fn prop44_scan(bound: u64) -> Vec<(Int, Int, Int)> {
    let b = bound as i64;
    (-b..=b)
        .into_par_iter()
        .flat_map_iter(|u| {
            (-b..=b).filter_map(move |v| {
                let (ui, vi) = (u as i128, v as i128);
                let prod = ui * vi * (ui * ui - vi * vi);
                if prod == 0 {
                    return None;
                }
                exact_sqrt_u128(prod.unsigned_abs()).map(|w| (Int::from(u), Int::from(v), Int::from(w)))
            })
        })
        .collect()
}

fn count_form(n: u64, cx: u64, cy: u64, cz: u64) -> u64 {
    let zmax = ((n / cz) as f64).sqrt() as i64 + 1;
    (-zmax..=zmax)
        .into_par_iter()
        .map(|z| {
            let zz = cz * (z * z) as u64;
            if zz > n {
                return 0;
            }
            let rest = n - zz;
            let xmax = ((rest / cx) as f64).sqrt() as i64 + 1;
            let mut count = 0u64;
            for x in -xmax..=xmax {
                let xx = cx * (x * x) as u64;
                if xx > rest {
                    continue;
                }
                let left = rest - xx;
                if !left.is_multiple_of(cy) {
                    continue;
                }
                if let Some(y) = exact_sqrt_u128((left / cy) as u128) {
                    count += if y == 0 { 1 } else { 2 };
                }
            }
            count
        })
        .sum()
}

/// Solution counts of 2x^2+y^2+32z^2, 2x^2+y^2+8z^2, 8x^2+2y^2+64z^2, 8x^2+2y^2+16z^2 = n.
pub fn tunnell_counts(n: u64) -> TunnellCounts {
    TunnellCounts {
        a_n: count_form(n, 2, 1, 32),
        b_n: count_form(n, 2, 1, 8),
        c_n: count_form(n, 8, 2, 64),
        d_n: count_form(n, 8, 2, 16),
    }
}

/// 2A = B for odd n, 2C = D for even n. False means n is not congruent.
pub fn tunnell_consistent(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Zero("n"));
    }
    let (s, f) = crate::exactnum::squarefree_decompose(&Int::from(n))?;
    if !f.is_one() {
        return domain(format!("{n} is not squarefree (reduce to {s} first)"));
    }
    let t = tunnell_counts(n);
    Ok(if n % 2 == 1 {
        2 * t.a_n == t.b_n
    } else {
        2 * t.c_n == t.d_n
    })
}
