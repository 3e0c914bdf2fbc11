//! Parametrized curves of rank at least 2 and 3, and the helper parametrizations
//! x^2 + y^2 = 2z^2 and r^2 - s^2 = gamma^2.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{twist_point, CurveA, CurvePoint, TorsionVerdict};
use crate::descent::{
    assemble, offer_from_witness, uv_offers, DescentCertificate, DirectSolver, Offer, QuarticWitness,
    SearchOptions, Seed, Side, WitnessOrigin,
};
use crate::error::{domain, Error, Result};
use crate::exactnum::{int_str, is_perfect_square, rat_from_int, rat_str, Int, Rat, SquareClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma42Solution {
    #[serde(with = "int_str")]
    pub r: Int,
    #[serde(with = "int_str")]
    pub s: Int,
    #[serde(with = "int_str")]
    pub x: Int,
    #[serde(with = "int_str")]
    pub y: Int,
    #[serde(with = "int_str")]
    pub z: Int,
}

/// (r^2 + 2rs - s^2, r^2 - 2rs - s^2, r^2 + s^2), a solution of x^2 + y^2 = 2z^2.
pub fn lemma42_param(r: &Int, s: &Int) -> Lemma42Solution {
    let (r2, s2, rs2) = (r * r, s * s, r * s * 2);
    Lemma42Solution {
        r: r.clone(),
        s: s.clone(),
        x: &r2 + &rs2 - &s2,
        y: &r2 - &rs2 - &s2,
        z: &r2 + &s2,
    }
}

/// Inverts the parametrization above: (r, s, beta) with u^2 + v^2 = 2 beta^2,
/// x = +-u and y = +-v. None when u^2 + v^2 is not twice a square.
pub fn solve_sum_two_squares_twice(u: &Int, v: &Int) -> Result<Option<(Int, Int, Int)>> {
    if u.is_even() || v.is_even() || !u.gcd(v).is_one() {
        return domain(format!("({u}, {v}) must be odd and coprime"));
    }
    let q = u * u + v * v;
    let Some(beta) = is_perfect_square(&(&q / 2)) else {
        return Ok(None);
    };
    let (u2, v2) = (u * u, v * v);
    let mut r = beta.sqrt();
    loop {
        if let Some(s) = is_perfect_square(&(&beta - &r * &r)) {
            for s in [s.clone(), -s] {
                let sol = lemma42_param(&r, &s);
                if &sol.x * &sol.x == u2 && &sol.y * &sol.y == v2 {
                    return Ok(Some((r, s, beta)));
                }
            }
        }
        if r.is_zero() {
            return Ok(None);
        }
        r -= 1;
    }
}

/// (w^2 + z^2, 2wz, w^2 - z^2), so that r^2 - s^2 = gamma^2.
pub fn pythagoras_param(w: &Int, z: &Int) -> Result<(Int, Int, Int)> {
    if w.is_odd() == z.is_odd() {
        return domain(format!(
            "({w}, {z}) have equal parity, which would make 2 | gcd(r, s)"
        ));
    }
    if !w.gcd(z).is_one() {
        return domain(format!("({w}, {z}) are not coprime"));
    }
    Ok((w * w + z * z, w * z * 2, w * w - z * z))
}

/// (r, s, A, rank) for the rows of the published rank table.
pub const TABLE1: [(i64, i64, i64, u32); 19] = [
    (1, 2, -210, 2),
    (1, 3, -3570, 2),
    (3, 4, 31050, 2),
    (1, 4, -22134, 3),
    (5, 6, 3010350, 3),
    (4, 7, -4349280, 3),
    (5, 7, 405150, 3),
    (6, 7, 13090680, 3),
    (1, 8, -1535430, 3),
    (4, 9, -33309024, 3),
    (4, 11, -132269664, 3),
    (3, 5, -263466, 4),
    (4, 5, 468384, 4),
    (1, 9, -3128874, 4),
    (5, 11, -168706650, 4),
    (5, 13, -541943850, 4),
    (12, 13, 3121596576, 4),
    (13, 16, 6060449850, 4),
    (1, 40, -24552945606, 5),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family1Instance {
    #[serde(with = "int_str")]
    pub r: Int,
    #[serde(with = "int_str")]
    pub s: Int,
    #[serde(with = "int_str")]
    pub u: Int,
    #[serde(with = "int_str")]
    pub v: Int,
    #[serde(with = "int_str")]
    pub a_value: Int,
    #[serde(with = "int_str")]
    pub b1: Int,
    #[serde(with = "int_str")]
    pub b2: Int,
    pub witness: QuarticWitness,
    pub classes: Vec<SquareClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Distinctness {
    Distinct16,
    Collision {
        first: SquareClass,
        second: SquareClass,
        labels: [String; 2],
    },
}

pub const FAMILY1_LABELS: [&str; 16] = [
    "1",
    "-1",
    "A",
    "-A",
    "uv",
    "-uv",
    "u^2-v^2",
    "-(u^2-v^2)",
    "u(u+v)",
    "-u(u+v)",
    "u(u-v)",
    "-u(u-v)",
    "v(u+v)",
    "-v(u+v)",
    "v(u-v)",
    "-v(u-v)",
];

fn family1_values(u: &Int, v: &Int) -> Vec<Int> {
    let base = [
        Int::one(),
        u * v * (u * u - v * v),
        u * v,
        u * u - v * v,
        u * (u + v),
        u * (u - v),
        v * (u + v),
        v * (u - v),
    ];
    base.into_iter().flat_map(|x| [x.clone(), -x]).collect()
}

pub fn family1_classes(u: &Int, v: &Int) -> Result<Vec<SquareClass>> {
    family1_values(u, v).iter().map(SquareClass::of_int).collect()
}

/// u = r^2 + s^2, v = 2r^2 - s^2, A = uv(u^2 - v^2), with the witness for the class v(u+v).
pub fn family1_instance(r: &Int, s: &Int) -> Result<Family1Instance> {
    if !r.gcd(s).is_one() {
        return domain(format!("({r}, {s}) are not coprime"));
    }
    let (r2, s2) = (r * r, s * s);
    let u: Int = &r2 + &s2;
    let v: Int = &r2 * 2 - &s2;
    let a_value: Int = &u * &v * (&u * &u - &v * &v);
    if a_value.is_zero() {
        return domain(format!("A = 0 at ({r}, {s})"));
    }
    let w: Int = r * s * 3;
    debug_assert_eq!(&w * &w, (&u * 2 - &v) * (&u + &v));
    let b1: Int = &v * (&u + &v);
    let b2: Int = -(&b1 * &u * &u * (&u - &v) * (&u - &v));
    let witness = QuarticWitness::new((&u * &v * &w).abs(), Int::one(), u.clone());
    witness.check(&b1, &b2, None)?;
    let classes = family1_classes(&u, &v)?;
    Ok(Family1Instance {
        r: r.clone(),
        s: s.clone(),
        u,
        v,
        a_value,
        b1,
        b2,
        witness,
        classes,
    })
}

/// Pairwise comparison of the sixteen classes of this instance.
pub fn family1_distinctness(inst: &Family1Instance) -> Result<Distinctness> {
    let classes = family1_classes(&inst.u, &inst.v)?;
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            if classes[i] == classes[j] {
                return Ok(Distinctness::Collision {
                    first: classes[i].clone(),
                    second: classes[j].clone(),
                    labels: [FAMILY1_LABELS[i].to_string(), FAMILY1_LABELS[j].to_string()],
                });
            }
        }
    }
    Ok(Distinctness::Distinct16)
}

fn family1_offers(inst: &Family1Instance) -> Result<(Int, Vec<Offer>)> {
    let (a_curve, mut offers) = uv_offers(&inst.u, &inst.v)?;
    offers.push(offer_from_witness(
        &a_curve,
        Side::E,
        &inst.b1,
        &inst.witness,
        WitnessOrigin::Constructive,
    )?);
    Ok((a_curve, offers))
}

pub fn family1_certificate(inst: &Family1Instance, opts: &SearchOptions) -> Result<DescentCertificate> {
    let (a_curve, offers) = family1_offers(inst)?;
    assemble(&a_curve, opts, offers, &DirectSolver)
}

/// The constructive witnesses of an instance as seeds for `build_certificate`.
pub fn family1_seeds(inst: &Family1Instance) -> Result<Vec<Seed>> {
    let (_, offers) = family1_offers(inst)?;
    Ok(offers
        .into_iter()
        .filter_map(|o| match o.proof {
            crate::descent::ClassProof::Witness { b1, witness, .. } => Some(Seed::Witness {
                side: o.side,
                b1,
                witness,
            }),
            _ => None,
        })
        .collect())
}

// Coefficients from the highest power of t down to t^0.
const P_X: [i64; 9] = [393216, 0, 36864, 0, 0, 0, -48, 0, 0];
const P_Y: [i64; 12] = [150994944, 0, 9437184, 0, -442368, 0, -18432, 0, 576, 0, 0, 0];
const Q_X: [i64; 9] = [294912, 0, -18432, 0, -2304, 0, 0, 0, 0];
const Q_Y_OVER_Y1: [i64; 11] = [4718592, 0, -884736, 0, 0, 0, 4608, 0, 0, 0, 0];
const R_X: [i64; 9] = [409600, 0, -20480, 0, 1536, 0, -32, 0, 1];
const R_Y: [i64; 13] = [
    -73400320, 0, -32243712, 0, 2703360, 0, -81920, 0, 1920, 0, 48, 0, -1,
];
const S_X: [i64; 9] = [589824, 0, -147456, 0, 9216, 0, 0, 0, 0];
const S_Y: [i64; 13] = [
    754974720, 0, -207618048, 0, 17694720, 0, -589824, 0, 18432, 0, 0, 0, 0,
];

fn horner(coeffs: &[i64], t: &Rat) -> Rat {
    coeffs
        .iter()
        .fold(Rat::zero(), |acc, &c| acc * t + Rat::from_integer(c.into()))
}

/// -896 t^4 - 40 t^2 + 1
pub fn family2_quartic(t: &Rat) -> Rat {
    horner(&[-896, 0, -40, 0, 1], t)
}

/// y^2 = x^3 + c x over Q with rational c.
pub fn on_rational_curve(c: &Rat, p: &CurvePoint) -> bool {
    match p {
        CurvePoint::Infinity => true,
        CurvePoint::Affine { x, y } => y * y == x * x * x + c * x,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family2Instance {
    #[serde(with = "int_str")]
    pub r1: Int,
    #[serde(with = "int_str")]
    pub s: Int,
    #[serde(with = "rat_str")]
    pub t: Rat,
    #[serde(with = "rat_str")]
    pub y_root: Rat,
    #[serde(with = "int_str")]
    pub a_value: Int,
    /// 96 t^2 (8t^2 - 1)(16t^2 + 1)(32t^2 - 1); the curve is y^2 = x^3 - a_t^2 x.
    #[serde(with = "rat_str")]
    pub a_t: Rat,
    pub p: CurvePoint,
    pub q: CurvePoint,
    pub r: CurvePoint,
    /// Point on the dual curve with psi(S) = R.
    pub s_bar: CurvePoint,
    #[serde(with = "int_str")]
    pub b1: Int,
    #[serde(with = "int_str")]
    pub b2: Int,
    pub witness: QuarticWitness,
}

/// Family of A = -96 r1^2 (8r1^2 - s^2)(16r1^2 + s^2)(32r1^2 - s^2) at a point of the quartic.
pub fn family2_instance(r1: &Int, s: &Int, y_root: &Rat) -> Result<Family2Instance> {
    if s.is_zero() || r1.is_zero() {
        return Err(Error::Zero("r1 or s"));
    }
    if !r1.gcd(s).is_one() {
        return domain(format!("({r1}, {s}) are not coprime"));
    }
    let t = Rat::new(r1.clone(), s.clone());
    if y_root * y_root != family2_quartic(&t) {
        return domain(format!("{y_root}^2 != -896t^4 - 40t^2 + 1 at t = {t}"));
    }
    let (r12, s2): (Int, Int) = (r1 * r1, s * s);
    let f8: Int = &r12 * 8 - &s2;
    let f16: Int = &r12 * 16 + &s2;
    let f32: Int = &r12 * 32 - &s2;
    let a_value: Int = -(&r12 * &f8 * &f16 * &f32 * Int::from(96));
    let t2 = &t * &t;
    let one = Rat::one();
    let c = |k: i64| Rat::from_integer(k.into());
    let a_t = c(96) * &t2 * (c(8) * &t2 - &one) * (c(16) * &t2 + &one) * (c(32) * &t2 - &one);
    debug_assert_eq!(
        a_t.abs(),
        (rat_from_int(&a_value) / rat_from_int(&s.pow(8))).abs()
    );

    let p = CurvePoint::affine(horner(&P_X, &t), horner(&P_Y, &t));
    let r = CurvePoint::affine(horner(&R_X, &t), horner(&R_Y, &t));
    let q = CurvePoint::affine(horner(&Q_X, &t), horner(&Q_Y_OVER_Y1, &t) * y_root);
    let s_bar = CurvePoint::affine(horner(&S_X, &t), horner(&S_Y, &t));
    let c_e = -(&a_t * &a_t);
    for (name, pt) in [("P", &p), ("Q", &q), ("R", &r)] {
        if !on_rational_curve(&c_e, pt) {
            return domain(format!("{name} = {pt} is off y^2 = x^3 - a_t^2 x"));
        }
    }
    if !on_rational_curve(&(-&c_e * c(4)), &s_bar) {
        return domain(format!("S = {s_bar} is off the dual curve"));
    }

    let y_int = y_root * rat_from_int(&s2);
    if !y_int.is_integer() {
        return domain(format!("y = {y_int} is not integral"));
    }
    let k: Int = &f8 * &f16;
    let b1: Int = &r12 * 16 * &k;
    let b2: Int = -(&r12 * &k * &f32 * &f32 * Int::from(576));
    let n: Int = r1 * &f8 * y_int.to_integer() * Int::from(24);
    let m: Int = r1 * Int::from(12);
    let witness = QuarticWitness::new(n.abs(), Int::one(), m.abs());
    witness.check(&b1, &b2, None)?;
    Ok(Family2Instance {
        r1: r1.clone(),
        s: s.clone(),
        t,
        y_root: y_root.clone(),
        a_value,
        a_t,
        p,
        q,
        r,
        s_bar,
        b1,
        b2,
        witness,
    })
}

/// The points moved to the integral curve y^2 = x^3 - a_value^2 x by (x, y) -> (s^8 x, s^12 y).
pub fn family2_integral_points(inst: &Family2Instance) -> Result<(CurveA, [CurvePoint; 3])> {
    let curve = CurveA::new(-(&inst.a_value * &inst.a_value))?;
    let mu = rat_from_int(&inst.s.pow(4));
    let pts = [&inst.p, &inst.q, &inst.r].map(|p| twist_point(p, &mu));
    for p in &pts {
        curve.check(p)?;
    }
    Ok((curve, pts))
}

/// Torsion verdicts for P, Q, R.
pub fn family2_orders(inst: &Family2Instance) -> Result<[TorsionVerdict; 3]> {
    let (curve, pts) = family2_integral_points(inst)?;
    let mut out = [TorsionVerdict::Identity; 3];
    for (slot, p) in out.iter_mut().zip(pts.iter()) {
        *slot = curve.torsion(p)?;
    }
    Ok(out)
}

/// Family-1 classes at (4 r1, s) plus the class (8r1^2 - s^2)(16r1^2 + s^2).
pub fn family2_certificate(inst: &Family2Instance, opts: &SearchOptions) -> Result<DescentCertificate> {
    let f1 = family1_instance(&(&inst.r1 * 4), &inst.s)?;
    if f1.a_value != inst.a_value {
        return domain("family-2 constant disagrees with family 1 at r = 4 r1");
    }
    let (a_curve, mut offers) = family1_offers(&f1)?;
    offers.push(offer_from_witness(
        &a_curve,
        Side::E,
        &inst.b1,
        &inst.witness,
        WitnessOrigin::Constructive,
    )?);
    let mut cert = assemble(&a_curve, opts, offers, &DirectSolver)?;
    cert.notes
        .push("independence of P, Q, R is not checked; on-curve and infinite order only".to_string());
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family2Param {
    #[serde(with = "int_str")]
    pub r1: Int,
    #[serde(with = "int_str")]
    pub s: Int,
    #[serde(with = "rat_str")]
    pub y_root: Rat,
}

// Y^2 = X^3 + A2 X^2 + A4 X + A6, birational to the quartic via
// X = 2(y1 + 1)/t^2, Y = (4(y1 + 1) - 80 t^2)/t^3.
const A2: i64 = -40;
const A4: i64 = 3584;
const A6: i64 = -143360;

fn cubic_add(p: &Option<(Rat, Rat)>, q: &Option<(Rat, Rat)>) -> Option<(Rat, Rat)> {
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return p.clone().or_else(|| q.clone());
    };
    let c = |k: i64| Rat::from_integer(k.into());
    let lambda = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return None;
        }
        (c(3) * x1 * x1 + c(2 * A2) * x1 + c(A4)) / (c(2) * y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &lambda * &lambda - c(A2) - x1 - x2;
    let y3 = -(y1 + lambda * (&x3 - x1));
    Some((x3, y3))
}

fn cubic_to_quartic(x: &Rat, y: &Rat) -> Option<(Rat, Rat)> {
    if y.is_zero() {
        return None;
    }
    let t = Rat::from_integer(2.into()) * (x - Rat::from_integer(40.into())) / y;
    let y1 = &t * &t * x / Rat::from_integer(2.into()) - Rat::one();
    Some((t, y1))
}

/// Further quartic points from multiples of the point (121, 1215) on the cubic
/// model, which corresponds to (2/15, 17/225). Stops early past `digit_cap` digits.
pub fn family2_next_parameters(count: usize, digit_cap: usize) -> Vec<Family2Param> {
    let c = |k: i64| Rat::from_integer(k.into());
    let g = Some((c(121), c(1215)));
    debug_assert_eq!(
        c(1215) * c(1215),
        c(121).pow(3) + c(A2) * c(121) * c(121) + c(A4) * c(121) + c(A6)
    );
    let mut out: Vec<Family2Param> = Vec::new();
    let mut acc = g.clone();
    for _ in 0..(4 * count + 8) {
        if out.len() >= count {
            break;
        }
        if let Some((x, y)) = &acc {
            if x.numer().to_string().len() > digit_cap * 4 {
                break;
            }
            if let Some((t, y1)) = cubic_to_quartic(x, y) {
                let r1 = t.numer().abs();
                let s = t.denom().clone();
                let fresh = !r1.is_zero() && !out.iter().any(|p| p.r1 == r1 && p.s == s);
                if fresh && r1.to_string().len() <= digit_cap && s.to_string().len() <= digit_cap {
                    let t_abs = Rat::new(r1.clone(), s.clone());
                    if &y1 * &y1 == family2_quartic(&t_abs) {
                        out.push(Family2Param { r1, s, y_root: y1 });
                    }
                }
            }
        }
        acc = cubic_add(&acc, &g);
    }
    out
}

/// One row of the table of products with (8r1^2 - s^2)(16r1^2 + s^2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub label: String,
    pub uv_class: SquareClass,
    /// The published second-column class.
    pub r1s_class: SquareClass,
    pub product: SquareClass,
    /// The published third-column class.
    pub new_class: SquareClass,
    pub column2_matches: bool,
    pub product_matches: bool,
}

/// Products for the eight upper-sign rows, compared with the published columns.
pub fn table2_products(r1: &Int, s: &Int) -> Result<Vec<Table2Row>> {
    if !r1.gcd(s).is_one() || r1.is_zero() || s.is_zero() {
        return domain(format!("({r1}, {s}) must be nonzero and coprime"));
    }
    let (r12, s2): (Int, Int) = (r1 * r1, s * s);
    let f8: Int = &r12 * 8 - &s2;
    let f16: Int = &r12 * 16 + &s2;
    let f32: Int = &r12 * 32 - &s2;
    let k: Int = &f8 * &f16;
    let u: Int = f16.clone();
    let v: Int = f32.clone();
    let i = |n: i64| Int::from(n);
    let rows: [(&str, Int, Int, Int); 8] = [
        ("1", i(1), i(1), k.clone()),
        (
            "uv(u^2-v^2)",
            &u * &v * (&u * &u - &v * &v),
            -(i(6) * &r12 * &k * &f32),
            -(i(6) * &f32),
        ),
        ("uv", &u * &v, &f32 * &f16, &f8 * &f32),
        ("u^2-v^2", &u * &u - &v * &v, -(i(6) * &f16), -(i(6) * &f8)),
        ("u(u+v)", &u * (&u + &v), i(3) * &f16, i(3) * &f8),
        ("v(u+v)", &v * (&u + &v), i(3) * &f32, i(3) * &k * &f32),
        ("u(u-v)", &u * (&u - &v), -(i(2) * &k), i(-2)),
        (
            "v(u-v)",
            &v * (&u - &v),
            -(i(2) * &f8 * &f32),
            -(i(2) * &f16 * &f32),
        ),
    ];
    let kc = SquareClass::of_int(&k)?;
    rows.into_iter()
        .map(|(label, uv, col2, col3)| {
            let uv_class = SquareClass::of_int(&uv)?;
            let r1s_class = SquareClass::of_int(&col2)?;
            let product = uv_class.mul(&kc);
            let new_class = SquareClass::of_int(&col3)?;
            Ok(Table2Row {
                label: label.to_string(),
                column2_matches: uv_class == r1s_class,
                product_matches: product == new_class,
                uv_class,
                r1s_class,
                product,
                new_class,
            })
        })
        .collect()
}
