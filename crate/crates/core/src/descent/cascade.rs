//! Certificates for A = u^4 - v^4 by repeatedly pulling square factors out of A.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::certificate::{
    assemble, offer_from_witness, twisted_offers, DescentCertificate, DirectSolver, Offer, WitnessOrigin,
};
use super::quartic::{QuarticWitness, SearchOptions, Side};
use crate::error::{domain, Result};
use crate::exactnum::{int_str, is_perfect_square, Int, Rat, SquareClass};
use crate::families::{pythagoras_param, solve_sum_two_squares_twice};

const MAX_DEPTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum CascadeStage {
    Start {
        #[serde(with = "int_str")]
        u: Int,
        #[serde(with = "int_str")]
        v: Int,
    },
    /// |A| = 16 r s (r^2 - s^2) beta^2
    Form1 {
        #[serde(with = "int_str")]
        r: Int,
        #[serde(with = "int_str")]
        s: Int,
        #[serde(with = "int_str")]
        beta: Int,
    },
    /// |A| = 32 w z (w^2 + z^2) beta^2 gamma^2
    Form2 {
        #[serde(with = "int_str")]
        w: Int,
        #[serde(with = "int_str")]
        z: Int,
        #[serde(with = "int_str")]
        beta: Int,
        #[serde(with = "int_str")]
        gamma: Int,
    },
    /// r s is a square: A is (r1^4 - s1^4) mu^2 and the smaller curve is handled first.
    Reduce {
        #[serde(with = "int_str")]
        u: Int,
        #[serde(with = "int_str")]
        v: Int,
        #[serde(with = "int_str")]
        mu: Int,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeState {
    #[serde(flatten)]
    pub stage: CascadeStage,
    #[serde(with = "int_str")]
    pub extracted_square: Int,
    pub depth: u32,
}

struct Run<'a> {
    a_abs: Int,
    a_curve: Int,
    opts: &'a SearchOptions,
    offers: Vec<Offer>,
    states: Vec<CascadeState>,
}

impl Run<'_> {
    fn push(&mut self, stage: CascadeStage, extracted_square: Int) -> Result<u32> {
        let depth = self.states.len() as u32;
        if depth >= MAX_DEPTH {
            return domain(format!("cascade exceeded {MAX_DEPTH} steps"));
        }
        self.states.push(CascadeState {
            stage,
            extracted_square,
            depth,
        });
        Ok(depth)
    }

    fn witness(&mut self, side: Side, b1: Int, n: Int, e: Int, m: Int) -> Result<()> {
        let w = QuarticWitness::new(n.abs(), e.abs(), m.abs());
        let o = offer_from_witness(&self.a_curve, side, &b1, &w, WitnessOrigin::Constructive)?;
        self.offers.push(o);
        Ok(())
    }

    fn check_form(&self, value: Int, what: &str) -> Result<()> {
        if value.abs() != self.a_abs {
            return domain(format!(
                "cascade invariant broken at {what}: {value} vs {}",
                self.a_abs
            ));
        }
        Ok(())
    }

    fn form1(&mut self, r: Int, s: Int, beta: Int) -> Result<()> {
        let (mut r, mut s) = (r.abs(), s.abs());
        let b2 = &beta * &beta;
        self.check_form(Int::from(16) * &r * &s * (&r * &r - &s * &s) * &b2, "form1")?;
        self.push(
            CascadeStage::Form1 {
                r: r.clone(),
                s: s.clone(),
                beta: beta.clone(),
            },
            b2.clone(),
        )?;
        let d = &r * &r - &s * &s;
        let sixteen_d_b2 = Int::from(16) * &d * &b2;
        let four_beta_d = Int::from(4) * &beta * &d;
        self.witness(
            Side::E,
            sixteen_d_b2.clone(),
            &four_beta_d * &r,
            Int::one(),
            r.clone(),
        )?;
        self.witness(Side::E, -sixteen_d_b2, &four_beta_d * &s, Int::one(), s.clone())?;

        let rs = &r * &s;
        if let (Some(r1), Some(s1)) = (is_perfect_square(&r), is_perfect_square(&s)) {
            let mu = Int::from(4) * &r1 * &s1 * &beta;
            self.push(
                CascadeStage::Reduce {
                    u: r1.clone(),
                    v: s1.clone(),
                    mu: mu.clone(),
                },
                &mu * &mu,
            )?;
            let (sub, sub_states) = cascade_u4v4(
                &r1,
                &s1,
                &SearchOptions {
                    height: 0,
                    ..*self.opts
                },
            )?;
            let base = self.states.len() as u32;
            self.states.extend(sub_states.into_iter().map(|mut st| {
                st.depth += base;
                st
            }));
            let (a_new, more) = twisted_offers(&sub, &Rat::from_integer(mu))?;
            if a_new != self.a_curve {
                return domain("reduced cascade landed on a different curve");
            }
            self.offers.extend(more);
            return Ok(());
        }
        let d_class = SquareClass::of_int(&d)?;
        if !d_class.is_one() && d_class != SquareClass::minus_one() {
            let sixteen_rs_b2 = Int::from(16) * &rs * &b2;
            let eight_rs_beta = Int::from(8) * &rs * &beta;
            self.witness(
                Side::E,
                sixteen_rs_b2.clone(),
                &eight_rs_beta * (&r + &s),
                Int::one(),
                &r + &s,
            )?;
            self.witness(
                Side::E,
                -sixteen_rs_b2,
                &eight_rs_beta * (&r - &s),
                Int::one(),
                &r - &s,
            )?;
            return Ok(());
        }
        if d.is_negative() {
            std::mem::swap(&mut r, &mut s);
        }
        let gamma = is_perfect_square(&(&r * &r - &s * &s))
            .ok_or_else(|| crate::error::Error::Domain("r^2 - s^2 lost its square".into()))?;
        if s.is_odd() {
            return domain(format!("form1 ({r}, {s}) has odd s with r^2 - s^2 a square"));
        }
        let w = is_perfect_square(&((&r + &gamma) / 2));
        let z = is_perfect_square(&((&r - &gamma) / 2));
        let (Some(w), Some(z)) = (w, z) else {
            return domain(format!("no (w, z) with w^2 + z^2 = {r}, 2wz = {s}"));
        };
        if pythagoras_param(&w, &z)? != (r.clone(), s.clone(), gamma.clone()) {
            return domain("pythagorean reparametrization mismatch");
        }
        self.form2(w, z, beta, gamma)
    }

    fn form2(&mut self, w: Int, z: Int, beta: Int, gamma: Int) -> Result<()> {
        let bg = &beta * &gamma;
        let bg2 = &bg * &bg;
        let q = &w * &w + &z * &z;
        self.check_form(Int::from(32) * &w * &z * &q * &bg2, "form2")?;
        self.push(
            CascadeStage::Form2 {
                w: w.clone(),
                z: z.clone(),
                beta: beta.clone(),
                gamma: gamma.clone(),
            },
            bg2.clone(),
        )?;
        self.witness(
            Side::Ebar,
            Int::from(64) * &q * &bg2,
            Int::from(8) * &w * &bg * &q,
            Int::one(),
            w.clone(),
        )?;
        let Some(delta) = is_perfect_square(&q) else {
            return Ok(());
        };
        let (even, odd) = if w.is_even() { (&w, &z) } else { (&z, &w) };
        let a = is_perfect_square(&((&delta + odd.abs()) / 2));
        let b = is_perfect_square(&((&delta - odd.abs()) / 2));
        let (Some(a), Some(b)) = (a, b) else {
            return domain(format!("no (a, b) with a^2 + b^2 = {delta}"));
        };
        if Int::from(2) * &a * &b != even.abs() {
            return domain("square-sum reparametrization mismatch");
        }
        self.form1(a, b, Int::from(2) * &bg * &delta)
    }
}

/// Certificate for y^2 = x^3 - (u^4 - v^4)^2 x together with the states visited.
pub fn cascade_u4v4(
    u: &Int,
    v: &Int,
    opts: &SearchOptions,
) -> Result<(DescentCertificate, Vec<CascadeState>)> {
    if u.is_zero() || v.is_zero() || u.abs() == v.abs() {
        return domain(format!("degenerate pair ({u}, {v}): need uv != 0 and u^4 != v^4"));
    }
    if !u.gcd(v).is_one() {
        return domain(format!("({u}, {v}) are not coprime"));
    }
    let big_a = u.pow(4) - v.pow(4);
    let a_curve = -(&big_a * &big_a);
    let mut run = Run {
        a_abs: big_a.abs(),
        a_curve: a_curve.clone(),
        opts,
        offers: Vec::new(),
        states: Vec::new(),
    };
    run.push(
        CascadeStage::Start {
            u: u.clone(),
            v: v.clone(),
        },
        Int::one(),
    )?;
    let q = u * u + v * v;
    run.witness(Side::Ebar, Int::one(), u.pow(8) - v.pow(8), u * v, big_a.clone())?;
    run.witness(
        Side::Ebar,
        Int::from(2) * &q,
        Int::from(2) * (u - v) * &q,
        Int::one(),
        u - v,
    )?;
    if u.is_odd() && v.is_odd() {
        if let Some((r, s, beta)) = solve_sum_two_squares_twice(u, v)? {
            run.form1(r, s, beta)?;
        }
    }
    let cert = assemble(&a_curve, opts, run.offers, &DirectSolver)?;
    Ok((cert, run.states))
}
