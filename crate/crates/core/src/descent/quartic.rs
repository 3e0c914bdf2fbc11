//! The quartics N^2 = b1 M^4 + b2 e^4 and their bounded search.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactnum::{exact_sqrt_u128, factorize, int_str, is_perfect_square, Int};

/// Which curve of the isogeny pair a quartic belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    E,
    Ebar,
}

impl Side {
    /// b1 * b2 for this side: a on E, -4a on Ebar.
    pub fn constant(self, a_curve: &Int) -> Int {
        match self {
            Side::E => a_curve.clone(),
            Side::Ebar => -a_curve * 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::E => "E",
            Side::Ebar => "Ebar",
        }
    }
}

/// Which coprimality conditions a searched witness must meet.
/// `Literal` requires gcd(M,e) = gcd(N,e) = gcd(b1,e) = gcd(b2,e) = gcd(M,N) = 1;
/// `Literal` reads gcd(M,e) = gcd(N,e) = gcd(b1,e) = gcd(b2,e) = gcd(M,N) = 1 literally;
/// `Standard` replaces gcd(b2,e) by gcd(b2,M). With e = 0 the e-conditions are
/// waived, leaving gcd(M, 0) = 1, i.e. M = 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcdRule {
    #[default]
    Literal,
    Standard,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuarticWitness {
    #[serde(rename = "N", with = "int_str")]
    pub n: Int,
    #[serde(with = "int_str")]
    pub e: Int,
    #[serde(rename = "M", with = "int_str")]
    pub m: Int,
}

impl QuarticWitness {
    pub fn new(n: Int, e: Int, m: Int) -> Self {
        QuarticWitness { n, e, m }
    }

    pub fn from_i64(n: i64, e: i64, m: i64) -> Self {
        Self::new(n.into(), e.into(), m.into())
    }

    pub fn satisfies(&self, b1: &Int, b2: &Int) -> bool {
        &self.n * &self.n == b1 * self.m.pow(4) + b2 * self.e.pow(4)
    }

    pub fn is_nontrivial(&self) -> bool {
        !(self.e.is_zero() && self.m.is_zero())
    }

    pub fn gcd_conditions(&self, b1: &Int, b2: &Int, rule: GcdRule) -> bool {
        let (n, e, m) = (&self.n, &self.e, &self.m);
        if !m.gcd(e).is_one() || !m.gcd(n).is_one() {
            return false;
        }
        if rule == GcdRule::Standard && !b2.gcd(m).is_one() {
            return false;
        }
        if e.is_zero() {
            return true;
        }
        if !n.gcd(e).is_one() || !b1.gcd(e).is_one() {
            return false;
        }
        rule != GcdRule::Literal || b2.gcd(e).is_one()
    }

    /// Equation and nontriviality, plus the gcd conditions when a rule is given.
    pub fn check(&self, b1: &Int, b2: &Int, rule: Option<GcdRule>) -> Result<()> {
        if self.e.is_negative() || self.m.is_negative() {
            return Err(Error::BadWitness(format!(
                "negative e or M in ({}, {}, {})",
                self.n, self.e, self.m
            )));
        }
        if !self.is_nontrivial() {
            return Err(Error::BadWitness("(e, M) = (0, 0)".into()));
        }
        if !self.satisfies(b1, b2) {
            return Err(Error::BadWitness(format!(
                "({}, {}, {}) does not solve N^2 = {b1} M^4 + {b2} e^4",
                self.n, self.e, self.m
            )));
        }
        if let Some(rule) = rule {
            if !self.gcd_conditions(b1, b2, rule) {
                return Err(Error::BadWitness(format!(
                    "({}, {}, {}) violates the {rule:?} gcd conditions for b1 = {b1}",
                    self.n, self.e, self.m
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuarticProblem {
    #[serde(with = "int_str")]
    pub b1: Int,
    #[serde(with = "int_str")]
    pub b2: Int,
    pub side: Side,
}

impl QuarticProblem {
    /// The quartic for squarefree `b1` on `side` of the curve with coefficient `a_curve`.
    pub fn new(a_curve: &Int, side: Side, b1: Int) -> Result<Self> {
        let c = side.constant(a_curve);
        if c.is_zero() {
            return Err(Error::Zero("curve coefficient A"));
        }
        if b1.is_zero() || !(&c % &b1).is_zero() {
            return domain(format!("{b1} does not divide {c}"));
        }
        let (s, _) = crate::exactnum::squarefree_decompose(&b1)?;
        if s != b1 {
            return domain(format!("b1 = {b1} is not squarefree"));
        }
        let b2 = &c / &b1;
        Ok(QuarticProblem { b1, b2, side })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Solved {
        witness: QuarticWitness,
    },
    /// Nothing with 0 <= e, M <= height. Not a proof of insolubility.
    Exhausted {
        height: u64,
    },
    /// No primitive solution modulo `modulus`, hence none at all.
    LocallyExcluded {
        modulus: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub height: u64,
    pub gcd_rule: GcdRule,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            height: 64,
            gcd_rule: GcdRule::Literal,
            parallel: true,
        }
    }
}

impl SearchOptions {
    pub fn with_height(height: u64) -> Self {
        SearchOptions {
            height,
            ..Default::default()
        }
    }
}

/// Signed squarefree divisors of `constant`, ordered by (|b1|, positive first).
pub fn enumerate_b1(constant: &Int) -> Result<Vec<Int>> {
    if constant.is_zero() {
        return Err(Error::Zero("quartic constant"));
    }
    let primes: Vec<Int> = factorize(constant).into_iter().map(|(p, _)| p).collect();
    let mut divisors = vec![Int::one()];
    for p in &primes {
        let more: Vec<Int> = divisors.iter().map(|d| d * p).collect();
        divisors.extend(more);
    }
    let mut out: Vec<Int> = divisors.into_iter().flat_map(|d| [d.clone(), -d]).collect();
    out.sort_by(|x, y| x.abs().cmp(&y.abs()).then(y.cmp(x)));
    Ok(out)
}

fn residue_solvable(b1: &Int, b2: &Int, modulus: u32, p: u32) -> bool {
    let md = Int::from(modulus);
    let r1 = b1.mod_floor(&md).to_u32().unwrap_or(0);
    let r2 = b2.mod_floor(&md).to_u32().unwrap_or(0);
    let mut squares = vec![false; modulus as usize];
    for n in 0..modulus {
        squares[((n * n) % modulus) as usize] = true;
    }
    let fourth: Vec<u32> = (0..modulus).map(|x| x.pow(4) % modulus).collect();
    for e in 0..modulus {
        for m in 0..modulus {
            if e % p == 0 && m % p == 0 {
                continue;
            }
            let v = (r1 * fourth[m as usize] + r2 * fourth[e as usize]) % modulus;
            if squares[v as usize] {
                return true;
            }
        }
    }
    false
}

/// A modulus (16 or 9) at which the quartic has no solution with gcd(e, M) = 1.
pub fn local_obstruction(b1: &Int, b2: &Int) -> Option<u32> {
    [(16u32, 2u32), (9, 3)]
        .into_iter()
        .find(|&(m, p)| !residue_solvable(b1, b2, m, p))
        .map(|(m, _)| m)
}

struct Fast {
    b1: i128,
    b2: i128,
}

fn fast_params(p: &QuarticProblem, height: u64) -> Option<Fast> {
    let b1 = p.b1.to_i128()?;
    let b2 = p.b2.to_i128()?;
    let h4 = (height as u128).checked_pow(4)?;
    let mag = b1.unsigned_abs().checked_add(b2.unsigned_abs())?;
    let bound = mag.checked_mul(h4)?;
    (bound < (1u128 << 120)).then_some(Fast { b1, b2 })
}

fn search_row_fast(p: &QuarticProblem, f: &Fast, e: u64, rule: GcdRule, h: u64) -> Option<QuarticWitness> {
    let e4 = (e as i128).pow(4);
    let m_range = if e == 0 { 1..=1.min(h) } else { 0..=h };
    for m in m_range {
        if m.gcd(&e) != 1 {
            continue;
        }
        let v = f.b1 * (m as i128).pow(4) + f.b2 * e4;
        if v < 0 {
            continue;
        }
        if let Some(root) = exact_sqrt_u128(v as u128) {
            let w = QuarticWitness::new(Int::from(root), Int::from(e), Int::from(m));
            if w.gcd_conditions(&p.b1, &p.b2, rule) {
                return Some(w);
            }
        }
    }
    None
}

fn search_row_big(p: &QuarticProblem, e: u64, rule: GcdRule, h: u64) -> Option<QuarticWitness> {
    let eb = Int::from(e);
    let e4 = eb.pow(4);
    let tail = &p.b2 * &e4;
    let m_range = if e == 0 { 1..=1.min(h) } else { 0..=h };
    for m in m_range {
        if m.gcd(&e) != 1 {
            continue;
        }
        let mb = Int::from(m);
        let v = &p.b1 * mb.pow(4) + &tail;
        if let Some(root) = is_perfect_square(&v) {
            let w = QuarticWitness::new(root, eb.clone(), mb);
            if w.gcd_conditions(&p.b1, &p.b2, rule) {
                return Some(w);
            }
        }
    }
    None
}

fn row_allowed(p: &QuarticProblem, e: u64, rule: GcdRule) -> bool {
    if e == 0 {
        return true;
    }
    let eb = Int::from(e);
    p.b1.gcd(&eb).is_one() && (rule != GcdRule::Literal || p.b2.gcd(&eb).is_one())
}

/// Bounded search for the least witness in (e, M, |N|, N >= 0) order.
pub fn solve_quartic(p: &QuarticProblem, opts: &SearchOptions) -> SearchOutcome {
    if let Some(modulus) = local_obstruction(&p.b1, &p.b2) {
        return SearchOutcome::LocallyExcluded { modulus };
    }
    let h = opts.height;
    let rule = opts.gcd_rule;
    let fast = fast_params(p, h);
    let row = |e: u64| -> Option<QuarticWitness> {
        if !row_allowed(p, e, rule) {
            return None;
        }
        match &fast {
            Some(f) => search_row_fast(p, f, e, rule, h),
            None => search_row_big(p, e, rule, h),
        }
    };
    let found = if opts.parallel {
        (0..=h).into_par_iter().find_map_first(row)
    } else {
        (0..=h).find_map(row)
    };
    match found {
        Some(witness) => SearchOutcome::Solved { witness },
        None => SearchOutcome::Exhausted { height: h },
    }
}
