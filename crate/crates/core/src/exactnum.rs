//! Exact integers, rationals and the group of square classes Q^x/(Q^x)^2.
//!
//! Everything downstream (curves, descent, the congruent-number encodings)
//! works on [`Int`] and [`Rat`]; nothing here touches floating point.
//! A [`SquareClass`] is stored as its signed squarefree representative, so
//! equality of classes is plain integer equality.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Parses `"a"` or `"a/b"` into a normalized rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let r = if s.contains('/') {
        Rat::from_str(s).map_err(|_| Error::Domain(format!("cannot parse rational {s:?}")))?
    } else {
        rat_from_int(&parse_int(s)?)
    };
    Ok(r)
}

pub fn parse_int(s: &str) -> Result<Int> {
    Int::from_str(s.trim()).map_err(|_| Error::Domain(format!("cannot parse integer {s:?}")))
}

const fn square_residues<const M: usize>() -> [bool; M] {
    let mut t = [false; M];
    let mut i = 0;
    while i < M {
        t[(i * i) % M] = true;
        i += 1;
    }
    t
}

static SQ64: [bool; 64] = square_residues::<64>();
static SQ63: [bool; 63] = square_residues::<63>();
static SQ65: [bool; 65] = square_residues::<65>();
static SQ11: [bool; 11] = square_residues::<11>();

#[inline]
fn passes_residue_filter(low64: u64, m63: usize, m65: usize, m11: usize) -> bool {
    SQ64[(low64 & 63) as usize] && SQ63[m63] && SQ65[m65] && SQ11[m11]
}

/// Exact square root of a `u128` when it is a perfect square.
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    if !passes_residue_filter(n as u64, (n % 63) as usize, (n % 65) as usize, (n % 11) as usize) {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Returns `Some(k)` with `k >= 0` and `k^2 = n` when `n` is a perfect square.
pub fn is_perfect_square(n: &Int) -> Option<Int> {
    match n.sign() {
        Sign::Minus => None,
        Sign::NoSign => Some(Int::zero()),
        Sign::Plus => {
            if let Some(small) = n.to_u128() {
                return exact_sqrt_u128(small).map(Int::from);
            }
            let low = n.iter_u64_digits().next().unwrap_or(0);
            let m63 = (n % 63u32).to_usize().unwrap_or(0);
            let m65 = (n % 65u32).to_usize().unwrap_or(0);
            let m11 = (n % 11u32).to_usize().unwrap_or(0);
            if !passes_residue_filter(low, m63, m65, m11) {
                return None;
            }
            let r = n.sqrt();
            (&r * &r == *n).then_some(r)
        }
    }
}

/// Rational square root, if the rational is a square of a rational.
pub fn rat_sqrt(q: &Rat) -> Option<Rat> {
    let n = is_perfect_square(q.numer())?;
    let d = is_perfect_square(q.denom())?;
    Some(Rat::new(n, d))
}

/// Integer factorization by trial division up to a bound, then Miller-Rabin
/// and Pollard-Brent rho on whatever cofactor is left.
#[derive(Debug, Clone)]
pub struct Factorizer {
    trial_bound: u64,
    primes: Vec<u32>,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer::new(1_000_000)
    }
}

fn default_factorizer() -> &'static Factorizer {
    static F: OnceLock<Factorizer> = OnceLock::new();
    F.get_or_init(Factorizer::default)
}

fn sieve(bound: u64) -> Vec<u32> {
    let bound = bound.max(2) as usize;
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for i in 2..=bound {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl Factorizer {
    pub fn new(trial_bound: u64) -> Self {
        Factorizer {
            trial_bound,
            primes: sieve(trial_bound),
        }
    }

    pub fn trial_bound(&self) -> u64 {
        self.trial_bound
    }

    /// Prime factorization of `|n|` as ascending `(prime, exponent)` pairs.
    /// Zero and units factor as the empty product.
    pub fn factor(&self, n: &Int) -> Vec<(Int, u32)> {
        let mut acc: BTreeMap<Int, u32> = BTreeMap::new();
        let m = n.abs();
        if m <= Int::one() {
            return Vec::new();
        }
        let rest = self.trial_divide(m, &mut acc);
        if !rest.is_one() {
            self.split_large(rest, &mut acc);
        }
        acc.into_iter().collect()
    }

    fn trial_divide(&self, mut m: Int, acc: &mut BTreeMap<Int, u32>) -> Int {
        for &p in &self.primes {
            if let Some(small) = m.to_u64() {
                let rest = self.trial_divide_u64(small, acc);
                return Int::from(rest);
            }
            let pb = Int::from(p);
            if &pb * &pb > m {
                break;
            }
            let mut e = 0u32;
            loop {
                let (q, r) = m.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                m = q;
                e += 1;
            }
            if e > 0 {
                *acc.entry(pb).or_insert(0) += e;
            }
        }
        m
    }

    fn trial_divide_u64(&self, mut m: u64, acc: &mut BTreeMap<Int, u32>) -> u64 {
        for &p in &self.primes {
            let p = p as u64;
            if p * p > m {
                break;
            }
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            if e > 0 {
                *acc.entry(Int::from(p)).or_insert(0) += e;
            }
        }
        m
    }

    fn split_large(&self, m: Int, acc: &mut BTreeMap<Int, u32>) {
        if m.is_one() {
            return;
        }
        // No factor below the trial bound, so anything under bound^2 is prime.
        let b = Int::from(self.trial_bound);
        if m < &b * &b || is_probable_prime(&m) {
            *acc.entry(m).or_insert(0) += 1;
            return;
        }
        if let Some(r) = is_perfect_square(&m) {
            let mut sub = BTreeMap::new();
            self.split_large(r, &mut sub);
            for (p, e) in sub {
                *acc.entry(p).or_insert(0) += 2 * e;
            }
            return;
        }
        let d = pollard_brent(&m);
        let other = &m / &d;
        self.split_large(d, acc);
        self.split_large(other, acc);
    }
}

pub fn factorize(n: &Int) -> Vec<(Int, u32)> {
    default_factorizer().factor(n)
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, b, m);
        }
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    r
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first twelve prime bases plus eight more.
/// Deterministic below 3.3e24, overwhelmingly reliable above.
pub fn is_probable_prime(n: &Int) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = Int::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let bases = MR_BASES
        .iter()
        .copied()
        .chain([41u64, 43, 47, 53, 59, 61, 67, 71]);
    'bases: for a in bases {
        let a = Int::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &Int) -> Int {
    if n.is_even() {
        return Int::from(2);
    }
    let mut c = Int::one();
    loop {
        let f = |x: &Int| (x * x + &c) % n;
        let mut y = Int::from(2);
        let mut r: u64 = 1;
        let mut q = Int::one();
        let mut g = Int::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..(128.min(r - k)) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1;
    }
}

/// Splits a nonzero `n` as `s * f^2` with `s` squarefree (carrying the sign of `n`)
/// and `f >= 1`.
pub fn squarefree_decompose(n: &Int) -> Result<(Int, Int)> {
    squarefree_decompose_with(default_factorizer(), n)
}

pub fn squarefree_decompose_with(fz: &Factorizer, n: &Int) -> Result<(Int, Int)> {
    if n.is_zero() {
        return Err(Error::Zero("squarefree decomposition of 0"));
    }
    let mut s = if n.is_negative() { -Int::one() } else { Int::one() };
    let mut f = Int::one();
    for (p, e) in fz.factor(n) {
        if e % 2 == 1 {
            s *= &p;
        }
        f *= num_traits::pow(p, (e / 2) as usize);
    }
    Ok((s, f))
}

/// An element of Q^x/(Q^x)^2, held as its signed squarefree representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass(Int);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(Int::one())
    }

    pub fn minus_one() -> Self {
        SquareClass(-Int::one())
    }

    pub fn rep(&self) -> &Int {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Wraps a value already known to be squarefree.
    pub fn from_squarefree(rep: Int) -> Result<Self> {
        if rep.is_zero() {
            return Err(Error::Zero("square class of 0"));
        }
        let (s, _) = squarefree_decompose(&rep)?;
        if s != rep {
            return Err(Error::Domain(format!("{rep} is not squarefree")));
        }
        Ok(SquareClass(rep))
    }

    pub fn of_int(n: &Int) -> Result<Self> {
        let (s, _) = squarefree_decompose(n)?;
        Ok(SquareClass(s))
    }

    /// p/d is congruent to p*d modulo squares.
    pub fn of_rat(q: &Rat) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::Zero("square class of 0"));
        }
        Self::of_int(&(q.numer() * q.denom()))
    }

    /// Product in the exponent-2 group: for squarefree a, b with g = gcd(a, b),
    /// ab = (a/g)(b/g) g^2, and (a/g)(b/g) is squarefree.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.0.gcd(&other.0);
        SquareClass((&self.0 / &g) * (&other.0 / &g))
    }

    /// Ordering key used wherever classes are listed: by |rep|, positive first.
    pub fn sort_key(&self) -> (Int, bool) {
        (self.0.abs(), self.0.is_negative())
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let v = parse_int(&s).map_err(serde::de::Error::custom)?;
        SquareClass::from_squarefree(v).map_err(serde::de::Error::custom)
    }
}

pub fn sqclass_mul(a: &SquareClass, b: &SquareClass) -> SquareClass {
    a.mul(b)
}

pub fn square_class(q: &Rat) -> Result<SquareClass> {
    SquareClass::of_rat(q)
}

/// Serde adapter writing big integers as decimal strings.
pub mod int_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Int, D::Error> {
        let s = String::deserialize(d)?;
        parse_int(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing rationals as `"a/b"` (or `"a"` when integral).
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}
