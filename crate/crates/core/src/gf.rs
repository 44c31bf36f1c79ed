//! Finite fields GF(p^e) with table-based arithmetic.
//!
//! An element is stored as its canonical index: the coefficient vector
//! `(c_0, ..., c_{e-1})` of its representative polynomial modulo the field
//! modulus, read as the base-p integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
//! The prime subfield therefore occupies indices `0..p` in every extension.
//! Multiplication goes through log/exp tables built once per field.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Fields up to this size also get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

/// An element of some [`Field`], identified by its canonical index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Report form of a field: `{"p": .., "e": .., "modulus": [low-to-high]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

/// GF(q), q = p^e, with a fixed modulus and primitive element.
#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    // exp has 2(q-1) entries so that exp[log a + log b] needs no reduction.
    exp: Vec<u16>,
    log: Vec<u32>,
    neg: Vec<u16>,
    add_table: Option<Vec<u16>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over GF(p), coefficients low-to-high.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p as u64 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let factor = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        if factor != 0 {
            let shift = dr - db;
            for (i, &bc) in b.iter().enumerate() {
                let sub = (factor as u64 * bc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
        if r.is_empty() {
            r.push(0);
        }
    }
    poly_trim(r)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for n in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = n;
            for _ in 0..d {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `e` over GF(p),
/// comparing the coefficient list low-to-high.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    let total = (p as u64).pow(e as u32);
    for n in 0..total {
        // c_0 is the most significant digit of n, so n's order is the lex order.
        let mut coeffs = vec![0u32; e + 1];
        let mut rest = n;
        for i in (0..e).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[e] = 1;
        if e >= 2 && coeffs[0] == 0 {
            continue;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds GF(p^e) with the lexicographically smallest irreducible modulus
    /// and the smallest primitive element.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or(Error::SizeExceeded((p as u64).saturating_pow(e)))?;
        let q32 = q as u32;
        let modulus = smallest_irreducible(p, e);

        let digits = |idx: u32| -> Vec<u32> {
            let mut out = Vec::with_capacity(e as usize);
            let mut rest = idx;
            for _ in 0..e {
                out.push(rest % p);
                rest /= p;
            }
            out
        };
        let undigits = |d: &[u32]| -> u32 { d.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits(a);
            let db = digits(b);
            let mut prod = vec![0u32; 2 * e as usize];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&poly_trim(prod), &modulus, p);
            r.resize(e as usize, 0);
            undigits(&r)
        };
        let slow_pow = |a: u32, mut n: u64| -> u32 {
            let mut result = 1u32;
            let mut base = a;
            while n > 0 {
                if n & 1 == 1 {
                    result = slow_mul(result, base);
                }
                base = slow_mul(base, base);
                n >>= 1;
            }
            result
        };

        let order = q - 1;
        let factors = prime_factors(order);
        let generator = (1..q32)
            .find(|&g| factors.iter().all(|&l| slow_pow(g, order / l) != 1))
            .expect("multiplicative group is cyclic");

        let units = order as usize;
        let mut exp = vec![0u16; 2 * units.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..units {
            exp[i] = x as u16;
            exp[i + units] = x as u16;
            log[x as usize] = i as u32;
            x = slow_mul(x, generator);
        }

        let neg = (0..q32)
            .map(|a| undigits(&digits(a).iter().map(|&c| (p - c) % p).collect::<Vec<_>>()) as u16)
            .collect();

        let mut field = Field {
            p,
            e,
            q: q32,
            modulus,
            generator: FieldElement(generator as u16),
            exp,
            log,
            neg,
            add_table: None,
        };
        if q32 <= ADD_TABLE_LIMIT {
            let mut table = vec![0u16; (q32 * q32) as usize];
            for a in 0..q32 {
                for b in 0..q32 {
                    table[(a * q32 + b) as usize] = field.add_digits(a, b) as u16;
                }
            }
            field.add_table = Some(table);
        }
        Ok(field)
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn with_order(q: u64) -> Result<Field> {
        if q > MAX_FIELD_SIZE {
            return Err(Error::SizeExceeded(q));
        }
        let (p, e) = prime_power(q).ok_or(Error::NotAPrimePower(q))?;
        Field::new(p, e)
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus, coefficients low-to-high (length e + 1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            e: self.e,
            modulus: self.modulus.clone(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index as u16))
        } else {
            Err(Error::ElementOutOfRange(index))
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|i| FieldElement(i as u16))
    }

    /// `[g^0, g^1, ..., g^(q-2)]` for the fixed generator `g`.
    pub fn units(&self) -> Vec<FieldElement> {
        self.exp[..(self.q - 1) as usize]
            .iter()
            .map(|&x| FieldElement(x))
            .collect()
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u16)
    }

    /// Coefficients of the representative polynomial, low-to-high.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let mut rest = a.index();
        (0..self.e)
            .map(|_| {
                let d = rest % self.p;
                rest /= self.p;
                d
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.add_table {
            Some(t) => FieldElement(t[(a.0 as usize) * self.q as usize + b.0 as usize]),
            None => FieldElement(self.add_digits(a.index(), b.index()) as u16),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    /// `a / b`; `None` when `b` is zero.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (n % order)) % order) as usize])
    }

    /// Discrete log with respect to the fixed generator.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    /// `g^k` for the fixed generator `g`.
    pub fn exp(&self, k: u64) -> FieldElement {
        let order = (self.q - 1) as u64;
        FieldElement(self.exp[(k % order) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Option<u32> {
        let l = self.log(a)?;
        let n = self.q - 1;
        Some(n / gcd(n, l))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A field homomorphism GF(q) -> GF(q^d).
#[derive(Clone, Debug)]
pub struct Embedding {
    small_q: u32,
    big_q: u32,
    image: Vec<FieldElement>,
}

impl Embedding {
    pub fn apply(&self, a: FieldElement) -> FieldElement {
        self.image[a.0 as usize]
    }

    pub fn small_q(&self) -> u32 {
        self.small_q
    }

    pub fn big_q(&self) -> u32 {
        self.big_q
    }

    /// The embedded copy of the small field, indexed by small-field index.
    pub fn image(&self) -> &[FieldElement] {
        &self.image
    }
}

/// Minimal polynomial over GF(p) of `a`, as prime-field coefficients
/// low-to-high.
fn minimal_polynomial(field: &Field, a: FieldElement) -> Vec<u32> {
    let mut conjugates = vec![a];
    let mut c = field.pow(a, field.p as u64);
    while c != a {
        conjugates.push(c);
        c = field.pow(c, field.p as u64);
    }
    let mut poly = vec![FieldElement::ONE];
    for &root in &conjugates {
        // poly *= (X - root)
        let mut next = vec![FieldElement::ZERO; poly.len() + 1];
        for (i, &coef) in poly.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], coef);
            next[i] = field.sub(next[i], field.mul(coef, root));
        }
        poly = next;
    }
    poly.into_iter()
        .map(|c| {
            debug_assert!(c.index() < field.p);
            c.index()
        })
        .collect()
}

/// Embeds `small` into `big`, sending `small.generator()` to the smallest
/// root (canonical order) of its minimal polynomial in `big`.
pub fn embed(small: &Field, big: &Field) -> Result<Embedding> {
    let not_sub = || Error::NotASubfield {
        small: small.q,
        big: big.q,
    };
    if small.p != big.p || !big.e.is_multiple_of(small.e) {
        return Err(not_sub());
    }
    let minpoly = minimal_polynomial(small, small.generator);
    let eval = |x: FieldElement| -> FieldElement {
        minpoly.iter().rev().fold(FieldElement::ZERO, |acc, &c| {
            big.add(big.mul(acc, x), FieldElement(c as u16))
        })
    };
    let root = big
        .elements()
        .skip(1)
        .find(|&x| eval(x).is_zero())
        .ok_or_else(not_sub)?;
    let mut image = vec![FieldElement::ZERO; small.q as usize];
    for k in 0..(small.q - 1) as u64 {
        image[small.exp(k).0 as usize] = big.pow(root, k);
    }
    Ok(Embedding {
        small_q: small.q,
        big_q: big.q,
        image,
    })
}
