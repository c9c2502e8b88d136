//! Prime fields `F_p` and extensions `F_{p^k} = F_p[t]/(f)`.
//!
//! Both are const-generic so that matrices, polynomials and modules can be
//! written once over the [`Scalar`] trait.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use rand::Rng;

/// Scalar field interface shared by the prime field and its extensions.
pub trait Scalar:
    Copy
    + Eq
    + Hash
    + Ord
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Characteristic `p`.
    fn characteristic() -> u32;
    /// Number of elements `p^k`.
    fn order() -> u64;
    /// Degree over the prime field.
    fn degree() -> usize;
    fn inv(self) -> Option<Self>;
    /// Image of an integer.
    fn from_int(n: i64) -> Self;
    /// Bijection `[0, q) -> F`; base-`p` digits are the coordinates in `1, t, t^2, ...`.
    fn from_index(i: u64) -> Self;
    fn index(self) -> u64;

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_index(rng.gen_range(0..Self::order()))
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn elements() -> Box<dyn Iterator<Item = Self>> {
        Box::new((0..Self::order()).map(Self::from_index))
    }
}

/// Element of the prime field `F_P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const CHECK: () = assert!(
        P >= 3 && P % 2 == 1 && P < 65536,
        "odd prime modulus expected"
    );

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        Fp(v.rem_euclid(P as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp(if self.0 >= o.0 {
            self.0 - o.0
        } else {
            self.0 + P - o.0
        })
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u64 * o.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u32> Div for Fp<P> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.inv().expect("division by zero in F_p")
    }
}

impl<const P: u32> AddAssign for Fp<P> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const P: u32> SubAssign for Fp<P> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const P: u32> MulAssign for Fp<P> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u32> Scalar for Fp<P> {
    fn characteristic() -> u32 {
        P
    }
    fn order() -> u64 {
        P as u64
    }
    fn degree() -> usize {
        1
    }
    fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(Scalar::pow(self, P as u64 - 2))
        }
    }
    fn from_int(n: i64) -> Self {
        Fp::new(n)
    }
    fn from_index(i: u64) -> Self {
        Fp((i % P as u64) as u32)
    }
    fn index(self) -> u64 {
        self.0 as u64
    }
}

/// Largest extension degree with a tabulated modulus.
pub const MAX_EXT_DEGREE: usize = 6;

/// Monic irreducible moduli, lowest coefficient first, leading 1 omitted.
const MODULI: &[(u32, &[u32])] = &[
    (3, &[1]),
    (3, &[2, 2]),
    (3, &[1, 2, 0]),
    (3, &[2, 0, 0, 2]),
    (3, &[1, 2, 0, 0, 0]),
    (3, &[2, 2, 1, 0, 2, 0]),
    (5, &[3]),
    (5, &[2, 4]),
    (5, &[3, 3, 0]),
    (5, &[2, 4, 4, 0]),
    (5, &[3, 4, 0, 0, 0]),
    (5, &[2, 0, 1, 4, 1, 0]),
    (7, &[4]),
    (7, &[3, 6]),
    (7, &[4, 0, 6]),
    (7, &[3, 4, 5, 0]),
    (7, &[4, 1, 0, 0, 0]),
    (7, &[3, 6, 4, 5, 1, 0]),
    (11, &[9]),
    (11, &[2, 7]),
    (11, &[9, 2, 0]),
    (11, &[2, 10, 8, 0]),
    (11, &[9, 0, 10, 0, 0]),
    (11, &[2, 7, 6, 4, 3, 0]),
    (13, &[11]),
    (13, &[2, 12]),
    (13, &[11, 2, 0]),
    (13, &[2, 12, 3, 0]),
    (13, &[11, 4, 0, 0, 0]),
    (13, &[2, 11, 11, 10, 0, 0]),
];

/// Primes for which extension moduli are tabulated.
pub const TABULATED_PRIMES: &[u32] = &[3, 5, 7, 11, 13];

/// Tabulated modulus of `F_{p^k}` (lowest coefficient first, monic leading term omitted).
pub fn modulus(p: u32, k: usize) -> Option<&'static [u32]> {
    MODULI
        .iter()
        .find(|(q, m)| *q == p && m.len() == k)
        .map(|(_, m)| *m)
}

const fn lookup<const P: u32, const K: usize>() -> [u32; K] {
    let mut i = 0;
    while i < MODULI.len() {
        let (q, m) = MODULI[i];
        if q == P && m.len() == K {
            let mut out = [0u32; K];
            let mut j = 0;
            while j < K {
                out[j] = m[j];
                j += 1;
            }
            return out;
        }
        i += 1;
    }
    panic!("no tabulated modulus for this (p, k)");
}

/// Element of `F_{P^K}` as coefficients of `1, t, ..., t^{K-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq<const P: u32, const K: usize>([u32; K]);

impl<const P: u32, const K: usize> Fq<P, K> {
    const MODULUS: [u32; K] = lookup::<P, K>();

    pub fn from_coeffs(c: [i64; K]) -> Self {
        let mut out = [0u32; K];
        for (o, v) in out.iter_mut().zip(c) {
            *o = v.rem_euclid(P as i64) as u32;
        }
        Fq(out)
    }

    pub fn coeffs(&self) -> [u32; K] {
        self.0
    }

    /// The class of `t`, a root of the modulus.
    pub fn generator() -> Self {
        let mut c = [0u32; K];
        if K == 1 {
            c[0] = (P - Self::MODULUS[0]) % P;
        } else {
            c[1] = 1;
        }
        Fq(c)
    }

    pub fn from_base(x: Fp<P>) -> Self {
        let mut c = [0u32; K];
        c[0] = x.value();
        Fq(c)
    }

    /// `Some(x)` when the element lies in the prime field.
    pub fn to_base(self) -> Option<Fp<P>> {
        if self.0[1..].iter().all(|&c| c == 0) {
            Some(Fp::new(self.0[0] as i64))
        } else {
            None
        }
    }
}

impl<const P: u32, const K: usize> fmt::Debug for Fq<P, K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<const P: u32, const K: usize> fmt::Display for Fq<P, K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, _) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{c}t"),
                (_, 1) => format!("t^{i}"),
                _ => format!("{c}t^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl<const P: u32, const K: usize> Add for Fq<P, K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a = (*a + b) % P;
        }
        Fq(c)
    }
}

impl<const P: u32, const K: usize> Sub for Fq<P, K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a = (*a + P - b) % P;
        }
        Fq(c)
    }
}

impl<const P: u32, const K: usize> Neg for Fq<P, K> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.0;
        for a in c.iter_mut() {
            *a = (P - *a) % P;
        }
        Fq(c)
    }
}

impl<const P: u32, const K: usize> Mul for Fq<P, K> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = P as u64;
        let mut prod = vec![0u64; 2 * K - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        // t^K = -(m_0 + m_1 t + ... + m_{K-1} t^{K-1})
        for d in (K..2 * K - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in Self::MODULUS.iter().enumerate() {
                let idx = d - K + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let mut out = [0u32; K];
        for (o, v) in out.iter_mut().zip(prod) {
            *o = v as u32;
        }
        Fq(out)
    }
}

impl<const P: u32, const K: usize> Div for Fq<P, K> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.inv().expect("division by zero in F_q")
    }
}

impl<const P: u32, const K: usize> AddAssign for Fq<P, K> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const P: u32, const K: usize> SubAssign for Fq<P, K> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const P: u32, const K: usize> MulAssign for Fq<P, K> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<const P: u32, const K: usize> Zero for Fq<P, K> {
    fn zero() -> Self {
        Fq([0; K])
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl<const P: u32, const K: usize> One for Fq<P, K> {
    fn one() -> Self {
        let mut c = [0; K];
        c[0] = 1;
        Fq(c)
    }
}

impl<const P: u32, const K: usize> Scalar for Fq<P, K> {
    fn characteristic() -> u32 {
        P
    }
    fn order() -> u64 {
        (P as u64).pow(K as u32)
    }
    fn degree() -> usize {
        K
    }
    fn inv(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Scalar::pow(self, Self::order() - 2))
        }
    }
    fn from_int(n: i64) -> Self {
        Self::from_base(Fp::new(n))
    }
    fn from_index(mut i: u64) -> Self {
        let mut c = [0u32; K];
        for slot in c.iter_mut() {
            *slot = (i % P as u64) as u32;
            i /= P as u64;
        }
        Fq(c)
    }
    fn index(self) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * P as u64 + c as u64)
    }
}

pub fn factorial_inverse<F: Scalar>(k: u32) -> Option<F> {
    (1..=k as i64)
        .fold(F::one(), |acc, i| acc * F::from_int(i))
        .inv()
}

/// Runs `$body` with the const parameter `$P` bound to the runtime prime `$p`.
/// Evaluates to `Err(p)` when `$p` is not one of the supported primes.
#[macro_export]
macro_rules! with_prime {
    ($p:expr, $P:ident => $body:expr) => {{
        match $p {
            3 => {
                const $P: u32 = 3;
                Ok($body)
            }
            5 => {
                const $P: u32 = 5;
                Ok($body)
            }
            7 => {
                const $P: u32 = 7;
                Ok($body)
            }
            11 => {
                const $P: u32 = 11;
                Ok($body)
            }
            13 => {
                const $P: u32 = 13;
                Ok($body)
            }
            other => Err(other),
        }
    }};
}

/// Runs `$body` with `$K` bound to the runtime extension degree `$k` (1..=6).
#[macro_export]
macro_rules! with_degree {
    ($k:expr, $K:ident => $body:expr) => {{
        match $k {
            1 => {
                const $K: usize = 1;
                Some($body)
            }
            2 => {
                const $K: usize = 2;
                Some($body)
            }
            3 => {
                const $K: usize = 3;
                Some($body)
            }
            4 => {
                const $K: usize = 4;
                Some($body)
            }
            5 => {
                const $K: usize = 5;
                Some($body)
            }
            6 => {
                const $K: usize = 6;
                Some($body)
            }
            _ => None,
        }
    }};
}

pub fn is_supported_prime(p: u32) -> bool {
    TABULATED_PRIMES.contains(&p)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F3 = Fp<3>;
    type F9 = Fq<3, 2>;

    #[test]
    fn prime_field_arithmetic() {
        assert_eq!(F3::new(2) + F3::new(2), F3::new(1));
        assert_eq!(F3::new(2).inv(), Some(F3::new(2)));
        assert_eq!(-F3::new(1), F3::new(2));
        assert_eq!(F3::new(0).inv(), None);
        assert_eq!(Fp::<5>::new(-1), Fp::<5>::new(4));
    }

    #[test]
    fn extension_inverse_and_index() {
        for a in F9::elements().filter(|a| !a.is_zero()) {
            assert_eq!(a * a.inv().unwrap(), F9::one());
        }
        for i in 0..9 {
            assert_eq!(F9::from_index(i).index(), i);
        }
    }

    #[test]
    fn factorial_inverses() {
        assert_eq!(factorial_inverse::<F3>(2), Some(F3::new(2)));
        assert_eq!(factorial_inverse::<Fp<5>>(4), Some(Fp::<5>::new(4)));
        assert_eq!(factorial_inverse::<F3>(3), None);
    }
}
