//! Arithmetic in GF(2^n) for `1 <= n <= 32`, polynomial basis.

use std::fmt;

use thiserror::Error;

pub const MAX_DEGREE: u32 = 32;

/// Lowest-weight irreducible polynomial of each degree, smallest as an
/// integer among those of minimal weight. Index = degree.
const MODULUS_TABLE: [u64; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported extension degree {0} (supported: 1..=32)")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#x} is not an irreducible polynomial of degree {n}")]
    NotIrreducible { n: u32, modulus: u64 },
    #[error("value {value:#x} does not fit in GF(2^{n})")]
    OutOfRange { n: u32, value: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
}

/// Element of GF(2^n): coefficient vector in the polynomial basis
/// `1, x, …, x^{n-1}` packed into the low `n` bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps raw coefficient bits. Use [`Field::element`] for a range check.
    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        FieldElement(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// characteristic 2: addition and subtraction are both XOR
#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn sub(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf({:#x})", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Remainder of the F2 polynomial `a` modulo `m` (both as bit masks).
fn poly_rem(mut a: u128, m: u128) -> u128 {
    let dm = 127 - m.leading_zeros();
    while a != 0 {
        let da = 127 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

fn poly_mulmod(a: u64, b: u64, m: u64) -> u64 {
    let mut acc: u128 = 0;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= (a as u128) << shift;
        }
        b >>= 1;
        shift += 1;
    }
    poly_rem(acc, m as u128) as u64
}

/// Ben-Or irreducibility test: `f` of degree `n` is irreducible iff
/// `gcd(x^{2^i} - x, f) = 1` for every `1 <= i <= n/2`.
pub fn is_irreducible(f: u64) -> bool {
    if f < 2 {
        return false;
    }
    let n = 63 - f.leading_zeros();
    if n == 1 {
        return true;
    }
    if f & 1 == 0 {
        return false;
    }
    let mut power = 0b10u64; // x mod f
    for _ in 1..=n / 2 {
        power = poly_mulmod(power, power, f);
        if poly_gcd(f as u128, (power ^ 0b10) as u128) != 1 {
            return false;
        }
    }
    true
}

/// Searches for the lowest-weight irreducible polynomial of degree `n`,
/// smallest as an integer among those of minimal weight.
pub fn search_modulus(n: u32) -> Option<u64> {
    if n == 0 || n > MAX_DEGREE {
        return None;
    }
    let top = 1u64 << n;
    for weight in 2..=(n + 1) {
        let inner = weight - 2;
        let mut best: Option<u64> = None;
        // Middle-term masks of the requested popcount over bits 1..n-1, ascending.
        let span = n.saturating_sub(1);
        if inner > span {
            continue;
        }
        let mut mids = if inner == 0 {
            0
        } else {
            ((1u64 << inner) - 1) << 1
        };
        loop {
            let f = top | mids | 1;
            if is_irreducible(f) {
                best = Some(f);
                break;
            }
            if inner == 0 {
                break;
            }
            // next mask with the same popcount (Gosper's hack), on the shifted range
            let v = mids >> 1;
            let t = v | (v - 1);
            let next = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
            if next >> span != 0 {
                break;
            }
            mids = next << 1;
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// The field GF(2^n) defined by a fixed irreducible modulus.
///
/// Immutable after construction; share it behind an `Arc`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Field {
    n: u32,
    modulus: u64,
    mask: u64,
    // bit i = Tr(x^i); Tr(a) = parity(a & trace_mask)
    trace_mask: u64,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.n, self.modulus)
    }
}

impl Field {
    /// Field of degree `n` with the default modulus.
    pub fn new(n: u32) -> Result<Self, FieldError> {
        let modulus = match MODULUS_TABLE.get(n as usize) {
            Some(&m) if m != 0 => m,
            _ => search_modulus(n).ok_or(FieldError::UnsupportedDegree(n))?,
        };
        Self::with_modulus(n, modulus)
    }

    pub fn with_modulus(n: u32, modulus: u64) -> Result<Self, FieldError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::UnsupportedDegree(n));
        }
        if 63 - modulus.leading_zeros() != n || !is_irreducible(modulus) {
            return Err(FieldError::NotIrreducible { n, modulus });
        }
        let mut field = Field {
            n,
            modulus,
            mask: (1u64 << n) - 1,
            trace_mask: 0,
        };
        let mut tm = 0;
        for i in 0..n {
            if field.trace_by_definition(FieldElement(1 << i)) {
                tm |= 1 << i;
            }
        }
        field.trace_mask = tm;
        Ok(field)
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of elements, `2^n`.
    pub fn order(&self) -> u64 {
        1u64 << self.n
    }

    /// Range-checked element constructor.
    pub fn element(&self, bits: u64) -> Result<FieldElement, FieldError> {
        if bits & !self.mask != 0 {
            return Err(FieldError::OutOfRange {
                n: self.n,
                value: bits,
            });
        }
        Ok(FieldElement(bits))
    }

    /// Whether `a` is a reduced element of this field.
    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 & !self.mask == 0
    }

    /// The class of `x`, which generates the polynomial basis.
    pub fn x(&self) -> FieldElement {
        if self.n == 1 {
            // x ≡ 1 mod (x + 1)
            FieldElement(1)
        } else {
            FieldElement(2)
        }
    }

    /// All field elements in increasing coefficient order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(FieldElement)
    }

    /// Polynomial-basis monomial `x^i`, `i < n`.
    #[inline]
    pub fn monomial(&self, i: u32) -> FieldElement {
        debug_assert!(i < self.n);
        FieldElement(1 << i)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(
            self.contains(a) && self.contains(b),
            "operand outside GF(2^{})",
            self.n
        );
        let mut acc = 0u64;
        let mut a = a.0;
        let mut b = b.0;
        let top = 1u64 << self.n;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        FieldElement(acc)
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// `a^{2^j}`.
    pub fn frobenius(&self, a: FieldElement, j: u32) -> FieldElement {
        let mut a = a;
        for _ in 0..(j % self.n) {
            a = self.square(a);
        }
        a
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^{2^n - 2}`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Absolute trace to F2.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> bool {
        (a.0 & self.trace_mask).count_ones() & 1 == 1
    }

    /// `a + a^2 + … + a^{2^{n-1}}` evaluated literally.
    pub fn trace_by_definition(&self, a: FieldElement) -> bool {
        let mut sum = FieldElement::ZERO;
        let mut p = a;
        for _ in 0..self.n {
            sum += p;
            p = self.square(p);
        }
        debug_assert!(sum.0 <= 1, "trace left F2");
        sum.0 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook multiplication of polynomials followed by long division.
    fn schoolbook_mul(a: u64, b: u64, modulus: u64) -> u64 {
        let mut prod: u128 = 0;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                prod ^= (a as u128) << i;
            }
        }
        poly_rem(prod, modulus as u128) as u64
    }

    /// Irreducibility by trial division over every polynomial of degree <= n/2.
    fn irreducible_brute(f: u64) -> bool {
        let n = 63 - f.leading_zeros();
        for g in 2..(1u64 << (n / 2 + 1)) {
            if poly_rem(f as u128, g as u128) == 0 && g != f {
                return false;
            }
        }
        true
    }

    #[test]
    fn gf8_worked_example() {
        // x^3 + x + 1, g = x: g * g^2 = g^3 = g + 1
        let f = Field::new(3).unwrap();
        assert_eq!(f.modulus(), 0b1011);
        let g = f.x();
        let g2 = f.square(g);
        assert_eq!(g2.bits(), 0b100);
        assert_eq!(f.mul(g, g2).bits(), 0b011);
    }

    #[test]
    fn table_matches_search() {
        for n in 2..=16 {
            assert_eq!(
                Some(MODULUS_TABLE[n as usize]),
                search_modulus(n),
                "degree {n}"
            );
        }
        assert_eq!(search_modulus(17), Some((1 << 17) | (1 << 3) | 1));
    }

    #[test]
    fn irreducibility_against_trial_division() {
        for f in 4u64..(1 << 11) {
            assert_eq!(is_irreducible(f), irreducible_brute(f), "{f:#b}");
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(matches!(
            Field::with_modulus(4, 0b10101),
            Err(FieldError::NotIrreducible { .. })
        ));
        assert!(matches!(
            Field::new(0),
            Err(FieldError::UnsupportedDegree(0))
        ));
        assert!(matches!(
            Field::new(33),
            Err(FieldError::UnsupportedDegree(33))
        ));
        assert!(Field::new(3).unwrap().element(8).is_err());
    }

    #[test]
    fn mul_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in [2, 3, 5, 8, 13, 17, 31, 32] {
            let f = Field::new(n).unwrap();
            let mask = (1u64 << n) - 1;
            for _ in 0..2000 {
                let a = rng.gen::<u64>() & mask;
                let b = rng.gen::<u64>() & mask;
                assert_eq!(
                    f.mul(FieldElement(a), FieldElement(b)).bits(),
                    schoolbook_mul(a, b, f.modulus())
                );
            }
        }
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 5, 7, 9, 11, 17] {
            let f = Field::new(n).unwrap();
            let mask = (1u64 << n) - 1;
            let mut r = || FieldElement(rng.gen::<u64>() & mask);
            for _ in 0..10_000 {
                let (a, b, c) = (r(), r(), r());
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
                assert_eq!(f.mul(FieldElement::ONE, a), a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                assert_eq!(f.frobenius(a + b, 1), f.frobenius(a, 1) + f.frobenius(b, 1));
                // Tr(xy) = Tr(x^2 y^2)
                assert_eq!(
                    f.trace(f.mul(a, b)),
                    f.trace(f.mul(f.square(a), f.square(b)))
                );
            }
        }
        assert_eq!(
            Field::new(5).unwrap().inv(FieldElement::ZERO),
            Err(FieldError::ZeroInverse)
        );
    }

    #[test]
    fn frobenius_has_order_n() {
        for n in [1, 2, 3, 4, 5, 7, 8] {
            let f = Field::new(n).unwrap();
            for a in f.elements() {
                assert_eq!(f.frobenius(a, 0), a);
                assert_eq!(f.frobenius(a, n), a);
                // j reduced mod n, and iterating by hand agrees
                let mut p = a;
                for _ in 0..n {
                    p = f.square(p);
                }
                assert_eq!(p, a);
            }
        }
    }

    #[test]
    fn trace_properties() {
        for n in 1..=10 {
            let f = Field::new(n).unwrap();
            assert!(!f.trace(FieldElement::ZERO));
            assert_eq!(f.trace(FieldElement::ONE), n % 2 == 1);
            let mut ones = 0;
            for a in f.elements() {
                assert_eq!(f.trace(a), f.trace_by_definition(a));
                assert_eq!(f.trace(a), f.trace(f.square(a)));
                ones += f.trace(a) as u64;
            }
            // trace is onto F2 and balanced
            assert_eq!(ones, f.order() / 2);
        }
    }

    #[test]
    fn gf8_trace_distribution() {
        let f = Field::new(3).unwrap();
        let zeros = f.elements().filter(|&a| !f.trace(a)).count();
        assert_eq!(zeros, 4);
    }
}
