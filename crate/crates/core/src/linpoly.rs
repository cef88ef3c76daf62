//! Linearized polynomials `f(X) = Σ a_i X^{2^i}` over GF(2^n).
//!
//! Polynomials are formal: `X^{2^n}` is not identified with `X`. As maps on
//! the field two formal polynomials of q-degree `< n` agree iff they are equal.

use thiserror::Error;

use crate::f2field::{BinMatrix, BitVec, Field, FieldElement, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinPolyError {
    #[error("no q-polynomial quotient exists")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("kernel of the zero polynomial is the whole field")]
    ZeroPolynomial,
    #[error("interpolation points are F2-linearly dependent")]
    DependentPoints,
    #[error("expected {expected} interpolation points, got {got}")]
    PointCount { expected: usize, got: usize },
}

/// Coefficients `a_0, …, a_d` with `a_d != 0`; empty for the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearizedPoly {
    coeffs: Vec<FieldElement>,
}

impl LinearizedPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// The identity map `X`.
    pub fn x() -> Self {
        Self {
            coeffs: vec![FieldElement::ONE],
        }
    }

    /// `c · X^{2^i}`.
    pub fn monomial(c: FieldElement, i: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; i + 1];
        coeffs[i] = c;
        Self::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `X^{2^i}` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// q-degree; `None` for the zero polynomial.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &LinearizedPoly) -> LinearizedPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn evaluate(&self, field: &Field, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut p = x;
        for &a in &self.coeffs {
            acc += field.mul(a, p);
            p = field.square(p);
        }
        acc
    }

    /// `f ∘ g`, with `h_k = Σ_{i+j=k} f_i · g_j^{2^i}`.
    pub fn compose(&self, field: &Field, g: &LinearizedPoly) -> LinearizedPoly {
        if self.is_zero() || g.is_zero() {
            return Self::zero();
        }
        let mut h = vec![FieldElement::ZERO; self.coeffs.len() + g.coeffs.len() - 1];
        for (i, &fi) in self.coeffs.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, &gj) in g.coeffs.iter().enumerate() {
                h[i + j] += field.mul(fi, field.frobenius(gj, i as u32));
            }
        }
        Self::new(h)
    }

    /// The `n × n` F2 matrix of `x ↦ f(x)` in polynomial coordinates.
    pub fn map_matrix(&self, field: &Field) -> BinMatrix {
        let n = field.degree() as usize;
        let images: Vec<u64> = (0..n as u32)
            .map(|b| self.evaluate(field, field.monomial(b)).bits())
            .collect();
        BinMatrix::from_fn(n, n, |r, c| (images[c] >> r) & 1 == 1)
    }

    /// F2-dimension of `{x : f(x) = 0}`.
    pub fn kernel_dimension(&self, field: &Field) -> Result<usize, LinPolyError> {
        if self.is_zero() {
            return Err(LinPolyError::ZeroPolynomial);
        }
        Ok(field.degree() as usize - self.map_matrix(field).rank())
    }

    /// Returns `f` with `divisor ∘ f = self`, found by an F2-linear solve in
    /// the coefficients of `f`.
    pub fn left_divide(
        &self,
        field: &Field,
        divisor: &LinearizedPoly,
    ) -> Result<LinearizedPoly, LinPolyError> {
        let dv = divisor.q_degree().ok_or(LinPolyError::ZeroDivisor)?;
        let Some(dn) = self.q_degree() else {
            return Ok(Self::zero());
        };
        if dn < dv {
            return Err(LinPolyError::NotDivisible);
        }
        let n = field.degree() as usize;
        let df = dn - dv;
        // Unknown bit (j, b) is bit b of f_j; equation bit (k, r) is bit r of
        // coefficient k of divisor ∘ f.
        let unknowns = (df + 1) * n;
        let equations = (dn + 1) * n;
        let mut m = BinMatrix::zeros(equations, unknowns);
        for j in 0..=df {
            for b in 0..n {
                let col = j * n + b;
                let basis = field.monomial(b as u32);
                for (i, &vi) in divisor.coeffs.iter().enumerate() {
                    let term = field.mul(vi, field.frobenius(basis, i as u32)).bits();
                    for r in 0..n {
                        if (term >> r) & 1 == 1 {
                            m.set((i + j) * n + r, col, true);
                        }
                    }
                }
            }
        }
        let mut rhs = BitVec::zeros(equations);
        for (k, c) in self.coeffs.iter().enumerate() {
            for r in 0..n {
                if (c.bits() >> r) & 1 == 1 {
                    rhs.set(k * n + r, true);
                }
            }
        }
        let sol = m.solve(&rhs).map_err(|e| match e {
            SolveError::Inconsistent => LinPolyError::NotDivisible,
            SolveError::DimensionMismatch { .. } => {
                unreachable!("system built with matching shapes")
            }
        })?;
        debug_assert!(
            sol.kernel.is_empty(),
            "composition with a nonzero divisor is injective"
        );
        Ok(Self::new(unpack_coeffs(&sol.particular, df + 1, n)))
    }

    /// The unique `f` of q-degree `< k` with `f(x_i) = y_i`, where `k` is the
    /// number of points and the `x_i` are F2-linearly independent.
    pub fn interpolate(
        field: &Field,
        points: &[(FieldElement, FieldElement)],
        k: usize,
    ) -> Result<LinearizedPoly, LinPolyError> {
        if points.len() != k {
            return Err(LinPolyError::PointCount {
                expected: k,
                got: points.len(),
            });
        }
        let n = field.degree() as usize;
        let xs: Vec<BitVec> = points
            .iter()
            .map(|(x, _)| BitVec::from_u64(x.bits(), n))
            .collect();
        if BinMatrix::from_rows(&xs, n).rank() < k {
            return Err(LinPolyError::DependentPoints);
        }
        let mut m = BinMatrix::zeros(k * n, k * n);
        let mut rhs = BitVec::zeros(k * n);
        for (p, &(x, y)) in points.iter().enumerate() {
            let mut xp = x;
            for j in 0..k {
                for b in 0..n {
                    let term = field.mul(field.monomial(b as u32), xp).bits();
                    for r in 0..n {
                        if (term >> r) & 1 == 1 {
                            m.set(p * n + r, j * n + b, true);
                        }
                    }
                }
                xp = field.square(xp);
            }
            for r in 0..n {
                if (y.bits() >> r) & 1 == 1 {
                    rhs.set(p * n + r, true);
                }
            }
        }
        let sol = m.solve(&rhs).map_err(|_| LinPolyError::DependentPoints)?;
        Ok(Self::new(unpack_coeffs(&sol.particular, k, n)))
    }
}

pub(crate) fn unpack_coeffs(bits: &BitVec, count: usize, n: usize) -> Vec<FieldElement> {
    (0..count)
        .map(|j| {
            let mut c = 0u64;
            for b in 0..n {
                if bits.get(j * n + b) {
                    c |= 1 << b;
                }
            }
            FieldElement::from_bits(c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_elem(rng: &mut impl Rng, f: &Field) -> FieldElement {
        FieldElement::from_bits(rng.gen::<u64>() & (f.order() - 1))
    }

    fn rand_poly(rng: &mut impl Rng, f: &Field, len: usize) -> LinearizedPoly {
        LinearizedPoly::new((0..len).map(|_| rand_elem(rng, f)).collect())
    }

    #[test]
    fn evaluate_trivial_cases() {
        let f = Field::new(5).unwrap();
        for x in f.elements() {
            assert_eq!(LinearizedPoly::x().evaluate(&f, x), x);
            assert_eq!(LinearizedPoly::zero().evaluate(&f, x), FieldElement::ZERO);
        }
    }

    #[test]
    fn evaluation_is_f2_linear_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for n in [3, 5] {
            let f = Field::new(n).unwrap();
            for _ in 0..5 {
                let p = rand_poly(&mut rng, &f, 4);
                for x in f.elements() {
                    for y in f.elements() {
                        assert_eq!(p.evaluate(&f, x + y), p.evaluate(&f, x) + p.evaluate(&f, y));
                    }
                }
            }
        }
    }

    #[test]
    fn compose_identities() {
        let f = Field::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = rand_poly(&mut rng, &f, 3);
        assert_eq!(LinearizedPoly::x().compose(&f, &g), g);
        assert_eq!(g.compose(&f, &LinearizedPoly::x()), g);
        let sq = LinearizedPoly::monomial(FieldElement::ONE, 1);
        assert_eq!(
            sq.compose(&f, &sq),
            LinearizedPoly::monomial(FieldElement::ONE, 2)
        );
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in [3, 5] {
            let f = Field::new(n).unwrap();
            for _ in 0..50 {
                let a = rand_poly(&mut rng, &f, 3);
                let b = rand_poly(&mut rng, &f, 4);
                let c = rand_poly(&mut rng, &f, 2);
                let ab = a.compose(&f, &b);
                assert!(
                    ab.q_degree().unwrap_or(0)
                        <= a.q_degree().unwrap_or(0) + b.q_degree().unwrap_or(0)
                );
                for x in f.elements() {
                    assert_eq!(ab.evaluate(&f, x), a.evaluate(&f, b.evaluate(&f, x)));
                }
                // associativity
                assert_eq!(ab.compose(&f, &c), a.compose(&f, &b.compose(&f, &c)));
            }
        }
    }

    #[test]
    fn left_divide_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = Field::new(7).unwrap();
        for _ in 0..200 {
            let (vl, ql) = (1 + rng.gen_range(0..4), rng.gen_range(0..5));
            let v = rand_poly(&mut rng, &f, vl);
            let q = rand_poly(&mut rng, &f, ql);
            if v.is_zero() {
                continue;
            }
            let num = v.compose(&f, &q);
            assert_eq!(num.left_divide(&f, &v).unwrap(), q);
        }
        let g = rand_poly(&mut rng, &f, 3);
        assert_eq!(g.left_divide(&f, &LinearizedPoly::x()).unwrap(), g);
    }

    #[test]
    fn left_divide_failures() {
        let f = Field::new(5).unwrap();
        let x2 = LinearizedPoly::monomial(FieldElement::ONE, 1);
        assert_eq!(
            LinearizedPoly::x().left_divide(&f, &x2),
            Err(LinPolyError::NotDivisible)
        );
        assert_eq!(
            x2.left_divide(&f, &LinearizedPoly::zero()),
            Err(LinPolyError::ZeroDivisor)
        );
        // X^4 + X is not X^2 ∘ anything: X^2 ∘ g has zero X-coefficient
        let p = LinearizedPoly::new(vec![
            FieldElement::ONE,
            FieldElement::ZERO,
            FieldElement::ONE,
        ]);
        assert_eq!(p.left_divide(&f, &x2), Err(LinPolyError::NotDivisible));
    }

    #[test]
    fn kernel_dimension_small_cases() {
        let f = Field::new(5).unwrap();
        assert_eq!(LinearizedPoly::x().kernel_dimension(&f), Ok(0));
        let x2_plus_x = LinearizedPoly::new(vec![FieldElement::ONE, FieldElement::ONE]);
        assert_eq!(x2_plus_x.kernel_dimension(&f), Ok(1));
        assert_eq!(
            LinearizedPoly::zero().kernel_dimension(&f),
            Err(LinPolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn kernel_dimension_bounded_by_q_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for n in [3, 5] {
            let f = Field::new(n).unwrap();
            for _ in 0..300 {
                let len = 1 + rng.gen_range(0..n as usize);
                let p = rand_poly(&mut rng, &f, len);
                if p.is_zero() {
                    continue;
                }
                let dim = p.kernel_dimension(&f).unwrap();
                // enumeration oracle
                let roots = f
                    .elements()
                    .filter(|&x| p.evaluate(&f, x).is_zero())
                    .count();
                assert_eq!(1usize << dim, roots);
                assert!(dim <= p.q_degree().unwrap());
                // rank–nullity
                assert_eq!(dim + p.map_matrix(&f).rank(), n as usize);
            }
        }
    }

    #[test]
    fn interpolation() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let f = Field::new(7).unwrap();
        let basis: Vec<FieldElement> = (0..7).map(|i| f.monomial(i)).collect();
        let ident: Vec<_> = basis[..3].iter().map(|&b| (b, b)).collect();
        assert_eq!(
            LinearizedPoly::interpolate(&f, &ident, 3).unwrap(),
            LinearizedPoly::x()
        );
        let zeros: Vec<_> = basis[..3]
            .iter()
            .map(|&b| (b, FieldElement::ZERO))
            .collect();
        assert!(LinearizedPoly::interpolate(&f, &zeros, 3)
            .unwrap()
            .is_zero());
        for k in 1..=7 {
            let p = rand_poly(&mut rng, &f, k);
            let pts: Vec<_> = basis[..k].iter().map(|&b| (b, p.evaluate(&f, b))).collect();
            assert_eq!(LinearizedPoly::interpolate(&f, &pts, k).unwrap(), p);
        }
        let dep = vec![(basis[0], basis[0]), (basis[0], basis[1])];
        assert_eq!(
            LinearizedPoly::interpolate(&f, &dep, 2),
            Err(LinPolyError::DependentPoints)
        );
        assert!(matches!(
            LinearizedPoly::interpolate(&f, &dep, 3),
            Err(LinPolyError::PointCount { .. })
        ));
    }
}
