//! Normal bases `[α, α², …, α^{2^{n-1}}]` and coordinates with respect to them.

use std::sync::Arc;

use super::gf2n::{Field, FieldElement, FieldError};
use super::matrix::{BinMatrix, BitVec};

/// A normal basis of GF(2^n) over F2.
///
/// `elements[i] = α^{2^i}`. Coordinates of a field element in this basis are
/// returned as an `n`-bit word whose bit `i` is the coefficient of
/// `elements[i]`.
#[derive(Debug, Clone)]
pub struct NormalBasis {
    field: Arc<Field>,
    alpha: FieldElement,
    elements: Vec<FieldElement>,
    self_dual: bool,
    // Row i: polynomial-basis mask whose parity against `a` gives coordinate i.
    to_coords: Vec<u64>,
}

impl NormalBasis {
    /// Normal basis generated by `alpha`; fails if its conjugates are dependent.
    pub fn new(field: Arc<Field>, alpha: FieldElement) -> Result<Self, FieldError> {
        let n = field.degree() as usize;
        if !field.contains(alpha) {
            return Err(FieldError::OutOfRange {
                n: n as u32,
                value: alpha.bits(),
            });
        }
        let elements: Vec<FieldElement> =
            (0..n as u32).map(|i| field.frobenius(alpha, i)).collect();
        // change of basis: column i = elements[i] in polynomial coordinates
        let m = BinMatrix::from_fn(n, n, |r, c| (elements[c].bits() >> r) & 1 == 1);
        let inv = m.inverse().ok_or_else(|| {
            FieldError::Unsupported(format!("{alpha} does not generate a normal basis"))
        })?;
        let to_coords = (0..n).map(|r| inv.row(r).to_u64()).collect();
        let self_dual = (0..n)
            .all(|i| (0..n).all(|j| field.trace(field.mul(elements[i], elements[j])) == (i == j)));
        Ok(Self {
            field,
            alpha,
            elements,
            self_dual,
            to_coords,
        })
    }

    /// Lowest element (in coefficient order) generating a self-dual normal basis.
    ///
    /// Only odd degrees are accepted.
    pub fn find_self_dual(field: Arc<Field>) -> Result<Self, FieldError> {
        let n = field.degree();
        if n.is_multiple_of(2) {
            return Err(FieldError::Unsupported(format!(
                "self-dual normal basis search requires odd degree, got {n}"
            )));
        }
        let alpha = field
            .elements()
            .skip(1)
            .find(|&a| gram_is_identity(&field, a))
            .ok_or_else(|| {
                FieldError::Unsupported(format!("no self-dual normal basis for n = {n}"))
            })?;
        Self::new(field, alpha)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.elements.len()
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    /// `α^{2^i}` with the exponent index taken mod n.
    pub fn element(&self, i: usize) -> FieldElement {
        self.elements[i % self.elements.len()]
    }

    pub fn is_self_dual(&self) -> bool {
        self.self_dual
    }

    /// The Gram matrix `[Tr(α^{2^i} α^{2^j})]`.
    pub fn gram_matrix(&self) -> BinMatrix {
        let n = self.degree();
        BinMatrix::from_fn(n, n, |i, j| {
            self.field
                .trace(self.field.mul(self.elements[i], self.elements[j]))
        })
    }

    /// Coordinates of `a` as an `n`-bit word.
    #[inline]
    pub fn coords(&self, a: FieldElement) -> u64 {
        let mut c = 0u64;
        for (i, &row) in self.to_coords.iter().enumerate() {
            c |= (((a.bits() & row).count_ones() & 1) as u64) << i;
        }
        c
    }

    /// Inverse of [`coords`](Self::coords).
    #[inline]
    pub fn from_coords(&self, c: u64) -> FieldElement {
        let mut a = FieldElement::ZERO;
        let mut c = c;
        while c != 0 {
            let i = c.trailing_zeros() as usize;
            a += self.elements[i];
            c &= c - 1;
        }
        a
    }

    pub fn element_to_column(&self, a: FieldElement) -> BitVec {
        BitVec::from_u64(self.coords(a), self.degree())
    }

    pub fn column_to_element(&self, column: &BitVec) -> FieldElement {
        assert_eq!(
            column.len(),
            self.degree(),
            "column length must equal the degree"
        );
        self.from_coords(column.to_u64())
    }
}

fn gram_is_identity(field: &Field, alpha: FieldElement) -> bool {
    let n = field.degree();
    let conj: Vec<FieldElement> = (0..n).map(|i| field.frobenius(alpha, i)).collect();
    // Tr(α^{2^i} α^{2^j}) depends only on j - i mod n, so one row suffices.
    (0..n as usize).all(|d| field.trace(field.mul(conj[0], conj[d])) == (d == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: u32) -> NormalBasis {
        NormalBasis::find_self_dual(Arc::new(Field::new(n).unwrap())).unwrap()
    }

    #[test]
    fn gf8_exhaustive_search() {
        let field = Arc::new(Field::new(3).unwrap());
        // Oracle: enumerate every nonzero element and check all 9 conditions directly.
        let expected = field
            .elements()
            .skip(1)
            .find(|&a| {
                let c: Vec<_> = (0..3).map(|i| field.frobenius(a, i)).collect();
                (0..3).all(|i| (0..3).all(|j| field.trace(field.mul(c[i], c[j])) == (i == j)))
            })
            .unwrap();
        let b = NormalBasis::find_self_dual(field).unwrap();
        assert_eq!(b.alpha(), expected);
        assert!(b.is_self_dual());
        assert_eq!(b.gram_matrix(), BinMatrix::identity(3));
    }

    #[test]
    fn odd_degrees_have_self_dual_bases() {
        for n in [1, 3, 5, 7, 9, 11, 13] {
            let b = basis(n);
            assert!(b.is_self_dual());
            assert_eq!(b.gram_matrix(), BinMatrix::identity(n as usize), "n = {n}");
            // basis columns are independent
            let cols: Vec<BitVec> = b
                .elements()
                .iter()
                .map(|&e| BitVec::from_u64(e.bits(), n as usize))
                .collect();
            assert_eq!(
                BinMatrix::from_columns(&cols, n as usize).rank(),
                n as usize
            );
        }
    }

    #[test]
    fn even_degree_rejected() {
        let field = Arc::new(Field::new(4).unwrap());
        assert!(matches!(
            NormalBasis::find_self_dual(field),
            Err(FieldError::Unsupported(_))
        ));
    }

    #[test]
    fn search_is_deterministic() {
        assert_eq!(basis(7).alpha(), basis(7).alpha());
    }

    #[test]
    fn columns_round_trip() {
        let b = basis(3);
        let field = b.field().clone();
        assert_eq!(b.element_to_column(b.alpha()), BitVec::unit(3, 0));
        assert!(b.element_to_column(FieldElement::ZERO).is_zero());
        for a in field.elements() {
            assert_eq!(b.column_to_element(&b.element_to_column(a)), a);
        }
        let b = basis(9);
        for a in b.field().elements() {
            assert_eq!(b.from_coords(b.coords(a)), a);
        }
    }

    #[test]
    fn self_dual_coordinates_are_traces() {
        // With a self-dual basis, coordinate i of a equals Tr(a · α^{2^i}).
        let b = basis(7);
        let field = b.field().clone();
        for a in field.elements() {
            let c = b.coords(a);
            for i in 0..7 {
                assert_eq!(
                    (c >> i) & 1 == 1,
                    field.trace(field.mul(a, b.elements()[i]))
                );
            }
        }
    }

    #[test]
    fn non_self_dual_normal_basis() {
        // GF(16) has normal bases, none of them self-dual.
        let field = Arc::new(Field::new(4).unwrap());
        let found: Vec<_> = field
            .elements()
            .filter_map(|a| NormalBasis::new(field.clone(), a).ok())
            .collect();
        assert!(!found.is_empty());
        assert!(found.iter().all(|b| !b.is_self_dual()));
        for b in &found {
            for a in field.elements() {
                assert_eq!(b.from_coords(b.coords(a)), a);
            }
        }
        let gf8 = Arc::new(Field::new(3).unwrap());
        assert!(NormalBasis::new(gf8.clone(), FieldElement::ZERO).is_err());
        assert!(NormalBasis::new(gf8, FieldElement::ONE).is_err());
    }
}
