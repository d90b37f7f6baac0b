//! Even lattices, dual lattices, discriminant groups and the sublattice
//! calculus (intersections, orthogonal complements, quotient forms).

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::finquad::FinQuadModule;
use crate::mat::{self, Matrix};
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// An even lattice `L = Z^n` inside `V = Q^n`, described by the Gram matrix
/// of the bilinear form on the standard basis.
#[derive(Clone, Debug)]
pub struct EvenLattice {
    name: Option<String>,
    gram: IntMatrix,
    gram_rat: RatMatrix,
    signature: (usize, usize),
}

impl PartialEq for EvenLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl EvenLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        Self::with_name(gram, None)
    }

    pub fn with_name(gram: IntMatrix, name: Option<String>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::BadInput("gram matrix must be square".into()));
        }
        let n = gram.rows();
        for i in 0..n {
            for j in 0..n {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(Error::BadInput("gram matrix must be symmetric".into()));
                }
            }
            if !(&gram[(i, i)] % Int::from(2)).is_zero() {
                return Err(Error::BadInput("lattice is not even".into()));
            }
        }
        let gram_rat = gram.to_rational();
        if n > 0 && gram_rat.det()?.is_zero() {
            return Err(Error::BadInput("gram matrix is degenerate".into()));
        }
        let signature = rational_signature(&gram_rat);
        Ok(EvenLattice {
            name,
            gram,
            gram_rat,
            signature,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn gram_rat(&self) -> &RatMatrix {
        &self.gram_rat
    }

    /// Signature `(b_+, b_-)` computed by exact symmetric Gauss
    /// diagonalization.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn det(&self) -> Int {
        self.gram_rat
            .det()
            .expect("square gram matrix")
            .to_integer()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    /// `(v, w)` for column vectors in `L`-coordinates.
    pub fn pair(&self, v: &RatMatrix, w: &RatMatrix) -> Rat {
        let p = v.transpose().mul(&self.gram_rat).unwrap().mul(w).unwrap();
        p[(0, 0)].clone()
    }

    /// The full lattice `L` as a sublattice of itself.
    pub fn full(self: &Arc<Self>) -> Sublattice {
        Sublattice::new(self, RatMatrix::identity(self.dim())).expect("identity basis")
    }

    /// The dual lattice `L* = {v : (v, L) <= Z}`, spanned by the columns of
    /// the inverse Gram matrix.
    pub fn dual(self: &Arc<Self>) -> Sublattice {
        let basis = self
            .gram_rat
            .inverse()
            .expect("non-degenerate gram matrix");
        Sublattice::new(self, basis).expect("dual basis has full rank")
    }

    /// The discriminant group `L*/L` with its `Q/Z`-valued forms.
    pub fn discriminant_group(self: &Arc<Self>) -> FinQuadModule {
        let dual = self.dual();
        FinQuadModule::quotient(
            &self.gram_rat,
            dual.basis(),
            &RatMatrix::identity(self.dim()),
        )
        .expect("L is a finite-index sublattice of L*")
    }
}

/// Exact signature of a non-degenerate symmetric rational matrix via
/// symmetric Gauss diagonalization (no eigenvalues).
pub fn rational_signature(g: &RatMatrix) -> (usize, usize) {
    let n = g.rows();
    let mut a = g.clone();
    let mut pos = 0;
    let mut neg = 0;
    let mut live: Vec<usize> = (0..n).collect();
    while !live.is_empty() {
        // Prefer a non-zero diagonal entry as pivot.
        let p = match live.iter().copied().find(|&i| !a[(i, i)].is_zero()) {
            Some(p) => p,
            None => {
                // All remaining diagonal entries vanish; find a_ij != 0 and
                // replace e_i by e_i + e_j, making the diagonal entry 2 a_ij.
                let mut found = None;
                'search: for &i in &live {
                    for &j in &live {
                        if i != j && !a[(i, j)].is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                let Some((i, j)) = found else { break };
                for k in 0..n {
                    let s = a[(j, k)].clone();
                    a[(i, k)] = a[(i, k)].clone() + s;
                }
                for k in 0..n {
                    let s = a[(k, j)].clone();
                    a[(k, i)] = a[(k, i)].clone() + s;
                }
                i
            }
        };
        let d = a[(p, p)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        // Clear row and column p against the pivot.
        for &k in &live {
            if k != p && !a[(k, p)].is_zero() {
                let f = a[(k, p)].clone() / d.clone();
                for l in 0..n {
                    let s = a[(p, l)].clone() * f.clone();
                    a[(k, l)] = a[(k, l)].clone() - s;
                }
            }
        }
        for k in 0..n {
            if k != p {
                a[(p, k)] = Rat::zero();
                a[(k, p)] = Rat::zero();
            }
        }
        live.retain(|&i| i != p);
    }
    (pos, neg)
}

/// A finite-rank subgroup of `V = Q^n`, stored in canonical Hermite-reduced
/// form so that equality of sublattices is equality of representations.
#[derive(Clone, Debug, PartialEq)]
pub struct Sublattice {
    ambient: Arc<EvenLattice>,
    basis: RatMatrix,
}

impl Sublattice {
    /// Wraps a generating set (columns); the stored basis is the canonical
    /// Hermite form of the generated lattice. Rejects generating sets whose
    /// span has lower rank than the column count only when `strict_rank`
    /// callers require it; a basis is recomputed canonically regardless.
    pub fn new(ambient: &Arc<EvenLattice>, generators: RatMatrix) -> Result<Self> {
        if generators.rows() != ambient.dim() {
            return Err(Error::ShapeMismatch(
                "generator rows must match the ambient dimension".into(),
            ));
        }
        let basis = generators.lattice_canonical();
        Ok(Sublattice {
            ambient: Arc::clone(ambient),
            basis,
        })
    }

    pub fn ambient(&self) -> &Arc<EvenLattice> {
        &self.ambient
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn same_ambient(&self, other: &Sublattice) -> bool {
        self.ambient.as_ref() == other.ambient.as_ref()
    }

    /// Rational coordinates of `v` in this basis, if `v` lies in the span.
    pub fn span_coords(&self, v: &RatMatrix) -> Option<RatMatrix> {
        self.basis.solve(v).ok()
    }

    /// Integer coordinates, if `v` lies in the lattice itself.
    pub fn coords(&self, v: &RatMatrix) -> Option<IntMatrix> {
        self.span_coords(v)?.to_integer()
    }

    pub fn contains(&self, v: &RatMatrix) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        self.basis.solve(&other.basis).ok().is_some_and(|c| c.is_integral())
    }

    /// Index `[self : other]` for a finite-index sublattice `other`.
    pub fn index_of(&self, other: &Sublattice) -> Result<Int> {
        let c = self.basis.solve(&other.basis).map_err(|_| {
            Error::Precondition("index of a non-contained lattice".into())
        })?;
        if c.rows() != c.cols() {
            return Err(Error::Precondition("index is infinite".into()));
        }
        let d = c.det()?.abs();
        if !d.is_integer() || d.is_zero() {
            return Err(Error::Precondition("not a finite-index sublattice".into()));
        }
        Ok(d.to_integer())
    }

    /// Pairing matrix `basis(self)^T G basis(other)`.
    pub fn pairing_matrix(&self, other: &Sublattice) -> RatMatrix {
        self.basis
            .transpose()
            .mul(self.ambient.gram_rat())
            .unwrap()
            .mul(other.basis())
            .unwrap()
    }

    /// True iff the bilinear form vanishes identically on this sublattice.
    pub fn is_isotropic(&self) -> bool {
        self.pairing_matrix(self).is_zero()
    }

    /// True iff the lattice is integral (contained in `L`) and equal to its
    /// saturation in `L`.
    pub fn is_primitive(&self) -> Result<bool> {
        let Some(b) = self.basis.to_integer() else {
            return Ok(false);
        };
        if self.rank() == 0 {
            return Ok(true);
        }
        Ok(b.invariant_factors().iter().all(One::is_one))
    }

    /// Saturation inside `Z^n` (primitive closure of the rational span).
    pub fn saturation(&self) -> Result<Sublattice> {
        let (_, b) = self.basis.clear_denominators();
        let sat = b.saturation()?;
        Sublattice::new(&self.ambient, sat.to_rational())
    }

    /// Exact intersection of two sublattices of the same ambient lattice.
    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice> {
        if !self.same_ambient(other) {
            return Err(Error::Precondition("intersect: different ambients".into()));
        }
        let d = self
            .basis
            .denominator_lcm()
            .lcm(&other.basis.denominator_lcm());
        let scale = Rat::from_integer(d);
        let a = self.basis.scale(&scale).to_integer().unwrap();
        let b = other.basis.scale(&scale).to_integer().unwrap();
        let stacked = a.hstack(&b)?;
        let ker = stacked.kernel();
        let x = ker.col_range(0, ker.cols());
        let xa = Matrix::from_fn(a.cols(), x.cols(), |i, j| x[(i, j)].clone());
        let inter = a.mul(&xa)?;
        Sublattice::new(
            &self.ambient,
            inter.to_rational().scale(&Rat::new(Int::one(), scale_to_int(&scale))),
        )
    }

    /// `{m in M : (m, self) = 0}` for `M = within`.
    pub fn perp_in(&self, within: &Sublattice) -> Result<Sublattice> {
        if !self.same_ambient(within) {
            return Err(Error::Precondition("perp_in: different ambients".into()));
        }
        let a = self.pairing_matrix(within);
        let x = a.integer_kernel();
        let basis = within.basis().mul(&x.to_rational())?;
        Sublattice::new(&self.ambient, basis)
    }

    /// Sum of two sublattices (lattice generated by both).
    pub fn sum(&self, other: &Sublattice) -> Result<Sublattice> {
        if !self.same_ambient(other) {
            return Err(Error::Precondition("sum: different ambients".into()));
        }
        Sublattice::new(&self.ambient, mat::lattice_sum(&self.basis, other.basis())?)
    }

    /// `{v in span_Q(self) : (v, constraints) <= Z}`: all vectors of the
    /// rational span pairing integrally with every constraint column. The
    /// pairing must have full rank on the span, otherwise the set is not a
    /// lattice.
    pub fn span_integral_pairing(&self, constraints: &RatMatrix) -> Result<Sublattice> {
        // v = basis * x, x rational, with (constraints^T G basis) x integral:
        // x runs over the standard dual of the lattice spanned by the rows
        // of the pairing matrix.
        let a = constraints
            .transpose()
            .mul(self.ambient.gram_rat())?
            .mul(&self.basis)?;
        let rows = a.transpose().lattice_canonical();
        if rows.cols() != self.rank() {
            return Err(Error::RankDeficient(
                "pairing constraints do not pin down the span".into(),
            ));
        }
        let dual = rows
            .transpose()
            .inverse()
            .map_err(|_| Error::RankDeficient("degenerate pairing constraints".into()))?;
        Sublattice::new(&self.ambient, self.basis.mul(&dual)?)
    }

    /// `{v in self : (v, constraints) <= Z}`: the finite-index sublattice of
    /// `self` pairing integrally with every constraint column.
    pub fn sublattice_integral_pairing(&self, constraints: &RatMatrix) -> Result<Sublattice> {
        let a = constraints
            .transpose()
            .mul(self.ambient.gram_rat())?
            .mul(&self.basis)?;
        let x = integral_preimage(&a);
        Sublattice::new(&self.ambient, self.basis.mul(&x.to_rational())?)
    }

    /// The dual of this lattice taken inside its own rational span.
    pub fn dual_in_span(&self) -> Result<Sublattice> {
        let g = self.pairing_matrix(self);
        let ginv = g
            .inverse()
            .map_err(|_| Error::Precondition("degenerate restricted form".into()))?;
        Sublattice::new(&self.ambient, self.basis.mul(&ginv)?)
    }
}

fn scale_to_int(r: &Rat) -> Int {
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// Lattice `{x in Z^k : a x in Z^s}` for a rational matrix `a`, returned as
/// an integer basis (columns). Contains `d Z^k` for `d` the denominator lcm.
pub fn integral_preimage(a: &RatMatrix) -> IntMatrix {
    let (d, m) = a.clear_denominators();
    if m.rows() == 0 {
        return IntMatrix::identity(a.cols());
    }
    // m x = 0 (mod d): x-part of the integer kernel of [m | d I].
    let di = IntMatrix::identity(m.rows()).map(|x| x * d.clone());
    let stacked = m.hstack(&di).expect("row counts match");
    let ker = stacked.kernel();
    let x = Matrix::from_fn(a.cols(), ker.cols(), |i, j| ker[(i, j)].clone());
    mat::col_canonical(&x)
}

/// The induced even lattice on `iperp/i` together with the canonical
/// section of coset representatives.
///
/// Requires `i <= iperp`, `i` isotropic, and `i` perpendicular to all of
/// `iperp` (so the form descends to the quotient). Representatives are the
/// canonical-basis columns of `iperp` away from the Hermite pivot columns
/// of `i`.
pub fn quotient_form(iperp: &Sublattice, i: &Sublattice) -> Result<(EvenLattice, RatMatrix)> {
    if !i.same_ambient(iperp) {
        return Err(Error::Precondition("quotient_form: different ambients".into()));
    }
    if !i.is_isotropic() {
        return Err(Error::NotIsotropic);
    }
    if !i.pairing_matrix(iperp).is_zero() {
        return Err(Error::Precondition(
            "isotropic part is not in the radical of the restricted form".into(),
        ));
    }
    let coords = iperp
        .basis()
        .solve(i.basis())
        .map_err(|_| Error::Precondition("i is not contained in iperp".into()))?;
    let coords = coords
        .to_integer()
        .ok_or_else(|| Error::Precondition("i is not a sublattice of iperp".into()))?;
    let (h, _) = coords.transpose().hnf();
    // Pivot columns of the row-Hermite form; all pivots must be 1, which is
    // exactly primitivity of i inside iperp.
    let mut pivots = Vec::new();
    for r in 0..h.rows() {
        if let Some(p) = (0..h.cols()).find(|&j| !h[(r, j)].is_zero()) {
            if !h[(r, p)].is_one() {
                return Err(Error::NotPrimitive);
            }
            pivots.push(p);
        }
    }
    if pivots.len() != i.rank() {
        return Err(Error::RankDeficient("quotient_form isotropic part".into()));
    }
    let free: Vec<usize> = (0..iperp.rank()).filter(|j| !pivots.contains(j)).collect();
    let section = Matrix::from_fn(iperp.basis().rows(), free.len(), |r, c| {
        iperp.basis()[(r, free[c])].clone()
    });
    let gram = section
        .transpose()
        .mul(iperp.ambient().gram_rat())?
        .mul(&section)?;
    let gram = gram
        .to_integer()
        .ok_or_else(|| Error::Internal("quotient form is not integral".into()))?;
    let lambda = EvenLattice::new(gram)
        .map_err(|e| Error::Precondition(format!("quotient form is not even/non-degenerate: {e}")))?;
    Ok((lambda, section))
}

/// Data attached to the isotropic subgroup `H_I = (L + I_{L*})/L` of the
/// discriminant group, with its consistency checks.
#[derive(Clone, Debug)]
pub struct HiData {
    pub h_i: FinQuadModule,
    /// `[I_{L*} : I]`.
    pub index_ilstar_over_i: Int,
    /// `[L* : L*_I]`.
    pub index_lstar_over_lstar_i: Int,
    pub lambda: EvenLattice,
    pub delta_lambda_invariants: Vec<Int>,
    pub hperp_mod_h_invariants: Vec<Int>,
}

/// Computes `H_I` for a primitive isotropic sublattice `i` and verifies the
/// structural identities tying it to the discriminant groups.
pub fn h_i_data(lattice: &Arc<EvenLattice>, i: &Sublattice) -> Result<HiData> {
    if !i.is_primitive()? {
        return Err(Error::NotPrimitive);
    }
    if !i.is_isotropic() {
        return Err(Error::NotIsotropic);
    }
    let full = lattice.full();
    let dual = lattice.dual();

    // I_{L*} = U cap L*: vectors of the span of I pairing integrally with L.
    let i_lstar = i.span_integral_pairing(&RatMatrix::identity(lattice.dim()))?;
    let index_ilstar_over_i = i_lstar.index_of(i)?;

    // H_I = (L + I_{L*})/L.
    let num = full.sum(&i_lstar)?;
    let h_i = FinQuadModule::quotient(lattice.gram_rat(), num.basis(), &RatMatrix::identity(lattice.dim()))?;
    if h_i.order() != index_ilstar_over_i {
        return Err(Error::Internal("|H_I| != [I_{L*} : I]".into()));
    }
    for e in h_i.elements() {
        if !h_i.q(&e).is_zero() {
            return Err(Error::Internal("H_I is not isotropic for q".into()));
        }
    }

    // Lambda = I^perp_L / I.
    let iperp_l = i.perp_in(&full)?;
    let (lambda, _) = quotient_form(&iperp_l, i)?;
    let lambda_arc = Arc::new(lambda.clone());
    let delta_lambda_invariants = lambda_arc.discriminant_group().invariants().to_vec();

    // H_I^perp / H_I, computed on numerator lattices inside V.
    let hperp_num = dual.sublattice_integral_pairing(i_lstar.basis())?;
    let hperp_mod_h = FinQuadModule::quotient(lattice.gram_rat(), hperp_num.basis(), num.basis())?;
    let hperp_mod_h_invariants = hperp_mod_h.invariants().to_vec();
    if hperp_mod_h_invariants != delta_lambda_invariants {
        return Err(Error::Internal(
            "H_I^perp/H_I does not match Lambda*/Lambda".into(),
        ));
    }

    // L*_I = L + I^perp_{L*}, and [L* : L*_I] = |H_I|.
    let iperp_lstar = i.perp_in(&dual)?;
    let lstar_i = full.sum(&iperp_lstar)?;
    let index_lstar_over_lstar_i = dual.index_of(&lstar_i)?;
    if index_lstar_over_lstar_i != h_i.order() {
        return Err(Error::Internal("[L* : L*_I] != |H_I|".into()));
    }

    Ok(HiData {
        h_i,
        index_ilstar_over_i,
        index_lstar_over_lstar_i,
        lambda,
        delta_lambda_invariants,
        hperp_mod_h_invariants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rv(v: Vec<i64>) -> RatMatrix {
        RatMatrix::from_fn(v.len(), 1, |i, _| Rat::from_integer(Int::from(v[i])))
    }

    #[test]
    fn dual_of_unimodular_is_l() {
        let h = fixtures::by_name("fix-h").unwrap();
        let dual = h.dual();
        assert_eq!(dual.basis(), &RatMatrix::identity(2));
        assert!(h.discriminant_group().is_trivial());
    }

    #[test]
    fn dual_of_a1() {
        let a1 = Arc::new(EvenLattice::new(IntMatrix::from_rows(vec![vec![Int::from(2)]]).unwrap()).unwrap());
        let dual = a1.dual();
        assert_eq!(dual.basis()[(0, 0)], Rat::new(Int::one(), Int::from(2)));
        let disc = a1.discriminant_group();
        assert_eq!(disc.invariants(), &[Int::from(2)]);
        assert_eq!(disc.q(&disc.generator(0)), Rat::new(Int::one(), Int::from(4)));
    }

    #[test]
    fn dual_of_g3_matches_inverse_gram() {
        let g3 = fixtures::by_name("fix-g3").unwrap();
        let dual = g3.dual();
        let inv = g3.gram_rat().inverse().unwrap();
        // Same lattice as the exact inverse columns.
        assert_eq!(dual.basis(), &inv.lattice_canonical());
        assert!(dual.contains_lattice(&g3.full()));
        let disc = g3.discriminant_group();
        assert_eq!(disc.order(), Int::from(8));
        assert_eq!(g3.full().index_of(&g3.full()).unwrap(), Int::one());
        assert_eq!(dual.index_of(&g3.full()).unwrap(), Int::from(8));
    }

    #[test]
    fn signatures() {
        assert_eq!(fixtures::by_name("fix-h").unwrap().signature(), (1, 1));
        assert_eq!(fixtures::by_name("fix-g3").unwrap().signature(), (2, 1));
        assert_eq!(fixtures::by_name("fix-l5").unwrap().signature(), (3, 2));
        assert_eq!(fixtures::by_name("fix-l5b").unwrap().signature(), (3, 2));
        assert_eq!(fixtures::by_name("fix-l7").unwrap().signature(), (4, 2));
        assert_eq!(fixtures::by_name("fix-g5").unwrap().signature(), (3, 2));
    }

    #[test]
    fn isotropy_checks() {
        let h = fixtures::by_name("fix-h").unwrap();
        let e1 = Sublattice::new(&h, rv(vec![1, 0])).unwrap();
        assert!(e1.is_isotropic());
        let diag = Sublattice::new(&h, rv(vec![1, 1])).unwrap();
        assert!(!diag.is_isotropic());
        let zero = Sublattice::new(&h, RatMatrix::zero(2, 0)).unwrap();
        assert!(zero.is_isotropic());
    }

    #[test]
    fn perp_in_h_and_g3() {
        let h = fixtures::by_name("fix-h").unwrap();
        let e1 = Sublattice::new(&h, rv(vec![1, 0])).unwrap();
        let perp = e1.perp_in(&h.full()).unwrap();
        assert_eq!(perp.rank(), 1);
        assert!(perp.contains(&rv(vec![1, 0])));

        let g3 = fixtures::by_name("fix-g3").unwrap();
        let v1 = Sublattice::new(&g3, rv(vec![1, 0, 0])).unwrap();
        let perp = v1.perp_in(&g3.full()).unwrap();
        assert_eq!(perp.rank(), 2);
        assert!(perp.contains(&rv(vec![1, 0, 0])));
        assert!(perp.contains(&rv(vec![0, 0, 1])));
        assert!(!perp.contains(&rv(vec![0, 1, 0])));
    }

    #[test]
    fn intersection_in_g3() {
        // U = Q v1: L* cap U is generated by v1/2 while L cap U is Z v1.
        let g3 = fixtures::by_name("fix-g3").unwrap();
        let v1 = Sublattice::new(&g3, rv(vec![1, 0, 0])).unwrap();
        let i_lstar = v1
            .span_integral_pairing(&RatMatrix::identity(3))
            .unwrap();
        let half = RatMatrix::from_fn(3, 1, |i, _| {
            if i == 0 {
                Rat::new(Int::one(), Int::from(2))
            } else {
                Rat::zero()
            }
        });
        assert!(i_lstar.contains(&half));
        assert_eq!(i_lstar.index_of(&v1).unwrap(), Int::from(2));

        let inter = i_lstar.intersect(&g3.full()).unwrap();
        assert_eq!(inter.basis(), v1.basis());
    }

    #[test]
    fn quotient_forms_on_fixtures() {
        // FIX-L5 with I = span(e1, e3): Lambda = A1.
        let l5 = fixtures::by_name("fix-l5").unwrap();
        let i = fixtures::standard_isotropic(&l5).unwrap();
        let iperp = i.perp_in(&l5.full()).unwrap();
        let (lambda, section) = quotient_form(&iperp, &i).unwrap();
        assert_eq!(lambda.gram(), &IntMatrix::from_rows(vec![vec![Int::from(2)]]).unwrap());
        assert_eq!(section.cols(), 1);

        // FIX-G3 with I = span(v1): Lambda = A1 via v3.
        let g3 = fixtures::by_name("fix-g3").unwrap();
        let i = fixtures::standard_isotropic(&g3).unwrap();
        let iperp = i.perp_in(&g3.full()).unwrap();
        let (lambda, _) = quotient_form(&iperp, &i).unwrap();
        assert_eq!(lambda.gram(), &IntMatrix::from_rows(vec![vec![Int::from(2)]]).unwrap());

        // FIX-H with I = span(e1): Lambda has rank 0.
        let h = fixtures::by_name("fix-h").unwrap();
        let i = fixtures::standard_isotropic(&h).unwrap();
        let iperp = i.perp_in(&h.full()).unwrap();
        let (lambda, _) = quotient_form(&iperp, &i).unwrap();
        assert_eq!(lambda.dim(), 0);
    }

    #[test]
    fn quotient_form_rejects_bad_inputs() {
        let h = fixtures::by_name("fix-h").unwrap();
        let diag = Sublattice::new(&h, rv(vec![1, 1])).unwrap();
        let full = h.full();
        assert!(matches!(
            quotient_form(&full, &diag),
            Err(Error::NotIsotropic)
        ));
    }

    #[test]
    fn h_i_on_fixtures() {
        // FIX-L5: unimodular hyperbolic blocks give trivial H_I.
        let l5 = fixtures::by_name("fix-l5").unwrap();
        let i = fixtures::standard_isotropic(&l5).unwrap();
        let data = h_i_data(&l5, &i).unwrap();
        assert!(data.h_i.is_trivial());
        assert_eq!(data.index_ilstar_over_i, Int::one());

        // FIX-G3: |H_I| = 2.
        let g3 = fixtures::by_name("fix-g3").unwrap();
        let i = fixtures::standard_isotropic(&g3).unwrap();
        let data = h_i_data(&g3, &i).unwrap();
        assert_eq!(data.h_i.order(), Int::from(2));
        assert_eq!(data.index_lstar_over_lstar_i, Int::from(2));

        // |Delta_Lambda| * |H_I|^2 = |Delta_L| across fixtures.
        for name in fixtures::NAMES {
            let l = fixtures::by_name(name).unwrap();
            let Some(i) = fixtures::standard_isotropic(&l) else {
                continue;
            };
            let data = h_i_data(&l, &i).unwrap();
            let delta_l = l.discriminant_group().order();
            let delta_lambda: Int = data.delta_lambda_invariants.iter().product();
            let h = data.h_i.order();
            assert_eq!(delta_lambda * &h * &h, delta_l, "fixture {name}");
        }
    }

    #[test]
    fn saturation_and_primitivity() {
        let g3 = fixtures::by_name("fix-g3").unwrap();
        let two_v1 = Sublattice::new(&g3, rv(vec![2, 0, 0])).unwrap();
        assert!(!two_v1.is_primitive().unwrap());
        let sat = two_v1.saturation().unwrap();
        assert!(sat.contains(&rv(vec![1, 0, 0])));
        assert!(sat.is_primitive().unwrap());
    }
}
