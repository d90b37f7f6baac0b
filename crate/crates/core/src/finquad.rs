//! Finite abelian groups with `Q/Z`-valued bilinear and quadratic forms,
//! presented as quotients of one lattice by another inside a fixed ambient
//! quadratic space.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::mat::Matrix;
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// Element of a [`FinQuadModule`], stored as an exponent vector against the
/// module generators, each entry reduced modulo its invariant factor.
pub type FqmElement = Vec<Int>;

/// Finite abelian group `N/D` for lattices `D <= N` of equal rank, carrying
/// the `Q/Z` bilinear and quadratic forms induced by an ambient Gram matrix.
#[derive(Clone, Debug)]
pub struct FinQuadModule {
    /// Gram matrix of the ambient space, for form evaluation.
    gram: RatMatrix,
    /// Basis of the numerator lattice (columns, ambient coordinates).
    num: RatMatrix,
    /// Row transform of the Smith form of the denominator inside `num`.
    to_quot: IntMatrix,
    /// Full diagonal of the Smith form.
    diag: Vec<Int>,
    /// Positions with invariant factor > 1.
    live: Vec<usize>,
    /// Invariant factors d_1 | d_2 | ... (each > 1).
    invariants: Vec<Int>,
    /// Generator lifts (columns, ambient coordinates), one per invariant.
    gens: RatMatrix,
}

impl FinQuadModule {
    /// Quotient `num / den`. Requires `den` to be a finite-index sublattice
    /// of `num`.
    pub fn quotient(gram: &RatMatrix, num: &RatMatrix, den: &RatMatrix) -> Result<Self> {
        let k = num.cols();
        if den.cols() != k {
            return Err(Error::Precondition(
                "quotient of lattices of different ranks is not finite".into(),
            ));
        }
        let coords = num.solve(den).map_err(|_| {
            Error::Precondition("denominator lattice is not contained in the numerator".into())
        })?;
        let coords = coords
            .to_integer()
            .ok_or_else(|| Error::Precondition("denominator is not a sublattice".into()))?;
        if k > 0 && coords.to_rational().det()?.is_zero() {
            return Err(Error::Precondition("quotient is infinite".into()));
        }
        let (d, u, _) = coords.snf();
        let uinv = u
            .to_rational()
            .inverse()
            .map_err(|_| Error::Internal("snf transform must be invertible".into()))?;
        let all_gens = num.mul(&uinv)?;
        let diag: Vec<Int> = (0..k).map(|i| d[(i, i)].clone()).collect();
        let live: Vec<usize> = (0..k).filter(|&i| diag[i] > Int::one()).collect();
        let invariants: Vec<Int> = live.iter().map(|&i| diag[i].clone()).collect();
        let gens = Matrix::from_fn(num.rows(), live.len(), |r, c| all_gens[(r, live[c])].clone());
        Ok(FinQuadModule {
            gram: gram.clone(),
            num: num.clone(),
            to_quot: u,
            diag,
            live,
            invariants,
            gens,
        })
    }

    pub fn invariants(&self) -> &[Int] {
        &self.invariants
    }

    pub fn num_gens(&self) -> usize {
        self.invariants.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn order(&self) -> Int {
        self.invariants.iter().product()
    }

    /// Generator lifts as columns in ambient coordinates.
    pub fn generator_lifts(&self) -> &RatMatrix {
        &self.gens
    }

    pub fn zero(&self) -> FqmElement {
        vec![Int::zero(); self.invariants.len()]
    }

    pub fn generator(&self, i: usize) -> FqmElement {
        let mut e = self.zero();
        e[i] = Int::one();
        e
    }

    pub fn reduce(&self, e: &[Int]) -> FqmElement {
        e.iter()
            .zip(&self.invariants)
            .map(|(x, d)| x.mod_floor(d))
            .collect()
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> FqmElement {
        self.reduce(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: &[Int]) -> FqmElement {
        self.reduce(&a.iter().map(|x| -x).collect::<Vec<_>>())
    }

    pub fn sub(&self, a: &[Int], b: &[Int]) -> FqmElement {
        self.reduce(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
    }

    pub fn smul(&self, c: &Int, a: &[Int]) -> FqmElement {
        self.reduce(&a.iter().map(|x| c * x).collect::<Vec<_>>())
    }

    pub fn is_zero_elt(&self, a: &[Int]) -> bool {
        self.reduce(a).iter().all(Zero::is_zero)
    }

    /// Class of an ambient vector; `None` when the vector does not lie in
    /// the numerator lattice.
    pub fn class_of(&self, v: &RatMatrix) -> Option<FqmElement> {
        let x = self.num.solve(v).ok()?;
        let x = x.to_integer()?;
        let y = self.to_quot.mul(&x).ok()?;
        Some(
            self.live
                .iter()
                .map(|&i| y[(i, 0)].mod_floor(&self.diag[i]))
                .collect(),
        )
    }

    /// A lift of the class to the numerator lattice (ambient coordinates).
    pub fn lift(&self, e: &[Int]) -> RatMatrix {
        let col = Matrix::from_fn(e.len(), 1, |i, _| Rat::from_integer(e[i].clone()));
        self.gens
            .mul(&col)
            .expect("generator matrix shape matches exponent vector")
    }

    /// Bilinear form value in `[0, 1)`.
    pub fn bilinear(&self, a: &[Int], b: &[Int]) -> Rat {
        let la = self.lift(a);
        let lb = self.lift(b);
        let v = la.transpose().mul(&self.gram).unwrap().mul(&lb).unwrap();
        frac(&v[(0, 0)])
    }

    /// Quadratic form value `q(a) = a^2/2` in `[0, 1)`.
    pub fn q(&self, a: &[Int]) -> Rat {
        let la = self.lift(a);
        let v = la.transpose().mul(&self.gram).unwrap().mul(&la).unwrap();
        frac(&(v[(0, 0)].clone() / Rat::from_integer(Int::from(2))))
    }

    /// All elements; intended for the small groups of this crate.
    pub fn elements(&self) -> Vec<FqmElement> {
        let mut out = vec![self.zero()];
        for (i, d) in self.invariants.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut c = Int::zero();
                while &c < d {
                    let mut e2 = e.clone();
                    e2[i] = c.clone();
                    next.push(e2);
                    c += 1;
                }
            }
            out = next;
        }
        out
    }

    pub fn same_invariants(&self, other: &FinQuadModule) -> bool {
        self.invariants == other.invariants
    }
}

fn frac(x: &Rat) -> Rat {
    x - Rat::from_integer(x.floor().to_integer())
}

/// Representative of `x` in `Q/Z` reduced into `[0, 1)`.
pub fn qz_normalize(x: &Rat) -> Rat {
    frac(x)
}

/// Homomorphism between finite quadratic modules, stored on generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub domain: FinQuadModule,
    pub codomain: FinQuadModule,
    /// Column `j` is the exponent vector of the image of generator `j`.
    pub images: IntMatrix,
}

impl GroupHom {
    /// Builds the homomorphism and verifies it respects the relations
    /// `d_j * gen_j = 0` of the domain presentation.
    pub fn new(domain: FinQuadModule, codomain: FinQuadModule, images: IntMatrix) -> Result<Self> {
        if images.cols() != domain.num_gens() || images.rows() != codomain.num_gens() {
            return Err(Error::ShapeMismatch("group hom image matrix".into()));
        }
        for j in 0..domain.num_gens() {
            let img: FqmElement = images.col(j);
            let killed = codomain.smul(&domain.invariants()[j], &img);
            if !codomain.is_zero_elt(&killed) {
                return Err(Error::Precondition(
                    "images do not respect the domain relations".into(),
                ));
            }
        }
        Ok(GroupHom {
            domain,
            codomain,
            images,
        })
    }

    pub fn apply(&self, e: &[Int]) -> FqmElement {
        let mut acc = self.codomain.zero();
        for j in 0..self.domain.num_gens() {
            let img: FqmElement = self.images.col(j);
            acc = self.codomain.add(&acc, &self.codomain.smul(&e[j], &img));
        }
        acc
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.domain.num_gens()).all(|j| self.codomain.is_zero_elt(&self.images.col(j)))
    }
}

/// Solves `sum_j c[k][j] * x_j = rhs_k` for unknowns `x_j` in the module
/// `a`, returning one solution or `None`.
///
/// The system is solved one cyclic component at a time through the Smith
/// form of `c`.
pub fn solve_module_linear(
    a: &FinQuadModule,
    c: &IntMatrix,
    rhs: &[FqmElement],
) -> Option<Vec<FqmElement>> {
    let (rows, cols) = (c.rows(), c.cols());
    debug_assert_eq!(rhs.len(), rows);
    let (d, u, v) = c.snf();
    let mut xs = vec![a.zero(); cols];
    for (ci, modulus) in a.invariants().iter().enumerate() {
        // Component ci: integer congruence c * x = t (mod modulus).
        let t = Matrix::from_fn(rows, 1, |k, _| rhs[k][ci].clone());
        let ut = u.mul(&t).ok()?;
        let mut z = vec![Int::zero(); cols];
        for k in 0..rows.max(cols) {
            if k < rows.min(cols) && !d[(k, k)].is_zero() {
                // d_k * z_k = ut_k (mod modulus)
                let g = d[(k, k)].gcd(modulus);
                if !ut[(k, 0)].mod_floor(&g).is_zero() {
                    return None;
                }
                let m2 = modulus / &g;
                let rhs2 = (ut[(k, 0)].clone() / &g).mod_floor(&m2);
                let a2 = (d[(k, k)].clone() / &g).mod_floor(&m2);
                if m2.is_one() {
                    z[k] = Int::zero();
                } else {
                    let inv = mod_inverse(&a2, &m2)?;
                    z[k] = (rhs2 * inv).mod_floor(&m2);
                }
            } else if k < rows {
                // Zero row: right-hand side must vanish mod modulus.
                if !ut[(k, 0)].mod_floor(modulus).is_zero() {
                    return None;
                }
            }
        }
        let zc = Matrix::from_fn(cols, 1, |k, _| z[k].clone());
        let x = v.mul(&zc).ok()?;
        for j in 0..cols {
            xs[j][ci] = x[(j, 0)].mod_floor(modulus);
        }
    }
    Some(xs)
}

fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm(rows: Vec<Vec<i64>>) -> RatMatrix {
        RatMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Rat::from_integer(Int::from(x))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn quotient_z_mod_2() {
        // A1 = [[2]]: dual lattice spanned by 1/2, quotient Z/2 with
        // q(gen) = 1/4.
        let gram = rm(vec![vec![2]]);
        let num = RatMatrix::from_rows(vec![vec![Rat::new(Int::one(), Int::from(2))]]).unwrap();
        let den = rm(vec![vec![1]]);
        let m = FinQuadModule::quotient(&gram, &num, &den).unwrap();
        assert_eq!(m.invariants(), &[Int::from(2)]);
        let g = m.generator(0);
        assert_eq!(m.q(&g), Rat::new(Int::one(), Int::from(4)));
        assert_eq!(m.bilinear(&g, &g), Rat::new(Int::one(), Int::from(2)));
        assert!(m.is_zero_elt(&m.add(&g, &g)));
    }

    #[test]
    fn quadratic_bilinear_compatibility() {
        // Z/8 discriminant group of a rank-1 lattice [[8]]-style quotient.
        let gram = rm(vec![vec![8]]);
        let num = RatMatrix::from_rows(vec![vec![Rat::new(Int::one(), Int::from(8))]]).unwrap();
        let den = rm(vec![vec![1]]);
        let m = FinQuadModule::quotient(&gram, &num, &den).unwrap();
        assert_eq!(m.order(), Int::from(8));
        for x in m.elements() {
            for y in m.elements() {
                let lhs = qz_normalize(
                    &(m.q(&m.add(&x, &y)) - m.q(&x) - m.q(&y)),
                );
                assert_eq!(lhs, m.bilinear(&x, &y));
            }
        }
    }

    #[test]
    fn module_linear_solver() {
        // Z/2: solve 2x = 1 (no solution), 1*x = 1 (solution).
        let gram = rm(vec![vec![2]]);
        let num = RatMatrix::from_rows(vec![vec![Rat::new(Int::one(), Int::from(2))]]).unwrap();
        let den = rm(vec![vec![1]]);
        let m = FinQuadModule::quotient(&gram, &num, &den).unwrap();
        let one = m.generator(0);

        let c = IntMatrix::from_rows(vec![vec![Int::from(2)]]).unwrap();
        assert!(solve_module_linear(&m, &c, &[one.clone()]).is_none());

        let c = IntMatrix::from_rows(vec![vec![Int::from(3)]]).unwrap();
        let sol = solve_module_linear(&m, &c, &[one.clone()]).unwrap();
        assert_eq!(m.smul(&Int::from(3), &sol[0]), one);
    }
}
