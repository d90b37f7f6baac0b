//! Determinant and real spinor norm of exact isometries, through a
//! constructive Cartan-Dieudonne factorization into reflections over `Q`.
//!
//! Convention: the spinor sign of an isometry is the sign of the product of
//! the norms of its reflection vectors, the empty product being `+1`. With
//! this convention `SO^+` (determinant `+1`, spinor sign `+1`) is the
//! identity component, and for positive definite forms `SO^+ = SO`.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::{Int, Rat, RatMatrix, Result};

/// Matrix of the reflection in `v` w.r.t. the bilinear form `gram`:
/// `x -> x - 2 (x, v)/(v, v) v`.
pub fn reflection(gram: &RatMatrix, v: &RatMatrix) -> Result<RatMatrix> {
    let vtg = v.transpose().mul(gram)?;
    let norm = vtg.mul(v)?[(0, 0)].clone();
    if norm.is_zero() {
        return Err(Error::Precondition("reflection in an isotropic vector".into()));
    }
    let scale = Rat::from_integer(Int::from(2)) / norm;
    let outer = v.mul(&vtg)?.scale(&scale);
    RatMatrix::identity(gram.rows()).sub(&outer)
}

/// An orthogonal basis (columns) for a non-degenerate symmetric `gram`,
/// with all basis norms non-zero.
pub fn orthogonal_basis(gram: &RatMatrix) -> Result<RatMatrix> {
    let n = gram.rows();
    let mut basis = RatMatrix::identity(n);
    let mut live: Vec<usize> = (0..n).collect();
    let pair = |basis: &RatMatrix, i: usize, j: usize| -> Rat {
        let bi = basis.col_range(i, i + 1);
        let bj = basis.col_range(j, j + 1);
        bi.transpose().mul(gram).unwrap().mul(&bj).unwrap()[(0, 0)].clone()
    };
    while !live.is_empty() {
        // Pick a live vector of non-zero norm, fabricating one if needed.
        let p = match live.iter().copied().find(|&i| !pair(&basis, i, i).is_zero()) {
            Some(p) => p,
            None => {
                let mut found = None;
                'search: for &i in &live {
                    for &j in &live {
                        if i != j && !pair(&basis, i, j).is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                let Some((i, j)) = found else {
                    return Err(Error::Precondition("degenerate form".into()));
                };
                for r in 0..n {
                    let s = basis[(r, j)].clone();
                    basis[(r, i)] = basis[(r, i)].clone() + s;
                }
                i
            }
        };
        let np = pair(&basis, p, p);
        for &k in &live {
            if k != p {
                let f = pair(&basis, k, p) / np.clone();
                for r in 0..n {
                    let s = basis[(r, p)].clone() * f.clone();
                    basis[(r, k)] = basis[(r, k)].clone() - s;
                }
            }
        }
        live.retain(|&i| i != p);
    }
    Ok(basis)
}

/// `(det, spinor_sign)` of an isometry `a` of the form `gram`, both in
/// `{+1, -1}`. Fails with `Error::Precondition` when `a` is not an exact
/// isometry.
pub fn det_spinor(gram: &RatMatrix, a: &RatMatrix) -> Result<(i32, i32)> {
    let n = gram.rows();
    if a.rows() != n || a.cols() != n {
        return Err(Error::ShapeMismatch("isometry shape".into()));
    }
    if &a.transpose().mul(gram)?.mul(a)? != gram {
        return Err(Error::Precondition("matrix is not an isometry".into()));
    }
    if n == 0 {
        return Ok((1, 1));
    }
    let basis = orthogonal_basis(gram)?;
    let mut current = a.clone();
    let mut count = 0usize;
    let mut norm_product = Rat::one();
    let mut apply = |current: &mut RatMatrix, v: &RatMatrix| -> Result<()> {
        let refl = reflection(gram, v)?;
        let vtg = v.transpose().mul(gram)?.mul(v)?;
        norm_product = norm_product.clone() * vtg[(0, 0)].clone();
        *current = refl.mul(current)?;
        count += 1;
        Ok(())
    };
    for i in 0..n {
        let f = basis.col_range(i, i + 1);
        let y = current.mul(&f)?;
        if y == f {
            continue;
        }
        let v = y.sub(&f)?;
        let vnorm = v.transpose().mul(gram)?.mul(&v)?[(0, 0)].clone();
        if !vnorm.is_zero() {
            // The reflection in y - f sends y to f.
            apply(&mut current, &v)?;
        } else {
            // y - f isotropic but y != f: reflect in y + f (norm 4 f^2)
            // to reach -f, then in f itself.
            let w = y.add(&f)?;
            apply(&mut current, &w)?;
            apply(&mut current, &f)?;
        }
    }
    if current != RatMatrix::identity(n) {
        return Err(Error::Internal(
            "reflection factorization did not terminate at the identity".into(),
        ));
    }
    let det = if count % 2 == 0 { 1 } else { -1 };
    let spinor = if norm_product.is_positive() { 1 } else { -1 };
    Ok((det, spinor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rm(rows: Vec<Vec<i64>>) -> RatMatrix {
        RatMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Rat::from_integer(Int::from(x))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_values() {
        let g = fixtures::by_name("fix-h").unwrap().gram_rat().clone();
        assert_eq!(det_spinor(&g, &RatMatrix::identity(2)).unwrap(), (1, 1));
    }

    #[test]
    fn hyperbolic_swap_is_negative_reflection() {
        // Swapping e1, e2 in the hyperbolic plane reflects in e1 - e2 of
        // norm -2.
        let g = fixtures::by_name("fix-h").unwrap().gram_rat().clone();
        let swap = rm(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(det_spinor(&g, &swap).unwrap(), (-1, -1));
    }

    #[test]
    fn hyperbolic_minus_identity() {
        // -Id is in SO but not in SO^+: reflections in e1+e2 and e1-e2 of
        // norms 2 and -2.
        let g = fixtures::by_name("fix-h").unwrap().gram_rat().clone();
        let minus = rm(vec![vec![-1, 0], vec![0, -1]]);
        assert_eq!(det_spinor(&g, &minus).unwrap(), (1, -1));
    }

    #[test]
    fn definite_forms_have_positive_spinor() {
        let g = rm(vec![vec![2, 1], vec![1, 2]]);
        let rot = rm(vec![vec![0, -1], vec![1, 1]]);
        let (det, spin) = det_spinor(&g, &rot).unwrap();
        assert_eq!((det, spin), (1, 1));
        let refl = rm(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(det_spinor(&g, &refl).unwrap(), (-1, 1));
    }

    #[test]
    fn rejects_non_isometry() {
        let g = fixtures::by_name("fix-h").unwrap().gram_rat().clone();
        let bad = rm(vec![vec![2, 0], vec![0, 1]]);
        assert!(det_spinor(&g, &bad).is_err());
    }
}
