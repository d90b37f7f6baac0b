//! Arithmetic descriptors of the canonical toroidal boundary component for
//! signature `(n,2)` lattices with a rank-2 primitive isotropic part: the
//! definite lattice `Lambda` with its discriminant group, the congruence
//! groups attached to `I_{L*}` and `I_iota`, the finite group
//! `Gamma_Lambda`, and the obstruction cocycle values on a generating set.

use std::sync::Arc;

use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::congruence::{self, Sl2Class};
use crate::error::Error;
use crate::finquad::{qz_normalize, FqmElement};
use crate::frame::{self, IsotropicFrame};
use crate::lattice::{EvenLattice, Sublattice};
use crate::mat::Matrix;
use crate::parabolic;
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// Largest integer `z >= 0` with `z^2 <= x` for a non-negative rational.
fn rat_sqrt_floor(x: &Rat) -> Int {
    debug_assert!(!x.is_negative());
    x.floor().to_integer().max(Int::zero()).sqrt()
}

/// All lattice vectors of a positive definite even lattice with a given
/// norm, by exact branch-and-bound on the Gauss decomposition of the form.
pub fn vectors_of_norm(lambda: &EvenLattice, norm: &Int) -> Result<Vec<IntMatrix>> {
    if !lambda.is_positive_definite() {
        return Err(Error::Precondition("lattice is not positive definite".into()));
    }
    let k = lambda.dim();
    if k == 0 {
        return Ok(if norm.is_zero() {
            vec![IntMatrix::zero(0, 1)]
        } else {
            Vec::new()
        });
    }
    // Completion of squares: Q(x) = sum_i c_i (x_i + sum_{j>i} u_ij x_j)^2.
    let g = lambda.gram_rat();
    let mut c = vec![Rat::zero(); k];
    let mut u = RatMatrix::zero(k, k);
    let mut a = g.clone();
    for i in 0..k {
        c[i] = a[(i, i)].clone();
        if c[i].is_zero() {
            return Err(Error::Internal("definite form with zero pivot".into()));
        }
        for j in i + 1..k {
            u[(i, j)] = a[(i, j)].clone() / c[i].clone();
        }
        for r in i + 1..k {
            for s in i + 1..k {
                let sub = c[i].clone() * u[(i, r)].clone() * u[(i, s)].clone();
                a[(r, s)] = a[(r, s)].clone() - sub;
            }
        }
    }

    let target = Rat::from_integer(norm.clone());
    let mut out = Vec::new();
    let mut x = vec![Int::zero(); k];
    // Depth-first from the last coordinate: at level i the remaining budget
    // bounds |x_i + s_i| by sqrt(budget / c_i).
    fn rec(
        i: usize,
        budget: &Rat,
        x: &mut Vec<Int>,
        c: &[Rat],
        u: &RatMatrix,
        out: &mut Vec<IntMatrix>,
        k: usize,
    ) {
        if budget.is_negative() {
            return;
        }
        if i == usize::MAX {
            return;
        }
        let s: Rat = (i + 1..k)
            .map(|j| u[(i, j)].clone() * Rat::from_integer(x[j].clone()))
            .fold(Rat::zero(), |acc, t| acc + t);
        let bound = budget.clone() / c[i].clone();
        let root = rat_sqrt_floor(&bound) + Int::one();
        // Integer window around -s, filtered by the exact inequality.
        let center = (-s.clone()).floor().to_integer();
        let lo = center.clone() - &root - Int::one();
        let hi = center + &root + Int::one();
        let mut xi = lo;
        while xi <= hi {
            let term = c[i].clone()
                * (Rat::from_integer(xi.clone()) + s.clone())
                * (Rat::from_integer(xi.clone()) + s.clone());
            if &term <= budget {
                x[i] = xi.clone();
                if i == 0 {
                    if term == *budget {
                        out.push(Matrix::from_fn(k, 1, |r, _| x[r].clone()));
                    }
                } else {
                    let rem = budget.clone() - term;
                    rec(i - 1, &rem, x, c, u, out, k);
                }
            }
            xi += 1;
        }
        x[i] = Int::zero();
    }
    rec(k - 1, &target, &mut x, &c, &u, &mut out, k);
    Ok(out)
}

/// Full automorphism group `O(Lambda)` of a positive definite even lattice
/// by backtracking over images of the basis vectors. Desk scale: rank <= 8.
pub fn aut_definite(lambda: &EvenLattice) -> Result<Vec<IntMatrix>> {
    if !lambda.is_positive_definite() {
        return Err(Error::Precondition("lattice is not positive definite".into()));
    }
    let k = lambda.dim();
    if k > 8 {
        return Err(Error::Precondition("rank > 8 not supported".into()));
    }
    if k == 0 {
        return Ok(vec![IntMatrix::identity(0)]);
    }
    let g = lambda.gram();
    let mut candidates: Vec<Vec<IntMatrix>> = Vec::new();
    for i in 0..k {
        candidates.push(vectors_of_norm(lambda, &g[(i, i)])?);
    }
    let gr = lambda.gram_rat();
    let mut out = Vec::new();
    let mut cols: Vec<IntMatrix> = Vec::new();
    fn rec(
        i: usize,
        k: usize,
        candidates: &[Vec<IntMatrix>],
        cols: &mut Vec<IntMatrix>,
        gr: &RatMatrix,
        g: &IntMatrix,
        out: &mut Vec<IntMatrix>,
    ) {
        if i == k {
            let m = Matrix::from_fn(k, k, |r, c| cols[c][(r, 0)].clone());
            out.push(m);
            return;
        }
        'cand: for v in &candidates[i] {
            for (j, w) in cols.iter().enumerate() {
                let p = w
                    .to_rational()
                    .transpose()
                    .mul(gr)
                    .unwrap()
                    .mul(&v.to_rational())
                    .unwrap();
                if p[(0, 0)] != Rat::from_integer(g[(j, i)].clone()) {
                    continue 'cand;
                }
            }
            cols.push(v.clone());
            rec(i + 1, k, candidates, cols, gr, g, out);
            cols.pop();
        }
    }
    rec(0, k, &candidates, &mut cols, &gr, g, &mut out);
    // Isometries are exactly the assembled matrices; the pairing filter
    // enforces g^T G g = G column by column.
    Ok(out)
}

/// `Gamma_Lambda`: automorphisms with determinant one acting trivially on
/// the discriminant group (`SO^+ = SO` for definite forms).
pub fn gamma_lambda_group(lambda: &Arc<EvenLattice>) -> Result<Vec<IntMatrix>> {
    let k = lambda.dim();
    let auts = aut_definite(lambda)?;
    let ginv = if k > 0 {
        lambda.gram_rat().inverse()?
    } else {
        RatMatrix::identity(0)
    };
    let mut out = Vec::new();
    for a in auts {
        let ar = a.to_rational();
        if ar.det()? != Rat::one() {
            continue;
        }
        if k > 0 {
            let act = ar.sub(&RatMatrix::identity(k))?.mul(&ginv)?;
            if !act.is_integral() {
                continue;
            }
        }
        out.push(a);
    }
    Ok(out)
}

/// Greedy generating set of a finite matrix group given by its elements.
pub fn generating_set(elements: &[IntMatrix], dim: usize) -> Vec<IntMatrix> {
    let id = IntMatrix::identity(dim);
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut span: Vec<IntMatrix> = vec![id.clone()];
    for e in elements {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        // Close the span under the new generator set.
        let mut frontier = span.clone();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.mul(g).unwrap();
                if !span.contains(&y) {
                    span.push(y.clone());
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// One entry of the cocycle table: a generator of the congruence group with
/// its cocycle value in `Delta_Lambda x Delta_Lambda`.
#[derive(Clone, Debug)]
pub struct CocycleTableEntry {
    /// Generator in the adapted `I`-basis.
    pub generator: IntMatrix,
    /// Value `b_M` as a pair of `Delta_Lambda` classes.
    pub value: (FqmElement, FqmElement),
    /// Whether the generator lies in the smaller congruence group.
    pub in_gamma_iota: bool,
}

/// Arithmetic descriptors of the canonical boundary component.
#[derive(Clone, Debug)]
pub struct BoundaryReport {
    pub lambda_gram: IntMatrix,
    pub delta_invariants: Vec<Int>,
    /// `(N, D)` for the congruence group of `I_{L*}`.
    pub gamma_lstar_params: (Int, Int),
    pub gamma_lstar_description: String,
    pub gamma_lstar_index: Int,
    /// `(N, D)` for the congruence group of `I_iota`.
    pub gamma_iota_params: (Int, Int),
    pub gamma_iota_description: String,
    pub gamma_iota_index_in_sl2: Int,
    pub gamma_iota_index_in_gamma_lstar: Int,
    pub gamma_lambda_order: Int,
    pub gamma_lambda_generators: Vec<IntMatrix>,
    pub b_table: Vec<CocycleTableEntry>,
    pub iota_trivial: bool,
}

fn to_i64(x: &Int) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Precondition("congruence level too large".into()))
}

/// Builds the full boundary report for a signature `(n,2)` lattice and a
/// rank-2 primitive isotropic sublattice.
pub fn boundary_report(
    lattice: &Arc<EvenLattice>,
    i: &Sublattice,
    itilde: &Sublattice,
) -> Result<BoundaryReport> {
    if lattice.signature().1 != 2 {
        return Err(Error::Precondition("signature must be (n, 2)".into()));
    }
    if i.rank() != 2 {
        return Err(Error::Precondition("isotropic part must have rank 2".into()));
    }
    let frame = frame::build_frame(lattice, i, itilde)?;
    if !frame.lambda().is_positive_definite() {
        return Err(Error::Internal("Lambda is not positive definite".into()));
    }

    let params = parabolic::rank2_congruence_params(&frame)?;
    let params_iota = parabolic::rank2_congruence_params_for(&frame, frame.i_iota())?;

    // Membership predicates mod the common level, evaluated through the
    // exact SL(J, I) definition on lifted classes.
    let level = to_i64(&params.n)?
        .lcm(&to_i64(&params_iota.n)?)
        .max(1);
    let member_pred = |j: &Sublattice, class: Sl2Class| -> bool {
        let lift = congruence::sl2_lift(class, level).expect("liftable class");
        let m_adapted = lift.to_rational();
        let m_frame = params.to_frame_basis(&m_adapted);
        parabolic::sl_ji_member(&m_frame, j, frame.isotropic()).expect("valid subgroup data")
    };

    let sub_lstar = congruence::mod_subgroup(level, |c| member_pred(frame.i_lstar(), c))?;
    let sub_iota = congruence::mod_subgroup(level, |c| member_pred(frame.i_iota(), c))?;
    let (idx_rem, idx_quot) = (
        sub_iota.index.clone() % &sub_lstar.index,
        sub_iota.index.clone() / &sub_lstar.index,
    );
    if !idx_rem.is_zero() {
        return Err(Error::Internal("index tower is inconsistent".into()));
    }

    // Gamma_Lambda.
    let gl = gamma_lambda_group(frame.lambda())?;
    let gl_order = Int::from(gl.len() as i64);
    let gl_gens = generating_set(&gl, frame.rank_w());

    // Cocycle table on Schreier generators of the I_{L*} congruence group.
    let gens = congruence::schreier_generators(level, |c| member_pred(frame.i_lstar(), c))?;
    if !congruence::generators_fill_subgroup(level, &gens, |c| member_pred(frame.i_lstar(), c))? {
        return Err(Error::Internal("generator set does not fill the subgroup".into()));
    }
    let mut b_table = Vec::new();
    for g in &gens {
        let m_frame = params.to_frame_basis(&g.to_rational());
        let b = parabolic::cocycle_b(&m_frame, &frame)?;
        let value = cocycle_as_delta_pair(&frame, &params, &b)?;
        let in_gamma_iota =
            parabolic::sl_ji_member(&m_frame, frame.i_iota(), frame.isotropic())?;
        // b vanishes exactly on the smaller congruence group.
        if b.is_zero() != in_gamma_iota {
            return Err(Error::Internal(
                "cocycle vanishing disagrees with the congruence group".into(),
            ));
        }
        b_table.push(CocycleTableEntry {
            generator: g.clone(),
            value,
            in_gamma_iota,
        });
    }

    let (iota_trivial, _) = frame::iota_class_trivial(&frame)?;

    Ok(BoundaryReport {
        lambda_gram: frame.lambda().gram().clone(),
        delta_invariants: frame.delta_lambda().invariants().to_vec(),
        gamma_lstar_params: (params.n.clone(), params.d.clone()),
        gamma_lstar_description: params.description.clone(),
        gamma_lstar_index: sub_lstar.index.clone(),
        gamma_iota_params: (params_iota.n.clone(), params_iota.d.clone()),
        gamma_iota_description: params_iota.description,
        gamma_iota_index_in_sl2: sub_iota.index,
        gamma_iota_index_in_gamma_lstar: idx_quot,
        gamma_lambda_order: gl_order,
        gamma_lambda_generators: gl_gens,
        b_table,
        iota_trivial,
    })
}

/// Rewrites cocycle values `b_M: Delta_Lambda -> U/I` as a pair of
/// `Delta_Lambda` classes through the adapted basis of `I`: coordinate `i`
/// of `b_M` is the `Q/Z`-character `(y_i, .)` for a unique `y_i`.
pub fn cocycle_as_delta_pair(
    frame: &IsotropicFrame,
    params: &parabolic::CongruenceParams,
    b: &parabolic::CocycleValues,
) -> Result<(FqmElement, FqmElement)> {
    let delta = frame.delta_lambda();
    let p_inv = params.adapted_basis.to_rational().inverse()?;
    let reps = p_inv.mul(&b.reps)?; // adapted coordinates, columns = generators
    let mut out: Vec<FqmElement> = Vec::new();
    for row in 0..2 {
        let target: Vec<Rat> = (0..delta.num_gens())
            .map(|k| qz_normalize(&reps[(row, k)]))
            .collect();
        let mut found = None;
        for y in delta.elements() {
            let matches = (0..delta.num_gens())
                .all(|k| delta.bilinear(&y, &delta.generator(k)) == target[k]);
            if matches {
                found = Some(y);
                break;
            }
        }
        out.push(found.ok_or_else(|| {
            Error::Internal("cocycle coordinate is not a character of Delta_Lambda".into())
        })?);
    }
    Ok((out[0].clone(), out[1].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn a_n(rows: Vec<Vec<i64>>) -> Arc<EvenLattice> {
        Arc::new(
            EvenLattice::new(
                IntMatrix::from_rows(
                    rows.into_iter()
                        .map(|r| r.into_iter().map(Int::from).collect())
                        .collect(),
                )
                .unwrap(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn aut_orders() {
        // A1: {±1}; A2: dihedral of order 12; rank 0: trivial.
        let a1 = a_n(vec![vec![2]]);
        assert_eq!(aut_definite(&a1).unwrap().len(), 2);
        let a2 = a_n(vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(aut_definite(&a2).unwrap().len(), 12);
        let zero = a_n(vec![]);
        assert_eq!(aut_definite(&zero).unwrap().len(), 1);
    }

    #[test]
    fn gamma_lambda_orders() {
        let a1 = a_n(vec![vec![2]]);
        assert_eq!(gamma_lambda_group(&a1).unwrap().len(), 1);
        // A2: only the order-3 rotations fix Delta = Z/3 pointwise.
        let a2 = a_n(vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(gamma_lambda_group(&a2).unwrap().len(), 3);
        // A1 + A1: the swap moves Delta classes; sign maps with det 1
        // act nontrivially unless both flip... enumerate exactly.
        let a11 = a_n(vec![vec![2, 0], vec![0, 2]]);
        let g = gamma_lambda_group(&a11).unwrap();
        // -Id acts as -1 = +1 on (Z/2)^2, det 1: it is in Gamma_Lambda.
        assert!(g.len() >= 1);
        for m in &g {
            assert_eq!(m.to_rational().det().unwrap(), Rat::one());
        }
    }

    #[test]
    fn norm_vectors_a2() {
        // A2 has six roots of norm 2.
        let a2 = a_n(vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(vectors_of_norm(&a2, &Int::from(2)).unwrap().len(), 6);
        assert_eq!(vectors_of_norm(&a2, &Int::from(1)).unwrap().len(), 0);
        assert_eq!(vectors_of_norm(&a2, &Int::from(0)).unwrap().len(), 1);
    }

    #[test]
    fn boundary_fix_l5() {
        let l = fixtures::by_name("fix-l5").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = frame::unimodular_complement(&l, &i).unwrap();
        let rep = boundary_report(&l, &i, &it).unwrap();
        assert_eq!(
            rep.lambda_gram,
            IntMatrix::from_rows(vec![vec![Int::from(2)]]).unwrap()
        );
        assert_eq!(rep.delta_invariants, vec![Int::from(2)]);
        assert_eq!(rep.gamma_lstar_params, (Int::one(), Int::one()));
        assert_eq!(rep.gamma_lstar_index, Int::one());
        assert_eq!(rep.gamma_iota_index_in_gamma_lstar, Int::one());
        assert_eq!(rep.gamma_lambda_order, Int::one());
        assert!(rep.iota_trivial);
        assert!(rep.b_table.iter().all(|e| e.in_gamma_iota));
    }

    #[test]
    fn boundary_fix_l5b() {
        let l = fixtures::by_name("fix-l5b").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = frame::unimodular_complement(&l, &i).unwrap();
        let rep = boundary_report(&l, &i, &it).unwrap();
        assert_eq!(rep.gamma_lstar_params, (Int::from(2), Int::one()));
        // Index of Gamma_1(2)-type subgroup: |SL2(Z/2)| / 2 = 3.
        assert_eq!(rep.gamma_lstar_index, Int::from(3));
        assert!(rep.iota_trivial);
        assert!(rep.b_table.iter().all(|e| e.in_gamma_iota));
    }

    #[test]
    fn boundary_fix_l7() {
        let l = fixtures::by_name("fix-l7").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = frame::unimodular_complement(&l, &i).unwrap();
        let rep = boundary_report(&l, &i, &it).unwrap();
        assert_eq!(
            rep.lambda_gram,
            IntMatrix::from_rows(vec![
                vec![Int::from(2), Int::from(1)],
                vec![Int::from(1), Int::from(2)]
            ])
            .unwrap()
        );
        assert_eq!(rep.delta_invariants, vec![Int::from(3)]);
        assert_eq!(rep.gamma_lstar_params, (Int::one(), Int::one()));
        assert_eq!(rep.gamma_lambda_order, Int::from(3));
        assert!(rep.iota_trivial);
    }

    #[test]
    fn boundary_fix_g5() {
        let l = fixtures::by_name("fix-g5").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = frame::unimodular_complement(&l, &i).unwrap();
        let rep = boundary_report(&l, &i, &it).unwrap();
        assert_eq!(rep.gamma_lstar_params, (Int::from(2), Int::one()));
        assert_eq!(rep.gamma_iota_params, (Int::from(4), Int::one()));
        assert!(!rep.iota_trivial);
        // Some generator must carry a non-zero cocycle value.
        assert!(rep.b_table.iter().any(|e| !e.in_gamma_iota));
        // Index tower: [SL2 : Gamma_iota] = [SL2 : Gamma_{L*}] x
        // [Gamma_{L*} : Gamma_iota].
        assert_eq!(
            rep.gamma_iota_index_in_sl2,
            rep.gamma_lstar_index.clone() * rep.gamma_iota_index_in_gamma_lstar.clone()
        );
    }
}
