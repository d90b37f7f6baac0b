//! Adapted coordinate frames for a primitive isotropic sublattice `I` of an
//! even lattice `L`: the unimodular complement `Itilde`, the splitting
//! `V = U + Wtilde + Utilde`, the symmetric correction map `alpha`, the
//! glue homomorphism `iota` with its dual, and exact membership tests for
//! `L`, `L*` and `L*_I` by decomposition.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::finquad::{solve_module_linear, FinQuadModule, FqmElement};
use crate::lattice::{EvenLattice, Sublattice};
use crate::mat::Matrix;
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// Exact decomposition of a vector along `V = U + Wtilde + Utilde`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorDecomposition {
    pub u: RatMatrix,
    pub w: RatMatrix,
    pub utilde: RatMatrix,
}

/// Membership targets for [`IsotropicFrame::membership_by_decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The lattice `L` itself.
    L,
    /// The dual lattice `L*`.
    Lstar,
    /// `L*_I = L + I^perp_{L*}`.
    LstarI,
}

/// The full adapted data for one choice of unimodular complement.
///
/// Immutable once built; every derived sublattice is cached.
#[derive(Clone, Debug)]
pub struct IsotropicFrame {
    lattice: Arc<EvenLattice>,
    i: Sublattice,
    itilde: Sublattice,
    /// Basis `a_1..a_r` of `I` (canonical form of `i`).
    i_basis: RatMatrix,
    /// Basis `b_1..b_r` of `Itilde` normalized so that `(b_i, a_j) = delta_ij`.
    itilde_basis: RatMatrix,
    /// Basis of `LambdaTilde = L cap Wtilde`; also the working basis of `Wtilde`.
    lambda_tilde: Sublattice,
    lambda_tilde_dual: Sublattice,
    /// Abstract `Lambda` with the Gram matrix of the `lambda_tilde` basis.
    lambda: Arc<EvenLattice>,
    gram_w: RatMatrix,
    gram_w_inv: RatMatrix,
    /// Matrix of `alpha: Utilde -> U` in the paired bases; symmetric, equal
    /// to half the Gram matrix of the `Itilde` basis.
    alpha: RatMatrix,
    i_lstar: Sublattice,
    itilde_l: Sublattice,
    i_iota: Sublattice,
    delta_lambda: FinQuadModule,
    /// `iota(u_k)` for the canonical basis columns `u_k` of `Itilde_L`.
    iota: Vec<FqmElement>,
    /// Column `k`: `I`-coordinates of a representative of `iota^*(g_k)`
    /// modulo `I_{L*}`, for the generators `g_k` of `Delta_Lambda`.
    iota_dual_reps: RatMatrix,
    /// Lattice of pairing vectors `((v, a_1), ..., (v, a_r))` over `v in L`.
    pairing_lattice: IntMatrix,
    /// `Itilde`-coordinates of the `Itilde_L` basis columns.
    itilde_l_coords: IntMatrix,
    frame_basis: RatMatrix,
    frame_basis_inv: RatMatrix,
}

/// Constructs a sublattice of `L*` whose pairing with `I` is unimodular,
/// by completing `I` to a basis of `L` and taking the `I`-part of the dual
/// basis.
pub fn unimodular_complement(lattice: &Arc<EvenLattice>, i: &Sublattice) -> Result<Sublattice> {
    validate_isotropic_primitive(i)?;
    let r = i.rank();
    let b = i.basis().to_integer().ok_or(Error::NotPrimitive)?;
    let (d, u, _) = b.snf();
    for k in 0..r {
        if !d[(k, k)].is_one() {
            return Err(Error::NotPrimitive);
        }
    }
    // Dual basis of the adapted L-basis u^{-1}: columns of G^{-1} u^T.
    let dual_cols = lattice
        .gram_rat()
        .inverse()?
        .mul(&u.to_rational().transpose())?;
    let basis = dual_cols.col_range(0, r);
    Sublattice::new(lattice, basis)
}

fn validate_isotropic_primitive(i: &Sublattice) -> Result<()> {
    if i.rank() == 0 {
        return Err(Error::Precondition(
            "isotropic sublattice has rank 0".into(),
        ));
    }
    if !i.is_isotropic() {
        return Err(Error::NotIsotropic);
    }
    if !i.is_primitive()? {
        return Err(Error::NotPrimitive);
    }
    Ok(())
}

/// Builds the frame for `(L, I, Itilde)`. Fails loudly (with
/// `Error::Internal`) if any structural identity the construction
/// guarantees does not hold, since that indicates an upstream bug.
pub fn build_frame(
    lattice: &Arc<EvenLattice>,
    i: &Sublattice,
    itilde: &Sublattice,
) -> Result<IsotropicFrame> {
    validate_isotropic_primitive(i)?;
    let n = lattice.dim();
    let r = i.rank();
    if itilde.rank() != r {
        return Err(Error::NotUnimodular);
    }
    if !lattice.dual().contains_lattice(itilde) {
        return Err(Error::Precondition(
            "complement is not contained in L*".into(),
        ));
    }

    // Normalize the complement basis to pair as the dual basis of I.
    let i_basis = i.basis().clone();
    let pairing = itilde.pairing_matrix(i);
    let pairing = pairing.to_integer().ok_or(Error::NotUnimodular)?;
    if !pairing.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    let x = pairing
        .to_rational()
        .transpose()
        .inverse()
        .expect("unimodular pairing");
    let itilde_basis = itilde.basis().mul(&x)?;

    // Wtilde = (U + Utilde)^perp and LambdaTilde = L cap Wtilde.
    let u_plus_ut = i.sum(itilde)?;
    let lambda_tilde = u_plus_ut.perp_in(&lattice.full())?;
    let m = n - 2 * r;
    if lambda_tilde.rank() != m {
        return Err(Error::Internal("L cap Wtilde has unexpected rank".into()));
    }
    let gram_w = lambda_tilde.pairing_matrix(&lambda_tilde);
    let lambda = Arc::new(
        EvenLattice::new(gram_w.to_integer().ok_or_else(|| {
            Error::Internal("LambdaTilde has a non-integral Gram matrix".into())
        })?)
        .map_err(|e| Error::Internal(format!("LambdaTilde is not an even lattice: {e}")))?,
    );
    let gram_w_inv = if m > 0 {
        gram_w.inverse()?
    } else {
        RatMatrix::identity(0)
    };
    let lambda_tilde_dual = if m > 0 {
        lambda_tilde.dual_in_span()?
    } else {
        lambda_tilde.clone()
    };

    // alpha: (u, v) = 2 (alpha u, v) pins alpha to half the Gram matrix of
    // the normalized complement basis.
    let gram_ut = itilde_basis
        .transpose()
        .mul(lattice.gram_rat())?
        .mul(&itilde_basis)?;
    let alpha = gram_ut.scale(&Rat::new(Int::one(), Int::from(2)));

    // I_{L*} = U cap L*.
    let i_lstar = i.span_integral_pairing(&RatMatrix::identity(n))?;

    // Pairing vectors of L against the I-basis.
    let pl = i_basis
        .transpose()
        .mul(lattice.gram_rat())?
        .to_integer()
        .ok_or_else(|| Error::Internal("I is not integral".into()))?;
    let pairing_lattice = crate::mat::col_canonical(&pl);

    // Itilde_L: complement vectors whose I-pairings are realized by lattice
    // vectors.
    let itilde_l_basis = itilde_basis.mul(&pairing_lattice.to_rational())?;
    let itilde_l = Sublattice::new(lattice, itilde_l_basis)?;
    {
        // Cross-check against the definition L*_I cap Itilde.
        let iperp_lstar = i.perp_in(&lattice.dual())?;
        let lstar_i = lattice.full().sum(&iperp_lstar)?;
        let direct = lstar_i.intersect(&Sublattice::new(lattice, itilde_basis.clone())?)?;
        if direct != itilde_l {
            return Err(Error::Internal(
                "Itilde_L mismatch with L*_I cap Itilde".into(),
            ));
        }
    }

    let delta_lambda = FinQuadModule::quotient(
        lattice.gram_rat(),
        lambda_tilde_dual.basis(),
        lambda_tilde.basis(),
    )?;

    let frame_basis = i_basis.hstack(lambda_tilde.basis())?.hstack(&itilde_basis)?;
    let frame_basis_inv = frame_basis
        .inverse()
        .map_err(|_| Error::Internal("frame basis is not a basis of V".into()))?;

    let itilde_l_coords = itilde_basis
        .solve(itilde_l.basis())?
        .to_integer()
        .ok_or_else(|| Error::Internal("Itilde_L is not contained in Itilde".into()))?;

    let mut frame = IsotropicFrame {
        lattice: Arc::clone(lattice),
        i: i.clone(),
        itilde: itilde.clone(),
        i_basis,
        itilde_basis,
        lambda_tilde,
        lambda_tilde_dual,
        lambda,
        gram_w,
        gram_w_inv,
        alpha,
        i_lstar,
        itilde_l,
        i_iota: i.clone(), // provisional; fixed by compute_iota_dual
        delta_lambda,
        iota: Vec::new(),
        iota_dual_reps: RatMatrix::zero(r, 0),
        pairing_lattice,
        itilde_l_coords,
        frame_basis,
        frame_basis_inv,
    };

    frame.compute_iota()?;
    frame.compute_iota_dual()?;
    frame.verify_glue()?;
    Ok(frame)
}

impl IsotropicFrame {
    fn compute_iota(&mut self) -> Result<()> {
        // For each basis vector of Itilde_L, find a lattice vector with that
        // Utilde-component; its Wtilde-part descends to Delta_Lambda.
        let a = self
            .i_basis
            .transpose()
            .mul(self.lattice.gram_rat())?
            .to_integer()
            .expect("integral I-pairings");

        // Well-definedness: lattice vectors with vanishing Utilde-component
        // form I^perp_L, whose Wtilde-parts must land in LambdaTilde.
        let kernel = a.kernel();
        for j in 0..kernel.cols() {
            let v = kernel.col_range(j, j + 1).to_rational();
            let dec = self.decompose(&v)?;
            let trivial = self
                .delta_lambda
                .class_of(&dec.w)
                .map(|c| self.delta_lambda.is_zero_elt(&c))
                .unwrap_or(false);
            if !trivial {
                return Err(Error::Internal(
                    "glue map is not well defined modulo LambdaTilde".into(),
                ));
            }
        }

        let mut iota = Vec::new();
        for k in 0..self.itilde_l.rank() {
            let ut = self.itilde_l.basis().col_range(k, k + 1);
            // Target pairings (ut, a_i).
            let c = self
                .i_basis
                .transpose()
                .mul(self.lattice.gram_rat())?
                .mul(&ut)?
                .to_integer()
                .ok_or_else(|| Error::Internal("Itilde_L pairing not integral".into()))?;
            let lift = a
                .solve_integer(&c)
                .ok_or_else(|| Error::Internal("no lattice lift over Itilde_L".into()))?;
            let dec = self.decompose(&lift.to_rational())?;
            let class = self
                .delta_lambda
                .class_of(&dec.w)
                .ok_or_else(|| Error::Internal("lift w-part is not in LambdaTilde^*".into()))?;
            iota.push(class);
        }
        self.iota = iota;
        Ok(())
    }

    fn compute_iota_dual(&mut self) -> Result<()> {
        let r = self.rank_i();
        let t = self.delta_lambda.num_gens();
        // (iota^* g, u_i) = (g, iota u_i) in Q/Z for the Itilde_L basis u_i;
        // in coordinates this is a square rational system against the
        // transpose of the Itilde_L coordinate matrix.
        let tmat = self.itilde_l_coords.to_rational().transpose();
        let mut reps = RatMatrix::zero(r, t);
        for k in 0..t {
            let g = self.delta_lambda.generator(k);
            let rhs = RatMatrix::from_fn(self.itilde_l.rank(), 1, |i, _| {
                self.delta_lambda.bilinear(&g, &self.iota[i])
            });
            let y = tmat.solve(&rhs)?;
            for i in 0..r {
                reps[(i, k)] = y[(i, 0)].clone();
            }
        }
        self.iota_dual_reps = reps;

        // I_iota / I_{L*} is the image of iota^*.
        let img = self.i_basis.mul(&self.iota_dual_reps)?;
        let gens = self.i_lstar.basis().hstack(&img)?;
        self.i_iota = Sublattice::new(&self.lattice, gens)?;
        Ok(())
    }

    /// Structural checks guaranteed by the adapted decomposition: the norm
    /// condition of the glue map, its compatibility with the bilinear
    /// forms, and the duality against `iota^*`.
    fn verify_glue(&self) -> Result<()> {
        let k = self.itilde_l.rank();
        for i in 0..k {
            let ui = self.itilde_l.basis().col_range(i, i + 1);
            let ni = crate::finquad::qz_normalize(
                &(self.lattice.pair(&ui, &ui) / Rat::from_integer(Int::from(2))),
            );
            if self.delta_lambda.q(&self.iota[i]) != ni {
                return Err(Error::Internal(
                    "glue map violates the norm condition".into(),
                ));
            }
            for j in 0..k {
                let uj = self.itilde_l.basis().col_range(j, j + 1);
                let pij = crate::finquad::qz_normalize(&self.lattice.pair(&ui, &uj));
                if self.delta_lambda.bilinear(&self.iota[i], &self.iota[j]) != pij {
                    return Err(Error::Internal(
                        "glue map violates bilinear compatibility".into(),
                    ));
                }
            }
        }
        // Duality: (iota^* g, u_i) = (g, iota u_i) mod Z.
        for g in 0..self.delta_lambda.num_gens() {
            let rep = self.i_basis.mul(&self.iota_dual_reps.col_range(g, g + 1))?;
            for i in 0..k {
                let ui = self.itilde_l.basis().col_range(i, i + 1);
                let lhs = crate::finquad::qz_normalize(&self.lattice.pair(&rep, &ui));
                let rhs = self
                    .delta_lambda
                    .bilinear(&self.delta_lambda.generator(g), &self.iota[i]);
                if lhs != rhs {
                    return Err(Error::Internal("iota^* duality failure".into()));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Arc<EvenLattice> {
        &self.lattice
    }

    pub fn isotropic(&self) -> &Sublattice {
        &self.i
    }

    pub fn complement(&self) -> &Sublattice {
        &self.itilde
    }

    pub fn rank_i(&self) -> usize {
        self.i.rank()
    }

    pub fn rank_w(&self) -> usize {
        self.lambda_tilde.rank()
    }

    /// Basis of `I` used for all `I`-coordinates.
    pub fn i_basis(&self) -> &RatMatrix {
        &self.i_basis
    }

    /// Complement basis normalized dual to the `I`-basis.
    pub fn itilde_basis(&self) -> &RatMatrix {
        &self.itilde_basis
    }

    pub fn lambda_tilde(&self) -> &Sublattice {
        &self.lambda_tilde
    }

    pub fn lambda_tilde_dual(&self) -> &Sublattice {
        &self.lambda_tilde_dual
    }

    /// `Lambda` as an abstract even lattice (Gram matrix of the
    /// `lambda_tilde` basis).
    pub fn lambda(&self) -> &Arc<EvenLattice> {
        &self.lambda
    }

    pub fn gram_w(&self) -> &RatMatrix {
        &self.gram_w
    }

    pub fn gram_w_inv(&self) -> &RatMatrix {
        &self.gram_w_inv
    }

    pub fn alpha(&self) -> &RatMatrix {
        &self.alpha
    }

    pub fn i_lstar(&self) -> &Sublattice {
        &self.i_lstar
    }

    pub fn itilde_l(&self) -> &Sublattice {
        &self.itilde_l
    }

    pub fn i_iota(&self) -> &Sublattice {
        &self.i_iota
    }

    pub fn delta_lambda(&self) -> &FinQuadModule {
        &self.delta_lambda
    }

    pub fn iota_images(&self) -> &[FqmElement] {
        &self.iota
    }

    pub fn iota_dual_reps(&self) -> &RatMatrix {
        &self.iota_dual_reps
    }

    pub fn frame_basis(&self) -> &RatMatrix {
        &self.frame_basis
    }

    pub fn frame_basis_inv(&self) -> &RatMatrix {
        &self.frame_basis_inv
    }

    pub fn pairing_lattice_basis(&self) -> &IntMatrix {
        &self.pairing_lattice
    }

    pub fn itilde_l_coords(&self) -> &IntMatrix {
        &self.itilde_l_coords
    }

    /// `[I_{L*} : I]`.
    pub fn index_ilstar_over_i(&self) -> Int {
        self.i_lstar.index_of(&self.i).expect("I <= I_{L*}")
    }

    /// `[I_iota : I_{L*}]`.
    pub fn index_iiota_over_ilstar(&self) -> Int {
        self.i_iota
            .index_of(&self.i_lstar)
            .expect("I_{L*} <= I_iota")
    }

    /// Exact coordinates of `v` along `U + Wtilde + Utilde`.
    pub fn decompose(&self, v: &RatMatrix) -> Result<VectorDecomposition> {
        if v.rows() != self.lattice.dim() || v.cols() != 1 {
            return Err(Error::ShapeMismatch(
                "decompose expects a column vector".into(),
            ));
        }
        let coords = self.frame_basis_inv.mul(v)?;
        let r = self.rank_i();
        let m = self.rank_w();
        let u = self.i_basis.mul(&coords.col_rows(0, r))?;
        let w = self.lambda_tilde.basis().mul(&coords.col_rows(r, r + m))?;
        let utilde = self.itilde_basis.mul(&coords.col_rows(r + m, r + m + r))?;
        Ok(VectorDecomposition { u, w, utilde })
    }

    /// Frame coordinates of `v` as one column of length `n`.
    pub fn coords(&self, v: &RatMatrix) -> Result<RatMatrix> {
        self.frame_basis_inv.mul(v)
    }

    /// Evaluates the glue map on an element of `Itilde_L`; `None` when the
    /// argument is not in `Itilde_L`.
    pub fn iota_of(&self, utilde: &RatMatrix) -> Option<FqmElement> {
        let z = self.itilde_l.coords(utilde)?;
        let mut acc = self.delta_lambda.zero();
        for (i, img) in self.iota.iter().enumerate() {
            acc = self
                .delta_lambda
                .add(&acc, &self.delta_lambda.smul(&z[(i, 0)], img));
        }
        Some(acc)
    }

    /// Representative in `U` (ambient coordinates) of `iota^*` at a class.
    pub fn iota_dual_rep(&self, class: &[Int]) -> RatMatrix {
        let e = RatMatrix::from_fn(class.len(), 1, |i, _| Rat::from_integer(class[i].clone()));
        let coords = self.iota_dual_reps.mul(&e).expect("generator count");
        self.i_basis.mul(&coords).expect("I-basis shape")
    }

    /// Membership via the adapted decomposition; agrees with the direct
    /// definitions for every rational vector.
    pub fn membership_by_decomposition(&self, v: &RatMatrix, target: Target) -> Result<bool> {
        let dec = self.decompose(v)?;
        let ok = match target {
            Target::L => match self.iota_of(&dec.utilde) {
                None => false, // utilde-part not in Itilde_L
                Some(iota_ut) => match self.delta_lambda.class_of(&dec.w) {
                    None => false, // w-part not in LambdaTilde^*
                    Some(wclass) => {
                        self.delta_lambda
                            .sub(&wclass, &iota_ut)
                            .iter()
                            .all(Zero::is_zero)
                            && self.u_alpha_condition(&dec)?
                    }
                },
            },
            Target::Lstar => self.dual_side_membership(&dec, false)?,
            Target::LstarI => self.dual_side_membership(&dec, true)?,
        };
        Ok(ok)
    }

    // u in -2 alpha utilde + I.
    fn u_alpha_condition(&self, dec: &VectorDecomposition) -> Result<bool> {
        let n = self.lattice.dim();
        let ut_coords = self
            .coords(&dec.utilde)?
            .col_rows(self.rank_i() + self.rank_w(), n);
        let correction = self
            .alpha
            .mul(&ut_coords)?
            .scale(&Rat::from_integer(Int::from(2)));
        let u_coords = self.coords(&dec.u)?.col_rows(0, self.rank_i());
        Ok(u_coords.add(&correction)?.is_integral())
    }

    fn dual_side_membership(&self, dec: &VectorDecomposition, strict: bool) -> Result<bool> {
        let in_comp = if strict {
            self.itilde_l.contains(&dec.utilde)
        } else {
            self.itilde.contains(&dec.utilde)
        };
        if !in_comp {
            return Ok(false);
        }
        let Some(wclass) = self.delta_lambda.class_of(&dec.w) else {
            return Ok(false);
        };
        // u + iota^*(w-class) must land in I_{L*}.
        let rep = self.iota_dual_rep(&wclass);
        let total = dec.u.add(&rep)?;
        Ok(self.i_lstar.contains(&total))
    }

    /// Direct membership in `L` / `L*` / `L*_I` straight from the
    /// definitions, independent of the frame decomposition.
    pub fn direct_membership(&self, v: &RatMatrix, target: Target) -> bool {
        match target {
            Target::L => v.is_integral(),
            Target::Lstar => self
                .lattice
                .gram_rat()
                .mul(v)
                .map(|p| p.is_integral())
                .unwrap_or(false),
            Target::LstarI => {
                if !self.direct_membership(v, Target::Lstar) {
                    return false;
                }
                // The pairing vector against the I-basis must be realized
                // by a lattice vector.
                let p = self
                    .i_basis
                    .transpose()
                    .mul(self.lattice.gram_rat())
                    .and_then(|m| m.mul(v))
                    .expect("shapes fixed by the frame");
                match p.to_integer() {
                    None => false,
                    Some(pi) => self
                        .pairing_lattice
                        .to_rational()
                        .solve(&pi.to_rational())
                        .map(|x| x.is_integral())
                        .unwrap_or(false),
                }
            }
        }
    }
}

/// Outcome of comparing two complements for the same `(L, I)`.
#[derive(Clone, Debug)]
pub struct ComplementChange {
    pub fhat: IsotropicFrame,
    /// `phi(b_j)` in ambient coordinates (columns), living in `LambdaTilde^*`.
    pub phi: RatMatrix,
    /// `I`-coordinates of `beta(b_j)` (columns).
    pub beta: RatMatrix,
    /// `iota - iota_hat` on the `Itilde_L` basis, as classes of the old frame.
    pub delta_iota: Vec<FqmElement>,
}

/// Compares the frame with the one built from another unimodular complement
/// `ihat`, computing the maps `phi`, `beta` and the glue difference, and
/// verifying the compatibility conditions that tie them together.
pub fn change_complement(frame: &IsotropicFrame, ihat: &Sublattice) -> Result<ComplementChange> {
    let fhat = build_frame(&frame.lattice, &frame.i, ihat)?;
    let r = frame.rank_i();
    let n = frame.lattice.dim();

    // Decompose the normalized new complement basis in the old frame:
    // hhat_j = beta(b_j) + phi(b_j) + b_j.
    let mut phi = RatMatrix::zero(n, r);
    let mut beta = RatMatrix::zero(r, r);
    for j in 0..r {
        let h = fhat.itilde_basis.col_range(j, j + 1);
        let dec = frame.decompose(&h)?;
        // The Utilde-part must be exactly b_j.
        if dec.utilde != frame.itilde_basis.col_range(j, j + 1) {
            return Err(Error::Internal(
                "normalized complement bases do not correspond".into(),
            ));
        }
        let wclass = frame
            .delta_lambda
            .class_of(&dec.w)
            .ok_or_else(|| Error::Internal("phi does not map into Lambda^*".into()))?;
        for i in 0..n {
            phi[(i, j)] = dec.w[(i, 0)].clone();
        }
        let ucoords = frame.coords(&dec.u)?.col_rows(0, r);
        for i in 0..r {
            beta[(i, j)] = ucoords[(i, 0)].clone();
        }

        // beta b_j + I_{L*} = -iota^*(p phi b_j).
        let rep = frame.iota_dual_rep(&wclass);
        let total = dec.u.add(&rep)?;
        if !frame.i_lstar.contains(&total) {
            return Err(Error::Internal(
                "beta is not compatible with iota^* on the new complement".into(),
            ));
        }
    }

    // delta_iota on the Itilde_L basis, compared inside the old frame's
    // Delta_Lambda; it must equal the restriction of p compose phi.
    let mut delta_iota = Vec::new();
    for k in 0..frame.itilde_l.rank() {
        let ut = frame.itilde_l.basis().col_range(k, k + 1);
        let old = frame.iota_of(&ut).expect("basis vector of Itilde_L");
        // Corresponding element of the new complement with the same
        // I-pairings: same coordinates against the normalized bases.
        let c = frame.itilde_l_coords.col_range(k, k + 1).to_rational();
        let uhat = fhat.itilde_basis.mul(&c)?;
        let new = fhat
            .iota_of(&uhat)
            .ok_or_else(|| Error::Internal("transported vector is not in Itilde_L-hat".into()))?;
        let new_in_old = transport_class(&fhat, frame, &new)?;
        let diff = frame.delta_lambda.sub(&old, &new_in_old);

        // Restriction of p compose phi.
        let phi_ut = phi.mul(&c)?;
        let phi_class = frame
            .delta_lambda
            .class_of(&phi_ut)
            .ok_or_else(|| Error::Internal("phi image is not in Lambda^*".into()))?;
        if diff != phi_class {
            return Err(Error::Internal(
                "glue difference does not match the restriction of p phi".into(),
            ));
        }
        delta_iota.push(diff);
    }

    Ok(ComplementChange {
        fhat,
        phi,
        beta,
        delta_iota,
    })
}

/// Moves a `Delta_Lambda`-class of `from` to the corresponding class of
/// `to` through the canonical identification (projection along `U`).
pub fn transport_class(
    from: &IsotropicFrame,
    to: &IsotropicFrame,
    class: &FqmElement,
) -> Result<FqmElement> {
    let lift = from.delta_lambda.lift(class);
    let dec = to.decompose(&lift)?;
    to.delta_lambda
        .class_of(&dec.w)
        .ok_or_else(|| Error::Internal("transported lift leaves Lambda^*".into()))
}

/// Decides whether the glue class is trivial, i.e. whether some complement
/// has a vanishing glue map. On success a witness complement is produced
/// and re-verified against the simplified dual-lattice splitting.
pub fn iota_class_trivial(frame: &IsotropicFrame) -> Result<(bool, Option<Sublattice>)> {
    let r = frame.rank_i();
    // Unknowns x_j = h(b_j) in Delta_Lambda with sum_j coords[j][i] x_j = iota_i.
    let c = frame.itilde_l_coords.transpose();
    let Some(xs) = solve_module_linear(&frame.delta_lambda, &c, &frame.iota) else {
        return Ok((false, None));
    };

    // Witness: new complement spanned by beta_j + phi_j + b_j with
    // p phi_j = x_j and beta_j = -(iota^* rep of x_j).
    let n = frame.lattice.dim();
    let mut gens = RatMatrix::zero(n, r);
    for j in 0..r {
        let phi_j = frame.delta_lambda.lift(&xs[j]);
        let beta_j = frame.iota_dual_rep(&xs[j]).neg();
        let b_j = frame.itilde_basis.col_range(j, j + 1);
        let g = beta_j.add(&phi_j)?.add(&b_j)?;
        for i in 0..n {
            gens[(i, j)] = g[(i, 0)].clone();
        }
    }
    let witness = Sublattice::new(&frame.lattice, gens)?;
    let fhat = build_frame(&frame.lattice, &frame.i, &witness)?;
    if fhat
        .iota_images()
        .iter()
        .any(|e| !fhat.delta_lambda.is_zero_elt(e))
    {
        return Err(Error::Internal(
            "witness complement has non-zero glue".into(),
        ));
    }
    // With iota = 0 the dual lattice splits off the complement directly.
    let ihat_sub = Sublattice::new(&frame.lattice, fhat.itilde_basis.clone())?;
    let sum = fhat.i_lstar.sum(&fhat.lambda_tilde_dual)?.sum(&ihat_sub)?;
    if sum != frame.lattice.dual() {
        return Err(Error::Internal(
            "witness complement does not split the dual lattice".into(),
        ));
    }
    let sum_i = fhat
        .i_lstar
        .sum(&fhat.lambda_tilde_dual)?
        .sum(&fhat.itilde_l)?;
    let iperp_lstar = frame.i.perp_in(&frame.lattice.dual())?;
    let lstar_i = frame.lattice.full().sum(&iperp_lstar)?;
    if sum_i != lstar_i {
        return Err(Error::Internal(
            "witness complement does not split L*_I".into(),
        ));
    }
    Ok((true, Some(witness)))
}

impl RatMatrix {
    /// Rows `lo..hi` (helper for frame coordinate blocks).
    pub fn col_rows(&self, lo: usize, hi: usize) -> RatMatrix {
        Matrix::from_fn(hi - lo, self.cols(), |i, j| self[(lo + i, j)].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rvec(v: Vec<(i64, i64)>) -> RatMatrix {
        RatMatrix::from_fn(v.len(), 1, |i, _| Rat::new(Int::from(v[i].0), Int::from(v[i].1)))
    }

    fn ivec(v: Vec<i64>) -> RatMatrix {
        RatMatrix::from_fn(v.len(), 1, |i, _| Rat::from_integer(Int::from(v[i])))
    }

    fn frame_for(name: &str) -> IsotropicFrame {
        let l = fixtures::by_name(name).unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = unimodular_complement(&l, &i).unwrap();
        build_frame(&l, &i, &it).unwrap()
    }

    #[test]
    fn complement_fix_h() {
        let l = fixtures::by_name("fix-h").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = unimodular_complement(&l, &i).unwrap();
        assert_eq!(it.basis(), &ivec(vec![0, 1]));
        let f = build_frame(&l, &i, &it).unwrap();
        assert_eq!(f.rank_w(), 0);
        assert!(f.delta_lambda().is_trivial());
        assert!(f.alpha().is_zero());
        // e2 decomposes as pure Utilde.
        let d = f.decompose(&ivec(vec![0, 1])).unwrap();
        assert!(d.u.is_zero() && d.w.is_zero());
        assert_eq!(d.utilde, ivec(vec![0, 1]));
    }

    #[test]
    fn complement_fix_g3_is_mu() {
        let l = fixtures::by_name("fix-g3").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = unimodular_complement(&l, &i).unwrap();
        // mu = (1/8) v1 + (1/2) v2 - (1/4) v3 = G^{-1} e1.
        assert_eq!(it.basis(), &rvec(vec![(1, 8), (1, 2), (-1, 4)]));
    }

    #[test]
    fn complement_fix_l5() {
        let l = fixtures::by_name("fix-l5").unwrap();
        let i = fixtures::standard_isotropic(&l).unwrap();
        let it = unimodular_complement(&l, &i).unwrap();
        let expect = ivec(vec![0, 1, 0, 0, 0]).hstack(&ivec(vec![0, 0, 0, 1, 0])).unwrap();
        assert_eq!(it.basis(), &expect.lattice_canonical());
    }

    #[test]
    fn frame_fix_g3_worked_example() {
        let f = frame_for("fix-g3");
        // alpha(mu) = (1/16) v1 since mu^2 = 1/8.
        assert_eq!(f.alpha()[(0, 0)], Rat::new(Int::from(1), Int::from(16)));
        // I_{L*} = Z (1/2) v1.
        assert_eq!(f.i_lstar().basis(), &rvec(vec![(1, 2), (0, 1), (0, 1)]));
        assert_eq!(f.index_ilstar_over_i(), Int::from(2));
        // Itilde_L = Z (2 mu).
        assert_eq!(f.itilde_l().basis(), &rvec(vec![(1, 4), (1, 1), (-1, 2)]));
        // Delta_Lambda = Z/2 and iota(2mu) is its non-zero element.
        assert_eq!(f.delta_lambda().invariants(), &[Int::from(2)]);
        assert_eq!(f.iota_images(), &[vec![Int::from(1)]]);
        // q(iota(2mu)) = 1/4 = (2mu)^2/2 mod Z.
        assert_eq!(
            f.delta_lambda().q(&vec![Int::from(1)]),
            Rat::new(Int::from(1), Int::from(4))
        );
        // [Itilde : Itilde_L] = |H_I| = 2.
        let itilde_sub = f.complement().clone();
        assert_eq!(itilde_sub.index_of(f.itilde_l()).unwrap(), Int::from(2));
    }

    #[test]
    fn decompose_v2_in_g3() {
        let f = frame_for("fix-g3");
        let d = f.decompose(&ivec(vec![0, 1, 0])).unwrap();
        assert_eq!(d.u, rvec(vec![(-1, 4), (0, 1), (0, 1)]));
        assert_eq!(d.w, rvec(vec![(0, 1), (0, 1), (1, 2)]));
        assert_eq!(d.utilde, rvec(vec![(1, 4), (1, 1), (-1, 2)]));
        // Membership by decomposition: v2 is a lattice vector.
        assert!(f
            .membership_by_decomposition(&ivec(vec![0, 1, 0]), Target::L)
            .unwrap());
    }

    #[test]
    fn membership_mu_in_g3() {
        let f = frame_for("fix-g3");
        let mu = rvec(vec![(1, 8), (1, 2), (-1, 4)]);
        assert!(f.membership_by_decomposition(&mu, Target::Lstar).unwrap());
        assert!(!f.membership_by_decomposition(&mu, Target::LstarI).unwrap());
        assert!(!f.membership_by_decomposition(&mu, Target::L).unwrap());
        assert!(f.direct_membership(&mu, Target::Lstar));
        assert!(!f.direct_membership(&mu, Target::LstarI));
    }

    #[test]
    fn frame_fix_l5_trivial_glue() {
        let f = frame_for("fix-l5");
        assert!(f.alpha().is_zero());
        assert!(f.iota_images().iter().all(|e| f.delta_lambda().is_zero_elt(e)));
        assert_eq!(f.i_lstar().basis(), f.isotropic().basis());
        assert_eq!(f.i_iota().basis(), f.isotropic().basis());
        assert_eq!(f.delta_lambda().invariants(), &[Int::from(2)]);
    }

    #[test]
    fn frame_fix_g5_glue_and_i_iota() {
        let f = frame_for("fix-g5");
        // Itilde_L has basis {2mu, e5}; iota is nonzero on 2mu and zero on e5.
        assert_eq!(f.delta_lambda().invariants(), &[Int::from(2)]);
        let images = f.iota_images();
        assert_eq!(images.len(), 2);
        let nonzero: Vec<bool> = images
            .iter()
            .map(|e| !f.delta_lambda().is_zero_elt(e))
            .collect();
        assert_eq!(nonzero.iter().filter(|&&b| b).count(), 1);
        // iota^*(gen) = (1/4) v1 modulo I_{L*}.
        let rep = f.iota_dual_rep(&f.delta_lambda().generator(0));
        let quarter_v1 = rvec(vec![(1, 4), (0, 1), (0, 1), (0, 1), (0, 1)]);
        let diff = rep.sub(&quarter_v1).unwrap();
        assert!(f.i_lstar().contains(&diff));
        // I_iota = span((1/4) v1, e4).
        let expect = quarter_v1
            .hstack(&ivec(vec![0, 0, 0, 1, 0]))
            .unwrap()
            .lattice_canonical();
        assert_eq!(f.i_iota().basis(), &expect);
        assert_eq!(f.index_iiota_over_ilstar(), Int::from(2));
    }

    #[test]
    fn change_complement_identity_and_l5() {
        let f = frame_for("fix-l5");
        // Identity change: phi = 0, beta = 0, delta_iota = 0.
        let ch = change_complement(&f, f.complement()).unwrap();
        assert!(ch.phi.is_zero());
        assert!(ch.beta.is_zero());
        assert!(ch
            .delta_iota
            .iter()
            .all(|e| f.delta_lambda().is_zero_elt(e)));

        // Ihat = span(e2 + e5, e4): phi hits e5 in Lambda, so the glue
        // difference vanishes.
        let l = f.lattice().clone();
        let gens = ivec(vec![0, 1, 0, 0, 1]).hstack(&ivec(vec![0, 0, 0, 1, 0])).unwrap();
        let ihat = Sublattice::new(&l, gens).unwrap();
        let ch = change_complement(&f, &ihat).unwrap();
        assert!(!ch.phi.is_zero());
        assert!(ch
            .delta_iota
            .iter()
            .all(|e| f.delta_lambda().is_zero_elt(e)));
        // Membership verdicts agree between the frames on a sample grid.
        for target in [Target::L, Target::Lstar, Target::LstarI] {
            for k in 0..64 {
                let v = RatMatrix::from_fn(5, 1, |i, _| {
                    Rat::new(Int::from((k >> i) & 1), Int::from(2))
                });
                assert_eq!(
                    f.membership_by_decomposition(&v, target).unwrap(),
                    ch.fhat.membership_by_decomposition(&v, target).unwrap()
                );
            }
        }
    }

    #[test]
    fn glue_class_triviality() {
        for (name, expect) in [
            ("fix-h", true),
            ("fix-g3", false),
            ("fix-l5", true),
            ("fix-l5b", true),
            ("fix-l7", true),
            ("fix-g5", false),
        ] {
            let f = frame_for(name);
            let (trivial, witness) = iota_class_trivial(&f).unwrap();
            assert_eq!(trivial, expect, "fixture {name}");
            assert_eq!(witness.is_some(), expect);
        }
    }

    fn check_half_box(name: &str) {
        let f = frame_for(name);
        let n = f.lattice().dim();
        let mut idx = vec![0i64; n];
        'grid: loop {
            let v = RatMatrix::from_fn(n, 1, |i, _| Rat::new(Int::from(idx[i] - 2), Int::from(2)));
            for target in [Target::L, Target::Lstar, Target::LstarI] {
                assert_eq!(
                    f.membership_by_decomposition(&v, target).unwrap(),
                    f.direct_membership(&v, target),
                    "{name} {:?} {:?}",
                    idx,
                    target
                );
            }
            let mut c = 0;
            loop {
                idx[c] += 1;
                if idx[c] <= 4 {
                    break;
                }
                idx[c] = 0;
                c += 1;
                if c == n {
                    break 'grid;
                }
            }
        }
    }

    #[test]
    fn half_integer_box_membership_agrees() {
        // Scaled boxes exercise false positives that the integer box cannot.
        check_half_box("fix-h");
        check_half_box("fix-g3");
    }
}
