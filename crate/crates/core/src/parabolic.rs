//! Coordinates for elements of the parabolic subgroup attached to an
//! isotropic frame, the integral Heisenberg group, membership tests for the
//! discriminant-kernel parabolic (with a brute-force oracle), determinant
//! and spinor data, congruence subgroups `SL(J, I)`, and the obstruction
//! cocycle `b_M`.
//!
//! Conventions. An element is encoded by `(M, gamma, psi, eta)`:
//! the Levi part `(M, gamma)` acts first, the unipotent part `(psi, eta)`
//! second. `M` is written in the `I`-basis of `U`, `gamma` in the
//! `Lambda`-basis of `W`. `psi: W -> U` is stored as the matrix whose
//! column `j` holds the `I`-coordinates of the image of the `j`-th *dual*
//! basis vector of `Lambda`, so `psi` maps `Lambda^*` into `I` exactly when
//! the matrix is integral, and `Lambda` into `I` exactly when `psi * G_W`
//! is integral. `eta: U^* -> U` is written in the dual bases, where
//! anti-symmetry of the bilinear form is anti-symmetry of the matrix.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::finquad::qz_normalize;
use crate::frame::IsotropicFrame;
use crate::lattice::Sublattice;
use crate::mat::Matrix;
use crate::spinor;
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// Coordinate tuple for a parabolic element.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicCoords {
    pub m: RatMatrix,
    pub gamma: RatMatrix,
    pub psi: RatMatrix,
    pub eta: RatMatrix,
}

impl ParabolicCoords {
    pub fn identity(frame: &IsotropicFrame) -> Self {
        let r = frame.rank_i();
        let m = frame.rank_w();
        ParabolicCoords {
            m: RatMatrix::identity(r),
            gamma: RatMatrix::identity(m),
            psi: RatMatrix::zero(r, m),
            eta: RatMatrix::zero(r, r),
        }
    }

    /// Shape and invariant checks against a frame: `det M != 0`,
    /// `gamma in O(W)`, `eta` anti-symmetric.
    pub fn validate(&self, frame: &IsotropicFrame) -> Result<()> {
        let r = frame.rank_i();
        let w = frame.rank_w();
        if self.m.rows() != r || self.m.cols() != r {
            return Err(Error::ShapeMismatch("M must be r x r".into()));
        }
        if self.gamma.rows() != w || self.gamma.cols() != w {
            return Err(Error::ShapeMismatch("gamma must be m x m".into()));
        }
        if self.psi.rows() != r || self.psi.cols() != w {
            return Err(Error::ShapeMismatch("psi must be r x m".into()));
        }
        if self.eta.rows() != r || self.eta.cols() != r {
            return Err(Error::ShapeMismatch("eta must be r x r".into()));
        }
        if self.m.det()?.is_zero() {
            return Err(Error::Precondition("M is singular".into()));
        }
        let g = frame.gram_w();
        if &self.gamma.transpose().mul(g)?.mul(&self.gamma)? != g {
            return Err(Error::Precondition("gamma is not an isometry of W".into()));
        }
        if self.eta != self.eta.transpose().neg() {
            return Err(Error::Precondition("eta is not anti-symmetric".into()));
        }
        Ok(())
    }
}

/// Unipotent element `(psi, eta)` of the Heisenberg group.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergElement {
    pub psi: RatMatrix,
    pub eta: RatMatrix,
}

impl HeisenbergElement {
    pub fn identity(frame: &IsotropicFrame) -> Self {
        HeisenbergElement {
            psi: RatMatrix::zero(frame.rank_i(), frame.rank_w()),
            eta: RatMatrix::zero(frame.rank_i(), frame.rank_i()),
        }
    }

    pub fn validate(&self, frame: &IsotropicFrame) -> Result<()> {
        if self.psi.rows() != frame.rank_i() || self.psi.cols() != frame.rank_w() {
            return Err(Error::ShapeMismatch("psi must be r x m".into()));
        }
        if self.eta.rows() != frame.rank_i() || self.eta.cols() != frame.rank_i() {
            return Err(Error::ShapeMismatch("eta must be r x r".into()));
        }
        if self.eta != self.eta.transpose().neg() {
            return Err(Error::Precondition("eta is not anti-symmetric".into()));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        HeisenbergElement {
            psi: self.psi.neg(),
            eta: self.eta.neg(),
        }
    }
}

/// Isometry of `V` in `L`-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalElement {
    pub a: RatMatrix,
}

impl OrthogonalElement {
    pub fn new(frame: &IsotropicFrame, a: RatMatrix) -> Result<Self> {
        let g = frame.lattice().gram_rat();
        if &a.transpose().mul(g)?.mul(&a)? != g {
            return Err(Error::Precondition("matrix is not an isometry of V".into()));
        }
        Ok(OrthogonalElement { a })
    }
}

/// `psi * psi^* : U^* -> U` in the dual-basis convention.
fn psi_psi_star(frame: &IsotropicFrame, psi: &RatMatrix, phi: &RatMatrix) -> Result<RatMatrix> {
    psi.mul(frame.gram_w())?.mul(&phi.transpose())
}

/// Realizes the coordinates as an isometry of `V`. The Levi part acts
/// first, the unipotent part second.
pub fn assemble(coords: &ParabolicCoords, frame: &IsotropicFrame) -> Result<OrthogonalElement> {
    coords.validate(frame)?;
    let r = frame.rank_i();
    let w = frame.rank_w();
    let n = frame.lattice().dim();
    let m_inv_t = coords
        .m
        .inverse()
        .map_err(|_| Error::Precondition("M is singular".into()))?
        .transpose();

    // psi as a map Wtilde -> U in the Lambda-basis, and its dual.
    let psi_on_lambda = coords.psi.mul(frame.gram_w())?; // r x m
    let psi_star = coords.psi.transpose(); // m x r, Utilde -> Wtilde

    let alpha = frame.alpha();
    let upper_right = coords
        .m
        .mul(alpha)?
        .sub(&alpha.mul(&m_inv_t)?)?
        .sub(&psi_psi_star(frame, &coords.psi, &coords.psi)?
            .scale(&Rat::new(Int::one(), Int::from(2)))
            .mul(&m_inv_t)?)?
        .sub(&coords.eta.mul(&m_inv_t)?)?;

    let mut blk = RatMatrix::zero(n, n);
    let set = |blk: &mut RatMatrix, r0: usize, c0: usize, m: &RatMatrix| {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                blk[(r0 + i, c0 + j)] = m[(i, j)].clone();
            }
        }
    };
    set(&mut blk, 0, 0, &coords.m);
    set(&mut blk, 0, r, &psi_on_lambda.mul(&coords.gamma)?.neg());
    set(&mut blk, 0, r + w, &upper_right);
    set(&mut blk, r, r, &coords.gamma);
    set(&mut blk, r, r + w, &psi_star.mul(&m_inv_t)?);
    set(&mut blk, r + w, r + w, &m_inv_t);

    let a = frame.frame_basis().mul(&blk)?.mul(frame.frame_basis_inv())?;
    let g = frame.lattice().gram_rat();
    if &a.transpose().mul(g)?.mul(&a)? != g {
        return Err(Error::Internal("assembled element is not an isometry".into()));
    }
    Ok(OrthogonalElement { a })
}

/// Exact inverse of [`assemble`]: reads the coordinates of an isometry
/// stabilizing `U`. `Error::NotInParabolic` when `A U != U`.
pub fn decompose_parabolic(
    elem: &OrthogonalElement,
    frame: &IsotropicFrame,
) -> Result<ParabolicCoords> {
    let g = frame.lattice().gram_rat();
    if &elem.a.transpose().mul(g)?.mul(&elem.a)? != g {
        return Err(Error::Precondition("matrix is not an isometry of V".into()));
    }
    let r = frame.rank_i();
    let w = frame.rank_w();
    let n = frame.lattice().dim();
    let blk = frame
        .frame_basis_inv()
        .mul(&elem.a)?
        .mul(frame.frame_basis())?;
    // U-stability: everything below the first block row in the U-columns.
    for i in r..n {
        for j in 0..r {
            if !blk[(i, j)].is_zero() {
                return Err(Error::NotInParabolic);
            }
        }
    }
    for i in r + w..n {
        for j in r..r + w {
            if !blk[(i, j)].is_zero() {
                return Err(Error::NotInParabolic);
            }
        }
    }
    let take = |r0: usize, c0: usize, rows: usize, cols: usize| {
        Matrix::from_fn(rows, cols, |i, j| blk[(r0 + i, c0 + j)].clone())
    };
    let m = take(0, 0, r, r);
    let gamma = take(r, r, w, w);
    let m_inv_t = m
        .inverse()
        .map_err(|_| Error::Internal("parabolic element with singular M".into()))?
        .transpose();
    if take(r + w, r + w, r, r) != m_inv_t {
        return Err(Error::Internal("Utilde-block is not the inverse dual".into()));
    }
    let gamma_inv = gamma
        .inverse()
        .map_err(|_| Error::Internal("gamma is singular".into()))?;
    let psi_on_lambda = take(0, r, r, w).neg().mul(&gamma_inv)?;
    let psi = psi_on_lambda.mul(frame.gram_w_inv())?;
    if take(r, r + w, w, r) != psi.transpose().mul(&m_inv_t)? {
        return Err(Error::Internal("Wtilde/Utilde block mismatch".into()));
    }
    // upper_right = M alpha - alpha M^{-T} - S M^{-T} - eta M^{-T}, so
    // eta = (M alpha - alpha M^{-T} - S M^{-T} - upper_right) M^T.
    let alpha = frame.alpha();
    let s = psi_psi_star(frame, &psi, &psi)?.scale(&Rat::new(Int::one(), Int::from(2)));
    let eta = m
        .mul(alpha)?
        .sub(&alpha.mul(&m_inv_t)?)?
        .sub(&s.mul(&m_inv_t)?)?
        .sub(&take(0, r + w, r, r))?
        .mul(&m.transpose())?;
    let coords = ParabolicCoords { m, gamma, psi, eta };
    coords.validate(frame)?;
    Ok(coords)
}

/// Heisenberg product
/// `(psi, eta) (phi, rho) = (psi + phi, eta + rho + (psi phi^* - phi psi^*)/2)`.
pub fn heis_mul(
    h: &HeisenbergElement,
    k: &HeisenbergElement,
    frame: &IsotropicFrame,
) -> Result<HeisenbergElement> {
    h.validate(frame)?;
    k.validate(frame)?;
    let b = psi_psi_star(frame, &h.psi, &k.psi)?
        .sub(&psi_psi_star(frame, &k.psi, &h.psi)?)?
        .scale(&Rat::new(Int::one(), Int::from(2)));
    Ok(HeisenbergElement {
        psi: h.psi.add(&k.psi)?,
        eta: h.eta.add(&k.eta)?.add(&b)?,
    })
}

/// Canonical representative of the coset `c_psi`: an anti-symmetric matrix
/// with half-integer entries (strictly-upper entries in `[0,1)`) such that
/// `psi psi^*/2 + c_psi` is integral. Requires `psi(Lambda^*) <= I`.
pub fn c_psi(psi: &RatMatrix, frame: &IsotropicFrame) -> Result<RatMatrix> {
    if !psi.is_integral() {
        return Err(Error::NotIntegral("psi does not map Lambda^* into I".into()));
    }
    let s = psi_psi_star(frame, psi, psi)?.scale(&Rat::new(Int::one(), Int::from(2)));
    let r = s.rows();
    for i in 0..r {
        if !s[(i, i)].is_integer() {
            return Err(Error::NotIntegral(
                "psi psi^*/2 has a non-integral diagonal".into(),
            ));
        }
    }
    let mut eta0 = RatMatrix::zero(r, r);
    for i in 0..r {
        for j in i + 1..r {
            let f = qz_normalize(&s[(i, j)]);
            eta0[(i, j)] = f.clone();
            eta0[(j, i)] = -f;
        }
    }
    debug_assert!(s.add(&eta0)?.is_integral());
    Ok(eta0)
}

/// Membership in the integral Heisenberg group: `psi in Hom(Lambda^*, I)`
/// and `eta - c_psi in Hom^as(I^*, I)`.
pub fn zheis_member(h: &HeisenbergElement, frame: &IsotropicFrame) -> Result<bool> {
    h.validate(frame)?;
    if !h.psi.is_integral() {
        return Ok(false);
    }
    let eta0 = c_psi(&h.psi, frame)?;
    Ok(h.eta.sub(&eta0)?.is_integral())
}

/// `(det, spinor_sign)` of an isometry of `V`, via reflection
/// factorization.
pub fn det_spinor(elem: &OrthogonalElement, frame: &IsotropicFrame) -> Result<(i32, i32)> {
    spinor::det_spinor(frame.lattice().gram_rat(), &elem.a)
}

/// `gamma in SO^+(W)` under the fixed sign convention.
pub fn gamma_in_so_plus(gamma: &RatMatrix, frame: &IsotropicFrame) -> Result<bool> {
    let (det, spin) = spinor::det_spinor(frame.gram_w(), gamma)?;
    Ok(det == 1 && spin == 1)
}

/// `gamma in Gamma_Lambda`: integral on `Lambda`, trivial on
/// `Delta_Lambda`, and in `SO^+(W)`.
pub fn gamma_lambda_member(gamma: &RatMatrix, frame: &IsotropicFrame) -> Result<bool> {
    let g = frame.gram_w();
    if &gamma.transpose().mul(g)?.mul(gamma)? != g {
        return Ok(false);
    }
    if !gamma.is_integral() {
        return Ok(false);
    }
    if frame.rank_w() > 0 {
        let delta_action = gamma
            .sub(&RatMatrix::identity(frame.rank_w()))?
            .mul(frame.gram_w_inv())?;
        if !delta_action.is_integral() {
            return Ok(false);
        }
    }
    gamma_in_so_plus(gamma, frame)
}

/// Identity-component test: `det M > 0` and `gamma in SO^+(W_R)`.
pub fn in_identity_component(coords: &ParabolicCoords, frame: &IsotropicFrame) -> Result<bool> {
    coords.validate(frame)?;
    if !coords.m.det()?.is_positive() {
        return Ok(false);
    }
    gamma_in_so_plus(&coords.gamma, frame)
}

/// `M in SL(J, I)`: `M` an automorphism of `I` with determinant one such
/// that `(Id - M) J <= I`. `M` is given in the `I`-basis of the frame; `J`
/// must satisfy `I <= J <= U` with finite index.
pub fn sl_ji_member(m: &RatMatrix, j: &Sublattice, i: &Sublattice) -> Result<bool> {
    let jc = i
        .basis()
        .solve(j.basis())
        .map_err(|_| Error::Precondition("J is not contained in the span of I".into()))?;
    if jc.rows() != jc.cols() {
        return Err(Error::Precondition("J does not have full rank in U".into()));
    }
    if !j.contains_lattice(i) {
        return Err(Error::Precondition("I is not contained in J".into()));
    }
    if !m.is_integral() || m.det()? != Rat::one() {
        return Ok(false);
    }
    let id = RatMatrix::identity(m.rows());
    Ok(id.sub(m)?.mul(&jc)?.is_integral())
}

/// Per-condition report of the integral membership test.
#[derive(Clone, Debug)]
pub struct MemberReport {
    /// `det M > 0` and `gamma in SO^+(W_R)`.
    pub identity_component: bool,
    /// `gamma in Gamma_Lambda`.
    pub cond_gamma: bool,
    /// `M in SL(I_{L*}, I)`.
    pub cond_m: bool,
    /// `psi(Lambda) <= I` and `psi^Delta = (Id - M) iota^*`.
    pub cond_psi: bool,
    /// `eta` matches the stated formula up to `Hom(I^*, I)`.
    pub cond_eta: bool,
    pub member: bool,
    pub witness: Vec<String>,
}

/// Evaluates the four membership conditions for the discriminant-kernel
/// parabolic, reporting each one separately.
pub fn membership_conditions(
    coords: &ParabolicCoords,
    frame: &IsotropicFrame,
) -> Result<MemberReport> {
    coords.validate(frame)?;
    let mut witness = Vec::new();

    let identity_component = in_identity_component(coords, frame)?;
    if !identity_component {
        witness.push("outside the identity component".to_string());
    }

    let cond_gamma = gamma_lambda_member(&coords.gamma, frame)?;
    if !cond_gamma {
        witness.push("gamma does not fix Delta_Lambda / preserve Lambda".to_string());
    }

    let cond_m = sl_ji_member(&coords.m, frame.i_lstar(), frame.isotropic())?;
    if !cond_m {
        witness.push("M is not in SL(I_{L*}, I)".to_string());
    }

    let cond_psi = psi_condition(coords, frame)?;
    if !cond_psi {
        witness.push("psi fails Hom(Lambda, I) or the iota^* compatibility".to_string());
    }

    let cond_eta = eta_condition(coords, frame)?;
    if !cond_eta {
        witness.push("eta residual is not in Hom(I^*, I)".to_string());
    }

    let member = identity_component && cond_gamma && cond_m && cond_psi && cond_eta;
    Ok(MemberReport {
        identity_component,
        cond_gamma,
        cond_m,
        cond_psi,
        cond_eta,
        member,
        witness,
    })
}

fn psi_condition(coords: &ParabolicCoords, frame: &IsotropicFrame) -> Result<bool> {
    // psi(Lambda) <= I.
    let psi_on_lambda = coords.psi.mul(frame.gram_w())?;
    if !psi_on_lambda.is_integral() {
        return Ok(false);
    }
    // psi^Delta = (Id - M) iota^* on the Delta_Lambda generators, checked
    // against the frame's fixed iota^* representatives. (The right-hand
    // side is representative-independent exactly when M fixes I_{L*}/I,
    // which is condition (ii); outside of that the verdict is moot since
    // membership already fails.)
    let id = RatMatrix::identity(frame.rank_i());
    let id_minus_m = id.sub(&coords.m)?;
    for k in 0..frame.delta_lambda().num_gens() {
        let lift = frame.delta_lambda().generator_lifts().col_range(k, k + 1);
        let lambda_coords = frame.lambda_tilde().basis().solve(&lift)?;
        let lhs = psi_on_lambda.mul(&lambda_coords)?;
        let rhs = id_minus_m.mul(&frame.iota_dual_reps().col_range(k, k + 1))?;
        if !lhs.sub(&rhs)?.is_integral() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eta_condition(coords: &ParabolicCoords, frame: &IsotropicFrame) -> Result<bool> {
    let residual = eta_residual(coords, frame)?;
    Ok(residual.is_integral())
}

/// `(Id-M) alpha (Id-M~*) + M alpha - alpha M~* - psi psi^*/2 - eta`, which
/// must lie in `Hom(I^*, I)` for membership.
fn eta_residual(coords: &ParabolicCoords, frame: &IsotropicFrame) -> Result<RatMatrix> {
    let id = RatMatrix::identity(frame.rank_i());
    let alpha = frame.alpha();
    let mt = coords.m.transpose();
    let id_minus_m = id.sub(&coords.m)?;
    let id_minus_mt = id.sub(&mt)?;
    let s = psi_psi_star(frame, &coords.psi, &coords.psi)?
        .scale(&Rat::new(Int::one(), Int::from(2)));
    id_minus_m
        .mul(alpha)?
        .mul(&id_minus_mt)?
        .add(&coords.m.mul(alpha)?)?
        .sub(&alpha.mul(&mt)?)?
        .sub(&s)?
        .sub(&coords.eta)
}

/// Brute-force oracle: membership of an isometry in the discriminant-kernel
/// parabolic, straight from the definitions on `V` and `L`.
pub fn member_direct(elem: &OrthogonalElement, frame: &IsotropicFrame) -> Result<bool> {
    let a = &elem.a;
    let g = frame.lattice().gram_rat();
    let n = frame.lattice().dim();
    // A L = L.
    if !a.is_integral() {
        return Ok(false);
    }
    if a.det()?.abs() != Rat::one() {
        return Ok(false);
    }
    // Isometry.
    if &a.transpose().mul(g)?.mul(a)? != g {
        return Ok(false);
    }
    // Trivial action on the discriminant group: (A - Id) L* <= L.
    let ginv = g.inverse()?;
    if !a.sub(&RatMatrix::identity(n))?.mul(&ginv)?.is_integral() {
        return Ok(false);
    }
    // Identity component of O(V): det 1 and positive spinor norm.
    let (det, spin) = spinor::det_spinor(g, a)?;
    if det != 1 || spin != 1 {
        return Ok(false);
    }
    // A U = U with positive determinant on U.
    let au = a.mul(frame.i_basis())?;
    let Ok(mu) = frame.i_basis().solve(&au) else {
        return Ok(false);
    };
    if frame.i_basis().mul(&mu)? != au {
        return Ok(false);
    }
    if !mu.det()?.is_positive() {
        return Ok(false);
    }
    Ok(true)
}

/// Completes a Levi pair to a full member: finds `psi` and `eta` so that
/// `(M, gamma, psi, eta)` passes the membership test. Requires
/// `M in SL(I_{L*}, I)` and `gamma in Gamma_Lambda`.
pub fn complete_to_element(
    m: &RatMatrix,
    gamma: &RatMatrix,
    frame: &IsotropicFrame,
) -> Result<ParabolicCoords> {
    if !sl_ji_member(m, frame.i_lstar(), frame.isotropic())? {
        return Err(Error::Precondition("M is not in SL(I_{L*}, I)".into()));
    }
    if !gamma_lambda_member(gamma, frame)? {
        return Err(Error::Precondition("gamma is not in Gamma_Lambda".into()));
    }
    let r = frame.rank_i();
    let w = frame.rank_w();
    let id = RatMatrix::identity(r);
    let id_minus_m = id.sub(m)?;

    // psi on the dual basis of Lambda: classes of the dual basis vectors
    // are pushed through (Id - M) iota^*; the resulting matrix is
    // guaranteed to map Lambda into I.
    let mut psi = RatMatrix::zero(r, w);
    if w > 0 {
        let dual_cols = frame.lambda_tilde().basis().mul(frame.gram_w_inv())?;
        for j in 0..w {
            let col = dual_cols.col_range(j, j + 1);
            let class = frame
                .delta_lambda()
                .class_of(&col)
                .ok_or_else(|| Error::Internal("dual basis vector outside Lambda^*".into()))?;
            let rep = frame.iota_dual_reps().mul(&RatMatrix::from_fn(
                class.len(),
                1,
                |i, _| Rat::from_integer(class[i].clone()),
            ))?;
            let val = id_minus_m.mul(&rep)?;
            for i in 0..r {
                psi[(i, j)] = val[(i, 0)].clone();
            }
        }
        let psi_on_lambda = psi.mul(frame.gram_w())?;
        if !psi_on_lambda.is_integral() {
            return Err(Error::Internal(
                "constructed psi does not map Lambda into I".into(),
            ));
        }
    }

    // eta: anti-symmetric part M alpha - alpha M^T plus the canonical
    // anti-symmetrization of the symmetric residue.
    let alpha = frame.alpha();
    let mt = m.transpose();
    let a0 = m.mul(alpha)?.sub(&alpha.mul(&mt)?)?;
    let s = psi_psi_star(frame, &psi, &psi)?.scale(&Rat::new(Int::one(), Int::from(2)));
    let b = id_minus_m.mul(alpha)?.mul(&id.sub(&mt)?)?.sub(&s)?;
    let mut nmat = RatMatrix::zero(r, r);
    for i in 0..r {
        if !b[(i, i)].is_integer() {
            return Err(Error::Internal(
                "symmetric residue has a non-integral diagonal".into(),
            ));
        }
        for j in i + 1..r {
            let f = qz_normalize(&b[(i, j)]);
            nmat[(i, j)] = f.clone();
            nmat[(j, i)] = -f;
        }
    }
    if !b.sub(&nmat)?.is_integral() {
        return Err(Error::Internal(
            "symmetric residue is not half-integral".into(),
        ));
    }
    let eta = a0.add(&nmat)?;

    let coords = ParabolicCoords {
        m: m.clone(),
        gamma: gamma.clone(),
        psi,
        eta,
    };
    let report = membership_conditions(&coords, frame)?;
    if !report.member {
        return Err(Error::Internal(format!(
            "completion failed the membership conditions: {:?}",
            report.witness
        )));
    }
    Ok(coords)
}

/// Values of the obstruction cocycle `b_M = (Id - M) iota^*` on the
/// `Delta_Lambda` generators, as `I`-coordinates modulo `I`.
#[derive(Clone, Debug)]
pub struct CocycleValues {
    pub reps: RatMatrix,
}

impl CocycleValues {
    pub fn is_zero(&self) -> bool {
        self.reps.is_integral()
    }

    /// Equality modulo `I` (integral difference).
    pub fn equivalent(&self, other: &CocycleValues) -> bool {
        self.reps
            .sub(&other.reps)
            .map(|d| d.is_integral())
            .unwrap_or(false)
    }
}

/// The cocycle `b_M`. Requires `M in SL(I_{L*}, I)`.
pub fn cocycle_b(m: &RatMatrix, frame: &IsotropicFrame) -> Result<CocycleValues> {
    if !sl_ji_member(m, frame.i_lstar(), frame.isotropic())? {
        return Err(Error::Precondition("M is not in SL(I_{L*}, I)".into()));
    }
    let id = RatMatrix::identity(frame.rank_i());
    let reps = id.sub(m)?.mul(frame.iota_dual_reps())?;
    Ok(CocycleValues { reps })
}

/// Checks the cocycle law `b_{MN} = b_M + M b_N` exactly on the
/// `Delta_Lambda` generators.
pub fn cocycle_law_check(m: &RatMatrix, n: &RatMatrix, frame: &IsotropicFrame) -> Result<bool> {
    let bm = cocycle_b(m, frame)?;
    let bn = cocycle_b(n, frame)?;
    let bmn = cocycle_b(&m.mul(n)?, frame)?;
    let rhs = CocycleValues {
        reps: bm.reps.add(&m.mul(&bn.reps)?)?,
    };
    Ok(bmn.equivalent(&rhs))
}

/// Congruence description of `SL(J, I)` for rank-2 `I`, in an adapted
/// basis: `J = span(alpha/N, beta/D)` with `D | N`.
#[derive(Clone, Debug)]
pub struct CongruenceParams {
    pub n: Int,
    pub d: Int,
    /// `I`-coordinates of the adapted basis `(alpha, beta)` (columns);
    /// unimodular over `Z`.
    pub adapted_basis: IntMatrix,
    pub description: String,
}

impl CongruenceParams {
    /// Change of coordinates: matrix in the adapted basis to the frame's
    /// `I`-basis.
    pub fn to_frame_basis(&self, m_adapted: &RatMatrix) -> RatMatrix {
        let p = self.adapted_basis.to_rational();
        let pinv = p.inverse().expect("unimodular adapted basis");
        p.mul(m_adapted).unwrap().mul(&pinv).unwrap()
    }

    /// Congruence membership of an integer matrix written in the adapted
    /// basis: `a = d = 1 (mod N)`, `c = 0 (mod N)`, `b = 0 (mod D)`.
    pub fn congruence_holds(&self, m_adapted: &IntMatrix) -> bool {
        let one = Int::one();
        (m_adapted[(0, 0)].clone() - &one).mod_floor(&self.n).is_zero()
            && (m_adapted[(1, 1)].clone() - &one).mod_floor(&self.n).is_zero()
            && m_adapted[(1, 0)].mod_floor(&self.n).is_zero()
            && m_adapted[(0, 1)].mod_floor(&self.d).is_zero()
    }
}

/// Adapted congruence parameters of `SL(J, I)` for a rank-2 frame; `J`
/// defaults to `I_{L*}` in [`rank2_congruence_params`].
pub fn rank2_congruence_params_for(
    frame: &IsotropicFrame,
    j: &Sublattice,
) -> Result<CongruenceParams> {
    if frame.rank_i() != 2 {
        return Err(Error::Precondition("congruence parameters need rank 2".into()));
    }
    let cj = j
        .basis()
        .solve(frame.isotropic().basis())?
        .to_integer()
        .ok_or_else(|| Error::Precondition("I is not contained in J".into()))?;
    let (dg, _, v) = cj.snf();
    // I-basis adapted to the chain I <= J: columns of v, reordered so that
    // the larger invariant factor comes first.
    let s1 = dg[(0, 0)].clone();
    let s2 = dg[(1, 1)].clone();
    let iv = frame.isotropic().basis().mul(&v.to_rational())?;
    let swapped = iv.col_range(1, 2).hstack(&iv.col_range(0, 1))?;
    let adapted = frame
        .isotropic()
        .basis()
        .solve(&swapped)?
        .to_integer()
        .ok_or_else(|| Error::Internal("adapted basis is not integral".into()))?;
    let description = if s2.is_one() {
        "SL2(Z)".to_string()
    } else {
        format!(
            "Gamma_1^0({},{}) = Gamma_1({}) cap Gamma^0({}): a = d = 1 (mod {}), c = 0 (mod {}), b = 0 (mod {})",
            s2, s1, s2, s1, s2, s2, s1
        )
    };
    Ok(CongruenceParams {
        n: s2,
        d: s1,
        adapted_basis: adapted,
        description,
    })
}

/// Congruence parameters of `SL(I_{L*}, I)`.
pub fn rank2_congruence_params(frame: &IsotropicFrame) -> Result<CongruenceParams> {
    rank2_congruence_params_for(frame, frame.i_lstar())
}
