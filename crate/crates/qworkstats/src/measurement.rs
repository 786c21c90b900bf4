//! Measurement models, instruments, and outcome branches.
//!
//! A measurement model is the physical realization of a POVM: an apparatus
//! state ξ, a premeasurement unitary U on system ⊗ apparatus, and a sharp
//! pointer observable read out on the apparatus afterwards. This module
//! holds the model type, the instrument it induces, the per-outcome branch
//! decomposition of the post-measurement compound state, and constructors
//! for ideal (Lüders), repeatable, and noisy realizations of projective
//! measurements, plus the commuting apparatus extension.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::opcore::{
    validate, DensityState, Operator, ValidationKind, P_FLOOR, TOL_HERM, TOL_PSD, TOL_UNITARY,
};

/// Completeness tolerance for POVMs (effects summing to the identity).
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on the repeatable-spec support conditions.
pub const REPEATABLE_SPEC_TOL: f64 = 1e-9;
/// Hilbert-Schmidt orthogonality tolerance for conditional compound states.
pub const GEMENGE_ORTHO_TOL: f64 = 1e-9;
/// Pointer-sector commutator tolerance for the apparatus extension.
pub const POINTER_COMMUTATOR_TOL: f64 = 1e-9;

/// Opaque measurement outcome label.
///
/// A single measurement uses one-part labels; sequences of measurements use
/// tuples of parts, e.g. `("+", "e")`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(Vec<String>);

impl Outcome {
    pub fn new(label: impl Into<String>) -> Self {
        Outcome(vec![label.into()])
    }

    pub fn tuple<I, S>(parts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Outcome(parts.into_iter().map(Into::into).collect())
    }

    pub fn parts(&self) -> &[String] {
        &self.0
    }
}

impl From<&str> for Outcome {
    fn from(s: &str) -> Self {
        Outcome::new(s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "({})", self.0.join(","))
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.len() == 1 {
            serializer.serialize_str(&self.0[0])
        } else {
            self.0.serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            One(String),
            Many(Vec<String>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::One(s) => Ok(Outcome::new(s)),
            Repr::Many(v) if !v.is_empty() => Ok(Outcome(v)),
            Repr::Many(_) => Err(de::Error::custom("outcome label must not be empty")),
        }
    }
}

/// Sharp pointer observable on the apparatus: orthogonal projectors summing
/// to the apparatus identity, one per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerObservable {
    outcomes: Vec<Outcome>,
    projectors: Vec<Operator>,
}

impl PointerObservable {
    pub fn new(outcomes: Vec<Outcome>, projectors: Vec<Operator>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != projectors.len() {
            return Err(Error::InvalidPointer(format!(
                "{} outcomes for {} projectors",
                outcomes.len(),
                projectors.len()
            )));
        }
        let dims = projectors[0].dims().to_vec();
        let mut sum = Operator::zeros(dims.clone());
        for (i, p) in projectors.iter().enumerate() {
            if p.dims() != dims {
                return Err(Error::InvalidPointer("projector dims differ".into()));
            }
            let rep = validate(p, ValidationKind::Projector);
            if !rep.passed {
                return Err(Error::InvalidPointer(format!(
                    "projector for {} is not a projector (violation {:.3e})",
                    outcomes[i], rep.max_violation
                )));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let cross = (p * q).frobenius_norm();
                if cross > TOL_HERM {
                    return Err(Error::InvalidPointer(format!(
                        "projectors for {} and {} overlap ({cross:.3e})",
                        outcomes[i], outcomes[j]
                    )));
                }
            }
            sum = &sum + p;
        }
        let gap = (&sum - &Operator::identity(dims)).frobenius_norm();
        if gap > TOL_HERM {
            return Err(Error::InvalidPointer(format!(
                "projectors do not sum to the identity (gap {gap:.3e})"
            )));
        }
        Ok(Self {
            outcomes,
            projectors,
        })
    }

    /// Pointer over computational-basis index groups.
    pub fn from_basis_groups(dim: usize, groups: &[(Outcome, Vec<usize>)]) -> Result<Self> {
        let mut outcomes = Vec::new();
        let mut projectors = Vec::new();
        for (label, idxs) in groups {
            let mut p = Operator::zeros(vec![dim]);
            for &i in idxs {
                p = &p + &Operator::basis_projector(vec![dim], i);
            }
            outcomes.push(label.clone());
            projectors.push(p);
        }
        Self::new(outcomes, projectors)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn index_of(&self, x: &Outcome) -> Option<usize> {
        self.outcomes.iter().position(|o| o == x)
    }

    pub fn projector(&self, x: &Outcome) -> Option<&Operator> {
        self.index_of(x).map(|i| &self.projectors[i])
    }
}

/// Positive operator valued measure: effects 0 ≤ M_x ≤ 1 summing to the
/// identity, one per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    outcomes: Vec<Outcome>,
    effects: Vec<Operator>,
}

impl Povm {
    pub fn new(outcomes: Vec<Outcome>, effects: Vec<Operator>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.len() != effects.len() {
            return Err(Error::InvalidPovm(format!(
                "{} outcomes for {} effects",
                outcomes.len(),
                effects.len()
            )));
        }
        let dims = effects[0].dims().to_vec();
        let mut sum = Operator::zeros(dims.clone());
        for (i, m) in effects.iter().enumerate() {
            if m.dims() != dims {
                return Err(Error::InvalidPovm("effect dims differ".into()));
            }
            let rep = validate(m, ValidationKind::PovmElement);
            if !rep.passed {
                return Err(Error::InvalidPovm(format!(
                    "effect for {} violates 0 ≤ M ≤ 1 ({:.3e})",
                    outcomes[i], rep.max_violation
                )));
            }
            sum = &sum + m;
        }
        let gap = (&sum - &Operator::identity(dims)).frobenius_norm();
        if gap > POVM_COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects do not sum to the identity (gap {gap:.3e})"
            )));
        }
        Ok(Self { outcomes, effects })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn index_of(&self, x: &Outcome) -> Option<usize> {
        self.outcomes.iter().position(|o| o == x)
    }

    pub fn effect(&self, x: &Outcome) -> Option<&Operator> {
        self.index_of(x).map(|i| &self.effects[i])
    }

    pub fn is_projective(&self) -> bool {
        self.effects
            .iter()
            .all(|m| validate(m, ValidationKind::Projector).passed)
    }

    /// Born-rule probability tr[M_x ρ].
    pub fn probability(&self, x: &Outcome, rho: &DensityState) -> Result<f64> {
        let m = self
            .effect(x)
            .ok_or_else(|| Error::UnknownOutcome(x.clone()))?;
        Ok(rho.expectation(m))
    }
}

/// Physical realization of a measurement: apparatus state ξ, premeasurement
/// unitary U on S⊗A, pointer observable on A, and the system/apparatus
/// Hamiltonian pairs at the start (t = 0) and end (t = τ) of the process.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    dim_s: usize,
    dim_a: usize,
    xi: DensityState,
    u: Operator,
    pointer: PointerObservable,
    h_s0: Operator,
    h_s_tau: Operator,
    h_a0: Operator,
    h_a_tau: Operator,
}

impl MeasurementModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        xi: DensityState,
        u: Operator,
        pointer: PointerObservable,
        h_s0: Operator,
        h_s_tau: Operator,
        h_a0: Operator,
        h_a_tau: Operator,
    ) -> Result<Self> {
        if u.dims().len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "premeasurement unitary must have dims [dim_S, dim_A], got {:?}",
                u.dims()
            )));
        }
        let dim_s = u.dims()[0];
        let dim_a = u.dims()[1];
        let uv = u.unitarity_violation();
        if uv > TOL_UNITARY {
            return Err(Error::NotUnitary { violation: uv });
        }
        if xi.dim() != dim_a {
            return Err(Error::DimensionMismatch(format!(
                "apparatus state dim {} != dim_A {}",
                xi.dim(),
                dim_a
            )));
        }
        for (name, h, d) in [
            ("H_S(0)", &h_s0, dim_s),
            ("H_S(tau)", &h_s_tau, dim_s),
            ("H_A(0)", &h_a0, dim_a),
            ("H_A(tau)", &h_a_tau, dim_a),
        ] {
            if h.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has dim {} but expected {d}",
                    h.dim()
                )));
            }
            let v = h.hermiticity_violation();
            if v > TOL_HERM {
                return Err(Error::NonHermitianInput { violation: v });
            }
        }
        if pointer.projectors()[0].dim() != dim_a {
            return Err(Error::DimensionMismatch(format!(
                "pointer projectors have dim {} but dim_A is {dim_a}",
                pointer.projectors()[0].dim()
            )));
        }
        let model = Self {
            dim_s,
            dim_a,
            xi,
            u,
            pointer,
            h_s0,
            h_s_tau,
            h_a0,
            h_a_tau,
        };
        // The induced effects must form a valid POVM.
        induced_povm(&model)?;
        Ok(model)
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn xi(&self) -> &DensityState {
        &self.xi
    }

    pub fn premeasurement_unitary(&self) -> &Operator {
        &self.u
    }

    pub fn pointer(&self) -> &PointerObservable {
        &self.pointer
    }

    pub fn h_s0(&self) -> &Operator {
        &self.h_s0
    }

    pub fn h_s_tau(&self) -> &Operator {
        &self.h_s_tau
    }

    pub fn h_a0(&self) -> &Operator {
        &self.h_a0
    }

    pub fn h_a_tau(&self) -> &Operator {
        &self.h_a_tau
    }

    pub fn outcomes(&self) -> &[Outcome] {
        self.pointer.outcomes()
    }

    /// Root-sum-square of ‖[P_A^x, H_A(τ)]‖_F over the pointer sectors.
    ///
    /// Vanishes exactly when the pointer observable commutes with H_A(τ),
    /// which is the precondition for interpreting compound energy changes
    /// as work.
    pub fn pointer_commutator_norm(&self) -> f64 {
        self.pointer
            .projectors()
            .iter()
            .map(|p| p.commutator(&self.h_a_tau).frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// ρ ⊗ ξ on S⊗A.
    pub fn joint_input(&self, rho: &DensityState) -> Operator {
        rho.operator().tensor(self.xi.operator())
    }

    /// U (ρ ⊗ ξ) U†.
    pub fn premeasured(&self, rho: &DensityState) -> Operator {
        let j = self.joint_input(rho);
        &(&self.u * &j) * &self.u.adjoint()
    }

    /// 1_S ⊗ P_A^x.
    pub fn joint_pointer(&self, x: &Outcome) -> Result<Operator> {
        let p = self
            .pointer
            .projector(x)
            .ok_or_else(|| Error::UnknownOutcome(x.clone()))?;
        Ok(Operator::identity(vec![self.dim_s]).tensor(p))
    }

    /// H_S(0) ⊗ 1 + 1 ⊗ H_A(0).
    pub fn total_h0(&self) -> Operator {
        &self.h_s0.tensor(&Operator::identity(vec![self.dim_a]))
            + &Operator::identity(vec![self.dim_s]).tensor(&self.h_a0)
    }

    /// H_S(τ) ⊗ 1 + 1 ⊗ H_A(τ).
    pub fn total_h_tau(&self) -> Operator {
        &self.h_s_tau.tensor(&Operator::identity(vec![self.dim_a]))
            + &Operator::identity(vec![self.dim_s]).tensor(&self.h_a_tau)
    }

    /// Objectification channel Y ↦ Σ_x P_A^x Y P_A^x applied to a joint
    /// operator on S⊗A.
    pub fn apply_objectification(&self, joint: &Operator) -> Operator {
        let mut out = Operator::zeros(joint.dims().to_vec());
        for x in self.outcomes() {
            let p = self.joint_pointer(x).expect("own outcome");
            out = &out + &(&(&p * joint) * &p);
        }
        out
    }

    /// Post-measurement compound state ϱ_{S+A} = Σ_x P_A^x U(ρ⊗ξ)U† P_A^x.
    pub fn objectified(&self, rho: &DensityState) -> Operator {
        self.apply_objectification(&self.premeasured(rho))
    }
}

/// Applies the instrument for outcome `x` to an arbitrary operator on S:
/// tr_A[(1 ⊗ P_A^x) U(σ⊗ξ)U† (1 ⊗ P_A^x)].
///
/// This is the workhorse behind [`instrument_apply`]; it skips state
/// validation so it can be used on non-Hermitian arguments such as H·ρ in
/// weak-value numerators.
pub fn instrument_apply_operator(
    model: &MeasurementModel,
    sigma: &Operator,
    x: &Outcome,
) -> Result<Operator> {
    if sigma.dim() != model.dim_s {
        return Err(Error::DimensionMismatch(format!(
            "instrument input has dim {} but dim_S is {}",
            sigma.dim(),
            model.dim_s
        )));
    }
    let p = model.joint_pointer(x)?;
    let joint = sigma.tensor(model.xi.operator());
    let moved = &(&model.u * &joint) * &model.u.adjoint();
    let sandwiched = &(&p * &moved) * &p;
    sandwiched.partial_trace(&[0])
}

/// Instrument of the model: the unnormalized conditional system operator
/// for outcome `x`, whose trace is the outcome probability.
pub fn instrument_apply(
    model: &MeasurementModel,
    rho: &DensityState,
    x: &Outcome,
) -> Result<Operator> {
    instrument_apply_operator(model, rho.operator(), x)
}

/// Per-outcome record of the post-measurement decomposition.
///
/// Branches with probability below the floor are flagged undefined and the
/// conditional states are omitted rather than dividing by near-zero.
#[derive(Clone, Debug)]
pub struct OutcomeBranch {
    pub outcome: Outcome,
    pub prob: f64,
    pub defined: bool,
    pub rho_x: Option<DensityState>,
    pub xi_x: Option<DensityState>,
    pub joint_x: Option<DensityState>,
}

/// Born-rule branch decomposition of the measurement.
pub fn outcome_branches(model: &MeasurementModel, rho: &DensityState) -> Result<Vec<OutcomeBranch>> {
    let premeasured = model.premeasured(rho);
    let mut branches = Vec::with_capacity(model.outcomes().len());
    for x in model.outcomes() {
        let p_op = model.joint_pointer(x)?;
        let jx = &(&p_op * &premeasured) * &p_op;
        let prob = jx.trace().re.max(0.0);
        if prob < P_FLOOR {
            branches.push(OutcomeBranch {
                outcome: x.clone(),
                prob,
                defined: false,
                rho_x: None,
                xi_x: None,
                joint_x: None,
            });
            continue;
        }
        let joint_x = DensityState::new(jx.scale_re(1.0 / prob).hermitized())?;
        let rho_x = joint_x.partial_trace(&[0])?;
        let xi_x = joint_x.partial_trace(&[1])?;
        branches.push(OutcomeBranch {
            outcome: x.clone(),
            prob,
            defined: true,
            rho_x: Some(rho_x),
            xi_x: Some(xi_x),
            joint_x: Some(joint_x),
        });
    }
    Ok(branches)
}

/// POVM induced on the system by the model:
/// M_x = tr_A[(1 ⊗ ξ^{1/2}) U† (1 ⊗ P_A^x) U (1 ⊗ ξ^{1/2})].
///
/// The symmetrized ξ^{1/2} form keeps the effects positive semidefinite in
/// the presence of roundoff.
pub fn induced_povm(model: &MeasurementModel) -> Result<Povm> {
    let sqrt_xi = model.xi.operator().sqrt_psd()?;
    let lift = Operator::identity(vec![model.dim_s]).tensor(&sqrt_xi);
    let u_adj = model.u.adjoint();
    let mut effects = Vec::with_capacity(model.outcomes().len());
    for x in model.outcomes() {
        let p = model.joint_pointer(x)?;
        let inner = &(&u_adj * &p) * &model.u;
        let full = &(&lift * &inner) * &lift;
        effects.push(full.partial_trace(&[0])?.hermitized());
    }
    Povm::new(model.outcomes().to_vec(), effects)
}

/// Completes a set of orthonormal columns to a unitary matrix by running
/// modified Gram-Schmidt over the computational basis. Deterministic.
fn complete_unitary(dim: usize, columns: Vec<DVector<C64>>) -> DMatrix<C64> {
    let mut cols = columns;
    let mut extra = 0;
    while cols.len() < dim {
        let mut best: Option<DVector<C64>> = None;
        let mut best_norm = 0.0;
        for i in 0..dim {
            let mut v = DVector::<C64>::zeros(dim);
            v[i] = C64::ONE;
            for c in &cols {
                let overlap = c.adjoint() * &v;
                v -= c * overlap[(0, 0)];
            }
            let n = v.norm();
            if n > best_norm {
                best_norm = n;
                best = Some(v);
            }
        }
        let mut v = best.expect("basis exhausted before completing unitary");
        // Re-orthogonalize once for numerical hygiene.
        for c in &cols {
            let overlap = c.adjoint() * &v;
            v -= c * overlap[(0, 0)];
        }
        v /= C64::new(v.norm(), 0.0);
        cols.push(v);
        extra += 1;
        assert!(extra <= dim, "unitary completion failed to converge");
    }
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

/// Ideal (Lüders) measurement model of a projective POVM.
///
/// The apparatus has one dimension per outcome, starts in the pointer-ready
/// basis state |0⟩, and the pointer is the computational basis. Apparatus
/// Hamiltonians are the identity, so the pointer trivially commutes with
/// H_A(τ).
pub fn make_ideal_model(
    pvm: &Povm,
    h_s0: &Operator,
    h_s_tau: &Operator,
) -> Result<MeasurementModel> {
    for m in pvm.effects() {
        let rep = validate(m, ValidationKind::Projector);
        if !rep.passed {
            return Err(Error::NotProjective {
                violation: rep.max_violation,
            });
        }
    }
    let dim_s = pvm.effects()[0].dim();
    let dim_a = pvm.len();
    let full = dim_s * dim_a;

    // Columns for inputs |j⟩⊗|0⟩: Σ_x (M_x |j⟩) ⊗ |x⟩.
    let mut cols = Vec::with_capacity(dim_s);
    for j in 0..dim_s {
        let mut v = DVector::<C64>::zeros(full);
        for (ix, m) in pvm.effects().iter().enumerate() {
            for s in 0..dim_s {
                v[s * dim_a + ix] += m.matrix()[(s, j)];
            }
        }
        cols.push(v);
    }
    // Inputs |j⟩⊗|a⟩ for a > 0 are completed deterministically; they never
    // meet the apparatus ready state.
    let mut ordered = Vec::with_capacity(full);
    ordered.extend(cols);
    let u_mat = complete_unitary_with_input_order(full, dim_a, ordered);
    let u = Operator::new(vec![dim_s, dim_a], u_mat)?;

    let xi = DensityState::basis_state(vec![dim_a], 0)?;
    let groups: Vec<(Outcome, Vec<usize>)> = pvm
        .outcomes()
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), vec![i]))
        .collect();
    let pointer = PointerObservable::from_basis_groups(dim_a, &groups)?;
    let h_a = Operator::identity(vec![dim_a]);
    MeasurementModel::new(
        xi,
        u,
        pointer,
        h_s0.clone(),
        h_s_tau.clone(),
        h_a.clone(),
        h_a,
    )
}

/// Places the given columns at the inputs (j, a=0) and completes the rest.
fn complete_unitary_with_input_order(
    full: usize,
    dim_a: usize,
    ready_cols: Vec<DVector<C64>>,
) -> DMatrix<C64> {
    // Build the full column list with Gram-Schmidt completion, then permute
    // so that defined columns sit at input index j*dim_a + 0.
    let dim_s = ready_cols.len();
    let completed = complete_unitary(full, ready_cols);
    let mut u = DMatrix::<C64>::zeros(full, full);
    let mut next_extra = dim_s;
    for j in 0..dim_s {
        for a in 0..dim_a {
            let input = j * dim_a + a;
            if a == 0 {
                u.set_column(input, &completed.column(j).into_owned());
            } else {
                u.set_column(input, &completed.column(next_extra).into_owned());
                next_extra += 1;
            }
        }
    }
    u
}

/// Mixture weights and intra-eigenspace unitaries defining a repeatable
/// (Type-3) instrument I_x(ρ) = Σ_i q_i V_{x,i} M_x ρ M_x V_{x,i}†.
///
/// `unitaries[x][i]` must preserve M_x and act as the identity on the
/// orthogonal complement of its support.
#[derive(Clone, Debug)]
pub struct RepeatableSpec {
    weights: Vec<f64>,
    unitaries: Vec<Vec<Operator>>,
    apparatus_dim: Option<usize>,
}

impl RepeatableSpec {
    pub fn new(weights: Vec<f64>, unitaries: Vec<Vec<Operator>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::SpecMismatch("empty mixture".into()));
        }
        if weights.iter().any(|&q| q < 0.0) {
            return Err(Error::SpecMismatch("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::SpecMismatch(format!(
                "weights sum to {total}, not 1"
            )));
        }
        for row in &unitaries {
            if row.len() != weights.len() {
                return Err(Error::SpecMismatch(format!(
                    "outcome row has {} unitaries for {} weights",
                    row.len(),
                    weights.len()
                )));
            }
        }
        Ok(Self {
            weights,
            unitaries,
            apparatus_dim: None,
        })
    }

    /// Trivial spec: all V_{x,i} = 1 with the given weights.
    pub fn trivial(weights: Vec<f64>, n_outcomes: usize, dim_s: usize) -> Result<Self> {
        let row: Vec<Operator> = (0..weights.len())
            .map(|_| Operator::identity(vec![dim_s]))
            .collect();
        Self::new(weights, vec![row; n_outcomes])
    }

    /// Requests a larger apparatus than the minimal rank·|X|.
    pub fn with_apparatus_dim(mut self, dim: usize) -> Self {
        self.apparatus_dim = Some(dim);
        self
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[Vec<Operator>] {
        &self.unitaries
    }
}

/// Repeatable (Type-3) measurement model of a projective POVM.
///
/// The apparatus dimension is rank·|X| (or the requested override), the
/// apparatus starts in Σ_i q_i |φ_{x_0,i}⟩⟨φ_{x_0,i}|, and the pointer
/// sectors are blocks of r basis states per outcome, honouring the rank
/// bound r ≤ dim(H_A)/|X|.
pub fn make_repeatable_model(
    pvm: &Povm,
    spec: &RepeatableSpec,
    h_s0: &Operator,
    h_s_tau: &Operator,
) -> Result<MeasurementModel> {
    for m in pvm.effects() {
        let rep = validate(m, ValidationKind::Projector);
        if !rep.passed {
            return Err(Error::NotProjective {
                violation: rep.max_violation,
            });
        }
    }
    let dim_s = pvm.effects()[0].dim();
    let n_out = pvm.len();
    let r = spec.rank();
    if spec.unitaries.len() != n_out {
        return Err(Error::SpecMismatch(format!(
            "{} unitary rows for {} outcomes",
            spec.unitaries.len(),
            n_out
        )));
    }
    let dim_a = spec.apparatus_dim.unwrap_or(r * n_out);
    if r * n_out > dim_a {
        return Err(Error::RankBound {
            rank: r,
            outcomes: n_out,
            dim: dim_a,
        });
    }
    // Support conditions: V M V† = M and V = 1 off the support of M.
    let id_s = Operator::identity(vec![dim_s]);
    for (ix, m) in pvm.effects().iter().enumerate() {
        let comp = &id_s - m;
        for (i, v) in spec.unitaries[ix].iter().enumerate() {
            if v.dim() != dim_s {
                return Err(Error::SpecMismatch(format!(
                    "V[{ix}][{i}] has dim {}, expected {dim_s}",
                    v.dim()
                )));
            }
            let uv = v.unitarity_violation();
            if uv > TOL_UNITARY {
                return Err(Error::NotUnitary { violation: uv });
            }
            let keep = (&(&(v * m) * &v.adjoint()) - m).frobenius_norm();
            let off = (&(v * &comp) - &comp).frobenius_norm();
            if keep > REPEATABLE_SPEC_TOL || off > REPEATABLE_SPEC_TOL {
                return Err(Error::SpecMismatch(format!(
                    "V[{ix}][{i}] violates the support condition \
                     (preserve {keep:.3e}, off-support {off:.3e})"
                )));
            }
        }
    }

    // Apparatus basis layout: |φ_{x,i}⟩ = |x·r + i⟩; ready states are the
    // x = 0 block.
    let full = dim_s * dim_a;
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(dim_s * r);
    for j in 0..dim_s {
        for i in 0..r {
            // Input |j⟩ ⊗ |φ_i⟩ maps to Σ_x V_{x,i}(M_x|j⟩) ⊗ |φ_{x,i}⟩.
            let mut v = DVector::<C64>::zeros(full);
            for (ix, m) in pvm.effects().iter().enumerate() {
                let vm = spec.unitaries[ix][i].matrix() * m.matrix();
                for s in 0..dim_s {
                    v[s * dim_a + (ix * r + i)] += vm[(s, j)];
                }
            }
            cols.push(v);
        }
    }
    let u_mat = complete_block_inputs(full, dim_a, dim_s, r, cols);
    let u = Operator::new(vec![dim_s, dim_a], u_mat)?;

    let mut xi_mat = DMatrix::<C64>::zeros(dim_a, dim_a);
    for (i, &q) in spec.weights.iter().enumerate() {
        xi_mat[(i, i)] = C64::new(q, 0.0);
    }
    let xi = DensityState::from_matrix(vec![dim_a], xi_mat)?;

    let mut groups = Vec::with_capacity(n_out);
    for (ix, x) in pvm.outcomes().iter().enumerate() {
        groups.push((x.clone(), (ix * r..(ix + 1) * r).collect::<Vec<_>>()));
    }
    // Any leftover apparatus dimensions join the last sector so the pointer
    // stays complete.
    if r * n_out < dim_a {
        groups
            .last_mut()
            .expect("nonempty")
            .1
            .extend(r * n_out..dim_a);
    }
    let pointer = PointerObservable::from_basis_groups(dim_a, &groups)?;
    let h_a = Operator::identity(vec![dim_a]);
    MeasurementModel::new(
        xi,
        u,
        pointer,
        h_s0.clone(),
        h_s_tau.clone(),
        h_a.clone(),
        h_a,
    )
}

/// Completion helper for the repeatable constructor: the defined columns sit
/// at inputs (j, i) with i < r; the rest are Gram-Schmidt completed.
fn complete_block_inputs(
    full: usize,
    dim_a: usize,
    dim_s: usize,
    r: usize,
    ready_cols: Vec<DVector<C64>>,
) -> DMatrix<C64> {
    let completed = complete_unitary(full, ready_cols);
    let mut u = DMatrix::<C64>::zeros(full, full);
    let mut next_extra = dim_s * r;
    let mut defined = 0;
    for j in 0..dim_s {
        for a in 0..dim_a {
            let input = j * dim_a + a;
            if a < r {
                u.set_column(input, &completed.column(j * r + a).into_owned());
                defined += 1;
            } else {
                u.set_column(input, &completed.column(next_extra).into_owned());
                next_extra += 1;
            }
        }
    }
    debug_assert_eq!(defined, dim_s * r);
    u
}

/// Noisy projective measurement: SWAP premeasurement with a full-rank
/// apparatus of the same dimension as the system.
///
/// The pointer sectors coincide with the measured projectors, so after the
/// SWAP the apparatus carries ρ and the readout implements the PVM; the
/// post-measurement system state is ξ for every outcome.
pub fn make_noisy_model(
    pvm: &Povm,
    xi: &DensityState,
    h_s0: &Operator,
    h_s_tau: &Operator,
) -> Result<MeasurementModel> {
    for m in pvm.effects() {
        let rep = validate(m, ValidationKind::Projector);
        if !rep.passed {
            return Err(Error::NotProjective {
                violation: rep.max_violation,
            });
        }
    }
    let dim_s = pvm.effects()[0].dim();
    if xi.dim() != dim_s {
        return Err(Error::DimensionMismatch(format!(
            "noisy measurement needs dim_A = dim_S = {dim_s}, got {}",
            xi.dim()
        )));
    }
    let min_ev = xi
        .eigenvalues()
        .first()
        .copied()
        .unwrap_or(f64::NEG_INFINITY);
    if min_ev <= TOL_PSD {
        return Err(Error::NotFullRank(min_ev));
    }
    let full = dim_s * dim_s;
    let mut swap = DMatrix::<C64>::zeros(full, full);
    for s in 0..dim_s {
        for a in 0..dim_s {
            swap[(a * dim_s + s, s * dim_s + a)] = C64::ONE;
        }
    }
    let u = Operator::new(vec![dim_s, dim_s], swap)?;
    let pointer = PointerObservable::new(pvm.outcomes().to_vec(), pvm.effects().to_vec())?;
    let h_a = Operator::identity(vec![dim_s]);
    MeasurementModel::new(
        xi.clone(),
        u,
        pointer,
        h_s0.clone(),
        h_s_tau.clone(),
        h_a.clone(),
        h_a,
    )
}

/// Extends the model with a pointer-copy apparatus B, leaving per-outcome
/// statistics and compound energy changes unchanged.
///
/// Requires the pointer to commute with H_A(τ). B has one ready state plus
/// one basis state per outcome; the copy unitary V = Σ_x P_A^x ⊗ T_x swaps
/// the ready state with the outcome's record state, so it commutes with
/// H_A(τ) ⊗ 1_B, and H_B is proportional to the identity.
pub fn extend_model_commuting(model: &MeasurementModel) -> Result<MeasurementModel> {
    let norm = model.pointer_commutator_norm();
    if norm > POINTER_COMMUTATOR_TOL {
        return Err(Error::CommutatorViolation { norm });
    }
    let dim_a = model.dim_a;
    let n_out = model.outcomes().len();
    let dim_b = n_out + 1;

    // V = Σ_x P_A^x ⊗ T_x with T_x the transposition |0⟩ ↔ |1+x⟩ on B.
    let mut v = Operator::zeros(vec![dim_a, dim_b]);
    for (ix, p) in model.pointer.projectors().iter().enumerate() {
        let mut t = DMatrix::<C64>::identity(dim_b, dim_b);
        t[(0, 0)] = C64::ZERO;
        t[(1 + ix, 1 + ix)] = C64::ZERO;
        t[(0, 1 + ix)] = C64::ONE;
        t[(1 + ix, 0)] = C64::ONE;
        let t_op = Operator::new(vec![dim_b], t)?;
        v = &v + &p.tensor(&t_op);
    }

    let full_dims = [model.dim_s, dim_a, dim_b];
    let u_big = model.u.embed(&full_dims, &[0, 1])?;
    let v_big = v.embed(&full_dims, &[1, 2])?;
    let u_new = (&v_big * &u_big).regrouped(vec![model.dim_s, dim_a * dim_b])?;

    let xi_b = DensityState::basis_state(vec![dim_b], 0)?;
    let xi_new = model.xi.tensor(&xi_b);
    let xi_new = DensityState::new(xi_new.operator().regrouped(vec![dim_a * dim_b])?)?;

    // Pointer on A⊗B reads the record register; the never-populated ready
    // state is folded into the first outcome's projector to keep the PVM
    // complete over the same outcome set.
    let id_a = Operator::identity(vec![dim_a]);
    let mut projectors = Vec::with_capacity(n_out);
    for ix in 0..n_out {
        let mut p_b = Operator::basis_projector(vec![dim_b], 1 + ix);
        if ix == 0 {
            p_b = &p_b + &Operator::basis_projector(vec![dim_b], 0);
        }
        projectors.push(id_a.tensor(&p_b).regrouped(vec![dim_a * dim_b])?);
    }
    let pointer = PointerObservable::new(model.outcomes().to_vec(), projectors)?;

    let id_b = Operator::identity(vec![dim_b]);
    let h_b = id_b.clone(); // H_B(0) = H_B(τ) ∝ 1.
    let h_a0 = &model.h_a0.tensor(&id_b) + &Operator::identity(vec![dim_a]).tensor(&h_b);
    let h_a_tau = &model.h_a_tau.tensor(&id_b) + &Operator::identity(vec![dim_a]).tensor(&h_b);

    MeasurementModel::new(
        xi_new,
        u_new,
        pointer,
        model.h_s0.clone(),
        model.h_s_tau.clone(),
        h_a0.regrouped(vec![dim_a * dim_b])?,
        h_a_tau.regrouped(vec![dim_a * dim_b])?,
    )
}
