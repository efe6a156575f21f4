//! Two-qubit density-matrix algebra for link-level noise modeling.
//!
//! States are represented as dense complex matrices (dimension 2 for a lone
//! qubit, 4 for a pair) and validated on construction: Hermitian, unit
//! trace, positive semidefinite. Qubit 0 is the first tensor factor, so a
//! two-qubit basis index decomposes as `index = 2 * q0 + q1`.
//!
//! Two noise channels cover the physics needed by the rest of the crate:
//!
//! * replacement depolarization, used for fiber transit, where the affected
//!   qubit is swapped for a maximally mixed one with probability `p`;
//! * combined relaxation/dephasing, used for memory dwell, parameterized by
//!   the usual T1 and T2 constants and realized as amplitude damping
//!   followed by a phase flip.
//!
//! Fidelity is always measured against the maximally entangled pair
//! `(|00> + |11>)/sqrt(2)`, the state every distribution run tries to
//! deliver.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Largest tolerated elementwise deviation from Hermitian symmetry.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Largest tolerated deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as "zero up to roundoff".
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Validation and domain failures for state construction and channels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// The matrix is not 2x2 or 4x4, or a function got the wrong dimension.
    #[error("unsupported density-matrix dimension {dim}: expected 2 or 4")]
    BadDimension { dim: usize },
    /// The qubit index does not exist in a state of this dimension.
    #[error("qubit index {qubit} out of range for a dimension-{dim} state")]
    BadQubit { qubit: usize, dim: usize },
    /// The matrix differs from its conjugate transpose beyond tolerance.
    #[error("matrix is not Hermitian: max |rho - rho^H| entry is {max_dev:e}")]
    NotHermitian { max_dev: f64 },
    /// The trace is not one beyond tolerance.
    #[error("matrix trace deviates from 1 by {deviation:e}")]
    BadTrace { deviation: f64 },
    /// An eigenvalue is negative beyond roundoff.
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    /// A probability argument fell outside [0, 1].
    #[error("{name} must be a probability in [0, 1], got {value}")]
    BadProbability { name: &'static str, value: f64 },
    /// A length, time, or coefficient argument fell outside its domain.
    #[error("{name} must be finite and non-negative, got {value}")]
    BadDomain { name: &'static str, value: f64 },
    /// Decay constants that no physical qubit can have.
    #[error("unphysical decay constants T1 = {t1_ns} ns, T2 = {t2_ns} ns: \
             both must be positive and T2 <= 2*T1")]
    UnphysicalDecay { t1_ns: f64, t2_ns: f64 },
}

/// A validated density matrix of one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps a raw matrix.
    ///
    /// Checks, in order: the shape is square of dimension 2 or 4, the matrix
    /// is Hermitian within [`HERMITICITY_TOL`], the trace is one within
    /// [`TRACE_TOL`], and no eigenvalue is below [`EIGENVALUE_FLOOR`].
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self, StateError> {
        let dim = mat.nrows();
        if (dim != 2 && dim != 4) || mat.ncols() != dim {
            return Err(StateError::BadDimension {
                dim: if mat.ncols() != dim { mat.ncols().max(dim) } else { dim },
            });
        }
        let mut max_dev = 0.0_f64;
        for r in 0..dim {
            for c in 0..dim {
                let dev = (mat[(r, c)] - mat[(c, r)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { max_dev });
        }
        let trace = mat.trace();
        let deviation = (trace - Complex64::new(1.0, 0.0)).norm();
        if deviation > TRACE_TOL {
            return Err(StateError::BadTrace { deviation });
        }
        // Symmetrize before the eigensolve so the decomposition sees an
        // exactly Hermitian input; the asymmetry was already bounded above.
        let herm = (&mat + mat.adjoint()) * real(0.5);
        let eigenvalues = herm.symmetric_eigenvalues();
        let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < EIGENVALUE_FLOOR {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { mat })
    }

    /// Builds the projector onto a pure state given by its amplitudes.
    ///
    /// The amplitude vector must have length 2 or 4 and is normalized
    /// internally; an all-zero vector is rejected.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self, StateError> {
        let dim = amplitudes.len();
        if dim != 2 && dim != 4 {
            return Err(StateError::BadDimension { dim });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(StateError::BadDomain {
                name: "amplitude norm",
                value: norm_sq,
            });
        }
        let scale = norm_sq.sqrt();
        let mut mat = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                mat[(r, c)] = (amplitudes[r] / scale) * (amplitudes[c] / scale).conj();
            }
        }
        Self::from_matrix(mat)
    }

    /// The maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self, StateError> {
        if dim != 2 && dim != 4 {
            return Err(StateError::BadDimension { dim });
        }
        let mat = DMatrix::identity(dim, dim) * real(1.0 / dim as f64);
        Self::from_matrix(mat)
    }

    /// Matrix dimension: 2 for one qubit, 4 for two.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Number of qubits in the state.
    pub fn qubit_count(&self) -> usize {
        if self.dim() == 2 {
            1
        } else {
            2
        }
    }

    /// One matrix entry.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Borrow of the underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// The maximally entangled pair `(|00> + |11>)/sqrt(2)` as a density matrix.
pub fn make_epr() -> DensityMatrix {
    let half = real(0.5);
    let mut mat = DMatrix::zeros(4, 4);
    mat[(0, 0)] = half;
    mat[(0, 3)] = half;
    mat[(3, 0)] = half;
    mat[(3, 3)] = half;
    DensityMatrix::from_matrix(mat).expect("EPR projector is a valid state")
}

/// Depolarization probability accumulated over a fiber span.
///
/// A span of `length_km` with loss-like coefficient `p_l_per_km` (units
/// 1/km, applied base-10) depolarizes with probability
/// `1 - 10^(-length_km * p_l_per_km)`. Both arguments must be finite and
/// non-negative.
pub fn depolar_prob(length_km: f64, p_l_per_km: f64) -> Result<f64, StateError> {
    if !length_km.is_finite() || length_km < 0.0 {
        return Err(StateError::BadDomain {
            name: "length_km",
            value: length_km,
        });
    }
    if !p_l_per_km.is_finite() || p_l_per_km < 0.0 {
        return Err(StateError::BadDomain {
            name: "p_l_per_km",
            value: p_l_per_km,
        });
    }
    Ok(1.0 - 10f64.powf(-length_km * p_l_per_km))
}

/// Replacement depolarization on one qubit.
///
/// With probability `p` the target qubit is replaced by the maximally mixed
/// single-qubit state (its correlations with the partner are destroyed);
/// with probability `1 - p` the state is untouched.
pub fn apply_depolarizing(
    rho: &DensityMatrix,
    qubit: usize,
    p: f64,
) -> Result<DensityMatrix, StateError> {
    check_qubit(qubit, rho.dim())?;
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(StateError::BadProbability { name: "p", value: p });
    }
    let replaced = match rho.dim() {
        2 => DMatrix::identity(2, 2) * real(0.5),
        _ => {
            let kept = trace_out(rho.matrix(), qubit);
            let mixed = DMatrix::identity(2, 2) * real(0.5);
            if qubit == 0 {
                mixed.kronecker(&kept)
            } else {
                kept.kronecker(&mixed)
            }
        }
    };
    let out = rho.matrix() * real(1.0 - p) + replaced * real(p);
    DensityMatrix::from_matrix(out)
}

/// Combined relaxation and dephasing on one qubit for a dwell of `t_ns`.
///
/// `t1_ns` is the relaxation constant and `t2_ns` the total coherence
/// constant; either may be `f64::INFINITY` to switch that process off, and
/// physicality requires `t2_ns <= 2 * t1_ns`. The channel is amplitude
/// damping with decay probability `1 - exp(-t/T1)` followed by a phase flip
/// whose strength supplies the rest of the `exp(-t/T2)` coherence decay.
pub fn apply_t1t2(
    rho: &DensityMatrix,
    qubit: usize,
    t_ns: f64,
    t1_ns: f64,
    t2_ns: f64,
) -> Result<DensityMatrix, StateError> {
    check_qubit(qubit, rho.dim())?;
    if !t_ns.is_finite() || t_ns < 0.0 {
        return Err(StateError::BadDomain {
            name: "t_ns",
            value: t_ns,
        });
    }
    check_decay_pair(t1_ns, t2_ns)?;

    let gamma = 1.0 - decay_factor(t_ns, t1_ns);
    // Amplitude damping already shrinks coherences by sqrt(1 - gamma), i.e.
    // exp(-t/(2 T1)). The residual factor below tops the total decay up to
    // exp(-t/T2); T2 <= 2*T1 keeps it in (0, 1].
    let residual = (0.5 * rate(t_ns, t1_ns) - rate(t_ns, t2_ns)).exp();
    let flip = (1.0 - residual) / 2.0;

    let k0 = DMatrix::from_row_slice(
        2,
        2,
        &[real(1.0), zero(), zero(), real((1.0 - gamma).sqrt())],
    );
    let k1 = DMatrix::from_row_slice(2, 2, &[zero(), real(gamma.sqrt()), zero(), zero()]);
    let d0 = DMatrix::from_row_slice(
        2,
        2,
        &[
            real((1.0 - flip).sqrt()),
            zero(),
            zero(),
            real((1.0 - flip).sqrt()),
        ],
    );
    let d1 = DMatrix::from_row_slice(
        2,
        2,
        &[real(flip.sqrt()), zero(), zero(), real(-(flip.sqrt()))],
    );
    let kraus = [&d0 * &k0, &d0 * &k1, &d1 * &k0, &d1 * &k1];
    apply_kraus(rho, qubit, &kraus)
}

/// Fidelity of a two-qubit state against the maximally entangled pair.
///
/// Because the target is pure this reduces to the overlap
/// `<Psi| rho |Psi> = (rho_00 + rho_03 + rho_30 + rho_33) / 2`, clamped to
/// [0, 1] to absorb roundoff.
pub fn fidelity(rho: &DensityMatrix) -> Result<f64, StateError> {
    if rho.dim() != 4 {
        return Err(StateError::BadDimension { dim: rho.dim() });
    }
    let m = rho.matrix();
    let overlap = 0.5 * (m[(0, 0)] + m[(0, 3)] + m[(3, 0)] + m[(3, 3)]).re;
    Ok(overlap.clamp(0.0, 1.0))
}

/// The noise processes a link stage can apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Replacement depolarization with probability `p`.
    Depolarizing { p: f64 },
    /// Relaxation/dephasing for `t_ns` with constants `t1_ns`, `t2_ns`.
    T1T2 { t_ns: f64, t1_ns: f64, t2_ns: f64 },
}

/// A noise channel bound to a target qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub target_qubit: usize,
}

impl ChannelSpec {
    /// Checks the parameters without needing a state.
    ///
    /// The target qubit is only range-checked against the largest supported
    /// state here; `apply` still rejects it for a smaller one.
    pub fn validate(&self) -> Result<(), StateError> {
        check_qubit(self.target_qubit, 4)?;
        match self.kind {
            ChannelKind::Depolarizing { p } => {
                if !(0.0..=1.0).contains(&p) || p.is_nan() {
                    return Err(StateError::BadProbability { name: "p", value: p });
                }
            }
            ChannelKind::T1T2 { t_ns, t1_ns, t2_ns } => {
                if !t_ns.is_finite() || t_ns < 0.0 {
                    return Err(StateError::BadDomain {
                        name: "t_ns",
                        value: t_ns,
                    });
                }
                check_decay_pair(t1_ns, t2_ns)?;
            }
        }
        Ok(())
    }

    /// Applies the channel to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, StateError> {
        match self.kind {
            ChannelKind::Depolarizing { p } => apply_depolarizing(rho, self.target_qubit, p),
            ChannelKind::T1T2 { t_ns, t1_ns, t2_ns } => {
                apply_t1t2(rho, self.target_qubit, t_ns, t1_ns, t2_ns)
            }
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn rate(t: f64, constant: f64) -> f64 {
    if constant.is_infinite() {
        0.0
    } else {
        t / constant
    }
}

fn decay_factor(t: f64, constant: f64) -> f64 {
    (-rate(t, constant)).exp()
}

fn check_qubit(qubit: usize, dim: usize) -> Result<(), StateError> {
    let qubits = if dim == 2 { 1 } else { 2 };
    if qubit >= qubits {
        return Err(StateError::BadQubit { qubit, dim });
    }
    Ok(())
}

fn check_decay_pair(t1_ns: f64, t2_ns: f64) -> Result<(), StateError> {
    let positive = |x: f64| x > 0.0 && !x.is_nan();
    if !positive(t1_ns) || !positive(t2_ns) || t2_ns > 2.0 * t1_ns {
        return Err(StateError::UnphysicalDecay { t1_ns, t2_ns });
    }
    Ok(())
}

/// Traces out `qubit`, returning the 2x2 state of the partner.
fn trace_out(mat: &DMatrix<Complex64>, qubit: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut sum = zero();
            for k in 0..2 {
                let (r, c) = if qubit == 0 {
                    (2 * k + a, 2 * k + b)
                } else {
                    (2 * a + k, 2 * b + k)
                };
                sum += mat[(r, c)];
            }
            out[(a, b)] = sum;
        }
    }
    out
}

/// Lifts a single-qubit operator to the full state dimension.
fn lift(op: &DMatrix<Complex64>, qubit: usize, dim: usize) -> DMatrix<Complex64> {
    if dim == 2 {
        op.clone()
    } else if qubit == 0 {
        op.kronecker(&DMatrix::identity(2, 2))
    } else {
        DMatrix::identity(2, 2).kronecker(op)
    }
}

fn apply_kraus(
    rho: &DensityMatrix,
    qubit: usize,
    kraus: &[DMatrix<Complex64>],
) -> Result<DensityMatrix, StateError> {
    let dim = rho.dim();
    let mut out = DMatrix::zeros(dim, dim);
    for op in kraus {
        let lifted = lift(op, qubit, dim);
        out += &lifted * rho.matrix() * lifted.adjoint();
    }
    DensityMatrix::from_matrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn epr_pair_has_unit_fidelity_and_expected_entries() {
        let epr = make_epr();
        assert_eq!(epr.dim(), 4);
        assert_eq!(epr.entry(0, 0), real(0.5));
        assert_eq!(epr.entry(0, 3), real(0.5));
        assert_eq!(epr.entry(3, 0), real(0.5));
        assert_eq!(epr.entry(3, 3), real(0.5));
        assert_eq!(epr.entry(1, 1), zero());
        assert_eq!(epr.entry(2, 2), zero());
        assert_eq!(fidelity(&epr).unwrap(), 1.0);
    }

    #[test]
    fn depolar_prob_matches_reference_points() {
        assert_eq!(depolar_prob(0.0, 0.008).unwrap(), 0.0);
        assert_close(depolar_prob(125.0, 0.008).unwrap(), 0.9, 1e-12);
        assert_close(
            depolar_prob(37.5, 0.008).unwrap(),
            0.49881276637272776,
            1e-12,
        );
        assert_eq!(depolar_prob(100.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn depolar_prob_rejects_bad_domains() {
        assert!(matches!(
            depolar_prob(-1.0, 0.008),
            Err(StateError::BadDomain { name: "length_km", .. })
        ));
        assert!(matches!(
            depolar_prob(10.0, -0.2),
            Err(StateError::BadDomain { name: "p_l_per_km", .. })
        ));
        assert!(depolar_prob(f64::NAN, 0.008).is_err());
        assert!(depolar_prob(f64::INFINITY, 0.008).is_err());
    }

    #[test]
    fn depolarizing_epr_gives_werner_fidelity() {
        let epr = make_epr();
        for qubit in 0..2 {
            for &p in &[0.1, 0.5, 0.9] {
                let out = apply_depolarizing(&epr, qubit, p).unwrap();
                assert_close(fidelity(&out).unwrap(), 1.0 - 3.0 * p / 4.0, 1e-10);
            }
        }
    }

    #[test]
    fn depolarizing_with_certainty_yields_maximally_mixed() {
        let epr = make_epr();
        let out = apply_depolarizing(&epr, 0, 1.0).unwrap();
        let expected = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(out.matrix(), expected.matrix());
        assert_eq!(fidelity(&out).unwrap(), 0.25);
    }

    #[test]
    fn depolarizing_with_zero_probability_is_identity() {
        let epr = make_epr();
        let out = apply_depolarizing(&epr, 1, 0.0).unwrap();
        assert_eq!(out.matrix(), epr.matrix());
    }

    #[test]
    fn depolarizing_single_qubit_state_moves_toward_mixed() {
        let plus = DensityMatrix::pure(&[real(1.0), real(1.0)]).unwrap();
        let out = apply_depolarizing(&plus, 0, 0.5).unwrap();
        assert_close(out.entry(0, 1).re, 0.25, 1e-12);
        assert_close(out.entry(0, 0).re, 0.5, 1e-12);
    }

    #[test]
    fn depolarizing_rejects_bad_probability_and_qubit() {
        let epr = make_epr();
        assert!(matches!(
            apply_depolarizing(&epr, 0, 1.5),
            Err(StateError::BadProbability { .. })
        ));
        assert!(matches!(
            apply_depolarizing(&epr, 0, -0.1),
            Err(StateError::BadProbability { .. })
        ));
        assert!(matches!(
            apply_depolarizing(&epr, 2, 0.5),
            Err(StateError::BadQubit { qubit: 2, dim: 4 })
        ));
        let single = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            apply_depolarizing(&single, 1, 0.5),
            Err(StateError::BadQubit { qubit: 1, dim: 2 })
        ));
    }

    #[test]
    fn t1t2_zero_dwell_is_exact_identity() {
        let epr = make_epr();
        let out = apply_t1t2(&epr, 0, 0.0, 5e5, 5e5).unwrap();
        assert_eq!(out.matrix(), epr.matrix());

        let plus = DensityMatrix::pure(&[real(1.0), real(1.0)]).unwrap();
        let out = apply_t1t2(&plus, 0, 0.0, 1e3, 2e3).unwrap();
        assert_eq!(out.matrix(), plus.matrix());
    }

    #[test]
    fn pure_dephasing_halves_coherence_at_t2() {
        // T1 = inf isolates dephasing: the |+> coherence decays as exp(-t/T2).
        let plus = DensityMatrix::pure(&[real(1.0), real(1.0)]).unwrap();
        let t2 = 40_000.0;
        let out = apply_t1t2(&plus, 0, t2, INF, t2).unwrap();
        assert_close(out.entry(0, 1).re, 0.5 * (-1.0f64).exp(), 1e-12);
        assert_close(out.entry(0, 0).re, 0.5, 1e-12);
        assert_close(out.entry(1, 1).re, 0.5, 1e-12);
    }

    #[test]
    fn relaxation_halves_excited_population_at_t1_ln2() {
        let excited = DensityMatrix::pure(&[zero(), real(1.0)]).unwrap();
        let t1 = 123_456.0;
        let out = apply_t1t2(&excited, 0, t1 * 2f64.ln(), t1, 2.0 * t1).unwrap();
        assert_close(out.entry(1, 1).re, 0.5, 1e-12);
        assert_close(out.entry(0, 0).re, 0.5, 1e-12);
    }

    #[test]
    fn t1t2_on_half_of_epr_matches_closed_form() {
        // Dwell on one half of a fresh pair: F = (1 + e^(-t/T1) + 2 e^(-t/T2)) / 4.
        let epr = make_epr();
        for &(t, t1, t2) in &[
            (1e5, 5e5, 5e5),
            (2.5e5, 5e5, 5e5),
            (1e5, 1e6, 4e5),
            (7e4, INF, 3e5),
        ] {
            for qubit in 0..2 {
                let out = apply_t1t2(&epr, qubit, t, t1, t2).unwrap();
                let expected =
                    (1.0 + decay_factor(t, t1) + 2.0 * decay_factor(t, t2)) / 4.0;
                assert_close(fidelity(&out).unwrap(), expected, 1e-12);
            }
        }
    }

    #[test]
    fn t1t2_rejects_unphysical_and_bad_arguments() {
        let epr = make_epr();
        assert!(matches!(
            apply_t1t2(&epr, 0, 1.0, 1e5, 2.1e5),
            Err(StateError::UnphysicalDecay { .. })
        ));
        assert!(matches!(
            apply_t1t2(&epr, 0, 1.0, INF, 1e5),
            Ok(_)
        ));
        assert!(matches!(
            apply_t1t2(&epr, 0, 1.0, 1e5, INF),
            Err(StateError::UnphysicalDecay { .. })
        ));
        assert!(matches!(
            apply_t1t2(&epr, 0, -1.0, 1e5, 1e5),
            Err(StateError::BadDomain { name: "t_ns", .. })
        ));
        assert!(matches!(
            apply_t1t2(&epr, 0, 1.0, 0.0, 0.0),
            Err(StateError::UnphysicalDecay { .. })
        ));
        assert!(matches!(
            apply_t1t2(&epr, 5, 1.0, 1e5, 1e5),
            Err(StateError::BadQubit { .. })
        ));
    }

    #[test]
    fn infinite_constants_leave_state_untouched() {
        let epr = make_epr();
        let out = apply_t1t2(&epr, 1, 1e9, INF, INF).unwrap();
        assert_eq!(fidelity(&out).unwrap(), 1.0);
        for r in 0..4 {
            for c in 0..4 {
                assert!((out.entry(r, c) - epr.entry(r, c)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn fidelity_of_reference_states() {
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(fidelity(&mixed).unwrap(), 0.25);
        let ground = DensityMatrix::pure(&[real(1.0), zero(), zero(), zero()]).unwrap();
        assert_eq!(fidelity(&ground).unwrap(), 0.5);
        let single = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(
            fidelity(&single),
            Err(StateError::BadDimension { dim: 2 })
        ));
    }

    #[test]
    fn from_matrix_rejects_invalid_input() {
        let mut non_hermitian = DMatrix::zeros(2, 2);
        non_hermitian[(0, 0)] = real(0.5);
        non_hermitian[(1, 1)] = real(0.5);
        non_hermitian[(0, 1)] = real(0.3);
        non_hermitian[(1, 0)] = real(-0.3);
        assert!(matches!(
            DensityMatrix::from_matrix(non_hermitian),
            Err(StateError::NotHermitian { .. })
        ));

        let off_trace = DMatrix::identity(2, 2) * real(0.7);
        assert!(matches!(
            DensityMatrix::from_matrix(off_trace),
            Err(StateError::BadTrace { .. })
        ));

        let mut indefinite = DMatrix::zeros(2, 2);
        indefinite[(0, 0)] = real(1.5);
        indefinite[(1, 1)] = real(-0.5);
        assert!(matches!(
            DensityMatrix::from_matrix(indefinite),
            Err(StateError::NotPositive { .. })
        ));

        let wrong_dim = DMatrix::identity(3, 3) * real(1.0 / 3.0);
        assert!(matches!(
            DensityMatrix::from_matrix(wrong_dim),
            Err(StateError::BadDimension { dim: 3 })
        ));
    }

    #[test]
    fn channel_spec_validates_and_applies() {
        let epr = make_epr();
        let fiber = ChannelSpec {
            kind: ChannelKind::Depolarizing { p: 0.5 },
            target_qubit: 1,
        };
        fiber.validate().unwrap();
        let out = fiber.apply(&epr).unwrap();
        assert_close(fidelity(&out).unwrap(), 1.0 - 3.0 * 0.5 / 4.0, 1e-12);

        let dwell = ChannelSpec {
            kind: ChannelKind::T1T2 {
                t_ns: 1e5,
                t1_ns: 5e5,
                t2_ns: 5e5,
            },
            target_qubit: 0,
        };
        dwell.validate().unwrap();
        let out = dwell.apply(&epr).unwrap();
        let expected = (1.0 + (-0.2f64).exp() + 2.0 * (-0.2f64).exp()) / 4.0;
        assert_close(fidelity(&out).unwrap(), expected, 1e-12);

        let bad = ChannelSpec {
            kind: ChannelKind::Depolarizing { p: 2.0 },
            target_qubit: 0,
        };
        assert!(bad.validate().is_err());
        let bad_qubit = ChannelSpec {
            kind: ChannelKind::Depolarizing { p: 0.1 },
            target_qubit: 7,
        };
        assert!(bad_qubit.validate().is_err());
    }

    #[test]
    fn operations_preserve_validity() {
        // Every op output must survive revalidation from raw entries.
        let epr = make_epr();
        let a = apply_depolarizing(&epr, 0, 0.3).unwrap();
        let b = apply_t1t2(&a, 1, 2e5, 5e5, 4e5).unwrap();
        let c = apply_depolarizing(&b, 1, 0.7).unwrap();
        for state in [&a, &b, &c] {
            DensityMatrix::from_matrix(state.matrix().clone()).unwrap();
        }
    }
}
