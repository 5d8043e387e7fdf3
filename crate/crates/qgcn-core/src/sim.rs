//! Exact statevector simulation of the small gate set used by the pipeline:
//! general single-qubit rotations, axis rotations, CNOT, the two-qubit
//! ZZ-phase unitary, amplitude/angle state preparation, and Pauli-Z
//! expectation readout.
//!
//! # Qubit ordering
//!
//! Qubit 0 is the *most significant* bit of the basis-state index, matching
//! left-to-right tensor ordering: for a 2-qubit register the basis state
//! |10⟩ (qubit 0 in |1⟩, qubit 1 in |0⟩) sits at index `0b10 = 2`. Every
//! consumer of raw amplitudes in this crate, and the dense-matrix oracles in
//! the test suite, share this convention.
//!
//! All arithmetic is `f64`; global phase is never normalized away.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler angles of the general single-qubit rotation
/// `R(alpha, beta, gamma) = RZ(alpha) · RY(beta) · RZ(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles3 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Angles3 {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }
}

/// Rotation axis for [`StateVector::apply_axis_rotation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Full complex amplitude vector of a k-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0...0⟩.
    pub fn zero(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "register needs at least one qubit");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    /// A single computational basis state. `index` uses the qubit-0-is-MSB
    /// convention described in the module docs.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(index < 1 << num_qubits, "basis index out of range");
        let mut s = Self::zero(num_qubits);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        s
    }

    /// Builds a state from raw amplitudes, normalizing to unit norm.
    /// The length must be a power of two and at least 2.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector length must be a power of two >= 2, got {len}"
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(Error::ZeroVector);
        }
        let scale = 1.0 / norm_sqr.sqrt();
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Probability of measuring the given basis state.
    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Sum of |amplitude|² over all basis states; 1 for a valid state.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` in a basis index (qubit 0 = MSB).
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::DuplicateQubits { qubit: a });
        }
        Ok(())
    }

    /// Applies an arbitrary 2x2 unitary to one qubit.
    fn apply_single(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[j] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// Diagonal phase rotation RZ(theta) = diag(e^{-i theta/2}, e^{i theta/2}).
    fn rz_unchecked(&mut self, qubit: usize, theta: f64) {
        let mask = self.mask(qubit);
        let lo = Complex64::from_polar(1.0, -theta / 2.0);
        let hi = Complex64::from_polar(1.0, theta / 2.0);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if i & mask == 0 { lo } else { hi };
        }
    }

    fn cnot_unchecked(&mut self, control: usize, target: usize) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    /// General single-qubit rotation `R(alpha, beta, gamma) = RZ(alpha) RY(beta) RZ(gamma)`:
    ///
    /// ```text
    /// [ e^{-i(alpha+gamma)/2} cos(beta/2)   -e^{-i(alpha-gamma)/2} sin(beta/2) ]
    /// [ e^{ i(alpha-gamma)/2} sin(beta/2)    e^{ i(alpha+gamma)/2} cos(beta/2) ]
    /// ```
    pub fn apply_rotation(&mut self, qubit: usize, angles: Angles3) -> Result<()> {
        self.check_qubit(qubit)?;
        let (c, s) = ((angles.beta / 2.0).cos(), (angles.beta / 2.0).sin());
        let sum = (angles.alpha + angles.gamma) / 2.0;
        let diff = (angles.alpha - angles.gamma) / 2.0;
        let u = [
            [
                Complex64::from_polar(c, -sum),
                -Complex64::from_polar(s, -diff),
            ],
            [Complex64::from_polar(s, diff), Complex64::from_polar(c, sum)],
        ];
        self.apply_single(qubit, u);
        Ok(())
    }

    /// Axis rotation `R_A(theta) = e^{-i theta A / 2}` for A in {X, Y, Z}.
    pub fn apply_axis_rotation(&mut self, qubit: usize, axis: Axis, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match axis {
            Axis::X => {
                let mis = Complex64::new(0.0, -s);
                let cc = Complex64::new(c, 0.0);
                self.apply_single(qubit, [[cc, mis], [mis, cc]]);
            }
            Axis::Y => {
                let cc = Complex64::new(c, 0.0);
                let ss = Complex64::new(s, 0.0);
                self.apply_single(qubit, [[cc, -ss], [ss, cc]]);
            }
            Axis::Z => self.rz_unchecked(qubit, theta),
        }
        Ok(())
    }

    /// CNOT with the given control and target qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        self.cnot_unchecked(control, target);
        Ok(())
    }

    /// Two-qubit phase coupling `e^{-i gamma Z⊗Z}`, realized as the exact
    /// three-gate decomposition `CNOT · RZ(2 gamma) · CNOT`.
    pub fn apply_zz_phase(&mut self, qubit_a: usize, qubit_b: usize, gamma: f64) -> Result<()> {
        self.check_pair(qubit_a, qubit_b)?;
        self.cnot_unchecked(qubit_a, qubit_b);
        self.rz_unchecked(qubit_b, 2.0 * gamma);
        self.cnot_unchecked(qubit_a, qubit_b);
        Ok(())
    }

    /// Pauli-Z expectation of one qubit: `sum_j |a_j|^2 * (+1 or -1)`.
    /// Always in [-1, 1].
    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let mut value = 0.0;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            value += if i & mask == 0 { p } else { -p };
        }
        Ok(value.clamp(-1.0, 1.0))
    }

    /// Z expectations of every qubit, in qubit order.
    pub fn expect_z_all(&self) -> Vec<f64> {
        (0..self.num_qubits)
            .map(|q| self.expect_z(q).expect("qubit index in range"))
            .collect()
    }
}

/// Encodes a classical vector into the amplitudes of an
/// `n = ceil(log2 d)`-qubit state (at least one qubit): the entries of `x`
/// are divided by their Euclidean norm and zero-padded up to length `2^n`,
/// so `x[j]` lands at basis index `j`.
pub fn amplitude_encode(x: &[f64]) -> Result<StateVector> {
    let d = x.len();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "cannot amplitude-encode an empty vector".into(),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "amplitude encoding requires finite entries".into(),
        ));
    }
    let norm_sqr: f64 = x.iter().map(|v| v * v).sum();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroVector);
    }
    let num_qubits = if d <= 2 {
        1
    } else {
        (usize::BITS - (d - 1).leading_zeros()) as usize
    };
    let norm = norm_sqr.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    for (amp, &v) in amps.iter_mut().zip(x) {
        *amp = Complex64::new(v / norm, 0.0);
    }
    Ok(StateVector { num_qubits, amps })
}

/// Encodes a classical vector as the product state
/// `⊗_k RX(2 h_k)|0⟩ = ⊗_k (cos(h_k)|0⟩ − i sin(h_k)|1⟩)` on `h.len()` qubits.
pub fn angle_encode(h: &[f64]) -> Result<StateVector> {
    if h.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot angle-encode an empty vector".into(),
        ));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "angle encoding requires finite entries".into(),
        ));
    }
    // Kronecker product built qubit-by-qubit; appending each factor at the
    // least significant position leaves qubit 0 as the MSB.
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for &hk in h {
        let v0 = Complex64::new(hk.cos(), 0.0);
        let v1 = Complex64::new(0.0, -hk.sin());
        let mut next = Vec::with_capacity(amps.len() * 2);
        for a in &amps {
            next.push(a * v0);
            next.push(a * v1);
        }
        amps = next;
    }
    Ok(StateVector {
        num_qubits: h.len(),
        amps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const TOL: f64 = 1e-12;

    fn amp(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amp_close(actual: Complex64, expected: Complex64) {
        assert!(
            (actual - expected).norm() < TOL,
            "amplitude {actual} != expected {expected}"
        );
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let s = StateVector::zero(3);
        assert_eq!(s.num_qubits(), 3);
        assert_eq!(s.amplitudes().len(), 8);
        assert_amp_close(s.amplitudes()[0], amp(1.0, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn rotation_identity_angles_leave_state_unchanged() {
        let mut s = StateVector::from_amplitudes(vec![
            amp(0.3, 0.1),
            amp(-0.2, 0.5),
            amp(0.0, 0.4),
            amp(0.6, -0.1),
        ])
        .unwrap();
        let before = s.clone();
        s.apply_rotation(1, Angles3::zero()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_amp_close(*a, *b);
        }
    }

    #[test]
    fn rotation_ry_pi_flips_zero_to_one() {
        let mut s = StateVector::zero(1);
        s.apply_rotation(0, Angles3::new(0.0, PI, 0.0)).unwrap();
        assert_amp_close(s.amplitudes()[0], amp(0.0, 0.0));
        assert_amp_close(s.amplitudes()[1], amp(1.0, 0.0));
    }

    #[test]
    fn axis_rotation_rx_zero_is_identity() {
        let mut s = StateVector::basis(2, 0b01);
        let before = s.clone();
        s.apply_axis_rotation(0, Axis::X, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn axis_rotation_rx_pi_gives_minus_i_one() {
        let mut s = StateVector::zero(1);
        s.apply_axis_rotation(0, Axis::X, PI).unwrap();
        assert_amp_close(s.amplitudes()[1], amp(0.0, -1.0));
    }

    #[test]
    fn axis_rotation_rz_phases_one_state() {
        let theta = 0.7;
        let mut s = StateVector::basis(1, 1);
        s.apply_axis_rotation(0, Axis::Z, theta).unwrap();
        assert_amp_close(s.amplitudes()[1], Complex64::from_polar(1.0, theta / 2.0));
    }

    #[test]
    fn cnot_truth_table() {
        // |00> -> |00>
        let mut s = StateVector::basis(2, 0b00);
        s.apply_cnot(0, 1).unwrap();
        assert_amp_close(s.amplitudes()[0b00], amp(1.0, 0.0));

        // |10> -> |11>
        let mut s = StateVector::basis(2, 0b10);
        s.apply_cnot(0, 1).unwrap();
        assert_amp_close(s.amplitudes()[0b11], amp(1.0, 0.0));
    }

    #[test]
    fn cnot_builds_bell_pair() {
        let inv = 1.0 / 2.0_f64.sqrt();
        let mut s = StateVector::from_amplitudes(vec![
            amp(inv, 0.0),
            amp(0.0, 0.0),
            amp(inv, 0.0),
            amp(0.0, 0.0),
        ])
        .unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_amp_close(s.amplitudes()[0b00], amp(inv, 0.0));
        assert_amp_close(s.amplitudes()[0b11], amp(inv, 0.0));
        assert_amp_close(s.amplitudes()[0b01], amp(0.0, 0.0));
        assert_amp_close(s.amplitudes()[0b10], amp(0.0, 0.0));
    }

    #[test]
    fn zz_phase_zero_gamma_is_identity() {
        let mut s = StateVector::from_amplitudes(vec![
            amp(0.5, 0.0),
            amp(0.5, 0.0),
            amp(0.5, 0.0),
            amp(0.5, 0.0),
        ])
        .unwrap();
        let before = s.clone();
        s.apply_zz_phase(0, 1, 0.0).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_amp_close(*a, *b);
        }
    }

    #[test]
    fn zz_phase_on_odd_parity_eigenstate() {
        // |01> has Z⊗Z eigenvalue -1, so e^{-i gamma Z⊗Z}|01> = e^{+i gamma}|01>.
        let gamma = 0.3;
        let mut s = StateVector::basis(2, 0b01);
        s.apply_zz_phase(0, 1, gamma).unwrap();
        assert_amp_close(s.amplitudes()[0b01], Complex64::from_polar(1.0, gamma));
    }

    #[test]
    fn gate_index_validation() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            s.apply_rotation(2, Angles3::zero()),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(
            s.apply_cnot(1, 1),
            Err(Error::DuplicateQubits { qubit: 1 })
        ));
        assert!(matches!(
            s.apply_zz_phase(0, 5, 1.0),
            Err(Error::QubitOutOfRange { qubit: 5, .. })
        ));
        assert!(s.expect_z(7).is_err());
    }

    #[test]
    fn amplitude_encode_basis_and_normalization() {
        let s = amplitude_encode(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert_amp_close(s.amplitudes()[0], amp(1.0, 0.0));

        let s = amplitude_encode(&[3.0, 4.0]).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert_amp_close(s.amplitudes()[0], amp(0.6, 0.0));
        assert_amp_close(s.amplitudes()[1], amp(0.8, 0.0));
    }

    #[test]
    fn amplitude_encode_pads_non_power_of_two() {
        let s = amplitude_encode(&[1.0; 5]).unwrap();
        assert_eq!(s.num_qubits(), 3);
        let inv = 1.0 / 5.0_f64.sqrt();
        for j in 0..5 {
            assert_amp_close(s.amplitudes()[j], amp(inv, 0.0));
        }
        for j in 5..8 {
            assert_amp_close(s.amplitudes()[j], amp(0.0, 0.0));
        }
    }

    #[test]
    fn amplitude_encode_rejects_zero_vector() {
        assert!(matches!(
            amplitude_encode(&[0.0, 0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn amplitude_encode_single_entry_uses_one_qubit() {
        let s = amplitude_encode(&[-2.0]).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert_amp_close(s.amplitudes()[0], amp(-1.0, 0.0));
    }

    #[test]
    fn angle_encode_zero_vector_is_ground_state() {
        let s = angle_encode(&[0.0, 0.0, 0.0]).unwrap();
        assert_amp_close(s.amplitudes()[0], amp(1.0, 0.0));
        for q in 0..3 {
            assert!((s.expect_z(q).unwrap() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn angle_encode_expectations_follow_cos_2h() {
        let s = angle_encode(&[FRAC_PI_4, FRAC_PI_2]).unwrap();
        assert!(s.expect_z(0).unwrap().abs() < TOL); // cos(pi/2) = 0
        assert!((s.expect_z(1).unwrap() + 1.0).abs() < TOL); // cos(pi) = -1
    }

    #[test]
    fn angle_encode_pi_half_is_minus_i_one() {
        let s = angle_encode(&[FRAC_PI_2]).unwrap();
        assert_amp_close(s.amplitudes()[1], amp(0.0, -1.0));
    }

    #[test]
    fn expect_z_basis_values() {
        assert!((StateVector::basis(1, 0).expect_z(0).unwrap() - 1.0).abs() < TOL);
        assert!((StateVector::basis(1, 1).expect_z(0).unwrap() + 1.0).abs() < TOL);
        let inv = 1.0 / 2.0_f64.sqrt();
        let plus = StateVector::from_amplitudes(vec![amp(inv, 0.0), amp(inv, 0.0)]).unwrap();
        assert!(plus.expect_z(0).unwrap().abs() < TOL);
    }

    #[test]
    fn gates_are_inverted_by_negated_parameters() {
        let mut s = StateVector::from_amplitudes(vec![
            amp(0.1, 0.2),
            amp(0.3, -0.1),
            amp(-0.4, 0.2),
            amp(0.5, 0.5),
            amp(0.0, 0.3),
            amp(0.2, 0.0),
            amp(-0.1, -0.1),
            amp(0.4, 0.1),
        ])
        .unwrap();
        let before = s.clone();

        let ang = Angles3::new(0.4, -1.1, 2.3);
        let inv = Angles3::new(-ang.gamma, -ang.beta, -ang.alpha);
        s.apply_rotation(1, ang).unwrap();
        s.apply_rotation(1, inv).unwrap();

        for axis in [Axis::X, Axis::Y, Axis::Z] {
            s.apply_axis_rotation(2, axis, 0.77).unwrap();
            s.apply_axis_rotation(2, axis, -0.77).unwrap();
        }

        s.apply_cnot(0, 2).unwrap();
        s.apply_cnot(0, 2).unwrap();

        s.apply_zz_phase(1, 2, 0.9).unwrap();
        s.apply_zz_phase(1, 2, -0.9).unwrap();

        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < TOL);
        }
    }
}
