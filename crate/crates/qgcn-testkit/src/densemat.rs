//! Brute-force dense-matrix reference for small quantum circuits.
//!
//! Everything here builds full `2^n x 2^n` complex matrices and applies them
//! by plain matrix-vector products. It shares the qubit-0-is-MSB index
//! convention with the crate under test but shares no code with it.

use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

pub fn zeros(dim: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

pub fn identity(dim: usize) -> Mat {
    let mut m = zeros(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(m: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// 2x2 matrix of RZ(alpha) RY(beta) RZ(gamma).
pub fn rotation(alpha: f64, beta: f64, gamma: f64) -> Mat {
    matmul(&rz(alpha), &matmul(&ry(beta), &rz(gamma)))
}

pub fn rx(theta: f64) -> Mat {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        vec![Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        vec![Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

pub fn ry(theta: f64) -> Mat {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn rz(theta: f64) -> Mat {
    vec![
        vec![Complex64::from_polar(1.0, -theta / 2.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn bit(index: usize, qubit: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - qubit)) & 1
}

/// Embeds a single-qubit gate into an n-qubit matrix: I ⊗ ... ⊗ u ⊗ ... ⊗ I.
pub fn embed_single(num_qubits: usize, qubit: usize, u: &Mat) -> Mat {
    let dim = 1 << num_qubits;
    let mut m = zeros(dim);
    for row in 0..dim {
        for col in 0..dim {
            // All other qubits must agree between row and col.
            if (row ^ col) & !(1 << (num_qubits - 1 - qubit)) != 0 {
                continue;
            }
            m[row][col] = u[bit(row, qubit, num_qubits)][bit(col, qubit, num_qubits)];
        }
    }
    m
}

/// Embeds a two-qubit gate (4x4, basis order |ab⟩ with `a` the first qubit)
/// acting on arbitrary qubit positions.
pub fn embed_two(num_qubits: usize, qubit_a: usize, qubit_b: usize, u: &Mat) -> Mat {
    assert_ne!(qubit_a, qubit_b);
    let dim = 1 << num_qubits;
    let touched =
        (1 << (num_qubits - 1 - qubit_a)) | (1 << (num_qubits - 1 - qubit_b));
    let mut m = zeros(dim);
    for row in 0..dim {
        for col in 0..dim {
            if (row ^ col) & !touched != 0 {
                continue;
            }
            let r = (bit(row, qubit_a, num_qubits) << 1) | bit(row, qubit_b, num_qubits);
            let c = (bit(col, qubit_a, num_qubits) << 1) | bit(col, qubit_b, num_qubits);
            m[row][col] = u[r][c];
        }
    }
    m
}

/// CNOT as a 4x4 matrix, control = first qubit.
pub fn cnot() -> Mat {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    vec![
        vec![l, o, o, o],
        vec![o, l, o, o],
        vec![o, o, o, l],
        vec![o, o, l, o],
    ]
}

/// `e^{-i gamma Z⊗Z}` on two chosen qubits of an n-qubit register, computed
/// by direct diagonal exponentiation (eigenvalue +1 for equal bits, -1 for
/// different bits).
pub fn zz_exponential(num_qubits: usize, qubit_a: usize, qubit_b: usize, gamma: f64) -> Mat {
    let dim = 1 << num_qubits;
    let mut m = zeros(dim);
    for i in 0..dim {
        let parity = bit(i, qubit_a, num_qubits) ^ bit(i, qubit_b, num_qubits);
        let eigen = if parity == 0 { 1.0 } else { -1.0 };
        m[i][i] = Complex64::from_polar(1.0, -gamma * eigen);
    }
    m
}

/// Z expectation of one qubit from raw amplitudes.
pub fn expect_z(amps: &[Complex64], qubit: usize, num_qubits: usize) -> f64 {
    amps.iter()
        .enumerate()
        .map(|(i, a)| {
            let sign = if bit(i, qubit, num_qubits) == 0 { 1.0 } else { -1.0 };
            sign * a.norm_sqr()
        })
        .sum()
}

/// Largest per-amplitude deviation between two states.
pub fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
