//! Dense-matrix oracle equivalence: every circuit-level operation is checked
//! against brute-force matrix composition from `qgcn-testkit`, which shares
//! the qubit-0-is-MSB convention but no code.

use num_complex::Complex64;
use qgcn_core::qfe::{entangling_block, extract_features, EntanglerParams, RotationKind};
use qgcn_core::qmp::{edge_message_pass, MixerSide, MpParams};
use qgcn_core::{Angles3, Axis, NodeEncoding, StateVector};
use qgcn_testkit::densemat::{
    self, embed_single, embed_two, matmul, matvec, zz_exponential, Mat,
};
use qgcn_testkit::{random_state, random_vec};

fn state_from(amps: &[Complex64]) -> StateVector {
    StateVector::from_amplitudes(amps.to_vec()).unwrap()
}

#[test]
fn general_rotation_matches_embedded_matrix() {
    for trial in 0..30 {
        let amps = random_state(3, 1000 + trial);
        let angles = random_vec(3, std::f64::consts::PI, 2000 + trial);
        let qubit = (trial % 3) as usize;

        let mut state = state_from(&amps);
        state
            .apply_rotation(qubit, Angles3::new(angles[0], angles[1], angles[2]))
            .unwrap();

        let gate = densemat::rotation(angles[0], angles[1], angles[2]);
        let full = embed_single(3, qubit, &gate);
        let expected = matvec(&full, &amps);
        assert!(
            densemat::max_amp_diff(state.amplitudes(), &expected) < 1e-12,
            "trial {trial}"
        );
    }
}

#[test]
fn axis_rotations_match_embedded_matrices() {
    for trial in 0..15 {
        let amps = random_state(2, 3000 + trial);
        let theta = random_vec(1, std::f64::consts::PI, 3100 + trial)[0];
        for (axis, gate) in [
            (Axis::X, densemat::rx(theta)),
            (Axis::Y, densemat::ry(theta)),
            (Axis::Z, densemat::rz(theta)),
        ] {
            let mut state = state_from(&amps);
            state.apply_axis_rotation(1, axis, theta).unwrap();
            let expected = matvec(&embed_single(2, 1, &gate), &amps);
            assert!(densemat::max_amp_diff(state.amplitudes(), &expected) < 1e-12);
        }
    }
}

#[test]
fn cnot_matches_embedded_matrix_for_either_orientation() {
    for trial in 0..10 {
        let amps = random_state(3, 4000 + trial);
        for (control, target) in [(0usize, 2usize), (2, 0), (1, 2)] {
            let mut state = state_from(&amps);
            state.apply_cnot(control, target).unwrap();
            let expected = matvec(&embed_two(3, control, target, &densemat::cnot()), &amps);
            assert!(densemat::max_amp_diff(state.amplitudes(), &expected) < 1e-12);
        }
    }
}

#[test]
fn zz_phase_matches_diagonal_exponential() {
    for trial in 0..100 {
        let amps = random_state(2, 5000 + trial);
        let gamma = random_vec(1, std::f64::consts::PI, 5100 + trial)[0];
        let mut state = state_from(&amps);
        state.apply_zz_phase(0, 1, gamma).unwrap();
        let expected = matvec(&zz_exponential(2, 0, 1, gamma), &amps);
        assert!(
            densemat::max_amp_diff(state.amplitudes(), &expected) < 1e-10,
            "trial {trial}"
        );
    }
}

/// Entangling block as a dense matrix: per-qubit rotations followed by the
/// ranged CNOT layer, pairs derived from the defining formula.
fn block_matrix(n: usize, layer: &[Angles3], range: usize) -> Mat {
    let mut m = densemat::identity(1 << n);
    for (q, a) in layer.iter().enumerate() {
        let gate = densemat::rotation(a.alpha, a.beta, a.gamma);
        m = matmul(&embed_single(n, q, &gate), &m);
    }
    for k in 0..n / range {
        let target = (k + range) % n;
        if target == k {
            continue;
        }
        m = matmul(&embed_two(n, k, target, &densemat::cnot()), &m);
    }
    m
}

#[test]
fn entangling_block_matches_composed_matrix() {
    for trial in 0..50 {
        let n = 3;
        let range = 1 + (trial as usize % 3);
        let amps = random_state(n, 6000 + trial);
        let flat = random_vec(3 * n, std::f64::consts::PI, 6100 + trial);
        let layer: Vec<Angles3> = flat
            .chunks(3)
            .map(|c| Angles3::new(c[0], c[1], c[2]))
            .collect();

        let mut state = state_from(&amps);
        entangling_block(&mut state, &layer, range, RotationKind::Full).unwrap();

        let expected = matvec(&block_matrix(n, &layer, range), &amps);
        assert!(
            densemat::max_amp_diff(state.amplitudes(), &expected) < 1e-10,
            "trial {trial} range {range}"
        );
    }
}

#[test]
fn feature_extraction_matches_end_to_end_matrix_route() {
    for trial in 0..10 {
        let n = 3;
        let x = random_vec(8, 1.0, 7000 + trial);
        if x.iter().all(|v| v.abs() < 1e-9) {
            continue;
        }
        let flat = random_vec(2 * 3 * n, std::f64::consts::PI, 7100 + trial);
        let angles: Vec<Vec<Angles3>> = flat
            .chunks(3 * n)
            .map(|layer| {
                layer
                    .chunks(3)
                    .map(|c| Angles3::new(c[0], c[1], c[2]))
                    .collect()
            })
            .collect();
        let params = EntanglerParams::new(n, 1, RotationKind::Full, angles.clone()).unwrap();
        let encoding = extract_features(&x, &params).unwrap();

        // Oracle route: normalize into amplitudes, multiply both layer
        // matrices, read expectations from the raw vector.
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = x.iter().map(|v| Complex64::new(v / norm, 0.0)).collect();
        let mut v = amps;
        for layer in &angles {
            v = matvec(&block_matrix(n, layer, 1), &v);
        }
        for q in 0..n {
            let expected = densemat::expect_z(&v, q, n);
            assert!(
                (encoding.values()[q] - expected).abs() < 1e-10,
                "trial {trial} qubit {q}"
            );
        }
    }
}

/// Initial product state of the edge circuit, built by explicit Kronecker
/// products of (cos h, -i sin h) factors.
fn angle_product_state(h: &[f64]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for &hk in h {
        let f0 = Complex64::new(hk.cos(), 0.0);
        let f1 = Complex64::new(0.0, -hk.sin());
        let mut next = Vec::with_capacity(amps.len() * 2);
        for a in &amps {
            next.push(a * f0);
            next.push(a * f1);
        }
        amps = next;
    }
    amps
}

#[test]
fn edge_message_pass_matches_dense_circuit() {
    for trial in 0..50 {
        let n = 2;
        let h_u = random_vec(n, 1.0, 8000 + trial);
        let h_v = random_vec(n, 1.0, 8100 + trial);
        let ang = random_vec(4, std::f64::consts::PI, 8200 + trial);
        let mixer = if trial % 2 == 0 { MixerSide::Both } else { MixerSide::UOnly };
        let params = MpParams::new(vec![ang[0], ang[1]], vec![ang[2], ang[3]], mixer).unwrap();

        let (out_u, out_v) = edge_message_pass(
            &NodeEncoding::new(h_u.clone()),
            &NodeEncoding::new(h_v.clone()),
            &params,
        )
        .unwrap();

        let width = 2 * n;
        let joint: Vec<f64> = h_u.iter().chain(h_v.iter()).copied().collect();
        let mut v = angle_product_state(&joint);
        for layer in 0..params.depth() {
            for k in 0..n {
                v = matvec(&zz_exponential(width, k, n + k, params.gammas[layer]), &v);
            }
            let rx = densemat::rx(2.0 * params.betas[layer]);
            for q in 0..n {
                v = matvec(&embed_single(width, q, &rx), &v);
            }
            if mixer == MixerSide::Both {
                for q in n..width {
                    v = matvec(&embed_single(width, q, &rx), &v);
                }
            }
        }
        for q in 0..n {
            assert!(
                (out_u[q] - densemat::expect_z(&v, q, width)).abs() < 1e-10,
                "trial {trial} u-qubit {q}"
            );
            assert!(
                (out_v[q] - densemat::expect_z(&v, n + q, width)).abs() < 1e-10,
                "trial {trial} v-qubit {q}"
            );
        }
    }
}
