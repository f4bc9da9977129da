//! Cross-checks against constructions that do not share code paths with the
//! library's main pipeline.

use nalgebra::{DMatrix, DVector};
use qvbs_core::budget::Budget;
use qvbs_core::cgproj::{hamiltonian, projector, Boundary, Couplings};
use qvbs_core::mps::{contract_pbc, contract_pbc_dense, tensor_f, tensor_g};
use qvbs_core::state::{all_configs, DenseState};
use qvbs_core::transfer::{
    closed_form_szsz, eigensystem, exact_transfer_matrix, one_point_finite, one_point_thermo, sz_distribution,
    transfer_matrix, two_point_finite, two_point_thermo, two_point_thermo_diagonal_first_factor, SiteOperator,
};
use qvbs_core::vbsstate::{build_open, build_pbc};

fn proportional(a: &[f64], b: &[f64], tol: f64) -> bool {
    let (i, _) = b.iter().enumerate().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs())).unwrap();
    let c = a[i] / b[i];
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - c * y).abs() <= tol * scale)
}

/// Isotropic spin-1 AKLT state from the textbook 2x2 matrices.
fn classical_aklt(length: usize) -> Vec<f64> {
    let sp = DMatrix::from_row_slice(2, 2, &[0.0, (2.0f64 / 3.0).sqrt(), 0.0, 0.0]);
    let sm = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -(2.0f64 / 3.0).sqrt(), 0.0]);
    let s0 = DMatrix::from_row_slice(2, 2, &[-(1.0f64 / 3.0).sqrt(), 0.0, 0.0, (1.0f64 / 3.0).sqrt()]);
    all_configs(1, length)
        .map(|c| {
            let mut m = DMatrix::identity(2, 2);
            for &x in &c {
                m *= match x {
                    1 => &sp,
                    0 => &s0,
                    _ => &sm,
                };
            }
            m.trace()
        })
        .collect()
}

#[test]
fn isotropic_spin_one_matches_textbook_aklt() {
    for length in [3, 4, 5] {
        let ours = build_pbc(1, length).unwrap().eval_at(1.0);
        assert!(proportional(ours.amps(), &classical_aklt(length), 1e-12), "L = {length}");
    }
}

#[test]
fn vbs_state_is_a_zero_mode_of_the_hamiltonian() {
    for (spin, length, q) in [(1u32, 4usize, 0.8), (2, 3, 1.3), (1, 5, 1.0)] {
        let h =
            hamiltonian(spin, length, Boundary::Periodic, &Couplings::uniform(spin), q, &Budget::default()).unwrap();
        let psi = build_pbc(spin, length).unwrap().eval_at(q);
        let hpsi = h.matvec(psi.amps());
        let norm = DVector::from_vec(hpsi).norm() / psi.norm_sqr().sqrt();
        assert!(norm < 1e-10, "S={spin} L={length} q={q}: |H psi| = {norm:e}");
    }
}

#[test]
fn open_chain_kernel_is_spanned_by_boundary_states() {
    let (spin, length, q) = (2u32, 3usize, 0.8);
    let h = hamiltonian(spin, length, Boundary::Open, &Couplings::uniform(spin), q, &Budget::default()).unwrap();
    assert_eq!(h.kernel_dimension(1e-10), 9);
    let mut cols = Vec::new();
    for p1 in 1..=3 {
        for p2 in 1..=3 {
            let v = build_open(spin, length, p1, p2).unwrap().eval_at(q);
            let hv = DVector::from_vec(h.matvec(v.amps()));
            assert!(hv.norm() < 1e-10 * v.norm_sqr().sqrt());
            cols.push(DVector::from_vec(v.amps().to_vec()));
        }
    }
    let m = DMatrix::from_columns(&cols);
    assert_eq!(m.rank(1e-10 * m.amax()), 9);
}

#[test]
fn bond_projectors_are_symmetric_in_spin_basis() {
    let q = 0.7;
    for spin in 1..=2 {
        for j in 0..=2 * spin {
            let p = projector(spin, j).unwrap().spin_matrix();
            let n = p.len();
            let m = DMatrix::from_fn(n, n, |r, c| p[r][c].eval_f64(q));
            assert!((&m - m.transpose()).amax() < 1e-12);
            assert!((&m * &m - &m).amax() < 1e-12);
            assert!((m.trace() - (2 * j + 1) as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn periodic_state_is_translation_invariant() {
    for (spin, length) in [(1u32, 5usize), (2, 4), (2, 5)] {
        let st = build_pbc(spin, length).unwrap();
        assert!(st.translate().is_proportional_to(&st));
    }
}

fn mapped(a: &DenseState, b: &DenseState, reverse: bool, flip: bool) -> Vec<f64> {
    (0..a.amps().len())
        .map(|i| {
            let mut c = a.config_of(i);
            if reverse {
                c.reverse();
            }
            if flip {
                c.iter_mut().for_each(|m| *m = -*m);
            }
            b.amps()[b.index_of(&c)]
        })
        .collect()
}

#[test]
fn reversal_and_spin_flip_each_invert_the_deformation() {
    for (spin, length) in [(1u32, 4usize), (1, 6), (2, 4)] {
        let q = 0.8;
        let a = build_pbc(spin, length).unwrap().eval_at(q);
        let b = build_pbc(spin, length).unwrap().eval_at(1.0 / q);
        assert!(proportional(a.amps(), &mapped(&a, &b, true, false), 1e-12), "S={spin} L={length}");
        assert!(proportional(a.amps(), &mapped(&a, &b, false, true), 1e-12), "S={spin} L={length}");
        assert!(proportional(a.amps(), &mapped(&a, &a, true, true), 1e-12), "S={spin} L={length}");
    }
}

#[test]
fn f_and_g_give_the_same_dense_state() {
    let b = Budget::default();
    let f = contract_pbc_dense(&tensor_f(2), 6, 1.2, &b).unwrap();
    let g = contract_pbc(&tensor_g(2), 6).unwrap().eval_at(1.2);
    for (x, y) in f.amps().iter().zip(g.amps()) {
        assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
    }
}

#[test]
fn exact_transfer_matrix_is_symmetric_with_selection_rule() {
    for spin in 1..=5u32 {
        let g = exact_transfer_matrix(spin);
        let n = spin as usize + 1;
        for (row, r) in g.iter().enumerate() {
            for (col, x) in r.iter().enumerate() {
                assert_eq!(x, &g[col][row]);
                let (a, b, c, d) = (row / n, row % n, col / n, col % n);
                if a as i64 - b as i64 != c as i64 - d as i64 {
                    assert!(x.is_zero());
                }
            }
        }
    }
}

#[test]
fn generic_and_closed_form_transfer_matrices_agree() {
    for spin in 1..=4 {
        for q in [0.5, 0.8, 1.0, 1.25, 2.0] {
            transfer_matrix(spin, q, None).unwrap();
            transfer_matrix(spin, q, Some(&SiteOperator::sz(spin))).unwrap();
        }
    }
}

#[test]
fn eigensystem_is_orthonormal_and_reconstructs() {
    for (spin, q) in [(2, 0.8), (3, 1.3), (4, 0.6)] {
        let g = transfer_matrix(spin, q, None).unwrap();
        let es = eigensystem(&g).unwrap();
        let v = &es.eigenvectors;
        let n = v.ncols();
        assert!((v.transpose() * v - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
        let rebuilt = v * DMatrix::from_diagonal(&DVector::from_vec(es.eigenvalues.clone())) * v.transpose();
        assert!((rebuilt - g.matrix()).amax() < 1e-10 * g.matrix().amax());
        assert_eq!(es.degeneracies().iter().sum::<usize>(), n);
    }
}

#[test]
fn magnetization_vanishes() {
    for spin in 1..=3 {
        let sz = SiteOperator::sz(spin);
        assert!(one_point_thermo(&sz, spin, 0.7).unwrap().abs() < 1e-12);
        assert!(one_point_finite(&sz, spin, 1.4, 7).unwrap().abs() < 1e-12);
    }
}

#[test]
fn correlation_ratio_tends_to_eigenvalue_ratio() {
    let (spin, q) = (2u32, 0.8);
    let sz = SiteOperator::sz(spin);
    let es = eigensystem(&transfer_matrix(spin, q, None).unwrap()).unwrap();
    let ratio = (es.groups[1].value / es.groups[0].value).abs();
    let c = |r| two_point_thermo(&sz, &sz, spin, q, r).unwrap();
    assert!(((c(30) / c(29)).abs() - ratio).abs() < 1e-8);
}

#[test]
fn inverse_deformation_leaves_spectrum_and_correlator_unchanged() {
    for spin in 1..=3u32 {
        let q = 1.35;
        let a = eigensystem(&transfer_matrix(spin, q, None).unwrap()).unwrap();
        let b = eigensystem(&transfer_matrix(spin, 1.0 / q, None).unwrap()).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-9 * x.abs().max(1.0));
        }
        let sz = SiteOperator::sz(spin);
        for r in 2..6 {
            let u = two_point_thermo(&sz, &sz, spin, q, r).unwrap();
            let v = two_point_thermo(&sz, &sz, spin, 1.0 / q, r).unwrap();
            assert!((u - v).abs() < 1e-12);
        }
    }
}

#[test]
fn diagonal_first_factor_variant_disagrees_with_finite_chains() {
    let sz = SiteOperator::sz(2);
    let q = 0.9;
    let finite = two_point_finite(&sz, &sz, 2, q, 200, 3).unwrap();
    let consistent = two_point_thermo(&sz, &sz, 2, q, 3).unwrap();
    let variant = two_point_thermo_diagonal_first_factor(&sz, &sz, 2, q, 3).unwrap();
    assert!((finite - consistent).abs() < 1e-10);
    // <e_1|G^{S^z}|e_1> = 0, so the variant collapses to zero
    assert!(variant.abs() < 1e-14);
    assert!(finite.abs() > 0.1);
}

#[test]
fn finite_chain_matches_dense_contraction_for_spin_three() {
    let (spin, length, q) = (3u32, 6usize, 1.2);
    let sz = SiteOperator::sz(spin);
    let dense: DenseState = contract_pbc_dense(&tensor_f(spin), length, q, &Budget::default()).unwrap();
    for r in 2..=4 {
        let brute = dense.diagonal_expectation(|site, m| if site == 0 || site == r - 1 { m as f64 } else { 1.0 });
        let t = two_point_finite(&sz, &sz, spin, q, length, r).unwrap();
        assert!((t - brute).abs() < 1e-10, "r = {r}: {t} vs {brute}");
    }
}

#[test]
fn anisotropy_favours_zero_magnetization() {
    let p = sz_distribution(2, 0.5).unwrap();
    assert!(p[2] > 0.2);
    assert!((p[0] - p[4]).abs() < 1e-14 && (p[1] - p[3]).abs() < 1e-14);
}

#[test]
fn spin_three_closed_form_at_an_interior_point() {
    let sz = SiteOperator::sz(3);
    let a = two_point_thermo(&sz, &sz, 3, 1.2, 3).unwrap();
    let b = closed_form_szsz(3, 1.2, 3).unwrap();
    assert!((a - b).abs() < 1e-9);
}

/// `<S^z_1 S^z_r>` by visiting every configuration with a nonzero matrix
/// product, without ever storing the state vector.
fn streaming_szsz(spin: u32, length: usize, q: f64, r: usize) -> f64 {
    let t = tensor_g(spin).eval_at(q);
    let n = spin as usize + 1;
    let s = spin as i32;
    let per_m: Vec<DMatrix<f64>> =
        (-s..=s).map(|m| DMatrix::from_fn(n, n, |i, j| if j as i32 - i as i32 == m { t[i][j] } else { 0.0 })).collect();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        per_m: &[DMatrix<f64>],
        s: i32,
        site: usize,
        length: usize,
        r: usize,
        p: &DMatrix<f64>,
        w: f64,
        acc: &mut (f64, f64),
    ) {
        if site == length {
            let amp = p.trace();
            acc.0 += amp * amp * w;
            acc.1 += amp * amp;
            return;
        }
        for (k, a) in per_m.iter().enumerate() {
            let next = p * a;
            if next.amax() == 0.0 {
                continue;
            }
            let m = k as i32 - s;
            let w2 = if site == 0 || site == r - 1 { w * m as f64 } else { w };
            rec(per_m, s, site + 1, length, r, &next, w2, acc);
        }
    }
    let mut acc = (0.0, 0.0);
    rec(&per_m, s, 0, length, r, &DMatrix::identity(n, n), 1.0, &mut acc);
    acc.0 / acc.1
}

#[test]
fn twelve_site_chain_against_streaming_contraction() {
    let sz = SiteOperator::sz(2);
    let brute = streaming_szsz(2, 12, 1.0, 3);
    let t = two_point_finite(&sz, &sz, 2, 1.0, 12, 3).unwrap();
    assert!((t - brute).abs() < 1e-10, "{t} vs {brute}");
}
