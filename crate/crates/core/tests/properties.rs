//! Property-based invariants over randomly drawn spaces, relations and maps.

use proptest::prelude::*;

use orthostab::fspace::{
    p_power_space, AmbientNorm, BetaKind, BetaSpace, NormEval, QuasiKind, QuasiSpace, Vector,
};
use orthostab::maps::{make_additive, perturb, Matrix, NoiseKind};
use orthostab::ortho::{
    find_witness, sample_orthogonal_pairs, Orthogonality, OrthoRelation, RelationKind,
};
use orthostab::stability::defect;

fn beta_kind(idx: usize) -> BetaKind {
    [BetaKind::EuclideanPower, BetaKind::BetaSum, BetaKind::SupPower][idx % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn beta_norm_homogeneity_and_triangle(
        kind_idx in 0..3usize,
        dim in 2..6usize,
        beta in 0.05..1.0f64,
        raw_x in prop::collection::vec(-10.0..10.0f64, 8),
        raw_y in prop::collection::vec(-10.0..10.0f64, 8),
        t in -4.0..4.0f64,
    ) {
        let space = BetaSpace::new(beta_kind(kind_idx), dim, beta).unwrap();
        let x = &raw_x[..dim];
        let y = &raw_y[..dim];
        let scaled: Vec<f64> = x.iter().map(|c| t * c).collect();
        let lhs = space.norm_slice(&scaled);
        let rhs = t.abs().powf(beta) * space.norm_slice(x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs));
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let n_sum = space.norm_slice(&sum);
        let n_x = space.norm_slice(x);
        let n_y = space.norm_slice(y);
        prop_assert!(n_sum <= n_x + n_y + 1e-10 * (1.0 + n_x + n_y));
    }

    #[test]
    fn quasi_norm_laws_and_p_power(
        dim in 2..6usize,
        p in 0.1..1.0f64,
        raw_x in prop::collection::vec(-10.0..10.0f64, 8),
        raw_y in prop::collection::vec(-10.0..10.0f64, 8),
    ) {
        let quasi = QuasiSpace::new(QuasiKind::LpQuasi, dim, p).unwrap();
        let x = &raw_x[..dim];
        let y = &raw_y[..dim];
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let n_sum = quasi.norm_slice(&sum);
        let n_x = quasi.norm_slice(x);
        let n_y = quasi.norm_slice(y);
        let c = quasi.quasi_constant();
        prop_assert!(n_sum <= c * (n_x + n_y) * (1.0 + 1e-12) + 1e-12);
        prop_assert!(
            n_sum.powf(p) <= n_x.powf(p) + n_y.powf(p) + 1e-10 * (1.0 + n_x.powf(p) + n_y.powf(p))
        );
        // The p-power space evaluates to the p-th power of the quasi-norm.
        let powered = p_power_space(&quasi).unwrap();
        let direct = powered.norm_slice(x);
        let via_power = quasi.norm_slice(x).powf(p);
        prop_assert!((direct - via_power).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn witness_search_succeeds_on_random_inputs(
        dim in 2..6usize,
        ambient_idx in 0..3usize,
        raw_x in prop::collection::vec(-10.0..10.0f64, 8),
    ) {
        let ambient = [
            AmbientNorm::Euclidean,
            AmbientNorm::Sup,
            AmbientNorm::Lq(4.0),
        ][ambient_idx];
        let rel = OrthoRelation::new(RelationKind::Isosceles, ambient, 1e-9).unwrap();
        let x = Vector::new(raw_x[..dim].to_vec()).unwrap();
        let w = find_witness(&rel, &x, 1e-9, 200).unwrap();
        prop_assert!(w.residual_primary <= 1e-9);
        prop_assert!(w.residual_secondary <= 1e-9);
        prop_assert!(w.iterations <= 200);
        // ‖y‖ = ‖x‖ in the ambient norm by construction.
        prop_assert!(
            (rel.ambient.norm(&w.y) - rel.ambient.norm(&x)).abs()
                <= 1e-10 * (1.0 + rel.ambient.norm(&x))
        );
    }

    #[test]
    fn generated_pairs_scale_and_flip(
        kind_idx in 0..3usize,
        seed in 0..1000u64,
    ) {
        let kind = [
            RelationKind::Isosceles,
            RelationKind::InnerProduct,
            RelationKind::Pythagorean,
        ][kind_idx];
        let ambient = if kind == RelationKind::Pythagorean {
            AmbientNorm::Sup
        } else {
            AmbientNorm::Euclidean
        };
        let rel = OrthoRelation::new(kind, ambient, 1e-9).unwrap();
        let pairs = sample_orthogonal_pairs(&rel, 3, 4, seed).unwrap();
        for (x, y) in &pairs {
            prop_assert!(rel.orthogonal(x, y).unwrap());
            // Doubling closure holds for every implemented kind.
            prop_assert!(rel.orthogonal(&x.scale(2.0), &y.scale(2.0)).unwrap());
        }
    }

    #[test]
    fn perturbed_defect_stays_within_declared_budget(
        amplitude in 0.0..0.3f64,
        noise_seed in 0..500u64,
        pair_seed in 0..500u64,
    ) {
        let y = BetaSpace::new(BetaKind::BetaSum, 3, 0.5).unwrap();
        let base = make_additive(Matrix::identity(3), y).unwrap();
        let f = perturb(&base, NoiseKind::SeededHashNoise, amplitude, noise_seed, false).unwrap();
        let rel = OrthoRelation::new(RelationKind::Isosceles, AmbientNorm::Euclidean, 1e-9)
            .unwrap();
        let pairs = sample_orthogonal_pairs(&rel, 3, 5, pair_seed).unwrap();
        for (x, yv) in &pairs {
            let d = defect(&f, x, yv).unwrap();
            prop_assert!(d <= f.epsilon() * (1.0 + 1e-9) + 1e-12);
        }
    }
}

/// Hash noise at amplitude 0.1 in a beta-sum target: the measured defect over
/// ten thousand orthogonal pairs never exceeds the three-term budget 0.3.
#[test]
fn hash_noise_defect_budget_over_ten_thousand_pairs() {
    let y = BetaSpace::new(BetaKind::BetaSum, 3, 0.5).unwrap();
    let base = make_additive(Matrix::identity(3), y).unwrap();
    let f = perturb(&base, NoiseKind::SeededHashNoise, 0.1, 99, false).unwrap();
    let rel = OrthoRelation::new(RelationKind::Isosceles, AmbientNorm::Euclidean, 1e-9).unwrap();
    let pairs = sample_orthogonal_pairs(&rel, 3, 10_000, 123).unwrap();
    let mut sup = 0.0f64;
    for (x, yv) in &pairs {
        sup = sup.max(defect(&f, x, yv).unwrap());
    }
    assert!(sup <= 0.3, "sup defect {sup}");
    assert!(sup > 0.05, "noise should actually bite, got {sup}");
}
