use std::f64::consts::PI;

use proptest::prelude::*;

use skyrme_kink::closed_form::{u_of_v, v_of_alpha, ImplicitSolution};
use skyrme_kink::io::{
    parse_kappa_list, read_profile_csv, read_profile_json, write_profile_csv, write_profile_json,
    ProfileDocument, ProfileRow, Units,
};
use skyrme_kink::model::{
    bps_residual, charge_density, energy_density, p_plus_minus, second_order_residual, KinkSign,
    ModelParams, PointState,
};
use skyrme_kink::solvers::{Grid, KinkProfile, Provenance};

fn params() -> impl Strategy<Value = ModelParams> {
    (-3.0f64..3.0, -1.0f64..1.0)
        .prop_map(|(lk, ll)| ModelParams::from_kappa(10f64.powf(lk), 10f64.powf(ll)).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    // H = P-^2 / (2 L^2) + q = P+^2 / (2 L^2) - q
    #[test]
    fn bogomolny_completion(p in params(), alpha in -7.0f64..7.0, dalpha in -5.0f64..5.0) {
        let s = PointState::new(alpha, dalpha);
        let (pp, pm) = p_plus_minus(s, &p);
        let l2 = p.big_l().powi(2);
        let h = energy_density(s, &p);
        let q = charge_density(s, &p);
        prop_assert!(close(h, 0.5 * pm * pm / l2 + q, 1e-11));
        prop_assert!(close(h, 0.5 * pp * pp / l2 - q, 1e-11));
        prop_assert!(h >= q.abs() - 1e-12 * (1.0 + h));
    }

    #[test]
    fn p_product_is_difference_of_squares(p in params(), alpha in -7.0f64..7.0, dalpha in -5.0f64..5.0) {
        let s = PointState::new(alpha, dalpha);
        let (pp, pm) = p_plus_minus(s, &p);
        let w = p.big_l().powi(2) + p.lambda() * alpha.sin().powi(2);
        prop_assert!(close(pp * pm, w * dalpha * dalpha - alpha.sin().powi(2), 1e-12));
    }

    #[test]
    fn residual_is_scaled_p(p in params(), alpha in -7.0f64..7.0, dalpha in -5.0f64..5.0) {
        let s = PointState::new(alpha, dalpha);
        let (pp, pm) = p_plus_minus(s, &p);
        let root = (p.big_l().powi(2) + p.lambda() * alpha.sin().powi(2)).sqrt();
        prop_assert!(close(bps_residual(s, KinkSign::Plus, &p), pp / root, 1e-12));
        prop_assert!(close(bps_residual(s, KinkSign::Minus, &p), pm / root, 1e-12));
    }

    #[test]
    fn densities_are_two_pi_periodic(p in params(), alpha in -7.0f64..7.0, dalpha in -5.0f64..5.0) {
        let a = PointState::new(alpha, dalpha);
        let b = PointState::new(alpha + 2.0 * PI, dalpha);
        prop_assert!(close(energy_density(a, &p), energy_density(b, &p), 1e-12));
        prop_assert!(close(charge_density(a, &p), charge_density(b, &p), 1e-12));
        prop_assert!(close(
            second_order_residual(alpha, dalpha, 0.3, &p),
            second_order_residual(alpha + 2.0 * PI, dalpha, 0.3, &p),
            1e-12
        ));
    }

    #[test]
    fn field_parity(p in params(), alpha in -7.0f64..7.0, dalpha in -5.0f64..5.0) {
        let a = PointState::new(alpha, dalpha);
        let b = PointState::new(-alpha, -dalpha);
        prop_assert!(close(energy_density(a, &p), energy_density(b, &p), 1e-12));
        prop_assert!(close(charge_density(a, &p), charge_density(b, &p), 1e-12));
    }

    #[test]
    fn v_transform_inverts(p in params(), alpha in 1e-3f64..(PI - 1e-3)) {
        let u = u_of_v(v_of_alpha(alpha, &p).unwrap(), &p).unwrap();
        prop_assert!((u - alpha.cos()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_inverts_position(p in params(), alpha in 1e-4f64..(PI - 1e-4), x0 in -5.0f64..5.0) {
        let sol = ImplicitSolution::canonical(p, x0);
        let x = sol.x_of_alpha(alpha).unwrap();
        let back = sol.alpha_of_x(x).unwrap();
        prop_assert!((back - alpha).abs() < 1e-10 * (1.0 + alpha), "{alpha} -> {x} -> {back}");
    }

    #[test]
    fn closed_form_is_monotone(p in params(), xa in -20.0f64..20.0, dx in 1e-3f64..5.0) {
        let sol = ImplicitSolution::canonical(p, 0.0);
        let xb = xa + dx * p.big_l();
        prop_assert!(sol.alpha_of_x(xa).unwrap() <= sol.alpha_of_x(xb).unwrap());
    }

    #[test]
    fn csv_round_trip(vals in prop::collection::vec(prop::array::uniform6(any::<f64>().prop_filter("finite", |v| v.is_finite())), 0..40)) {
        let rows: Vec<ProfileRow> = vals.iter().map(|v| ProfileRow {
            x: v[0], alpha: v[1], dalpha: v[2], energy_density: v[3], charge_density: v[4], bps_residual: v[5],
        }).collect();
        let back = read_profile_csv(&write_profile_csv(&rows).unwrap()).unwrap();
        prop_assert_eq!(rows.len(), back.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            prop_assert_eq!(a.dalpha.to_bits(), b.dalpha.to_bits());
            prop_assert_eq!(a.energy_density.to_bits(), b.energy_density.to_bits());
            prop_assert_eq!(a.charge_density.to_bits(), b.charge_density.to_bits());
            prop_assert_eq!(a.bps_residual.to_bits(), b.bps_residual.to_bits());
        }
    }

    #[test]
    fn json_round_trip(p in params(), x0 in -3.0f64..3.0, n in 5usize..60) {
        let grid = Grid::uniform(x0 - 8.0 * p.big_l(), x0 + 8.0 * p.big_l(), n).unwrap();
        let prof = KinkProfile::from_closed_form(&ImplicitSolution::canonical(p, x0), grid).unwrap();
        let doc = ProfileDocument::new(&prof, Units::Original);
        let text = write_profile_json(&doc).unwrap();
        let back = read_profile_json(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(write_profile_json(&back).unwrap(), text);
    }

    #[test]
    fn kappa_list_round_trip(kappas in prop::collection::vec(1e-6f64..1e6, 0..30)) {
        let text: String = kappas.iter().map(|k| format!("{k:?}\n")).collect();
        prop_assert_eq!(parse_kappa_list(&text).unwrap(), kappas);
    }
}

#[test]
fn vacuum_profile_has_zero_densities() {
    let p = ModelParams::new(2.0, 0.5).unwrap();
    let grid = Grid::uniform(-1.0, 1.0, 11).unwrap();
    let prof = KinkProfile::vacuum(p, 0, grid, Provenance::ClosedForm);
    for s in prof.states() {
        assert_eq!(energy_density(s, &p), 0.0);
        assert_eq!(charge_density(s, &p), 0.0);
    }
}
