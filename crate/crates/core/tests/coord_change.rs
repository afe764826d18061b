use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voa_core::algebra::Algebra;
use voa_core::contragredient::DualModule;
use voa_core::coords::{
    coordinate_operator, exp_flow, operator_matrix, rho_family, scale_weights, solve_exp_coefficients,
    verify_huang_covariance, CoordinateOperator, FormalCoordinate,
};
use voa_core::field::FieldEngine;
use voa_core::module::{basis_upto, parse_vector, unit, Bid, GradedModule, PbwModule};
use voa_core::poly::{RatFn, UPoly};
use voa_core::rational::Q;
use voa_core::scalar::Scalar;

fn random_coordinate(rng: &mut ChaCha8Rng, degree: usize) -> FormalCoordinate {
    let mut c = vec![Scalar::zero()];
    for i in 1..=degree {
        let n = loop {
            let n = rng.gen_range(-6i64..=6);
            if i > 1 || n != 0 {
                break n;
            }
        };
        c.push(Scalar::ratio(n, rng.gen_range(1..=5)));
    }
    FormalCoordinate::polynomial(c)
}

#[test]
fn exponential_form_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let alpha = random_coordinate(&mut rng, 4);
        let m = 6;
        let f = solve_exp_coefficients(&alpha, m).unwrap();
        let back = exp_flow(&f.c, m + 1);
        let want = alpha.to_order(m + 1).unwrap();
        for (k, b) in back.iter().enumerate() {
            assert_eq!(&(b * &f.scale), &want.coeff(k), "degree {k}");
        }
    }
}

#[test]
fn scaling_is_a_power_of_l0() {
    let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::param('c'))));
    let lam = Scalar::ratio(-2, 3);
    let f = solve_exp_coefficients(&FormalCoordinate::scaling(lam.clone()), 4).unwrap();
    assert_eq!(f.scale, lam);
    assert!(f.c.iter().all(Scalar::is_zero));
    let u = coordinate_operator(&FormalCoordinate::scaling(lam.clone()), &*v, 5).unwrap();
    assert_eq!(u, operator_matrix(&*v, 5, |x| scale_weights(x, &lam)));
}

#[test]
fn vacuum_is_fixed_by_every_coordinate() {
    let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::one())));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let u = CoordinateOperator::new(&random_coordinate(&mut rng, 3), 4).unwrap();
        assert_eq!(u.apply(&*v, &unit(Bid::TOP)), unit(Bid::TOP));
    }
}

#[test]
fn rho_family_cocycle() {
    let z = RatFn::from_poly(UPoly::x());
    let eta = RatFn::from_poly(UPoly::from_coeffs(vec![Q::ZERO, Q::ONE, Q::new(1, 2)]));
    let mu = RatFn::from_poly(UPoly::x()).recip().unwrap();
    let x = Q::new(3, 4);
    let order = 6;
    let a = rho_family(&eta, &mu, &x, order).unwrap();
    let b = rho_family(&mu, &z, &x, order).unwrap();
    let c = rho_family(&eta, &z, &x, order).unwrap();
    assert_eq!(a.compose(&b).unwrap().coeffs(), c.coeffs());
    // mu(x) = eta(x) = 0 at the origin leaves eta unchanged.
    let r = rho_family(&eta, &z, &Q::ZERO, 4).unwrap();
    assert_eq!(&r.coeffs()[..3], &[Scalar::zero(), Scalar::one(), Scalar::ratio(1, 2)]);
}

#[test]
fn covariance_for_the_conformal_vector() {
    let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::ratio(1, 2))));
    let e = FieldEngine::on_self(v.clone());
    let w: Arc<dyn GradedModule> = v.clone();
    let d = DualModule::new(w);
    let c = parse_vector(&*v, "L[-2]").unwrap();
    let alpha = FormalCoordinate::polynomial(vec![Scalar::zero(), Scalar::one(), Scalar::ratio(1, 3)]);
    for x in basis_upto(&*v, 2) {
        for y in basis_upto(&*v, 4) {
            let r = verify_huang_covariance(&alpha, &*e, &d, &c, x, y, 5).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}

#[test]
fn covariance_refuses_symbolic_charge() {
    let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::param('c'))));
    let e = FieldEngine::on_self(v.clone());
    let w: Arc<dyn GradedModule> = v.clone();
    let d = DualModule::new(w);
    let r = verify_huang_covariance(&FormalCoordinate::identity(), &*e, &d, &unit(Bid::TOP), Bid::TOP, Bid::TOP, 2);
    assert!(r.is_err());
}
