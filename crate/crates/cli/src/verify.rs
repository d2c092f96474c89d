//! The `verify` subcommand: self-checks of the tableau identities, the
//! quadrature, and the discrete operators, printing one line per
//! property with its measured defect.

use eepc::damping::{DampingCase, SplitMix64};
use eepc::fd::build_fd_operators;
use eepc::linalg::dot;
use eepc::quadrature::gauss_legendre;
use eepc::system::DampedSystem;
use eepc::systems::{apply_advection, make_burgers};
use eepc::tableau::{make_tableau, make_tableau_general};

struct Check {
    name: String,
    defect: f64,
    bound: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.defect <= self.bound
    }
}

/// Run the full battery; returns true when every check passes.
pub fn cmd_verify() -> bool {
    let mut checks = Vec::new();

    for s in 1..=4 {
        let tab = make_tableau::<f64>(s).expect("shipped tableau");
        let general = make_tableau_general::<f64>(s).expect("general tableau");

        checks.push(Check {
            name: format!("s={s} closed form vs Lagrange-basis construction"),
            defect: tab.a_coeffs().max_coeff_diff(general.a_coeffs()),
            bound: 1e-12,
        });

        let mut moment_defect = 0.0_f64;
        for k in 1..=s {
            let moment = tab.a_coeffs().sigma_moment(k);
            for (i, &c) in moment.coeffs().iter().enumerate() {
                let want = if i == k { 1.0 / k as f64 } else { 0.0 };
                moment_defect = moment_defect.max((c - want).abs());
            }
        }
        checks.push(Check {
            name: format!("s={s} order conditions k=1..{s} (includes C_tau = tau)"),
            defect: moment_defect,
            bound: 1e-13,
        });

        let mut symmetry_defect = 0.0_f64;
        for i in 0..=20 {
            for j in 0..=20 {
                let tau = i as f64 / 20.0;
                let sigma = j as f64 / 20.0;
                symmetry_defect = symmetry_defect
                    .max((tab.eval_a(tau, sigma) + tab.eval_a(1.0 - tau, 1.0 - sigma) - 1.0).abs());
            }
        }
        checks.push(Check {
            name: format!("s={s} symmetry identity A(t,s) + A(1-t,1-s) = 1 on 20x20 grid"),
            defect: symmetry_defect,
            bound: 1e-12,
        });
    }

    let rule = gauss_legendre::<f64>(8);
    checks.push(Check {
        name: "8-point quadrature weight sum".to_string(),
        defect: (rule.weights().iter().sum::<f64>() - 1.0).abs(),
        bound: 1e-14,
    });
    checks.push(Check {
        name: "8-point quadrature integrates sigma^15".to_string(),
        defect: (rule.integrate(|x| x.powi(15)) - 1.0 / 16.0).abs(),
        bound: 1e-14,
    });

    let n = 80;
    let dx = std::f64::consts::PI / 40.0;
    let ops = build_fd_operators::<f64>(n, dx).expect("operators");
    let mut rng = SplitMix64::new(0x5EED);
    let randv =
        |rng: &mut SplitMix64| -> Vec<f64> { (0..n).map(|_| rng.next_symmetric()).collect() };

    // quadratic-form defects are normalized by the form magnitude, since
    // the raw D3 entries scale like 1/(2 dx^3)
    let mut skew_defect = 0.0_f64;
    let mut sym_defect = 0.0_f64;
    let mut product_defect = 0.0_f64;
    let mut advection_defect = 0.0_f64;
    for _ in 0..5 {
        let y = randv(&mut rng);
        let z = randv(&mut rng);
        let u = randv(&mut rng);
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];

        ops.d1.apply(&z, &mut a);
        ops.d1.apply(&y, &mut b);
        skew_defect =
            skew_defect.max((dot(&y, &a) + dot(&z, &b)).abs() / (1.0 + dot(&y, &a).abs()));
        ops.d3.apply(&z, &mut a);
        ops.d3.apply(&y, &mut b);
        skew_defect =
            skew_defect.max((dot(&y, &a) + dot(&z, &b)).abs() / (1.0 + dot(&y, &a).abs()));

        ops.d2.apply(&z, &mut a);
        ops.d2.apply(&y, &mut b);
        sym_defect = sym_defect.max((dot(&y, &a) - dot(&z, &b)).abs() / (1.0 + dot(&y, &a).abs()));

        ops.d2.apply(&z, &mut a);
        let mut two_step = vec![0.0; n];
        ops.d1.apply(&a, &mut two_step);
        ops.d3.apply(&z, &mut b);
        let scale = 1.0 + b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (p, q) in b.iter().zip(&two_step) {
            product_defect = product_defect.max((p - q).abs() / scale);
        }

        apply_advection(&u, &z, dx, &mut a);
        apply_advection(&u, &y, dx, &mut b);
        advection_defect =
            advection_defect.max((dot(&y, &a) + dot(&z, &b)).abs() / (1.0 + dot(&y, &a).abs()));
    }
    checks.push(Check {
        name: "D1 and D3 skew-symmetry (relative, random quadratic forms)".to_string(),
        defect: skew_defect,
        bound: 1e-12,
    });
    checks.push(Check {
        name: "D2 symmetry (relative, random quadratic forms)".to_string(),
        defect: sym_defect,
        bound: 1e-12,
    });
    checks.push(Check {
        name: "D3 equals D1*D2 on random vectors (relative)".to_string(),
        defect: product_defect,
        bound: 1e-11,
    });
    checks.push(Check {
        name: "advection operator A(u) skew-symmetry".to_string(),
        defect: advection_defect,
        bound: 1e-12,
    });

    let mut row_sum_defect = 0.0_f64;
    for c in [&ops.d1, &ops.d2, &ops.d3] {
        row_sum_defect = row_sum_defect.max(c.first_row().iter().sum::<f64>().abs());
    }
    checks.push(Check {
        name: "stencil row sums vanish".to_string(),
        defect: row_sum_defect,
        bound: 1e-12,
    });

    // discrete mass-rate identity for the Burgers field
    let gamma = 0.25;
    let sys = make_burgers(n, dx, &DampingCase::ConstantEqual { gamma }).expect("system");
    let mut mass_defect = 0.0_f64;
    for _ in 0..5 {
        let u = randv(&mut rng);
        let mut grad = vec![0.0; n];
        sys.grad_h(&u, &mut grad);
        let mut skew = vec![0.0; n];
        sys.skew_apply(0.0, &u, &grad, &mut skew);
        let rhs: f64 = skew
            .iter()
            .zip(&u)
            .map(|(&s, &ui)| s - 2.0 * gamma * ui)
            .sum();
        let mass: f64 = u.iter().sum();
        mass_defect = mass_defect.max((rhs + 2.0 * gamma * mass).abs());
    }
    checks.push(Check {
        name: "Burgers discrete mass-rate identity 1^T D1 = 0".to_string(),
        defect: mass_defect,
        bound: 1e-12,
    });

    let mut all_pass = true;
    for check in &checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {} (defect {:.3e}, bound {:.0e})",
            check.name, check.defect, check.bound
        );
        all_pass &= check.passed();
    }
    println!(
        "verify: {} of {} checks passed",
        checks.iter().filter(|c| c.passed()).count(),
        checks.len()
    );
    all_pass
}
