//! The identity suite run by `verify-all`.

use crate::bridge::{
    moment_theorem, verify_fundamental_equality, verify_mean_spin_bridge, FUNDAMENTAL_DEGREE,
};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::graph::PlanarGraph;
use crate::grassmann::z_f;
use crate::ising::{dimer_p_gamma, p_gamma};
use crate::kasteleyn::make_kasteleyn;
use crate::report::Check;
use crate::spinnet::verify_westbury;

/// Degree up to which `Z^Spin P^2 = 1` is checked.
pub const WESTBURY_DEGREE: u32 = 8;
/// Highest moment order in the moment theorem check.
pub const MOMENT_ORDER: usize = 5;

fn guard(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| match e {
        Error::SizeLimit { .. } => Check::new(name).skip(e.to_string()),
        _ => {
            let mut c = Check::new(name);
            c.fail(e.to_string());
            c
        }
    })
}

pub fn fundamental(g: &PlanarGraph, y: &[Rational]) -> Check {
    let name = "fundamental equality P^2 Z^Spin = 1";
    guard(name, || {
        let r = verify_fundamental_equality(g, y, FUNDAMENTAL_DEGREE)?;
        let mut c = Check::new(name);
        c.record(r.exact_product_is_one, || "exact product is not 1".into());
        c.record(r.series_agrees, || {
            format!(
                "series error {:.3e} exceeds tail bound {:.3e}",
                r.series_error, r.tail_bound
            )
        });
        Ok(c.with_detail(format!(
            "P = {}, series error {:.2e} <= bound {:.2e}",
            r.p, r.series_error, r.tail_bound
        )))
    })
}

pub fn westbury(g: &PlanarGraph) -> Check {
    guard("Westbury Z^Spin P^2 = 1", || {
        verify_westbury(g, WESTBURY_DEGREE)
    })
}

pub fn grassmann_loop_sum(g: &PlanarGraph) -> Check {
    let name = "grassmann integral = loop sum";
    guard(name, || {
        let o = make_kasteleyn(g)?;
        let (zf, p) = (z_f(g, &o)?, p_gamma(g)?);
        let mut c = Check::new(name);
        c.record(zf == p, || format!("z_f = {}", zf));
        Ok(c)
    })
}

pub fn dimer_pfaffian(g: &PlanarGraph) -> Check {
    let name = "dimer pfaffian = loop sum";
    guard(name, || {
        let o = make_kasteleyn(g)?;
        let (d, p) = (dimer_p_gamma(g, &o)?, p_gamma(g)?);
        let mut c = Check::new(name);
        c.record(d == p, || format!("pfaffian = {}", d));
        Ok(c)
    })
}

pub fn mean_spin(g: &PlanarGraph, y: &[Rational]) -> Check {
    let name = "mean spin bridge (all edges)";
    guard(name, || {
        let mut c = Check::new(name);
        for e in 0..g.num_edges() {
            let r = verify_mean_spin_bridge(g, y, e)?;
            for k in &r.checks {
                c.record(k.passed, || format!("edge {}: {}: {}", e, k.name, k.detail));
            }
        }
        Ok(c)
    })
}

pub fn moments(g: &PlanarGraph, y: &[Rational]) -> Check {
    let name = "moment theorem (all edges)";
    guard(name, || {
        let mut c = Check::new(name);
        for e in 0..g.num_edges() {
            let r = moment_theorem(g, y, e, MOMENT_ORDER)?;
            for k in &r.checks {
                c.record(k.passed, || format!("edge {}: {}: {}", e, k.name, k.detail));
            }
        }
        Ok(c)
    })
}

/// Every identity of the suite at couplings `y`.
pub fn verify_all(g: &PlanarGraph, y: &[Rational]) -> Vec<Check> {
    vec![
        fundamental(g, y),
        westbury(g),
        grassmann_loop_sum(g),
        dimer_pfaffian(g),
        mean_spin(g, y),
        moments(g, y),
    ]
}
