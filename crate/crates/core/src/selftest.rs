//! A quick battery of identities, run by `steiner-ladder selftest`.

use std::f64::consts::PI;

use crate::analysis::maxwell_length;
use crate::dynamics::{derive_params, periodic_points};
use crate::geom::{Point, SQRT3};
use crate::ladder::{
    build_ladder_tree_a0, closed_form_length_a0, closed_form_length_a1, ladder_block, HalfPlane, LadderParams,
};
use crate::melzak::solve_exact;
use crate::topology::count_full_topologies;
use crate::tree::TerminalSet;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run() -> Vec<Check> {
    let alpha = PI / 36.0;
    let lambda = 0.5;
    vec![
        check("topology counts n = 3..7", || {
            let got = (3..=7).map(count_full_topologies).collect::<crate::Result<Vec<_>>>()?;
            Ok((got == [1, 3, 15, 105, 945], format!("{got:?}")))
        }),
        check("unit square", || {
            let sq = TerminalSet::from_points(&[
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ]);
            let s = solve_exact(&sq, 1e-9)?;
            let err = (s.length() - (1.0 + SQRT3)).abs();
            Ok((
                err < 1e-9 && s.co_optima.len() == 2,
                format!("err {err:.1e}, {} co-optima", s.co_optima.len()),
            ))
        }),
        check("five-terminal block length", || {
            let block = ladder_block(alpha, lambda)?;
            let want = (1.0 - lambda * lambda) * closed_form_length_a1(alpha, lambda);
            let rel = (block.length - want).abs() / want;
            Ok((rel < 1e-9, format!("relative error {rel:.1e}")))
        }),
        check("segment-closed tree length", || {
            let p = LadderParams::new(alpha, lambda, 20)?;
            let t = build_ladder_tree_a0(&p, HalfPlane::Upper)?;
            let (re, _) = maxwell_length(&t)?;
            let cf = closed_form_length_a0(alpha, lambda);
            let tail = lambda.powi(19) * cf;
            let ok = (re - t.length).abs() < 1e-10 && (cf - t.length).abs() < 1e-6 + tail;
            Ok((ok, format!("edge sum {:.12}, closed form {cf:.12}", t.length)))
        }),
        check("period-two points", || {
            let p = derive_params(alpha, lambda, 0.0)?;
            let pts = periodic_points(&p, 2)?;
            Ok((pts == [1.0 / 6.0, 5.0 / 6.0], format!("{pts:?}")))
        }),
    ]
}
