//! CSV export of solution bundles.

use std::fmt::Write as _;
use std::path::Path;

use crate::bvp::SolutionBundle;

pub const HEADER: &str = "t,r,state,low,up,u_low,u_up,p1,p2";

/// Formats like C's `%.9g`.
pub fn format_g9(v: f64) -> String {
    const P: i32 = 9;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s.to_owned()
        }
    };
    if (-4..P).contains(&exp) {
        trim(&format!("{:.*}", (P - 1 - exp) as usize, v))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// One row per (state, level, node), sorted in that order.
pub fn render_csv(bundle: &SolutionBundle) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let nodes = bundle.time.nodes();
    for i in 0..bundle.n_states() {
        for sol in &bundle.solutions {
            let (ul, uu) = if sol.n_controls() > 0 { (sol.u_low(0), sol.u_up(0)) } else { (&[][..], &[][..]) };
            for (k, &t) in nodes.iter().enumerate() {
                let u = |c: &[f64]| c.get(k).map_or_else(|| "0".to_owned(), |v| format_g9(*v));
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    format_g9(t),
                    format_g9(sol.r),
                    i + 1,
                    format_g9(sol.x_low(i)[k]),
                    format_g9(sol.x_up(i)[k]),
                    u(ul),
                    u(uu),
                    format_g9(sol.p1(i)[k]),
                    format_g9(sol.p2(i)[k]),
                );
            }
        }
    }
    out
}

pub fn emit_csv(bundle: &SolutionBundle, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_csv(bundle))
}

#[cfg(test)]
mod tests {
    use super::format_g9;

    #[test]
    fn matches_c_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (999999999.5, "1e+09"),
            (1e100, "1e+100"),
            (2.0f64.sqrt(), "1.41421356"),
        ];
        for (v, s) in cases {
            assert_eq!(format_g9(v), s, "{v}");
        }
    }
}
