//! CSV export with a fixed header per table and 9 significant digits.

use std::io::Write;

use crate::aux::CurvePoint;
use crate::error::Result;
use crate::gw::RegionPoint;

pub const CURVE_HEADER: [&str; 5] = [
    "excess_rate_bits",
    "shared_rate_bits",
    "lagrange_weight",
    "residual",
    "converged",
];
pub const LOSSY_SWEEP_HEADER: [&str; 7] = ["d1", "d2", "rate_bits", "lossy_wyner_bits", "lb", "ub", "epsilon"];
pub const GAUSSIAN_HEADER: [&str; 7] = [
    "d1",
    "d2",
    "regime",
    "joint_rd_bits",
    "lossy_ci_bits",
    "slb_bits",
    "slb_tight",
];
pub const REGION_HEADER: [&str; 7] = ["r0", "r1", "r2", "sum", "d1", "d2", "witness_id"];

/// Formats like C's `%.9g`.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One row of a Gaussian sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianRow {
    pub d1: f64,
    pub d2: f64,
    pub regime: String,
    pub joint_rd: f64,
    pub lossy_ci: f64,
    pub slb: f64,
    pub slb_tight: bool,
}

/// One row of a discrete lossy sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LossyRow {
    pub d1: f64,
    pub d2: f64,
    pub rate: f64,
    pub lossy_wyner: f64,
    pub lb: f64,
    pub ub: f64,
    pub epsilon: f64,
}

fn write_table<W: Write, I>(out: W, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| std::io::Error::other(e);
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    write_table(
        out,
        &CURVE_HEADER,
        points.iter().map(|p| {
            vec![
                fmt_sig(p.excess_rate),
                fmt_sig(p.shared_rate),
                fmt_sig(p.lagrange_weight),
                fmt_sig(p.residual),
                p.converged.to_string(),
            ]
        }),
    )
}

pub fn write_lossy_sweep<W: Write>(out: W, rows: &[LossyRow]) -> Result<()> {
    write_table(
        out,
        &LOSSY_SWEEP_HEADER,
        rows.iter().map(|r| {
            [r.d1, r.d2, r.rate, r.lossy_wyner, r.lb, r.ub, r.epsilon]
                .into_iter()
                .map(fmt_sig)
                .collect()
        }),
    )
}

pub fn write_gaussian<W: Write>(out: W, rows: &[GaussianRow]) -> Result<()> {
    write_table(
        out,
        &GAUSSIAN_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_sig(r.d1),
                fmt_sig(r.d2),
                r.regime.clone(),
                fmt_sig(r.joint_rd),
                fmt_sig(r.lossy_ci),
                fmt_sig(r.slb),
                r.slb_tight.to_string(),
            ]
        }),
    )
}

pub fn write_region<W: Write>(out: W, points: &[RegionPoint]) -> Result<()> {
    write_table(
        out,
        &REGION_HEADER,
        points.iter().map(|p| {
            vec![
                fmt_sig(p.rate.r0),
                fmt_sig(p.rate.r1),
                fmt_sig(p.rate.r2),
                fmt_sig(p.rate.sum()),
                fmt_sig(p.d1),
                fmt_sig(p.d2),
                p.witness_id.clone(),
            ]
        }),
    )
}

/// Renders a table into a string.
pub fn to_string<F>(f: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.792481250360578), "0.79248125");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1234567891.0), "1.23456789e+09");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig(1e-5), "1e-05");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn lossy_table() {
        let row = LossyRow {
            d1: 0.02,
            d2: 0.02,
            rate: 1.0,
            lossy_wyner: 0.5,
            lb: 0.4,
            ub: 0.6,
            epsilon: 1e-9,
        };
        let s = to_string(|b| write_lossy_sweep(b, &[row])).unwrap();
        assert_eq!(s, "d1,d2,rate_bits,lossy_wyner_bits,lb,ub,epsilon\n0.02,0.02,1,0.5,0.4,0.6,1e-09\n");
    }
}
