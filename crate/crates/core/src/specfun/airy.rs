//! Airy function of the first kind and its derivative for real arguments.
//!
//! For `-SERIES_SWITCH_NEG <= x <= SERIES_SWITCH` the Maclaurin series is
//! summed in double-double arithmetic, which keeps the cancellation between
//! the two power series harmless. Outside that range the standard asymptotic
//! expansions are used: exponentially decaying on the right, trigonometric on
//! the left.

use std::f64::consts::{FRAC_PI_4, PI};

use super::ddouble::DoubleDouble;
use crate::error::{ensure_finite, Result};

/// |x| at which the positive side switches from series to asymptotics.
pub const SERIES_SWITCH: f64 = 6.0;

/// Left-hand switch. The oscillatory expansion is only good to ~1e-10 at
/// |x| = 6, so the series is carried a bit further on this side.
const SERIES_SWITCH_NEG: f64 = 8.0;

/// Ai(0) = 3^(-2/3) / Γ(2/3), split as hi + lo.
const AI0: DoubleDouble = DoubleDouble::new(0.3550280538878172, 2.05233632436212e-17);
/// -Ai'(0) = 3^(-1/3) / Γ(1/3), split as hi + lo.
const MINUS_AIP0: DoubleDouble = DoubleDouble::new(0.2588194037928068, -2.522243111610832e-17);

/// Relative size at which the double-double series is cut.
const SERIES_TOL: f64 = 1e-33;
const MAX_SERIES_TERMS: usize = 200;
const MAX_ASYMPTOTIC_TERMS: usize = 60;

pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_and_prime(x).map(|(ai, _)| ai)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy_ai_and_prime(x).map(|(_, aip)| aip)
}

/// `(Ai(x), Ai'(x))` in one pass.
pub fn airy_ai_and_prime(x: f64) -> Result<(f64, f64)> {
    ensure_finite("x", x)?;
    Ok(if x > SERIES_SWITCH {
        decaying_asymptotic(x)
    } else if x < -SERIES_SWITCH_NEG {
        oscillatory_asymptotic(-x)
    } else {
        maclaurin(x)
    })
}

fn maclaurin(x: f64) -> (f64, f64) {
    let xd = DoubleDouble::from_f64(x);
    let x3 = (xd * xd).scale(x);

    // f = Σ x^{3k} / Π (3i)(3i-1),   g = Σ x^{3k+1} / Π (3i+1)(3i)
    let mut f = DoubleDouble::from_f64(1.0);
    let mut g = xd;
    let mut df = DoubleDouble::ZERO;
    let mut dg = DoubleDouble::from_f64(1.0);

    let mut tf = f;
    let mut tg = g;
    let mut tdf = (xd * xd).div_f64(2.0);
    let mut tdg = dg;
    df = df + tdf;

    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        tf = (tf * x3).div_f64((3.0 * kf) * (3.0 * kf - 1.0));
        tg = (tg * x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf));
        tdg = (tdg * x3).div_f64((3.0 * kf - 2.0) * (3.0 * kf));
        f = f + tf;
        g = g + tg;
        dg = dg + tdg;
        if k >= 2 {
            tdf = (tdf * x3).div_f64(3.0 * (kf - 1.0) * (3.0 * kf - 1.0));
            df = df + tdf;
        }
        let scale = 1.0 + f.abs_hi() + g.abs_hi() + df.abs_hi() + dg.abs_hi();
        let last = tf.abs_hi() + tg.abs_hi() + tdf.abs_hi() + tdg.abs_hi();
        if k > 3 && last < SERIES_TOL * scale {
            break;
        }
    }

    let ai = AI0 * f - MINUS_AIP0 * g;
    let aip = AI0 * df - MINUS_AIP0 * dg;
    (ai.to_f64(), aip.to_f64())
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions.
fn asymptotic_coefficients(zeta: f64) -> impl Iterator<Item = (f64, f64, f64)> {
    // Yields (u_k, v_k, zeta^-k).
    let mut u = 1.0_f64;
    let mut zpow = 1.0_f64;
    (0..MAX_ASYMPTOTIC_TERMS).map(move |k| {
        if k > 0 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            zpow /= zeta;
        }
        let kf = k as f64;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        (u, v, zpow)
    })
}

/// Sums the alternating series in u and v, stopping at the smallest term.
fn decaying_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut su = 0.0;
    let mut sv = 0.0;
    let mut prev = f64::INFINITY;
    for (k, (u, v, zp)) in asymptotic_coefficients(zeta).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let tu = sign * u * zp;
        let tv = sign * v * zp;
        let size = tu.abs().max(tv.abs());
        if size > prev {
            break;
        }
        su += tu;
        sv += tv;
        if size < 1e-17 * su.abs() {
            break;
        }
        prev = size;
    }
    let x4 = x.sqrt().sqrt();
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    (pref / x4 * su, -pref * x4 * sv)
}

/// Ai(-z), Ai'(-z) for large positive z.
fn oscillatory_asymptotic(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    // even/odd parts: Σ (-1)^k c_{2k} ζ^{-2k} and Σ (-1)^k c_{2k+1} ζ^{-2k-1}
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut prev = f64::INFINITY;
    for (k, (u, v, zp)) in asymptotic_coefficients(zeta).enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let tu = sign * u * zp;
        let tv = sign * v * zp;
        let size = tu.abs().max(tv.abs());
        if size > prev {
            break;
        }
        if k % 2 == 0 {
            ue += tu;
            ve += tv;
        } else {
            uo += tu;
            vo += tv;
        }
        if size < 1e-17 {
            break;
        }
        prev = size;
    }
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let z4 = z.sqrt().sqrt();
    let ai = (c * ue + s * uo) / (PI.sqrt() * z4);
    let aip = z4 / PI.sqrt() * (s * ve - c * vo);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit evaluation of the defining series and
    // asymptotic forms (independent multiprecision oracle).
    const REFERENCE: &[(f64, f64, f64)] = &[
        (-20.0, -0.1764061270779846895902, 0.8928628567364712383984),
        (-15.0, 0.2782174908708289295276, 0.2723742043086420208258),
        (-12.0, -0.06655517505437312947419, 1.023110453367970729896),
        (-10.0, 0.04024123848644319068943, 0.9962650441327900559046),
        (-8.0, -0.05270505035638620262208, 0.9355609381983065510255),
        (-7.0, 0.1842808352505056372799, -0.7710081684101265477313),
        (-6.5, -0.2380203019971158035944, -0.6749524925132021729989),
        (-6.0, -0.3291451736298231052314, 0.3459354872813428949298),
        (-5.0, 0.350761009024114319788, 0.3271928185544431367949),
        (-3.0, -0.3788142936776580743472, 0.3145837692165988136508),
        (-2.0, 0.2274074282016855759919, 0.6182590207416910414063),
        (-1.0, 0.5355608832923521187995, -0.01016056711664520939505),
        (-0.5, 0.4757280916105395887986, -0.2040816703395473861448),
        (0.0, 0.3550280538878172392601, -0.2588194037928067984052),
        (0.5, 0.2316936064808334897691, -0.224910532664683893136),
        (1.0, 0.1352924163128814155241, -0.1591474412967932127875),
        (2.0, 0.03492413042327437913532, -0.053090384433653631704),
        (3.0, 0.006591139357460719144257, -0.01191297670595131847376),
        (5.0, 0.0001083444281360744173499, -0.0002474138908684624760002),
        (5.9, 0.00001274709450918447637627, -0.00003148129711711273752075),
        (6.0, 0.000009947694360252889570239, -0.00002476520039703495475418),
        (6.1, 0.000007747731032448434443153, -0.00001944098537510297091764),
        (7.0, 7.492128863997167080771e-7, -0.000002008150894738791991169),
        (8.0, 4.692207616099231625649e-8, -1.341439297906786574291e-7),
        (10.0, 1.104753255289868593355e-10, -3.520633676738923636621e-10),
        (12.0, 1.393184688875360839049e-13, -4.854736554985308462994e-13),
        (15.0, 2.164962520737992298989e-18, -8.420567954017772766124e-18),
        (20.0, 1.691672868670540313554e-27, -7.586391625748354960515e-27),
    ];

    fn tolerance(x: f64) -> f64 {
        if x < -12.0 {
            1e-9
        } else {
            1e-10
        }
    }

    #[test]
    fn matches_reference_table() {
        for &(x, ai, aip) in REFERENCE {
            let (a, d) = airy_ai_and_prime(x).unwrap();
            assert!((a - ai).abs() <= tolerance(x), "Ai({x}) = {a}, want {ai}");
            assert!((d - aip).abs() <= tolerance(x), "Ai'({x}) = {d}, want {aip}");
        }
    }

    #[test]
    fn values_at_origin() {
        assert!((airy_ai(0.0).unwrap() - 0.35502805388781723926).abs() < 1e-15);
        assert!((airy_ai_prime(0.0).unwrap() + 0.25881940379280679840).abs() < 1e-15);
        assert!((airy_ai(1.0).unwrap() - 0.13529241631288141552).abs() < 1e-15);
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        for x in [-2.0, 0.0, 2.0] {
            let f = |t: f64| airy_ai(t).unwrap();
            let second = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((second - x * f(x)).abs() <= 1e-6, "x = {x}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        let x = 0.7;
        let fd = (airy_ai(x + h).unwrap() - airy_ai(x - h).unwrap()) / (2.0 * h);
        assert!((fd - airy_ai_prime(x).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn derivative_is_negative_and_decays() {
        let vals: Vec<f64> = [4.0, 6.0, 8.0].iter().map(|&x| airy_ai_prime(x).unwrap()).collect();
        assert!(vals.iter().all(|&v| v < 0.0));
        assert!(vals[0].abs() > vals[1].abs() && vals[1].abs() > vals[2].abs());
    }

    #[test]
    fn continuous_across_switch_points() {
        for s in [SERIES_SWITCH, -SERIES_SWITCH_NEG] {
            let eps = 1e-12;
            let (a, d) = airy_ai_and_prime(s - eps).unwrap();
            let (b, e) = airy_ai_and_prime(s + eps).unwrap();
            assert!((a - b).abs() < 1e-10 && (d - e).abs() < 1e-10, "switch {s}");
        }
    }

    #[test]
    fn wronskian_identity_with_dense_grid() {
        // Ai(x) Ai'(x+h) - Ai(x+h) Ai'(x) = -h K(x, x+h)
        //   = -h (Ai'(x)^2 - x Ai(x)^2) + h^2 Ai(x)^2 / 2 + O(h^3)
        let h = 1e-4;
        for i in 0..=40 {
            let x = -10.0 + 0.5 * i as f64;
            let (a0, d0) = airy_ai_and_prime(x).unwrap();
            let (a1, d1) = airy_ai_and_prime(x + h).unwrap();
            let w = a0 * d1 - a1 * d0;
            let diag = d0 * d0 - x * a0 * a0;
            let expected = -h * diag + 0.5 * h * h * a0 * a0;
            assert!((w - expected).abs() < 1e-11, "x = {x}: {w} vs {expected}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(airy_ai(f64::NAN).is_err());
        assert!(airy_ai_prime(f64::INFINITY).is_err());
    }
}
