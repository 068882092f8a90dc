//! Inline state literals such as `coherent:1+0.5i` or `tmss:1`.

use gqit_core::{Complex64, GaussianState};

use crate::CliError;

/// Parses `<re>`, `<im>i`, `<re>±<im>i`.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("malformed complex number '{text}'"));
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .ok()
            .filter(|re| re.is_finite())
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(bad);
    };
    // The split point is the last sign that does not belong to an exponent.
    let split = body
        .char_indices()
        .filter(|&(k, c)| (c == '+' || c == '-') && k > 0 && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .next_back();
    let parse_im = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    let z = match split {
        Some(k) => Complex64::new(body[..k].parse().map_err(|_| bad())?, parse_im(&body[k..])?),
        None => Complex64::new(0.0, parse_im(body)?),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

fn number(kind: &str, arg: &str) -> Result<f64, CliError> {
    arg.parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("{kind}: expected a number, got '{arg}'")))
}

/// `vacuum:<n>`, `coherent:<z>`, `thermal:<nbar>`, `squeezed:<r>`, `tmss:<r>`.
pub fn parse_state(text: &str) -> Result<GaussianState, CliError> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("state literal '{text}' must look like kind:value")))?;
    match kind {
        "vacuum" => {
            let n = arg
                .parse()
                .map_err(|_| CliError::Usage(format!("vacuum: bad mode count '{arg}'")))?;
            Ok(GaussianState::vacuum(n)?)
        }
        "coherent" => Ok(GaussianState::coherent(parse_complex(arg)?)),
        "thermal" => Ok(GaussianState::thermal_from_photons(number(kind, arg)?)?),
        "squeezed" => Ok(GaussianState::squeezed_vacuum(number(kind, arg)?)),
        "tmss" => Ok(GaussianState::two_mode_squeezed(number(kind, arg)?)),
        _ => Err(CliError::Usage(format!("unknown state kind '{kind}'"))),
    }
}
