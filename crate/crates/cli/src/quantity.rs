//! Parsing of numeric flags with optional unit suffixes.
//!
//! Bare numbers are atomic units. Energies and frequencies accept an `ev`
//! suffix; frequencies also accept a wavelength with `um` or `cm`, which is
//! converted to the angular frequency of light at that wavelength.

use twolevel::units::{ev_to_hartree, wavelength_to_omega};

fn split_suffix(raw: &str) -> (&str, String) {
    let s = raw.trim();
    let cut = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    // keep exponent markers like `1e-6` attached to the number
    let (num, unit) = s.split_at(cut);
    if unit.eq_ignore_ascii_case("e") {
        return (s, String::new());
    }
    (num.trim(), unit.to_ascii_lowercase())
}

fn number(num: &str, raw: &str) -> Result<f64, String> {
    num.parse::<f64>()
        .map_err(|_| format!("`{raw}` is not a number"))
        .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("`{raw}` is not finite")) })
}

/// Energy or frequency: a.u. by default, `ev`, or a wavelength in `um`/`cm`.
pub fn frequency(raw: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(raw);
    let v = number(num, raw)?;
    match unit.as_str() {
        "" | "au" => Ok(v),
        "ev" => Ok(ev_to_hartree(v)),
        "um" => positive_wavelength(v, 1e-6, raw),
        "cm" => positive_wavelength(v, 1e-2, raw),
        other => Err(format!("unknown unit `{other}` in `{raw}` (use au, ev, um or cm)")),
    }
}

fn positive_wavelength(v: f64, metres: f64, raw: &str) -> Result<f64, String> {
    if v <= 0.0 {
        return Err(format!("wavelength `{raw}` must be positive"));
    }
    Ok(wavelength_to_omega(v * metres))
}

/// Plain number in atomic units.
pub fn atomic(raw: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(raw);
    if !(unit.is_empty() || unit == "au") {
        return Err(format!("`{raw}`: only atomic units are accepted here"));
    }
    number(num, raw)
}
