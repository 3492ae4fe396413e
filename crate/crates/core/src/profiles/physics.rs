//! Reference weather-to-power and weather-to-rating models.

use serde::{Deserialize, Serialize};

use super::ProfileError;
use crate::grid::DlrCoefficients;

/// Log-law extrapolation of a wind speed measured at `h_ref` to `h_hub`.
pub fn extrapolate_wind_speed(v_ref: f64, h_ref: f64, h_hub: f64, z0: f64) -> Result<f64, ProfileError> {
    if !(z0 > 0.0) || !(h_ref > z0) || !(h_hub > z0) {
        return Err(ProfileError::Model(format!(
            "heights ({h_ref}, {h_hub}) must exceed roughness length {z0}"
        )));
    }
    if !(v_ref >= 0.0) {
        return Err(ProfileError::Model(format!("negative wind speed {v_ref}")));
    }
    Ok(v_ref * (h_hub / z0).ln() / (h_ref / z0).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindCurve {
    pub cut_in: f64,
    pub rated: f64,
    pub cut_out: f64,
    pub capacity: f64,
}

impl WindCurve {
    fn check(&self) -> Result<(), ProfileError> {
        if 0.0 < self.cut_in && self.cut_in < self.rated && self.rated < self.cut_out && self.capacity >= 0.0 {
            Ok(())
        } else {
            Err(ProfileError::Model(format!("malformed power curve {self:?}")))
        }
    }
}

/// Cubic ramp between cut-in and rated speed, flat to cut-out.
pub fn wind_power(v_hub: f64, curve: &WindCurve) -> Result<f64, ProfileError> {
    curve.check()?;
    let c = curve;
    Ok(if v_hub < c.cut_in || v_hub > c.cut_out {
        0.0
    } else if v_hub >= c.rated {
        c.capacity
    } else {
        c.capacity * (v_hub.powi(3) - c.cut_in.powi(3)) / (c.rated.powi(3) - c.cut_in.powi(3))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPanel {
    pub capacity: f64,
    pub f_sw: f64,
    pub f_lw: f64,
    pub g_ref: f64,
}

pub fn solar_power(shortwave: f64, longwave: f64, panel: &SolarPanel) -> Result<f64, ProfileError> {
    if !(shortwave >= 0.0 && longwave >= 0.0) || !(panel.g_ref > 0.0) {
        return Err(ProfileError::Model(format!(
            "solar model needs nonnegative radiation and positive g_ref (got {shortwave}, {longwave}, {})",
            panel.g_ref
        )));
    }
    let g = panel.f_sw * shortwave + panel.f_lw * longwave;
    Ok(panel.capacity * (g / panel.g_ref).min(1.0))
}

/// How weather at the two terminal buses is combined for a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalPolicy {
    /// Hotter, calmer and sunnier terminal values.
    #[default]
    Conservative,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveWeather {
    pub temperature: f64,
    pub wind_speed: f64,
    pub solar: f64,
}

pub fn combine_terminals(a: EffectiveWeather, b: EffectiveWeather, policy: TerminalPolicy) -> EffectiveWeather {
    match policy {
        TerminalPolicy::Conservative => EffectiveWeather {
            temperature: a.temperature.max(b.temperature),
            wind_speed: a.wind_speed.min(b.wind_speed),
            solar: a.solar.max(b.solar),
        },
        TerminalPolicy::Average => EffectiveWeather {
            temperature: 0.5 * (a.temperature + b.temperature),
            wind_speed: 0.5 * (a.wind_speed + b.wind_speed),
            solar: 0.5 * (a.solar + b.solar),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlrParams {
    pub base_rating: f64,
    pub coeffs: DlrCoefficients,
}

impl DlrParams {
    pub fn new(base_rating: f64) -> Self {
        DlrParams {
            base_rating,
            coeffs: DlrCoefficients::default(),
        }
    }

    pub fn check(&self) -> Result<(), ProfileError> {
        let mut e = self.coeffs.check();
        if !(self.base_rating > 0.0 && self.base_rating.is_finite()) {
            e.push(format!("base rating {} must be positive", self.base_rating));
        }
        if e.is_empty() {
            Ok(())
        } else {
            Err(ProfileError::Model(e.join("; ")))
        }
    }
}

/// Multiplicative temperature/wind/solar derating of the base rating.
pub fn dynamic_rating(w: &EffectiveWeather, params: &DlrParams) -> Result<f64, ProfileError> {
    params.check()?;
    let c = &params.coeffs;
    let ft = 1.0 + c.temp_coeff * (c.temp_ref - w.temperature);
    let fw = 1.0 + c.wind_coeff * (w.wind_speed.min(c.wind_cap) - c.wind_ref);
    let fs = 1.0 - c.solar_coeff * w.solar / c.solar_ref;
    let raw = params.base_rating * ft * fw * fs;
    Ok(raw.clamp(c.clip_lo * params.base_rating, c.clip_hi * params.base_rating))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wind_extrapolation_examples() {
        assert_abs_diff_eq!(extrapolate_wind_speed(5.0, 10.0, 80.0, 0.03).unwrap(), 6.790, epsilon = 1e-3);
        assert_eq!(extrapolate_wind_speed(0.0, 10.0, 80.0, 0.03).unwrap(), 0.0);
        assert_eq!(extrapolate_wind_speed(7.2, 10.0, 10.0, 0.5).unwrap(), 7.2);
        assert!(extrapolate_wind_speed(5.0, 0.03, 80.0, 0.03).is_err());
        assert!(extrapolate_wind_speed(5.0, 10.0, 0.01, 0.03).is_err());
    }

    #[test]
    fn wind_curve_examples() {
        let c = WindCurve { cut_in: 3.0, rated: 12.0, cut_out: 25.0, capacity: 100.0 };
        assert_eq!(wind_power(2.0, &c).unwrap(), 0.0);
        assert_eq!(wind_power(12.0, &c).unwrap(), 100.0);
        assert_abs_diff_eq!(wind_power(7.0, &c).unwrap(), 18.577, epsilon = 1e-3);
        assert_eq!(wind_power(26.0, &c).unwrap(), 0.0);
        let bad = WindCurve { rated: 2.0, ..c };
        assert!(wind_power(5.0, &bad).is_err());
    }

    #[test]
    fn solar_examples() {
        let p = SolarPanel { capacity: 50.0, f_sw: 0.85, f_lw: 0.05, g_ref: 1000.0 };
        assert_eq!(solar_power(0.0, 0.0, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(solar_power(800.0, 400.0, &p).unwrap(), 35.0, epsilon = 1e-12);
        assert_eq!(solar_power(1500.0, 0.0, &p).unwrap(), 50.0);
        assert!(solar_power(-1.0, 0.0, &p).is_err());
    }

    #[test]
    fn terminal_policies() {
        let a = EffectiveWeather { temperature: 30.0, wind_speed: 4.0, solar: 800.0 };
        let b = EffectiveWeather { temperature: 34.0, wind_speed: 2.0, solar: 900.0 };
        let c = combine_terminals(a, b, TerminalPolicy::Conservative);
        assert_eq!((c.temperature, c.wind_speed, c.solar), (34.0, 2.0, 900.0));
        let m = combine_terminals(a, b, TerminalPolicy::Average);
        assert_eq!((m.temperature, m.wind_speed, m.solar), (32.0, 3.0, 850.0));
        for pol in [TerminalPolicy::Conservative, TerminalPolicy::Average] {
            assert_eq!(combine_terminals(a, a, pol), a);
        }
    }

    #[test]
    fn dlr_examples() {
        let p = DlrParams::new(100.0);
        let w = |t, v, s| EffectiveWeather { temperature: t, wind_speed: v, solar: s };
        assert_abs_diff_eq!(dynamic_rating(&w(25.0, 0.6, 0.0), &p).unwrap(), 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dynamic_rating(&w(35.0, 0.6, 1000.0), &p).unwrap(), 90.25, epsilon = 1e-9);
        assert_abs_diff_eq!(dynamic_rating(&w(5.0, 5.0, 0.0), &p).unwrap(), 114.84, epsilon = 0.01);
        // clipping
        assert_eq!(dynamic_rating(&w(-60.0, 10.0, 0.0), &p).unwrap(), 150.0);
        let mut bad = p.clone();
        bad.base_rating = 0.0;
        assert!(dynamic_rating(&w(25.0, 0.6, 0.0), &bad).is_err());
    }
}
