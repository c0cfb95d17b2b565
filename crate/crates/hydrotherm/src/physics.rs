//! Constitutive laws for the coupled flow/heat problem: effective mixture
//! coefficients, pressure-to-flux mobility, and the Darcy velocity that
//! drives advective heat transport.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 3-component vector in the model frame (x, y, z with z pointing up).
pub type Vec3 = [f64; 3];

fn default_lambda_w() -> f64 {
    0.6
}

fn default_b_poro() -> f64 {
    1.0e5
}

/// Per-layer hydrothermal properties.
///
/// Two modes are supported. Mixture mode derives the effective thermal
/// conductivity and volumetric heat capacity from porosity-weighted solid and
/// water properties. Direct mode (`lambda` / `c_t` set) bypasses the mixture
/// formulas entirely, for data sets that tabulate effective values without a
/// porosity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    /// Thermal conductivity of the solid skeleton, W/(m·K). Mixture mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_s: Option<f64>,
    /// Thermal conductivity of pore water, W/(m·K).
    #[serde(default = "default_lambda_w")]
    pub lambda_w: f64,
    /// Porosity, dimensionless in [0, 1]. Mixture mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub porosity: Option<f64>,
    /// Volumetric heat capacity of the solid, J/(K·m³). Mixture mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_s: Option<f64>,
    /// Hydraulic conductivity K, m/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hydraulic_conductivity: Option<f64>,
    /// Intrinsic permeability K_i, m².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic_permeability: Option<f64>,
    /// Porous compressibility, Pa. Its reciprocal is the storage coefficient
    /// of the pressure equation.
    #[serde(default = "default_b_poro")]
    pub b_poro: f64,
    /// Effective thermal conductivity override, W/(m·K). Direct mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Effective volumetric heat capacity override, J/(K·m³). Direct mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_t: Option<f64>,
}

impl Material {
    /// Mixture-mode material: effective coefficients come from the
    /// porosity-weighted formulas.
    pub fn mixture(
        name: impl Into<String>,
        lambda_s: f64,
        lambda_w: f64,
        porosity: f64,
        c_s: f64,
        hydraulic_conductivity: f64,
        b_poro: f64,
    ) -> Result<Self> {
        let m = Material {
            name: name.into(),
            lambda_s: Some(lambda_s),
            lambda_w,
            porosity: Some(porosity),
            c_s: Some(c_s),
            hydraulic_conductivity: Some(hydraulic_conductivity),
            intrinsic_permeability: None,
            b_poro,
            lambda: None,
            c_t: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Direct-mode material: effective `lambda` and `c_t` are given as-is.
    pub fn direct(
        name: impl Into<String>,
        lambda: f64,
        c_t: f64,
        hydraulic_conductivity: f64,
        b_poro: f64,
    ) -> Result<Self> {
        let m = Material {
            name: name.into(),
            lambda_s: None,
            lambda_w: default_lambda_w(),
            porosity: None,
            c_s: None,
            hydraulic_conductivity: Some(hydraulic_conductivity),
            intrinsic_permeability: None,
            b_poro,
            lambda: Some(lambda),
            c_t: Some(c_t),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = |what: &str| format!("material '{}': {what}", self.name);
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(ctx(&format!("{what} must be strictly positive, got {v}"))))
            }
        };
        positive(self.b_poro, "b_poro")?;
        positive(self.lambda_w, "lambda_w")?;
        if let Some(phi) = self.porosity {
            if !(0.0..=1.0).contains(&phi) {
                return Err(Error::config(ctx(&format!("porosity must lie in [0, 1], got {phi}"))));
            }
        }
        for (v, what) in [
            (self.lambda_s, "lambda_s"),
            (self.c_s, "c_s"),
            (self.hydraulic_conductivity, "hydraulic_conductivity"),
            (self.intrinsic_permeability, "intrinsic_permeability"),
            (self.lambda, "lambda"),
            (self.c_t, "c_t"),
        ] {
            if let Some(v) = v {
                positive(v, what)?;
            }
        }
        if self.lambda.is_none() && (self.lambda_s.is_none() || self.porosity.is_none()) {
            return Err(Error::config(ctx(
                "needs either a direct `lambda` or mixture fields `lambda_s` and `porosity`",
            )));
        }
        if self.c_t.is_none() && (self.c_s.is_none() || self.porosity.is_none()) {
            return Err(Error::config(ctx(
                "needs either a direct `c_t` or mixture fields `c_s` and `porosity`",
            )));
        }
        Ok(())
    }

    /// Effective thermal conductivity λ = (1−φ)λ_s + φλ_w, unless a direct
    /// value overrides the mixture.
    pub fn effective_lambda(&self) -> f64 {
        if let Some(l) = self.lambda {
            return l;
        }
        let phi = self.porosity.expect("validated mixture material");
        (1.0 - phi) * self.lambda_s.expect("validated mixture material") + phi * self.lambda_w
    }

    /// Effective volumetric heat capacity c_T = (1−φ)c_s + φc_w, unless a
    /// direct value overrides the mixture.
    pub fn effective_heat_capacity(&self, fluid: &FluidConstants) -> f64 {
        if let Some(c) = self.c_t {
            return c;
        }
        let phi = self.porosity.expect("validated mixture material");
        (1.0 - phi) * self.c_s.expect("validated mixture material") + phi * fluid.c_w
    }

    /// Mobility k relating the driving pressure gradient to the Darcy flux,
    /// m²/(Pa·s). Computed as K/(ρ_w·g) from the hydraulic conductivity, or
    /// K_i/μ_w from the intrinsic permeability. When both are given they must
    /// agree to 1e-10 relative.
    pub fn mobility(&self, fluid: &FluidConstants) -> Result<f64> {
        let from_k = self
            .hydraulic_conductivity
            .map(|k| k / (fluid.rho_w * fluid.g));
        let from_ki = self.intrinsic_permeability.map(|ki| ki / fluid.mu_w);
        match (from_k, from_ki) {
            (Some(a), Some(b)) => {
                if (a - b).abs() > 1e-10 * a.abs().max(b.abs()) {
                    Err(Error::config(format!(
                        "material '{}': hydraulic_conductivity and intrinsic_permeability disagree \
                         (K/(rho_w*g) = {a:.12e}, K_i/mu_w = {b:.12e})",
                        self.name
                    )))
                } else {
                    Ok(a)
                }
            }
            (Some(a), None) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(Error::config(format!(
                "material '{}': neither hydraulic_conductivity nor intrinsic_permeability given",
                self.name
            ))),
        }
    }
}

fn default_rho_w() -> f64 {
    1000.0
}

fn default_mu_w() -> f64 {
    1.0e-3
}

fn default_c_w() -> f64 {
    1.0e6
}

fn default_g() -> f64 {
    9.81
}

/// Pore-fluid and global constants. Gravity is a magnitude; it acts along −z
/// of the model frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidConstants {
    /// Water density, kg/m³.
    pub rho_w: f64,
    /// Water dynamic viscosity, Pa·s.
    pub mu_w: f64,
    /// Volumetric heat capacity of water, J/(K·m³).
    pub c_w: f64,
    /// Gravity magnitude, m/s².
    pub g: f64,
}

impl Default for FluidConstants {
    fn default() -> Self {
        FluidConstants {
            rho_w: default_rho_w(),
            mu_w: default_mu_w(),
            c_w: default_c_w(),
            g: default_g(),
        }
    }
}

impl FluidConstants {
    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.rho_w, "rho_w"),
            (self.mu_w, "mu_w"),
            (self.c_w, "c_w"),
            (self.g, "g"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "fluid constant {what} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Darcy velocity q = −k·(∇p + ρ_w·g·ê_z), m/s.
///
/// Gravity acts along −z; the buoyant term is written so that the hydrostatic
/// gradient ∇p = −ρ_w·g·ê_z is exactly the zero-flow equilibrium.
pub fn darcy_velocity(mobility: f64, grad_p: Vec3, fluid: &FluidConstants) -> Vec3 {
    [
        -mobility * grad_p[0],
        -mobility * grad_p[1],
        -mobility * (grad_p[2] + fluid.rho_w * fluid.g),
    ]
}

/// Advection speed of a temperature front: the Darcy flux magnitude retarded
/// by c_w/c_T.
pub fn thermal_front_speed(q: Vec3, c_w: f64, c_t: f64) -> f64 {
    let mag = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
    (c_w / c_t) * mag
}
