use crate::registry::Registry;

/// Maps a raw spherical-harmonic dot product to a color channel in [0, 1].
pub trait ColorDecode: Send + Sync {
    fn name(&self) -> &'static str;
    fn decode(&self, raw: f64) -> f64;
}

/// `clamp(raw, 0, 1)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct ClampDecode;

impl ColorDecode for ClampDecode {
    fn name(&self) -> &'static str {
        "clamp"
    }

    fn decode(&self, raw: f64) -> f64 {
        raw.clamp(0.0, 1.0)
    }
}

/// `clamp(raw + 0.5, 0, 1)`, the Gaussian-splatting export convention.
#[derive(Debug, Default, Clone, Copy)]
pub struct OffsetClampDecode;

impl ColorDecode for OffsetClampDecode {
    fn name(&self) -> &'static str {
        "offset-clamp"
    }

    fn decode(&self, raw: f64) -> f64 {
        (raw + 0.5).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SigmoidDecode;

impl ColorDecode for SigmoidDecode {
    fn name(&self) -> &'static str {
        "sigmoid"
    }

    fn decode(&self, raw: f64) -> f64 {
        1.0 / (1.0 + (-raw).exp())
    }
}

pub fn color_decoders() -> Registry<dyn ColorDecode> {
    let mut reg: Registry<dyn ColorDecode> = Registry::new("color decode", "clamp");
    reg.register("clamp", || Box::new(ClampDecode))
        .register("offset-clamp", || Box::new(OffsetClampDecode))
        .register("sigmoid", || Box::new(SigmoidDecode));
    reg
}
