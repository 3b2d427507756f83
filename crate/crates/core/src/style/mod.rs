//! Overlay style vocabulary and compositing.
//!
//! Pattern geometry is expressed in reference pixels: a texture
//! [`REFERENCE_WIDTH`] texels wide has one texel per reference pixel, other
//! widths scale linearly.

mod composite;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use composite::composite;

use crate::geo::Vec2;
use crate::{Error, Result};

pub const REFERENCE_WIDTH: f64 = 1920.0;
pub const STRIPE_WIDTH_LOW: f64 = 240.0;
pub const STRIPE_WIDTH_HIGH: f64 = 120.0;
pub const DOT_DIAMETER_LOW: f64 = 240.0;
pub const DOT_DIAMETER_HIGH: f64 = 120.0;
pub const DEFAULT_OUTLINE_WIDTH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    #[default]
    Fill,
    Stripes,
    Dots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    #[default]
    Low,
    High,
}

impl Density {
    pub fn stripe_width(self) -> f64 {
        match self {
            Density::Low => STRIPE_WIDTH_LOW,
            Density::High => STRIPE_WIDTH_HIGH,
        }
    }

    pub fn dot_diameter(self) -> f64 {
        match self {
            Density::Low => DOT_DIAMETER_LOW,
            Density::High => DOT_DIAMETER_HIGH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlayStyle {
    pub pattern: Pattern,
    pub density: Density,
    pub outline: bool,
    /// Reference pixels.
    pub outline_width: f64,
    /// Linear RGB in `[0, 1]`.
    pub color: [f32; 3],
    pub opacity: f32,
}

impl Default for OverlayStyle {
    fn default() -> Self {
        Self {
            pattern: Pattern::Fill,
            density: Density::Low,
            outline: false,
            outline_width: DEFAULT_OUTLINE_WIDTH,
            color: [1.0, 0.55, 0.1],
            opacity: 0.45,
        }
    }
}

impl OverlayStyle {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(Error::InvalidInput(format!("opacity must be in [0, 1], got {}", self.opacity)));
        }
        if self.color.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidInput(format!("color channels must be in [0, 1], got {:?}", self.color)));
        }
        if !(self.outline_width >= 0.0 && self.outline_width.is_finite()) {
            return Err(Error::InvalidInput(format!("outline width must be non-negative, got {}", self.outline_width)));
        }
        Ok(())
    }
}

/// Pattern coverage at pattern coordinate `p` with signed boundary distance
/// `dist`, both in reference pixels. Only meaningful inside a region.
pub fn eval_pattern(style: &OverlayStyle, p: Vec2, dist: f64) -> bool {
    if style.outline && dist <= 0.0 && -dist <= style.outline_width * 0.5 {
        return true;
    }
    match style.pattern {
        Pattern::Fill => true,
        Pattern::Stripes => (p.x / style.density.stripe_width()).floor().rem_euclid(2.0) == 0.0,
        Pattern::Dots => {
            let d = style.density.dot_diameter();
            let pitch = 2.0 * d;
            let nearest = (p / pitch).map(f64::round) * pitch;
            (p - nearest).norm() <= d * 0.5
        }
    }
}

/// Styles keyed by region id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StyleSet {
    styles: BTreeMap<u32, OverlayStyle>,
}

impl StyleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same style for every id in `ids`.
    pub fn uniform(ids: impl IntoIterator<Item = u32>, style: OverlayStyle) -> Self {
        Self { styles: ids.into_iter().map(|id| (id, style.clone())).collect() }
    }

    pub fn insert(&mut self, id: u32, style: OverlayStyle) {
        self.styles.insert(id, style);
    }

    pub fn get(&self, id: u32) -> Result<&OverlayStyle> {
        self.styles.get(&id).ok_or(Error::MissingStyle(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &OverlayStyle)> {
        self.styles.iter().map(|(&k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.styles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.styles.is_empty()
    }

    /// One record per style whose opacity the policy clamps.
    pub fn clamp_warnings(&self, policy: &OpacityPolicy) -> Vec<ClampWarning> {
        self.iter()
            .filter_map(|(id, s)| effective_opacity(s.opacity, policy).1.map(|w| ClampWarning { region_id: Some(id), ..w }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpacityPolicy {
    pub min: f32,
    pub max: f32,
    pub default: f32,
    pub clamp: bool,
}

impl Default for OpacityPolicy {
    fn default() -> Self {
        Self { min: 0.20, max: 0.70, default: 0.45, clamp: true }
    }
}

impl OpacityPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.min && self.min < self.max && self.max <= 1.0) {
            return Err(Error::InvalidInput(format!("opacity policy needs 0 <= min < max <= 1, got [{}, {}]", self.min, self.max)));
        }
        if !(self.min <= self.default && self.default <= self.max) {
            return Err(Error::InvalidInput(format!("opacity default {} outside [{}, {}]", self.default, self.min, self.max)));
        }
        Ok(())
    }

    /// Clamped alpha, or `requested` unchanged when clamping is off.
    #[inline]
    pub fn apply(&self, requested: f32) -> f32 {
        if self.clamp {
            requested.clamp(self.min, self.max)
        } else {
            requested
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClampWarning {
    pub region_id: Option<u32>,
    pub requested: f32,
    pub applied: f32,
}

impl std::fmt::Display for ClampWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(id) = self.region_id {
            write!(f, "region {id}: ")?;
        }
        write!(f, "opacity {} clamped to {}", self.requested, self.applied)
    }
}

/// Opacity after the policy, plus a warning when it changed.
pub fn effective_opacity(requested: f32, policy: &OpacityPolicy) -> (f32, Option<ClampWarning>) {
    let applied = policy.apply(requested);
    let warning = (applied != requested).then_some(ClampWarning { region_id: None, requested, applied });
    (applied, warning)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn style(pattern: Pattern, density: Density) -> OverlayStyle {
        OverlayStyle { pattern, density, ..Default::default() }
    }

    #[test]
    fn style_constants() {
        assert_eq!((Density::Low.stripe_width(), Density::High.stripe_width()), (240.0, 120.0));
        assert_eq!((Density::Low.dot_diameter(), Density::High.dot_diameter()), (240.0, 120.0));
        assert_eq!(DEFAULT_OUTLINE_WIDTH, 12.0);
        assert_eq!(REFERENCE_WIDTH, 1920.0);
        let p = OpacityPolicy::default();
        assert_eq!((p.min, p.max), (0.20, 0.70));
        assert!((p.min..=p.max).contains(&p.default));
    }

    #[test]
    fn pattern_examples() {
        let p = |x: f64, y: f64| Vec2::new(x, y);
        assert!(eval_pattern(&style(Pattern::Fill, Density::Low), p(123.0, -7.0), -50.0));
        let stripes = style(Pattern::Stripes, Density::High);
        assert!(eval_pattern(&stripes, p(60.0, 0.0), -100.0));
        assert!(!eval_pattern(&stripes, p(180.0, 0.0), -100.0));
        assert!(eval_pattern(&stripes, p(-180.0, 0.0), -100.0));
        let dots = style(Pattern::Dots, Density::Low);
        assert!(eval_pattern(&dots, p(480.0, 960.0), -100.0));
        assert!(!eval_pattern(&dots, p(240.0, 240.0), -100.0));
        assert!(eval_pattern(&dots, p(480.0 + 120.0, 0.0), -100.0));
        assert!(!eval_pattern(&dots, p(480.0 + 121.0, 0.0), -100.0));
    }

    #[test]
    fn outline_is_inside_only() {
        let s = OverlayStyle { pattern: Pattern::Stripes, outline: true, ..Default::default() };
        let off = Vec2::new(300.0, 0.0); // stripe gap
        assert!(eval_pattern(&s, off, -6.0));
        assert!(eval_pattern(&s, off, 0.0));
        assert!(!eval_pattern(&s, off, -6.5));
        assert!(!eval_pattern(&s, off, 3.0));
    }

    #[test]
    fn opacity_clamping() {
        let policy = OpacityPolicy::default();
        assert_eq!(effective_opacity(0.45, &policy), (0.45, None));
        let (a, w) = effective_opacity(0.05, &policy);
        assert_eq!(a, 0.20);
        assert_eq!(w.unwrap().requested, 0.05);
        let (a, w) = effective_opacity(0.90, &policy);
        assert_eq!(a, 0.70);
        assert!(w.is_some());
        let open = OpacityPolicy { clamp: false, ..policy };
        assert_eq!(effective_opacity(0.9, &open), (0.9, None));
    }

    #[test]
    fn policy_validation() {
        assert!(OpacityPolicy::default().validate().is_ok());
        assert!(OpacityPolicy { min: 0.8, ..Default::default() }.validate().is_err());
        assert!(OpacityPolicy { default: 0.1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn style_json_defaults() {
        let s: OverlayStyle = serde_json::from_str(r#"{"pattern":"dots","density":"high"}"#).unwrap();
        assert_eq!(s.pattern, Pattern::Dots);
        assert_eq!(s.outline_width, 12.0);
        assert!(serde_json::from_str::<OverlayStyle>(r#"{"patern":"dots"}"#).is_err());
    }
}
