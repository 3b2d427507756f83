use super::{eval_pattern, OpacityPolicy, OverlayStyle, StyleSet};
use crate::geo::Vec2;
use crate::overlay::OverlayMask;
use crate::scene::ColorImage;
use crate::{Error, Result};

#[inline]
fn blend(base: f32, color: f32, alpha: f32) -> f32 {
    let v = (1.0 - alpha) * base + alpha * color;
    // keep the result inside [base, color] despite rounding
    v.clamp(base.min(color), base.max(color))
}

/// Blends covered overlay pixels over `base`; pixels with id 0 are copied.
///
/// RGBA masks carry colour and pattern already; their alpha goes through the
/// policy only where it is non-zero. Id masks take colour from the style and
/// coverage from the mask's pattern samples (fill when absent).
pub fn composite(base: &ColorImage, mask: &OverlayMask, styles: &StyleSet, policy: &OpacityPolicy) -> Result<ColorImage> {
    if base.width != mask.width || base.height != mask.height {
        return Err(Error::DimensionMismatch(base.width, base.height, mask.width, mask.height));
    }
    let mut out = base.clone();
    // ids come in runs, so remember the last lookup
    let mut cached: Option<(u32, &OverlayStyle, f32)> = None;
    for (k, &id) in mask.ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        let (style, opacity) = match cached {
            Some((c, s, a)) if c == id => (s, a),
            _ => {
                let s = styles.get(id)?;
                let a = policy.apply(s.opacity);
                cached = Some((id, s, a));
                (s, a)
            }
        };
        let (color, alpha) = match &mask.rgba {
            Some(rgba) => {
                let [r, g, b, a] = rgba[k];
                if a <= 0.0 {
                    continue;
                }
                ([r, g, b], policy.apply(a))
            }
            None => {
                if let Some(pattern) = &mask.pattern {
                    let s = pattern[k];
                    let p = Vec2::new(f64::from(s.coord[0]), f64::from(s.coord[1]));
                    if !eval_pattern(style, p, f64::from(s.dist)) {
                        continue;
                    }
                }
                (style.color, opacity)
            }
        };
        let px = &mut out.data[k];
        for c in 0..3 {
            px[c] = blend(px[c], color[c], alpha);
        }
    }
    Ok(out)
}
