use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition metadata carried alongside a strain trace.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub rate_hz: Option<f64>,
    pub sensor_id: Option<String>,
    pub timestamp_s: Option<f64>,
}

/// Distributed strain along the fiber, one sample per gauge segment.
///
/// Sample `i` reports the mean strain of the gauge segment that *ends* at
/// `positions[i]`. Segment lengths follow [`segment_lengths`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrainProfile {
    positions: Vec<f64>,
    strains: Vec<f64>,
    pub meta: ProfileMeta,
}

impl StrainProfile {
    pub fn new(positions: Vec<f64>, strains: Vec<f64>) -> Result<Self> {
        if positions.len() != strains.len() {
            return Err(Error::InvalidSpec(format!(
                "{} positions but {} strain samples",
                positions.len(),
                strains.len()
            )));
        }
        if positions.is_empty() {
            return Err(Error::InsufficientData(
                "strain profile has no samples".into(),
            ));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec(format!("position #{i} is not finite")));
        }
        if let Some(i) = strains.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidSpec(format!("strain #{i} is not finite")));
        }
        if let Some(i) = positions.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(format!(
                "positions must be strictly increasing (sample #{} at {} mm follows {} mm)",
                i + 1,
                positions[i + 1],
                positions[i]
            )));
        }
        Ok(StrainProfile {
            positions,
            strains,
            meta: ProfileMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: ProfileMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Strain samples in microstrain.
    pub fn strains(&self) -> &[f64] {
        &self.strains
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn mean_strain(&self) -> f64 {
        self.strains.iter().sum::<f64>() / self.strains.len() as f64
    }

    /// Samples whose position lies in `[from, to]`.
    pub fn window(&self, from_mm: f64, to_mm: f64) -> Result<StrainProfile> {
        let (positions, strains): (Vec<f64>, Vec<f64>) = self
            .positions
            .iter()
            .zip(&self.strains)
            .filter(|(s, _)| **s >= from_mm && **s <= to_mm)
            .map(|(s, e)| (*s, *e))
            .unzip();
        if positions.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no samples in window [{from_mm}, {to_mm}] mm"
            )));
        }
        Ok(StrainProfile {
            positions,
            strains,
            meta: self.meta.clone(),
        })
    }

    fn value_at(&self, s: f64) -> f64 {
        let p = &self.positions;
        let k = p.partition_point(|&x| x <= s);
        if k == 0 {
            return self.strains[0];
        }
        if k >= p.len() {
            return self.strains[p.len() - 1];
        }
        let (s0, s1) = (p[k - 1], p[k]);
        let t = (s - s0) / (s1 - s0);
        self.strains[k - 1] + t * (self.strains[k] - self.strains[k - 1])
    }
}

/// Length of the gauge segment ending at each sample.
///
/// Interior samples use the distance to their predecessor; the first sample
/// borrows the first spacing, so a grid `h, 2h, ..., L` tiles `[0, L]`.
pub fn segment_lengths(positions: &[f64]) -> Result<Vec<f64>> {
    if positions.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 samples to derive arc-length steps, got {}",
            positions.len()
        )));
    }
    let mut steps = Vec::with_capacity(positions.len());
    steps.push(positions[1] - positions[0]);
    steps.extend(positions.windows(2).map(|w| w[1] - w[0]));
    Ok(steps)
}

/// Sample grid `h, 2h, ...` covering `(0, length]`; the last step is shortened
/// to land exactly on `length`.
pub fn uniform_grid(length_mm: f64, spacing_mm: f64) -> Vec<f64> {
    grid_between(0.0, length_mm, spacing_mm)
        .into_iter()
        .skip(1)
        .collect()
}

/// Grid `from, from + h, ..., to` with both ends included exactly.
pub(crate) fn grid_between(from: f64, to: f64, spacing: f64) -> Vec<f64> {
    let span = to - from;
    let segments = ((span / spacing) - 1e-9).ceil().max(1.0) as usize;
    let mut out: Vec<f64> = (0..segments).map(|i| from + i as f64 * spacing).collect();
    out.push(to);
    out
}

/// Linear resampling onto a uniform grid over the same span.
pub fn resample_profile(profile: &StrainProfile, new_spacing_mm: f64) -> Result<StrainProfile> {
    if !(new_spacing_mm > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "resample spacing must be > 0 mm, got {new_spacing_mm}"
        )));
    }
    let first = profile.positions[0];
    let last = profile.positions[profile.len() - 1];
    let span = last - first;
    if new_spacing_mm > span {
        return Err(Error::InsufficientData(format!(
            "spacing {new_spacing_mm} mm exceeds profile span {span} mm"
        )));
    }
    let positions = grid_between(first, last, new_spacing_mm);
    let strains = positions.iter().map(|&s| profile.value_at(s)).collect();
    let mut out = StrainProfile::new(positions, strains)?;
    out.meta = profile.meta.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize, h: f64) -> StrainProfile {
        let pos: Vec<f64> = (0..n).map(|i| 10.0 + i as f64 * h).collect();
        let eps = pos.iter().map(|s| 3.0 * s - 7.0).collect();
        StrainProfile::new(pos, eps).unwrap()
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(StrainProfile::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(StrainProfile::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(StrainProfile::new(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(StrainProfile::new(vec![], vec![]).is_err());
    }

    #[test]
    fn resample_on_own_grid_is_identity() {
        let p = ramp(50, 1.3);
        let r = resample_profile(&p, 1.3).unwrap();
        assert_eq!(r.len(), p.len());
        for (a, b) in r.strains().iter().zip(p.strains()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(r.positions()[0], p.positions()[0]);
        assert_eq!(r.positions().last(), p.positions().last());
    }

    #[test]
    fn resample_reproduces_affine_data() {
        let p = ramp(40, 1.3);
        for h in [0.1, 0.37, 1.0, 2.9, 10.0] {
            let r = resample_profile(&p, h).unwrap();
            for (s, e) in r.positions().iter().zip(r.strains()) {
                assert!((e - (3.0 * s - 7.0)).abs() < 1e-9);
            }
            assert_eq!(r.positions().last(), p.positions().last());
        }
    }

    #[test]
    fn resample_constant() {
        let p = StrainProfile::new(vec![0.0, 1.0, 2.5, 4.0], vec![5.0; 4]).unwrap();
        let r = resample_profile(&p, 0.3).unwrap();
        assert!(r.strains().iter().all(|&e| e == 5.0));
    }

    #[test]
    fn resample_spacing_beyond_span() {
        let p = ramp(3, 1.0);
        assert!(matches!(
            resample_profile(&p, 2.5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn uniform_grid_ends_on_length() {
        let g = uniform_grid(170.0, 1.3);
        assert_eq!(g.len(), 131);
        assert!((g[0] - 1.3).abs() < 1e-12);
        assert_eq!(*g.last().unwrap(), 170.0);
        let g = uniform_grid(13.0, 1.3);
        assert_eq!(g.len(), 10);
    }

    #[test]
    fn segments_tile_from_zero() {
        let g = uniform_grid(170.0, 1.3);
        let steps = segment_lengths(&g).unwrap();
        let total: f64 = steps.iter().sum();
        assert!((total - 170.0).abs() < 1e-9);
        assert!(segment_lengths(&[1.0]).is_err());
    }
}
