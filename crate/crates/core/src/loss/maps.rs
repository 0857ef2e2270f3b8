use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Logits,
    Probabilities,
}

/// Channel-last `height x width x channels` map of per-pixel class scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMap {
    width: usize,
    height: usize,
    channels: usize,
    kind: MapKind,
    data: Vec<f64>,
}

const SUM_TOL: f64 = 1e-6;

impl ProbMap {
    /// Checks the data length, finiteness, and for probabilities that every
    /// entry lies in `[0, 1]` and, with more than one channel, that every
    /// pixel sums to 1, both within `1e-6`.
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        kind: MapKind,
        data: Vec<f64>,
    ) -> Result<Self> {
        if channels == 0 || data.len() != width * height * channels {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {height}x{width}x{channels}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite map value {v}")));
        }
        if kind == MapKind::Probabilities {
            for (i, px) in data.chunks_exact(channels).enumerate() {
                let sum: f64 = px.iter().sum();
                if px.iter().any(|&v| !(-SUM_TOL..=1.0 + SUM_TOL).contains(&v))
                    || (channels > 1 && (sum - 1.0).abs() > SUM_TOL)
                {
                    return Err(Error::Format(format!(
                        "pixel {i} is not a probability vector (sum {sum})"
                    )));
                }
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            kind,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Raw access; simplex constraints are not re-checked afterwards, which
    /// lets gradient checks perturb single entries.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let at = (row * self.width + col) * self.channels;
        &self.data[at..at + self.channels]
    }

    /// Extracts one channel as a row-major plane.
    pub fn channel(&self, ch: usize) -> Vec<f64> {
        self.data.iter().skip(ch).step_by(self.channels).copied().collect()
    }
}

/// Numerically stable per-pixel softmax. Probability maps pass through
/// unchanged.
pub fn softmax(map: &ProbMap) -> ProbMap {
    if map.kind == MapKind::Probabilities {
        return map.clone();
    }
    let mut data = map.data.clone();
    for px in data.chunks_exact_mut(map.channels) {
        let max = px.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in px.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in px.iter_mut() {
            *v /= sum;
        }
    }
    ProbMap {
        width: map.width,
        height: map.height,
        channels: map.channels,
        kind: MapKind::Probabilities,
        data,
    }
}

/// `height x width x channels` feature map, channel-last.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFeatureMap {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl DenseFeatureMap {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || data.len() != width * height * channels {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {height}x{width}x{channels}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite feature value".into()));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn vector(&self, row: usize, col: usize) -> &[f64] {
        let at = (row * self.width + col) * self.channels;
        &self.data[at..at + self.channels]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_examples() {
        let z = ProbMap::new(2, 1, 3, MapKind::Logits, vec![0.0, 0.0, 0.0, 1000.0, 0.0, 0.0]).unwrap();
        let p = softmax(&z);
        assert_eq!(p.kind(), MapKind::Probabilities);
        for v in p.pixel(0, 0) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(p.pixel(0, 1), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_off_simplex() {
        assert!(ProbMap::new(1, 1, 2, MapKind::Probabilities, vec![0.5, 0.6]).is_err());
        assert!(ProbMap::new(1, 1, 2, MapKind::Logits, vec![0.5, 0.6]).is_ok());
        assert!(ProbMap::new(1, 1, 2, MapKind::Logits, vec![0.5]).is_err());
    }
}
