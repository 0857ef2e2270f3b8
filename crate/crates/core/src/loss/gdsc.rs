use super::maps::DenseFeatureMap;
use super::LossGrad;
use crate::error::{Error, Result};
use crate::raster::{resize_nearest, BinaryMask, Grid};

/// Mean feature vector over the set pixels of `mask`.
pub fn gdsc_pool(features: &DenseFeatureMap, mask: &BinaryMask) -> Result<Vec<f64>> {
    if mask.width() != features.width() || mask.height() != features.height() {
        return Err(Error::ShapeMismatch(format!(
            "mask {}x{} vs features {}x{}",
            mask.height(),
            mask.width(),
            features.height(),
            features.width()
        )));
    }
    let c = features.channels();
    let mut sum = vec![0.0; c];
    let mut n = 0usize;
    for (i, &set) in mask.as_slice().iter().enumerate() {
        if set {
            n += 1;
            for (s, v) in sum.iter_mut().zip(&features.as_slice()[i * c..(i + 1) * c]) {
                *s += v;
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyMask("text mask for feature pooling"));
    }
    let inv = 1.0 / n as f64;
    sum.iter_mut().for_each(|s| *s *= inv);
    Ok(sum)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `sigmoid(f_q . F(x, y))` at every pixel.
pub fn gdsc_similarity(query: &[f64], features: &DenseFeatureMap) -> Result<Grid<f64>> {
    let c = features.channels();
    if query.len() != c {
        return Err(Error::ShapeMismatch(format!("query length {} vs {c} channels", query.len())));
    }
    let data = features
        .as_slice()
        .chunks_exact(c)
        .map(|f| sigmoid(f.iter().zip(query).map(|(a, b)| a * b).sum()))
        .collect();
    Grid::from_vec(features.width(), features.height(), data)
}

/// Dice loss `1 - 2 sum(T S) / (sum(T) + sum(S))` with its gradient in `S`.
/// An all-zero pair has loss 0.
pub fn gdsc_loss(s: &Grid<f64>, t: &BinaryMask) -> Result<LossGrad> {
    if !s.same_shape(t) {
        return Err(Error::ShapeMismatch(format!(
            "similarity {}x{} vs target {}x{}",
            s.height(),
            s.width(),
            t.height(),
            t.width()
        )));
    }
    let mut inter = 0.0;
    let mut total = 0.0;
    for (&sv, &tv) in s.as_slice().iter().zip(t.as_slice()) {
        let tv = f64::from(u8::from(tv));
        inter += sv * tv;
        total += sv + tv;
    }
    if total == 0.0 {
        return Ok(LossGrad {
            loss: 0.0,
            grad: vec![0.0; s.len()],
        });
    }
    let denom = total * total;
    let grad = t
        .as_slice()
        .iter()
        .map(|&tv| (2.0 * inter - 2.0 * f64::from(u8::from(tv)) * total) / denom)
        .collect();
    Ok(LossGrad {
        loss: 1.0 - 2.0 * inter / total,
        grad,
    })
}

/// Full contrast branch on one image: the input-scale text mask is reduced
/// to the feature grid by nearest neighbour for pooling, and the similarity
/// map is brought back to input scale the same way. Returns 0 when the
/// image has no text at feature resolution.
pub fn gdsc_from_features(features: &DenseFeatureMap, text: &BinaryMask) -> Result<f64> {
    let small = resize_nearest(text, features.width(), features.height());
    let query = match gdsc_pool(features, &small) {
        Ok(q) => q,
        Err(Error::EmptyMask(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let s = gdsc_similarity(&query, features)?;
    let s_full = resize_nearest(&s, text.width(), text.height());
    Ok(gdsc_loss(&s_full, text)?.loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_examples() {
        let f = DenseFeatureMap::new(2, 1, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let both = Grid::from_vec(2, 1, vec![true, true]).unwrap();
        assert_eq!(gdsc_pool(&f, &both).unwrap(), vec![0.5, 0.5]);
        let one = Grid::from_vec(2, 1, vec![false, true]).unwrap();
        assert_eq!(gdsc_pool(&f, &one).unwrap(), vec![0.0, 1.0]);
        let none = Grid::from_vec(2, 1, vec![false, false]).unwrap();
        assert!(matches!(gdsc_pool(&f, &none), Err(Error::EmptyMask(_))));
    }

    #[test]
    fn similarity_examples() {
        let f = DenseFeatureMap::new(2, 1, 2, vec![0.0, 1.0, 3f64.ln(), 0.0]).unwrap();
        let s = gdsc_similarity(&[1.0, 0.0], &f).unwrap();
        assert_eq!(*s.get(0, 0), 0.5);
        assert!((s.get(0, 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dice_examples() {
        let s = Grid::filled(2, 2, 0.5);
        let t = Grid::from_vec(2, 2, vec![true, true, false, false]).unwrap();
        assert_eq!(gdsc_loss(&s, &t).unwrap().loss, 0.5);
        let exact = t.map(|&b| f64::from(u8::from(b)));
        assert_eq!(gdsc_loss(&exact, &t).unwrap().loss, 0.0);
        let zero = gdsc_loss(&Grid::filled(2, 2, 0.0), &Grid::filled(2, 2, false)).unwrap();
        assert_eq!(zero.loss, 0.0);
    }

    #[test]
    fn textless_image_contributes_nothing() {
        let f = DenseFeatureMap::new(2, 2, 1, vec![1.0; 4]).unwrap();
        assert_eq!(gdsc_from_features(&f, &Grid::filled(8, 8, false)).unwrap(), 0.0);
        let mut t = Grid::filled(8, 8, false);
        for r in 0..4 {
            for c in 0..4 {
                t.set(r, c, true);
            }
        }
        let l = gdsc_from_features(&f, &t).unwrap();
        assert!(l > 0.0 && l < 1.0);
    }
}
