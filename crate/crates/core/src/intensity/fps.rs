use crate::error::{Error, Result};
use crate::model::Vec3;

/// Farthest point sampling.
///
/// Seeds with the point farthest from the centroid, then repeatedly adds the
/// point whose distance to the chosen set is largest. Ties go to the lowest
/// index.
pub fn farthest_point_sample(points: &[Vec3], m: usize) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::validation(
            "farthest point sampling on an empty cloud",
        ));
    }
    if m == 0 || m > points.len() {
        return Err(Error::validation(format!(
            "cannot sample {m} of {} points",
            points.len()
        )));
    }
    let centroid = points.iter().fold(Vec3::zeros(), |a, p| a + p) / points.len() as f64;
    let seed = argmax(points.iter().map(|p| (p - centroid).norm_squared()));
    let mut chosen = Vec::with_capacity(m);
    chosen.push(seed);
    let mut min_d: Vec<f64> = points
        .iter()
        .map(|p| (p - points[seed]).norm_squared())
        .collect();
    while chosen.len() < m {
        let next = argmax(min_d.iter().copied());
        chosen.push(next);
        let q = points[next];
        for (d, p) in min_d.iter_mut().zip(points) {
            *d = d.min((p - q).norm_squared());
        }
    }
    Ok(chosen)
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Vec<Vec3> {
        xs.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect()
    }

    #[test]
    fn collinear_pair_spans_extremes() {
        let pts = line(&[0.0, 1.0, 10.0]);
        assert_eq!(farthest_point_sample(&pts, 2).unwrap(), vec![2, 0]);
        assert_eq!(farthest_point_sample(&pts, 1).unwrap(), vec![2]);
    }

    #[test]
    fn full_sample_is_permutation() {
        let pts = line(&[3.0, -1.0, 4.0, 1.0, -5.0, 9.0]);
        let mut idx = farthest_point_sample(&pts, pts.len()).unwrap();
        idx.sort();
        assert_eq!(idx, (0..pts.len()).collect::<Vec<_>>());
    }

    #[test]
    fn errors() {
        assert!(farthest_point_sample(&[], 1).is_err());
        assert!(farthest_point_sample(&line(&[0.0]), 2).is_err());
        assert!(farthest_point_sample(&line(&[0.0]), 0).is_err());
    }

    /// The greedy pair from a centroid-farthest seed matches the brute-force
    /// most distant partner of that seed.
    #[test]
    fn second_pick_is_farthest_from_seed() {
        let pts: Vec<Vec3> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.37;
                Vec3::new(t.sin() * 3.0, (t * 1.3).cos() * 2.0, t.cos())
            })
            .collect();
        let idx = farthest_point_sample(&pts, 2).unwrap();
        let seed = idx[0];
        let brute = (0..pts.len())
            .max_by(|&a, &b| {
                (pts[a] - pts[seed])
                    .norm()
                    .partial_cmp(&(pts[b] - pts[seed]).norm())
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        assert_eq!(idx[1], brute);
    }
}
