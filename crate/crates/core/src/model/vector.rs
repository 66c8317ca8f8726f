use crate::error::{Error, Result};

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean projection onto the ball of radius `radius`.
///
/// Vectors already inside the ball are returned unchanged, bit for bit.
pub fn clip_to_ball(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "clip radius must be positive and finite, got {radius}"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "cannot clip a vector with non-finite entries".into(),
        ));
    }
    let n = norm(v);
    if n <= radius {
        return Ok(v.to_vec());
    }
    let scale = radius / n;
    let mut out: Vec<f64> = v.iter().map(|x| x * scale).collect();
    // rounding can leave the result a hair outside the ball
    let mut m = norm(&out);
    while m > radius {
        let fix = (radius / m) * (1.0 - f64::EPSILON);
        out.iter_mut().for_each(|x| *x *= fix);
        m = norm(&out);
    }
    Ok(out)
}
