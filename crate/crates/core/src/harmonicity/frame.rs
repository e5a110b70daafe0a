use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::almost_contact::PointAlgebra;

/// Orthonormal frame of 𝒟 by Gram–Schmidt on P∂_0, …, P∂_{dim−1}.
///
/// At each step the remaining candidate with the largest residual norm is
/// taken (lowest index on ties), so the frame is a deterministic function of
/// the point.
pub fn d_frame(alg: &PointAlgebra) -> Vec<DVector<f64>> {
    let n = alg.dim();
    let rank = n - 1;
    let mut candidates: Vec<DVector<f64>> = (0..n).map(|i| alg.proj.column(i).into_owned()).collect();
    let mut used = vec![false; n];
    let mut frame = Vec::with_capacity(rank);
    while frame.len() < rank {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let norm = alg.norm(c);
            if best.is_none_or(|(_, b)| norm > b) {
                best = Some((i, norm));
            }
        }
        let Some((i, norm)) = best else { break };
        if norm < 1e-10 {
            break;
        }
        used[i] = true;
        let e = &candidates[i] / norm;
        for (j, c) in candidates.iter_mut().enumerate() {
            if !used[j] {
                let along = alg.inner(c, &e);
                *c -= &e * along;
            }
        }
        frame.push(e);
    }
    frame
}

/// ξ followed by the 𝒟-frame: an orthonormal frame of TM.
pub fn full_frame(alg: &PointAlgebra) -> Vec<DVector<f64>> {
    let mut out = vec![alg.xi.clone()];
    out.extend(d_frame(alg));
    out
}

/// Unit vector with uniform coefficients in [−1, 1] over `frame`.
pub fn random_unit(frame: &[DVector<f64>], alg: &PointAlgebra, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut v = DVector::zeros(alg.dim());
    for e in frame {
        v += e * rng.random_range(-1.0..1.0);
    }
    let norm = alg.norm(&v);
    if norm > 1e-3 {
        v / norm
    } else {
        frame[0].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::contact::sasakian;

    #[test]
    fn frame_is_orthonormal_and_in_d() {
        let s = sasakian(2);
        let alg = s.algebra(&[0.3, -0.7, 0.2, 0.5, 0.1]);
        let f = full_frame(&alg);
        assert_eq!(f.len(), 5);
        for (i, a) in f.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((alg.inner(a, b) - want).abs() < 1e-13);
            }
        }
        for e in &f[1..] {
            assert!(alg.eta.dot(e).abs() < 1e-14);
        }
        assert_eq!(d_frame(&alg), d_frame(&alg));
    }
}
