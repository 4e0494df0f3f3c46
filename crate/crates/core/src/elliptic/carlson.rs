//! Carlson symmetric forms R_F and R_D by the duplication theorem.

use crate::scalar::Real;

const MAX_DUPLICATIONS: usize = 100;

/// R_F(x, y, z) for nonnegative arguments with at most one zero.
pub fn rf<T: Real>(x0: T, y0: T, z0: T) -> T {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let quarter = T::lit(0.25);
    let a0 = (x0 + y0 + z0) / T::lit(3.0);
    let q = (T::lit(3.0) * T::epsilon()).powf(T::lit(-1.0 / 6.0))
        * (a0 - x0).abs().max((a0 - y0).abs()).max((a0 - z0).abs());
    let mut a = a0;
    let mut scale = T::one();
    for _ in 0..MAX_DUPLICATIONS {
        if q * scale < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = (x + lambda) * quarter;
        y = (y + lambda) * quarter;
        z = (z + lambda) * quarter;
        a = (a + lambda) * quarter;
        scale = scale * quarter;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    let series = T::one() - e2 / T::lit(10.0) + e3 / T::lit(14.0) + e2 * e2 / T::lit(24.0)
        - T::lit(3.0) * e2 * e3 / T::lit(44.0);
    series / a.sqrt()
}

/// R_D(x, y, z) for nonnegative x, y (at most one zero) and positive z.
pub fn rd<T: Real>(x0: T, y0: T, z0: T) -> T {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let quarter = T::lit(0.25);
    let a0 = (x0 + y0 + T::lit(3.0) * z0) / T::lit(5.0);
    let q = (T::epsilon() * quarter).powf(T::lit(-1.0 / 6.0))
        * (a0 - x0).abs().max((a0 - y0).abs()).max((a0 - z0).abs());
    let mut a = a0;
    let mut scale = T::one();
    let mut sum = T::zero();
    for _ in 0..MAX_DUPLICATIONS {
        if q * scale < a.abs() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        sum = sum + scale / (sz * (z + lambda));
        x = (x + lambda) * quarter;
        y = (y + lambda) * quarter;
        z = (z + lambda) * quarter;
        a = (a + lambda) * quarter;
        scale = scale * quarter;
    }
    let dx = (a0 - x0) * scale / a;
    let dy = (a0 - y0) * scale / a;
    let dz = -(dx + dy) / T::lit(3.0);
    let xy = dx * dy;
    let z2 = dz * dz;
    let e2 = xy - T::lit(6.0) * z2;
    let e3 = (T::lit(3.0) * xy - T::lit(8.0) * z2) * dz;
    let e4 = T::lit(3.0) * (xy - z2) * z2;
    let e5 = xy * z2 * dz;
    let series = T::one() - T::lit(3.0 / 14.0) * e2 + e3 / T::lit(6.0) + T::lit(9.0 / 88.0) * e2 * e2
        - T::lit(3.0 / 22.0) * e4
        - T::lit(9.0 / 52.0) * e2 * e3
        + T::lit(3.0 / 26.0) * e5;
    scale * series / (a * a.sqrt()) + T::lit(3.0) * sum
}
