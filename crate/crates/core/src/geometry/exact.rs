//! Arithmetic backends for the exact predicates: a forward-error-tracked
//! float pass that decides most cases, and exact dyadic evaluation for the
//! rest. Every f64 is a dyadic rational and the predicates are pure ring
//! expressions, so a big-integer mantissa with a binary exponent evaluates
//! them exactly without any rational normalization.

use num::bigint::Sign as BigSign;
use num::BigInt;

/// Shared scalar interface so predicate expressions can be written once and
/// evaluated with either backend.
pub(crate) trait Ring: Clone {
    fn from_f64(x: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Certain sign of the value: -1, 0, +1, or `None` when undecidable.
    fn sign(&self) -> Option<i8>;
}

/// A float with a running absolute error bound. The bound uses the full
/// machine epsilon per operation, which over-reports the true rounding error
/// and therefore never certifies a wrong sign.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Fl {
    pub v: f64,
    pub e: f64,
}

const U: f64 = f64::EPSILON;

impl Ring for Fl {
    fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Fl { v: x, e: 0.0 }
    }

    fn add(&self, o: &Self) -> Self {
        let v = self.v + o.v;
        Fl { v, e: self.e + o.e + U * v.abs() }
    }

    fn sub(&self, o: &Self) -> Self {
        let v = self.v - o.v;
        Fl { v, e: self.e + o.e + U * v.abs() }
    }

    fn mul(&self, o: &Self) -> Self {
        let v = self.v * o.v;
        let e = self.e * o.v.abs() + o.e * self.v.abs() + self.e * o.e + U * v.abs();
        Fl { v, e }
    }

    fn sign(&self) -> Option<i8> {
        if !self.v.is_finite() || !self.e.is_finite() {
            return None;
        }
        if self.e == 0.0 {
            return Some(if self.v > 0.0 {
                1
            } else if self.v < 0.0 {
                -1
            } else {
                0
            });
        }
        if self.v > self.e {
            Some(1)
        } else if self.v < -self.e {
            Some(-1)
        } else {
            None
        }
    }
}

/// Exact dyadic scalar: `mantissa * 2^exp`.
#[derive(Clone, Debug)]
pub(crate) struct Dy {
    m: BigInt,
    e: i64,
}

impl Ring for Dy {
    fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        if x == 0.0 {
            return Dy { m: BigInt::from(0), e: 0 };
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let mut m = BigInt::from(mant);
        if negative {
            m = -m;
        }
        Dy { m, e }
    }

    fn add(&self, o: &Self) -> Self {
        if self.e <= o.e {
            Dy { m: &self.m + (&o.m << (o.e - self.e) as usize), e: self.e }
        } else {
            Dy { m: (&self.m << (self.e - o.e) as usize) + &o.m, e: o.e }
        }
    }

    fn sub(&self, o: &Self) -> Self {
        if self.e <= o.e {
            Dy { m: &self.m - (&o.m << (o.e - self.e) as usize), e: self.e }
        } else {
            Dy { m: (&self.m << (self.e - o.e) as usize) - &o.m, e: o.e }
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Dy { m: &self.m * &o.m, e: self.e + o.e }
    }

    fn sign(&self) -> Option<i8> {
        Some(match self.m.sign() {
            BigSign::Plus => 1,
            BigSign::Minus => -1,
            BigSign::NoSign => 0,
        })
    }
}

#[cfg(test)]
impl Dy {
    pub fn from_i64(x: i64) -> Self {
        Dy { m: BigInt::from(x), e: 0 }
    }
}

pub(crate) type V3<S> = [S; 3];

pub(crate) fn v3_from<S: Ring>(p: &nalgebra::Point3<f64>) -> V3<S> {
    [S::from_f64(p.x), S::from_f64(p.y), S::from_f64(p.z)]
}

/// Grid node coordinates evaluated symbolically as `origin + index * dx`,
/// so the exact backend sees the exact real value.
pub(crate) fn grid_node_coords<S: Ring>(grid: &crate::grid::GridSpec, n: [i32; 3]) -> V3<S> {
    let o = grid.origin();
    let dx = S::from_f64(grid.dx());
    [
        S::from_f64(o.x).add(&S::from_f64(n[0] as f64).mul(&dx)),
        S::from_f64(o.y).add(&S::from_f64(n[1] as f64).mul(&dx)),
        S::from_f64(o.z).add(&S::from_f64(n[2] as f64).mul(&dx)),
    ]
}

pub(crate) fn v_sub<S: Ring>(a: &V3<S>, b: &V3<S>) -> V3<S> {
    [a[0].sub(&b[0]), a[1].sub(&b[1]), a[2].sub(&b[2])]
}

pub(crate) fn v_dot<S: Ring>(a: &V3<S>, b: &V3<S>) -> S {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

pub(crate) fn v_cross<S: Ring>(a: &V3<S>, b: &V3<S>) -> V3<S> {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// Certain sign of a whole vector: Some(true) if certainly zero,
/// Some(false) if certainly nonzero, None if undecided.
pub(crate) fn v_is_zero<S: Ring>(a: &V3<S>) -> Option<bool> {
    let mut all_zero = true;
    for c in a {
        match c.sign() {
            None => return None,
            Some(0) => {}
            Some(_) => all_zero = false,
        }
    }
    Some(all_zero)
}

/// det [b-a, c-a, d-a]; positive when d lies on the side of plane (a, b, c)
/// that the right-handed normal (b-a) x (c-a) points into.
pub(crate) fn orient3<S: Ring>(a: &V3<S>, b: &V3<S>, c: &V3<S>, d: &V3<S>) -> S {
    let u = v_sub(b, a);
    let v = v_sub(c, a);
    let w = v_sub(d, a);
    v_dot(&v_cross(&u, &v), &w)
}

/// 2D cross product (z component) of (b-a) and (c-a).
pub(crate) fn orient2<S: Ring>(a: &V3<S>, b: &V3<S>, c: &V3<S>) -> S {
    let u = v_sub(b, a);
    let v = v_sub(c, a);
    u[0].mul(&v[1]).sub(&u[1].mul(&v[0]))
}
