//! Points, affine maps and segments in the frame `(A, B - A, C - A)` of the
//! reference triangle `A = (0,0)`, `B = (1,0)`, `C = (0,1)`.
//!
//! The Euclidean structure is that of the equilateral triangle with side 1,
//! which enters only through [`sq_len_equilateral`].

use std::fmt;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaryPoint {
    pub u: Dyadic,
    pub v: Dyadic,
}

impl BaryPoint {
    pub fn new(u: Dyadic, v: Dyadic) -> Self {
        BaryPoint { u, v }
    }

    /// `(un / 2^uk, vn / 2^vk)`
    pub fn from_parts(un: i64, uk: u32, vn: i64, vk: u32) -> Self {
        BaryPoint { u: Dyadic::new(un, uk), v: Dyadic::new(vn, vk) }
    }

    pub fn origin() -> Self {
        BaryPoint { u: Dyadic::zero(), v: Dyadic::zero() }
    }

    pub fn a() -> Self {
        Self::origin()
    }

    pub fn b() -> Self {
        BaryPoint { u: Dyadic::one(), v: Dyadic::zero() }
    }

    pub fn c() -> Self {
        BaryPoint { u: Dyadic::zero(), v: Dyadic::one() }
    }

    /// Vertex of the reference triangle by index (0 = A, 1 = B, 2 = C).
    pub fn corner(index: usize) -> Self {
        match index {
            0 => Self::a(),
            1 => Self::b(),
            2 => Self::c(),
            _ => panic!("corner index {index} out of range"),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        BaryPoint { u: &self.u + &other.u, v: &self.v + &other.v }
    }

    pub fn sub(&self, other: &Self) -> Self {
        BaryPoint { u: &self.u - &other.u, v: &self.v - &other.v }
    }

    pub fn scale(&self, s: &Dyadic) -> Self {
        BaryPoint { u: &self.u * s, v: &self.v * s }
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        self.add(other).scale(&Dyadic::new(1, 1))
    }

    pub fn in_reference_triangle(&self) -> bool {
        !self.u.is_negative() && !self.v.is_negative() && (&self.u + &self.v) <= Dyadic::one()
    }

    pub fn on_ab(&self) -> bool {
        self.v.is_zero()
    }

    /// Cartesian coordinates of the equilateral realization.
    pub fn to_cartesian(&self) -> (f64, f64) {
        let u = self.u.to_f64();
        let v = self.v.to_f64();
        (u + 0.5 * v, 0.5 * 3f64.sqrt() * v)
    }
}

impl fmt::Display for BaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

impl fmt::Debug for BaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Squared Euclidean length of the frame vector `(u, v)` in the equilateral
/// realization.
pub fn sq_len_equilateral(u: &Dyadic, v: &Dyadic) -> Dyadic {
    &(&(u * u) + &(u * v)) + &(v * v)
}

pub fn sq_dist(p: &BaryPoint, q: &BaryPoint) -> Dyadic {
    let d = p.sub(q);
    sq_len_equilateral(&d.u, &d.v)
}

/// Position along AB measured from B (`1 - u`). Larger keys lie closer to A.
pub fn ab_order_key(p: &BaryPoint) -> Result<Dyadic> {
    if !p.on_ab() {
        return Err(Error::Contract(format!("point {p} is not on side AB")));
    }
    Ok(&Dyadic::one() - &p.u)
}

/// Rotation by +60 degrees (counterclockwise) of a frame vector.
pub fn rot60(w: &BaryPoint) -> BaryPoint {
    BaryPoint { u: -&w.v, v: &w.u + &w.v }
}

/// Rotation by -60 degrees of a frame vector.
pub fn rot_minus60(w: &BaryPoint) -> BaryPoint {
    BaryPoint { u: &w.u + &w.v, v: -&w.u }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap2 {
    /// Row-major: `u' = l[0][0] u + l[0][1] v + t.u`.
    pub linear: [[Dyadic; 2]; 2],
    pub translation: BaryPoint,
}

impl AffineMap2 {
    pub fn identity() -> Self {
        AffineMap2 {
            linear: [[Dyadic::one(), Dyadic::zero()], [Dyadic::zero(), Dyadic::one()]],
            translation: BaryPoint::origin(),
        }
    }

    /// `p -> ratio * p + t`
    pub fn homothety(ratio: Dyadic, translation: BaryPoint) -> Self {
        AffineMap2 {
            linear: [[ratio.clone(), Dyadic::zero()], [Dyadic::zero(), ratio]],
            translation,
        }
    }

    /// The affine map sending A, B, C to the given points.
    pub fn from_vertex_images(a: &BaryPoint, b: &BaryPoint, c: &BaryPoint) -> Self {
        let e1 = b.sub(a);
        let e2 = c.sub(a);
        AffineMap2 {
            linear: [[e1.u, e2.u], [e1.v, e2.v]],
            translation: a.clone(),
        }
    }

    pub fn apply(&self, p: &BaryPoint) -> BaryPoint {
        let l = &self.linear;
        BaryPoint {
            u: &(&(&l[0][0] * &p.u) + &(&l[0][1] * &p.v)) + &self.translation.u,
            v: &(&(&l[1][0] * &p.u) + &(&l[1][1] * &p.v)) + &self.translation.v,
        }
    }

    pub fn apply_linear(&self, w: &BaryPoint) -> BaryPoint {
        let l = &self.linear;
        BaryPoint {
            u: &(&l[0][0] * &w.u) + &(&l[0][1] * &w.v),
            v: &(&l[1][0] * &w.u) + &(&l[1][1] * &w.v),
        }
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        let a = &self.linear;
        let b = &inner.linear;
        let mul = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        AffineMap2 {
            linear: [[mul(0, 0), mul(0, 1)], [mul(1, 0), mul(1, 1)]],
            translation: self.apply(&inner.translation),
        }
    }

    pub fn determinant(&self) -> Dyadic {
        let l = &self.linear;
        &(&l[0][0] * &l[1][1]) - &(&l[0][1] * &l[1][0])
    }

    /// Exact inverse, available when the determinant is `±2^k`.
    pub fn inverse(&self) -> Option<AffineMap2> {
        let det = self.determinant();
        if det.is_zero() || det.numerator().magnitude() != &num_bigint::BigUint::from(1u8) {
            return None;
        }
        let inv_det = Dyadic::new(det.signum() as i64, 0).scale_pow2(det.exponent() as i64);
        let l = &self.linear;
        let linear = [
            [&l[1][1] * &inv_det, &(-&l[0][1]) * &inv_det],
            [&(-&l[1][0]) * &inv_det, &l[0][0] * &inv_det],
        ];
        let partial = AffineMap2 { linear, translation: BaryPoint::origin() };
        let t = partial.apply_linear(&self.translation);
        Some(AffineMap2 { translation: BaryPoint { u: -t.u, v: -t.v }, ..partial })
    }

    pub fn is_homothety(&self) -> bool {
        let l = &self.linear;
        l[0][1].is_zero() && l[1][0].is_zero() && l[0][0] == l[1][1]
    }

    /// Squared similarity ratio if the map is a similarity of the
    /// equilateral realization (checked on the three edge vectors).
    pub fn similarity_ratio_sq(&self) -> Option<Dyadic> {
        let edges = [
            BaryPoint::b(),
            BaryPoint::c(),
            BaryPoint::c().sub(&BaryPoint::b()),
        ];
        let mut ratio: Option<Dyadic> = None;
        for e in &edges {
            let img = self.apply_linear(e);
            let r = sq_len_equilateral(&img.u, &img.v);
            // every edge has length 1
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        ratio
    }
}

impl fmt::Debug for AffineMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.linear;
        write!(
            f,
            "[[{}, {}], [{}, {}]] + {}",
            l[0][0], l[0][1], l[1][0], l[1][1], self.translation
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Segment {
    a: BaryPoint,
    b: BaryPoint,
}

impl Segment {
    pub fn new(a: BaryPoint, b: BaryPoint) -> Result<Self> {
        if a == b {
            return Err(Error::Contract(format!("degenerate segment at {a}")));
        }
        Ok(Segment { a, b })
    }

    pub fn endpoints(&self) -> (&BaryPoint, &BaryPoint) {
        (&self.a, &self.b)
    }

    pub fn midpoint(&self) -> BaryPoint {
        self.a.midpoint(&self.b)
    }
}

/// Closed triangle given by its three vertices, in the order images of
/// A, B, C.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Triangle {
    pub vertices: [BaryPoint; 3],
}

impl Triangle {
    pub fn reference() -> Self {
        Triangle { vertices: [BaryPoint::a(), BaryPoint::b(), BaryPoint::c()] }
    }

    pub fn image(map: &AffineMap2) -> Self {
        Triangle {
            vertices: [
                map.apply(&BaryPoint::a()),
                map.apply(&BaryPoint::b()),
                map.apply(&BaryPoint::c()),
            ],
        }
    }

    /// Intersection with side AB for a triangle inside the reference one:
    /// the hull of its vertices with `v = 0`.
    pub fn ab_section(&self) -> Vec<BaryPoint> {
        let mut on: Vec<BaryPoint> = self.vertices.iter().filter(|p| p.on_ab()).cloned().collect();
        on.sort();
        on.dedup();
        on
    }

    /// Shares at least one vertex with `other`.
    pub fn touches(&self, other: &Triangle) -> bool {
        self.vertices.iter().any(|p| other.vertices.contains(p))
    }

    pub fn sq_diameter(&self) -> Dyadic {
        let [p, q, r] = &self.vertices;
        let mut best = sq_dist(p, q);
        for d in [sq_dist(q, r), sq_dist(p, r)] {
            if d > best {
                best = d;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: i64, k: u32) -> Dyadic {
        Dyadic::new(n, k)
    }

    #[test]
    fn identity_map_fixes_points() {
        let p = BaryPoint::new(d(1, 1), d(1, 1));
        assert_eq!(AffineMap2::identity().apply(&p), p);
    }

    #[test]
    fn squared_lengths() {
        assert_eq!(sq_len_equilateral(&d(1, 0), &d(0, 0)), Dyadic::one());
        assert_eq!(sq_len_equilateral(&d(1, 1), &d(1, 1)), d(3, 2));
        assert_eq!(sq_len_equilateral(&d(0, 0), &d(0, 0)), Dyadic::zero());
        // C - B has length 1 as well
        assert_eq!(sq_len_equilateral(&d(-1, 0), &d(1, 0)), Dyadic::one());
    }

    #[test]
    fn ab_keys() {
        assert_eq!(ab_order_key(&BaryPoint::b()).unwrap(), Dyadic::zero());
        assert_eq!(ab_order_key(&BaryPoint::a()).unwrap(), Dyadic::one());
        assert_eq!(ab_order_key(&BaryPoint::from_parts(1, 1, 0, 0)).unwrap(), d(1, 1));
        assert!(matches!(ab_order_key(&BaryPoint::c()), Err(Error::Contract(_))));
    }

    #[test]
    fn rotations_are_inverse_and_isometric() {
        let w = BaryPoint::from_parts(3, 2, -5, 3);
        assert_eq!(rot60(&rot_minus60(&w)), w);
        let r = rot60(&w);
        assert_eq!(sq_len_equilateral(&r.u, &r.v), sq_len_equilateral(&w.u, &w.v));
        // six turns are the identity
        let mut x = w.clone();
        for _ in 0..6 {
            x = rot60(&x);
        }
        assert_eq!(x, w);
        assert_eq!(rot60(&BaryPoint::b()), BaryPoint::c());
    }

    #[test]
    fn inverse_round_trip() {
        let m = AffineMap2::from_vertex_images(
            &BaryPoint::b(),
            &BaryPoint::from_parts(3, 2, 1, 2),
            &BaryPoint::from_parts(3, 2, 0, 0),
        );
        let inv = m.inverse().unwrap();
        let p = BaryPoint::from_parts(5, 4, 3, 3);
        assert_eq!(inv.apply(&m.apply(&p)), p);
        assert_eq!(m.compose(&inv), AffineMap2::identity());
    }

    #[test]
    fn segment_rejects_degenerate() {
        assert!(Segment::new(BaryPoint::a(), BaryPoint::a()).is_err());
        let s = Segment::new(BaryPoint::a(), BaryPoint::b()).unwrap();
        assert_eq!(s.midpoint(), BaryPoint::from_parts(1, 1, 0, 0));
    }

    #[test]
    fn point_text_form() {
        assert_eq!(BaryPoint::from_parts(3, 2, 1, 2).to_string(), "(3/2^2, 1/2^2)");
    }
}
