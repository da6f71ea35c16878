//! The nine-map similarity system on the reference triangle.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::geometry::{rot60, rot_minus60, AffineMap2, BaryPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenLabel {
    S01,
    S02,
    S11,
    S12,
    S21,
    S22,
    S31,
    S32,
    S3,
}

impl GenLabel {
    pub const ALL: [GenLabel; 9] = [
        GenLabel::S01,
        GenLabel::S02,
        GenLabel::S11,
        GenLabel::S12,
        GenLabel::S21,
        GenLabel::S22,
        GenLabel::S31,
        GenLabel::S32,
        GenLabel::S3,
    ];

    /// Map used for digit `i` on branch `l` (`l` in {1, 2}).
    pub fn for_digit(i: u8, l: u8) -> GenLabel {
        match (i, l) {
            (0, 1) => GenLabel::S01,
            (0, 2) => GenLabel::S02,
            (1, 1) => GenLabel::S11,
            (1, 2) => GenLabel::S12,
            (2, 1) => GenLabel::S21,
            (2, 2) => GenLabel::S22,
            (3, 1) => GenLabel::S31,
            (3, 2) => GenLabel::S32,
            _ => panic!("no generator for digit {i}, branch {l}"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GenLabel::S01 => "S01",
            GenLabel::S02 => "S02",
            GenLabel::S11 => "S11",
            GenLabel::S12 => "S12",
            GenLabel::S21 => "S21",
            GenLabel::S22 => "S22",
            GenLabel::S31 => "S31",
            GenLabel::S32 => "S32",
            GenLabel::S3 => "S3",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenSystem {
    maps: Vec<(GenLabel, AffineMap2)>,
    inverses: Vec<AffineMap2>,
}

fn half() -> Dyadic {
    Dyadic::new(1, 1)
}

fn quarter() -> Dyadic {
    Dyadic::new(1, 2)
}

/// Orientation-preserving similarity with `S(A) = a_img`, `S(C) = c_img`:
/// B sits at `-60` degrees from C as seen from A.
fn solve_from_a_and_c(a_img: &BaryPoint, c_img: &BaryPoint) -> AffineMap2 {
    let b_img = a_img.add(&rot_minus60(&c_img.sub(a_img)));
    AffineMap2::from_vertex_images(a_img, &b_img, c_img)
}

/// Orientation-preserving similarity with `S(A) = a_img`, `S(B) = b_img`.
fn solve_from_a_and_b(a_img: &BaryPoint, b_img: &BaryPoint) -> AffineMap2 {
    let c_img = a_img.add(&rot60(&b_img.sub(a_img)));
    AffineMap2::from_vertex_images(a_img, b_img, &c_img)
}

/// Homothety with ratio `ratio` sending `p` to `p_img`.
fn homothety_through(ratio: Dyadic, p: &BaryPoint, p_img: &BaryPoint) -> AffineMap2 {
    let t = p_img.sub(&p.scale(&ratio));
    AffineMap2::homothety(ratio, t)
}

impl GenSystem {
    pub fn new() -> Result<Self> {
        let (a, b, c) = (BaryPoint::a(), BaryPoint::b(), BaryPoint::c());
        let quarter_pt = |p: &BaryPoint, q: &BaryPoint| p.add(&q.scale(&Dyadic::from_int(3))).scale(&quarter());

        let s01 = solve_from_a_and_c(&b, &quarter_pt(&a, &b));
        let s02 = solve_from_a_and_b(&c, &quarter_pt(&a, &c));
        let s11 = homothety_through(quarter(), &c, &b.midpoint(&c));
        let s12 = homothety_through(quarter(), &b, &b.midpoint(&c));
        let s21 = homothety_through(quarter(), &a, &a.midpoint(&b));
        let s22 = homothety_through(quarter(), &a, &a.midpoint(&c));
        let s3 = homothety_through(half(), &a, &a);

        let maps = vec![
            (GenLabel::S01, s01),
            (GenLabel::S02, s02),
            (GenLabel::S11, s11),
            (GenLabel::S12, s12),
            (GenLabel::S21, s21),
            (GenLabel::S22, s22),
            (GenLabel::S31, s3.clone()),
            (GenLabel::S32, s3.clone()),
            (GenLabel::S3, s3),
        ];
        let mut inverses = Vec::with_capacity(maps.len());
        for (label, m) in &maps {
            inverses.push(m.inverse().ok_or_else(|| {
                Error::Construction(format!("{} is not invertible over dyadics", label.name()))
            })?);
        }
        let sys = GenSystem { maps, inverses };
        sys.check()?;
        Ok(sys)
    }

    fn check(&self) -> Result<()> {
        let fail = |label: GenLabel, what: &str| {
            Err(Error::Construction(format!("{}: {what}", label.name())))
        };
        let (a, b, c) = (BaryPoint::a(), BaryPoint::b(), BaryPoint::c());
        for (label, m) in &self.maps {
            let expected_ratio = match label {
                GenLabel::S3 | GenLabel::S31 | GenLabel::S32 => half(),
                _ => quarter(),
            };
            if m.similarity_ratio_sq() != Some(&expected_ratio * &expected_ratio) {
                return fail(*label, "wrong similarity ratio");
            }
            if m.determinant().is_negative() {
                return fail(*label, "orientation reversing");
            }
            let is_rotated = matches!(label, GenLabel::S01 | GenLabel::S02);
            if !is_rotated && !m.is_homothety() {
                return fail(*label, "expected a homothety");
            }
            let tri = crate::geometry::Triangle::image(m);
            if !tri.vertices.iter().all(BaryPoint::in_reference_triangle) {
                return fail(*label, "image leaves the reference triangle");
            }
        }
        let q = |p: &BaryPoint, r: &BaryPoint| p.add(&r.scale(&Dyadic::from_int(3))).scale(&quarter());
        let pins = [
            (GenLabel::S01, &a, b.clone()),
            (GenLabel::S01, &c, q(&a, &b)),
            (GenLabel::S02, &a, c.clone()),
            (GenLabel::S02, &b, q(&a, &c)),
            (GenLabel::S11, &c, b.midpoint(&c)),
            (GenLabel::S12, &b, b.midpoint(&c)),
            (GenLabel::S21, &a, a.midpoint(&b)),
            (GenLabel::S22, &a, a.midpoint(&c)),
            (GenLabel::S3, &a, a.clone()),
        ];
        for (label, p, img) in pins {
            if self.map(label).apply(p) != img {
                return fail(label, "pinned image violated");
            }
        }
        Ok(())
    }

    pub fn map(&self, label: GenLabel) -> &AffineMap2 {
        &self.maps[label as usize].1
    }

    pub fn inverse(&self, label: GenLabel) -> &AffineMap2 {
        &self.inverses[label as usize]
    }

    pub fn digit_map(&self, digit: u8, branch: u8) -> &AffineMap2 {
        self.map(GenLabel::for_digit(digit, branch))
    }

    pub fn iter(&self) -> impl Iterator<Item = (GenLabel, &AffineMap2)> {
        self.maps.iter().map(|(l, m)| (*l, m))
    }
}
