//! Axis-aligned regions and the intersection-over-union overlap.

use crate::error::{Error, Result};

/// An axis-aligned box with its top-left corner at `(x, y)`.
///
/// Coordinates are continuous pixels; width and height are always finite and
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let finite = x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite();
        if !finite || w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidBox { x, y, w, h });
        }
        Ok(Self { x, y, w, h })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn width(&self) -> f64 {
        self.w
    }

    pub fn height(&self) -> f64 {
        self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Same extent, moved by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }

    /// Area of the intersection with `other`, zero when disjoint.
    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let iw = self.right().min(other.right()) - self.x.max(other.x);
        let ih = self.bottom().min(other.bottom()) - self.y.max(other.y);
        if iw <= 0.0 || ih <= 0.0 {
            0.0
        } else {
            iw * ih
        }
    }

    /// Intersection over union of two boxes.
    pub fn iou(&self, other: &BBox) -> f64 {
        if self == other {
            return 1.0;
        }
        let inter = self.intersection_area(other);
        if inter == 0.0 {
            return 0.0;
        }
        let union = self.area() + other.area() - inter;
        (inter / union).clamp(0.0, 1.0)
    }

    /// True when `self` lies inside the `[0, width] x [0, height]` rectangle.
    pub fn within(&self, width: f64, height: f64) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.right() <= width && self.bottom() <= height
    }
}

/// A ground-truth or predicted target region for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    /// Target absent (ground truth) or not reported (prediction).
    Empty,
    Box(BBox),
}

impl Region {
    /// Validating constructor for a box region.
    pub fn bbox(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        BBox::new(x, y, w, h).map(Region::Box)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    pub fn as_box(&self) -> Option<&BBox> {
        match self {
            Region::Box(b) => Some(b),
            Region::Empty => None,
        }
    }
}

impl From<BBox> for Region {
    fn from(b: BBox) -> Self {
        Region::Box(b)
    }
}

/// Overlap of two regions; zero whenever either of them is empty.
pub fn iou(a: &Region, b: &Region) -> f64 {
    match (a, b) {
        (Region::Box(a), Region::Box(b)) => a.iou(b),
        _ => 0.0,
    }
}

/// Box center, `None` for an empty region.
pub fn center(a: &Region) -> Option<(f64, f64)> {
    a.as_box().map(BBox::center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: f64, y: f64, w: f64, h: f64) -> Region {
        Region::bbox(x, y, w, h).unwrap()
    }

    /// Counts unit pixels covered by each box; exact for integer boxes.
    fn raster_iou(a: (i32, i32, i32, i32), c: (i32, i32, i32, i32)) -> f64 {
        let inside = |r: (i32, i32, i32, i32), px: i32, py: i32| {
            px >= r.0 && px < r.0 + r.2 && py >= r.1 && py < r.1 + r.3
        };
        let (mut inter, mut union) = (0u64, 0u64);
        for py in -2..40 {
            for px in -2..40 {
                let (ia, ic) = (inside(a, px, py), inside(c, px, py));
                if ia && ic {
                    inter += 1;
                }
                if ia || ic {
                    union += 1;
                }
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn empty_overlap_is_zero() {
        assert_eq!(iou(&Region::Empty, &b(0.0, 0.0, 10.0, 10.0)), 0.0);
        assert_eq!(iou(&b(0.0, 0.0, 10.0, 10.0), &Region::Empty), 0.0);
        assert_eq!(iou(&Region::Empty, &Region::Empty), 0.0);
    }

    #[test]
    fn identical_boxes() {
        let a = b(3.0, 4.0, 7.0, 2.0);
        assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn partial_overlap() {
        let v = iou(&b(0.0, 0.0, 2.0, 2.0), &b(1.0, 1.0, 2.0, 2.0));
        assert!((v - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn touching_boxes_do_not_overlap() {
        assert_eq!(iou(&b(0.0, 0.0, 2.0, 2.0), &b(2.0, 0.0, 2.0, 2.0)), 0.0);
    }

    #[test]
    fn centers() {
        assert_eq!(center(&b(0.0, 0.0, 4.0, 2.0)), Some((2.0, 1.0)));
        assert_eq!(center(&Region::Empty), None);
        assert_eq!(center(&b(10.0, 20.0, 1.0, 1.0)), Some((10.5, 20.5)));
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(BBox::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(BBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
        assert!(BBox::new(0.0, 0.0, f64::INFINITY, 1.0).is_err());
    }

    fn any_box() -> impl Strategy<Value = Region> {
        (-50.0..50.0f64, -50.0..50.0f64, 0.1..40.0f64, 0.1..40.0f64)
            .prop_map(|(x, y, w, h)| b(x, y, w, h))
    }

    fn any_region() -> impl Strategy<Value = Region> {
        prop_oneof![1 => Just(Region::Empty), 6 => any_box()]
    }

    fn int_box() -> impl Strategy<Value = (i32, i32, i32, i32)> {
        (0..20i32, 0..20i32, 1..18i32, 1..18i32)
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(a in any_region(), c in any_region()) {
            let v = iou(&a, &c);
            prop_assert_eq!(v, iou(&c, &a));
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn self_overlap_is_one(a in any_box()) {
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn agrees_with_pixel_counting(a in int_box(), c in int_box()) {
            let exact = iou(
                &b(a.0 as f64, a.1 as f64, a.2 as f64, a.3 as f64),
                &b(c.0 as f64, c.1 as f64, c.2 as f64, c.3 as f64),
            );
            prop_assert!((exact - raster_iou(a, c)).abs() < 1e-9);
        }

        #[test]
        fn monotone_under_containment(
            (x, y, w, h) in (0.0..10.0f64, 0.0..10.0f64, 0.5..10.0f64, 0.5..10.0f64),
            grow1 in (0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64),
            grow2 in (0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64, 0.0..5.0f64),
        ) {
            let a = b(x, y, w, h);
            let mid = b(x - grow1.0, y - grow1.1, w + grow1.0 + grow1.2, h + grow1.1 + grow1.3);
            let (mx, my, mw, mh) = {
                let m = mid.as_box().unwrap();
                (m.x(), m.y(), m.width(), m.height())
            };
            let outer = b(mx - grow2.0, my - grow2.1, mw + grow2.0 + grow2.2, mh + grow2.1 + grow2.3);
            prop_assert!(iou(&a, &outer) <= iou(&a, &mid) + 1e-12);
        }
    }
}
