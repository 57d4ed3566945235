use crate::model::Box3D;

/// Boxes closer than this in BEV count as overlapping.
const SEPARATION_EPS: f64 = 1e-6;

fn project(corners: &[[f64; 2]; 4], axis: [f64; 2]) -> (f64, f64) {
    corners
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            let d = c[0] * axis[0] + c[1] * axis[1];
            (lo.min(d), hi.max(d))
        })
}

/// Separating-axis test on the BEV rectangles. Touching or nearly touching
/// footprints count as overlapping.
pub fn obb_overlap(a: &Box3D, b: &Box3D) -> bool {
    let (ca, cb) = (a.bev_corners(), b.bev_corners());
    let axes = [
        a.yaw,
        a.yaw + std::f64::consts::FRAC_PI_2,
        b.yaw,
        b.yaw + std::f64::consts::FRAC_PI_2,
    ];
    for t in axes {
        let axis = [t.cos(), t.sin()];
        let (alo, ahi) = project(&ca, axis);
        let (blo, bhi) = project(&cb, axis);
        if ahi + SEPARATION_EPS < blo || bhi + SEPARATION_EPS < alo {
            return false;
        }
    }
    true
}

fn area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

/// Area of the BEV footprint intersection by convex polygon clipping.
/// Slivers below 1e-12 m² are reported as 0.
pub fn bev_intersection_area(a: &Box3D, b: &Box3D) -> f64 {
    let mut poly: Vec<[f64; 2]> = a.bev_corners().to_vec();
    let clip = b.bev_corners();
    for i in 0..4 {
        let (e0, e1) = (clip[i], clip[(i + 1) % 4]);
        let side =
            |p: [f64; 2]| (e1[0] - e0[0]) * (p[1] - e0[1]) - (e1[1] - e0[1]) * (p[0] - e0[0]);
        let mut next = Vec::with_capacity(poly.len() + 1);
        for j in 0..poly.len() {
            let (p, q) = (poly[j], poly[(j + 1) % poly.len()]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                next.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = next;
        if poly.len() < 3 {
            return 0.0;
        }
    }
    let a = area(&poly).abs();
    if a < 1e-12 {
        0.0
    } else {
        a
    }
}

pub fn bev_iou(a: &Box3D, b: &Box3D) -> f64 {
    let inter = bev_intersection_area(a, b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.size.x * a.size.y + b.size.x * b.size.y - inter;
    inter / union
}
