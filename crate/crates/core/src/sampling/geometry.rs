use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Outer boundary of a two-dimensional domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outer {
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
}

/// Excluded region strictly inside the outer boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Hole {
    Circle { center: [f64; 2], radius: f64 },
    /// `ax (x-cx)^2 + ay (y-cy)^2 <= 1`
    Ellipse { center: [f64; 2], coef: [f64; 2] },
}

/// Two-dimensional domain: an outer rectangle or circle minus a list of
/// non-overlapping holes. Geometry data is plain `f64`; predicates accept
/// any scalar by reading primal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub outer: Outer,
    pub holes: Vec<Hole>,
}

/// Boundary sample labeled by component: 0 is the outer boundary, holes
/// follow in declaration order starting at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub x: [f64; 2],
    pub component: usize,
}

impl Hole {
    fn interior_indicator(&self, p: [f64; 2]) -> f64 {
        match self {
            Hole::Circle { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy - radius * radius
            }
            Hole::Ellipse { center, coef } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                coef[0] * dx * dx + coef[1] * dy * dy - 1.0
            }
        }
    }

    /// Points with negative indicator are inside the hole.
    pub fn contains_interior(&self, p: [f64; 2]) -> bool {
        self.interior_indicator(p) < 0.0
    }
}

impl DomainGeometry {
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2]) -> Self {
        DomainGeometry {
            outer: Outer::Rectangle { lo, hi },
            holes: Vec::new(),
        }
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        DomainGeometry {
            outer: Outer::Circle { center, radius },
            holes: Vec::new(),
        }
    }

    pub fn with_holes(mut self, holes: Vec<Hole>) -> Self {
        self.holes = holes;
        self
    }

    /// Axis-aligned bounding box of the outer boundary.
    pub fn bounding_box(&self) -> [(f64, f64); 2] {
        match &self.outer {
            Outer::Rectangle { lo, hi } => [(lo[0], hi[0]), (lo[1], hi[1])],
            Outer::Circle { center, radius } => [
                (center[0] - radius, center[0] + radius),
                (center[1] - radius, center[1] + radius),
            ],
        }
    }

    /// Inside the (closed) outer region and outside every hole interior.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let inside_outer = match &self.outer {
            Outer::Rectangle { lo, hi } => {
                p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]
            }
            Outer::Circle { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= radius * radius
            }
        };
        inside_outer && !self.holes.iter().any(|h| h.contains_interior(p))
    }

    /// Strictly interior: away from the outer boundary and every hole
    /// closure. Used by collocation sampling.
    pub fn strictly_inside(&self, p: [f64; 2]) -> bool {
        let inside_outer = match &self.outer {
            Outer::Rectangle { lo, hi } => {
                p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1]
            }
            Outer::Circle { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
        };
        inside_outer && !self.holes.iter().any(|h| h.interior_indicator(p) <= 0.0)
    }

    pub fn contains_scalar<S: Scalar>(&self, p: &[S]) -> bool {
        self.contains([p[0].value(), p[1].value()])
    }

    /// Component count: outer boundary plus one per hole.
    pub fn component_count(&self) -> usize {
        1 + self.holes.len()
    }

    /// Deterministic boundary sampling, `n` points per component: equal
    /// arc-length spacing starting at angle zero for circles and ellipses,
    /// perimeter-uniform spacing starting at the low corner for rectangles.
    pub fn boundary_points(&self, n: usize) -> Vec<BoundaryPoint> {
        let mut out = Vec::with_capacity(n * self.component_count());
        match &self.outer {
            Outer::Rectangle { lo, hi } => {
                let w = hi[0] - lo[0];
                let h = hi[1] - lo[1];
                let perimeter = 2.0 * (w + h);
                for i in 0..n {
                    let s = perimeter * i as f64 / n as f64;
                    let x = if s < w {
                        [lo[0] + s, lo[1]]
                    } else if s < w + h {
                        [hi[0], lo[1] + (s - w)]
                    } else if s < 2.0 * w + h {
                        [hi[0] - (s - w - h), hi[1]]
                    } else {
                        [lo[0], hi[1] - (s - 2.0 * w - h)]
                    };
                    out.push(BoundaryPoint { x, component: 0 });
                }
            }
            Outer::Circle { center, radius } => {
                for i in 0..n {
                    let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    out.push(BoundaryPoint {
                        x: [center[0] + radius * th.cos(), center[1] + radius * th.sin()],
                        component: 0,
                    });
                }
            }
        }
        for (hidx, hole) in self.holes.iter().enumerate() {
            match hole {
                Hole::Circle { center, radius } => {
                    for i in 0..n {
                        let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                        out.push(BoundaryPoint {
                            x: [center[0] + radius * th.cos(), center[1] + radius * th.sin()],
                            component: 1 + hidx,
                        });
                    }
                }
                Hole::Ellipse { center, coef } => {
                    // Semi-axes 1/sqrt(coef); points generated from the angle
                    // parameter satisfy the quadratic form exactly. Equal
                    // arc-length spacing comes from inverting the cumulative
                    // arc length on a dense angular grid.
                    let (ra, rb) = (1.0 / coef[0].sqrt(), 1.0 / coef[1].sqrt());
                    let segs = 4096;
                    let mut cum = Vec::with_capacity(segs + 1);
                    cum.push(0.0f64);
                    let mut prev = [center[0] + ra, center[1]];
                    for k in 1..=segs {
                        let th = 2.0 * std::f64::consts::PI * k as f64 / segs as f64;
                        let p = [center[0] + ra * th.cos(), center[1] + rb * th.sin()];
                        let d = ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
                        cum.push(cum.last().unwrap() + d);
                        prev = p;
                    }
                    let total = *cum.last().unwrap();
                    let mut seg = 0usize;
                    for i in 0..n {
                        let target = total * i as f64 / n as f64;
                        while seg + 1 < cum.len() && cum[seg + 1] < target {
                            seg += 1;
                        }
                        let frac = if cum[seg + 1] > cum[seg] {
                            (target - cum[seg]) / (cum[seg + 1] - cum[seg])
                        } else {
                            0.0
                        };
                        let th = 2.0 * std::f64::consts::PI * (seg as f64 + frac) / segs as f64;
                        out.push(BoundaryPoint {
                            x: [center[0] + ra * th.cos(), center[1] + rb * th.sin()],
                            component: 1 + hidx,
                        });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_four_points_are_cardinal() {
        let g = DomainGeometry::circle([0.0, 0.0], 1.0);
        let pts = g.boundary_points(4);
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in pts.iter().zip(expect) {
            assert!((p.x[0] - e[0]).abs() < 1e-15 && (p.x[1] - e[1]).abs() < 1e-15);
            assert_eq!(p.component, 0);
        }
    }

    #[test]
    fn unit_square_eight_points_two_per_side() {
        let g = DomainGeometry::rectangle([0.0, 0.0], [1.0, 1.0]);
        let pts = g.boundary_points(8);
        let mut per_side = [0usize; 4];
        for p in &pts {
            if p.x[1] == 0.0 && p.x[0] < 1.0 {
                per_side[0] += 1;
            } else if p.x[0] == 1.0 && p.x[1] < 1.0 {
                per_side[1] += 1;
            } else if p.x[1] == 1.0 && p.x[0] > 0.0 {
                per_side[2] += 1;
            } else {
                per_side[3] += 1;
            }
        }
        assert_eq!(per_side, [2, 2, 2, 2]);
    }

    #[test]
    fn ellipse_points_satisfy_quadratic_form() {
        let hole = Hole::Ellipse {
            center: [-0.5, 0.5],
            coef: [16.0, 64.0],
        };
        let g = DomainGeometry::rectangle([-1.0, -1.0], [1.0, 1.0]).with_holes(vec![hole]);
        let pts = g.boundary_points(37);
        for p in pts.iter().filter(|p| p.component == 1) {
            let q = 16.0 * (p.x[0] + 0.5).powi(2) + 64.0 * (p.x[1] - 0.5).powi(2);
            assert!((q - 1.0).abs() < 1e-10, "quadratic form {q}");
        }
    }

    #[test]
    fn contains_excludes_hole_centers() {
        let g = DomainGeometry::rectangle([-1.0, -1.0], [1.0, 1.0]).with_holes(vec![
            Hole::Circle { center: [-0.5, -0.5], radius: 0.1 },
            Hole::Circle { center: [0.5, 0.5], radius: 0.2 },
            Hole::Ellipse { center: [-0.5, 0.5], coef: [16.0, 64.0] },
        ]);
        assert!(!g.contains([-0.5, -0.5]));
        assert!(!g.contains([0.5, 0.5]));
        assert!(!g.contains([-0.5, 0.5]));
        // centroid of the outer domain sits outside every hole
        assert!(g.contains([0.0, 0.0]));
        // boundary of the outer square belongs to the domain
        assert!(g.contains([1.0, 0.3]));
        assert!(!g.strictly_inside([1.0, 0.3]));
    }
}
