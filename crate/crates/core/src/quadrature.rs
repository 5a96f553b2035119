//! Quadrature rules on reference triangles and unit edges.
//!
//! Triangle rules store barycentric points with weights summing to 1; an
//! integral over a physical triangle is `area * Σ w_q f(λ_q)`. Edge rules store
//! parameter points in [0, 1] with weights summing to 1; an integral over a
//! physical edge is `length * Σ w_q f(t_q)`.

/// Symmetric quadrature rule on the reference triangle, in barycentric
/// coordinates. Weights sum to 1 (the rule is normalized by the element area).
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
}

impl TriangleRule {
    /// Three-point edge-midpoint rule, exact for quadratics. The midpoints are
    /// the Crouzeix–Raviart nodes, which makes the element mass matrix diagonal.
    pub fn midpoint() -> Self {
        TriangleRule {
            points: vec![
                [0.5, 0.5, 0.0],
                [0.0, 0.5, 0.5],
                [0.5, 0.0, 0.5],
            ],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Six-point symmetric rule, exact for quartics. Used for error integrals
    /// against smooth exact solutions.
    pub fn degree4() -> Self {
        let a = 0.445948490915965;
        let b = 0.091576213509771;
        let wa = 0.223381589678011;
        let wb = 0.109951743655322;
        let perms = |c: f64| {
            let d = 1.0 - 2.0 * c;
            [[c, c, d], [c, d, c], [d, c, c]]
        };
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for p in perms(a) {
            points.push(p);
            weights.push(wa);
        }
        for p in perms(b) {
            points.push(p);
            weights.push(wb);
        }
        TriangleRule {
            points,
            weights,
            degree: 4,
        }
    }

    /// Integrate `f` (given in barycentric coordinates) over a triangle of the
    /// given area.
    pub fn integrate(&self, area: f64, mut f: impl FnMut([f64; 3]) -> f64) -> f64 {
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc += w * f(*p);
        }
        area * acc
    }
}

/// Gauss–Legendre rule on the unit interval [0, 1]. Weights sum to 1.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly (2n − 1 for n points).
    pub degree: usize,
}

impl EdgeRule {
    /// Two-point rule, exact for cubics. The default for face means and
    /// contact-face integrands.
    pub fn two_point() -> Self {
        let d = 0.5 / f64::sqrt(3.0);
        EdgeRule {
            points: vec![0.5 - d, 0.5 + d],
            weights: vec![0.5, 0.5],
            degree: 3,
        }
    }

    /// n-point Gauss–Legendre rule generated by Newton iteration on the
    /// Legendre polynomial; nodes are returned in increasing order.
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-type initial guess for the i-th root in (-1, 1).
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map from [-1, 1] to [0, 1]; the cosine guesses enumerate roots in
            // decreasing x, so this ordering is increasing in t.
            points[i] = 0.5 * (1.0 - x);
            weights[i] = 0.5 * w;
        }
        EdgeRule {
            points,
            weights,
            degree: 2 * n - 1,
        }
    }

    /// Integrate `f` (given in the [0, 1] parameter) over an edge of the given
    /// length.
    pub fn integrate(&self, length: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (t, w) in self.points.iter().zip(&self.weights) {
            acc += w * f(*t);
        }
        length * acc
    }
}

/// Legendre polynomial P_n and its derivative at x, by the three-term
/// recurrence. Valid for |x| < 1, where the Gauss nodes live.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}
