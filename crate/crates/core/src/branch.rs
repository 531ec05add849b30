//! Sampled solution branches of the similarity ODEs.
//!
//! A [`Branch`] stores strictly ordered `(xi, U, U', U'')` nodes from an
//! adaptive integration, evaluates between nodes by two-point Hermite
//! interpolation (quintic where second derivatives are available, cubic
//! otherwise), and optionally continues past one end with the asymptotic
//! tail `U(xi) ~ U* + c1/xi + c2/xi^2` obtained from the leading balance of
//! the velocity ODE at |xi| -> infinity.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub xi: f64,
    pub u: f64,
    pub du: f64,
    /// Second derivative along the solution; NaN marks nodes (e.g. exact
    /// critical points) where only cubic data is trusted.
    pub d2u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Left,
    Right,
}

/// Asymptotic continuation `u(xi) = u_star + c1/xi + c2/xi^2`.
#[derive(Debug, Clone, Copy)]
pub struct Tail {
    pub u_star: f64,
    pub c1: f64,
    pub c2: f64,
    pub side: TailSide,
}

impl Tail {
    pub fn eval(&self, xi: f64) -> f64 {
        self.u_star + self.c1 / xi + self.c2 / (xi * xi)
    }
    pub fn eval_deriv(&self, xi: f64) -> f64 {
        -self.c1 / (xi * xi) - 2.0 * self.c2 / (xi * xi * xi)
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    nodes: Vec<Node>,
    pub tail: Option<Tail>,
}

impl Branch {
    pub fn new(nodes: Vec<Node>, tail: Option<Tail>) -> Self {
        assert!(nodes.len() >= 2, "a branch needs at least two nodes");
        debug_assert!(
            nodes.windows(2).all(|w| w[0].xi < w[1].xi),
            "branch nodes must be strictly increasing in xi"
        );
        Self { nodes, tail }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn xi_lo(&self) -> f64 {
        self.nodes[0].xi
    }

    pub fn xi_hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].xi
    }

    pub fn first(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn last(&self) -> &Node {
        &self.nodes[self.nodes.len() - 1]
    }

    fn in_tail(&self, xi: f64) -> bool {
        match self.tail {
            Some(Tail {
                side: TailSide::Left,
                ..
            }) => xi < self.xi_lo(),
            Some(Tail {
                side: TailSide::Right,
                ..
            }) => xi > self.xi_hi(),
            None => false,
        }
    }

    /// Index of the segment containing xi (clamped to the ends).
    fn segment(&self, xi: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|n| n.xi.partial_cmp(&xi).unwrap())
        {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(0) => 0,
            Err(i) if i >= self.nodes.len() => self.nodes.len() - 2,
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        if self.in_tail(xi) {
            return Ok(self.tail.unwrap().eval(xi));
        }
        self.check_domain(xi)?;
        let i = self.segment(xi);
        let (l, r) = (&self.nodes[i], &self.nodes[i + 1]);
        Ok(hermite_value(l, r, xi))
    }

    pub fn eval_deriv(&self, xi: f64) -> Result<f64> {
        if self.in_tail(xi) {
            return Ok(self.tail.unwrap().eval_deriv(xi));
        }
        self.check_domain(xi)?;
        let i = self.segment(xi);
        let (l, r) = (&self.nodes[i], &self.nodes[i + 1]);
        Ok(hermite_deriv(l, r, xi))
    }

    fn check_domain(&self, xi: f64) -> Result<()> {
        // Tolerate roundoff-level excursions past the sampled range.
        let span = self.xi_hi() - self.xi_lo();
        let slack = 1e-12 * (span + self.xi_lo().abs() + self.xi_hi().abs());
        if xi < self.xi_lo() - slack || xi > self.xi_hi() + slack {
            return Err(Error::Domain {
                xi,
                lo: self.xi_lo(),
                hi: self.xi_hi(),
            });
        }
        Ok(())
    }

    /// Max |U'(mid) - f(mid, U(mid))| over interior segment midpoints,
    /// given the ODE right-hand side. Segments adjacent to cubic-only nodes
    /// (exact critical points, where the quotient form of f is
    /// ill-conditioned) are skipped.
    pub fn max_midpoint_residual(
        &self,
        f: &mut dyn FnMut(f64, f64) -> Result<f64>,
    ) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for w in self.nodes.windows(2) {
            let (l, r) = (&w[0], &w[1]);
            if l.d2u.is_nan() || r.d2u.is_nan() {
                continue;
            }
            let mid = 0.5 * (l.xi + r.xi);
            let u = hermite_value(l, r, mid);
            let du = hermite_deriv(l, r, mid);
            let rhs = f(mid, u)?;
            worst = worst.max((du - rhs).abs());
        }
        Ok(worst)
    }
}

/// Two-point Hermite interpolation; quintic when both nodes carry second
/// derivatives, cubic otherwise.
fn hermite_value(l: &Node, r: &Node, xi: f64) -> f64 {
    let h = r.xi - l.xi;
    let t = (xi - l.xi) / h;
    if l.d2u.is_nan() || r.d2u.is_nan() {
        cubic(l.u, l.du * h, r.u, r.du * h, t)
    } else {
        quintic(
            l.u,
            l.du * h,
            l.d2u * h * h,
            r.u,
            r.du * h,
            r.d2u * h * h,
            t,
        )
    }
}

fn hermite_deriv(l: &Node, r: &Node, xi: f64) -> f64 {
    let h = r.xi - l.xi;
    let t = (xi - l.xi) / h;
    if l.d2u.is_nan() || r.d2u.is_nan() {
        cubic_deriv(l.u, l.du * h, r.u, r.du * h, t) / h
    } else {
        quintic_deriv(
            l.u,
            l.du * h,
            l.d2u * h * h,
            r.u,
            r.du * h,
            r.d2u * h * h,
            t,
        ) / h
    }
}

fn cubic(p0: f64, m0: f64, p1: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    p0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + m0 * (t3 - 2.0 * t2 + t)
        + p1 * (-2.0 * t3 + 3.0 * t2)
        + m1 * (t3 - t2)
}

fn cubic_deriv(p0: f64, m0: f64, p1: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    p0 * (6.0 * t2 - 6.0 * t)
        + m0 * (3.0 * t2 - 4.0 * t + 1.0)
        + p1 * (-6.0 * t2 + 6.0 * t)
        + m1 * (3.0 * t2 - 2.0 * t)
}

#[allow(clippy::too_many_arguments)]
fn quintic(p0: f64, m0: f64, s0: f64, p1: f64, m1: f64, s1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    p0 * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
        + m0 * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
        + s0 * 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
        + p1 * (10.0 * t3 - 15.0 * t4 + 6.0 * t5)
        + m1 * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
        + s1 * 0.5 * (t3 - 2.0 * t4 + t5)
}

#[allow(clippy::too_many_arguments)]
fn quintic_deriv(p0: f64, m0: f64, s0: f64, p1: f64, m1: f64, s1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    p0 * (-30.0 * t2 + 60.0 * t3 - 30.0 * t4)
        + m0 * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
        + s0 * 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4)
        + p1 * (30.0 * t2 - 60.0 * t3 + 30.0 * t4)
        + m1 * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
        + s1 * 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_branch(with_d2: bool) -> Branch {
        let mut nodes = Vec::new();
        let n = 40;
        for i in 0..=n {
            let x = -1.0 + 2.0 * i as f64 / n as f64;
            nodes.push(Node {
                xi: x,
                u: x.sin(),
                du: x.cos(),
                d2u: if with_d2 { -x.sin() } else { f64::NAN },
            });
        }
        Branch::new(nodes, None)
    }

    #[test]
    fn interpolant_reproduces_nodes_exactly() {
        let b = sin_branch(true);
        for n in b.nodes() {
            assert_eq!(b.eval(n.xi).unwrap(), n.u);
        }
    }

    #[test]
    fn quintic_beats_cubic_on_smooth_data() {
        let q = sin_branch(true);
        let c = sin_branch(false);
        let mut worst_q: f64 = 0.0;
        let mut worst_c: f64 = 0.0;
        for i in 0..500 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 500.0;
            worst_q = worst_q.max((q.eval(x).unwrap() - x.sin()).abs());
            worst_c = worst_c.max((c.eval(x).unwrap() - x.sin()).abs());
        }
        assert!(worst_q < 1e-12);
        assert!(worst_c < 1e-7);
        assert!(worst_q < worst_c);
    }

    #[test]
    fn tail_continuation() {
        let nodes = vec![
            Node {
                xi: 10.0,
                u: 1.0,
                du: 0.0,
                d2u: 0.0,
            },
            Node {
                xi: 20.0,
                u: 1.0,
                du: 0.0,
                d2u: 0.0,
            },
        ];
        let b = Branch::new(
            nodes,
            Some(Tail {
                u_star: 2.0,
                c1: 3.0,
                c2: 0.0,
                side: TailSide::Right,
            }),
        );
        assert!((b.eval(100.0).unwrap() - 2.03).abs() < 1e-15);
        assert!((b.eval_deriv(100.0).unwrap() + 3e-4).abs() < 1e-12);
        assert!(b.eval(5.0).is_err());
    }
}
