//! Exact group, Lie-algebra, cone, and semigroup calculus for SL(2,ℝ).
//!
//! The involution at the center of everything is τ(g) = [[d,c],[b,a]]; its
//! fixed group H is the two-component family ±h_t with
//! h_t = [[cosh t, sinh t],[sinh t, cosh t]].  On the Lie algebra, τ's
//! differential splits a traceless matrix into an 𝔥-part (multiples of
//! X₁+X₋₁) and a 𝔮-part q(r,s) = [[r,s],[−s,−r]]; the hyperbolic cone is
//! C = {q(r,s) : r ≥ 0, r ± s ≥ 0}.  The contraction semigroup S consists of
//! the elements whose Möbius action maps the interval I = (−1,1) into itself,
//! and the n̄-chart factorization g = n̄_{c/a}·p(a, b/a) supplies both the
//! ζ-coordinate on H and the |g₁₁|-character whose powers build the J-form
//! kernel downstream.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Sl2Error {
    /// The matrix handed to a constructor is not unimodular.
    #[error("matrix determinant {det} is not 1 within tolerance")]
    NotUnimodular { det: f64 },
    /// Möbius action has a pole: a + b·x = 0, the point leaves the chart.
    #[error("Möbius pole: denominator {denominator:.3e} vanishes at x = {x}")]
    Pole { x: f64, denominator: f64 },
    /// The n̄-chart factorization needs g₁₁ ≠ 0.
    #[error("g₁₁ = 0: element outside the n̄·MAN chart")]
    Chart,
    /// An element handed to `zeta` is not τ-fixed.
    #[error("element is not in H: ‖τ(g) − g‖∞ = {defect:.3e}")]
    NotTauFixed { defect: f64 },
}

/// Relative determinant tolerance enforced at construction.
pub const DET_TOL: f64 = 1e-12;

/// A real 2×2 unimodular matrix, the carrier for all SL(2,ℝ) calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    /// Construct with the determinant check ad − bc = 1 (relative 1e−12).
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Sl2Error> {
        let det = a * d - b * c;
        let scale = 1.0_f64.max((a * d).abs() + (b * c).abs());
        if (det - 1.0).abs() > DET_TOL * scale {
            return Err(Sl2Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// h_t = [[cosh t, sinh t],[sinh t, cosh t]], the identity component of H.
    pub fn h(t: f64) -> Self {
        Self { a: t.cosh(), b: t.sinh(), c: t.sinh(), d: t.cosh() }
    }

    /// Lower unipotent n̄_y = [[1,0],[y,1]].
    pub fn nbar(y: f64) -> Self {
        Self { a: 1.0, b: 0.0, c: y, d: 1.0 }
    }

    /// Upper unipotent n_x = [[1,x],[0,1]].
    pub fn n(x: f64) -> Self {
        Self { a: 1.0, b: x, c: 0.0, d: 1.0 }
    }

    /// diag(a, 1/a), a ≠ 0.
    pub fn diag(a: f64) -> Self {
        Self { a, b: 0.0, c: 0.0, d: 1.0 / a }
    }

    /// w = [[0,1],[−1,0]], the Weyl rotation implementing the Cartan
    /// involution as conjugation.
    pub fn w() -> Self {
        Self { a: 0.0, b: 1.0, c: -1.0, d: 0.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Rescale by 1/√det so the product of a long word stays unimodular.
    pub fn renormalized(&self) -> Self {
        let s = 1.0 / self.det().sqrt();
        Self { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    /// Entrywise max-norm distance.
    pub fn dist_inf(&self, rhs: &Self) -> f64 {
        (self.a - rhs.a)
            .abs()
            .max((self.b - rhs.b).abs())
            .max((self.c - rhs.c).abs())
            .max((self.d - rhs.d).abs())
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::mul(&self, &rhs)
    }
}

/// Product of a word of group elements, renormalizing the determinant every
/// 100 factors to stop float drift in long semigroup words.
pub fn product_renormalized<I: IntoIterator<Item = GroupElement>>(word: I) -> GroupElement {
    let mut acc = GroupElement::identity();
    let mut since_renorm = 0usize;
    for g in word {
        acc = acc.mul(&g);
        since_renorm += 1;
        if since_renorm >= 100 {
            acc = acc.renormalized();
            since_renorm = 0;
        }
    }
    acc
}

/// The involution τ(g) = [[d,c],[b,a]].  Involutive group homomorphism.
pub fn tau(g: &GroupElement) -> GroupElement {
    GroupElement { a: g.d, b: g.c, c: g.b, d: g.a }
}

/// Cartan involution θ(g) = inverse transpose = w g w⁻¹.
pub fn theta(g: &GroupElement) -> GroupElement {
    GroupElement { a: g.d, b: -g.c, c: -g.b, d: g.a }
}

/// Max-norm distance of g from its τ-image; `H_MEMBERSHIP_TOL` decides H.
pub fn tau_defect(g: &GroupElement) -> f64 {
    g.dist_inf(&tau(g))
}

/// Membership tolerance for the fixed group H = ±{h_t}.
pub const H_MEMBERSHIP_TOL: f64 = 1e-10;

pub fn in_h(g: &GroupElement) -> bool {
    tau_defect(g) <= H_MEMBERSHIP_TOL
}

/// A traceless 2×2 matrix [[x11, x12],[x21, −x11]] with its τ-decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieElement {
    pub x11: f64,
    pub x12: f64,
    pub x21: f64,
}

impl LieElement {
    pub fn new(x11: f64, x12: f64, x21: f64) -> Self {
        Self { x11, x12, x21 }
    }

    /// q(r,s) = [[r, s],[−s, −r]], the general element of 𝔮.
    pub fn q(r: f64, s: f64) -> Self {
        Self { x11: r, x12: s, x21: -s }
    }

    /// X⁰ = ½·q(1,0), normalized so ad X⁰ has eigenvalues 0, ±1 and
    /// a_t = exp(2tX⁰) = diag(e^t, e^{−t}).
    pub fn x0() -> Self {
        Self::q(0.5, 0.0)
    }

    /// X₁ = [[0,1],[0,0]].
    pub fn x_plus() -> Self {
        Self { x11: 0.0, x12: 1.0, x21: 0.0 }
    }

    /// X₋₁ = [[0,0],[1,0]].
    pub fn x_minus() -> Self {
        Self { x11: 0.0, x12: 0.0, x21: 1.0 }
    }

    /// H₁ = diag(1,−1).
    pub fn h1() -> Self {
        Self { x11: 1.0, x12: 0.0, x21: 0.0 }
    }

    pub fn zero() -> Self {
        Self { x11: 0.0, x12: 0.0, x21: 0.0 }
    }

    pub fn scale(&self, t: f64) -> Self {
        Self { x11: t * self.x11, x12: t * self.x12, x21: t * self.x21 }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            x11: self.x11 + rhs.x11,
            x12: self.x12 + rhs.x12,
            x21: self.x21 + rhs.x21,
        }
    }

    /// Matrix commutator [X, Y] = XY − YX (traceless again).
    pub fn bracket(&self, rhs: &Self) -> Self {
        let (p1, q1, r1) = (self.x11, self.x12, self.x21);
        let (p2, q2, r2) = (rhs.x11, rhs.x12, rhs.x21);
        // [[p1,q1],[r1,−p1]]·[[p2,q2],[r2,−p2]] − (swap)
        Self {
            x11: q1 * r2 - r1 * q2,
            x12: 2.0 * (p1 * q2 - q1 * p2),
            x21: 2.0 * (r1 * p2 - p1 * r2),
        }
    }

    /// Differential of τ: [[p,q],[r,−p]] ↦ [[−p,r],[q,p]].
    pub fn dtau(&self) -> Self {
        Self { x11: -self.x11, x12: self.x21, x21: self.x12 }
    }

    /// Split into (𝔥-part, 𝔮-part): the τ-symmetric part lands in
    /// ℝ(X₁+X₋₁), the antisymmetric part is a q(r,s); their sum restores the
    /// element exactly.
    pub fn hq_split(&self) -> (LieElement, LieElement) {
        let sym = 0.5 * (self.x12 + self.x21);
        let h_part = Self { x11: 0.0, x12: sym, x21: sym };
        let q_part = Self {
            x11: self.x11,
            x12: 0.5 * (self.x12 - self.x21),
            x21: 0.5 * (self.x21 - self.x12),
        };
        (h_part, q_part)
    }

    pub fn norm_inf(&self) -> f64 {
        self.x11.abs().max(self.x12.abs()).max(self.x21.abs())
    }
}

/// Closed-form exponential of a traceless 2×2 matrix: with Δ = x11² + x12·x21
/// (so X² = Δ·I), exp X = c₀(Δ)·I + c₁(Δ)·X where c₀ = cosh√Δ and
/// c₁ = sinh√Δ/√Δ, continued through Δ ≤ 0 by cos/sin and at Δ ≈ 0 by series.
pub fn exp_lie(x: &LieElement) -> GroupElement {
    let delta = x.x11 * x.x11 + x.x12 * x.x21;
    let (c0, c1) = if delta.abs() < 1e-8 {
        // cosh√Δ = 1 + Δ/2 + Δ²/24, sinh√Δ/√Δ = 1 + Δ/6 + Δ²/120
        (
            1.0 + delta / 2.0 + delta * delta / 24.0,
            1.0 + delta / 6.0 + delta * delta / 120.0,
        )
    } else if delta > 0.0 {
        let w = delta.sqrt();
        (w.cosh(), w.sinh() / w)
    } else {
        let w = (-delta).sqrt();
        (w.cos(), w.sin() / w)
    };
    GroupElement {
        a: c0 + c1 * x.x11,
        b: c1 * x.x12,
        c: c1 * x.x21,
        d: c0 - c1 * x.x11,
    }
}

/// Is Y in the closed hyperbolic cone C = {q(r,s) : r ≥ 0, r ± s ≥ 0}?
/// Elements with an 𝔥-component (beyond `tol`) are rejected outright.
pub fn cone_contains(y: &LieElement, tol: f64) -> bool {
    let (h_part, q_part) = y.hq_split();
    if h_part.norm_inf() > tol {
        return false;
    }
    let (r, s) = (q_part.x11, q_part.x12);
    r >= -tol && r + s >= -tol && r - s >= -tol
}

/// Möbius action g·x = (c + d·x)/(a + b·x).
pub fn point_action(g: &GroupElement, x: f64) -> Result<f64, Sl2Error> {
    let denominator = g.a + g.b * x;
    if denominator == 0.0 {
        return Err(Sl2Error::Pole { x, denominator });
    }
    Ok((g.c + g.d * x) / denominator)
}

/// Default endpoint tolerance for the semigroup membership test.
pub const SEMIGROUP_TOL: f64 = 1e-9;

/// Does g act as a contraction of the closed interval [−1,1]?  The Möbius
/// action is monotone between poles, so a pole-free action on [−1,1] maps it
/// onto the interval spanned by the endpoint images; membership in S is the
/// endpoint-image inclusion [g·(−1), g·(+1)] ⊆ [−1−tol, 1+tol].
pub fn semigroup_contains(g: &GroupElement, tol: f64) -> bool {
    // A pole sits at x = −a/b; it must not lie in [−1,1], i.e. |a| > |b|.
    if g.a.abs() <= g.b.abs() {
        return false;
    }
    let left = (g.c - g.d) / (g.a - g.b);
    let right = (g.c + g.d) / (g.a + g.b);
    let (lo, hi) = if left <= right { (left, right) } else { (right, left) };
    lo >= -1.0 - tol && hi <= 1.0 + tol
}

/// The n̄-chart factorization g = n̄_y·p(a,x) with p(a,x) = [[a, ax],[0, 1/a]]:
/// y = c/a, a = g₁₁, x = b/a.  Defined exactly when g₁₁ ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbarFactorization {
    /// N̄-coordinate.
    pub y: f64,
    /// MA-part scalar (the (1,1)-entry of the source).
    pub a: f64,
    /// N-part coordinate.
    pub x: f64,
}

impl NbarFactorization {
    /// Reassemble n̄_y·p(a,x); inverts `nbar_factor` to 1e−12.
    pub fn reassemble(&self) -> GroupElement {
        GroupElement::nbar(self.y).mul(&GroupElement {
            a: self.a,
            b: self.a * self.x,
            c: 0.0,
            d: 1.0 / self.a,
        })
    }
}

pub fn nbar_factor(g: &GroupElement) -> Result<NbarFactorization, Sl2Error> {
    if g.a == 0.0 {
        return Err(Sl2Error::Chart);
    }
    Ok(NbarFactorization { y: g.c / g.a, a: g.a, x: g.b / g.a })
}

/// The ζ-coordinate of h ∈ H: the N̄-component of the chart factorization.
/// For h_t this is tanh t, and it always lies in Ω = (−1,1); both components
/// ±h_t are accepted (the sign cancels in c/a).
pub fn zeta(h: &GroupElement) -> Result<f64, Sl2Error> {
    let defect = tau_defect(h);
    if defect > H_MEMBERSHIP_TOL {
        return Err(Sl2Error::NotTauFixed { defect });
    }
    Ok(nbar_factor(h)?.y)
}

/// The character |g₁₁|^exponent of the MA-part in the n̄-chart.  Under the
/// identification of the series parameter with the character exponent
/// (ρ = 1, spacing fixed by a_t = exp(2tX⁰) = diag(e^t, e^{−t})), powers of
/// this character give the two-point kernels used downstream.
pub fn a_nbar_character(g: &GroupElement, exponent: f64) -> Result<f64, Sl2Error> {
    if g.a == 0.0 {
        return Err(Sl2Error::Chart);
    }
    Ok(g.a.abs().powf(exponent))
}
