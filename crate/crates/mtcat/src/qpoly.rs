//! Exact rational-function arithmetic over `Q(t, D)` and cubic resolvents.
//!
//! The curve families are recorded as expression strings in two variables:
//! the parameter `t` and the twisting parameter `D`.  [`parse_expr`] turns
//! such a string into a [`RatExpr`] — a reduced fraction of integer
//! polynomials, dense in `t` with coefficients that are (small-degree)
//! integer polynomials in `D`.  Canonical form: `gcd(num, den) = 1` and the
//! leading coefficient of the denominator is positive, so two `RatExpr`s are
//! equal as rational functions iff they are structurally equal.
//!
//! The second half of the module handles monic cubics `x³ − S₁x² + S₂x − S₃`
//! over `Q`: discriminants, resultants, the "companion" cubics attached to a
//! pair of cyclic cubics (whose roots are the diagonal products of the two
//! root triples, for the two compatible orientations), and a split-type
//! comparison of splitting fields modulo many primes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Z = BigInt;
pub type Q = BigRational;

/// Errors from expression parsing and cubic arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QPolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("evaluation hit a pole (denominator vanished)")]
    Pole,
    #[error("cubic is reducible over Q")]
    ReducibleCubic,
    #[error("cubic discriminant is not a nonzero rational square")]
    NonSquareDiscriminant,
}

// ---------------------------------------------------------------------------
// generic dense polynomials over a GCD ring
// ---------------------------------------------------------------------------

/// Coefficient ring with enough structure for fraction-free polynomial gcds.
/// (Method names are prefixed to avoid clashing with `num_traits` and
/// inherent methods on concrete coefficient types.)
pub trait RingElem: Clone + PartialEq + fmt::Debug {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn ring_add(&self, o: &Self) -> Self;
    fn ring_sub(&self, o: &Self) -> Self;
    fn ring_mul(&self, o: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// A gcd, normalized so it is not "negative".
    fn ring_gcd(&self, o: &Self) -> Self;
    /// Exact division, `None` if `o` does not divide `self`.
    fn ring_exact_div(&self, o: &Self) -> Option<Self>
    where
        Self: Sized;
    /// Sign normalization hook: for integers the usual sign, for
    /// polynomials the sign of the leading coefficient.
    fn ring_is_negative(&self) -> bool;
}

impl RingElem for Z {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_add(&self, o: &Self) -> Self {
        self + o
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn ring_exact_div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            return None;
        }
        let (q, r) = self.div_rem(o);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
    fn ring_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Dense univariate polynomial over `R`; no trailing zeros (empty = 0).
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<R: RingElem>(Vec<R>);

impl<R: RingElem> Poly<R> {
    pub fn from_coeffs(mut c: Vec<R>) -> Self {
        while c.last().is_some_and(|x| x.ring_is_zero()) {
            c.pop();
        }
        Poly(c)
    }
    pub fn zero() -> Self {
        Poly(Vec::new())
    }
    pub fn constant(c: R) -> Self {
        Poly::from_coeffs(vec![c])
    }
    pub fn one() -> Self {
        Poly::constant(R::ring_one())
    }
    pub fn x() -> Self {
        Poly::from_coeffs(vec![R::ring_zero(), R::ring_one()])
    }
    pub fn coeffs(&self) -> &[R] {
        &self.0
    }
    pub fn coeff(&self, i: usize) -> R {
        self.0.get(i).cloned().unwrap_or_else(R::ring_zero)
    }
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }
    pub fn lead(&self) -> R {
        self.0.last().cloned().unwrap_or_else(R::ring_zero)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i).ring_add(&o.coeff(i))).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i).ring_sub(&o.coeff(i))).collect())
    }
    pub fn neg(&self) -> Self {
        Poly(self.0.iter().map(|c| c.ring_neg()).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![R::ring_zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.ring_is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].ring_add(&a.ring_mul(b));
            }
        }
        Poly::from_coeffs(out)
    }
    pub fn mul_scalar(&self, c: &R) -> Self {
        Poly::from_coeffs(self.0.iter().map(|a| a.ring_mul(c)).collect())
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    /// gcd of the coefficients.
    pub fn content(&self) -> R {
        let mut g = R::ring_zero();
        for c in &self.0 {
            g = g.ring_gcd(c);
        }
        g
    }
    pub fn primitive_part(&self) -> Self {
        if self.0.is_empty() {
            return Poly::zero();
        }
        let c = self.content();
        Poly(self.0.iter().map(|a| a.ring_exact_div(&c).expect("content divides")).collect())
    }
    /// Pseudo-remainder: `lc(g)^(deg f − deg g + 1) f = q g + r`.
    fn pseudo_rem(&self, g: &Self) -> Self {
        let dg = g.degree().expect("pseudo_rem by zero");
        let lg = g.lead();
        let mut f = self.clone();
        while let Some(df) = f.degree() {
            if df < dg {
                break;
            }
            let lf = f.lead();
            // f <- lg * f − lf * x^(df−dg) * g
            let shifted = {
                let mut c = vec![R::ring_zero(); df - dg];
                c.extend(g.0.iter().cloned());
                Poly::from_coeffs(c)
            };
            f = f.mul_scalar(&lg).sub(&shifted.mul_scalar(&lf));
            debug_assert!(f.degree().map_or(true, |d| d < df));
        }
        f
    }
    /// Polynomial gcd via the primitive pseudo-remainder sequence.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.0.is_empty() {
            return o.normalize_sign();
        }
        if o.0.is_empty() {
            return self.normalize_sign();
        }
        let cg = self.content().ring_gcd(&o.content());
        let mut f = self.primitive_part();
        let mut g = o.primitive_part();
        if f.degree() < g.degree() {
            std::mem::swap(&mut f, &mut g);
        }
        while !g.0.is_empty() {
            let r = f.pseudo_rem(&g);
            f = g;
            g = if r.0.is_empty() { Poly::zero() } else { r.primitive_part() };
        }
        f.primitive_part().normalize_sign().mul_scalar(&cg)
    }
    /// Exact division when `o | self`; `None` otherwise.
    pub fn exact_div(&self, o: &Self) -> Option<Self> {
        if o.0.is_empty() {
            return None;
        }
        if self.0.is_empty() {
            return Some(Poly::zero());
        }
        let (dn, dd) = (self.degree()?, o.degree().unwrap());
        if dn < dd {
            return None;
        }
        let mut rem = self.clone();
        let mut q = vec![R::ring_zero(); dn - dd + 1];
        let lo = o.lead();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                return None;
            }
            let c = rem.lead().ring_exact_div(&lo)?;
            q[dr - dd] = c.clone();
            let mut sub = vec![R::ring_zero(); dr - dd];
            sub.extend(o.0.iter().map(|a| a.ring_mul(&c)));
            rem = rem.sub(&Poly::from_coeffs(sub));
            if rem.0.is_empty() {
                break;
            }
        }
        if rem.0.is_empty() {
            Some(Poly::from_coeffs(q))
        } else {
            None
        }
    }
    fn normalize_sign(&self) -> Self {
        if self.ring_is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
    /// Evaluate by Horner with a caller-supplied coefficient map.
    pub fn eval_with<T, F>(&self, x: &T, lift: F, zero: T, mul: impl Fn(&T, &T) -> T, add: impl Fn(&T, &T) -> T) -> T
    where
        F: Fn(&R) -> T,
    {
        let mut acc = zero;
        for c in self.0.iter().rev() {
            acc = add(&mul(&acc, x), &lift(c));
        }
        acc
    }
}

impl<R: RingElem> RingElem for Poly<R> {
    fn ring_zero() -> Self {
        Poly::zero()
    }
    fn ring_one() -> Self {
        Poly::one()
    }
    fn ring_is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn ring_add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn ring_sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn ring_neg(&self) -> Self {
        Poly::neg(self)
    }
    fn ring_gcd(&self, o: &Self) -> Self {
        Poly::gcd(self, o)
    }
    fn ring_exact_div(&self, o: &Self) -> Option<Self> {
        Poly::exact_div(self, o)
    }
    fn ring_is_negative(&self) -> bool {
        self.0.last().is_some_and(|c| c.ring_is_negative())
    }
}

/// Integer polynomial in `D`.
pub type PolyD = Poly<Z>;
/// Integer polynomial in `t` whose coefficients are polynomials in `D`.
pub type PolyTD = Poly<PolyD>;

// ---------------------------------------------------------------------------
// rational expressions in Q(t, D)
// ---------------------------------------------------------------------------

/// A reduced fraction of integer polynomials in `t` and `D`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatExpr {
    num: PolyTD,
    den: PolyTD,
}

impl RatExpr {
    fn make(num: PolyTD, den: PolyTD) -> Result<Self, QPolyError> {
        if den.ring_is_zero() {
            return Err(QPolyError::DivisionByZero);
        }
        if num.ring_is_zero() {
            return Ok(RatExpr { num: PolyTD::zero(), den: PolyTD::one() });
        }
        let g = num.gcd(&den);
        let mut num = num.exact_div(&g).expect("gcd divides");
        let mut den = den.exact_div(&g).expect("gcd divides");
        if den.ring_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(RatExpr { num, den })
    }

    pub fn zero() -> Self {
        RatExpr { num: PolyTD::zero(), den: PolyTD::one() }
    }
    pub fn from_int(n: i64) -> Self {
        RatExpr { num: PolyTD::constant(PolyD::constant(Z::from(n))), den: PolyTD::one() }
    }
    pub fn from_bigint(n: Z) -> Self {
        RatExpr { num: PolyTD::constant(PolyD::constant(n)), den: PolyTD::one() }
    }
    pub fn from_rational(q: &Q) -> Self {
        RatExpr {
            num: PolyTD::constant(PolyD::constant(q.numer().clone())),
            den: PolyTD::constant(PolyD::constant(q.denom().clone())),
        }
    }
    /// The variable `t`.
    pub fn var_t() -> Self {
        RatExpr { num: PolyTD::x(), den: PolyTD::one() }
    }
    /// The variable `D`.
    pub fn var_d() -> Self {
        RatExpr { num: PolyTD::constant(PolyD::x()), den: PolyTD::one() }
    }

    pub fn numerator(&self) -> &PolyTD {
        &self.num
    }
    pub fn denominator(&self) -> &PolyTD {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.ring_is_zero()
    }
    /// Whether the expression mentions `D`.
    pub fn depends_on_d(&self) -> bool {
        let dep = |p: &PolyTD| p.coeffs().iter().any(|c| c.degree().unwrap_or(0) > 0);
        dep(&self.num) || dep(&self.den)
    }

    pub fn add(&self, o: &Self) -> Self {
        RatExpr::make(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .expect("nonzero denominators")
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        RatExpr { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        RatExpr::make(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }
    pub fn div(&self, o: &Self) -> Result<Self, QPolyError> {
        RatExpr::make(self.num.mul(&o.den), self.den.mul(&o.num))
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RatExpr::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate at `t = t0`, `D = d0`; errors on a pole.
    pub fn eval(&self, t0: &Q, d0: &Q) -> Result<Q, QPolyError> {
        let ev = |p: &PolyTD| -> Q {
            p.eval_with(
                t0,
                |cd: &PolyD| {
                    cd.eval_with(
                        d0,
                        |z: &Z| Q::from_integer(z.clone()),
                        Q::zero(),
                        |a, b| a * b,
                        |a, b| a + b,
                    )
                },
                Q::zero(),
                |a, b| a * b,
                |a, b| a + b,
            )
        };
        let dv = ev(&self.den);
        if dv.is_zero() {
            return Err(QPolyError::Pole);
        }
        Ok(ev(&self.num) / dv)
    }

    /// Substitute `t := inner` into `self`.  (`D` is left alone, so the
    /// outer expression may be a pure function of `t` or mention `D` too.)
    pub fn compose(&self, inner: &RatExpr) -> Result<RatExpr, QPolyError> {
        let eval_poly = |p: &PolyTD| -> RatExpr {
            let mut acc = RatExpr::zero();
            for c in p.coeffs().iter().rev() {
                let cd = RatExpr {
                    num: PolyTD::constant(c.clone()),
                    den: PolyTD::one(),
                };
                acc = acc.mul(inner).add(&cd);
            }
            acc
        };
        eval_poly(&self.num).div(&eval_poly(&self.den))
    }

    /// Exact equality of rational functions (cross-multiplied, so it does
    /// not rely on the canonical form).
    pub fn identity_eq(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

/// Structural identity check between two expressions.
pub fn identity_check(lhs: &RatExpr, rhs: &RatExpr) -> bool {
    lhs.identity_eq(rhs)
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn poly_d(p: &PolyD, out: &mut String) {
            let mut first = true;
            for (i, c) in p.coeffs().iter().enumerate().rev() {
                if Zero::is_zero(c) {
                    continue;
                }
                if !first && !Signed::is_negative(c) {
                    out.push('+');
                }
                first = false;
                let show_coeff = !c.is_one() || i == 0;
                if c == &Z::from(-1) && i > 0 {
                    out.push('-');
                } else if show_coeff {
                    out.push_str(&c.to_string());
                    if i > 0 {
                        out.push('*');
                    }
                }
                if i >= 1 {
                    out.push('D');
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
            if first {
                out.push('0');
            }
        }
        fn poly_td(p: &PolyTD) -> String {
            let mut out = String::new();
            let mut first = true;
            for (i, c) in p.coeffs().iter().enumerate().rev() {
                if c.ring_is_zero() {
                    continue;
                }
                let mono = c.degree() == Some(0) || c.coeffs().iter().filter(|z| !Zero::is_zero(*z)).count() == 1;
                let mut cs = String::new();
                poly_d(c, &mut cs);
                if !first && !cs.starts_with('-') {
                    out.push('+');
                }
                first = false;
                if i == 0 {
                    out.push_str(&cs);
                } else if cs == "1" {
                    // bare power of t
                } else if cs == "-1" {
                    out.push('-');
                } else if mono {
                    out.push_str(&cs);
                    out.push('*');
                } else {
                    out.push('(');
                    out.push_str(&cs);
                    out.push_str(")*");
                }
                if i >= 1 {
                    out.push('t');
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
            if first {
                out.push('0');
            }
            out
        }
        if self.den == PolyTD::one() {
            write!(f, "{}", poly_td(&self.num))
        } else {
            write!(f, "({})/({})", poly_td(&self.num), poly_td(&self.den))
        }
    }
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, QPolyError> {
        Err(QPolyError::SyntaxError { pos: self.pos, msg: msg.to_string() })
    }
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }
    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    // expr := ['-'] term (('+' | '-') term)*
    fn expr(&mut self) -> Result<RatExpr, QPolyError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.bump();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<RatExpr, QPolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := base ('^' uint)?
    fn factor(&mut self) -> Result<RatExpr, QPolyError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    // base := int | 't' | 'D' | '(' expr ')'
    fn base(&mut self) -> Result<RatExpr, QPolyError> {
        match self.peek() {
            Some(b't') => {
                self.bump();
                Ok(RatExpr::var_t())
            }
            Some(b'D') => {
                self.bump();
                Ok(RatExpr::var_d())
            }
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(RatExpr::from_bigint(s.parse::<Z>().unwrap()))
            }
            _ => self.err("expected integer, 't', 'D' or '('"),
        }
    }

    fn uint(&mut self) -> Result<u32, QPolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected exponent");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| QPolyError::SyntaxError { pos: start, msg: "exponent overflow".into() })
    }
}

/// Parse an expression in `t` and `D` into canonical [`RatExpr`] form.
///
/// Grammar: `expr := ['-'] term (('+'|'-') term)*`,
/// `term := factor (('*'|'/') factor)*`, `factor := base ('^' uint)?`,
/// `base := int | 't' | 'D' | '(' expr ')'`.
pub fn parse_expr(src: &str) -> Result<RatExpr, QPolyError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// univariate rational polynomials (for resultants and division polynomials)
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over `Q`.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly(Vec<Q>);

impl UniPoly {
    pub fn from_coeffs(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UniPoly(c)
    }
    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }
    pub fn one() -> Self {
        UniPoly(vec![Q::one()])
    }
    pub fn constant(c: Q) -> Self {
        UniPoly::from_coeffs(vec![c])
    }
    pub fn x() -> Self {
        UniPoly(vec![Q::zero(), Q::one()])
    }
    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }
    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
    pub fn neg(&self) -> Self {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
    pub fn mul_scalar(&self, c: &Q) -> Self {
        UniPoly::from_coeffs(self.0.iter().map(|a| a * c).collect())
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
    /// Division with remainder over the field `Q`.
    pub fn divmod(&self, o: &Self) -> (Self, Self) {
        let dd = o.degree().expect("division by zero polynomial");
        let lo = o.lead();
        let mut rem = self.clone();
        let mut q: Vec<Q> = Vec::new();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let c = rem.lead() / &lo;
            if q.len() < dr - dd + 1 {
                q.resize(dr - dd + 1, Q::zero());
            }
            q[dr - dd] = c.clone();
            let mut sub = vec![Q::zero(); dr - dd];
            sub.extend(o.0.iter().map(|a| a * &c));
            rem = rem.sub(&UniPoly::from_coeffs(sub));
        }
        (UniPoly::from_coeffs(q), rem)
    }
    /// Whether `o` divides `self` exactly.
    pub fn divides(&self, o: &Self) -> bool {
        if self.is_zero() {
            return true;
        }
        if o.is_zero() {
            return false;
        }
        self.divmod(o).1.is_zero()
    }
    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::from_coeffs(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Q::from_integer(Z::from(i as i64 + 1)))
                .collect(),
        )
    }
}

/// Resultant of two univariate polynomials over `Q` (Sylvester determinant
/// by Gaussian elimination).
pub fn resultant(f: &UniPoly, g: &UniPoly) -> Q {
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return Q::zero();
    };
    if df == 0 && dg == 0 {
        return Q::one();
    }
    let n = df + dg;
    let mut mat = vec![vec![Q::zero(); n]; n];
    for i in 0..dg {
        for j in 0..=df {
            mat[i][i + j] = f.coeff(df - j);
        }
    }
    for i in 0..df {
        for j in 0..=dg {
            mat[dg + i][i + j] = g.coeff(dg - j);
        }
    }
    // determinant by fraction elimination
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            mat.swap(piv, col);
            det = -det;
        }
        let p = mat[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &p;
            for c in col..n {
                let sub = &mat[col][c] * &factor;
                mat[r][c] -= sub;
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// integer factorization helpers (for squarefree parts and root tests)
// ---------------------------------------------------------------------------

fn is_probable_prime(n: &Z) -> bool {
    if n < &Z::from(2) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let pz = Z::from(p);
        if n == &pz {
            return true;
        }
        if (n % &pz).is_zero() {
            return false;
        }
    }
    let n1: Z = n - 1;
    let s = n1.trailing_zeros().unwrap_or(0) as usize;
    let d = &n1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = Z::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&Z::from(2), n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &Z) -> Z {
    let mut c = Z::one();
    loop {
        let mut x = Z::from(2);
        let mut y = Z::from(2);
        let mut d = Z::one();
        let f = |v: &Z| (v * v + &c) % n;
        let mut steps = 0u64;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = Integer::gcd(&(&x - &y).abs(), n);
            steps += 1;
            if steps > 1 << 22 {
                break;
            }
        }
        if !d.is_one() && &d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `|n|` (Pollard rho after trial division).
pub fn factor_bigint(n: &Z) -> Vec<(Z, u32)> {
    let mut n = n.abs();
    let mut out: std::collections::BTreeMap<Z, u32> = Default::default();
    if n.is_zero() || n.is_one() {
        return Vec::new();
    }
    let mut p = Z::from(2);
    while &p * &p <= n && p < Z::from(100_000) {
        while (&n % &p).is_zero() {
            *out.entry(p.clone()).or_insert(0) += 1;
            n /= &p;
        }
        p += 1;
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let d = pollard_rho(&m);
            stack.push(&m / &d);
            stack.push(d);
        }
    }
    out.into_iter().collect()
}

/// The squarefree integer `s` with `q ≡ s mod (Q^×)²`; `0` for `q = 0`.
pub fn squarefree_part(q: &Q) -> Z {
    if q.is_zero() {
        return Z::zero();
    }
    let nd = q.numer() * q.denom();
    let sign = if Signed::is_negative(&nd) { -Z::one() } else { Z::one() };
    let mut s = Z::one();
    for (p, e) in factor_bigint(&nd) {
        if e % 2 == 1 {
            s *= p;
        }
    }
    s * sign
}

/// If `q` is a square in `Q`, its nonnegative square root.
pub fn rational_sqrt(q: &Q) -> Option<Q> {
    if Signed::is_negative(q) {
        return None;
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &(&ns * &ns) == q.numer() && &(&ds * &ds) == q.denom() {
        Some(Q::new(ns, ds))
    } else {
        None
    }
}

/// All rational roots of a nonzero univariate polynomial.
///
/// A root `a/b` in lowest terms has `a` dividing the constant and `b`
/// dividing the leading coefficient of the cleared-denominator form, but
/// those may be far too large to factor.  Instead the roots are found
/// modulo a prime `p` not dividing the leading coefficient (of the
/// squarefree part), Hensel-lifted by Newton iteration until the modulus
/// exceeds `2·|const|·|lead|`, and rationally reconstructed; every
/// candidate is then verified by exact evaluation, so the result is
/// provably complete and correct.
pub fn rational_roots(f: &UniPoly) -> Vec<Q> {
    let Some(_) = f.degree() else { return Vec::new() };
    // clear denominators
    let mut lcm = Z::one();
    for c in f.coeffs() {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    let ints: Vec<Z> = f.coeffs().iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut roots = Vec::new();
    // strip powers of x
    let k = ints.iter().position(|c| !c.is_zero()).unwrap();
    if k > 0 {
        roots.push(Q::zero());
    }
    let stripped = UniPoly::from_coeffs(ints[k..].iter().map(|c| Q::from_integer(c.clone())).collect());
    if stripped.degree() == Some(0) {
        return roots;
    }
    // squarefree part (rational roots are preserved; Newton lifting needs
    // simple roots)
    let sqf = {
        let d = stripped.derivative();
        let g = unipoly_gcd(&stripped, &d);
        stripped.divmod(&g).0
    };
    let mut lcm2 = Z::one();
    for c in sqf.coeffs() {
        lcm2 = num_integer::Integer::lcm(&lcm2, c.denom());
    }
    let g: Vec<Z> = sqf.coeffs().iter().map(|c| c.numer() * (&lcm2 / c.denom())).collect();
    let lead = g.last().unwrap().clone();
    let constant = g[0].clone();
    let bound = Z::from(2) * constant.abs() * lead.abs();

    // pick a prime where the reduction stays squarefree of full degree
    let mut p = 99991u64;
    'prime: loop {
        p = next_prime(p);
        let pm = Z::from(p);
        if lead.is_multiple_of(&pm) {
            continue;
        }
        let gm: Vec<u64> = g.iter().map(|c| zmod_u64(c, p)).collect();
        let dm = modpoly_derivative(&gm, p);
        if modpoly_gcd_degree(&gm, &dm, p) != 0 {
            continue 'prime;
        }
        // roots mod p by scanning
        let mut mod_roots = Vec::new();
        for r in 0..p {
            if modpoly_eval(&gm, r, p) == 0 {
                mod_roots.push(r);
            }
        }
        // Newton-lift each and rationally reconstruct
        let gq = UniPoly::from_coeffs(g.iter().map(|c| Q::from_integer(c.clone())).collect());
        let gint = g.clone();
        let dint: Vec<Z> = (1..gint.len()).map(|i| &gint[i] * Z::from(i as u64)).collect();
        for r0 in mod_roots {
            let mut modulus = Z::from(p);
            let mut r = Z::from(r0);
            while modulus <= bound {
                let m2 = &modulus * &modulus;
                let fr = eval_int_poly_mod(&gint, &r, &m2);
                let dr = eval_int_poly_mod(&dint, &r, &m2);
                let Some(inv) = mod_inverse(&dr, &m2) else { break };
                r = (&r - fr * inv).mod_floor(&m2);
                modulus = m2;
            }
            if let Some(cand) = rational_reconstruct(&r, &modulus, &constant.abs(), &lead.abs()) {
                if gq.eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
        roots.sort();
        return roots;
    }
}

/// Monic gcd of two rational polynomials by the Euclidean algorithm.
fn unipoly_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.divmod(&b).1;
        a = b;
        b = r;
    }
    if let Some(_) = a.degree() {
        let lead = a.lead();
        a = a.mul_scalar(&(Q::one() / lead));
    }
    a
}

fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    loop {
        let mut is_p = c > 1;
        let mut d = 2;
        while d * d <= c {
            if c % d == 0 {
                is_p = false;
                break;
            }
            d += 1;
        }
        if is_p {
            return c;
        }
        c += 1;
    }
}

fn zmod_u64(z: &Z, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    z.mod_floor(&Z::from(p)).to_u64().unwrap()
}

fn modpoly_eval(c: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u128;
    for ci in c.iter().rev() {
        acc = (acc * x as u128 + *ci as u128) % p as u128;
    }
    acc as u64
}

fn modpoly_derivative(c: &[u64], p: u64) -> Vec<u64> {
    (1..c.len()).map(|i| ((c[i] as u128 * i as u128) % p as u128) as u64).collect()
}

/// Degree of `gcd(a, b)` in `F_p[x]` (0 if coprime or either is constant
/// nonzero).
fn modpoly_gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let inv = |x: u64| -> u64 {
        // Fermat
        let mut base = x as u128;
        let mut e = p - 2;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        acc as u64
    };
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let linv = inv(*b.last().unwrap()) as u128;
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let coef = (*a.last().unwrap() as u128 * linv) % p as u128;
            for i in 0..b.len() {
                let sub = (b[i] as u128 * coef) % p as u128;
                let idx = shift + i;
                a[idx] = ((a[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
        trim(&mut b);
    }
    a.len().saturating_sub(1)
}

fn eval_int_poly_mod(c: &[Z], x: &Z, m: &Z) -> Z {
    let mut acc = Z::zero();
    for ci in c.iter().rev() {
        acc = (acc * x + ci).mod_floor(m);
    }
    acc
}

fn mod_inverse(a: &Z, m: &Z) -> Option<Z> {
    let e = num_integer::Integer::extended_gcd(&a.mod_floor(m), m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Find `a/b` with `|a| ≤ num_bound`, `0 < b ≤ den_bound`, `a ≡ r·b mod m`;
/// unique when `m > 2·num_bound·den_bound`.
fn rational_reconstruct(r: &Z, m: &Z, num_bound: &Z, den_bound: &Z) -> Option<Q> {
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (Z::zero(), Z::one());
    while r1.abs() > *num_bound {
        if r1.is_zero() {
            return None;
        }
        let q = num_integer::Integer::div_floor(&r0, &r1);
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > *den_bound {
        return None;
    }
    Some(Q::new(r1, t1))
}

// ---------------------------------------------------------------------------
// cubics
// ---------------------------------------------------------------------------

/// The monic cubic `x³ − S₁x² + S₂x − S₃`.
#[derive(Clone, PartialEq, Debug)]
pub struct Cubic {
    pub s1: Q,
    pub s2: Q,
    pub s3: Q,
}

/// Verdict of the mod-`p` splitting-field comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitVerdict {
    /// Split types agreed at ≥ 50 good primes.
    Same { agreements: u32 },
    /// First good prime where the split types differ.
    Distinct { p: u64 },
    /// Not enough good primes below the bound.
    Inconclusive { agreements: u32 },
}

impl Cubic {
    pub fn new(s1: Q, s2: Q, s3: Q) -> Self {
        Cubic { s1, s2, s3 }
    }
    /// From `x³ + ax² + bx + c`.
    pub fn from_monic_coeffs(a: Q, b: Q, c: Q) -> Self {
        Cubic { s1: -a, s2: b, s3: -c }
    }
    pub fn to_unipoly(&self) -> UniPoly {
        UniPoly::from_coeffs(vec![-self.s3.clone(), self.s2.clone(), -self.s1.clone(), Q::one()])
    }
    pub fn eval(&self, x: &Q) -> Q {
        ((x - &self.s1) * x + &self.s2) * x - &self.s3
    }
    /// Discriminant `S₁²S₂² − 4S₂³ − 4S₁³S₃ + 18S₁S₂S₃ − 27S₃²`.
    pub fn disc(&self) -> Q {
        let (s1, s2, s3) = (&self.s1, &self.s2, &self.s3);
        s1 * s1 * s2 * s2 - Q::from_integer(4.into()) * s2 * s2 * s2
            - Q::from_integer(4.into()) * s1 * s1 * s1 * s3
            + Q::from_integer(18.into()) * s1 * s2 * s3
            - Q::from_integer(27.into()) * s3 * s3
    }

    /// Whether the cubic has a rational root (equivalently, is reducible).
    pub fn has_rational_root(&self) -> bool {
        // scale x = y / L to a monic integer cubic in y; rational roots of
        // the original are integer divisors of the constant term here
        let l = Q::from_integer(
            self.s1.denom().lcm(self.s2.denom()).lcm(self.s3.denom()),
        );
        let a = -(&self.s1 * &l);
        let b = &self.s2 * &l * &l;
        let c = -(&self.s3 * &l * &l * &l);
        debug_assert!(a.is_integer() && b.is_integer() && c.is_integer());
        let (a, b, c) = (a.to_integer(), b.to_integer(), c.to_integer());
        let g = |y: &Z| ((y + &a) * y + &b) * y + &c;
        if c.is_zero() {
            return true;
        }
        let mut divs: Vec<Z> = vec![Z::one()];
        for (p, e) in factor_bigint(&c) {
            let mut next = Vec::new();
            for d in &divs {
                let mut pk = Z::one();
                for _ in 0..=e {
                    next.push(d * &pk);
                    pk *= &p;
                }
            }
            divs = next;
        }
        divs.iter().any(|d| g(d).is_zero() || g(&-d).is_zero())
    }

    /// Number of roots mod an odd prime `p` (`None` if a coefficient has
    /// a `p` in its denominator).
    pub fn roots_mod_p(&self, p: u64) -> Option<u64> {
        let pz = Z::from(p);
        let red = |q: &Q| -> Option<u64> {
            use num_traits::ToPrimitive;
            let d = q.denom().mod_floor(&pz);
            if d.is_zero() {
                return None;
            }
            let di = crate::modarith::inv_mod(d.to_u64().unwrap(), p)?;
            let n = q.numer().mod_floor(&pz).to_u64().unwrap();
            Some(n * di % p)
        };
        let (a, b, c) = (red(&self.s1)?, red(&self.s2)?, red(&self.s3)?);
        let mut count = 0;
        for x in 0..p {
            // x³ − a x² + b x − c mod p
            let v = ((x * x % p) * x % p + (p - a) * (x * x % p) % p + b * x % p + (p - c)) % p;
            if v == 0 {
                count += 1;
            }
        }
        Some(count)
    }
}

/// The two companion cubics of a pair of cyclic cubics `f_S`, `f_T` (both
/// irreducible with square discriminant).  Their roots are the sums
/// `Σᵢ αᵢ β_{i+k}` of products of the two root triples, for the two cyclic
/// orientations; in symmetric functions, with `δ = √Δ_S √Δ_T`:
///
/// ```text
/// R₁  = S₁T₁
/// R₂  = S₁²T₂ + S₂T₁² − 3S₂T₂
/// R₃  = S₁³T₃ + S₃T₁³ + (S₁S₂T₁T₂ − 9S₁S₂T₃ − 9S₃T₁T₂ + 27S₃T₃ ± δ)/2
/// ```
pub fn companion_cubics(fs: &Cubic, ft: &Cubic) -> Result<(Cubic, Cubic), QPolyError> {
    if fs.has_rational_root() || ft.has_rational_root() {
        return Err(QPolyError::ReducibleCubic);
    }
    let ds = rational_sqrt(&fs.disc()).ok_or(QPolyError::NonSquareDiscriminant)?;
    let dt = rational_sqrt(&ft.disc()).ok_or(QPolyError::NonSquareDiscriminant)?;
    if ds.is_zero() || dt.is_zero() {
        return Err(QPolyError::NonSquareDiscriminant);
    }
    let (s1, s2, s3) = (&fs.s1, &fs.s2, &fs.s3);
    let (t1, t2, t3) = (&ft.s1, &ft.s2, &ft.s3);
    let nine = Q::from_integer(9.into());
    let r1 = s1 * t1;
    let r2 = s1 * s1 * t2 + s2 * t1 * t1 - Q::from_integer(3.into()) * s2 * t2;
    let base = s1 * s1 * s1 * t3
        + s3 * t1 * t1 * t1
        + (s1 * s2 * t1 * t2 - &nine * s1 * s2 * t3 - &nine * s3 * t1 * t2
            + Q::from_integer(27.into()) * s3 * t3)
            / Q::from_integer(2.into());
    let half_delta = &ds * &dt / Q::from_integer(2.into());
    let r3_plus = &base + &half_delta;
    let r3_minus = &base - &half_delta;
    Ok((
        Cubic::new(r1.clone(), r2.clone(), r3_plus),
        Cubic::new(r1, r2, r3_minus),
    ))
}

/// Compare the splitting fields of two cyclic cubics by their split types
/// modulo good primes up to `bound`.  Cyclic cubics split completely or stay
/// irreducible mod a good prime, so the root counts are 3 or 0; fields are
/// declared the same after 50 agreeing good primes, distinct at the first
/// disagreement.
pub fn same_splitting_field(
    fs: &Cubic,
    ft: &Cubic,
    bound: u64,
) -> Result<SplitVerdict, QPolyError> {
    if fs.has_rational_root() || ft.has_rational_root() {
        return Err(QPolyError::ReducibleCubic);
    }
    for f in [fs, ft] {
        let d = f.disc();
        if d.is_zero() || rational_sqrt(&d).is_none() {
            return Err(QPolyError::NonSquareDiscriminant);
        }
    }
    let bad = |p: u64| -> bool {
        let pz = Z::from(p);
        for f in [fs, ft] {
            let d = f.disc();
            if (d.numer().mod_floor(&pz)).is_zero() || (d.denom().mod_floor(&pz)).is_zero() {
                return true;
            }
        }
        false
    };
    let mut agreements = 0u32;
    let mut p = 3u64;
    while p <= bound {
        if crate::modarith::factorize(p).len() == 1 && crate::modarith::factorize(p)[0].1 == 1 && !bad(p) {
            if let (Some(a), Some(b)) = (fs.roots_mod_p(p), ft.roots_mod_p(p)) {
                debug_assert!(a == 0 || a == 3);
                debug_assert!(b == 0 || b == 3);
                if a != b {
                    return Ok(SplitVerdict::Distinct { p });
                }
                agreements += 1;
                if agreements >= 50 {
                    return Ok(SplitVerdict::Same { agreements });
                }
            }
        }
        p += 2;
    }
    Ok(SplitVerdict::Inconclusive { agreements })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(Z::from(n))
    }
    fn qr(n: i64, d: i64) -> Q {
        Q::new(Z::from(n), Z::from(d))
    }

    #[test]
    fn rational_roots_basic() {
        // 6x³ + x² − x = x(3x − 1)(2x + 1): roots 0, 1/3, −1/2
        let f = UniPoly::from_coeffs(vec![q(0), q(-1), q(1), q(6)]);
        assert_eq!(rational_roots(&f), vec![qr(-1, 2), q(0), qr(1, 3)]);
        // (x − 51)(x + 21)(x² + 1): only the two rational roots
        let f2 = UniPoly::from_coeffs(vec![q(-51), q(1)])
            .mul(&UniPoly::from_coeffs(vec![q(21), q(1)]))
            .mul(&UniPoly::from_coeffs(vec![q(1), q(0), q(1)]));
        assert_eq!(rational_roots(&f2), vec![q(-21), q(51)]);
        // no rational roots; fractional coefficients are cleared
        let f3 = UniPoly::from_coeffs(vec![qr(1, 3), q(0), qr(1, 7)]);
        assert!(rational_roots(&f3).is_empty());
        assert!(rational_roots(&UniPoly::constant(q(5))).is_empty());
    }

    #[test]
    fn parse_and_canonical_form() {
        let a = parse_expr("(t^2-1)/(t-1)").unwrap();
        let b = parse_expr("t+1").unwrap();
        assert_eq!(a, b);
        // denominator sign normalization
        let c = parse_expr("1/(-t)").unwrap();
        let d = parse_expr("-1/t").unwrap();
        assert_eq!(c, d);
        // unary minus only at expression head or after '('
        assert!(parse_expr("-t^2").is_ok());
        assert!(parse_expr("3*(-t+1)").is_ok());
        assert!(parse_expr("3*-t").is_err());
        assert!(parse_expr("t+").is_err());
        assert!(parse_expr("(t").is_err());
        assert!(matches!(parse_expr("1/0"), Err(QPolyError::DivisionByZero)));
        assert!(matches!(parse_expr("1/(t-t)"), Err(QPolyError::DivisionByZero)));
    }

    #[test]
    fn eval_and_pole() {
        let e = parse_expr("27*(t+1)*(t+9)^3/t^3").unwrap();
        // hand-computed: t=1 ↦ 27·2·1000 = 54000
        assert_eq!(e.eval(&q(1), &q(1)).unwrap(), q(54000));
        assert_eq!(e.eval(&q(0), &q(1)), Err(QPolyError::Pole));
        let f = parse_expr("D^2*t/(D-1)").unwrap();
        assert!(f.depends_on_d());
        assert_eq!(f.eval(&q(3), &q(2)).unwrap(), q(12));
        assert_eq!(f.eval(&q(3), &q(1)), Err(QPolyError::Pole));
        assert!(!e.depends_on_d());
    }

    #[test]
    fn compose_substitution() {
        // (t^2 at t := 1/(1+t)) == 1/(1+t)^2
        let outer = parse_expr("t^2").unwrap();
        let inner = parse_expr("1/(1+t)").unwrap();
        let expect = parse_expr("1/(t^2+2*t+1)").unwrap();
        assert!(identity_check(&outer.compose(&inner).unwrap(), &expect));
    }

    #[test]
    fn identity_check_cross_multiplies() {
        let a = parse_expr("(2*t+2)/2").unwrap();
        let b = parse_expr("t+1").unwrap();
        assert!(identity_check(&a, &b));
        assert!(!identity_check(&a, &parse_expr("t").unwrap()));
    }

    #[test]
    fn display_roundtrip() {
        for src in ["(27*t^3+1)/(t^2-18*t-27)", "-2*D*t^4+D^2", "t", "0", "(t+1)/(t+2)"] {
            let e = parse_expr(src).unwrap();
            let back = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, back, "{src} -> {e}");
        }
    }

    #[test]
    fn resultant_oracle() {
        // res(x²−1, x²−4) = 9 (product of g at roots of f: (1−4)(1−4) = 9)
        let f = UniPoly::from_coeffs(vec![q(-1), q(0), q(1)]);
        let g = UniPoly::from_coeffs(vec![q(-4), q(0), q(1)]);
        assert_eq!(resultant(&f, &g), q(9));
        // res(x−2, x³−8) = 0 (shared root)
        let f = UniPoly::from_coeffs(vec![q(-2), q(1)]);
        let g = UniPoly::from_coeffs(vec![q(-8), q(0), q(0), q(1)]);
        assert_eq!(resultant(&f, &g), q(0));
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(&q(12)), Z::from(3));
        assert_eq!(squarefree_part(&q(-18)), Z::from(-2));
        assert_eq!(squarefree_part(&qr(2, 9)), Z::from(2));
        assert_eq!(squarefree_part(&qr(3, 4)), Z::from(3));
        assert_eq!(squarefree_part(&qr(-8, 3)), Z::from(-6));
        assert_eq!(squarefree_part(&q(0)), Z::from(0));
        // a larger composite: 2^3·3·101·97² / 5
        let v = qr(8 * 3 * 101 * 97 * 97, 5);
        assert_eq!(squarefree_part(&v), Z::from(2 * 3 * 101 * 5));
    }

    #[test]
    fn cubic_disc_and_reducibility() {
        // x³ − 1 = (x−1)(x²+x+1): reducible
        let f = Cubic::from_monic_coeffs(q(0), q(0), q(-1));
        assert!(f.has_rational_root());
        // x³ − 2: irreducible, disc = −108
        let g = Cubic::from_monic_coeffs(q(0), q(0), q(-2));
        assert!(!g.has_rational_root());
        assert_eq!(g.disc(), q(-108));
        // x³ + x² − 2x − 1: cyclic, disc = 49
        let h = Cubic::from_monic_coeffs(q(1), q(-2), q(-1));
        assert_eq!(h.disc(), q(49));
        assert!(!h.has_rational_root());
    }

    #[test]
    fn companion_cubic_oracle() {
        // hand-checked: fS = x³+x²−2x−1 (√Δ = 7), fT = x³−3x−1 (√Δ = 9)
        // give companions x³−21x−35 and x³−21x+28 with discs 63², 126²
        let fs = Cubic::from_monic_coeffs(q(1), q(-2), q(-1));
        let ft = Cubic::from_monic_coeffs(q(0), q(-3), q(-1));
        let (fr, fr2) = companion_cubics(&fs, &ft).unwrap();
        assert_eq!(fr, Cubic::from_monic_coeffs(q(0), q(-21), q(-35)));
        assert_eq!(fr2, Cubic::from_monic_coeffs(q(0), q(-21), q(28)));
        assert_eq!(fr.disc(), q(63 * 63));
        assert_eq!(fr2.disc(), q(126 * 126));
        // reducible input is rejected
        let red = Cubic::from_monic_coeffs(q(0), q(0), q(-1));
        assert_eq!(companion_cubics(&red, &ft), Err(QPolyError::ReducibleCubic));
        // non-square discriminant is rejected
        let ns = Cubic::from_monic_coeffs(q(0), q(0), q(-2));
        assert_eq!(companion_cubics(&fs, &ns), Err(QPolyError::NonSquareDiscriminant));
    }

    #[test]
    fn splitting_field_comparison() {
        let fs = Cubic::from_monic_coeffs(q(1), q(-2), q(-1)); // conductor-7 cyclic field
        let ft = Cubic::from_monic_coeffs(q(0), q(-3), q(-1)); // conductor-9 cyclic field
        assert_eq!(same_splitting_field(&fs, &fs, 1000).unwrap(), SplitVerdict::Same { agreements: 50 });
        assert!(matches!(
            same_splitting_field(&fs, &ft, 1000).unwrap(),
            SplitVerdict::Distinct { .. }
        ));
        assert!(matches!(
            same_splitting_field(&fs, &ft, 0).unwrap(),
            SplitVerdict::Inconclusive { agreements: 0 }
        ));
    }

    #[test]
    fn unipoly_division() {
        // (x³−1) / (x−1) = x²+x+1 exactly
        let f = UniPoly::from_coeffs(vec![q(-1), q(0), q(0), q(1)]);
        let g = UniPoly::from_coeffs(vec![q(-1), q(1)]);
        let (quo, rem) = f.divmod(&g);
        assert!(rem.is_zero());
        assert_eq!(quo, UniPoly::from_coeffs(vec![q(1), q(1), q(1)]));
        assert!(f.divides(&g));
        assert!(!f.divides(&UniPoly::from_coeffs(vec![q(1), q(1)])));
    }
}
