//! Polynomials in `(z1, conj z1, z2, conj z2)` with exact Wirtinger
//! derivatives. Real-valued defining functions are [`HermitianPoly`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::projective::{HomVec, Point2, ProjMap, C};

/// Exponents `(p1, q1, p2, q2)` of `z1^p1 conj(z1)^q1 z2^p2 conj(z2)^q2`.
pub type Exponents = [u32; 4];

/// A complex polynomial in `z1, conj z1, z2, conj z2`, kept in canonical
/// form: terms sorted by exponent, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Exponents, C>,
}

/// Differentiation variable for [`wirtinger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    Z1,
    Z2,
    Zbar1,
    Zbar2,
}

impl Wirtinger {
    fn slot(self) -> usize {
        match self {
            Wirtinger::Z1 => 0,
            Wirtinger::Zbar1 => 1,
            Wirtinger::Z2 => 2,
            Wirtinger::Zbar2 => 3,
        }
    }

    pub fn holomorphic(index: usize) -> Self {
        [Wirtinger::Z1, Wirtinger::Z2][index]
    }

    pub fn antiholomorphic(index: usize) -> Self {
        [Wirtinger::Zbar1, Wirtinger::Zbar2][index]
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn monomial(exp: Exponents, coeff: C) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    /// `z_index` (index 0 or 1).
    pub fn var(index: usize) -> Self {
        let mut e = [0; 4];
        e[2 * index] = 1;
        Self::monomial(e, C::new(1.0, 0.0))
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponents, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: Exponents, coeff: C) {
        let entry = self.terms.entry(exp).or_insert(C::new(0.0, 0.0));
        *entry += coeff;
        if *entry == C::new(0.0, 0.0) {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponents) -> C {
        self.terms.get(exp).copied().unwrap_or(C::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::new(0.0, 0.0)),
            1 => self.terms.get(&[0; 4]).copied(),
            _ => None,
        }
    }

    /// Largest holomorphic degree `p1 + p2` over all terms.
    pub fn holomorphic_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[2]).max().unwrap_or(0)
    }

    pub fn antiholomorphic_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[1] + e[3]).max().unwrap_or(0)
    }

    /// True when no conjugate variables occur.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|e| e[1] == 0 && e[3] == 0)
    }

    pub fn eval(&self, z: &Point2) -> C {
        let zb = [z[0].conj(), z[1].conj()];
        self.terms
            .iter()
            .map(|(e, c)| {
                c * pow(z[0], e[0]) * pow(zb[0], e[1]) * pow(z[1], e[2]) * pow(zb[1], e[3])
            })
            .sum()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Poly {
        let mut out = Poly::constant(C::new(1.0, 0.0));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Complex conjugate polynomial: swaps `z` and `conj z` exponents.
    pub fn conj(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| ([e[1], e[0], e[3], e[2]], c.conj())),
        )
    }

    pub fn derivative(&self, var: Wirtinger) -> Poly {
        let slot = var.slot();
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| e[slot] > 0)
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[slot] -= 1;
                    (e2, c * e[slot] as f64)
                }),
        )
    }

    /// Largest `|c - conj(c')|` over mirrored term pairs.
    fn hermitian_defect(&self) -> Option<(Exponents, C, Exponents, C)> {
        let scale = self.terms.values().map(|c| c.norm()).fold(1.0, f64::max);
        for (e, c) in &self.terms {
            let mirror = [e[1], e[0], e[3], e[2]];
            let mc = self.coeff(&mirror);
            if (c - mc.conj()).norm() > 1e-12 * scale {
                return Some((*e, *c, mirror, mc));
            }
        }
        None
    }

    /// Substitute `z_i -> lin[i]` (holomorphic polynomials) and the conjugate
    /// variables by their conjugates.
    fn substitute_linear(&self, hom: &[Poly; 3], degree: u32) -> Poly {
        let conj: Vec<Poly> = hom.iter().map(|p| p.conj()).collect();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let p0 = degree - e[0] - e[2];
            let q0 = degree - e[1] - e[3];
            let term = hom[0]
                .powi(p0)
                .mul(&hom[1].powi(e[0]))
                .mul(&hom[2].powi(e[2]))
                .mul(&conj[0].powi(q0))
                .mul(&conj[1].powi(e[1]))
                .mul(&conj[2].powi(e[3]));
            out = out.add(&term.scale(*c));
        }
        out
    }
}

fn pow(z: C, n: u32) -> C {
    match n {
        0 => C::new(1.0, 0.0),
        1 => z,
        2 => z * z,
        _ => z.powi(n as i32),
    }
}

/// Exact Wirtinger derivative.
pub fn wirtinger(p: &Poly, which: Wirtinger) -> Poly {
    p.derivative(which)
}

fn format_real(x: f64) -> String {
    format!("{x}")
}

fn format_monomial(e: &Exponents) -> Vec<String> {
    let names = ["z1", "conj(z1)", "z2", "conj(z2)"];
    // Holomorphic then conjugate factor per variable.
    let order = [0usize, 1, 2, 3];
    order
        .iter()
        .filter(|&&i| e[i] > 0)
        .map(|&i| {
            if e[i] == 1 {
                names[i].to_string()
            } else {
                format!("{}^{}", names[i], e[i])
            }
        })
        .collect()
}

impl fmt::Display for Poly {
    /// Canonical text form, accepted back by [`parse_poly`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let factors = format_monomial(e);
            let (negative, coeff_text) = if c.im == 0.0 {
                let neg = c.re < 0.0;
                let mag = c.re.abs();
                let text = if mag == 1.0 && !factors.is_empty() {
                    None
                } else {
                    Some(format_real(mag))
                };
                (neg, text)
            } else {
                (
                    false,
                    Some(format!("({},{})", format_real(c.re), format_real(c.im))),
                )
            };
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if let Some(t) = coeff_text {
                parts.push(t);
            }
            parts.extend(factors);
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// A real-valued polynomial defining function with cached first and second
/// Wirtinger derivatives.
#[derive(Debug, Clone)]
pub struct HermitianPoly {
    poly: Poly,
    /// `ρ_{z_k}`
    dz: [Poly; 2],
    /// `ρ_{z_k z_l}`
    dzz: [[Poly; 2]; 2],
    /// `ρ_{z_k conj(z_j)}`, indexed `[k][j]`.
    dzzb: [[Poly; 2]; 2],
}

impl PartialEq for HermitianPoly {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl fmt::Display for HermitianPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl HermitianPoly {
    pub fn new(poly: Poly) -> Result<Self> {
        if let Some((e, c, m, mc)) = poly.hermitian_defect() {
            return Err(Error::NotHermitian {
                term: format_monomial(&e).join("*"),
                coeff: format!("{c}"),
                mirror: format_monomial(&m).join("*"),
                mirror_coeff: format!("{mc}"),
            });
        }
        let dz = [0, 1].map(|k| poly.derivative(Wirtinger::holomorphic(k)));
        let dzz = [0, 1].map(|k| [0, 1].map(|l| dz[k].derivative(Wirtinger::holomorphic(l))));
        let dzzb = [0, 1].map(|k| [0, 1].map(|j| dz[k].derivative(Wirtinger::antiholomorphic(j))));
        Ok(Self {
            poly,
            dz,
            dzz,
            dzzb,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_poly(text)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Real value; the imaginary part vanishes up to rounding.
    pub fn eval(&self, z: &Point2) -> f64 {
        self.poly.eval(z).re
    }

    pub fn eval_complex(&self, z: &Point2) -> C {
        self.poly.eval(z)
    }

    /// `∂ρ = (ρ_{z1}, ρ_{z2})`.
    pub fn gradient(&self, z: &Point2) -> Point2 {
        [self.dz[0].eval(z), self.dz[1].eval(z)]
    }

    /// Complex Hessian `ρ_{z_k conj(z_j)}` indexed `[k][j]`.
    pub fn levi_matrix(&self, z: &Point2) -> [[C; 2]; 2] {
        [0, 1].map(|k| [0, 1].map(|j| self.dzzb[k][j].eval(z)))
    }

    /// Holomorphic Hessian `ρ_{z_k z_l}`.
    pub fn holomorphic_hessian(&self, z: &Point2) -> [[C; 2]; 2] {
        [0, 1].map(|k| [0, 1].map(|l| self.dzz[k][l].eval(z)))
    }

    /// Real differential `dρ(v) = 2 Re Σ ρ_{z_k} v_k`.
    pub fn real_differential(&self, z: &Point2, v: &Point2) -> f64 {
        let g = self.gradient(z);
        2.0 * (g[0] * v[0] + g[1] * v[1]).re
    }

    /// Euclidean gradient of `ρ` on `R^4 = C^2`, written as `2 conj(∂ρ)`.
    pub fn real_gradient(&self, z: &Point2) -> Point2 {
        let g = self.gradient(z);
        [g[0].conj() * 2.0, g[1].conj() * 2.0]
    }

    /// Derivative of `∂ρ` along a real tangent vector `v`:
    /// `Σ_l ρ_{z_k z_l} v_l + ρ_{z_k conj(z_l)} conj(v_l)`.
    pub fn gradient_derivative(&self, z: &Point2, v: &Point2) -> Point2 {
        let h = self.holomorphic_hessian(z);
        let l = self.levi_matrix(z);
        [0, 1].map(|k| {
            h[k][0] * v[0] + h[k][1] * v[1] + l[k][0] * v[0].conj() + l[k][1] * v[1].conj()
        })
    }

    /// Pull the zero set back by `T^{-1}`: returns `ρ'` with
    /// `ρ'(w) = |Z0(w)|^{2d} ρ(T^{-1} w)`, `Z = M^{-1} [1 : w]`, a positive
    /// multiple of `ρ ∘ T^{-1}`. `degree` must be at least the polynomial's
    /// holomorphic degree.
    pub fn transformed(&self, t: &ProjMap, degree: u32) -> Result<HermitianPoly> {
        let d = self
            .poly
            .holomorphic_degree()
            .max(self.poly.antiholomorphic_degree());
        if degree < d {
            return Err(Error::InvalidParameter(format!(
                "homogenization degree {degree} below polynomial degree {d}"
            )));
        }
        let inv = t.inverse();
        let m = inv.matrix();
        let hom: [Poly; 3] = [0, 1, 2].map(|i| {
            Poly::constant(m[(i, 0)])
                .add(&Poly::var(0).scale(m[(i, 1)]))
                .add(&Poly::var(1).scale(m[(i, 2)]))
        });
        let out = self.poly.substitute_linear(&hom, degree);
        // Rounding can leave tiny non-Hermitian residue; symmetrize.
        let sym = out.add(&out.conj()).scale(C::new(0.5, 0.0));
        HermitianPoly::new(sym)
    }
}

/// Hyperplane `[-⟨∂ρ, z⟩ : ∂ρ]` of the maximal complex subspace at `z`.
pub fn gradient_hyperplane(rho: &HermitianPoly, z: &Point2) -> Result<HomVec> {
    let g = rho.gradient(z);
    let norm = (g[0].norm_sqr() + g[1].norm_sqr()).sqrt();
    if norm <= 1e-14 {
        return Err(Error::DegenerateGradient { norm });
    }
    HomVec::hyperplane([-(g[0] * z[0] + g[1] * z[1]), g[0], g[1]])
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("invalid number `{s}`"),
                })?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(C::new(-1.0, 0.0)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n >= 0.0 && n.fract() == 0.0 && n <= 64.0 => {
                    self.pos += 1;
                    Ok(base.powi(n as u32))
                }
                _ => self.err("exponent must be a non-negative integer"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Poly::constant(C::new(v, 0.0)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "z1" => Ok(Poly::var(0)),
                    "z2" => Ok(Poly::var(1)),
                    "conj" | "abs2" => {
                        self.expect(Tok::LParen)?;
                        let inner = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(if name == "conj" {
                            inner.conj()
                        } else {
                            inner.mul(&inner.conj())
                        })
                    }
                    other => {
                        self.pos -= 1;
                        self.err(format!("unknown identifier `{other}`"))
                    }
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.expr()?;
                if self.peek() == Some(&Tok::Comma) {
                    let comma_at = self.offset();
                    self.pos += 1;
                    let second = self.expr()?;
                    self.expect(Tok::RParen)?;
                    match (first.as_constant(), second.as_constant()) {
                        (Some(re), Some(im)) if re.im == 0.0 && im.im == 0.0 => {
                            Ok(Poly::constant(C::new(re.re, im.re)))
                        }
                        _ => Err(Error::Parse {
                            pos: comma_at,
                            msg: "complex literal needs real constant parts".into(),
                        }),
                    }
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(first)
                }
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a general (not necessarily real) polynomial expression.
pub fn parse_expression(text: &str) -> Result<Poly> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(poly)
}

/// Parse a real-valued defining function; non-Hermitian input is rejected.
pub fn parse_poly(text: &str) -> Result<HermitianPoly> {
    HermitianPoly::new(parse_expression(text)?)
}
