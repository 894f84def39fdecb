//! Dense homogeneous multivariate polynomials over an exact field.
//!
//! A `Form` stores all coefficients of one total degree in the fixed graded
//! lexicographic monomial order, so forms of the same degree share an indexing
//! and matrix slices of graded maps line up without per-call sorting.

use crate::field::{FieldSpec, Scalar};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

pub type Expo = Vec<u8>;

/// Monomial basis of the degree-`d` piece of a polynomial ring in `nvars`
/// variables, in graded lexicographic order (first variable largest).
/// Empty for d < 0.
pub fn monomial_basis(nvars: usize, d: i64) -> Vec<Expo> {
    static CACHE: Lazy<Mutex<HashMap<(usize, i64), Vec<Expo>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    if d < 0 {
        return Vec::new();
    }
    if let Some(b) = CACHE.lock().unwrap().get(&(nvars, d)) {
        return b.clone();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; nvars];
    fill(&mut out, &mut cur, 0, d as u8, nvars);
    CACHE.lock().unwrap().insert((nvars, d), out.clone());
    out
}

fn fill(out: &mut Vec<Expo>, cur: &mut Expo, var: usize, rem: u8, nvars: usize) {
    if var == nvars - 1 {
        cur[var] = rem;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for e in (0..=rem).rev() {
        cur[var] = e;
        fill(out, cur, var + 1, rem - e, nvars);
        cur[var] = 0;
    }
}

/// Index of an exponent vector in `monomial_basis(nvars, d)`.
pub fn monomial_index(nvars: usize, d: i64, expo: &[u8]) -> usize {
    let basis = monomial_basis(nvars, d);
    // Basis is in descending lex order; binary search with reversed compare.
    basis
        .binary_search_by(|probe| expo.cmp(probe.as_slice()))
        .unwrap_or_else(|_| panic!("exponent {expo:?} not of degree {d}"))
}

pub fn piece_dim(nvars: usize, d: i64) -> usize {
    if d < 0 {
        0
    } else {
        binomial(d + nvars as i64 - 1, nvars as i64 - 1) as usize
    }
}

/// C(n, k) with the convention 0 for n < k or k < 0.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

/// A homogeneous polynomial of a fixed total degree. The zero form keeps its
/// degree annotation so graded slots stay typed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form {
    pub field: FieldSpec,
    pub nvars: usize,
    pub degree: i64,
    /// Dense coefficients in `monomial_basis(nvars, degree)` order; empty
    /// exactly when degree < 0.
    pub coeffs: Vec<Scalar>,
}

impl Form {
    pub fn zero(field: FieldSpec, nvars: usize, degree: i64) -> Self {
        let n = piece_dim(nvars, degree);
        Form {
            field,
            nvars,
            degree,
            coeffs: vec![Scalar::zero(field); n],
        }
    }

    pub fn constant(field: FieldSpec, nvars: usize, c: Scalar) -> Self {
        let mut f = Form::zero(field, nvars, 0);
        f.coeffs[0] = c;
        f
    }

    pub fn one(field: FieldSpec, nvars: usize) -> Self {
        Form::constant(field, nvars, Scalar::one(field))
    }

    /// The single variable `var` as a linear form.
    pub fn variable(field: FieldSpec, nvars: usize, var: usize) -> Self {
        let mut expo = vec![0u8; nvars];
        expo[var] = 1;
        Form::monomial(field, nvars, &expo, Scalar::one(field))
    }

    pub fn monomial(field: FieldSpec, nvars: usize, expo: &[u8], c: Scalar) -> Self {
        let d: i64 = expo.iter().map(|&e| e as i64).sum();
        let mut f = Form::zero(field, nvars, d);
        let idx = monomial_index(nvars, d, expo);
        f.coeffs[idx] = c;
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Nonzero constant (degree 0) — always pivotable over a field.
    pub fn is_unit(&self) -> bool {
        self.degree == 0 && !self.is_zero()
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree, "degree mismatch in add");
        assert_eq!(self.nvars, other.nvars);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        Form { field: self.field, nvars: self.nvars, degree: self.degree, coeffs }
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        Form {
            field: self.field,
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        Form {
            field: self.field,
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Form) -> Form {
        assert_eq!(self.nvars, other.nvars);
        let d = self.degree + other.degree;
        if self.degree < 0 || other.degree < 0 {
            return Form::zero(self.field, self.nvars, d);
        }
        let mut out = Form::zero(self.field, self.nvars, d);
        let ba = monomial_basis(self.nvars, self.degree);
        let bb = monomial_basis(self.nvars, other.degree);
        for (i, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let expo: Expo = ba[i].iter().zip(&bb[j]).map(|(x, y)| x + y).collect();
                let k = monomial_index(self.nvars, d, &expo);
                out.coeffs[k] = out.coeffs[k].add(&ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Form {
        let mut acc = Form::one(self.field, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Scalar::zero(self.field);
        if self.degree < 0 {
            return acc;
        }
        let basis = monomial_basis(self.nvars, self.degree);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (v, &e) in basis[i].iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&point[v]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Substitutes each old variable by a degree-1 form (or zero) in a new
    /// ring; preserves homogeneity and the degree annotation.
    pub fn substitute_linear(&self, images: &[Form], new_nvars: usize) -> Form {
        assert_eq!(images.len(), self.nvars);
        let mut out = Form::zero(self.field, new_nvars, self.degree);
        if self.degree < 0 {
            return out;
        }
        let basis = monomial_basis(self.nvars, self.degree);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = Form::constant(self.field, new_nvars, c.clone());
            for (v, &e) in basis[i].iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[v]);
                }
            }
            // term may collapse to a lower-degree zero if an image is zero
            if term.degree == self.degree {
                out = out.add(&term);
            } else {
                assert!(term.is_zero());
            }
        }
        out
    }

    /// Leading (first nonzero in basis order) term, if any.
    fn lead(&self) -> Option<(usize, &Scalar)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    /// Exact division: `self = q * divisor` with no remainder, else `None`.
    pub fn div_exact(&self, divisor: &Form) -> Option<Form> {
        assert_eq!(self.nvars, divisor.nvars);
        if divisor.is_zero() {
            return None;
        }
        let qd = self.degree - divisor.degree;
        if self.is_zero() {
            return Some(Form::zero(self.field, self.nvars, qd.max(-1)));
        }
        if qd < 0 {
            return None;
        }
        let (dlead_idx, dlead_c) = divisor.lead().unwrap();
        let dlead = monomial_basis(self.nvars, divisor.degree)[dlead_idx].clone();
        let dlead_inv = dlead_c.inv().unwrap();
        let mut rem = self.clone();
        let mut quot = Form::zero(self.field, self.nvars, qd);
        let rbasis = monomial_basis(self.nvars, self.degree);
        while let Some((ri, rc)) = rem.lead() {
            let rexpo = &rbasis[ri];
            let mut qexpo = vec![0u8; self.nvars];
            for v in 0..self.nvars {
                if rexpo[v] < dlead[v] {
                    return None;
                }
                qexpo[v] = rexpo[v] - dlead[v];
            }
            let qc = rc.mul(&dlead_inv);
            let qterm = Form::monomial(self.field, self.nvars, &qexpo, qc);
            rem = rem.sub(&qterm.mul(divisor));
            quot = quot.add(&qterm);
        }
        Some(quot)
    }

    /// True when `self == c * other` for a nonzero scalar c.
    pub fn proportional_to(&self, other: &Form) -> bool {
        if self.degree != other.degree {
            return false;
        }
        match (self.lead(), other.lead()) {
            (None, None) => true,
            (Some((i, a)), Some((j, b))) if i == j => {
                let c = a.div(b).unwrap();
                self.sub(&other.scale(&c)).is_zero()
            }
            _ => false,
        }
    }

    pub fn render(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let basis = monomial_basis(self.nvars, self.degree);
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = c.render();
            let (sign, mag) = if let Some(rest) = coeff.strip_prefix('-') {
                ("-", rest.to_string())
            } else {
                ("+", coeff)
            };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if mag != "1" || basis[i].iter().all(|&e| e == 0) {
                factors.push(mag);
            }
            for (v, &e) in basis[i].iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[v].clone()),
                    _ => factors.push(format!("{}^{}", vars[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Parse failure with 1-based position information.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// Parses the polynomial grammar: signed integer (or `a/b`) coefficients,
/// declared variable names, `*`, `^`, `+`, `-`. The result must be
/// homogeneous; `expect_degree` types the zero polynomial.
pub fn parse_form(
    input: &str,
    field: FieldSpec,
    vars: &[String],
    expect_degree: Option<i64>,
) -> Result<Form, ParseError> {
    Parser {
        input: input.as_bytes(),
        pos: 0,
        field,
        vars,
    }
    .parse(expect_degree)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    field: FieldSpec,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        let mut line = 1;
        let mut col = 1;
        for &b in &self.input[..self.pos.min(self.input.len())] {
            if b == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        ParseError { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn parse(mut self, expect_degree: Option<i64>) -> Result<Form, ParseError> {
        let nvars = self.vars.len();
        let mut terms: Vec<(Scalar, Expo)> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let mut first = true;
        while self.pos < self.input.len() {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            let mut sign = 1i64;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    if first {
                        return Err(self.err("leading '+' not allowed"));
                    }
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ if first => {}
                _ => return Err(self.err("expected '+' or '-' between terms")),
            }
            first = false;
            let (c, expo) = self.parse_term(sign)?;
            terms.push((c, expo));
        }
        let degree = match terms.first() {
            Some((_, e)) => e.iter().map(|&x| x as i64).sum(),
            None => expect_degree.unwrap_or(0),
        };
        if terms.is_empty() && !matches!(expect_degree, Some(_)) {
            return Err(self.err("empty polynomial"));
        }
        let mut form = Form::zero(self.field, nvars, degree);
        for (c, e) in terms {
            let d: i64 = e.iter().map(|&x| x as i64).sum();
            if d != degree {
                return Err(self.err(format!(
                    "inhomogeneous polynomial: saw degrees {degree} and {d}"
                )));
            }
            let idx = monomial_index(nvars, degree, &e);
            form.coeffs[idx] = form.coeffs[idx].add(&c);
        }
        if let Some(d) = expect_degree {
            if !form.is_zero() && form.degree != d {
                return Err(self.err(format!("expected degree {d}, found {}", form.degree)));
            }
            if form.is_zero() {
                form = Form::zero(self.field, nvars, d);
            }
        }
        Ok(form)
    }

    fn parse_term(&mut self, sign: i64) -> Result<(Scalar, Expo), ParseError> {
        self.skip_ws();
        let mut coeff = Scalar::from_i64(self.field, sign);
        let mut expo = vec![0u8; self.vars.len()];
        let mut saw_factor = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let n = self.parse_int()?;
                    self.skip_ws();
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        self.skip_ws();
                        let d = self.parse_int()?;
                        let frac = Scalar::from_fraction(self.field, n, d)
                            .ok_or_else(|| self.err("zero denominator"))?;
                        coeff = coeff.mul(&frac);
                    } else {
                        coeff = coeff.mul(&Scalar::from_i64(self.field, n));
                    }
                    saw_factor = true;
                }
                Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                    let name = self.parse_ident();
                    let var = self
                        .vars
                        .iter()
                        .position(|v| *v == name)
                        .ok_or_else(|| self.err(format!("unknown variable '{name}'")))?;
                    let mut e = 1u8;
                    self.skip_ws();
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        let n = self.parse_int()?;
                        if !(0..=255).contains(&n) {
                            return Err(self.err("exponent out of range"));
                        }
                        e = n as u8;
                    }
                    expo[var] = expo[var]
                        .checked_add(e)
                        .ok_or_else(|| self.err("exponent overflow"))?;
                    saw_factor = true;
                }
                _ => return Err(self.err("expected coefficient or variable")),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                continue;
            }
            break;
        }
        if !saw_factor {
            return Err(self.err("empty term"));
        }
        Ok((coeff, expo))
    }

    fn parse_int(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|_| self.err("integer out of range"))
    }

    fn parse_ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.input.len()
            && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8(self.input[start..self.pos].to_vec()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyzw() -> Vec<String> {
        ["x", "y", "z", "w"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn basis_counts_match_binomials() {
        assert_eq!(monomial_basis(4, 2).len(), 10); // C(5,3)
        assert_eq!(monomial_basis(3, 0).len(), 1);
        assert!(monomial_basis(4, -1).is_empty());
    }

    #[test]
    fn basis_order_is_graded_lex_descending() {
        let b = monomial_basis(3, 2);
        assert_eq!(b[0], vec![2, 0, 0]);
        assert_eq!(b[1], vec![1, 1, 0]);
        assert_eq!(*b.last().unwrap(), vec![0, 0, 2]);
    }

    #[test]
    fn parse_and_render_round_trip() {
        let vars = xyzw();
        let f = parse_form("3*x^2*w - y*z", FieldSpec::Q, &vars, None).unwrap();
        assert_eq!(f.degree, 3);
        let s = f.render(&vars);
        let g = parse_form(&s, FieldSpec::Q, &vars, None).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn inhomogeneous_input_is_rejected() {
        let vars = xyzw();
        let e = parse_form("x + y*z", FieldSpec::Q, &vars, None).unwrap_err();
        assert!(e.msg.contains("inhomogeneous"));
    }

    #[test]
    fn unknown_variable_reports_position() {
        let vars = xyzw();
        let e = parse_form("x + q", FieldSpec::Q, &vars, None).unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.col >= 5);
    }

    #[test]
    fn division_is_exact_or_none() {
        let vars = xyzw();
        let w = Form::variable(FieldSpec::Q, 4, 3);
        let f = parse_form("x^2 - y*w", FieldSpec::Q, &vars, None).unwrap();
        assert!(f.div_exact(&w).is_none());
        let g = f.mul(&w);
        assert_eq!(g.div_exact(&w).unwrap(), f);
    }

    #[test]
    fn substitute_linear_into_smaller_ring() {
        // x0^2 + x1*x4 with x0 -> w, x1 -> x, x4 -> 0 gives w^2.
        let f7 = FieldSpec::Q;
        let x0 = Form::variable(f7, 7, 0);
        let x1 = Form::variable(f7, 7, 1);
        let x4 = Form::variable(f7, 7, 4);
        let q = x0.mul(&x0).add(&x1.mul(&x4));
        let zero = Form::zero(f7, 4, 1);
        let images = vec![
            Form::variable(f7, 4, 3),
            Form::variable(f7, 4, 0),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero,
        ];
        let w = Form::variable(f7, 4, 3);
        assert_eq!(q.substitute_linear(&images, 4), w.mul(&w));
    }
}
