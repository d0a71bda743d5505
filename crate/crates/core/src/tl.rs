//! Temperley-Lieb diagrams with loop value `delta` and exact rational
//! coefficients.
//!
//! A diagram of shape `(a, b)` has `a` upper endpoints (outputs, numbered
//! `0..a` left to right) and `b` lower endpoints (inputs, numbered `a..a+b`
//! left to right). `compose(f, g)` stacks `f` on top of `g`, so it is the
//! operator product `f g`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{shape, Error, Result};
use crate::qnum::chebyshev;

/// A noncrossing perfect matching of the `top + bottom` endpoints, stored as
/// the partner of every endpoint.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Pairing {
    top: u8,
    bottom: u8,
    partner: Box<[u8]>,
}

impl Pairing {
    pub fn from_pairs(top: usize, bottom: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let len = top + bottom;
        if len % 2 == 1 || len > 254 {
            return Err(Error::InvalidArgument(format!("bad endpoint count {top}+{bottom}")));
        }
        let mut partner = vec![u8::MAX; len];
        for &(x, y) in pairs {
            if x >= len || y >= len || x == y || partner[x] != u8::MAX || partner[y] != u8::MAX {
                return Err(Error::InvalidArgument(format!("invalid pair ({x}, {y})")));
            }
            partner[x] = y as u8;
            partner[y] = x as u8;
        }
        if partner.iter().any(|&p| p == u8::MAX) {
            return Err(Error::InvalidArgument("matching is not perfect".into()));
        }
        let p = Self { top: top as u8, bottom: bottom as u8, partner: partner.into() };
        if !p.is_planar() {
            return Err(Error::InvalidArgument(format!("crossing pairs {pairs:?}")));
        }
        Ok(p)
    }

    fn from_partner(top: usize, bottom: usize, partner: Vec<u8>) -> Self {
        Self { top: top as u8, bottom: bottom as u8, partner: partner.into() }
    }

    pub fn identity(k: usize) -> Self {
        let mut partner = vec![0u8; 2 * k];
        for i in 0..k {
            partner[i] = (k + i) as u8;
            partner[k + i] = i as u8;
        }
        Self::from_partner(k, k, partner)
    }

    pub fn top(&self) -> usize {
        self.top as usize
    }

    pub fn bottom(&self) -> usize {
        self.bottom as usize
    }

    pub fn partner(&self, x: usize) -> usize {
        self.partner[x] as usize
    }

    /// Sorted list of pairs `(min, max)`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&x| x < self.partner(x))
            .map(|x| (x, self.partner(x)))
            .collect()
    }

    fn to_circle(&self, x: usize) -> usize {
        let (a, b) = (self.top(), self.bottom());
        if x < a {
            x
        } else {
            a + b - 1 - (x - a)
        }
    }

    fn from_circle(top: usize, bottom: usize, c: usize) -> usize {
        if c < top {
            c
        } else {
            top + (top + bottom - 1 - c)
        }
    }

    fn is_planar(&self) -> bool {
        let len = self.partner.len();
        let mut circ = vec![0usize; len];
        for x in 0..len {
            circ[self.to_circle(x)] = self.to_circle(self.partner(x));
        }
        let mut stack = Vec::new();
        for (c, &p) in circ.iter().enumerate() {
            if p > c {
                stack.push(c);
            } else if stack.pop() != Some(p) {
                return false;
            }
        }
        true
    }

    /// All planar pairings of the given shape, in sorted order.
    pub fn all(top: usize, bottom: usize) -> Vec<Self> {
        let len = top + bottom;
        if len % 2 == 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut circ = vec![usize::MAX; len];
        enumerate_circle(&mut circ, 0, &mut |circ| {
            let mut partner = vec![0u8; len];
            for c in 0..len {
                partner[Self::from_circle(top, bottom, c)] =
                    Self::from_circle(top, bottom, circ[c]) as u8;
            }
            out.push(Self::from_partner(top, bottom, partner));
        });
        out.sort();
        out
    }

    /// Stacks `self` (shape `(a, b)`) on top of `other` (shape `(b, c)`);
    /// returns the resulting pairing and the number of closed loops.
    pub fn compose(&self, other: &Self) -> (Self, usize) {
        let (a, b, c) = (self.top(), self.bottom(), other.bottom());
        debug_assert_eq!(b, other.top());
        let mut partner = vec![0u8; a + c];
        let mut seen = vec![false; b];
        // walk from an outer endpoint through the middle until another one
        let walk = |mut in_upper: bool, mut x: usize, seen: &mut Vec<bool>| -> usize {
            loop {
                if in_upper {
                    let p = self.partner(x);
                    if p < a {
                        return p;
                    }
                    seen[p - a] = true;
                    x = p - a;
                    in_upper = false;
                } else {
                    let p = other.partner(x);
                    if p >= b {
                        return a + (p - b);
                    }
                    seen[p] = true;
                    x = a + p;
                    in_upper = true;
                }
            }
        };
        for i in 0..a {
            let end = walk(true, i, &mut seen);
            partner[i] = end as u8;
        }
        for j in 0..c {
            let end = walk(false, b + j, &mut seen);
            partner[a + j] = end as u8;
        }
        let mut loops = 0;
        for j in 0..b {
            if seen[j] {
                continue;
            }
            loops += 1;
            let mut x = j;
            loop {
                seen[x] = true;
                let y = self.partner(a + x) - a;
                seen[y] = true;
                x = other.partner(y);
                if x == j {
                    break;
                }
            }
        }
        (Self::from_partner(a, c, partner), loops)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.top(), self.bottom());
        let (c, d) = (other.top(), other.bottom());
        let top = a + c;
        let map_l = |x: usize| if x < a { x } else { top + (x - a) };
        let map_r = |x: usize| if x < c { a + x } else { top + b + (x - c) };
        let mut partner = vec![0u8; a + b + c + d];
        for x in 0..a + b {
            partner[map_l(x)] = map_l(self.partner(x)) as u8;
        }
        for x in 0..c + d {
            partner[map_r(x)] = map_r(other.partner(x)) as u8;
        }
        Self::from_partner(top, b + d, partner)
    }

    /// Number of loops after joining upper endpoint `i` to lower endpoint `i`.
    pub fn closure_loops(&self) -> usize {
        let k = self.top();
        debug_assert_eq!(k, self.bottom());
        let mut seen = vec![false; 2 * k];
        let mut loops = 0;
        for start in 0..2 * k {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut x = start;
            loop {
                seen[x] = true;
                let y = self.partner(x);
                seen[y] = true;
                x = if y < k { y + k } else { y - k };
                if x == start {
                    break;
                }
            }
        }
        loops
    }
}

fn enumerate_circle(circ: &mut [usize], start: usize, emit: &mut dyn FnMut(&[usize])) {
    let len = circ.len();
    let first = (start..len).find(|&c| circ[c] == usize::MAX);
    let Some(first) = first else {
        emit(circ);
        return;
    };
    // pair `first` inside the arc enclosing it, leaving an even gap
    let bound = (first + 1..len).find(|&c| circ[c] != usize::MAX).unwrap_or(len);
    for j in (first + 1..bound).step_by(2) {
        circ[first] = j;
        circ[j] = first;
        enumerate_circle(circ, first + 1, emit);
        circ[first] = usize::MAX;
        circ[j] = usize::MAX;
    }
}

/// A linear combination of diagrams of a fixed shape.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TLElement {
    top: usize,
    bottom: usize,
    delta: i64,
    terms: BTreeMap<Pairing, BigRational>,
}

impl TLElement {
    pub fn zero(top: usize, bottom: usize, delta: i64) -> Self {
        Self { top, bottom, delta, terms: BTreeMap::new() }
    }

    pub fn from_pairing(p: Pairing, delta: i64) -> Self {
        let mut x = Self::zero(p.top(), p.bottom(), delta);
        x.terms.insert(p, BigRational::one());
        x
    }

    pub fn identity(k: usize, delta: i64) -> Self {
        Self::from_pairing(Pairing::identity(k), delta)
    }

    /// The cup-cap generator `e_i` on `k` strands, `1 <= i < k`.
    pub fn e(i: usize, k: usize, delta: i64) -> Result<Self> {
        if i == 0 || i >= k {
            return Err(Error::InvalidArgument(format!("e_{i} needs 1 <= i < k = {k}")));
        }
        let mut pairs: Vec<(usize, usize)> = (0..k)
            .filter(|&s| s != i - 1 && s != i)
            .map(|s| (s, k + s))
            .collect();
        pairs.push((i - 1, i));
        pairs.push((k + i - 1, k + i));
        Ok(Self::from_pairing(Pairing::from_pairs(k, k, &pairs)?, delta))
    }

    /// The cup `T_1`: no inputs, two outputs.
    pub fn cup(delta: i64) -> Self {
        Self::from_pairing(Pairing::from_partner(2, 0, vec![1, 0]), delta)
    }

    /// The cap `T_1^*`: two inputs, no outputs.
    pub fn cap(delta: i64) -> Self {
        Self::from_pairing(Pairing::from_partner(0, 2, vec![1, 0]), delta)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.top, self.bottom)
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pairing, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &Pairing) -> BigRational {
        self.terms.get(p).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, p: Pairing, c: BigRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(p) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() || self.delta != other.delta {
            return Err(shape(
                format!("{:?} at delta {}", self.shape(), self.delta),
                format!("{:?} at delta {}", other.shape(), other.delta),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.top, self.bottom, self.delta);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect();
        }
        out
    }

    /// Operator product `self ∘ other`, i.e. `self` stacked on top of `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.bottom != other.top || self.delta != other.delta {
            return Err(shape(
                format!("inner shape {} at delta {}", self.bottom, self.delta),
                format!("{} at delta {}", other.top, other.delta),
            ));
        }
        let (lf, nf) = integer_coefficients(self);
        let (lg, ng) = integer_coefficients(other);
        let max_loops = self.bottom / 2 + 1;
        let delta = BigInt::from(self.delta);
        let mut powers = vec![BigInt::one()];
        for i in 0..max_loops {
            let next = &powers[i] * &delta;
            powers.push(next);
        }
        let mut acc: HashMap<Pairing, BigInt> = HashMap::new();
        for (pf, cf) in &nf {
            for (pg, cg) in &ng {
                let (p, loops) = pf.compose(pg);
                let c = cf * cg * &powers[loops];
                *acc.entry(p).or_insert_with(BigInt::zero) += c;
            }
        }
        let denom = lf * lg;
        let mut out = Self::zero(self.top, other.bottom, self.delta);
        for (p, c) in acc {
            if !c.is_zero() {
                out.terms.insert(p, BigRational::new(c, denom.clone()));
            }
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.delta != other.delta {
            return Err(shape(format!("delta {}", self.delta), format!("delta {}", other.delta)));
        }
        let mut out = Self::zero(self.top + other.top, self.bottom + other.bottom, self.delta);
        for (p, c) in &self.terms {
            for (r, d) in &other.terms {
                out.add_term(p.tensor(r), c * d);
            }
        }
        Ok(out)
    }

    pub fn markov_trace(&self) -> Result<BigRational> {
        if self.top != self.bottom {
            return Err(shape("square shape", format!("{:?}", self.shape())));
        }
        let delta = BigRational::from_integer(BigInt::from(self.delta));
        let mut total = BigRational::zero();
        for (p, c) in &self.terms {
            total += c * num_traits::pow(delta.clone(), p.closure_loops());
        }
        Ok(total)
    }
}

/// Common denominator and integer numerators of the coefficients.
fn integer_coefficients(x: &TLElement) -> (BigInt, Vec<(&Pairing, BigInt)>) {
    let l = x.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let nums = x.terms.iter().map(|(p, c)| (p, c.numer() * (&l / c.denom()))).collect();
    (l, nums)
}

impl fmt::Display for TLElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TL({},{};{}):", self.top, self.bottom, self.delta)?;
        if self.terms.is_empty() {
            return write!(f, " 0");
        }
        for (idx, (p, c)) in self.terms.iter().enumerate() {
            let sep = if idx == 0 { " " } else { " + " };
            write!(f, "{sep}{c}*")?;
            for (x, y) in p.pairs() {
                write!(f, "({x} {y})")?;
            }
            if p.partner.is_empty() {
                write!(f, "()")?;
            }
        }
        Ok(())
    }
}

impl FromStr for TLElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("{what} in {s:?}"));
        let rest = s.trim().strip_prefix("TL(").ok_or_else(|| bad("missing TL( prefix"))?;
        let (head, body) = rest.split_once("):").ok_or_else(|| bad("missing ):"))?;
        let (shape_part, delta) = head.split_once(';').ok_or_else(|| bad("missing delta"))?;
        let (a, b) = shape_part.split_once(',').ok_or_else(|| bad("missing shape"))?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("bad integer"));
        let (top, bottom) = (num(a)?, num(b)?);
        let delta: i64 = delta.trim().parse().map_err(|_| bad("bad delta"))?;
        let mut out = Self::zero(top, bottom, delta);
        let body = body.trim();
        if body == "0" {
            return Ok(out);
        }
        for term in body.split(" + ") {
            let (c, diagram) = term.trim().split_once('*').ok_or_else(|| bad("missing *"))?;
            let c: BigRational = c.parse().map_err(|_| bad("bad coefficient"))?;
            let mut pairs = Vec::new();
            for chunk in diagram.split(')').map(str::trim).filter(|t| !t.is_empty()) {
                let inner = chunk.strip_prefix('(').ok_or_else(|| bad("bad pair"))?;
                if inner.is_empty() {
                    continue;
                }
                let (x, y) = inner.split_once(' ').ok_or_else(|| bad("bad pair"))?;
                pairs.push((num(x)?, num(y)?));
            }
            out.add_term(Pairing::from_pairs(top, bottom, &pairs)?, c);
        }
        Ok(out)
    }
}

/// Jones-Wenzl idempotents `p_1, ..., p_k` at a fixed loop value, built once
/// by Wenzl's recursion.
#[derive(Clone, Debug)]
pub struct JonesWenzl {
    delta: i64,
    table: Vec<Arc<TLElement>>,
}

/// Default cap on the number of strands.
pub const JW_CAP: usize = 10;

impl JonesWenzl {
    pub fn build(kmax: usize, delta: i64) -> Result<Self> {
        Self::build_with_cap(kmax, delta, JW_CAP)
    }

    pub fn build_with_cap(kmax: usize, delta: i64, cap: usize) -> Result<Self> {
        if kmax > cap {
            return Err(Error::Resource { what: "Jones-Wenzl strands".into(), requested: kmax, cap });
        }
        let x = BigInt::from(delta);
        let mut table = vec![Arc::new(TLElement::identity(0, delta))];
        for k in 1..=kmax {
            let prev = table[k - 1].tensor(&TLElement::identity(1, delta))?;
            let next = if k == 1 {
                prev
            } else {
                let ratio = BigRational::new(chebyshev(k - 2, &x), chebyshev(k - 1, &x));
                let e = TLElement::e(k - 1, k, delta)?;
                let sandwich = prev.compose(&e)?.compose(&prev)?;
                prev.sub(&sandwich.scale(&ratio))?
            };
            table.push(Arc::new(next));
        }
        Ok(Self { delta, table })
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn kmax(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&TLElement> {
        self.table.get(k).map(|x| x.as_ref())
    }
}

/// `p_k` at loop value `delta`.
pub fn jones_wenzl(k: usize, delta: i64) -> Result<TLElement> {
    if k == 0 {
        return Err(Error::InvalidArgument("Jones-Wenzl needs k >= 1".into()));
    }
    let table = JonesWenzl::build(k, delta)?;
    Ok(table.get(k).cloned().expect("built"))
}
