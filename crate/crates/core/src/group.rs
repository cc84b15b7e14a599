//! Finite abelian groups `Z_{m1} x ... x Z_{mk}` with a dense index encoding.
//!
//! Elements are coordinate vectors. Every element also has an index in
//! `[0, N)`: the row-major mixed-radix number whose last coordinate varies
//! fastest, so `(2, 1)` in `Z_3 x Z_4` has index `2 * 4 + 1 = 9`. All subset
//! machinery works on indices; [`GroupSpec::add_index`] and friends do the
//! arithmetic directly on them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest group order accepted when no override is configured.
pub const DEFAULT_DENSE_CAP: usize = 1 << 20;

/// Environment variable that overrides [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "CAYLEY_DENSE_CAP";

/// The dense cap currently in force, honouring `CAYLEY_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&cap| cap >= 2)
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// A single cyclic factor: index arithmetic is plain modular arithmetic.
    Cyclic,
    /// Every modulus is 2: addition is XOR of indices.
    ExponentTwo,
    Mixed,
}

#[derive(Debug)]
struct Inner {
    moduli: Vec<u32>,
    strides: Vec<usize>,
    order: usize,
    layout: Layout,
}

/// A finite abelian group given as a product of cyclic factors.
///
/// Cloning is cheap; the description is shared.
#[derive(Clone)]
pub struct GroupSpec(Arc<Inner>);

impl GroupSpec {
    /// Builds `Z_{m1} x ... x Z_{mk}` under the configured dense cap.
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        Self::with_cap(moduli, dense_cap())
    }

    pub fn with_cap(moduli: Vec<u32>, cap: usize) -> Result<Self> {
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidModulus(m as u64));
        }
        let order: u128 = moduli.iter().map(|&m| m as u128).product();
        if order < 2 {
            return Err(Error::TrivialGroup);
        }
        if order > cap as u128 {
            return Err(Error::CapExceeded { order, cap });
        }
        let order = order as usize;
        let mut strides = vec![1usize; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1] as usize;
        }
        let layout = if moduli.len() == 1 {
            Layout::Cyclic
        } else if moduli.iter().all(|&m| m == 2) {
            Layout::ExponentTwo
        } else {
            Layout::Mixed
        };
        Ok(GroupSpec(Arc::new(Inner {
            moduli,
            strides,
            order,
            layout,
        })))
    }

    /// The cyclic group `Z_m`.
    pub fn cyclic(m: u32) -> Result<Self> {
        Self::new(vec![m])
    }

    /// The elementary abelian 2-group `Z_2^dim`.
    pub fn f2(dim: usize) -> Result<Self> {
        Self::new(vec![2; dim])
    }

    pub fn moduli(&self) -> &[u32] {
        &self.0.moduli
    }

    /// Number of elements `N`.
    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn rank(&self) -> usize {
        self.0.moduli.len()
    }

    /// True iff every factor is `Z_2`, i.e. the group is a vector space over
    /// the two-element field.
    pub fn is_exponent_two(&self) -> bool {
        self.0.moduli.iter().all(|&m| m == 2)
    }

    pub fn zero(&self) -> Element {
        Element {
            coords: vec![0; self.rank()],
        }
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.coords.len() != self.rank() {
            return Err(Error::LengthMismatch {
                expected: self.rank(),
                got: a.coords.len(),
            });
        }
        for (&c, &m) in a.coords.iter().zip(&self.0.moduli) {
            if c >= m {
                return Err(Error::UnreducedCoordinate {
                    coord: c as u64,
                    modulus: m,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.0.moduli)
            .map(|((&x, &y), &m)| ((x as u64 + y as u64) % m as u64) as u32)
            .collect();
        Ok(Element { coords })
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        let coords = a
            .coords
            .iter()
            .zip(&self.0.moduli)
            .map(|(&x, &m)| if x == 0 { 0 } else { m - x })
            .collect();
        Ok(Element { coords })
    }

    pub fn encode(&self, a: &Element) -> Result<usize> {
        self.check(a)?;
        Ok(a
            .coords
            .iter()
            .zip(&self.0.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum())
    }

    pub fn decode(&self, index: usize) -> Result<Element> {
        self.check_index(index)?;
        let coords = self
            .0
            .strides
            .iter()
            .zip(&self.0.moduli)
            .map(|(&s, &m)| ((index / s) % m as usize) as u32)
            .collect();
        Ok(Element { coords })
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.order() {
            return Err(Error::IndexOutOfRange {
                index,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// Sum of two elements given by index. Both indices must be `< N`.
    #[inline]
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.order() && b < self.order());
        match self.0.layout {
            Layout::Cyclic => {
                let s = a + b;
                if s >= self.0.order {
                    s - self.0.order
                } else {
                    s
                }
            }
            Layout::ExponentTwo => a ^ b,
            Layout::Mixed => {
                let mut out = 0;
                for (&s, &m) in self.0.strides.iter().zip(&self.0.moduli) {
                    let m = m as usize;
                    let d = (a / s) % m + (b / s) % m;
                    out += if d >= m { d - m } else { d } * s;
                }
                out
            }
        }
    }

    /// Negation of an element given by index.
    #[inline]
    pub fn neg_index(&self, a: usize) -> usize {
        debug_assert!(a < self.order());
        match self.0.layout {
            Layout::Cyclic => {
                if a == 0 {
                    0
                } else {
                    self.0.order - a
                }
            }
            Layout::ExponentTwo => a,
            Layout::Mixed => {
                let mut out = 0;
                for (&s, &m) in self.0.strides.iter().zip(&self.0.moduli) {
                    let m = m as usize;
                    let d = (a / s) % m;
                    out += if d == 0 { 0 } else { m - d } * s;
                }
                out
            }
        }
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// Parses a group literal: comma separated moduli (`"2,2,2"`), with the
    /// shorthands `z8` (= `8`), `z3^2` (= `3,3`) and `f2^10` (ten copies of 2).
    pub fn parse(literal: &str) -> Result<Self> {
        Self::new(parse_moduli(literal)?)
    }
}

fn parse_moduli(literal: &str) -> Result<Vec<u32>> {
    let bad = |part: &str| Error::Parse(format!("bad group literal component {part:?}"));
    let mut moduli = Vec::new();
    for raw in literal.split(',') {
        let part = raw.trim().to_ascii_lowercase();
        if part.is_empty() {
            return Err(bad(raw));
        }
        let body = part
            .strip_prefix('z')
            .or_else(|| part.strip_prefix('f'))
            .unwrap_or(&part);
        let (base, reps) = match body.split_once('^') {
            Some((b, e)) => (b, e.parse::<usize>().map_err(|_| bad(raw))?),
            None => (body, 1),
        };
        if part.starts_with('f') && !part.contains('^') {
            return Err(bad(raw));
        }
        let m = base.parse::<u32>().map_err(|_| bad(raw))?;
        if reps == 0 || reps > 64 {
            return Err(bad(raw));
        }
        moduli.extend(std::iter::repeat_n(m, reps));
    }
    Ok(moduli)
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.moduli == other.0.moduli
    }
}

impl Eq for GroupSpec {}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.moduli.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.moduli.serialize(serializer)
    }
}

/// A group element as a vector of residues, one per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Element {
    coords: Vec<u32>,
}

impl Element {
    pub fn new(coords: Vec<u32>) -> Self {
        Element { coords }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }
}

impl From<Vec<u32>> for Element {
    fn from(coords: Vec<u32>) -> Self {
        Element { coords }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(c: &[u32]) -> Element {
        Element::new(c.to_vec())
    }

    #[test]
    fn addition_examples() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(z4.add(&el(&[1]), &el(&[3])).unwrap(), el(&[0]));
        let k4 = GroupSpec::parse("2,2").unwrap();
        assert_eq!(k4.add(&el(&[1, 0]), &el(&[0, 1])).unwrap(), el(&[1, 1]));
        let z6 = GroupSpec::cyclic(6).unwrap();
        assert_eq!(z6.add(&el(&[4]), &el(&[5])).unwrap(), el(&[3]));
    }

    #[test]
    fn negation_examples() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(z5.neg(&el(&[2])).unwrap(), el(&[3]));
        let f3 = GroupSpec::f2(3).unwrap();
        assert_eq!(f3.neg(&el(&[1, 1, 0])).unwrap(), el(&[1, 1, 0]));
        let g = GroupSpec::parse("3,4,5").unwrap();
        assert_eq!(g.neg(&g.zero()).unwrap(), g.zero());
    }

    #[test]
    fn structural_errors() {
        let g = GroupSpec::parse("3,4").unwrap();
        assert!(matches!(
            g.add(&el(&[1]), &el(&[1, 1])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            g.encode(&el(&[3, 0])),
            Err(Error::UnreducedCoordinate { .. })
        ));
        assert!(matches!(g.decode(12), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            GroupSpec::new(vec![1, 4]),
            Err(Error::InvalidModulus(1))
        ));
        assert!(matches!(
            GroupSpec::with_cap(vec![2; 11], 1024),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn row_major_encoding() {
        let g = GroupSpec::parse("3,4").unwrap();
        assert_eq!(g.encode(&el(&[2, 1])).unwrap(), 9);
        assert_eq!(g.encode(&g.zero()).unwrap(), 0);
        let f4 = GroupSpec::f2(4).unwrap();
        for i in 0..16 {
            assert_eq!(f4.encode(&f4.decode(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn exponent_two_detection() {
        assert!(GroupSpec::parse("f2^5").unwrap().is_exponent_two());
        assert!(!GroupSpec::parse("z4").unwrap().is_exponent_two());
        assert!(!GroupSpec::parse("2,6").unwrap().is_exponent_two());
        // Z_2 alone is exponent two as well.
        assert!(GroupSpec::parse("2").unwrap().is_exponent_two());
    }

    #[test]
    fn literals() {
        assert_eq!(GroupSpec::parse("z8").unwrap().moduli(), &[8]);
        assert_eq!(GroupSpec::parse("f2^10").unwrap().moduli(), &[2; 10]);
        assert_eq!(GroupSpec::parse("2, 2,2,2").unwrap().moduli(), &[2; 4]);
        assert_eq!(GroupSpec::parse("z3,z5").unwrap().moduli(), &[3, 5]);
        assert_eq!(GroupSpec::parse("z3^2").unwrap().moduli(), &[3, 3]);
        assert!(GroupSpec::parse("").is_err());
        assert!(GroupSpec::parse("q7").is_err());
        assert!(GroupSpec::parse("f2").is_err());
        assert_eq!(GroupSpec::parse("6,2").unwrap().to_string(), "6,2");
    }

    /// Group axioms and index arithmetic agree with coordinate arithmetic on
    /// every group of order at most 256 built from a handful of shapes.
    #[test]
    fn axioms_exhaustive_small_groups() {
        let shapes: &[&[u32]] = &[
            &[2],
            &[7],
            &[12],
            &[2, 2, 2],
            &[3, 5],
            &[2, 6],
            &[4, 4],
            &[3, 3, 3],
            &[2, 2, 2, 2, 2, 2, 2, 2],
            &[16, 16],
            &[5, 2, 3],
        ];
        for moduli in shapes {
            let g = GroupSpec::new(moduli.to_vec()).unwrap();
            let n = g.order();
            assert!(n <= 256);
            let elems: Vec<Element> = (0..n).map(|i| g.decode(i).unwrap()).collect();
            let mut seen = vec![false; n];
            for (i, a) in elems.iter().enumerate() {
                let idx = g.encode(a).unwrap();
                assert_eq!(idx, i);
                assert!(!seen[idx]);
                seen[idx] = true;
                assert_eq!(g.add(a, &g.zero()).unwrap(), *a);
                let na = g.neg(a).unwrap();
                assert_eq!(g.add(a, &na).unwrap(), g.zero());
                assert_eq!(g.neg_index(i), g.encode(&na).unwrap());
                for (j, b) in elems.iter().enumerate() {
                    let ab = g.add(a, b).unwrap();
                    assert_eq!(ab, g.add(b, a).unwrap());
                    assert_eq!(g.add_index(i, j), g.encode(&ab).unwrap());
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let l = g.add_index(g.add_index(i, j), k);
                        let r = g.add_index(i, g.add_index(j, k));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }
}
