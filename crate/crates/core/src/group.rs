//! Words in the side-pairing generators, group presentations, exact word
//! evaluation and homomorphisms to Z.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{solve_hom_lattice, AffineLattice, ExactMatrix, IntegerMatrix};
use crate::pairing::{ridge_cycles, SidePairing};
use crate::{Error, Result};

/// A generator (0-based free side) with exponent ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub exp: i8,
}

impl Letter {
    pub fn new(gen: usize, exp: i8) -> Self {
        debug_assert!(exp == 1 || exp == -1);
        Letter { gen, exp }
    }

    /// The letter of the map of `side`: the generator itself on a free
    /// side, the inverse of its partner's generator otherwise.
    pub fn of_side(sp: &SidePairing, side: usize) -> Self {
        let t = sp.partner(side);
        if side < t {
            Letter::new(side, 1)
        } else {
            Letter::new(t, -1)
        }
    }

    /// Side whose pairing map this letter stands for.
    pub fn side(&self, sp: &SidePairing) -> usize {
        if self.exp > 0 {
            self.gen
        } else {
            sp.partner(self.gen)
        }
    }

    pub fn inverse(self) -> Self {
        Letter::new(self.gen, -self.exp)
    }
}

/// An unreduced word; free reduction is explicit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: i32) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        Word(base.0.iter().copied().cycle().take(base.len() * n.unsigned_abs() as usize).collect())
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Least form under cyclic rotation and inversion, for comparing
    /// relators.
    pub fn cyclic_normal_form(&self) -> Word {
        let mut best: Option<Vec<Letter>> = None;
        for w in [self.clone(), self.inverse()] {
            let n = w.len();
            for k in 0..n.max(1) {
                let rot: Vec<Letter> = (0..n).map(|i| w.0[(i + k) % n]).collect();
                if best.as_ref().is_none_or(|b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        Word(best.unwrap_or_default())
    }

    /// Exponent sum of each generator, by free side index.
    pub fn exponent_sums(&self) -> [i64; 24] {
        let mut out = [0i64; 24];
        for l in &self.0 {
            out[l.gen] += l.exp as i64;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "g{}", l.gen + 1)?;
            if l.exp < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `g3g10^-1g22^-1g8` (whitespace optional, 1-based sides).
    fn from_str(s: &str) -> Result<Word> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for chunk in s.split('g').skip(1) {
            let (num, exp) = match chunk.split_once('^') {
                Some((n, "-1")) => (n, -1),
                Some((n, "1")) => (n, 1),
                Some((_, e)) => return Err(bad(format!("unsupported exponent `{e}`"))),
                None => (chunk, 1),
            };
            let n: usize = num.parse().map_err(|_| bad(format!("bad generator `{num}`")))?;
            if !(1..=24).contains(&n) {
                return Err(bad(format!("generator {n} out of range")));
            }
            letters.push(Letter::new(n - 1, exp));
        }
        if !s.starts_with('g') {
            return Err(bad(format!("word `{s}` must start with a generator")));
        }
        Ok(Word(letters))
    }
}

/// Parses a word, panicking on malformed input; for constants.
pub fn word(s: &str) -> Word {
    s.parse().expect("well-formed word")
}

/// Cusp words in the generators of the bundled manifold.
pub mod words {
    use super::{word, Word};

    pub fn t1() -> Word {
        word("g5^-1 g8^-1 g12 g9")
    }
    pub fn t2() -> Word {
        word("g9^-1 g10^-1 g5 g6")
    }
    pub fn a() -> Word {
        word("g21")
    }
    pub fn t3() -> Word {
        a().pow(4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    /// Free sides carrying the generators, 0-based and ascending.
    pub generators: Vec<usize>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn column_of(&self, gen: usize) -> Option<usize> {
        self.generators.iter().position(|&g| g == gen)
    }

    /// Exponent-sum row of a word over the generator columns.
    pub fn exponent_row(&self, w: &Word) -> Result<Vec<i64>> {
        let mut row = vec![0i64; self.generators.len()];
        for l in w.letters() {
            let c = self
                .column_of(l.gen)
                .ok_or_else(|| Error::Inconsistent(format!("g{} is not a generator", l.gen + 1)))?;
            row[c] += l.exp as i64;
        }
        Ok(row)
    }

    /// Whether `w` is a relator up to rotation and inversion.
    pub fn has_relator(&self, w: &Word) -> bool {
        let n = w.cyclic_normal_form();
        self.relators.iter().any(|r| r.cyclic_normal_form() == n)
    }
}

/// Generators from the free sides, relators from the ridge cycles.
pub fn presentation(sp: &SidePairing) -> GroupPresentation {
    GroupPresentation {
        generators: sp.free_sides(),
        relators: ridge_cycles(sp).iter().map(|c| c.word(sp)).collect(),
    }
}

/// Exact matrix of a word, letters multiplied left to right.
pub fn eval_word(w: &Word, sp: &SidePairing) -> ExactMatrix {
    w.letters()
        .iter()
        .fold(ExactMatrix::identity(), |acc, l| acc.mul_ref(sp.matrix(l.side(sp))))
}

/// Relator-by-generator exponent sum matrix.
pub fn abelianized_matrix(p: &GroupPresentation) -> IntegerMatrix {
    let rows: Vec<Vec<i64>> = p
        .relators
        .iter()
        .map(|r| p.exponent_row(r).expect("relator in generators"))
        .collect();
    IntegerMatrix::from_i64(&rows, p.generators.len())
}

/// A homomorphism to Z given by its values on the generators, in the
/// order of [`GroupPresentation::generators`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntHomomorphism {
    pub values: Vec<i64>,
}

impl IntHomomorphism {
    pub fn new(values: Vec<i64>) -> Self {
        IntHomomorphism { values }
    }

    /// Builds from `(generator side, value)` pairs.
    pub fn from_pairs(p: &GroupPresentation, pairs: &[(usize, i64)]) -> Result<Self> {
        let mut values = vec![0; p.generators.len()];
        for &(g, x) in pairs {
            let c = p
                .column_of(g)
                .ok_or_else(|| Error::Inconsistent(format!("g{} is not a generator", g + 1)))?;
            values[c] = x;
        }
        Ok(IntHomomorphism { values })
    }

    /// Value on a word.
    pub fn eval(&self, p: &GroupPresentation, w: &Word) -> Result<i64> {
        Ok(p.exponent_row(w)?.iter().zip(&self.values).map(|(a, b)| a * b).sum())
    }

    /// Value on the map of a side.
    pub fn on_side(&self, p: &GroupPresentation, sp: &SidePairing, side: usize) -> i64 {
        let l = Letter::of_side(sp, side);
        self.values[p.column_of(l.gen).expect("free side")] * l.exp as i64
    }

    pub fn is_surjective(&self) -> bool {
        self.values.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
    }
}

/// Homomorphism of the bundled group that vanishes on the whole
/// quarter-twist cusp group (the `h` of the cover options).
pub fn cusp_killing_hom(p: &GroupPresentation) -> IntHomomorphism {
    IntHomomorphism::from_pairs(
        p,
        &[(0, 1), (2, 1), (4, 2), (5, 0), (6, 2), (7, 0), (8, 1), (9, 1), (10, 1), (11, 1), (20, 0), (21, 0)],
    )
    .expect("bundled generators")
}

/// Homomorphism of the bundled group that vanishes on the cusp
/// translations and takes the primitive screw to 1 (the `v` of the cover
/// options).
pub fn screw_hom(p: &GroupPresentation) -> IntHomomorphism {
    IntHomomorphism::from_pairs(
        p,
        &[(0, 2), (2, 0), (4, 2), (5, 0), (6, 2), (7, 0), (8, 1), (9, 1), (10, 1), (11, 1), (20, 1), (21, -1)],
    )
    .expect("bundled generators")
}

/// True iff every relator maps to 0 and the image is all of Z.
pub fn verify_hom(phi: &IntHomomorphism, p: &GroupPresentation) -> bool {
    phi.values.len() == p.generators.len()
        && p.relators.iter().all(|r| phi.eval(p, r) == Ok(0))
        && phi.is_surjective()
}

pub fn hom_values_on(phi: &IntHomomorphism, p: &GroupPresentation, words: &[Word]) -> Result<Vec<i64>> {
    words.iter().map(|w| phi.eval(p, w)).collect()
}

/// All integer homomorphisms killing the relators and taking the given
/// values on the given words.
pub fn find_constrained_homs(p: &GroupPresentation, constraints: &[(Word, i64)]) -> Result<AffineLattice> {
    let mut a = abelianized_matrix(p);
    let mut fixed = Vec::new();
    for (w, x) in constraints {
        let row = p.exponent_row(w)?;
        fixed.push((a.nrows(), BigInt::from(*x)));
        a = a.vstack(&IntegerMatrix::from_i64(&[row], p.generators.len()));
    }
    solve_hom_lattice(&a, &fixed)
}

/// Integer vector of a homomorphism, for lattice membership.
pub fn hom_vector(phi: &IntHomomorphism) -> Vec<BigInt> {
    phi.values.iter().map(|&x| BigInt::from(x)).collect()
}

/// Whether `x` is primitive, i.e. has coprime entries.
pub fn is_primitive(x: &[BigInt]) -> bool {
    x.iter().fold(BigInt::zero(), |g, y| g.gcd(y)).is_one()
}
