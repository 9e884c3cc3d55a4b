//! Free-group words over generators indexed by rational vectors.
//!
//! Text syntax: letters separated by `.`, each `family(i1,i2,...)` with an
//! optional `^-1`; the empty word is written `1`.
//!
//! ```
//! use realword_core::words::Word;
//! let w: Word = "x(1,5)^-1 . y . x(1,5)".parse().unwrap();
//! assert_eq!(w.len(), 3);
//! assert_eq!(w.to_string(), "x(1,5)^-1 . y . x(1,5)");
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{Rat, RatVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    X,
    Y,
    A,
    M,
    T,
    S,
    R,
    Aux,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::X,
        Family::Y,
        Family::A,
        Family::M,
        Family::T,
        Family::S,
        Family::R,
        Family::Aux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::X => "x",
            Family::Y => "y",
            Family::A => "a",
            Family::M => "m",
            Family::T => "t",
            Family::S => "s",
            Family::R => "r",
            Family::Aux => "aux",
        }
    }
}

impl FromStr for Family {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Family, WordError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| WordError::Parse(format!("unknown generator family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("malformed word: {0}")]
    Parse(String),
    #[error("word has {0} letters, above the cap of {1}")]
    CapExceeded(usize, usize),
}

/// A generator: family tag plus rational index vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenSym {
    pub family: Family,
    pub index: RatVec,
}

impl GenSym {
    pub fn new(family: Family, index: RatVec) -> GenSym {
        GenSym { family, index }
    }

    pub fn bare(family: Family) -> GenSym {
        GenSym {
            family,
            index: RatVec::empty(),
        }
    }

    /// `x_(i,s)`.
    pub fn x(i: usize, s: Rat) -> GenSym {
        GenSym::new(Family::X, RatVec::new(vec![Rat::from(i), s]))
    }

    pub fn y() -> GenSym {
        GenSym::bare(Family::Y)
    }

    pub fn a(i: usize, t: Rat) -> GenSym {
        GenSym::new(Family::A, RatVec::new(vec![Rat::from(i), t]))
    }

    pub fn m(i: usize, t: Rat) -> GenSym {
        GenSym::new(Family::M, RatVec::new(vec![Rat::from(i), t]))
    }

    pub fn with_index(family: Family, index: &[Rat]) -> GenSym {
        GenSym::new(family, RatVec::new(index.to_vec()))
    }

    pub fn pos(&self) -> Letter {
        Letter {
            gen: self.clone(),
            sign: Sign::Pos,
        }
    }

    pub fn neg(&self) -> Letter {
        Letter {
            gen: self.clone(),
            sign: Sign::Neg,
        }
    }

    /// `(i, s)` for a two-component index whose first entry is a natural.
    pub fn level_value(&self) -> Option<(usize, &Rat)> {
        match self.index.entries() {
            [i, s] => Some((i.to_usize()?, s)),
            _ => None,
        }
    }
}

impl fmt::Display for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        if self.index.dim() > 0 {
            write!(f, "{}", self.index)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: GenSym,
    pub sign: Sign,
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        Letter {
            gen: self.gen.clone(),
            sign: self.sign.flip(),
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.sign != other.sign && self.gen == other.gen
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gen)?;
        if self.sign == Sign::Neg {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite sequence of letters, not necessarily reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn gen(g: &GenSym) -> Word {
        Word(vec![g.pos()])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Unreduced juxtaposition.
    pub fn juxtapose(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    pub fn reduced(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| !p[0].cancels(&p[1]))
    }

    /// Cyclic rotation starting at `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// Every rational appearing in a letter index.
    pub fn rationals(&self) -> impl Iterator<Item = &Rat> {
        self.0.iter().flat_map(|l| l.gen.index.entries().iter())
    }

    /// Signed count of letters per generator family.
    pub fn exponent_sum(&self, family: Family) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen.family == family)
            .map(|l| l.sign.as_int())
            .sum()
    }

    pub fn power(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.juxtapose(&base);
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" . ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_letter(tok: &str) -> Result<Letter, WordError> {
    let bad = |m: &str| WordError::Parse(format!("{m} in {tok:?}"));
    let (body, sign) = match tok.split_once('^') {
        Some((b, e)) => match e.trim() {
            "-1" => (b.trim(), Sign::Neg),
            "1" | "+1" => (b.trim(), Sign::Pos),
            _ => return Err(bad("exponent must be 1 or -1")),
        },
        None => (tok, Sign::Pos),
    };
    let (name, index) = match body.split_once('(') {
        Some((n, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
            let index = RatVec::parse_list(inner).map_err(|e| bad(&e.to_string()))?;
            (n.trim(), index)
        }
        None => (body, RatVec::empty()),
    };
    Ok(Letter {
        gen: GenSym::new(name.parse()?, index),
        sign,
    })
}

impl FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Word, WordError> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        // dots inside parentheses never occur: rationals use '/'
        s.split('.')
            .map(|t| parse_letter(t.trim()))
            .collect::<Result<_, _>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for l in &w.0 {
        if out.last().is_some_and(|top| top.cancels(l)) {
            out.pop();
        } else {
            out.push(l.clone());
        }
    }
    Word(out)
}

pub fn concat(u: &Word, v: &Word) -> Word {
    free_reduce(&u.juxtapose(v))
}

pub fn invert(w: &Word) -> Word {
    w.inverse()
}

/// Reduced product of a sequence of words.
pub fn product<'a>(ws: impl IntoIterator<Item = &'a Word>) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for w in ws {
        for l in &w.0 {
            if out.last().is_some_and(|top| top.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
    }
    Word(out)
}

pub const SPAN_CAP: usize = 24;

/// Whether `w` splits into consecutive blocks each lying in `Y` or `Y^-1`.
/// Every cut point is tried; suffixes already shown unsplittable are
/// remembered.
pub fn span_decide(w: &Word, y: &dyn Fn(&Word) -> bool) -> Result<bool, WordError> {
    if w.len() > SPAN_CAP {
        return Err(WordError::CapExceeded(w.len(), SPAN_CAP));
    }
    let n = w.len();
    let mut dead = vec![false; n + 1];
    fn go(w: &Word, from: usize, y: &dyn Fn(&Word) -> bool, dead: &mut [bool]) -> bool {
        if from == w.len() {
            return true;
        }
        if dead[from] {
            return false;
        }
        for to in from + 1..=w.len() {
            let block = w.slice(from, to);
            if (y(&block) || y(&block.inverse())) && go(w, to, y, dead) {
                return true;
            }
        }
        dead[from] = true;
        false
    }
    Ok(go(w, 0, y, &mut dead))
}

// ---------------------------------------------------------------------------
// Conjugate patterns

/// `x(k,r_k)^-1 ... x(1,r_1)^-1 . y . x(1,r_1) ... x(k,r_k)`.
pub fn encode_w(r: &RatVec) -> Word {
    encode_levels(1, r.entries())
}

/// The pattern with `x(0,n)` innermost on both sides.
pub fn encode_w_tagged(n: u64, r: &RatVec) -> Word {
    let mut coords = vec![Rat::from(n as usize)];
    coords.extend(r.entries().iter().cloned());
    encode_levels(0, &coords)
}

/// Pattern with levels `min, min+1, ...` carrying `coords`.
pub fn encode_levels(min: usize, coords: &[Rat]) -> Word {
    let arm: Vec<GenSym> = coords
        .iter()
        .enumerate()
        .map(|(k, c)| GenSym::x(min + k, c.clone()))
        .collect();
    let mut v: Vec<Letter> = arm.iter().rev().map(GenSym::neg).collect();
    v.push(GenSym::y().pos());
    v.extend(arm.iter().map(GenSym::pos));
    Word(v)
}

/// A factor of a decomposition: exponent and coordinates from level `min`.
pub type Factor = (Sign, Vec<Rat>);

fn x_level(l: &Letter) -> Option<(usize, &Rat)> {
    if l.gen.family == Family::X {
        l.gen.level_value()
    } else {
        None
    }
}

/// Splits `w` into a product of patterns `encode_levels(min, c)^±1`.
/// Returns `None` when `w` is not such a product.
pub fn decompose_levels(w: &Word, min: usize) -> Option<Vec<Factor>> {
    let w = free_reduce(w);
    let letters = w.letters();
    let cores: Vec<usize> = (0..letters.len())
        .filter(|&i| letters[i].gen == GenSym::y())
        .collect();
    if cores.is_empty() {
        return w.is_empty().then(Vec::new);
    }
    // segment k lies between core k-1 and core k
    let mut bounds = vec![0];
    for &c in &cores {
        bounds.push(c);
        bounds.push(c + 1);
    }
    bounds.push(letters.len());
    let segment = |k: usize| &letters[bounds[2 * k]..bounds[2 * k + 1]];

    // positive letters ascending from `min`, then negative letters descending
    // to `min`
    let split = |seg: &[Letter]| -> Option<(Vec<Rat>, Vec<Rat>)> {
        let p = seg.iter().take_while(|l| l.sign == Sign::Pos).count();
        let mut up = Vec::new();
        for (k, l) in seg[..p].iter().enumerate() {
            let (lvl, v) = x_level(l)?;
            if lvl != min + k {
                return None;
            }
            up.push(v.clone());
        }
        let down_letters = &seg[p..];
        let mut down = vec![Rat::zero(); down_letters.len()];
        let top = down_letters.len();
        for (k, l) in down_letters.iter().enumerate() {
            let (lvl, v) = x_level(l)?;
            if l.sign != Sign::Neg || lvl + k + 1 != min + top {
                return None;
            }
            down[top - 1 - k] = v.clone();
        }
        Some((up, down))
    };

    let n = cores.len();
    let (first_up, first_left) = split(segment(0))?;
    if !first_up.is_empty() {
        return None;
    }
    let mut factors: Vec<Factor> = Vec::with_capacity(n);
    let mut coords = first_left;
    for k in 0..n {
        let sign = letters[cores[k]].sign;
        let (right, next_left) = split(segment(k + 1))?;
        if right.len() > coords.len() || right[..] != coords[..right.len()] {
            return None;
        }
        if k + 1 == n {
            if right.len() != coords.len() || !next_left.is_empty() {
                return None;
            }
            factors.push((sign, coords));
            break;
        }
        let next = if right.len() < coords.len() {
            // tails cancelled against the next factor, which shares the top
            if next_left.len() != right.len() {
                return None;
            }
            let mut c = next_left;
            c.extend_from_slice(&coords[right.len()..]);
            c
        } else {
            next_left
        };
        factors.push((sign, coords));
        coords = next;
    }
    let rebuilt = product(
        factors
            .iter()
            .map(|(s, c)| {
                let g = encode_levels(min, c);
                if *s == Sign::Pos {
                    g
                } else {
                    g.inverse()
                }
            })
            .collect::<Vec<_>>()
            .iter(),
    );
    (rebuilt == w).then_some(factors)
}

/// Decomposes `w` into generators `encode_w(r)^±1`.
pub fn nielsen_decompose(w: &Word) -> Option<Vec<(Sign, RatVec)>> {
    decompose_levels(w, 1).map(|fs| fs.into_iter().map(|(s, c)| (s, RatVec::new(c))).collect())
}

/// Decomposes `w` into tagged generators `encode_w_tagged(n, r)^±1`.
pub fn nielsen_decompose_tagged(w: &Word) -> Option<Vec<(Sign, u64, RatVec)>> {
    decompose_levels(w, 0)?
        .into_iter()
        .map(|(s, mut c)| {
            if c.is_empty() {
                return None;
            }
            let n = c.remove(0).to_usize()? as u64;
            Some((s, n, RatVec::new(c)))
        })
        .collect()
}

/// Reduced product of generators `encode_w(r)^±1`.
pub fn multiply_generators(factors: &[(Sign, RatVec)]) -> Word {
    let ws: Vec<Word> = factors
        .iter()
        .map(|(s, r)| {
            if *s == Sign::Pos {
                encode_w(r)
            } else {
                encode_w(r).inverse()
            }
        })
        .collect();
    product(ws.iter())
}
