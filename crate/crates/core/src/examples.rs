//! Example groups with independent word-problem oracles: the circle, the
//! 1-dimensional torus, the Weil presentation of SL2, two presentations of
//! (Q,+) and a group where `x_r = x_0` exactly for rational `r`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::arith::{Rat, RatVec};
use crate::predicate::{
    and, cst, eq, gt, is_integer, is_natural, ne, not, or, var, Expr, SetPredicate,
};
use crate::presentation::{GeneratorClass, LetterTemplate, Presentation, RelatorSchema};
use crate::words::{Family, GenSym, Letter, Sign, Word};
use crate::wp::{CertEntry, Certificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExampleError {
    #[error("malformed letter {0}")]
    Malformed(String),
}

fn x(index: Vec<Expr>) -> LetterTemplate {
    LetterTemplate::pos(Family::X, index)
}

fn xi(index: Vec<Expr>) -> LetterTemplate {
    LetterTemplate::neg(Family::X, index)
}

fn nonzero2(a: usize, b: usize) -> SetPredicate {
    or(vec![ne(var(a), cst(0i64)), ne(var(b), cst(0i64))])
}

fn unit(a: usize, b: usize) -> SetPredicate {
    eq(var(a) * var(a) + var(b) * var(b), cst(1i64))
}

pub fn circle() -> Presentation {
    let r1 = RelatorSchema::new(
        "R1",
        4,
        vec![x(vec![var(0), var(1)]), xi(vec![var(2), var(3)])],
        and(vec![
            nonzero2(0, 1),
            nonzero2(2, 3),
            eq(var(0) * var(3), var(1) * var(2)),
            gt(var(2) * var(0), cst(0i64)),
        ]),
    );
    let r2 = RelatorSchema::new(
        "R2",
        4,
        vec![
            x(vec![var(0), var(1)]),
            x(vec![var(2), var(3)]),
            xi(vec![
                var(0) * var(2) - var(1) * var(3),
                var(0) * var(3) + var(1) * var(2),
            ]),
        ],
        and(vec![unit(0, 1), unit(2, 3)]),
    );
    Presentation::new(
        "circle",
        2,
        vec![GeneratorClass::new(Family::X, 2, nonzero2(0, 1))],
        vec![r1, r2],
    )
}

pub fn torus() -> Presentation {
    let t1 = RelatorSchema::new(
        "T1",
        1,
        vec![x(vec![var(0)]), xi(vec![var(0) + cst(1i64)])],
        SetPredicate::True,
    );
    let t2 = RelatorSchema::new(
        "T2",
        2,
        vec![x(vec![var(0)]), x(vec![var(1)]), xi(vec![var(0) + var(1)])],
        SetPredicate::True,
    );
    Presentation::new(
        "torus",
        1,
        vec![GeneratorClass::new(Family::X, 1, SetPredicate::True)],
        vec![t1, t2],
    )
}

/// `S(a) = V U(1/a) V U(a) V U(1/a)` as a template.
fn s_template(a: Expr) -> Vec<LetterTemplate> {
    let v = || LetterTemplate::pos(Family::Aux, vec![]);
    let inv = cst(1i64) / a.clone();
    vec![
        v(),
        x(vec![inv.clone()]),
        v(),
        x(vec![a]),
        v(),
        x(vec![inv]),
    ]
}

fn inverted(t: Vec<LetterTemplate>) -> Vec<LetterTemplate> {
    crate::presentation::invert_template(&t)
}

/// The Weil presentation: `x(b)` stands for `U(b)`, the bare `aux` letter
/// for `V`.
pub fn sl2_weil() -> Presentation {
    let nz = |i| ne(var(i), cst(0i64));
    let sl1 = RelatorSchema::new(
        "SL1",
        2,
        vec![x(vec![var(0)]), x(vec![var(1)]), xi(vec![var(0) + var(1)])],
        SetPredicate::True,
    );
    let mut t2 = s_template(var(0));
    t2.extend(s_template(var(1)));
    t2.extend(inverted(s_template(var(0) * var(1))));
    let sl2 = RelatorSchema::new("SL2", 2, t2, and(vec![nz(0), nz(1)]));
    let mut t3 = vec![
        LetterTemplate::pos(Family::Aux, vec![]),
        LetterTemplate::pos(Family::Aux, vec![]),
    ];
    t3.extend(inverted(s_template(cst(-1i64))));
    let sl3 = RelatorSchema::new("SL3", 0, t3, SetPredicate::True);
    let mut t4 = s_template(var(0));
    t4.push(x(vec![var(1)]));
    t4.extend(s_template(cst(1i64) / var(0)));
    t4.push(xi(vec![var(1) * var(0) * var(0)]));
    let sl4 = RelatorSchema::new("SL4", 2, t4, nz(0));
    Presentation::new(
        "sl2-weil",
        1,
        vec![
            GeneratorClass::new(Family::X, 1, SetPredicate::True),
            GeneratorClass::new(Family::Aux, 0, SetPredicate::True),
        ],
        vec![sl1, sl2, sl3, sl4],
    )
}

pub fn rationals_a() -> Presentation {
    let r = RelatorSchema::new(
        "sum",
        2,
        vec![x(vec![var(0)]), x(vec![var(1)]), xi(vec![var(0) + var(1)])],
        SetPredicate::True,
    );
    Presentation::new(
        "rationals-a",
        1,
        vec![GeneratorClass::new(Family::X, 1, SetPredicate::True)],
        vec![r],
    )
}

pub fn rationals_b() -> Presentation {
    let ints = |vs: &[usize]| and(vs.iter().map(|i| is_integer(var(*i))).collect());
    let sum = RelatorSchema::new(
        "sum",
        4,
        vec![
            x(vec![var(0), var(1)]),
            x(vec![var(2), var(3)]),
            xi(vec![var(0) * var(3) + var(2) * var(1), var(1) * var(3)]),
        ],
        and(vec![
            ints(&[0, 1, 2, 3]),
            ne(var(1), cst(0i64)),
            ne(var(3), cst(0i64)),
        ]),
    );
    // x(p,q) = x(np,nq) for an integer n != 0, with n = v/q
    let scale = RelatorSchema::new(
        "scale",
        4,
        vec![x(vec![var(0), var(1)]), xi(vec![var(2), var(3)])],
        and(vec![
            ints(&[0, 1, 2, 3]),
            ne(var(1), cst(0i64)),
            ne(var(3), cst(0i64)),
            eq(var(2) * var(1), var(3) * var(0)),
            is_integer(var(3) / var(1)),
        ]),
    );
    let gens = GeneratorClass::new(
        Family::X,
        2,
        and(vec![ints(&[0, 1]), ne(var(1), cst(0i64))]),
    );
    Presentation::new("rationals-b", 2, vec![gens], vec![sum, scale])
}

/// `x_(nr) = x_r` for naturals `n >= 1` and `x_(r+k) = x_r` for integers `k`.
pub fn qgroup() -> Presentation {
    let dilate = RelatorSchema::new(
        "dilate",
        2,
        vec![x(vec![var(0)]), xi(vec![var(1)])],
        or(vec![
            and(vec![eq(var(0), cst(0i64)), eq(var(1), cst(0i64))]),
            and(vec![
                ne(var(1), cst(0i64)),
                is_natural(var(0) / var(1)),
                not(eq(var(0) / var(1), cst(0i64))),
            ]),
        ]),
    );
    let shift = RelatorSchema::new(
        "shift",
        2,
        vec![x(vec![var(0)]), xi(vec![var(1)])],
        is_integer(var(0) - var(1)),
    );
    Presentation::new(
        "qgroup",
        1,
        vec![GeneratorClass::new(Family::X, 1, SetPredicate::True)],
        vec![dilate, shift],
    )
}

fn entry(p: &Presentation, schema: usize, params: Vec<Rat>, inverse: bool) -> CertEntry {
    CertEntry {
        conjugator: Word::empty(),
        relator: p.relators[schema]
            .instantiate(&params)
            .expect("instantiable"),
        schema,
        params: RatVec::new(params),
        inverse,
    }
}

/// The chain `x_r = x_(qr) = x_p = x_0` for `r = p/q`, with a certificate
/// for `x_r x_0^-1` against [`qgroup`].
pub fn qgroup_normalize(r: &Rat) -> (Vec<GenSym>, Certificate) {
    let p = qgroup();
    let g = |v: &Rat| GenSym::with_index(Family::X, std::slice::from_ref(v));
    if r.is_zero() {
        return (vec![], Certificate::default());
    }
    let num = Rat::int(r.numer().clone());
    let mut chain = vec![g(r)];
    let mut entries = Vec::new();
    if !r.is_integer() {
        chain.push(g(&num));
        entries.push(entry(&p, 0, vec![num.clone(), r.clone()], true));
    }
    chain.push(g(&Rat::zero()));
    entries.push(entry(&p, 1, vec![num, Rat::zero()], false));
    (chain, Certificate { entries })
}

fn gens_of(w: &Word, family: Family, arity: usize) -> Result<Vec<(&[Rat], Sign)>, ExampleError> {
    w.letters()
        .iter()
        .map(|l| {
            if l.gen.family == family && l.gen.index.dim() == arity {
                Ok((l.gen.index.entries(), l.sign))
            } else {
                Err(ExampleError::Malformed(l.to_string()))
            }
        })
        .collect()
}

/// Folds the word by complex multiplication of ray representatives.
pub fn circle_wp(w: &Word) -> Result<bool, ExampleError> {
    let (mut re, mut im) = (Rat::one(), Rat::zero());
    for (idx, sign) in gens_of(w, Family::X, 2)? {
        let (a, b) = (idx[0].clone(), idx[1].clone());
        if a.is_zero() && b.is_zero() {
            return Err(ExampleError::Malformed(format!("x({a},{b})")));
        }
        let b = if sign == Sign::Neg { -b } else { b };
        let nre = &re * &a - &im * &b;
        let nim = &re * &b + &im * &a;
        re = nre;
        im = nim;
    }
    Ok(im.is_zero() && re.is_positive())
}

pub fn torus_wp(w: &Word) -> Result<bool, ExampleError> {
    Ok(signed_sum(w)?.is_integer())
}

fn signed_sum(w: &Word) -> Result<Rat, ExampleError> {
    let mut sum = Rat::zero();
    for (idx, sign) in gens_of(w, Family::X, 1)? {
        sum = if sign == Sign::Pos {
            sum + idx[0].clone()
        } else {
            sum - idx[0].clone()
        };
    }
    Ok(sum)
}

pub fn rationals_wp_a(w: &Word) -> Result<bool, ExampleError> {
    Ok(signed_sum(w)?.is_zero())
}

pub fn rationals_wp_b(w: &Word) -> Result<bool, ExampleError> {
    let mut sum = Rat::zero();
    for (idx, sign) in gens_of(w, Family::X, 2)? {
        if !idx[0].is_integer() || !idx[1].is_integer() || idx[1].is_zero() {
            return Err(ExampleError::Malformed(format!("x({},{})", idx[0], idx[1])));
        }
        let q = idx[0].checked_div(&idx[1]).expect("nonzero");
        sum = if sign == Sign::Pos { sum + q } else { sum - q };
    }
    Ok(sum.is_zero())
}

/// `x_r = x_0` in [`qgroup`] exactly when every index is rational, so on
/// rational words the group is infinite cyclic, counted by exponent sum.
pub fn qgroup_wp(w: &Word) -> Result<bool, ExampleError> {
    gens_of(w, Family::X, 1)?;
    Ok(w.exponent_sum(Family::X) == 0)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Mat2(pub [[Rat; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        Mat2([[Rat::one(), Rat::zero()], [Rat::zero(), Rat::one()]])
    }

    pub fn u(b: &Rat) -> Mat2 {
        Mat2([[Rat::one(), b.clone()], [Rat::zero(), Rat::one()]])
    }

    pub fn v() -> Mat2 {
        Mat2([[Rat::zero(), Rat::one()], [-Rat::one(), Rat::zero()]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn det(&self) -> Rat {
        let a = &self.0;
        &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_unimodular(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[1][1].clone(), -a[0][1].clone()],
            [-a[1][0].clone(), a[0][0].clone()],
        ])
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            a[0][0], a[0][1], a[1][0], a[1][1]
        )
    }
}

pub fn sl2_eval(w: &Word) -> Result<Mat2, ExampleError> {
    let mut m = Mat2::identity();
    for l in w.letters() {
        let g = match (l.gen.family, l.gen.index.dim()) {
            (Family::X, 1) => Mat2::u(&l.gen.index.entries()[0]),
            (Family::Aux, 0) => Mat2::v(),
            _ => return Err(ExampleError::Malformed(l.to_string())),
        };
        let g = if l.sign == Sign::Pos {
            g
        } else {
            g.inverse_unimodular()
        };
        m = m.mul(&g);
    }
    Ok(m)
}

pub fn sl2_wp(w: &Word) -> Result<bool, ExampleError> {
    Ok(sl2_eval(w)? == Mat2::identity())
}

/// The example groups as one selectable value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    Circle,
    Torus,
    Sl2,
    RationalsA,
    RationalsB,
    QGroup,
}

impl Example {
    pub const ALL: [Example; 6] = [
        Example::Circle,
        Example::Torus,
        Example::Sl2,
        Example::RationalsA,
        Example::RationalsB,
        Example::QGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Circle => "circle",
            Example::Torus => "torus",
            Example::Sl2 => "sl2",
            Example::RationalsA => "rationals-a",
            Example::RationalsB => "rationals-b",
            Example::QGroup => "qgroup",
        }
    }

    pub fn presentation(self) -> Presentation {
        match self {
            Example::Circle => circle(),
            Example::Torus => torus(),
            Example::Sl2 => sl2_weil(),
            Example::RationalsA => rationals_a(),
            Example::RationalsB => rationals_b(),
            Example::QGroup => qgroup(),
        }
    }

    pub fn oracle(self, w: &Word) -> Result<bool, ExampleError> {
        match self {
            Example::Circle => circle_wp(w),
            Example::Torus => torus_wp(w),
            Example::Sl2 => sl2_wp(w),
            Example::RationalsA => rationals_wp_a(w),
            Example::RationalsB => rationals_wp_b(w),
            Example::QGroup => qgroup_wp(w),
        }
    }

    pub fn random_generator<R: Rng>(self, rng: &mut R) -> GenSym {
        let g = |v: Vec<Rat>| GenSym::with_index(Family::X, &v);
        match self {
            Example::Circle => loop {
                let (r, s) = (small_rat(rng), small_rat(rng));
                if !(r.is_zero() && s.is_zero()) {
                    break g(vec![r, s]);
                }
            },
            Example::Torus | Example::RationalsA | Example::QGroup => g(vec![small_rat(rng)]),
            Example::Sl2 => {
                if rng.gen_bool(0.4) {
                    GenSym::bare(Family::Aux)
                } else {
                    g(vec![small_rat(rng)])
                }
            }
            Example::RationalsB => g(vec![
                Rat::int(rng.gen_range(-6i64..=6)),
                Rat::int(nonzero_int(rng)),
            ]),
        }
    }

    /// A random relator instance: schema index and parameters.
    pub fn random_relator<R: Rng>(self, rng: &mut R) -> (usize, Vec<Rat>) {
        let nz = |rng: &mut R| loop {
            let q = small_rat(rng);
            if !q.is_zero() {
                break q;
            }
        };
        match self {
            Example::Circle => {
                if rng.gen_bool(0.5) {
                    let (r, s) = (nz(rng), small_rat(rng));
                    let lambda = nz(rng).abs();
                    (0, vec![r.clone(), s.clone(), &lambda * &r, &lambda * &s])
                } else {
                    let (a, b) = unit_vector(rng);
                    let (c, d) = unit_vector(rng);
                    (1, vec![a, b, c, d])
                }
            }
            Example::Torus => {
                if rng.gen_bool(0.5) {
                    (0, vec![small_rat(rng)])
                } else {
                    (1, vec![small_rat(rng), small_rat(rng)])
                }
            }
            Example::Sl2 => match rng.gen_range(0..4) {
                0 => (0, vec![small_rat(rng), small_rat(rng)]),
                1 => (1, vec![nz(rng), nz(rng)]),
                2 => (2, vec![]),
                _ => (3, vec![nz(rng), small_rat(rng)]),
            },
            Example::RationalsA => (0, vec![small_rat(rng), small_rat(rng)]),
            Example::RationalsB => {
                let p = Rat::int(rng.gen_range(-6i64..=6));
                let q = Rat::int(nonzero_int(rng));
                if rng.gen_bool(0.5) {
                    (
                        0,
                        vec![
                            p,
                            q,
                            Rat::int(rng.gen_range(-6i64..=6)),
                            Rat::int(nonzero_int(rng)),
                        ],
                    )
                } else {
                    let n = Rat::int(nonzero_int(rng));
                    (1, vec![p.clone(), q.clone(), &n * &p, &n * &q])
                }
            }
            Example::QGroup => {
                let r = small_rat(rng);
                if rng.gen_bool(0.5) {
                    let n = Rat::int(rng.gen_range(1i64..=4));
                    (0, vec![&n * &r, r])
                } else {
                    let k = Rat::int(rng.gen_range(-3i64..=3));
                    (1, vec![&r + &k, r])
                }
            }
        }
    }

    pub fn random_word<R: Rng>(self, rng: &mut R, len: usize) -> Word {
        let mut w = Word::empty();
        for _ in 0..len {
            let g = self.random_generator(rng);
            w.push(Letter {
                gen: g,
                sign: if rng.gen_bool(0.5) {
                    Sign::Pos
                } else {
                    Sign::Neg
                },
            });
        }
        w
    }

    /// A product of `factors` conjugated relator instances, freely reduced.
    pub fn relator_product<R: Rng>(self, rng: &mut R, factors: usize) -> Word {
        let p = self.presentation();
        let mut parts = Vec::new();
        for _ in 0..factors {
            let (si, params) = self.random_relator(rng);
            let r = p.relators[si]
                .instance(&params)
                .expect("sampled parameters satisfy the constraint");
            let r = if rng.gen_bool(0.5) { r } else { r.inverse() };
            let clen = rng.gen_range(0..=2);
            let c = self.random_word(rng, clen);
            parts.push(c.juxtapose(&r).juxtapose(&c.inverse()));
        }
        crate::words::product(&parts)
    }
}

impl FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Example, String> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown example {s:?}"))
    }
}

fn nonzero_int<R: Rng>(rng: &mut R) -> i64 {
    let n = rng.gen_range(1i64..=5);
    if rng.gen_bool(0.5) {
        n
    } else {
        -n
    }
}

/// A rational with numerator in `-6..=6` and denominator in `1..=4`.
pub fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    Rat::frac(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=4))
}

/// A rational point on the unit circle, `((1-t^2)/(1+t^2), 2t/(1+t^2))` up
/// to signs and swapping.
pub fn unit_vector<R: Rng>(rng: &mut R) -> (Rat, Rat) {
    let t = small_rat(rng);
    let d = Rat::one() + &t * &t;
    let a = (Rat::one() - &t * &t).checked_div(&d).expect("positive");
    let b = (Rat::int(2) * t).checked_div(&d).expect("positive");
    let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    let a = if rng.gen_bool(0.5) { a } else { -a };
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{check_generator, check_relator, relator_stream};
    use crate::wp::verify_certificate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn circle_generators() {
        let p = circle();
        assert_eq!(
            check_generator(
                &p,
                &GenSym::with_index(Family::X, &[Rat::int(2), Rat::zero()])
            ),
            Ok(true)
        );
        assert_eq!(
            check_generator(
                &p,
                &GenSym::with_index(Family::X, &[Rat::zero(), Rat::zero()])
            ),
            Ok(false)
        );
    }

    #[test]
    fn circle_oracle() {
        assert_eq!(circle_wp(&w("x(2,0) . x(1/2,0) . x(1,0)^-1")), Ok(true));
        assert_eq!(circle_wp(&w("x(0,1) . x(0,1) . x(-1,0)^-1")), Ok(true));
        assert_eq!(circle_wp(&Word::empty()), Ok(true));
        assert_eq!(circle_wp(&w("x(0,1)")), Ok(false));
        assert_eq!(circle_wp(&w("x(-3,0)")), Ok(false));
        assert_eq!(circle_wp(&w("x(3,4) . x(6,8)^-1")), Ok(true));
    }

    #[test]
    fn torus_and_rationals() {
        let p = torus();
        assert_eq!(
            check_relator(&p, &w("x(1/3) . x(1/4) . x(7/12)^-1")),
            Ok(true)
        );
        assert_eq!(
            check_relator(&p, &w("x(1/3) . x(1/4) . x(1/2)^-1")),
            Ok(false)
        );
        assert_eq!(torus_wp(&w("x(1/3) . x(2/3)")), Ok(true));
        assert_eq!(torus_wp(&w("x(1/2)")), Ok(false));
        assert_eq!(torus_wp(&Word::empty()), Ok(true));
        assert_eq!(rationals_wp_a(&w("x(1/2) . x(-1/2)")), Ok(true));
        assert_eq!(rationals_wp_b(&w("x(1,2) . x(1,3) . x(5,6)^-1")), Ok(true));
        assert_eq!(rationals_wp_b(&w("x(1,2) . x(2,4)^-1")), Ok(true));
        assert!(rationals_wp_b(&w("x(1,0)")).is_err());
        assert!(rationals_wp_b(&w("x(1/2,1)")).is_err());
        let b = rationals_b();
        assert_eq!(
            check_relator(&b, &w("x(1,2) . x(1,3) . x(5,6)^-1")),
            Ok(true)
        );
        assert_eq!(check_relator(&b, &w("x(1,2) . x(2,4)^-1")), Ok(true));
        assert_eq!(check_relator(&b, &w("x(2,4) . x(1,2)^-1")), Ok(false));
    }

    #[test]
    fn s_of_a_is_diagonal() {
        for a in [Rat::int(2), Rat::frac(-3, 5), Rat::int(-1)] {
            let s = crate::presentation::instantiate_template(
                &s_template(var(0)),
                std::slice::from_ref(&a),
            )
            .unwrap();
            let m = sl2_eval(&s).unwrap();
            assert_eq!(
                m,
                Mat2([[a.clone(), Rat::zero()], [Rat::zero(), a.recip().unwrap()]])
            );
        }
    }

    #[test]
    fn weil_relations_hold() {
        assert_eq!(sl2_wp(&w("aux . aux . aux . aux")), Ok(true));
        assert_eq!(sl2_wp(&w("aux . aux")), Ok(false));
        assert_eq!(sl2_wp(&w("x(1) . x(2) . x(3)^-1")), Ok(true));
        let p = sl2_weil();
        let sl4 = p.relators[3].instance(&[Rat::int(2), Rat::int(3)]).unwrap();
        assert_eq!(sl4.letters().last().unwrap().to_string(), "x(12)^-1");
        assert_eq!(sl2_wp(&sl4), Ok(true));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (si, params) = Example::Sl2.random_relator(&mut rng);
            let r = p.relators[si].instance(&params).unwrap();
            assert_eq!(sl2_eval(&r).unwrap(), Mat2::identity(), "{r}");
        }
        for _ in 0..100 {
            let word = Example::Sl2.random_word(&mut rng, 12);
            assert_eq!(sl2_eval(&word).unwrap().det(), Rat::one());
        }
    }

    #[test]
    fn sampled_relators_are_relators_and_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ex in Example::ALL {
            let p = ex.presentation();
            assert!(p.is_decidable(), "{}", ex.name());
            for _ in 0..100 {
                let (si, params) = ex.random_relator(&mut rng);
                let r = p.relators[si].instance(&params).unwrap();
                assert_eq!(check_relator(&p, &r), Ok(true));
                assert_eq!(ex.oracle(&r), Ok(true), "{} {r}", ex.name());
                assert!(r
                    .letters()
                    .iter()
                    .all(|l| check_generator(&p, &l.gen) == Ok(true)));
            }
            for (_, _, _, r) in relator_stream(&p).take(30) {
                assert_eq!(ex.oracle(&r), Ok(true), "{} {r}", ex.name());
            }
        }
    }

    #[test]
    fn qgroup_chains() {
        let p = qgroup();
        let (chain, cert) = qgroup_normalize(&Rat::frac(5, 3));
        let names: Vec<String> = chain.iter().map(|g| g.to_string()).collect();
        assert_eq!(names, ["x(5/3)", "x(5)", "x(0)"]);
        assert!(verify_certificate(&p, &w("x(5/3) . x(0)^-1"), &cert));
        let (chain, cert) = qgroup_normalize(&Rat::zero());
        assert!(chain.is_empty() && cert.is_empty());
        let (chain, cert) = qgroup_normalize(&Rat::frac(-7, 2));
        assert_eq!(chain.len(), 3);
        assert_eq!(
            cert.entries[0].params.0,
            vec![Rat::int(-7), Rat::frac(-7, 2)]
        );
        assert!(verify_certificate(&p, &w("x(-7/2) . x(0)^-1"), &cert));
        let (_, cert) = qgroup_normalize(&Rat::int(4));
        assert_eq!(cert.len(), 1);
        assert!(verify_certificate(&p, &w("x(4) . x(0)^-1"), &cert));
        assert_eq!(check_relator(&p, &w("x(0) . x(1/2)^-1")), Ok(false));
    }
}
