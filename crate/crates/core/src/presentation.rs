//! Presented groups `<X | R>` whose generator set and relator set are given
//! by predicates, plus the free product, amalgamation and HNN constructions.
//!
//! A relator schema is a word template whose letter indices are expressions
//! in the schema parameters, together with a constraint on the parameters.
//! A schema is decidable when every parameter occurs bare as some index
//! entry: matching a word against the template then recovers the parameters,
//! after which the remaining entries and the constraint are simply checked.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{enumerate_fixed_dim, unpair, Rat, RatVec};
use crate::predicate::{cst, eq, not, or, var, Expr, SetPredicate};
use crate::words::{Family, GenSym, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("generator {gen} has index arity {arity}, above the dimension {dim}")]
    ArityMismatch {
        gen: String,
        arity: usize,
        dim: usize,
    },
    #[error("relator schema {0:?} is only enumerable")]
    SemiDecidableOnly(String),
    #[error("{0} is not a generator")]
    NotAGenerator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Decidable,
    Enumerable,
}

/// One letter of a template: family, exponent, index expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterTemplate {
    pub family: Family,
    pub sign: Sign,
    pub index: Vec<Expr>,
}

impl LetterTemplate {
    pub fn new(family: Family, sign: Sign, index: Vec<Expr>) -> LetterTemplate {
        LetterTemplate {
            family,
            sign,
            index,
        }
    }

    pub fn pos(family: Family, index: Vec<Expr>) -> LetterTemplate {
        LetterTemplate::new(family, Sign::Pos, index)
    }

    pub fn neg(family: Family, index: Vec<Expr>) -> LetterTemplate {
        LetterTemplate::new(family, Sign::Neg, index)
    }

    pub fn inverse(&self) -> LetterTemplate {
        LetterTemplate {
            sign: self.sign.flip(),
            ..self.clone()
        }
    }

    pub fn instantiate(&self, params: &[Rat]) -> Option<Letter> {
        let index: Option<Vec<Rat>> = self.index.iter().map(|e| e.eval(params)).collect();
        Some(Letter {
            gen: GenSym::new(self.family, RatVec::new(index?)),
            sign: self.sign,
        })
    }

    pub fn subst(&self, with: &[Expr]) -> LetterTemplate {
        LetterTemplate {
            family: self.family,
            sign: self.sign,
            index: self.index.iter().map(|e| e.subst(with)).collect(),
        }
    }

    /// Appends a constant index component.
    pub fn tagged(&self, tag: i64) -> LetterTemplate {
        let mut t = self.clone();
        t.index.push(cst(tag));
        t
    }
}

pub fn invert_template(t: &[LetterTemplate]) -> Vec<LetterTemplate> {
    t.iter().rev().map(LetterTemplate::inverse).collect()
}

pub fn instantiate_template(t: &[LetterTemplate], params: &[Rat]) -> Option<Word> {
    t.iter()
        .map(|l| l.instantiate(params))
        .collect::<Option<Vec<_>>>()
        .map(Word)
}

/// Binds bare parameters by matching `t` against `letters` position by
/// position. Returns the bindings for the longest compatible prefix and its
/// length.
pub fn bind_prefix(
    t: &[LetterTemplate],
    letters: &[Letter],
    arity: usize,
) -> (Vec<Option<Rat>>, usize) {
    let mut bound: Vec<Option<Rat>> = vec![None; arity];
    let mut m = 0;
    'outer: for (lt, l) in t.iter().zip(letters) {
        if lt.family != l.gen.family || lt.sign != l.sign || lt.index.len() != l.gen.index.dim() {
            break;
        }
        let mut trial = bound.clone();
        for (e, v) in lt.index.iter().zip(l.gen.index.entries()) {
            if let Some(i) = e.as_var() {
                match &trial[i] {
                    Some(b) if b != v => break 'outer,
                    Some(_) => {}
                    None => trial[i] = Some(v.clone()),
                }
            }
        }
        bound = trial;
        m += 1;
    }
    (bound, m)
}

/// Solves for parameters that occur alone in some index expression of the
/// first `m` template letters, assuming that expression is affine in it.
/// Every solution is re-checked by evaluation.
pub fn solve_affine(t: &[LetterTemplate], letters: &[Letter], m: usize, bound: &mut [Option<Rat>]) {
    loop {
        let mut progress = false;
        for (lt, l) in t.iter().zip(letters).take(m) {
            for (e, v) in lt.index.iter().zip(l.gen.index.entries()) {
                let mut vs = Vec::new();
                e.vars(&mut vs);
                let free: Vec<usize> = vs.into_iter().filter(|i| bound[*i].is_none()).collect();
                if free.len() != 1 {
                    continue;
                }
                let x = free[0];
                let at = |val: Rat, bound: &[Option<Rat>]| {
                    let mut vals: Vec<Rat> = bound
                        .iter()
                        .map(|b| b.clone().unwrap_or_default())
                        .collect();
                    vals[x] = val;
                    e.eval(&vals)
                };
                let (Some(e0), Some(e1)) = (at(Rat::zero(), bound), at(Rat::one(), bound)) else {
                    continue;
                };
                let slope = &e1 - &e0;
                if slope.is_zero() {
                    continue;
                }
                let Ok(sol) = (v - &e0).checked_div(&slope) else {
                    continue;
                };
                if at(sol.clone(), bound).as_ref() == Some(v) {
                    bound[x] = Some(sol);
                    progress = true;
                }
            }
        }
        if !progress {
            return;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatorSchema {
    pub name: String,
    pub arity: usize,
    pub template: Vec<LetterTemplate>,
    pub constraint: SetPredicate,
    pub mode: Mode,
}

impl RelatorSchema {
    /// A schema whose mode is decidable exactly when every parameter occurs
    /// bare in the template.
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        template: Vec<LetterTemplate>,
        constraint: SetPredicate,
    ) -> RelatorSchema {
        let mut s = RelatorSchema {
            name: name.into(),
            arity,
            template,
            constraint,
            mode: Mode::Enumerable,
        };
        if s.all_params_bare() {
            s.mode = Mode::Decidable;
        }
        s
    }

    pub fn all_params_bare(&self) -> bool {
        (0..self.arity).all(|p| {
            self.template
                .iter()
                .any(|l| l.index.iter().any(|e| e.as_var() == Some(p)))
        })
    }

    pub fn instantiate(&self, params: &[Rat]) -> Option<Word> {
        if params.len() != self.arity {
            return None;
        }
        instantiate_template(&self.template, params)
    }

    /// The instance at `params` when the constraint holds.
    pub fn instance(&self, params: &[Rat]) -> Option<Word> {
        if params.len() == self.arity && self.constraint.eval(params) {
            self.instantiate(params)
        } else {
            None
        }
    }

    /// Parameters under which `w` is literally an instance.
    pub fn match_word(&self, w: &Word) -> Option<Vec<Rat>> {
        if w.len() != self.template.len() {
            return None;
        }
        let (bound, m) = bind_prefix(&self.template, w.letters(), self.arity);
        if m != w.len() {
            return None;
        }
        let params: Vec<Rat> = bound.into_iter().collect::<Option<_>>()?;
        (self.instance(&params).as_ref() == Some(w)).then_some(params)
    }

    /// Template for `R` or `R^-1`.
    pub fn oriented(&self, sign: Sign) -> Vec<LetterTemplate> {
        match sign {
            Sign::Pos => self.template.clone(),
            Sign::Neg => invert_template(&self.template),
        }
    }
}

/// The generators of one family: index arity and a predicate on the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorClass {
    pub family: Family,
    pub arity: usize,
    pub pred: SetPredicate,
}

impl GeneratorClass {
    pub fn new(family: Family, arity: usize, pred: SetPredicate) -> GeneratorClass {
        GeneratorClass {
            family,
            arity,
            pred,
        }
    }

    pub fn contains(&self, g: &GenSym) -> bool {
        g.family == self.family && g.index.dim() == self.arity && self.pred.eval(g.index.entries())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub label: String,
    pub dim: usize,
    pub generators: Vec<GeneratorClass>,
    pub relators: Vec<RelatorSchema>,
}

impl Presentation {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        generators: Vec<GeneratorClass>,
        relators: Vec<RelatorSchema>,
    ) -> Presentation {
        Presentation {
            label: label.into(),
            dim,
            generators,
            relators,
        }
    }

    /// Free group on every generator of `family` with index arity `dim`.
    pub fn free(label: impl Into<String>, family: Family, dim: usize) -> Presentation {
        Presentation::new(
            label,
            dim,
            vec![GeneratorClass::new(family, dim, SetPredicate::True)],
            vec![],
        )
    }

    pub fn is_decidable(&self) -> bool {
        self.relators.iter().all(|r| r.mode == Mode::Decidable)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Presentation> {
        serde_json::from_str(s)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (dim {})", self.label, self.dim)?;
        for c in &self.generators {
            writeln!(f, "  gen {}[{}]: {}", c.family.name(), c.arity, c.pred)?;
        }
        for r in &self.relators {
            let t: Vec<String> = r
                .template
                .iter()
                .map(|l| {
                    let idx: Vec<String> = l.index.iter().map(|e| e.to_string()).collect();
                    let e = if l.sign == Sign::Neg { "^-1" } else { "" };
                    format!("{}({}){}", l.family.name(), idx.join(","), e)
                })
                .collect();
            writeln!(
                f,
                "  rel {} [{:?}]: {} | {}",
                r.name,
                r.mode,
                t.join(" . "),
                r.constraint
            )?;
        }
        Ok(())
    }
}

pub fn check_generator(p: &Presentation, g: &GenSym) -> Result<bool, PresentationError> {
    if g.index.dim() > p.dim {
        return Err(PresentationError::ArityMismatch {
            gen: g.to_string(),
            arity: g.index.dim(),
            dim: p.dim,
        });
    }
    Ok(p.generators.iter().any(|c| c.contains(g)))
}

/// Whether every letter of `w` is a generator of `p`.
pub fn check_word(p: &Presentation, w: &Word) -> Result<bool, PresentationError> {
    for l in w.letters() {
        if !check_generator(p, &l.gen)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn check_relator(p: &Presentation, w: &Word) -> Result<bool, PresentationError> {
    if let Some(r) = p.relators.iter().find(|r| r.mode == Mode::Enumerable) {
        return Err(PresentationError::SemiDecidableOnly(r.name.clone()));
    }
    Ok(p.relators.iter().any(|r| r.match_word(w).is_some()))
}

/// Candidate `c`: schema `c mod S` at the parameter vector numbered `c / S`.
/// `None` when the constraint fails there.
pub fn relator_candidate(p: &Presentation, c: u64) -> Option<(usize, RatVec, Word)> {
    let s = p.relators.len() as u64;
    if s == 0 {
        return None;
    }
    let schema = (c % s) as usize;
    let r = &p.relators[schema];
    let params = enumerate_fixed_dim(c / s, r.arity);
    let w = r.instance(params.entries())?;
    Some((schema, params, w))
}

/// Every relator instance, in candidate order.
pub fn relator_stream(p: &Presentation) -> impl Iterator<Item = (u64, usize, RatVec, Word)> + '_ {
    (0u64..).filter_map(move |c| relator_candidate(p, c).map(|(s, v, w)| (c, s, v, w)))
}

/// The `index`-th relator instance. Loops forever when `p` has no
/// instantiable schema, like any enumeration of an empty set.
pub fn enumerate_relators(p: &Presentation, index: u64) -> Word {
    relator_stream(p)
        .nth(index as usize)
        .map(|(_, _, _, w)| w)
        .expect("stream is infinite")
}

// ---------------------------------------------------------------------------
// Constructions

fn tag_class(c: &GeneratorClass, tag: i64) -> GeneratorClass {
    GeneratorClass {
        family: c.family,
        arity: c.arity + 1,
        pred: SetPredicate::conj(vec![c.pred.clone(), eq(var(c.arity), cst(tag))]),
    }
}

fn tag_schema(r: &RelatorSchema, tag: i64, prefix: &str) -> RelatorSchema {
    RelatorSchema {
        name: format!("{prefix}{}", r.name),
        arity: r.arity,
        template: r.template.iter().map(|l| l.tagged(tag)).collect(),
        constraint: r.constraint.clone(),
        mode: r.mode,
    }
}

/// Moves a word of a factor into the free product by appending `tag` to
/// every index.
pub fn tag_word(w: &Word, tag: i64) -> Word {
    Word(
        w.letters()
            .iter()
            .map(|l| {
                let mut idx = l.gen.index.0.clone();
                idx.push(Rat::int(tag));
                Letter {
                    gen: GenSym::new(l.gen.family, RatVec::new(idx)),
                    sign: l.sign,
                }
            })
            .collect(),
    )
}

pub fn free_product(p1: &Presentation, p2: &Presentation) -> Presentation {
    let mut gens: Vec<GeneratorClass> = p1.generators.iter().map(|c| tag_class(c, 1)).collect();
    gens.extend(p2.generators.iter().map(|c| tag_class(c, 2)));
    let mut rels: Vec<RelatorSchema> = p1.relators.iter().map(|r| tag_schema(r, 1, "L.")).collect();
    rels.extend(p2.relators.iter().map(|r| tag_schema(r, 2, "R.")));
    Presentation::new(
        format!("({}) * ({})", p1.label, p2.label),
        p1.dim.max(p2.dim) + 1,
        gens,
        rels,
    )
}

/// A family of words `template(params)` with `constraint(params)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordFamily {
    pub arity: usize,
    pub template: Vec<LetterTemplate>,
    pub constraint: SetPredicate,
}

impl WordFamily {
    pub fn new(
        arity: usize,
        template: Vec<LetterTemplate>,
        constraint: SetPredicate,
    ) -> WordFamily {
        WordFamily {
            arity,
            template,
            constraint,
        }
    }

    /// All generators of one class, as single-letter words.
    pub fn generators(class: &GeneratorClass) -> WordFamily {
        WordFamily {
            arity: class.arity,
            template: vec![LetterTemplate::pos(
                class.family,
                (0..class.arity).map(var).collect(),
            )],
            constraint: class.pred.clone(),
        }
    }

    pub fn member(&self, params: &[Rat]) -> Option<Word> {
        if self.constraint.eval(params) {
            instantiate_template(&self.template, params)
        } else {
            None
        }
    }
}

/// Image of one kind of letter: letters of `family` with index arity
/// `arity` satisfying `pred` map to `image`. Variables `0..outer` refer to
/// the map's own parameters, the next `arity` variables to the letter index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterCase {
    pub family: Family,
    pub arity: usize,
    pub pred: SetPredicate,
    pub image: Vec<LetterTemplate>,
}

/// A computable map on letters, given case by case. Letters matching no case
/// are fixed when `identity_default` holds and unmapped otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterMap {
    pub outer: usize,
    pub cases: Vec<LetterCase>,
    pub identity_default: bool,
}

impl LetterMap {
    pub fn new(outer: usize, cases: Vec<LetterCase>, identity_default: bool) -> LetterMap {
        LetterMap {
            outer,
            cases,
            identity_default,
        }
    }

    pub fn identity() -> LetterMap {
        LetterMap::new(0, vec![], true)
    }

    /// Image of a letter for the map's parameters `outer`.
    pub fn apply_letter(&self, outer: &[Rat], l: &Letter) -> Option<Word> {
        let mut vars = outer.to_vec();
        vars.extend(l.gen.index.entries().iter().cloned());
        for c in &self.cases {
            if c.family == l.gen.family && c.arity == l.gen.index.dim() && c.pred.eval(&vars) {
                let img = instantiate_template(&c.image, &vars)?;
                return Some(if l.sign == Sign::Pos {
                    img
                } else {
                    img.inverse()
                });
            }
        }
        self.identity_default.then(|| Word::letter(l.clone()))
    }

    pub fn apply(&self, outer: &[Rat], w: &Word) -> Option<Word> {
        let mut out = Word::empty();
        for l in w.letters() {
            out = out.juxtapose(&self.apply_letter(outer, l)?);
        }
        Some(out.reduced())
    }

    /// Symbolic image of a template: one alternative per combination of
    /// cases, each with the condition selecting it. `outer` gives the map's
    /// parameters as expressions in the template's variables.
    pub fn apply_template(
        &self,
        outer: &[Expr],
        t: &[LetterTemplate],
    ) -> Vec<(Vec<LetterTemplate>, SetPredicate)> {
        let mut alts: Vec<(Vec<LetterTemplate>, Vec<SetPredicate>)> = vec![(vec![], vec![])];
        for lt in t {
            let mut with = outer.to_vec();
            with.extend(lt.index.iter().cloned());
            let mut options: Vec<(Vec<LetterTemplate>, SetPredicate)> = Vec::new();
            let mut taken = Vec::new();
            for c in &self.cases {
                if c.family != lt.family || c.arity != lt.index.len() {
                    continue;
                }
                let pred = c.pred.subst(&with);
                let img: Vec<LetterTemplate> = c.image.iter().map(|l| l.subst(&with)).collect();
                let img = if lt.sign == Sign::Pos {
                    img
                } else {
                    invert_template(&img)
                };
                let guard = if taken.is_empty() {
                    pred.clone()
                } else {
                    SetPredicate::conj(vec![not(or(taken.clone())), pred.clone()])
                };
                options.push((img, guard));
                taken.push(pred);
            }
            if self.identity_default {
                let guard = if taken.is_empty() {
                    SetPredicate::True
                } else {
                    not(or(taken.clone()))
                };
                options.push((vec![lt.clone()], guard));
            }
            let mut next = Vec::new();
            for (acc, conds) in &alts {
                for (img, pred) in &options {
                    let mut a = acc.clone();
                    a.extend(img.iter().cloned());
                    let mut c = conds.clone();
                    c.push(pred.clone());
                    next.push((a, c));
                }
            }
            alts = next;
        }
        alts.into_iter()
            .map(|(t, c)| (t, SetPredicate::conj(c)))
            .collect()
    }

    /// `other` after `self`, as a single letter map.
    pub fn then(&self, other: &LetterMap) -> LetterMap {
        assert_eq!(
            other.outer, 0,
            "only parameter-free maps can be post-composed"
        );
        let mut cases = Vec::new();
        for c in &self.cases {
            for (img, pred) in other.apply_template(&[], &c.image) {
                cases.push(LetterCase {
                    family: c.family,
                    arity: c.arity,
                    pred: SetPredicate::conj(vec![c.pred.clone(), pred]),
                    image: img,
                });
            }
        }
        LetterMap::new(
            self.outer,
            cases,
            self.identity_default && other.identity_default,
        )
    }
}

/// Realization of an isomorphism between subgroups by letter maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoRealization {
    pub forward: LetterMap,
    pub backward: LetterMap,
}

impl IsoRealization {
    pub fn new(forward: LetterMap, backward: LetterMap) -> IsoRealization {
        IsoRealization { forward, backward }
    }

    pub fn identity() -> IsoRealization {
        IsoRealization::new(LetterMap::identity(), LetterMap::identity())
    }

    pub fn inverse(&self) -> IsoRealization {
        IsoRealization::new(self.backward.clone(), self.forward.clone())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &IsoRealization) -> IsoRealization {
        IsoRealization::new(
            self.forward.then(&other.forward),
            other.backward.then(&self.backward),
        )
    }
}

/// `p1 * p2` with `phi(v) = v` for every word `v` of `a_gens` (words of
/// `p1`), where `phi = iso.forward` lands in `p2`.
pub fn amalgamate(
    p1: &Presentation,
    p2: &Presentation,
    a_gens: &[WordFamily],
    iso: &IsoRealization,
) -> Presentation {
    let mut out = free_product(p1, p2);
    out.label = format!("({}) *_A ({})", p1.label, p2.label);
    for (fi, fam) in a_gens.iter().enumerate() {
        let outer: Vec<Expr> = Vec::new();
        for (ci, (img, pred)) in iso
            .forward
            .apply_template(&outer, &fam.template)
            .into_iter()
            .enumerate()
        {
            let mut template: Vec<LetterTemplate> = img.iter().map(|l| l.tagged(2)).collect();
            template.extend(invert_template(&fam.template).iter().map(|l| l.tagged(1)));
            out.relators.push(RelatorSchema::new(
                format!("amalg{fi}.{ci}"),
                fam.arity,
                template,
                SetPredicate::conj(vec![fam.constraint.clone(), pred]),
            ));
        }
    }
    out
}

/// Stable letters `family(idx)` for every index satisfying `pred`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableLetters {
    pub family: Family,
    pub arity: usize,
    pub pred: SetPredicate,
    /// Generators of the associated subgroup; variables `0..arity` are the
    /// stable letter's index, the family's own parameters follow.
    pub assoc: Vec<WordFamily>,
    /// Conjugation action, parametrized by the stable letter's index.
    pub iso: LetterMap,
}

/// Adds each family of stable letters `t` with relators
/// `phi(v) . t . v^-1 . t^-1`, i.e. `t v t^-1 = phi(v)`.
pub fn hnn_extend(p: &Presentation, stable: &[StableLetters]) -> Presentation {
    let mut out = p.clone();
    let names: Vec<&str> = stable.iter().map(|s| s.family.name()).collect();
    out.label = format!("{}; {}", p.label, names.join(", "));
    for s in stable {
        out.generators
            .push(GeneratorClass::new(s.family, s.arity, s.pred.clone()));
        out.dim = out.dim.max(s.arity);
        let idx: Vec<Expr> = (0..s.arity).map(var).collect();
        let t = LetterTemplate::pos(s.family, idx.clone());
        for (fi, fam) in s.assoc.iter().enumerate() {
            for (ci, (img, pred)) in s
                .iso
                .apply_template(&idx, &fam.template)
                .into_iter()
                .enumerate()
            {
                let mut template = img;
                template.push(t.clone());
                template.extend(invert_template(&fam.template));
                template.push(t.inverse());
                out.relators.push(RelatorSchema::new(
                    format!("{}{fi}.{ci}", s.family.name()),
                    fam.arity,
                    template,
                    SetPredicate::conj(vec![s.pred.clone(), fam.constraint.clone(), pred]),
                ));
            }
        }
    }
    out
}

/// Decodes candidate `c` as a family index and a parameter vector.
pub fn family_candidate(families: &[WordFamily], c: u64) -> Option<(usize, Word)> {
    if families.is_empty() {
        return None;
    }
    let (f, k) = unpair(c);
    let fi = (f % families.len() as u64) as usize;
    let fam = &families[fi];
    fam.member(enumerate_fixed_dim(k, fam.arity).entries())
        .map(|w| (fi, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::{is_natural, ne};

    fn x1(e: Expr) -> Vec<Expr> {
        vec![e]
    }

    /// `<x_t | x_t x_s = x_(t+s)>`, i.e. the rationals under addition.
    fn additive() -> Presentation {
        Presentation::new(
            "additive",
            1,
            vec![GeneratorClass::new(Family::X, 1, SetPredicate::True)],
            vec![RelatorSchema::new(
                "sum",
                2,
                vec![
                    LetterTemplate::pos(Family::X, x1(var(0))),
                    LetterTemplate::pos(Family::X, x1(var(1))),
                    LetterTemplate::neg(Family::X, x1(var(0) + var(1))),
                ],
                SetPredicate::True,
            )],
        )
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn relator_matching() {
        let p = additive();
        assert_eq!(
            check_relator(&p, &w("x(1/3) . x(1/4) . x(7/12)^-1")),
            Ok(true)
        );
        assert_eq!(
            check_relator(&p, &w("x(1/3) . x(1/4) . x(1/2)^-1")),
            Ok(false)
        );
        assert_eq!(check_relator(&p, &Word::empty()), Ok(false));
        assert_eq!(check_relator(&p, &w("x(1) . x(1) . x(2)")), Ok(false));
        assert_eq!(
            p.relators[0].match_word(&w("x(1) . x(2) . x(3)^-1")),
            Some(vec![Rat::int(1), Rat::int(2)])
        );
    }

    #[test]
    fn non_bare_parameters_make_a_schema_enumerable() {
        let s = RelatorSchema::new(
            "scaled",
            2,
            vec![
                LetterTemplate::pos(Family::X, x1(var(0) * var(1))),
                LetterTemplate::neg(Family::X, x1(var(0))),
            ],
            is_natural(var(1)),
        );
        assert_eq!(s.mode, Mode::Enumerable);
        let mut p = additive();
        p.relators.push(s);
        assert!(matches!(
            check_relator(&p, &w("x(1)")),
            Err(PresentationError::SemiDecidableOnly(_))
        ));
    }

    #[test]
    fn generator_checks() {
        let p = Presentation::free("free", Family::X, 1);
        assert_eq!(
            check_generator(&p, &GenSym::with_index(Family::X, &[Rat::frac(2, 7)])),
            Ok(true)
        );
        assert_eq!(check_generator(&p, &GenSym::y()), Ok(false));
        assert!(matches!(
            check_generator(&p, &GenSym::x(1, Rat::one())),
            Err(PresentationError::ArityMismatch {
                arity: 2,
                dim: 1,
                ..
            })
        ));
    }

    #[test]
    fn relator_enumeration() {
        let p = additive();
        let first = enumerate_relators(&p, 0);
        assert_eq!(first, w("x(0) . x(0) . x(0)^-1"));
        let a: Vec<Word> = (0..50).map(|i| enumerate_relators(&p, i)).collect();
        let b: Vec<Word> = (0..50).map(|i| enumerate_relators(&p, i)).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| check_relator(&p, r) == Ok(true)));
    }

    #[test]
    fn free_product_tags_factors() {
        let p = free_product(&additive(), &Presentation::free("f", Family::Y, 0));
        assert_eq!(p.dim, 2);
        assert_eq!(p.relators.len(), 1);
        assert_eq!(
            check_generator(
                &p,
                &GenSym::with_index(Family::X, &[Rat::int(3), Rat::int(1)])
            ),
            Ok(true)
        );
        assert_eq!(
            check_generator(
                &p,
                &GenSym::with_index(Family::X, &[Rat::int(3), Rat::int(2)])
            ),
            Ok(false)
        );
        assert_eq!(
            check_generator(&p, &GenSym::with_index(Family::Y, &[Rat::int(2)])),
            Ok(true)
        );
        assert_eq!(
            check_generator(&p, &GenSym::with_index(Family::Y, &[Rat::int(1)])),
            Ok(false)
        );
        let r = tag_word(&w("x(1) . x(2) . x(3)^-1"), 1);
        assert_eq!(check_relator(&p, &r), Ok(true));
        let free2 = free_product(
            &Presentation::free("a", Family::X, 1),
            &Presentation::free("b", Family::X, 1),
        );
        assert!(free2.relators.is_empty());
    }

    #[test]
    fn letter_map_cases() {
        // x(i, s) -> x(i, s + t) when i equals the map's first parameter
        let shift = LetterMap::new(
            2,
            vec![LetterCase {
                family: Family::X,
                arity: 2,
                pred: eq(var(2), var(0)),
                image: vec![LetterTemplate::pos(
                    Family::X,
                    vec![var(2), var(3) + var(1)],
                )],
            }],
            true,
        );
        let params = [Rat::int(2), Rat::int(5)];
        let word = w("x(1,3)^-1 . x(2,3)^-1 . y . x(2,3) . x(1,3)");
        assert_eq!(
            shift.apply(&params, &word),
            Some(w("x(1,3)^-1 . x(2,8)^-1 . y . x(2,8) . x(1,3)"))
        );
        let alts = shift.apply_template(
            &[var(0), var(1)],
            &[
                LetterTemplate::pos(Family::X, vec![var(2), var(3)]),
                LetterTemplate::pos(Family::Y, vec![]),
            ],
        );
        assert_eq!(alts.len(), 2);
        let vals = [Rat::int(1), Rat::int(4), Rat::int(1), Rat::int(9)];
        let hits: Vec<_> = alts.iter().filter(|(_, c)| c.eval(&vals)).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(
            instantiate_template(&hits[0].0, &vals),
            Some(w("x(1,13) . y"))
        );
    }

    #[test]
    fn amalgam_over_trivial_subgroup_is_free_product() {
        let p1 = additive();
        let p2 = Presentation::free("f", Family::X, 1);
        assert_eq!(
            amalgamate(&p1, &p2, &[], &IsoRealization::identity()).relators,
            free_product(&p1, &p2).relators
        );
    }

    #[test]
    fn amalgam_of_two_embeddings() {
        // G = <x_s> free; psi'(x_s) = x_(s+1) into L, phi'(x_s) = x_(2s) into K.
        // P = <K * L | phi'(psi'^-1(z)) = z, z in psi'(X)>
        let k = Presentation::free("K", Family::X, 1);
        let l = Presentation::free("L", Family::X, 1);
        let one = |img: Expr, pre: Expr| {
            LetterMap::new(
                0,
                vec![LetterCase {
                    family: Family::X,
                    arity: 1,
                    pred: SetPredicate::True,
                    image: vec![LetterTemplate::pos(Family::X, vec![img.subst(&[pre])])],
                }],
                false,
            )
        };
        let psi_inv = one(var(0) - cst(1i64), var(0));
        let psi = one(var(0) + cst(1i64), var(0));
        let phi = one(var(0) * cst(2i64), var(0));
        let phi_inv = one(var(0) / cst(2i64), var(0));
        let iso = IsoRealization::new(psi_inv, psi).then(&IsoRealization::new(phi, phi_inv));
        let a_gens = vec![WordFamily::generators(&GeneratorClass::new(
            Family::X,
            1,
            SetPredicate::True,
        ))];
        let p = amalgamate(&l, &k, &a_gens, &iso);
        assert_eq!(p.relators.len(), 1);
        let r = &p.relators[0];
        assert_eq!(r.template.len(), 2);
        assert_eq!(r.mode, Mode::Decidable);
        // z = x_L(4) = psi'(x(3)) is identified with phi'(x(3)) = x_K(6)
        let inst = r.instance(&[Rat::int(4)]).unwrap();
        assert_eq!(inst, w("x(6,2) . x(4,1)^-1"));
        assert_eq!(check_relator(&p, &inst), Ok(true));
        assert_eq!(check_relator(&p, &w("x(7,2) . x(4,1)^-1")), Ok(false));
        let fwd = iso.forward.apply(&[], &w("x(5)")).unwrap();
        assert_eq!(iso.backward.apply(&[], &fwd), Some(w("x(5)")));
        for (_, _, _, rel) in relator_stream(&p).take(40) {
            assert_eq!(check_relator(&p, &rel), Ok(true));
        }
    }

    #[test]
    fn hnn_with_trivial_subgroup_adds_free_letter() {
        let base = additive();
        let ext = hnn_extend(
            &base,
            &[StableLetters {
                family: Family::T,
                arity: 0,
                pred: SetPredicate::True,
                assoc: vec![],
                iso: LetterMap::identity(),
            }],
        );
        assert_eq!(ext.relators.len(), base.relators.len());
        assert_eq!(check_generator(&ext, &GenSym::bare(Family::T)), Ok(true));
    }

    #[test]
    fn hnn_scaling_letters_exclude_zero() {
        let base = Presentation::new(
            "G",
            2,
            vec![
                GeneratorClass::new(Family::X, 2, is_natural(var(0))),
                GeneratorClass::new(Family::Y, 0, SetPredicate::True),
            ],
            vec![],
        );
        let scale = LetterMap::new(
            2,
            vec![LetterCase {
                family: Family::X,
                arity: 2,
                pred: eq(var(2), var(0)),
                image: vec![LetterTemplate::pos(
                    Family::X,
                    vec![var(2), var(3) * var(1)],
                )],
            }],
            true,
        );
        let assoc = vec![
            WordFamily::new(
                4,
                vec![LetterTemplate::pos(Family::X, vec![var(2), var(3)])],
                is_natural(var(2)),
            ),
            WordFamily::new(
                2,
                vec![LetterTemplate::pos(Family::Y, vec![])],
                SetPredicate::True,
            ),
        ];
        let ext = hnn_extend(
            &base,
            &[StableLetters {
                family: Family::M,
                arity: 2,
                pred: SetPredicate::conj(vec![is_natural(var(0)), ne(var(1), cst(0i64))]),
                assoc,
                iso: scale,
            }],
        );
        assert_eq!(ext.dim, 2);
        // x family splits into j = i and j != i; y is fixed
        assert_eq!(ext.relators.len(), 3);
        assert!(ext.is_decidable());
        let good = w("x(1,6) . m(1,3) . x(1,2)^-1 . m(1,3)^-1");
        assert_eq!(check_relator(&ext, &good), Ok(true));
        let commute = w("x(2,2) . m(1,3) . x(2,2)^-1 . m(1,3)^-1");
        assert_eq!(check_relator(&ext, &commute), Ok(true));
        let zero = w("x(1,0) . m(1,0) . x(1,2)^-1 . m(1,0)^-1");
        assert_eq!(check_relator(&ext, &zero), Ok(false));
        assert_eq!(check_generator(&ext, &GenSym::m(1, Rat::zero())), Ok(false));
        let json = ext.to_json().unwrap();
        assert_eq!(Presentation::from_json(&json).unwrap(), ext);
    }
}
