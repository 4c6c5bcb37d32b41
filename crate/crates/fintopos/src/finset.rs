//! A fully computable model of an elementary topos with countable colimits:
//! finite sets, total function tables, canonical subobjects, Heyting algebra
//! structure on subobject lattices, the quantifier adjoints, and power
//! objects.
//!
//! Subobjects are canonical subsets of an ambient object's label set, so
//! subobject equality is plain subset equality and every chosen construction
//! is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Element labels: nested tuples, subsets and tags over a base alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// The element of the terminal object.
    Unit,
    /// The two elements of Ω.
    Truth(bool),
    /// An element of a base object.
    Atom(String),
    Pair(Box<Label>, Box<Label>),
    /// An element of a power object: a canonical subset label.
    Subset(BTreeSet<Label>),
    /// Disjoint-union tag, used by pushouts and the oracle colimit.
    Tagged(usize, Box<Label>),
}

impl Label {
    pub fn atom(s: impl Into<String>) -> Label {
        Label::Atom(s.into())
    }

    pub fn pair(l: Label, r: Label) -> Label {
        Label::Pair(Box::new(l), Box::new(r))
    }

    pub fn subset(it: impl IntoIterator<Item = Label>) -> Label {
        Label::Subset(it.into_iter().collect())
    }

    pub fn tagged(tag: usize, inner: Label) -> Label {
        Label::Tagged(tag, Box::new(inner))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit => write!(f, "*"),
            Label::Truth(b) => write!(f, "{b}"),
            Label::Atom(s) => write!(f, "{s}"),
            Label::Pair(l, r) => write!(f, "({l},{r})"),
            Label::Subset(s) => {
                write!(f, "{{")?;
                for (i, l) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "}}")
            }
            Label::Tagged(t, l) => write!(f, "{t}#{l}"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FinSetError {
    #[error(
        "composition domain mismatch: cod of inner is {inner_cod}, dom of outer is {outer_dom}"
    )]
    ComposeMismatch {
        inner_cod: String,
        outer_dom: String,
    },
    #[error("morphism table is not total: missing {0}")]
    MissingTableEntry(Label),
    #[error("table value {0} lies outside the codomain")]
    ValueOutsideCodomain(Label),
    #[error("morphisms are not parallel")]
    NotParallel,
    #[error("morphisms do not share a codomain")]
    CodomainMismatch,
    #[error("morphisms do not share a domain")]
    DomainMismatch,
    #[error("pairing requires a common domain")]
    PairingDomainMismatch,
    #[error("subset contains a label outside the ambient object")]
    SubsetOutsideAmbient,
    #[error("subobjects live over different ambient objects")]
    AmbientMismatch,
    #[error("countable join did not stabilize within the guard bound {cap}")]
    JoinGuardExceeded { cap: usize },
    #[error("expected a morphism into Omega")]
    NotACharacteristicMap,
    #[error("transpose expects a morphism from a product into Omega")]
    NotTransposable,
    #[error("power object of a {size}-element object exceeds the materialization bound")]
    PowerTooLarge { size: usize },
    #[error("image construction disagrees with the direct range (internal bug)")]
    ImageDisagreement,
}

/// A finite object: a canonical (sorted, duplicate-free) list of labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FinObj {
    elements: Vec<Label>,
}

impl FinObj {
    pub fn new(elements: impl IntoIterator<Item = Label>) -> FinObj {
        let set: BTreeSet<Label> = elements.into_iter().collect();
        FinObj {
            elements: set.into_iter().collect(),
        }
    }

    pub fn empty() -> FinObj {
        FinObj { elements: vec![] }
    }

    /// The chosen terminal object.
    pub fn unit() -> FinObj {
        FinObj::new([Label::Unit])
    }

    /// A base object with elements `a0 … a(n-1)` for a lowercase prefix.
    pub fn numbered(prefix: &str, n: usize) -> FinObj {
        FinObj::new((0..n).map(|i| Label::atom(format!("{prefix}{i}"))))
    }

    pub fn elements(&self) -> &[Label] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.elements.binary_search(l).is_ok()
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.elements.binary_search(l).ok()
    }
}

/// A morphism of finite sets: a total table from `dom` labels to `cod` labels.
/// Equality is extensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMor {
    pub dom: FinObj,
    pub cod: FinObj,
    table: BTreeMap<Label, Label>,
}

impl Serialize for FinMor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("dom", &self.dom)?;
        m.serialize_entry("cod", &self.cod)?;
        let table: BTreeMap<String, String> = self
            .table
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        m.serialize_entry("table", &table)?;
        m.end()
    }
}

impl FinMor {
    pub fn new(
        dom: FinObj,
        cod: FinObj,
        table: BTreeMap<Label, Label>,
    ) -> Result<FinMor, FinSetError> {
        for x in dom.elements() {
            match table.get(x) {
                None => return Err(FinSetError::MissingTableEntry(x.clone())),
                Some(v) if !cod.contains(v) => {
                    return Err(FinSetError::ValueOutsideCodomain(v.clone()))
                }
                _ => {}
            }
        }
        let table: BTreeMap<Label, Label> =
            table.into_iter().filter(|(k, _)| dom.contains(k)).collect();
        Ok(FinMor { dom, cod, table })
    }

    pub fn from_fn(
        dom: FinObj,
        cod: FinObj,
        f: impl Fn(&Label) -> Label,
    ) -> Result<FinMor, FinSetError> {
        let table = dom.elements().iter().map(|x| (x.clone(), f(x))).collect();
        FinMor::new(dom, cod, table)
    }

    pub fn apply(&self, x: &Label) -> &Label {
        &self.table[x]
    }

    pub fn table(&self) -> &BTreeMap<Label, Label> {
        &self.table
    }

    pub fn is_mono(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.table.values().all(|v| seen.insert(v.clone()))
    }

    pub fn range(&self) -> BTreeSet<Label> {
        self.table.values().cloned().collect()
    }
}

pub fn identity(a: &FinObj) -> FinMor {
    FinMor::from_fn(a.clone(), a.clone(), |x| x.clone()).expect("identity is total")
}

pub fn compose(outer: &FinMor, inner: &FinMor) -> Result<FinMor, FinSetError> {
    if inner.cod != outer.dom {
        return Err(FinSetError::ComposeMismatch {
            inner_cod: format!("{:?}", inner.cod.size()),
            outer_dom: format!("{:?}", outer.dom.size()),
        });
    }
    FinMor::from_fn(inner.dom.clone(), outer.cod.clone(), |x| {
        outer.apply(inner.apply(x)).clone()
    })
}

/// A canonical subobject: a subset of the ambient object's labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subobj {
    pub ambient: FinObj,
    subset: BTreeSet<Label>,
}

impl Serialize for Subobj {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("ambient", &self.ambient)?;
        let subset: Vec<String> = self.subset.iter().map(|l| l.to_string()).collect();
        m.serialize_entry("subset", &subset)?;
        m.end()
    }
}

impl Subobj {
    pub fn new(
        ambient: FinObj,
        subset: impl IntoIterator<Item = Label>,
    ) -> Result<Subobj, FinSetError> {
        let subset: BTreeSet<Label> = subset.into_iter().collect();
        if !subset.iter().all(|l| ambient.contains(l)) {
            return Err(FinSetError::SubsetOutsideAmbient);
        }
        Ok(Subobj { ambient, subset })
    }

    pub fn top(ambient: &FinObj) -> Subobj {
        Subobj {
            ambient: ambient.clone(),
            subset: ambient.elements().iter().cloned().collect(),
        }
    }

    pub fn bottom(ambient: &FinObj) -> Subobj {
        Subobj {
            ambient: ambient.clone(),
            subset: BTreeSet::new(),
        }
    }

    pub fn subset(&self) -> &BTreeSet<Label> {
        &self.subset
    }

    pub fn size(&self) -> usize {
        self.subset.len()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.subset.contains(l)
    }

    pub fn is_full(&self) -> bool {
        self.subset.len() == self.ambient.size()
    }

    /// The domain of the canonical mono, as an object in its own right.
    pub fn as_object(&self) -> FinObj {
        FinObj::new(self.subset.iter().cloned())
    }

    /// The canonical inclusion into the ambient object.
    pub fn inclusion(&self) -> FinMor {
        FinMor::from_fn(self.as_object(), self.ambient.clone(), |x| x.clone())
            .expect("inclusion is total")
    }
}

fn require_same_ambient(x: &Subobj, y: &Subobj) -> Result<(), FinSetError> {
    if x.ambient != y.ambient {
        return Err(FinSetError::AmbientMismatch);
    }
    Ok(())
}

pub fn sub_meet(x: &Subobj, y: &Subobj) -> Result<Subobj, FinSetError> {
    require_same_ambient(x, y)?;
    Ok(Subobj {
        ambient: x.ambient.clone(),
        subset: x.subset.intersection(&y.subset).cloned().collect(),
    })
}

pub fn sub_join(x: &Subobj, y: &Subobj) -> Result<Subobj, FinSetError> {
    require_same_ambient(x, y)?;
    Ok(Subobj {
        ambient: x.ambient.clone(),
        subset: x.subset.union(&y.subset).cloned().collect(),
    })
}

/// Heyting implication: the elements where membership in `x` implies
/// membership in `y`.
pub fn sub_implies(x: &Subobj, y: &Subobj) -> Result<Subobj, FinSetError> {
    require_same_ambient(x, y)?;
    let subset = x
        .ambient
        .elements()
        .iter()
        .filter(|e| !x.subset.contains(e) || y.subset.contains(e))
        .cloned()
        .collect();
    Ok(Subobj {
        ambient: x.ambient.clone(),
        subset,
    })
}

pub fn sub_leq(x: &Subobj, y: &Subobj) -> Result<bool, FinSetError> {
    require_same_ambient(x, y)?;
    Ok(x.subset.is_subset(&y.subset))
}

/// The Heyting algebra Sub(E) of an object, with its cached top and bottom.
#[derive(Clone, Debug)]
pub struct HeytingStructure {
    pub ambient: FinObj,
    pub top: Subobj,
    pub bottom: Subobj,
}

impl HeytingStructure {
    pub fn new(ambient: FinObj) -> HeytingStructure {
        let top = Subobj::top(&ambient);
        let bottom = Subobj::bottom(&ambient);
        HeytingStructure {
            ambient,
            top,
            bottom,
        }
    }

    /// All subobjects of the ambient object, in canonical order.
    pub fn all_subobjects(&self) -> Vec<Subobj> {
        let elems = self.ambient.elements();
        let n = elems.len();
        (0..(1usize << n))
            .map(|mask| {
                let subset = elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| l.clone());
                Subobj::new(self.ambient.clone(), subset).expect("subset of ambient")
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Limits

/// Chosen product, with elements the ordered pairs of labels.
pub fn product(a: &FinObj, b: &FinObj) -> (FinObj, FinMor, FinMor) {
    let mut elements = Vec::with_capacity(a.size() * b.size());
    for x in a.elements() {
        for y in b.elements() {
            elements.push(Label::pair(x.clone(), y.clone()));
        }
    }
    let obj = FinObj::new(elements);
    let fst = FinMor::from_fn(obj.clone(), a.clone(), |l| match l {
        Label::Pair(x, _) => (**x).clone(),
        _ => unreachable!("product elements are pairs"),
    })
    .expect("projection total");
    let snd = FinMor::from_fn(obj.clone(), b.clone(), |l| match l {
        Label::Pair(_, y) => (**y).clone(),
        _ => unreachable!("product elements are pairs"),
    })
    .expect("projection total");
    (obj, fst, snd)
}

/// The pairing ⟨f,g⟩ of two morphisms with common domain.
pub fn pairing(f: &FinMor, g: &FinMor) -> Result<FinMor, FinSetError> {
    if f.dom != g.dom {
        return Err(FinSetError::PairingDomainMismatch);
    }
    let (prod, _, _) = product(&f.cod, &g.cod);
    FinMor::from_fn(f.dom.clone(), prod, |x| {
        Label::pair(f.apply(x).clone(), g.apply(x).clone())
    })
}

pub fn equalizer(f: &FinMor, g: &FinMor) -> Result<Subobj, FinSetError> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(FinSetError::NotParallel);
    }
    let subset = f
        .dom
        .elements()
        .iter()
        .filter(|x| f.apply(x) == g.apply(x))
        .cloned();
    Subobj::new(f.dom.clone(), subset)
}

/// Canonical pullback: the subset {(x,y) | f(x) = g(y)} of the product.
pub fn pullback(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor, FinMor), FinSetError> {
    if f.cod != g.cod {
        return Err(FinSetError::CodomainMismatch);
    }
    let mut elements = Vec::new();
    for x in f.dom.elements() {
        for y in g.dom.elements() {
            if f.apply(x) == g.apply(y) {
                elements.push(Label::pair(x.clone(), y.clone()));
            }
        }
    }
    let obj = FinObj::new(elements);
    let p1 = FinMor::from_fn(obj.clone(), f.dom.clone(), |l| match l {
        Label::Pair(x, _) => (**x).clone(),
        _ => unreachable!(),
    })?;
    let p2 = FinMor::from_fn(obj.clone(), g.dom.clone(), |l| match l {
        Label::Pair(_, y) => (**y).clone(),
        _ => unreachable!(),
    })?;
    Ok((obj, p1, p2))
}

// ---------------------------------------------------------------------------
// Colimits via union-find

/// Union-find over a fixed label universe, used for quotient constructions.
pub struct UnionFind {
    universe: Vec<Label>,
    index: BTreeMap<Label, usize>,
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(universe: impl IntoIterator<Item = Label>) -> UnionFind {
        let universe: Vec<Label> = universe.into_iter().collect();
        let index = universe
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let parent = (0..universe.len()).collect();
        UnionFind {
            universe,
            index,
            parent,
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }

    fn root(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    pub fn unite(&mut self, a: &Label, b: &Label) {
        let (i, j) = (self.index[a], self.index[b]);
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[rj] = ri;
        }
    }

    pub fn same(&mut self, a: &Label, b: &Label) -> bool {
        let (i, j) = (self.index[a], self.index[b]);
        self.find(i) == self.find(j)
    }

    /// Classes with the least member label as canonical representative.
    pub fn classes(&self) -> BTreeMap<Label, BTreeSet<Label>> {
        let mut grouped: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
        for i in 0..self.universe.len() {
            let r = self.root(i);
            grouped
                .entry(r)
                .or_default()
                .insert(self.universe[i].clone());
        }
        grouped
            .into_values()
            .map(|class| {
                let least = class.iter().next().expect("nonempty class").clone();
                (least, class)
            })
            .collect()
    }

    /// Least member of the class of `l`.
    pub fn representative(&self, l: &Label) -> Label {
        let r = self.root(self.index[l]);
        let mut least: Option<usize> = None;
        for i in 0..self.universe.len() {
            if self.root(i) == r {
                match least {
                    None => least = Some(i),
                    Some(m) if self.universe[i] < self.universe[m] => least = Some(i),
                    _ => {}
                }
            }
        }
        self.universe[least.expect("class of an existing label")].clone()
    }
}

/// Pushout of a span: the quotient of the tagged disjoint union of the two
/// codomains by the closure of f(x) ~ g(x). Class labels are the least member.
pub fn pushout(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor, FinMor), FinSetError> {
    if f.dom != g.dom {
        return Err(FinSetError::DomainMismatch);
    }
    let tagged: Vec<Label> = f
        .cod
        .elements()
        .iter()
        .map(|b| Label::tagged(0, b.clone()))
        .chain(g.cod.elements().iter().map(|c| Label::tagged(1, c.clone())))
        .collect();
    let mut uf = UnionFind::new(tagged);
    for x in f.dom.elements() {
        uf.unite(
            &Label::tagged(0, f.apply(x).clone()),
            &Label::tagged(1, g.apply(x).clone()),
        );
    }
    let classes = uf.classes();
    let mut rep: BTreeMap<Label, Label> = BTreeMap::new();
    for (least, class) in &classes {
        for member in class {
            rep.insert(member.clone(), least.clone());
        }
    }
    let obj = FinObj::new(classes.keys().cloned());
    let inj1 = FinMor::from_fn(f.cod.clone(), obj.clone(), |b| {
        rep[&Label::tagged(0, b.clone())].clone()
    })?;
    let inj2 = FinMor::from_fn(g.cod.clone(), obj.clone(), |c| {
        rep[&Label::tagged(1, c.clone())].clone()
    })?;
    Ok((obj, inj1, inj2))
}

/// Image of a morphism: the equalizer of the two injections of its
/// self-pushout, cross-checked against the direct range.
pub fn image(f: &FinMor) -> Result<Subobj, FinSetError> {
    let (_, i1, i2) = pushout(f, f)?;
    let via_pushout: BTreeSet<Label> = f
        .cod
        .elements()
        .iter()
        .filter(|b| i1.apply(b) == i2.apply(b))
        .cloned()
        .collect();
    let direct = f.range();
    if via_pushout != direct {
        return Err(FinSetError::ImageDisagreement);
    }
    Subobj::new(f.cod.clone(), direct)
}

// ---------------------------------------------------------------------------
// Quantifier adjoints

pub fn inv_image(f: &FinMor, y: &Subobj) -> Result<Subobj, FinSetError> {
    if y.ambient != f.cod {
        return Err(FinSetError::AmbientMismatch);
    }
    let subset = f
        .dom
        .elements()
        .iter()
        .filter(|x| y.contains(f.apply(x)))
        .cloned();
    Subobj::new(f.dom.clone(), subset)
}

/// Left adjoint to preimage: there exists a preimage point inside `x`.
pub fn exists_f(f: &FinMor, x: &Subobj) -> Result<Subobj, FinSetError> {
    if x.ambient != f.dom {
        return Err(FinSetError::AmbientMismatch);
    }
    let subset: BTreeSet<Label> = x.subset().iter().map(|e| f.apply(e).clone()).collect();
    Subobj::new(f.cod.clone(), subset)
}

/// Right adjoint to preimage: every preimage point lies inside `x`.
pub fn forall_f(f: &FinMor, x: &Subobj) -> Result<Subobj, FinSetError> {
    if x.ambient != f.dom {
        return Err(FinSetError::AmbientMismatch);
    }
    let subset = f.cod.elements().iter().filter(|b| {
        f.dom
            .elements()
            .iter()
            .all(|a| f.apply(a) != *b || x.contains(a))
    });
    Subobj::new(f.cod.clone(), subset.cloned())
}

// ---------------------------------------------------------------------------
// Subobject classifier and power objects

pub fn omega() -> FinObj {
    FinObj::new([Label::Truth(false), Label::Truth(true)])
}

pub const POWER_MATERIALIZATION_BOUND: usize = 20;

/// The power object Ω^A, with elements the canonical subset labels of `a`.
pub fn power(a: &FinObj) -> Result<FinObj, FinSetError> {
    let n = a.size();
    if n > POWER_MATERIALIZATION_BOUND {
        return Err(FinSetError::PowerTooLarge { size: n });
    }
    let elems = a.elements();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let subset = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.clone());
        out.push(Label::subset(subset));
    }
    Ok(FinObj::new(out))
}

/// The characteristic morphism of a subobject.
pub fn char_of(s: &Subobj) -> FinMor {
    FinMor::from_fn(s.ambient.clone(), omega(), |x| Label::Truth(s.contains(x)))
        .expect("characteristic map total")
}

/// The subobject classified by a morphism into Ω.
pub fn subobj_of_char(chi: &FinMor) -> Result<Subobj, FinSetError> {
    if chi.cod != omega() {
        return Err(FinSetError::NotACharacteristicMap);
    }
    let subset = chi
        .dom
        .elements()
        .iter()
        .filter(|x| chi.apply(x) == &Label::Truth(true))
        .cloned();
    Subobj::new(chi.dom.clone(), subset)
}

/// Transpose of f : A×B → Ω along the exponential Ω^A, yielding B → Ω^A.
pub fn transpose(f: &FinMor, a: &FinObj, b: &FinObj) -> Result<FinMor, FinSetError> {
    let (prod, _, _) = product(a, b);
    if f.dom != prod || f.cod != omega() {
        return Err(FinSetError::NotTransposable);
    }
    let pa = power(a)?;
    FinMor::from_fn(b.clone(), pa, |y| {
        let subset = a
            .elements()
            .iter()
            .filter(|x| f.apply(&Label::pair((*x).clone(), y.clone())) == &Label::Truth(true));
        Label::subset(subset.cloned())
    })
}

/// Inverse of `transpose`: recovers A×B → Ω from B → Ω^A.
pub fn untranspose(g: &FinMor, a: &FinObj, b: &FinObj) -> Result<FinMor, FinSetError> {
    let (prod, _, _) = product(a, b);
    FinMor::from_fn(prod, omega(), |l| match l {
        Label::Pair(x, y) => match g.apply(y) {
            Label::Subset(s) => Label::Truth(s.contains(x)),
            _ => unreachable!("power elements are subsets"),
        },
        _ => unreachable!("product elements are pairs"),
    })
}

/// Evaluation A×Ω^A → Ω as a morphism.
pub fn eval_map(a: &FinObj) -> Result<FinMor, FinSetError> {
    let pa = power(a)?;
    let (prod, _, _) = product(a, &pa);
    FinMor::from_fn(prod, omega(), |l| match l {
        Label::Pair(x, s) => match &**s {
            Label::Subset(set) => Label::Truth(set.contains(x)),
            _ => unreachable!(),
        },
        _ => unreachable!(),
    })
}

/// The membership subobject ∈_A of A×Ω^A: pairs (a, S) with a ∈ S.
pub fn membership_subobject(a: &FinObj) -> Result<Subobj, FinSetError> {
    let ev = eval_map(a)?;
    subobj_of_char(&ev)
}

// ---------------------------------------------------------------------------
// Countable joins

/// Iteratively joins `family(0), family(1), …` until the partial join has
/// been stable for `window` consecutive indices (defaulting to the ambient
/// size), with a guard cap of |ambient|² + window. Returns the join and the
/// first index at which the partial join equals the final one.
pub fn countable_join_fixpoint(
    family: impl Fn(usize) -> Result<Subobj, FinSetError>,
    ambient: &FinObj,
    window: Option<usize>,
) -> Result<(Subobj, usize), FinSetError> {
    let window = window.unwrap_or(ambient.size()).max(1);
    // every growth event can be preceded by up to window-1 quiet steps
    let cap = ambient.size() * ambient.size() + (ambient.size() + 1) * window;
    let mut join = Subobj::bottom(ambient);
    let mut first_stable = 0usize;
    let mut stable_run = 0usize;
    let mut i = 0usize;
    while stable_run < window {
        if i >= cap {
            return Err(FinSetError::JoinGuardExceeded { cap });
        }
        let member = family(i)?;
        if member.ambient != *ambient {
            return Err(FinSetError::AmbientMismatch);
        }
        let next = sub_join(&join, &member)?;
        if next == join {
            stable_run += 1;
        } else {
            stable_run = 0;
            first_stable = i;
            join = next;
        }
        i += 1;
    }
    Ok((join, first_stable))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(n: usize) -> FinObj {
        FinObj::numbered("x", n)
    }

    #[test]
    fn compose_identity_is_identity() {
        let a = obj(3);
        let b = FinObj::numbered("y", 2);
        let f = FinMor::from_fn(a.clone(), b.clone(), |_| Label::atom("y0")).unwrap();
        assert_eq!(compose(&f, &identity(&a)).unwrap(), f);
        assert_eq!(compose(&identity(&b), &f).unwrap(), f);
    }

    #[test]
    fn compose_tables() {
        let a = obj(2);
        let one = FinObj::new([Label::atom("m")]);
        let five = FinObj::new([Label::atom("five")]);
        let f = FinMor::from_fn(a, one.clone(), |_| Label::atom("m")).unwrap();
        let g = FinMor::from_fn(one, five.clone(), |_| Label::atom("five")).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert!(gf.table().values().all(|v| *v == Label::atom("five")));
    }

    #[test]
    fn compose_mismatch_rejected() {
        let a = obj(2);
        let b = FinObj::numbered("y", 2);
        let f = FinMor::from_fn(a.clone(), b, |_| Label::atom("y0")).unwrap();
        assert!(compose(&f, &f).is_err());
    }

    #[test]
    fn product_size_and_unit() {
        let a = obj(2);
        let b = FinObj::numbered("y", 3);
        let (p, _, _) = product(&a, &b);
        assert_eq!(p.size(), 6);
        let (pu, fst, _) = product(&a, &FinObj::unit());
        assert_eq!(pu.size(), a.size());
        // projection gives a bijection with A
        assert_eq!(fst.range().len(), a.size());
    }

    #[test]
    fn pairing_of_projections_is_identity() {
        let a = obj(2);
        let b = FinObj::numbered("y", 2);
        let (p, fst, snd) = product(&a, &b);
        let paired = pairing(&fst, &snd).unwrap();
        assert_eq!(paired, identity(&p));
    }

    #[test]
    fn equalizer_cases() {
        let a = FinObj::new([Label::atom("0"), Label::atom("1"), Label::atom("c")]);
        let f = identity(&a);
        let g = FinMor::from_fn(a.clone(), a.clone(), |_| Label::atom("c")).unwrap();
        assert!(equalizer(&f, &f).unwrap().is_full());
        let e = equalizer(&f, &g).unwrap();
        assert_eq!(
            e.subset().iter().cloned().collect::<Vec<_>>(),
            vec![Label::atom("c")]
        );
    }

    #[test]
    fn equalizer_of_projections_is_diagonal() {
        let a = obj(3);
        let (_, fst, snd) = product(&a, &a);
        let e = equalizer(&fst, &snd).unwrap();
        assert_eq!(e.size(), a.size());
    }

    #[test]
    fn pullback_identity_is_diagonal() {
        let a = obj(3);
        let (p, _, _) = pullback(&identity(&a), &identity(&a)).unwrap();
        assert_eq!(p.size(), 3);
    }

    #[test]
    fn pullback_of_disjoint_points_empty() {
        let two = obj(2);
        let pt0 = FinObj::new([Label::atom("x0")]);
        let pt1 = FinObj::new([Label::atom("x1")]);
        let i0 = FinMor::from_fn(pt0, two.clone(), |x| x.clone()).unwrap();
        let i1 = FinMor::from_fn(pt1, two, |x| x.clone()).unwrap();
        let (p, _, _) = pullback(&i0, &i1).unwrap();
        assert_eq!(p.size(), 0);
    }

    #[test]
    fn pullback_counting_identity() {
        // |pullback(f,g)| = Σ_c |f⁻¹(c)|·|g⁻¹(c)|
        let a = obj(3);
        let b = FinObj::numbered("y", 4);
        let c = FinObj::numbered("z", 2);
        let f = FinMor::from_fn(a, c.clone(), |l| match l {
            Label::Atom(s) if s.ends_with('0') => Label::atom("z0"),
            _ => Label::atom("z1"),
        })
        .unwrap();
        let g = FinMor::from_fn(b, c.clone(), |l| match l {
            Label::Atom(s) if s.ends_with('2') => Label::atom("z1"),
            _ => Label::atom("z0"),
        })
        .unwrap();
        let (p, _, _) = pullback(&f, &g).unwrap();
        let mut expected = 0;
        for target in c.elements() {
            let nf = f.table().values().filter(|v| *v == target).count();
            let ng = g.table().values().filter(|v| *v == target).count();
            expected += nf * ng;
        }
        assert_eq!(p.size(), expected);
    }

    #[test]
    fn pushout_of_identities_is_isomorphic() {
        let a = obj(3);
        let (p, i1, i2) = pushout(&identity(&a), &identity(&a)).unwrap();
        assert_eq!(p.size(), 3);
        assert_eq!(i1, i2);
    }

    #[test]
    fn pushout_of_terminal_collapse() {
        let a = obj(2);
        let pt = FinObj::unit();
        let f = FinMor::from_fn(a.clone(), pt.clone(), |_| Label::Unit).unwrap();
        let (p, _, _) = pushout(&f, &f).unwrap();
        assert_eq!(p.size(), 1);
    }

    #[test]
    fn pushout_of_injective_self_span() {
        // |pushout(f,f)| = 2|B| − |A| for injective f
        let a = obj(2);
        let b = FinObj::numbered("y", 5);
        let f = FinMor::from_fn(a, b, |l| match l {
            Label::Atom(s) => Label::atom(format!("y{}", &s[1..])),
            _ => unreachable!(),
        })
        .unwrap();
        assert!(f.is_mono());
        let (p, _, _) = pushout(&f, &f).unwrap();
        assert_eq!(p.size(), 2 * 5 - 2);
    }

    #[test]
    fn image_of_identity_and_constant() {
        let a = obj(3);
        assert!(image(&identity(&a)).unwrap().is_full());
        let c = FinMor::from_fn(a.clone(), a.clone(), |_| Label::atom("x1")).unwrap();
        let im = image(&c).unwrap();
        assert_eq!(im.size(), 1);
        assert!(im.contains(&Label::atom("x1")));
    }

    #[test]
    fn heyting_basic_laws() {
        let e = obj(3);
        let h = HeytingStructure::new(e.clone());
        for x in h.all_subobjects() {
            for y in h.all_subobjects() {
                // ⊥ ⇒ y is ⊤, and x ∧ (x ⇒ y) ≤ y
                assert!(sub_implies(&h.bottom, &y).unwrap().is_full());
                let imp = sub_implies(&x, &y).unwrap();
                let mp = sub_meet(&x, &imp).unwrap();
                assert!(sub_leq(&mp, &y).unwrap());
            }
        }
    }

    #[test]
    fn residuation_exhaustive_three_elements() {
        let e = obj(3);
        let h = HeytingStructure::new(e);
        let subs = h.all_subobjects();
        for z in &subs {
            for x in &subs {
                for y in &subs {
                    let lhs = sub_leq(&sub_meet(z, x).unwrap(), y).unwrap();
                    let rhs = sub_leq(z, &sub_implies(x, y).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn adjoints_on_identity() {
        let a = obj(3);
        let h = HeytingStructure::new(a.clone());
        for x in h.all_subobjects() {
            assert_eq!(exists_f(&identity(&a), &x).unwrap(), x);
            assert_eq!(forall_f(&identity(&a), &x).unwrap(), x);
            assert_eq!(inv_image(&identity(&a), &x).unwrap(), x);
        }
    }

    #[test]
    fn adjoints_collapse_point() {
        let two = obj(2);
        let pt = FinObj::unit();
        let f = FinMor::from_fn(two.clone(), pt.clone(), |_| Label::Unit).unwrap();
        let x = Subobj::new(two, [Label::atom("x0")]).unwrap();
        assert_eq!(exists_f(&f, &x).unwrap().size(), 1);
        assert_eq!(forall_f(&f, &x).unwrap().size(), 0);
    }

    #[test]
    fn power_and_omega_sizes() {
        assert_eq!(omega().size(), 2);
        assert_eq!(power(&obj(3)).unwrap().size(), 8);
        assert_eq!(power(&FinObj::empty()).unwrap().size(), 1);
    }

    #[test]
    fn char_subobj_round_trip() {
        let a = obj(3);
        let s = Subobj::new(a.clone(), [Label::atom("x0"), Label::atom("x2")]).unwrap();
        assert_eq!(subobj_of_char(&char_of(&s)).unwrap(), s);
        assert!(char_of(&Subobj::top(&a))
            .table()
            .values()
            .all(|v| *v == Label::Truth(true)));
    }

    #[test]
    fn transpose_satisfies_exponential_equation() {
        let a = obj(2);
        let b = FinObj::numbered("y", 2);
        let (prod, _, _) = product(&a, &b);
        // an arbitrary non-constant table into Omega
        let f = FinMor::from_fn(prod, omega(), |l| match l {
            Label::Pair(x, y) => {
                Label::Truth((**x == Label::atom("x0")) ^ (**y == Label::atom("y1")))
            }
            _ => unreachable!(),
        })
        .unwrap();
        let t = transpose(&f, &a, &b).unwrap();
        assert_eq!(untranspose(&t, &a, &b).unwrap(), f);
    }

    #[test]
    fn membership_subobject_contents() {
        let a = obj(2);
        let m = membership_subobject(&a).unwrap();
        // pairs (x, S) with x ∈ S: Σ_S |S| = 1·2 + 2·1 = 4
        assert_eq!(m.size(), 4);
        for l in m.subset() {
            match l {
                Label::Pair(x, s) => match &**s {
                    Label::Subset(set) => assert!(set.contains(x)),
                    _ => panic!("expected subset"),
                },
                _ => panic!("expected pair"),
            }
        }
    }

    #[test]
    fn fixpoint_constant_family() {
        let a = obj(4);
        let s = Subobj::new(a.clone(), [Label::atom("x1")]).unwrap();
        let (join, n) = countable_join_fixpoint(|_| Ok(s.clone()), &a, None).unwrap();
        assert_eq!(join, s);
        assert_eq!(n, 0);
    }

    #[test]
    fn fixpoint_growing_family() {
        let n = 4usize;
        let a = obj(n + 1);
        let family = |i: usize| {
            Subobj::new(
                a.clone(),
                (0..=i.min(n)).map(|k| Label::atom(format!("x{k}"))),
            )
        };
        let (join, stable) = countable_join_fixpoint(family, &a, None).unwrap();
        assert!(join.is_full());
        assert_eq!(stable, n);
    }

    #[test]
    fn fixpoint_stops_after_a_quiet_window() {
        let a = obj(2);
        // growth spaced beyond the declared window is not waited for; the
        // window is the family's promise that quiet means finished
        let family = |i: usize| {
            if i < 20 {
                Subobj::new(a.clone(), [Label::atom("x0")])
            } else {
                Ok(Subobj::top(&a))
            }
        };
        let (join, stable) = countable_join_fixpoint(family, &a, Some(5)).unwrap();
        assert_eq!(stable, 0);
        assert_eq!(join.size(), 1);
    }

    #[test]
    fn exists_equals_image_of_restriction() {
        let a = obj(3);
        let b = FinObj::numbered("y", 2);
        let f = FinMor::from_fn(a.clone(), b, |l| match l {
            Label::Atom(s) if s.ends_with('0') => Label::atom("y0"),
            _ => Label::atom("y1"),
        })
        .unwrap();
        let h = HeytingStructure::new(a);
        for x in h.all_subobjects() {
            let restricted =
                FinMor::from_fn(x.as_object(), f.cod.clone(), |l| f.apply(l).clone()).unwrap();
            assert_eq!(exists_f(&f, &x).unwrap(), image(&restricted).unwrap());
        }
    }
}
