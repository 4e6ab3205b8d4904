//! Link diagrams as PD codes, Wirtinger presentations, longitudes, and
//! mu-bar invariants.
//!
//! Arcs here are the maximal overpass segments of a diagram: a strand is
//! cut only where it passes under a crossing, so the over strand of a
//! crossing is a single arc. Each crossing record names the incoming under
//! arc, the over arc, the outgoing under arc, and the crossing sign; each
//! arc enters and leaves exactly one undercrossing (components with no
//! crossings are single free arcs).
//!
//! The mu-bar pipeline rewrites a component's longitude over the base
//! meridians of the other components by iterated Wirtinger substitution,
//! projects away the non-participating components, and reads a coefficient
//! of the word's expansion in the non-repeating ring. Signs depend on
//! orientation conventions; residues and absolute values do not.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::magnus::{expand, mu_coefficient, IntRing, MagnusError, Word};

/// Substituted words longer than this abort the reduction; at that size
/// the requested depth cannot be meaningful for desk-scale diagrams.
pub const MAX_REDUCED_LENGTH: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("line {line}: cannot parse {text:?}")]
    ParseLine { line: usize, text: String },
    #[error("line {line}: crossing sign must be + or -, got {got:?}")]
    BadSign { line: usize, got: String },
    #[error("line {line}: over-arc fields disagree ({b} vs {d}); the over strand is one arc")]
    OverMismatch { line: usize, b: u32, d: u32 },
    #[error("arc labels must be 1..=n with no gaps; {arc} is out of range or missing")]
    NonContiguousArcs { arc: u32 },
    #[error("component labels must be 1..=k with no gaps")]
    NonContiguousComponents,
    #[error("arc {arc} must enter exactly one undercrossing and leave exactly one (found {ins} in, {outs} out)")]
    ArcParity { arc: u32, ins: usize, outs: usize },
    #[error("arc {arc} has no component assignment")]
    ArcUnassigned { arc: u32 },
    #[error("arc {arc} is assigned to a component twice")]
    ArcReassigned { arc: u32 },
    #[error("crossing joins arcs {arc_in} and {arc_out} from different components")]
    CrossingComponentMismatch { arc_in: u32, arc_out: u32 },
    #[error("component {component} does not close into a single strand")]
    BrokenStrand { component: u32 },
    #[error("component {component} not in diagram")]
    UnknownComponent { component: u32 },
    #[error("reduction depth {depth} is below the component count {needed}")]
    DepthTooSmall { depth: usize, needed: usize },
    #[error("substitution exceeded {max} letters in round {round}")]
    SubstitutionOverflow { round: usize, max: usize },
    #[error("index sequence must list at least two distinct components")]
    SequenceTooShort,
    #[error("index sequence repeats component {component}")]
    RepeatedComponent { component: u32 },
    #[error(transparent)]
    Magnus(#[from] MagnusError),
}

type Result<T> = std::result::Result<T, DiagramError>;

/// One crossing: the under strand enters on `under_in`, passes beneath
/// `over`, and leaves as `under_out`; `sign` is the right-handed crossing
/// sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub under_in: u32,
    pub over: u32,
    pub under_out: u32,
    pub sign: i8,
}

/// A validated diagram: crossings plus the arc-to-component assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct PDCode {
    crossings: Vec<Crossing>,
    // 1-based: component_of[arc] for arc in 1..=arc_count.
    component_of: Vec<u32>,
    arc_count: u32,
    component_count: u32,
    // Arcs of each component in strand traversal order from its base arc.
    strands: Vec<Vec<u32>>,
}

impl PDCode {
    /// Parses the text format: lines `X a,b,c,d +` or `X a,b,c,d -` for
    /// crossings, `C arc component` for arc assignments, `#` comments.
    pub fn parse(text: &str) -> Result<PDCode> {
        let mut crossings = Vec::new();
        let mut assignments: HashMap<u32, u32> = HashMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = line_no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            match fields.next() {
                Some("X") => {
                    let quad = fields.next().ok_or_else(|| DiagramError::ParseLine {
                        line,
                        text: raw.to_string(),
                    })?;
                    let sign_tok = fields.next().ok_or_else(|| DiagramError::ParseLine {
                        line,
                        text: raw.to_string(),
                    })?;
                    if fields.next().is_some() {
                        return Err(DiagramError::ParseLine {
                            line,
                            text: raw.to_string(),
                        });
                    }
                    let nums: Vec<u32> = quad
                        .split(',')
                        .map(|t| t.trim().parse::<u32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| DiagramError::ParseLine {
                            line,
                            text: raw.to_string(),
                        })?;
                    let [a, b, c, d] = nums[..] else {
                        return Err(DiagramError::ParseLine {
                            line,
                            text: raw.to_string(),
                        });
                    };
                    if b != d {
                        return Err(DiagramError::OverMismatch { line, b, d });
                    }
                    let sign = match sign_tok {
                        "+" => 1,
                        "-" => -1,
                        other => {
                            return Err(DiagramError::BadSign {
                                line,
                                got: other.to_string(),
                            })
                        }
                    };
                    crossings.push(Crossing {
                        under_in: a,
                        over: b,
                        under_out: c,
                        sign,
                    });
                }
                Some("C") => {
                    let parse_u32 = |tok: Option<&str>| {
                        tok.and_then(|t| t.parse::<u32>().ok()).ok_or_else(|| {
                            DiagramError::ParseLine {
                                line,
                                text: raw.to_string(),
                            }
                        })
                    };
                    let arc = parse_u32(fields.next())?;
                    let comp = parse_u32(fields.next())?;
                    if fields.next().is_some() {
                        return Err(DiagramError::ParseLine {
                            line,
                            text: raw.to_string(),
                        });
                    }
                    if assignments.insert(arc, comp).is_some() {
                        return Err(DiagramError::ArcReassigned { arc });
                    }
                }
                _ => {
                    return Err(DiagramError::ParseLine {
                        line,
                        text: raw.to_string(),
                    })
                }
            }
        }
        PDCode::assemble(crossings, assignments)
    }

    fn assemble(crossings: Vec<Crossing>, assignments: HashMap<u32, u32>) -> Result<PDCode> {
        // Arc labels: every arc mentioned anywhere must be assigned, and
        // labels must be 1..=n.
        let mut arcs: BTreeSet<u32> = assignments.keys().copied().collect();
        for x in &crossings {
            for arc in [x.under_in, x.over, x.under_out] {
                if !assignments.contains_key(&arc) {
                    return Err(DiagramError::ArcUnassigned { arc });
                }
                arcs.insert(arc);
            }
        }
        let arc_count = arcs.len() as u32;
        if arcs.iter().next_back().copied().unwrap_or(0) != arc_count
            || arcs.iter().next().copied().unwrap_or(1) != 1
        {
            let missing = (1..=arc_count)
                .find(|a| !arcs.contains(a))
                .unwrap_or(arc_count + 1);
            return Err(DiagramError::NonContiguousArcs { arc: missing });
        }
        let mut component_of = vec![0u32; arc_count as usize + 1];
        for (&arc, &comp) in &assignments {
            component_of[arc as usize] = comp;
        }
        let comps: BTreeSet<u32> = assignments.values().copied().collect();
        let component_count = comps.len() as u32;
        if comps.iter().next().copied().unwrap_or(1) != 1
            || comps.iter().next_back().copied().unwrap_or(0) != component_count
        {
            return Err(DiagramError::NonContiguousComponents);
        }

        // Undercrossing parity: each arc enters once and leaves once, or
        // touches no crossing at all.
        let mut ins = vec![0usize; arc_count as usize + 1];
        let mut outs = vec![0usize; arc_count as usize + 1];
        for x in &crossings {
            ins[x.under_in as usize] += 1;
            outs[x.under_out as usize] += 1;
            if component_of[x.under_in as usize] != component_of[x.under_out as usize] {
                return Err(DiagramError::CrossingComponentMismatch {
                    arc_in: x.under_in,
                    arc_out: x.under_out,
                });
            }
        }
        let mut next: HashMap<u32, u32> = HashMap::new();
        for arc in 1..=arc_count {
            let (i, o) = (ins[arc as usize], outs[arc as usize]);
            if !((i == 1 && o == 1) || (i == 0 && o == 0)) {
                return Err(DiagramError::ArcParity {
                    arc,
                    ins: i,
                    outs: o,
                });
            }
        }
        for x in &crossings {
            next.insert(x.under_in, x.under_out);
        }

        // Strand traversal: from each component's lowest arc, the
        // successor map must cycle through exactly the component's arcs.
        let mut strands = Vec::with_capacity(component_count as usize);
        for comp in 1..=component_count {
            let members: Vec<u32> = (1..=arc_count)
                .filter(|&a| component_of[a as usize] == comp)
                .collect();
            let base = members[0];
            let mut order = vec![base];
            if next.contains_key(&base) {
                let mut at = next[&base];
                while at != base {
                    if order.len() > members.len() {
                        return Err(DiagramError::BrokenStrand { component: comp });
                    }
                    order.push(at);
                    match next.get(&at) {
                        Some(&n) => at = n,
                        None => return Err(DiagramError::BrokenStrand { component: comp }),
                    }
                }
            }
            let seen: BTreeSet<u32> = order.iter().copied().collect();
            if seen.len() != members.len() || !members.iter().all(|a| seen.contains(a)) {
                return Err(DiagramError::BrokenStrand { component: comp });
            }
            strands.push(order);
        }

        Ok(PDCode {
            crossings,
            component_of,
            arc_count,
            component_count,
            strands,
        })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    pub fn component_count(&self) -> u32 {
        self.component_count
    }

    pub fn component_of(&self, arc: u32) -> u32 {
        self.component_of[arc as usize]
    }

    /// Arcs of a component in strand order, starting at its base arc.
    pub fn strand(&self, component: u32) -> Result<&[u32]> {
        (component as usize)
            .checked_sub(1)
            .and_then(|i| self.strands.get(i))
            .map(|v| v.as_slice())
            .ok_or(DiagramError::UnknownComponent { component })
    }
}

/// A Wirtinger presentation: arc generators, one conjugation relation per
/// crossing, and one base meridian per component.
#[derive(Clone, Debug)]
pub struct Presentation {
    arc_count: u32,
    component_count: u32,
    component_of: Vec<u32>,
    // Arc defined by each relation: under_out = over^sign under_in over^-sign,
    // keyed by the defined (outgoing) arc.
    relations: HashMap<u32, (u32, i8, u32)>,
    base: Vec<u32>,
}

impl Presentation {
    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// The base meridian (lowest arc) of a component.
    pub fn base_meridian(&self, component: u32) -> Result<u32> {
        (component as usize)
            .checked_sub(1)
            .and_then(|i| self.base.get(i))
            .copied()
            .ok_or(DiagramError::UnknownComponent { component })
    }

    /// The defining relation of an arc when it is the outgoing under
    /// strand of some crossing: `(over, sign, incoming)`.
    pub fn relation_for(&self, arc: u32) -> Option<(u32, i8, u32)> {
        self.relations.get(&arc).copied()
    }
}

/// Builds the Wirtinger presentation of a validated diagram.
pub fn wirtinger(pd: &PDCode) -> Presentation {
    let mut relations = HashMap::new();
    for x in pd.crossings() {
        relations.insert(x.under_out, (x.over, x.sign, x.under_in));
    }
    let base = (1..=pd.component_count())
        .map(|c| pd.strand(c).expect("component exists")[0])
        .collect();
    Presentation {
        arc_count: pd.arc_count(),
        component_count: pd.component_count(),
        component_of: pd.component_of.clone(),
        relations,
        base,
    }
}

/// The zero-framed longitude of a component, as a word over arc
/// generators: the over-arc conjugator at each undercrossing along the
/// strand, corrected by base^(-w) for the self-writhe w.
pub fn longitude_word(pd: &PDCode, component: u32) -> Result<Word> {
    let strand = pd.strand(component)?;
    let mut letters: Vec<i32> = Vec::new();
    for &arc in strand {
        if let Some(x) = pd.crossings().iter().find(|x| x.under_in == arc) {
            letters.push(x.sign as i32 * x.over as i32);
        }
    }
    let mut self_writhe = 0i64;
    for x in pd.crossings() {
        if pd.component_of(x.under_in) == component && pd.component_of(x.over) == component {
            self_writhe += x.sign as i64;
        }
    }
    let base = strand[0] as i32;
    let framing_letter = if self_writhe > 0 { -base } else { base };
    for _ in 0..self_writhe.unsigned_abs() {
        letters.push(framing_letter);
    }
    Word::new(letters).map_err(DiagramError::from)
}

/// Rewrites a word over arc generators into one over base meridians:
/// `depth` rounds substitute every non-base arc by its Wirtinger
/// expression, then each remaining arc maps to its component's base
/// meridian (numbered by component). Correct up to expansion terms of
/// degree >= depth.
pub fn reduce_to_meridians(word: &Word, pres: &Presentation, depth: usize) -> Result<Word> {
    if depth < pres.component_count as usize {
        return Err(DiagramError::DepthTooSmall {
            depth,
            needed: pres.component_count as usize,
        });
    }
    let is_base = |arc: u32| pres.base.contains(&arc);
    let mut letters: Vec<i32> = word.letters().to_vec();
    for round in 1..=depth {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        let mut changed = false;
        for &letter in &letters {
            let arc = letter.unsigned_abs();
            if is_base(arc) {
                out.push(letter);
                continue;
            }
            match pres.relations.get(&arc) {
                Some(&(over, sign, inner)) => {
                    changed = true;
                    let conj = [
                        sign as i32 * over as i32,
                        inner as i32,
                        -(sign as i32) * over as i32,
                    ];
                    if letter > 0 {
                        out.extend_from_slice(&conj);
                    } else {
                        out.extend(conj.iter().rev().map(|l| -l));
                    }
                }
                // Crossing-free arcs have no relation; they already are
                // their component's only arc.
                None => out.push(letter),
            }
            if out.len() > MAX_REDUCED_LENGTH {
                return Err(DiagramError::SubstitutionOverflow {
                    round,
                    max: MAX_REDUCED_LENGTH,
                });
            }
        }
        letters = out;
        if !changed {
            break;
        }
    }
    let meridian_letters = letters
        .iter()
        .map(|&l| {
            let comp = pres.component_of[l.unsigned_abs() as usize] as i32;
            if l > 0 {
                comp
            } else {
                -comp
            }
        })
        .collect();
    Word::new(meridian_letters).map_err(DiagramError::from)
}

/// A computed mu-bar invariant.
#[derive(Clone, Debug)]
pub struct MuResult {
    pub sequence: Vec<u32>,
    /// Integer coefficient of the ordered passive monomial.
    pub coefficient: BigInt,
    /// Residue of the coefficient when a modulus was requested.
    pub residue: Option<u64>,
    pub modulus: Option<u64>,
    /// Shorter mu-bar values over subsets of the same components.
    pub lower_order: BTreeMap<Vec<u32>, BigInt>,
    /// True when any strictly shorter value is nonzero, in which case the
    /// top coefficient is only defined modulo those values.
    pub indeterminate: bool,
}

/// The mu-bar invariant of a diagram for an index sequence: the last
/// index names the expanded (active) component, the earlier ones the
/// passive components read in order.
pub fn mu_bar(pd: &PDCode, sequence: &[u32], modulus: Option<u64>) -> Result<MuResult> {
    validate_sequence(pd, sequence)?;
    let coefficient = mu_bar_coefficient(pd, sequence)?;
    let mut lower_order = BTreeMap::new();
    let set: Vec<u32> = sequence.to_vec();
    for sub in injective_subsequences(&set, sequence.len()) {
        let value = mu_bar_coefficient(pd, &sub)?;
        lower_order.insert(sub, value);
    }
    let indeterminate = lower_order.values().any(|v| !v.is_zero());
    let residue = match modulus {
        Some(p) => {
            let m = BigInt::from(p);
            let r = ((&coefficient % &m) + &m) % &m;
            Some(u64::try_from(r).expect("reduced residue fits u64"))
        }
        None => None,
    };
    Ok(MuResult {
        sequence: sequence.to_vec(),
        coefficient,
        residue,
        modulus,
        lower_order,
        indeterminate,
    })
}

fn validate_sequence(pd: &PDCode, sequence: &[u32]) -> Result<()> {
    if sequence.len() < 2 {
        return Err(DiagramError::SequenceTooShort);
    }
    let mut seen = BTreeSet::new();
    for &c in sequence {
        if c == 0 || c > pd.component_count() {
            return Err(DiagramError::UnknownComponent { component: c });
        }
        if !seen.insert(c) {
            return Err(DiagramError::RepeatedComponent { component: c });
        }
    }
    Ok(())
}

/// All injective sequences of length 2..len drawn from the given indices.
fn injective_subsequences(set: &[u32], len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(cur) = stack.pop() {
        if cur.len() >= 2 && cur.len() < len {
            out.push(cur.clone());
        }
        if cur.len() + 1 < len {
            for &c in set {
                if !cur.contains(&c) {
                    let mut nxt = cur.clone();
                    nxt.push(c);
                    stack.push(nxt);
                }
            }
        }
    }
    out.sort();
    out
}

/// The raw integer coefficient for one index sequence.
fn mu_bar_coefficient(pd: &PDCode, sequence: &[u32]) -> Result<BigInt> {
    let active = *sequence.last().expect("validated nonempty");
    let passive = &sequence[..sequence.len() - 1];
    let pres = wirtinger(pd);
    let longitude = longitude_word(pd, active)?;
    let depth = sequence.len().max(pd.component_count() as usize);
    let reduced = reduce_to_meridians(&longitude, &pres, depth)?;
    // Components outside the sequence and the active component itself are
    // deleted; surviving letters are renumbered to the passive positions.
    let mut position: HashMap<u32, i32> = HashMap::new();
    for (i, &c) in passive.iter().enumerate() {
        position.insert(c, i as i32 + 1);
    }
    let projected: Vec<i32> = reduced
        .letters()
        .iter()
        .filter_map(|&l| {
            position
                .get(&l.unsigned_abs())
                .map(|&var| if l > 0 { var } else { -var })
        })
        .collect();
    let word = Word::new(projected)?;
    let poly = expand(&word, passive.len(), IntRing)?;
    let indices: Vec<u32> = (1..=passive.len() as u32).collect();
    Ok(mu_coefficient(&poly, &indices)?)
}

/// Bundled sample diagrams, shared by the command-line tools and the tests.
pub mod samples {
    /// The positive Hopf link, two crossings of the same sign.
    pub const HOPF_PD: &str = include_str!("../../../data/hopf.pd");
    /// The Borromean rings as the closure of the three-strand braid
    /// (s1 s2^-1)^3, six alternating crossings.
    pub const BORROMEAN_PD: &str = include_str!("../../../data/borromean.pd");
    /// The three-component unlink, three crossing-free arcs.
    pub const UNLINK3_PD: &str = include_str!("../../../data/unlink.pd");
}
