//! Class-constrained Damerau-Levenshtein edit paths.
//!
//! Tokens fall into two classes: *slots* (the punctuation being scored) and
//! everything else. Edits on slots cost 0.999 and edits on other tokens cost
//! 1.0, so among paths with the fewest edits the one with the most slot edits
//! wins. Costs are kept as integer thousandths to make ties exact.
//!
//! Transpositions follow optimal string alignment: an adjacent pair is
//! swapped and not touched again, except that when a slot token moves across
//! a non-slot token, that non-slot token may also be substituted. This is what
//! turns `[w1, .]` into `[., w2]` with one swap and one word substitution.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::token::{Punct, Token};

/// Cost of one edit on a non-slot token, in thousandths.
pub const WORD_EDIT: u32 = 1000;
/// Cost of one edit involving a slot token, in thousandths.
pub const SLOT_EDIT: u32 = 999;

/// Which tokens are counted as slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotClass {
    /// Every punctuation mark.
    AllPunct,
    /// Only one kind; all other tokens, punctuation included, are non-slots.
    Only(Punct),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub slot: SlotClass,
    /// Allow substituting a slot token with a non-slot token (cost 0.999).
    pub cross_class_substitution: bool,
    pub transpositions: bool,
}

impl CostModel {
    /// Overall punctuation scoring: a word is never substituted by a mark.
    pub const fn dlev() -> Self {
        CostModel { slot: SlotClass::AllPunct, cross_class_substitution: false, transpositions: true }
    }

    /// Scoring of a single mark against all other tokens.
    pub const fn punct_specific(target: Punct) -> Self {
        CostModel { slot: SlotClass::Only(target), cross_class_substitution: true, transpositions: true }
    }

    pub fn is_slot(&self, t: &Token) -> bool {
        match (self.slot, t) {
            (SlotClass::AllPunct, Token::Punct(_)) => true,
            (SlotClass::Only(p), Token::Punct(q)) => p == *q,
            _ => false,
        }
    }
}

/// One step of an edit path from reference to hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum EditOp {
    Match { token: String },
    Substitute { reference: String, hypothesis: String },
    Insert { hypothesis: String },
    Delete { reference: String },
    /// Reference pair `[r0, r1]` becomes hypothesis pair `[h0, h1]`, with
    /// `h0` playing the role of `r1` and `h1` that of `r0`.
    Transpose { reference: [String; 2], hypothesis: [String; 2] },
}

/// Tallies of slot edits along one path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctCounts {
    pub correct: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub substitutions: usize,
    pub swaps: usize,
    /// Slot tokens in the reference.
    pub ref_total: usize,
    /// Slot tokens in the hypothesis.
    pub hyp_total: usize,
}

impl PunctCounts {
    /// `I + D + S + W`.
    pub fn errors(&self) -> usize {
        self.insertions + self.deletions + self.substitutions + self.swaps
    }

    pub fn add(&mut self, other: &PunctCounts) {
        self.correct += other.correct;
        self.insertions += other.insertions;
        self.deletions += other.deletions;
        self.substitutions += other.substitutions;
        self.swaps += other.swaps;
        self.ref_total += other.ref_total;
        self.hyp_total += other.hyp_total;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditPath {
    pub ops: Vec<EditOp>,
    /// Total cost in thousandths.
    pub cost_units: u32,
    pub counts: PunctCounts,
    /// Edits on non-slot tokens.
    pub other_edits: usize,
}

impl EditPath {
    pub fn total_cost(&self) -> f64 {
        self.cost_units as f64 / 1000.0
    }

    /// Slot edits along the path (`I + D + S + W`).
    pub fn slot_edits(&self) -> usize {
        self.counts.errors()
    }

    /// Reference surfaces read off the path.
    pub fn reference_surfaces(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for op in &self.ops {
            match op {
                EditOp::Match { token } => out.push(token.as_str()),
                EditOp::Substitute { reference, .. } | EditOp::Delete { reference } => out.push(reference),
                EditOp::Insert { .. } => {}
                EditOp::Transpose { reference, .. } => out.extend(reference.iter().map(String::as_str)),
            }
        }
        out
    }

    /// Replays the path on the reference, giving the hypothesis surfaces.
    pub fn hypothesis_surfaces(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for op in &self.ops {
            match op {
                EditOp::Match { token } => out.push(token.as_str()),
                EditOp::Substitute { hypothesis, .. } | EditOp::Insert { hypothesis } => out.push(hypothesis),
                EditOp::Delete { .. } => {}
                EditOp::Transpose { hypothesis, .. } => out.extend(hypothesis.iter().map(String::as_str)),
            }
        }
        out
    }
}

/// Interned token with its class, so the inner loop compares integers.
#[derive(Clone, Copy)]
struct Sym {
    id: u32,
    slot: bool,
}

fn intern<'a>(tokens: &'a [Token], model: &CostModel, ids: &mut HashMap<&'a Token, u32>) -> Vec<Sym> {
    tokens
        .iter()
        .map(|t| {
            let next = ids.len() as u32;
            let id = *ids.entry(t).or_insert(next);
            Sym { id, slot: model.is_slot(t) }
        })
        .collect()
}

#[inline]
fn indel(s: Sym) -> u32 {
    if s.slot {
        SLOT_EDIT
    } else {
        WORD_EDIT
    }
}

/// Cost of turning reference `[x0, x1]` into hypothesis `[y0, y1]` by a swap.
///
/// A slot token that keeps its identity across the swap may move past a
/// non-slot token, which may in turn be substituted. Otherwise the pair must
/// be an exact inversion of two distinct non-slot tokens.
#[inline]
fn transposition(x0: Sym, x1: Sym, y0: Sym, y1: Sym) -> Option<u32> {
    if x0.id == x1.id {
        return None;
    }
    let slot_moves_left = x1.slot && y0.id == x1.id;
    let slot_moves_right = x0.slot && y1.id == x0.id;
    match (slot_moves_left, slot_moves_right) {
        (true, true) => Some(SLOT_EDIT),
        (true, false) if !x0.slot && !y1.slot => Some(SLOT_EDIT + if x0.id == y1.id { 0 } else { WORD_EDIT }),
        (false, true) if !x1.slot && !y0.slot => Some(SLOT_EDIT + if x1.id == y0.id { 0 } else { WORD_EDIT }),
        (false, false) if !x0.slot && !x1.slot && y0.id == x1.id && y1.id == x0.id => Some(WORD_EDIT),
        _ => None,
    }
}

const OP_DIAG: u8 = 0;
const OP_TRANSPOSE: u8 = 1;
const OP_DELETE: u8 = 2;
const OP_INSERT: u8 = 3;

/// Two-bit op codes for the whole DP grid.
struct OpGrid {
    bits: Vec<u8>,
    width: usize,
}

impl OpGrid {
    fn new(rows: usize, width: usize) -> Self {
        OpGrid { bits: vec![0; (rows * width).div_ceil(4)], width }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, op: u8) {
        let k = i * self.width + j;
        self.bits[k / 4] |= op << ((k % 4) * 2);
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> u8 {
        let k = i * self.width + j;
        (self.bits[k / 4] >> ((k % 4) * 2)) & 3
    }
}

/// Minimal-cost edit path from `reference` to `hypothesis` under `model`.
///
/// Ties between equal-cost predecessors resolve in the order match or
/// substitute, transpose, delete, insert.
pub fn edit_path(reference: &[Token], hypothesis: &[Token], model: &CostModel) -> EditPath {
    let mut ids = HashMap::new();
    let a = intern(reference, model, &mut ids);
    let b = intern(hypothesis, model, &mut ids);
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut ops = OpGrid::new(n + 1, width);

    let mut row2 = vec![0u32; width];
    let mut row1 = vec![0u32; width];
    let mut row = vec![0u32; width];
    for j in 1..=m {
        row1[j] = row1[j - 1] + indel(b[j - 1]);
        ops.set(0, j, OP_INSERT);
    }
    let (cross, transpose) = (model.cross_class_substitution, model.transpositions);
    for i in 1..=n {
        let x = a[i - 1];
        let del = indel(x);
        let prev_x = if transpose && i >= 2 { Some(a[i - 2]) } else { None };
        row[0] = row1[0] + del;
        ops.set(i, 0, OP_DELETE);
        for j in 1..=m {
            let y = b[j - 1];
            let mut best = if x.id == y.id {
                row1[j - 1]
            } else if x.slot && y.slot {
                row1[j - 1] + SLOT_EDIT
            } else if !x.slot && !y.slot {
                row1[j - 1] + WORD_EDIT
            } else if cross {
                row1[j - 1] + SLOT_EDIT
            } else {
                u32::MAX
            };
            let mut op = OP_DIAG;
            if let (Some(x0), true) = (prev_x, j >= 2) {
                let y0 = b[j - 2];
                // every legal swap moves x into position j-1 or x0 into position j
                if y0.id == x.id || y.id == x0.id {
                    if let Some(c) = transposition(x0, x, y0, y) {
                        let v = row2[j - 2] + c;
                        if v < best {
                            best = v;
                            op = OP_TRANSPOSE;
                        }
                    }
                }
            }
            let v = row1[j] + del;
            if v < best {
                best = v;
                op = OP_DELETE;
            }
            let v = row[j - 1] + indel(y);
            if v < best {
                best = v;
                op = OP_INSERT;
            }
            row[j] = best;
            ops.set(i, j, op);
        }
        std::mem::swap(&mut row2, &mut row1);
        std::mem::swap(&mut row1, &mut row);
    }
    let cost_units = row1[m];

    let mut path = Vec::with_capacity(n.max(m));
    let mut counts = PunctCounts {
        ref_total: a.iter().filter(|s| s.slot).count(),
        hyp_total: b.iter().filter(|s| s.slot).count(),
        ..PunctCounts::default()
    };
    let mut other_edits = 0;
    let s = |t: &Token| t.surface().to_string();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match ops.get(i, j) {
            OP_DIAG => {
                let (x, y) = (a[i - 1], b[j - 1]);
                if x.id == y.id {
                    if x.slot {
                        counts.correct += 1;
                    }
                    path.push(EditOp::Match { token: s(&reference[i - 1]) });
                } else {
                    if x.slot || y.slot {
                        counts.substitutions += 1;
                    } else {
                        other_edits += 1;
                    }
                    path.push(EditOp::Substitute { reference: s(&reference[i - 1]), hypothesis: s(&hypothesis[j - 1]) });
                }
                i -= 1;
                j -= 1;
            }
            OP_TRANSPOSE => {
                let c = transposition(a[i - 2], a[i - 1], b[j - 2], b[j - 1]).expect("recorded transposition");
                if c % WORD_EDIT == 0 {
                    other_edits += 1;
                } else {
                    counts.swaps += 1;
                    if c > SLOT_EDIT {
                        other_edits += 1;
                    }
                }
                path.push(EditOp::Transpose {
                    reference: [s(&reference[i - 2]), s(&reference[i - 1])],
                    hypothesis: [s(&hypothesis[j - 2]), s(&hypothesis[j - 1])],
                });
                i -= 2;
                j -= 2;
            }
            OP_DELETE => {
                if a[i - 1].slot {
                    counts.deletions += 1;
                } else {
                    other_edits += 1;
                }
                path.push(EditOp::Delete { reference: s(&reference[i - 1]) });
                i -= 1;
            }
            _ => {
                if b[j - 1].slot {
                    counts.insertions += 1;
                } else {
                    other_edits += 1;
                }
                path.push(EditOp::Insert { hypothesis: s(&hypothesis[j - 1]) });
                j -= 1;
            }
        }
    }
    path.reverse();
    EditPath { ops: path, cost_units, counts, other_edits }
}
