//! Risk evaluation formulas (REFs) and ranking lists.
//!
//! Thirty-five formulas from the spectrum-based fault localization
//! literature, each mapping a statement's spectrum row to a suspiciousness
//! score. Scores are extended reals: finite or `+inf` (a positive numerator
//! over a zero denominator). `0/0` resolves to `0`, so no score is ever NaN.
//!
//! Many formulas are order-equivalent in the single-failure regime this
//! pipeline operates in: they produce identical ranking lists for every
//! spectrum with `n_f = 1`. [`GROUPS`] captures that partition; each group's
//! first member is its representative.

use crate::coverage::{Spectrum, SpectrumRow};
use crate::error::{Error, Result};
use std::fmt;

/// Absolute tolerance under which two scores tie in a ranking.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Identifier of one risk evaluation formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefId {
    Naish1,
    Naish2,
    Jaccard,
    Anderberg,
    SorensenDice,
    Dice,
    Goodman,
    Tarantula,
    Qe,
    CbiInc,
    Wong2,
    Hamann,
    SimpleMatching,
    Sokal,
    RogersTanimoto,
    HammingEtc,
    Euclid,
    Wong1,
    RusselRao,
    Binary,
    Scott,
    Rogot1,
    Kulczynski2,
    Ochiai,
    M2,
    Ample2,
    Wong3,
    ArithmeticMean,
    Cohen,
    Fleiss,
    Crosstab,
    DStar,
    GP02,
    GP03,
    GP19,
}

impl RefId {
    pub const ALL: [RefId; 35] = [
        RefId::Naish1,
        RefId::Naish2,
        RefId::Jaccard,
        RefId::Anderberg,
        RefId::SorensenDice,
        RefId::Dice,
        RefId::Goodman,
        RefId::Tarantula,
        RefId::Qe,
        RefId::CbiInc,
        RefId::Wong2,
        RefId::Hamann,
        RefId::SimpleMatching,
        RefId::Sokal,
        RefId::RogersTanimoto,
        RefId::HammingEtc,
        RefId::Euclid,
        RefId::Wong1,
        RefId::RusselRao,
        RefId::Binary,
        RefId::Scott,
        RefId::Rogot1,
        RefId::Kulczynski2,
        RefId::Ochiai,
        RefId::M2,
        RefId::Ample2,
        RefId::Wong3,
        RefId::ArithmeticMean,
        RefId::Cohen,
        RefId::Fleiss,
        RefId::Crosstab,
        RefId::DStar,
        RefId::GP02,
        RefId::GP03,
        RefId::GP19,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RefId::Naish1 => "Naish1",
            RefId::Naish2 => "Naish2",
            RefId::Jaccard => "Jaccard",
            RefId::Anderberg => "Anderberg",
            RefId::SorensenDice => "SorensenDice",
            RefId::Dice => "Dice",
            RefId::Goodman => "Goodman",
            RefId::Tarantula => "Tarantula",
            RefId::Qe => "Qe",
            RefId::CbiInc => "CbiInc",
            RefId::Wong2 => "Wong2",
            RefId::Hamann => "Hamann",
            RefId::SimpleMatching => "SimpleMatching",
            RefId::Sokal => "Sokal",
            RefId::RogersTanimoto => "RogersTanimoto",
            RefId::HammingEtc => "HammingEtc",
            RefId::Euclid => "Euclid",
            RefId::Wong1 => "Wong1",
            RefId::RusselRao => "RusselRao",
            RefId::Binary => "Binary",
            RefId::Scott => "Scott",
            RefId::Rogot1 => "Rogot1",
            RefId::Kulczynski2 => "Kulczynski2",
            RefId::Ochiai => "Ochiai",
            RefId::M2 => "M2",
            RefId::Ample2 => "Ample2",
            RefId::Wong3 => "Wong3",
            RefId::ArithmeticMean => "ArithmeticMean",
            RefId::Cohen => "Cohen",
            RefId::Fleiss => "Fleiss",
            RefId::Crosstab => "Crosstab",
            RefId::DStar => "DStar",
            RefId::GP02 => "GP02",
            RefId::GP03 => "GP03",
            RefId::GP19 => "GP19",
        }
    }

    /// Case-insensitive lookup; hyphens, spaces and punctuation are ignored,
    /// so `sorensen-dice`, `CBI Inc.` and `rogers & tanimoto` all resolve.
    pub fn parse(input: &str) -> Option<RefId> {
        let key = normalize(input);
        RefId::ALL
            .iter()
            .copied()
            .find(|r| normalize(r.name()) == key)
    }
}

impl fmt::Display for RefId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// One order-equivalence class of formulas under single-failure spectra.
#[derive(Debug)]
pub struct RefGroup {
    /// 1-based group id.
    pub id: u8,
    pub members: &'static [RefId],
}

impl RefGroup {
    /// The member whose name labels the group in reports.
    pub fn representative(&self) -> RefId {
        self.members[0]
    }

    /// Resolves `groupN` / `Group N` to the group.
    pub fn parse(input: &str) -> Option<&'static RefGroup> {
        let key = normalize(input);
        let id: u8 = key.strip_prefix("group")?.parse().ok()?;
        GROUPS.iter().find(|g| g.id == id)
    }
}

pub static GROUPS: [RefGroup; 12] = [
    RefGroup { id: 1, members: &[RefId::Naish2] },
    RefGroup {
        id: 2,
        members: &[
            RefId::Jaccard,
            RefId::Anderberg,
            RefId::SorensenDice,
            RefId::Dice,
            RefId::Goodman,
            RefId::M2,
            RefId::Naish1,
            RefId::DStar,
        ],
    },
    RefGroup {
        id: 3,
        members: &[
            RefId::Tarantula,
            RefId::Qe,
            RefId::CbiInc,
            RefId::Kulczynski2,
            RefId::Ochiai,
        ],
    },
    RefGroup {
        id: 4,
        members: &[
            RefId::Wong2,
            RefId::Hamann,
            RefId::SimpleMatching,
            RefId::Sokal,
            RefId::RogersTanimoto,
            RefId::HammingEtc,
            RefId::Euclid,
        ],
    },
    RefGroup {
        id: 5,
        members: &[RefId::Wong1, RefId::Binary, RefId::RusselRao],
    },
    RefGroup { id: 6, members: &[RefId::Scott, RefId::Rogot1] },
    RefGroup {
        id: 7,
        members: &[
            RefId::Ample2,
            RefId::ArithmeticMean,
            RefId::Cohen,
            RefId::Crosstab,
        ],
    },
    RefGroup { id: 8, members: &[RefId::Wong3] },
    RefGroup { id: 9, members: &[RefId::Fleiss] },
    RefGroup { id: 10, members: &[RefId::GP02] },
    RefGroup { id: 11, members: &[RefId::GP03] },
    RefGroup { id: 12, members: &[RefId::GP19] },
];

/// The equivalence group a formula belongs to.
pub fn group_of(r: RefId) -> &'static RefGroup {
    GROUPS
        .iter()
        .find(|g| g.members.contains(&r))
        .expect("every RefId belongs to a group")
}

/// Resolves either a formula name or a `groupN` selector (which picks the
/// group representative).
pub fn parse_selector(input: &str) -> Option<RefId> {
    RefId::parse(input).or_else(|| RefGroup::parse(input).map(|g| g.representative()))
}

/// Per-statement scores; finite or `+inf`, never NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousnessVector {
    scores: Vec<f64>,
}

impl SuspiciousnessVector {
    pub fn from_scores(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::domain("empty score vector"));
        }
        if scores.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::domain("scores must be finite or +inf"));
        }
        Ok(SuspiciousnessVector { scores })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// 1-based tie-aware ranks, one per statement.
///
/// Every member of a maximal run of equal scores receives the run's first
/// position, so the proxy `(0.45, 0.45, 0.71, 0, 1, 1, 0, ...)` ranks as
/// `(4, 4, 3, 6, 1, 1, 6, ...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingList {
    ranks: Vec<u32>,
}

impl RankingList {
    /// Validates an externally supplied rank vector: ranks must be exactly
    /// the tie-collapsed positions of some descending order.
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::domain("empty ranking list"));
        }
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        for (pos, window) in sorted.iter().enumerate() {
            let expected_new = (pos + 1) as u32;
            let prev = if pos == 0 { None } else { Some(sorted[pos - 1]) };
            if Some(*window) != prev && *window != expected_new {
                return Err(Error::domain(format!(
                    "rank {window} is not a valid tie-collapsed position"
                )));
            }
        }
        Ok(RankingList { ranks })
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

fn scores_equal(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE
}

/// Ranks scores in descending order with tie collapsing.
pub fn rank(scores: &SuspiciousnessVector) -> RankingList {
    let s = scores.scores();
    let mut order: Vec<usize> = (0..s.len()).collect();
    // Stable sort: equal scores keep statement order, which makes the walk
    // below deterministic.
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).expect("no NaN in scores"));
    let mut ranks = vec![0u32; s.len()];
    let mut run_start = 0;
    for pos in 0..order.len() {
        if pos > 0 && !scores_equal(s[order[pos]], s[order[pos - 1]]) {
            run_start = pos;
        }
        ranks[order[pos]] = (run_start + 1) as u32;
    }
    RankingList { ranks }
}

/// Applies one formula to every statement of a spectrum.
pub fn suspiciousness(ref_id: RefId, spectrum: &Spectrum) -> SuspiciousnessVector {
    let scores = spectrum
        .rows()
        .iter()
        .map(|row| score(ref_id, row, spectrum.n_f(), spectrum.n_s()))
        .collect();
    SuspiciousnessVector { scores }
}

/// Division with the spectrum conventions: `0/0 = 0`, `x/0 = +inf` for
/// `x > 0`. No formula below can reach a negative numerator over a zero
/// denominator.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        num / den
    }
}

fn score(ref_id: RefId, row: &SpectrumRow, n_f: u32, n_s: u32) -> f64 {
    let cf = f64::from(row.n_cf);
    let uf = f64::from(row.n_uf);
    let cs = f64::from(row.n_cs);
    let us = f64::from(row.n_us);
    let f = f64::from(n_f);
    let s = f64::from(n_s);
    let n = f + s;
    let c = cf + cs;
    let u = uf + us;

    match ref_id {
        RefId::Naish1 => {
            if row.n_cf < n_f {
                -1.0
            } else {
                s - cs
            }
        }
        RefId::Naish2 => cf - cs / (s + 1.0),
        RefId::Jaccard => ratio(cf, f + cs),
        RefId::Anderberg => ratio(cf, cf + 2.0 * (uf + cs)),
        RefId::SorensenDice => ratio(2.0 * cf, 2.0 * cf + uf + cs),
        RefId::Dice => ratio(2.0 * cf, f + cs),
        RefId::Goodman => ratio(2.0 * cf - uf - cs, 2.0 * cf + uf + cs),
        RefId::Tarantula => {
            let fail_rate = ratio(cf, f);
            ratio(fail_rate, fail_rate + ratio(cs, s))
        }
        RefId::Qe => ratio(cf, c),
        RefId::CbiInc => ratio(cf, c) - ratio(f, n),
        RefId::Wong2 => cf - cs,
        RefId::Hamann => ratio(cf + us - uf - cs, n),
        RefId::SimpleMatching => ratio(cf + us, n),
        RefId::Sokal => ratio(2.0 * (cf + us), 2.0 * (cf + us) + uf + cs),
        RefId::RogersTanimoto => ratio(cf + us, cf + us + 2.0 * (uf + cs)),
        RefId::HammingEtc => cf + us,
        RefId::Euclid => (cf + us).sqrt(),
        RefId::Wong1 => cf,
        RefId::RusselRao => ratio(cf, n),
        RefId::Binary => {
            if row.n_cf < n_f {
                0.0
            } else {
                1.0
            }
        }
        RefId::Scott => ratio(
            4.0 * cf * us - 4.0 * uf * cs - (uf - cs) * (uf - cs),
            (2.0 * cf + uf + cs) * (2.0 * us + uf + cs),
        ),
        RefId::Rogot1 => {
            0.5 * (ratio(cf, 2.0 * cf + uf + cs) + ratio(us, 2.0 * us + uf + cs))
        }
        RefId::Kulczynski2 => 0.5 * (ratio(cf, f) + ratio(cf, c)),
        RefId::Ochiai => ratio(cf, (f * c).sqrt()),
        RefId::M2 => ratio(cf, cf + us + 2.0 * (uf + cs)),
        RefId::Ample2 => ratio(cf, f) - ratio(cs, s),
        RefId::Wong3 => {
            let h = if cs <= 2.0 {
                cs
            } else if cs <= 10.0 {
                2.0 + 0.1 * (cs - 2.0)
            } else {
                2.8 + 0.001 * (cs - 10.0)
            };
            cf - h
        }
        RefId::ArithmeticMean => {
            ratio(2.0 * cf * us - 2.0 * uf * cs, c * u + f * s)
        }
        RefId::Cohen => ratio(2.0 * cf * us - 2.0 * uf * cs, c * s + f * u),
        RefId::Fleiss => ratio(
            4.0 * cf * us - 4.0 * uf * cs - (uf - cs) * (uf - cs),
            (2.0 * cf + uf + cs) + (2.0 * us + uf + cs),
        ),
        RefId::Crosstab => crosstab(row, n_f, n_s),
        RefId::DStar => ratio(cf * cf, uf + cs),
        RefId::GP02 => 2.0 * (cf + us.sqrt()) + cs.sqrt(),
        RefId::GP03 => (cf * cf - cs.sqrt()).abs().sqrt(),
        RefId::GP19 => cf * (cs - cf + uf - us).abs().sqrt(),
    }
}

/// Chi-square contingency score, signed by which verdict class the statement
/// leans towards: positive when the covered fraction of failed runs exceeds
/// the covered fraction of successful runs, negative in the opposite case,
/// zero when balanced.
fn crosstab(row: &SpectrumRow, n_f: u32, n_s: u32) -> f64 {
    let cf = f64::from(row.n_cf);
    let uf = f64::from(row.n_uf);
    let cs = f64::from(row.n_cs);
    let us = f64::from(row.n_us);
    let f = f64::from(n_f);
    let s = f64::from(n_s);
    let n = f + s;
    if n == 0.0 {
        return 0.0;
    }
    let c = cf + cs;
    let u = uf + us;
    let chi_term = |observed: f64, expected: f64| ratio((observed - expected).powi(2), expected);
    let chi2 = chi_term(cf, c * f / n)
        + chi_term(cs, c * s / n)
        + chi_term(uf, u * f / n)
        + chi_term(us, u * s / n);

    // sign(n_cf/n_f - n_cs/n_s), decided in exact integer arithmetic with the
    // same 0/0 -> 0 convention as `ratio`.
    let lean = if n_f == 0 && n_s == 0 {
        std::cmp::Ordering::Equal
    } else if n_f == 0 {
        0.cmp(&row.n_cs)
    } else if n_s == 0 {
        row.n_cf.cmp(&0)
    } else {
        (u64::from(row.n_cf) * u64::from(n_s)).cmp(&(u64::from(row.n_cs) * u64::from(n_f)))
    };
    match lean {
        std::cmp::Ordering::Greater => chi2,
        std::cmp::Ordering::Less => -chi2,
        std::cmp::Ordering::Equal => 0.0,
    }
}
