//! Explicit elements built from a normal sequence: one whose restriction
//! stays normal along a superficial set, and one whose restriction along a
//! lower-density-zero set loses simple normality.

use serde::{Deserialize, Serialize};

use super::{Alphabet, BoxStream, SourceError, Symbol, SymbolStream};
use crate::selectors::{density_profile, Interval, ListSet, SuperficialDecomposition};

/// Lower-density estimates at or above this are treated as positive.
pub const LOWER_DENSITY_ZERO_TOL: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    /// Member of `S`; value `z_j` with `j` counted from the last `B` start.
    Selected,
    /// Position of `C`; value `z_j` with `j` counted from the interval start.
    Complement,
    /// Non-member in `A`.
    Filler,
}

/// Stream for [`build_preserving_pair`].
pub struct PreservingPairStream {
    z: BoxStream,
    z_buf: Vec<Symbol>,
    alphabet: Alphabet,
    filler: Symbol,
    horizon: u64,
    /// `(start, end, slot, restarts_counter)` covering `[1, horizon]`.
    segments: Vec<(u64, u64, Slot, bool)>,
    seg: usize,
    /// `B = ∅`: members of `S` take `z` in order, other positions copy `z`.
    direct: bool,
    s_counter: u64,
    c_counter: u64,
    pos: u64,
}

impl PreservingPairStream {
    fn z_at(&mut self, j: u64) -> Symbol {
        while (self.z_buf.len() as u64) < j {
            let s = self.z.next_symbol();
            self.z_buf.push(s);
        }
        self.z_buf[(j - 1) as usize]
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

/// Builds `x` from `z` so that, when `z` is μ-normal, both `x` and `x|_S` are.
///
/// With `B = ∅`, `x|_S = z` and `x_i = z_i` off `S`. Otherwise the members of
/// `S` in `[b_n, b_{n+1})` (`b_n` the start of the `n`-th `B` interval, and the
/// members before `b₁` as an initial segment) receive `z_1, z_2, …` afresh,
/// each `C` interval likewise receives `z_1, z_2, …`, and the remaining
/// positions of `A` get the alphabet's first symbol. Past the horizon of the
/// decomposition `x_i = z_i`.
pub fn build_preserving_pair(
    z: BoxStream,
    decomposition: &SuperficialDecomposition,
) -> Result<PreservingPairStream, SourceError> {
    decomposition
        .validate()
        .map_err(SourceError::Decomposition)?;
    let d = decomposition;
    let mut segments: Vec<(u64, u64, Slot, bool)> = Vec::new();
    for iv in &d.b {
        segments.push((iv.start, iv.end, Slot::Selected, true));
    }
    for iv in &d.c {
        segments.push((iv.start, iv.end, Slot::Complement, true));
    }
    let mut members = d.s_in_a.iter().peekable();
    for iv in &d.a {
        let mut p = iv.start;
        while p <= iv.end {
            if members.peek() == Some(&&p) {
                members.next();
                segments.push((p, p, Slot::Selected, false));
                p += 1;
            } else {
                let next_member = members.peek().map_or(iv.end + 1, |&&s| s.min(iv.end + 1));
                segments.push((p, next_member - 1, Slot::Filler, false));
                p = next_member;
            }
        }
    }
    segments.sort_unstable_by_key(|s| s.0);
    let alphabet = z.alphabet();
    Ok(PreservingPairStream {
        filler: alphabet.first_symbol(),
        alphabet,
        z,
        z_buf: Vec::new(),
        horizon: d.horizon,
        segments,
        seg: 0,
        direct: d.b.is_empty(),
        s_counter: 0,
        c_counter: 0,
        pos: 0,
    })
}

impl SymbolStream for PreservingPairStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        let p = self.pos;
        if p > self.horizon {
            return self.z_at(p);
        }
        while self.segments[self.seg].1 < p {
            self.seg += 1;
        }
        let (start, _, slot, restarts) = self.segments[self.seg];
        if self.direct {
            return match slot {
                Slot::Selected => {
                    self.s_counter += 1;
                    self.z_at(self.s_counter)
                }
                _ => self.z_at(p),
            };
        }
        match slot {
            Slot::Selected => {
                if restarts && p == start {
                    self.s_counter = 0;
                }
                self.s_counter += 1;
                self.z_at(self.s_counter)
            }
            Slot::Complement => {
                if p == start {
                    self.c_counter = 0;
                }
                self.c_counter += 1;
                self.z_at(self.c_counter)
            }
            Slot::Filler => self.filler,
        }
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpoilerMode {
    /// `Full` when the upper density estimate is below 0.01, else `Windowed`.
    Auto,
    /// `S′ = S`.
    Full,
    /// `S′` from the window schedule.
    Windowed,
}

/// One selection window `S ∩ (N_j, E_j]` of the spoiler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpoilerWindow {
    /// `N_j`: first `n > E_{j−1}` with `#(S ∩ [1,n])/n ≤ 1/j²`.
    pub start: u64,
    /// `E_j`: the last selected member.
    pub end: u64,
    /// `w_j = max(2·#(S ∩ [1,N_j]), 1)` members taken.
    pub width: u64,
    /// `#(S ∩ [1,E_j])`, the index of `E_j` within `x|_S`.
    pub rank_end: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub mode: SpoilerMode,
    pub windows: Vec<SpoilerWindow>,
    /// `S′ ∩ [1, horizon]`, increasing.
    pub replaced: Vec<u64>,
    pub horizon: u64,
    pub lower_density_estimate: f64,
    pub upper_density_estimate: f64,
}

impl WindowSchedule {
    /// `#(S′ ∩ [1,n]) / #(S ∩ [1,n])` at the last window end.
    pub fn relative_fraction_at_last_window(&self) -> Option<f64> {
        let w = self.windows.last()?;
        let replaced = self.replaced.partition_point(|&s| s <= w.end) as f64;
        Some(replaced / w.rank_end as f64)
    }
}

fn window_schedule(members: &[u64], horizon: u64) -> (Vec<SpoilerWindow>, Vec<u64>) {
    let mut windows = Vec::new();
    let mut replaced = Vec::new();
    let mut end = 0u64;
    // members[..idx] are ≤ the current n
    let mut idx = 0usize;
    let mut j = 1u64;
    'outer: loop {
        let bound = 1.0 / (j * j) as f64;
        let mut n = end + 1;
        let start = loop {
            if n > horizon {
                break 'outer;
            }
            while idx < members.len() && members[idx] <= n {
                idx += 1;
            }
            if idx as f64 / n as f64 <= bound {
                break n;
            }
            n += 1;
        };
        let width = (2 * idx as u64).max(1);
        let take_to = idx + width as usize;
        if take_to > members.len() {
            break;
        }
        replaced.extend_from_slice(&members[idx..take_to]);
        end = members[take_to - 1];
        windows.push(SpoilerWindow {
            start,
            end,
            width,
            rank_end: take_to as u64,
        });
        idx = take_to;
        j += 1;
    }
    (windows, replaced)
}

/// Stream for [`build_density_zero_spoiler`].
pub struct SpoilerStream {
    x: BoxStream,
    symbol: Symbol,
    schedule: WindowSchedule,
    next_replaced: usize,
}

impl SpoilerStream {
    pub fn schedule(&self) -> &WindowSchedule {
        &self.schedule
    }
}

/// Replaces `x_s` by `a` for `s ∈ S′ ⊂ S`, where `S′` has density zero but
/// makes up at least 2/3 of `S ∩ [1, E_j]` at each window end `E_j`.
///
/// `members` are the elements of `S` up to `horizon`; positions beyond the
/// horizon are left untouched.
pub fn build_density_zero_spoiler(
    x: BoxStream,
    members: &[u64],
    horizon: u64,
    a: Symbol,
    mode: SpoilerMode,
) -> Result<SpoilerStream, SourceError> {
    if !x.alphabet().contains(a) {
        return Err(SourceError::SymbolOutsideAlphabet(a));
    }
    let members: Vec<u64> = members.iter().copied().filter(|&s| s <= horizon).collect();
    let profile = density_profile(&mut ListSet::new(members.clone()), horizon.max(1), &[])
        .map_err(|e| SourceError::Decomposition(e.to_string()))?;
    if profile.lower_estimate >= LOWER_DENSITY_ZERO_TOL {
        return Err(SourceError::PositiveLowerDensity(profile.lower_estimate));
    }
    let resolved = match mode {
        SpoilerMode::Auto if profile.upper_estimate < 0.01 => SpoilerMode::Full,
        SpoilerMode::Auto => SpoilerMode::Windowed,
        m => m,
    };
    let (windows, replaced) = match resolved {
        SpoilerMode::Full => (Vec::new(), members),
        _ => window_schedule(&members, horizon),
    };
    Ok(SpoilerStream {
        x,
        symbol: a,
        schedule: WindowSchedule {
            mode: resolved,
            windows,
            replaced,
            horizon,
            lower_density_estimate: profile.lower_estimate,
            upper_density_estimate: profile.upper_estimate,
        },
        next_replaced: 0,
    })
}

impl SymbolStream for SpoilerStream {
    fn alphabet(&self) -> Alphabet {
        self.x.alphabet()
    }

    fn next_symbol(&mut self) -> Symbol {
        let s = self.x.next_symbol();
        let p = self.x.position();
        if self.schedule.replaced.get(self.next_replaced) == Some(&p) {
            self.next_replaced += 1;
            self.symbol
        } else {
            s
        }
    }

    fn position(&self) -> u64 {
        self.x.position()
    }
}

/// Members of `S ∩ [1, horizon]` as intervals, for callers building `B` by hand.
pub fn members_as_intervals(members: &[u64]) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for &s in members {
        match out.last_mut() {
            Some(Interval { end, .. }) if *end + 1 == s => *end = s,
            _ => out.push(Interval::new(s, s)),
        }
    }
    out
}
