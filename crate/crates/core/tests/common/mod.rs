//! Reference implementations used only by the tests. Matrices are built from
//! their row event systems with γ held as an exact fraction, so no float
//! floor/ceil is involved.

#![allow(dead_code)]

use critconst::{Direction, ErrorRate};

/// γ = num / den with 0 <= num < den.
#[derive(Clone, Copy, Debug)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub const fn new(num: u64, den: u64) -> Self {
        Frac { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ⌊γ·l⌋
    pub fn floor_mul(self, l: u64) -> u64 {
        self.num * l / self.den
    }
}

pub const GAMMAS: [Frac; 6] = [
    Frac::new(0, 1),
    Frac::new(1, 20),
    Frac::new(1, 10),
    Frac::new(1, 4),
    Frac::new(29, 100),
    Frac::new(1, 3),
];

/// Row `i` of a matrix as an event system: the union over pairs `(q, j)` of
/// `{q-th smallest of i null p-values <= c_j}`, ranks strictly increasing.
pub type Events = Vec<(u64, u64)>;

pub fn kfwer_su_events(n: u64, k: u64, i: u64) -> Events {
    if i < k {
        return vec![];
    }
    (k..=i).map(|q| (q, n - i + q)).collect()
}

pub fn kfwer_sd_events(n: u64, k: u64, i: u64) -> Events {
    if i < k {
        return vec![];
    }
    vec![(k, n - i + k)]
}

pub fn fdp_su_events(n: u64, g: Frac, i: u64) -> Events {
    let m = |l: u64| g.floor_mul(l) + 1;
    let mt = (1..=n).filter(|&l| m(l) <= i).max().unwrap();
    let gi = |l: u64| (i + l).saturating_sub(n).max(m(l));
    let big_m = gi(mt);
    (1..=big_m)
        .map(|k| {
            let t = (1..=mt).filter(|&l| gi(l) == k).max().unwrap();
            (k, t)
        })
        .collect()
}

pub fn fdp_sd_events(n: u64, g: Frac, i: u64) -> Events {
    let top = g.floor_mul(n) + 1;
    // ⌊γ((n−i)/(1−γ) + 1)⌋ with γ = a/b: a((n−i)b + (b−a)) / (b(b−a)).
    let (a, b) = (g.num, g.den);
    let third = a * ((n - i) * b + (b - a)) / (b * (b - a)) + 1;
    let big_n = top.min(i).min(third);
    (1..=big_n)
        .map(|l| {
            let mut col = n.min(n + l - i);
            if a > 0 {
                // ⌈l/γ⌉ − 1 = ⌈l·b/a⌉ − 1
                col = col.min((l * b).div_ceil(a) - 1);
            }
            (l, col)
        })
        .collect()
}

pub fn events(rate: ErrorRate, n: u64, k: u64, g: Frac, i: u64) -> Events {
    match rate {
        ErrorRate::KfwerSu => kfwer_su_events(n, k, i),
        ErrorRate::KfwerSd => kfwer_sd_events(n, k, i),
        ErrorRate::FdpSu => fdp_su_events(n, g, i),
        ErrorRate::FdpSd => fdp_sd_events(n, g, i),
    }
}

/// Generalized Bonferroni coefficients of an event system for row `i`:
/// `i(1/q_s − 1/q_{s+1})` at `j_s`, and `i/q_last` at the last column.
pub fn lr_row(n: u64, i: u64, ev: &Events) -> Vec<f64> {
    let mut row = vec![0.0; n as usize];
    let i = i as f64;
    for (s, &(q, j)) in ev.iter().enumerate() {
        let coef = match ev.get(s + 1) {
            Some(&(next, _)) => i * (1.0 / q as f64 - 1.0 / next as f64),
            None => i / q as f64,
        };
        row[j as usize - 1] += coef;
    }
    row
}

pub fn oracle_matrix(rate: ErrorRate, n: u64, k: u64, g: Frac) -> Vec<Vec<f64>> {
    (1..=n).map(|i| lr_row(n, i, &events(rate, n, k, g, i))).collect()
}

pub const RATES: [ErrorRate; 4] = [ErrorRate::KfwerSu, ErrorRate::KfwerSd, ErrorRate::FdpSu, ErrorRate::FdpSd];

pub fn direction(rate: ErrorRate) -> Direction {
    rate.direction()
}

/// Rejection count by definition: largest `r` with `p_(r) <= c_r` (step-up)
/// or longest run from the start (step-down).
pub fn naive_count(p: &[f64], c: &[f64], dir: Direction) -> usize {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    match dir {
        Direction::StepUp => (1..=s.len()).rev().find(|&r| s[r - 1] <= c[r - 1]).unwrap_or(0),
        Direction::StepDown => s.iter().zip(c).take_while(|(p, c)| p <= c).count(),
    }
}

pub const BH_1995: [f64; 15] = [
    0.0001, 0.0004, 0.0019, 0.0095, 0.0201, 0.0278, 0.0298, 0.0344, 0.0459, 0.3240, 0.4262, 0.5719, 0.6528,
    0.7590, 1.000,
];
