//! Moment factoring over the two-mode squeezed vacuum.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid_arg;
use crate::{Result, C64};

/// Mode of the two-mode squeezed vacuum: `A` (ancilla) or `B` (map input).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmsvMode {
    A,
    B,
}

/// A ladder symbol `a_X` or `a_X†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WickSymbol {
    pub mode: TmsvMode,
    pub dag: bool,
}

impl WickSymbol {
    pub const fn new(mode: TmsvMode, dag: bool) -> Self {
        Self { mode, dag }
    }

    pub fn adjoint(self) -> Self {
        Self { mode: self.mode, dag: !self.dag }
    }
}

/// Parses whitespace-separated symbols such as `aB† aA aB aB`; `^` or `'`
/// may replace `†`.
pub fn parse_word(s: &str) -> Result<Vec<WickSymbol>> {
    s.split_whitespace()
        .map(|tok| {
            let (body, dag) = match tok.strip_suffix('†').or_else(|| tok.strip_suffix('^')).or_else(|| tok.strip_suffix('\'')) {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let mode = match body {
                "aA" | "a_A" => TmsvMode::A,
                "aB" | "a_B" => TmsvMode::B,
                _ => return Err(invalid_arg!("unsupported ladder symbol {tok:?}")),
            };
            Ok(WickSymbol { mode, dag })
        })
        .collect()
}

/// Ordered two-point function `⟨x y⟩` of the TMSV with `N_S` photons per mode.
fn contraction(x: WickSymbol, y: WickSymbol, n: f64, c: f64) -> f64 {
    match (x.mode == y.mode, x.dag, y.dag) {
        (true, false, true) => n + 1.0,
        (true, true, false) => n,
        (false, false, false) | (false, true, true) => c,
        _ => 0.0,
    }
}

fn pairings(word: &[WickSymbol], n: f64, c: f64) -> f64 {
    if word.is_empty() {
        return 1.0;
    }
    let first = word[0];
    let mut total = 0.0;
    let mut rest: Vec<WickSymbol> = Vec::with_capacity(word.len() - 2);
    for j in 1..word.len() {
        let w = contraction(first, word[j], n, c);
        if w == 0.0 {
            continue;
        }
        rest.clear();
        rest.extend(word[1..j].iter().chain(&word[j + 1..]).copied());
        total += w * pairings(&rest, n, c);
    }
    total
}

/// Longest word accepted by [`tmsv_wick_expectation`].
pub const MAX_WICK_LEN: usize = 12;

/// `⟨ζ| w |ζ⟩` for an ordered ladder word over the TMSV with `N_S` photons
/// per mode, by pairing every symbol with a later one.
pub fn tmsv_wick_expectation(word: &[WickSymbol], n_s: f64) -> Result<C64> {
    if !(n_s >= 0.0 && n_s.is_finite()) {
        return Err(invalid_arg!("N_S must be finite and >= 0, got {n_s}"));
    }
    if word.len() > MAX_WICK_LEN {
        return Err(invalid_arg!("word longer than {MAX_WICK_LEN} symbols"));
    }
    if word.len() % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let c = (n_s * (n_s + 1.0)).sqrt();
    Ok(C64::new(pairings(word, n_s, c), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_functions() {
        let w = parse_word("aA aB").unwrap();
        assert!((tmsv_wick_expectation(&w, 1.0).unwrap().re - 2f64.sqrt()).abs() < 1e-15);
        let w = parse_word("aB aB†").unwrap();
        assert_eq!(tmsv_wick_expectation(&w, 1.5).unwrap().re, 2.5);
        let w = parse_word("aB† aB").unwrap();
        assert_eq!(tmsv_wick_expectation(&w, 1.5).unwrap().re, 1.5);
        assert_eq!(tmsv_wick_expectation(&parse_word("aB").unwrap(), 1.0).unwrap().re, 0.0);
        assert!(parse_word("aC").is_err());
    }

    #[test]
    fn number_variance_of_thermal_marginal() {
        // ⟨n²⟩ = 2N² + N for a thermal marginal
        let w = parse_word("aB† aB aB† aB").unwrap();
        let n = 1.3;
        assert!((tmsv_wick_expectation(&w, n).unwrap().re - (2.0 * n * n + n)).abs() < 1e-12);
    }
}
