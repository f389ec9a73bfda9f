//! Winding-number invariants of Dehn-twist words about separating curves.
//!
//! Critical points are labelled `1..=p+q+r`: saddles first (`1..=q`), then
//! minima and maxima. Reference arcs `γ_j` run from the last point to `x_j`,
//! `j ∈ 1..p+q+r`. A twist about a separating curve `α` changes the winding
//! number along `γ_j` by `k·⟨α,γ_j⟩·w(∂N)` where `N` is the side of `α`
//! containing no arc endpoints; summing these increments over a word gives
//! the invariants `B` (extremum arcs, over Z) and `B^abs` (saddle arcs,
//! mod 2). Both are insensitive to everything about the word except the
//! declared curve data, which is what makes them computable here.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindingError {
    #[error("need at least one minimum and one maximum: p={p}, r={r}")]
    BadCounts { p: u32, r: u32 },
    #[error("curve `{name}` lists point {label}, outside 1..={max}")]
    UnknownPoint { name: String, label: u32, max: u32 },
    #[error("curve `{name}` must enclose a proper non-empty subset of the critical points")]
    NotSeparating { name: String },
    #[error("curve `{name}` declares {got} intersection numbers, expected {want}")]
    WrongArcCount { name: String, got: usize, want: usize },
    #[error("no critical point with label {label}; labels run 1..={max}")]
    UnknownLabel { label: u32, max: u32 },
    #[error("no reference arc {j}; arcs run 1..={max}")]
    UnknownArc { j: u32, max: u32 },
    #[error("s_iq is undefined for i = {i}; need 1 ≤ i < {max} and i ≠ q")]
    SiqUndefined { i: u32, max: u32 },
    #[error("obstruction counts out of range: k={k} (at most {q}), l={l} (at most {extrema})")]
    ObstructionOutOfRange { k: u32, l: u32, q: u32, extrema: u32 },
    #[error("twist power for curve `{name}` must be non-zero")]
    ZeroPower { name: String },
}

/// The fixed critical-point data of the function class: `q` saddles, then
/// `p` minima and `r` maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalSetup {
    p: u32,
    q: u32,
    r: u32,
}

impl CriticalSetup {
    pub fn new(p: u32, q: u32, r: u32) -> Result<Self, WindingError> {
        if p == 0 || r == 0 {
            return Err(WindingError::BadCounts { p, r });
        }
        Ok(Self { p, q, r })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn point_count(&self) -> u32 {
        self.p + self.q + self.r
    }

    /// Arcs `γ_1 .. γ_{p+q+r−1}` from the last point to each other point.
    pub fn arc_count(&self) -> u32 {
        self.point_count() - 1
    }

    /// Index of the gradient at `x_i`: −1 at saddles, +1 at extrema.
    pub fn index(&self, label: u32) -> Result<i64, WindingError> {
        if label == 0 || label > self.point_count() {
            return Err(WindingError::UnknownLabel { label, max: self.point_count() });
        }
        Ok(if label <= self.q { -1 } else { 1 })
    }
}

/// A separating curve, described by the side `N` disjoint from the arc
/// base point: which critical points it encloses, its genus, and the
/// declared intersection numbers with the reference arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingCurve {
    pub name: String,
    pub enclosed: BTreeSet<u32>,
    pub genus_enclosed: u32,
    pub intersections: Vec<i64>,
}

impl SeparatingCurve {
    pub fn validate(&self, setup: &CriticalSetup) -> Result<(), WindingError> {
        for &label in &self.enclosed {
            if label == 0 || label > setup.point_count() {
                return Err(WindingError::UnknownPoint {
                    name: self.name.clone(),
                    label,
                    max: setup.point_count(),
                });
            }
        }
        if self.enclosed.is_empty() || self.enclosed.len() == setup.point_count() as usize {
            return Err(WindingError::NotSeparating { name: self.name.clone() });
        }
        if self.intersections.len() != setup.arc_count() as usize {
            return Err(WindingError::WrongArcCount {
                name: self.name.clone(),
                got: self.intersections.len(),
                want: setup.arc_count() as usize,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistLetter {
    pub curve: SeparatingCurve,
    pub power: i64,
}

/// A word of Dehn twists about separating curves, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwistWord {
    pub letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn validate(&self, setup: &CriticalSetup) -> Result<(), WindingError> {
        for letter in &self.letters {
            letter.curve.validate(setup)?;
            if letter.power == 0 {
                return Err(WindingError::ZeroPower { name: letter.curve.name.clone() });
            }
        }
        Ok(())
    }
}

/// Winding number of the boundary of `N`: `(1 − 2g_N) − Σ_{i∈N} ind(x_i)`,
/// the Euler characteristic of `N` minus the enclosed indices. Independent
/// of the function, which is why twist words evaluate to plain sums.
pub fn winding_boundary(
    setup: &CriticalSetup,
    curve: &SeparatingCurve,
) -> Result<i64, WindingError> {
    curve.validate(setup)?;
    let enclosed_index: i64 = curve
        .enclosed
        .iter()
        .map(|&label| setup.index(label))
        .sum::<Result<i64, _>>()?;
    Ok((1 - 2 * curve.genus_enclosed as i64) - enclosed_index)
}

/// Change of the winding number along `γ_j` under the `k`-th power of the
/// twist about `curve`: `k·⟨α,γ_j⟩·w(∂N)`.
pub fn delta_w(
    setup: &CriticalSetup,
    curve: &SeparatingCurve,
    power: i64,
    arc: u32,
) -> Result<i64, WindingError> {
    if arc == 0 || arc > setup.arc_count() {
        return Err(WindingError::UnknownArc { j: arc, max: setup.arc_count() });
    }
    let w = winding_boundary(setup, curve)?;
    Ok(power * curve.intersections[(arc - 1) as usize] * w)
}

/// Total winding increments along the extremum arcs `γ_i`, `q < i < p+q+r`,
/// as a vector in `Z^{p+r−1}`. Additive under concatenation of words.
pub fn eval_b(setup: &CriticalSetup, word: &TwistWord) -> Result<Vec<i64>, WindingError> {
    word.validate(setup)?;
    (setup.q + 1..setup.point_count())
        .map(|arc| {
            word.letters
                .iter()
                .map(|l| delta_w(setup, &l.curve, l.power, arc))
                .sum()
        })
        .collect()
}

/// Winding increments along the saddle arcs `γ_i`, `1 ≤ i < q`, reduced
/// mod 2: a vector in `Z₂^{q−1}` with entries 0 or 1.
pub fn eval_b_abs(setup: &CriticalSetup, word: &TwistWord) -> Result<Vec<u8>, WindingError> {
    word.validate(setup)?;
    (1..setup.q)
        .map(|arc| {
            let total: i64 = word
                .letters
                .iter()
                .map(|l| delta_w(setup, &l.curve, l.power, arc))
                .sum::<Result<i64, _>>()?;
            Ok(total.rem_euclid(2) as u8)
        })
        .collect()
}

/// The curve `s_iq` around `x_i` and the saddle `x_q` only, meeting `γ_i`
/// once and no other arc. Its twist hits a single invariant component.
pub fn siq_curve(setup: &CriticalSetup, i: u32) -> Result<SeparatingCurve, WindingError> {
    if i == 0 || i >= setup.point_count() || i == setup.q {
        return Err(WindingError::SiqUndefined { i, max: setup.point_count() });
    }
    let curve = SeparatingCurve {
        name: format!("s_{i}q"),
        enclosed: BTreeSet::from([i, setup.q]),
        genus_enclosed: 0,
        intersections: (1..=setup.arc_count())
            .map(|j| if j == i { 1 } else { 0 })
            .collect(),
    };
    curve.validate(setup)?;
    Ok(curve)
}

/// What the twist about the boundary of a genus-0 disk with `k_saddles`
/// saddles and `l_extrema` extrema says about membership in the stabilizer
/// of the function class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Obstruction {
    /// `w(∂D) = 1 + k − ℓ`.
    pub value: i64,
    /// `false` means the twist provably moves the function class; `true`
    /// is "no conclusion", never a membership claim.
    pub in_gamma_f_possible: bool,
}

pub fn gamma_f_obstruction(
    setup: &CriticalSetup,
    k_saddles: u32,
    l_extrema: u32,
) -> Result<Obstruction, WindingError> {
    let extrema = setup.p + setup.r;
    if k_saddles > setup.q || l_extrema > extrema {
        return Err(WindingError::ObstructionOutOfRange {
            k: k_saddles,
            l: l_extrema,
            q: setup.q,
            extrema,
        });
    }
    Ok(Obstruction {
        value: 1 + k_saddles as i64 - l_extrema as i64,
        in_gamma_f_possible: l_extrema == 0
            || l_extrema == k_saddles + 1
            || l_extrema == extrema,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup132() -> CriticalSetup {
        CriticalSetup::new(1, 3, 2).unwrap()
    }

    fn single(setup: &CriticalSetup, label: u32) -> SeparatingCurve {
        SeparatingCurve {
            name: format!("s_{label}"),
            enclosed: BTreeSet::from([label]),
            genus_enclosed: 0,
            intersections: vec![0; setup.arc_count() as usize],
        }
    }

    fn word_of(letters: Vec<TwistLetter>) -> TwistWord {
        TwistWord { letters }
    }

    #[test]
    fn setup_indices_and_counts() {
        let s = setup132();
        assert_eq!(s.point_count(), 6);
        assert_eq!(s.arc_count(), 5);
        assert_eq!(s.index(1).unwrap(), -1);
        assert_eq!(s.index(3).unwrap(), -1);
        assert_eq!(s.index(4).unwrap(), 1);
        assert_eq!(s.index(6).unwrap(), 1);
        assert!(s.index(0).is_err());
        assert!(s.index(7).is_err());
        assert!(CriticalSetup::new(0, 1, 1).is_err());
        assert!(CriticalSetup::new(1, 1, 0).is_err());
    }

    #[test]
    fn boundary_winding_around_single_points() {
        let s = setup132();
        for saddle in 1..=3 {
            assert_eq!(winding_boundary(&s, &single(&s, saddle)).unwrap(), 2);
        }
        for extremum in 4..=6 {
            assert_eq!(winding_boundary(&s, &single(&s, extremum)).unwrap(), 0);
        }
    }

    #[test]
    fn boundary_winding_of_a_disk_counts_saddles_minus_extrema() {
        let s = setup132();
        // k saddles and ℓ extrema in a genus-0 disk → 1 + k − ℓ
        let disk = SeparatingCurve {
            name: "d".into(),
            enclosed: BTreeSet::from([1, 2, 4]),
            genus_enclosed: 0,
            intersections: vec![0; 5],
        };
        assert_eq!(winding_boundary(&s, &disk).unwrap(), 1 + 2 - 1);
        let handle = SeparatingCurve { genus_enclosed: 1, ..disk };
        assert_eq!(winding_boundary(&s, &handle).unwrap(), 0);
    }

    #[test]
    fn degenerate_curves_are_rejected() {
        let s = setup132();
        let empty = SeparatingCurve {
            name: "e".into(),
            enclosed: BTreeSet::new(),
            genus_enclosed: 0,
            intersections: vec![0; 5],
        };
        assert!(matches!(
            winding_boundary(&s, &empty),
            Err(WindingError::NotSeparating { .. })
        ));
        let full = SeparatingCurve {
            name: "f".into(),
            enclosed: (1..=6).collect(),
            genus_enclosed: 0,
            intersections: vec![0; 5],
        };
        assert!(matches!(
            winding_boundary(&s, &full),
            Err(WindingError::NotSeparating { .. })
        ));
        let short = SeparatingCurve {
            name: "g".into(),
            enclosed: BTreeSet::from([1]),
            genus_enclosed: 0,
            intersections: vec![0; 3],
        };
        assert!(matches!(
            winding_boundary(&s, &short),
            Err(WindingError::WrongArcCount { .. })
        ));
    }

    #[test]
    fn siq_twists_hit_single_arcs() {
        let s = setup132();
        for i in [1, 2] {
            let c = siq_curve(&s, i).unwrap();
            assert_eq!(winding_boundary(&s, &c).unwrap(), 3);
            assert_eq!(delta_w(&s, &c, 1, i).unwrap(), 3);
            for j in (1..=5).filter(|&j| j != i) {
                assert_eq!(delta_w(&s, &c, 1, j).unwrap(), 0);
            }
        }
        for i in [4, 5] {
            let c = siq_curve(&s, i).unwrap();
            assert_eq!(winding_boundary(&s, &c).unwrap(), 1);
            assert_eq!(delta_w(&s, &c, 1, i).unwrap(), 1);
        }
        assert!(matches!(siq_curve(&s, 3), Err(WindingError::SiqUndefined { .. })));
        assert!(siq_curve(&s, 0).is_err());
        assert!(siq_curve(&s, 6).is_err());
        assert!(matches!(
            delta_w(&s, &single(&s, 1), 1, 9),
            Err(WindingError::UnknownArc { .. })
        ));
    }

    #[test]
    fn zero_winding_curves_are_invisible() {
        let s = setup132();
        // one saddle, two extrema: w = 0, so any intersections contribute nothing
        let curve = SeparatingCurve {
            name: "z".into(),
            enclosed: BTreeSet::from([1, 4, 5]),
            genus_enclosed: 0,
            intersections: vec![7, -3, 2, 9, 11],
        };
        assert_eq!(winding_boundary(&s, &curve).unwrap(), 0);
        for j in 1..=5 {
            assert_eq!(delta_w(&s, &curve, 5, j).unwrap(), 0);
        }
    }

    #[test]
    fn b_vectors_give_standard_bases() {
        let s = setup132();
        // saddle arcs: B_abs(s_iq) = e_i over Z₂ (since 3 ≡ 1)
        for i in 1..3u32 {
            let w = word_of(vec![TwistLetter { curve: siq_curve(&s, i).unwrap(), power: 1 }]);
            let expect: Vec<u8> = (1..3).map(|j| u8::from(j == i)).collect();
            assert_eq!(eval_b_abs(&s, &w).unwrap(), expect);
            assert_eq!(eval_b(&s, &w).unwrap(), vec![0, 0]);
        }
        // extremum arcs: B(s_iq) = e_{i−q} over Z
        for i in 4..6u32 {
            let w = word_of(vec![TwistLetter { curve: siq_curve(&s, i).unwrap(), power: 1 }]);
            let expect: Vec<i64> = (4..6).map(|j| i64::from(j == i)).collect();
            assert_eq!(eval_b(&s, &w).unwrap(), expect);
            assert_eq!(eval_b_abs(&s, &w).unwrap(), vec![0, 0]);
        }
    }

    #[test]
    fn words_are_additive_and_cancel() {
        let s = setup132();
        let a = TwistLetter { curve: siq_curve(&s, 1).unwrap(), power: 2 };
        let b = TwistLetter { curve: siq_curve(&s, 4).unwrap(), power: -3 };
        let ab = word_of(vec![a.clone(), b.clone()]);
        let sum_b: Vec<i64> = eval_b(&s, &word_of(vec![a.clone()]))
            .unwrap()
            .iter()
            .zip(eval_b(&s, &word_of(vec![b.clone()])).unwrap())
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(eval_b(&s, &ab).unwrap(), sum_b);
        // reversing the word and inverting powers negates B
        let inverse = word_of(vec![
            TwistLetter { power: -b.power, ..b.clone() },
            TwistLetter { power: -a.power, ..a.clone() },
        ]);
        let neg: Vec<i64> = eval_b(&s, &ab).unwrap().iter().map(|x| -x).collect();
        assert_eq!(eval_b(&s, &inverse).unwrap(), neg);
        // a letter next to its inverse evaluates to zero
        let cancel = word_of(vec![
            a.clone(),
            TwistLetter { power: -a.power, ..a.clone() },
        ]);
        assert_eq!(eval_b(&s, &cancel).unwrap(), vec![0, 0]);
        assert_eq!(eval_b_abs(&s, &cancel).unwrap(), vec![0, 0]);
        // doubled powers vanish mod 2
        let doubled = word_of(vec![TwistLetter { power: 2, ..a.clone() }]);
        assert_eq!(eval_b_abs(&s, &doubled).unwrap(), vec![0, 0]);
        // empty word → zero vectors of the right lengths
        assert_eq!(eval_b(&s, &TwistWord::default()).unwrap(), vec![0, 0]);
        assert_eq!(eval_b_abs(&s, &TwistWord::default()).unwrap(), vec![0, 0]);
        // zero powers are rejected
        let zero = word_of(vec![TwistLetter { power: 0, ..a }]);
        assert!(matches!(
            eval_b(&s, &zero),
            Err(WindingError::ZeroPower { .. })
        ));
    }

    #[test]
    fn surjectivity_witnesses_for_small_setups() {
        for (p, q, r) in [(1u32, 2u32, 1u32), (1, 3, 2), (2, 1, 1)] {
            let s = CriticalSetup::new(p, q, r).unwrap();
            let n = s.point_count();
            // {B_abs(s_iq)}_{i<q} is the standard basis of Z₂^{q−1}
            for i in 1..q {
                let w = word_of(vec![TwistLetter {
                    curve: siq_curve(&s, i).unwrap(),
                    power: 1,
                }]);
                let got = eval_b_abs(&s, &w).unwrap();
                let expect: Vec<u8> = (1..q).map(|j| u8::from(j == i)).collect();
                assert_eq!(got, expect, "B_abs basis failed at i={i} for ({p},{q},{r})");
            }
            // {B(s_iq)}_{q<i<n} is the standard basis of Z^{p+r−1}
            for i in q + 1..n {
                let w = word_of(vec![TwistLetter {
                    curve: siq_curve(&s, i).unwrap(),
                    power: 1,
                }]);
                let got = eval_b(&s, &w).unwrap();
                let expect: Vec<i64> = (q + 1..n).map(|j| i64::from(j == i)).collect();
                assert_eq!(got, expect, "B basis failed at i={i} for ({p},{q},{r})");
            }
        }
    }

    #[test]
    fn obstruction_verdicts() {
        let s = setup132();
        let one_each = gamma_f_obstruction(&s, 1, 1).unwrap();
        assert_eq!(one_each.value, 1);
        assert!(!one_each.in_gamma_f_possible);

        let no_conclusion = gamma_f_obstruction(&s, 0, 1).unwrap();
        assert_eq!(no_conclusion.value, 0);
        assert!(no_conclusion.in_gamma_f_possible);

        let two_one = gamma_f_obstruction(&s, 2, 1).unwrap();
        assert_eq!(two_one.value, 2);
        assert!(!two_one.in_gamma_f_possible);

        let all_extrema = gamma_f_obstruction(&s, 0, 3).unwrap();
        assert!(all_extrema.in_gamma_f_possible);
        assert!(gamma_f_obstruction(&s, 4, 0).is_err());
        assert!(gamma_f_obstruction(&s, 0, 4).is_err());
    }
}
