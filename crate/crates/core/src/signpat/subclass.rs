use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{canonical_form, equivalent, pattern_of, sample_with, MagnitudeProfile, Sign, SignPattern};
use crate::mat::RealMatrix;
use crate::{Error, Result};

/// A shift `X + alpha I` whose resulting diagonal signs depend only on the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftRule {
    /// `alpha = 0`
    Identity,
    /// `0 < alpha < min |x_ii|`: zero becomes plus, nonzero signs stay.
    SmallPositive,
    /// `alpha > max |x_ii|`: every diagonal cell becomes plus.
    LargePositive,
    /// `-min |x_ii| < alpha < 0`: zero becomes minus, nonzero signs stay.
    SmallNegative,
    /// `alpha < -max |x_ii|`: every diagonal cell becomes minus.
    LargeNegative,
}

impl ShiftRule {
    pub const ALL: [ShiftRule; 5] = [
        ShiftRule::Identity,
        ShiftRule::SmallPositive,
        ShiftRule::LargePositive,
        ShiftRule::SmallNegative,
        ShiftRule::LargeNegative,
    ];

    fn map(self, s: Sign) -> Sign {
        match (self, s) {
            (ShiftRule::Identity, s) => s,
            (ShiftRule::SmallPositive, Sign::Zero) => Sign::Plus,
            (ShiftRule::SmallNegative, Sign::Zero) => Sign::Minus,
            (ShiftRule::SmallPositive | ShiftRule::SmallNegative, s) => s,
            (ShiftRule::LargePositive, _) => Sign::Plus,
            (ShiftRule::LargeNegative, _) => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SubclassVerdict {
    Holds(ShiftRule),
    /// A member of the smaller class that no shift moves into the larger one.
    Fails(RealMatrix),
    Unknown,
}

/// Decides `b ⊴ a`: every member of `Q(b)` shifts by a multiple of the identity
/// into a matrix whose pattern is equivalent to `a`.
///
/// Uniform shift rules give `Holds`. Otherwise `samples` seeded members of
/// `Q(b)` are tried against every distinct diagonal sign vector reachable by a
/// shift (the breakpoints are `alpha = -x_ii`); one member with no good shift
/// gives `Fails`, and `Unknown` means no counterexample was found.
pub fn subclass_check(b: &SignPattern, a: &SignPattern, samples: usize, seed: u64) -> Result<SubclassVerdict> {
    if b.n() != a.n() {
        return Err(Error::DimensionMismatch {
            left: b.n(),
            right: a.n(),
        });
    }
    let n = b.n();
    for rule in ShiftRule::ALL {
        let mut shifted = b.clone();
        for i in 0..n {
            shifted.set(i, i, rule.map(b.get(i, i)));
        }
        if equivalent(&shifted, a).is_some() {
            return Ok(SubclassVerdict::Holds(rule));
        }
    }
    let target = canonical_form(a).0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = sample_with(b, &mut rng, MagnitudeProfile::default());
        if !shift_candidates(&x)
            .into_iter()
            .any(|alpha| canonical_form(&pattern_of(&x.shift(alpha), 0.0)).0 == target)
        {
            return Ok(SubclassVerdict::Fails(x));
        }
    }
    Ok(SubclassVerdict::Unknown)
}

/// One shift per cell of the diagonal arrangement: each breakpoint, each gap
/// midpoint, and one point beyond either end.
fn shift_candidates(x: &RealMatrix) -> Vec<f64> {
    let mut bp: Vec<f64> = (0..x.n()).map(|i| -x.get(i, i)).collect();
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    let mut out = bp.clone();
    out.extend(bp.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    let span = bp[bp.len() - 1] - bp[0];
    out.push(bp[0] - 1.0 - span);
    out.push(bp[bp.len() - 1] + 1.0 + span);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SignPattern {
        s.parse().unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let b = p("0+/+0");
        let a = p("-+/+-");
        assert_eq!(
            subclass_check(&b, &a, 50, 1).unwrap(),
            SubclassVerdict::Holds(ShiftRule::SmallNegative)
        );
        match subclass_check(&a, &b, 50, 1).unwrap() {
            SubclassVerdict::Fails(x) => assert_ne!(x.get(0, 0), x.get(1, 1)),
            other => panic!("expected Fails, got {other:?}"),
        }
    }

    #[test]
    fn reflexive_and_mismatch() {
        let s = p("0+0/+0-/+0+");
        assert_eq!(
            subclass_check(&s, &s, 10, 0).unwrap(),
            SubclassVerdict::Holds(ShiftRule::Identity)
        );
        assert!(matches!(
            subclass_check(&s, &p("0+/+0"), 10, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_shift_rule() {
        assert_eq!(
            subclass_check(&p("-+/+0"), &p("++/++"), 10, 0).unwrap(),
            SubclassVerdict::Holds(ShiftRule::LargePositive)
        );
    }
}
