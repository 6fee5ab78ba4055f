use alloc::vec::Vec;

use crate::label::LabelTag;
use crate::validate::runs;

/// Rewrites a label sequence into one that passes validation, touching only
/// what the rules require. Valid input is returned unchanged.
///
/// Steps, in order:
/// 1. `Rk` in the correction becomes `C`; `Sk` in the request becomes `C`.
/// 2. Of several runs of one R/S label, the longest (first on ties) stays;
///    the others become `C` in the request and `D` in the correction.
/// 3. `Sk` without `Rk` becomes `D`; `Rk` without `Sk` becomes `C`.
/// 4. A lone slot 2 is renamed to slot 1; if the `R2` run precedes the `R1`
///    run the slot numbers are swapped.
/// 5. If the correction carries any `D` or `S`, its `C` labels become `D`.
pub fn repair_labels(labels: &[LabelTag], boundary: usize) -> Vec<LabelTag> {
    use LabelTag::*;
    let mut out = labels.to_vec();
    let boundary = boundary.min(out.len());

    for (i, l) in out.iter_mut().enumerate() {
        if i >= boundary && l.is_reparandum() || i < boundary && l.is_repair() {
            *l = C;
        }
    }

    for tag in [R1, R2, S1, S2] {
        let spans = runs(&out, tag);
        if spans.len() < 2 {
            continue;
        }
        let mut keep = 0;
        for (i, s) in spans.iter().enumerate() {
            if s.len() > spans[keep].len() {
                keep = i;
            }
        }
        let fill = if tag.is_reparandum() { C } else { D };
        for (i, s) in spans.into_iter().enumerate() {
            if i != keep {
                out[s].fill(fill);
            }
        }
    }

    for (rep, fix) in [(R1, S1), (R2, S2)] {
        let has_rep = out.contains(&rep);
        let has_fix = out.contains(&fix);
        if has_rep && !has_fix {
            replace(&mut out, rep, C);
        } else if has_fix && !has_rep {
            replace(&mut out, fix, D);
        }
    }

    let first_r1 = out.iter().position(|&l| l == R1);
    let first_r2 = out.iter().position(|&l| l == R2);
    match (first_r1, first_r2) {
        (None, Some(_)) => {
            replace(&mut out, R2, R1);
            replace(&mut out, S2, S1);
        }
        (Some(a), Some(b)) if b < a => {
            for l in out.iter_mut() {
                *l = match *l {
                    R1 => R2,
                    R2 => R1,
                    S1 => S2,
                    S2 => S1,
                    other => other,
                };
            }
        }
        _ => {}
    }

    let (_, correction) = out.split_at_mut(boundary);
    if correction.iter().any(|&l| l == D || l.is_repair()) {
        replace(correction, C, D);
    }
    out
}

fn replace(labels: &mut [LabelTag], from: LabelTag, to: LabelTag) {
    for l in labels.iter_mut().filter(|l| **l == from) {
        *l = to;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_labels;
    use alloc::vec;
    use LabelTag::*;

    #[test]
    fn valid_input_is_fixpoint() {
        let labels = [C, R1, C, C, D, S1, S1];
        assert_eq!(repair_labels(&labels, 4), labels.to_vec());
    }

    #[test]
    fn unpaired_repair_is_deleted() {
        let out = repair_labels(&[C, R1, C, C, D, S1, S2], 4);
        assert_eq!(out, vec![C, R1, C, C, D, S1, D]);
        assert!(validate_labels(&out, 4).ok());
    }

    #[test]
    fn stray_repair_in_request() {
        // the stray S1 becomes C; the remaining D forces the correction's
        // copies to D (a correction segment cannot mix C with D)
        let out = repair_labels(&[S1, C, C, C, D, C, C], 4);
        assert_eq!(out, vec![C, C, C, C, D, D, D]);
        assert!(validate_labels(&out, 4).ok());
    }

    #[test]
    fn keeps_longest_run() {
        let out = repair_labels(&[R1, C, R1, R1, D, S1, D, S1, S1], 4);
        assert_eq!(out, vec![C, C, R1, R1, D, D, D, S1, S1]);
    }

    #[test]
    fn renumbers_slots() {
        assert_eq!(repair_labels(&[C, R2, D, S2], 2), vec![C, R1, D, S1]);
        assert_eq!(
            repair_labels(&[R2, C, R1, D, S1, S2], 3),
            vec![R1, C, R2, D, S2, S1]
        );
    }

    #[test]
    fn reparandum_in_correction() {
        let out = repair_labels(&[C, C, D, R1], 2);
        assert_eq!(out, vec![C, C, D, D]);
    }
}
