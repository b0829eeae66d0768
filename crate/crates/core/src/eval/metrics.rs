//! Classification and segmentation metrics, generic over the number type so
//! they can be checked in exact rational arithmetic.

use num_traits::{FromPrimitive, Num};
use serde::Serialize;

use crate::fact::InsightType;

use super::EvalError;

const K: usize = InsightType::ALL.len();

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats<T> {
    pub label: InsightType,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    /// Gold instances of this class.
    pub support: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport<T> {
    pub total: usize,
    pub accuracy: T,
    pub weighted_precision: T,
    pub weighted_recall: T,
    pub weighted_f1: T,
    pub per_class: Vec<ClassStats<T>>,
    /// Rows are gold labels, columns predictions, both in [`InsightType::ALL`] order.
    pub confusion: [[usize; K]; K],
    /// Each row divided by its support; rows without support stay zero.
    pub normalized: Vec<Vec<T>>,
    /// Notes about zero divisions.
    pub flags: Vec<String>,
}

fn ratio<T: Num + FromPrimitive>(num: usize, den: usize) -> Option<T> {
    (den > 0).then(|| T::from_usize(num).expect("count fits") / T::from_usize(den).expect("count fits"))
}

pub fn classification_report<T>(pred: &[InsightType], gold: &[InsightType]) -> Result<ClassificationReport<T>, EvalError>
where
    T: Num + FromPrimitive + Copy,
{
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut confusion = [[0usize; K]; K];
    for (p, g) in pred.iter().zip(gold) {
        confusion[g.index()][p.index()] += 1;
    }
    let total = gold.len();
    let mut flags = Vec::new();
    let mut per_class = Vec::with_capacity(K);
    let (mut wp, mut wr, mut wf) = (T::zero(), T::zero(), T::zero());
    let two = T::from_u8(2).expect("2 is representable");
    for (i, label) in InsightType::ALL.into_iter().enumerate() {
        let tp = confusion[i][i];
        let support: usize = confusion[i].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[i]).sum();
        let precision = ratio(tp, predicted).unwrap_or_else(|| {
            if support > 0 {
                flags.push(format!("{label}: no predictions, precision set to 0"));
            }
            T::zero()
        });
        let recall = ratio(tp, support).unwrap_or_else(T::zero);
        let f1 = if precision + recall == T::zero() { T::zero() } else { two * precision * recall / (precision + recall) };
        let w = T::from_usize(support).expect("count fits");
        wp = wp + w * precision;
        wr = wr + w * recall;
        wf = wf + w * f1;
        per_class.push(ClassStats { label, precision, recall, f1, support, predicted });
    }
    let n = T::from_usize(total).expect("count fits");
    let trace: usize = (0..K).map(|i| confusion[i][i]).sum();
    let normalized = confusion
        .iter()
        .map(|row| {
            let support: usize = row.iter().sum();
            row.iter().map(|c| ratio(*c, support).unwrap_or_else(T::zero)).collect()
        })
        .collect();
    Ok(ClassificationReport {
        total,
        accuracy: ratio(trace, total).expect("total > 0"),
        weighted_precision: wp / n,
        weighted_recall: wr / n,
        weighted_f1: wf / n,
        per_class,
        confusion,
        normalized,
        flags,
    })
}

/// Parses string labels first; anything outside the seven is an input error.
pub fn classification_report_labels<T>(pred: &[&str], gold: &[&str]) -> Result<ClassificationReport<T>, EvalError>
where
    T: Num + FromPrimitive + Copy,
{
    let parse = |xs: &[&str]| -> Result<Vec<InsightType>, EvalError> {
        xs.iter().map(|s| s.parse::<InsightType>().map_err(|_| EvalError::UnknownLabel(s.to_string()))).collect()
    };
    classification_report(&parse(pred)?, &parse(gold)?)
}

/// Share of paragraphs whose predicted boundary set equals the gold one.
pub fn segmentation_accuracy<T>(pred: &[Vec<usize>], gold: &[Vec<usize>]) -> Result<T, EvalError>
where
    T: Num + FromPrimitive + Copy,
{
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    let hits = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    ratio(hits, gold.len()).ok_or(EvalError::Empty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use InsightType::*;

    type Q = Ratio<i64>;

    #[test]
    fn identity_is_perfect() {
        let x = [Value, Trend, None, None, Rank];
        let r = classification_report::<Q>(&x, &x).unwrap();
        let one = Q::from_integer(1);
        assert_eq!((r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1), (one, one, one, one));
        assert!(r.flags.is_empty());
    }

    #[test]
    fn three_of_four() {
        let r = classification_report::<Q>(&[Value, Value, Trend, None], &[Value, Trend, Trend, None]).unwrap();
        assert_eq!(r.accuracy, Q::new(3, 4));
        // value: P=1/2 R=1; trend: P=1 R=1/2; none: 1,1
        assert_eq!(r.weighted_precision, Q::new(7, 8));
        assert_eq!(r.weighted_recall, Q::new(3, 4));
    }

    #[test]
    fn zero_prediction_class_is_flagged() {
        let r = classification_report::<f64>(&[None, None], &[Rank, None]).unwrap();
        assert_eq!(r.per_class[Rank.index()].precision, 0.0);
        assert_eq!(r.flags.len(), 1);
        assert_eq!(r.normalized[Value.index()], vec![0.0; 7]);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(classification_report::<f64>(&[Value], &[]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(classification_report_labels::<f64>(&["distribution"], &["value"]), Err(EvalError::UnknownLabel(_))));
    }

    #[test]
    fn segmentation_exact_match() {
        let g = vec![vec![10, 20], vec![5], vec![7, 9], vec![3]];
        let mut p = g.clone();
        assert_eq!(segmentation_accuracy::<Q>(&p, &g).unwrap(), Q::from_integer(1));
        p[2] = vec![7, 8, 9];
        assert_eq!(segmentation_accuracy::<Q>(&p, &g).unwrap(), Q::new(3, 4));
        assert!(segmentation_accuracy::<f64>(&p[..3], &g).is_err());
    }
}
