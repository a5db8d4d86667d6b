//! JSON forms of set and sequence families.
//!
//! Set families: `{"n":4,"sets":[[1,2],[2,3,4]]}`. Sequence families:
//! `{"m":3,"n":2,"seqs":[[1,2],[3,1]]}`. Serialization is compact with
//! members in ascending mask (resp. base-`m` index) order, so canonical
//! input re-serializes byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::seqfam::SeqFamily;
use crate::setfam::{elements_of, SetFamily};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFamilyDoc {
    n: usize,
    sets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeqFamilyDoc {
    m: usize,
    n: usize,
    seqs: Vec<Vec<usize>>,
}

/// Either kind of family, as selected by the presence of `"m"`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFamily {
    Sets(SetFamily),
    Seqs(SeqFamily),
}

fn reject_repeats(sets: &[Vec<usize>], what: &str) -> Result<()> {
    for s in sets {
        let mut sorted = s.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Schema(format!("{what} {s:?} repeats an element")));
        }
    }
    Ok(())
}

pub fn parse_family(text: &str) -> Result<AnyFamily> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Schema("family JSON must be an object".into()))?;
    if obj.contains_key("m") {
        let doc: SeqFamilyDoc = serde_json::from_value(value)?;
        Ok(AnyFamily::Seqs(SeqFamily::new(doc.m, doc.n, &doc.seqs)?))
    } else {
        let doc: SetFamilyDoc = serde_json::from_value(value)?;
        reject_repeats(&doc.sets, "set")?;
        Ok(AnyFamily::Sets(SetFamily::from_sets(doc.n, &doc.sets)?))
    }
}

pub fn parse_set_family(text: &str) -> Result<SetFamily> {
    match parse_family(text)? {
        AnyFamily::Sets(f) => Ok(f),
        AnyFamily::Seqs(_) => Err(Error::Schema("expected a set family, found a sequence family".into())),
    }
}

pub fn parse_seq_family(text: &str) -> Result<SeqFamily> {
    match parse_family(text)? {
        AnyFamily::Seqs(f) => Ok(f),
        AnyFamily::Sets(_) => Err(Error::Schema("expected a sequence family, found a set family".into())),
    }
}

fn set_doc(f: &SetFamily) -> SetFamilyDoc {
    SetFamilyDoc {
        n: f.n(),
        sets: f.iter().map(elements_of).collect(),
    }
}

pub fn set_family_to_json(f: &SetFamily) -> String {
    serde_json::to_string(&set_doc(f)).expect("family serializes")
}

pub fn set_family_to_value(f: &SetFamily) -> Value {
    serde_json::to_value(set_doc(f)).expect("family serializes")
}

fn seq_doc(f: &SeqFamily) -> SeqFamilyDoc {
    SeqFamilyDoc {
        m: f.m(),
        n: f.n(),
        seqs: f.vectors(),
    }
}

pub fn seq_family_to_json(f: &SeqFamily) -> String {
    serde_json::to_string(&seq_doc(f)).expect("family serializes")
}

pub fn seq_family_to_value(f: &SeqFamily) -> Value {
    serde_json::to_value(seq_doc(f)).expect("family serializes")
}

impl AnyFamily {
    pub fn to_json(&self) -> String {
        match self {
            AnyFamily::Sets(f) => set_family_to_json(f),
            AnyFamily::Seqs(f) => seq_family_to_json(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_schemas() {
        let f = parse_family(r#"{"n":2,"sets":[[1]]}"#).unwrap();
        assert_eq!(f, AnyFamily::Sets(SetFamily::from_sets(2, &[vec![1]]).unwrap()));
        let g = parse_family(r#"{"m":2,"n":2,"seqs":[[1,2]]}"#).unwrap();
        assert_eq!(g, AnyFamily::Seqs(SeqFamily::new(2, 2, &[vec![1, 2]]).unwrap()));
    }

    #[test]
    fn descriptive_errors() {
        let err = parse_family(r#"{"n":2,"sets":[[3]]}"#).unwrap_err();
        assert_eq!(err.to_string(), "element 3 exceeds n=2");
        let err = parse_family(r#"{"n":3,"sets":[[1,2],[2,1]]}"#).unwrap_err();
        assert!(matches!(err, Error::DuplicateMember(_)));
        let err = parse_family(r#"{"n":3,"sets":[[1,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("repeats"));
        let err = parse_family(r#"{"m":2,"n":2,"seqs":[[1,3]]}"#).unwrap_err();
        assert!(matches!(err, Error::SymbolOutOfRange { symbol: 3, m: 2 }));
        let err = parse_family(r#"{"n":2,"sets":[[1]],"extra":1}"#).unwrap_err();
        assert!(matches!(err, Error::Json(_)));
        let err = parse_family("{\"n\":2,\n\"sets\":[[1]").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_family("[1,2]").is_err());
    }

    #[test]
    fn canonical_text_is_stable() {
        let text = r#"{"n":4,"sets":[[1,2],[2,3,4]]}"#;
        assert_eq!(parse_family(text).unwrap().to_json(), text);
        let text = r#"{"m":3,"n":2,"seqs":[[1,2],[3,1]]}"#;
        assert_eq!(parse_family(text).unwrap().to_json(), text);
        // non-canonical member order normalizes
        let f = parse_family(r#"{"n":3,"sets":[[3],[2,1],[]]}"#).unwrap();
        assert_eq!(f.to_json(), r#"{"n":3,"sets":[[],[1,2],[3]]}"#);
    }

    mod props {
        use super::*;
        use crate::seqfam::SeqSpace;
        use crate::setfam::full_mask;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn set_family_round_trip(n in 1usize..=10, masks in proptest::collection::vec(any::<u32>(), 0..30)) {
                let f = SetFamily::from_masks(n, masks.into_iter().map(|m| m & full_mask(n))).unwrap();
                let text = set_family_to_json(&f);
                prop_assert_eq!(parse_set_family(&text).unwrap(), f);
                prop_assert_eq!(parse_family(&text).unwrap().to_json(), text);
            }

            #[test]
            fn seq_family_round_trip(m in 2usize..5, n in 1usize..5, ix in proptest::collection::vec(any::<usize>(), 0..20)) {
                let sp = SeqSpace::new(m, n).unwrap();
                let size = sp.size();
                let f = SeqFamily::from_indices(sp, ix.into_iter().map(|i| i % size)).unwrap();
                let text = seq_family_to_json(&f);
                prop_assert_eq!(parse_seq_family(&text).unwrap(), f);
            }
        }
    }
}
