//! Conversion between the flat analyzer parse (feature pairs with derivation
//! markers) and the nested feature structure used everywhere else: each
//! derivation marker opens a new outer level whose `stem` is everything
//! before it and whose `suffix` is the deriving morpheme.

use super::PreprocessError;
use crate::model::{FeatureStructure, FeatureValue, LinearItem, LinearParse, STEM};

/// Nest a flat parse. Later derivation markers end up outermost; features
/// following a marker describe the derived level.
pub fn to_hierarchical(lp: &LinearParse) -> Result<FeatureStructure, PreprocessError> {
    let mut current = FeatureStructure::new();
    for (index, item) in lp.items.iter().enumerate() {
        match item {
            LinearItem::Feature(name, value) => {
                if name == STEM {
                    return Err(PreprocessError::Conversion {
                        index,
                        msg: "flat parses cannot carry a `stem` feature".into(),
                    });
                }
                current.set_atom(name, value);
            }
            LinearItem::Conv(cat, suffix) => {
                if cat.is_empty() {
                    return Err(PreprocessError::Conversion {
                        index,
                        msg: "derivation marker without a category".into(),
                    });
                }
                if current.is_empty() {
                    return Err(PreprocessError::Conversion {
                        index,
                        msg: "derivation marker before any features".into(),
                    });
                }
                let mut outer = FeatureStructure::new();
                outer.set_atom("cat", cat);
                outer.set(STEM, FeatureValue::Nested(Box::new(current)));
                outer.set_atom("suffix", suffix);
                current = outer;
            }
        }
    }
    if current.is_empty() {
        return Err(PreprocessError::Conversion { index: 0, msg: "empty parse".into() });
    }
    Ok(current)
}

/// Flatten a nested parse back into feature pairs with derivation markers.
/// Inverse of [`to_hierarchical`] for structures whose derived levels carry a
/// `suffix`.
pub fn linearize(fs: &FeatureStructure) -> LinearParse {
    let mut lp = LinearParse::new();
    fill(fs, true, &mut lp);
    lp
}

fn fill(fs: &FeatureStructure, base: bool, lp: &mut LinearParse) {
    if !base {
        for (name, value) in fs.iter() {
            if matches!(name, "cat" | "suffix" | STEM) {
                continue;
            }
            if let FeatureValue::Atom(a) = value {
                lp.items.push(LinearItem::Feature(name.to_string(), a.clone()));
            }
        }
        return;
    }
    if let Some(FeatureValue::Nested(inner)) = fs.get(STEM) {
        fill(inner, true, lp);
        let cat = fs.cat().unwrap_or("").to_string();
        let suffix = fs.atom("suffix").unwrap_or("none").to_string();
        lp.items.push(LinearItem::Conv(cat, suffix));
        fill(fs, false, lp);
        return;
    }
    for (name, value) in fs.iter() {
        if let FeatureValue::Atom(a) = value {
            lp.items.push(LinearItem::Feature(name.to_string(), a.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::serialize_parse;
    use crate::preprocess::parse_linear;

    fn hier(text: &str) -> String {
        serialize_parse(&to_hierarchical(&parse_linear(text).unwrap()).unwrap())
    }

    #[test]
    fn underived_parse_stays_flat() {
        assert_eq!(
            hier("[CAT=NOUN][ROOT=ev][AGR=3SG][POSS=NONE][CASE=LOC]"),
            "[cat:noun,root:ev,agr:'3SG',poss:'NONE',case:loc]"
        );
    }

    #[test]
    fn derivations_nest_with_the_last_on_top() {
        assert_eq!(
            hier("[CAT=VERB][ROOT=gel][SENSE=POS][CONV=NOUN=YIS][AGR=3SG][POSS=2SG][CASE=LOC][CONV=ADJ=KI]"),
            "[cat:adj,stem:[cat:noun,agr:'3SG',poss:'2SG',case:loc,stem:[cat:verb,root:gel,sense:pos],suffix:yis],suffix:ki]"
        );
        assert_eq!(
            hier("[CAT=NOUN][ROOT=imkan][CONV=ADJ=SIZ][CONV=VERB=LAS][SENSE=POS][TAM1=NARR][TAM2=PAST][AGR=3SG]"),
            "[cat:verb,sense:pos,tam1:narr,tam2:past,agr:'3SG',stem:[cat:adj,stem:[cat:noun,root:imkan],suffix:siz],suffix:las]"
        );
    }

    #[test]
    fn linearize_inverts_nesting() {
        for text in [
            "[CAT=NOUN][ROOT=ev][AGR=3SG][POSS=NONE][CASE=LOC]",
            "[CAT=VERB][ROOT=gel][SENSE=POS][CONV=NOUN=YIS][AGR=3SG][POSS=2SG][CASE=LOC][CONV=ADJ=KI]",
            "[CAT=ADJ][ROOT=4.][TYPE=ORDINAL][CONV=NOUN=NONE][AGR=3SG][POSS=NONE][CASE=NOM]",
        ] {
            let lp = parse_linear(text).unwrap();
            let fs = to_hierarchical(&lp).unwrap();
            assert_eq!(linearize(&fs), lp);
            assert_eq!(to_hierarchical(&linearize(&fs)).unwrap(), fs);
        }
    }

    #[test]
    fn marker_before_features_is_rejected() {
        let mut lp = LinearParse::new();
        lp.items.push(LinearItem::Conv("noun".into(), "none".into()));
        assert!(to_hierarchical(&lp).is_err());
    }
}
