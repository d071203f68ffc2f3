use lexsyn::synfeat::{count_production_units, syntactic_features, word_count, COUNT_FEATURES};
use lexsyn::treepat::{parse_ptb, Tree};

const TREEBANK: &str = include_str!("fixtures/treebank.txt");

fn fixture() -> Vec<([usize; 9], Tree)> {
    TREEBANK
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (nums, tree) = l.split_once('\t').unwrap();
            let n: Vec<usize> = nums.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (n.try_into().unwrap(), parse_ptb(tree).unwrap())
        })
        .collect()
}

#[test]
fn every_sentence_matches_its_annotation() {
    let bank = fixture();
    assert_eq!(bank.len(), 25);
    let mut bad = Vec::new();
    for (i, (want, tree)) in bank.iter().enumerate() {
        let c = count_production_units(std::slice::from_ref(tree));
        let mut got = vec![word_count(std::slice::from_ref(tree))];
        got.extend(COUNT_FEATURES.iter().map(|u| c.get(u).unwrap()));
        if got != want {
            bad.push(format!("sentence {}: want {want:?} got {got:?}", i + 1));
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn totals_and_ratios() {
    let trees: Vec<Tree> = fixture().into_iter().map(|(_, t)| t).collect();
    let v = syntactic_features(&trees);
    // Summed by hand from the annotation columns.
    let (w, s, vp, c, t, dc, ct, cp, cn) = (128.0, 25.0, 38.0, 36.0, 27.0, 8.0, 7.0, 5.0, 12.0);
    for (name, want) in [("S", s), ("VP", vp), ("C", c), ("T", t), ("DC", dc), ("CT", ct), ("CP", cp), ("CN", cn)] {
        assert_eq!(v.value(name), Some(want), "{name}");
    }
    let ratios = [
        ("MLS", w / s),
        ("MLT", w / t),
        ("MLC", w / c),
        ("C/S", c / s),
        ("VP/T", vp / t),
        ("C/T", c / t),
        ("DC/C", dc / c),
        ("DC/T", dc / t),
        ("T/S", t / s),
        ("CT/T", ct / t),
        ("CP/T", cp / t),
        ("CP/C", cp / c),
        ("CN/T", cn / t),
        ("CN/C", cn / c),
    ];
    for (name, want) in ratios {
        let got = v.value(name).unwrap();
        assert!((got - want).abs() < 1e-12, "{name}: {got} vs {want}");
    }
}
