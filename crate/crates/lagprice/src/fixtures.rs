//! Canonical small markets used by tests, benches and the documentation.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::market::{Claim, Market, Vertex, VertexId};
use crate::scalar::{rat, ratio, Rational};

/// Two-period tree with five scenarios split `{w1,w2} / {w3,w4,w5}` at
/// time 1. Prices admit a strictly positive martingale measure.
pub fn figure_tree() -> Market {
    let v = |id: &str, time: usize, parent: Option<usize>, price: Rational| Vertex {
        id: VertexId::from(id),
        time,
        parent,
        prices: vec![rat(1), price],
    };
    let vertices = vec![
        v("root", 0, None, rat(4)),
        v("up", 1, Some(0), rat(6)),
        v("down", 1, Some(0), rat(2)),
        v("w1", 2, Some(1), rat(8)),
        v("w2", 2, Some(1), rat(3)),
        v("w3", 2, Some(2), rat(4)),
        v("w4", 2, Some(2), rat(2)),
        v("w5", 2, Some(2), rat(1)),
    ];
    let probs: BTreeMap<VertexId, Rational> = ["w1", "w2", "w3", "w4", "w5"]
        .iter()
        .map(|id| (VertexId::from(*id), ratio(1, 5)))
        .collect();
    Market::new(
        vec!["bond".into(), "stock".into()],
        2,
        vertices,
        probs,
    )
    .expect("figure tree is valid")
}

/// One-path market: a single scenario, prices `(1, 1)` at every time.
pub fn single_scenario_chain(horizon: usize) -> Market {
    let mut vertices = Vec::new();
    for t in 0..=horizon {
        vertices.push(Vertex {
            id: VertexId::new(format!("n{t}")),
            time: t,
            parent: if t == 0 { None } else { Some(t - 1) },
            prices: vec![rat(1), rat(1)],
        });
    }
    let mut probs = BTreeMap::new();
    probs.insert(VertexId::new(format!("n{horizon}")), rat(1));
    Market::new(vec!["bond".into(), "stock".into()], horizon, vertices, probs)
        .expect("chain is valid")
}

/// Recombining-price binary tree written out as a (non-recombining)
/// scenario tree: the stock starts at 4 and doubles or halves each step,
/// the bond is the numeraire. Terminal probabilities are uniform.
pub fn binary_multiplicative_market(horizon: usize) -> Market {
    let mut vertices = vec![Vertex {
        id: VertexId::from("r"),
        time: 0,
        parent: None,
        prices: vec![rat(1), rat(4)],
    }];
    let mut frontier: Vec<(usize, Rational)> = vec![(0, rat(4))];
    for t in 1..=horizon {
        let mut next = Vec::new();
        for (parent_idx, price) in frontier {
            for (tag, factor) in [("u", rat(2)), ("d", ratio(1, 2))] {
                let idx = vertices.len();
                let id = format!("{}{}", vertices[parent_idx].id, tag);
                let new_price = &price * &factor;
                vertices.push(Vertex {
                    id: VertexId::new(id),
                    time: t,
                    parent: Some(parent_idx),
                    prices: vec![rat(1), new_price.clone()],
                });
                next.push((idx, new_price));
            }
        }
        frontier = next;
    }
    let leaves = 1u64 << horizon;
    let probs: BTreeMap<VertexId, Rational> = vertices
        .iter()
        .filter(|v| v.time == horizon)
        .map(|v| (v.id.clone(), ratio(1, leaves as i64)))
        .collect();
    Market::new(vec!["bond".into(), "stock".into()], horizon, vertices, probs)
        .expect("binary market is valid")
}

/// The four-period doubling/halving market used as the golden instance.
pub fn binomial_market() -> Market {
    binary_multiplicative_market(4)
}

/// Alias used by structural tests on uniform binary trees.
pub fn uniform_binary_market(horizon: usize) -> Market {
    binary_multiplicative_market(horizon)
}

/// Call on the terminal stock price, strike 4, for a binary market.
pub fn binomial_call(market: &Market) -> Claim {
    let strike = rat(4);
    let values: BTreeMap<VertexId, Rational> = market
        .terminals()
        .iter()
        .map(|&idx| {
            let payoff = &market.prices(idx)[1] - &strike;
            let payoff = if payoff.is_negative() {
                Rational::zero()
            } else {
                payoff
            };
            (market.vertex(idx).id.clone(), payoff)
        })
        .collect();
    Claim::new(market, values).expect("call claim is valid")
}

/// Market admitting no martingale measure: the risky asset moves from 1
/// to 2 in every scenario over the first step.
pub fn dominant_asset_market() -> Market {
    let v = |id: &str, time: usize, parent: Option<usize>, price: Rational| Vertex {
        id: VertexId::from(id),
        time,
        parent,
        prices: vec![rat(1), price],
    };
    let vertices = vec![
        v("root", 0, None, rat(1)),
        v("a", 1, Some(0), rat(2)),
        v("b", 1, Some(0), rat(2)),
        v("a1", 2, Some(1), rat(3)),
        v("a2", 2, Some(1), rat(1)),
        v("b1", 2, Some(2), rat(2)),
    ];
    let probs: BTreeMap<VertexId, Rational> = [("a1", ratio(1, 3)), ("a2", ratio(1, 3)), ("b1", ratio(1, 3))]
        .iter()
        .map(|(id, p)| (VertexId::from(*id), p.clone()))
        .collect();
    Market::new(vec!["bond".into(), "stock".into()], 2, vertices, probs)
        .expect("dominant asset market is structurally valid")
}

/// Constant claim `B = c` for any market.
pub fn constant_claim(market: &Market, value: Rational) -> Claim {
    Claim::constant(market, value).expect("constant claim is valid")
}
