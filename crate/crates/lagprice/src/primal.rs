//! Super-replication and sub-hedging programs.
//!
//! The delayed seller picks a portfolio at every vertex of the delayed
//! tree for times `0..T-1` and must be self-financing against the prices
//! that may actually prevail: at a delayed vertex `v` at time `t`, one
//! rebalancing equation per atom of the time-`t` market partition inside
//! `v`'s information block. For `T >= 4` this expands to exactly the
//! classic three constraint families (budget, terminal domination, and
//! the two-regime rebalancing rows); the same rule also defines the
//! programs for `T` in `{2, 3}`.
//!
//! Full-information programs use the market tree itself, where the atom
//! rule collapses to the standard one-equation rebalancing identity per
//! vertex.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{LinearProgram, Relation, Sense, Solution, VarSign};
use crate::market::{Claim, DelayedView, Market, VertexId};
use crate::scalar::{scalar_string, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agent {
    Seller,
    Buyer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Info {
    Delayed,
    Full,
}

/// A portfolio per tree vertex for times `0..T-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgingStrategy {
    #[serde(with = "scalar_string::vec_map")]
    pub portfolios: BTreeMap<VertexId, Vec<Rational>>,
}

/// A price together with the strategy that attains it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceQuote {
    #[serde(with = "scalar_string")]
    pub price: Rational,
    pub strategy: HedgingStrategy,
    pub agent: Agent,
    pub info: Info,
}

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("strategy is indexed by the wrong tree: unexpected vertex `{0}`")]
    UnexpectedVertex(VertexId),
    #[error("strategy is indexed by the wrong tree: missing vertex `{0}`")]
    MissingVertex(VertexId),
    #[error("portfolio at `{vertex}` has {found} entries, expected {expected}")]
    PortfolioArity {
        vertex: VertexId,
        expected: usize,
        found: usize,
    },
}

/// Re-audit of a quote against its generating program.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    /// Largest constraint violation; zero for a feasible quote.
    #[serde(with = "scalar_string")]
    pub max_violation: Rational,
    /// Violated constraints by name.
    pub violations: Vec<(String, String)>,
    /// Terminal slack per scenario: portfolio value minus the obligation.
    #[serde(with = "scalar_string::map")]
    pub surpluses: BTreeMap<VertexId, Rational>,
}

impl AuditReport {
    pub fn is_feasible(&self) -> bool {
        self.max_violation.is_zero()
    }
}

fn kappa_name() -> String {
    "kappa".to_string()
}

fn holding_name(vertex: &VertexId, asset: usize) -> String {
    format!("h:{vertex}:{asset}")
}

/// Shared scaffolding: declares `kappa` plus one portfolio vector per
/// hedging vertex and posts the budget row `S_0 . H_0 (+/-) kappa <= 0`.
struct HedgeLp {
    lp: LinearProgram,
    asset_count: usize,
}

impl HedgeLp {
    fn new(
        market: &Market,
        sense: Sense,
        hedge_vertices: &[(VertexId, usize)],
        root_key: &VertexId,
        budget_kappa_sign: Rational,
    ) -> Self {
        let mut lp = LinearProgram::new(sense);
        let kappa = lp.add_var(kappa_name(), VarSign::Free);
        lp.set_objective_coefficient(kappa, Rational::from_integer(1.into()));
        let asset_count = market.asset_count();
        for (id, _) in hedge_vertices {
            for n in 0..asset_count {
                lp.add_var(holding_name(id, n), VarSign::Free);
            }
        }
        let root_prices = market.prices(market.root());
        let mut budget: Vec<_> = (0..asset_count)
            .map(|n| {
                (
                    lp.var_id(&holding_name(root_key, n)).expect("declared"),
                    root_prices[n].clone(),
                )
            })
            .collect();
        budget.push((lp.var_id(&kappa_name()).expect("declared"), budget_kappa_sign));
        lp.add_constraint("budget", budget, Relation::Le, Rational::zero());
        HedgeLp { lp, asset_count }
    }

    fn price_terms(
        &self,
        vertex: &VertexId,
        prices: &[Rational],
        scale: &Rational,
    ) -> Vec<(crate::lp::VarId, Rational)> {
        (0..self.asset_count)
            .map(|n| {
                (
                    self.lp.var_id(&holding_name(vertex, n)).expect("declared"),
                    scale * &prices[n],
                )
            })
            .collect()
    }
}

/// The delayed seller's program: minimize the price `kappa` subject to the
/// budget, terminal domination in every scenario, and self-financing
/// against every price the market may actually show.
pub fn build_seller_delayed_lp(
    market: &Market,
    view: &DelayedView,
    claim: &Claim,
) -> LinearProgram {
    build_delayed_lp(market, view, claim, Agent::Seller)
}

/// The delayed buyer's mirror: maximize `kappa` subject to
/// `S_0 . H_0 <= -kappa` and the bought claim covering every obligation.
pub fn build_buyer_delayed_lp(
    market: &Market,
    view: &DelayedView,
    claim: &Claim,
) -> LinearProgram {
    build_delayed_lp(market, view, claim, Agent::Buyer)
}

fn build_delayed_lp(
    market: &Market,
    view: &DelayedView,
    claim: &Claim,
    agent: Agent,
) -> LinearProgram {
    let horizon = market.horizon();
    let hedge_vertices: Vec<(VertexId, usize)> = (0..horizon)
        .flat_map(|t| view.level(t).iter().map(|&g| (view.vertex(g).id.clone(), g)))
        .collect();
    let root_key = view.vertex(view.root()).id.clone();
    let (sense, kappa_sign) = match agent {
        Agent::Seller => (Sense::Minimize, Rational::from_integer((-1).into())),
        Agent::Buyer => (Sense::Maximize, Rational::from_integer(1.into())),
    };
    let mut hedge = HedgeLp::new(market, sense, &hedge_vertices, &root_key, kappa_sign);

    // Terminal rows: the parent's portfolio priced in each scenario.
    for &g in view.level(horizon) {
        let scenario = market.vertex(view.vertex(g).f_ref).id.clone();
        let parent = view.parent(g).expect("terminal has a parent");
        let parent_id = view.vertex(parent).id.clone();
        let prices = market.prices(view.vertex(g).f_ref);
        let terms = hedge.price_terms(&parent_id, prices, &Rational::from_integer(1.into()));
        let payoff = claim.value(&scenario).clone();
        let rhs = match agent {
            Agent::Seller => payoff,
            Agent::Buyer => -payoff,
        };
        hedge
            .lp
            .add_constraint(format!("super:{scenario}"), terms, Relation::Ge, rhs);
    }

    // Self-financing rows: for each delayed vertex at `1..T-1`, one
    // equation per atom of the current market partition inside its block,
    // i.e. per market child of the referenced vertex.
    for t in 1..horizon {
        for &g in view.level(t) {
            let vertex = view.vertex(g);
            let own_id = vertex.id.clone();
            let parent_id = view.vertex(view.parent(g).expect("t >= 1")).id.clone();
            for &atom in market.children(vertex.f_ref) {
                let prices = market.prices(atom);
                let mut terms =
                    hedge.price_terms(&own_id, prices, &Rational::from_integer(1.into()));
                terms.extend(hedge.price_terms(
                    &parent_id,
                    prices,
                    &Rational::from_integer((-1).into()),
                ));
                hedge.lp.add_constraint(
                    format!("sf:{own_id}:{}", market.vertex(atom).id),
                    terms,
                    Relation::Eq,
                    Rational::zero(),
                );
            }
        }
    }

    hedge.lp
}

/// Full-information seller: the same construction on the market tree,
/// where rebalancing collapses to one equation per vertex.
pub fn build_seller_full_lp(market: &Market, claim: &Claim) -> LinearProgram {
    build_full_lp(market, claim, Agent::Seller)
}

/// Full-information buyer mirror.
pub fn build_buyer_full_lp(market: &Market, claim: &Claim) -> LinearProgram {
    build_full_lp(market, claim, Agent::Buyer)
}

fn build_full_lp(market: &Market, claim: &Claim, agent: Agent) -> LinearProgram {
    let horizon = market.horizon();
    let hedge_vertices: Vec<(VertexId, usize)> = (0..horizon)
        .flat_map(|t| {
            market
                .level(t)
                .iter()
                .map(|&f| (market.vertex(f).id.clone(), f))
        })
        .collect();
    let root_key = market.vertex(market.root()).id.clone();
    let (sense, kappa_sign) = match agent {
        Agent::Seller => (Sense::Minimize, Rational::from_integer((-1).into())),
        Agent::Buyer => (Sense::Maximize, Rational::from_integer(1.into())),
    };
    let mut hedge = HedgeLp::new(market, sense, &hedge_vertices, &root_key, kappa_sign);

    for &f in market.terminals() {
        let scenario = market.vertex(f).id.clone();
        let parent = market.parent(f).expect("terminal has a parent");
        let parent_id = market.vertex(parent).id.clone();
        let terms = hedge.price_terms(
            &parent_id,
            market.prices(f),
            &Rational::from_integer(1.into()),
        );
        let payoff = claim.value(&scenario).clone();
        let rhs = match agent {
            Agent::Seller => payoff,
            Agent::Buyer => -payoff,
        };
        hedge
            .lp
            .add_constraint(format!("super:{scenario}"), terms, Relation::Ge, rhs);
    }

    for t in 1..horizon {
        for &f in market.level(t) {
            let own_id = market.vertex(f).id.clone();
            let parent_id = market
                .vertex(market.parent(f).expect("t >= 1"))
                .id
                .clone();
            let prices = market.prices(f);
            let mut terms = hedge.price_terms(&own_id, prices, &Rational::from_integer(1.into()));
            terms.extend(hedge.price_terms(
                &parent_id,
                prices,
                &Rational::from_integer((-1).into()),
            ));
            hedge.lp.add_constraint(
                format!("sf:{own_id}"),
                terms,
                Relation::Eq,
                Rational::zero(),
            );
        }
    }

    hedge.lp
}

/// Pulls the price and portfolios out of an optimal solution of one of
/// the builders above.
pub fn extract_quote(
    lp: &LinearProgram,
    solution: &Solution<Rational>,
    market: &Market,
    view: &DelayedView,
    agent: Agent,
    info: Info,
) -> PriceQuote {
    assert!(solution.is_optimal(), "quotes come from optimal solutions");
    let horizon = market.horizon();
    let keys: Vec<VertexId> = match info {
        Info::Delayed => (0..horizon)
            .flat_map(|t| view.level(t).iter().map(|&g| view.vertex(g).id.clone()))
            .collect(),
        Info::Full => (0..horizon)
            .flat_map(|t| {
                market
                    .level(t)
                    .iter()
                    .map(|&f| market.vertex(f).id.clone())
            })
            .collect(),
    };
    let mut portfolios = BTreeMap::new();
    for id in keys {
        let holdings: Vec<Rational> = (0..market.asset_count())
            .map(|n| {
                solution
                    .value(lp, &holding_name(&id, n))
                    .expect("holding variable exists")
                    .clone()
            })
            .collect();
        portfolios.insert(id, holdings);
    }
    let price = solution
        .value(lp, &kappa_name())
        .expect("kappa exists")
        .clone();
    PriceQuote {
        price,
        strategy: HedgingStrategy { portfolios },
        agent,
        info,
    }
}

/// Re-evaluates every constraint of the quote's generating program at the
/// quoted point and reports violations and terminal surpluses.
pub fn audit_hedge(
    market: &Market,
    view: &DelayedView,
    claim: &Claim,
    quote: &PriceQuote,
) -> Result<AuditReport, AuditError> {
    let horizon = market.horizon();
    let expected: Vec<VertexId> = match quote.info {
        Info::Delayed => (0..horizon)
            .flat_map(|t| view.level(t).iter().map(|&g| view.vertex(g).id.clone()))
            .collect(),
        Info::Full => (0..horizon)
            .flat_map(|t| {
                market
                    .level(t)
                    .iter()
                    .map(|&f| market.vertex(f).id.clone())
            })
            .collect(),
    };
    for id in quote.strategy.portfolios.keys() {
        if !expected.contains(id) {
            return Err(AuditError::UnexpectedVertex(id.clone()));
        }
    }
    for id in &expected {
        match quote.strategy.portfolios.get(id) {
            None => return Err(AuditError::MissingVertex(id.clone())),
            Some(h) if h.len() != market.asset_count() => {
                return Err(AuditError::PortfolioArity {
                    vertex: id.clone(),
                    expected: market.asset_count(),
                    found: h.len(),
                })
            }
            Some(_) => {}
        }
    }

    let lp = match (quote.agent, quote.info) {
        (Agent::Seller, Info::Delayed) => build_seller_delayed_lp(market, view, claim),
        (Agent::Buyer, Info::Delayed) => build_buyer_delayed_lp(market, view, claim),
        (Agent::Seller, Info::Full) => build_seller_full_lp(market, claim),
        (Agent::Buyer, Info::Full) => build_buyer_full_lp(market, claim),
    };

    let mut point = vec![Rational::zero(); lp.var_count()];
    point[lp.var_id(&kappa_name()).expect("kappa").0] = quote.price.clone();
    for (id, holdings) in &quote.strategy.portfolios {
        for (n, value) in holdings.iter().enumerate() {
            point[lp.var_id(&holding_name(id, n)).expect("holding").0] = value.clone();
        }
    }

    let mut max_violation = Rational::zero();
    let mut violations = Vec::new();
    let mut surpluses = BTreeMap::new();
    for (row, constraint) in lp.constraints().iter().enumerate() {
        let lhs = lp.row_value(row, &point);
        let slack = &lhs - &constraint.rhs;
        let violation = match constraint.relation {
            Relation::Le => {
                if slack.is_positive() {
                    slack.clone()
                } else {
                    Rational::zero()
                }
            }
            Relation::Ge => {
                if slack.is_negative() {
                    -slack.clone()
                } else {
                    Rational::zero()
                }
            }
            Relation::Eq => slack.abs(),
        };
        if violation.is_positive() {
            if violation > max_violation {
                max_violation = violation.clone();
            }
            violations.push((
                constraint.name.clone(),
                crate::scalar::format_scalar(&violation),
            ));
        }
        if let Some(scenario) = constraint.name.strip_prefix("super:") {
            surpluses.insert(VertexId::new(scenario), slack);
        }
    }

    Ok(AuditReport {
        max_violation,
        violations,
        surpluses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lp::{solve, SolveOptions, Status};
    use crate::market::derive_delayed_view;
    use crate::scalar::{rat, ratio};

    fn price(lp: &LinearProgram) -> Rational {
        let solution = solve(lp, &SolveOptions::exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        solution.objective.unwrap()
    }

    #[test]
    fn binomial_delayed_lp_has_expected_shape() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::binomial_call(&market);
        let lp = build_seller_delayed_lp(&market, &view, &claim);
        // kappa plus a two-asset portfolio at each of the 1+1+2+4 delayed
        // vertices for times 0..3.
        assert_eq!(lp.var_count(), 17);
        let supers = lp
            .constraints()
            .iter()
            .filter(|c| c.name.starts_with("super:"))
            .count();
        let rebalances = lp
            .constraints()
            .iter()
            .filter(|c| c.name.starts_with("sf:"))
            .count();
        assert_eq!(supers, 16);
        // 2 atoms at t=1, 2*2 at t=2, 4*2 at t=3.
        assert_eq!(rebalances, 14);
        assert_eq!(lp.constraint_count(), 1 + 16 + 14);
    }

    /// Rebuilds the binomial delayed program by hand, straight from the
    /// three constraint families, and matches it row by row against the
    /// production builder.
    #[test]
    fn binomial_delayed_lp_matches_hand_built_fixture() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::binomial_call(&market);
        let lp = build_seller_delayed_lp(&market, &view, &claim);

        // Stock price along a path: 4 doubled per `u`, halved per `d`.
        fn stock(path: &str) -> Rational {
            let ups = path.bytes().filter(|&b| b == b'u').count() as i32;
            let downs = path.bytes().filter(|&b| b == b'd').count() as i32;
            let spread = 2 * (ups - downs);
            if spread >= 0 {
                rat(4) * rat(1 << spread as u32)
            } else {
                rat(4) / rat(1 << (-spread) as u32)
            }
        }
        fn paths(len: usize) -> Vec<String> {
            let mut out = vec![String::new()];
            for _ in 0..len {
                out = out
                    .iter()
                    .flat_map(|p| [format!("{p}u"), format!("{p}d")])
                    .collect();
            }
            out.into_iter().map(|p| format!("r{p}")).collect()
        }

        type Row = (Relation, Rational, Vec<(String, Rational)>);
        let mut expected: BTreeMap<String, Row> = BTreeMap::new();

        // Budget: S_0 . H_{g0} - kappa <= 0.
        expected.insert(
            "budget".into(),
            (
                Relation::Le,
                rat(0),
                vec![
                    ("h:g0:r:0".into(), rat(1)),
                    ("h:g0:r:1".into(), rat(4)),
                    ("kappa".into(), rat(-1)),
                ],
            ),
        );
        // Terminal family: S_w . H at the delayed grandparent >= payoff.
        for scenario in paths(4) {
            let grandparent = &scenario[..scenario.len() - 2];
            let s = stock(&scenario);
            let payoff = if s > rat(4) { &s - rat(4) } else { rat(0) };
            expected.insert(
                format!("super:{scenario}"),
                (
                    Relation::Ge,
                    payoff,
                    vec![
                        (format!("h:g3:{grandparent}:0"), rat(1)),
                        (format!("h:g3:{grandparent}:1"), s),
                    ],
                ),
            );
        }
        // Rebalancing families, one equation per visible atom.
        for t in 1..=3usize {
            for block in paths(t - 1) {
                for atom in [format!("{block}u"), format!("{block}d")] {
                    let s = stock(&atom);
                    let parent_tag = if t == 1 {
                        "g0:r".to_string()
                    } else {
                        let parent_block = &block[..block.len() - 1];
                        format!("g{}:{}", t - 1, parent_block)
                    };
                    expected.insert(
                        format!("sf:g{t}:{block}:{atom}"),
                        (
                            Relation::Eq,
                            rat(0),
                            vec![
                                (format!("h:g{t}:{block}:0"), rat(1)),
                                (format!("h:g{t}:{block}:1"), s.clone()),
                                (format!("h:{parent_tag}:0"), rat(-1)),
                                (format!("h:{parent_tag}:1"), -s),
                            ],
                        ),
                    );
                }
            }
        }

        assert_eq!(lp.constraint_count(), expected.len());
        for constraint in lp.constraints() {
            let (relation, rhs, mut coefficients) = expected
                .remove(&constraint.name)
                .unwrap_or_else(|| panic!("unexpected constraint `{}`", constraint.name));
            assert_eq!(constraint.relation, relation, "{}", constraint.name);
            assert_eq!(constraint.rhs, rhs, "{}", constraint.name);
            let mut actual: Vec<(String, Rational)> = constraint
                .coefficients
                .iter()
                .map(|(idx, c)| (lp.variables()[*idx].name.clone(), c.clone()))
                .collect();
            actual.sort();
            coefficients.sort();
            assert_eq!(actual, coefficients, "{}", constraint.name);
        }
    }

    #[test]
    fn constant_claim_prices_at_its_value() {
        let market = fixtures::figure_tree();
        let view = derive_delayed_view(&market);
        let claim = fixtures::constant_claim(&market, ratio(7, 2));
        assert_eq!(
            price(&build_seller_delayed_lp(&market, &view, &claim)),
            ratio(7, 2)
        );
        assert_eq!(
            price(&build_buyer_delayed_lp(&market, &view, &claim)),
            ratio(7, 2)
        );
        assert_eq!(price(&build_seller_full_lp(&market, &claim)), ratio(7, 2));
        assert_eq!(price(&build_buyer_full_lp(&market, &claim)), ratio(7, 2));
    }

    #[test]
    fn zero_claim_prices_at_zero() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::constant_claim(&market, rat(0));
        assert_eq!(price(&build_seller_delayed_lp(&market, &view, &claim)), rat(0));
        assert_eq!(price(&build_buyer_delayed_lp(&market, &view, &claim)), rat(0));
    }

    #[test]
    fn binomial_full_information_price_is_risk_neutral_value() {
        // Unique per-step up weight 1/3 values the strike-4 call at 52/27.
        let market = fixtures::binomial_market();
        let claim = fixtures::binomial_call(&market);
        assert_eq!(price(&build_seller_full_lp(&market, &claim)), ratio(52, 27));
        assert_eq!(price(&build_buyer_full_lp(&market, &claim)), ratio(52, 27));
    }

    #[test]
    fn single_scenario_deterministic_payoff() {
        let market = fixtures::single_scenario_chain(4);
        let view = derive_delayed_view(&market);
        let claim = fixtures::constant_claim(&market, rat(5));
        assert_eq!(price(&build_seller_delayed_lp(&market, &view, &claim)), rat(5));
        assert_eq!(price(&build_seller_full_lp(&market, &claim)), rat(5));
    }

    #[test]
    fn buyer_never_beats_seller_and_full_never_beats_delayed() {
        let market = fixtures::figure_tree();
        let view = derive_delayed_view(&market);
        let mut values = BTreeMap::new();
        for (id, payoff) in [("w1", 4), ("w2", 0), ("w3", 1), ("w4", 0), ("w5", 2)] {
            values.insert(VertexId::from(id), rat(payoff));
        }
        let claim = Claim::new(&market, values).unwrap();
        let seller_delayed = price(&build_seller_delayed_lp(&market, &view, &claim));
        let buyer_delayed = price(&build_buyer_delayed_lp(&market, &view, &claim));
        let seller_full = price(&build_seller_full_lp(&market, &claim));
        let buyer_full = price(&build_buyer_full_lp(&market, &claim));
        assert!(buyer_delayed <= seller_delayed);
        assert!(buyer_full <= seller_full);
        assert!(seller_full <= seller_delayed);
        assert!(buyer_delayed <= buyer_full);
    }

    #[test]
    fn optimal_quote_audits_clean() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::binomial_call(&market);
        let lp = build_seller_delayed_lp(&market, &view, &claim);
        let solution = solve(&lp, &SolveOptions::exact()).unwrap();
        let quote = extract_quote(&lp, &solution, &market, &view, Agent::Seller, Info::Delayed);
        let report = audit_hedge(&market, &view, &claim, &quote).unwrap();
        assert!(report.is_feasible());
        assert!(report.surpluses.values().all(|s| !s.is_negative()));
        assert_eq!(report.surpluses.len(), 16);
    }

    #[test]
    fn perturbed_quote_is_flagged() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::binomial_call(&market);
        let lp = build_seller_delayed_lp(&market, &view, &claim);
        let solution = solve(&lp, &SolveOptions::exact()).unwrap();
        let mut quote =
            extract_quote(&lp, &solution, &market, &view, Agent::Seller, Info::Delayed);
        let root = view.vertex(view.root()).id.clone();
        quote.strategy.portfolios.get_mut(&root).unwrap()[1] += rat(1);
        let report = audit_hedge(&market, &view, &claim, &quote).unwrap();
        assert!(!report.is_feasible());
        assert!(report
            .violations
            .iter()
            .any(|(name, _)| name == "budget" || name.starts_with("sf:")));
    }

    #[test]
    fn constant_claim_replication_has_zero_surplus() {
        let market = fixtures::figure_tree();
        let view = derive_delayed_view(&market);
        let claim = fixtures::constant_claim(&market, rat(3));
        let lp = build_seller_delayed_lp(&market, &view, &claim);
        let solution = solve(&lp, &SolveOptions::exact()).unwrap();
        let quote = extract_quote(&lp, &solution, &market, &view, Agent::Seller, Info::Delayed);
        let report = audit_hedge(&market, &view, &claim, &quote).unwrap();
        assert!(report.is_feasible());
        for surplus in report.surpluses.values() {
            assert_eq!(surplus, &rat(0));
        }
    }

    #[test]
    fn audit_rejects_wrong_tree() {
        let market = fixtures::binomial_market();
        let view = derive_delayed_view(&market);
        let claim = fixtures::binomial_call(&market);
        let lp = build_seller_delayed_lp(&market, &view, &claim);
        let solution = solve(&lp, &SolveOptions::exact()).unwrap();
        let mut quote =
            extract_quote(&lp, &solution, &market, &view, Agent::Seller, Info::Delayed);
        quote.info = Info::Full;
        assert!(matches!(
            audit_hedge(&market, &view, &claim, &quote),
            Err(AuditError::UnexpectedVertex(_))
        ));
    }
}
