//! The small hand-checkable markets, solved by both the DP and exhaustive
//! enumeration. Charges are rebuilt from oracle-only exclusion solves.

use avauction_core::*;

fn s(id: &str, q: u32, p: &[&str]) -> RawSchedule {
    let p: Vec<Money> = p.iter().map(|x| money_from_decimal(x).unwrap()).collect();
    RawSchedule::new(id, q, &p)
}

fn market(q_r: u32, service: ServiceType, bids: Vec<RawSchedule>) -> AuctionInstance {
    validate_instance(RawInstance {
        capacity: 5,
        requested_seats: q_r,
        service,
        bids,
    })
    .unwrap()
}

fn e1(service: ServiceType) -> AuctionInstance {
    market(
        3,
        service,
        vec![
            s("A", 5, &["0.40", "0.70", "0.90", "1.05", "1.15"]),
            s("B", 3, &["0.30", "0.55", "0.78"]),
        ],
    )
}

fn e2() -> AuctionInstance {
    market(
        4,
        ServiceType::Splittable,
        vec![
            s("A", 5, &["0.20", "0.38", "0.80", "1.20", "1.50"]),
            s("B", 3, &["0.22", "0.40", "0.85"]),
            s("C", 5, &["0.30", "0.60", "0.95", "1.30", "1.60"]),
        ],
    )
}

fn oracle(inst: &AuctionInstance) -> SolveOutcome {
    brute_force_wdp(inst, DEFAULT_ENUMERATION_CAP).unwrap()
}

fn oracle_without(inst: &AuctionInstance, id: &str) -> SolveOutcome {
    let rest = inst
        .bids()
        .iter()
        .filter(|b| b.bidder().as_str() != id)
        .cloned()
        .collect();
    oracle(&inst.with_bids(rest).unwrap())
}

fn d(x: &str) -> Money {
    money_from_decimal(x).unwrap()
}

/// `c_k = p*₋ₖ − p* + b_k(x*)` from oracle solves only.
fn oracle_charge(inst: &AuctionInstance, id: &str) -> Money {
    let main = oracle(inst);
    let alloc = main.allocation().unwrap();
    let own = alloc
        .assignment(&id.into())
        .map_or(Money::ZERO, |a| a.price);
    let without = oracle_without(inst, id).total().unwrap();
    without
        .checked_sub(alloc.total_bid())
        .unwrap()
        .checked_add(own)
        .unwrap()
}

#[test]
fn e1_solutions() {
    for service in ServiceType::ALL {
        assert_eq!(solve_wdp(&e1(service)), oracle(&e1(service)));
    }
    assert_eq!(
        oracle(&e1(ServiceType::Splittable)).total(),
        Some(d("0.78"))
    );
    assert_eq!(oracle(&e1(ServiceType::Private)).total(), Some(d("1.15")));
    assert_eq!(
        oracle_without(&e1(ServiceType::Splittable), "B").total(),
        Some(d("0.90"))
    );
    assert_eq!(
        oracle_without(&e1(ServiceType::Private), "A"),
        SolveOutcome::Unservable
    );
    let f = feasibility(&e1(ServiceType::Splittable));
    assert!(f.splittable && f.non_splittable && f.private);
}

#[test]
fn e2_solutions() {
    let inst = e2();
    assert_eq!(solve_wdp(&inst), oracle(&inst));
    assert_eq!(oracle(&inst).total(), Some(d("0.78")));
    assert_eq!(oracle_without(&inst, "A").total(), Some(d("1.00")));
    assert_eq!(
        solve_wdp_excluding(&inst, &"A".into()).unwrap(),
        oracle_without(&inst, "A")
    );
}

#[test]
fn charges_match_oracle_rebuild() {
    let inst = e2();
    let report = vcg_charges(&inst).unwrap();
    for id in ["A", "B", "C"] {
        assert_eq!(
            report.charge_of(&id.into()),
            Some(oracle_charge(&inst, id)),
            "{id}"
        );
    }
    assert_eq!(oracle_charge(&inst, "A"), d("0.60"));
    assert_eq!(oracle_charge(&inst, "B"), d("0.60"));
    assert_eq!(oracle_charge(&inst, "C"), Money::ZERO);
    assert_eq!(report.total_charge(), d("1.20"));

    let inst = e1(ServiceType::Splittable);
    let report = vcg_charges(&inst).unwrap();
    assert_eq!(
        report.charge_of(&"B".into()),
        Some(oracle_charge(&inst, "B"))
    );
    assert_eq!(report.total_charge(), d("0.90"));
}

#[test]
fn raised_loser_cannot_lower_the_total() {
    // E2's only loser raises its bids; it was never pivotal, totals hold
    let inst = e2();
    let base = vcg_charges(&inst).unwrap();
    let targets = std::collections::BTreeSet::from([BidderId::from("C")]);
    let raised = perturb_bids(&inst, &targets, Ratio::new(1, 10)).unwrap();
    let after = vcg_charges(&raised).unwrap();
    assert!(change_of_charge(&base, &after).unwrap() >= Ratio::from_integer(0));
}

#[test]
fn raised_co_winner_can_lower_the_splittable_total() {
    // two single-seat winners; the only alternative is C's two-seat bid
    let market = |b: &str| {
        market(
            2,
            ServiceType::Splittable,
            vec![
                s("A", 1, &["1.00"]),
                s("B", 1, &[b]),
                s("C", 2, &["2.00", "2.40"]),
            ],
        )
    };
    let truthful = vcg_charges(&market("1.00")).unwrap();
    let raised = vcg_charges(&market("1.10")).unwrap();
    assert_eq!(truthful.total_charge(), d("2.80"));
    assert_eq!(raised.total_charge(), d("2.70"));
    assert_eq!(raised.charge_of(&"A".into()), Some(d("1.30")));
    assert_eq!(raised.charge_of(&"B".into()), Some(d("1.40")));
    assert_eq!(
        change_of_charge(&truthful, &raised).unwrap(),
        Ratio::new(-1, 28)
    );
    let targets = std::collections::BTreeSet::from([BidderId::from("B")]);
    let perturbed = perturb_bids(&market("1.00"), &targets, Ratio::new(1, 10)).unwrap();
    assert_eq!(vcg_charges(&perturbed).unwrap(), raised);
}
