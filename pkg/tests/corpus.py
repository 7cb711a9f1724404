"""Planning files for roundtrip checks: bundled golden files plus the toys."""

from sgplan.harness import assets

import toys


def entries():
    """(label, domain text, problem text or None); the problem is parsed against the domain."""
    out = [(f"domain:{d}", assets.domain_text(d), None) for d in assets.DOMAINS]
    for d, s in assets.all_pairs():
        out.append((f"problem:{d}/{s}", assets.domain_text(d), assets.read_text("golden", d, f"{s}.problem.pddl")))
    chain_d, chain_p = toys.chain_domain(5)
    switch_d, switch_p = toys.switches(6)
    out += [
        ("toy:fetch-domain", toys.FETCH_DOMAIN, None),
        ("toy:fetch-problem", toys.FETCH_DOMAIN, toys.FETCH_PROBLEM),
        ("toy:fetch-unreachable", toys.FETCH_DOMAIN, toys.FETCH_UNREACHABLE),
        ("toy:mop-domain", toys.MOP_DOMAIN, None),
        ("toy:mop-problem", toys.MOP_DOMAIN, toys.MOP_PROBLEM),
        ("toy:house-goal", assets.domain_text("house_cleaning"), toys.house_goal_problem()),
        ("toy:chain-domain", chain_d, None),
        ("toy:chain-problem", chain_d, chain_p),
        ("toy:switches-domain", switch_d, None),
        ("toy:switches-problem", switch_d, switch_p),
    ]
    return out
