"""Revelation-principle auditing.

The auditor builds the direct mechanism of a social choice function, checks
whether truthful reporting survives as an equilibrium when misreporting is
costly, and decomposes the classical revelation argument into its individual
inequality families so the exact step that breaks can be reported.

Direct mechanisms are built so that strategic action costs cannot reach them:
only the misreporting schedule is carried over, re-expressed as the cost of
playing a report. Playing a report is the only thing a direct game charges
for.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ConstructionError,
    CostModel,
    Mechanism,
    Outcome,
    SocialChoiceFunction,
    TypeSpace,
    UtilityTable,
)
from .equilibrium import (
    BayesianGame,
    Deviation,
    EquilibriumMode,
    StrategyProfile,
    find_all_pure_bne,
    implements_scf,
    interim_expected_payoff,
    is_bayesian_nash,
)


@dataclass(frozen=True)
class DirectMechanism:
    """The direct mechanism of a social choice function.

    Reports are type labels in the declared type order and the outcome of a
    report profile is the rule's value there. `misreport` is the only cost
    data a direct mechanism holds; there is no strategic cost table to hold.
    """

    mechanism: Mechanism
    type_space: TypeSpace
    scf: SocialChoiceFunction
    misreport: dict[tuple[int, str, str], Fraction]

    def cost_model(self) -> CostModel:
        """Costs of the direct game.

        The misreport schedule doubles as the strategic cost of playing a
        report: cost(agent, report, true type) = misreport(agent, true type,
        report). The profit-mode engine then prices reports exactly as
        utility minus misreporting cost, with honest reports free.
        """
        transposed = {
            (agent, reported, true): v
            for (agent, true, reported), v in self.misreport.items()
        }
        return CostModel(strategic=transposed, misreport=dict(self.misreport))

    def game(self, utilities: UtilityTable) -> BayesianGame:
        return BayesianGame(self.mechanism, self.type_space, utilities, self.cost_model())


def direct_mechanism_from_scf(scf: SocialChoiceFunction, costs: CostModel) -> DirectMechanism:
    """Collapse a rule to its direct mechanism, keeping only misreport costs."""
    ts = scf.type_space
    actions_of = tuple(ts.types_of)
    outcome_of = {profile: scf.table[profile] for profile in ts.profiles()}
    mech = Mechanism(actions_of, outcome_of)
    return DirectMechanism(mech, ts, scf, dict(costs.misreport))


def truthful_profile(type_space: TypeSpace) -> StrategyProfile:
    """Every type reports itself."""
    return StrategyProfile.from_maps([{t: t for t in ts} for ts in type_space.types_of])


@dataclass(frozen=True)
class TruthVerdict:
    """Whether truth-telling is an equilibrium of the direct game."""

    truthful: bool
    witness: Deviation | None

    def __post_init__(self) -> None:
        if self.truthful == (self.witness is not None):
            raise ConstructionError("witness must be present exactly when truth-telling fails")


def is_truthfully_implementable(
    scf: SocialChoiceFunction, costs: CostModel, utilities: UtilityTable
) -> TruthVerdict:
    """Is truth-telling a profit-based equilibrium of the rule's direct game?

    The witness on failure is the most profitable misreport, as (agent, true
    type, reported type, gain).
    """
    direct = direct_mechanism_from_scf(scf, costs)
    game = direct.game(utilities)
    verdict = is_bayesian_nash(game, truthful_profile(scf.type_space), EquilibriumMode.PROFIT_BASED)
    return TruthVerdict(verdict.is_equilibrium, verdict.witness)


@dataclass(frozen=True)
class BreakPoint:
    """Where the revelation argument snaps: the mimicry inequality holds at
    this (agent, type, mimicked type) triple but the cost-free truthful
    inequality fails there, by `costfree_gain`."""

    agent: int
    type_label: str
    mimicked_type: str
    costfree_gain: Fraction


@dataclass(frozen=True)
class ProofChainRecord:
    """The three inequality families behind the classical revelation argument.

    `equilibrium_inequalities_hold`: the candidate profile survives every
    single-action deviation in profit mode (deviations range over all
    actions). `mimicry_inequalities_hold`: it survives deviations restricted
    to other types' equilibrium actions, strategic cost of the mimicked action
    retained. `costfree_truthful_inequalities_hold`: truthful reporting beats
    misreporting on the rule itself with all costs erased. Classically the
    first implies the second implies the third; with strategic costs the last
    step can fail, and `break_point` pins the triple where it does.
    """

    vacuous: bool
    equilibrium_inequalities_hold: bool
    mimicry_inequalities_hold: bool
    costfree_truthful_inequalities_hold: bool
    break_point: BreakPoint | None


def _costfree_report_value(
    scf: SocialChoiceFunction, utilities: UtilityTable, agent: int, type_label: str, report: str
) -> Fraction:
    """Expected rule utility for an agent of `type_label` reporting `report`,
    everyone else truthful, no costs of any kind."""
    ts = scf.type_space
    total = Fraction(0)
    for opp in ts.opponent_profiles(agent):
        w = ts.conditional_weight(agent, opp)
        theta = ts.full_profile(agent, report, opp)
        total += w * utilities.utility(agent, scf.evaluate(theta), type_label)
    return total


def audit_proof_chain(
    game: BayesianGame, profile: StrategyProfile, scf: SocialChoiceFunction
) -> ProofChainRecord:
    """Evaluate each step of the revelation argument separately.

    The record is marked vacuous when the profile is not a profit-based
    equilibrium to begin with; the other inequality families are still
    reported as computed.
    """
    ts = game.type_space
    holds_equilibrium = is_bayesian_nash(game, profile, EquilibriumMode.PROFIT_BASED).is_equilibrium

    mimicry_ok = True
    costfree_ok = True
    best: BreakPoint | None = None
    for agent in range(ts.agent_count):
        for t in ts.types_of[agent]:
            own = interim_expected_payoff(
                game, profile, agent, t, mode=EquilibriumMode.PROFIT_BASED
            )
            truthful_value = _costfree_report_value(scf, game.utilities, agent, t, t)
            for mimicked in ts.types_of[agent]:
                if mimicked == t:
                    continue
                mimicked_action = profile.strategies[agent].action(mimicked)
                mimicry_holds_here = (
                    interim_expected_payoff(
                        game, profile, agent, t, deviation=mimicked_action,
                        mode=EquilibriumMode.PROFIT_BASED,
                    )
                    <= own
                )
                if not mimicry_holds_here:
                    mimicry_ok = False
                costfree_gain = (
                    _costfree_report_value(scf, game.utilities, agent, t, mimicked)
                    - truthful_value
                )
                if costfree_gain > 0:
                    costfree_ok = False
                    if mimicry_holds_here and (best is None or costfree_gain > best.costfree_gain):
                        best = BreakPoint(agent, t, mimicked, costfree_gain)
    return ProofChainRecord(
        vacuous=not holds_equilibrium,
        equilibrium_inequalities_hold=holds_equilibrium,
        mimicry_inequalities_hold=mimicry_ok,
        costfree_truthful_inequalities_hold=costfree_ok,
        break_point=best,
    )


@dataclass(frozen=True)
class AuditReport:
    """Full revelation audit of one (mechanism, profile, rule) triple.

    `violation` is the conjunction the revelation principle forbids: the
    profile is an equilibrium implementing the rule, yet truthful reporting is
    not an equilibrium of the rule's direct game.
    """

    indirect_equilibrium: StrategyProfile
    implemented: bool
    truthful_is_bne: bool
    violation: bool
    truthful_witness: Deviation | None
    chain: ProofChainRecord

    def __post_init__(self) -> None:
        if self.violation != (self.implemented and not self.truthful_is_bne):
            raise ConstructionError("violation flag must equal implemented and not truthful")
        if self.truthful_is_bne and self.truthful_witness is not None:
            raise ConstructionError("truthful witness present although truth-telling holds")


def audit_revelation_principle(
    game: BayesianGame, profile: StrategyProfile, scf: SocialChoiceFunction
) -> AuditReport:
    """Audit one implementation claim end to end.

    Checks that the profile is a profit-based equilibrium of the mechanism
    and implements the rule, then asks whether the rule's direct game keeps
    truth-telling as an equilibrium under the same misreporting schedule.
    """
    verdict = is_bayesian_nash(game, profile, EquilibriumMode.PROFIT_BASED)
    implemented = verdict.is_equilibrium and implements_scf(game, profile, scf)
    truth = is_truthfully_implementable(scf, game.costs, game.utilities)
    chain = audit_proof_chain(game, profile, scf)
    return AuditReport(
        indirect_equilibrium=profile,
        implemented=implemented,
        truthful_is_bne=truth.truthful,
        violation=implemented and not truth.truthful,
        truthful_witness=truth.witness,
        chain=chain,
    )


# ---------------------------------------------------------------------------
# Zero-cost regression: with all costs erased the classical revelation
# principle must hold, so every equilibrium's induced rule must be truthfully
# implementable. Random small instances keep the engine honest.
# ---------------------------------------------------------------------------

DEFAULT_REGRESSION_SEED = 20240811


def random_zero_cost_game(rng: random.Random) -> BayesianGame:
    """A random two-agent game: 1..2 types, 1..3 actions, utilities in [0, 1]
    with denominator 12, prior uniform or random full-support weights."""
    types_of = tuple(
        tuple(f"t{k}" for k in range(rng.randint(1, 2))) for _ in range(2)
    )
    priors = []
    for ts in types_of:
        if rng.random() < 1 / 2 or len(ts) == 1:
            priors.append({t: Fraction(1, len(ts)) for t in ts})
        else:
            weights = [rng.randint(1, 6) for _ in ts]
            priors.append({t: Fraction(w, sum(weights)) for t, w in zip(ts, weights)})
    type_space = TypeSpace(types_of, tuple(priors))

    actions_of = tuple(
        tuple(f"a{k}" for k in range(rng.randint(1, 3))) for _ in range(2)
    )
    outcomes = [Outcome(f"x{k}") for k in range(rng.randint(1, 4))]
    outcome_of = {
        profile: rng.choice(outcomes) for profile in itertools.product(*actions_of)
    }
    mechanism = Mechanism(actions_of, outcome_of)

    utility = {}
    for agent in range(2):
        for x in outcomes:
            for t in types_of[agent]:
                utility[(agent, x.label, t)] = Fraction(rng.randint(0, 12), 12)
    return BayesianGame(mechanism, type_space, UtilityTable(utility), CostModel.zero())


def induced_scf(game: BayesianGame, profile: StrategyProfile) -> SocialChoiceFunction:
    """The rule a profile plays out: type profile -> realized outcome."""
    table = {
        theta: game.mechanism.outcome(profile.action_profile(theta))
        for theta in game.type_space.profiles()
    }
    return SocialChoiceFunction(game.type_space, table)


@dataclass(frozen=True)
class RegressionSummary:
    """Result of the zero-cost regression sweep."""

    instances: int
    equilibria_checked: int
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def zero_cost_regression(
    instances: int = 200, seed: int = DEFAULT_REGRESSION_SEED
) -> RegressionSummary:
    """Check the classical revelation principle on random zero-cost games.

    For every pure profit-based equilibrium of every generated game, the
    induced rule must be truthfully implementable and the audit must not
    raise the violation flag. Deterministic for a fixed seed.
    """
    rng = random.Random(seed)
    failures = []
    checked = 0
    for k in range(instances):
        game = random_zero_cost_game(rng)
        for profile in find_all_pure_bne(game, EquilibriumMode.PROFIT_BASED):
            checked += 1
            rule = induced_scf(game, profile)
            report = audit_revelation_principle(game, profile, rule)
            if not report.truthful_is_bne:
                failures.append(
                    f"instance {k}: induced rule not truthfully implementable at {profile}"
                )
            elif report.violation:
                failures.append(f"instance {k}: audit raised violation at {profile}")
    return RegressionSummary(instances=instances, equilibria_checked=checked, failures=tuple(failures))
