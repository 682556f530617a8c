"""Two-agent labor market with productivity types and costly wage bids.

Two workers with private productivity (low or high) bid an education level to
a firm paying a fixed wage w. Education is pure signalling: it costs bid/theta
and produces nothing. The higher bidder is hired, ties split the job. The
target allocation rule hires the more productive worker. This is the bundled
reference scenario for the revelation audit: inside an open wage window the
separating bid profile implements the rule in profit-based equilibrium, yet
for small misreporting costs truth-telling dies in the direct mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .auditor import (
    AuditReport,
    DirectMechanism,
    audit_revelation_principle,
    direct_mechanism_from_scf,
    truthful_profile,
)
from .core import (
    ConstructionError,
    CostModel,
    Mechanism,
    Outcome,
    SocialChoiceFunction,
    TypeSpace,
    UtilityTable,
    as_rational,
)
from .equilibrium import (
    BayesianGame,
    Deviation,
    DominantAction,
    EquilibriumMode,
    NormalFormGame,
    StrategyProfile,
    dominant_strategies,
    expost_normal_form,
    find_all_pure_bne,
    find_pure_nash,
    implements_scf,
    is_bayesian_nash,
)

TYPE_LOW = "theta_L"
TYPE_HIGH = "theta_H"
BID_ZERO = "0"
BID_HIGH = "e_H"

HIRE_FIRST = Outcome("hire_1", (Fraction(1), Fraction(0)))
SPLIT = Outcome("split", (Fraction(1, 2), Fraction(1, 2)))
HIRE_SECOND = Outcome("hire_2", (Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class LaborParams:
    """Exact parameters of the labor market.

    theta_L < theta_H are the productivity types, e_H the high education
    level, w the posted wage, c_mis the cost of reporting high while being
    low (reporting low while high is free), prior_high the probability of
    the high type for each worker independently.
    """

    theta_L: Fraction
    theta_H: Fraction
    e_H: Fraction
    w: Fraction
    c_mis: Fraction = Fraction(0)
    prior_high: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        for name in ("theta_L", "theta_H", "e_H", "w", "c_mis", "prior_high"):
            object.__setattr__(self, name, as_rational(getattr(self, name), name))
        if not 0 < self.theta_L < self.theta_H:
            raise ConstructionError(
                f"need 0 < theta_L < theta_H, got theta_L={self.theta_L}, theta_H={self.theta_H}"
            )
        if self.e_H <= 0:
            raise ConstructionError(f"education level e_H must be positive, got {self.e_H}")
        if self.w <= 0:
            raise ConstructionError(f"wage must be positive, got {self.w}")
        if self.c_mis < 0:
            raise ConstructionError(f"misreporting cost must be non-negative, got {self.c_mis}")
        if not 0 < self.prior_high < 1:
            raise ConstructionError(
                f"prior_high must lie strictly between 0 and 1, got {self.prior_high}"
            )


@dataclass(frozen=True)
class LaborScenario:
    """The assembled game plus the parameter bookkeeping the reports need."""

    params: LaborParams
    game: BayesianGame
    scf: SocialChoiceFunction
    theta_value: dict[str, Fraction]
    bid_value: dict[str, Fraction]

    def direct(self) -> DirectMechanism:
        return direct_mechanism_from_scf(self.scf, self.game.costs)

    def firm_expected_utility(self, bids, true_types) -> Fraction:
        """The firm's payoff: hired production minus the wage. Report-only;
        the firm is not a player and this feeds no equilibrium check."""
        true_types = self.game.type_space.validate_profile(true_types)
        x = self.game.mechanism.outcome(bids)
        total = -self.params.w
        for share, t in zip(x.payload, true_types):
            total += share * self.theta_value[t]
        return total


def build_scenario(params: LaborParams) -> LaborScenario:
    """Wire the labor market into the generic game model."""
    types = (TYPE_LOW, TYPE_HIGH)
    prior = {TYPE_LOW: 1 - params.prior_high, TYPE_HIGH: params.prior_high}
    type_space = TypeSpace((types, types), (dict(prior), dict(prior)))
    theta_value = {TYPE_LOW: params.theta_L, TYPE_HIGH: params.theta_H}
    bid_value = {BID_ZERO: Fraction(0), BID_HIGH: params.e_H}

    def ranked(v1: Fraction, v2: Fraction) -> Outcome:
        if v1 > v2:
            return HIRE_FIRST
        if v1 < v2:
            return HIRE_SECOND
        return SPLIT

    scf = SocialChoiceFunction(
        type_space,
        {
            (t1, t2): ranked(theta_value[t1], theta_value[t2])
            for t1 in types
            for t2 in types
        },
    )
    bids = (BID_ZERO, BID_HIGH)
    mechanism = Mechanism(
        (bids, bids),
        {
            (b1, b2): ranked(bid_value[b1], bid_value[b2])
            for b1 in bids
            for b2 in bids
        },
    )
    utilities = UtilityTable(
        {
            (i, x.label, t): x.payload[i] * params.w
            for i in (0, 1)
            for x in (HIRE_FIRST, SPLIT, HIRE_SECOND)
            for t in types
        }
    )
    costs = CostModel(
        strategic={
            (i, BID_HIGH, t): params.e_H / theta_value[t] for i in (0, 1) for t in types
        },
        misreport={
            (i, TYPE_LOW, TYPE_HIGH): params.c_mis for i in (0, 1)
        } | {
            (i, TYPE_HIGH, TYPE_LOW): Fraction(0) for i in (0, 1)
        },
    )
    game = BayesianGame(mechanism, type_space, utilities, costs)
    return LaborScenario(params, game, scf, theta_value, bid_value)


def separating_profile() -> StrategyProfile:
    """High types bid the high education level, low types bid zero."""
    choice = {TYPE_LOW: BID_ZERO, TYPE_HIGH: BID_HIGH}
    return StrategyProfile.from_maps([choice, choice])


def wage_window(params: LaborParams) -> tuple[Fraction, Fraction]:
    """The open wage interval where separation works: (2 e_H / theta_H, 2 e_H / theta_L)."""
    return (2 * params.e_H / params.theta_H, 2 * params.e_H / params.theta_L)


def in_wage_window(params: LaborParams) -> bool:
    lo, hi = wage_window(params)
    return lo < params.w < hi


@dataclass(frozen=True)
class BestResponseCase:
    """Ex-post payoffs of both bids for one (own type, opponent type) pair,
    the opponent playing the separating strategy. `optimal_bid` is None on a
    tie."""

    case: int
    own_type: str
    opponent_type: str
    payoff_bid_high: Fraction
    payoff_bid_zero: Fraction
    optimal_bid: str | None


@dataclass(frozen=True)
class SeparatingReport:
    """Does the separating profile implement the hiring rule in equilibrium?"""

    params: LaborParams
    window_low: Fraction
    window_high: Fraction
    in_window: bool
    separating_is_bne: bool
    bne_witness: Deviation | None
    implements_rule: bool
    ir_margin: Fraction
    ir_satisfied: bool
    best_response_cases: tuple[BestResponseCase, ...]
    notes: tuple[str, ...]


def check_separating_equilibrium(params: LaborParams) -> SeparatingReport:
    """Verify the separating side of the reference scenario.

    Checks, by exhaustive deviation scan in profit mode, that the separating
    bid profile is an equilibrium, that it reproduces the hiring rule at
    every type profile, and that the high type clears participation strictly
    (worst case: both high, split job).
    """
    scenario = build_scenario(params)
    profile = separating_profile()
    verdict = is_bayesian_nash(scenario.game, profile, EquilibriumMode.PROFIT_BASED)
    lo, hi = wage_window(params)

    cases = []
    pairs = [
        (1, TYPE_LOW, TYPE_LOW),
        (2, TYPE_LOW, TYPE_HIGH),
        (3, TYPE_HIGH, TYPE_LOW),
        (4, TYPE_HIGH, TYPE_HIGH),
    ]
    notes = [
        "participation uses the equilibrium high bid e_H for the high type",
        "equilibrium statements cover pure strategy profiles only",
    ]
    for case, own, opp in pairs:
        nf = expost_normal_form(
            scenario.game, (own, opp), apply_misreport=False, mode=EquilibriumMode.PROFIT_BASED
        )
        opp_bid = profile.strategies[1].action(opp)
        high = nf.payoff((BID_HIGH, opp_bid))[0]
        zero = nf.payoff((BID_ZERO, opp_bid))[0]
        if high == zero:
            optimal = None
            notes.append(f"case {case}: both bids tie at w={params.w}")
        else:
            optimal = BID_HIGH if high > zero else BID_ZERO
        cases.append(BestResponseCase(case, own, opp, high, zero, optimal))

    ir_margin = params.w / 2 - params.e_H / params.theta_H
    return SeparatingReport(
        params=params,
        window_low=lo,
        window_high=hi,
        in_window=in_wage_window(params),
        separating_is_bne=verdict.is_equilibrium,
        bne_witness=verdict.witness,
        implements_rule=implements_scf(scenario.game, profile, scenario.scf),
        ir_margin=ir_margin,
        ir_satisfied=ir_margin > 0,
        best_response_cases=tuple(cases),
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class CaseMatrix:
    """The ex-post report game at one realized type pair, with its dominance
    structure and pure Nash profiles."""

    case: int
    true_types: tuple[str, str]
    game: NormalFormGame
    dominant: tuple[DominantAction | None, ...]
    pure_nash: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class TruthfulnessReport:
    """Does truth-telling survive in the direct mechanism of the hiring rule?"""

    params: LaborParams
    cmis_below_half_w: bool
    truthful_is_bne: bool
    truthful_witness: Deviation | None
    all_report_high_is_bne: bool
    unique_bne_all_report_high: bool
    equilibria: tuple[StrategyProfile, ...]
    case_matrices: tuple[CaseMatrix, ...]
    notes: tuple[str, ...]


def all_report_high_profile() -> StrategyProfile:
    choice = {TYPE_LOW: TYPE_HIGH, TYPE_HIGH: TYPE_HIGH}
    return StrategyProfile.from_maps([choice, choice])


def check_truthful_reporting(params: LaborParams) -> TruthfulnessReport:
    """Verify the direct-mechanism side of the reference scenario.

    Scans all 16 pure report profiles of the direct game for equilibria in
    profit mode (report utilities minus misreporting costs) and builds the
    four ex-post report matrices, one per realized type pair, with dominance
    and pure Nash analysis. For c_mis below half the wage the only
    equilibrium is that everyone always reports high.
    """
    scenario = build_scenario(params)
    direct = scenario.direct()
    game = direct.game(scenario.game.utilities)
    ts = scenario.game.type_space

    truth = is_bayesian_nash(game, truthful_profile(ts), EquilibriumMode.PROFIT_BASED)
    equilibria = tuple(find_all_pure_bne(game, EquilibriumMode.PROFIT_BASED))
    high = all_report_high_profile()
    all_high_is_bne = high in equilibria

    matrices = []
    pairs = [
        (1, (TYPE_HIGH, TYPE_HIGH)),
        (2, (TYPE_LOW, TYPE_HIGH)),
        (3, (TYPE_HIGH, TYPE_LOW)),
        (4, (TYPE_LOW, TYPE_LOW)),
    ]
    for case, true_types in pairs:
        # Utility mode plus the misreport charge: the direct game has no
        # strategic costs of its own to subtract.
        nf = expost_normal_form(
            game, true_types, apply_misreport=True, mode=EquilibriumMode.UTILITY_BASED
        )
        matrices.append(
            CaseMatrix(
                case=case,
                true_types=true_types,
                game=nf,
                dominant=tuple(dominant_strategies(nf, i) for i in (0, 1)),
                pure_nash=tuple(find_pure_nash(nf)),
            )
        )

    return TruthfulnessReport(
        params=params,
        cmis_below_half_w=params.c_mis < params.w / 2,
        truthful_is_bne=truth.is_equilibrium,
        truthful_witness=truth.witness,
        all_report_high_is_bne=all_high_is_bne,
        unique_bne_all_report_high=(len(equilibria) == 1 and all_high_is_bne),
        equilibria=equilibria,
        case_matrices=tuple(matrices),
        notes=("uniqueness is certified over pure strategy profiles only",),
    )


def audit_scenario(params: LaborParams) -> AuditReport:
    """Full revelation audit of the labor scenario at its separating profile."""
    scenario = build_scenario(params)
    return audit_revelation_principle(scenario.game, separating_profile(), scenario.scf)
