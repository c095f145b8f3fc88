"""Parameter-free online learning by coin betting."""

from .coin_betting import BettingState, bet_and_settle, kt_wealth_guarantee_check, run_kt_bettor
from .lea import DoublingKTExperts, KTExperts, hedge_predict
from .numerics import ProbSimplex, kl_bernoulli, kl_discrete, lambert_w, log_gamma
from .olo import KTHilbertLearner, OnlineGradientDescent, PotentialHilbertLearner
from .potentials import (
    ExpSquarePotential,
    KTPotential,
    PotentialDescriptor,
    PotentialKind,
    check_excellence,
)

__version__ = "0.1.0"
