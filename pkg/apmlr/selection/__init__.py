"""Example selection policies."""

import logging

from apmlr.selection.apm import APM, APM_LR_U, APM_LR_V
from apmlr.selection.baseline import MaxVar, Random, Uncertainty
from apmlr.selection.bayesian import BALD, InfoGain
from apmlr.selection.policy import (POLICY_KINDS, PolicySpec,
                                    SelectionContext, canonicalKind,
                                    exploit_metric)

log = logging.getLogger(__name__)

_POLICIES = {
    "APM_LR": APM,
    "APM_LR_U": APM_LR_U,
    "APM_LR_V": APM_LR_V,
    "Uncertainty": Uncertainty,
    "Random": Random,
    "MaxVar": MaxVar,
    "InfoGain": InfoGain,
    "BALD": BALD,
}


def createPolicy(spec):
    """
    Create and return a SelectionPolicy by the kind of a PolicySpec.
    Input:
        spec: a PolicySpec
    Output:
        an object of SelectionPolicy subclass (such as APM).
    """
    kind = canonicalKind(spec.kind)
    if kind not in _POLICIES:
        errMsg = "Policy for {0} is not implemented.".format(kind)
        log.error(errMsg)
        raise ValueError(errMsg)
    return _POLICIES[kind](spec)


def select(ctx, spec):
    """Return the pool index selected by the policy of spec."""
    return createPolicy(spec).select(ctx)


__all__ = ["POLICY_KINDS", "PolicySpec", "SelectionContext", "createPolicy",
           "exploit_metric", "select"]
