"""Claim-taxonomy text classification with actively tuned decision thresholds.

The package turns a user-defined taxonomy of natural-language claims plus a
document-by-claim score matrix into class labels.  The load-bearing piece is a
probabilistic bisection engine that spends a small annotation budget per claim
to locate the score threshold above which the claim should count as detected.
"""

__version__ = "0.1.0"

WIRE_FORMAT = "claimsect/v1"
